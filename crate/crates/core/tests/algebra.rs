use lcsurf_core::algebra::{gram_matrix, gram_schmidt_indefinite, inertia, rank_of_span, Signature, SpaceVector};
use lcsurf_core::jet::{Jet, Variable};
use proptest::prelude::*;

fn signature() -> impl Strategy<Value = Signature> {
    (1usize..5, 0usize..3).prop_map(|(p, q)| Signature::new(p, q))
}

fn vectors(dim: usize, count: usize) -> impl Strategy<Value = Vec<SpaceVector<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), count)
        .prop_map(|rows| rows.into_iter().map(SpaceVector::new).collect())
}

fn sig_and_full_set() -> impl Strategy<Value = (Signature, Vec<SpaceVector<f64>>)> {
    signature().prop_flat_map(|s| (Just(s), vectors(s.dim(), s.dim())))
}

proptest! {
    #[test]
    fn frame_signs_match_gram_inertia((s, vs) in sig_and_full_set()) {
        let g = gram_matrix(&vs, s).unwrap();
        // skip nearly singular draws; the theorem is about non-degenerate spans
        let det = g.determinant().abs();
        prop_assume!(det > 1e-3);
        let frame = gram_schmidt_indefinite(&vs, s, 1e-10).unwrap();
        prop_assert_eq!(frame.len(), s.dim());
        let plus = frame.iter().filter(|e| e.sign > 0).count();
        prop_assert_eq!((plus, frame.len() - plus), inertia(&g, 1e-9));
        for (a, ea) in frame.iter().enumerate() {
            for (b, eb) in frame.iter().enumerate() {
                let x = s.inner(&ea.vector, &eb.vector).unwrap();
                let want = if a == b { ea.sign as f64 } else { 0.0 };
                prop_assert!((x - want).abs() < 1e-8, "<e{},e{}> = {}", a, b, x);
            }
        }
    }

    #[test]
    fn rank_ignores_order_and_scale(
        vs in vectors(6, 5),
        perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
        scales in prop::collection::vec(0.1f64..10.0, 5),
    ) {
        let base = rank_of_span(&vs, 1e-10).unwrap();
        let moved: Vec<SpaceVector<f64>> = perm.iter().zip(&scales).map(|(&i, &k)| vs[i].scale_real(k)).collect();
        prop_assert_eq!(rank_of_span(&moved, 1e-10).unwrap(), base);
        let mut doubled = vs.clone();
        doubled.push(vs[0].add(&vs[1]));
        prop_assert_eq!(rank_of_span(&doubled, 1e-10).unwrap(), base);
    }

    #[test]
    fn jet_ring_laws(a in -2.0f64..2.0, b in 0.5f64..2.0, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let x = Jet::variable(Variable::U, u, 5);
        let y = Jet::variable(Variable::V, v, 5);
        let f = (&x * a + &y).sin() + &x * &y;
        let g = (&y * &y + b).sqrt();
        let back = &(&f * &g) / &g;
        for (p, q) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((p - q).abs() < 1e-9 * q.abs().max(1.0));
        }
        let round = g.ln().exp();
        for (p, q) in round.coeffs().iter().zip(g.coeffs()) {
            prop_assert!((p - q).abs() < 1e-9 * q.abs().max(1.0));
        }
        // Δ = 4 ∂z∂z̄
        let lap = f.laplacian();
        let w = f.dz().dzbar();
        for d in 0..=lap.order() {
            for j in 0..=d {
                let l = lap.extract(d - j, j).unwrap();
                let z = w.extract(d - j, j).unwrap();
                prop_assert!((l - 4.0 * z.re).abs() < 1e-9 * l.abs().max(1.0) && z.im.abs() < 1e-9);
            }
        }
    }
}

#[test]
fn null_vectors_are_paired_not_normalized() {
    let s = Signature::new(1, 1);
    let vs = vec![SpaceVector::new(vec![1.0, 1.0]), SpaceVector::new(vec![1.0, -1.0])];
    let frame = gram_schmidt_indefinite(&vs, s, 1e-10).unwrap();
    let mut signs: Vec<i8> = frame.iter().map(|e| e.sign).collect();
    signs.sort();
    assert_eq!(signs, vec![-1, 1]);
}
