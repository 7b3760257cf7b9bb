#![allow(dead_code)]

use lcsurf_core::dsl::{BinOp, Expr};
use lcsurf_core::jet::{ElemFn, Variable};
use proptest::prelude::*;
use astro_float::{BigFloat, Consts, RoundingMode};
use rand::Rng;

/// Random expression over `u`, `v`. Divisions, logs, square roots and
/// negative powers only see arguments of the form `c + e²` with `c ≥ 1/2`,
/// so every generated expression is analytic near the origin box.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Expr::Var(Variable::U),
            1 => Expr::Var(Variable::V),
            _ => Expr::Num((rng.gen_range(-20..=20) as f64) / 8.0).simplify_sign(),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => Expr::binary(BinOp::Add, random_expr(rng, d), random_expr(rng, d)),
        1 => Expr::binary(BinOp::Sub, random_expr(rng, d), random_expr(rng, d)),
        2 | 3 => Expr::binary(BinOp::Mul, random_expr(rng, d), random_expr(rng, d)),
        4 => Expr::binary(BinOp::Div, random_expr(rng, d), positive(rng, d)),
        5 => Expr::Neg(Box::new(random_expr(rng, d))),
        6 => {
            let k = rng.gen_range(-2..=3);
            if k < 0 {
                Expr::Pow(Box::new(positive(rng, d)), k)
            } else {
                Expr::Pow(Box::new(random_expr(rng, d)), k)
            }
        }
        _ => {
            let f = ElemFn::ALL[rng.gen_range(0..ElemFn::ALL.len())];
            match f {
                ElemFn::Log | ElemFn::Sqrt => Expr::call(f, positive(rng, d)),
                ElemFn::Exp | ElemFn::Sinh | ElemFn::Cosh => {
                    // keep growth moderate
                    Expr::call(f, Expr::call(ElemFn::Sin, random_expr(rng, d)))
                }
                _ => Expr::call(f, random_expr(rng, d)),
            }
        }
    }
}

fn positive<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    let c = 0.5 + rng.gen_range(0..8) as f64 / 4.0;
    let e = random_expr(rng, depth.saturating_sub(1));
    Expr::binary(BinOp::Add, Expr::Num(c), Expr::Pow(Box::new(e), 2))
}

trait SimplifySign {
    fn simplify_sign(self) -> Expr;
}

impl SimplifySign for Expr {
    /// Negative literals print as a unary minus, so keep them in that form.
    fn simplify_sign(self) -> Expr {
        match self {
            Expr::Num(x) if x < 0.0 => Expr::Neg(Box::new(Expr::Num(-x))),
            e => e,
        }
    }
}

/// Arbitrary syntax trees in the shape the parser produces.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var(Variable::U)),
        Just(Expr::Var(Variable::V)),
        (0u32..10_000).prop_map(|k| Expr::Num(k as f64 / 64.0)),
        (1e-6f64..1e6).prop_map(Expr::Num),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div)
        ];
        prop_oneof![
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::binary(o, a, b)),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), -3i32..5).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            (0..ElemFn::ALL.len(), inner).prop_map(|(i, a)| Expr::call(ElemFn::ALL[i], a)),
        ]
    })
}

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

/// Independent evaluator in 320-bit arithmetic.
fn eval_big(e: &Expr, u: &BigFloat, v: &BigFloat, cc: &mut Consts) -> BigFloat {
    match e {
        Expr::Num(x) => big(*x),
        Expr::Const { value, .. } => big(*value),
        Expr::Var(Variable::U) => u.clone(),
        Expr::Var(Variable::V) => v.clone(),
        Expr::Neg(a) => eval_big(a, u, v, cc).neg(),
        Expr::Binary(op, a, b) => {
            let a = eval_big(a, u, v, cc);
            let b = eval_big(b, u, v, cc);
            match op {
                BinOp::Add => a.add(&b, PREC, RM),
                BinOp::Sub => a.sub(&b, PREC, RM),
                BinOp::Mul => a.mul(&b, PREC, RM),
                BinOp::Div => a.div(&b, PREC, RM),
            }
        }
        Expr::Pow(a, k) => {
            let p = eval_big(a, u, v, cc).powi(k.unsigned_abs() as usize, PREC, RM);
            if *k < 0 {
                big(1.0).div(&p, PREC, RM)
            } else {
                p
            }
        }
        Expr::Call(f, a) => {
            let x = eval_big(a, u, v, cc);
            match f {
                ElemFn::Exp => x.exp(PREC, RM, cc),
                ElemFn::Log => x.ln(PREC, RM, cc),
                ElemFn::Sqrt => x.sqrt(PREC, RM),
                ElemFn::Sin => x.sin(PREC, RM, cc),
                ElemFn::Cos => x.cos(PREC, RM, cc),
                ElemFn::Sinh => x.sinh(PREC, RM, cc),
                ElemFn::Cosh => x.cosh(PREC, RM, cc),
            }
        }
    }
}

/// Central-difference weights `(offset, weight)` for the `k`-th derivative
/// with unit step: `δ^k f = Σ (−1)^j C(k, j) f((k/2 − j))`.
fn stencil(k: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push((k as f64 / 2.0 - j as f64, sign * binom));
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    out
}

/// `∂^{i+j} e / ∂u^i ∂v^j` at `(u, v)` by tensor central differences with
/// step `2^-24`, evaluated in 320-bit arithmetic so rounding plays no role;
/// the truncation error is `O(h²)`.
pub fn fd_partial(e: &Expr, (u, v): (f64, f64), i: usize, j: usize) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let h = f64::powi(2.0, -24);
    let mut acc = big(0.0);
    for (a, wa) in stencil(i) {
        for (b, wb) in stencil(j) {
            let pu = big(u).add(&big(a * h), PREC, RM);
            let pv = big(v).add(&big(b * h), PREC, RM);
            let f = eval_big(e, &pu, &pv, &mut cc);
            acc = acc.add(&f.mul(&big(wa * wb), PREC, RM), PREC, RM);
        }
    }
    let scaled = acc.div(&big(h.powi((i + j) as i32)), PREC, RM);
    to_f64(&scaled)
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// Random element of `O(p, q)`: a product of plane rotations over every
/// pair of slots, with boosts kept moderate.
pub fn random_transform<R: Rng>(rng: &mut R, s: lcsurf_core::Signature) -> lcsurf_core::pipeline::LiftTransform {
    use lcsurf_core::pipeline::LiftTransform;
    let mut t = LiftTransform::identity(s.dim());
    for i in 0..s.dim() {
        for j in i + 1..s.dim() {
            let angle = if s.sign(i) == s.sign(j) {
                rng.gen_range(-3.0..3.0)
            } else {
                rng.gen_range(-0.5..0.5)
            };
            t = t.then(&LiftTransform::plane_rotation(s, i, j, angle));
        }
    }
    t
}

/// Worst relative mismatch `|jet − fd| / max(|fd|, 1e-9)` between jet
/// coefficients up to `order` and finite differences, over `count` random
/// expressions evaluated at random points.
pub fn worst_fd_mismatch(seed: u64, count: usize, order: usize) -> (f64, String) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0, String::new());
    let mut done = 0;
    while done < count {
        let e = random_expr(&mut rng, 4);
        let at = (rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
        let Ok(jet) = lcsurf_core::dsl::eval_jet::<f64>(&e, at, order) else {
            continue;
        };
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let exact = jet.extract(i, j).expect("within order");
                let fd = fd_partial(&e, at, i, j);
                let rel = (exact - fd).abs() / fd.abs().max(1e-9);
                if !(rel <= worst.0) {
                    worst = (rel, format!("{e} at {at:?}, d^({i},{j}): jet {exact} fd {fd}"));
                }
            }
        }
        done += 1;
    }
    worst
}
