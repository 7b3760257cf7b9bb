//! Named surfaces with known classification, plus negative and degenerate controls.
//!
//! Every chart is isothermal with flat or explicitly known induced metric.
//! The chart text is the source of truth: constructors build the text and
//! parse it, so the shipped `.chart` files are exactly what the constructors
//! produce.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::Branch;
use crate::dsl::{parse_chart, ChartSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("parameter r = {r} outside {range}")]
    OutOfRange { r: f64, range: &'static str },
}

/// What a fixture is expected to do under the default configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub branch: Branch,
    pub essential_rank: Option<usize>,
    /// Bound on every structure residual.
    pub structure_bound: f64,
    /// Bound on every fundamental residual.
    pub fundamental_bound: f64,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub chart: ChartSpec,
    pub expectation: Expectation,
}

impl Fixture {
    pub fn name(&self) -> &str {
        &self.chart.name
    }

    pub fn file_name(&self) -> String {
        format!("{}.chart", self.chart.name)
    }
}

fn chart(text: &str) -> ChartSpec {
    parse_chart(text).expect("fixture chart text parses")
}

fn expect(branch: Branch, rank: Option<usize>, role: &str) -> Expectation {
    Expectation {
        branch,
        essential_rank: rank,
        structure_bound: 1e-8,
        fundamental_bound: 1e-7,
        role: role.to_string(),
    }
}

/// `H¹ × R` in `R³₁`: `x = (sinh u, v, cosh u)`, induced metric `du² + dv²`.
pub fn hyperbolic_cylinder() -> ChartSpec {
    chart(
        "name = hyperbolic_cylinder
space = R
n = 3
x1 = sinh(u)
x2 = v
x3 = cosh(u)
domain = -1 1 -1 1
grid = 9 9
",
    )
}

fn r_label(r: f64) -> String {
    format!("{r}")
}

/// `H¹(√r) × S¹(√(1+r))` in `S³₁` with arc-length parameters.
pub fn desitter_product(r: f64) -> Result<ChartSpec, FixtureError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FixtureError::OutOfRange { r, range: "(0, ∞)" });
    }
    Ok(chart(&format!(
        "name = desitter_product_r{}
space = S
n = 3
const r = {r}
x1 = sqrt(1 + r)*cos(v/sqrt(1 + r))
x2 = sqrt(1 + r)*sin(v/sqrt(1 + r))
x3 = sqrt(r)*sinh(u/sqrt(r))
x4 = sqrt(r)*cosh(u/sqrt(r))
domain = -1 1 -1 1
grid = 9 9
",
        r_label(r)
    )))
}

/// `H¹(√(1+r)) × H¹(√(−r))` in `H³₁`, slots `(+, +, −, −)`.
pub fn antidesitter_torus(r: f64) -> Result<ChartSpec, FixtureError> {
    if !((-0.5..0.0).contains(&r)) {
        return Err(FixtureError::OutOfRange { r, range: "[-1/2, 0)" });
    }
    Ok(chart(&format!(
        "name = antidesitter_torus_r{}
space = H
n = 3
const r = {r}
x1 = sqrt(-r)*sinh(u/sqrt(-r))
x2 = sqrt(1 + r)*sinh(v/sqrt(1 + r))
x3 = sqrt(-r)*cosh(u/sqrt(-r))
x4 = sqrt(1 + r)*cosh(v/sqrt(1 + r))
domain = -1 1 -1 1
grid = 9 9
",
        r_label(r)
    )))
}

/// Boost-invariant surface in `R³₁` with non-vanishing form.
///
/// `x = (v sinh u, h(v), v cosh u)` with `h' = √(1+v²)`, so the induced
/// metric is `v²(du² + dv²)`: isothermal on `v > 0`.
pub fn graph_control() -> ChartSpec {
    chart(
        "name = graph_control
space = R
n = 3
x1 = v*sinh(u)
x2 = (v*sqrt(1 + v^2) + log(v + sqrt(1 + v^2)))/2
x3 = v*cosh(u)
domain = -1 1 0.5 1.5
grid = 9 9
",
    )
}

/// The totally geodesic plane `x = (u, v, 0)`: conformally degenerate.
pub fn plane_control() -> ChartSpec {
    chart(
        "name = plane_control
space = R
n = 3
x1 = u
x2 = v
x3 = 0
domain = -1 1 -1 1
grid = 9 9
",
    )
}

/// The hyperbolic cylinder inside `R⁴₁`; the extra space-like slot is zero.
pub fn padded_cylinder() -> ChartSpec {
    chart(
        "name = padded_cylinder
space = R
n = 4
x1 = sinh(u)
x2 = v
x3 = 0
x4 = cosh(u)
domain = -1 1 -1 1
grid = 9 9
",
    )
}

/// [`graph_control`] inside `R⁴₁`: two normals of opposite sign and `Φ ≠ 0`.
pub fn padded_graph_control() -> ChartSpec {
    chart(
        "name = padded_graph_control
space = R
n = 4
x1 = v*sinh(u)
x2 = (v*sqrt(1 + v^2) + log(v + sqrt(1 + v^2)))/2
x3 = 0
x4 = v*cosh(u)
domain = -1 1 0.5 1.5
grid = 9 9
",
    )
}

pub const DESITTER_RADII: [f64; 3] = [0.5, 1.0, 2.0];
pub const ANTIDESITTER_RADII: [f64; 2] = [-0.25, -0.5];

/// Every shipped fixture.
pub fn catalog() -> Vec<Fixture> {
    use Branch::*;
    let mut out = vec![Fixture {
        chart: hyperbolic_cylinder(),
        expectation: expect(VanishingFormNonIsotropic, Some(5), "vanishing form, cylinder in R^3_1"),
    }];
    for r in DESITTER_RADII {
        out.push(Fixture {
            chart: desitter_product(r).expect("admissible radius"),
            expectation: expect(VanishingFormNonIsotropic, Some(5), "vanishing form, product in S^3_1"),
        });
    }
    for r in ANTIDESITTER_RADII {
        // equal radii at r = -1/2: the factor swap is an isometry, which forces
        // psi = 0 and puts the torus in the isotropic case as well
        let (branch, role) = if r == -0.5 {
            (VanishingFormIsotropic, "vanishing form, torus in H^3_1 with psi = 0")
        } else {
            (VanishingFormNonIsotropic, "vanishing form, torus in H^3_1")
        };
        out.push(Fixture {
            chart: antidesitter_torus(r).expect("admissible radius"),
            expectation: expect(branch, Some(5), role),
        });
    }
    out.push(Fixture {
        chart: graph_control(),
        expectation: expect(NonVanishingForm, Some(5), "negative control, form does not vanish"),
    });
    out.push(Fixture {
        chart: plane_control(),
        expectation: expect(Degenerate, None, "degenerate control, conformal metric vanishes"),
    });
    out.push(Fixture {
        chart: padded_cylinder(),
        expectation: expect(VanishingFormNonIsotropic, Some(5), "fullness control, lies in a hyperplane"),
    });
    out.push(Fixture {
        chart: padded_graph_control(),
        expectation: expect(NonVanishingForm, Some(5), "gauge control, two normals of opposite sign"),
    });
    out
}

pub fn by_name(name: &str) -> Option<Fixture> {
    catalog().into_iter().find(|f| f.name() == name)
}
