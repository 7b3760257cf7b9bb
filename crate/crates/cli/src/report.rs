//! Report assembly and the three output formats.
//!
//! Every JSON report carries the same top-level keys; sections a command
//! does not compute are `null`.

use std::fmt::Write as _;
use std::path::Path;

use lcsurf_core::analysis::{ChartAnalysis, PointData, RunConfig, Tolerances};
use lcsurf_core::classifier::ClassificationReport;
use lcsurf_core::dsl::ChartSpec;
use lcsurf_core::invariants::{ResidualKey, ResidualReport, C64};
use serde::Serialize;

use crate::Format;

#[derive(Debug, Serialize)]
pub struct ChartEcho {
    pub name: String,
    pub space: String,
    pub n: usize,
    pub constants: Vec<(String, f64)>,
    pub coordinates: Vec<String>,
    pub domain: [f64; 4],
    pub grid: [usize; 2],
}

/// Everything that decides the numbers in the report. The worker count is
/// left out on purpose: it never changes a result.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub chart_path: String,
    pub order: usize,
    pub tolerances: Tolerances,
    pub residual_bound: f64,
    pub at: Option<[f64; 2]>,
}

impl ConfigEcho {
    pub fn new(command: &str, path: &Path, cfg: &RunConfig, at: Option<(f64, f64)>) -> Self {
        ConfigEcho {
            command: command.to_string(),
            chart_path: path.display().to_string(),
            order: cfg.order,
            tolerances: cfg.tolerances,
            residual_bound: crate::RESIDUAL_BOUND,
            at: at.map(|(u, v)| [u, v]),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointStatus {
    pub at: [f64; 2],
    pub ok: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub total: usize,
    pub regular: usize,
    pub points: Vec<PointStatus>,
}

#[derive(Debug, Serialize)]
pub struct Field {
    pub name: String,
    pub re: f64,
    pub im: f64,
    /// True when the value depends on the choice of normal frame.
    pub gauge_dependent: bool,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub at: [f64; 2],
    pub signs: Vec<i8>,
    pub fields: Vec<Field>,
}

#[derive(Debug, Serialize)]
pub struct ResidualRow {
    pub key: &'static str,
    pub kind: &'static str,
    pub max: f64,
    pub at: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct ResidualSection {
    pub bound: f64,
    pub worst_identity: f64,
    pub pass: bool,
    pub entries: Vec<ResidualRow>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub chart: ChartEcho,
    pub config: ConfigEcho,
    pub check: Option<CheckSummary>,
    pub point: Option<PointReport>,
    pub residuals: Option<ResidualSection>,
    pub classification: Option<ClassificationReport>,
}

fn kind(key: ResidualKey) -> &'static str {
    if key.is_structure() {
        "structure"
    } else if key.is_fundamental() {
        "fundamental"
    } else if key == ResidualKey::W2_8 {
        "willmore"
    } else {
        "vanishing_form"
    }
}

fn field(name: String, z: C64, gauge_dependent: bool) -> Field {
    Field {
        name,
        re: z.re,
        im: z.im,
        gauge_dependent,
    }
}

/// Short human form: fixed point for moderate magnitudes, scientific otherwise.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{x:.6e}")
    }
}

fn complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {}i", num(re), num(im.abs()))
}

fn real(name: &str, x: f64) -> Field {
    field(name.to_string(), C64 { re: x, im: 0.0 }, false)
}

impl Report {
    pub fn new(chart: &ChartSpec, config: ConfigEcho) -> Self {
        let d = &chart.domain;
        Report {
            chart: ChartEcho {
                name: chart.name.clone(),
                space: chart.space.to_string(),
                n: chart.n,
                constants: chart.constants.clone(),
                coordinates: chart.coords.iter().map(|e| e.to_string()).collect(),
                domain: [d.u0, d.u1, d.v0, d.v1],
                grid: [chart.grid.0, chart.grid.1],
            },
            config,
            check: None,
            point: None,
            residuals: None,
            classification: None,
        }
    }

    pub fn set_check(&mut self, a: &ChartAnalysis) {
        let points: Vec<PointStatus> = a
            .points
            .iter()
            .map(|p| PointStatus {
                at: [p.at.0, p.at.1],
                ok: p.outcome.is_ok(),
                reason: p.outcome.as_ref().err().map(|e| e.to_string()),
            })
            .collect();
        self.check = Some(CheckSummary {
            total: points.len(),
            regular: points.iter().filter(|p| p.ok).count(),
            points,
        });
    }

    pub fn set_point(&mut self, at: (f64, f64), d: &PointData) {
        let v = &d.invariants;
        let mut fields = vec![field("psi".into(), v.psi, false)];
        for (a, x) in v.phi.iter().enumerate() {
            fields.push(field(format!("phi[{}]", a + 1), *x, true));
        }
        for (a, x) in v.big_omega.iter().enumerate() {
            fields.push(field(format!("Omega[{}]", a + 1), *x, true));
        }
        for (a, row) in v.a.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                fields.push(field(format!("A[{}][{}]", a + 1, b + 1), *x, true));
            }
        }
        fields.push(real("omega", v.omega));
        fields.push(real("K", v.curvature));
        fields.push(real("|Phi|^2", v.phi_norm_sq));
        fields.push(field("sum Omega^a Omega_a".into(), v.quartic, false));
        self.point = Some(PointReport {
            at: [at.0, at.1],
            signs: v.signs.clone(),
            fields,
        });
    }

    pub fn set_residuals(&mut self, r: &ResidualReport, bound: f64) {
        let worst = r.worst_identity();
        self.residuals = Some(ResidualSection {
            bound,
            worst_identity: worst,
            pass: worst <= bound,
            entries: r
                .entries
                .iter()
                .map(|e| ResidualRow {
                    key: e.key.label(),
                    kind: kind(e.key),
                    max: e.max,
                    at: [e.at.0, e.at.1],
                })
                .collect(),
        });
    }

    pub fn set_classification(&mut self, c: ClassificationReport) {
        self.classification = Some(c);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    /// One table per command with a fixed header.
    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |cells: &[String]| w.write_record(cells).expect("in-memory write");
        let s = |x: &dyn ToString| x.to_string();
        match self.config.command.as_str() {
            "invariants" => {
                row(&["field", "re", "im", "gauge_dependent"].map(String::from));
                for f in self.point.iter().flat_map(|p| &p.fields) {
                    row(&[f.name.clone(), s(&f.re), s(&f.im), s(&f.gauge_dependent)]);
                }
            }
            "verify" if self.residuals.is_some() => {
                row(&["key", "kind", "max", "u", "v"].map(String::from));
                for e in self.residuals.iter().flat_map(|r| &r.entries) {
                    row(&[e.key.into(), e.kind.into(), s(&e.max), s(&e.at[0]), s(&e.at[1])]);
                }
            }
            "classify" if self.classification.is_some() => {
                row(&["quantity", "value"].map(String::from));
                let c = self.classification.as_ref().expect("checked");
                let opt = |x: Option<String>| x.unwrap_or_default();
                let items: Vec<(&str, String)> = vec![
                    ("branch", c.branch.name().into()),
                    ("n", s(&c.n)),
                    ("samples", s(&c.samples)),
                    ("failures", s(&c.failures.len())),
                    ("phi_max", s(&c.phi_max)),
                    ("phi_norm_sq_max", s(&c.phi_norm_sq_max)),
                    ("psi_max", s(&c.psi_max)),
                    ("psi_min", s(&c.psi_min)),
                    ("psi_holo_max", s(&c.psi_holo_max)),
                    ("psi_zeros", opt(c.psi_zeros.map(|z| format!("{z:?}")))),
                    ("isotropic", opt(c.isotropic.as_ref().map(|i| s(&i.is_isotropic)))),
                    ("isotropy_dispersion", opt(c.isotropic.as_ref().map(|i| s(&i.dispersion)))),
                    ("essential_rank", s(&c.essential_rank)),
                    ("full", s(&c.full)),
                    ("n3_consistent", opt(c.n3_consistent.map(|b| s(&b)))),
                    ("warnings", c.warnings.join("; ")),
                ];
                for (k, v) in items {
                    row(&[k.into(), v]);
                }
            }
            _ => {
                row(&["u", "v", "ok", "reason"].map(String::from));
                for p in self.check.iter().flat_map(|c| &c.points) {
                    row(&[s(&p.at[0]), s(&p.at[1]), s(&p.ok), p.reason.clone().unwrap_or_default()]);
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn text(&self) -> String {
        let mut t = String::new();
        let c = &self.chart;
        let _ = writeln!(t, "chart {} ({} space, n = {}, grid {}x{})", c.name, c.space, c.n, c.grid[0], c.grid[1]);
        if let Some(ch) = &self.check {
            let _ = writeln!(t, "regular points: {} of {}", ch.regular, ch.total);
            if let Some(p) = ch.points.iter().find(|p| !p.ok) {
                let _ = writeln!(
                    t,
                    "first failure at ({}, {}): {}",
                    p.at[0],
                    p.at[1],
                    p.reason.as_deref().unwrap_or("")
                );
            }
        }
        if let Some(p) = &self.point {
            let _ = writeln!(t, "invariants at ({}, {}), normal signs {:?}", p.at[0], p.at[1], p.signs);
            for f in &p.fields {
                let gauge = if f.gauge_dependent { "  [gauge-dependent]" } else { "" };
                let value = if f.im == 0.0 && !f.gauge_dependent && f.name != "psi" {
                    num(f.re)
                } else {
                    complex(f.re, f.im)
                };
                let _ = writeln!(t, "  {:<22} {value}{gauge}", f.name);
            }
        }
        if let Some(r) = &self.residuals {
            let _ = writeln!(t, "residuals (bound {:e} on structure and fundamental):", r.bound);
            for e in &r.entries {
                let _ = writeln!(t, "  {:<6} {:<14} {:>10.3e}  at ({}, {})", e.key, e.kind, e.max, e.at[0], e.at[1]);
            }
            let _ = writeln!(t, "worst identity residual {:.3e}: {}", r.worst_identity, if r.pass { "ok" } else { "FAIL" });
        }
        if let Some(k) = &self.classification {
            let _ = writeln!(t, "branch: {}", k.branch.name());
            let _ = writeln!(t, "  phi_max {:.3e}, psi in [{:.3e}, {:.3e}], max |psi_zbar| {:.3e}", k.phi_max, k.psi_min, k.psi_max, k.psi_holo_max);
            if let Some(i) = &k.isotropic {
                let _ = writeln!(t, "  isotropy dispersion {:.3e} (K spread {:.3e})", i.dispersion, i.k_dispersion);
            }
            let _ = writeln!(t, "  essential rank {} of {}{}", k.essential_rank, k.n + 2, if k.full { " (full)" } else { "" });
            if let Some(ok) = k.n3_consistent {
                let _ = writeln!(t, "  full with nonvanishing psi requires n = 3: {}", if ok { "holds" } else { "violated" });
            }
            for w in &k.warnings {
                let _ = writeln!(t, "warning: {w}");
            }
        }
        t
    }
}
