//! Flat `key = value` chart files.
//!
//! ```text
//! name = hyperbolic_cylinder
//! space = R            # R | S | H
//! n = 3
//! const r = 1.0        # zero or more
//! x1 = sinh(u)
//! x2 = v
//! x3 = cosh(u)
//! domain = -1 1 -1 1   # u0 u1 v0 v1
//! grid = 9 9
//! ```
//!
//! Lists may also be written with brackets and commas (`grid = [9, 9]`).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::expr::{parse_expression_with, Expr, ExprError};
use crate::jet::ElemFn;

/// Ambient space form of a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceTag {
    /// Minkowski space R^n_1.
    R,
    /// De Sitter space S^n_1.
    S,
    /// Anti-de Sitter space H^n_1.
    H,
}

impl SpaceTag {
    /// Number of model coordinates for conformal dimension `n`.
    pub fn coordinate_count(self, n: usize) -> usize {
        match self {
            SpaceTag::R => n,
            SpaceTag::S | SpaceTag::H => n + 1,
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceTag::R => "R",
            SpaceTag::S => "S",
            SpaceTag::H => "H",
        })
    }
}

impl FromStr for SpaceTag {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "R" => Ok(SpaceTag::R),
            "S" => Ok(SpaceTag::S),
            "H" => Ok(SpaceTag::H),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        (self.u0..=self.u1).contains(&u) && (self.v0..=self.v1).contains(&v)
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.u0 + self.u1) / 2.0, (self.v0 + self.v1) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub name: String,
    pub space: SpaceTag,
    pub n: usize,
    /// Declared constants in file order.
    pub constants: Vec<(String, f64)>,
    pub coords: Vec<Expr>,
    pub domain: Domain,
    pub grid: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartErrorKind {
    #[error("expected 'key = value'")]
    Syntax,
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("missing key '{0}'")]
    MissingKey(String),
    #[error("malformed number '{0}'")]
    MalformedNumber(String),
    #[error("space must be R, S or H, got '{0}'")]
    BadSpace(String),
    #[error("n must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("expected {expected} coordinates, found {found}")]
    CoordinateCount { expected: usize, found: usize },
    #[error("coordinate keys must be contiguous from x1; x{0} is missing")]
    NonContiguous(usize),
    #[error("{key} expects {expected} values, found {found}")]
    ValueCount { key: &'static str, expected: usize, found: usize },
    #[error("grid counts must be ≥ 2")]
    GridTooSmall,
    #[error("domain must satisfy u0 < u1 and v0 < v1")]
    DegenerateDomain,
    #[error("constant name '{0}' is reserved or not an identifier")]
    BadConstantName(String),
    #[error("in expression: {0}")]
    Expr(ExprError),
}

/// Chart parse failure; `line` is 1-based when the failure is tied to one line.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ChartError {
    pub line: Option<usize>,
    pub kind: ChartErrorKind,
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

fn at(line: usize, kind: ChartErrorKind) -> ChartError {
    ChartError { line: Some(line), kind }
}

fn parse_number(s: &str, line: usize) -> Result<f64, ChartError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| at(line, ChartErrorKind::MalformedNumber(s.to_string())))
}

fn parse_list<'a>(value: &'a str, key: &'static str, expected: usize, line: usize) -> Result<Vec<&'a str>, ChartError> {
    let trimmed = value.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(trimmed);
    let items: Vec<&str> = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if items.len() != expected {
        return Err(at(
            line,
            ChartErrorKind::ValueCount {
                key,
                expected,
                found: items.len(),
            },
        ));
    }
    Ok(items)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses chart text. Coordinate expressions may reference constants declared
/// anywhere in the file; constants are inlined into the AST.
pub fn parse_chart(text: &str) -> Result<ChartSpec, ChartError> {
    let mut name = None;
    let mut space = None;
    let mut n = None;
    let mut domain = None;
    let mut grid = None;
    let mut constants: Vec<(String, f64)> = Vec::new();
    let mut coord_src: BTreeMap<usize, (String, usize)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| at(line, ChartErrorKind::Syntax))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(at(line, ChartErrorKind::Syntax));
        }
        let dup = |k: &str| at(line, ChartErrorKind::DuplicateKey(k.to_string()));

        if let Some(cname) = key.strip_prefix("const ") {
            let cname = cname.trim();
            let reserved = cname == "u" || cname == "v" || ElemFn::from_name(cname).is_some();
            if !is_identifier(cname) || reserved {
                return Err(at(line, ChartErrorKind::BadConstantName(cname.to_string())));
            }
            if constants.iter().any(|(c, _)| c == cname) {
                return Err(dup(key));
            }
            constants.push((cname.to_string(), parse_number(value, line)?));
            continue;
        }
        if let Some(k) = key.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if k == 0 {
                return Err(at(line, ChartErrorKind::UnknownKey(key.to_string())));
            }
            if coord_src.insert(k, (value.to_string(), line)).is_some() {
                return Err(dup(key));
            }
            continue;
        }
        match key {
            "name" => {
                if name.replace(value.to_string()).is_some() {
                    return Err(dup(key));
                }
            }
            "space" => {
                let tag = value
                    .parse::<SpaceTag>()
                    .map_err(|_| at(line, ChartErrorKind::BadSpace(value.to_string())))?;
                if space.replace(tag).is_some() {
                    return Err(dup(key));
                }
            }
            "n" => {
                let k = value
                    .parse::<usize>()
                    .map_err(|_| at(line, ChartErrorKind::MalformedNumber(value.to_string())))?;
                if k < 3 {
                    return Err(at(line, ChartErrorKind::DimensionTooSmall(k)));
                }
                if n.replace((k, line)).is_some() {
                    return Err(dup(key));
                }
            }
            "domain" => {
                let items = parse_list(value, "domain", 4, line)?;
                let xs = items
                    .iter()
                    .map(|s| parse_number(s, line))
                    .collect::<Result<Vec<_>, _>>()?;
                let d = Domain {
                    u0: xs[0],
                    u1: xs[1],
                    v0: xs[2],
                    v1: xs[3],
                };
                if !(d.u0 < d.u1 && d.v0 < d.v1) {
                    return Err(at(line, ChartErrorKind::DegenerateDomain));
                }
                if domain.replace(d).is_some() {
                    return Err(dup(key));
                }
            }
            "grid" => {
                let items = parse_list(value, "grid", 2, line)?;
                let ks = items
                    .iter()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| at(line, ChartErrorKind::MalformedNumber(s.to_string())))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if ks[0] < 2 || ks[1] < 2 {
                    return Err(at(line, ChartErrorKind::GridTooSmall));
                }
                if grid.replace((ks[0], ks[1])).is_some() {
                    return Err(dup(key));
                }
            }
            _ => return Err(at(line, ChartErrorKind::UnknownKey(key.to_string()))),
        }
    }

    let missing = |k: &str| ChartError {
        line: None,
        kind: ChartErrorKind::MissingKey(k.to_string()),
    };
    let name = name.ok_or_else(|| missing("name"))?;
    let space = space.ok_or_else(|| missing("space"))?;
    let (n, n_line) = n.ok_or_else(|| missing("n"))?;
    let domain = domain.ok_or_else(|| missing("domain"))?;
    let grid = grid.ok_or_else(|| missing("grid"))?;

    if let Some((&last, _)) = coord_src.last_key_value() {
        if let Some(gap) = (1..=last).find(|k| !coord_src.contains_key(k)) {
            return Err(ChartError {
                line: None,
                kind: ChartErrorKind::NonContiguous(gap),
            });
        }
    }
    let expected = space.coordinate_count(n);
    if coord_src.len() != expected {
        return Err(at(
            n_line,
            ChartErrorKind::CoordinateCount {
                expected,
                found: coord_src.len(),
            },
        ));
    }

    let cmap: BTreeMap<String, f64> = constants.iter().cloned().collect();
    let coords = coord_src
        .values()
        .map(|(src, line)| parse_expression_with(src, &cmap).map_err(|e| at(*line, ChartErrorKind::Expr(e))))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ChartSpec {
        name,
        space,
        n,
        constants,
        coords,
        domain,
        grid,
    })
}

impl ChartSpec {
    /// Canonical chart text; parsing it yields an equal spec.
    pub fn to_chart_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "space = {}", self.space);
        let _ = writeln!(s, "n = {}", self.n);
        for (c, v) in &self.constants {
            let _ = writeln!(s, "const {c} = {v}");
        }
        for (i, e) in self.coords.iter().enumerate() {
            let _ = writeln!(s, "x{} = {e}", i + 1);
        }
        let d = &self.domain;
        let _ = writeln!(s, "domain = {} {} {} {}", d.u0, d.u1, d.v0, d.v1);
        let _ = writeln!(s, "grid = {} {}", self.grid.0, self.grid.1);
        s
    }

    /// Sample points in row-major order (u outer, v inner).
    pub fn grid_points(&self) -> Vec<(f64, f64)> {
        let (mu, mv) = self.grid;
        let d = &self.domain;
        let lerp = |a: f64, b: f64, i: usize, m: usize| a + (b - a) * i as f64 / (m - 1) as f64;
        (0..mu)
            .flat_map(|i| (0..mv).map(move |j| (lerp(d.u0, d.u1, i, mu), lerp(d.v0, d.v1, j, mv))))
            .collect()
    }

    /// The same surface in coordinates `(u, v) / a`: substitutes `u ↦ a·u`,
    /// `v ↦ a·v` and shrinks the domain accordingly (`a > 0`).
    pub fn rescaled(&self, a: f64) -> ChartSpec {
        let d = &self.domain;
        ChartSpec {
            name: format!("{}_scaled", self.name),
            coords: self.coords.iter().map(|e| e.rescale_variables(a)).collect(),
            domain: Domain {
                u0: d.u0 / a,
                u1: d.u1 / a,
                v0: d.v0 / a,
                v1: d.v1 / a,
            },
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYLINDER: &str = "name = hyperbolic_cylinder
space = R            # R | S | H
n = 3                # conformal dimension
x1 = sinh(u)
x2 = v
x3 = cosh(u)
domain = -1 1 -1 1   # u0 u1 v0 v1
grid = 9 9
";

    #[test]
    fn parses_cylinder() {
        let c = parse_chart(CYLINDER).unwrap();
        assert_eq!(c.name, "hyperbolic_cylinder");
        assert_eq!(c.space, SpaceTag::R);
        assert_eq!(c.n, 3);
        assert_eq!(c.coords.len(), 3);
        assert_eq!(c.coords[0].to_string(), "sinh(u)");
        assert_eq!(c.grid, (9, 9));
        assert_eq!(parse_chart(&c.to_chart_text()).unwrap(), c);
    }

    #[test]
    fn coordinate_count_checked_against_space() {
        let text = CYLINDER.replace("space = R", "space = S");
        let e = parse_chart(&text).unwrap_err();
        assert!(e.to_string().contains("expected 4 coordinates"), "{e}");
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn grid_too_small() {
        let text = CYLINDER.replace("grid = 9 9", "grid = [1, 9]");
        let e = parse_chart(&text).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::GridTooSmall);
        assert!(e.to_string().contains("grid counts must be ≥ 2"));
        assert_eq!(e.line, Some(8));
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_chart(&CYLINDER.replace("domain = -1 1 -1 1", "domain = -1 1 -1 x")).unwrap_err();
        assert_eq!(e.line, Some(7));
        assert_eq!(e.kind, ChartErrorKind::MalformedNumber("x".into()));

        let e = parse_chart(&CYLINDER.replace("x3 = cosh(u)", "x3 = cosh(w)")).unwrap_err();
        assert_eq!(e.line, Some(6));
        assert!(e.to_string().contains("unknown identifier w at position 6"), "{e}");

        let e = parse_chart(&CYLINDER.replace("x2 = v", "x2 v")).unwrap_err();
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn structural_errors() {
        let e = parse_chart(&CYLINDER.replace("grid = 9 9\n", "")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::MissingKey("grid".into()));
        let e = parse_chart(&CYLINDER.replace("x2 = v", "x4 = v")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::NonContiguous(2));
        let e = parse_chart(&CYLINDER.replace("n = 3 ", "n = 2 ")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::DimensionTooSmall(2));
        let e = parse_chart(&CYLINDER.replace("domain = -1 1", "domain = 1 1")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::DegenerateDomain);
        let e = parse_chart(&format!("{CYLINDER}x1 = u\n")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::DuplicateKey("x1".into()));
        let e = parse_chart(&format!("{CYLINDER}color = red\n")).unwrap_err();
        assert_eq!(e.kind, ChartErrorKind::UnknownKey("color".into()));
        let e = parse_chart(&format!("{CYLINDER}const sin = 1\n")).unwrap_err();
        assert!(matches!(e.kind, ChartErrorKind::BadConstantName(_)));
    }

    #[test]
    fn constants_inline_and_print() {
        let text = "name = ds\nspace = S\nn = 3\nconst r = 1.0\n\
            x1 = sqrt(1 + r)*cos(v/sqrt(1 + r))\nx2 = sqrt(1 + r)*sin(v/sqrt(1 + r))\n\
            x3 = sqrt(r)*sinh(u/sqrt(r))\nx4 = sqrt(r)*cosh(u/sqrt(r))\n\
            domain = -1 1 -1 1\ngrid = 9 9\n";
        let c = parse_chart(text).unwrap();
        assert_eq!(c.constants, vec![("r".to_string(), 1.0)]);
        let printed = c.to_chart_text();
        assert!(printed.contains("const r = 1\n"));
        assert_eq!(parse_chart(&printed).unwrap(), c);
    }

    #[test]
    fn grid_points_row_major() {
        let c = parse_chart(&CYLINDER.replace("grid = 9 9", "grid = 2 3")).unwrap();
        assert_eq!(
            c.grid_points(),
            vec![(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)]
        );
    }
}
