//! System description files.
//!
//! One `key: value` pair per line, `#` starts a comment:
//!
//! ```text
//! dim: 2
//! f: -x1 - 2*x2
//! f: -x1 - x2
//! cone: -0.25, 1
//! cone: 1, -0.25
//! ```
//!
//! A file has either `cone` rows (a polyhedral cone `{x : Cx ≥ 0}`) or `g`
//! generators with one `box` interval per coordinate, never both. Optional
//! keys: `schedule` (`d,r,sweeps` triples separated by `;`), `margin`,
//! `deg`, `tier`, `eps_pd`, `seed`, `ball` (`true` adds the generator
//! `R² − ‖x‖²`).

use std::fmt::Write as _;
use std::path::Path;

use lyapcert_core::cones::PolyhedralCone;
use lyapcert_core::conic::{ConicSystem, Level};
use lyapcert_core::poly::{parse_polynomial, RatPoly};
use lyapcert_core::sos::{SemialgebraicSystem, Tier};
use lyapcert_core::tangency::SemialgebraicSet;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("rule '{rule}' violated: {message}")]
    Semantic { rule: &'static str, message: String },
}

impl SpecError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        SpecError::Syntax { line, column, message: message.into() }
    }

    fn semantic(rule: &'static str, message: impl Into<String>) -> Self {
        SpecError::Semantic { rule, message: message.into() }
    }
}

#[derive(Clone, Debug)]
pub enum System {
    Cone(ConicSystem),
    Semialgebraic(SemialgebraicSystem),
}

impl System {
    pub fn dim(&self) -> usize {
        match self {
            System::Cone(s) => s.dim(),
            System::Semialgebraic(s) => s.dim(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecOptions {
    pub schedule: Option<Vec<Level>>,
    pub margin: Option<f64>,
    pub deg: Option<u32>,
    pub tier: Option<Tier>,
    pub eps_pd: Option<f64>,
    pub seed: Option<u64>,
    pub ball: bool,
}

#[derive(Clone, Debug)]
pub struct Spec {
    pub system: System,
    pub options: SpecOptions,
    /// the polynomial and constraint lines, for echoing into certificates
    pub echo: String,
}

pub fn read_spec(path: &Path) -> Result<Spec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    parse_spec(&text)
}

/// A value and the 1-based column where it starts.
struct Entry<'a> {
    line: usize,
    column: usize,
    value: &'a str,
}

fn numbers(e: &Entry<'_>, expected: Option<usize>) -> Result<Vec<f64>, SpecError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in e.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        let token = part.trim();
        let v: f64 = token
            .parse()
            .map_err(|_| SpecError::syntax(e.line, e.column + offset + lead, format!("expected a number, found '{token}'")))?;
        if !v.is_finite() {
            return Err(SpecError::syntax(e.line, e.column + offset + lead, "number must be finite"));
        }
        out.push(v);
        offset += part.len() + 1;
    }
    if let Some(n) = expected {
        if out.len() != n {
            return Err(SpecError::syntax(e.line, e.column, format!("expected {n} comma-separated numbers, found {}", out.len())));
        }
    }
    Ok(out)
}

fn polynomial(e: &Entry<'_>, dim: usize) -> Result<RatPoly, SpecError> {
    parse_polynomial(e.value, dim).map_err(|err| match err {
        lyapcert_core::Error::Parse { column, message } => SpecError::syntax(e.line, e.column + column - 1, message),
        other => SpecError::syntax(e.line, e.column, other.to_string()),
    })
}

fn schedule(e: &Entry<'_>) -> Result<Vec<Level>, SpecError> {
    let mut out = Vec::new();
    for item in e.value.split(';').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split(',').map(str::trim).collect();
        let bad = || SpecError::syntax(e.line, e.column, format!("schedule entries are 'd, r, sweeps', found '{}'", item.trim()));
        if parts.len() != 3 {
            return Err(bad());
        }
        let d = parts[0].parse().map_err(|_| bad())?;
        let r = parts[1].parse().map_err(|_| bad())?;
        let sweeps = parts[2].parse().map_err(|_| bad())?;
        out.push(Level { d, r, sweeps });
    }
    if out.is_empty() {
        return Err(SpecError::syntax(e.line, e.column, "empty schedule"));
    }
    Ok(out)
}

pub fn parse_tier(s: &str) -> Option<Tier> {
    match s.trim().to_ascii_lowercase().as_str() {
        "dsos" => Some(Tier::Dsos),
        "sdp" => Some(Tier::Sdp),
        _ => None,
    }
}

pub fn parse_spec(text: &str) -> Result<Spec, SpecError> {
    let mut dim_entry: Option<usize> = None;
    let mut entries: Vec<(String, Entry<'_>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(SpecError::syntax(line, col, "expected 'key: value'"));
        };
        let key = content[..colon].trim().to_ascii_lowercase();
        let rest = &content[colon + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let value = rest.trim();
        let column = colon + 2 + lead;
        if key == "dim" {
            let n: usize = value.parse().map_err(|_| SpecError::syntax(line, column, format!("invalid dimension '{value}'")))?;
            if n == 0 {
                return Err(SpecError::syntax(line, column, "dimension must be positive"));
            }
            dim_entry = Some(n);
        } else {
            entries.push((key, Entry { line, column, value }));
        }
    }
    let dim = dim_entry.ok_or_else(|| SpecError::semantic("dimension", "missing 'dim' line"))?;

    let mut f = Vec::new();
    let mut cone_rows = Vec::new();
    let mut gens = Vec::new();
    let mut bbox = Vec::new();
    let mut options = SpecOptions::default();
    let mut echo = format!("dim: {dim}\n");
    for (key, e) in &entries {
        match key.as_str() {
            "f" => {
                f.push(polynomial(e, dim)?);
                let _ = writeln!(echo, "f: {}", e.value);
            }
            "cone" => {
                cone_rows.push(numbers(e, Some(dim))?);
                let _ = writeln!(echo, "cone: {}", e.value);
            }
            "g" => {
                gens.push(polynomial(e, dim)?);
                let _ = writeln!(echo, "g: {}", e.value);
            }
            "box" => {
                let v = numbers(e, Some(2))?;
                if !(v[0] <= v[1]) {
                    return Err(SpecError::syntax(e.line, e.column, "box interval needs lo <= hi"));
                }
                bbox.push((v[0], v[1]));
                let _ = writeln!(echo, "box: {}", e.value);
            }
            "schedule" => options.schedule = Some(schedule(e)?),
            "margin" => options.margin = Some(numbers(e, Some(1))?[0]),
            "eps_pd" => options.eps_pd = Some(numbers(e, Some(1))?[0]),
            "deg" => {
                options.deg = Some(e.value.parse().map_err(|_| SpecError::syntax(e.line, e.column, "invalid degree"))?);
            }
            "seed" => {
                options.seed = Some(e.value.parse().map_err(|_| SpecError::syntax(e.line, e.column, "invalid seed"))?);
            }
            "tier" => {
                options.tier = Some(parse_tier(e.value).ok_or_else(|| SpecError::syntax(e.line, e.column, "tier must be dsos or sdp"))?);
            }
            "ball" => {
                options.ball = match e.value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(SpecError::syntax(e.line, e.column, "expected true or false")),
                }
            }
            other => return Err(SpecError::syntax(e.line, 1, format!("unknown key '{other}'"))),
        }
    }

    if f.len() != dim {
        return Err(SpecError::semantic("dimension", format!("{dim} field components expected, found {}", f.len())));
    }
    let origin = vec![0.0; dim];
    if let Some(i) = f.iter().position(|p| p.eval(&origin) != 0.0) {
        return Err(SpecError::semantic("f(0) = 0", format!("component {} does not vanish at the origin", i + 1)));
    }
    let system = match (cone_rows.is_empty(), gens.is_empty()) {
        (false, false) => return Err(SpecError::semantic("single constraint block", "both 'cone' and 'g' lines present")),
        (false, true) => {
            if !bbox.is_empty() {
                return Err(SpecError::semantic("single constraint block", "'box' only applies to generators"));
            }
            let cone = PolyhedralCone::new(dim, cone_rows).map_err(|e| SpecError::semantic("cone rows", e.to_string()))?;
            let sys = ConicSystem::new(f, cone).map_err(|e| match e {
                lyapcert_core::Error::NotHomogeneous => SpecError::semantic("homogeneous field on a cone", "every component of f must be homogeneous of one common degree"),
                other => SpecError::semantic("conic system", other.to_string()),
            })?;
            System::Cone(sys)
        }
        (true, _) => {
            if gens.is_empty() && bbox.is_empty() {
                return Err(SpecError::semantic("constraint block", "need 'cone' rows or 'g' generators with a 'box'"));
            }
            if bbox.len() != dim {
                return Err(SpecError::semantic("bounding box", format!("{dim} 'box' lines expected, found {}", bbox.len())));
            }
            let set = SemialgebraicSet::new(dim, gens, bbox).map_err(|e| SpecError::semantic("0 in S", e.to_string()))?;
            let mut sys = SemialgebraicSystem::new(f, set).map_err(|e| SpecError::semantic("semialgebraic system", e.to_string()))?;
            if options.ball {
                sys = sys.with_ball_generator().map_err(|e| SpecError::semantic("ball generator", e.to_string()))?;
            }
            System::Semialgebraic(sys)
        }
    };
    Ok(Spec { system, options, echo })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE3: &str = "# Example\ndim: 2\nf: -x1 - 2*x2\nf: -x1 - x2\ncone: -0.25, 1\ncone: 1, -0.25\nschedule: 2,0,6\n";

    #[test]
    fn parses_cone_system() {
        let spec = parse_spec(EXAMPLE3).unwrap();
        let System::Cone(sys) = &spec.system else { panic!() };
        assert_eq!(sys.cone().rows(), &[vec![-0.25, 1.0], vec![1.0, -0.25]]);
        assert_eq!(sys.eval_f(&[1.0, 1.0]), vec![-3.0, -2.0]);
        assert_eq!(spec.options.schedule.unwrap(), vec![Level { d: 2, r: 0, sweeps: 6 }]);
    }

    #[test]
    fn rejects_nonzero_field_at_origin() {
        let err = parse_spec("dim: 2\nf: x1 + 1\nf: x2\ncone: 1, 0\n").unwrap_err();
        assert!(matches!(err, SpecError::Semantic { rule: "f(0) = 0", .. }), "{err}");
    }

    #[test]
    fn reports_column_of_bad_variable() {
        let err = parse_spec("dim: 2\nf: x1 + x3\nf: x2\ncone: 1, 0\n").unwrap_err();
        match err {
            SpecError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 9)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_inhomogeneous_cone_field() {
        let err = parse_spec("dim: 2\nf: -x1 + x2^2\nf: -x2\ncone: 1, 0\n").unwrap_err();
        assert!(matches!(err, SpecError::Semantic { rule: "homogeneous field on a cone", .. }));
    }

    #[test]
    fn parses_semialgebraic_system() {
        let spec = parse_spec("dim: 2\nf: -x1^2\nf: 0\ng: x1 - x2^2\ng: 1 - x1\nbox: 0, 1\nbox: -1, 1\ntier: dsos\n").unwrap();
        let System::Semialgebraic(sys) = &spec.system else { panic!() };
        assert_eq!(sys.set().num_generators(), 2);
        assert_eq!(spec.options.tier, Some(Tier::Dsos));
    }

    #[test]
    fn bad_number_column() {
        match parse_spec("dim: 2\nf: -x1\nf: -x2\ncone: 1, abc\n").unwrap_err() {
            SpecError::Syntax { line, column, .. } => assert_eq!((line, column), (4, 10)),
            other => panic!("{other}"),
        }
    }
}
