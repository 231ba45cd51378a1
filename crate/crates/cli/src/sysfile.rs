//! Line-oriented system files.
//!
//! ```text
//! # comments and blank lines are ignored
//! delay=1.0
//! dim=1
//! drift=linear a=0 b=1 c=0
//! diffusion=const c=0.5
//! history=const c=1
//! ```
//!
//! Coefficient kinds: `const c=..`, `linear a=.. b=.. c=..` (`a xi(0) + b xi(-r) + c`),
//! `point u0=..` (`xi(u0)`), `tanh s=.. a=.. b=.. c=..`
//! (`s * tanh(a xi(0) + b xi(-r) + c)`). The optional `history` line selects
//! the initial segment: `const c=..` or `ramp a=.. c=..` (`eta(s) = c + a s`);
//! it defaults to `const c=1`.

use std::collections::HashMap;
use std::fmt;

use fsdde_core::grid::{Grid, GridFunction};
use fsdde_core::sdde::{CoefficientFunctional, CoefficientKind, DelaySystem};

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Initial-segment shape selected in the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HistorySpec {
    Const { c: f64 },
    Ramp { a: f64, c: f64 },
}

impl HistorySpec {
    /// Sample the segment on `[-r, 0]` with `steps` grid steps.
    pub fn sample(&self, r: f64, steps: usize, dim: usize) -> GridFunction {
        let grid = Grid::new(-r, r / steps as f64, steps).expect("valid history grid");
        let value = |s: f64| match self {
            HistorySpec::Const { c } => *c,
            HistorySpec::Ramp { a, c } => c + a * s,
        };
        GridFunction::from_fn(grid, dim, |s| vec![value(s); dim]).expect("finite history values")
    }
}

/// Everything a system file declares.
#[derive(Debug, Clone, Copy)]
pub struct SystemFile {
    pub system: DelaySystem,
    pub history: HistorySpec,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn parse_number(line: usize, key: &str, raw: &str) -> Result<f64, ParseError> {
    raw.parse::<f64>().map_err(|_| err(line, format!("invalid number for '{key}': '{raw}'")))
}

/// `kind k1=v1 k2=v2 ...` after the `=` of a drift/diffusion/history line.
fn parse_kv(line: usize, body: &str) -> Result<(String, HashMap<String, f64>), ParseError> {
    let mut parts = body.split_whitespace();
    let kind = parts
        .next()
        .ok_or_else(|| err(line, "missing coefficient kind".to_string()))?
        .to_string();
    let mut kv = HashMap::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, got '{part}'")))?;
        kv.insert(k.to_string(), parse_number(line, k, v)?);
    }
    Ok((kind, kv))
}

fn need(line: usize, kv: &HashMap<String, f64>, key: &str) -> Result<f64, ParseError> {
    kv.get(key).copied().ok_or_else(|| err(line, format!("missing key '{key}'")))
}

fn parse_coefficient(line: usize, body: &str) -> Result<CoefficientFunctional, ParseError> {
    let (kind, kv) = parse_kv(line, body)?;
    let raw = match kind.as_str() {
        "const" => CoefficientKind::Const { c: need(line, &kv, "c")? },
        "linear" => CoefficientKind::LinearCombo {
            a: need(line, &kv, "a")?,
            b: need(line, &kv, "b")?,
            c: need(line, &kv, "c")?,
        },
        "point" => CoefficientKind::PointEval { offset: need(line, &kv, "u0")? },
        "tanh" => CoefficientKind::BoundedSmooth {
            scale: need(line, &kv, "s")?,
            a: need(line, &kv, "a")?,
            b: need(line, &kv, "b")?,
            c: need(line, &kv, "c")?,
        },
        other => return Err(err(line, format!("unknown coefficient kind '{other}'"))),
    };
    CoefficientFunctional::new(raw).map_err(|e| err(line, e.to_string()))
}

fn parse_history(line: usize, body: &str) -> Result<HistorySpec, ParseError> {
    let (kind, kv) = parse_kv(line, body)?;
    match kind.as_str() {
        "const" => Ok(HistorySpec::Const { c: need(line, &kv, "c")? }),
        "ramp" => Ok(HistorySpec::Ramp { a: need(line, &kv, "a")?, c: need(line, &kv, "c")? }),
        other => Err(err(line, format!("unknown history kind '{other}'"))),
    }
}

/// Parse a full system file; all constants of the built-in coefficient kinds
/// are computed from the coefficients, never user-asserted.
pub fn parse_system_file(text: &str) -> Result<SystemFile, ParseError> {
    let mut delay = None;
    let mut dim = None;
    let mut drift = None;
    let mut diffusion = None;
    let mut history = HistorySpec::Const { c: 1.0 };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, body) = trimmed
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, got '{trimmed}'")))?;
        match key.trim() {
            "delay" => delay = Some(parse_number(line, "delay", body.trim())?),
            "dim" => {
                let v = parse_number(line, "dim", body.trim())?;
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(err(line, format!("dim must be a positive integer, got '{body}'")));
                }
                dim = Some(v as usize);
            }
            "drift" => drift = Some(parse_coefficient(line, body)?),
            "diffusion" => diffusion = Some(parse_coefficient(line, body)?),
            "history" => history = parse_history(line, body)?,
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
    }

    let delay = delay.ok_or_else(|| err(0, "missing 'delay' line"))?;
    let dim = dim.unwrap_or(1);
    let drift = drift.ok_or_else(|| err(0, "missing 'drift' line"))?;
    let diffusion = diffusion.ok_or_else(|| err(0, "missing 'diffusion' line"))?;
    let system = DelaySystem::new(delay, dim, drift, diffusion)
        .map_err(|e| err(0, e.to_string()))?;
    Ok(SystemFile { system, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_system_parses() {
        let text = "delay=1.0\ndim=1\ndrift=const c=0\ndiffusion=const c=0\n";
        let file = parse_system_file(text).unwrap();
        assert_eq!(file.system.r, 1.0);
        assert_eq!(file.system.drift.lipschitz(), 0.0);
        assert_eq!(file.history, HistorySpec::Const { c: 1.0 });
    }

    #[test]
    fn linear_drift_constants_are_computed() {
        let text = "delay=1.0\ndim=1\ndrift=linear a=0 b=1 c=0\ndiffusion=const c=0\n";
        let file = parse_system_file(text).unwrap();
        assert_eq!(file.system.drift.lipschitz(), 1.0);
        assert_eq!(file.system.drift.growth(1), 1.0);
    }

    #[test]
    fn malformed_number_names_the_line() {
        let text = "delay=1.0\ndim=1\ndrift=linear a=x b=1 c=0\ndiffusion=const c=0\n";
        let e = parse_system_file(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("'a'"), "{e}");
    }

    #[test]
    fn unknown_kind_and_missing_key_are_rejected() {
        let e = parse_system_file("delay=1\ndrift=warp q=1\ndiffusion=const c=0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown coefficient kind"));

        let e = parse_system_file("delay=1\ndrift=linear a=1 b=2\ndiffusion=const c=0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("missing key 'c'"));
    }

    #[test]
    fn comments_and_history_round_trip() {
        let text = "# system\ndelay=0.5\n\ndim=2\ndrift=tanh s=2 a=1 b=0 c=0\ndiffusion=point u0=-0.25\nhistory=ramp a=1 c=0.5\n";
        let file = parse_system_file(text).unwrap();
        assert_eq!(file.system.dim, 2);
        assert_eq!(file.history, HistorySpec::Ramp { a: 1.0, c: 0.5 });
        let eta = file.history.sample(0.5, 8, 2);
        assert_eq!(eta.node_value(8), &[0.5, 0.5]);
        assert_eq!(eta.node_value(0), &[0.0, 0.0]);
    }
}
