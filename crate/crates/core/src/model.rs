//! Circuit parameters, the switched state-space system and the reduced
//! dimensionless parameters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat2::{Mat2, Vec2};

/// Physical circuit parameters in SI units.
///
/// Units are carried by field documentation only; there is no runtime unit
/// system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitParams {
    /// Load resistance in ohms.
    #[serde(rename = "R")]
    pub r: f64,
    /// Load inductance in henries.
    #[serde(rename = "L")]
    pub l: f64,
    /// Flying capacitor capacitance in farads.
    #[serde(rename = "C")]
    pub c: f64,
    /// Source voltage in volts.
    #[serde(rename = "Vdc")]
    pub vdc: f64,
    /// Switching period in seconds. The duty cycle is fixed at 1/2: the two
    /// switch states each occupy half a period.
    #[serde(rename = "T")]
    pub t: f64,
}

impl CircuitParams {
    pub fn new(r: f64, l: f64, c: f64, vdc: f64, t: f64) -> Result<Self> {
        let p = Self { r, l, c, vdc, t };
        p.validate()?;
        Ok(p)
    }

    /// Checks the parameter bounds, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let positive = [("R", self.r), ("L", self.l), ("C", self.c), ("T", self.t)];
        for (name, v) in positive {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
            if v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be > 0")));
            }
        }
        if !self.vdc.is_finite() {
            return Err(Error::InvalidParams("Vdc must be finite".into()));
        }
        if self.vdc < 0.0 {
            return Err(Error::InvalidParams("Vdc must be >= 0".into()));
        }
        Ok(())
    }
}

/// The switched state-space system for `x = [i, v]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwitchedSystem {
    /// Coefficient matrix on the first half-period (1/s).
    pub a1: Mat2,
    /// Coefficient matrix on the second half-period (1/s).
    pub a2: Mat2,
    /// Forcing on the first half-period; the second half is unforced.
    pub b1: Vec2,
    /// Half the switching period, `T/2`, in seconds.
    pub half_period: f64,
    /// The parameters the system was built from.
    pub params: CircuitParams,
}

impl SwitchedSystem {
    /// Full switching period in seconds.
    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }
}

/// Dimensionless groupings of the parameters; `disc` is the square of the
/// eigenvalue half-gap of the scaled system matrices and may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedParams {
    /// `T R / (2 L)`, the per-half-period damping exponent.
    pub a: f64,
    /// `T / (2 L)`.
    pub b: f64,
    /// `T / (2 C)`.
    pub c: f64,
    /// `a^2 - 4 b c`; negative in the oscillatory regime.
    pub disc: f64,
}

/// Builds the state-space matrices
/// `A1 = [[-R/L, -1/L], [1/C, 0]]`, `A2 = [[-R/L, 1/L], [-1/C, 0]]`,
/// `b1 = [Vdc/L, 0]` as exact quotients of the inputs.
pub fn build_system(p: &CircuitParams) -> Result<SwitchedSystem> {
    p.validate()?;
    let rl = p.r / p.l;
    let il = 1.0 / p.l;
    let ic = 1.0 / p.c;
    Ok(SwitchedSystem {
        a1: Mat2::new(-rl, -il, ic, 0.0),
        a2: Mat2::new(-rl, il, -ic, 0.0),
        b1: Vec2::new(p.vdc / p.l, 0.0),
        half_period: 0.5 * p.t,
        params: *p,
    })
}

/// Reduced parameters, computed from the same quotients as [`build_system`]
/// so that `a == -(T/2) * A1[1][1]` and friends hold bit-for-bit.
pub fn reduced_params(p: &CircuitParams) -> Result<ReducedParams> {
    p.validate()?;
    let half = 0.5 * p.t;
    let a = half * (p.r / p.l);
    let b = half * (1.0 / p.l);
    let c = half * (1.0 / p.c);
    Ok(ReducedParams {
        a,
        b,
        c,
        disc: a * a - 4.0 * (b * c),
    })
}

/// Parses the flat key-value parameter file shared with the CLI.
///
/// One `KEY = VALUE` or `KEY VALUE` pair per line with keys `R`, `L`, `C`,
/// `Vdc`, `T` in SI units; `#` starts a comment. All five keys must appear
/// exactly once. Range validation is left to [`build_system`] so that CLI
/// flag overrides can apply first.
pub fn parse_params_file(text: &str) -> Result<CircuitParams> {
    let mut seen: [Option<f64>; 5] = [None; 5];
    const KEYS: [&str; 5] = ["R", "L", "C", "Vdc", "T"];

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => {
                    return Err(Error::InvalidParams(format!(
                        "line {}: expected KEY = VALUE, got {line:?}",
                        lineno + 1
                    )))
                }
            },
        };
        let idx = KEYS.iter().position(|k| *k == key).ok_or_else(|| {
            Error::InvalidParams(format!("line {}: unknown key {key:?}", lineno + 1))
        })?;
        if seen[idx].is_some() {
            return Err(Error::InvalidParams(format!(
                "line {}: duplicate key {key:?}",
                lineno + 1
            )));
        }
        let parsed: f64 = value.parse().map_err(|_| {
            Error::InvalidParams(format!(
                "line {}: cannot parse {value:?} as a number",
                lineno + 1
            ))
        })?;
        seen[idx] = Some(parsed);
    }

    let missing: Vec<&str> = KEYS
        .iter()
        .zip(seen.iter())
        .filter_map(|(k, v)| v.is_none().then_some(*k))
        .collect();
    if !missing.is_empty() {
        return Err(Error::InvalidParams(format!(
            "missing keys: {}",
            missing.join(", ")
        )));
    }
    Ok(CircuitParams {
        r: seen[0].unwrap(),
        l: seen[1].unwrap(),
        c: seen[2].unwrap(),
        vdc: seen[3].unwrap(),
        t: seen[4].unwrap(),
    })
}
