//! Parameter resolution: `--params` file plus individual flag overrides.

use crate::{AppError, ParamArgs};
use fcc_core::model::{parse_params_file, CircuitParams};

pub fn resolve(args: &ParamArgs) -> Result<CircuitParams, AppError> {
    resolve_inner(args, None)
}

/// Like [`resolve`], but `T` falls back to `default_period` when neither a
/// flag nor the file supplies it — used by the sweep and profile commands,
/// whose periods come from their own argument lists.
pub fn resolve_with_period(
    args: &ParamArgs,
    default_period: f64,
) -> Result<CircuitParams, AppError> {
    resolve_inner(args, Some(default_period))
}

fn resolve_inner(args: &ParamArgs, default_period: Option<f64>) -> Result<CircuitParams, AppError> {
    let file = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_params_file(&text).map_err(|e| AppError::Validation(e.to_string()))?)
        }
        None => None,
    };

    let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file).ok_or_else(|| {
            AppError::Validation(format!(
                "missing parameter {name}: set --{name} or provide it via --params"
            ))
        })
    };
    Ok(CircuitParams {
        r: pick(args.r, file.map(|p| p.r), "R")?,
        l: pick(args.l, file.map(|p| p.l), "L")?,
        c: pick(args.c, file.map(|p| p.c), "C")?,
        vdc: pick(args.vdc, file.map(|p| p.vdc), "Vdc")?,
        t: match default_period {
            Some(fallback) => args.t.or(file.map(|p| p.t)).unwrap_or(fallback),
            None => pick(args.t, file.map(|p| p.t), "T")?,
        },
    })
}
