//! Independent numerical oracle: adaptive Dormand-Prince 5(4) integration of
//! the switched ODE with exact switch-time alignment.
//!
//! Switch instants `k T/2` are known a priori, so instead of event detection
//! every step is clipped to land exactly on the next boundary and integration
//! restarts with the other coefficient set. Output is sampled on a uniform
//! grid through the method's fifth-order dense interpolant.

use serde::Serialize;

use crate::analysis;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, Vec2};
use crate::model::SwitchedSystem;

/// Tolerances and budgets for [`integrate`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntegratorConfig {
    /// Absolute error tolerance per component.
    pub abs_tol: f64,
    /// Relative error tolerance per component.
    pub rel_tol: f64,
    /// First trial step; defaults to `T/1000` when `None`.
    pub initial_step: Option<f64>,
    /// Budget on attempted steps for a whole [`integrate`] call.
    pub max_steps: usize,
    /// Uniform output samples per period.
    pub output_grid: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            initial_step: None,
            max_steps: 500_000,
            output_grid: 512,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol.is_nan()
            || self.abs_tol <= 0.0
            || self.rel_tol.is_nan()
            || self.rel_tol <= 0.0
        {
            return Err(Error::DomainError(
                "integrator tolerances must be > 0".into(),
            ));
        }
        if self.max_steps < 1000 {
            return Err(Error::DomainError(format!(
                "max_steps = {} must be >= 1000",
                self.max_steps
            )));
        }
        if self.output_grid < 64 {
            return Err(Error::DomainError(format!(
                "output_grid = {} must be >= 64",
                self.output_grid
            )));
        }
        if let Some(h) = self.initial_step {
            if h.is_nan() || h <= 0.0 {
                return Err(Error::DomainError("initial_step must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// Provenance tag for a sampled trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesSource {
    ClosedForm,
    Rk45,
}

/// A sampled trajectory `(t, i, v)`.
#[derive(Clone, Debug, Serialize)]
pub struct TimeSeries {
    /// Strictly increasing sample times in seconds.
    pub times: Vec<f64>,
    /// Inductor current per sample, amperes.
    pub currents: Vec<f64>,
    /// Capacitor voltage per sample, volts.
    pub voltages: Vec<f64>,
    pub source: SeriesSource,
}

/// Distance of the k-th period-boundary state from the closed-form anchor.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceRecord {
    /// Period index.
    pub k: usize,
    /// `max |x(kT) - x0*|`.
    pub distance: f64,
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// The c column is not needed: within a segment the right-hand side is
// autonomous (constant coefficients).
// Error coefficients: 5th-order weights minus the embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output coefficients (Hairer's contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Fifth-order interpolant over one accepted step.
struct DenseSegment {
    t0: f64,
    h: f64,
    cont: [Vec2; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> Vec2 {
        let theta = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        self.cont[0]
            + (self.cont[1]
                + (self.cont[2] + (self.cont[3] + self.cont[4] * theta1) * theta) * theta1)
                * theta
    }
}

struct Rhs {
    a: Mat2,
    b: Vec2,
}

impl Rhs {
    fn eval(&self, x: Vec2) -> Vec2 {
        self.a * x + self.b
    }
}

/// One attempted Dormand-Prince step from `(t, x)` with size `h`.
/// Returns the 5th-order solution, the FSAL derivative, the scaled error and
/// the dense-output coefficients.
fn dopri5_step(
    rhs: &Rhs,
    x: Vec2,
    k1: Vec2,
    h: f64,
    cfg: &IntegratorConfig,
) -> (Vec2, Vec2, f64, [Vec2; 5]) {
    let k2 = rhs.eval(x + k1 * (h * A21));
    let k3 = rhs.eval(x + k1 * (h * A31) + k2 * (h * A32));
    let k4 = rhs.eval(x + k1 * (h * A41) + k2 * (h * A42) + k3 * (h * A43));
    let k5 = rhs.eval(x + k1 * (h * A51) + k2 * (h * A52) + k3 * (h * A53) + k4 * (h * A54));
    let k6 = rhs.eval(
        x + k1 * (h * A61) + k2 * (h * A62) + k3 * (h * A63) + k4 * (h * A64) + k5 * (h * A65),
    );
    let x_new = x + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
    let k7 = rhs.eval(x_new);

    let err = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
    let scale = |old: f64, new: f64, e: f64| {
        let sc = f64::max(cfg.abs_tol, cfg.rel_tol * f64::max(old.abs(), new.abs()));
        (e / sc).abs()
    };
    let err_ratio = f64::max(
        scale(x.first, x_new.first, err.first),
        scale(x.second, x_new.second, err.second),
    );

    let ydiff = x_new - x;
    let bspl = k1 * h - ydiff;
    let cont = [
        x,
        ydiff,
        bspl,
        ydiff - k7 * h - bspl,
        (k1 * D1 + k3 * D3 + k4 * D4 + k5 * D5 + k6 * D6 + k7 * D7) * h,
    ];
    (x_new, k7, err_ratio, cont)
}

/// Integrates the switched system for `n_periods` periods from `x_init`.
///
/// Every accepted step stays inside one half-period segment; the coefficient
/// set `(A1, b1)` or `(A2, 0)` applies on the open interval and integration
/// restarts at each boundary. Output lands on the uniform grid of
/// `output_grid` samples per period, evaluated from the dense interpolant of
/// the covering step.
pub fn integrate(
    sys: &SwitchedSystem,
    x_init: Vec2,
    n_periods: usize,
    cfg: &IntegratorConfig,
) -> Result<TimeSeries> {
    cfg.validate()?;
    if n_periods < 1 {
        return Err(Error::DomainError("n_periods must be >= 1".into()));
    }

    let period = sys.period();
    let tau = sys.half_period;
    let grid = cfg.output_grid;
    let n_out = n_periods * grid;
    let out_time = |j: usize| period * ((j as f64) / (grid as f64));
    // tolerance for matching grid points against step endpoints
    let t_slack = 4.0 * f64::EPSILON * period * (n_periods as f64);

    let mut times = Vec::with_capacity(n_out + 1);
    let mut currents = Vec::with_capacity(n_out + 1);
    let mut voltages = Vec::with_capacity(n_out + 1);
    times.push(0.0);
    currents.push(x_init.first);
    voltages.push(x_init.second);
    let mut next_out = 1usize;

    let h_min = 1e-3 * f64::EPSILON * period;
    let h_init = cfg.initial_step.unwrap_or(period / 1000.0);
    let mut steps_used = 0usize;
    let mut x = x_init;

    for seg in 0..2 * n_periods {
        let t_start = tau * (seg as f64);
        let t_end = tau * ((seg + 1) as f64);
        let rhs = if seg % 2 == 0 {
            Rhs {
                a: sys.a1,
                b: sys.b1,
            }
        } else {
            Rhs {
                a: sys.a2,
                b: Vec2::zero(),
            }
        };

        let mut t = t_start;
        let mut h = h_init.min(t_end - t_start);
        let mut k1 = rhs.eval(x);

        while t < t_end {
            if h < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
            let clipped = h.min(t_end - t);
            steps_used += 1;
            if steps_used > cfg.max_steps {
                return Err(Error::StepLimitExceeded {
                    steps: steps_used,
                    t,
                });
            }

            let (x_new, k7, err_ratio, cont) = dopri5_step(&rhs, x, k1, clipped, cfg);
            if err_ratio <= 1.0 {
                let t_new = if clipped >= t_end - t {
                    t_end
                } else {
                    t + clipped
                };
                let dense = DenseSegment {
                    t0: t,
                    h: clipped,
                    cont,
                };
                while next_out <= n_out && out_time(next_out) <= t_new + t_slack {
                    let tj = out_time(next_out);
                    let xj = dense.eval(tj);
                    times.push(tj);
                    currents.push(xj.first);
                    voltages.push(xj.second);
                    next_out += 1;
                }
                x = x_new;
                k1 = k7;
                t = t_new;
                let factor = if err_ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = clipped * factor;
            } else {
                h = clipped * (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 0.9);
            }
        }
    }
    debug_assert_eq!(next_out, n_out + 1, "output grid not fully covered");

    Ok(TimeSeries {
        times,
        currents,
        voltages,
        source: SeriesSource::Rk45,
    })
}

/// Trapezoidal window averages `(i_avg, v_avg)` over the sample points lying
/// inside `[window_start, window_end]`.
pub fn numeric_averages(ts: &TimeSeries, window_start: f64, window_end: f64) -> Result<(f64, f64)> {
    if window_end.is_nan() || window_start.is_nan() || window_end <= window_start {
        return Err(Error::DomainError(format!(
            "window [{window_start:e}, {window_end:e}] is empty"
        )));
    }
    let span_start = *ts
        .times
        .first()
        .ok_or_else(|| Error::DomainError("time series is empty".into()))?;
    let span_end = *ts.times.last().unwrap();
    let slack = 4.0 * f64::EPSILON * f64::max(span_end.abs(), 1e-300);
    if window_start < span_start - slack || window_end > span_end + slack {
        return Err(Error::DomainError(format!(
            "window [{window_start:e}, {window_end:e}] outside series span [{span_start:e}, {span_end:e}]"
        )));
    }

    let lo = ts.times.partition_point(|&t| t < window_start - slack);
    let hi = ts.times.partition_point(|&t| t <= window_end + slack);
    if hi - lo < 2 {
        return Err(Error::DomainError(
            "window contains fewer than two samples".into(),
        ));
    }

    let mut i_acc = 0.0;
    let mut v_acc = 0.0;
    for j in lo..hi - 1 {
        let dt = ts.times[j + 1] - ts.times[j];
        i_acc += 0.5 * (ts.currents[j] + ts.currents[j + 1]) * dt;
        v_acc += 0.5 * (ts.voltages[j] + ts.voltages[j + 1]) * dt;
    }
    let len = ts.times[hi - 1] - ts.times[lo];
    Ok((i_acc / len, v_acc / len))
}

/// Distances `max |x(kT) - x0*|` for `k = 0..=n_periods`, where `x(kT)`
/// follows the exact discrete map `x <- M x + N b1`. Isolates the fixed-point
/// contraction from integration error.
pub fn convergence_study(
    sys: &SwitchedSystem,
    x_init: Vec2,
    n_periods: usize,
) -> Result<Vec<ConvergenceRecord>> {
    if n_periods < 2 {
        return Err(Error::DomainError("n_periods must be >= 2".into()));
    }
    let anchor = analysis::steady_state(sys)?.x0;
    let m = analysis::monodromy(sys);
    let n = analysis::forcing_matrix(sys);
    let nb = n * sys.b1;

    let mut records = Vec::with_capacity(n_periods + 1);
    let mut x = x_init;
    for k in 0..=n_periods {
        records.push(ConvergenceRecord {
            k,
            distance: (x - anchor).norm_inf(),
        });
        x = m * x + nb;
    }
    Ok(records)
}
