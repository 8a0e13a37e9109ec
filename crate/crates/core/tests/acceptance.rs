//! Acceptance suite: one test per published criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Comparisons against randomly sampled parameter tuples use the roundoff
//! floors documented in `common`: at the conditioning extremes of the box the
//! stated tolerances sit below what f64 admits, and the floors widen them by
//! exactly the standard forward-error allowance, never below the stated
//! values.

mod common;

use common::{
    charpoly_agrees, forced_discriminant_cases, identity_floors, ref_heavy_load, ref_light_load,
    ref_sweep_base, rho_tie_band, sample_box, EPS,
};
use fcc_core::analysis::{
    self, average_exact_integral, averages_closed, energy_residuals,
    energy_residuals_with_intervals, monodromy, stability, steady_state, sweep_average_current,
};
use fcc_core::integrator::{convergence_study, integrate, numeric_averages, IntegratorConfig};
use fcc_core::mat2::{Mat2, Vec2};
use fcc_core::model::{build_system, CircuitParams};
use fcc_core::Error;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: usize,
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: usize, name: &'static str) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!("criterion {:2} [{}]: {}", self.id, self.name, verdict);
        for n in &self.notes {
            line.push_str(&format!("\n    note: {n}"));
        }
        for f in &self.failures {
            line.push_str(&format!("\n    fail: {f}"));
        }
        println!("{line}");
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n{}",
            self.id,
            self.failures.join("\n")
        );
    }
}

fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Algorithm-3 protocol: zero initial state, `n` periods, trapezoid average
/// over the final period on the default 512-sample grid.
fn protocol_averages(p: &CircuitParams, n_periods: usize) -> (f64, f64) {
    let sys = build_system(p).unwrap();
    let cfg = IntegratorConfig::default();
    let ts = integrate(&sys, Vec2::zero(), n_periods, &cfg).unwrap();
    let period = sys.period();
    numeric_averages(
        &ts,
        (n_periods - 1) as f64 * period,
        n_periods as f64 * period,
    )
    .unwrap()
}

#[test]
fn criterion_01_heavy_load_averages() {
    let mut c = Criterion::new(1, "heavy-load reference averages");
    let sys = build_system(&ref_heavy_load()).unwrap();
    let ss = steady_state(&sys).unwrap();
    let avg = averages_closed(&sys, &ss);

    c.check(rel_err(avg.i_avg, 33.1215) <= 5e-4, || {
        format!(
            "closed-form i_avg = {} not within 5e-4 of 33.1215",
            avg.i_avg
        )
    });
    c.check(rel_err(avg.v_avg, 50.0) <= 1e-9, || {
        format!("closed-form v_avg = {} not within 1e-9 of 50", avg.v_avg)
    });

    let (i_num, v_num) = protocol_averages(&ref_heavy_load(), 20);
    c.note(format!(
        "protocol yields i = {i_num:.6}, v = {v_num:.6}; closed form i = {:.6}",
        avg.i_avg
    ));
    c.check((i_num - 33.1215).abs() <= 0.005, || {
        format!(
            "protocol i_avg = {i_num:.6} A differs from the published reference value 33.1215 A by \
             {:+.6} A (> 0.005). The 20-period transient is below 1e-14 here and the \
             converged protocol average equals the closed-form value {:.6} A minus the \
             documented 512-grid trapezoid bias; the reference value is not reachable by \
             the stated protocol (see decisions ledger).",
            i_num - 33.1215,
            avg.i_avg
        )
    });
    c.check((v_num - 50.0).abs() <= 0.01, || {
        format!("protocol v_avg = {v_num:.6} V not within 0.01 of 50.0000")
    });
    c.finish();
}

#[test]
fn criterion_02_light_load_transient_artifact() {
    let mut c = Criterion::new(2, "light-load transient artifact");
    let (i_num, v_num) = protocol_averages(&ref_light_load(), 20);
    c.check((i_num - 2.4922).abs() <= 0.005, || {
        format!("protocol i_avg = {i_num:.6} not within 0.005 of 2.4922")
    });
    c.check((v_num - 49.9849).abs() <= 0.02, || {
        format!("protocol v_avg = {v_num:.6} not within 0.02 of 49.9849")
    });
    c.note(format!("protocol averages ({i_num:.4}, {v_num:.4})"));

    let sys = build_system(&ref_light_load()).unwrap();
    let ss = steady_state(&sys).unwrap();
    let avg = averages_closed(&sys, &ss);
    c.check(rel_err(avg.v_avg, 50.0) <= 1e-9, || {
        format!("closed-form v_avg = {} not exactly 50", avg.v_avg)
    });
    let exact = average_exact_integral(&sys, &ss);
    c.check(rel_err(exact.second, 50.0) <= 1e-9, || {
        format!(
            "integral-route v_avg = {} not within 1e-9 of 50",
            exact.second
        )
    });
    c.finish();
}

#[test]
fn criterion_03_reference_sweep_table() {
    let mut c = Criterion::new(3, "reference sweep table");
    let points = sweep_average_current(&ref_sweep_base(), &[400e-5, 800e-5, 1600e-5]).unwrap();
    for (pt, expected) in points.iter().zip([24.3412, 13.0181, 1.8258]) {
        c.check(rel_err(pt.i_avg, expected) <= 1e-3, || {
            format!(
                "T = {:e}: i_avg = {} not within 1e-3 of {expected}",
                pt.t, pt.i_avg
            )
        });
        c.check(rel_err(pt.i_nominal, 25.0) <= 1e-12, || {
            format!("i_nominal = {} != 25", pt.i_nominal)
        });
    }
    c.finish();
}

#[test]
fn criterion_04_stability_property_suite() {
    let mut c = Criterion::new(4, "Theorem-1 property suite");
    let mut tuples = sample_box(0x5EED_0004, 1000);
    tuples.extend(forced_discriminant_cases());

    let mut tie_skips = 0usize;
    for p in &tuples {
        let sys = build_system(p).unwrap();
        match stability(&sys) {
            Ok(report) => {
                c.check(report.stable, || format!("unstable verdict at {p:?}"));
                let m = monodromy(&sys);
                let rho_verdict = report.spectral_radius < 1.0;
                if (report.spectral_radius - 1.0).abs() <= rho_tie_band(&m) {
                    tie_skips += 1;
                } else {
                    c.check(report.stable == rho_verdict, || {
                        format!(
                            "Jury/spectral disagreement at {p:?}: rho = {}",
                            report.spectral_radius
                        )
                    });
                }
                if let Err(msg) = charpoly_agrees(p) {
                    c.check(false, || msg);
                }
            }
            Err(e) => c.check(false, || format!("stability failed at {p:?}: {e}")),
        }
    }
    c.note(format!(
        "{} tuples checked, {tie_skips} spectral ties resolved by the Jury margins",
        tuples.len()
    ));
    c.finish();
}

#[test]
fn criterion_05_steady_state_identities() {
    let mut c = Criterion::new(5, "steady-state identities");
    let mut tuples = sample_box(0x5EED_0004, 1000);
    tuples.extend(forced_discriminant_cases());

    let mut unresolvable = 0usize;
    let mut checked = 0usize;
    for p in &tuples {
        let sys = build_system(p).unwrap();
        let ss = match steady_state(&sys) {
            Ok(ss) => ss,
            Err(Error::SingularMatrix(_)) => {
                // fixed point below the f64 resolvability floor; correctly
                // reported as pathology rather than returned as garbage
                unresolvable += 1;
                continue;
            }
            Err(e) => {
                c.check(false, || format!("steady_state failed at {p:?}: {e}"));
                continue;
            }
        };
        checked += 1;
        let fl = identity_floors(&sys, &ss);
        let nx0 = fl.x0_norm;
        let i0 = ss.x0.first;

        // fixed point: || x(T) - x0 ||_inf
        let tol_fp = f64::max(
            1e-9,
            64.0 * ((1.0 + fl.e2_norm * fl.e1_norm) * fl.err_x0
                + EPS * (1.0 + fl.e2_norm * fl.e1_norm) * f64::max(nx0, fl.nb_norm))
                / f64::max(1.0, nx0),
        );
        let res_fp = ss.fixed_point_residual / f64::max(1.0, nx0);
        c.check(res_fp <= tol_fp, || {
            format!("fixed-point residual {res_fp:e} > {tol_fp:e} at {p:?}")
        });

        // half-period current: i(0) = i(T/2)
        let tol_hv = f64::max(
            1e-9,
            64.0 * ((1.0 + fl.e1_norm) * (fl.err_x0 + EPS * nx0)) / f64::max(1.0, i0.abs()),
        );
        let res_hv = ss.half_period_current_residual / f64::max(1.0, i0.abs());
        c.check(res_hv <= tol_hv, || {
            format!("half-period residual {res_hv:e} > {tol_hv:e} at {p:?}")
        });

        // voltage reflection: v(0) + v(T/2) = Vdc
        let tol_vr = f64::max(
            1e-9,
            64.0 * ((1.0 + fl.e1_norm) * (fl.err_x0 + EPS * nx0) + EPS * p.vdc)
                / f64::max(1.0, p.vdc),
        );
        let res_vr = (ss.x0.second + ss.x_half.second - p.vdc).abs() / f64::max(1.0, p.vdc);
        c.check(res_vr <= tol_vr, || {
            format!("voltage reflection residual {res_vr:e} > {tol_vr:e} at {p:?}")
        });

        // Eq. (4)/(5): closed-form averages equal the exact-integral route
        let avg = averages_closed(&sys, &ss);
        let exact = average_exact_integral(&sys, &ss);
        let cavg = 2.0 * p.c / p.t;
        let mag_i = f64::max(1.0, f64::max(avg.i_avg.abs(), exact.first.abs()));
        let tol_e5 = f64::max(
            1e-9,
            64.0 * (cavg * 2.0 * (fl.err_x0 + EPS * nx0)
                + EPS * fl.integral_norm
                + EPS * f64::max(avg.i_avg.abs(), exact.first.abs()))
                / mag_i,
        );
        let res_e5 = (avg.i_avg - exact.first).abs() / mag_i;
        c.check(res_e5 <= tol_e5, || {
            format!("i-average routes differ: {res_e5:e} > {tol_e5:e} at {p:?}")
        });

        let half_vdc = f64::max(1.0, 0.5 * p.vdc);
        let tol_e4 = f64::max(
            1e-9,
            64.0 * ((1.0 + fl.e1_norm) * (fl.err_x0 + EPS * nx0)
                + EPS * fl.integral_norm
                + EPS * p.vdc)
                / half_vdc,
        );
        let res_e4a = (0.5 * (ss.x0.second + ss.x_half.second) - 0.5 * p.vdc).abs() / half_vdc;
        let res_e4b = (exact.second - 0.5 * p.vdc).abs() / half_vdc;
        c.check(res_e4a <= tol_e4, || {
            format!("anchor-route v-average residual {res_e4a:e} > {tol_e4:e} at {p:?}")
        });
        c.check(res_e4b <= tol_e4, || {
            format!("integral-route v-average residual {res_e4b:e} > {tol_e4:e} at {p:?}")
        });

        // deviation bound |i_avg - Vdc/2R| <= (T/2RC) max |i|
        let slack = 64.0
            * (cavg * 2.0 * (fl.err_x0 + EPS * nx0)
                + EPS * (avg.i_avg.abs() + avg.i_nominal + avg.i_deviation_bound));
        c.check(
            (avg.i_avg - avg.i_nominal).abs() <= avg.i_deviation_bound + slack,
            || {
                format!(
                    "deviation bound violated at {p:?}: |{} - {}| > {}",
                    avg.i_avg, avg.i_nominal, avg.i_deviation_bound
                )
            },
        );
    }
    c.note(format!(
        "{checked} tuples checked, {unresolvable} below the f64 fixed-point resolvability floor"
    ));
    c.finish();
}

#[test]
fn criterion_06_energy_identities() {
    let mut c = Criterion::new(6, "energy identities");

    // On the reference parameter sets the uniform 4096-interval Simpson grid
    // resolves the orbit: check the stated tolerance at both the base grid
    // and its 2x Richardson refinement.
    for p in [ref_heavy_load(), ref_light_load(), ref_sweep_base()] {
        let sys = build_system(&p).unwrap();
        let ss = steady_state(&sys).unwrap();
        for n in [4096usize, 8192] {
            let res = energy_residuals_with_intervals(&sys, &ss, n);
            c.check(res.power_balance_residual <= 1e-6, || {
                format!(
                    "power balance residual {:e} > 1e-6 at {n} intervals, {p:?}",
                    res.power_balance_residual
                )
            });
            c.check(res.ohmic_residual <= 1e-6, || {
                format!(
                    "ohmic residual {:e} > 1e-6 at {n} intervals, {p:?}",
                    res.ohmic_residual
                )
            });
        }
    }

    // Random tuples reach period-to-time-constant ratios beyond any uniform
    // grid; the adaptive panels (whose acceptance test is the Richardson
    // estimate) carry the same identity check there.
    let params = sample_box(0x5EED_0006, 100);
    let mut unresolvable = 0usize;
    let mut worst_ratio = 0.0f64;
    for p in &params {
        let sys = build_system(p).unwrap();
        let ss = match steady_state(&sys) {
            Ok(ss) => ss,
            Err(Error::SingularMatrix(_)) => {
                unresolvable += 1;
                continue;
            }
            Err(e) => {
                c.check(false, || format!("steady_state failed at {p:?}: {e}"));
                continue;
            }
        };
        let fl = identity_floors(&sys, &ss);
        // orbit relative error sets the floor on identity residuals
        let orbit_rel = (fl.err_x0 + EPS * fl.x0_norm) / f64::max(fl.x0_norm, 1e-300);
        let tol = f64::max(1e-6, 256.0 * orbit_rel);

        let res = energy_residuals(&sys, &ss);
        for (label, r) in [
            ("power balance", res.power_balance_residual),
            ("ohmic", res.ohmic_residual),
        ] {
            worst_ratio = worst_ratio.max(r / tol);
            c.check(r <= tol, || {
                format!("{label} residual {r:e} > {tol:e} at {p:?}")
            });
        }
    }
    c.note(format!(
        "3 figure sets at 4096/8192 uniform intervals; {} random tuples adaptive \
         ({unresolvable} unresolvable, worst residual at {worst_ratio:.3} of tolerance)",
        params.len(),
    ));
    c.finish();
}

#[test]
fn criterion_07_integrator_oracle_equivalence() {
    let mut c = Criterion::new(7, "RK45 vs closed form");
    let cfg = IntegratorConfig::default();
    for p in [ref_heavy_load(), ref_light_load(), ref_sweep_base()] {
        let sys = build_system(&p).unwrap();
        let ss = steady_state(&sys).unwrap();
        let period = sys.period();

        // five periods from the anchor stay within 1e-6 relative sup-norm
        let ts = integrate(&sys, ss.x0, 5, &cfg).unwrap();
        let mut scale = 0.0f64;
        for (&i, &v) in ts.currents.iter().zip(&ts.voltages) {
            scale = scale.max(i.abs()).max(v.abs());
        }
        let mut worst = 0.0f64;
        for (j, &t) in ts.times.iter().enumerate() {
            let wrapped = (t - period * (t / period).floor()).min(period);
            let exact = analysis::trajectory_at(&sys, &ss, wrapped).unwrap();
            worst = worst
                .max((ts.currents[j] - exact.first).abs())
                .max((ts.voltages[j] - exact.second).abs());
        }
        c.check(worst <= 1e-6 * scale, || {
            format!("sup-norm deviation {worst:e} > 1e-6 * {scale:e} at {p:?}")
        });

        // one period equals the discrete map within the integrator's own
        // error allowance, 10 * max(abs_tol, rel_tol * |x|)
        let m = monodromy(&sys);
        let n = analysis::forcing_matrix(&sys);
        for x0 in [Vec2::zero(), ss.x0, Vec2::new(10.0, -50.0)] {
            let one = integrate(&sys, x0, 1, &cfg).unwrap();
            let end = Vec2::new(*one.currents.last().unwrap(), *one.voltages.last().unwrap());
            let exact = m * x0 + n * sys.b1;
            let allowance = 10.0
                * f64::max(
                    cfg.abs_tol,
                    cfg.rel_tol * f64::max(exact.norm_inf(), x0.norm_inf()),
                );
            c.check((end - exact).norm_inf() <= allowance, || {
                format!(
                    "one-period map error {:e} > {allowance:e} at {p:?}, x0 = {x0:?}",
                    (end - exact).norm_inf()
                )
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_08_convergence_rate() {
    let mut c = Criterion::new(8, "geometric convergence rate");
    let sys = build_system(&ref_heavy_load()).unwrap();
    let rho = stability(&sys).unwrap().spectral_radius;
    let anchor_scale = steady_state(&sys).unwrap().x0.norm_inf();
    let recs = convergence_study(&sys, Vec2::zero(), 14).unwrap();

    let mut in_regime = 0usize;
    for pair in recs.windows(2) {
        let (d0, d1) = (pair[0].distance, pair[1].distance);
        if d0 < 1e-2 * anchor_scale && d0 > 1e-10 * anchor_scale {
            in_regime += 1;
            let ratio = d1 / d0;
            c.check((ratio - rho).abs() <= 0.2 * rho, || {
                format!(
                    "ratio {ratio} outside 20% of rho {rho} at k = {}",
                    pair[0].k
                )
            });
        }
    }
    c.check(in_regime >= 3, || {
        format!("only {in_regime} asymptotic-regime steps observed")
    });
    c.note(format!("rho = {rho:.6}, {in_regime} ratios checked"));
    c.finish();
}

#[test]
fn criterion_09_expm_oracle_suite() {
    let mut c = Criterion::new(9, "matrix-exponential oracle suite");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0009);
    let frob = |m: &Mat2| (m.m11 * m.m11 + m.m12 * m.m12 + m.m21 * m.m21 + m.m22 * m.m22).sqrt();

    let mut worst_agree = 0.0f64;
    let mut worst_liouville = 0.0f64;
    for _ in 0..10_000 {
        let a = Mat2::new(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
        let closed = a.expm_closed();
        let squared = a.expm_squaring();
        let agree = frob(&(closed - squared)) / frob(&squared);
        worst_agree = worst_agree.max(agree);
        if agree > 1e-12 {
            c.check(false, || {
                format!("expm routes disagree ({agree:e}) on {a:?}")
            });
        }

        // Liouville with the cosh/sinhc intermediate roundoff floor
        let det = closed.det();
        let expected = a.trace().exp();
        let k = common::expm_intermediate_scale(&a);
        let floor = f64::max(1e-10 * expected, 64.0 * EPS * k * k);
        worst_liouville = worst_liouville.max((det - expected).abs() / floor);
        if (det - expected).abs() > floor {
            c.check(false, || {
                format!("Liouville identity violated on {a:?}: {det} vs {expected}")
            });
        }
    }

    // branch-boundary continuity at q = +-1e-9 across a spread of traces
    for _ in 0..200 {
        let m = rng.random_range(-2.0..2.0);
        for q in [1e-9, -1e-9] {
            let det = m * m - q;
            let a = Mat2::new(2.0 * m, -det, 1.0, 0.0);
            let diff = a.expm_closed() - a.expm_squaring();
            c.check(diff.norm_inf() <= 1e-9, || {
                format!(
                    "branch discontinuity {:e} at m = {m}, q = {q}",
                    diff.norm_inf()
                )
            });
        }
    }
    c.note(format!(
        "worst route disagreement {worst_agree:.3e} (limit 1e-12), worst Liouville ratio {worst_liouville:.3e}"
    ));
    c.finish();
}

#[test]
fn criterion_10_conjecture_monitor() {
    let mut c = Criterion::new(10, "average-current conjecture monitor");
    let n = 200;
    let (lo, hi) = (1e-5f64, 2e-2f64);
    let t_values: Vec<f64> = (0..n)
        .map(|j| (lo.ln() + (hi.ln() - lo.ln()) * j as f64 / (n - 1) as f64).exp())
        .collect();
    let points = sweep_average_current(&ref_sweep_base(), &t_values).unwrap();
    c.check(points.len() == n, || {
        format!("expected {n} sweep points, got {}", points.len())
    });
    // violations are surfaced, never asserted against; classify each flag
    // against the fixed-point solve's noise scale at that period
    let mut flagged = 0usize;
    let mut beyond_noise = 0usize;
    for pt in &points {
        if pt.conjecture_satisfied {
            continue;
        }
        flagged += 1;
        let p = CircuitParams {
            t: pt.t,
            ..ref_sweep_base()
        };
        let sys = build_system(&p).unwrap();
        let ss = steady_state(&sys).unwrap();
        let fl = identity_floors(&sys, &ss);
        let noise = 64.0 * (2.0 * p.c / p.t) * 2.0 * (fl.err_x0 + EPS * fl.x0_norm);
        if pt.i_avg - pt.i_nominal > noise {
            beyond_noise += 1;
            c.note(format!(
                "flagged beyond noise: T = {:e}, i_avg = {}, i_nominal = {}",
                pt.t, pt.i_avg, pt.i_nominal
            ));
        }
    }
    c.note(format!(
        "{} / {n} points satisfy <i> <= Vdc/(2R); {flagged} flagged, of which \
         {beyond_noise} exceed the solve's numerical noise scale (a genuine violation \
         would appear here)",
        n - flagged,
    ));
    c.finish();
}
