//! Acceptance suite: one test per exit criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use bistab_core::analogy::kerr_equivalent;
use bistab_core::dynamics::{sweep_state_equation, MeanField};
use bistab_core::model::{derive, Mode, SystemParams};
use bistab_core::quantum::{
    displacement_expectation, evolve_rho, initial_state, meanfield_discrepancy, HilbertConfig,
    QuantumError,
};
use bistab_core::steady::{StateEquation, Stability};
use bistab_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(number: u32, name: &str, result: Result<(), String>) {
    match &result {
        Ok(()) => println!("criterion {number:02} ({name}): PASS"),
        Err(msg) => println!("criterion {number:02} ({name}): FAIL — {msg}"),
    }
    if let Err(msg) = result {
        panic!("criterion {number:02} failed: {msg}");
    }
}

fn check(cond: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent root oracle: dense residual scan plus bisection refinement.
fn scan_roots(eq: &StateEquation<f64>, a_max: f64, n_grid: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = a_max / n_grid as f64;
    let mut prev_a = 0.0;
    let mut prev_f = eq.residual(0.0).unwrap();
    if prev_f == 0.0 {
        roots.push(0.0);
    }
    for i in 1..=n_grid {
        let a = step * i as f64;
        let f = eq.residual(a).unwrap();
        if f == 0.0 {
            roots.push(a);
        } else if prev_f.signum() != f.signum() && prev_f != 0.0 {
            let (mut lo, mut hi, mut flo) = (prev_a, a, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = eq.residual(mid).unwrap();
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_a = a;
        prev_f = f;
    }
    roots
}

fn random_equation(rng: &mut ChaCha8Rng, mode: Mode) -> StateEquation<f64> {
    StateEquation {
        s: rng.gen_range(0.0..12.0),
        gamma: rng.gen_range(0.3..2.5),
        delta: rng.gen_range(-6.0..6.0),
        twochi: rng.gen_range(0.1..3.0),
        mode,
    }
}

/// Draws whose roots sit too close to a fold (or to each other) are redrawn:
/// root positions there are ill-conditioned beyond the comparison tolerance.
fn well_conditioned(eq: &StateEquation<f64>, roots: &[f64], grid_step: f64) -> bool {
    let scale = 1.0 + eq.gamma.max(eq.gamma * eq.gamma) + eq.delta * eq.delta;
    for (i, &a) in roots.iter().enumerate() {
        if eq.slope(a).abs() < 1e-3 * scale {
            return false;
        }
        if i + 1 < roots.len() && roots[i + 1] - a < 4.0 * grid_step {
            return false;
        }
    }
    true
}

#[test]
fn criterion_01_cubic_solver_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB15A);
    let result = (|| -> Result<(), String> {
        let n_grid = 10_000;
        for mode in [Mode::Paper, Mode::Derived] {
            let mut accepted = 0;
            while accepted < 1000 {
                let eq = random_equation(&mut rng, mode);
                let rs = eq
                    .solve_steady_states()
                    .map_err(|e| format!("solver failed on {eq:?}: {e}"))?;
                let damping = match mode {
                    Mode::Paper => eq.gamma,
                    Mode::Derived => eq.gamma * eq.gamma,
                };
                let a_max = eq.s / damping * (1.0 + 1e-9) + 1e-9;
                if !well_conditioned(&eq, &rs.intensities(), a_max / n_grid as f64) {
                    continue;
                }
                let scanned = scan_roots(&eq, a_max, n_grid);
                let reported = rs.intensities();
                check(scanned.len() == reported.len(), || {
                    format!("root count mismatch on {eq:?}: scan {scanned:?} vs {reported:?}")
                })?;
                for (s, r) in scanned.iter().zip(reported.iter()) {
                    check((s - r).abs() <= 1e-8, || {
                        format!("root mismatch on {eq:?}: {s} vs {r}")
                    })?;
                }
                accepted += 1;
            }
        }
        let elapsed = started.elapsed().as_secs_f64();
        check(elapsed < 10.0, || format!("runtime {elapsed:.2}s exceeds 10s"))
    })();
    report(1, "cubic-solver oracle equivalence", result);
}

#[test]
fn criterion_02_exact_factorization_fixtures() {
    let result = (|| -> Result<(), String> {
        let paper = StateEquation { s: 4.0, gamma: 1.0, delta: 3.0, twochi: 1.0, mode: Mode::Paper };
        let roots = paper.solve_steady_states().map_err(|e| e.to_string())?;
        let expected = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        check(roots.count() == 3, || format!("paper fixture count {}", roots.count()))?;
        for (r, e) in roots.intensities().iter().zip(expected.iter()) {
            check((r - e).abs() <= 1e-10, || format!("paper root {r} vs {e}"))?;
        }

        let derived: StateEquation<f64> =
            StateEquation { s: 2.0, gamma: 1.0, delta: -2.0, twochi: 1.0, mode: Mode::Derived };
        let roots = derived.solve_steady_states().map_err(|e| e.to_string())?;
        check(roots.count() == 2, || format!("tangency count {}", roots.count()))?;
        check(roots.roots[0].multiplicity == 2, || "tangency multiplicity".into())?;
        check((roots.roots[0].intensity - 1.0).abs() <= 1e-6, || {
            format!("double root {}", roots.roots[0].intensity)
        })?;
        check((roots.roots[1].intensity - 2.0).abs() <= 1e-6, || {
            format!("simple root {}", roots.roots[1].intensity)
        })
    })();
    report(2, "exact-factorization fixtures", result);
}

#[test]
fn criterion_03_figure_reproduction_and_threshold() {
    let result = (|| -> Result<(), String> {
        // chi_eff/Γ = 0.5 in Γ = 1 units: twochi = 1
        let base = StateEquation { s: 0.0, gamma: 1.0, delta: 0.0, twochi: 1.0, mode: Mode::Derived };
        for (delta, expected_folds) in [(-3.0, 2usize), (-2.0, 2), (-1.0, 0)] {
            let eq = StateEquation { delta, ..base };
            let curve = eq.response_curve(6.0, 2400);
            let diffs: Vec<f64> = curve.windows(2).map(|w| w[1].input - w[0].input).collect();
            let folds = diffs
                .windows(2)
                .filter(|d| d[0].signum() != d[1].signum())
                .count();
            check(folds == expected_folds, || {
                format!("detuning {delta}: {folds} turning points, expected {expected_folds}")
            })?;
        }

        // bisection on the fold-appearance boundary
        let has_fold = |delta: f64| StateEquation { delta, ..base }.turning_points().is_some();
        check(has_fold(-2.0) && !has_fold(-1.0), || "bracketing failed".into())?;
        let (mut lo, mut hi) = (-2.0, -1.0); // fold present at lo, absent at hi
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if has_fold(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let bisected = 0.5 * (lo + hi);
        check((bisected.abs() - 3f64.sqrt()).abs() <= 1e-6, || {
            format!("bisection gave {bisected}, expected ±√3")
        })?;
        let closed = StateEquation::bistability_threshold(1.0, 1.0, Mode::Derived)
            .ok_or("threshold returned none")?;
        check((closed - bisected).abs() <= 1e-6, || {
            format!("threshold {closed} vs bisected {bisected}")
        })
    })();
    report(3, "figure reproduction and threshold", result);
}

#[test]
fn criterion_04_hysteresis_jumps_match_folds() {
    let result = (|| -> Result<(), String> {
        let eq: StateEquation<f64> =
            StateEquation { s: 0.0, gamma: 1.0, delta: -2.0, twochi: 1.0, mode: Mode::Derived };
        let n_steps = 600;
        let step = 3.0 / (n_steps as f64 - 1.0);
        let (up, down) = sweep_state_equation(&eq, 0.0, 3.0, n_steps).map_err(|e| e.to_string())?;
        let tp = eq.turning_points().ok_or("expected folds")?;
        check(up.jump_inputs.len() == 1 && down.jump_inputs.len() == 1, || {
            format!("jump counts: up {:?} down {:?}", up.jump_inputs, down.jump_inputs)
        })?;
        check((up.jump_inputs[0] - tp.s_at_lower).abs() <= step, || {
            format!("up jump {} vs fold {}", up.jump_inputs[0], tp.s_at_lower)
        })?;
        check((down.jump_inputs[0] - tp.s_at_upper).abs() <= step, || {
            format!("down jump {} vs fold {}", down.jump_inputs[0], tp.s_at_upper)
        })?;

        let linear = StateEquation { twochi: 0.0, ..eq };
        let (up, down) = sweep_state_equation(&linear, 0.0, 3.0, 201).map_err(|e| e.to_string())?;
        check(up.jump_inputs.is_empty() && down.jump_inputs.is_empty(), || {
            "linear cavity produced jumps".into()
        })
    })();
    report(4, "hysteresis jumps at fold inputs", result);
}

#[test]
fn criterion_05_stability_criteria_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57AB);
    let result = (|| -> Result<(), String> {
        for mode in [Mode::Paper, Mode::Derived] {
            let mut accepted = 0;
            while accepted < 100 {
                let mf = MeanField {
                    drive: C64::from_polar(rng.gen_range(0.2..3.2), rng.gen_range(0.0..std::f64::consts::TAU)),
                    gamma: rng.gen_range(0.3..2.0),
                    delta: rng.gen_range(-5.0..5.0),
                    twochi: rng.gen_range(0.1..2.0),
                    mode,
                };
                let eq = mf.state_equation();
                let roots = eq.solve_steady_states().map_err(|e| e.to_string())?;
                if roots.roots.iter().any(|r| r.stability == Stability::Marginal) {
                    continue;
                }
                for r in &roots.roots {
                    let u = mf.fixed_point(r.intensity);
                    let (l1, l2) = mf.eigenvalues(u);
                    let eig_stable = l1.re.max(l2.re) < 0.0;
                    check(eig_stable == r.stability.is_stable(), || {
                        format!(
                            "criteria disagree at {mf:?}, root {}: slope {:?}, max Re λ {}",
                            r.intensity,
                            r.stability,
                            l1.re.max(l2.re)
                        )
                    })?;
                }
                accepted += 1;
            }
        }
        Ok(())
    })();
    report(5, "eigenvalue vs slope stability", result);
}

#[test]
fn criterion_06_dynamics_correctness() {
    let result = (|| -> Result<(), String> {
        // drive-off decay against the closed form at t = 5/Γ
        for gamma in [1.0, 1.3] {
            let mf = MeanField {
                drive: C64::new(0.0, 0.0),
                gamma,
                delta: 0.6,
                twochi: 0.9,
                mode: Mode::Derived,
            };
            let u0 = C64::new(1.3, -1.1);
            let t_end = 5.0 / gamma;
            let traj = mf.integrate(u0, t_end, 1e-12).map_err(|e| e.to_string())?;
            let exact = u0.norm() * (-gamma * t_end).exp();
            let err = (traj.final_state().norm() - exact).abs();
            check(err <= 1e-8, || format!("decay error {err} at gamma {gamma}"))?;
        }

        // settled trajectories land on a stable root
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
        let mut cases: Vec<(MeanField<f64>, C64)> = vec![
            (
                MeanField { drive: C64::new(2.0, 0.0), gamma: 1.0, delta: 3.0, twochi: 1.0, mode: Mode::Paper },
                C64::new(1.8, -0.2),
            ),
            (
                MeanField { drive: C64::new(1.95f64.sqrt(), 0.0), gamma: 1.0, delta: -2.0, twochi: 1.0, mode: Mode::Derived },
                C64::new(0.0, 0.0),
            ),
        ];
        for _ in 0..10 {
            let mf = MeanField {
                drive: C64::from_polar(rng.gen_range(0.2..2.5), rng.gen_range(0.0..std::f64::consts::TAU)),
                gamma: rng.gen_range(0.4..1.8),
                delta: rng.gen_range(-4.0..4.0),
                twochi: rng.gen_range(0.0..1.5),
                mode: if rng.gen_bool(0.5) { Mode::Paper } else { Mode::Derived },
            };
            let u0 = C64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            cases.push((mf, u0));
        }
        for (mf, u0) in cases {
            let traj = mf.integrate(u0, 2000.0, 1e-11).map_err(|e| e.to_string())?;
            check(traj.settled, || format!("did not settle: {mf:?}"))?;
            let a = traj.settle_value.unwrap().norm_sqr();
            let roots = mf.state_equation().solve_steady_states().map_err(|e| e.to_string())?;
            let nearest_stable = roots
                .stable_roots()
                .map(|r| (r.intensity - a).abs())
                .fold(f64::INFINITY, f64::min);
            check(nearest_stable <= 1e-6, || {
                format!("settled at {a}, nearest stable root off by {nearest_stable} ({mf:?})")
            })?;
        }
        Ok(())
    })();
    report(6, "mean-field dynamics correctness", result);
}

#[test]
fn criterion_07_quantum_linear_cavity_oracle() {
    let started = Instant::now();
    let result = (|| -> Result<(), String> {
        let cfg = HilbertConfig::new(20, 1).map_err(|e| e.to_string())?;
        for delta in [0.0, 1.0] {
            let params = SystemParams {
                omega_c: delta,
                omega_l: 0.0,
                omega_m: 1.0,
                coupling: 0.0,
                drive: C64::new(0.3, 0.0),
                gamma: 1.0,
                ..SystemParams::default()
            };
            let rho0 = initial_state(cfg, 0.0);
            let traj = evolve_rho(&rho0, &params, cfg, 20.0, 0.01).map_err(|e| e.to_string())?;
            let expect = C64::new(0.3, 0.0) / C64::new(1.0, delta);
            let got = *traj.a_mean.last().unwrap();
            check((got - expect).norm() <= 1e-4, || {
                format!("⟨a⟩ {got} vs {expect} at δ={delta}")
            })?;
            check(traj.trace_drift < 1e-8, || format!("trace drift {}", traj.trace_drift))?;
            check(traj.herm_drift < 1e-10, || format!("hermiticity drift {}", traj.herm_drift))?;
        }
        let elapsed = started.elapsed().as_secs_f64();
        check(elapsed < 60.0, || format!("runtime {elapsed:.1}s exceeds 60s"))
    })();
    report(7, "quantum linear-cavity oracle", result);
}

#[test]
fn criterion_08_thermal_displacement_sum() {
    let result = (|| -> Result<(), String> {
        // The op's own tail guard (1e-10) admits n̄ ≤ ~2.13 at cutoff 60; the
        // n̄ = 3 row is checked at the deeper cutoff the guard demands and the
        // guard itself is checked at 60 (where the naive sum would also miss
        // the 1e-8 target near κ → 0: the tail mass alone is 3.2e-8).
        let kappas: [f64; 7] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
        for nbar in [0.0f64, 0.5, 1.0, 2.0] {
            for &kappa in &kappas {
                let r = displacement_expectation(kappa, nbar, 60).map_err(|e| e.to_string())?;
                let err = (r.truncated_sum - r.closed_form).abs();
                check(err <= 1e-8, || {
                    format!("κ={kappa} n̄={nbar} cutoff 60: error {err:.3e}")
                })?;
            }
        }
        match displacement_expectation(1.0, 3.0, 60) {
            Err(QuantumError::CutoffTooSmall { .. }) => {}
            other => return Err(format!("n̄=3 at cutoff 60 should refuse, got {other:?}")),
        }
        for &kappa in &kappas {
            let r = displacement_expectation(kappa, 3.0, 90).map_err(|e| e.to_string())?;
            let err = (r.truncated_sum - r.closed_form).abs();
            check(err <= 1e-8, || format!("κ={kappa} n̄=3 cutoff 90: error {err:.3e}"))?;
        }
        // document the printed-sign variant alongside the computed values
        let r = displacement_expectation(1.0f64, 1.0, 60).map_err(|e| e.to_string())?;
        println!(
            "    displacement expectation at κ=1, n̄=1: sum {:.9}, closed form {:.9}, printed variant {:.9}",
            r.truncated_sum, r.closed_form, r.paper_variant
        );
        check((r.paper_variant - r.closed_form).abs() > 1.0, || {
            "printed variant unexpectedly agrees".into()
        })
    })();
    report(8, "thermal displacement sum vs closed form", result);
}

#[test]
fn criterion_09_kerr_equivalence_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4E44);
    let result = (|| -> Result<(), String> {
        for _ in 0..100 {
            let params = SystemParams {
                omega_c: rng.gen_range(-4.0..4.0),
                omega_l: 0.0,
                omega_m: rng.gen_range(0.2..3.0),
                coupling: rng.gen_range(0.0..1.5),
                drive: C64::new(rng.gen_range(0.0..2.5), rng.gen_range(-1.0..1.0)),
                gamma: rng.gen_range(0.3..2.0),
                nbar: rng.gen_range(0.0..2.0),
                ..SystemParams::default()
            };
            let dp = derive(&params, Mode::Paper).map_err(|e| e.to_string())?;
            let kerr = kerr_equivalent(&dp);
            let eq = StateEquation::from_derived(&dp);
            let a = rng.gen_range(0.0..8.0);
            let kr = kerr.residual(a).map_err(|e| e.to_string())?;
            let pr = eq.residual(a).map_err(|e| e.to_string())?;
            let scale = 1.0f64.max(pr.abs());
            check((kr - pr).abs() <= 1e-12 * scale, || {
                format!("identity violated at a={a}: kerr {kr} vs paper {pr}")
            })?;
        }
        Ok(())
    })();
    report(9, "Kerr equivalence coefficient identity", result);
}

#[test]
fn criterion_10_meanfield_quantum_trend() {
    let result = (|| -> Result<(), String> {
        let cfg = HilbertConfig::new(6, 5).map_err(|e| e.to_string())?;
        let omega_m = 2.0;
        let mut gaps = Vec::new();
        for ratio in [0.2, 0.1, 0.05] {
            let params = SystemParams {
                omega_c: 0.4,
                omega_l: 0.0,
                omega_m,
                coupling: ratio * omega_m,
                drive: C64::new(0.15, 0.0),
                gamma: 1.0,
                ..SystemParams::default()
            };
            let rep = meanfield_discrepancy(&params, cfg, 20.0).map_err(|e| e.to_string())?;
            gaps.push(rep.max_gap);
        }
        println!("    discrepancy ladder over G/ω_M ∈ {{0.2, 0.1, 0.05}}: {gaps:?}");
        check(gaps[0] > gaps[1] && gaps[1] > gaps[2], || {
            format!("ladder not strictly decreasing: {gaps:?}")
        })
    })();
    report(10, "mean-field vs quantum trend", result);
}
