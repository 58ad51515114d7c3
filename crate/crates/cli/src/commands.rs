//! Implementations of the subcommands: parameter resolution from the merged
//! config, computation via the core crate, and deterministic emission.

use bistab_core::analogy::{kerr_equivalent, ClassicalParams};
use bistab_core::dynamics::{sweep_state_equation, MeanField, SweepResult};
use bistab_core::model::{derive, Mode};
use bistab_core::quantum::{meanfield_discrepancy, HilbertConfig};
use bistab_core::steady::StateEquation;
use bistab_core::{C64, DerivedParams64, SystemParams64};

use crate::config::RunConfig;
use crate::emit::{human, sig, write_output, OutFormat};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing required value: --{flag}")))
}

fn parse_mode(cfg: &RunConfig) -> Result<Option<Mode>, CliError> {
    match cfg.mode.as_deref() {
        None => Ok(None),
        Some("paper") => Ok(Some(Mode::Paper)),
        Some("derived") | Some("consistent") => Ok(Some(Mode::Derived)),
        Some(other) => Err(usage(format!("unknown mode {other:?} (paper | derived)"))),
    }
}

fn mode_or(cfg: &RunConfig, default: Mode) -> Result<Mode, CliError> {
    Ok(parse_mode(cfg)?.unwrap_or(default))
}

/// The state-equation damping field: `--gamma2`, or `--gamma` together with
/// `--consistent`.
fn state_gamma(cfg: &RunConfig) -> Result<f64, CliError> {
    match (cfg.gamma2, cfg.gamma) {
        (Some(_), Some(_)) => Err(usage("--gamma2 conflicts with --gamma; give one")),
        (Some(g2), None) => Ok(g2),
        (None, Some(g)) if cfg.consistent == Some(true) => Ok(g),
        (None, Some(_)) => Err(usage("--gamma needs --consistent here; otherwise use --gamma2")),
        (None, None) => Err(usage("missing --gamma2 (or --gamma with --consistent)")),
    }
}

fn checked_input(cfg: &RunConfig) -> Result<f64, CliError> {
    let s = require(cfg.input, "input")?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(usage("input intensity must be ≥ 0"));
    }
    Ok(s)
}

/// Raw physical parameters from the config; `--delta` is shorthand for
/// `omega_c = delta, omega_l = 0`.
fn system_params(cfg: &RunConfig) -> Result<SystemParams64, CliError> {
    let mut p = SystemParams64::default();
    if let Some(d) = cfg.delta {
        if cfg.omega_c.is_some() || cfg.omega_l.is_some() {
            return Err(usage("--delta conflicts with --omega-c/--omega-l"));
        }
        p.omega_c = d;
        p.omega_l = 0.0;
    } else {
        if let Some(v) = cfg.omega_c {
            p.omega_c = v;
        }
        if let Some(v) = cfg.omega_l {
            p.omega_l = v;
        }
    }
    if let Some(v) = cfg.omega_m {
        p.omega_m = v;
    }
    if let Some(v) = cfg.coupling {
        p.coupling = v;
    }
    if let Some(v) = cfg.g {
        p.input_coupling = v;
    }
    p.drive = C64::new(cfg.e_re.unwrap_or(0.0), cfg.e_im.unwrap_or(0.0));
    if let Some(v) = cfg.gamma {
        p.gamma = v;
    }
    if let Some(v) = cfg.nbar {
        p.nbar = v;
    }
    p.kappa_override = cfg.kappa;
    Ok(p)
}

fn derived_params(cfg: &RunConfig, default_mode: Mode) -> Result<DerivedParams64, CliError> {
    let mode = mode_or(cfg, default_mode)?;
    if let (Some(delta_eff), Some(chi_eff)) = (cfg.delta_eff, cfg.chi_eff) {
        // effective-parameter path
        let gamma_eff = state_gamma(cfg)?;
        let s = checked_input(cfg)?;
        return Ok(DerivedParams64 {
            delta: delta_eff - chi_eff,
            kappa: (chi_eff / 3.0).sqrt(), // in omega_m = 1 units
            chi_eff,
            delta_eff,
            gamma_eff,
            scaled_drive: C64::new(s.sqrt(), 0.0),
            s,
            mode,
        });
    }
    let params = system_params(cfg)?;
    derive(&params, mode).map_err(|e| usage(e.to_string()))
}

fn stability_word(s: bistab_core::steady::Stability) -> &'static str {
    match s {
        bistab_core::steady::Stability::Stable => "stable",
        bistab_core::steady::Stability::Unstable => "unstable",
        bistab_core::steady::Stability::Marginal => "marginal",
    }
}

// ---------------------------------------------------------------- steady ---

pub fn cmd_steady(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = parse_mode(cfg)?.ok_or_else(|| usage("missing --mode (paper | derived)"))?;
    let eq = StateEquation {
        s: checked_input(cfg)?,
        gamma: state_gamma(cfg)?,
        delta: require(cfg.delta_eff, "delta-eff")?,
        twochi: require(cfg.two_chi, "two-chi")?,
        mode,
    };
    let roots = eq.solve_steady_states()?;

    println!("s,a,stability");
    for r in &roots.roots {
        println!("{},{},{}", human(eq.s), human(r.intensity), stability_word(r.stability));
    }

    if cfg.output.is_some() {
        let content = match OutFormat::parse(cfg.format.as_deref())? {
            OutFormat::Csv => {
                let mut out = String::from("s,a,stability,multiplicity\n");
                for r in &roots.roots {
                    out += &format!(
                        "{},{},{},{}\n",
                        sig(eq.s),
                        sig(r.intensity),
                        stability_word(r.stability),
                        r.multiplicity
                    );
                }
                out
            }
            OutFormat::Json => {
                let rows: Vec<String> = roots
                    .roots
                    .iter()
                    .map(|r| {
                        format!(
                            "{{\"a\":{},\"stability\":\"{}\",\"multiplicity\":{}}}",
                            sig(r.intensity),
                            stability_word(r.stability),
                            r.multiplicity
                        )
                    })
                    .collect();
                format!("{{\"s\":{},\"roots\":[{}]}}\n", sig(eq.s), rows.join(","))
            }
        };
        write_output(cfg.output.as_deref(), &content)?;
    }
    Ok(())
}

// ------------------------------------------------------------- threshold ---

pub fn cmd_threshold(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = parse_mode(cfg)?.ok_or_else(|| usage("missing --mode (paper | derived)"))?;
    let gamma = state_gamma(cfg)?;
    let twochi = cfg.two_chi.unwrap_or(1.0);
    match StateEquation::bistability_threshold(gamma, twochi, mode) {
        Some(dc) => println!("{}", human(dc)),
        None => println!("none"),
    }
    Ok(())
}

// ----------------------------------------------------------------- sweep ---

fn sweep_rows(result: &SweepResult<f64>) -> String {
    let mut out = String::new();
    for p in &result.points {
        out += &format!(
            "{},{},{},{},{}\n",
            result.direction,
            sig(p.s),
            sig(p.a),
            p.branch.id(),
            if p.stable { "stable" } else { "unstable" }
        );
    }
    out
}

fn join_jumps(jumps: &[f64], fmt: fn(f64) -> String) -> String {
    jumps.iter().map(|j| fmt(*j)).collect::<Vec<_>>().join(",")
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = parse_mode(cfg)?.ok_or_else(|| usage("missing --mode (paper | derived)"))?;
    let eq = StateEquation {
        s: 0.0,
        gamma: state_gamma(cfg)?,
        delta: require(cfg.delta_eff, "delta-eff")?,
        twochi: require(cfg.two_chi, "two-chi")?,
        mode,
    };
    let smin = require(cfg.smin, "smin")?;
    let smax = require(cfg.smax, "smax")?;
    let steps = require(cfg.steps, "steps")?;
    if !(smin >= 0.0 && smax > smin) || steps < 2 {
        return Err(usage("sweep needs 0 <= smin < smax and steps >= 2"));
    }
    let (up, down) = sweep_state_equation(&eq, smin, smax, steps)?;

    println!(
        "jump_inputs up=[{}] down=[{}]",
        join_jumps(&up.jump_inputs, human),
        join_jumps(&down.jump_inputs, human)
    );

    if cfg.output.is_some() {
        let content = match OutFormat::parse(cfg.format.as_deref())? {
            OutFormat::Csv => format!(
                "direction,s,a,branch_id,stable\n{}{}# up_jumps=[{}]\n# down_jumps=[{}]\n",
                sweep_rows(&up),
                sweep_rows(&down),
                join_jumps(&up.jump_inputs, sig),
                join_jumps(&down.jump_inputs, sig),
            ),
            OutFormat::Json => {
                let leg = |r: &SweepResult<f64>| {
                    let pts: Vec<String> = r
                        .points
                        .iter()
                        .map(|p| {
                            format!(
                                "{{\"s\":{},\"a\":{},\"branch_id\":{},\"stable\":{}}}",
                                sig(p.s),
                                sig(p.a),
                                p.branch.id(),
                                p.stable
                            )
                        })
                        .collect();
                    format!(
                        "{{\"points\":[{}],\"jump_inputs\":[{}]}}",
                        pts.join(","),
                        join_jumps(&r.jump_inputs, sig)
                    )
                };
                format!("{{\"up\":{},\"down\":{}}}\n", leg(&up), leg(&down))
            }
        };
        write_output(cfg.output.as_deref(), &content)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- evolve ---

pub fn cmd_evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = mode_or(cfg, Mode::Derived)?;
    let mf = if cfg.delta_eff.is_some() {
        let drive = match (cfg.drive_re, cfg.drive_im, cfg.input) {
            (None, None, Some(s)) if s >= 0.0 => C64::new(s.sqrt(), 0.0),
            (None, None, Some(_)) => return Err(usage("input intensity must be ≥ 0")),
            (re, im, None) => C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
            _ => return Err(usage("--input conflicts with --drive-re/--drive-im")),
        };
        MeanField {
            drive,
            gamma: require(cfg.gamma, "gamma")?,
            delta: require(cfg.delta_eff, "delta-eff")?,
            twochi: require(cfg.two_chi, "two-chi")?,
            mode,
        }
    } else {
        let params = system_params(cfg)?;
        MeanField::from_derived(&derive(&params, mode).map_err(|e| usage(e.to_string()))?)
    };

    let u0 = C64::new(cfg.u0_re.unwrap_or(0.0), cfg.u0_im.unwrap_or(0.0));
    let t_end = cfg.t_end.unwrap_or(50.0);
    let tol = cfg.tol.unwrap_or(1e-10);
    let traj = mf.integrate(u0, t_end, tol)?;

    let uf = traj.final_state();
    println!(
        "settled={} t_final={} u=({},{}) intensity={}",
        traj.settled,
        human(traj.final_time()),
        human(uf.re),
        human(uf.im),
        human(uf.norm_sqr())
    );

    if cfg.output.is_some() {
        let content = match OutFormat::parse(cfg.format.as_deref())? {
            OutFormat::Csv => {
                let mut out = String::from("t,re,im,intensity\n");
                for (t, u) in &traj.samples {
                    out += &format!("{},{},{},{}\n", sig(*t), sig(u.re), sig(u.im), sig(u.norm_sqr()));
                }
                out
            }
            OutFormat::Json => {
                let rows: Vec<String> = traj
                    .samples
                    .iter()
                    .map(|(t, u)| format!("[{},{},{}]", sig(*t), sig(u.re), sig(u.im)))
                    .collect();
                format!(
                    "{{\"settled\":{},\"samples\":[{}]}}\n",
                    traj.settled,
                    rows.join(",")
                )
            }
        };
        write_output(cfg.output.as_deref(), &content)?;
    }
    Ok(())
}

// ------------------------------------------------------------------ fig1 ---

pub fn cmd_fig1(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = mode_or(cfg, Mode::Derived)?;
    let gamma = cfg.gamma2.or(cfg.gamma).unwrap_or(1.0);
    let chi_ratio = cfg.chi_ratio.unwrap_or(0.5);
    let twochi = 2.0 * chi_ratio * gamma;
    let detunings = cfg.detunings.clone().unwrap_or_else(|| vec![-3.0, -2.0, -1.0]);
    let points = cfg.points.unwrap_or(400);
    let a_max = cfg.a_max.unwrap_or(4.0);

    let mut out = String::from("scaled_input,branch_id,scaled_output,stable\n");
    for scaled_delta in detunings {
        let eq = StateEquation { s: 0.0, gamma, delta: scaled_delta * gamma, twochi, mode };
        out += &format!("# detuning={}\n", sig(scaled_delta));
        for p in eq.response_curve(a_max, points) {
            out += &format!(
                "{},{},{},{}\n",
                sig(p.input),
                p.branch.id(),
                sig(p.output),
                stability_word(p.stability)
            );
        }
    }
    write_output(cfg.output.as_deref(), &out)
}

// ------------------------------------------------------------------ kerr ---

pub fn cmd_kerr(cfg: &RunConfig) -> Result<(), CliError> {
    let dp = derived_params(cfg, Mode::Paper)?;
    let kp = kerr_equivalent(&dp);
    println!(
        "kerr chi={} delta={} gamma={} s={}",
        human(kp.chi),
        human(kp.delta),
        human(kp.gamma),
        human(kp.s)
    );
    let roots = kp.state_equation().solve_steady_states()?;
    for r in &roots.roots {
        println!("{},{},{}", human(kp.s), human(r.intensity), stability_word(r.stability));
    }

    if cfg.output.is_some() {
        let content = match OutFormat::parse(cfg.format.as_deref())? {
            OutFormat::Csv => {
                let mut out = format!(
                    "# kerr chi={} delta={} gamma={}\ns,a,stability\n",
                    sig(kp.chi),
                    sig(kp.delta),
                    sig(kp.gamma)
                );
                for r in &roots.roots {
                    out += &format!("{},{},{}\n", sig(kp.s), sig(r.intensity), stability_word(r.stability));
                }
                out
            }
            OutFormat::Json => {
                let rows: Vec<String> = roots
                    .roots
                    .iter()
                    .map(|r| format!("{{\"a\":{},\"stability\":\"{}\"}}", sig(r.intensity), stability_word(r.stability)))
                    .collect();
                format!(
                    "{{\"chi\":{},\"delta\":{},\"gamma\":{},\"s\":{},\"roots\":[{}]}}\n",
                    sig(kp.chi),
                    sig(kp.delta),
                    sig(kp.gamma),
                    sig(kp.s),
                    rows.join(",")
                )
            }
        };
        write_output(cfg.output.as_deref(), &content)?;
    }
    Ok(())
}

// ------------------------------------------------------------- classical ---

pub fn cmd_classical(cfg: &RunConfig) -> Result<(), CliError> {
    let cp = ClassicalParams {
        reflectivity: require(cfg.reflectivity, "R")?,
        transmissivity: require(cfg.transmissivity, "T")?,
        beta0: require(cfg.beta0, "beta0")?,
        beta2: require(cfg.beta2, "beta2")?,
    };
    if cp.reflectivity < 0.0 || cp.transmissivity <= 0.0 {
        return Err(usage("need R >= 0 and T > 0"));
    }
    let io_max = cfg.io_max.unwrap_or(5.0);
    let points = cfg.points.unwrap_or(200).max(2);

    let mut out = String::new();
    match cp.turning_points() {
        Some((lo, hi)) => out += &format!("# folds at i_out={},{}\n", sig(lo), sig(hi)),
        None => out += "# monotonic\n",
    }
    out += "i_out,i_in\n";
    for i in 0..points {
        let io = io_max * i as f64 / (points - 1) as f64;
        out += &format!("{},{}\n", sig(io), sig(cp.input_intensity(io)));
    }
    write_output(cfg.output.as_deref(), &out)
}

// -------------------------------------------------------- quantum-compare ---

pub fn cmd_quantum_compare(cfg: &RunConfig) -> Result<(), CliError> {
    let params = system_params(cfg)?;
    let cfg_h = HilbertConfig::new(cfg.n_cavity.unwrap_or(16), cfg.n_mirror.unwrap_or(6))?;
    let t_end = cfg.t_end.unwrap_or(20.0);
    let report = meanfield_discrepancy(&params, cfg_h, t_end)?;

    println!("max_gap={:.6e} terminal_gap={:.6e}", report.max_gap, report.terminal_gap);

    if cfg.output.is_some() {
        let content = match OutFormat::parse(cfg.format.as_deref())? {
            OutFormat::Csv => {
                let mut out = String::from("t,re_quantum,im_quantum,re_meanfield,im_meanfield,gap\n");
                for i in 0..report.times.len() {
                    let q = report.quantum[i];
                    let m = report.meanfield[i];
                    out += &format!(
                        "{},{},{},{},{},{}\n",
                        sig(report.times[i]),
                        sig(q.re),
                        sig(q.im),
                        sig(m.re),
                        sig(m.im),
                        sig((q - m).norm())
                    );
                }
                out
            }
            OutFormat::Json => format!(
                "{{\"max_gap\":{},\"terminal_gap\":{}}}\n",
                sig(report.max_gap),
                sig(report.terminal_gap)
            ),
        };
        write_output(cfg.output.as_deref(), &content)?;
    }
    Ok(())
}
