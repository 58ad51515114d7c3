//! The master equation in the frame rotating at the drive frequency, and its
//! fixed-step integrator.
//!
//! ```text
//! dρ/dt = −i[H, ρ] + γ(2aρa† − ρn̂ − n̂ρ)
//! H     = δ·n̂ + ω_M·N̂ − G·n̂(b† + b) + i·gE·a† − i·(gE)*·a        (ħ = 1)
//! ```
//!
//! Because the truncated `a†a` equals the truncated `n̂` exactly, the
//! dissipator is trace-free on the truncated space as well; trace and
//! Hermiticity are therefore preserved to roundoff and both are monitored
//! every step.

use num_complex::Complex;

use crate::model::SystemParams;
use crate::scalar::{lit, Real};

use super::ops::{self, CMat, OperatorSet};
use super::{HilbertConfig, QuantumError};

/// Hermiticity slack accepted for a density matrix.
pub const HERM_SLACK: f64 = 1e-10;
/// Trace-deviation slack accepted for a density matrix.
pub const TRACE_SLACK: f64 = 1e-8;
/// Negative-eigenvalue slack accepted for a density matrix (truncation).
pub const POSITIVITY_SLACK: f64 = 1e-8;
/// Population of a cutoff Fock level above which results are untrustworthy.
pub const BREACH_LIMIT: f64 = 1e-4;

/// A joint cavity ⊗ mirror state with its time tag.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    pub matrix: CMat<T>,
    pub t: T,
}

impl<T: Real> DensityMatrix<T> {
    /// Check the Hermiticity / unit-trace / approximate-positivity
    /// invariants within the documented slacks.
    pub fn validate(&self) -> Result<(), QuantumError> {
        let herm = ops::hermiticity_deviation(&self.matrix);
        if herm > lit::<T>(HERM_SLACK) {
            return Err(QuantumError::InvariantViolated("hermiticity"));
        }
        let tr = ops::trace(&self.matrix);
        if (tr.re - T::one()).abs() > lit::<T>(TRACE_SLACK) || tr.im.abs() > lit::<T>(TRACE_SLACK) {
            return Err(QuantumError::InvariantViolated("unit trace"));
        }
        if !ops::positive_within_slack(&self.matrix, lit::<T>(POSITIVITY_SLACK)) {
            return Err(QuantumError::InvariantViolated("positivity"));
        }
        Ok(())
    }
}

/// Rotating-frame Hamiltonian for the given parameters.
pub fn build_hamiltonian<T: Real>(
    params: &SystemParams<T>,
    cfg: HilbertConfig,
) -> Result<CMat<T>, QuantumError> {
    let ops = OperatorSet::<T>::new(cfg)?;
    Ok(hamiltonian_from_ops(params, &ops))
}

fn hamiltonian_from_ops<T: Real>(params: &SystemParams<T>, ops: &OperatorSet<T>) -> CMat<T> {
    let delta = Complex::new(params.detuning(), T::zero());
    let omega_m = Complex::new(params.omega_m, T::zero());
    let g_coup = Complex::new(params.coupling, T::zero());
    // g enters as a prefactor on the drive amplitude
    let e = params.drive * params.input_coupling;
    let i = Complex::new(T::zero(), T::one());

    let mut h = ops.n.mapv(|z| z * delta);
    h = h + &ops.nb.mapv(|z| z * omega_m);
    let bsum = &ops.bdag + &ops.b;
    h = h - ops.n.dot(&bsum).mapv(|z| z * g_coup);
    h = h + ops.adag.mapv(|z| z * (i * e));
    h = h - ops.a.mapv(|z| z * (i * e.conj()));
    h
}

/// The Lindblad generator bound to a Hamiltonian and loss rate.
pub struct MasterEq<T: Real> {
    pub h: CMat<T>,
    pub gamma: T,
    ops: OperatorSet<T>,
}

impl<T: Real> MasterEq<T> {
    pub fn new(h: CMat<T>, gamma: T, cfg: HilbertConfig) -> Result<Self, QuantumError> {
        let ops = OperatorSet::<T>::new(cfg)?;
        if h.dim() != (cfg.dim(), cfg.dim()) {
            return Err(QuantumError::ShapeMismatch);
        }
        Ok(Self { h, gamma, ops })
    }

    pub fn for_params(params: &SystemParams<T>, cfg: HilbertConfig) -> Result<Self, QuantumError> {
        let ops = OperatorSet::<T>::new(cfg)?;
        let h = hamiltonian_from_ops(params, &ops);
        Ok(Self { h, gamma: params.gamma, ops })
    }

    /// `dρ/dt = −i[H,ρ] + γ(2aρa† − ρn̂ − n̂ρ)`.
    pub fn rhs(&self, rho: &CMat<T>) -> Result<CMat<T>, QuantumError> {
        if rho.dim() != self.h.dim() {
            return Err(QuantumError::ShapeMismatch);
        }
        Ok(self.rhs_unchecked(rho))
    }

    fn rhs_unchecked(&self, rho: &CMat<T>) -> CMat<T> {
        let i = Complex::new(T::zero(), T::one());
        let comm = self.h.dot(rho) - rho.dot(&self.h);
        let mut out = comm.mapv(|z| -i * z);
        let g = Complex::new(self.gamma, T::zero());
        let two = Complex::new(lit::<T>(2.0), T::zero());
        out = out + self.ops.a.dot(rho).dot(&self.ops.adag).mapv(|z| z * (two * g));
        out = out - rho.dot(&self.ops.n).mapv(|z| z * g);
        out = out - self.ops.n.dot(rho).mapv(|z| z * g);
        out
    }
}

/// Free-function form of the dissipative right-hand side.
pub fn lindblad_rhs<T: Real>(
    rho: &CMat<T>,
    h: &CMat<T>,
    gamma: T,
    cfg: HilbertConfig,
) -> Result<CMat<T>, QuantumError> {
    MasterEq::new(h.clone(), gamma, cfg)?.rhs(rho)
}

/// Expectation series and invariant drift recorded along an evolution.
#[derive(Debug, Clone)]
pub struct RhoTrajectory<T: Real> {
    pub times: Vec<T>,
    /// ⟨a⟩(t)
    pub a_mean: Vec<Complex<T>>,
    /// ⟨n̂⟩(t)
    pub n_mean: Vec<T>,
    /// ⟨N̂⟩(t)
    pub nb_mean: Vec<T>,
    /// Worst |Tr ρ − 1| seen along the run.
    pub trace_drift: T,
    /// Worst Hermiticity deviation seen along the run.
    pub herm_drift: T,
    /// Worst cutoff-level population seen along the run.
    pub cutoff_population: T,
    pub final_state: DensityMatrix<T>,
}

/// Truncated thermal occupation probabilities, normalized on the cutoff.
pub fn thermal_probs<T: Real>(nbar: T, dim: usize) -> Vec<T> {
    if nbar <= T::zero() {
        let mut p = vec![T::zero(); dim];
        p[0] = T::one();
        return p;
    }
    let t = nbar / (T::one() + nbar);
    let mut p = Vec::with_capacity(dim);
    let mut w = T::one() / (T::one() + nbar);
    for _ in 0..dim {
        p.push(w);
        w = w * t;
    }
    let total: T = p.iter().copied().sum();
    for w in &mut p {
        *w = *w / total;
    }
    p
}

/// Diagonal thermal density matrix on a single mode.
pub fn thermal_state<T: Real>(nbar: T, dim: usize) -> CMat<T> {
    let mut m = CMat::<T>::zeros((dim, dim));
    for (n, p) in thermal_probs(nbar, dim).into_iter().enumerate() {
        m[(n, n)] = Complex::new(p, T::zero());
    }
    m
}

/// Cavity vacuum ⊗ thermal mirror, the standard initial state for oracle runs.
pub fn initial_state<T: Real>(cfg: HilbertConfig, nbar: T) -> CMat<T> {
    let mut vac = CMat::<T>::zeros((cfg.n_cavity, cfg.n_cavity));
    vac[(0, 0)] = Complex::new(T::one(), T::zero());
    ops::kron(&vac, &thermal_state(nbar, cfg.n_mirror))
}

/// Marginal population of the top cavity level (and top mirror level, unless
/// the mirror is frozen at a single level).
fn cutoff_population<T: Real>(rho: &CMat<T>, cfg: HilbertConfig) -> T {
    let (nc, nm) = (cfg.n_cavity, cfg.n_mirror);
    let mut worst = T::zero();
    let mut cav = T::zero();
    for big_n in 0..nm {
        cav = cav + rho[((nc - 1) * nm + big_n, (nc - 1) * nm + big_n)].re;
    }
    worst = worst.max(cav);
    if nm > 1 {
        let mut mir = T::zero();
        for n in 0..nc {
            mir = mir + rho[(n * nm + nm - 1, n * nm + nm - 1)].re;
        }
        worst = worst.max(mir);
    }
    worst
}

/// Fixed-step fourth-order integration of the master equation.
///
/// Returns the expectation series and the final state; every step asserts the
/// density-matrix invariants and watches the cutoff populations.
pub fn evolve_rho<T: Real>(
    rho0: &CMat<T>,
    params: &SystemParams<T>,
    cfg: HilbertConfig,
    t_end: T,
    dt: T,
) -> Result<RhoTrajectory<T>, QuantumError> {
    if !(dt > T::zero()) || !(t_end > T::zero()) || !dt.is_finite() || !t_end.is_finite() {
        return Err(QuantumError::InvalidInput("t_end and dt must be positive and finite"));
    }
    let meq = MasterEq::for_params(params, cfg)?;
    if rho0.dim() != meq.h.dim() {
        return Err(QuantumError::ShapeMismatch);
    }

    let steps = (t_end / dt).round().to_usize().unwrap_or(0).max(1);
    let half = Complex::new(dt / lit::<T>(2.0), T::zero());
    let full = Complex::new(dt, T::zero());
    let sixth = Complex::new(dt / lit::<T>(6.0), T::zero());
    let two = Complex::new(lit::<T>(2.0), T::zero());

    let mut rho = rho0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut a_mean = Vec::with_capacity(steps + 1);
    let mut n_mean = Vec::with_capacity(steps + 1);
    let mut nb_mean = Vec::with_capacity(steps + 1);
    let mut trace_drift = T::zero();
    let mut herm_drift = T::zero();
    let mut breach = T::zero();

    let mut record = |rho: &CMat<T>, t: T, trace_drift: &mut T, herm_drift: &mut T, breach: &mut T| -> Result<(), QuantumError> {
        let tr = ops::trace(rho);
        let tr_dev = ((tr.re - T::one()).powi(2) + tr.im.powi(2)).sqrt();
        *trace_drift = (*trace_drift).max(tr_dev);
        let herm = ops::hermiticity_deviation(rho);
        *herm_drift = (*herm_drift).max(herm);
        let pop = cutoff_population(rho, cfg);
        *breach = (*breach).max(pop);
        if pop > lit::<T>(BREACH_LIMIT) {
            return Err(QuantumError::TruncationBreach { population: pop.to_f64().unwrap_or(f64::NAN) });
        }
        if tr_dev > lit::<T>(TRACE_SLACK) {
            return Err(QuantumError::InvariantViolated("unit trace"));
        }
        if herm > lit::<T>(HERM_SLACK) {
            return Err(QuantumError::InvariantViolated("hermiticity"));
        }
        if !ops::positive_within_slack(rho, lit::<T>(POSITIVITY_SLACK)) {
            return Err(QuantumError::InvariantViolated("positivity"));
        }
        times.push(t);
        a_mean.push(ops::trace_product(&meq.ops.a, rho));
        n_mean.push(ops::trace_product(&meq.ops.n, rho).re);
        nb_mean.push(ops::trace_product(&meq.ops.nb, rho).re);
        Ok(())
    };

    record(&rho, T::zero(), &mut trace_drift, &mut herm_drift, &mut breach)?;
    for step in 0..steps {
        let k1 = meq.rhs_unchecked(&rho);
        let k2 = meq.rhs_unchecked(&(&rho + &k1.mapv(|z| z * half)));
        let k3 = meq.rhs_unchecked(&(&rho + &k2.mapv(|z| z * half)));
        let k4 = meq.rhs_unchecked(&(&rho + &k3.mapv(|z| z * full)));
        rho = &rho + &(k1 + (k2 + k3).mapv(|z| z * two) + k4).mapv(|z| z * sixth);

        let t = dt * T::from_usize(step + 1).unwrap();
        record(&rho, t, &mut trace_drift, &mut herm_drift, &mut breach)?;
    }

    let t_final = *times.last().unwrap();
    Ok(RhoTrajectory {
        times,
        a_mean,
        n_mean,
        nb_mean,
        trace_drift,
        herm_drift,
        cutoff_population: breach,
        final_state: DensityMatrix { matrix: rho, t: t_final },
    })
}
