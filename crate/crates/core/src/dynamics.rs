//! Mean-field dynamics: the deterministic equations of motion for ⟨a⟩, their
//! fixed-point stability, and hysteresis sweeps along the steady-state curve.
//!
//! The mean field obeys
//!
//! ```text
//! du/dt = E_s − [Γ + i(Δ ± 2χ·|u|²)]·u
//! ```
//!
//! with the bracket sign following the mode convention, so that the fixed
//! points of each mode reproduce the matching state equation. The printed
//! equations carry no noise terms despite their name, so the integration is
//! deterministic.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{DerivedParams, Mode};
use crate::ode::{self, OdeError, SettleSpec};
use crate::scalar::{lit, Real};
use crate::steady::{StateEquation, SteadyError};

pub use crate::ode::Trajectory;

/// `|rhs| < SETTLE_TOL·max(1,|u|)` sustained for [`SETTLE_DWELL`] accepted
/// steps counts as settled.
const SETTLE_TOL: f64 = 1e-9;
const SETTLE_DWELL: usize = 5;
/// Fixed-point tolerance for the Jacobian eigenvalue routine.
const FIXED_POINT_TOL: f64 = 1e-6;

/// Errors from the dynamics module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("u is not a fixed point of the mean-field equations")]
    NotAFixedPoint,
    #[error(transparent)]
    Steady(#[from] SteadyError),
}

/// Parameters of the mean-field equation of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField<T: Real> {
    /// Thermally scaled complex drive `E_s = g·E·exp(κ²(n̄+½))`.
    pub drive: Complex<T>,
    /// Amplitude damping Γ.
    pub gamma: T,
    /// Effective detuning Δ.
    pub delta: T,
    /// Nonlinear coefficient `2χ_eff`.
    pub twochi: T,
    pub mode: Mode,
}

impl<T: Real> MeanField<T> {
    pub fn from_derived(dp: &DerivedParams<T>) -> Self {
        Self {
            drive: dp.scaled_drive,
            gamma: dp.gamma_eff,
            delta: dp.delta_eff,
            twochi: lit::<T>(2.0) * dp.chi_eff,
            mode: dp.mode,
        }
    }

    /// Full detuning bracket `Δ ± 2χ·a` at intensity `a`.
    #[inline]
    fn bracket(&self, a: T) -> T {
        self.delta + self.mode.bracket_sign::<T>() * self.twochi * a
    }

    /// Right-hand side `du/dt`.
    #[inline]
    pub fn rhs(&self, u: Complex<T>) -> Complex<T> {
        self.drive - Complex::new(self.gamma, self.bracket(u.norm_sqr())) * u
    }

    /// The state equation whose roots are exactly this equation's fixed-point
    /// intensities: `|E_s|² = Γ²·a + (Δ ± 2χa)²·a`.
    pub fn state_equation(&self) -> StateEquation<T> {
        StateEquation {
            s: self.drive.norm_sqr(),
            gamma: match self.mode {
                // paper-mode residual uses the damping field linearly
                Mode::Paper => self.gamma * self.gamma,
                Mode::Derived => self.gamma,
            },
            delta: self.delta,
            twochi: self.twochi,
            mode: self.mode,
        }
    }

    /// Fixed point on the branch with intensity `a`: `u = E_s/(Γ + i·bracket)`.
    pub fn fixed_point(&self, a: T) -> Complex<T> {
        self.drive / Complex::new(self.gamma, self.bracket(a))
    }

    /// Integrate from `u0` to `t_end` with local tolerance `tol`,
    /// early-stopping once settled.
    pub fn integrate(&self, u0: Complex<T>, t_end: T, tol: T) -> Result<Trajectory<T>, DynamicsError> {
        let settle = SettleSpec { tol: lit::<T>(SETTLE_TOL), dwell: SETTLE_DWELL };
        Ok(ode::integrate_adaptive(|u| self.rhs(u), u0, t_end, tol, Some(settle))?)
    }

    /// Jacobian of `(du/dt, du*/dt)` with respect to `(u, u*)`.
    pub fn jacobian(&self, u: Complex<T>) -> [[Complex<T>; 2]; 2] {
        let sign = self.mode.bracket_sign::<T>();
        let a = u.norm_sqr();
        let diag = self.delta + lit::<T>(2.0) * sign * self.twochi * a;
        let i = Complex::new(T::zero(), T::one());
        let j00 = -Complex::new(self.gamma, diag);
        let j01 = -i * (sign * self.twochi) * u * u;
        // second row is the conjugate equation
        [[j00, j01], [j01.conj(), j00.conj()]]
    }

    /// Eigenvalues of the fixed-point Jacobian. The point is stable iff both
    /// real parts are negative.
    pub fn eigenvalues(&self, u: Complex<T>) -> (Complex<T>, Complex<T>) {
        let j = self.jacobian(u);
        let tr = j[0][0] + j[1][1];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let half = lit::<T>(0.5);
        let disc = (tr * tr - det * lit::<T>(4.0)).sqrt();
        ((tr + disc) * half, (tr - disc) * half)
    }
}

/// Mean-field right-hand side for the given derived parameters.
pub fn langevin_rhs<T: Real>(u: Complex<T>, dp: &DerivedParams<T>) -> Complex<T> {
    MeanField::from_derived(dp).rhs(u)
}

/// Integrate the mean field from `u0`; see [`MeanField::integrate`].
pub fn integrate<T: Real>(
    u0: Complex<T>,
    dp: &DerivedParams<T>,
    t_end: T,
    tol: T,
) -> Result<Trajectory<T>, DynamicsError> {
    MeanField::from_derived(dp).integrate(u0, t_end, tol)
}

/// Eigenvalues of the Jacobian at a fixed point `u_fixed`.
///
/// Fails with [`DynamicsError::NotAFixedPoint`] when `|rhs(u_fixed)|` is not
/// small.
pub fn jacobian_eigenvalues<T: Real>(
    u_fixed: Complex<T>,
    dp: &DerivedParams<T>,
) -> Result<(Complex<T>, Complex<T>), DynamicsError> {
    let mf = MeanField::from_derived(dp);
    let r = mf.rhs(u_fixed).norm();
    if r >= lit::<T>(FIXED_POINT_TOL) * T::one().max(u_fixed.norm()) {
        return Err(DynamicsError::NotAFixedPoint);
    }
    Ok(mf.eigenvalues(u_fixed))
}

/// Sweep direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Up,
    Down,
}

impl std::fmt::Display for SweepDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepDirection::Up => write!(f, "up"),
            SweepDirection::Down => write!(f, "down"),
        }
    }
}

/// One followed point of a hysteresis sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T: Real> {
    pub s: T,
    pub a: T,
    pub branch: crate::steady::Branch,
    pub stable: bool,
}

/// Trace of one sweep direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T: Real> {
    pub direction: SweepDirection,
    pub points: Vec<SweepPoint<T>>,
    /// Input intensities at which the followed branch disappeared. Refined to
    /// the fold value, which lies within one grid step of the detection.
    pub jump_inputs: Vec<T>,
}

/// Hysteresis sweep for the state equation underlying `dp_template`.
pub fn hysteresis_sweep<T: Real>(
    dp_template: &DerivedParams<T>,
    s_min: T,
    s_max: T,
    n_steps: usize,
) -> Result<(SweepResult<T>, SweepResult<T>), DynamicsError> {
    let eq = StateEquation::from_derived(dp_template);
    sweep_state_equation(&eq, s_min, s_max, n_steps)
}

/// Continuation sweep of the input intensity, up and then down.
///
/// Each step re-solves the cubic seeded by the previous root: the sweep stays
/// on the occupied branch while a stable root exists there, and jumps to the
/// nearest surviving stable root (recording the fold input) when it vanishes.
pub fn sweep_state_equation<T: Real>(
    eq_template: &StateEquation<T>,
    s_min: T,
    s_max: T,
    n_steps: usize,
) -> Result<(SweepResult<T>, SweepResult<T>), DynamicsError> {
    if !(s_min >= T::zero() && s_max > s_min) || n_steps < 2 {
        return Err(DynamicsError::Steady(SteadyError::NumericalFailure(
            "sweep needs 0 <= s_min < s_max and n_steps >= 2",
        )));
    }
    let n = n_steps;
    let step = (s_max - s_min) / T::from_usize(n - 1).unwrap();
    let grid: Vec<T> = (0..n).map(|i| s_min + step * T::from_usize(i).unwrap()).collect();

    let up = sweep_one(eq_template, grid.iter().copied(), SweepDirection::Up)?;
    let down = sweep_one(eq_template, grid.iter().rev().copied(), SweepDirection::Down)?;
    Ok((up, down))
}

fn sweep_one<T: Real, I: Iterator<Item = T>>(
    eq_template: &StateEquation<T>,
    grid: I,
    direction: SweepDirection,
) -> Result<SweepResult<T>, DynamicsError> {
    let tps = eq_template.turning_points();
    let mut points = Vec::new();
    let mut jumps = Vec::new();
    let mut current: Option<(T, crate::steady::Branch)> = None;

    for s in grid {
        let eq = eq_template.with_input(s);
        let roots = eq.solve_steady_states()?;
        let stable: Vec<_> = roots.stable_roots().collect();
        let pick = match (&current, stable.as_slice()) {
            (_, []) => {
                // only a marginal/unstable set at this exact input (tangency
                // grid hit): the occupied branch is gone, fall through below
                None
            }
            (None, _) => {
                // first step: occupy the branch reached from this end
                let r = match direction {
                    SweepDirection::Up => stable.first().unwrap(),
                    SweepDirection::Down => stable.last().unwrap(),
                };
                Some(**r)
            }
            (Some((_, branch)), _) => stable
                .iter()
                .find(|r| eq.branch_of(r.intensity, &tps) == *branch)
                .map(|r| **r),
        };

        let chosen = match pick {
            Some(r) => r,
            None => {
                // branch ceased to exist: record the fold input and continue
                // on the nearest surviving stable root
                let fold_s = tps
                    .as_ref()
                    .map(|tp| match direction {
                        SweepDirection::Up => tp.s_at_lower,
                        SweepDirection::Down => tp.s_at_upper,
                    })
                    .unwrap_or(s);
                jumps.push(fold_s);
                let prev_a = current.map(|(a, _)| a).unwrap_or(T::zero());
                let all = eq.solve_steady_states()?;
                let nearest = all
                    .roots
                    .iter()
                    .filter(|r| r.stability.is_stable())
                    .min_by(|x, y| {
                        let dx = (x.intensity - prev_a).abs();
                        let dy = (y.intensity - prev_a).abs();
                        dx.partial_cmp(&dy).unwrap()
                    })
                    .or_else(|| all.roots.last())
                    .copied()
                    .ok_or(SteadyError::NumericalFailure("no roots during sweep"))?;
                nearest
            }
        };

        let branch = eq.branch_of(chosen.intensity, &tps);
        current = Some((chosen.intensity, branch));
        points.push(SweepPoint {
            s,
            a: chosen.intensity,
            branch,
            stable: chosen.stability.is_stable(),
        });
    }

    Ok(SweepResult { direction, points, jump_inputs: jumps })
}
