//! Correspondence with dispersive bistability: the Kerr-medium state equation
//! and the classical moving-mirror interferometer formula, with the
//! term-by-term map between them and the optomechanical cubic.

use thiserror::Error;

use crate::model::{DerivedParams, Mode};
use crate::scalar::{lit, Real};
use crate::steady::StateEquation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalogyError {
    #[error("intensity must be >= 0")]
    NegativeIntensity,
}

/// Steady state of a fixed-mirror cavity containing a Kerr medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams<T: Real> {
    /// Detuning δ.
    pub delta: T,
    /// Kerr nonlinear constant χ.
    pub chi: T,
    /// Damping coefficient (enters linearly, like the paper-mode Γ field).
    pub gamma: T,
    /// Scaled drive intensity S.
    pub s: T,
}

impl<T: Real> KerrParams<T> {
    /// Residual of the Kerr state equation `S − Γ·a − (δ − 2χa)²·a`.
    pub fn residual(&self, a: T) -> Result<T, AnalogyError> {
        if !(a >= T::zero()) {
            return Err(AnalogyError::NegativeIntensity);
        }
        let br = self.delta - lit::<T>(2.0) * self.chi * a;
        Ok(self.s - self.gamma * a - br * br * a)
    }

    /// The same cubic as a paper-mode state equation (exact identity).
    pub fn state_equation(&self) -> StateEquation<T> {
        StateEquation {
            s: self.s,
            gamma: self.gamma,
            delta: self.delta,
            twochi: lit::<T>(2.0) * self.chi,
            mode: Mode::Paper,
        }
    }
}

/// Kerr medium equivalent to the optomechanical parameters: `χ = χ_eff`,
/// `δ = Δ_eff`, damping and drive copied. The resulting residual coincides
/// with the paper-mode optomechanical residual for every intensity.
pub fn kerr_equivalent<T: Real>(dp: &DerivedParams<T>) -> KerrParams<T> {
    KerrParams { delta: dp.delta_eff, chi: dp.chi_eff, gamma: dp.gamma_eff, s: dp.s }
}

/// The Table-1 style pointwise map onto the classical phase coefficients:
/// `β₀ ↔ Δ_eff` and `β₂I_o ↔ −2χ_eff·a`.
pub fn table1_map<T: Real>(dp: &DerivedParams<T>, a: T) -> (T, T) {
    (dp.delta_eff, -lit::<T>(2.0) * dp.chi_eff * a)
}

/// Classical interferometer with one movable mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalParams<T: Real> {
    /// Mirror reflectivity R (≥ 0).
    pub reflectivity: T,
    /// Transmissivity T (> 0).
    pub transmissivity: T,
    /// Linear phase offset β₀.
    pub beta0: T,
    /// Intensity-phase coefficient β₂.
    pub beta2: T,
}

impl<T: Real> ClassicalParams<T> {
    /// Input intensity driving output `I_o`:
    /// `I_i = I_o·[1 + R(β₀ + β₂I_o)²/T²]`. Not monotone in general; the
    /// non-monotonic window is the classical bistability.
    pub fn input_intensity(&self, i_out: T) -> T {
        let phase = self.beta0 + self.beta2 * i_out;
        i_out * (T::one() + self.reflectivity * phase * phase / (self.transmissivity * self.transmissivity))
    }

    /// Stationary points of `I_i(I_o)`, present only in the bistable regime.
    ///
    /// `dI_i/dI_o = 1 + (R/T²)(β₀ + β₂I_o)(β₀ + 3β₂I_o)`, the same quadratic
    /// structure as the cavity fold condition.
    pub fn turning_points(&self) -> Option<(T, T)> {
        let r = self.reflectivity;
        let t2 = self.transmissivity * self.transmissivity;
        let qa = lit::<T>(3.0) * r * self.beta2 * self.beta2;
        let qb = lit::<T>(4.0) * r * self.beta0 * self.beta2;
        let qc = r * self.beta0 * self.beta0 + t2;
        let roots = crate::cubic::real_roots_quadratic(qa, qb, qc);
        if roots.len() == 2 && roots[0] > T::zero() && roots[0] < roots[1] {
            Some((roots[0], roots[1]))
        } else {
            None
        }
    }
}
