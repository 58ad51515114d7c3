//! Physical parameters and the effective constants derived from them.
//!
//! [`SystemParams`] holds the raw inputs of the optomechanical model: a
//! coherently driven cavity mode at `omega_c`, a harmonically bound mirror at
//! `omega_m`, radiation-pressure coupling `G`, drive at `omega_l`, cavity
//! damping `gamma` and an initially thermal mirror with occupation `nbar`.
//! [`derive`] turns those into the effective constants used by the
//! steady-state and dynamics modules.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{lit, Real};

/// Sign/damping convention for the mean-field equations.
///
/// The printed mean-field equations are not self-consistent: the state
/// equation carries a `(Δ − 2χa)²` bracket and a `γ²` damping, while squaring
/// the steady mean-field equation produces `(Δ + 2χa)²` with amplitude
/// damping `γ`. Both conventions are first-class:
///
/// * [`Mode::Paper`] keeps the printed forms verbatim,
/// * [`Mode::Derived`] is the self-consistent convention (the one that
///   matches the quantum oracle, also called "consistent").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Paper,
    #[default]
    Derived,
}

impl Mode {
    /// Sign of the nonlinear bracket term: `Δ + sign·2χ·a`.
    #[inline]
    pub(crate) fn bracket_sign<T: Real>(self) -> T {
        match self {
            Mode::Paper => -T::one(),
            Mode::Derived => T::one(),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Paper => write!(f, "paper"),
            Mode::Derived => write!(f, "derived"),
        }
    }
}

/// Which thermal exponential to evaluate in [`thermal_scaling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingVariant {
    /// `exp(κ²(n̄ − ½))`: the factor relating mean-field derivatives in the
    /// original and displaced frames.
    Transform,
    /// `exp(κ²(n̄ + ½))`: the factor multiplying the drive amplitude in the
    /// displaced-frame mean-field equations.
    Drive,
}

/// Raw physical inputs. Frequencies and rates share one (arbitrary) unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T: Real> {
    /// Cavity resonance frequency `ω_C`.
    pub omega_c: T,
    /// Mirror oscillation frequency `ω_M` (> 0).
    pub omega_m: T,
    /// Drive frequency `ω_L`.
    pub omega_l: T,
    /// Field–mirror (radiation-pressure) coupling `G` (≥ 0).
    pub coupling: T,
    /// Dimensionless input-coupling prefactor `g` on the drive.
    pub input_coupling: T,
    /// Complex drive amplitude `E`.
    pub drive: Complex<T>,
    /// Cavity amplitude damping rate `γ` (> 0).
    pub gamma: T,
    /// Mirror thermal occupation `n̄` (≥ 0).
    pub nbar: T,
    /// Optional override for the displacement parameter κ (defaults to
    /// `G/ω_M`, the choice that cancels the linear mirror–field coupling).
    pub kappa_override: Option<T>,
}

impl<T: Real> Default for SystemParams<T> {
    fn default() -> Self {
        Self {
            omega_c: T::one(),
            omega_m: T::one(),
            omega_l: T::one(),
            coupling: T::zero(),
            input_coupling: T::one(),
            drive: Complex::new(T::zero(), T::zero()),
            gamma: T::one(),
            nbar: T::zero(),
            kappa_override: None,
        }
    }
}

impl<T: Real> SystemParams<T> {
    /// Check the domain invariants on the raw inputs.
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = self.omega_c.is_finite()
            && self.omega_m.is_finite()
            && self.omega_l.is_finite()
            && self.coupling.is_finite()
            && self.input_coupling.is_finite()
            && self.drive.re.is_finite()
            && self.drive.im.is_finite()
            && self.gamma.is_finite()
            && self.nbar.is_finite()
            && self.kappa_override.map_or(true, |k| k.is_finite());
        if !finite {
            return Err(ModelError::NonFinite);
        }
        if self.omega_m <= T::zero() || self.gamma <= T::zero() {
            return Err(ModelError::NonPositiveFrequency);
        }
        if self.nbar < T::zero() {
            return Err(ModelError::NegativeOccupation);
        }
        if self.coupling < T::zero() {
            return Err(ModelError::NegativeCoupling);
        }
        Ok(())
    }

    /// Detuning `δ = ω_C − ω_L`.
    #[inline]
    pub fn detuning(&self) -> T {
        self.omega_c - self.omega_l
    }
}

/// Effective constants entering the state equation and mean-field dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams<T: Real> {
    /// Detuning `δ = ω_C − ω_L`.
    pub delta: T,
    /// Displacement parameter κ.
    pub kappa: T,
    /// Effective Kerr constant `χ_eff = 3·ω_M·κ²`.
    pub chi_eff: T,
    /// Effective detuning `Δ = δ + χ_eff`.
    pub delta_eff: T,
    /// Effective amplitude damping Γ of the mean-field equations:
    /// `γ²` in paper mode (verbatim), `γ` in derived/consistent mode.
    pub gamma_eff: T,
    /// Thermally scaled complex drive `g·E·exp(κ²(n̄+½))`.
    pub scaled_drive: Complex<T>,
    /// Scaled input intensity `S = g²|E|²·exp(2κ²(n̄+½)) = |scaled_drive|²`.
    pub s: T,
    /// Convention the parameters were derived under.
    pub mode: Mode,
}

/// Errors from parameter validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("omega_m and gamma must be > 0")]
    NonPositiveFrequency,
    #[error("nbar must be >= 0")]
    NegativeOccupation,
    #[error("coupling G must be >= 0")]
    NegativeCoupling,
    #[error("parameters must be finite")]
    NonFinite,
}

/// Derive every effective constant from the raw parameters.
///
/// κ defaults to `G/ω_M` unless overridden. The damping convention follows
/// `mode`; everything else is mode-independent.
pub fn derive<T: Real>(params: &SystemParams<T>, mode: Mode) -> Result<DerivedParams<T>, ModelError> {
    params.validate()?;
    let kappa = params.kappa_override.unwrap_or(params.coupling / params.omega_m);
    let chi_eff = lit::<T>(3.0) * params.omega_m * kappa * kappa;
    let delta = params.detuning();
    let drive_scale = thermal_scaling(kappa, params.nbar, ScalingVariant::Drive)?;
    let scaled_drive = params.drive * (params.input_coupling * drive_scale);
    Ok(DerivedParams {
        delta,
        kappa,
        chi_eff,
        delta_eff: delta + chi_eff,
        gamma_eff: match mode {
            Mode::Paper => params.gamma * params.gamma,
            Mode::Derived => params.gamma,
        },
        scaled_drive,
        s: scaled_drive.norm_sqr(),
        mode,
    })
}

/// Thermal exponential attached to the displacement transform.
///
/// Returns `exp(κ²(n̄ − ½))` for [`ScalingVariant::Transform`] and
/// `exp(κ²(n̄ + ½))` for [`ScalingVariant::Drive`]. The two signs are kept
/// side by side because the printed equations use both; the quantum module
/// computes the thermal displacement expectation independently for contrast.
pub fn thermal_scaling<T: Real>(kappa: T, nbar: T, variant: ScalingVariant) -> Result<T, ModelError> {
    if !kappa.is_finite() || !nbar.is_finite() {
        return Err(ModelError::NonFinite);
    }
    if nbar < T::zero() {
        return Err(ModelError::NegativeOccupation);
    }
    let half = lit::<T>(0.5);
    let shift = match variant {
        ScalingVariant::Transform => nbar - half,
        ScalingVariant::Drive => nbar + half,
    };
    Ok((kappa * kappa * shift).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(omega_m: f64, coupling: f64, nbar: f64) -> SystemParams<f64> {
        SystemParams {
            omega_m,
            coupling,
            nbar,
            drive: Complex::new(1.0, 0.0),
            ..SystemParams::default()
        }
    }

    #[test]
    fn zero_coupling_kills_all_kappa_terms() {
        let p = SystemParams {
            omega_c: 1.3,
            omega_l: 1.0,
            nbar: 5.0,
            drive: Complex::new(1.0, 0.0),
            ..SystemParams::default()
        };
        let dp = derive(&p, Mode::Derived).unwrap();
        assert_eq!(dp.kappa, 0.0);
        assert_eq!(dp.chi_eff, 0.0);
        assert_relative_eq!(dp.delta_eff, 0.3, max_relative = 1e-15);
        assert_eq!(dp.s, 1.0);
    }

    #[test]
    fn unit_coupling_example() {
        let dp = derive(&params(1.0, 1.0, 0.0), Mode::Derived).unwrap();
        assert_eq!(dp.kappa, 1.0);
        assert_eq!(dp.chi_eff, 3.0);
        assert_relative_eq!(dp.delta_eff, dp.delta + 3.0, max_relative = 1e-15);
        assert_relative_eq!(dp.s, std::f64::consts::E, max_relative = 1e-14);
    }

    #[test]
    fn figure_regime_ratio() {
        // omega_m = 2, kappa² = 1/12 makes chi_eff/γ² = 0.5 at γ = 1.
        let kappa = (1.0f64 / 12.0).sqrt();
        let p = SystemParams {
            omega_m: 2.0,
            coupling: 2.0 * kappa,
            drive: Complex::new(1.0, 0.0),
            ..SystemParams::default()
        };
        let dp = derive(&p, Mode::Paper).unwrap();
        assert_relative_eq!(dp.chi_eff / dp.gamma_eff, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn gamma_convention_per_mode() {
        let mut p = params(1.0, 0.5, 0.0);
        p.gamma = 1.7;
        assert_relative_eq!(
            derive(&p, Mode::Paper).unwrap().gamma_eff,
            1.7 * 1.7,
            max_relative = 1e-15
        );
        assert_eq!(derive(&p, Mode::Derived).unwrap().gamma_eff, 1.7);
    }

    #[test]
    fn validation_errors() {
        let mut p = params(0.0, 0.0, 0.0);
        assert_eq!(derive(&p, Mode::Paper), Err(ModelError::NonPositiveFrequency));
        p.omega_m = 1.0;
        p.gamma = 0.0;
        assert_eq!(derive(&p, Mode::Paper), Err(ModelError::NonPositiveFrequency));
        p.gamma = 1.0;
        p.nbar = -0.1;
        assert_eq!(derive(&p, Mode::Paper), Err(ModelError::NegativeOccupation));
        p.nbar = 0.0;
        p.coupling = -1.0;
        assert_eq!(derive(&p, Mode::Paper), Err(ModelError::NegativeCoupling));
        p.coupling = f64::NAN;
        assert_eq!(derive(&p, Mode::Paper), Err(ModelError::NonFinite));
    }

    #[test]
    fn kappa_override_wins() {
        let mut p = params(2.0, 1.0, 0.0);
        p.kappa_override = Some(0.25);
        let dp = derive(&p, Mode::Derived).unwrap();
        assert_eq!(dp.kappa, 0.25);
        assert_relative_eq!(dp.chi_eff, 3.0 * 2.0 * 0.0625, max_relative = 1e-15);
    }

    #[test]
    fn thermal_scaling_examples() {
        assert_eq!(thermal_scaling(0.0, 7.3, ScalingVariant::Drive).unwrap(), 1.0);
        assert_eq!(thermal_scaling(0.0, 7.3, ScalingVariant::Transform).unwrap(), 1.0);
        assert_relative_eq!(
            thermal_scaling(1.0, 0.0, ScalingVariant::Drive).unwrap(),
            1.6487212707001282,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            thermal_scaling(1.0, 0.0, ScalingVariant::Transform).unwrap(),
            0.6065306597126334,
            max_relative = 1e-15
        );
        assert_eq!(
            thermal_scaling(1.0, -1.0, ScalingVariant::Drive),
            Err(ModelError::NegativeOccupation)
        );
    }

    #[test]
    fn derive_is_deterministic() {
        let p = params(1.3, 0.7, 2.1);
        let a = derive(&p, Mode::Paper).unwrap();
        let b = derive(&p, Mode::Paper).unwrap();
        // bit-identical, not just approximately equal
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn delta_eff_identity(
            omega_c in -10.0f64..10.0,
            omega_l in -10.0f64..10.0,
            omega_m in 0.1f64..10.0,
            coupling in 0.0f64..5.0,
        ) {
            let p = SystemParams { omega_c, omega_l, omega_m, coupling, ..params(1.0, 0.0, 0.0) };
            let dp = derive(&p, Mode::Derived).unwrap();
            prop_assert!((dp.delta_eff - dp.delta - dp.chi_eff).abs() <= 1e-12);
        }

        #[test]
        fn scaled_intensity_monotone(
            e in 0.1f64..4.0,
            de in 0.01f64..1.0,
            nbar in 0.0f64..4.0,
            dn in 0.01f64..1.0,
            kappa in 0.0f64..1.5,
            dk in 0.01f64..0.5,
        ) {
            let base = |e: f64, nbar: f64, kappa: f64| {
                let mut p = params(1.0, 0.0, nbar);
                p.kappa_override = Some(kappa);
                p.drive = Complex::new(e, 0.0);
                derive(&p, Mode::Derived).unwrap().s
            };
            let s0 = base(e, nbar, kappa);
            prop_assert!(base(e + de, nbar, kappa) > s0);
            if kappa > 0.0 {
                prop_assert!(base(e, nbar + dn, kappa) >= s0);
                prop_assert!(base(e, nbar, kappa + dk) > s0);
            }
        }

        #[test]
        fn scaling_product_identity(kappa in 0.0f64..2.0, nbar in 0.0f64..5.0) {
            let d = thermal_scaling(kappa, nbar, ScalingVariant::Drive).unwrap();
            let t = thermal_scaling(kappa, nbar, ScalingVariant::Transform).unwrap();
            let expected = (2.0 * kappa * kappa * nbar).exp();
            prop_assert!((d * t - expected).abs() <= 1e-12 * expected);
        }
    }
}
