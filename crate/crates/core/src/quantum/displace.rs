//! The photon-number-conditioned mirror displacement `D(κn̂) = exp(κn̂(b†−b))`
//! and thermal expectations of the single-mode displacement operator.

use num_complex::Complex;

use crate::scalar::{lit, Real};

use super::lindblad::thermal_probs;
use super::ops::{self, CMat};
use super::{HilbertConfig, QuantumError};

/// Thermal tail mass above which the truncated displacement sum is refused.
///
/// A tail below this bound keeps the truncation error of the Fock sum well
/// under the 1e-8 accuracy target (each omitted term is bounded by its
/// occupation probability).
pub const TAIL_LIMIT: f64 = 1e-10;

/// Matrix exponential of `κ·n̂⊗(b†−b)` on the joint space.
///
/// The exponent is block diagonal over the cavity photon number, so each
/// mirror-space block `exp(κ·n·(b†−b))` is exponentiated on its own. The
/// result is unitary up to truncation error at the mirror cutoff.
pub fn displacement_operator<T: Real>(kappa: T, cfg: HilbertConfig) -> Result<CMat<T>, QuantumError> {
    cfg.check()?;
    let (nc, nm) = (cfg.n_cavity, cfg.n_mirror);
    let b = ops::annihilation::<T>(nm);
    let gen = &ops::dagger(&b) - &b; // b† − b
    let mut out = CMat::<T>::zeros((nc * nm, nc * nm));
    for n in 0..nc {
        let scale = Complex::new(kappa * T::from_usize(n).unwrap(), T::zero());
        let block = ops::expm(&gen.mapv(|z| z * scale));
        for r in 0..nm {
            for c in 0..nm {
                out[(n * nm + r, n * nm + c)] = block[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Truncated thermal expectation of `D(κ)` with its two closed-form
/// companions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementExpectation<T: Real> {
    /// `Σ_N p_N e^{−κ²/2} L_N(κ²)` over the truncated Fock space.
    pub truncated_sum: T,
    /// Closed form of the thermal expectation: `e^{−κ²(n̄+½)}`.
    pub closed_form: T,
    /// The printed variant `e^{+κ²(n̄−½)}`, reported for contrast: it
    /// disagrees with both the sum and the closed form whenever κ ≠ 0.
    pub paper_variant: T,
    /// Thermal probability mass beyond the cutoff.
    pub tail_mass: T,
}

/// Thermal expectation `Tr[ρ_th(n̄)·D(κ)]` by truncated Fock sum.
///
/// Uses the exact (unnormalized) thermal weights so the truncation error is
/// bounded by the tail mass, and refuses cutoffs whose tail exceeds
/// [`TAIL_LIMIT`].
pub fn displacement_expectation<T: Real>(
    kappa: T,
    nbar: T,
    n_mirror: usize,
) -> Result<DisplacementExpectation<T>, QuantumError> {
    if !(nbar >= T::zero()) || !kappa.is_finite() {
        return Err(QuantumError::InvalidInput("kappa finite and nbar >= 0 required"));
    }
    if n_mirror == 0 {
        return Err(QuantumError::InvalidInput("n_mirror must be >= 1"));
    }
    let ratio = nbar / (T::one() + nbar);
    let tail = if nbar > T::zero() {
        ratio.powi(n_mirror as i32)
    } else {
        T::zero()
    };
    if tail > lit::<T>(TAIL_LIMIT) {
        return Err(QuantumError::CutoffTooSmall { tail: tail.to_f64().unwrap_or(f64::NAN) });
    }

    let x = kappa * kappa;
    let half = lit::<T>(0.5);
    let envelope = (-x * half).exp();
    // Laguerre recurrence: (n+1)L_{n+1} = (2n+1−x)L_n − n·L_{n−1}
    let mut sum = T::zero();
    let mut l_prev = T::zero();
    let mut l = T::one();
    let mut weight = T::one() / (T::one() + nbar);
    for n in 0..n_mirror {
        sum += weight * envelope * l;
        weight = weight * ratio;
        let nf = T::from_usize(n).unwrap();
        let l_next = ((lit::<T>(2.0) * nf + T::one() - x) * l - nf * l_prev) / (nf + T::one());
        l_prev = l;
        l = l_next;
    }

    Ok(DisplacementExpectation {
        truncated_sum: sum,
        closed_form: (-x * (nbar + half)).exp(),
        paper_variant: (x * (nbar - half)).exp(),
        tail_mass: tail,
    })
}

/// Thermal probabilities re-exported for the oracle tests.
pub fn thermal_distribution<T: Real>(nbar: T, dim: usize) -> Vec<T> {
    thermal_probs(nbar, dim)
}
