//! Steady-state analysis of the cubic state equation.
//!
//! The input–output relation of the driven cavity is a cubic in the
//! intracavity intensity `a = |α|²`:
//!
//! ```text
//! paper mode:   F(a) = S − Γ·a  − (Δ − 2χ·a)²·a
//! derived mode: F(a) = S − Γ²·a − (Δ + 2χ·a)²·a
//! ```
//!
//! where `S` is the scaled input intensity, `Γ` the effective damping, `Δ`
//! the effective detuning and `2χ` the nonlinear coefficient. This module
//! finds the real nonnegative roots, classifies their stability by the slope
//! of the input–output curve, locates the fold (turning) points and the
//! bistability threshold.

use thiserror::Error;

use crate::cubic;
use crate::model::{DerivedParams, Mode};
use crate::scalar::{lit, Real};

/// Absolute residual tolerance accepted for a polished root.
const TOL_ABS: f64 = 1e-12;
/// Relative (to `S`) residual tolerance accepted for a polished root.
const TOL_REL: f64 = 1e-10;
/// Two roots closer than this window (scaled by `max(1, a)`) are merged into
/// a single tangency root of multiplicity two.
const TANGENCY_WINDOW: f64 = 1e-8;
/// Slope magnitudes below this (times a parameter scale) classify as marginal.
const SLOPE_TOL: f64 = 1e-9;

/// Errors from the steady-state solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteadyError {
    #[error("intensity must be >= 0")]
    NegativeIntensity,
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),
}

/// Stability classification of a steady-state root.
///
/// `Marginal` flags a root where `|dS/da|` is below tolerance (a fold point);
/// it is treated as not stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    #[inline]
    pub fn is_stable(self) -> bool {
        matches!(self, Stability::Stable)
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stability::Stable => write!(f, "stable"),
            Stability::Unstable => write!(f, "unstable"),
            Stability::Marginal => write!(f, "marginal"),
        }
    }
}

/// One steady-state root with its classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T: Real> {
    /// Intracavity intensity `a`.
    pub intensity: T,
    pub stability: Stability,
    /// 1 for a simple root, 2 for a tangency (fold) double root.
    pub multiplicity: u8,
}

/// All real nonnegative steady-state roots, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<T: Real> {
    pub roots: Vec<Root<T>>,
}

impl<T: Real> RootSet<T> {
    /// Number of distinct roots (1 or 3; 2 exactly at tangency).
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    pub fn intensities(&self) -> Vec<T> {
        self.roots.iter().map(|r| r.intensity).collect()
    }

    pub fn stable_roots(&self) -> impl Iterator<Item = &Root<T>> {
        self.roots.iter().filter(|r| r.stability.is_stable())
    }
}

/// Fold points of the input–output curve: `a_lower < a_upper` with
/// `S(a_upper) < S(a_lower)` bracketing the bistable input range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints<T: Real> {
    pub a_lower: T,
    pub a_upper: T,
    pub s_at_lower: T,
    pub s_at_upper: T,
}

impl<T: Real> TurningPoints<T> {
    /// Input interval `(S_min, S_max)` over which three branches coexist.
    pub fn fold_interval(&self) -> (T, T) {
        (self.s_at_upper, self.s_at_lower)
    }
}

/// Branch label along the input–output curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Lower,
    Middle,
    Upper,
}

impl Branch {
    pub fn id(self) -> u8 {
        match self {
            Branch::Lower => 0,
            Branch::Middle => 1,
            Branch::Upper => 2,
        }
    }
}

/// One sample of the input–output curve, parameterized by the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T: Real> {
    pub input: T,
    pub output: T,
    pub branch: Branch,
    pub stability: Stability,
}

/// The cubic state equation in one of the two sign conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateEquation<T: Real> {
    /// Scaled input intensity `S` (≥ 0).
    pub s: T,
    /// Effective damping field: multiplies `a` directly in paper mode and as
    /// `Γ²·a` in derived mode.
    pub gamma: T,
    /// Effective detuning `Δ`.
    pub delta: T,
    /// Nonlinear coefficient `2χ_eff`.
    pub twochi: T,
    pub mode: Mode,
}

impl<T: Real> StateEquation<T> {
    /// Build the state equation matching a set of derived parameters.
    pub fn from_derived(dp: &DerivedParams<T>) -> Self {
        Self {
            s: dp.s,
            gamma: dp.gamma_eff,
            delta: dp.delta_eff,
            twochi: lit::<T>(2.0) * dp.chi_eff,
            mode: dp.mode,
        }
    }

    /// Same equation at a different input intensity.
    pub fn with_input(&self, s: T) -> Self {
        Self { s, ..*self }
    }

    fn validate(&self) -> Result<(), SteadyError> {
        let ok = self.s.is_finite()
            && self.gamma.is_finite()
            && self.delta.is_finite()
            && self.twochi.is_finite()
            && self.s >= T::zero()
            && self.gamma > T::zero();
        if ok {
            Ok(())
        } else {
            Err(SteadyError::NumericalFailure("invalid state-equation parameters"))
        }
    }

    /// Coefficient of the linear damping term `·a` in `S(a)`.
    #[inline]
    fn damping_coefficient(&self) -> T {
        match self.mode {
            Mode::Paper => self.gamma,
            Mode::Derived => self.gamma * self.gamma,
        }
    }

    /// The detuning bracket `Δ ∓ 2χ·a` (sign per mode).
    #[inline]
    fn bracket(&self, a: T) -> T {
        self.delta + self.mode.bracket_sign::<T>() * self.twochi * a
    }

    #[inline]
    fn eval(&self, a: T) -> T {
        let br = self.bracket(a);
        self.s - self.damping_coefficient() * a - br * br * a
    }

    /// Residual `F(a)` of the state equation, exactly as written per mode.
    pub fn residual(&self, a: T) -> Result<T, SteadyError> {
        if !(a >= T::zero()) {
            return Err(SteadyError::NegativeIntensity);
        }
        Ok(self.eval(a))
    }

    /// Input intensity that sustains output `a`, i.e. the `S` solving
    /// `F(a) = 0` at that output.
    pub fn input_for_output(&self, a: T) -> T {
        let br = self.bracket(a);
        self.damping_coefficient() * a + br * br * a
    }

    /// `dS/da`, expanded: `Γ_coef + (Δ ∓ 2χa)(Δ ∓ 6χa)`.
    pub fn slope(&self, a: T) -> T {
        let sign = self.mode.bracket_sign::<T>();
        let b1 = self.delta + sign * self.twochi * a;
        let b3 = self.delta + sign * lit::<T>(3.0) * self.twochi * a;
        self.damping_coefficient() + b1 * b3
    }

    fn slope_scale(&self) -> T {
        T::one() + self.damping_coefficient() + self.delta * self.delta
    }

    /// Classify a root by the slope criterion: unstable iff `dS/da < 0`,
    /// marginal inside the tolerance band around zero.
    pub fn classify_stability(&self, a: T) -> Stability {
        let slope = self.slope(a);
        let tol = lit::<T>(SLOPE_TOL) * self.slope_scale();
        if slope.abs() < tol {
            Stability::Marginal
        } else if slope < T::zero() {
            Stability::Unstable
        } else {
            Stability::Stable
        }
    }

    /// All real nonnegative roots of the state equation, polished, ascending,
    /// with stability flags. Tangency pairs are merged into one root of
    /// multiplicity two.
    pub fn solve_steady_states(&self) -> Result<RootSet<T>, SteadyError> {
        self.validate()?;
        // F(a) = 0  ⟺  (2χ)²·a³ + sign·2·Δ·2χ·a² + (Γ_coef + Δ²)·a − S = 0
        let sign = self.mode.bracket_sign::<T>();
        let c = self.twochi;
        let c3 = c * c;
        let c2 = lit::<T>(2.0) * sign * self.delta * c;
        let c1 = self.damping_coefficient() + self.delta * self.delta;
        let c0 = -self.s;
        let raw = cubic::real_roots(c3, c2, c1, c0);

        let atol = lit::<T>(TOL_ABS);
        let mut kept: Vec<T> = raw
            .into_iter()
            .filter_map(|a| {
                if a >= T::zero() {
                    Some(a)
                } else if a > -atol {
                    Some(T::zero()) // roundoff on a physical zero root
                } else {
                    None // unphysical negative intensity
                }
            })
            .collect();
        kept.sort_by(|x, y| x.partial_cmp(y).unwrap());

        // Merge tangency pairs.
        let window = lit::<T>(TANGENCY_WINDOW);
        let mut roots: Vec<Root<T>> = Vec::with_capacity(kept.len());
        let mut i = 0;
        while i < kept.len() {
            let a = kept[i];
            let mut mult = 1u8;
            while i + 1 < kept.len() && (kept[i + 1] - a).abs() <= window * T::one().max(a) {
                mult += 1;
                i += 1;
            }
            roots.push(Root {
                intensity: a,
                stability: self.classify_stability(a),
                multiplicity: mult,
            });
            i += 1;
        }

        // spec'd tolerances, floored at the scalar type's own precision
        // (inactive for f64)
        let eps = T::epsilon();
        let tol = atol.max(lit::<T>(16.0) * eps)
            + lit::<T>(TOL_REL).max(lit::<T>(64.0) * eps) * self.s;
        for r in &roots {
            let res = self.eval(r.intensity);
            if !res.is_finite() {
                return Err(SteadyError::NumericalFailure("non-finite residual at root"));
            }
            if res.abs() > tol {
                return Err(SteadyError::NumericalFailure("root polish did not converge"));
            }
        }
        Ok(RootSet { roots })
    }

    /// Fold points of the input–output curve, if the curve folds.
    ///
    /// Solves `dS/da = 0`, i.e. `3(2χ)²a² ± 4Δ(2χ)a + (Γ_coef + Δ²) = 0`, and
    /// keeps the solutions only when both are real, distinct and positive.
    pub fn turning_points(&self) -> Option<TurningPoints<T>> {
        let sign = self.mode.bracket_sign::<T>();
        let c = self.twochi;
        let qa = lit::<T>(3.0) * c * c;
        let qb = lit::<T>(4.0) * sign * self.delta * c;
        let qc = self.damping_coefficient() + self.delta * self.delta;
        let roots = cubic::real_roots_quadratic(qa, qb, qc);
        if roots.len() != 2 {
            return None;
        }
        let (a_lower, a_upper) = (roots[0], roots[1]);
        if a_lower <= T::zero() || a_lower == a_upper {
            return None;
        }
        Some(TurningPoints {
            a_lower,
            a_upper,
            s_at_lower: self.input_for_output(a_lower),
            s_at_upper: self.input_for_output(a_upper),
        })
    }

    /// Critical detuning beyond which the curve folds, or `None` for a linear
    /// cavity (`2χ = 0`).
    ///
    /// Paper mode: folds need `Δ² > 3Γ` with `sign(Δ) = sign(2χ)`, so
    /// `Δ_c = +√(3Γ)`. Derived mode: `Δ² > 3Γ²` with `sign(Δ) = −sign(2χ)`,
    /// so `Δ_c = −√3·Γ`.
    pub fn bistability_threshold(gamma: T, twochi: T, mode: Mode) -> Option<T> {
        if twochi == T::zero() {
            return None;
        }
        let three = lit::<T>(3.0);
        let sgn = if twochi > T::zero() { T::one() } else { -T::one() };
        match mode {
            Mode::Paper => Some(sgn * (three * gamma).sqrt()),
            Mode::Derived => Some(-sgn * three.sqrt() * gamma),
        }
    }

    /// Which branch an output intensity lies on, given the fold points.
    pub fn branch_of(&self, a: T, tps: &Option<TurningPoints<T>>) -> Branch {
        match tps {
            None => Branch::Lower,
            Some(tp) => {
                let btol = lit::<T>(1e-9) * (T::one() + tp.a_upper);
                if a <= tp.a_lower + btol {
                    Branch::Lower
                } else if a >= tp.a_upper - btol {
                    Branch::Upper
                } else {
                    Branch::Middle
                }
            }
        }
    }

    /// Sample the full input–output curve parameterized by the output
    /// intensity over `[0, a_max]`. Every point satisfies the state equation
    /// by construction, including the unstable middle branch.
    pub fn response_curve(&self, a_max: T, n_points: usize) -> Vec<CurvePoint<T>> {
        let tps = self.turning_points();
        let n = n_points.max(2);
        let step = a_max / T::from_usize(n - 1).unwrap();
        (0..n)
            .map(|i| {
                let a = step * T::from_usize(i).unwrap();
                CurvePoint {
                    input: self.input_for_output(a),
                    output: a,
                    branch: self.branch_of(a, &tps),
                    stability: self.classify_stability(a),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn eq(mode: Mode, s: f64, gamma: f64, delta: f64, twochi: f64) -> StateEquation<f64> {
        StateEquation { s, gamma, delta, twochi, mode }
    }

    #[test]
    fn residual_examples() {
        assert_eq!(eq(Mode::Paper, 4.0, 1.0, 3.0, 1.0).residual(2.0).unwrap(), 0.0);
        assert_eq!(eq(Mode::Paper, 2.0, 1.0, 0.0, 0.0).residual(2.0).unwrap(), 0.0);
        assert_eq!(eq(Mode::Derived, 2.0, 1.0, -2.0, 1.0).residual(1.0).unwrap(), 0.0);
        assert_eq!(
            eq(Mode::Paper, 4.0, 1.0, 3.0, 1.0).residual(-0.5),
            Err(SteadyError::NegativeIntensity)
        );
    }

    #[test]
    fn paper_fixture_roots() {
        let rs = eq(Mode::Paper, 4.0, 1.0, 3.0, 1.0).solve_steady_states().unwrap();
        let s2 = 2f64.sqrt();
        assert_eq!(rs.count(), 3);
        let a = rs.intensities();
        assert_relative_eq!(a[0], 2.0 - s2, epsilon = 1e-10);
        assert_relative_eq!(a[1], 2.0, epsilon = 1e-10);
        assert_relative_eq!(a[2], 2.0 + s2, epsilon = 1e-10);
        assert_eq!(rs.roots[0].stability, Stability::Stable);
        assert_eq!(rs.roots[1].stability, Stability::Unstable);
        assert_eq!(rs.roots[2].stability, Stability::Stable);
    }

    #[test]
    fn linear_cavity_single_root() {
        let rs = eq(Mode::Paper, 7.0, 1.0, 0.0, 0.0).solve_steady_states().unwrap();
        assert_eq!(rs.count(), 1);
        assert_relative_eq!(rs.roots[0].intensity, 7.0, epsilon = 1e-12);
        assert_eq!(rs.roots[0].stability, Stability::Stable);
    }

    #[test]
    fn tangency_reported_with_count_two() {
        let rs = eq(Mode::Derived, 2.0, 1.0, -2.0, 1.0).solve_steady_states().unwrap();
        assert_eq!(rs.count(), 2);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!((rs.roots[0].intensity - 1.0).abs() < 1e-6);
        assert_relative_eq!(rs.roots[1].intensity, 2.0, epsilon = 1e-9);
        // the tangency root sits exactly on the fold
        assert_eq!(rs.roots[0].stability, Stability::Marginal);
    }

    #[test]
    fn solver_rejects_bad_parameters() {
        assert!(matches!(
            eq(Mode::Paper, f64::NAN, 1.0, 0.0, 0.0).solve_steady_states(),
            Err(SteadyError::NumericalFailure(_))
        ));
        assert!(matches!(
            eq(Mode::Paper, 1.0, 0.0, 0.0, 0.0).solve_steady_states(),
            Err(SteadyError::NumericalFailure(_))
        ));
    }

    #[test]
    fn turning_points_paper_example() {
        let tp = eq(Mode::Paper, 0.0, 1.0, 3.0, 1.0).turning_points().unwrap();
        let d = 6f64.sqrt() / 3.0;
        assert_relative_eq!(tp.a_lower, 2.0 - d, epsilon = 1e-9);
        assert_relative_eq!(tp.a_upper, 2.0 + d, epsilon = 1e-9);
        assert_relative_eq!(tp.s_at_lower, 5.088662, epsilon = 1e-6);
        assert_relative_eq!(tp.s_at_upper, 2.911338, epsilon = 1e-6);
        assert!(tp.s_at_upper < tp.s_at_lower);
    }

    #[test]
    fn turning_points_derived_example() {
        let tp = eq(Mode::Derived, 0.0, 1.0, -2.0, 1.0).turning_points().unwrap();
        assert_relative_eq!(tp.a_lower, 1.0, epsilon = 1e-9);
        assert_relative_eq!(tp.a_upper, 5.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(tp.s_at_lower, 2.0, epsilon = 1e-9);
        assert_relative_eq!(tp.s_at_upper, 50.0 / 27.0, epsilon = 1e-9);
    }

    #[test]
    fn no_turning_points_for_linear_curve() {
        assert!(eq(Mode::Paper, 0.0, 1.0, 3.0, 0.0).turning_points().is_none());
        // below threshold
        assert!(eq(Mode::Derived, 0.0, 1.0, -1.0, 1.0).turning_points().is_none());
        // wrong detuning sign
        assert!(eq(Mode::Derived, 0.0, 1.0, 2.0, 1.0).turning_points().is_none());
    }

    #[test]
    fn threshold_examples() {
        let sqrt3 = 3f64.sqrt();
        assert_relative_eq!(
            StateEquation::bistability_threshold(1.0, 1.0, Mode::Paper).unwrap(),
            sqrt3,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            StateEquation::bistability_threshold(1.0, 1.0, Mode::Derived).unwrap(),
            -sqrt3,
            epsilon = 1e-12
        );
        assert_eq!(StateEquation::bistability_threshold(1.0, 0.0, Mode::Paper), None);
    }

    #[test]
    fn classify_examples() {
        let e = eq(Mode::Paper, 4.0, 1.0, 3.0, 1.0);
        assert_eq!(e.classify_stability(2.0), Stability::Unstable);
        assert_eq!(e.classify_stability(2.0 + 2f64.sqrt()), Stability::Stable);
        let lin = eq(Mode::Paper, 7.0, 1.0, 0.5, 0.0);
        assert_eq!(lin.classify_stability(7.0 / 1.0), Stability::Stable);
    }

    #[test]
    fn root_count_splits_at_fold_interval() {
        let base = eq(Mode::Derived, 0.0, 1.0, -2.0, 1.0);
        let tp = base.turning_points().unwrap();
        let (lo, hi) = tp.fold_interval();
        let inside = base.with_input((lo + hi) / 2.0).solve_steady_states().unwrap();
        assert_eq!(inside.count(), 3);
        let below = base.with_input(lo * 0.5).solve_steady_states().unwrap();
        assert_eq!(below.count(), 1);
        let above = base.with_input(hi * 1.5).solve_steady_states().unwrap();
        assert_eq!(above.count(), 1);
    }

    #[test]
    fn response_curve_fold_structure() {
        let curve = eq(Mode::Derived, 0.0, 1.0, -2.0, 1.0).response_curve(4.0, 800);
        let flips = curve
            .windows(2)
            .map(|w| w[1].input - w[0].input)
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|d| d[0].signum() != d[1].signum())
            .count();
        assert_eq!(flips, 2);
        assert!(curve.iter().any(|p| p.branch == Branch::Middle));
    }

    proptest! {
        // Roots vary continuously with S away from folds: da ≈ dS / S'(a).
        #[test]
        fn root_continuity_in_input(
            s in 0.1f64..10.0,
            gamma in 0.3f64..2.0,
            delta in -5.0f64..5.0,
            twochi in 0.1f64..2.0,
        ) {
            let e = eq(Mode::Derived, s, gamma, delta, twochi);
            let ds = 1e-7;
            let base = e.solve_steady_states().unwrap();
            let moved = e.with_input(s + ds).solve_steady_states().unwrap();
            if base.count() == moved.count() {
                for (r0, r1) in base.roots.iter().zip(moved.roots.iter()) {
                    let slope = e.slope(r0.intensity).abs();
                    prop_assume!(slope > 1e-2);
                    let da = (r1.intensity - r0.intensity).abs();
                    prop_assert!(da <= 2.0 * ds / slope + 1e-12);
                }
            }
        }

        // Root count is odd away from the tangency set.
        #[test]
        fn root_count_odd(
            s in 0.0f64..12.0,
            gamma in 0.3f64..2.0,
            delta in -6.0f64..6.0,
            twochi in 0.0f64..3.0,
        ) {
            let e = eq(Mode::Derived, s, gamma, delta, twochi);
            let rs = e.solve_steady_states().unwrap();
            let near_fold = rs.roots.iter().any(|r| r.multiplicity > 1
                || e.slope(r.intensity).abs() < 1e-6 * e.slope_scale());
            prop_assume!(!near_fold);
            prop_assert!(rs.count() == 1 || rs.count() == 3);
            if rs.count() == 3 {
                prop_assert_eq!(rs.roots[1].stability, Stability::Unstable);
            }
        }
    }
}
