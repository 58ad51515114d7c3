//! Closed-form real roots of low-degree polynomials.
//!
//! The state equation reduces to a real cubic, so the solver is branch-safe
//! closed-form (trigonometric for three real roots, Cardano for one) with a
//! short Newton polish per root. Degenerate leading coefficients fall back to
//! the quadratic/linear cases.

use crate::scalar::{lit, Real};

/// Real roots of `c3·x³ + c2·x² + c1·x + c0`, ascending.
///
/// Multiple roots are returned once per multiplicity (a double root appears
/// twice). The all-zero polynomial returns an empty list.
pub(crate) fn real_roots<T: Real>(c3: T, c2: T, c1: T, c0: T) -> Vec<T> {
    let zero = T::zero();
    if c3 == zero {
        return real_roots_quadratic(c2, c1, c0);
    }

    // Depressed form: x = y − c2/(3c3), y³ + p·y + q = 0.
    let three = lit::<T>(3.0);
    let shift = c2 / (three * c3);
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let p = c - b * b / three;
    let q = (lit::<T>(2.0) * b * b * b - lit::<T>(9.0) * b * c) / lit::<T>(27.0) + d;

    let half_q = q / lit::<T>(2.0);
    let third_p = p / three;
    let disc = half_q * half_q + third_p * third_p * third_p;
    // Repeated roots live on disc = 0; classify against the roundoff floor of
    // the two summands so exact tangencies are not thrown onto a simple-root
    // branch by cancellation noise.
    let disc_floor = lit::<T>(64.0) * T::epsilon() * (half_q * half_q + third_p.abs().powi(3));

    let mut roots: Vec<T> = if disc.abs() <= disc_floor {
        // Repeated roots: triple if q = 0, else one simple + one double.
        if half_q.abs() <= disc_floor {
            vec![-shift; 3]
        } else {
            let u = (-half_q).cbrt();
            vec![lit::<T>(2.0) * u - shift, -u - shift, -u - shift]
        }
    } else if disc > zero {
        // One real root (Cardano), written to avoid cancellation.
        let sqrt_disc = disc.sqrt();
        let u = (-half_q + sqrt_disc).cbrt();
        let v = (-half_q - sqrt_disc).cbrt();
        vec![u + v - shift]
    } else {
        // Three distinct real roots (trigonometric form); requires p < 0.
        let radius = (-third_p).sqrt();
        let arg = (-half_q / (radius * radius * radius)).max(-T::one()).min(T::one());
        let theta = arg.acos();
        let tau = lit::<T>(2.0) * T::PI();
        (0..3)
            .map(|k| {
                let angle = (theta + tau * T::from_usize(k).unwrap()) / three;
                lit::<T>(2.0) * radius * angle.cos() - shift
            })
            .collect()
    };

    for r in roots.iter_mut() {
        *r = polish(*r, c3, c2, c1, c0);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Real roots of `a·x² + b·x + c`, ascending (double root listed twice).
pub(crate) fn real_roots_quadratic<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let zero = T::zero();
    if a == zero {
        if b == zero {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - lit::<T>(4.0) * a * c;
    if disc < zero {
        return Vec::new();
    }
    if disc == zero {
        let r = -b / (lit::<T>(2.0) * a);
        return vec![r, r];
    }
    // Citardauq on one branch avoids subtracting nearly equal numbers.
    let sq = disc.sqrt();
    let q = if b >= zero { -(b + sq) / lit::<T>(2.0) } else { (sq - b) / lit::<T>(2.0) };
    let mut roots = vec![q / a, c / q];
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// A couple of Newton steps against the original polynomial; keeps the
/// closed-form value whenever Newton does not improve the residual.
fn polish<T: Real>(x0: T, c3: T, c2: T, c1: T, c0: T) -> T {
    let eval = |x: T| ((c3 * x + c2) * x + c1) * x + c0;
    let deriv = |x: T| (lit::<T>(3.0) * c3 * x + lit::<T>(2.0) * c2) * x + c1;
    let mut x = x0;
    for _ in 0..2 {
        let f = eval(x);
        let df = deriv(x);
        if df == T::zero() || !f.is_finite() {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() || eval(next).abs() > f.abs() {
            break;
        }
        x = next;
    }
    x
}
