//! Embedded Runge–Kutta integration for a single complex state variable.
//!
//! Dormand–Prince 5(4) with FSAL, a proportional step controller and an
//! optional settle detector that stops the run once the right-hand side has
//! stayed below tolerance for a dwell count of accepted steps.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Time series of the integrated state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    /// `(t, u)` at every accepted step, starting with the initial condition.
    pub samples: Vec<(T, Complex<T>)>,
    /// Whether the settle detector fired before `t_end`.
    pub settled: bool,
    /// Final state when settled.
    pub settle_value: Option<Complex<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_time(&self) -> T {
        self.samples.last().expect("trajectory never empty").0
    }

    pub fn final_state(&self) -> Complex<T> {
        self.samples.last().expect("trajectory never empty").1
    }
}

/// Stop criterion: `|rhs| < tol·max(1, |u|)` for `dwell` consecutive
/// accepted steps.
#[derive(Debug, Clone, Copy)]
pub struct SettleSpec<T: Real> {
    pub tol: T,
    pub dwell: usize,
}

/// Integration failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow (stiff or invalid parameters)")]
    StepUnderflow,
    #[error("invalid integration inputs: {0}")]
    InvalidInput(&'static str),
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// y5 uses the last A row (FSAL); the error weights are b5 − b4.
const ERR: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate `du/dt = f(u)` from `u0` over `[0, t_end]`.
///
/// The local error per step is kept below `tol·max(1, |u|)`.
pub fn integrate_adaptive<T, F>(
    f: F,
    u0: Complex<T>,
    t_end: T,
    tol: T,
    settle: Option<SettleSpec<T>>,
) -> Result<Trajectory<T>, OdeError>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(OdeError::InvalidInput("t_end must be positive and finite"));
    }
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(OdeError::InvalidInput("tol must be positive and finite"));
    }
    if !u0.re.is_finite() || !u0.im.is_finite() {
        return Err(OdeError::InvalidInput("u0 must be finite"));
    }

    let one = T::one();
    let h_min = lit::<T>(1e3) * T::epsilon() * t_end;

    let mut t = T::zero();
    let mut u = u0;
    let mut k1 = f(u);
    let mut samples = vec![(t, u)];
    let mut settled = false;
    let mut dwell_count = 0usize;

    let mut h = (lit::<T>(0.01) * (one + u.norm()) / (one + k1.norm()))
        .min(t_end / lit::<T>(10.0))
        .max(h_min);

    let a = A.map(|row| row.map(lit::<T>));
    let err_w = ERR.map(lit::<T>);

    while t < t_end {
        if h < h_min {
            return Err(OdeError::StepUnderflow);
        }
        let h_step = h.min(t_end - t);

        let mut k = [Complex::new(T::zero(), T::zero()); 7];
        k[0] = k1;
        for s in 1..7 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, kj) in k.iter().enumerate().take(s) {
                acc = acc + *kj * a[s - 1][j];
            }
            k[s] = f(u + acc * h_step);
        }
        // stage 7 is f at the 5th-order solution (FSAL)
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, kj) in k.iter().enumerate().take(6) {
            acc = acc + *kj * a[5][j];
        }
        let u_new = u + acc * h_step;

        let mut err_acc = Complex::new(T::zero(), T::zero());
        for (w, kj) in err_w.iter().zip(k.iter()) {
            err_acc = err_acc + *kj * *w;
        }
        let err = (err_acc * h_step).norm();
        let sc = tol * one.max(u_new.norm());

        if !err.is_finite() {
            return Err(OdeError::StepUnderflow);
        }

        if err <= sc {
            t = t + h_step;
            u = u_new;
            k1 = k[6];
            samples.push((t, u));

            if let Some(spec) = settle {
                if k1.norm() < spec.tol * one.max(u.norm()) {
                    dwell_count += 1;
                    if dwell_count >= spec.dwell {
                        settled = true;
                        break;
                    }
                } else {
                    dwell_count = 0;
                }
            }
        }

        let factor = if err == T::zero() {
            lit::<T>(5.0)
        } else {
            (lit::<T>(0.9) * (sc / err).powf(lit::<T>(0.2)))
                .max(lit::<T>(0.2))
                .min(lit::<T>(5.0))
        };
        h = h_step * factor;
    }

    Ok(Trajectory { samples, settled, settle_value: settled.then_some(u) })
}

/// Classic fixed-step RK4 sampled at `n_steps` uniform steps; used where the
/// trace must line up with an equally spaced quantum trajectory.
pub fn integrate_fixed_rk4<T, F>(f: F, u0: Complex<T>, t_end: T, n_steps: usize) -> Vec<(T, Complex<T>)>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let dt = t_end / T::from_usize(n_steps).unwrap();
    let half = lit::<T>(0.5);
    let sixth = T::one() / lit::<T>(6.0);
    let two = lit::<T>(2.0);
    let mut u = u0;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((T::zero(), u));
    for i in 0..n_steps {
        let t = dt * T::from_usize(i).unwrap();
        let k1 = f(u);
        let k2 = f(u + k1 * (dt * half));
        let k3 = f(u + k2 * (dt * half));
        let k4 = f(u + k3 * dt);
        u = u + (k1 + (k2 + k3) * two + k4) * (dt * sixth);
        out.push((t + dt, u));
    }
    out
}
