//! Truncated Fock-space operators and the small dense-matrix helpers the
//! integrator needs (kron, dagger, trace, matrix exponential, a positivity
//! probe). Everything is generic over the scalar type.

use ndarray::Array2;
use num_complex::Complex;

use crate::scalar::{lit, Real};

use super::{HilbertConfig, QuantumError};

pub type CMat<T> = Array2<Complex<T>>;

/// Annihilation operator on a `dim`-level truncated Fock space.
pub fn annihilation<T: Real>(dim: usize) -> CMat<T> {
    let mut m = CMat::<T>::zeros((dim, dim));
    for n in 1..dim {
        m[(n - 1, n)] = Complex::new(T::from_usize(n).unwrap().sqrt(), T::zero());
    }
    m
}

/// Creation operator (`annihilation` transposed).
pub fn creation<T: Real>(dim: usize) -> CMat<T> {
    dagger(&annihilation::<T>(dim))
}

/// Number operator `diag(0, 1, …, dim−1)`.
pub fn number<T: Real>(dim: usize) -> CMat<T> {
    let mut m = CMat::<T>::zeros((dim, dim));
    for n in 0..dim {
        m[(n, n)] = Complex::new(T::from_usize(n).unwrap(), T::zero());
    }
    m
}

pub fn identity<T: Real>(dim: usize) -> CMat<T> {
    let mut m = CMat::<T>::zeros((dim, dim));
    for n in 0..dim {
        m[(n, n)] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Kronecker product with row-major ordering: index `(i·cols_b + k, …)`.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = CMat::<T>::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger<T: Real>(m: &CMat<T>) -> CMat<T> {
    let mut out = m.t().to_owned();
    out.mapv_inplace(|z| z.conj());
    out
}

pub fn trace<T: Real>(m: &CMat<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..m.nrows() {
        acc = acc + m[(i, i)];
    }
    acc
}

/// `Tr(a·b)` without forming the product.
pub fn trace_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc = acc + a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_deviation<T: Real>(m: &CMat<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

/// Matrix exponential by scaling-and-squaring with a Taylor series; intended
/// for the small mirror-space blocks of the displacement operator.
pub fn expm<T: Real>(m: &CMat<T>) -> CMat<T> {
    let dim = m.nrows();
    let norm = max_abs(m) * T::from_usize(dim).unwrap();
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > lit::<T>(0.5) && squarings < 40 {
        scale = scale * lit::<T>(0.5);
        squarings += 1;
    }
    let scaled = m.mapv(|z| z * scale);

    let mut result = identity::<T>(dim);
    let mut term = identity::<T>(dim);
    for k in 1..=24 {
        term = term.dot(&scaled);
        term.mapv_inplace(|z| z / T::from_usize(k).unwrap());
        result = result + &term;
        if max_abs(&term) < T::epsilon() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Positivity probe: attempts a Cholesky factorization of `m + slack·I`.
/// Success implies the minimum eigenvalue is ≥ −slack (up to rounding).
pub fn positive_within_slack<T: Real>(m: &CMat<T>, slack: T) -> bool {
    let dim = m.nrows();
    let mut l = CMat::<T>::zeros((dim, dim));
    let pivot_floor = -lit::<T>(16.0) * T::epsilon() * (T::one() + max_abs(m));
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = m[(i, j)];
            if i == j {
                sum = sum + Complex::new(slack, T::zero());
            }
            for k in 0..j {
                sum = sum - l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let d = sum.re;
                if d < pivot_floor {
                    return false;
                }
                l[(i, j)] = Complex::new(d.max(T::zero()).sqrt(), T::zero());
            } else {
                let piv = l[(j, j)].re;
                l[(i, j)] = if piv > T::zero() {
                    sum / l[(j, j)]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
            }
        }
    }
    true
}

/// The single-mode operators lifted to the joint cavity ⊗ mirror space.
#[derive(Debug, Clone)]
pub struct OperatorSet<T: Real> {
    pub cfg: HilbertConfig,
    /// Cavity annihilation `a ⊗ 1`.
    pub a: CMat<T>,
    /// Cavity creation `a† ⊗ 1`.
    pub adag: CMat<T>,
    /// Cavity photon number `n̂ ⊗ 1`.
    pub n: CMat<T>,
    /// Mirror annihilation `1 ⊗ b`.
    pub b: CMat<T>,
    /// Mirror creation `1 ⊗ b†`.
    pub bdag: CMat<T>,
    /// Mirror phonon number `1 ⊗ N̂`.
    pub nb: CMat<T>,
}

impl<T: Real> OperatorSet<T> {
    pub fn new(cfg: HilbertConfig) -> Result<Self, QuantumError> {
        cfg.check()?;
        let (nc, nm) = (cfg.n_cavity, cfg.n_mirror);
        let ic = identity::<T>(nc);
        let im = identity::<T>(nm);
        let ac = annihilation::<T>(nc);
        let bm = annihilation::<T>(nm);
        let a = kron(&ac, &im);
        let b = kron(&ic, &bm);
        Ok(Self {
            cfg,
            adag: dagger(&a),
            n: kron(&number::<T>(nc), &im),
            bdag: dagger(&b),
            nb: kron(&ic, &number::<T>(nm)),
            a,
            b,
        })
    }
}
