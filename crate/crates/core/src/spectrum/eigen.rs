//! Lowest eigenpairs of `K x = λ M x` for banded symmetric `K ≥ 0`, `M > 0`.
//!
//! A shift below `λ₁` is located by bisection on the inertia of `K − σM`;
//! shift-inverted subspace iteration with Rayleigh–Ritz then converges to the
//! lowest eigenpairs, and a final inertia count confirms none was skipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectrum::banded::{BandedMatrix, LdlFactor};
use crate::spectrum::dense::symmetric_eigen;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Eigenpairs<T> {
    pub values: Vec<T>,
    /// `‖K x − λ M x‖ / ‖K x‖` per pair
    pub residuals: Vec<T>,
    pub iterations: usize,
    pub factorizations: usize,
    #[serde(skip)]
    pub vectors: Vec<Vec<T>>,
}

pub const MAX_ITERATIONS: usize = 600;

struct Shifted<'a, T> {
    k: &'a BandedMatrix<T>,
    m: &'a BandedMatrix<T>,
    factorizations: usize,
}

impl<T: Scalar> Shifted<'_, T> {
    /// Factorization of `K − σM`, nudging σ off an exactly singular shift.
    fn factor(&mut self, sigma: T) -> Result<(T, LdlFactor<T>)> {
        let mut s = sigma;
        for _ in 0..8 {
            self.factorizations += 1;
            match self.k.axpy(-s, self.m).ldl() {
                Ok(f) => return Ok((s, f)),
                Err(_) => s = s * (T::one() - lit::<T>(64.0) * T::epsilon()) - T::min_positive_value(),
            }
        }
        Err(Error::NoConvergence("shifted matrix singular at every nudge".into()))
    }

    fn count_below(&mut self, sigma: T) -> Result<usize> {
        Ok(self.factor(sigma)?.1.negative_pivots())
    }
}

fn m_dot<T: Scalar>(m: &BandedMatrix<T>, x: &[T], y: &[T]) -> T {
    m.matvec(y).iter().zip(x).map(|(a, b)| *a * *b).sum()
}

fn norm<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|a| *a * *a).sum::<T>().sqrt()
}

/// Number of generalized eigenvalues strictly below `sigma`.
pub fn count_below<T: Scalar>(k: &BandedMatrix<T>, m: &BandedMatrix<T>, sigma: T) -> Result<usize> {
    Shifted { k, m, factorizations: 0 }.count_below(sigma)
}

/// The `count` smallest eigenpairs to relative residual `tol`. The random
/// starting block is drawn from a ChaCha stream seeded with `seed`.
pub fn lowest_eigenvalues<T: Scalar>(
    k: &BandedMatrix<T>,
    m: &BandedMatrix<T>,
    count: usize,
    tol: T,
    seed: u64,
) -> Result<Eigenpairs<T>> {
    let n = k.n;
    if count == 0 || count > n {
        return Err(Error::InvalidInput(format!("requested {count} eigenpairs of a {n}-dimensional problem")));
    }
    if k.n != m.n || k.bandwidth != m.bandwidth {
        return Err(Error::InvalidInput("stiffness and mass layouts differ".into()));
    }
    let mut op = Shifted { k, m, factorizations: 0 };

    // Upper bound for λ₁ from the diagonal Rayleigh quotients.
    let mut hi = (0..n).map(|i| k.diagonal(i) / m.diagonal(i)).fold(T::infinity(), T::min);
    hi = hi * (T::one() + lit::<T>(1e-6)) + T::min_positive_value();
    while op.count_below(hi)? == 0 {
        hi = hi * lit(2.0) + T::one();
    }
    let mut lo = T::zero();
    let rel = tol.sqrt().min(lit(1e-7)).max(lit::<T>(64.0) * T::epsilon());
    for _ in 0..200 {
        if hi - lo <= rel * hi {
            break;
        }
        let mid = (lo + hi) / lit(2.0);
        if op.count_below(mid)? == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (sigma, fac) = op.factor(lo)?;

    let block = (count + count.max(3)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec<T>> = (0..block).map(|_| (0..n).map(|_| lit(rng.gen_range(-1.0..1.0))).collect()).collect();
    let mut values = vec![T::zero(); block];
    let mut residuals = vec![T::infinity(); count];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut y: Vec<Vec<T>> = x.iter().map(|xi| fac.solve(&m.matvec(xi))).collect();
        // M-orthonormalize, twice for stability
        for _ in 0..2 {
            for i in 0..block {
                for j in 0..i {
                    let c = m_dot(m, &y[j], &y[i]);
                    let yj = y[j].clone();
                    for (a, b) in y[i].iter_mut().zip(&yj) {
                        *a -= c * *b;
                    }
                }
                let nrm = m_dot(m, &y[i], &y[i]).sqrt();
                if !(nrm > T::zero()) {
                    return Err(Error::NoConvergence("subspace collapsed during orthogonalization".into()));
                }
                for a in y[i].iter_mut() {
                    *a /= nrm;
                }
            }
        }
        let ky: Vec<Vec<T>> = y.iter().map(|v| k.matvec(v)).collect();
        let mut a = vec![T::zero(); block * block];
        for i in 0..block {
            for j in 0..=i {
                let v: T = ky[i].iter().zip(&y[j]).map(|(p, q)| *p * *q).sum();
                a[i * block + j] = v;
                a[j * block + i] = v;
            }
        }
        let (theta, c) = symmetric_eigen(&a, block);
        x = (0..block)
            .map(|col| {
                let mut v = vec![T::zero(); n];
                for (r, yr) in y.iter().enumerate() {
                    let w = c[r * block + col];
                    for (vi, yi) in v.iter_mut().zip(yr) {
                        *vi += w * *yi;
                    }
                }
                v
            })
            .collect();
        values = theta;
        for i in 0..count {
            let kx = k.matvec(&x[i]);
            let mx = m.matvec(&x[i]);
            let r: Vec<T> = kx.iter().zip(&mx).map(|(p, q)| *p - values[i] * *q).collect();
            residuals[i] = norm(&r) / norm(&kx);
        }
        if residuals.iter().all(|&r| r <= tol) {
            break;
        }
    }
    if residuals.iter().any(|&r| !(r <= tol)) {
        return Err(Error::NoConvergence(format!(
            "residual {:.3e} above {:.1e} after {iterations} iterations (shift {:.6})",
            residuals.iter().fold(0.0f64, |m, r| m.max(r.to_f64_lossy())),
            tol.to_f64_lossy(),
            sigma.to_f64_lossy()
        )));
    }
    // No eigenvalue below the reported ones may have been skipped.
    let margin = tol.sqrt() * values[count - 1].abs() + T::min_positive_value();
    let below = op.count_below(values[count - 1] + margin)?;
    if below < count {
        return Err(Error::NoConvergence(format!("inertia check found {below} eigenvalues where {count} were reported")));
    }
    let missed = op.count_below(values[count - 1] - margin)?;
    if missed >= count {
        return Err(Error::NoConvergence("subspace iteration skipped an eigenvalue".into()));
    }
    values.truncate(count);
    x.truncate(count);
    Ok(Eigenpairs { values, residuals, iterations, factorizations: op.factorizations, vectors: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_toy_pair() {
        let mut k = BandedMatrix::zeros(3, 1);
        let mut m = BandedMatrix::zeros(3, 1);
        for (i, d) in [3.0, 1.0, 2.0].into_iter().enumerate() {
            k.add(i, i, d);
            m.add(i, i, 1.0);
        }
        let r = lowest_eigenvalues(&k, &m, 3, 1e-10, 1).unwrap();
        for (v, e) in r.values.iter().zip([1.0f64, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-12, "{:?}", r.values);
        }
        assert_eq!(count_below(&k, &m, 2.5).unwrap(), 2);
    }

    #[test]
    fn same_seed_same_answer() {
        let n = 40;
        let mut k = BandedMatrix::zeros(n, 2);
        let mut m = BandedMatrix::zeros(n, 2);
        for i in 0..n {
            k.add(i, i, 2.0 + 0.01 * i as f64);
            m.add(i, i, 1.0);
            if i + 1 < n {
                k.add(i + 1, i, -1.0);
                m.add(i + 1, i, 0.1);
            }
        }
        let a = lowest_eigenvalues(&k, &m, 3, 1e-9, 5).unwrap();
        let b = lowest_eigenvalues(&k, &m, 3, 1e-9, 5).unwrap();
        assert_eq!(a.values, b.values);
        assert!(a.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
