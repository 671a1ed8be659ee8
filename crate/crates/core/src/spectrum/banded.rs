//! Symmetric banded matrices and their `LDLᵀ` factorization.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric matrix storing the lower band `a[i][j]`, `i − bw ≤ j ≤ i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    pub n: usize,
    pub bandwidth: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { n, bandwidth, data: vec![T::zero(); n * (bandwidth + 1)] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        i * (self.bandwidth + 1) + (self.bandwidth - (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            T::zero()
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `x` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, x: T) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] += x;
    }

    pub fn diagonal(&self, i: usize) -> T {
        self.data[self.idx(i, i)]
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: T, other: &Self) -> Self {
        assert_eq!((self.n, self.bandwidth), (other.n, other.bandwidth));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + c * b).collect();
        Self { n: self.n, bandwidth: self.bandwidth, data }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            let row = &self.data[i * (self.bandwidth + 1)..(i + 1) * (self.bandwidth + 1)];
            let mut acc = T::zero();
            for j in lo..i {
                let a = row[self.bandwidth - (i - j)];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc + row[self.bandwidth] * x[i];
        }
        y
    }

    /// Largest `|a_ij − a_ji| / max|a|`; symmetric storage makes this zero by construction.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// `LDLᵀ` without pivoting. Fails on a zero pivot.
    pub fn ldl(&self) -> Result<LdlFactor<T>> {
        let n = self.n;
        let bw = self.bandwidth;
        let mut l = self.data.clone();
        let mut d = vec![T::zero(); n];
        let w = bw + 1;
        let tiny = T::epsilon() * self.max_abs() * T::epsilon();
        for j in 0..n {
            // d_j = a_jj − Σ_k l_jk² d_k
            let lo = j.saturating_sub(bw);
            let mut dj = l[j * w + bw];
            for k in lo..j {
                let ljk = l[j * w + bw - (j - k)];
                dj -= ljk * ljk * d[k];
            }
            if dj.abs() <= tiny {
                return Err(Error::NoConvergence(format!("zero pivot at row {j} of the shifted matrix")));
            }
            d[j] = dj;
            for i in j + 1..(j + bw + 1).min(n) {
                let lo_i = i.saturating_sub(bw).max(lo);
                let mut s = l[i * w + bw - (i - j)];
                for k in lo_i..j {
                    s -= l[i * w + bw - (i - k)] * l[j * w + bw - (j - k)] * d[k];
                }
                l[i * w + bw - (i - j)] = s / dj;
            }
        }
        Ok(LdlFactor { n, bandwidth: bw, l, d })
    }
}

#[derive(Clone, Debug)]
pub struct LdlFactor<T> {
    n: usize,
    bandwidth: usize,
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> LdlFactor<T> {
    /// Number of negative pivots, which equals the number of negative
    /// eigenvalues of the factored matrix (Sylvester's law of inertia).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < T::zero()).count()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (n, bw, w) = (self.n, self.bandwidth, self.bandwidth + 1);
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[i * w + bw - (i - k)] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let hi = (i + bw + 1).min(n);
            let mut s = x[i];
            for k in i + 1..hi {
                s -= self.l[k * w + bw - (k - i)] * x[k];
            }
            x[i] = s;
        }
        x
    }
}
