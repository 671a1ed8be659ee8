//! One-dimensional Lagrange elements on Gauss–Lobatto nodes.

use crate::quadrature::{gauss_lobatto_points, GaussLegendre};
use crate::scalar::{count, Scalar};

/// Reference element on `[-1, 1]` with basis values tabulated at Gauss points.
#[derive(Clone, Debug)]
pub struct Element1d<T> {
    pub order: usize,
    pub nodes: Vec<T>,
    pub quad_points: Vec<T>,
    pub quad_weights: Vec<T>,
    /// `phi[q][i]`
    pub phi: Vec<Vec<T>>,
    /// `dphi[q][i]`, derivative on the reference interval
    pub dphi: Vec<Vec<T>>,
}

impl<T: Scalar> Element1d<T> {
    pub fn new(order: usize, quad_points: usize) -> Self {
        assert!(order >= 1);
        let nodes: Vec<T> = gauss_lobatto_points(order + 1);
        let rule = GaussLegendre::<T>::new(quad_points);
        let phi = rule.nodes.iter().map(|&x| lagrange(&nodes, x).0).collect();
        let dphi = rule.nodes.iter().map(|&x| lagrange(&nodes, x).1).collect();
        Self { order, nodes, quad_points: rule.nodes.clone(), quad_weights: rule.weights.clone(), phi, dphi }
    }

    pub fn n_basis(&self) -> usize {
        self.order + 1
    }

    /// Physical coordinate of reference point `x` in `[a, b]`.
    pub fn map(a: T, b: T, x: T) -> T {
        let half = (b - a) / (T::one() + T::one());
        a + half * (x + T::one())
    }
}

/// Values and derivatives of the Lagrange basis on `nodes` at `x`.
pub fn lagrange<T: Scalar>(nodes: &[T], x: T) -> (Vec<T>, Vec<T>) {
    let n = nodes.len();
    let mut val = vec![T::zero(); n];
    let mut der = vec![T::zero(); n];
    for i in 0..n {
        let mut p = T::one();
        for j in 0..n {
            if j != i {
                p *= (x - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        val[i] = p;
        let mut d = T::zero();
        for k in 0..n {
            if k == i {
                continue;
            }
            let mut t = (nodes[i] - nodes[k]).recip();
            for j in 0..n {
                if j != i && j != k {
                    t *= (x - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            d += t;
        }
        der[i] = d;
    }
    (val, der)
}

/// Global node coordinates of a 1D mesh with element breaks and order `p`.
pub fn mesh_nodes<T: Scalar>(breaks: &[T], el: &Element1d<T>) -> Vec<T> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        for &x in &el.nodes[1..] {
            out.push(Element1d::map(w[0], w[1], x));
        }
    }
    out
}

/// Uniform breaks.
pub fn uniform_breaks<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    (0..=n).map(|i| a + (b - a) * count::<T>(i) / count::<T>(n)).collect()
}
