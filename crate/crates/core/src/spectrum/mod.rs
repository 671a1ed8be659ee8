//! Finite-element eigenvalues of the Dirichlet Laplacian on the truncated layer.
//!
//! Conforming Lagrange elements give upper bounds for every eigenvalue
//! (min-max), and a Dirichlet wall at `v_max` only raises them, so an
//! eigenvalue found below `(π/2a)²` is a genuine bound state of the full layer.

pub mod assemble;
pub mod banded;
pub mod dense;
pub mod eigen;
pub mod element;
pub mod mesh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LayerModel;
use crate::scalar::{lit, Scalar};

pub use assemble::{assemble, Assembly};
pub use banded::{BandedMatrix, LdlFactor};
pub use eigen::{count_below, lowest_eigenvalues, Eigenpairs};
pub use mesh::{MeshLayout, MeshSpec, SBoundary};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverOptions<T> {
    /// Number of eigenpairs.
    pub k: usize,
    /// Relative residual target.
    pub tol: T,
    pub seed: u64,
}

impl<T: Scalar> SolverOptions<T> {
    pub fn new(seed: u64) -> Self {
        Self { k: 3, tol: lit(1e-8), seed }
    }
}

/// Lowest eigenvalues of one discretization.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SpectralReport<T> {
    pub eigenvalues: Vec<T>,
    pub threshold: T,
    /// Discrete eigenvalues below the threshold, from the inertia of `K − (π/2a)² M`.
    pub count_below_threshold: usize,
    pub mesh: MeshSpec<T>,
    pub residuals: Vec<T>,
    pub dofs: usize,
    pub bandwidth: usize,
    pub iterations: usize,
    pub seed: u64,
    /// `(s, v, u, value)` of the ground state at every free node, M-normalized
    #[serde(skip)]
    pub ground_state: Vec<[T; 4]>,
}

impl<T: Scalar> SpectralReport<T> {
    pub fn lambda1(&self) -> T {
        self.eigenvalues[0]
    }

    /// `threshold − λ₁`; positive when a bound state was found.
    pub fn gap(&self) -> T {
        self.threshold - self.lambda1()
    }
}

pub fn spectrum<T: Scalar>(layer: &LayerModel<T>, mesh: &MeshSpec<T>, opts: &SolverOptions<T>) -> Result<SpectralReport<T>> {
    let asm = assemble(layer, mesh)?;
    let pairs = lowest_eigenvalues(&asm.stiffness, &asm.mass, opts.k.min(asm.dofs()), opts.tol, opts.seed)?;
    let threshold = layer.threshold();
    let below = count_below(&asm.stiffness, &asm.mass, threshold)?;
    let ground = &pairs.vectors[0];
    // fix the sign so the largest entry is positive
    let sign = ground.iter().fold(T::zero(), |m, &x| if x.abs() > m.abs() { x } else { m }).signum();
    let ground_state = asm.coords.iter().zip(ground).map(|(c, &x)| [c[0], c[1], c[2], sign * x]).collect();
    Ok(SpectralReport {
        eigenvalues: pairs.values,
        threshold,
        count_below_threshold: below,
        mesh: *mesh,
        residuals: pairs.residuals,
        dofs: asm.dofs(),
        bandwidth: asm.stiffness.bandwidth,
        iterations: pairs.iterations,
        seed: opts.seed,
        ground_state,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ScanRow<T> {
    pub v_max: T,
    pub n_v: usize,
    pub n_u: usize,
    pub order: usize,
    pub dofs: usize,
    pub lambda1: T,
    pub count_below_threshold: usize,
    pub residual: T,
}

/// `λ₁` along a ladder of meshes with a geometric extrapolation of the limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ThresholdScan<T> {
    pub threshold: T,
    pub rows: Vec<ScanRow<T>>,
    pub extrapolated: T,
    pub extrapolation_error: T,
    /// Ratio of successive differences of the last three rungs.
    pub contraction: Option<T>,
    /// `ln(1/contraction) / ln(v_max ratio)` when the ladder scales `v_max`.
    pub observed_order: Option<T>,
    pub gap: T,
    /// Largest increase of `λ₁` along the ladder (should be at solver tolerance).
    pub monotonicity_defect: T,
    #[serde(skip)]
    pub last: Option<SpectralReport<T>>,
}

impl<T: Scalar> ThresholdScan<T> {
    /// Below threshold with a gap exceeding `factor` extrapolation errors.
    pub fn resolved_below(&self, factor: T) -> bool {
        self.gap > factor * self.extrapolation_error
    }
}

/// Solves every mesh on the ladder (coarse to fine) and extrapolates `λ₁`.
///
/// With `d₁, d₂` the last two increments and `r = d₂/d₁ ∈ (0, 1)` the limit is
/// `λ_last + d₂ r/(1 − r)` and the error estimate is that correction plus the
/// last increment's solver slack; otherwise the limit is the last value and
/// the error is the largest of the last two increments.
pub fn threshold_scan<T: Scalar>(layer: &LayerModel<T>, ladder: &[MeshSpec<T>], opts: &SolverOptions<T>) -> Result<ThresholdScan<T>> {
    if ladder.len() < 3 {
        return Err(Error::InvalidInput("a refinement ladder needs at least three meshes".into()));
    }
    let mut rows = Vec::new();
    let mut last = None;
    for mesh in ladder {
        let rep = spectrum(layer, mesh, opts)?;
        rows.push(ScanRow {
            v_max: mesh.v_max,
            n_v: mesh.n_v,
            n_u: mesh.n_u,
            order: mesh.order,
            dofs: rep.dofs,
            lambda1: rep.lambda1(),
            count_below_threshold: rep.count_below_threshold,
            residual: rep.residuals[0],
        });
        last = Some(rep);
    }
    let l: Vec<T> = rows.iter().map(|r| r.lambda1).collect();
    let n = l.len();
    let (d1, d2) = (l[n - 2] - l[n - 3], l[n - 1] - l[n - 2]);
    let slack = opts.tol * l[n - 1].abs();
    let mut contraction = None;
    let (extrapolated, extrapolation_error) = if d1 != T::zero() && d2 / d1 > T::zero() && d2 / d1 < lit(0.95) {
        let r = d2 / d1;
        contraction = Some(r);
        let corr = d2 * r / (T::one() - r);
        (l[n - 1] + corr, corr.abs() + slack)
    } else if d1 == T::zero() && d2 == T::zero() {
        (l[n - 1], slack)
    } else {
        (l[n - 1], d1.abs().max(d2.abs()) + slack)
    };
    let q = rows[n - 1].v_max / rows[n - 2].v_max;
    let observed_order = contraction.filter(|_| q > lit(1.0 + 1e-9)).map(|r| (T::one() / r).ln() / q.ln());
    let monotonicity_defect = l.windows(2).map(|w| (w[1] - w[0]).max(T::zero())).fold(T::zero(), T::max);
    let threshold = layer.threshold();
    Ok(ThresholdScan {
        threshold,
        gap: threshold - extrapolated,
        rows,
        extrapolated,
        extrapolation_error,
        contraction,
        observed_order,
        monotonicity_defect,
        last,
    })
}

/// Default ladder: three truncations doubling `v_max` at fixed element size.
pub fn default_ladder<T: Scalar>(base: MeshSpec<T>) -> Vec<MeshSpec<T>> {
    vec![base, base.extended(2), base.extended(4)]
}
