//! The quadratic form `Q(f, g) = ∫ ⟨∇f, ∇g⟩_G dΩ − (π/2a)² ∫ f g dΩ` on the test family
//! `φ_ε = χ ψ + ε χ₁ j` with `χ = cos(πu/2a)` and `χ₁ = u cos(πu/2a)`.
//!
//! Terms involving `ψ` are integrated in profile coordinates, where the
//! `u`-integral of the potential term is done in closed form. Terms involving
//! `j` are integrated over the ruled window with the full layer metric.

use serde::{Deserialize, Serialize};

use crate::certifier::capacity::{symmetric_profile, Plateau};
use crate::certifier::cutoff::Cutoff;
use crate::error::Result;
use crate::geometry::{layer_metric_from_forms, second_form_from_frames, LayerModel, SDomain};
use crate::quadrature::{periodic_nodes, GaussLegendre, Panels};
use crate::scalar::{lit, Scalar};

/// Resolution of the tensor-product rules; the error bound compares a pass
/// with every panel count doubled against the base pass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormQuadrature {
    pub gauss: usize,
    pub u_nodes: usize,
    /// Trapezoid nodes over a periodic s-window.
    pub s_nodes: usize,
    /// Gauss panels per ramp or plateau segment of an interval s-window.
    pub s_panels: usize,
    /// Graded panels per segment of the ruling window.
    pub v_panels: usize,
    /// Graded panels per segment of the profile integrals.
    pub profile_panels: usize,
}

impl Default for FormQuadrature {
    fn default() -> Self {
        Self { gauss: 8, u_nodes: 16, s_nodes: 16, s_panels: 4, v_panels: 12, profile_panels: 24 }
    }
}

/// Refinement differences of each piece, with a round-off floor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FormErrors<T> {
    pub q0: T,
    pub q1: T,
    pub q2: T,
    pub n0: T,
    pub n1: T,
    pub n2: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QuadraticFormDecomposition<T> {
    /// `Q(χψ, χψ)`.
    pub q0: T,
    /// `Q(χψ, χ₁j)`.
    pub q1: T,
    /// `Q(χ₁j, χ₁j)`.
    pub q2: T,
    pub q0_gradient: T,
    pub q0_potential: T,
    /// Part of `q0` over the ruled window.
    pub q0_window: T,
    /// `−(a/2) ∫ j H dΣ`, the closed-form `u`-reduction of `q1`.
    pub q1_curvature: T,
    /// `∫ χ²ψ²`, `∫ χχ₁ψj`, `∫ χ₁²j²` over the layer.
    pub n0: T,
    pub n1: T,
    pub n2: T,
    pub n0_window: T,
    pub int_jh: T,
    /// `∫ j² dΣ` and `∫ |∇j|² dΣ`.
    pub j_l2: T,
    pub j_grad_l2: T,
    pub eps_star: T,
    pub discriminant: T,
    pub value_at_star: T,
    pub errors: FormErrors<T>,
}

impl<T: Scalar> QuadraticFormDecomposition<T> {
    pub fn value(&self, eps: T) -> T {
        self.q0 + lit::<T>(2.0) * eps * self.q1 + eps * eps * self.q2
    }

    pub fn norm(&self, eps: T) -> T {
        self.n0 + lit::<T>(2.0) * eps * self.n1 + eps * eps * self.n2
    }

    pub fn value_error(&self, eps: T) -> T {
        let e = &self.errors;
        e.q0 + lit::<T>(2.0) * eps.abs() * e.q1 + eps * eps * e.q2
    }

    pub fn norm_error(&self, eps: T) -> T {
        let e = &self.errors;
        e.n0 + lit::<T>(2.0) * eps.abs() * e.n1 + eps * eps * e.n2
    }

    /// `Q(φ_ε) / ∫ φ_ε²`, the Rayleigh quotient minus the threshold.
    pub fn rayleigh_excess(&self, eps: T) -> T {
        self.value(eps) / self.norm(eps)
    }

    /// Error bound of [`Self::rayleigh_excess`].
    pub fn rayleigh_error(&self, eps: T) -> T {
        let n = self.norm(eps);
        (self.value_error(eps) + self.value(eps).abs() * self.norm_error(eps) / n) / n
    }

    /// `(∫ jH)² / ‖j‖²_{W^{1,2}}`.
    pub fn growth_ratio(&self) -> T {
        self.int_jh * self.int_jh / (self.j_l2 + self.j_grad_l2)
    }
}

struct Transverse<T> {
    k: T,
    /// positive Gauss nodes and weights on `(0, a)`
    nodes: Vec<(T, T)>,
}

impl<T: Scalar> Transverse<T> {
    fn new(a: T, n: usize) -> Self {
        let rule = GaussLegendre::<T>::new(n + n % 2);
        let nodes = rule.mapped(-a, a).filter(|(u, _)| *u > T::zero()).collect();
        Self { k: T::PI() / (a + a), nodes }
    }

    /// `(χ, χ′, χ₁, χ₁′)` at `u`.
    fn modes(&self, u: T) -> (T, T, T, T) {
        let (sn, cs) = (self.k * u).sin_cos();
        (cs, -self.k * sn, u * cs, cs - self.k * u * sn)
    }
}

#[derive(Clone, Copy, Default)]
struct ProfileSums<T> {
    grad: T,
    pot: T,
    n0: T,
}

fn profile_sums<T: Scalar>(
    layer: &LayerModel<T>,
    plateau: &Plateau<T>,
    q: &FormQuadrature,
    refine: usize,
    tr: &Transverse<T>,
) -> Result<ProfileSums<T>> {
    let prof = symmetric_profile(&layer.surface)?;
    let a = layer.thickness;
    let ends: T = lit(prof.ends().len() as f64);
    let mu2 = a * a * a * (lit::<T>(1.0 / 3.0) - lit::<T>(2.0) / (T::PI() * T::PI()));
    let rule = GaussLegendre::<T>::new(q.gauss);
    let n = q.profile_panels * refine;
    let (t1, t2, t3, t4) = (plateau.inner.tau_a, plateau.inner.tau_b, plateau.outer.tau_a, plateau.outer.tau_b);
    let mut out = ProfileSums::default();
    for (seg, lo, hi) in [(0, t1, t2), (1, t2, t3), (2, t3, t4)] {
        let mut cuts = vec![lo];
        cuts.extend(prof.kinks().into_iter().filter(|&k| k > lo && k < hi));
        cuts.push(hi);
        let mut nodes = Vec::new();
        for w in cuts.windows(2) {
            let offset = if w[0] > T::zero() { T::zero() } else { T::one() - w[0] };
            nodes.extend(Panels::graded(w[0], w[1], n, offset).nodes(&rule));
        }
        let taus: Vec<T> = nodes.iter().map(|x| x.0).collect();
        let (psi, slope): (Vec<T>, Vec<T>) = match seg {
            0 => (
                plateau.inner.values(&taus).into_iter().map(|p| T::one() - p).collect(),
                taus.iter().map(|&t| -plateau.inner.slope(t)).collect(),
            ),
            1 => (vec![T::one(); taus.len()], vec![T::zero(); taus.len()]),
            _ => (plateau.outer.values(&taus), taus.iter().map(|&t| plateau.outer.slope(t)).collect()),
        };
        for (i, &(t, wt)) in nodes.iter().enumerate() {
            let area = ends * prof.area_density(t) * wt;
            let (km, kp) = prof.curvatures(t);
            let gauss = km * kp;
            if slope[i] != T::zero() {
                let mut g = T::zero();
                for &(u, wu) in &tr.nodes {
                    let chi = tr.modes(u).0;
                    g += wu * chi * chi * ((T::one() - u * kp) / (T::one() - u * km) + (T::one() + u * kp) / (T::one() + u * km));
                }
                out.grad += slope[i] * slope[i] * g * area;
            }
            let p2 = psi[i] * psi[i];
            out.pot += a * gauss * p2 * area;
            out.n0 += p2 * (a + mu2 * gauss) * area;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Default)]
struct WindowSums<T> {
    q0w: T,
    q1: T,
    q2: T,
    n0w: T,
    n1: T,
    n2: T,
    int_jh: T,
    j_l2: T,
    j_grad: T,
    /// `Σ |terms|` of the cancelling sums, for round-off floors
    mag_q0w: T,
    mag_q1: T,
    mag_direct: T,
    /// `Q_W(φ_ε)` and `∫_W φ_ε²` when a direct evaluation was requested
    direct: Option<(T, T)>,
}

/// Quadrature nodes `(point, weight)` along `s` and along `v`.
type NodePair<T> = (Vec<(T, T)>, Vec<(T, T)>);

fn window_nodes<T: Scalar>(layer: &LayerModel<T>, cut: &Cutoff<T>, q: &FormQuadrature, refine: usize) -> NodePair<T> {
    let rule = GaussLegendre::<T>::new(q.gauss);
    let s_nodes = match (cut.s, layer.surface.chart.s_domain) {
        (None, SDomain::Periodic { start, period }) => periodic_nodes(start, period, q.s_nodes * refine),
        (None, SDomain::Interval { lo, hi }) => Panels::uniform(lo, hi, q.s_panels * refine).nodes(&rule),
        (Some(r), _) => {
            let k = r.kinks();
            Panels::join((0..3).map(|i| Panels::uniform(k[i], k[i + 1], q.s_panels * refine))).nodes(&rule)
        }
    };
    let k = cut.v.kinks();
    let offset = T::one() - k[0].min(T::zero());
    let v_nodes = Panels::join((0..3).map(|i| Panels::graded(k[i], k[i + 1], q.v_panels * refine, offset))).nodes(&rule);
    (s_nodes, v_nodes)
}

fn window_sums<T: Scalar>(
    layer: &LayerModel<T>,
    cut: &Cutoff<T>,
    q: &FormQuadrature,
    refine: usize,
    tr: &Transverse<T>,
    eps: Option<T>,
) -> Result<WindowSums<T>> {
    let (s_nodes, v_nodes) = window_nodes(layer, cut, q, refine);
    let chart = &layer.surface.chart;
    let k2 = tr.k * tr.k;
    let mut w = WindowSums::<T>::default();
    let (mut dq, mut dn) = (T::zero(), T::zero());
    for &(s, ws) in &s_nodes {
        let (b, d) = chart.frames(s);
        for &(v, wv) in &v_nodes {
            let f = second_form_from_frames(&b, &d, chart.orientation, v);
            let da = f.area_element() * ws * wv;
            let j = cut.value(s, v);
            let (js, jv) = cut.gradient(s, v);
            let ginv = [[f.metric[1][1], -f.metric[0][1]], [-f.metric[1][0], f.metric[0][0]]];
            let det = f.metric[0][0] * f.metric[1][1] - f.metric[0][1] * f.metric[1][0];
            w.int_jh += j * f.mean() * da;
            w.j_l2 += j * j * da;
            w.j_grad += (js * (ginv[0][0] * js + ginv[0][1] * jv) + jv * (ginv[1][0] * js + ginv[1][1] * jv)) / det * da;
            for &(um, wu) in &tr.nodes {
                for u in [um, -um] {
                    let m = layer_metric_from_forms(&f, u)?;
                    let gi = m.inverse_tangential();
                    let gj = js * (gi[0][0] * js + gi[0][1] * jv) + jv * (gi[1][0] * js + gi[1][1] * jv);
                    let dv = m.density * da * wu;
                    let (c, c1, x, x1) = tr.modes(u);
                    let t0 = (c1 * c1 - k2 * c * c) * dv;
                    let t1 = (c1 * x1 - k2 * c * x) * j * dv;
                    w.q0w += t0;
                    w.mag_q0w += t0.abs();
                    w.q1 += t1;
                    w.mag_q1 += t1.abs();
                    w.q2 += (x * x * gj + (x1 * x1 - k2 * x * x) * j * j) * dv;
                    w.n0w += c * c * dv;
                    w.n1 += c * x * j * dv;
                    w.n2 += x * x * j * j * dv;
                    if let Some(e) = eps {
                        let phi = c + e * x * j;
                        let du = c1 + e * x1 * j;
                        let terms = [e * e * x * x * gj * dv, du * du * dv, -k2 * phi * phi * dv];
                        dq += terms[0] + terms[1] + terms[2];
                        w.mag_direct += terms[0].abs() + terms[1].abs() + terms[2].abs();
                        dn += phi * phi * dv;
                    }
                }
            }
        }
    }
    w.direct = eps.map(|_| (dq, dn));
    Ok(w)
}

/// Evaluates `q0, q1, q2` and the matching norm pieces for `ψ` and `j`.
pub fn quadratic_form<T: Scalar>(
    layer: &LayerModel<T>,
    plateau: &Plateau<T>,
    cut: &Cutoff<T>,
    q: &FormQuadrature,
) -> Result<QuadraticFormDecomposition<T>> {
    let tr = Transverse::new(layer.thickness, q.u_nodes);
    let p1 = profile_sums(layer, plateau, q, 1, &tr)?;
    let p2 = profile_sums(layer, plateau, q, 2, &tr)?;
    let w1 = window_sums(layer, cut, q, 1, &tr, None)?;
    let w2 = window_sums(layer, cut, q, 2, &tr, None)?;
    let ulp = lit::<T>(64.0) * T::epsilon();
    let q0 = p2.grad + p2.pot;
    let errors = FormErrors {
        q0: (p2.grad + p2.pot - p1.grad - p1.pot).abs() + ulp * (p2.grad.abs() + p2.pot.abs()),
        q1: (w2.q1 - w1.q1).abs() + ulp * w2.mag_q1,
        q2: (w2.q2 - w1.q2).abs() + ulp * w2.q2.abs(),
        n0: (p2.n0 - p1.n0).abs() + ulp * p2.n0,
        n1: (w2.n1 - w1.n1).abs() + ulp * w2.n1.abs(),
        n2: (w2.n2 - w1.n2).abs() + ulp * w2.n2,
    };
    let (q1, q2) = (w2.q1, w2.q2);
    let eps_star = if q2 > T::zero() { -q1 / q2 } else { T::zero() };
    Ok(QuadraticFormDecomposition {
        q0,
        q1,
        q2,
        q0_gradient: p2.grad,
        q0_potential: p2.pot,
        q0_window: w2.q0w,
        q1_curvature: -layer.thickness * lit(0.5) * w2.int_jh,
        n0: p2.n0,
        n1: w2.n1,
        n2: w2.n2,
        n0_window: w2.n0w,
        int_jh: w2.int_jh,
        j_l2: w2.j_l2,
        j_grad_l2: w2.j_grad,
        eps_star,
        discriminant: q1 * q1 - q0 * q2,
        value_at_star: q0 + eps_star * q1,
        errors,
    })
}

/// `Q(φ_ε, φ_ε)` and `∫ φ_ε²` evaluated pointwise from `φ_ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DirectValue<T> {
    pub value: T,
    pub norm: T,
    /// Round-off bound of `value`: the pointwise integrand cancels
    /// `χ′² − k²χ²` over the whole window.
    pub roundoff: T,
}

/// Evaluates `φ_ε` pointwise on the refined rules.
///
/// Outside the window `φ_ε = χψ`, so the profile pieces of `q0` and `n0`
/// are reused there and the window is integrated directly.
pub fn direct_value<T: Scalar>(
    layer: &LayerModel<T>,
    plateau: &Plateau<T>,
    cut: &Cutoff<T>,
    q: &FormQuadrature,
    eps: T,
) -> Result<DirectValue<T>> {
    let tr = Transverse::new(layer.thickness, q.u_nodes);
    let p = profile_sums(layer, plateau, q, 2, &tr)?;
    let w = window_sums(layer, cut, q, 2, &tr, Some(eps))?;
    let (qw, nw) = w.direct.expect("direct evaluation requested");
    Ok(DirectValue {
        value: p.grad + p.pot - w.q0w + qw,
        norm: p.n0 - w.n0w + nw,
        roundoff: lit::<T>(4.0) * T::epsilon() * (w.mag_direct + w.mag_q0w),
    })
}
