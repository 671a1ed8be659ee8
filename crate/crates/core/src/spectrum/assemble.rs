//! Stiffness and mass forms of the Dirichlet Laplacian on the truncated layer.

use crate::error::{Error, Result};
use crate::geometry::revolution::End;
use crate::geometry::{layer_metric_from_forms, mean_curvature_from_forms, second_form_and_shape, LayerModel};
use crate::quadrature::Panels;
use crate::scalar::{count, lit, Scalar};
use crate::spectrum::banded::BandedMatrix;
use crate::spectrum::element::{mesh_nodes, uniform_breaks, Element1d};
use crate::spectrum::mesh::{MeshLayout, MeshSpec, SBoundary};

/// Assembled forms plus the physical coordinates `(s, v, u)` of every free node.
/// For axisymmetric meshes `s` is zero and `v` is the signed meridian arclength.
#[derive(Clone, Debug)]
pub struct Assembly<T> {
    pub stiffness: BandedMatrix<T>,
    pub mass: BandedMatrix<T>,
    pub coords: Vec<[T; 3]>,
}

impl<T: Scalar> Assembly<T> {
    pub fn dofs(&self) -> usize {
        self.coords.len()
    }

    /// Rayleigh quotient `xᵀKx / xᵀMx` of the nodal interpolant of `f(s, v, u)`.
    /// By min-max it bounds the lowest discrete eigenvalue from above.
    pub fn nodal_rayleigh(&self, f: impl Fn([T; 3]) -> T) -> T {
        let x: Vec<T> = self.coords.iter().map(|&c| f(c)).collect();
        let kx = self.stiffness.matvec(&x);
        let mx = self.mass.matvec(&x);
        let num: T = kx.iter().zip(&x).map(|(a, b)| *a * *b).sum();
        let den: T = mx.iter().zip(&x).map(|(a, b)| *a * *b).sum();
        num / den
    }
}

/// Node numbering along one direction: `map[g]` is the free index of global node `g`.
struct Axis<T> {
    coords: Vec<T>,
    breaks: Vec<T>,
    map: Vec<Option<usize>>,
    free: usize,
}

impl<T: Scalar> Axis<T> {
    fn new(breaks: Vec<T>, el: &Element1d<T>, clamp_lo: bool, clamp_hi: bool) -> Self {
        let coords = mesh_nodes(&breaks, el);
        let n = coords.len();
        let mut free = 0;
        let map = (0..n)
            .map(|g| {
                if (g == 0 && clamp_lo) || (g == n - 1 && clamp_hi) {
                    None
                } else {
                    free += 1;
                    Some(free - 1)
                }
            })
            .collect();
        Self { coords, breaks, map, free }
    }

    /// Periodic axis: the last node is identified with the first, and free
    /// indices are folded (0, N−1, 1, N−2, …) so the ring stays banded.
    fn periodic(breaks: Vec<T>, el: &Element1d<T>) -> Self {
        let mut coords = mesh_nodes(&breaks, el);
        coords.pop();
        let n = coords.len();
        let mut map: Vec<Option<usize>> = (0..n).map(|i| Some(if 2 * i < n { 2 * i } else { 2 * (n - 1 - i) + 1 })).collect();
        map.push(map[0]);
        Self { coords, breaks, map, free: n }
    }

    fn coord(&self, g: usize) -> T {
        self.coords[g % self.coords.len()]
    }
}

pub fn assemble<T: Scalar>(layer: &LayerModel<T>, mesh: &MeshSpec<T>) -> Result<Assembly<T>> {
    mesh.validate(layer)?;
    match mesh.layout {
        MeshLayout::Axisymmetric { mode, grading } => assemble_axisymmetric(layer, mesh, mode, grading),
        MeshLayout::ChartBox { s_range, v_min, s_boundary } => assemble_box(layer, mesh, s_range, v_min, s_boundary),
    }
}

fn graded_breaks<T: Scalar>(lo: T, hi: T, n: usize, g: T, kinks: &[T]) -> Vec<T> {
    let inner: Vec<T> = kinks.iter().copied().filter(|&k| k > lo && k < hi).collect();
    if inner.is_empty() || n < 2 {
        return Panels::graded(lo, hi, n, g).breaks;
    }
    let k = inner[0];
    let frac = ((k - lo + g) / g).ln() / ((hi - lo + g) / g).ln();
    let n1 = (frac * count::<T>(n)).round().to_usize().unwrap_or(1).clamp(1, n - 1);
    let a = Panels::graded(lo, k, n1, g);
    let b = Panels::graded(k, hi, n - n1, g + (k - lo));
    Panels::join([a, b]).breaks
}

/// `±1` so that profile curvatures agree with the chart's oriented normal,
/// making `u` the same coordinate as in the certifier.
fn normal_sign<T: Scalar>(layer: &LayerModel<T>) -> T {
    let surface = &layer.surface;
    let prof = surface.profile.as_ref().expect("validated");
    let (lo, hi) = surface.chart.v_range;
    let s0 = surface.chart.s_domain.bounds().0;
    for v in [T::one(), lit(3.0), lit(10.0)] {
        let v = v.max(lo).min(hi);
        let h = mean_curvature_from_forms(&surface.chart, s0, v);
        let (km, kp) = prof.curvatures(prof.tau_of_point(surface.chart.point(s0, v)));
        let hp = km + kp;
        if h.abs() > lit::<T>(1e-9) && hp.abs() > lit::<T>(1e-9) {
            return if (h > T::zero()) == (hp > T::zero()) { T::one() } else { -T::one() };
        }
    }
    T::one()
}

fn assemble_axisymmetric<T: Scalar>(layer: &LayerModel<T>, mesh: &MeshSpec<T>, mode: u32, g: T) -> Result<Assembly<T>> {
    let prof = layer.surface.profile.as_ref().expect("validated");
    let p = mesh.order;
    let el = Element1d::<T>::new(p, p + 3);
    let hi = prof.tau_at_radius(mesh.v_max, End::Upper);
    let kinks = prof.kinks();
    let (tau_breaks, clamp_lo) = if prof.has_pole() {
        (graded_breaks(T::zero(), hi, mesh.n_v, g, &kinks), mode != 0)
    } else {
        let lo = prof.tau_at_radius(mesh.v_max, End::Lower);
        let n_neg = (mesh.n_v / 2).max(1);
        let n_pos = mesh.n_v.saturating_sub(n_neg).max(1);
        let mut neg: Vec<T> = Panels::graded(T::zero(), -lo, n_neg, g).breaks.into_iter().map(|x| -x).collect();
        neg.reverse();
        let pos = Panels::graded(T::zero(), hi, n_pos, g).breaks;
        neg.extend_from_slice(&pos[1..]);
        (neg, true)
    };
    let a = layer.thickness;
    let sign = normal_sign(layer);
    let tau = Axis::new(tau_breaks, &el, clamp_lo, true);
    let u = Axis::new(uniform_breaks(-a, a, mesh.n_u), &el, true, true);
    let nu = u.free;
    let dofs = tau.free * nu;
    let dof = |gt: usize, gu: usize| Some(tau.map[gt]? * nu + u.map[gu]?);
    let bw = (p + 1) * nu;
    let mut kmat = BandedMatrix::zeros(dofs, bw.min(dofs.saturating_sub(1)));
    let mut mmat = BandedMatrix::zeros(dofs, bw.min(dofs.saturating_sub(1)));
    let m2: T = lit((mode as f64).powi(2));
    let nb = p + 1;
    let nq = el.quad_points.len();
    let two: T = lit(2.0);
    for et in 0..tau.breaks.len() - 1 {
        let (t0, t1) = (tau.breaks[et], tau.breaks[et + 1]);
        let jt = (t1 - t0) / two;
        let geo: Vec<(T, T, T, T)> = el
            .quad_points
            .iter()
            .map(|&x| {
                let t = Element1d::map(t0, t1, x);
                let j = prof.jet(t);
                let (km, kp) = prof.curvatures(t);
                (j.speed(), j.rho, sign * km, sign * kp)
            })
            .collect();
        for eu in 0..u.breaks.len() - 1 {
            let (u0, u1) = (u.breaks[eu], u.breaks[eu + 1]);
            let ju = (u1 - u0) / two;
            let mut kl = vec![T::zero(); nb * nb * nb * nb];
            let mut ml = vec![T::zero(); nb * nb * nb * nb];
            for qt in 0..nq {
                let (w, rho, km, kp) = geo[qt];
                for qu in 0..nq {
                    let uu = Element1d::map(u0, u1, el.quad_points[qu]);
                    let (mt, mp) = (T::one() - uu * km, T::one() - uu * kp);
                    if !(mt > T::zero() && mp > T::zero()) {
                        return Err(Error::ThicknessViolation(format!(
                            "layer density vanishes at u = {:.4}",
                            uu.to_f64_lossy()
                        )));
                    }
                    let vol = w * rho * mt * mp * jt * ju * el.quad_weights[qt] * el.quad_weights[qu];
                    let ct = (w * mt * jt).powi(2).recip();
                    let cp = m2 / (rho * mp).powi(2);
                    let cu = ju.powi(2).recip();
                    for ia in 0..nb {
                        for ib in 0..nb {
                            let a_idx = ia * nb + ib;
                            let (pa, da_t, da_u) = (
                                el.phi[qt][ia] * el.phi[qu][ib],
                                el.dphi[qt][ia] * el.phi[qu][ib],
                                el.phi[qt][ia] * el.dphi[qu][ib],
                            );
                            for ja in 0..nb {
                                for jb in 0..nb {
                                    let b_idx = ja * nb + jb;
                                    if b_idx > a_idx {
                                        continue;
                                    }
                                    let pb = el.phi[qt][ja] * el.phi[qu][jb];
                                    let db_t = el.dphi[qt][ja] * el.phi[qu][jb];
                                    let db_u = el.phi[qt][ja] * el.dphi[qu][jb];
                                    let idx = a_idx * nb * nb + b_idx;
                                    kl[idx] += vol * (ct * da_t * db_t + cp * pa * pb + cu * da_u * db_u);
                                    ml[idx] += vol * pa * pb;
                                }
                            }
                        }
                    }
                }
            }
            for a_idx in 0..nb * nb {
                let Some(da) = dof(et * p + a_idx / nb, eu * p + a_idx % nb) else { continue };
                for b_idx in 0..=a_idx {
                    let Some(db) = dof(et * p + b_idx / nb, eu * p + b_idx % nb) else { continue };
                    let idx = a_idx * nb * nb + b_idx;
                    kmat.add(da, db, kl[idx]);
                    mmat.add(da, db, ml[idx]);
                }
            }
        }
    }
    let arclen = |t: T| prof.arclength(t);
    let mut coords = vec![[T::zero(); 3]; dofs];
    for (gt, mt) in tau.map.iter().enumerate() {
        for (gu, mu) in u.map.iter().enumerate() {
            if let (Some(i), Some(j)) = (mt, mu) {
                coords[i * nu + j] = [T::zero(), arclen(tau.coord(gt)), u.coord(gu)];
            }
        }
    }
    Ok(Assembly { stiffness: kmat, mass: mmat, coords })
}

fn assemble_box<T: Scalar>(
    layer: &LayerModel<T>,
    mesh: &MeshSpec<T>,
    s_range: Option<(T, T)>,
    v_min: T,
    s_boundary: SBoundary,
) -> Result<Assembly<T>> {
    let chart = &layer.surface.chart;
    let p = mesh.order;
    let el = Element1d::<T>::new(p, p + 2);
    let (s0, s1) = s_range.unwrap_or_else(|| chart.s_domain.bounds());
    let s_breaks = uniform_breaks(s0, s1, mesh.n_s);
    let s = match s_boundary {
        SBoundary::Periodic => Axis::periodic(s_breaks, &el),
        SBoundary::Dirichlet => Axis::new(s_breaks, &el, true, true),
    };
    let v = Axis::new(uniform_breaks(v_min, mesh.v_max, mesh.n_v), &el, true, true);
    let a = layer.thickness;
    let u = Axis::new(uniform_breaks(-a, a, mesh.n_u), &el, true, true);
    let (nv, nu) = (v.free, u.free);
    let dofs = s.free * nv * nu;
    // the longer of s and v is the outer index, which keeps the band narrow
    let s_outer = s.free >= nv;
    let dof = |gs: usize, gv: usize, gu: usize| {
        let (i, j) = (s.map[gs]?, v.map[gv]?);
        let outer = if s_outer { i * nv + j } else { j * s.free + i };
        Some(outer * nu + u.map[gu]?)
    };
    let nb = p + 1;
    let local = |es: usize, ev: usize, eu: usize, l: usize| {
        let (i, j, k) = (l / (nb * nb), (l / nb) % nb, l % nb);
        dof(es * p + i, ev * p + j, eu * p + k)
    };
    let (ne_s, ne_v, ne_u) = (mesh.n_s, mesh.n_v, mesh.n_u);
    let nl = nb * nb * nb;
    let mut bw = 0;
    for es in 0..ne_s {
        for ev in 0..ne_v {
            for eu in 0..ne_u {
                let ids: Vec<usize> = (0..nl).filter_map(|l| local(es, ev, eu, l)).collect();
                if let (Some(lo), Some(hi)) = (ids.iter().min(), ids.iter().max()) {
                    bw = bw.max(hi - lo);
                }
            }
        }
    }
    let mut kmat = BandedMatrix::zeros(dofs, bw);
    let mut mmat = BandedMatrix::zeros(dofs, bw);
    let nq = el.quad_points.len();
    let two: T = lit(2.0);
    for es in 0..ne_s {
        let (sa, sb) = (s.breaks[es], s.breaks[es + 1]);
        let js = (sb - sa) / two;
        for ev in 0..ne_v {
            let (va, vb) = (v.breaks[ev], v.breaks[ev + 1]);
            let jv = (vb - va) / two;
            let forms: Vec<_> = (0..nq * nq)
                .map(|q| {
                    let ss = Element1d::map(sa, sb, el.quad_points[q / nq]);
                    let vv = Element1d::map(va, vb, el.quad_points[q % nq]);
                    second_form_and_shape(chart, ss, vv)
                })
                .collect();
            for eu in 0..ne_u {
                let (ua, ub) = (u.breaks[eu], u.breaks[eu + 1]);
                let ju = (ub - ua) / two;
                let mut kl = vec![T::zero(); nl * nl];
                let mut ml = vec![T::zero(); nl * nl];
                let mut phi = vec![T::zero(); nl];
                let mut grad = vec![[T::zero(); 3]; nl];
                for qs in 0..nq {
                    for qv in 0..nq {
                        let f = &forms[qs * nq + qv];
                        for qu in 0..nq {
                            let uu = Element1d::map(ua, ub, el.quad_points[qu]);
                            let g = layer_metric_from_forms(f, uu)?;
                            let gi = g.inverse_tangential();
                            let w = el.quad_weights[qs] * el.quad_weights[qv] * el.quad_weights[qu];
                            let vol = g.volume() * js * jv * ju * w;
                            for l in 0..nl {
                                let (i, j, k) = (l / (nb * nb), (l / nb) % nb, l % nb);
                                let (ps, pv, pu) = (el.phi[qs][i], el.phi[qv][j], el.phi[qu][k]);
                                phi[l] = ps * pv * pu;
                                grad[l] = [
                                    el.dphi[qs][i] * pv * pu / js,
                                    ps * el.dphi[qv][j] * pu / jv,
                                    ps * pv * el.dphi[qu][k] / ju,
                                ];
                            }
                            for la in 0..nl {
                                let ga = grad[la];
                                let ha = [gi[0][0] * ga[0] + gi[0][1] * ga[1], gi[1][0] * ga[0] + gi[1][1] * ga[1], ga[2]];
                                for lb in 0..=la {
                                    let gb = grad[lb];
                                    let idx = la * nl + lb;
                                    kl[idx] += vol * (ha[0] * gb[0] + ha[1] * gb[1] + ha[2] * gb[2]);
                                    ml[idx] += vol * phi[la] * phi[lb];
                                }
                            }
                        }
                    }
                }
                for la in 0..nl {
                    let Some(da) = local(es, ev, eu, la) else { continue };
                    for lb in 0..=la {
                        let Some(db) = local(es, ev, eu, lb) else { continue };
                        kmat.add(da, db, kl[la * nl + lb]);
                        mmat.add(da, db, ml[la * nl + lb]);
                    }
                }
            }
        }
    }
    let mut coords = vec![[T::zero(); 3]; dofs];
    for gs in 0..s.map.len() {
        for gv in 0..v.map.len() {
            for gu in 0..u.map.len() {
                if let Some(d) = dof(gs, gv, gu) {
                    coords[d] = [s.coord(gs), v.coord(gv), u.coord(gu)];
                }
            }
        }
    }
    Ok(Assembly { stiffness: kmat, mass: mmat, coords })
}
