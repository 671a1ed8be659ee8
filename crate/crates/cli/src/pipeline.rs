//! Executes the enabled stages of a [`RunConfig`] and collects a [`RunReport`].

use std::collections::BTreeMap;
use std::time::Instant;

use qlayer_core::asymptotics::{
    classify_degrees, geometric_grid, growth_classification, h2_integrability, t_dominance, DegreeProfile,
    GrowthOptions, GrowthVerdict, H2Verdict, SectorQuadrature, TailOptions,
};
use qlayer_core::certifier::{certify, verify, SearchBudget, Verification};
use qlayer_core::geometry::{
    build, chart_coefficients, gauss_curvature, is_developable, mean_curvature_from_forms, tol, Developability,
    LayerModel,
};
use qlayer_core::spectrum::{threshold_scan, MeshSpec, SBoundary, SolverOptions, ThresholdScan};
use qlayer_core::topology::{default_radius_grid, topology_report};
use qlayer_core::{Certificate, Error, Layer, TopologyReport};
use serde::Serialize;

use crate::config::{RunConfig, Stage};

pub const SCHEMA_ID: &str = "qlayer.run-report/1";

/// Result slot of one stage.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome<R> {
    Ok { result: R },
    Error { code: String, message: String },
    Skipped { reason: String },
}

impl<R> Outcome<R> {
    fn from_result(r: qlayer_core::Result<R>) -> Self {
        match r {
            Ok(result) => Outcome::Ok { result },
            Err(e) => Outcome::Error { code: e.code().into(), message: e.to_string() },
        }
    }

    pub fn ok(&self) -> Option<&R> {
        match self {
            Outcome::Ok { result } => Some(result),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Outcome::Error { .. })
    }
}

/// One chart sample of the curvature profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub s: f64,
    pub v: f64,
    pub gauss: f64,
    /// `P / Q^{3/2}` from the ruling coefficients.
    pub mean_coefficients: f64,
    /// Trace of the shape operator.
    pub mean_forms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryResult {
    pub surface: String,
    pub euler_characteristic: i32,
    pub ends: usize,
    pub core_radius: f64,
    pub gauge_defect: f64,
    pub developability: Developability<f64>,
    /// Largest sampled `K`; nonpositive on a ruled chart up to round-off.
    pub max_gauss_curvature: f64,
    /// Largest relative gap between the two mean-curvature evaluations.
    pub mean_curvature_defect: f64,
    pub sup_second_form: f64,
    pub thickness: f64,
    pub c0: f64,
    pub threshold: f64,
    #[serde(skip)]
    pub samples: Vec<CurvatureSample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsResult {
    pub degrees: DegreeProfile<f64>,
    pub t_dominance: f64,
    pub growth: GrowthVerdict<f64>,
    pub h2: H2Verdict<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyResult {
    pub certificate: Certificate,
    pub verification: Verification<f64>,
}

/// Eigensolver against certificate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrossCheck {
    pub lambda1: f64,
    pub rayleigh: f64,
    /// Certificate error bound plus the truncation extrapolation error.
    pub slack: f64,
    pub below_rayleigh: bool,
    pub gap: f64,
    pub extrapolation_error: f64,
    /// Gap above five extrapolation errors.
    pub resolved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    pub scan: ThresholdScan<f64>,
    pub finest: qlayer_core::SpectralReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub generator: String,
    /// Canonical config text; parses back to the run's config.
    pub config: String,
    pub stages: Vec<Stage>,
    pub closure_added: Vec<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Outcome<GeometryResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<Outcome<AsymptoticsResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<Outcome<TopologyReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<Outcome<CertifyResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Outcome<SpectrumResult>>,
    /// Wall-clock seconds per stage; emitted separately so the report stays reproducible.
    #[serde(skip)]
    pub timings: BTreeMap<Stage, f64>,
}

impl RunReport {
    pub fn failed_stages(&self) -> Vec<Stage> {
        let mut out = Vec::new();
        let flags = [
            (Stage::Geometry, self.geometry.as_ref().is_some_and(Outcome::is_error)),
            (Stage::Asymptotics, self.asymptotics.as_ref().is_some_and(Outcome::is_error)),
            (Stage::Topology, self.topology.as_ref().is_some_and(Outcome::is_error)),
            (Stage::Certify, self.certify.as_ref().is_some_and(Outcome::is_error)),
            (Stage::Spectrum, self.spectrum.as_ref().is_some_and(Outcome::is_error)),
        ];
        for (stage, failed) in flags {
            if failed {
                out.push(stage);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn timed<R>(timings: &mut BTreeMap<Stage, f64>, stage: Stage, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let r = f();
    timings.insert(stage, start.elapsed().as_secs_f64());
    r
}

fn geometry_stage(cfg: &RunConfig) -> qlayer_core::Result<(Layer, GeometryResult)> {
    let surface = build::<f64>(&cfg.surface, cfg.orientation)?;
    let layer = LayerModel::new(surface, cfg.a, cfg.c0)?;
    let m = &layer.surface;
    let chart = &m.chart;
    let vs = m.default_v_samples(33);
    let mut samples = Vec::new();
    let (mut max_k, mut defect) = (f64::NEG_INFINITY, 0.0f64);
    for s in chart.s_domain.samples(32) {
        let c = chart_coefficients(chart, s);
        for &v in &vs {
            let gauss = gauss_curvature(chart, s, v);
            let mean_coefficients = c.mean_curvature(v);
            let mean_forms = mean_curvature_from_forms(chart, s, v);
            let scale = mean_coefficients.abs().max(mean_forms.abs());
            if scale > 1e-12 {
                defect = defect.max((mean_coefficients - mean_forms).abs() / scale);
            }
            max_k = max_k.max(gauss);
            samples.push(CurvatureSample { s, v, gauss, mean_coefficients, mean_forms });
        }
    }
    let developability = is_developable(chart, 32, &vs, tol::K_REL);
    let result = GeometryResult {
        surface: cfg.surface.name().into(),
        euler_characteristic: m.euler_characteristic,
        ends: m.ends(),
        core_radius: m.core_radius,
        gauge_defect: chart.max_gauge_defect(101),
        developability,
        max_gauss_curvature: max_k,
        mean_curvature_defect: defect,
        sup_second_form: layer.sup_second_form,
        thickness: layer.thickness,
        c0: layer.c0,
        threshold: layer.threshold(),
        samples,
    };
    Ok((layer, result))
}

fn asymptotics_stage(cfg: &RunConfig, layer: &Layer) -> qlayer_core::Result<AsymptoticsResult> {
    let tol = &cfg.tolerances;
    let chart = &layer.surface.chart;
    let coeffs = qlayer_core::Profile::from_chart(chart, 64);
    let window = chart.s_domain.bounds();
    let degrees = classify_degrees(&coeffs, window, tol.tau_deg, 0.0)?;
    let t = t_dominance(&coeffs, window).max(1.0);
    let quad = SectorQuadrature { rel_tol: tol.sector_rel_tol, ..SectorQuadrature::default() };
    let growth_opts = GrowthOptions {
        fit_tol: tol.growth_fit_tol,
        band: tol.growth_band,
        sublinear_max: tol.sublinear_max,
        ..GrowthOptions::default()
    };
    let growth = growth_classification(&coeffs, &degrees, t, growth_opts, quad)?;
    let tail_opts = TailOptions {
        decay_ratio: tol.tail_decay_ratio,
        divergence_ratio: tol.tail_divergence_ratio,
        tau_tail: tol.tau_tail,
        ..TailOptions::default()
    };
    let h2 = h2_integrability(&coeffs, &degrees, &geometric_grid(t.max(4.0), 12), tail_opts, quad)?;
    Ok(AsymptoticsResult { degrees, t_dominance: t, growth, h2 })
}

fn certify_stage(cfg: &RunConfig, layer: &Layer) -> qlayer_core::Result<CertifyResult> {
    let budget = SearchBudget {
        max_evaluations: cfg.certify.max_evaluations,
        max_doublings: cfg.certify.max_doublings,
        ..SearchBudget::default()
    };
    let certificate = certify(layer, &budget)?;
    let verification = verify(layer, &certificate)?;
    Ok(CertifyResult { certificate, verification })
}

/// Truncation ladder: rung `i` scales the truncation and the ruling element count by `2^i`.
pub fn mesh_ladder(cfg: &RunConfig, layer: &Layer) -> Vec<MeshSpec<f64>> {
    let sp = &cfg.spectrum;
    let chart = &layer.surface.chart;
    (0..sp.rungs)
        .map(|i| {
            let f = 1usize << i;
            let v = sp.v_max * f as f64;
            if layer.surface.profile.is_some() {
                MeshSpec::axisymmetric(sp.n_v * f, sp.n_u, sp.order, v, sp.grading)
            } else {
                let (lo, hi) = chart.v_range;
                let (s_range, boundary) = if chart.s_domain.is_periodic() {
                    (None, SBoundary::Periodic)
                } else {
                    (Some(chart.s_domain.bounds()), SBoundary::Dirichlet)
                };
                MeshSpec::chart_box(sp.n_s, sp.n_v * f, sp.n_u, sp.order, s_range, (lo.max(-v), hi.min(v)), boundary)
            }
        })
        .collect()
}

fn spectrum_stage(cfg: &RunConfig, layer: &Layer, cert: Option<&Certificate>) -> qlayer_core::Result<SpectrumResult> {
    let seed = cfg.seed.ok_or_else(|| Error::InvalidInput("spectrum stage needs a seed".into()))?;
    let opts = SolverOptions { k: cfg.spectrum.eigenvalues, tol: cfg.tolerances.solver_tol, seed };
    let mut scan = threshold_scan(layer, &mesh_ladder(cfg, layer), &opts)?;
    let finest = scan.last.take().expect("scan keeps its finest report");
    let cross_check = cert.map(|c| {
        let lambda1 = scan.rows[scan.rows.len() - 1].lambda1;
        let slack = c.error_bound + scan.extrapolation_error;
        CrossCheck {
            lambda1,
            rayleigh: c.rayleigh,
            slack,
            // compared as excesses over the threshold, where the certificate keeps full precision
            below_rayleigh: scan.extrapolated - scan.threshold <= c.rayleigh_excess + slack,
            gap: scan.gap,
            extrapolation_error: scan.extrapolation_error,
            resolved: scan.resolved_below(5.0),
        }
    });
    Ok(SpectrumResult { scan, finest, cross_check })
}

/// Runs every enabled stage in dependency order; failures stay inside their stage.
pub fn run(cfg: &RunConfig) -> RunReport {
    let mut timings = BTreeMap::new();
    let mut report = RunReport {
        schema: SCHEMA_ID,
        generator: format!("qlayer {}", env!("CARGO_PKG_VERSION")),
        config: cfg.to_toml(),
        stages: cfg.stages.clone(),
        closure_added: cfg.closure_added(),
        geometry: None,
        asymptotics: None,
        topology: None,
        certify: None,
        spectrum: None,
        timings: BTreeMap::new(),
    };
    let geometry = timed(&mut timings, Stage::Geometry, || geometry_stage(cfg));
    let layer = match geometry {
        Ok((layer, result)) => {
            report.geometry = Some(Outcome::Ok { result });
            Some(layer)
        }
        Err(e) => {
            report.geometry = Some(Outcome::from_result(Err(e)));
            None
        }
    };
    let Some(layer) = layer else {
        fn skipped<R>() -> Option<Outcome<R>> {
            Some(Outcome::Skipped { reason: "geometry stage failed".into() })
        }
        if cfg.enabled(Stage::Asymptotics) {
            report.asymptotics = skipped();
        }
        if cfg.enabled(Stage::Topology) {
            report.topology = skipped();
        }
        if cfg.enabled(Stage::Certify) {
            report.certify = skipped();
        }
        if cfg.enabled(Stage::Spectrum) {
            report.spectrum = skipped();
        }
        report.timings = timings;
        return report;
    };
    if cfg.enabled(Stage::Asymptotics) {
        let r = timed(&mut timings, Stage::Asymptotics, || asymptotics_stage(cfg, &layer));
        report.asymptotics = Some(Outcome::from_result(r));
    }
    if cfg.enabled(Stage::Topology) {
        let r = timed(&mut timings, Stage::Topology, || {
            let m = &layer.surface;
            topology_report(m, &default_radius_grid(m, cfg.topology.radii))
        });
        report.topology = Some(Outcome::from_result(r));
    }
    if cfg.enabled(Stage::Certify) {
        let r = timed(&mut timings, Stage::Certify, || certify_stage(cfg, &layer));
        report.certify = Some(Outcome::from_result(r));
    }
    if cfg.enabled(Stage::Spectrum) {
        let cert = report.certify.as_ref().and_then(Outcome::ok).map(|c| &c.certificate);
        let r = timed(&mut timings, Stage::Spectrum, || spectrum_stage(cfg, &layer, cert));
        report.spectrum = Some(Outcome::from_result(r));
    }
    report.timings = timings;
    report
}
