//! Seeded sampling, batch verification and counterexample search.
//!
//! Every sample is a pure function of `(seed, index)`: its generator is
//! seeded with `seed ^ splitmix64(index)`. Batches and restarts run in
//! parallel and are collected in index order, so output does not depend on
//! the thread count.

use std::str::FromStr;
use std::time::Instant;

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atiyah::{atiyah_matrix, classify_scenario, independence_measure, relation_nullvector, ScenarioTag};
use crate::ball_model::{
    coplanarity_test, hull_membership, hyperbolic_distance, klein_to_poincare, random_in_ball, random_unit,
    BallPoint, Configuration,
};
use crate::certificates::{incidence_audit, type_signature};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Rejection budget per sample.
pub const SAMPLE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    NonCoplanar,
    CoplanarHull,
    Collinear,
    /// Uniform points subject only to separation.
    Any,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non-coplanar" => Ok(Case::NonCoplanar),
            "coplanar-hull" => Ok(Case::CoplanarHull),
            "collinear" => Ok(Case::Collinear),
            "any" => Ok(Case::Any),
            _ => Err(Error::InvalidInput(format!(
                "unknown case {s:?}; expected non-coplanar, coplanar-hull, collinear or any"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
    pub case: Case,
    /// Euclidean radius bound for every point.
    pub r_max: f64,
    /// Minimum pairwise hyperbolic distance.
    pub min_sep: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { seed: 0, count: 1000, case: Case::NonCoplanar, r_max: 0.9, min_sep: 0.05 }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max <= Tolerances::default().r_max) {
            return Err(Error::InvalidInput(format!("r_max must lie in (0, 0.999], got {}", self.r_max)));
        }
        if !(self.min_sep >= 0.0 && self.min_sep.is_finite()) {
            return Err(Error::InvalidInput(format!("min_sep must be finite and non-negative, got {}", self.min_sep)));
        }
        Ok(())
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sub_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(index))
}

fn separated(pts: &[BallPoint; 4], min_sep: f64) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| hyperbolic_distance(&pts[i], &pts[j]) >= min_sep))
}

fn inside(v: &Vector3<f64>, r_max: f64) -> bool {
    v.norm() <= r_max
}

/// Orthonormal pair spanning the plane orthogonal to `n`.
fn plane_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    (e1, n.cross(&e1))
}

/// Moves a point by the ball translation centered at `a` (sending 0 to `a`).
fn translate_from_origin(a: &BallPoint, v: Vector3<f64>) -> Result<BallPoint> {
    BallPoint::new(v)?.translated_by(&a.neg())
}

fn attempt<R: Rng>(rng: &mut R, spec: &SampleSpec, tol: &Tolerances) -> Result<Option<Configuration>> {
    let r = spec.r_max;
    let pts: [BallPoint; 4] = match spec.case {
        Case::NonCoplanar | Case::Any => {
            let mut pts = [BallPoint::ORIGIN; 4];
            for p in pts.iter_mut() {
                *p = BallPoint::new(random_in_ball(rng, r))?;
            }
            pts
        }
        Case::CoplanarHull => {
            // three points of the plane through 0 orthogonal to n, a fourth by
            // barycentric weights in their Klein triangle, then a translation
            let n = random_unit(rng);
            let (e1, e2) = plane_basis(&n);
            let a = BallPoint::new(random_in_ball(rng, 0.5 * r))?;
            let mut klein = [Vector2::zeros(); 4];
            for k in klein.iter_mut().take(3) {
                let p = loop {
                    let p = Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    if p.norm() < 1.0 {
                        break p * r;
                    }
                };
                *k = p * (2.0 / (1.0 + p.norm_squared()));
            }
            let w: [f64; 3] = {
                let e: [f64; 3] = [0; 3].map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln());
                let s: f64 = e.iter().sum();
                e.map(|x| x / s)
            };
            klein[3] = klein[0] * w[0] + klein[1] * w[1] + klein[2] * w[2];
            let mut pts = [BallPoint::ORIGIN; 4];
            for (p, k) in pts.iter_mut().zip(klein) {
                let q = klein_to_poincare(k);
                *p = translate_from_origin(&a, e1 * q.x + e2 * q.y)?;
            }
            pts
        }
        Case::Collinear => {
            let d = random_unit(rng);
            let a = BallPoint::new(random_in_ball(rng, 0.5 * r))?;
            let mut s: [f64; 4] = [0; 4].map(|_| rng.random_range(-r..r));
            s.sort_by(f64::total_cmp);
            let mut pts = [BallPoint::ORIGIN; 4];
            for (p, sk) in pts.iter_mut().zip(s) {
                *p = translate_from_origin(&a, d * sk)?;
            }
            pts
        }
    };
    if !pts.iter().all(|p| inside(p.coords(), r)) || !separated(&pts, spec.min_sep) {
        return Ok(None);
    }
    let config = Configuration::new(pts)?;
    let ok = match spec.case {
        Case::NonCoplanar => !coplanarity_test(&config, tol)?.is_coplanar,
        Case::CoplanarHull => {
            coplanarity_test(&config, tol)?.is_coplanar && hull_membership(&config, tol)? == Some(3)
        }
        Case::Collinear => crate::ball_model::root_system(&config)?.distinct_count(tol.proj) == 2,
        Case::Any => true,
    };
    Ok(ok.then_some(config))
}

/// The sample at `index`, by rejection within [`SAMPLE_BUDGET`] tries.
pub fn sample(spec: &SampleSpec, index: u64) -> Result<Configuration> {
    spec.validate()?;
    let tol = Tolerances::default();
    let mut rng = sub_rng(spec.seed, index);
    for _ in 0..SAMPLE_BUDGET {
        // numerical failures on a draw (points too close to translate) count as rejections
        if let Ok(Some(c)) = attempt(&mut rng, spec, &tol) {
            return Ok(c);
        }
    }
    Err(Error::SamplingExhausted { tries: SAMPLE_BUDGET, spec: format!("{spec:?}, index {index}") })
}

/// Certificate fields kept per batch record.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub coplanar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hull_membership: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incidence_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub index: u64,
    pub points: [[f64; 3]; 4],
    pub measure: f64,
    pub residual: f64,
    /// Scenario of the null direction of the matrix.
    pub scenario: ScenarioTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<CertificateSummary>,
}

/// Counts per decade of the measure; bin k covers [edges[k], edges[k+1]).
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn decades(values: impl Iterator<Item = f64>) -> Self {
        let mut edges = vec![0.0];
        edges.extend((1..=12).rev().map(|k| 10f64.powi(-k)));
        let mut counts = vec![0; edges.len()];
        for v in values {
            let k = edges.iter().rposition(|&e| v >= e).unwrap_or(0);
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleError {
    pub index: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub spec: SampleSpec,
    pub count: usize,
    pub min_measure: f64,
    pub argmin: u64,
    pub mean_measure: f64,
    pub histogram: Histogram,
    /// Indices with measure at or below the tolerance.
    pub failures: Vec<u64>,
    pub errors: Vec<SampleError>,
}

fn record(index: u64, config: &Configuration, tol: &Tolerances, certificates: bool) -> Result<SampleRecord> {
    let m = atiyah_matrix(config)?;
    let (c, residual) = relation_nullvector(&m);
    let certs = if certificates {
        let cop = coplanarity_test(config, tol)?;
        Some(if cop.is_coplanar {
            CertificateSummary {
                coplanar: true,
                hull_membership: hull_membership(config, tol)?,
                incidence_pass: None,
                signature: None,
            }
        } else {
            CertificateSummary {
                coplanar: false,
                hull_membership: None,
                incidence_pass: Some(incidence_audit(config, tol)?.pass),
                signature: type_signature(config, tol).ok().map(|s| s.provisional_name),
            }
        })
    } else {
        None
    };
    Ok(SampleRecord {
        index,
        points: config.coords(),
        measure: independence_measure(&m),
        residual,
        scenario: classify_scenario(&c, tol)?.tag,
        certificates: certs,
    })
}

/// Samples `spec.count` configurations and evaluates each in parallel.
pub fn batch_records(spec: &SampleSpec, tol: &Tolerances, certificates: bool) -> Result<Vec<Result<SampleRecord>>> {
    spec.validate()?;
    Ok((0..spec.count as u64)
        .into_par_iter()
        .map(|i| sample(spec, i).and_then(|c| record(i, &c, tol, certificates)))
        .collect())
}

pub fn summarize(spec: &SampleSpec, tol: &Tolerances, records: &[Result<SampleRecord>]) -> BatchSummary {
    let ok: Vec<&SampleRecord> = records.iter().filter_map(|r| r.as_ref().ok()).collect();
    let errors = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| SampleError { index: i as u64, error: e.to_string() }))
        .collect();
    let (mut min_measure, mut argmin) = (f64::MAX, 0);
    for r in &ok {
        if r.measure < min_measure {
            min_measure = r.measure;
            argmin = r.index;
        }
    }
    let mean_measure = if ok.is_empty() { 0.0 } else { ok.iter().map(|r| r.measure).sum::<f64>() / ok.len() as f64 };
    BatchSummary {
        spec: *spec,
        count: ok.len(),
        min_measure: if ok.is_empty() { 0.0 } else { min_measure },
        argmin,
        mean_measure,
        histogram: Histogram::decades(ok.iter().map(|r| r.measure)),
        failures: ok.iter().filter(|r| r.measure <= tol.measure).map(|r| r.index).collect(),
        errors,
    }
}

pub fn batch_verify(spec: &SampleSpec, tol: &Tolerances, certificates: bool) -> Result<BatchSummary> {
    let records = batch_records(spec, tol, certificates)?;
    Ok(summarize(spec, tol, &records))
}

/// Bounds of the counterexample search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Radius of the ball the parameters are mapped into.
    pub r_max: f64,
    pub min_sep: f64,
    /// Edge length of the initial simplex in parameter space.
    pub initial_step: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { r_max: 0.9, min_sep: 0.05, initial_step: 0.25 }
    }
}

/// Nelder–Mead coefficients: reflection, expansion, contraction, shrink.
pub const NM_COEFFS: [f64; 4] = [1.0, 2.0, 0.5, 0.5];

/// Objective floor for infeasible points; every feasible value is at most 1.
const INFEASIBLE: f64 = 2.0;

#[derive(Debug, Clone, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    /// Best simplex vertex objective after each iteration.
    pub best: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best: Configuration,
    pub best_measure: f64,
    pub best_restart: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub trace: Vec<RestartTrace>,
    pub wall_clock_seconds: f64,
}

/// y ↦ r_max · y·tanh(|y|)/|y| per point, continuous at 0.
pub fn params_to_points(y: &[f64; 12], r_max: f64) -> [Vector3<f64>; 4] {
    [0, 1, 2, 3].map(|k| {
        let v = Vector3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2]);
        let n = v.norm();
        let s = if n < 1e-8 { 1.0 - n * n / 3.0 } else { n.tanh() / n };
        v * (s * r_max)
    })
}

fn feasible(y: &[f64; 12], opts: &SearchOptions) -> Option<Configuration> {
    let pts = params_to_points(y, opts.r_max);
    let mut bp = [BallPoint::ORIGIN; 4];
    for (b, p) in bp.iter_mut().zip(pts) {
        *b = BallPoint::new(p).ok()?;
    }
    if !separated(&bp, opts.min_sep) {
        return None;
    }
    Configuration::new(bp).ok()
}

fn objective(y: &[f64; 12], opts: &SearchOptions) -> f64 {
    if let Some(c) = feasible(y, opts) {
        if let Ok(m) = atiyah_matrix(&c) {
            return independence_measure(&m);
        }
    }
    // barrier grows with the separation deficit
    let pts = params_to_points(y, opts.r_max);
    let mut deficit: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = match (BallPoint::new(pts[i]), BallPoint::new(pts[j])) {
                (Ok(a), Ok(b)) => hyperbolic_distance(&a, &b),
                _ => 0.0,
            };
            deficit = deficit.max(opts.min_sep - d);
        }
    }
    INFEASIBLE + deficit.max(0.0) / opts.min_sep.max(f64::MIN_POSITIVE)
}

fn initial_vertex(rng: &mut ChaCha8Rng, opts: &SearchOptions) -> Result<[f64; 12]> {
    for _ in 0..SAMPLE_BUDGET {
        let y: [f64; 12] = [0.0; 12].map(|_| rng.sample::<f64, _>(StandardNormal) * 0.7);
        if feasible(&y, opts).is_some() {
            return Ok(y);
        }
    }
    Err(Error::SamplingExhausted { tries: SAMPLE_BUDGET, spec: format!("{opts:?}") })
}

struct Restart {
    best_y: [f64; 12],
    best_f: f64,
    trace: Vec<f64>,
    evaluations: usize,
}

fn nelder_mead(start: [f64; 12], iterations: usize, opts: &SearchOptions) -> Restart {
    let [alpha, gamma, rho, sigma] = NM_COEFFS;
    let mut evaluations = 0;
    let mut eval = |y: &[f64; 12]| {
        evaluations += 1;
        objective(y, opts)
    };
    let mut simplex: Vec<([f64; 12], f64)> = Vec::with_capacity(13);
    simplex.push((start, eval(&start)));
    for k in 0..12 {
        let mut y = start;
        y[k] += opts.initial_step;
        let f = eval(&y);
        simplex.push((y, f));
    }
    let combine = |a: &[f64; 12], b: &[f64; 12], t: f64| {
        let mut out = [0.0; 12];
        for k in 0..12 {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        // stable sort keeps the earlier vertex first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let n = simplex.len() - 1;
        let mut centroid = [0.0; 12];
        for (y, _) in &simplex[..n] {
            for k in 0..12 {
                centroid[k] += y[k] / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n];
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;
        let reflected = combine(&centroid, &worst, -alpha);
        let f_r = eval(&reflected);
        if f_r < f_best {
            let expanded = combine(&centroid, &worst, -gamma);
            let f_e = eval(&expanded);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < f_second {
            simplex[n] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < f_worst {
                let y = combine(&centroid, &reflected, rho);
                let f = eval(&y);
                (y, f)
            } else {
                let y = combine(&centroid, &worst, rho);
                let f = eval(&y);
                (y, f)
            };
            if f_c < f_worst.min(f_r) {
                simplex[n] = (contracted, f_c);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let y = combine(&best, &v.0, sigma);
                    *v = (y, eval(&y));
                }
            }
        }
        let best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        trace.push(best);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Restart { best_y: simplex[0].0, best_f: simplex[0].1, trace, evaluations }
}

pub fn minimize(seed: u64, restarts: usize, iterations: usize) -> Result<SearchResult> {
    minimize_with(seed, restarts, iterations, &SearchOptions::default())
}

/// Nelder–Mead on the independence measure over 12 unconstrained parameters,
/// from `restarts` seeded starts. Ties between restarts go to the lower index.
pub fn minimize_with(seed: u64, restarts: usize, iterations: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if restarts == 0 || iterations == 0 {
        return Err(Error::InvalidInput("restarts and iterations must be positive".into()));
    }
    if !(opts.r_max > 0.0 && opts.r_max <= Tolerances::default().r_max) || !(opts.min_sep > 0.0) {
        return Err(Error::InvalidInput(format!("invalid search options {opts:?}")));
    }
    let clock = Instant::now();
    let runs: Vec<Restart> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sub_rng(seed, r as u64);
            initial_vertex(&mut rng, opts).map(|y| nelder_mead(y, iterations, opts))
        })
        .collect::<Result<_>>()?;
    let mut best_restart = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.best_f < runs[best_restart].best_f {
            best_restart = k;
        }
    }
    let winner = &runs[best_restart];
    let best = feasible(&winner.best_y, opts)
        .ok_or_else(|| Error::InternalConsistency("best simplex vertex is infeasible".into()))?;
    let best_measure = independence_measure(&atiyah_matrix(&best)?);
    if best_measure != winner.best_f {
        return Err(Error::InternalConsistency("recomputed best measure differs from the search value".into()));
    }
    Ok(SearchResult {
        best,
        best_measure,
        best_restart,
        restarts,
        iterations,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        trace: runs.into_iter().enumerate().map(|(restart, r)| RestartTrace { restart, best: r.trace }).collect(),
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    })
}
