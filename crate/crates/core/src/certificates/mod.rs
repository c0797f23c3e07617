//! Instance-level replay of the obstruction arguments.
//!
//! Planar predicates live in [`planar`], face circles and the type signature
//! in [`faces`], and the three scenario checkers in [`scenarios`]. Every
//! planar verdict is tied to a recorded [`Chart`].

pub mod faces;
pub mod planar;
pub mod scenarios;

use num_complex::Complex64;
use serde::Serialize;

use crate::atiyah::{
    atiyah_matrix, classify_scenario, complete_triplet, independence_measure, relation_nullvector, RelationVector,
    ScenarioTag,
};
use crate::ball_model::{coplanarity_test, hull_membership, root_system, Configuration, Coplanarity};
use crate::error::{Error, Result};
use crate::riemann_sphere::{inverse_stereographic, stereographic, MobiusMap, ProjPoint, RootSystem};
use crate::tolerances::Tolerances;

pub use faces::{face_circle, incidence_audit, type_signature, FaceCircle, IncidenceAudit, TypeSignature};
pub use planar::{
    convex_hull, gauss_lucas_check, geometric_mean_witness, hulls_disjoint, line_stabs_all, smallest_enclosing_disk,
    three_disjoint_domains, CircularDomain, Disk, DomainWitness, Hull, Line, StabResult,
};
pub use scenarios::{scenario_a_checker, scenario_b_checker, scenario_c_checker};

/// Affine coordinates beyond this magnitude count as ∞ for planar predicates.
pub const FINITE_LIMIT: f64 = 1e6;

/// Candidate poles for the pre-twist, spread over the sphere.
const PRETWIST_CANDIDATES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Raw,
    PreTwisted,
    Normalized,
}

/// The affine chart in which planar predicates were evaluated: t ↦ map(t).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub map: MobiusMap,
    /// Point of the raw chart sent to ∞ by a pre-twist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole: Option<ProjPoint>,
}

impl Chart {
    pub fn raw() -> Self {
        Chart { kind: ChartKind::Raw, map: MobiusMap::identity(), pole: None }
    }

    pub fn normalized(normalizer: MobiusMap) -> Self {
        Chart { kind: ChartKind::Normalized, map: normalizer, pole: None }
    }

    /// Raw chart when all `points` are finite within [`FINITE_LIMIT`];
    /// otherwise t ↦ 1/(t − t₀) for the candidate t₀ farthest from every point.
    pub fn exploration(points: &[ProjPoint]) -> Self {
        let bounded = |p: &ProjPoint| p.to_affine().is_some_and(|t| t.norm() <= FINITE_LIMIT);
        if points.iter().all(bounded) {
            return Chart::raw();
        }
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let n = PRETWIST_CANDIDATES as f64;
        let candidate = |k: usize| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            let q = crate::ball_model::IdealPoint::from_xyz(rho * phi.cos(), rho * phi.sin(), z).expect("unit");
            stereographic(&q)
        };
        let clearance = |c: &ProjPoint| points.iter().map(|p| p.distance(c)).fold(f64::INFINITY, f64::min);
        let best = (0..PRETWIST_CANDIDATES)
            .map(candidate)
            .filter(|c| c.to_affine().is_some())
            .max_by(|a, b| clearance(a).total_cmp(&clearance(b)))
            .expect("candidates avoid the north pole");
        let t0 = best.to_affine().expect("filtered");
        Chart { kind: ChartKind::PreTwisted, map: MobiusMap::send_to_infinity(t0), pole: Some(best) }
    }

    pub fn image(&self, p: &ProjPoint) -> ProjPoint {
        self.map.apply(p)
    }

    /// Affine coordinate of the image, `None` at or beyond [`FINITE_LIMIT`].
    pub fn finite(&self, p: &ProjPoint) -> Option<Complex64> {
        self.image(p).to_affine().filter(|t| t.norm() <= FINITE_LIMIT)
    }

    /// Ideal point of the raw sphere that this chart places at ∞.
    pub fn infinity_preimage(&self) -> crate::ball_model::IdealPoint {
        inverse_stereographic(&self.map.inverse().apply(&ProjPoint::INFINITY))
    }
}

/// A check result or the reason it does not apply.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check<T> {
    Applicable(T),
    NotApplicable(String),
}

impl<T> Check<T> {
    pub fn applicable(&self) -> Option<&T> {
        match self {
            Check::Applicable(t) => Some(t),
            Check::NotApplicable(_) => None,
        }
    }

    fn from_result(r: Result<T>) -> Result<Self> {
        match r {
            Ok(t) => Ok(Check::Applicable(t)),
            Err(Error::Precondition(why)) => Ok(Check::NotApplicable(why)),
            Err(e) => Err(e),
        }
    }
}

/// One verdict with its numeric margin; positive margins are safe.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

impl CheckLine {
    fn new(name: &str, pass: bool, margin: f64) -> Self {
        CheckLine { name: name.to_string(), pass, margin: if margin.is_finite() { margin } else { f64::MAX } }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationSource {
    /// True when the relation was supplied and the root system replanted.
    pub planted: bool,
    pub relation: RelationVector,
    pub scenario: ScenarioTag,
    /// max_i |Σ_k c_k σ_k(triplet i)| over the root system in use.
    pub residual: f64,
}

/// Planar data of the configuration in its exploration chart.
#[derive(Debug, Clone, Serialize)]
pub struct ChartSummary {
    pub chart: Chart,
    pub disjoint_hull_pairs: Vec<[usize; 2]>,
    pub stab: StabResult,
    pub domains: Check<DomainWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub tolerances: Tolerances,
    pub coplanarity: Coplanarity,
    /// Index of the point in the hull of the other three (coplanar input only).
    pub hull_membership: Check<usize>,
    pub independence_measure: f64,
    pub independence_residual: f64,
    pub relation: RelationSource,
    pub incidence: Check<IncidenceAudit>,
    pub signature: Check<TypeSignature>,
    pub exploration: ChartSummary,
    pub scenario_a: Check<scenarios::ScenarioAReport>,
    pub scenario_b: Check<scenarios::ScenarioBReport>,
    pub scenario_c: Check<scenarios::ScenarioCReport>,
    pub checks: Vec<CheckLine>,
}

impl CertificateReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Replaces the third root of each triplet so that `c` annihilates it. Falls
/// back to replacing another root when the first choice is indeterminate.
pub fn planted_root_system(c: &RelationVector, rs: &RootSystem) -> Result<RootSystem> {
    let mut out = rs.triplets();
    for t in out.iter_mut() {
        let mut done = false;
        for replace in (0..3).rev() {
            let keep: Vec<ProjPoint> = (0..3).filter(|&k| k != replace).map(|k| t[k]).collect();
            if let Ok(w) = complete_triplet(c, &keep[0], &keep[1]) {
                t[replace] = w;
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::Indeterminate("relation vanishes identically on a triplet pair".into()));
        }
    }
    Ok(RootSystem::from_triplets(out))
}

fn relation_residual(c: &RelationVector, rs: &RootSystem) -> f64 {
    (0..4)
        .map(|i| {
            let [a, b, d] = rs.triplet(i);
            crate::atiyah::evaluate_relation(c, &a, &b, &d).norm()
        })
        .fold(0.0, f64::max)
}

fn exploration_summary(rs: &RootSystem, tol: &Tolerances) -> ChartSummary {
    let all: Vec<ProjPoint> = rs.triplets().iter().flatten().copied().collect();
    let chart = Chart::exploration(&all);
    let finite: Vec<(usize, [Complex64; 3])> = (0..4)
        .filter_map(|i| {
            let t = rs.triplet(i).map(|p| chart.finite(&p));
            t.iter().all(Option::is_some).then(|| (i, t.map(|z| z.expect("checked"))))
        })
        .collect();
    let hulls: Vec<Hull> = finite.iter().map(|(_, t)| convex_hull(t)).collect();
    let mut disjoint_hull_pairs = Vec::new();
    for a in 0..hulls.len() {
        for b in a + 1..hulls.len() {
            if hulls_disjoint(&hulls[a], &hulls[b], tol.geo) {
                disjoint_hull_pairs.push([finite[a].0, finite[b].0]);
            }
        }
    }
    let domains = match three_disjoint_domains(&finite, tol.geo) {
        Some(w) => Check::Applicable(w),
        None => Check::NotApplicable("no three pairwise disjoint domains found".into()),
    };
    ChartSummary { chart, disjoint_hull_pairs, stab: line_stabs_all(&hulls, tol.geo), domains }
}

/// Runs every applicable check on `config`.
///
/// Without `planted`, the relation is the null direction of the Atiyah matrix
/// and the scenario checkers run on the configuration's own root system, so
/// for a nonsingular matrix their identities are expected to fail. With
/// `planted`, the root system is replanted to satisfy that relation.
pub fn certify(config: &Configuration, planted: Option<&RelationVector>, tol: &Tolerances) -> Result<CertificateReport> {
    let rs = root_system(config)?;
    let m = atiyah_matrix(config)?;
    let measure = independence_measure(&m);
    let (null, residual) = relation_nullvector(&m);
    let coplanarity = coplanarity_test(config, tol)?;
    let hull = if coplanarity.is_coplanar {
        match hull_membership(config, tol)? {
            Some(i) => Check::Applicable(i),
            None => Check::NotApplicable("no point lies in the hull of the other three".into()),
        }
    } else {
        Check::NotApplicable("configuration is not coplanar".into())
    };

    let (c, used) = match planted {
        Some(c) => (*c, planted_root_system(c, &rs)?),
        None => (null, rs.clone()),
    };
    let scenario = classify_scenario(&c, tol)?;
    let relation = RelationSource {
        planted: planted.is_some(),
        relation: c,
        scenario: scenario.tag,
        residual: relation_residual(&c, &used),
    };

    let incidence = if coplanarity.is_coplanar {
        Check::NotApplicable("coplanar configuration: the four face circles coincide".into())
    } else {
        Check::Applicable(incidence_audit(config, tol)?)
    };
    let signature = Check::from_result(type_signature(config, tol))?;
    let exploration = exploration_summary(&rs, tol);

    let other = |tag: ScenarioTag| format!("relation is in scenario {:?}", tag);
    let scenario_a = match scenario.tag {
        ScenarioTag::ThreeDistinct => Check::Applicable(scenario_a_checker(&c, &used, tol)?),
        t => Check::NotApplicable(other(t)),
    };
    let scenario_b = match scenario.tag {
        ScenarioTag::DoubleRoot => Check::Applicable(scenario_b_checker(&c, &used, tol)?),
        t => Check::NotApplicable(other(t)),
    };
    let scenario_c = match scenario.tag {
        ScenarioTag::TripleRoot => {
            let p = scenario.cubic.roots[0].root;
            Check::Applicable(scenario_c_checker(config, &used, &p, tol)?)
        }
        t => Check::NotApplicable(other(t)),
    };

    let mut checks = vec![
        CheckLine::new("independence_measure", measure > tol.measure, measure - tol.measure),
        CheckLine::new("independence_residual", residual > tol.residual, residual - tol.residual),
    ];
    if coplanarity.is_coplanar {
        let inside = hull.applicable().is_some();
        checks.push(CheckLine::new("hull_membership", inside, if inside { 1.0 } else { -1.0 }));
    }
    if let Check::Applicable(a) = &incidence {
        checks.push(CheckLine::new("incidence_on_circle", a.max_on_residual <= tol.on_circle, tol.on_circle - a.max_on_residual));
        checks.push(CheckLine::new("incidence_audit", a.pass, a.min_off_residual - tol.on_circle));
    }
    if planted.is_some() {
        checks.push(CheckLine::new("planted_relation", relation.residual <= scenarios::RELATION_TOL, scenarios::RELATION_TOL - relation.residual));
        if let Check::Applicable(r) = &scenario_a {
            let worst = r.triplets.iter().filter_map(|t| t.product_residual).fold(0.0, f64::max);
            checks.push(CheckLine::new("scenario_a_identities", r.identities_ok, scenarios::PRODUCT_TOL - worst));
        }
        if let Check::Applicable(r) = &scenario_b {
            checks.push(CheckLine::new("scenario_b_implication", r.implication_ok, if r.implication_ok { 1.0 } else { -1.0 }));
        }
    }
    if let (Check::Applicable(r), false) = (&scenario_c, relation.planted) {
        checks.push(CheckLine::new("scenario_c_rays", r.consistent, if r.consistent { 1.0 } else { -1.0 }));
        let avoid = r.avoiding.len() as f64;
        checks.push(CheckLine::new("scenario_c_avoiding_triplet", r.contradiction_certified, avoid));
    }

    Ok(CertificateReport {
        tolerances: *tol,
        coplanarity,
        hull_membership: hull,
        independence_measure: measure,
        independence_residual: residual,
        relation,
        incidence,
        signature,
        exploration,
        scenario_a,
        scenario_b,
        scenario_c,
        checks,
    })
}
