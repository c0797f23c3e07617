//! Per-instance replay of the three scenario arguments.
//!
//! Scenarios a and b work in the chart of the scenario normalizer, where the
//! relation is s₂/3 = 1 or s₁/3 = 1. Triplets with a root at ∞ or beyond
//! [`FINITE_LIMIT`] in that chart are recorded as not applicable for the
//! planar checks, since twisting would break the normal form.

use num_complex::Complex64;
use serde::Serialize;

use super::planar::{
    convex_hull, gauss_lucas_check, hull_separation, line_stabs_all, segment_meets_real_axis, three_disjoint_domains,
    DomainWitness, Hull, Line, StabResult,
};
use super::{Chart, FINITE_LIMIT};
use crate::atiyah::{classify_scenario, evaluate_relation, RelationVector, Scenario, ScenarioTag};
use crate::ball_model::{Configuration, IdealPoint};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::riemann_sphere::{inverse_stereographic, ProjPoint, RootSystem};
use crate::tolerances::Tolerances;

/// Residual bound for the normalized relation on each triplet.
pub const RELATION_TOL: f64 = 1e-8;

/// Bound on |r₁r₂ − 1|.
pub const PRODUCT_TOL: f64 = 1e-10;

fn skip_none<T>(v: &Option<T>) -> bool {
    v.is_none()
}

/// Planar slack scaled to the size of the points involved.
fn scaled_tau(tau: f64, pts: &[Complex64]) -> f64 {
    tau * (1.0 + pts.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn require(tag: ScenarioTag, c: &RelationVector, tol: &Tolerances) -> Result<Scenario> {
    let sc = classify_scenario(c, tol)?;
    if sc.tag != tag {
        return Err(Error::Precondition(format!("relation is in scenario {:?}, not {tag:?}", sc.tag)));
    }
    Ok(sc)
}

/// Triplets of `rs` in the normalized chart, `None` where a root is not finite.
fn normalized_triplets(rs: &RootSystem, chart: &Chart) -> Vec<(usize, [ProjPoint; 3], Option<[Complex64; 3]>)> {
    (0..4)
        .map(|i| {
            let w = rs.triplet(i).map(|p| chart.image(&p));
            let finite = w.map(|p| p.to_affine().filter(|t| t.norm() <= FINITE_LIMIT));
            let affine = if finite.iter().all(Option::is_some) { Some(finite.map(|t| t.expect("checked"))) } else { None };
            (i, w, affine)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TripletA {
    pub index: usize,
    /// |G(w₁, w₂, w₃)| for the unit normal form and max-normalized roots.
    pub relation_residual: f64,
    pub relation_ok: bool,
    pub planar_applicable: bool,
    #[serde(skip_serializing_if = "skip_none", with = "opt_pair")]
    pub r: Option<[Complex64; 2]>,
    #[serde(skip_serializing_if = "skip_none")]
    pub product_residual: Option<f64>,
    #[serde(skip_serializing_if = "skip_none")]
    pub hull_margin: Option<f64>,
    #[serde(skip_serializing_if = "skip_none")]
    pub meets_real_axis: Option<bool>,
    pub ok: bool,
}

mod opt_pair {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<[Complex64; 2]>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|p| p.map(|z| [z.re, z.im])).serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioAReport {
    pub scenario: Scenario,
    /// Angle between the pushed-forward relation and the normal form.
    pub normal_form_angle: f64,
    pub chart: Chart,
    pub triplets: Vec<TripletA>,
    pub identities_ok: bool,
    /// Whether the real axis meets every applicable hull.
    pub real_axis_meets_all: bool,
    pub stab: StabResult,
    /// No common transversal exists within the sweep resolution.
    pub obstruction_holds: bool,
    #[serde(skip_serializing_if = "skip_none")]
    pub domains: Option<DomainWitness>,
    /// Per witness domain: contains 1 or −1.
    #[serde(skip_serializing_if = "skip_none")]
    pub domains_contain_unit: Option<[bool; 3]>,
}

/// Scenario a: three distinct roots, normal form s₂/3 = 1.
pub fn scenario_a_checker(c: &RelationVector, rs: &RootSystem, tol: &Tolerances) -> Result<ScenarioAReport> {
    let scenario = require(ScenarioTag::ThreeDistinct, c, tol)?;
    let normal = ScenarioTag::ThreeDistinct.standard_relation();
    let normal_form_angle = c.transformed(&scenario.normalizer).angle(&normal);
    let chart = Chart::normalized(scenario.normalizer);
    let mut triplets = Vec::with_capacity(4);
    let mut hulls: Vec<Hull> = Vec::new();
    let mut finite: Vec<(usize, [Complex64; 3])> = Vec::new();
    let mut all_pts: Vec<Complex64> = Vec::new();
    for (index, w, affine) in normalized_triplets(rs, &chart) {
        let relation_residual = evaluate_relation(&normal, &w[0], &w[1], &w[2]).norm();
        let relation_ok = relation_residual <= RELATION_TOL;
        let mut t = TripletA {
            index,
            relation_residual,
            relation_ok,
            planar_applicable: affine.is_some(),
            r: None,
            product_residual: None,
            hull_margin: None,
            meets_real_axis: None,
            ok: relation_ok,
        };
        if let Some(pts) = affine {
            let tau = scaled_tau(tol.geo, &pts);
            let gl = gauss_lucas_check(&pts, tau)?;
            let r = [gl.derivative_roots[0], gl.derivative_roots[1]];
            let product_residual = (r[0] * r[1] - 1.0).norm();
            let meets = segment_meets_real_axis(r[0], r[1], tau);
            t.ok &= product_residual <= PRODUCT_TOL && gl.ok && meets;
            t.r = Some(r);
            t.product_residual = Some(product_residual);
            t.hull_margin = Some(gl.margin);
            t.meets_real_axis = Some(meets);
            hulls.push(convex_hull(&pts));
            finite.push((index, pts));
            all_pts.extend(pts);
        }
        triplets.push(t);
    }
    let tau = scaled_tau(tol.geo, &all_pts);
    let real_axis_meets_all = hulls.iter().all(|h| Line::REAL_AXIS.meets(h, tau));
    let stab = line_stabs_all(&hulls, tau);
    let obstruction_holds = stab.witness().is_none() && !real_axis_meets_all;
    let domains = three_disjoint_domains(&finite, tau);
    let domains_contain_unit = domains.as_ref().map(|w| {
        w.domains.map(|d| d.contains_affine(Complex64::new(1.0, 0.0), tau) || d.contains_affine(Complex64::new(-1.0, 0.0), tau))
    });
    Ok(ScenarioAReport {
        identities_ok: triplets.iter().all(|t| t.ok),
        scenario,
        normal_form_angle,
        chart,
        triplets,
        real_axis_meets_all,
        stab,
        obstruction_holds,
        domains,
        domains_contain_unit,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TripletB {
    pub index: usize,
    pub relation_residual: f64,
    pub relation_ok: bool,
    pub planar_applicable: bool,
    #[serde(skip_serializing_if = "skip_none", with = "opt_complex")]
    pub mean: Option<Complex64>,
    #[serde(skip_serializing_if = "skip_none")]
    pub contains_one: Option<bool>,
}

mod opt_complex {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|z| [z.re, z.im]).serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointPair {
    pub pair: [usize; 2],
    pub separation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioBReport {
    pub scenario: Scenario,
    pub normal_form_angle: f64,
    pub chart: Chart,
    pub triplets: Vec<TripletB>,
    /// Every triplet satisfying the relation has 1 in its hull.
    pub implication_ok: bool,
    pub disjoint_pairs: Vec<DisjointPair>,
    /// Two disjoint hulls exist, so the relation cannot hold on all triplets.
    pub contradiction_found: bool,
}

/// Scenario b: a double root, normal form s₁/3 = 1.
pub fn scenario_b_checker(c: &RelationVector, rs: &RootSystem, tol: &Tolerances) -> Result<ScenarioBReport> {
    let scenario = require(ScenarioTag::DoubleRoot, c, tol)?;
    let normal = ScenarioTag::DoubleRoot.standard_relation();
    let normal_form_angle = c.transformed(&scenario.normalizer).angle(&normal);
    let chart = Chart::normalized(scenario.normalizer);
    let mut triplets = Vec::with_capacity(4);
    let mut hulls: Vec<(usize, Hull, f64)> = Vec::new();
    let one = Complex64::new(1.0, 0.0);
    for (index, w, affine) in normalized_triplets(rs, &chart) {
        let relation_residual = evaluate_relation(&normal, &w[0], &w[1], &w[2]).norm();
        let mut t = TripletB {
            index,
            relation_residual,
            relation_ok: relation_residual <= RELATION_TOL,
            planar_applicable: affine.is_some(),
            mean: None,
            contains_one: None,
        };
        if let Some(pts) = affine {
            let tau = scaled_tau(tol.geo, &pts);
            let hull = convex_hull(&pts);
            t.mean = Some(pts.iter().sum::<Complex64>() / 3.0);
            t.contains_one = Some(hull.contains(one, tau));
            hulls.push((index, hull, tau));
        }
        triplets.push(t);
    }
    let mut disjoint_pairs = Vec::new();
    for a in 0..hulls.len() {
        for b in a + 1..hulls.len() {
            let (gap, _) = hull_separation(&hulls[a].1, &hulls[b].1);
            if gap > hulls[a].2.max(hulls[b].2) {
                disjoint_pairs.push(DisjointPair { pair: [hulls[a].0, hulls[b].0], separation: gap });
            }
        }
    }
    let implication_ok = triplets.iter().all(|t| !t.relation_ok || t.contains_one.unwrap_or(true));
    Ok(ScenarioBReport {
        scenario,
        normal_form_angle,
        chart,
        contradiction_found: !disjoint_pairs.is_empty(),
        triplets,
        implication_ok,
        disjoint_pairs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RayCheck {
    pub i: usize,
    pub j: usize,
    /// Projective distance from t_ij to p.
    pub root_distance: f64,
    /// Distance from the direction of x_j to that of p, seen from x_i.
    pub ray_gap: f64,
    pub incident: bool,
    pub on_ray: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioCReport {
    pub p: ProjPoint,
    /// Pairs (i, j) with t_ij = p.
    pub incidences: Vec<[usize; 2]>,
    pub ray_checks: Vec<RayCheck>,
    /// Vertices met by the ray, ordered from its start.
    pub chain: Vec<usize>,
    /// Triplets with no root at p.
    pub avoiding: Vec<usize>,
    /// Some triplet avoids p, so t₁t₂t₃ = 0 fails after sending p to 0.
    pub contradiction_certified: bool,
    pub consistent: bool,
}

/// Scenario c: the triple root p of the relation cubic must be a root of
/// every triplet, which the ray geometry forbids.
pub fn scenario_c_checker(
    config: &Configuration,
    rs: &RootSystem,
    p: &ProjPoint,
    tol: &Tolerances,
) -> Result<ScenarioCReport> {
    let q: IdealPoint = inverse_stereographic(p);
    let ambiguous = tol.proj.sqrt();
    let mut incidences = Vec::new();
    let mut ray_checks = Vec::with_capacity(12);
    for i in 0..4 {
        let from = &config.points[i];
        let q_local = q.translated_by(from)?;
        for j in (0..4).filter(|&j| j != i) {
            let root_distance = rs.get(i, j).distance(p);
            let y = config.points[j].translated_by(from)?;
            let dir = y.coords() / y.norm();
            let ray_gap = (dir - q_local.coords()).norm();
            let incident = root_distance <= tol.proj;
            let on_ray = ray_gap <= ambiguous;
            let consistent = incident == on_ray || (root_distance > tol.proj && root_distance < ambiguous);
            if incident {
                incidences.push([i, j]);
            }
            ray_checks.push(RayCheck { i, j, root_distance, ray_gap, incident, on_ray, consistent });
        }
    }
    let out_degree = |v: usize| incidences.iter().filter(|e| e[0] == v).count();
    let mut chain: Vec<usize> = (0..4).filter(|&v| incidences.iter().any(|e| e.contains(&v))).collect();
    chain.sort_by(|&a, &b| out_degree(b).cmp(&out_degree(a)).then(a.cmp(&b)));
    let avoiding: Vec<usize> = (0..4).filter(|&i| out_degree(i) == 0).collect();
    Ok(ScenarioCReport {
        p: *p,
        contradiction_certified: !avoiding.is_empty(),
        consistent: ray_checks.iter().all(|r| r.consistent),
        incidences,
        ray_checks,
        chain,
        avoiding,
    })
}

/// Triple root of a scenario-c relation.
pub fn triple_root(c: &RelationVector, tol: &Tolerances) -> Result<ProjPoint> {
    let sc = require(ScenarioTag::TripleRoot, c, tol)?;
    Ok(sc.cubic.roots[0].root)
}

/// Roots of P′ for P = ∏(t − t_k), for a finite triplet.
pub fn derivative_roots(t: &[Complex64; 3]) -> Vec<Complex64> {
    Poly::from_roots(t).derivative().roots()
}
