//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every derived quantity is checked against an oracle written here, not
//! against the library's own second implementation alone. The process exits
//! nonzero on failure only when `ACCEPTANCE_STRICT=1`; see the README.

use std::time::{Duration, Instant};

use atiyah4::atiyah::{
    atiyah_matrix, classify_scenario, complete_triplet, independence_measure, polarize, relation_nullvector,
    trilinear_eval, AtiyahMatrix, RelationVector, ScenarioTag,
};
use atiyah4::ball_model::{
    coplanarity_test, endpoint_oracle, hyperbolic_distance, ideal_endpoint, root_system, BallIsometry, BallPoint,
    Configuration, IdealPoint,
};
use atiyah4::certificates::{gauss_lucas_check, geometric_mean_witness, incidence_audit, scenario_a_checker, CircularDomain};
use atiyah4::explorer::{batch_verify, minimize, Case, SampleSpec, SearchOptions};
use atiyah4::riemann_sphere::{boundary_action, MobiusMap, ProjPoint, RootSystem};
use atiyah4::Tolerances;
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ENDPOINT_TOL: f64 = 1e-9;
const ENDPOINT_BUDGET: Duration = Duration::from_secs(10);
const EQUIVARIANCE_TOL: f64 = 1e-8;
const SINGULAR_RESIDUAL: f64 = 1e-10;
const MEASURE_FLOOR: f64 = 1e-9;
const SAMPLING_BUDGET: Duration = Duration::from_secs(300);
const ROUNDTRIP_RESIDUAL: f64 = 1e-10;
const ROUNDTRIP_ANGLE: f64 = 1e-6;
const POLARIZATION_REL: f64 = 1e-14;
const PRODUCT_TOL: f64 = 1e-10;
const GAUSS_LUCAS_MARGIN: f64 = 1e-9;
const ON_CIRCLE: f64 = 1e-8;
const INTERSECTION: f64 = 1e-7;
const AUDIT_MIN_COPLANARITY: f64 = 1e-3;
const COLLINEAR_TOL: f64 = 1e-12;
const SEARCH_FLOOR: f64 = 1e-6;
const SEARCH_BUDGET: Duration = Duration::from_secs(120);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_ball(rng: &mut ChaCha8Rng, r: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm_squared() < 1.0 {
            return v * r;
        }
    }
}

fn random_disk(rng: &mut ChaCha8Rng, center: Complex64, r: f64) -> Complex64 {
    loop {
        let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return center + z * r;
        }
    }
}

/// Möbius translation of the ball taking a to the origin.
fn phi(a: &Vector3<f64>, x: &Vector3<f64>) -> Vector3<f64> {
    let d = x - a;
    let num = d * (1.0 - a.norm_squared()) - a * d.norm_squared();
    num / (1.0 - 2.0 * a.dot(x) + a.norm_squared() * x.norm_squared())
}

/// Endpoint by recentering: at the origin geodesics are diameters, so the
/// endpoint beyond φ_a(b) is its direction, carried back by φ_{-a}.
fn recentered_endpoint(a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    phi(&-a, &phi(a, b).normalize())
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut worst, mut worst_rec) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 10_000 {
        let (a, b) = (random_ball(&mut rng, 0.99), random_ball(&mut rng, 0.99));
        let (pa, pb) = (BallPoint::new(a).unwrap(), BallPoint::new(b).unwrap());
        if hyperbolic_distance(&pa, &pb) < 1e-4 {
            continue;
        }
        let e = ideal_endpoint(&pa, &pb).unwrap();
        worst = worst.max((e.coords() - endpoint_oracle(&pa, &pb).unwrap().coords()).norm());
        worst_rec = worst_rec.max((e.coords() - recentered_endpoint(&a, &b)).norm());
        n += 1;
    }
    let t = start.elapsed();
    verdict(
        worst < ENDPOINT_TOL && worst_rec < ENDPOINT_TOL && t < ENDPOINT_BUDGET,
        format!("10^4 pairs: max dev vs circle oracle {worst:.2e}, vs recentering {worst_rec:.2e}, {t:.2?}"),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let spec = SampleSpec { seed: 2002, case: Case::Any, ..SampleSpec::default() };
    let (mut worst, mut mismatches, mut done, mut k) = (0.0f64, 0, 0, 0u64);
    while done < 1000 {
        let x = atiyah4::explorer::sample(&spec, k).unwrap();
        k += 1;
        let g = BallIsometry::random(&mut rng, 0.5);
        let gx = g.apply_config(&x).unwrap();
        if gx.points.iter().any(|p| p.norm() > 0.999) {
            continue;
        }
        let m = boundary_action(&g).unwrap();
        let (rs, rs_g) = (root_system(&x).unwrap(), root_system(&gx).unwrap());
        for i in 0..4 {
            for j in (0..4).filter(|&j| j != i) {
                worst = worst.max(m.apply(&rs.get(i, j)).distance(&rs_g.get(i, j)));
            }
        }
        let singular = |cfg: &Configuration| relation_nullvector(&atiyah_matrix(cfg).unwrap()).1 < SINGULAR_RESIDUAL;
        if singular(&x) != singular(&gx) {
            mismatches += 1;
        }
        done += 1;
    }
    verdict(
        worst < EQUIVARIANCE_TOL && mismatches == 0,
        format!("10^3 pairs: max projective distance {worst:.2e}, classification mismatches {mismatches}"),
    )
}

fn conjecture(case: Case, count: usize, seed: u64, label: &str) -> Verdict {
    let start = Instant::now();
    let spec = SampleSpec { seed, count, case, r_max: 0.9, min_sep: 0.05 };
    let summary = batch_verify(&spec, &Tolerances::default(), false).unwrap();
    let t = start.elapsed();
    verdict(
        summary.min_measure > MEASURE_FLOOR && summary.errors.is_empty() && summary.count == count && t < SAMPLING_BUDGET,
        format!(
            "{label}: {} samples, min measure {:.3e} (index {}), mean {:.3e}, sampling errors {}, {t:.2?}",
            summary.count,
            summary.min_measure,
            summary.argmin,
            summary.mean_measure,
            summary.errors.len()
        ),
    )
}

fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusMap {
    loop {
        let mut e = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (a, b, cc, d) = (e(), e(), e(), e());
        if (a * d - b * cc).norm() > 0.2 {
            return MobiusMap::new(a, b, cc, d).unwrap();
        }
    }
}

fn random_proj(rng: &mut ChaCha8Rng, r: f64) -> ProjPoint {
    ProjPoint::affine(c(rng.random_range(-r..r), rng.random_range(-r..r)))
}

fn planted(rng: &mut ChaCha8Rng, rel: &RelationVector) -> Option<RootSystem> {
    let mut trips = [[ProjPoint::ZERO; 3]; 4];
    for t in trips.iter_mut() {
        let (w1, w2) = (random_proj(rng, 3.0), random_proj(rng, 3.0));
        *t = [w1, w2, complete_triplet(rel, &w1, &w2).ok()?];
    }
    Some(RootSystem::from_triplets(trips))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let tol = Tolerances::default();
    let (mut worst_res, mut worst_angle, mut tag_miss, mut n) = (0.0f64, 0.0f64, 0, 0);
    for k in 0..1000 {
        let tag = ScenarioTag::ALL[k % 3];
        let rel = tag.standard_relation().transformed(&random_mobius(&mut rng));
        let Some(rs) = planted(&mut rng, &rel) else { continue };
        let m = AtiyahMatrix::from_root_system(&rs);
        let (found, residual) = relation_nullvector(&m);
        worst_res = worst_res.max(residual);
        worst_angle = worst_angle.max(found.angle(&rel));
        if classify_scenario(&found, &tol).map(|s| s.tag) != Ok(tag) {
            tag_miss += 1;
        }
        n += 1;
    }
    verdict(
        n == 1000 && worst_res < ROUNDTRIP_RESIDUAL && worst_angle < ROUNDTRIP_ANGLE && tag_miss == 0,
        format!("{n} planted systems: max residual {worst_res:.2e}, max angle {worst_angle:.2e}, tag misses {tag_miss}"),
    )
}

/// Affine elementary symmetric functions of three finite points.
fn affine_sym(t: [Complex64; 3]) -> [Complex64; 3] {
    [t[0] + t[1] + t[2], t[0] * t[1] + t[1] * t[2] + t[2] * t[0], t[0] * t[1] * t[2]]
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut e = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let rel = RelationVector::new([e(), e(), e(), e()]).unwrap();
        let w = ProjPoint::new(e(), e()).unwrap();
        let [c0, c1, c2, c3] = *rel.coefficients();
        let (u, v) = (w.u(), w.v());
        let terms = [c0 * v * v * v, 3.0 * c1 * v * v * u, 3.0 * c2 * v * u * u, c3 * u * u * u];
        let g: Complex64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|z| z.norm()).sum();
        let lib = trilinear_eval(&rel, &w, &w, &w);
        worst = worst.max((lib - g).norm() / scale).max((polarize(&rel).eval(&w) - g).norm() / scale);
    }
    let mut worst_forms = 0.0f64;
    for tag in ScenarioTag::ALL {
        let rel = tag.standard_relation();
        for _ in 0..1000 {
            let (w1, w2) = (random_proj(&mut rng, 2.0), random_proj(&mut rng, 2.0));
            let w3 = complete_triplet(&rel, &w1, &w2).unwrap();
            let Some(t3) = w3.to_affine() else { continue };
            let t = [w1.to_affine().unwrap(), w2.to_affine().unwrap(), t3];
            let s = affine_sym(t);
            let scale = 1.0 + t.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(3);
            let err = match tag {
                ScenarioTag::ThreeDistinct => (s[1] / 3.0 - 1.0).norm(),
                ScenarioTag::DoubleRoot => (s[0] / 3.0 - 1.0).norm(),
                ScenarioTag::TripleRoot => s[2].norm(),
            };
            worst_forms = worst_forms.max(err / scale);
        }
    }
    verdict(
        worst < POLARIZATION_REL && worst_forms < 1e-14,
        format!("polarization max rel error {worst:.2e} (10^4); normal forms max scaled error {worst_forms:.2e}"),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let tol = Tolerances::default();
    let rel = ScenarioTag::ThreeDistinct.standard_relation();
    let (mut worst_prod, mut worst_margin, mut worst_oracle) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let (mut misses, mut triplets) = (0, 0);
    for _ in 0..1000 {
        let rs = planted(&mut rng, &rel).unwrap();
        let rep = scenario_a_checker(&rel, &rs, &tol).unwrap();
        for t in rep.triplets.iter().filter(|t| t.planar_applicable) {
            triplets += 1;
            let r = t.r.unwrap();
            worst_prod = worst_prod.max(t.product_residual.unwrap());
            worst_margin = worst_margin.max(t.hull_margin.unwrap());
            if t.meets_real_axis != Some(true) {
                misses += 1;
            }
            // oracle: roots of t² − (2/3)s₁t + 1 by the quadratic formula
            let pts = rs.triplet(t.index).map(|p| p.to_affine().unwrap());
            let s1 = affine_sym(pts)[0];
            let b = -(2.0 / 3.0) * s1;
            let disc = (b * b - 4.0).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
            let (o1, o2) = (q, 1.0 / q);
            let d = ((r[0] - o1).norm() + (r[1] - o2).norm()).min((r[0] - o2).norm() + (r[1] - o1).norm());
            worst_oracle = worst_oracle.max(d / (1.0 + o1.norm().max(o2.norm())));
        }
    }
    verdict(
        worst_prod < PRODUCT_TOL && worst_margin <= GAUSS_LUCAS_MARGIN && misses == 0 && worst_oracle < 1e-8,
        format!(
            "{triplets} triplets: max |r1 r2 - 1| {worst_prod:.2e}, max hull margin {worst_margin:.2e}, \
axis misses {misses}, max deviation from quadratic formula {worst_oracle:.2e}"
        ),
    )
}

/// Closed point-in-hull test by Carathéodory: inside some triangle or segment of the points.
fn in_hull_oracle(p: Complex64, pts: &[Complex64], tau: f64) -> bool {
    let cross = |o: Complex64, a: Complex64, b: Complex64| ((a - o).conj() * (b - o)).im;
    let n = pts.len();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (pts[i], pts[j]);
            let len = (b - a).norm();
            let along = if len > 0.0 { ((p - a).conj() * (b - a)).re / len } else { 0.0 };
            let off = if len > 0.0 { cross(a, b, p).abs() / len } else { (p - a).norm() };
            if off <= tau && along >= -tau && along <= len + tau {
                return true;
            }
            for &cc in &pts[j + 1..] {
                let area = cross(a, b, cc);
                if area.abs() < 1e-300 {
                    continue;
                }
                let s = area.signum();
                let edge = |x: Complex64, y: Complex64| s * cross(x, y, p) / (y - x).norm().max(1e-300);
                if edge(a, b) >= -tau && edge(b, cc) >= -tau && edge(cc, a) >= -tau {
                    return true;
                }
            }
        }
    }
    false
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let (mut worst, mut outside, mut bad_roots) = (f64::NEG_INFINITY, 0, 0);
    for _ in 0..10_000 {
        let n = rng.random_range(2..=6);
        let roots: Vec<Complex64> = (0..n).map(|_| random_disk(&mut rng, c(0.0, 0.0), 10.0)).collect();
        let gl = gauss_lucas_check(&roots, GAUSS_LUCAS_MARGIN).unwrap();
        worst = worst.max(gl.margin);
        // oracle: P′(r) = Σ_k ∏_{m≠k} (r − t_m) vanishes, and r lies in the hull
        for &r in &gl.derivative_roots {
            let terms: Vec<Complex64> =
                (0..n).map(|k| (0..n).filter(|&m| m != k).map(|m| r - roots[m]).product()).collect();
            let val: Complex64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
            if val.norm() / scale > 1e-8 {
                bad_roots += 1;
            }
            if !in_hull_oracle(r, &roots, GAUSS_LUCAS_MARGIN) {
                outside += 1;
            }
        }
        if gl.derivative_roots.len() != n - 1 {
            bad_roots += 1;
        }
    }
    verdict(
        worst <= GAUSS_LUCAS_MARGIN && outside == 0 && bad_roots == 0,
        format!("10^4 polynomials: max margin {worst:.2e}, outside by oracle {outside}, bad derivative roots {bad_roots}"),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let tau = 1e-10;
    let (mut found, mut verified, mut total) = (0, 0, 0);
    for k in 0..20_000 {
        let n = rng.random_range(1..=6);
        let (domain, z): (CircularDomain, Vec<Complex64>) = if k % 2 == 0 {
            let center = random_disk(&mut rng, c(0.0, 0.0), 5.0);
            let radius = rng.random_range(0.05..5.0);
            let z = (0..n).map(|_| random_disk(&mut rng, center, radius)).collect();
            (CircularDomain::Disk { center, radius }, z)
        } else {
            let normal = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let offset = rng.random_range(-3.0..3.0);
            let z = (0..n)
                .map(|_| loop {
                    let p = random_disk(&mut rng, c(0.0, 0.0), 10.0);
                    if (p.conj() * normal).re <= offset {
                        break p;
                    }
                })
                .collect();
            (CircularDomain::HalfPlane { normal, offset }, z)
        };
        total += 1;
        if let Some(w) = geometric_mean_witness(&z, &domain, tau).unwrap() {
            found += 1;
            // oracle: wⁿ equals the product and w is in the closed domain
            let prod: Complex64 = z.iter().product();
            let power = w.powu(n as u32);
            let pow_ok = (power - prod).norm() <= 1e-9 * (1.0 + prod.norm());
            let inside = match domain {
                CircularDomain::Disk { center, radius } => (w - center).norm() <= radius + 1e-9 * (1.0 + radius),
                CircularDomain::HalfPlane { normal, offset } => (w.conj() * normal).re <= offset + 1e-9,
                _ => false,
            };
            if pow_ok && inside {
                verified += 1;
            }
        }
    }
    verdict(
        found == total && verified == total,
        format!("{total} trials (disks and half-planes): witness found {found}, verified by oracle {verified}"),
    )
}

fn criterion_10() -> Verdict {
    let tol = Tolerances::default();
    let spec = SampleSpec { seed: 2010, case: Case::NonCoplanar, ..SampleSpec::default() };
    let (mut done, mut k) = (0, 0u64);
    let (mut worst_on, mut worst_oracle, mut worst_int, mut failures) = (0.0f64, 0.0f64, 0.0f64, 0);
    while done < 1000 {
        let config = atiyah4::explorer::sample(&spec, k).unwrap();
        k += 1;
        if coplanarity_test(&config, &tol).unwrap().residual <= AUDIT_MIN_COPLANARITY {
            continue;
        }
        done += 1;
        let audit = incidence_audit(&config, &tol).unwrap();
        worst_on = worst_on.max(audit.max_on_residual);
        for x in &audit.intersections {
            worst_int = worst_int.max(x.match_error);
        }
        if !audit.pass || !audit.intersections.iter().all(|x| x.ok) {
            failures += 1;
        }
        // oracle: the sphere orthogonal to S² through the three face points
        // solves ⟨x, C⟩ = (|x|² + 1)/2; its trace on S² is ⟨p, C⟩ = 1
        let rs = root_system(&config).unwrap();
        for l in 0..4 {
            let face: Vec<usize> = (0..4).filter(|&v| v != l).collect();
            let rows: Vec<Vector3<f64>> = face.iter().map(|&v| *config.points[v].coords()).collect();
            let m = nalgebra::Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
            let rhs = Vector3::from_iterator(rows.iter().map(|x| (x.norm_squared() + 1.0) / 2.0));
            let Some(cc) = m.lu().solve(&rhs) else { continue };
            for &i in &face {
                for &j in face.iter().filter(|&&j| j != i) {
                    let p: IdealPoint = rs.ideal(i, j);
                    worst_oracle = worst_oracle.max((p.coords().dot(&cc) - 1.0).abs() / cc.norm());
                }
            }
        }
    }
    verdict(
        worst_on <= ON_CIRCLE && worst_oracle <= ON_CIRCLE && worst_int <= INTERSECTION && failures == 0,
        format!(
            "{done} samples: max on-circle residual {worst_on:.2e} (oracle {worst_oracle:.2e}), \
max intersection mismatch {worst_int:.2e}, failed audits {failures}"
        ),
    )
}

fn criterion_11() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1011);
    let (mut worst_off, mut worst_measure, mut worst_on) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let mut z: [f64; 4] = [0.0; 4].map(|_| rng.random_range(-0.95..0.95));
        z.sort_by(f64::total_cmp);
        if z.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let config = Configuration::from_coords(z.map(|h| [0.0, 0.0, h])).unwrap();
        let m = atiyah_matrix(&config).unwrap();
        let e = m.entries();
        for i in 0..4 {
            for j in 0..4 {
                if i + j == 3 {
                    worst_on = worst_on.max((e[(i, j)].norm() - 1.0).abs());
                } else {
                    worst_off = worst_off.max(e[(i, j)].norm());
                }
            }
        }
        worst_measure = worst_measure.max((independence_measure(&m) - 1.0).abs());
    }
    verdict(
        worst_off < COLLINEAR_TOL && worst_on < COLLINEAR_TOL && worst_measure < COLLINEAR_TOL,
        format!("z-axis family: max off-anti-diagonal {worst_off:.2e}, max | |m_i,3-i| - 1 | {worst_on:.2e}, max |measure - 1| {worst_measure:.2e}"),
    )
}

fn criterion_12() -> Verdict {
    let start = Instant::now();
    let first = minimize(12, 100, 500).unwrap();
    let second = minimize(12, 100, 500).unwrap();
    let t = start.elapsed() / 2;
    let bits = |r: &atiyah4::explorer::SearchResult| -> Vec<u64> {
        r.trace.iter().flat_map(|t| t.best.iter().map(|v| v.to_bits())).collect()
    };
    let reproducible = bits(&first) == bits(&second) && first.best == second.best;
    let opts = SearchOptions::default();
    let p = &first.best.points;
    let feasible = p.iter().all(|x| x.norm() <= opts.r_max * (1.0 + 1e-15))
        && (0..4).all(|i| (i + 1..4).all(|j| hyperbolic_distance(&p[i], &p[j]) >= opts.min_sep));
    let monotone = first.trace.iter().all(|t| t.best.windows(2).all(|w| w[1] <= w[0]));
    let recomputed = independence_measure(&atiyah_matrix(&first.best).unwrap());
    // the measure is not isometry invariant; recentering shows the intrinsic size
    let recentered = (0..4)
        .map(|k| {
            let g = BallIsometry::translation(first.best.points[k]);
            independence_measure(&atiyah_matrix(&g.apply_config(&first.best).unwrap()).unwrap())
        })
        .fold(f64::INFINITY, f64::min);
    verdict(
        reproducible && feasible && monotone && recomputed == first.best_measure && first.best_measure > SEARCH_FLOOR
            && t < SEARCH_BUDGET,
        format!(
            "100x500: reproducible {reproducible}, feasible {feasible}, monotone {monotone}, best measure {:.3e} \
(floor {SEARCH_FLOOR:.0e}), recentered at a vertex {recentered:.3e}, {t:.2?} per run",
            first.best_measure
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("endpoint oracle agreement", criterion_1),
        ("boundary equivariance", criterion_2),
        ("conjecture, non-coplanar", || conjecture(Case::NonCoplanar, 100_000, 3003, "non-coplanar")),
        ("conjecture, coplanar hull", || conjecture(Case::CoplanarHull, 10_000, 4004, "coplanar-hull")),
        ("synthetic singular round trip", criterion_5),
        ("polarization and normal forms", criterion_6),
        ("scenario-a identities", criterion_7),
        ("Gauss-Lucas suite", criterion_8),
        ("geometric mean witness", criterion_9),
        ("face-circle incidence", criterion_10),
        ("collinear closed form", criterion_11),
        ("search sanity", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("{} [{:>2}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
