//! Face circles at infinity of a non-coplanar configuration, the incidence
//! audit of the twelve roots against them, and the combinatorial type
//! signature.
//!
//! A face circle is stored through its side function
//! s(x) = ⟨x, C⟩ − D(|x|² + 1)/2, whose zero set is the hyperbolic plane of
//! the face (an orthogonal sphere, or a plane through the origin when D = 0).
//! The sign is fixed by s(x_l) > 0 at the opposite vertex x_l; the
//! corresponding cap of the sphere at infinity is the circle's interior.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use super::planar::{smallest_enclosing_disk, Disk};
use super::Chart;
use crate::ball_model::{coplanarity_test, root_system, translate_vec, Configuration, IdealPoint};
use crate::complex_json;
use crate::error::{Error, Result};
use crate::riemann_sphere::{ProjPoint, RootSystem};
use crate::tolerances::Tolerances;

/// The three vertices of the face opposite vertex `l`.
pub fn face_opposite(l: usize) -> [usize; 3] {
    let v: Vec<usize> = (0..4).filter(|&k| k != l).collect();
    [v[0], v[1], v[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SphereForm {
    /// Orthogonal sphere |x − center| = radius with |center|² = 1 + radius².
    Sphere { center: [f64; 3], radius: f64 },
    /// Plane through the origin with unit normal.
    Plane { normal: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ChartForm {
    Circle {
        #[serde(with = "complex_json")]
        center: Complex64,
        radius: f64,
    },
    /// {t : ⟨t, normal⟩ = offset}, passing through ∞.
    Line {
        #[serde(with = "complex_json")]
        normal: Complex64,
        offset: f64,
    },
}

impl ChartForm {
    fn through(p: [ProjPoint; 3]) -> Result<ChartForm> {
        let finite: Vec<Complex64> = p.iter().filter_map(|q| q.to_affine()).filter(|t| t.norm() < 1e12).collect();
        let line = |a: Complex64, b: Complex64| {
            let n = (b - a) * Complex64::i();
            let n = n / n.norm();
            ChartForm::Line { normal: n, offset: a.re * n.re + a.im * n.im }
        };
        match finite.as_slice() {
            [a, b] => Ok(line(*a, *b)),
            [a, b, c] => {
                let (ba, ca) = (b - a, c - a);
                let d = 2.0 * (ba.re * ca.im - ba.im * ca.re);
                if d.abs() <= 1e-14 * ba.norm_sqr().max(ca.norm_sqr()) {
                    return Ok(line(*a, *b));
                }
                let (nb, nc) = (ba.norm_sqr(), ca.norm_sqr());
                let off = Complex64::new((ca.im * nb - ba.im * nc) / d, (ba.re * nc - ca.re * nb) / d);
                Ok(ChartForm::Circle { center: a + off, radius: off.norm() })
            }
            _ => Err(Error::Degenerate("face roots coincide at ∞".into())),
        }
    }

    /// First-order chordal distance from `p` to the curve.
    pub fn residual(&self, p: &ProjPoint) -> f64 {
        match (self, p.to_affine()) {
            (ChartForm::Circle { center, radius }, Some(t)) => {
                2.0 * ((t - center).norm() - radius).abs() / (1.0 + t.norm_sqr())
            }
            (ChartForm::Circle { center, radius }, None) => {
                let far = center.norm() + radius;
                2.0 / (1.0 + far * far).sqrt()
            }
            (ChartForm::Line { normal, offset }, Some(t)) => {
                2.0 * (t.re * normal.re + t.im * normal.im - offset).abs() / (1.0 + t.norm_sqr())
            }
            (ChartForm::Line { .. }, None) => 0.0,
        }
    }
}

/// The circle at infinity of the face opposite `opposite`.
#[derive(Debug, Clone, Serialize)]
pub struct FaceCircle {
    pub face: [usize; 3],
    pub opposite: usize,
    pub sphere_form: SphereForm,
    pub chart_form: ChartForm,
    /// Largest sphere-form and chart-form residual over the six face roots.
    pub sphere_residual: f64,
    pub chart_residual: f64,
    #[serde(skip)]
    side_c: Vector3<f64>,
    #[serde(skip)]
    side_d: f64,
}

impl FaceCircle {
    /// s(x) for a point of the closed ball.
    pub fn side(&self, x: &Vector3<f64>) -> f64 {
        x.dot(&self.side_c) - self.side_d * (x.norm_squared() + 1.0) / 2.0
    }

    /// Signed distance-like side of an ideal point: positive in the interior cap.
    pub fn side_ideal(&self, p: &IdealPoint) -> f64 {
        p.coords().dot(&self.side_c) - self.side_d
    }

    /// The same side function as ⟨p, C⟩ = D, for circle intersection.
    fn plane(&self) -> (Vector3<f64>, f64) {
        (self.side_c, self.side_d)
    }
}

fn collinear_in_h3(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Result<bool> {
    let (yb, yc) = (translate_vec(a, b)?, translate_vec(a, c)?);
    Ok(yb.cross(&yc).norm() <= 1e-9 * yb.norm() * yc.norm())
}

/// Face circle from the sphere through the three face points orthogonal to
/// the unit sphere, with the chart circle fitted through t_ab, t_bc, t_ca.
pub fn face_circle(config: &Configuration, face: [usize; 3]) -> Result<FaceCircle> {
    let rs = root_system(config)?;
    face_circle_with(config, &rs, face)
}

pub(crate) fn face_circle_with(config: &Configuration, rs: &RootSystem, face: [usize; 3]) -> Result<FaceCircle> {
    let mut face = face;
    face.sort_unstable();
    if face[0] == face[1] || face[1] == face[2] || face[2] > 3 {
        return Err(Error::InvalidInput(format!("face {face:?} is not a 3-subset of the vertices")));
    }
    let opposite = (0..4).find(|k| !face.contains(k)).expect("a 3-subset of four");
    let x = face.map(|k| *config.points[k].coords());
    if collinear_in_h3(&x[0], &x[1], &x[2])? {
        return Err(Error::DegenerateFace { face, reason: "face points lie on one geodesic".into() });
    }
    let a = Matrix3::from_rows(&[x[0].transpose(), x[1].transpose(), x[2].transpose()]);
    let rhs = Vector3::from_fn(|k, _| (x[k].norm_squared() + 1.0) / 2.0);
    let svd = a.svd(true, true);
    let sv = svd.singular_values;
    let (mut side_c, mut side_d, mut sphere_form);
    let center = (sv.min() > 1e-12 * sv.max()).then(|| svd.solve(&rhs, 0.0).ok()).flatten();
    match center {
        Some(c) if c.norm() < 1e8 => {
            let n = c.norm();
            side_c = c / n;
            side_d = 1.0 / n;
            sphere_form = SphereForm::Sphere { center: c.into(), radius: (c.norm_squared() - 1.0).max(0.0).sqrt() };
        }
        _ => {
            let v_t = svd.v_t.expect("requested");
            let imin = sv.iter().enumerate().min_by(|p, q| p.1.total_cmp(q.1)).expect("three").0;
            let n: Vector3<f64> = v_t.row(imin).transpose().normalize();
            side_c = n;
            side_d = 0.0;
            sphere_form = SphereForm::Plane { normal: n.into() };
        }
    }
    let opp = config.points[opposite].coords();
    if opp.dot(&side_c) - side_d * (opp.norm_squared() + 1.0) / 2.0 < 0.0 {
        side_c = -side_c;
        side_d = -side_d;
        if let SphereForm::Plane { normal } = &mut sphere_form {
            *normal = (-Vector3::from(*normal)).into();
        }
    }
    let [p, q, r] = face;
    let chart_form = ChartForm::through([rs.get(p, q), rs.get(q, r), rs.get(r, p)])?;
    let mut fc = FaceCircle { face, opposite, sphere_form, chart_form, sphere_residual: 0.0, chart_residual: 0.0, side_c, side_d };
    for &i in &face {
        for &j in &face {
            if i != j {
                fc.sphere_residual = fc.sphere_residual.max(fc.side_ideal(&rs.ideal(i, j)).abs());
                fc.chart_residual = fc.chart_residual.max(fc.chart_form.residual(&rs.get(i, j)));
            }
        }
    }
    Ok(fc)
}

/// Incidence of one root against the four circles.
#[derive(Debug, Clone, Serialize)]
pub struct RootIncidence {
    pub i: usize,
    pub j: usize,
    /// Opposite-vertex labels of the faces whose circle contains the root.
    pub on_circles: Vec<usize>,
    /// The two faces containing the edge {i, j}.
    pub expected: [usize; 2],
    pub residuals: [f64; 4],
    pub ok: bool,
}

/// Intersection of two face circles, matched against the roots of their common edge.
#[derive(Debug, Clone, Serialize)]
pub struct CircleIntersection {
    pub circles: [usize; 2],
    pub edge: [usize; 2],
    pub points: Vec<[f64; 3]>,
    pub match_error: f64,
    pub ok: bool,
}

/// Side counts of the four triplets against one circle.
#[derive(Debug, Clone, Serialize)]
pub struct CircleSides {
    pub opposite: usize,
    /// Per triplet i: (on circle, strictly interior, strictly exterior).
    pub counts: [[u8; 3]; 4],
    /// +1 for three triplets in the closed interior and one in the closed
    /// exterior, −1 for the reverse, 0 for neither.
    pub bit: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct IncidenceAudit {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub circles: Vec<FaceCircle>,
    pub roots: Vec<RootIncidence>,
    pub intersections: Vec<CircleIntersection>,
    pub sides: Vec<CircleSides>,
    /// Largest residual of a designated incidence.
    pub max_on_residual: f64,
    /// Smallest residual of a non-designated incidence.
    pub min_off_residual: f64,
    /// (i, j, opposite) incidences within a factor 10 of the on-circle tolerance.
    pub marginal: Vec<[usize; 3]>,
    pub pass: bool,
}

impl IncidenceAudit {
    fn not_applicable(reason: String) -> Self {
        IncidenceAudit {
            applicable: false,
            reason: Some(reason),
            circles: Vec::new(),
            roots: Vec::new(),
            intersections: Vec::new(),
            sides: Vec::new(),
            max_on_residual: 0.0,
            min_off_residual: 0.0,
            marginal: Vec::new(),
            pass: false,
        }
    }
}

/// Points of the unit sphere on both planes ⟨p, C_k⟩ = D_k.
fn sphere_circle_intersection(a: (Vector3<f64>, f64), b: (Vector3<f64>, f64)) -> Vec<Vector3<f64>> {
    let (c1, d1) = a;
    let (c2, d2) = b;
    let axis = c1.cross(&c2);
    let an = axis.norm_squared();
    if an < 1e-24 {
        return Vec::new();
    }
    // p = α C₁ + β C₂ + γ (C₁ × C₂)
    let (g11, g12, g22) = (c1.norm_squared(), c1.dot(&c2), c2.norm_squared());
    let det = g11 * g22 - g12 * g12;
    let alpha = (d1 * g22 - d2 * g12) / det;
    let beta = (d2 * g11 - d1 * g12) / det;
    let base = c1 * alpha + c2 * beta;
    let rest = 1.0 - base.norm_squared();
    if rest < 0.0 {
        return Vec::new();
    }
    let gamma = (rest / an).sqrt();
    vec![base + axis * gamma, base - axis * gamma]
}

/// Checks the twelve roots against the four face circles.
pub fn incidence_audit(config: &Configuration, tol: &Tolerances) -> Result<IncidenceAudit> {
    let cop = coplanarity_test(config, tol)?;
    if cop.is_coplanar {
        return Ok(IncidenceAudit::not_applicable(format!(
            "coplanar configuration (residual {:e}): the four circles coincide",
            cop.residual
        )));
    }
    let rs = root_system(config)?;
    let mut circles = Vec::with_capacity(4);
    for l in 0..4 {
        match face_circle_with(config, &rs, face_opposite(l)) {
            Ok(c) => circles.push(c),
            Err(e) => return Ok(IncidenceAudit::not_applicable(format!("face opposite {l}: {e}"))),
        }
    }
    let on_tol = tol.on_circle;
    let mut roots = Vec::with_capacity(12);
    let mut max_on: f64 = 0.0;
    let mut min_off = f64::INFINITY;
    let mut marginal = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let p = rs.ideal(i, j);
            let residuals = [0, 1, 2, 3].map(|l| circles[l].side_ideal(&p).abs());
            let expected: Vec<usize> = (0..4).filter(|&l| l != i && l != j).collect();
            let on_circles: Vec<usize> = (0..4).filter(|&l| residuals[l] <= on_tol).collect();
            for l in 0..4 {
                let designated = expected.contains(&l);
                if designated {
                    max_on = max_on.max(residuals[l]);
                } else {
                    min_off = min_off.min(residuals[l]);
                }
                let near = if designated { residuals[l] > on_tol / 10.0 } else { residuals[l] <= 10.0 * on_tol };
                if near {
                    marginal.push([i, j, l]);
                }
            }
            roots.push(RootIncidence {
                i,
                j,
                ok: on_circles == expected,
                on_circles,
                expected: [expected[0], expected[1]],
                residuals,
            });
        }
    }

    let mut intersections = Vec::with_capacity(6);
    for l in 0..4 {
        for m in l + 1..4 {
            let edge: Vec<usize> = (0..4).filter(|&k| k != l && k != m).collect();
            let (i, j) = (edge[0], edge[1]);
            let pts = sphere_circle_intersection(circles[l].plane(), circles[m].plane());
            let (a, b) = (*rs.ideal(i, j).coords(), *rs.ideal(j, i).coords());
            let match_error = if pts.len() == 2 {
                let direct = (pts[0] - a).norm().max((pts[1] - b).norm());
                let swapped = (pts[0] - b).norm().max((pts[1] - a).norm());
                direct.min(swapped)
            } else {
                f64::INFINITY
            };
            intersections.push(CircleIntersection {
                circles: [l, m],
                edge: [i, j],
                points: pts.iter().map(|p| (*p).into()).collect(),
                ok: match_error <= tol.intersection,
                match_error: if match_error.is_finite() { match_error } else { 2.0 },
            });
        }
    }

    let sides: Vec<CircleSides> = circles
        .iter()
        .map(|circle| {
            let mut counts = [[0u8; 3]; 4];
            for (i, row) in counts.iter_mut().enumerate() {
                for j in (0..4).filter(|&j| j != i) {
                    let s = circle.side_ideal(&rs.ideal(i, j));
                    let slot = if s.abs() <= on_tol { 0 } else if s > 0.0 { 1 } else { 2 };
                    row[slot] += 1;
                }
            }
            CircleSides { opposite: circle.opposite, bit: side_bit(&counts), counts }
        })
        .collect();

    let pass = roots.iter().all(|r| r.ok) && intersections.iter().all(|x| x.ok) && sides.iter().all(|s| s.bit != 0);
    Ok(IncidenceAudit {
        applicable: true,
        reason: None,
        circles,
        roots,
        intersections,
        sides,
        max_on_residual: max_on,
        min_off_residual: min_off,
        marginal,
        pass,
    })
}

fn side_bit(counts: &[[u8; 3]; 4]) -> i8 {
    let two_on: Vec<&[u8; 3]> = counts.iter().filter(|c| c[0] == 2).collect();
    let rest: Vec<&[u8; 3]> = counts.iter().filter(|c| c[0] != 2).collect();
    if two_on.len() != 3 || rest.len() != 1 {
        return 0;
    }
    let all_in = |cs: &[&[u8; 3]]| cs.iter().all(|c| c[2] == 0);
    let all_out = |cs: &[&[u8; 3]]| cs.iter().all(|c| c[1] == 0);
    if all_in(&two_on) && all_out(&rest) {
        1
    } else if all_out(&two_on) && all_in(&rest) {
        -1
    } else {
        0
    }
}

/// Combinatorial signature of a non-coplanar configuration.
///
/// `bits` and `count_table` are intrinsic: invariant under isometries and
/// relabelings. `infinity_caps` and `minimal_disks_disjoint` depend on the
/// chart and are invariant only under relabelings and isometries fixing ∞.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeSignature {
    pub bits: [i8; 4],
    /// Per circle, the sorted per-triplet (on, interior, exterior) counts; circles sorted.
    pub count_table: Vec<Vec<[u8; 3]>>,
    /// Number of interior caps containing ∞.
    pub infinity_caps: usize,
    /// Minimal enclosing disks of the four triplets pairwise disjoint in the chart.
    pub minimal_disks_disjoint: bool,
    pub chart: Chart,
    pub provisional_name: String,
    pub naming_rule: &'static str,
}

pub const NAMING_RULE: &str = "provisional: class A when ∞ lies in at least two interior caps, class B \
otherwise; suffix 1 when the minimal enclosing disks of the four triplets are pairwise disjoint in the \
recorded chart, 2 otherwise";

pub fn type_signature(config: &Configuration, tol: &Tolerances) -> Result<TypeSignature> {
    let audit = incidence_audit(config, tol)?;
    if !audit.applicable {
        return Err(Error::Precondition(format!(
            "type signature not applicable: {}",
            audit.reason.unwrap_or_default()
        )));
    }
    let mut bits = [0i8; 4];
    for (b, s) in bits.iter_mut().zip(&audit.sides) {
        *b = s.bit;
    }
    bits.sort_unstable();
    let mut count_table: Vec<Vec<[u8; 3]>> = audit
        .sides
        .iter()
        .map(|s| {
            let mut rows = s.counts.to_vec();
            rows.sort_unstable();
            rows
        })
        .collect();
    count_table.sort();
    let rs = root_system(config)?;
    let all: Vec<ProjPoint> = rs.triplets().iter().flatten().copied().collect();
    let chart = Chart::exploration(&all);
    let pole = chart.infinity_preimage();
    let infinity_caps = audit.circles.iter().filter(|c| c.side_ideal(&pole) > tol.on_circle).count();

    let disks: Vec<Disk> = rs
        .triplets()
        .iter()
        .map(|t| {
            let pts: Vec<Complex64> = t.iter().filter_map(|p| chart.finite(p)).collect();
            smallest_enclosing_disk(&pts)
        })
        .collect();
    let minimal_disks_disjoint = (0..4).all(|a| (a + 1..4).all(|b| disks[a].disjoint(&disks[b], tol.geo)));
    let class = if infinity_caps >= 2 { 'A' } else { 'B' };
    let suffix = if minimal_disks_disjoint { '1' } else { '2' };
    Ok(TypeSignature {
        bits,
        count_table,
        infinity_caps,
        minimal_disks_disjoint,
        chart,
        provisional_name: format!("{class}{suffix}"),
        naming_rule: NAMING_RULE,
    })
}
