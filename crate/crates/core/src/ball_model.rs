//! Hyperbolic 3-space in the Poincaré ball: points, ideal points, isometries,
//! ideal endpoints of rays, and the planarity / hull predicates used to decide
//! which configurations are covered by the independence argument.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector2, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann_sphere::RootSystem;
use crate::tolerances::{Tolerances, BALL_MARGIN};

/// A point of the open unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BallPoint(Vector3<f64>);

impl BallPoint {
    pub const ORIGIN: BallPoint = BallPoint(Vector3::new(0.0, 0.0, 0.0));

    pub fn new(coords: Vector3<f64>) -> Result<Self> {
        let norm = coords.norm();
        if !norm.is_finite() || norm > 1.0 - BALL_MARGIN {
            return Err(Error::OutsideBall { coords: coords.into(), norm });
        }
        Ok(Self(coords))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn coords(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn neg(&self) -> BallPoint {
        BallPoint(-self.0)
    }

    /// Image of `self` under the ball translation taking `a` to the origin.
    pub fn translated_by(&self, a: &BallPoint) -> Result<BallPoint> {
        let y = translate_vec(a.coords(), &self.0)?;
        // rounding can push images of points near the sphere just outside
        BallPoint::new(y).or_else(|_| Ok(BallPoint(y * ((1.0 - BALL_MARGIN) / y.norm()))))
    }
}

impl TryFrom<[f64; 3]> for BallPoint {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        BallPoint::new(Vector3::from(v))
    }
}

impl From<BallPoint> for [f64; 3] {
    fn from(p: BallPoint) -> Self {
        p.0.into()
    }
}

/// A point of the sphere at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct IdealPoint(Vector3<f64>);

impl IdealPoint {
    /// Normalizes `coords` onto the unit sphere.
    pub fn new(coords: Vector3<f64>) -> Result<Self> {
        let norm = coords.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::Degenerate(format!("cannot normalize {coords:?} onto the sphere")));
        }
        Ok(Self(coords / norm))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn coords(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn translated_by(&self, a: &BallPoint) -> Result<IdealPoint> {
        IdealPoint::new(translate_vec(a.coords(), &self.0)?)
    }

    pub fn distance(&self, other: &IdealPoint) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl TryFrom<[f64; 3]> for IdealPoint {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        let p = IdealPoint::new(Vector3::from(v))?;
        if (Vector3::from(v).norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("ideal point {v:?} is not on the unit sphere")));
        }
        Ok(p)
    }
}

impl From<IdealPoint> for [f64; 3] {
    fn from(p: IdealPoint) -> Self {
        p.0.into()
    }
}

/// Points the ball translations act on: interior points and ideal points.
pub trait BallAction: Sized {
    fn mobius_translated(&self, a: &BallPoint) -> Result<Self>;
}

impl BallAction for BallPoint {
    fn mobius_translated(&self, a: &BallPoint) -> Result<Self> {
        self.translated_by(a)
    }
}

impl BallAction for IdealPoint {
    fn mobius_translated(&self, a: &BallPoint) -> Result<Self> {
        self.translated_by(a)
    }
}

/// The ball translation φ_a sending `a` to the origin, applied to `x`.
///
/// φ_a(x) = ((1 − |a|²)(x − a) − |x − a|² a) / (1 − 2⟨a,x⟩ + |a|²|x|²), and
/// φ_{−a} is its inverse.
pub fn mobius_translate<P: BallAction>(a: &BallPoint, x: &P) -> Result<P> {
    x.mobius_translated(a)
}

pub(crate) fn translate_vec(a: &Vector3<f64>, x: &Vector3<f64>) -> Result<Vector3<f64>> {
    let a2 = a.norm_squared();
    let x2 = x.norm_squared();
    let diff = x - a;
    let denom = 1.0 - 2.0 * a.dot(x) + a2 * x2;
    if denom.abs() < 1e-300 {
        return Err(Error::Degenerate(format!("ball translation denominator vanished for a={a:?}, x={x:?}")));
    }
    Ok(((1.0 - a2) * diff - diff.norm_squared() * a) / denom)
}

/// Hyperbolic distance in the ball model.
pub fn hyperbolic_distance(x: &BallPoint, y: &BallPoint) -> f64 {
    let num = 2.0 * (x.0 - y.0).norm_squared();
    let den = (1.0 - x.0.norm_squared()) * (1.0 - y.0.norm_squared());
    // acosh(1 + s) = ln(1 + s + sqrt(s(s + 2))), accurate for small s
    let s = num / den;
    (s + (s * (s + 2.0)).sqrt()).ln_1p()
}

/// Orientation-preserving isometry x ↦ φ_a(R x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallIsometry {
    rotation: Matrix3<f64>,
    translation_center: BallPoint,
}

impl BallIsometry {
    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation_center: BallPoint::ORIGIN }
    }

    pub fn new(rotation: Matrix3<f64>, translation_center: BallPoint) -> Result<Self> {
        let defect = (rotation.transpose() * rotation - Matrix3::identity()).norm();
        if defect >= 1e-12 || rotation.determinant() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rotation is not in SO(3) (orthogonality defect {defect:e}, det {})",
                rotation.determinant()
            )));
        }
        Ok(Self { rotation, translation_center })
    }

    pub fn rotation(rotation: Matrix3<f64>) -> Result<Self> {
        Self::new(rotation, BallPoint::ORIGIN)
    }

    /// The translation φ_a taking `a` to the origin.
    pub fn translation(a: BallPoint) -> Self {
        Self { rotation: Matrix3::identity(), translation_center: a }
    }

    /// A random isometry: Haar rotation followed by a translation whose center
    /// is uniform in the ball of radius `max_center`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_center: f64) -> Self {
        let q = nalgebra::Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let rotation = UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner();
        let center = random_in_ball(rng, max_center);
        Self { rotation, translation_center: BallPoint(center) }
    }

    pub fn rotation_matrix(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation_center(&self) -> &BallPoint {
        &self.translation_center
    }

    pub fn apply(&self, x: &BallPoint) -> Result<BallPoint> {
        BallPoint(self.rotation * x.0).translated_by(&self.translation_center)
    }

    pub fn apply_ideal(&self, p: &IdealPoint) -> Result<IdealPoint> {
        IdealPoint(self.rotation * p.0).translated_by(&self.translation_center)
    }

    /// `self ∘ other`, re-expressed in rotation-then-translation form.
    pub fn compose(&self, other: &BallIsometry) -> Result<BallIsometry> {
        let b = self.apply(&other.apply(&BallPoint::ORIGIN)?)?;
        let mut cols = [Vector3::zeros(); 3];
        for (k, col) in cols.iter_mut().enumerate() {
            let e = IdealPoint(Vector3::ith(k, 1.0));
            let image = self.apply_ideal(&other.apply_ideal(&e)?)?;
            *col = *image.translated_by(&b)?.coords();
        }
        let raw = Matrix3::from_columns(&cols);
        // polar factor removes the rounding drift from orthogonality
        let svd = raw.svd(true, true);
        let rotation = svd.u.unwrap() * svd.v_t.unwrap();
        Ok(Self { rotation, translation_center: b.neg() })
    }

    pub fn apply_config(&self, config: &Configuration) -> Result<Configuration> {
        let mut pts = [BallPoint::ORIGIN; 4];
        for (dst, src) in pts.iter_mut().zip(config.points.iter()) {
            *dst = self.apply(src)?;
        }
        Ok(Configuration { points: pts })
    }
}

pub(crate) fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm_squared() < 1.0 {
            return v * radius;
        }
    }
}

pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// Four distinct points of the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Configuration {
    pub points: [BallPoint; 4],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
struct ConfigurationFile {
    points: Vec<[f64; 3]>,
}

impl Configuration {
    /// Validates against the default separation and radius limits.
    pub fn new(points: [BallPoint; 4]) -> Result<Self> {
        Self::with_limits(points, &Tolerances::default())
    }

    pub fn with_limits(points: [BallPoint; 4], tol: &Tolerances) -> Result<Self> {
        for p in &points {
            if p.norm() > tol.r_max {
                return Err(Error::RadiusLimit { coords: (*p).into(), norm: p.norm(), r_max: tol.r_max });
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let d = hyperbolic_distance(&points[i], &points[j]);
                if !(d >= tol.min_sep) {
                    return Err(Error::DistinctPointsViolated { i, j, distance: d, min_sep: tol.min_sep });
                }
            }
        }
        Ok(Self { points })
    }

    pub fn from_coords(coords: [[f64; 3]; 4]) -> Result<Self> {
        Self::from_coords_with(coords, &Tolerances::default())
    }

    pub fn from_coords_with(coords: [[f64; 3]; 4], tol: &Tolerances) -> Result<Self> {
        let mut points = [BallPoint::ORIGIN; 4];
        for (dst, c) in points.iter_mut().zip(coords) {
            *dst = BallPoint::try_from(c)?;
        }
        Self::with_limits(points, tol)
    }

    /// Reads `{"points": [[x,y,z], ...]}` with exactly four points.
    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self> {
        let file: ConfigurationFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("configuration JSON: {e}")))?;
        let coords: [[f64; 3]; 4] = file
            .points
            .try_into()
            .map_err(|v: Vec<_>| Error::InvalidInput(format!("expected 4 points, found {}", v.len())))?;
        Self::from_coords_with(coords, tol)
    }

    pub fn to_json(&self) -> String {
        let file = ConfigurationFile { points: self.points.iter().map(|p| (*p).into()).collect() };
        serde_json::to_string(&file).expect("plain arrays serialize")
    }

    pub fn coords(&self) -> [[f64; 3]; 4] {
        self.points.map(Into::into)
    }

    /// Vertices of a regular tetrahedron centered at the origin, Euclidean radius `r`.
    pub fn regular_tetrahedron(r: f64) -> Result<Self> {
        let s = r / 3f64.sqrt();
        Self::from_coords([[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]])
    }

    /// Relabels points: the new point `k` is the old point `perm[k]`.
    pub fn permuted(&self, perm: [usize; 4]) -> Configuration {
        Configuration { points: perm.map(|k| self.points[k]) }
    }
}

/// Limit on the sphere of the geodesic ray from `x_i` through `x_j`.
///
/// Moves `x_i` to the origin, where geodesics through it are Euclidean rays,
/// and transports the radial endpoint back.
pub fn ideal_endpoint(x_i: &BallPoint, x_j: &BallPoint) -> Result<IdealPoint> {
    let y = translate_vec(x_i.coords(), x_j.coords())?;
    let n = y.norm();
    if n < 1e-15 {
        return Err(Error::DistinctPointsViolated { i: 0, j: 1, distance: 0.0, min_sep: 0.0 });
    }
    let back = translate_vec(&(-x_i.coords()), &(y / n))?;
    IdealPoint::new(back)
}

/// Independent construction of [`ideal_endpoint`] from the Euclidean circle
/// through `x_i`, `x_j` orthogonal to the unit sphere.
pub fn endpoint_oracle(x_i: &BallPoint, x_j: &BallPoint) -> Result<IdealPoint> {
    let (a, b) = (x_i.coords(), x_j.coords());
    if (b - a).norm() < 1e-15 {
        return Err(Error::DistinctPointsViolated { i: 0, j: 1, distance: 0.0, min_sep: 0.0 });
    }
    let cross = a.cross(b);
    if cross.norm() <= 1e-13 {
        // a, b and the origin are collinear: the geodesic is a diameter
        return IdealPoint::new(b - a);
    }
    // orthonormal frame of the plane spanned by a and b
    let (big, small) = if a.norm() >= b.norm() { (a, b) } else { (b, a) };
    let e1 = big.normalize();
    let e2 = (small - e1 * small.dot(&e1)).normalize();
    let to2 = |v: &Vector3<f64>| Vector2::new(v.dot(&e1), v.dot(&e2));
    let (p, q) = (to2(a), to2(b));

    // center c of the orthogonal circle: ⟨x, c⟩ = (|x|² + 1) / 2 for x ∈ {p, q}
    let m = nalgebra::Matrix2::new(p.x, p.y, q.x, q.y);
    let rhs = Vector2::new((p.norm_squared() + 1.0) / 2.0, (q.norm_squared() + 1.0) / 2.0);
    let c = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("orthogonal circle system is singular".into()))?;
    let c2 = c.norm_squared();
    if c2 <= 1.0 {
        return Err(Error::Degenerate("orthogonal circle center inside the unit disk".into()));
    }
    // the circle meets the unit circle where ⟨z, c⟩ = 1
    let foot = c / c2;
    let perp = Vector2::new(-c.y, c.x) * ((1.0 - 1.0 / c2).sqrt() / c2.sqrt());
    let cross2 = |u: Vector2<f64>, v: Vector2<f64>| u.x * v.y - u.y * v.x;
    let travel = cross2(p - c, q - c);
    let z = if cross2(q - c, foot + perp - c) * travel > 0.0 { foot + perp } else { foot - perp };
    IdealPoint::new(e1 * z.x + e2 * z.y)
}

/// All twelve ideal endpoints t_ij of a configuration.
pub fn root_system(config: &Configuration) -> Result<RootSystem> {
    let mut ideal = [[IdealPoint(Vector3::z()); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                ideal[i][j] = ideal_endpoint(&config.points[i], &config.points[j]).map_err(|e| match e {
                    Error::DistinctPointsViolated { distance, min_sep, .. } => {
                        Error::DistinctPointsViolated { i, j, distance, min_sep }
                    }
                    other => other,
                })?;
            }
        }
    }
    Ok(RootSystem::from_ideal(ideal))
}

/// Result of [`coplanarity_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coplanarity {
    pub is_coplanar: bool,
    pub residual: f64,
}

fn translated_frame(config: &Configuration) -> Result<[Vector3<f64>; 3]> {
    let base = &config.points[0];
    let mut rows = [Vector3::zeros(); 3];
    for (row, p) in rows.iter_mut().zip(&config.points[1..]) {
        *row = translate_vec(base.coords(), p.coords())?;
    }
    Ok(rows)
}

/// Decides whether the four points lie on a common hyperbolic plane.
///
/// With `x₁` at the origin hyperbolic planes through it are Euclidean planes,
/// so the residual is the relative smallest singular value of the images of
/// the remaining three points.
pub fn coplanarity_test(config: &Configuration, tol: &Tolerances) -> Result<Coplanarity> {
    let rows = translated_frame(config)?;
    let m = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
    let sv = m.singular_values();
    let (max, min) = (sv.max(), sv.min());
    let residual = if max > 0.0 { min / max } else { 0.0 };
    Ok(Coplanarity { is_coplanar: residual < tol.coplanar, residual })
}

/// Klein-chart coordinates of a coplanar configuration in its own plane.
pub fn planar_klein_coords(config: &Configuration) -> Result<[Vector2<f64>; 4]> {
    let rows = translated_frame(config)?;
    let m = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("three singular values");
    let normal: Vector3<f64> = v_t.row(imin).transpose();
    let rot = Rotation3::rotation_between(&normal, &Vector3::z())
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
    let mut out = [Vector2::zeros(); 4];
    for (k, v) in std::iter::once(Vector3::zeros()).chain(rows).enumerate() {
        let r = rot * v;
        let p = Vector2::new(r.x, r.y);
        out[k] = p * (2.0 / (1.0 + p.norm_squared()));
    }
    Ok(out)
}

/// Closed point-in-triangle test with signed-area slack `tau`.
pub(crate) fn in_closed_triangle(p: Vector2<f64>, tri: [Vector2<f64>; 3], tau: f64) -> bool {
    let cross = |o: Vector2<f64>, u: Vector2<f64>, v: Vector2<f64>| (u - o).perp(&(v - o));
    let [a, b, c] = tri;
    let area = cross(a, b, c);
    if area.abs() <= tau {
        // degenerate triangle: inside iff on the segment spanned by the three
        let pts = [a, b, c];
        let (mut lo, mut hi) = (a, a);
        let mut best = 0.0;
        for &u in &pts {
            for &v in &pts {
                let d = (u - v).norm();
                if d > best {
                    best = d;
                    lo = u;
                    hi = v;
                }
            }
        }
        if best == 0.0 {
            return (p - a).norm() <= tau;
        }
        let dir = (hi - lo) / best;
        let along = (p - lo).dot(&dir);
        return dir.perp(&(p - lo)).abs() <= tau && along >= -tau && along <= best + tau;
    }
    let s = area.signum();
    s * cross(a, b, p) >= -tau && s * cross(b, c, p) >= -tau && s * cross(c, a, p) >= -tau
}

/// Index of a point lying in the hyperbolic convex hull of the other three.
///
/// Boundary points count as inside. Requires a coplanar configuration.
pub fn hull_membership(config: &Configuration, tol: &Tolerances) -> Result<Option<usize>> {
    let cop = coplanarity_test(config, tol)?;
    if !cop.is_coplanar {
        return Err(Error::NotCoplanar { residual: cop.residual });
    }
    let k = planar_klein_coords(config)?;
    for i in 0..4 {
        let others: Vec<Vector2<f64>> = (0..4).filter(|&j| j != i).map(|j| k[j]).collect();
        if in_closed_triangle(k[i], [others[0], others[1], others[2]], tol.hull) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Poincaré-disk point for a Klein-chart point.
pub(crate) fn klein_to_poincare(k: Vector2<f64>) -> Vector2<f64> {
    k / (1.0 + (1.0 - k.norm_squared()).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bp(x: f64, y: f64, z: f64) -> BallPoint {
        BallPoint::from_xyz(x, y, z).unwrap()
    }

    fn regular_tetrahedron(r: f64) -> Configuration {
        Configuration::regular_tetrahedron(r).unwrap()
    }

    #[test]
    fn translate_identity_and_center() {
        let x = bp(0.1, -0.4, 0.3);
        assert_eq!(mobius_translate(&BallPoint::ORIGIN, &x).unwrap(), x);
        let a = bp(0.5, 0.0, 0.0);
        assert!(mobius_translate(&a, &a).unwrap().norm() < 1e-16);
    }

    #[test]
    fn translate_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let a = BallPoint(random_in_ball(&mut rng, 0.95));
            let x = BallPoint(random_in_ball(&mut rng, 0.95));
            let back = mobius_translate(&a.neg(), &mobius_translate(&a, &x).unwrap()).unwrap();
            worst = worst.max((back.coords() - x.coords()).norm());
            let p = IdealPoint(random_unit(&mut rng));
            let q = mobius_translate(&a, &p).unwrap();
            assert!((q.coords().norm() - 1.0).abs() < 1e-12);
        }
        assert!(worst < 1e-12, "round trip error {worst}");
    }

    #[test]
    fn ball_point_rejects_sphere() {
        assert!(matches!(BallPoint::from_xyz(1.0, 0.0, 0.0), Err(Error::OutsideBall { .. })));
        assert!(BallPoint::from_xyz(f64::NAN, 0.0, 0.0).is_err());
        let p = IdealPoint::from_xyz(0.0, 3.0, 4.0).unwrap();
        assert!((p.coords().norm() - 1.0).abs() < crate::tolerances::SPHERE_NORM_TOL);
    }

    #[test]
    fn endpoint_examples() {
        let e = ideal_endpoint(&BallPoint::ORIGIN, &bp(0.3, 0.0, 0.0)).unwrap();
        assert!((e.coords() - Vector3::x()).norm() < 1e-15);
        let (a, b) = (bp(0.3, 0.0, 0.0), bp(-0.3, 0.0, 0.0));
        assert!((ideal_endpoint(&a, &b).unwrap().coords() + Vector3::x()).norm() < 1e-15);
        assert!((ideal_endpoint(&b, &a).unwrap().coords() - Vector3::x()).norm() < 1e-15);
        assert!(matches!(ideal_endpoint(&a, &a), Err(Error::DistinctPointsViolated { .. })));
        assert!(matches!(endpoint_oracle(&a, &a), Err(Error::DistinctPointsViolated { .. })));
    }

    #[test]
    fn oracle_straight_branch_matches() {
        let (a, b) = (bp(0.1, 0.2, -0.1), bp(-0.3, -0.6, 0.3));
        let e = ideal_endpoint(&a, &b).unwrap();
        let o = endpoint_oracle(&a, &b).unwrap();
        assert!(e.distance(&o) < 1e-14);
    }

    #[test]
    fn oracle_axis_swap_symmetry() {
        let (a, b) = (bp(0.2, 0.0, 0.0), bp(0.0, 0.2, 0.0));
        let t_ab = endpoint_oracle(&a, &b).unwrap();
        let t_ba = endpoint_oracle(&b, &a).unwrap();
        let c = t_ab.coords();
        // the reflection swapping e₁ and e₂ exchanges the two endpoints
        assert!((Vector3::new(c.y, c.x, c.z) - t_ba.coords()).norm() < 1e-14);
        assert!(c.z.abs() < 1e-15);
        assert!(t_ab.distance(&ideal_endpoint(&a, &b).unwrap()) < 1e-12);
    }

    #[test]
    fn oracle_agrees_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let a = BallPoint(random_in_ball(&mut rng, 0.99));
            let b = BallPoint(random_in_ball(&mut rng, 0.99));
            if hyperbolic_distance(&a, &b) < 1e-4 {
                continue;
            }
            let d = ideal_endpoint(&a, &b).unwrap().distance(&endpoint_oracle(&a, &b).unwrap());
            worst = worst.max(d);
        }
        assert!(worst < 1e-9, "worst deviation {worst}");
    }

    #[test]
    fn euclidean_limit_is_first_order() {
        let (a, b) = (Vector3::new(0.3, -0.2, 0.5), Vector3::new(-0.4, 0.1, 0.2));
        let expect = (b - a).normalize();
        let err = |eps: f64| {
            let e = ideal_endpoint(&BallPoint(a * eps), &BallPoint(b * eps)).unwrap();
            (e.coords() - expect).norm()
        };
        let ratio = err(1e-2) / err(1e-3);
        assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn distance_examples() {
        let x = bp(0.2, 0.1, -0.3);
        assert_eq!(hyperbolic_distance(&x, &x), 0.0);
        let d = hyperbolic_distance(&BallPoint::ORIGIN, &bp(0.5, 0.0, 0.0));
        assert!((d - 3f64.ln()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = BallPoint(random_in_ball(&mut rng, 0.99));
            let b = BallPoint(random_in_ball(&mut rng, 0.99));
            let (d1, d2) = (hyperbolic_distance(&a, &b), hyperbolic_distance(&b, &a));
            assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
        }
    }

    #[test]
    fn isometry_preserves_distance_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g = BallIsometry::random(&mut rng, 0.8);
            let h = BallIsometry::random(&mut rng, 0.8);
            let x = BallPoint(random_in_ball(&mut rng, 0.9));
            let y = BallPoint(random_in_ball(&mut rng, 0.9));
            let d0 = hyperbolic_distance(&x, &y);
            let d1 = hyperbolic_distance(&g.apply(&x).unwrap(), &g.apply(&y).unwrap());
            assert!((d0 - d1).abs() < 1e-9 * d0.max(1.0));
            let gh = g.compose(&h).unwrap();
            let direct = g.apply(&h.apply(&x).unwrap()).unwrap();
            assert!((gh.apply(&x).unwrap().coords() - direct.coords()).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_rotation() {
        let flip = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(BallIsometry::rotation(flip).is_err());
        assert!(BallIsometry::rotation(Matrix3::identity() * 1.01).is_err());
    }

    #[test]
    fn configuration_validation() {
        let base = [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.3]];
        assert!(Configuration::from_coords(base).is_ok());
        let mut dup = base;
        dup[3] = dup[2];
        assert!(matches!(Configuration::from_coords(dup), Err(Error::DistinctPointsViolated { i: 2, j: 3, .. })));
        let mut far = base;
        far[1] = [0.9995, 0.0, 0.0];
        assert!(matches!(Configuration::from_coords(far), Err(Error::RadiusLimit { .. })));
        let text = r#"{"points": [[0,0,0],[1.5,0,0],[0,0.3,0],[0,0,0.3]]}"#;
        assert!(Configuration::from_json(text, &Tolerances::default()).is_err());
        let text = r#"{"points": [[0,0,0],[0.3,0,0],[0,0.3,0]]}"#;
        assert!(matches!(Configuration::from_json(text, &Tolerances::default()), Err(Error::InvalidInput(_))));
        let c = Configuration::from_coords(base).unwrap();
        assert_eq!(Configuration::from_json(&c.to_json(), &Tolerances::default()).unwrap(), c);
    }

    #[test]
    fn coplanarity_examples() {
        let tol = Tolerances::default();
        let flat = Configuration::from_coords([[0.1, 0.2, 0.0], [-0.4, 0.1, 0.0], [0.3, -0.5, 0.0], [0.0, 0.6, 0.0]])
            .unwrap();
        let c = coplanarity_test(&flat, &tol).unwrap();
        assert!(c.is_coplanar && c.residual < 1e-15, "{c:?}");
        let t = coplanarity_test(&regular_tetrahedron(0.5), &tol).unwrap();
        assert!(!t.is_coplanar && t.residual > 0.1);
        assert!(matches!(hull_membership(&regular_tetrahedron(0.5), &tol), Err(Error::NotCoplanar { .. })));
    }

    #[test]
    fn coplanar_on_orthogonal_sphere() {
        // four points of a hyperbolic plane not through the origin
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tol = Tolerances::default();
        for _ in 0..100 {
            let mut pts = [BallPoint::ORIGIN; 4];
            let g = BallIsometry::random(&mut rng, 0.6);
            for p in pts.iter_mut() {
                let v = random_in_ball(&mut rng, 0.5);
                *p = g.apply(&BallPoint(Vector3::new(v.x, v.y, 0.0))).unwrap();
            }
            let config = Configuration::new(pts).unwrap();
            assert!(coplanarity_test(&config, &tol).unwrap().is_coplanar);
        }
    }

    fn from_klein(ks: [[f64; 2]; 4]) -> Configuration {
        let pts = ks.map(|k| {
            let p = klein_to_poincare(Vector2::new(k[0], k[1]));
            bp(p.x, p.y, 0.0)
        });
        Configuration::new(pts).unwrap()
    }

    #[test]
    fn hull_membership_examples() {
        let tol = Tolerances::default();
        let c = from_klein([[0.5, 0.0], [0.0, 0.0], [-0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(hull_membership(&c, &tol).unwrap(), Some(1));
        let c = from_klein([[0.5, 0.1], [0.03, 0.12], [-0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(hull_membership(&c, &tol).unwrap(), Some(1));
        let convex = from_klein([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]);
        assert_eq!(hull_membership(&convex, &tol).unwrap(), None);
    }

    #[test]
    fn hull_boundary_tie_break() {
        let tri = [Vector2::new(-0.5, 0.0), Vector2::new(0.5, 0.0), Vector2::new(0.0, 0.5)];
        // exact edge point and points just across the edge
        assert!(in_closed_triangle(Vector2::new(0.25, 0.0), tri, 1e-12));
        assert!(in_closed_triangle(Vector2::new(0.25, -1e-13), tri, 1e-12));
        assert!(!in_closed_triangle(Vector2::new(0.25, -1e-11), tri, 1e-12));
        let seg = [Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), Vector2::new(2.0, 0.0)];
        assert!(in_closed_triangle(Vector2::new(1.5, 0.0), seg, 1e-12));
        assert!(!in_closed_triangle(Vector2::new(2.5, 0.0), seg, 1e-12));
    }

    #[test]
    fn verdicts_invariant_under_isometries() {
        let tol = Tolerances::default();
        let tet = regular_tetrahedron(0.5);
        let flat_in = from_klein([[0.5, 0.1], [0.03, 0.12], [-0.5, 0.0], [0.0, 0.5]]);
        let flat_out = from_klein([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let g = BallIsometry::random(&mut rng, 0.4);
            assert!(!coplanarity_test(&g.apply_config(&tet).unwrap(), &tol).unwrap().is_coplanar);
            assert_eq!(hull_membership(&g.apply_config(&flat_in).unwrap(), &tol).unwrap(), Some(1));
            assert_eq!(hull_membership(&g.apply_config(&flat_out).unwrap(), &tol).unwrap(), None);
        }
    }
}
