//! The complex projective line in homogeneous coordinates, its identification
//! with the sphere at infinity, and Möbius maps.
//!
//! A point is a pair (u, v) with affine coordinate t = v/u, so ∞ is (0, 1).
//! The 2×2 matrix (a b; c d) acts by t ↦ (a t + b)/(c t + d), i.e. on the
//! column (v, u).

use nalgebra::{Matrix2, Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball_model::{BallIsometry, IdealPoint};
use crate::complex_json;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default threshold of the projective equality predicate.
pub const PROJ_EQ_TOL: f64 = 1e-10;

/// A point of CP¹, stored with max(|u|, |v|) = 1.
///
/// `==` compares representatives; use [`ProjPoint::approx_eq`] for points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProj", into = "RawProj")]
pub struct ProjPoint {
    u: Complex64,
    v: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawProj {
    #[serde(with = "complex_json")]
    u: Complex64,
    #[serde(with = "complex_json")]
    v: Complex64,
}

impl TryFrom<RawProj> for ProjPoint {
    type Error = Error;
    fn try_from(r: RawProj) -> Result<Self> {
        ProjPoint::new(r.u, r.v)
    }
}

impl From<ProjPoint> for RawProj {
    fn from(p: ProjPoint) -> Self {
        RawProj { u: p.u, v: p.v }
    }
}

impl ProjPoint {
    pub const INFINITY: ProjPoint = ProjPoint { u: ZERO, v: ONE };
    pub const ZERO: ProjPoint = ProjPoint { u: ONE, v: ZERO };

    pub fn new(u: Complex64, v: Complex64) -> Result<Self> {
        let scale = u.norm().max(v.norm());
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Degenerate(format!("homogeneous pair ({u}, {v}) is not a point of CP¹")));
        }
        Ok(Self { u: u / scale, v: v / scale })
    }

    /// The point with affine coordinate `t`.
    pub fn affine(t: Complex64) -> Self {
        Self::new(ONE, t).expect("finite affine coordinate")
    }

    pub fn real(t: f64) -> Self {
        Self::affine(Complex64::new(t, 0.0))
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// Affine coordinate v/u, `None` at ∞.
    pub fn to_affine(&self) -> Option<Complex64> {
        if self.u == ZERO {
            None
        } else {
            Some(self.v / self.u)
        }
    }

    pub fn is_infinity(&self, tol: f64) -> bool {
        self.u.norm() <= tol
    }

    /// Bracket u₁v₂ − v₁u₂; vanishes exactly when the points coincide.
    pub fn bracket(&self, other: &ProjPoint) -> Complex64 {
        self.u * other.v - self.v * other.u
    }

    /// Scale-free distance |u₁v₂ − u₂v₁| / (‖w₁‖‖w₂‖), the sine of the
    /// Fubini–Study angle (half the chordal distance on the sphere).
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let n1 = (self.u.norm_sqr() + self.v.norm_sqr()).sqrt();
        let n2 = (other.u.norm_sqr() + other.v.norm_sqr()).sqrt();
        self.bracket(other).norm() / (n1 * n2)
    }

    /// Projective equality |u₁v₂ − u₂v₁| < tol · max-norms.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        let s1 = self.u.norm().max(self.v.norm());
        let s2 = other.u.norm().max(other.v.norm());
        self.bracket(other).norm() < tol * s1 * s2
    }

    /// Same point, homogeneous pair multiplied by `lambda` without renormalizing.
    pub fn scaled(&self, lambda: Complex64) -> ProjPoint {
        ProjPoint { u: self.u * lambda, v: self.v * lambda }
    }

    fn column(&self) -> Vector2<Complex64> {
        Vector2::new(self.v, self.u)
    }

    fn from_column(c: Vector2<Complex64>) -> Result<Self> {
        Self::new(c[1], c[0])
    }
}

/// Stereographic projection from the north pole: (x, y, z) ↦ (x + iy)/(1 − z).
pub fn stereographic(p: &IdealPoint) -> ProjPoint {
    let c = p.coords();
    let w = Complex64::new(c.x, c.y);
    // (1 − z, x + iy) and (x − iy, 1 + z) are proportional on the sphere
    let pair = if c.z <= 0.0 {
        (Complex64::new(1.0 - c.z, 0.0), w)
    } else {
        (w.conj(), Complex64::new(1.0 + c.z, 0.0))
    };
    ProjPoint::new(pair.0, pair.1).expect("one component is at least 1")
}

/// Inverse of [`stereographic`].
pub fn inverse_stereographic(p: &ProjPoint) -> IdealPoint {
    let (u, v) = (p.u, p.v);
    let n = u.norm_sqr() + v.norm_sqr();
    let w = v * u.conj() * (2.0 / n);
    let z = (v.norm_sqr() - u.norm_sqr()) / n;
    IdealPoint::new(Vector3::new(w.re, w.im, z)).expect("nonzero image")
}

/// A Möbius transformation t ↦ (a t + b)/(c t + d), stored with det = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMobius", into = "RawMobius")]
pub struct MobiusMap {
    m: Matrix2<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMobius {
    #[serde(with = "complex_json::array4")]
    entries: [Complex64; 4],
}

impl TryFrom<RawMobius> for MobiusMap {
    type Error = Error;
    fn try_from(r: RawMobius) -> Result<Self> {
        let [a, b, c, d] = r.entries;
        MobiusMap::new(a, b, c, d)
    }
}

impl From<MobiusMap> for RawMobius {
    fn from(m: MobiusMap) -> Self {
        RawMobius { entries: [m.m[(0, 0)], m.m[(0, 1)], m.m[(1, 0)], m.m[(1, 1)]] }
    }
}

impl MobiusMap {
    pub fn identity() -> Self {
        Self { m: Matrix2::identity() }
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::from_matrix(Matrix2::new(a, b, c, d))
    }

    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Degenerate("Möbius matrix is zero or non-finite".into()));
        }
        let m = m / Complex64::new(scale, 0.0);
        let det = m.determinant();
        if det.norm() < 1e-12 {
            return Err(Error::Degenerate(format!("Möbius matrix is singular (|det| = {:e})", det.norm())));
        }
        Ok(Self { m: m / det.sqrt() })
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::from_column(self.m * p.column()).expect("invertible map keeps points nonzero")
    }

    pub fn apply_affine(&self, t: Complex64) -> ProjPoint {
        self.apply(&ProjPoint::affine(t))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        Self::from_matrix(self.m * other.m).expect("product of invertible maps")
    }

    pub fn inverse(&self) -> MobiusMap {
        let (a, b, c, d) = (self.m[(0, 0)], self.m[(0, 1)], self.m[(1, 0)], self.m[(1, 1)]);
        Self::from_matrix(Matrix2::new(d, -b, -c, a)).expect("adjugate of invertible map")
    }

    /// Distance to another map in PSL(2, C): min over the sign ambiguity.
    pub fn distance(&self, other: &MobiusMap) -> f64 {
        (self.m - other.m).norm().min((self.m + other.m).norm())
    }

    /// t ↦ 1/(t − t₀), which sends `t0` to ∞ and ∞ to 0.
    pub fn send_to_infinity(t0: Complex64) -> MobiusMap {
        Self::new(ZERO, ONE, ONE, -t0).expect("determinant is −1")
    }

    /// The map sending p₁, p₂, p₃ to 0, 1, ∞.
    fn to_standard_frame(p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint, tol: f64) -> Result<Matrix2<Complex64>> {
        for (x, y, what) in [(p1, p2, "1,2"), (p1, p3, "1,3"), (p2, p3, "2,3")] {
            if x.bracket(y).norm() <= tol {
                return Err(Error::Degenerate(format!("points {what} of the frame coincide")));
            }
        }
        // row functional vanishing at w: f_w(x) = u_w·v − v_w·u on the column (v, u)
        let f = |w: &ProjPoint, x: &ProjPoint| w.u * x.v - w.v * x.u;
        let (l1, l3) = (f(p3, p2), f(p1, p2));
        Ok(Matrix2::new(l1 * p1.u, -l1 * p1.v, l3 * p3.u, -l3 * p3.v))
    }
}

/// Three-point map requiring only exact distinctness and skipping verification.
pub(crate) fn mobius_from_three_points_unchecked(p: [ProjPoint; 3], q: [ProjPoint; 3]) -> Result<MobiusMap> {
    let sp = MobiusMap::to_standard_frame(&p[0], &p[1], &p[2], 0.0)?;
    let sq = MobiusMap::to_standard_frame(&q[0], &q[1], &q[2], 0.0)?;
    let sq_inv = MobiusMap::from_matrix(sq)?.inverse();
    Ok(sq_inv.compose(&MobiusMap::from_matrix(sp)?))
}

/// The unique Möbius map with p_k ↦ q_k.
pub fn mobius_from_three_points(p: [ProjPoint; 3], q: [ProjPoint; 3]) -> Result<MobiusMap> {
    let tol = PROJ_EQ_TOL;
    for (x, y) in [(0, 1), (0, 2), (1, 2)] {
        for pts in [&p, &q] {
            if pts[x].approx_eq(&pts[y], tol) {
                return Err(Error::Degenerate(format!("points {},{} of the frame coincide", x + 1, y + 1)));
            }
        }
    }
    let map = mobius_from_three_points_unchecked(p, q)?;
    for k in 0..3 {
        let got = map.apply(&p[k]);
        if got.distance(&q[k]) > 1e-10 {
            return Err(Error::InternalConsistency(format!(
                "three-point map misses target {k} by {:e}",
                got.distance(&q[k])
            )));
        }
    }
    Ok(map)
}

/// The Möbius map induced on the sphere at infinity by a ball isometry.
pub fn boundary_action(g: &BallIsometry) -> Result<MobiusMap> {
    let refs = [
        IdealPoint::from_xyz(0.0, 0.0, -1.0)?,
        IdealPoint::from_xyz(1.0, 0.0, 0.0)?,
        IdealPoint::from_xyz(0.0, 0.0, 1.0)?,
    ];
    let src = refs.map(|r| stereographic(&r));
    let mut dst = [ProjPoint::ZERO; 3];
    for (d, r) in dst.iter_mut().zip(&refs) {
        *d = stereographic(&g.apply_ideal(r)?);
    }
    let map = mobius_from_three_points(src, dst)?;
    let check = IdealPoint::from_xyz(0.0, 1.0, 0.0)?;
    let expected = stereographic(&g.apply_ideal(&check)?);
    let err = map.apply(&stereographic(&check)).distance(&expected);
    if err > 1e-9 {
        return Err(Error::InternalConsistency(format!("boundary action misses the check point by {err:e}")));
    }
    Ok(map)
}


/// The twelve ideal endpoints t_ij (i ≠ j) of a configuration, as points of
/// CP¹ together with their preimages on the sphere.
#[derive(Debug, Clone, Serialize)]
#[serde(into = "Vec<RootEntry>")]
pub struct RootSystem {
    roots: [[ProjPoint; 4]; 4],
    ideal: [[IdealPoint; 4]; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct RootEntry {
    pub i: usize,
    pub j: usize,
    pub t: ProjPoint,
    pub ideal: IdealPoint,
}

impl From<RootSystem> for Vec<RootEntry> {
    fn from(rs: RootSystem) -> Self {
        rs.entries().collect()
    }
}

impl RootSystem {
    /// Builds from ideal endpoints indexed `[i][j]`; diagonal entries are ignored.
    pub fn from_ideal(ideal: [[IdealPoint; 4]; 4]) -> Self {
        let roots = ideal.map(|row| row.map(|p| stereographic(&p)));
        Self { roots, ideal }
    }

    /// Builds from the four triplets `triplets[i] = (t_ij)_{j ≠ i}` ordered by `j`.
    pub fn from_triplets(triplets: [[ProjPoint; 3]; 4]) -> Self {
        let mut roots = [[ProjPoint::INFINITY; 4]; 4];
        for (i, trip) in triplets.iter().enumerate() {
            for (k, j) in (0..4).filter(|&j| j != i).enumerate() {
                roots[i][j] = trip[k];
            }
        }
        let ideal = roots.map(|row| row.map(|p| inverse_stereographic(&p)));
        Self { roots, ideal }
    }

    pub fn get(&self, i: usize, j: usize) -> ProjPoint {
        assert!(i != j, "the diagonal of a root system is unset");
        self.roots[i][j]
    }

    pub fn ideal(&self, i: usize, j: usize) -> IdealPoint {
        assert!(i != j, "the diagonal of a root system is unset");
        self.ideal[i][j]
    }

    /// (t_ij)_{j ≠ i} ordered by `j`.
    pub fn triplet(&self, i: usize) -> [ProjPoint; 3] {
        let mut out = [ProjPoint::INFINITY; 3];
        for (k, j) in (0..4).filter(|&j| j != i).enumerate() {
            out[k] = self.roots[i][j];
        }
        out
    }

    pub fn triplets(&self) -> [[ProjPoint; 3]; 4] {
        [0, 1, 2, 3].map(|i| self.triplet(i))
    }

    pub fn entries(&self) -> impl Iterator<Item = RootEntry> + '_ {
        (0..4).flat_map(move |i| {
            (0..4).filter(move |&j| j != i).map(move |j| RootEntry {
                i,
                j,
                t: self.roots[i][j],
                ideal: self.ideal[i][j],
            })
        })
    }

    /// Image under a Möbius map acting on every root.
    pub fn transformed(&self, m: &MobiusMap) -> RootSystem {
        let roots = self.roots.map(|row| row.map(|p| m.apply(&p)));
        let ideal = roots.map(|row| row.map(|p| inverse_stereographic(&p)));
        RootSystem { roots, ideal }
    }

    /// Number of projectively distinct roots.
    pub fn distinct_count(&self, tol: f64) -> usize {
        let mut seen: Vec<ProjPoint> = Vec::new();
        for e in self.entries() {
            if !seen.iter().any(|s| s.approx_eq(&e.t, tol)) {
                seen.push(e.t);
            }
        }
        seen.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball_model::random_unit;
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_proj(rng: &mut ChaCha8Rng) -> ProjPoint {
        stereographic(&IdealPoint::new(random_unit(rng)).unwrap())
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MobiusMap {
        let mut z = || c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        MobiusMap::new(z(), z(), z(), z()).unwrap()
    }

    #[test]
    fn stereographic_examples() {
        let sp = |x, y, z| stereographic(&IdealPoint::from_xyz(x, y, z).unwrap());
        assert!(sp(0.0, 0.0, 1.0).approx_eq(&ProjPoint::INFINITY, 1e-15));
        assert!(sp(0.0, 0.0, 1.0).to_affine().is_none());
        assert_eq!(sp(0.0, 0.0, -1.0).to_affine(), Some(c(0.0, 0.0)));
        assert!((sp(1.0, 0.0, 0.0).to_affine().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((sp(0.0, 1.0, 0.0).to_affine().unwrap() - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_stereographic_examples() {
        let n = inverse_stereographic(&ProjPoint::INFINITY);
        assert!((n.coords() - Vector3::z()).norm() < 1e-15);
        let s = inverse_stereographic(&ProjPoint::ZERO);
        assert!((s.coords() + Vector3::z()).norm() < 1e-15);
    }

    #[test]
    fn stereographic_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let p = IdealPoint::new(random_unit(&mut rng)).unwrap();
            let back = inverse_stereographic(&stereographic(&p));
            assert!(back.distance(&p) < 1e-12);
            let w = random_proj(&mut rng);
            assert!(stereographic(&inverse_stereographic(&w)).distance(&w) < 1e-12);
        }
    }

    #[test]
    fn mobius_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let id = MobiusMap::identity();
        for _ in 0..100 {
            let p = random_proj(&mut rng);
            assert!(id.apply(&p).distance(&p) < 1e-15);
        }
        let inv = MobiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(inv.apply(&ProjPoint::ZERO).approx_eq(&ProjPoint::INFINITY, 1e-15));
        assert!(inv.apply(&ProjPoint::INFINITY).approx_eq(&ProjPoint::ZERO, 1e-15));
        let aff = MobiusMap::new(c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((aff.apply_affine(c(3.0, 0.0)).to_affine().unwrap() - c(7.0, 0.0)).norm() < 1e-14);
        assert!(MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let (m1, m2, p) = (random_map(&mut rng), random_map(&mut rng), random_proj(&mut rng));
            let d = m1.apply(&m2.apply(&p)).distance(&m1.compose(&m2).apply(&p));
            worst = worst.max(d);
        }
        assert!(worst < 1e-12, "worst {worst}");
    }

    #[test]
    fn three_point_maps() {
        let std = [ProjPoint::ZERO, ProjPoint::real(1.0), ProjPoint::INFINITY];
        let id = mobius_from_three_points(std, std).unwrap();
        assert!(id.distance(&MobiusMap::identity()) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let p = [random_proj(&mut rng), random_proj(&mut rng), random_proj(&mut rng)];
            let q = [random_proj(&mut rng), random_proj(&mut rng), random_proj(&mut rng)];
            let m = mobius_from_three_points(p, q).unwrap();
            let back = mobius_from_three_points(q, p).unwrap();
            assert!(back.compose(&m).distance(&MobiusMap::identity()) < 1e-8);
        }
        let dup = [ProjPoint::ZERO, ProjPoint::ZERO, ProjPoint::INFINITY];
        assert!(matches!(mobius_from_three_points(dup, std), Err(Error::Degenerate(_))));
        assert!(matches!(mobius_from_three_points(std, dup), Err(Error::Degenerate(_))));
    }

    #[test]
    fn scenario_a_targets() {
        // roots of the scenario-a normal form u v² − u³ are ∞, 1, −1
        let targets = [ProjPoint::INFINITY, ProjPoint::real(1.0), ProjPoint::real(-1.0)];
        let src = [ProjPoint::real(2.0), ProjPoint::affine(c(0.0, 1.0)), ProjPoint::real(-3.0)];
        let m = mobius_from_three_points(src, targets).unwrap();
        for k in 0..3 {
            assert!(m.apply(&src[k]).distance(&targets[k]) < 1e-12);
        }
    }

    #[test]
    fn boundary_action_examples() {
        let id = boundary_action(&BallIsometry::identity()).unwrap();
        assert!(id.distance(&MobiusMap::identity()) < 1e-12);
        let half_turn = BallIsometry::rotation(Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0))).unwrap();
        let m = boundary_action(&half_turn).unwrap();
        let minus = MobiusMap::new(c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(m.distance(&minus) < 1e-12);
    }

    #[test]
    fn boundary_action_conjugates_stereographic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let g = BallIsometry::random(&mut rng, 0.9);
            let m = boundary_action(&g).unwrap();
            for _ in 0..20 {
                let p = IdealPoint::new(random_unit(&mut rng)).unwrap();
                let lhs = stereographic(&g.apply_ideal(&p).unwrap());
                let rhs = m.apply(&stereographic(&p));
                assert!(lhs.distance(&rhs) < 1e-9);
            }
        }
    }

    #[test]
    fn boundary_action_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let g = BallIsometry::random(&mut rng, 0.8);
            let h = BallIsometry::random(&mut rng, 0.8);
            let lhs = boundary_action(&g).unwrap().compose(&boundary_action(&h).unwrap());
            let rhs = boundary_action(&g.compose(&h).unwrap()).unwrap();
            let p = random_proj(&mut rng);
            assert!(lhs.apply(&p).approx_eq(&rhs.apply(&p), 1e-8));
        }
    }

    #[test]
    fn projective_equality_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let p = random_proj(&mut rng);
            let near = ProjPoint::new(p.u(), p.v() + c(rng.random_range(-1e-9..1e-9), 0.0)).unwrap();
            let q = random_proj(&mut rng);
            let mag = 10f64.powf(rng.random_range(-6.0..6.0));
            let lambda = Complex64::from_polar(mag, rng.random_range(0.0..6.28));
            for (a, b) in [(p, near), (p, q), (near, q)] {
                let base = a.distance(&b);
                assert_eq!(a.distance(&b), b.distance(&a));
                assert!((a.scaled(lambda).distance(&b) - base).abs() <= 1e-12 * base + 1e-15);
            }
        }
    }
}
