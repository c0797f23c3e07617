//! Atiyah polynomials, the 4×4 coefficient matrix, and linear relations among
//! the elementary symmetric functions of the four root triplets.
//!
//! A relation c = (c₀, c₁, c₂, c₃) is read as
//! c₀σ₃ + c₁σ₂ + c₂σ₁ + c₃σ₀ = 0, with σ_k the multihomogeneous elementary
//! symmetric functions of a triplet. In the chart u = 1 this is
//! c₀s₃ + c₁s₂ + c₂s₁ + c₃ = 0. The relation is the symmetric trilinear form
//! G(w₁, w₂, w₃); its restriction to the diagonal is the binary cubic
//! g(u, v) = c₀v³ + 3c₁uv² + 3c₂u²v + c₃u³.

use nalgebra::{Matrix4, SMatrix, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball_model::{root_system, Configuration};
use crate::complex_json;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::riemann_sphere::{mobius_from_three_points_unchecked, MobiusMap, ProjPoint, RootSystem};
use crate::tolerances::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// (σ₀, σ₁, σ₂, σ₃) with σ_k = Σ over k-subsets S of ∏_{S} v · ∏_{not S} u.
pub fn sym_elem(w1: &ProjPoint, w2: &ProjPoint, w3: &ProjPoint) -> [Complex64; 4] {
    let (u1, v1, u2, v2, u3, v3) = (w1.u(), w1.v(), w2.u(), w2.v(), w3.u(), w3.v());
    [
        u1 * u2 * u3,
        v1 * u2 * u3 + u1 * v2 * u3 + u1 * u2 * v3,
        v1 * v2 * u3 + v1 * u2 * v3 + u1 * v2 * v3,
        v1 * v2 * v3,
    ]
}

/// Scale factor making `p` unit-norm with its first nonzero entry positive real.
fn unit_phase(p: &[Complex64; 4]) -> Complex64 {
    let norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let lead = p.iter().find(|z| z.norm() > 1e-14 * norm).copied().unwrap_or(ONE);
    lead.conj() / (lead.norm() * norm)
}

/// Coefficients of ∏_{j≠i}(u_ij v − v_ij u) in the basis v³, v²u, vu², u³,
/// scaled to unit norm with a positive real leading entry.
pub fn atiyah_polynomial(i: usize, rs: &RootSystem) -> [Complex64; 4] {
    let (col, _) = raw_column(&rs.triplet(i));
    col
}

fn raw_column(trip: &[ProjPoint; 3]) -> ([Complex64; 4], Complex64) {
    let s = sym_elem(&trip[0], &trip[1], &trip[2]);
    let p = [s[0], -s[1], s[2], -s[3]];
    let scale = unit_phase(&p);
    (p.map(|z| z * scale), scale)
}

/// The matrix whose column j holds the coefficients of p_j.
#[derive(Debug, Clone, Serialize)]
pub struct AtiyahMatrix {
    #[serde(serialize_with = "serialize_matrix4")]
    entries: Matrix4<Complex64>,
    /// Column j equals `column_scales[j]` times (σ₀, −σ₁, σ₂, −σ₃) of triplet j.
    #[serde(with = "complex_json::array4")]
    column_scales: [Complex64; 4],
}

fn serialize_matrix4<S: serde::Serializer>(m: &Matrix4<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: [[Complex64; 4]; 4] = [0, 1, 2, 3].map(|i| [0, 1, 2, 3].map(|j| m[(i, j)]));
    complex_json::matrix4::serialize(&rows, s)
}

impl AtiyahMatrix {
    pub fn from_root_system(rs: &RootSystem) -> Self {
        let mut entries = Matrix4::zeros();
        let mut column_scales = [ONE; 4];
        for j in 0..4 {
            let (col, scale) = raw_column(&rs.triplet(j));
            entries.set_column(j, &Vector4::from(col));
            column_scales[j] = scale;
        }
        Self { entries, column_scales }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn column_scales(&self) -> &[Complex64; 4] {
        &self.column_scales
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.determinant()
    }

    /// Singular values sorted in decreasing order.
    pub fn singular_values(&self) -> [f64; 4] {
        let sv = self.entries.singular_values();
        let mut out = [sv[0], sv[1], sv[2], sv[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Row covector (yᵀM)_j for the relation `c`.
    pub fn apply_relation(&self, c: &RelationVector) -> [Complex64; 4] {
        let y = c.covector();
        let row = Vector4::from(y).transpose() * self.entries;
        [row[0], row[1], row[2], row[3]]
    }
}

pub fn atiyah_matrix(config: &Configuration) -> Result<AtiyahMatrix> {
    Ok(AtiyahMatrix::from_root_system(&root_system(config)?))
}

/// |det M| for unit-norm columns; lies in [0, 1] by Hadamard's inequality.
pub fn independence_measure(m: &AtiyahMatrix) -> f64 {
    m.determinant().norm()
}

/// Candidate coefficients (c₀..c₃) of a relation, unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRelation", into = "RawRelation")]
pub struct RelationVector {
    c: [Complex64; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawRelation(#[serde(with = "complex_json::array4")] [Complex64; 4]);

impl TryFrom<RawRelation> for RelationVector {
    type Error = Error;
    fn try_from(r: RawRelation) -> Result<Self> {
        RelationVector::new(r.0)
    }
}

impl From<RelationVector> for RawRelation {
    fn from(r: RelationVector) -> Self {
        RawRelation(r.c)
    }
}

impl RelationVector {
    pub fn new(c: [Complex64; 4]) -> Result<Self> {
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidInput("relation vector must be nonzero and finite".into()));
        }
        Ok(Self { c: c.map(|z| z / norm) })
    }

    pub fn real(c: [f64; 4]) -> Result<Self> {
        Self::new(c.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn coefficients(&self) -> &[Complex64; 4] {
        &self.c
    }

    /// Relation from its row covector y with yᵀM = 0.
    pub fn from_covector(y: [Complex64; 4]) -> Result<Self> {
        Self::new([-y[3], y[2], -y[1], y[0]])
    }

    /// The row covector y with (yᵀM)_j = scale_j · evaluate_relation(c, triplet_j).
    pub fn covector(&self) -> [Complex64; 4] {
        let c = self.c;
        [c[3], -c[2], c[1], -c[0]]
    }

    /// Angle between the complex lines spanned by two relations.
    pub fn angle(&self, other: &RelationVector) -> f64 {
        let dot: Complex64 = self.c.iter().zip(&other.c).map(|(a, b)| a.conj() * b).sum();
        let phase = if dot.norm() > 0.0 { dot.conj() / dot.norm() } else { ONE };
        // chord between unit vectors after phase alignment; stable near 0
        let chord = self.c.iter().zip(&other.c).map(|(a, b)| (a - b * phase).norm_sqr()).sum::<f64>().sqrt();
        2.0 * (chord / 2.0).min(1.0).asin()
    }

    /// The relation whose cubic has the three given roots.
    pub fn from_roots(roots: [ProjPoint; 3]) -> Self {
        let s = sym_elem(&roots[0], &roots[1], &roots[2]);
        Self::new([s[0], -s[1] / 3.0, s[2] / 3.0, -s[3]]).expect("cubic with three roots is nonzero")
    }

    /// Push-forward under `m`: the relation satisfied by m·w₁, m·w₂, m·w₃
    /// whenever `self` is satisfied by w₁, w₂, w₃.
    pub fn transformed(&self, m: &MobiusMap) -> RelationVector {
        let inv = m.inverse();
        // images under m⁻¹ of the basis vectors e_u = (1, 0) and e_v = (0, 1)
        let eu = inv.apply_raw(ONE, ZERO);
        let ev = inv.apply_raw(ZERO, ONE);
        let g = |a: (Complex64, Complex64), b: (Complex64, Complex64), c: (Complex64, Complex64)| {
            trilinear_raw(&self.c, [a, b, c])
        };
        Self::new([g(ev, ev, ev), g(ev, ev, eu), g(ev, eu, eu), g(eu, eu, eu)]).expect("invertible action")
    }
}

impl MobiusMap {
    /// Action on an unnormalized homogeneous pair (u, v).
    pub(crate) fn apply_raw(&self, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
        let m = self.matrix();
        let col = m * Vector2::new(v, u);
        (col[1], col[0])
    }
}

fn trilinear_raw(c: &[Complex64; 4], w: [(Complex64, Complex64); 3]) -> Complex64 {
    let [(u1, v1), (u2, v2), (u3, v3)] = w;
    let s0 = u1 * u2 * u3;
    let s1 = v1 * u2 * u3 + u1 * v2 * u3 + u1 * u2 * v3;
    let s2 = v1 * v2 * u3 + v1 * u2 * v3 + u1 * v2 * v3;
    let s3 = v1 * v2 * v3;
    c[0] * s3 + c[1] * s2 + c[2] * s1 + c[3] * s0
}

/// c₀σ₃ + c₁σ₂ + c₂σ₁ + c₃σ₀.
pub fn evaluate_relation(c: &RelationVector, w1: &ProjPoint, w2: &ProjPoint, w3: &ProjPoint) -> Complex64 {
    trilinear_raw(&c.c, [(w1.u(), w1.v()), (w2.u(), w2.v()), (w3.u(), w3.v())])
}

/// The polarized trilinear form G; identical to [`evaluate_relation`].
pub fn trilinear_eval(c: &RelationVector, w1: &ProjPoint, w2: &ProjPoint, w3: &ProjPoint) -> Complex64 {
    evaluate_relation(c, w1, w2, w3)
}

/// Smallest-singular-value left null direction of M.
pub fn relation_nullvector(m: &AtiyahMatrix) -> (RelationVector, f64) {
    // yᵀM = 0 ⇔ Mᵀy = 0: take the right singular vector of Mᵀ
    let svd = m.entries.transpose().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sv = &svd.singular_values;
    let (imin, smin) = sv.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("4 values");
    let smax = sv.max();
    let y: [Complex64; 4] = [0, 1, 2, 3].map(|k| v_t[(imin, k)].conj());
    let residual = if smax > 0.0 { smin / smax } else { 0.0 };
    (RelationVector::from_covector(y).expect("singular vectors are unit norm"), residual)
}

/// Solves the relation for the third root given the first two.
pub fn complete_triplet(c: &RelationVector, w1: &ProjPoint, w2: &ProjPoint) -> Result<ProjPoint> {
    let [c0, c1, c2, c3] = c.c;
    let (u1, v1, u2, v2) = (w1.u(), w1.v(), w2.u(), w2.v());
    let mixed = v1 * u2 + u1 * v2;
    let u = c0 * v1 * v2 + c1 * mixed + c2 * u1 * u2;
    let v = -(c1 * v1 * v2 + c2 * mixed + c3 * u1 * u2);
    if u.norm().max(v.norm()) < 1e-14 {
        return Err(Error::Indeterminate(format!("relation is degenerate at the roots {w1:?}, {w2:?}")));
    }
    ProjPoint::new(u, v)
}

/// Scenario of a relation, by root multiplicities of its cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioTag {
    ThreeDistinct,
    DoubleRoot,
    TripleRoot,
}

impl ScenarioTag {
    pub const ALL: [ScenarioTag; 3] = [ScenarioTag::ThreeDistinct, ScenarioTag::DoubleRoot, ScenarioTag::TripleRoot];

    /// Normal forms: s₂/3 = 1, s₁/3 = 1 and s₃ = 0.
    pub fn standard_relation(&self) -> RelationVector {
        let c = match self {
            ScenarioTag::ThreeDistinct => [0.0, 1.0 / 3.0, 0.0, -1.0],
            ScenarioTag::DoubleRoot => [0.0, 0.0, 1.0 / 3.0, -1.0],
            ScenarioTag::TripleRoot => [1.0, 0.0, 0.0, 0.0],
        };
        RelationVector::real(c).expect("nonzero")
    }

    /// Root targets of the normal form, in the order used by the normalizer.
    pub fn standard_roots(&self) -> Vec<ProjPoint> {
        match self {
            ScenarioTag::ThreeDistinct => vec![ProjPoint::INFINITY, ProjPoint::real(1.0), ProjPoint::real(-1.0)],
            ScenarioTag::DoubleRoot => vec![ProjPoint::INFINITY, ProjPoint::real(1.0)],
            ScenarioTag::TripleRoot => vec![ProjPoint::ZERO],
        }
    }
}

/// A root of the relation cubic with its multiplicity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CubicRoot {
    pub root: ProjPoint,
    pub multiplicity: u8,
}

/// The binary cubic g(u, v) = G(w, w, w).
#[derive(Debug, Clone, Serialize)]
pub struct RelationCubic {
    /// Coefficients of v³, v²u, vu², u³: (c₀, 3c₁, 3c₂, c₃).
    #[serde(with = "complex_json::array4")]
    pub coefficients: [Complex64; 4],
    pub roots: Vec<CubicRoot>,
}

impl RelationCubic {
    pub fn eval(&self, w: &ProjPoint) -> Complex64 {
        let (u, v) = (w.u(), w.v());
        let [a, b, c, d] = self.coefficients;
        a * v * v * v + b * v * v * u + c * v * u * u + d * u * u * u
    }

    /// Roots listed with repetition.
    pub fn root_list(&self) -> Vec<ProjPoint> {
        self.roots.iter().flat_map(|r| std::iter::repeat(r.root).take(r.multiplicity as usize)).collect()
    }
}

/// Invariants of the cubic relative to ‖c‖: (|Δ|/‖c‖⁴, ‖Hessian‖/‖c‖²).
fn invariants(c: &[Complex64; 4]) -> (f64, f64) {
    let [a, b, cc, d] = *c;
    let h = [a * cc - b * b, a * d - b * cc, b * d - cc * cc];
    let disc = h[1] * h[1] - h[0] * h[2] * 4.0;
    let norm2: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let hnorm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (disc.norm() / (norm2 * norm2), hnorm / norm2)
}

fn largest(cands: &[(Complex64, Complex64)]) -> (Complex64, Complex64) {
    *cands
        .iter()
        .max_by(|x, y| (x.0.norm_sqr() + x.1.norm_sqr()).total_cmp(&(y.0.norm_sqr() + y.1.norm_sqr())))
        .expect("nonempty")
}

/// Projective root from a (v, u) pair.
fn root_vu(v: Complex64, u: Complex64) -> ProjPoint {
    ProjPoint::new(u, v).expect("nonzero root vector")
}

fn triple_root(c: &[Complex64; 4]) -> ProjPoint {
    let [a, b, cc, d] = *c;
    // g ∝ (p v + q u)³ gives (a, b, c, d) ∝ (p³, p²q, pq², q³); root v/u = −q/p
    let (v, u) = largest(&[(-b, a), (-cc, b), (-d, cc)]);
    root_vu(v, u)
}

fn double_and_simple(c: &[Complex64; 4]) -> (ProjPoint, ProjPoint) {
    let [a, b, cc, d] = *c;
    let (ha, hb, hc) = (a * cc - b * b, a * d - b * cc, b * d - cc * cc);
    // the Hessian is a square whose root is the double root
    let (v, u) = largest(&[(-hb / 2.0, ha), (-hc, hb / 2.0)]);
    let r = root_vu(v, u);
    let (xr, yr) = (r.v(), r.u());
    // g = L_r² (P v + Q u) with L_r = y_r v − x_r u; least squares for (P, Q)
    let sys = SMatrix::<Complex64, 4, 2>::new(
        yr * yr,
        ZERO,
        -(xr * yr) * 2.0,
        yr * yr,
        xr * xr,
        -(xr * yr) * 2.0,
        ZERO,
        xr * xr,
    );
    let rhs = Vector4::new(a, b * 3.0, cc * 3.0, d);
    let adj = sys.adjoint();
    let pq = (adj * sys).lu().solve(&(adj * rhs)).expect("rank 2 for a nonzero root");
    (r, root_vu(-pq[1], pq[0]))
}

/// Fixed twists moving roots off ∞ before affine root finding.
fn twists() -> [MobiusMap; 3] {
    let c = Complex64::new;
    [
        MobiusMap::new(c(1.0, 0.0), c(0.37, 0.21), c(-0.29, 0.43), c(1.0, 0.0)).expect("invertible"),
        MobiusMap::new(c(0.8, -0.1), c(-0.52, 0.33), c(0.61, 0.17), c(1.1, 0.2)).expect("invertible"),
        MobiusMap::new(c(1.0, 0.0), c(0.0, 0.0), c(0.9, -0.6), c(1.0, 0.0)).expect("invertible"),
    ]
}

fn distinct_roots(c: &RelationVector) -> [ProjPoint; 3] {
    for tw in twists() {
        let ct = c.transformed(&tw);
        let k = ct.c;
        if k[0].norm() < 1e-3 {
            continue;
        }
        // g(1, t) = c₀t³ + 3c₁t² + 3c₂t + c₃ in the twisted chart
        let p = Poly(vec![k[3], k[2] * 3.0, k[1] * 3.0, k[0]]);
        let roots = p.roots();
        if roots.len() == 3 {
            let back = tw.inverse();
            return [0, 1, 2].map(|i| back.apply_affine(roots[i]));
        }
    }
    unreachable!("the three twists cannot all send a root of a cubic to ∞")
}

/// Roots of g with multiplicities, using the scenario to resolve repeated roots.
fn cubic_roots(c: &RelationVector, tag: ScenarioTag) -> Vec<CubicRoot> {
    match tag {
        ScenarioTag::TripleRoot => vec![CubicRoot { root: triple_root(&c.c), multiplicity: 3 }],
        ScenarioTag::DoubleRoot => {
            let (d, s) = double_and_simple(&c.c);
            vec![CubicRoot { root: d, multiplicity: 2 }, CubicRoot { root: s, multiplicity: 1 }]
        }
        ScenarioTag::ThreeDistinct => {
            distinct_roots(c).into_iter().map(|root| CubicRoot { root, multiplicity: 1 }).collect()
        }
    }
}

/// Complete polarization: the cubic g with its projective roots.
pub fn polarize(c: &RelationVector) -> RelationCubic {
    let tag = classify_tag(c, &Tolerances::default());
    let k = c.c;
    RelationCubic { coefficients: [k[0], k[1] * 3.0, k[2] * 3.0, k[3]], roots: cubic_roots(c, tag) }
}

fn classify_tag(c: &RelationVector, tol: &Tolerances) -> ScenarioTag {
    let (disc, hess) = invariants(&c.c);
    if disc > tol.scenario {
        ScenarioTag::ThreeDistinct
    } else if hess <= tol.root {
        ScenarioTag::TripleRoot
    } else {
        ScenarioTag::DoubleRoot
    }
}

/// Scenario classification together with the normalizing Möbius map.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub tag: ScenarioTag,
    /// Carries the roots of g onto those of the normal form of `tag`.
    pub normalizer: MobiusMap,
    pub cubic: RelationCubic,
    /// |Δ| / ‖c‖⁴ of the cubic (0 when classified from roots).
    pub discriminant: f64,
    /// ‖Hessian‖ / ‖c‖² of the cubic (0 when classified from roots).
    pub hessian: f64,
}

/// Classifies by the discriminant and Hessian of g.
///
/// |Δ| > τ_scen gives three distinct roots; otherwise a vanishing Hessian
/// (g a perfect cube) gives a triple root, and anything else a double root.
pub fn classify_scenario(c: &RelationVector, tol: &Tolerances) -> Result<Scenario> {
    let tag = classify_tag(c, tol);
    let (discriminant, hessian) = invariants(&c.c);
    let k = c.c;
    let cubic = RelationCubic { coefficients: [k[0], k[1] * 3.0, k[2] * 3.0, k[3]], roots: cubic_roots(c, tag) };
    let normalizer = normalizer_for(tag, &cubic.roots)?;
    Ok(Scenario { tag, normalizer, cubic, discriminant, hessian })
}

/// Classifies a cubic given by its three roots, clustering roots closer than τ_root.
pub fn classify_roots(roots: [ProjPoint; 3], tol: &Tolerances) -> Result<Scenario> {
    let close = |a: usize, b: usize| roots[a].distance(&roots[b]) < tol.root;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let n_close = pairs.iter().filter(|&&(a, b)| close(a, b)).count();
    let (tag, list) = match n_close {
        0 => (ScenarioTag::ThreeDistinct, roots.iter().map(|&root| CubicRoot { root, multiplicity: 1 }).collect()),
        1 => {
            let &(a, b) = pairs.iter().find(|&&(a, b)| close(a, b)).expect("one close pair");
            let s = 3 - a - b;
            (
                ScenarioTag::DoubleRoot,
                vec![CubicRoot { root: roots[a], multiplicity: 2 }, CubicRoot { root: roots[s], multiplicity: 1 }],
            )
        }
        _ => (ScenarioTag::TripleRoot, vec![CubicRoot { root: roots[0], multiplicity: 3 }]),
    };
    let rel = RelationVector::from_roots(roots);
    let k = rel.c;
    let cubic = RelationCubic { coefficients: [k[0], k[1] * 3.0, k[2] * 3.0, k[3]], roots: list };
    let normalizer = normalizer_for(tag, &cubic.roots)?;
    Ok(Scenario { tag, normalizer, cubic, discriminant: 0.0, hessian: 0.0 })
}

/// Reference points used to pin the freedom left by repeated roots.
fn reference_points() -> [ProjPoint; 6] {
    [
        ProjPoint::ZERO,
        ProjPoint::real(1.0),
        ProjPoint::INFINITY,
        ProjPoint::real(-1.0),
        ProjPoint::affine(Complex64::new(0.0, 1.0)),
        ProjPoint::affine(Complex64::new(0.0, -1.0)),
    ]
}

fn pick_references(avoid: &[ProjPoint], prefer: &[ProjPoint], count: usize) -> Vec<ProjPoint> {
    let mut chosen: Vec<ProjPoint> = Vec::new();
    for cand in prefer.iter().chain(reference_points().iter()) {
        if chosen.len() == count {
            break;
        }
        let far = avoid.iter().chain(chosen.iter()).all(|p| p.distance(cand) > 1e-3);
        if far {
            chosen.push(*cand);
        }
    }
    chosen
}

fn normalizer_for(tag: ScenarioTag, roots: &[CubicRoot]) -> Result<MobiusMap> {
    let pts: Vec<ProjPoint> = roots.iter().map(|r| r.root).collect();
    match tag {
        ScenarioTag::ThreeDistinct => {
            let targets = [ProjPoint::INFINITY, ProjPoint::real(1.0), ProjPoint::real(-1.0)];
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            // every assignment normalizes g; choose the one nearest the identity
            let mut best: Option<(f64, MobiusMap)> = None;
            for perm in perms {
                let m = mobius_from_three_points_unchecked(perm.map(|k| pts[k]), targets)?;
                let d = m.distance(&MobiusMap::identity());
                if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                    best = Some((d, m));
                }
            }
            Ok(best.expect("six candidates").1)
        }
        ScenarioTag::DoubleRoot => {
            let r = pick_references(&pts, &[ProjPoint::ZERO], 1);
            mobius_from_three_points_unchecked([pts[0], pts[1], r[0]], [ProjPoint::INFINITY, ProjPoint::real(1.0), ProjPoint::ZERO])
        }
        ScenarioTag::TripleRoot => {
            let r = pick_references(&pts, &[ProjPoint::real(1.0), ProjPoint::INFINITY], 2);
            mobius_from_three_points_unchecked([pts[0], r[0], r[1]], [ProjPoint::ZERO, ProjPoint::real(1.0), ProjPoint::INFINITY])
        }
    }
}

/// Classifies `c` and returns it pushed through its normalizer, which is
/// proportional to the normal form of its scenario.
pub fn normalize_relation(c: &RelationVector, tol: &Tolerances) -> Result<(Scenario, RelationVector)> {
    let sc = classify_scenario(c, tol)?;
    let normalized = c.transformed(&sc.normalizer);
    Ok((sc, normalized))
}
