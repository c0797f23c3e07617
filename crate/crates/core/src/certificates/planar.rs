//! Planar predicates in an affine chart of the Riemann sphere.
//!
//! Points are complex numbers; a line is {x : ⟨x, n⟩ = offset} with n a unit
//! complex number and ⟨a, b⟩ = Re(ā b). All hulls and domains are closed.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex_json;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::riemann_sphere::ProjPoint;

/// Directions sampled by [`line_stabs_all`] over [0, π).
pub const STAB_DIRECTIONS: usize = 4096;

/// Refinement rounds after the grid sweep.
pub const STAB_REFINEMENTS: usize = 2;

pub(crate) fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    let (u, v) = (a - o, b - o);
    u.re * v.im - u.im * v.re
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (dot(p - a, d) / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Convex hull with vertices in counter-clockwise order. One vertex for a
/// point set, two for a segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hull {
    #[serde(with = "complex_json::vec")]
    vertices: Vec<Complex64>,
}

/// Andrew's monotone chain; collinear boundary points are dropped.
pub fn convex_hull(points: &[Complex64]) -> Hull {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return Hull { vertices: pts };
    }
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Hull { vertices: lower }
}

impl Hull {
    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Euclidean distance to the hull when outside, minus the distance to the
    /// boundary when inside a two-dimensional hull.
    pub fn signed_distance(&self, p: Complex64) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (p - self.vertices[0]).norm(),
            2 => segment_distance(p, self.vertices[0], self.vertices[1]),
            _ => {
                let mut inside = true;
                let mut depth = f64::INFINITY;
                for (a, b) in self.edges() {
                    let side = cross(a, b, p) / (b - a).norm();
                    inside &= side >= 0.0;
                    depth = depth.min(side);
                }
                if inside {
                    -depth
                } else {
                    self.edges().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub fn contains(&self, p: Complex64, tau: f64) -> bool {
        self.signed_distance(p) <= tau
    }

    /// (min, max) of ⟨x, n⟩ over the hull.
    pub fn projection(&self, n: Complex64) -> (f64, f64) {
        self.vertices
            .iter()
            .map(|&v| dot(v, n))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }

    /// Unit directions whose lines can separate this hull from another
    /// convex set: edge normals and edge directions.
    fn axes(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let d = b - a;
            if d.norm() > 0.0 {
                let d = d / d.norm();
                out.push(d);
                out.push(d * Complex64::i());
            }
        }
        out
    }
}

/// Largest gap between the projections of the two hulls over candidate axes;
/// positive exactly when a separating line exists.
pub fn hull_separation(h1: &Hull, h2: &Hull) -> (f64, Complex64) {
    let mut axes = h1.axes();
    axes.extend(h2.axes());
    for &a in &h1.vertices {
        for &b in &h2.vertices {
            let d = b - a;
            if d.norm() > 0.0 {
                axes.push(d / d.norm());
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
    for n in axes {
        let (lo1, hi1) = h1.projection(n);
        let (lo2, hi2) = h2.projection(n);
        let gap = (lo2 - hi1).max(lo1 - hi2);
        if gap > best.0 {
            // orient n from h1 toward h2
            best = (gap, if lo2 - hi1 >= lo1 - hi2 { n } else { -n });
        }
    }
    best
}

/// Separating-axis test with margin `tau`; touching closed hulls intersect.
pub fn hulls_disjoint(h1: &Hull, h2: &Hull, tau: f64) -> bool {
    hull_separation(h1, h2).0 > tau
}

/// The line {x : ⟨x, normal⟩ = offset}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    #[serde(with = "complex_json")]
    pub normal: Complex64,
    pub offset: f64,
}

impl Line {
    pub const REAL_AXIS: Line = Line { normal: Complex64::new(0.0, 1.0), offset: 0.0 };

    /// Distance from the line to the hull (0 when they meet).
    pub fn miss(&self, h: &Hull) -> f64 {
        let (lo, hi) = h.projection(self.normal);
        (lo - self.offset).max(self.offset - hi).max(0.0)
    }

    pub fn meets(&self, h: &Hull, tau: f64) -> bool {
        self.miss(h) <= tau
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabResult {
    Witness { line: Line, gap: f64 },
    NoneWithinResolution { best_gap: f64 },
}

impl StabResult {
    pub fn witness(&self) -> Option<&Line> {
        match self {
            StabResult::Witness { line, .. } => Some(line),
            StabResult::NoneWithinResolution { .. } => None,
        }
    }
}

fn stab_gap(hulls: &[Hull], theta: f64) -> (f64, f64) {
    let n = Complex64::from_polar(1.0, theta);
    let mut max_lo = f64::NEG_INFINITY;
    let mut min_hi = f64::INFINITY;
    for h in hulls {
        let (lo, hi) = h.projection(n);
        max_lo = max_lo.max(lo);
        min_hi = min_hi.min(hi);
    }
    (max_lo - min_hi, 0.5 * (max_lo + min_hi))
}

/// Searches for one line meeting every hull.
///
/// A line with normal direction θ exists iff max_i lo_i ≤ min_i hi_i for the
/// projection intervals [lo_i, hi_i]. The gap max lo − min hi is swept over
/// [`STAB_DIRECTIONS`] directions and refined around the best; a witness is
/// re-verified against every hull before it is returned.
pub fn line_stabs_all(hulls: &[Hull], tau: f64) -> StabResult {
    if hulls.is_empty() {
        return StabResult::Witness { line: Line::REAL_AXIS, gap: 0.0 };
    }
    let mut step = std::f64::consts::PI / STAB_DIRECTIONS as f64;
    let mut best_theta = 0.0;
    let mut best = stab_gap(hulls, 0.0);
    for k in 1..STAB_DIRECTIONS {
        let theta = k as f64 * step;
        let g = stab_gap(hulls, theta);
        if g.0 < best.0 {
            best = g;
            best_theta = theta;
        }
    }
    for _ in 0..STAB_REFINEMENTS {
        step *= 0.5;
        for theta in [best_theta - step, best_theta + step] {
            let g = stab_gap(hulls, theta);
            if g.0 < best.0 {
                best = g;
                best_theta = theta;
            }
        }
    }
    if best.0 <= tau {
        let line = Line { normal: Complex64::from_polar(1.0, best_theta), offset: best.1 };
        if hulls.iter().all(|h| line.meets(h, tau)) {
            return StabResult::Witness { line, gap: best.0 };
        }
    }
    StabResult::NoneWithinResolution { best_gap: best.0 }
}

/// Closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk {
    #[serde(with = "complex_json")]
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    fn contains_with(&self, p: Complex64, slack: f64) -> bool {
        (p - self.center).norm() <= self.radius + slack
    }

    pub fn disjoint(&self, other: &Disk, tau: f64) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius + tau
    }
}

fn diameter_disk(a: Complex64, b: Complex64) -> Disk {
    Disk { center: (a + b) * 0.5, radius: (a - b).norm() * 0.5 }
}

fn circumdisk(a: Complex64, b: Complex64, c: Complex64) -> Disk {
    let (ba, ca) = (b - a, c - a);
    let d = 2.0 * (ba.re * ca.im - ba.im * ca.re);
    let scale = ba.norm_sqr().max(ca.norm_sqr());
    if d.abs() <= 1e-14 * scale {
        // collinear: the disk on the farthest pair
        let cands = [diameter_disk(a, b), diameter_disk(a, c), diameter_disk(b, c)];
        return *cands.iter().max_by(|x, y| x.radius.total_cmp(&y.radius)).expect("three");
    }
    let (nb, nc) = (ba.norm_sqr(), ca.norm_sqr());
    let ux = (ca.im * nb - ba.im * nc) / d;
    let uy = (ba.re * nc - ca.re * nb) / d;
    let off = Complex64::new(ux, uy);
    Disk { center: a + off, radius: off.norm() }
}

/// Welzl's minimal enclosing disk, iterative form over the given order.
pub fn smallest_enclosing_disk(points: &[Complex64]) -> Disk {
    let Some(&first) = points.first() else {
        return Disk { center: Complex64::new(0.0, 0.0), radius: 0.0 };
    };
    let slack = |d: &Disk| 1e-12 * (1.0 + d.radius + d.center.norm());
    let mut d = Disk { center: first, radius: 0.0 };
    for i in 1..points.len() {
        if d.contains_with(points[i], slack(&d)) {
            continue;
        }
        d = Disk { center: points[i], radius: 0.0 };
        for j in 0..i {
            if d.contains_with(points[j], slack(&d)) {
                continue;
            }
            d = diameter_disk(points[i], points[j]);
            for k in 0..j {
                if !d.contains_with(points[k], slack(&d)) {
                    d = circumdisk(points[i], points[j], points[k]);
                }
            }
        }
    }
    d
}

/// Closed circular domain of the Riemann sphere.
///
/// ∞ belongs to half-planes, disk complements and the whole plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircularDomain {
    Disk {
        #[serde(with = "complex_json")]
        center: Complex64,
        radius: f64,
    },
    /// {x : ⟨x, normal⟩ ≤ offset}.
    HalfPlane {
        #[serde(with = "complex_json")]
        normal: Complex64,
        offset: f64,
    },
    /// {x : |x − center| ≥ radius}.
    DiskComplement {
        #[serde(with = "complex_json")]
        center: Complex64,
        radius: f64,
    },
    WholePlane,
    Point {
        #[serde(with = "complex_json")]
        z: Complex64,
    },
}

impl From<Disk> for CircularDomain {
    fn from(d: Disk) -> Self {
        CircularDomain::Disk { center: d.center, radius: d.radius }
    }
}

impl CircularDomain {
    /// Signed distance-like margin of a finite point, ≤ 0 inside.
    pub fn margin(&self, z: Complex64) -> f64 {
        match *self {
            CircularDomain::Disk { center, radius } => (z - center).norm() - radius,
            CircularDomain::HalfPlane { normal, offset } => dot(z, normal) - offset,
            CircularDomain::DiskComplement { center, radius } => radius - (z - center).norm(),
            CircularDomain::WholePlane => f64::NEG_INFINITY,
            CircularDomain::Point { z: p } => (z - p).norm(),
        }
    }

    pub fn contains_affine(&self, z: Complex64, tau: f64) -> bool {
        self.margin(z) <= tau
    }

    pub fn contains(&self, p: &ProjPoint, tau: f64) -> bool {
        match p.to_affine() {
            Some(z) => self.contains_affine(z, tau),
            None => matches!(
                self,
                CircularDomain::HalfPlane { .. } | CircularDomain::DiskComplement { .. } | CircularDomain::WholePlane
            ),
        }
    }

    /// Disjointness in the finite plane. Only disks and half-planes are
    /// decided; every other pair is reported as overlapping.
    pub fn disjoint_in_plane(&self, other: &CircularDomain, tau: f64) -> bool {
        use CircularDomain::{Disk as D, HalfPlane as H};
        match (*self, *other) {
            (D { center: c1, radius: r1 }, D { center: c2, radius: r2 }) => (c1 - c2).norm() > r1 + r2 + tau,
            (D { center, radius }, H { normal, offset }) | (H { normal, offset }, D { center, radius }) => {
                dot(center, normal) - radius > offset + tau
            }
            (H { normal: n1, offset: o1 }, H { normal: n2, offset: o2 }) => {
                // disjoint only for opposite normals: ⟨x,n₁⟩ ≤ o₁ and ⟨x,n₁⟩ ≥ −o₂
                (n1 + n2).norm() <= 1e-12 && -o2 > o1 + tau
            }
            _ => false,
        }
    }
}

/// Three pairwise disjoint domains, each holding one triplet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainWitness {
    pub triplets: [usize; 3],
    pub domains: [CircularDomain; 3],
    /// Smallest pairwise separation margin among the three domains.
    pub separation: f64,
}

fn pair_margin(a: &CircularDomain, b: &CircularDomain) -> f64 {
    use CircularDomain::{Disk as D, HalfPlane as H};
    match (*a, *b) {
        (D { center: c1, radius: r1 }, D { center: c2, radius: r2 }) => (c1 - c2).norm() - r1 - r2,
        (D { center, radius }, H { normal, offset }) | (H { normal, offset }, D { center, radius }) => {
            dot(center, normal) - radius - offset
        }
        (H { offset: o1, .. }, H { offset: o2, .. }) if a.disjoint_in_plane(b, 0.0) => -o2 - o1,
        _ => f64::NEG_INFINITY,
    }
}

/// Searches every 3-subset of `triplets` for pairwise disjoint domains:
/// minimal disks first, then half-planes bounding a hull along the axes that
/// separate it from the other two. Witnesses are re-verified before return.
pub fn three_disjoint_domains(triplets: &[(usize, [Complex64; 3])], tau: f64) -> Option<DomainWitness> {
    let n = triplets.len();
    let hulls: Vec<Hull> = triplets.iter().map(|(_, t)| convex_hull(t)).collect();
    let disks: Vec<CircularDomain> = triplets.iter().map(|(_, t)| smallest_enclosing_disk(t).into()).collect();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let idx = [a, b, c];
                let mut cands: Vec<Vec<CircularDomain>> = idx.iter().map(|&k| vec![disks[k]]).collect();
                for (slot, &k) in idx.iter().enumerate() {
                    for &o in &idx {
                        if o == k {
                            continue;
                        }
                        let (gap, toward) = hull_separation(&hulls[k], &hulls[o]);
                        if gap > tau {
                            let (_, hi) = hulls[k].projection(toward);
                            cands[slot].push(CircularDomain::HalfPlane { normal: toward, offset: hi });
                        }
                    }
                }
                let mut best: Option<DomainWitness> = None;
                for d0 in &cands[0] {
                    for d1 in &cands[1] {
                        for d2 in &cands[2] {
                            let doms = [*d0, *d1, *d2];
                            let sep = pair_margin(d0, d1).min(pair_margin(d0, d2)).min(pair_margin(d1, d2));
                            if sep > tau && best.as_ref().map_or(true, |w| sep > w.separation) {
                                best = Some(DomainWitness {
                                    triplets: idx.map(|k| triplets[k].0),
                                    domains: doms,
                                    separation: sep,
                                });
                            }
                        }
                    }
                }
                if let Some(w) = best {
                    let holds = idx.iter().zip(&w.domains).all(|(&k, d)| {
                        triplets[k].1.iter().all(|&z| d.contains_affine(z, tau))
                    });
                    let apart = (0..3).all(|i| (i + 1..3).all(|j| w.domains[i].disjoint_in_plane(&w.domains[j], tau)));
                    if holds && apart {
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

/// Outcome of [`gauss_lucas_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussLucas {
    pub ok: bool,
    /// Signed distance of the farthest derivative root to the hull.
    pub margin: f64,
    #[serde(with = "complex_json::vec")]
    pub derivative_roots: Vec<Complex64>,
}

/// Locates the roots of P′ for P = ∏(t − root) relative to the hull of the roots.
pub fn gauss_lucas_check(roots: &[Complex64], tau: f64) -> Result<GaussLucas> {
    if roots.len() < 2 {
        return Err(Error::Precondition("Gauss–Lucas check needs at least two roots".into()));
    }
    let hull = convex_hull(roots);
    let derivative_roots = Poly::from_roots(roots).derivative().roots();
    let margin = derivative_roots.iter().map(|&r| hull.signed_distance(r)).fold(f64::NEG_INFINITY, f64::max);
    Ok(GaussLucas { ok: margin <= tau, margin, derivative_roots })
}

/// An n-th root of ∏z_i lying in `domain`, taking the deepest of the n roots.
pub fn geometric_mean_witness(z: &[Complex64], domain: &CircularDomain, tau: f64) -> Result<Option<Complex64>> {
    if !matches!(domain, CircularDomain::Disk { .. } | CircularDomain::HalfPlane { .. }) {
        return Err(Error::InvalidInput("geometric mean witness needs a closed disk or half-plane".into()));
    }
    if z.is_empty() {
        return Err(Error::InvalidInput("geometric mean of no points".into()));
    }
    let n = z.len();
    let prod: Complex64 = z.iter().product();
    let (r, theta) = prod.to_polar();
    let radius = r.powf(1.0 / n as f64);
    let best = (0..n)
        .map(|k| Complex64::from_polar(radius, (theta + 2.0 * std::f64::consts::PI * k as f64) / n as f64))
        .min_by(|a, b| domain.margin(*a).total_cmp(&domain.margin(*b)))
        .expect("n ≥ 1");
    Ok(domain.contains_affine(best, tau).then_some(best))
}

/// Whether the closed segment [a, b] meets the real axis.
pub fn segment_meets_real_axis(a: Complex64, b: Complex64, tau: f64) -> bool {
    a.im * b.im <= 0.0 || a.im.abs().min(b.im.abs()) <= tau
}
