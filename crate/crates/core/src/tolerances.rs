//! Numerical thresholds shared by the geometric and algebraic checks.
//!
//! Every verdict the library renders is relative to one of these fields, and
//! reports echo the effective values so that a verdict can be reproduced.

use serde::{Deserialize, Serialize};

/// Margin by which ball points must stay inside the unit sphere.
pub const BALL_MARGIN: f64 = 1e-12;

/// Unit-norm tolerance for ideal points.
pub const SPHERE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Minimum pairwise hyperbolic distance inside a configuration.
    pub min_sep: f64,
    /// Maximum Euclidean norm of a configuration point.
    pub r_max: f64,
    /// Relative singular value below which four points count as coplanar.
    pub coplanar: f64,
    /// Signed-area slack for point-in-triangle tests in the Klein chart.
    pub hull: f64,
    /// Projective equality threshold on the normalized bracket.
    pub proj: f64,
    /// Relative smallest singular value below which the matrix is singular.
    pub residual: f64,
    /// |det| below which the independence measure counts as vanishing.
    pub measure: f64,
    /// Relative discriminant threshold separating three distinct roots.
    pub scenario: f64,
    /// Relative threshold for repeated roots of the relation cubic.
    pub root: f64,
    /// Planar margin used by hull, disk and line predicates.
    pub geo: f64,
    /// Distance from a face circle below which an ideal point lies on it.
    pub on_circle: f64,
    /// Set-matching tolerance for pairwise circle intersections.
    pub intersection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            min_sep: 1e-6,
            r_max: 0.999,
            coplanar: 1e-9,
            hull: 1e-12,
            proj: 1e-10,
            residual: 1e-10,
            measure: 1e-12,
            scenario: 1e-8,
            root: 1e-8,
            geo: 1e-10,
            on_circle: 1e-8,
            intersection: 1e-7,
        }
    }
}
