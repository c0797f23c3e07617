//! Atiyah's construction for four points of hyperbolic 3-space.
//!
//! For a configuration x₁..x₄ in the Poincaré ball, each ordered pair (i, j)
//! gives the ideal endpoint t_ij of the ray from x_i through x_j. The
//! polynomial p_i has the three roots t_ij (j ≠ i); the conjecture is that
//! p₁..p₄ are linearly independent. This crate computes the construction,
//! measures independence, analyses hypothetical linear relations among the
//! elementary symmetric functions of the root triplets, and replays the
//! geometric obstructions to such relations on concrete instances.

pub mod atiyah;
pub mod ball_model;
pub mod certificates;
pub(crate) mod complex_json;
pub mod error;
pub mod explorer;
pub mod poly;
pub mod riemann_sphere;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
