//! The solid-angle baseline model for cuboid face probabilities.
//!
//! Each face is assigned a probability proportional to the solid angle it
//! subtends when viewed from the cuboid's center, i.e. to the area of the
//! spherical quadrilateral the face projects onto. The six solid angles tile
//! the full sphere, so the probabilities sum to one exactly.

use crate::error::Result;
use crate::geometry::CuboidSpec;
use crate::gibbs::ProbabilityVector;

/// Solid angle of an axis-aligned rectangle with half-widths `a` and `b`,
/// seen from a point at distance `d` on the rectangle's central axis:
/// `Ω = 4·arctan(a·b / (d·sqrt(a² + b² + d²)))`.
pub fn rectangle_solid_angle(a: f64, b: f64, d: f64) -> f64 {
    4.0 * (a * b / (d * (a * a + b * b + d * d).sqrt())).atan()
}

/// Face probabilities of the solid-angle model, in face order 1..=6.
pub fn simpson_probabilities(spec: &CuboidSpec) -> Result<ProbabilityVector> {
    let [h1, h2, h3] = spec.half_heights();
    // faces (3,4) ⟂ s1, (1,6) ⟂ s2, (2,5) ⟂ s3
    let omega_34 = rectangle_solid_angle(h2, h3, h1);
    let omega_16 = rectangle_solid_angle(h1, h3, h2);
    let omega_25 = rectangle_solid_angle(h1, h2, h3);
    let total = 2.0 * (omega_34 + omega_16 + omega_25);
    ProbabilityVector::new(vec![
        omega_16 / total,
        omega_25 / total,
        omega_34 / total,
        omega_34 / total,
        omega_25 / total,
        omega_16 / total,
    ])
}

/// Sum of the six face solid angles; equals `4π` up to rounding.
pub fn total_solid_angle(spec: &CuboidSpec) -> f64 {
    let [h1, h2, h3] = spec.half_heights();
    2.0 * (rectangle_solid_angle(h2, h3, h1)
        + rectangle_solid_angle(h1, h3, h2)
        + rectangle_solid_angle(h1, h2, h3))
}
