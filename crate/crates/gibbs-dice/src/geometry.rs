//! Die geometry and the geometry-to-energy conversion.
//!
//! A resting state of a die is assigned a dimensionless energy proportional
//! to the height of its center of gravity in that state, divided by a
//! normalization length. Two scale-invariant normalizations are supported for
//! homogeneous cuboids (half-diagonal and geometric mean of the half-heights);
//! general dice carry an explicit normalization length of their own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A homogeneous cuboid described by its three side lengths (any consistent
/// length unit).
///
/// Face indexing follows the convention that the half-height of a face is
/// half the side length perpendicular to it: faces 3 and 4 are perpendicular
/// to `s1`, faces 1 and 6 to `s2`, and faces 2 and 5 to `s3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuboidSpec {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl CuboidSpec {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        for (name, v) in [("s1", s1), ("s2", s2), ("s3", s3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "side length {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { s1, s2, s3 })
    }

    /// The three distinct half-heights `(s1/2, s2/2, s3/2)`.
    pub fn half_heights(&self) -> [f64; 3] {
        [self.s1 / 2.0, self.s2 / 2.0, self.s3 / 2.0]
    }

    /// Half-heights per face, in face order 1..=6.
    pub fn face_half_heights(&self) -> [f64; 6] {
        let [h1, h2, h3] = self.half_heights();
        // faces (3,4) ⟂ s1, (1,6) ⟂ s2, (2,5) ⟂ s3
        [h2, h3, h1, h1, h3, h2]
    }

    /// Distance from the center to a corner.
    pub fn half_diagonal(&self) -> f64 {
        let [h1, h2, h3] = self.half_heights();
        (h1 * h1 + h2 * h2 + h3 * h3).sqrt()
    }

    /// Geometric mean of the three half-heights.
    pub fn half_height_geometric_mean(&self) -> f64 {
        let [h1, h2, h3] = self.half_heights();
        (h1 * h2 * h3).cbrt()
    }
}

/// An arbitrary die with `k >= 2` resting states, described by the height of
/// the center of gravity in each state plus an explicit normalization length.
/// No symmetry between opposite faces is assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralDieSpec {
    heights: Vec<f64>,
    scale: f64,
}

impl GeneralDieSpec {
    pub fn new(heights: Vec<f64>, scale: f64) -> Result<Self> {
        if heights.len() < 2 {
            return Err(Error::InvalidGeometry(format!(
                "a die needs at least 2 resting states, got {}",
                heights.len()
            )));
        }
        for (i, h) in heights.iter().enumerate() {
            if !(h.is_finite() && *h > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "height h{} must be positive and finite, got {h}",
                    i + 1
                )));
            }
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "normalization scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { heights, scale })
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn num_states(&self) -> usize {
        self.heights.len()
    }
}

/// Choice of the length that makes the energies dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyNormalization {
    /// Divide the half-heights by `sqrt(h1² + h2² + h3²)` (the half-diagonal).
    HalfDiagonal,
    /// Divide the half-heights by `(h1·h2·h3)^(1/3)`.
    GeometricMean,
    /// Divide by a caller-supplied positive length.
    Explicit(f64),
}

impl EnergyNormalization {
    pub fn label(&self) -> String {
        match self {
            Self::HalfDiagonal => "half-diagonal".to_string(),
            Self::GeometricMean => "geometric-mean".to_string(),
            Self::Explicit(s) => format!("explicit({s})"),
        }
    }
}

/// Dimensionless per-state energies, one per resting state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyVector(Vec<f64>);

impl EnergyVector {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "an energy vector needs at least 2 states, got {}",
                energies.len()
            )));
        }
        for (i, e) in energies.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "energy E{} must be positive and finite, got {e}",
                    i + 1
                )));
            }
        }
        Ok(Self(energies))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multiply every energy by `c > 0` (used by reparameterization checks).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|e| e * c).collect())
    }
}

impl std::ops::Index<usize> for EnergyVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Per-face energies of a homogeneous cuboid, in face order 1..=6.
///
/// Opposite faces share one computed value, so their energies are equal
/// bit-for-bit.
pub fn cuboid_energies(spec: &CuboidSpec, norm: EnergyNormalization) -> Result<EnergyVector> {
    let divisor = match norm {
        EnergyNormalization::HalfDiagonal => spec.half_diagonal(),
        EnergyNormalization::GeometricMean => spec.half_height_geometric_mean(),
        EnergyNormalization::Explicit(_) => {
            return Err(Error::InvalidParameter(
                "cuboid energies use the half-diagonal or geometric-mean normalization".to_string(),
            ))
        }
    };
    let [h1, h2, h3] = spec.half_heights();
    let (e1, e2, e3) = (h1 / divisor, h2 / divisor, h3 / divisor);
    EnergyVector::new(vec![e2, e3, e1, e1, e3, e2])
}

/// Energies of a general die: `E_i = h_i / scale`.
pub fn general_energies(spec: &GeneralDieSpec) -> EnergyVector {
    // spec is validated on construction, so this cannot fail
    EnergyVector::new(spec.heights().iter().map(|h| h / spec.scale()).collect())
        .expect("validated spec yields valid energies")
}

/// The `(E_x, E_y)` energy pair of an xxy-cuboid under the given
/// normalization.
///
/// With the geometric mean this is `E_x = s_x/(s_x·s_x·s_y)^(1/3)` and
/// `E_y = s_y/(s_x·s_x·s_y)^(1/3)`; an explicit scale `c` divides the
/// half-heights `s/2` by `c`.
pub fn xxy_energy_pair(sx: f64, sy: f64, norm: EnergyNormalization) -> Result<(f64, f64)> {
    let spec = CuboidSpec::new(sx, sx, sy)?;
    match norm {
        EnergyNormalization::GeometricMean => {
            let g = (sx * sx * sy).cbrt();
            Ok((sx / g, sy / g))
        }
        EnergyNormalization::HalfDiagonal => {
            let d = 2.0 * spec.half_diagonal(); // sqrt(2 s_x² + s_y²)
            Ok((sx / d, sy / d))
        }
        EnergyNormalization::Explicit(c) => {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "normalization scale must be positive and finite, got {c}"
                )));
            }
            Ok((sx / (2.0 * c), sy / (2.0 * c)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_cuboid_half_diagonal_energies() {
        let spec = CuboidSpec::new(13.0, 20.0, 23.0).unwrap();
        let e = cuboid_energies(&spec, EnergyNormalization::HalfDiagonal).unwrap();
        // direct evaluation of h_i / sqrt(h1² + h2² + h3²)
        let div = (6.5f64 * 6.5 + 10.0 * 10.0 + 11.5 * 11.5).sqrt();
        assert!((div - 16.568).abs() < 1e-3);
        let expect = [
            10.0 / div,
            11.5 / div,
            6.5 / div,
            6.5 / div,
            11.5 / div,
            10.0 / div,
        ];
        for (a, b) in e.as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((e[2] - 0.3923).abs() < 1e-4);
        assert!((e[0] - 0.6036).abs() < 1e-4);
        assert!((e[1] - 0.6941).abs() < 1e-4);
    }

    #[test]
    fn cube_energies_all_equal() {
        let spec = CuboidSpec::new(7.0, 7.0, 7.0).unwrap();
        for norm in [
            EnergyNormalization::HalfDiagonal,
            EnergyNormalization::GeometricMean,
        ] {
            let e = cuboid_energies(&spec, norm).unwrap();
            for v in e.as_slice() {
                assert_eq!(*v, e[0]);
            }
        }
    }

    #[test]
    fn xxy_geometric_mean_energies() {
        let (ex, ey) = xxy_energy_pair(15.0, 7.1, EnergyNormalization::GeometricMean).unwrap();
        let g = (15.0f64 * 15.0 * 7.1).cbrt();
        assert!((ex - 15.0 / g).abs() < 1e-15);
        assert!((ey - 7.1 / g).abs() < 1e-15);
        assert!((ey - 0.607).abs() < 1e-3);
        assert!((ex - 1.283).abs() < 1e-3);
    }

    #[test]
    fn general_die_energies() {
        let spec = GeneralDieSpec::new(vec![10.0, 11.5, 7.61, 5.39, 11.5, 10.0], 16.45).unwrap();
        let e = general_energies(&spec);
        let expect = [0.6079, 0.6991, 0.4626, 0.3277, 0.6991, 0.6079];
        for (a, b) in e.as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_heights_give_unit_energies() {
        let spec = GeneralDieSpec::new(vec![3.2; 6], 3.2).unwrap();
        for e in general_energies(&spec).as_slice() {
            assert_eq!(*e, 1.0);
        }
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        assert!(CuboidSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(CuboidSpec::new(1.0, -2.0, 1.0).is_err());
        assert!(CuboidSpec::new(1.0, f64::NAN, 1.0).is_err());
        assert!(CuboidSpec::new(1.0, 1.0, f64::INFINITY).is_err());
        assert!(GeneralDieSpec::new(vec![1.0, 2.0], 0.0).is_err());
        assert!(GeneralDieSpec::new(vec![1.0, -1.0], 1.0).is_err());
        assert!(GeneralDieSpec::new(vec![1.0], 1.0).is_err());
    }

    #[test]
    fn explicit_norm_rejected_for_cuboids() {
        let spec = CuboidSpec::new(1.0, 2.0, 3.0).unwrap();
        assert!(cuboid_energies(&spec, EnergyNormalization::Explicit(1.0)).is_err());
    }
}
