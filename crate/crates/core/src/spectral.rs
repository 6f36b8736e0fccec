//! Fourier transform between the time side `G` and the frequency side `Γ`,
//! and the norms used throughout.
//!
//! Haar measure on `G` is counting measure; on `Γ` it is counting measure
//! scaled by `1/|G|`. With these conventions
//!
//! * `synthesize(λ)(γ) = Σ_g (−g, γ) λ(g)`,
//! * `analyze(f)(g) = |G|⁻¹ Σ_γ (g, γ) f(γ)`,
//!
//! and the Fourier-algebra norm of `f` is the `ℓ¹` norm of `analyze(f)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::numeric::{self, CompensatedComplexSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Functions on `G` (densities such as `λ`).
    Time,
    /// Functions on `Γ` (elements of the Fourier algebra).
    Frequency,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Time => "time",
            Side::Frequency => "frequency",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    spec: GroupSpec,
    side: Side,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(spec: &GroupSpec, side: Side, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::LengthMismatch { expected: spec.order(), found: values.len() });
        }
        Ok(Self { spec: spec.clone(), side, values })
    }

    pub fn from_real(spec: &GroupSpec, side: Side, values: &[f64]) -> Result<Self> {
        Self::new(spec, side, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(spec: &GroupSpec, side: Side) -> Self {
        Self { spec: spec.clone(), side, values: vec![Complex64::new(0.0, 0.0); spec.order()] }
    }

    /// Indicator of a single element given by index.
    pub fn point_mass(spec: &GroupSpec, side: Side, index: usize) -> Self {
        let mut f = Self::zeros(spec, side);
        f.values[index] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn expect_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::SideMismatch { expected: side, found: self.side });
        }
        Ok(())
    }

    /// Largest absolute entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &GroupFunction) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::GroupMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `λ ↦ λ̂` from the time side to the frequency side.
pub fn synthesize(lambda: &GroupFunction) -> Result<GroupFunction> {
    lambda.expect_side(Side::Time)?;
    let spec = &lambda.spec;
    let order = spec.order();
    let values = (0..order)
        .map(|gamma| {
            let mut acc = CompensatedComplexSum::new();
            for (g, &v) in lambda.values.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    acc.add(spec.pairing_idx(g, gamma).conj() * v);
                }
            }
            acc.value()
        })
        .collect();
    Ok(GroupFunction { spec: spec.clone(), side: Side::Frequency, values })
}

/// Inverse of [`synthesize`].
pub fn analyze(f: &GroupFunction) -> Result<GroupFunction> {
    f.expect_side(Side::Frequency)?;
    let spec = &f.spec;
    let order = spec.order();
    let scale = 1.0 / order as f64;
    let values = (0..order)
        .map(|g| {
            let mut acc = CompensatedComplexSum::new();
            for (gamma, &v) in f.values.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    acc.add(spec.pairing_idx(g, gamma) * v);
                }
            }
            acc.value() * scale
        })
        .collect();
    Ok(GroupFunction { spec: spec.clone(), side: Side::Time, values })
}

/// `‖f‖_{A(Γ)}`, the `ℓ¹(G)` norm of the time-side density of `f`.
pub fn a_norm(f: &GroupFunction) -> Result<f64> {
    Ok(l1_time_norm(&analyze(f)?))
}

pub fn sup_norm(f: &GroupFunction) -> f64 {
    f.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ_g |λ(g)|` (counting measure on `G`).
pub fn l1_time_norm(lambda: &GroupFunction) -> f64 {
    numeric::l1(&lambda.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_of_point_mass_at_zero_is_constant() {
        let g = GroupSpec::new(&[3, 4]).unwrap();
        let f = synthesize(&GroupFunction::point_mass(&g, Side::Time, 0)).unwrap();
        assert!(f.values().iter().all(|&v| v == c(1.0, 0.0)));
        let back = analyze(&f).unwrap();
        assert!(back.max_abs_diff(&GroupFunction::point_mass(&g, Side::Time, 0)).unwrap() < 1e-15);
    }

    #[test]
    fn two_point_transforms() {
        let z2 = GroupSpec::new(&[2]).unwrap();
        let lam = GroupFunction::from_real(&z2, Side::Time, &[0.0, 1.0]).unwrap();
        assert_eq!(synthesize(&lam).unwrap().values(), &[c(1.0, 0.0), c(-1.0, 0.0)]);

        let f = GroupFunction::new(&z2, Side::Frequency, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let lam = analyze(&f).unwrap();
        assert!((lam.values()[0] - c(0.5, 0.5)).norm() < 1e-15);
        assert!((lam.values()[1] - c(0.5, -0.5)).norm() < 1e-15);
        assert!((a_norm(&f).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = GroupSpec::new(&[5]).unwrap();
        let f = synthesize(&GroupFunction::zeros(&g, Side::Time)).unwrap();
        assert_eq!(sup_norm(&f), 0.0);
    }

    #[test]
    fn side_tags_are_enforced() {
        let g = GroupSpec::new(&[5]).unwrap();
        let f = GroupFunction::zeros(&g, Side::Frequency);
        assert!(matches!(synthesize(&f), Err(Error::SideMismatch { .. })));
        assert!(matches!(analyze(&analyze(&f).unwrap()), Err(Error::SideMismatch { .. })));
        assert!(matches!(a_norm(&analyze(&f).unwrap()), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn indicator_and_character_norms() {
        let g = GroupSpec::new(&[2, 3]).unwrap();
        let gamma0 = 4;
        let ind = GroupFunction::point_mass(&g, Side::Frequency, gamma0);
        let lam = analyze(&ind).unwrap();
        for (x, v) in lam.values().iter().enumerate() {
            let want = g.pairing_idx(x, gamma0) / 6.0;
            assert!((v - want).norm() < 1e-15);
        }
        assert!((a_norm(&ind).unwrap() - 1.0).abs() < 1e-14);

        let g0 = 5;
        let chi: Vec<_> = (0..6).map(|gamma| g.pairing_idx(g0, gamma)).collect();
        let chi = GroupFunction::new(&g, Side::Frequency, chi).unwrap();
        assert!((a_norm(&chi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simple_norms() {
        let z2 = GroupSpec::new(&[2]).unwrap();
        let f = GroupFunction::from_real(&z2, Side::Frequency, &[1.0, -1.0]).unwrap();
        assert_eq!(sup_norm(&f), 1.0);
        let lam = GroupFunction::from_real(&z2, Side::Time, &[0.5, 0.5]).unwrap();
        assert_eq!(l1_time_norm(&lam), 1.0);
        assert_eq!(sup_norm(&GroupFunction::zeros(&z2, Side::Frequency)), 0.0);
    }
}
