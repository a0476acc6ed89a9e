//! Isotropic reference medium and its periodic Green strain operator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FrequencyTable, GridSpec, TensorField};
use crate::microstructure::StiffnessField;
use crate::tensor::{iso_stiffness, Stiffness4};

/// Fourier coefficient `Γ̂⁰(ξ)` at one frequency.
pub type GreenCoefficient = Stiffness4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMaterial {
    pub lambda0: f64,
    pub mu0: f64,
}

impl ReferenceMaterial {
    pub fn new(lambda0: f64, mu0: f64) -> Result<Self> {
        let r = Self { lambda0, mu0 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu0 == 0.0 || !self.mu0.is_finite() {
            return Err(Error::InvalidReferenceMaterial(format!("mu0 must be nonzero, got {}", self.mu0)));
        }
        if self.lambda0 + 2.0 * self.mu0 == 0.0 || !self.lambda0.is_finite() {
            return Err(Error::InvalidReferenceMaterial("lambda0 + 2 mu0 must be nonzero".into()));
        }
        Ok(())
    }

    /// Midpoint of the smallest and largest Lamé constants among the phases
    /// present in `c`.
    pub fn midpoint_of(c: &StiffnessField) -> Result<Self> {
        let phases = c.present_phases();
        let mats = c.materials();
        let range = |f: &dyn Fn(usize) -> f64| {
            let vals = phases.iter().map(|&p| f(p as usize));
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            0.5 * (lo + hi)
        };
        Self::new(
            range(&|p| mats[p].lame_lambda()),
            range(&|p| mats[p].lame_mu()),
        )
    }

    pub fn stiffness(&self, d: usize) -> Result<Stiffness4> {
        iso_stiffness(self.lambda0, self.mu0, d)
    }

    fn shear_factor(&self) -> f64 {
        (self.lambda0 + self.mu0) / (self.mu0 * (self.lambda0 + 2.0 * self.mu0))
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Full `Γ̂⁰_ijkl(ξ)` tensor for a nonzero frequency vector.
pub fn green_coefficient(reference: &ReferenceMaterial, xi: &[f64]) -> Result<GreenCoefficient> {
    let d = xi.len();
    let xi2: f64 = xi.iter().map(|x| x * x).sum();
    if xi2 == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    reference.validate()?;
    let a = 1.0 / (4.0 * reference.mu0 * xi2);
    let b = reference.shear_factor() / (xi2 * xi2);
    let mut g = Stiffness4::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let first = delta(k, i) * xi[l] * xi[j]
                        + delta(l, i) * xi[k] * xi[j]
                        + delta(k, j) * xi[l] * xi[i]
                        + delta(l, j) * xi[k] * xi[i];
                    g.set(i, j, k, l, a * first - b * xi[i] * xi[j] * xi[k] * xi[l]);
                }
            }
        }
    }
    Ok(g)
}

/// In-place `τ̂(ξ) ← Γ̂⁰(ξ) ⫶ τ̂(ξ)` on a component-major spectral buffer of a
/// symmetric order-2 field. Zero frequency and Nyquist planes are zeroed.
pub(crate) fn apply_green_hat(reference: &ReferenceMaterial, grid: &GridSpec, freqs: &FrequencyTable, tau: &mut [Complex64]) {
    let d = grid.d();
    let total = grid.num_points();
    let inv_2mu = 1.0 / (2.0 * reference.mu0);
    let factor = reference.shear_factor();
    let mut t = [Complex64::default(); 9];
    for p in 0..total {
        if !freqs.active[p] {
            for c in 0..d * d {
                tau[c * total + p] = Complex64::default();
            }
            continue;
        }
        let xi = freqs.xi[p];
        let xi2: f64 = xi[..d].iter().map(|x| x * x).sum();
        for c in 0..d * d {
            t[c] = tau[c * total + p];
        }
        // a = sym(τ) ξ
        let mut a = [Complex64::default(); 3];
        for i in 0..d {
            for j in 0..d {
                a[i] += 0.5 * (t[i * d + j] + t[j * d + i]) * xi[j];
            }
        }
        let xa: Complex64 = (0..d).map(|i| xi[i] * a[i]).sum();
        let s1 = inv_2mu / xi2;
        let s2 = factor * xa / (xi2 * xi2);
        for i in 0..d {
            for j in 0..d {
                tau[(i * d + j) * total + p] = s1 * (xi[j] * a[i] + xi[i] * a[j]) - s2 * xi[i] * xi[j];
            }
        }
    }
}

/// `Γ̂⁰ ⫶ τ̂` frequency by frequency for a Fourier-space symmetric field.
pub fn apply_green(reference: &ReferenceMaterial, tau_hat: &TensorField) -> Result<TensorField> {
    if tau_hat.order() != 2 {
        return Err(Error::Shape(format!("polarization must be order 2, got {}", tau_hat.order())));
    }
    reference.validate()?;
    let grid = *tau_hat.grid();
    let mut data = tau_hat.fourier()?.to_vec();
    let freqs = FrequencyTable::new(&grid);
    apply_green_hat(reference, &grid, &freqs, &mut data);
    TensorField::from_fourier(grid, 2, data)
}
