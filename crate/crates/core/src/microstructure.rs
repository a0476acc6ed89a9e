//! Stiffness fields on the grid: Hashin's coated disk, two-phase laminates,
//! homogeneous media, and raw phase maps.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::tensor::{IsotropicMaterial, Stiffness4};

/// Poisson's ratio shared by every phase of the benchmark structure.
pub const BENCHMARK_POISSON: f64 = 0.3;
pub const BENCHMARK_CORE_YOUNG: f64 = 100e9;
pub const BENCHMARK_COATING_YOUNG: f64 = 1000e9;
/// Matrix modulus obtained externally from the coated-inclusion formulas.
pub const BENCHMARK_MATRIX_YOUNG: f64 = 453.685e9;

pub const CORE: u32 = 0;
pub const COATING: u32 = 1;
pub const MATRIX: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HashinSpec {
    pub r1: f64,
    pub r2: f64,
    pub core: IsotropicMaterial,
    pub coating: IsotropicMaterial,
    pub matrix: IsotropicMaterial,
}

impl Default for HashinSpec {
    fn default() -> Self {
        let mat = |e| IsotropicMaterial {
            young_modulus: e,
            poisson_ratio: BENCHMARK_POISSON,
        };
        Self {
            r1: 0.25,
            r2: 0.4,
            core: mat(BENCHMARK_CORE_YOUNG),
            coating: mat(BENCHMARK_COATING_YOUNG),
            matrix: mat(BENCHMARK_MATRIX_YOUNG),
        }
    }
}

impl HashinSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.r1 && self.r1 < self.r2 && self.r2 <= 0.5) {
            return Err(Error::Geometry(format!(
                "radii must satisfy 0 < r1 < r2 <= 0.5, got r1={}, r2={}",
                self.r1, self.r2
            )));
        }
        self.core.validate()?;
        self.coating.validate()?;
        self.matrix.validate()
    }

    /// Phase id at a point of the cell `[-1/2, 1/2)²`. A point exactly on a
    /// circle belongs to the outer phase.
    pub fn phase_at(&self, x: [f64; 2]) -> u32 {
        let r = x[0].hypot(x[1]);
        if r < self.r1 {
            CORE
        } else if r < self.r2 {
            COATING
        } else {
            MATRIX
        }
    }

    /// Copy with the core and coating replaced per [`contrast_sweep_materials`].
    pub fn with_contrast(&self, base_young: f64, contrast: f64) -> Result<Self> {
        let (core, coating) = contrast_sweep_materials(base_young, contrast)?;
        Ok(Self { core, coating, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaminateSpec {
    pub layer_normal: usize,
    pub volume_fraction: f64,
    pub phase_a: IsotropicMaterial,
    pub phase_b: IsotropicMaterial,
}

/// Per-point stiffness described by a phase map into a table of isotropic
/// phases.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessField {
    grid: GridSpec,
    phase_map: Vec<u32>,
    materials: Vec<IsotropicMaterial>,
    stiffness: Vec<Stiffness4>,
}

impl StiffnessField {
    pub fn from_phase_map(grid: GridSpec, phase_map: Vec<u32>, materials: Vec<IsotropicMaterial>) -> Result<Self> {
        if phase_map.len() != grid.num_points() {
            return Err(Error::Shape(format!(
                "phase map has {} entries, grid has {} points",
                phase_map.len(),
                grid.num_points()
            )));
        }
        if let Some(&bad) = phase_map.iter().find(|&&id| id as usize >= materials.len()) {
            return Err(Error::InvalidMaterial(format!(
                "phase id {bad} has no entry in the {}-phase material table",
                materials.len()
            )));
        }
        let stiffness = materials
            .iter()
            .map(|m| {
                m.validate()?;
                m.stiffness(grid.d())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            phase_map,
            materials,
            stiffness,
        })
    }

    pub fn homogeneous(grid: GridSpec, material: IsotropicMaterial) -> Result<Self> {
        Self::from_phase_map(grid, vec![0; grid.num_points()], vec![material])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn phase_map(&self) -> &[u32] {
        &self.phase_map
    }

    pub fn materials(&self) -> &[IsotropicMaterial] {
        &self.materials
    }

    /// Stiffness table indexed by phase id.
    pub fn phase_stiffness(&self) -> &[Stiffness4] {
        &self.stiffness
    }

    #[inline]
    pub fn stiffness_at(&self, p: usize) -> &Stiffness4 {
        &self.stiffness[self.phase_map[p] as usize]
    }

    #[inline]
    pub fn material_at(&self, p: usize) -> &IsotropicMaterial {
        &self.materials[self.phase_map[p] as usize]
    }

    /// Phases that occur on at least one grid point.
    pub fn present_phases(&self) -> Vec<u32> {
        let mut seen = vec![false; self.materials.len()];
        self.phase_map.iter().for_each(|&id| seen[id as usize] = true);
        (0..self.materials.len() as u32).filter(|&i| seen[i as usize]).collect()
    }

    pub fn phase_fraction(&self, id: u32) -> f64 {
        self.phase_map.iter().filter(|&&p| p == id).count() as f64 / self.phase_map.len() as f64
    }

    /// Grid mean of a per-point scalar derived from the material.
    pub fn mean_of(&self, f: impl Fn(&IsotropicMaterial) -> f64) -> f64 {
        let per_phase: Vec<f64> = self.materials.iter().map(&f).collect();
        self.phase_map.iter().map(|&id| per_phase[id as usize]).sum::<f64>() / self.phase_map.len() as f64
    }

    /// Checks every phase tensor for minor/major symmetry and positive
    /// definiteness on symmetric tensors (Cholesky of the Mandel matrix).
    pub fn check_admissible(&self) -> Result<()> {
        for (id, c) in self.stiffness.iter().enumerate() {
            let scale = c.get(0, 0, 0, 0).abs().max(1.0);
            if !c.has_minor_symmetries(1e-12 * scale) || !c.has_major_symmetry(1e-12 * scale) {
                return Err(Error::InvalidMaterial(format!("phase {id} stiffness lacks symmetry")));
            }
            if !is_positive_definite(c) {
                return Err(Error::InvalidMaterial(format!("phase {id} stiffness is not positive definite")));
            }
        }
        Ok(())
    }

    /// Hash of the grid, phase map and stiffness table.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.grid.hash(&mut h);
        self.phase_map.hash(&mut h);
        for m in &self.materials {
            m.young_modulus.to_bits().hash(&mut h);
            m.poisson_ratio.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

fn is_positive_definite(c: &Stiffness4) -> bool {
    let d = c.dim();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let w = |i: usize, j: usize| if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
    let m = pairs.len();
    let mut a = vec![0.0; m * m];
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (s, &(k, l)) in pairs.iter().enumerate() {
            a[r * m + s] = w(i, j) * w(k, l) * c.get(i, j, k, l);
        }
    }
    for j in 0..m {
        let mut diag = a[j * m + j];
        for k in 0..j {
            diag -= a[j * m + k] * a[j * m + k];
        }
        if !(diag > 0.0) {
            return false;
        }
        let diag = diag.sqrt();
        a[j * m + j] = diag;
        for i in j + 1..m {
            let mut v = a[i * m + j];
            for k in 0..j {
                v -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = v / diag;
        }
    }
    true
}

/// Center-of-pixel rasterization of the coated disk centered at the origin.
pub fn rasterize_hashin(spec: &HashinSpec, grid: GridSpec) -> Result<StiffnessField> {
    if grid.d() != 2 {
        return Err(Error::Geometry(format!("the coated-disk structure is 2D, grid is {}D", grid.d())));
    }
    spec.validate()?;
    let phase_map = (0..grid.num_points())
        .map(|p| {
            let x = grid.coordinate(p);
            spec.phase_at([x[0], x[1]])
        })
        .collect();
    StiffnessField::from_phase_map(grid, phase_map, vec![spec.core, spec.coating, spec.matrix])
}

/// Two-phase laminate: `phase_a` fills the first `fraction·n` grid planes
/// along `layer_normal`.
pub fn rasterize_laminate(spec: &LaminateSpec, grid: GridSpec) -> Result<StiffnessField> {
    if spec.layer_normal >= grid.d() {
        return Err(Error::Rasterization(format!(
            "layer normal {} out of range for {}D grid",
            spec.layer_normal,
            grid.d()
        )));
    }
    if !(spec.volume_fraction > 0.0 && spec.volume_fraction < 1.0) {
        return Err(Error::Rasterization(format!(
            "volume fraction must lie in (0, 1), got {}",
            spec.volume_fraction
        )));
    }
    let planes = spec.volume_fraction * grid.n() as f64;
    let count = planes.round();
    if (planes - count).abs() > 1e-9 {
        return Err(Error::Rasterization(format!(
            "volume fraction {} is not representable on {} planes",
            spec.volume_fraction,
            grid.n()
        )));
    }
    let count = count as usize;
    let phase_map = (0..grid.num_points())
        .map(|p| if grid.multi_index(p)[spec.layer_normal] < count { 0 } else { 1 })
        .collect();
    StiffnessField::from_phase_map(grid, phase_map, vec![spec.phase_a, spec.phase_b])
}

/// Core keeps `base_young`; the coating gets `contrast · base_young`. Both use
/// the benchmark Poisson's ratio.
pub fn contrast_sweep_materials(base_young: f64, contrast: f64) -> Result<(IsotropicMaterial, IsotropicMaterial)> {
    if !(contrast > 0.0) || !contrast.is_finite() {
        return Err(Error::InvalidMaterial(format!("contrast must be positive, got {contrast}")));
    }
    let core = IsotropicMaterial::new(base_young, BENCHMARK_POISSON)?;
    let coating = IsotropicMaterial::new(contrast * base_young, BENCHMARK_POISSON)?;
    Ok((core, coating))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn mat(e: f64) -> IsotropicMaterial {
        IsotropicMaterial::new(e, 0.3).unwrap()
    }

    #[test]
    fn hashin_fractions_and_points() {
        let spec = HashinSpec::default();
        let grid = GridSpec::new(2, 128).unwrap();
        let c = rasterize_hashin(&spec, grid).unwrap();
        let core = c.phase_fraction(CORE);
        assert!((core - PI * 0.25 * 0.25).abs() <= 4.0 / 128.0, "core fraction {core}");
        assert_eq!(spec.phase_at([0.0, 0.0]), CORE);
        assert_eq!(spec.phase_at([0.49, 0.49]), MATRIX);
        assert_eq!(spec.phase_at([0.3, 0.0]), COATING);
        // ties go to the outer phase
        assert_eq!(spec.phase_at([0.25, 0.0]), COATING);
        assert_eq!(spec.phase_at([0.0, -0.4]), MATRIX);
        assert_eq!(c.phase_map()[0], CORE);
        c.check_admissible().unwrap();
    }

    #[test]
    fn hashin_fractions_converge() {
        let spec = HashinSpec::default();
        for n in [64, 128, 256] {
            let c = rasterize_hashin(&spec, GridSpec::new(2, n).unwrap()).unwrap();
            let core_area = PI * spec.r1 * spec.r1;
            let coat_area = PI * (spec.r2 * spec.r2 - spec.r1 * spec.r1);
            let tol_core = 2.0 * PI * spec.r1 * 2.0 / n as f64;
            let tol_coat = 2.0 * PI * (spec.r1 + spec.r2) * 2.0 / n as f64;
            assert!((c.phase_fraction(CORE) - core_area).abs() <= tol_core);
            assert!((c.phase_fraction(COATING) - coat_area).abs() <= tol_coat);
        }
    }

    #[test]
    fn hashin_rejects_bad_geometry() {
        let grid = GridSpec::new(2, 16).unwrap();
        for (r1, r2) in [(0.4, 0.25), (0.0, 0.3), (0.2, 0.6), (0.3, 0.3)] {
            let spec = HashinSpec { r1, r2, ..Default::default() };
            assert!(matches!(rasterize_hashin(&spec, grid), Err(Error::Geometry(_))));
        }
        let g3 = GridSpec::new(3, 8).unwrap();
        assert!(rasterize_hashin(&HashinSpec::default(), g3).is_err());
    }

    #[test]
    fn laminate_planes() {
        let grid = GridSpec::new(2, 8).unwrap();
        let spec = LaminateSpec {
            layer_normal: 0,
            volume_fraction: 0.5,
            phase_a: mat(100.0),
            phase_b: mat(1000.0),
        };
        let c = rasterize_laminate(&spec, grid).unwrap();
        assert_eq!(c.phase_fraction(0), 0.5);
        for p in 0..64 {
            let idx = grid.multi_index(p);
            assert_eq!(c.phase_map()[p], u32::from(idx[0] >= 4));
        }
        let quarter = rasterize_laminate(&LaminateSpec { volume_fraction: 0.25, layer_normal: 1, ..spec }, grid).unwrap();
        assert_eq!(quarter.phase_fraction(0), 0.25);
        assert_eq!(quarter.phase_map()[1], 0);
        assert_eq!(quarter.phase_map()[2], 1);

        let same = rasterize_laminate(&LaminateSpec { phase_b: spec.phase_a, ..spec }, grid).unwrap();
        assert!((0..64).all(|p| same.stiffness_at(p) == same.stiffness_at(0)));

        let bad = LaminateSpec { volume_fraction: 0.3, ..spec };
        assert!(matches!(rasterize_laminate(&bad, grid), Err(Error::Rasterization(_))));
    }

    #[test]
    fn contrast_materials() {
        let (core, coat) = contrast_sweep_materials(100e9, 10.0).unwrap();
        assert_eq!(core.young_modulus, 100e9);
        assert!((coat.young_modulus - 1000e9).abs() < 1e-3);
        assert_eq!(coat.poisson_ratio, 0.3);
        let (a, b) = contrast_sweep_materials(100e9, 1.0).unwrap();
        assert_eq!(a, b);
        let (_, soft) = contrast_sweep_materials(100e9, 1e-3).unwrap();
        assert!((soft.young_modulus - 0.1e9).abs() < 1e-3);
        assert!(contrast_sweep_materials(100e9, 0.0).is_err());
        assert!(contrast_sweep_materials(100e9, -2.0).is_err());
    }

    #[test]
    fn phase_map_validation() {
        let grid = GridSpec::new(2, 4).unwrap();
        assert!(StiffnessField::from_phase_map(grid, vec![0; 15], vec![mat(1.0)]).is_err());
        assert!(StiffnessField::from_phase_map(grid, vec![1; 16], vec![mat(1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn stiffness_positive_definite(e in 1e-3..1e3f64, nu in -0.99..0.499f64, d in 2usize..=3) {
            let grid = GridSpec::new(d, 4).unwrap();
            let c = StiffnessField::homogeneous(grid, IsotropicMaterial::new(e, nu).unwrap()).unwrap();
            prop_assert!(c.check_admissible().is_ok());
        }

        #[test]
        fn rasterization_is_order_independent(r1 in 0.05..0.3f64, dr in 0.01..0.2f64) {
            let spec = HashinSpec { r1, r2: (r1 + dr).min(0.5), ..Default::default() };
            let grid = GridSpec::new(2, 32).unwrap();
            let c = rasterize_hashin(&spec, grid).unwrap();
            for p in (0..grid.num_points()).rev() {
                let x = grid.coordinate(p);
                prop_assert_eq!(c.phase_map()[p], spec.phase_at([x[0], x[1]]));
            }
        }
    }
}
