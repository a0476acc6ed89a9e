//! Flat binary field dumps with JSON sidecar headers, and phase-map input.
//!
//! A dump `name` consists of `name.bin`, holding little-endian IEEE-754
//! doubles, and `name.json` describing the layout. Values are stored
//! component-major; within a component, grid points follow row-major order
//! (last axis fastest). Fourier dumps interleave real and imaginary parts.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, Representation, TensorField};

pub const FORMAT_VERSION: u32 = 1;
const LAYOUT: &str = "component-major, row-major grid (last axis fastest)";
const VALUE_TYPE: &str = "f64-le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format_version: u32,
    pub d: usize,
    pub n: usize,
    /// Tensor order; 0 for scalar maps.
    pub order: usize,
    pub representation: Representation,
    /// 1-based tensor indices of each stored component, e.g. `"12"`.
    pub components: Vec<String>,
    pub value_type: String,
    pub layout: String,
}

fn component_labels(d: usize, order: usize) -> Vec<String> {
    let count = d.pow(order as u32);
    (0..count)
        .map(|mut c| {
            let mut digits = vec![0; order];
            for slot in digits.iter_mut().rev() {
                *slot = c % d + 1;
                c /= d;
            }
            if order == 0 {
                "scalar".to_string()
            } else {
                digits.iter().map(|v| v.to_string()).collect()
            }
        })
        .collect()
}

fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{name}.bin")), dir.join(format!("{name}.json")))
}

fn write_raw(dir: &Path, name: &str, header: &FieldHeader, values: impl Iterator<Item = f64>) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (bin, json) = paths(dir, name);
    let bytes: Vec<u8> = values.flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&bin, bytes)?;
    fs::write(&json, serde_json::to_string_pretty(header)?)?;
    Ok(bin)
}

fn header_for(grid: &GridSpec, order: usize, representation: Representation) -> FieldHeader {
    FieldHeader {
        format_version: FORMAT_VERSION,
        d: grid.d(),
        n: grid.n(),
        order,
        representation,
        components: component_labels(grid.d(), order),
        value_type: VALUE_TYPE.into(),
        layout: LAYOUT.into(),
    }
}

/// Writes `dir/name.bin` and `dir/name.json`; returns the binary path.
pub fn write_field(dir: &Path, name: &str, field: &TensorField) -> Result<PathBuf> {
    let header = header_for(field.grid(), field.order(), field.representation());
    match field.representation() {
        Representation::Real => write_raw(dir, name, &header, field.real()?.iter().copied()),
        Representation::Fourier => write_raw(dir, name, &header, field.fourier()?.iter().flat_map(|z| [z.re, z.im])),
    }
}

/// Writes a real scalar map (order 0).
pub fn write_scalar(dir: &Path, name: &str, grid: &GridSpec, values: &[f64]) -> Result<PathBuf> {
    if values.len() != grid.num_points() {
        return Err(Error::Shape(format!("{} values for {} grid points", values.len(), grid.num_points())));
    }
    write_raw(dir, name, &header_for(grid, 0, Representation::Real), values.iter().copied())
}

pub fn read_header(dir: &Path, name: &str) -> Result<FieldHeader> {
    let (_, json) = paths(dir, name);
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(json)?)?;
    if header.format_version != FORMAT_VERSION || header.value_type != VALUE_TYPE {
        return Err(Error::Config(format!(
            "unsupported dump format version {} / value type {}",
            header.format_version, header.value_type
        )));
    }
    Ok(header)
}

fn read_values(dir: &Path, name: &str) -> Result<Vec<f64>> {
    let (bin, _) = paths(dir, name);
    let bytes = fs::read(bin)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Shape(format!("dump size {} is not a multiple of 8 bytes", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8 bytes")))
        .collect())
}

pub fn read_field(dir: &Path, name: &str) -> Result<TensorField> {
    let header = read_header(dir, name)?;
    let grid = GridSpec::new(header.d, header.n)?;
    let values = read_values(dir, name)?;
    match header.representation {
        Representation::Real => TensorField::from_real(grid, header.order, values),
        Representation::Fourier => TensorField::from_fourier(
            grid,
            header.order,
            values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        ),
    }
}

pub fn read_scalar(dir: &Path, name: &str) -> Result<(GridSpec, Vec<f64>)> {
    let header = read_header(dir, name)?;
    let grid = GridSpec::new(header.d, header.n)?;
    let values = read_values(dir, name)?;
    if header.order != 0 || values.len() != grid.num_points() {
        return Err(Error::Shape("dump is not a scalar map of the stated grid".into()));
    }
    Ok((grid, values))
}

/// Reads a whitespace-separated list of integer phase ids, one per grid
/// point in row-major order.
pub fn read_phase_map(path: &Path, grid: &GridSpec) -> Result<Vec<u32>> {
    let text = fs::read_to_string(path)?;
    let ids = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| Error::Config(format!("invalid phase id {tok:?} in {}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    if ids.len() != grid.num_points() {
        return Err(Error::Shape(format!(
            "phase map {} has {} entries, grid has {} points",
            path.display(),
            ids.len(),
            grid.num_points()
        )));
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn labels() {
        assert_eq!(component_labels(2, 2), vec!["11", "12", "21", "22"]);
        assert_eq!(component_labels(3, 1), vec!["1", "2", "3"]);
        assert_eq!(component_labels(2, 0), vec!["scalar"]);
    }

    #[test]
    fn byte_layout_is_little_endian_component_major() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(2, 2).unwrap();
        let f = TensorField::from_real(grid, 1, (0..8).map(|v| v as f64).collect()).unwrap();
        write_field(dir.path(), "u", &f).unwrap();
        let bytes = fs::read(dir.path().join("u.bin")).unwrap();
        assert_eq!(bytes.len(), 64);
        assert_eq!(&bytes[8..16], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[32..40], &4.0f64.to_le_bytes());
        let h = read_header(dir.path(), "u").unwrap();
        assert_eq!((h.d, h.n, h.order), (2, 2, 1));
    }

    #[test]
    fn phase_map_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(2, 2).unwrap();
        let p = dir.path().join("phases.txt");
        fs::write(&p, "0 1\n1 0\n").unwrap();
        assert_eq!(read_phase_map(&p, &grid).unwrap(), vec![0, 1, 1, 0]);
        fs::write(&p, "0 1 1").unwrap();
        assert!(read_phase_map(&p, &grid).is_err());
        fs::write(&p, "0 1 x 0").unwrap();
        assert!(read_phase_map(&p, &grid).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn dumps_round_trip(vals in proptest::collection::vec(proptest::num::f64::ANY, 32), fourier in any::<bool>()) {
            let dir = tempfile::tempdir().unwrap();
            let grid = GridSpec::new(2, 4).unwrap();
            let f = if fourier {
                TensorField::from_fourier(grid, 1, vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).chain(std::iter::repeat(Complex64::default())).take(32).collect()).unwrap()
            } else {
                TensorField::from_real(grid, 2, vals.iter().copied().chain(std::iter::repeat(0.0)).take(64).collect()).unwrap()
            };
            write_field(dir.path(), "f", &f).unwrap();
            let back = read_field(dir.path(), "f").unwrap();
            prop_assert_eq!(back.representation(), f.representation());
            let bits = |t: &TensorField| -> Vec<u64> {
                match t.representation() {
                    Representation::Real => t.real().unwrap().iter().map(|v| v.to_bits()).collect(),
                    Representation::Fourier => t.fourier().unwrap().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect(),
                }
            };
            prop_assert_eq!(bits(&back), bits(&f));
        }
    }
}
