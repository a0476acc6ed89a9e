//! Periodic tensor fields on uniform `n^d` grids over the unit torus and the
//! spectral operators acting on them.
//!
//! Grid point `p` with multi-index `(i_0, …, i_{d-1})` sits at
//! `x_j = i_j / n`, wrapped into `[-1/2, 1/2)`. Its dual frequency is
//! `ξ = 2πk` with `k_j ∈ [-n/2, n/2)` in standard FFT ordering.
//!
//! Field data is stored component-major: all grid values of component 0,
//! then component 1, and so on. A tensor of order `r` has `d^r` components in
//! row-major index order; symmetric tensors are stored in full.
//!
//! Odd-in-ξ operators (gradient, divergence, displacement recovery) write
//! zero at every Nyquist frequency, i.e. wherever some `k_j == -n/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

const MAX_POINTS: usize = 1 << 28;

/// Relative imaginary residue tolerated by [`ifft_field`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Relative tolerance of the compatibility check in [`recover_displacement`].
pub const COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    d: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::Grid(format!("dimension must be 2 or 3, got {d}")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Grid(format!("points per dimension must be even and >= 2, got {n}")));
        }
        match n.checked_pow(d as u32) {
            Some(total) if total <= MAX_POINTS => Ok(Self { d, n }),
            _ => Err(Error::Grid(format!("{n}^{d} grid points exceed the supported maximum"))),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Row-major multi-index of flat point `p` (unused slots are 0).
    #[inline]
    pub fn multi_index(&self, mut p: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for j in (0..self.d).rev() {
            idx[j] = p % self.n;
            p /= self.n;
        }
        idx
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.d].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinate of grid point `p` in `[-1/2, 1/2)^d`.
    pub fn coordinate(&self, p: usize) -> [f64; 3] {
        let idx = self.multi_index(p);
        let mut x = [0.0; 3];
        for j in 0..self.d {
            let i = if idx[j] < self.n / 2 {
                idx[j] as f64
            } else {
                idx[j] as f64 - self.n as f64
            };
            x[j] = i / self.n as f64;
        }
        x
    }

    /// Coordinate in `[0, 1)^d`, i.e. `i_j / n`.
    pub fn unit_coordinate(&self, p: usize) -> [f64; 3] {
        let idx = self.multi_index(p);
        let mut x = [0.0; 3];
        for j in 0..self.d {
            x[j] = idx[j] as f64 / self.n as f64;
        }
        x
    }

    pub fn frequency(&self, p: usize) -> FrequencyIndex {
        let idx = self.multi_index(p);
        let mut k = [0i64; 3];
        for j in 0..self.d {
            k[j] = if idx[j] < self.n / 2 {
                idx[j] as i64
            } else {
                idx[j] as i64 - self.n as i64
            };
        }
        FrequencyIndex { d: self.d, k }
    }

    /// Flat index of the frequency `k` (inverse of [`GridSpec::frequency`]).
    pub fn frequency_position(&self, k: &[i64]) -> usize {
        let n = self.n as i64;
        let idx: Vec<usize> = k[..self.d].iter().map(|&kj| kj.rem_euclid(n) as usize).collect();
        self.flat_index(&idx)
    }
}

/// Integer wave vector `k`; the physical frequency is `ξ = 2πk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyIndex {
    d: usize,
    k: [i64; 3],
}

impl FrequencyIndex {
    pub fn k(&self) -> &[i64] {
        &self.k[..self.d]
    }

    pub fn xi(&self) -> [f64; 3] {
        let mut xi = [0.0; 3];
        for j in 0..self.d {
            xi[j] = 2.0 * PI * self.k[j] as f64;
        }
        xi
    }

    pub fn is_zero(&self) -> bool {
        self.k().iter().all(|&k| k == 0)
    }

    pub fn is_nyquist(&self, n: usize) -> bool {
        self.k().iter().any(|&k| k == -(n as i64) / 2)
    }
}

/// Per-point frequency data precomputed once per grid.
#[derive(Debug, Clone)]
pub(crate) struct FrequencyTable {
    pub xi: Vec<[f64; 3]>,
    /// `false` at `ξ = 0` and on Nyquist planes.
    pub active: Vec<bool>,
}

impl FrequencyTable {
    pub fn new(grid: &GridSpec) -> Self {
        let total = grid.num_points();
        let mut xi = Vec::with_capacity(total);
        let mut active = Vec::with_capacity(total);
        for p in 0..total {
            let f = grid.frequency(p);
            xi.push(f.xi());
            active.push(!f.is_zero() && !f.is_nyquist(grid.n()));
        }
        Self { xi, active }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Real,
    Fourier,
}

#[derive(Debug, Clone, PartialEq)]
enum FieldData {
    Real(Vec<f64>),
    Fourier(Vec<Complex64>),
}

/// A grid function with tensor values of a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: GridSpec,
    order: usize,
    data: FieldData,
}

impl TensorField {
    fn check_len(grid: &GridSpec, order: usize, len: usize) -> Result<()> {
        if !(1..=4).contains(&order) {
            return Err(Error::Shape(format!("tensor order must be 1..=4, got {order}")));
        }
        let want = grid.d.pow(order as u32) * grid.num_points();
        if len != want {
            return Err(Error::Shape(format!("field data has {len} values, expected {want}")));
        }
        Ok(())
    }

    pub fn from_real(grid: GridSpec, order: usize, data: Vec<f64>) -> Result<Self> {
        Self::check_len(&grid, order, data.len())?;
        Ok(Self {
            grid,
            order,
            data: FieldData::Real(data),
        })
    }

    pub fn from_fourier(grid: GridSpec, order: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::check_len(&grid, order, data.len())?;
        Ok(Self {
            grid,
            order,
            data: FieldData::Fourier(data),
        })
    }

    pub fn zeros(grid: GridSpec, order: usize) -> Result<Self> {
        Self::from_real(grid, order, vec![0.0; grid.d.pow(order as u32) * grid.num_points()])
    }

    pub fn zeros_fourier(grid: GridSpec, order: usize) -> Result<Self> {
        Self::from_fourier(grid, order, vec![Complex64::default(); grid.d.pow(order as u32) * grid.num_points()])
    }

    /// Real field sampled from `f(x)`, which returns all `d^order` components
    /// at the wrapped coordinate `x`.
    pub fn from_fn(grid: GridSpec, order: usize, f: impl Fn([f64; 3]) -> Vec<f64>) -> Result<Self> {
        let ncomp = grid.d.pow(order as u32);
        let total = grid.num_points();
        let mut data = vec![0.0; ncomp * total];
        for p in 0..total {
            let vals = f(grid.coordinate(p));
            if vals.len() != ncomp {
                return Err(Error::Shape(format!("sampler returned {} components, expected {ncomp}", vals.len())));
            }
            for (c, v) in vals.into_iter().enumerate() {
                data[c * total + p] = v;
            }
        }
        Self::from_real(grid, order, data)
    }

    /// Constant real field of a symmetric second-order tensor.
    pub fn constant_sym(grid: GridSpec, value: &crate::tensor::SymTensor2) -> Result<Self> {
        if value.dim() != grid.d {
            return Err(Error::Shape("tensor dimension differs from grid".into()));
        }
        let flat = value.to_flat();
        Self::from_fn(grid, 2, |_| flat.clone())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_components(&self) -> usize {
        self.grid.d.pow(self.order as u32)
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Real(_) => Representation::Real,
            FieldData::Fourier(_) => Representation::Fourier,
        }
    }

    fn wrong(&self, expected: Representation) -> Error {
        Error::Representation {
            expected,
            found: self.representation(),
        }
    }

    pub fn real(&self) -> Result<&[f64]> {
        match &self.data {
            FieldData::Real(v) => Ok(v),
            _ => Err(self.wrong(Representation::Real)),
        }
    }

    pub fn real_mut(&mut self) -> Result<&mut [f64]> {
        match &mut self.data {
            FieldData::Real(v) => Ok(v),
            FieldData::Fourier(_) => Err(Error::Representation {
                expected: Representation::Real,
                found: Representation::Fourier,
            }),
        }
    }

    pub fn fourier(&self) -> Result<&[Complex64]> {
        match &self.data {
            FieldData::Fourier(v) => Ok(v),
            _ => Err(self.wrong(Representation::Fourier)),
        }
    }

    pub fn fourier_mut(&mut self) -> Result<&mut [Complex64]> {
        match &mut self.data {
            FieldData::Fourier(v) => Ok(v),
            FieldData::Real(_) => Err(Error::Representation {
                expected: Representation::Fourier,
                found: Representation::Real,
            }),
        }
    }

    pub fn into_real(self) -> Result<Vec<f64>> {
        match self.data {
            FieldData::Real(v) => Ok(v),
            FieldData::Fourier(_) => Err(Error::Representation {
                expected: Representation::Real,
                found: Representation::Fourier,
            }),
        }
    }

    pub fn into_fourier(self) -> Result<Vec<Complex64>> {
        match self.data {
            FieldData::Fourier(v) => Ok(v),
            FieldData::Real(_) => Err(Error::Representation {
                expected: Representation::Fourier,
                found: Representation::Real,
            }),
        }
    }

    /// Real values of component `c` (row-major tensor index).
    pub fn component(&self, c: usize) -> Result<&[f64]> {
        let total = self.grid.num_points();
        Ok(&self.real()?[c * total..(c + 1) * total])
    }

    /// Grid mean of every component.
    pub fn mean(&self) -> Vec<f64> {
        let total = self.grid.num_points();
        match &self.data {
            FieldData::Real(v) => v.chunks(total).map(|c| c.iter().sum::<f64>() / total as f64).collect(),
            FieldData::Fourier(v) => v.chunks(total).map(|c| c[0].re).collect(),
        }
    }

    /// Root-mean-square L² norm over grid points (components summed).
    pub fn l2_norm(&self) -> f64 {
        match &self.data {
            FieldData::Real(v) => rms(v, self.grid.num_points()),
            FieldData::Fourier(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// `self - other` for fields in the same representation.
    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same(other)?;
        let data = match (&self.data, &other.data) {
            (FieldData::Real(a), FieldData::Real(b)) => {
                FieldData::Real(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            (FieldData::Fourier(a), FieldData::Fourier(b)) => {
                FieldData::Fourier(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            _ => return Err(other.wrong(self.representation())),
        };
        Ok(TensorField {
            grid: self.grid,
            order: self.order,
            data,
        })
    }

    pub fn check_same(&self, other: &TensorField) -> Result<()> {
        if self.grid != other.grid || self.order != other.order {
            return Err(Error::Shape(format!(
                "field shapes differ: {:?}/order {} vs {:?}/order {}",
                self.grid, self.order, other.grid, other.order
            )));
        }
        Ok(())
    }
}

/// RMS norm of a component-major buffer with `total` points per component.
pub(crate) fn rms(v: &[f64], total: usize) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / total as f64).sqrt()
}

pub fn fft_field(f: &TensorField) -> Result<TensorField> {
    let real = f.real()?;
    TensorField::from_fourier(f.grid, f.order, fft::forward_real(&f.grid, real))
}

pub fn ifft_field(f: &TensorField) -> Result<TensorField> {
    let spec = f.fourier()?.to_vec();
    let total = f.grid.num_points();
    let mut buf = spec;
    for chunk in buf.chunks_mut(total) {
        fft::transform(&f.grid, chunk, fft::Direction::Inverse);
    }
    let norm = (buf.iter().map(|z| z.norm_sqr()).sum::<f64>() / total as f64).sqrt();
    let residue = (buf.iter().map(|z| z.im * z.im).sum::<f64>() / total as f64).sqrt();
    if residue > IMAG_RESIDUE_TOL * norm {
        return Err(Error::SymmetryViolation { residue, norm });
    }
    TensorField::from_real(f.grid, f.order, buf.into_iter().map(|z| z.re).collect())
}

fn to_fourier(f: &TensorField) -> Result<(Vec<Complex64>, bool)> {
    match &f.data {
        FieldData::Real(v) => Ok((fft::forward_real(&f.grid, v), true)),
        FieldData::Fourier(v) => Ok((v.clone(), false)),
    }
}

fn from_fourier_like(grid: GridSpec, order: usize, data: Vec<Complex64>, to_real: bool) -> Result<TensorField> {
    let out = TensorField::from_fourier(grid, order, data)?;
    if to_real {
        ifft_field(&out)
    } else {
        Ok(out)
    }
}

pub(crate) fn sym_gradient_hat(grid: &GridSpec, freqs: &FrequencyTable, u_hat: &[Complex64]) -> Vec<Complex64> {
    let d = grid.d;
    let total = grid.num_points();
    let mut out = vec![Complex64::default(); d * d * total];
    let half_i = Complex64::new(0.0, 0.5);
    for p in 0..total {
        if !freqs.active[p] {
            continue;
        }
        let xi = freqs.xi[p];
        for k in 0..d {
            for l in 0..d {
                out[(k * d + l) * total + p] = half_i * (xi[k] * u_hat[l * total + p] + xi[l] * u_hat[k * total + p]);
            }
        }
    }
    out
}

pub(crate) fn divergence_hat(grid: &GridSpec, freqs: &FrequencyTable, s_hat: &[Complex64]) -> Vec<Complex64> {
    let d = grid.d;
    let total = grid.num_points();
    let mut out = vec![Complex64::default(); d * total];
    let i_unit = Complex64::new(0.0, 1.0);
    for p in 0..total {
        if !freqs.active[p] {
            continue;
        }
        let xi = freqs.xi[p];
        for i in 0..d {
            let mut acc = Complex64::default();
            for j in 0..d {
                acc += xi[j] * s_hat[(i * d + j) * total + p];
            }
            out[i * total + p] = i_unit * acc;
        }
    }
    out
}

/// Partial derivative `∂/∂y_axis` of every component, in Fourier space.
pub(crate) fn partial_hat(grid: &GridSpec, freqs: &FrequencyTable, f_hat: &[Complex64], axis: usize) -> Vec<Complex64> {
    let total = grid.num_points();
    let mut out = vec![Complex64::default(); f_hat.len()];
    for (c, chunk) in out.chunks_mut(total).enumerate() {
        for p in 0..total {
            if !freqs.active[p] {
                continue;
            }
            chunk[p] = Complex64::new(0.0, freqs.xi[p][axis]) * f_hat[c * total + p];
        }
    }
    out
}

pub(crate) fn recover_displacement_hat(grid: &GridSpec, freqs: &FrequencyTable, eps_hat: &[Complex64]) -> Vec<Complex64> {
    let d = grid.d;
    let total = grid.num_points();
    let mut out = vec![Complex64::default(); d * total];
    let minus_i = Complex64::new(0.0, -1.0);
    for p in 0..total {
        if !freqs.active[p] {
            continue;
        }
        let xi = freqs.xi[p];
        let xi2: f64 = xi[..d].iter().map(|x| x * x).sum();
        let mut exi = [Complex64::default(); 3];
        for i in 0..d {
            for j in 0..d {
                exi[i] += eps_hat[(i * d + j) * total + p] * xi[j];
            }
        }
        let xexi: Complex64 = (0..d).map(|i| xi[i] * exi[i]).sum();
        for i in 0..d {
            out[i * total + p] = minus_i * (2.0 * exi[i] / xi2 - xi[i] * xexi / (xi2 * xi2));
        }
    }
    out
}

/// `ε = ½(∇u + ∇uᵀ)` computed spectrally; output in the input's representation.
pub fn spectral_sym_gradient(u: &TensorField) -> Result<TensorField> {
    if u.order != 1 {
        return Err(Error::Shape(format!("symmetric gradient needs a vector field, got order {}", u.order)));
    }
    let (u_hat, was_real) = to_fourier(u)?;
    let freqs = FrequencyTable::new(&u.grid);
    from_fourier_like(u.grid, 2, sym_gradient_hat(&u.grid, &freqs, &u_hat), was_real)
}

/// `(∇·s)_i = ∂_j s_ij` computed spectrally; output in the input's representation.
pub fn spectral_divergence(s: &TensorField) -> Result<TensorField> {
    if s.order != 2 {
        return Err(Error::Shape(format!("divergence needs an order-2 field, got order {}", s.order)));
    }
    let (s_hat, was_real) = to_fourier(s)?;
    let freqs = FrequencyTable::new(&s.grid);
    from_fourier_like(s.grid, 1, divergence_hat(&s.grid, &freqs, &s_hat), was_real)
}

/// Zero-mean displacement whose symmetric gradient is the given compatible
/// strain. Both input and output are in Fourier representation.
pub fn recover_displacement(eps_hat: &TensorField) -> Result<TensorField> {
    if eps_hat.order != 2 {
        return Err(Error::Shape(format!("strain must be order 2, got order {}", eps_hat.order)));
    }
    let e = eps_hat.fourier()?;
    let grid = eps_hat.grid;
    let freqs = FrequencyTable::new(&grid);
    let u_hat = recover_displacement_hat(&grid, &freqs, e);

    let back = sym_gradient_hat(&grid, &freqs, &u_hat);
    let total = grid.num_points();
    let (mut res, mut norm) = (0.0, 0.0);
    for (c, chunk) in back.chunks(total).enumerate() {
        for p in (0..total).filter(|&p| freqs.active[p]) {
            let want = e[c * total + p];
            res += (chunk[p] - want).norm_sqr();
            norm += want.norm_sqr();
        }
    }
    if res > COMPATIBILITY_TOL * COMPATIBILITY_TOL * norm {
        return Err(Error::Compatibility((res / norm).sqrt()));
    }
    TensorField::from_fourier(grid, 1, u_hat)
}

/// Removes the grid mean of every component.
pub fn zero_mean(f: &TensorField) -> TensorField {
    let total = f.grid.num_points();
    let mut out = f.clone();
    match &mut out.data {
        FieldData::Fourier(v) => v.chunks_mut(total).for_each(|c| c[0] = Complex64::default()),
        FieldData::Real(v) => {
            for c in v.chunks_mut(total) {
                let m = c.iter().sum::<f64>() / total as f64;
                c.iter_mut().for_each(|x| *x -= m);
            }
        }
    }
    out
}

/// Mean of `|ξ|` over non-zero, non-Nyquist frequencies; the scale used to
/// normalize divergence residuals.
pub fn mean_frequency_magnitude(grid: &GridSpec) -> f64 {
    let freqs = FrequencyTable::new(grid);
    let d = grid.d;
    let (sum, count) = freqs
        .xi
        .iter()
        .zip(&freqs.active)
        .filter(|(_, &a)| a)
        .fold((0.0, 0usize), |(s, c), (xi, _)| (s + xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt(), c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
