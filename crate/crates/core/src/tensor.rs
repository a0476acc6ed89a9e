//! Small dense tensors over `d ∈ {2, 3}` with full-component storage.
//!
//! Every type stores its components in a fixed-size array laid out with
//! stride 3 per index, so a 2D tensor simply leaves the third slots at zero.
//! Contractions are explicit index sums; no Voigt or Mandel compression is
//! used anywhere.

use crate::error::{Error, Result};

const S: usize = 3;

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Shape(format!("dimension must be 2 or 3, got {d}")))
    }
}

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// General (not necessarily symmetric) second-order tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    d: usize,
    c: [f64; S * S],
}

impl Tensor2 {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { d, c: [0.0; S * S] })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * S + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.c[i * S + j] = v;
    }

    /// `½(A + Aᵀ)`.
    pub fn symmetrized(&self) -> SymTensor2 {
        let mut out = SymTensor2 {
            d: self.d,
            c: [0.0; S * S],
        };
        for i in 0..self.d {
            for j in 0..self.d {
                out.c[i * S + j] = 0.5 * (self.get(i, j) + self.get(j, i));
            }
        }
        out
    }
}

/// Symmetric second-order tensor (a strain or stress value at one point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor2 {
    d: usize,
    c: [f64; S * S],
}

impl SymTensor2 {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { d, c: [0.0; S * S] })
    }

    pub fn identity(d: usize) -> Result<Self> {
        let mut t = Self::zeros(d)?;
        for i in 0..d {
            t.c[i * S + i] = 1.0;
        }
        Ok(t)
    }

    /// Symmetric unit basis tensor: 1 at `(m, n)` and `(n, m)`, 0 elsewhere.
    pub fn unit(d: usize, m: usize, n: usize) -> Result<Self> {
        let mut t = Self::zeros(d)?;
        if m >= d || n >= d {
            return Err(Error::Shape(format!("index ({m},{n}) out of range for d={d}")));
        }
        t.c[m * S + n] = 1.0;
        t.c[n * S + m] = 1.0;
        Ok(t)
    }

    /// Builds from row-major components; rejects asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut t = Self::zeros(d)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {d}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                t.c[i * S + j] = v;
            }
        }
        for i in 0..d {
            for j in 0..i {
                let (a, b) = (t.get(i, j), t.get(j, i));
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Shape(format!("tensor not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(t)
    }

    /// Builds from a flat row-major `d*d` slice, symmetrizing.
    pub fn from_flat_sym(d: usize, flat: &[f64]) -> Result<Self> {
        check_dim(d)?;
        if flat.len() != d * d {
            return Err(Error::Shape(format!("expected {} components, got {}", d * d, flat.len())));
        }
        let mut t = Self::zeros(d)?;
        for i in 0..d {
            for j in 0..d {
                t.c[i * S + j] = 0.5 * (flat[i * d + j] + flat[j * d + i]);
            }
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * S + j]
    }

    /// Row-major `d*d` components.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.d * self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                v.push(self.get(i, j));
            }
        }
        v
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Shape("dimension mismatch in tensor sum".into()));
        }
        let mut out = *self;
        out.c.iter_mut().zip(other.c.iter()).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Third-order tensor, e.g. the corrector value `X₁(y)` or a macroscopic
/// strain gradient `∇E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3 {
    d: usize,
    c: [f64; S * S * S],
}

impl Tensor3 {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            d,
            c: [0.0; S * S * S],
        })
    }

    /// Builds from a flat row-major `d*d*d` slice.
    pub fn from_flat(d: usize, flat: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(d)?;
        if flat.len() != d * d * d {
            return Err(Error::Shape(format!("expected {} components, got {}", d * d * d, flat.len())));
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    t.set(i, j, k, flat[(i * d + j) * d + k]);
                }
            }
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * S + j) * S + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.c[(i * S + j) * S + k] = v;
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let d = self.d;
        let mut v = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    v.push(self.get(i, j, k));
                }
            }
        }
        v
    }

    pub fn is_symmetric_first_two(&self, tol: f64) -> bool {
        let d = self.d;
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| (self.get(i, j, k) - self.get(j, i, k)).abs() <= tol)))
    }

    pub fn is_symmetric_last_two(&self, tol: f64) -> bool {
        let d = self.d;
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| (self.get(i, j, k) - self.get(i, k, j)).abs() <= tol)))
    }
}

/// Fourth-order stiffness-like tensor with minor and major symmetries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stiffness4 {
    d: usize,
    c: [f64; S * S * S * S],
}

impl Stiffness4 {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            d,
            c: [0.0; S * S * S * S],
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[((i * S + j) * S + k) * S + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.c[((i * S + j) * S + k) * S + l] = v;
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Shape("dimension mismatch in stiffness difference".into()));
        }
        let mut out = *self;
        out.c.iter_mut().zip(other.c.iter()).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// Dense `d²×d²` row-major matrix acting on row-major flattened tensors.
    pub fn to_matrix(&self) -> Vec<f64> {
        let d = self.d;
        let dd = d * d;
        let mut m = vec![0.0; dd * dd];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        m[(i * d + j) * dd + k * d + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        m
    }

    pub fn has_minor_symmetries(&self, tol: f64) -> bool {
        self.all_indices(|i, j, k, l| {
            let c = self.get(i, j, k, l);
            (c - self.get(j, i, k, l)).abs() <= tol && (c - self.get(i, j, l, k)).abs() <= tol
        })
    }

    pub fn has_major_symmetry(&self, tol: f64) -> bool {
        self.all_indices(|i, j, k, l| (self.get(i, j, k, l) - self.get(k, l, i, j)).abs() <= tol)
    }

    fn all_indices(&self, f: impl Fn(usize, usize, usize, usize) -> bool) -> bool {
        let d = self.d;
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| (0..d).all(|l| f(i, j, k, l)))))
    }
}

/// Isotropic linear elastic material given by engineering constants.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IsotropicMaterial {
    pub young_modulus: f64,
    pub poisson_ratio: f64,
}

impl IsotropicMaterial {
    pub fn new(young_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        let m = Self {
            young_modulus,
            poisson_ratio,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        lame_from_engineering(self.young_modulus, self.poisson_ratio).map(|_| ())
    }

    pub fn lame_lambda(&self) -> f64 {
        let (l, _) = lame_unchecked(self.young_modulus, self.poisson_ratio);
        l
    }

    pub fn lame_mu(&self) -> f64 {
        let (_, m) = lame_unchecked(self.young_modulus, self.poisson_ratio);
        m
    }

    /// P-wave modulus `λ + 2μ`.
    pub fn p_wave_modulus(&self) -> f64 {
        self.lame_lambda() + 2.0 * self.lame_mu()
    }

    pub fn stiffness(&self, d: usize) -> Result<Stiffness4> {
        iso_stiffness(self.lame_lambda(), self.lame_mu(), d)
    }
}

fn lame_unchecked(e: f64, nu: f64) -> (f64, f64) {
    (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
}

/// Converts Young's modulus and Poisson's ratio to Lamé constants `(λ, μ)`.
pub fn lame_from_engineering(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidMaterial(format!("Young's modulus must be positive, got {e}")));
    }
    if nu >= 0.5 {
        return Err(Error::Incompressible(nu));
    }
    if !(nu > -1.0) {
        return Err(Error::InvalidMaterial(format!("Poisson's ratio must exceed -1, got {nu}")));
    }
    Ok(lame_unchecked(e, nu))
}

/// `C_ijkl = λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk)`.
pub fn iso_stiffness(lambda: f64, mu: f64, d: usize) -> Result<Stiffness4> {
    if mu == 0.0 {
        return Err(Error::InvalidReferenceMaterial("shear modulus must be nonzero".into()));
    }
    let mut c = Stiffness4::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let v = lambda * delta(i, j) * delta(k, l)
                        + mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
                    c.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(c)
}

/// Double-dot product `C ⫶ e`.
pub fn ddot42(c: &Stiffness4, e: &SymTensor2) -> Result<SymTensor2> {
    let d = c.dim();
    if e.dim() != d {
        return Err(Error::Shape(format!("stiffness is {d}D, strain is {}D", e.dim())));
    }
    let mut out = SymTensor2::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                for l in 0..d {
                    acc += c.get(i, j, k, l) * e.get(k, l);
                }
            }
            out.c[i * S + j] = acc;
        }
    }
    Ok(out)
}

/// Contracts a corrector value with a macroscopic strain gradient over the
/// macroscopic-strain index pair: `A_il = Σ_mn X_imn ∇E_mnl`.
pub fn contract_x_grad_e(x: &Tensor3, grad_e: &Tensor3) -> Result<Tensor2> {
    let d = x.dim();
    if grad_e.dim() != d {
        return Err(Error::Shape(format!("corrector is {d}D, gradient is {}D", grad_e.dim())));
    }
    let mut out = Tensor2::zeros(d)?;
    for i in 0..d {
        for l in 0..d {
            let mut acc = 0.0;
            for m in 0..d {
                for n in 0..d {
                    acc += x.get(i, m, n) * grad_e.get(m, n, l);
                }
            }
            out.set(i, l, acc);
        }
    }
    Ok(out)
}
