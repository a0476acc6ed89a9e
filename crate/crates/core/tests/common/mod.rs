//! Oracles shared by the integration tests. Everything here is computed
//! without the library's transforms, Green operator or tensor algebra.
#![allow(dead_code)]

use std::f64::consts::PI;

use homfft::field::{fft_field, recover_displacement, spectral_divergence, spectral_sym_gradient};
use homfft::microstructure::{rasterize_hashin, rasterize_laminate, HashinSpec, LaminateSpec, StiffnessField};
use homfft::{GridSpec, IsotropicMaterial, ReferenceMaterial, SymTensor2, TensorField};
use num_complex::Complex64;

pub const NU: f64 = 0.3;

pub fn material(e: f64) -> IsotropicMaterial {
    IsotropicMaterial {
        young_modulus: e,
        poisson_ratio: NU,
    }
}

pub fn hashin(n: usize) -> StiffnessField {
    rasterize_hashin(&HashinSpec::default(), GridSpec::new(2, n).unwrap()).unwrap()
}

/// 50/50 laminate of 100 and 1000 GPa layers stacked along axis 1.
pub fn laminate(n: usize) -> StiffnessField {
    let spec = LaminateSpec {
        layer_normal: 0,
        volume_fraction: 0.5,
        phase_a: material(100e9),
        phase_b: material(1000e9),
    };
    rasterize_laminate(&spec, GridSpec::new(2, n).unwrap()).unwrap()
}

pub fn uniaxial() -> SymTensor2 {
    SymTensor2::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap()
}

pub fn lame(m: &IsotropicMaterial) -> (f64, f64) {
    let (e, nu) = (m.young_modulus, m.poisson_ratio);
    (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
}

/// Closed-form `(⟨σ₁₁⟩, ⟨σ₂₂⟩)` of a laminate with normal e₁ under `E = e₁⊗e₁`.
pub fn laminate_oracle(c: &StiffnessField) -> (f64, f64) {
    let total = c.grid().num_points() as f64;
    let (mut inv_p, mut ratio) = (0.0, 0.0);
    for p in 0..c.grid().num_points() {
        let (l, m) = lame(c.material_at(p));
        inv_p += 1.0 / (l + 2.0 * m) / total;
        ratio += l / (l + 2.0 * m) / total;
    }
    (1.0 / inv_p, ratio / inv_p)
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn iso(l: f64, m: f64, i: usize, j: usize, k: usize, q: usize) -> f64 {
    l * delta(i, j) * delta(k, q) + m * (delta(i, k) * delta(j, q) + delta(i, q) * delta(j, k))
}

/// Full-tensor Green coefficient of an isotropic reference medium.
pub fn green_full(l0: f64, m0: f64, xi: &[f64], i: usize, j: usize, k: usize, h: usize) -> f64 {
    let x2: f64 = xi.iter().map(|v| v * v).sum();
    (delta(k, i) * xi[h] * xi[j] + delta(h, i) * xi[k] * xi[j] + delta(k, j) * xi[h] * xi[i] + delta(h, j) * xi[k] * xi[i])
        / (4.0 * m0 * x2)
        - (l0 + m0) / (m0 * (l0 + 2.0 * m0)) * xi[i] * xi[j] * xi[k] * xi[h] / (x2 * x2)
}

/// Integer frequency of FFT slot `s` on an axis of `n` points.
fn freq(s: usize, n: usize) -> i64 {
    if s < n / 2 {
        s as i64
    } else {
        s as i64 - n as i64
    }
}

/// Dense 2D periodic operator on full `d²·N` strain vectors: returns
/// `A = I + F⁻¹ Γ̂ F (C − C⁰)` and `b = −F⁻¹ Γ̂ F (C : E)`, built with an
/// explicit O(N²) DFT. Zero and Nyquist frequencies carry no Green term.
pub fn dense_system(c: &StiffnessField, r: &ReferenceMaterial, e: &SymTensor2) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = c.grid().n();
    let total = n * n;
    let d = 2;
    let dim = d * d * total;
    let lame_at: Vec<(f64, f64)> = (0..total).map(|p| lame(c.material_at(p))).collect();

    // Γ ∗ τ for a real full-component polarization τ.
    let green_conv = |tau: &[f64]| -> Vec<f64> {
        let mut hat = vec![Complex64::default(); dim];
        for comp in 0..d * d {
            for k in 0..total {
                let (k0, k1) = (freq(k / n, n), freq(k % n, n));
                let mut acc = Complex64::default();
                for p in 0..total {
                    let (i0, i1) = ((p / n) as f64, (p % n) as f64);
                    let phase = -2.0 * PI * (k0 as f64 * i0 + k1 as f64 * i1) / n as f64;
                    acc += tau[comp * total + p] * Complex64::from_polar(1.0, phase);
                }
                hat[comp * total + k] = acc / total as f64;
            }
        }
        let mut out_hat = vec![Complex64::default(); dim];
        for k in 0..total {
            let (k0, k1) = (freq(k / n, n), freq(k % n, n));
            let nyq = -(n as i64) / 2;
            if (k0 == 0 && k1 == 0) || k0 == nyq || k1 == nyq {
                continue;
            }
            let xi = [2.0 * PI * k0 as f64, 2.0 * PI * k1 as f64];
            for i in 0..d {
                for j in 0..d {
                    let mut acc = Complex64::default();
                    for a in 0..d {
                        for b in 0..d {
                            acc += green_full(r.lambda0, r.mu0, &xi, i, j, a, b) * hat[(a * d + b) * total + k];
                        }
                    }
                    out_hat[(i * d + j) * total + k] = acc;
                }
            }
        }
        let mut out = vec![0.0; dim];
        for comp in 0..d * d {
            for p in 0..total {
                let (i0, i1) = ((p / n) as f64, (p % n) as f64);
                let mut acc = Complex64::default();
                for k in 0..total {
                    let (k0, k1) = (freq(k / n, n), freq(k % n, n));
                    let phase = 2.0 * PI * (k0 as f64 * i0 + k1 as f64 * i1) / n as f64;
                    acc += out_hat[comp * total + k] * Complex64::from_polar(1.0, phase);
                }
                out[comp * total + p] = acc.re;
            }
        }
        out
    };

    let contract = |eps: &[f64], offset: f64| -> Vec<f64> {
        let mut tau = vec![0.0; dim];
        for p in 0..total {
            let (l, m) = lame_at[p];
            for i in 0..d {
                for j in 0..d {
                    let mut acc = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            let cc = iso(l, m, i, j, a, b) - offset * iso(r.lambda0, r.mu0, i, j, a, b);
                            acc += cc * eps[(a * d + b) * total + p];
                        }
                    }
                    tau[(i * d + j) * total + p] = acc;
                }
            }
        }
        tau
    };

    let mut a = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        let mut unit = vec![0.0; dim];
        unit[col] = 1.0;
        let g = green_conv(&contract(&unit, 1.0));
        for row in 0..dim {
            a[row][col] = unit[row] + g[row];
        }
    }
    let mut macro_field = vec![0.0; dim];
    for i in 0..d {
        for j in 0..d {
            macro_field[(i * d + j) * total..(i * d + j + 1) * total].fill(e.get(i, j));
        }
    }
    let b = green_conv(&contract(&macro_field, 0.0)).iter().map(|v| -v).collect();
    (a, b)
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..m {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

/// A displacement made of a few harmonics `(k, amplitude_cos, amplitude_sin)`
/// per component, with its analytic gradient `∂_j u_l`.
pub struct Harmonics {
    pub terms: Vec<Vec<([i64; 2], f64, f64)>>,
}

impl Harmonics {
    /// Wavenumbers are bounded by `kmax` in each axis.
    pub fn sample(kmax: i64) -> Self {
        let ks = [[1, 0], [0, 1], [1, -1], [kmax, 1], [-2.min(kmax), kmax]];
        let terms = (0..2)
            .map(|l| {
                ks.iter()
                    .enumerate()
                    .map(|(h, &k)| (k, 0.3 + 0.1 * (h + l) as f64, 0.5 - 0.07 * (h * l) as f64))
                    .collect()
            })
            .collect();
        Self { terms }
    }

    pub fn value(&self, l: usize, x: [f64; 2]) -> f64 {
        self.terms[l]
            .iter()
            .map(|&(k, a, b)| {
                let t = 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
                a * t.cos() + b * t.sin()
            })
            .sum()
    }

    pub fn grad(&self, l: usize, j: usize, x: [f64; 2]) -> f64 {
        self.terms[l]
            .iter()
            .map(|&(k, a, b)| {
                let t = 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
                2.0 * PI * k[j] as f64 * (-a * t.sin() + b * t.cos())
            })
            .sum()
    }

    pub fn field(&self, grid: GridSpec) -> TensorField {
        TensorField::from_fn(grid, 1, |x| (0..2).map(|l| self.value(l, [x[0], x[1]])).collect()).unwrap()
    }
}

fn max_abs_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Central difference along axis `j` of component `c` of a real field.
pub fn central_difference(f: &TensorField, c: usize, j: usize) -> Vec<f64> {
    let grid = *f.grid();
    let n = grid.n();
    let h = 1.0 / n as f64;
    let data = f.component(c).unwrap();
    (0..grid.num_points())
        .map(|p| {
            let idx = grid.multi_index(p);
            let mut fwd = idx;
            let mut bwd = idx;
            fwd[j] = (idx[j] + 1) % n;
            bwd[j] = (idx[j] + n - 1) % n;
            (data[grid.flat_index(&fwd[..2])] - data[grid.flat_index(&bwd[..2])]) / (2.0 * h)
        })
        .collect()
}

pub struct SpectralReport {
    /// Max relative error of the spectral symmetric gradient on a band-limited field.
    pub gradient_exact: f64,
    /// Max relative error of the spectral divergence on a band-limited field.
    pub divergence_exact: f64,
    /// Relative L² error of `recover(sym_grad(u))` against zero-mean `u`.
    pub recovery: f64,
    /// Relative Parseval mismatch.
    pub parseval: f64,
    /// Spectral vs central-difference gradient errors at n = 16, 32, 64, 128.
    pub fd_errors: Vec<f64>,
}

pub fn spectral_report() -> SpectralReport {
    let grid = GridSpec::new(2, 16).unwrap();
    let u = Harmonics::sample(7);
    let field = u.field(grid);

    let eps = spectral_sym_gradient(&field).unwrap();
    let want = TensorField::from_fn(grid, 2, |x| {
        let x = [x[0], x[1]];
        let mut v = vec![0.0; 4];
        for k in 0..2 {
            for l in 0..2 {
                v[k * 2 + l] = 0.5 * (u.grad(l, k, x) + u.grad(k, l, x));
            }
        }
        v
    })
    .unwrap();
    let gradient_exact = max_abs_rel(eps.real().unwrap(), want.real().unwrap());

    // s_ij = ∂_j u_i; its divergence is Σ_j ∂_j ∂_j u_i
    let s = TensorField::from_fn(grid, 2, |x| {
        let x = [x[0], x[1]];
        (0..4).map(|c| u.grad(c / 2, c % 2, x)).collect()
    })
    .unwrap();
    let div = spectral_divergence(&s).unwrap();
    let want_div = TensorField::from_fn(grid, 1, |x| {
        let t = |k: [i64; 2]| 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
        (0..2)
            .map(|i| {
                u.terms[i]
                    .iter()
                    .map(|&(k, a, b)| {
                        let k2 = (2.0 * PI).powi(2) * (k[0] * k[0] + k[1] * k[1]) as f64;
                        -k2 * (a * t(k).cos() + b * t(k).sin())
                    })
                    .sum()
            })
            .collect()
    })
    .unwrap();
    let divergence_exact = max_abs_rel(div.real().unwrap(), want_div.real().unwrap());

    let u_hat = fft_field(&field).unwrap();
    let back = recover_displacement(&fft_field(&eps).unwrap()).unwrap();
    let num: f64 = back
        .fourier()
        .unwrap()
        .iter()
        .zip(u_hat.fourier().unwrap())
        .enumerate()
        .filter(|(i, _)| i % grid.num_points() != 0)
        .map(|(_, (a, b))| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = u_hat.fourier().unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let recovery = num / den;

    let real_sq: f64 = field.real().unwrap().iter().map(|v| v * v).sum::<f64>() / grid.num_points() as f64;
    let fourier_sq: f64 = u_hat.fourier().unwrap().iter().map(|z| z.norm_sqr()).sum();
    let parseval = (real_sq - fourier_sq).abs() / real_sq;

    let fd_errors = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = GridSpec::new(2, n).unwrap();
            let f = Harmonics::sample(3).field(g);
            let spectral = spectral_sym_gradient(&f).unwrap();
            let fd = central_difference(&f, 0, 0);
            rel_diff(&fd, spectral.component(0).unwrap())
        })
        .collect();

    SpectralReport {
        gradient_exact,
        divergence_exact,
        recovery,
        parseval,
        fd_errors,
    }
}
