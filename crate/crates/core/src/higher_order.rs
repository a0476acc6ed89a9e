//! Generalized cell problems of order α.
//!
//! The order-α problem reads `∇_y·(C ⫶ ε(u_α) + p_α) + g_α = 0` on the cell.
//! Order 1 is the classical problem with `p₁ = C ⫶ E` and `g₁ = 0`. Order 2
//! uses the first-order corrector `X₁`:
//!
//! ```text
//! p₂ = C ⫶ sym(X₁ · ∇E)
//! g₂ = ∇_Y · [C ⫶ (e_y(X₁ ⫶ E) + E)]
//! ```
//!
//! The body force enters the unchanged fixed-point/Krylov loop through the
//! strain-like term `θ̂(ξ)` with `iξ·θ̂ = ĝ`, giving the initialization
//! `ε₀ = −Γ⁰ ∗ (p_α + θ_α)`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{divergence_hat, mean_frequency_magnitude, partial_hat, FrequencyTable, GridSpec, TensorField};
use crate::green::ReferenceMaterial;
use crate::microstructure::StiffnessField;
use crate::solver::{macro_polarization, LsOperator, Order1Solution, SolveConfig};
use crate::tensor::{SymTensor2, Tensor3};

/// `X₁_kmn(y)`: displacement fluctuation per unit macroscopic strain,
/// stored as a real order-3 field (component `(k·d + m)·d + n`).
#[derive(Debug, Clone)]
pub struct CorrectorX1 {
    field: TensorField,
}

impl CorrectorX1 {
    pub fn new(field: TensorField) -> Result<Self> {
        if field.order() != 3 {
            return Err(Error::Shape(format!("corrector must be order 3, got {}", field.order())));
        }
        field.real()?;
        Ok(Self { field })
    }

    pub fn field(&self) -> &TensorField {
        &self.field
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    /// `u_k = X₁_kmn E_mn` at every grid point.
    pub fn displacement_for(&self, e: &SymTensor2) -> Result<TensorField> {
        let grid = *self.grid();
        let d = grid.d();
        if e.dim() != d {
            return Err(Error::Shape("macroscopic strain dimension differs from corrector".into()));
        }
        let total = grid.num_points();
        let x = self.field.real()?;
        let mut u = vec![0.0; d * total];
        for k in 0..d {
            for m in 0..d {
                for n in 0..d {
                    let w = e.get(m, n);
                    if w == 0.0 {
                        continue;
                    }
                    let src = &x[((k * d + m) * d + n) * total..][..total];
                    u[k * total..(k + 1) * total].iter_mut().zip(src).for_each(|(a, b)| *a += w * b);
                }
            }
        }
        TensorField::from_real(grid, 1, u)
    }
}

/// Macroscopic strain and its gradient `∇E_mnj = ∂E_mn/∂Y_j` at a fixed
/// macroscopic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroData {
    pub strain: SymTensor2,
    pub gradient: Tensor3,
}

impl MacroData {
    pub fn new(strain: SymTensor2, gradient: Tensor3) -> Result<Self> {
        if strain.dim() != gradient.dim() {
            return Err(Error::Shape("strain and gradient dimensions differ".into()));
        }
        if !gradient.is_symmetric_first_two(1e-12) {
            return Err(Error::Shape("strain gradient must be symmetric in its first two indices".into()));
        }
        Ok(Self { strain, gradient })
    }

    pub fn dim(&self) -> usize {
        self.strain.dim()
    }
}

/// Where a problem order sits in the hierarchy. Only the first two orders
/// have solve paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemOrder {
    First,
    Second,
    /// `p_α` uses `X_{α−1}·∇^{α−1}E` and `g_α` needs `X_{α−1}` and `X_{α−2}`.
    Higher(usize),
}

impl ProblemOrder {
    pub fn from_alpha(alpha: usize) -> Result<Self> {
        match alpha {
            0 => Err(Error::UnsupportedOrder(0)),
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            a => Ok(Self::Higher(a)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderAlphaProblem<'a> {
    pub alpha: usize,
    pub stiffness: &'a StiffnessField,
    pub reference: ReferenceMaterial,
    pub macro_data: MacroData,
    /// Precomputed `X₁` for α = 2; assembled on demand when absent.
    pub corrector: Option<Arc<CorrectorX1>>,
}

impl<'a> OrderAlphaProblem<'a> {
    pub fn new(alpha: usize, stiffness: &'a StiffnessField, reference: ReferenceMaterial, macro_data: MacroData) -> Result<Self> {
        ProblemOrder::from_alpha(alpha)?;
        if macro_data.dim() != stiffness.grid().d() {
            return Err(Error::Shape("macro data dimension differs from grid".into()));
        }
        Ok(Self {
            alpha,
            stiffness,
            reference,
            macro_data,
            corrector: None,
        })
    }

    pub fn with_corrector(mut self, corrector: Arc<CorrectorX1>) -> Self {
        self.corrector = Some(corrector);
        self
    }
}

/// Unit strain solves `E^(mn)` (1 at `(m,n)` and `(n,m)`), one per `m ≤ n`.
/// Off-diagonal displacements are split evenly over `X_kmn` and `X_knm` so
/// that `X₁ ⫶ E^(mn)` reproduces the direct solve.
pub fn assemble_x1(c: &StiffnessField, reference: &ReferenceMaterial, cfg: &SolveConfig) -> Result<CorrectorX1> {
    let grid = *c.grid();
    let d = grid.d();
    let total = grid.num_points();
    let op = LsOperator::new(c, reference)?;
    let mut x = vec![0.0; d * d * d * total];
    for m in 0..d {
        for n in m..d {
            let e = SymTensor2::unit(d, m, n)?;
            let pol = macro_polarization(&op, &e);
            let rhs = op.minus_gamma_hat(fft::forward_real(&grid, &pol));
            let (eps, report) = op.iterate(rhs, cfg);
            if !report.converged {
                return Err(Error::Corrector { m, n });
            }
            let sol = op.finish(eps, &pol, report)?;
            let u = sol.displacement_fluctuation.real()?;
            let w = if m == n { 1.0 } else { 0.5 };
            for k in 0..d {
                let src = &u[k * total..(k + 1) * total];
                for (a, b) in [(m, n), (n, m)] {
                    let dst = &mut x[((k * d + a) * d + b) * total..][..total];
                    dst.iter_mut().zip(src).for_each(|(t, s)| *t = w * s);
                }
            }
        }
    }
    CorrectorX1::new(TensorField::from_real(grid, 3, x)?)
}

/// Number of order-1 solves performed by [`assemble_x1`].
pub fn corrector_solve_count(d: usize) -> usize {
    d * (d + 1) / 2
}

fn check_grid(c: &StiffnessField, x1: &CorrectorX1, m: &MacroData) -> Result<()> {
    if c.grid() != x1.grid() {
        return Err(Error::Shape("corrector and stiffness grids differ".into()));
    }
    if m.dim() != c.grid().d() {
        return Err(Error::Shape("macro data dimension differs from grid".into()));
    }
    Ok(())
}

/// `A_kj(y) = Σ_mn X₁_kmn(y) ∇E_mnj`, the macroscopic gradient of `u₁`.
fn macro_gradient_of_u1(x1: &CorrectorX1, grad: &Tensor3) -> Result<Vec<f64>> {
    let grid = *x1.grid();
    let d = grid.d();
    let total = grid.num_points();
    let x = x1.field.real()?;
    let mut a = vec![0.0; d * d * total];
    for k in 0..d {
        for j in 0..d {
            let dst = &mut a[(k * d + j) * total..][..total];
            for m in 0..d {
                for n in 0..d {
                    let w = grad.get(m, n, j);
                    if w == 0.0 {
                        continue;
                    }
                    let src = &x[((k * d + m) * d + n) * total..][..total];
                    dst.iter_mut().zip(src).for_each(|(t, s)| *t += w * s);
                }
            }
        }
    }
    Ok(a)
}

/// `p₂ = C ⫶ ½[X₁·∇E + (X₁·∇E)ᵀ]`.
pub fn polarization_p2(c: &StiffnessField, x1: &CorrectorX1, macro_data: &MacroData) -> Result<TensorField> {
    check_grid(c, x1, macro_data)?;
    let grid = *c.grid();
    let d = grid.d();
    let total = grid.num_points();
    let a = macro_gradient_of_u1(x1, &macro_data.gradient)?;
    let mut p2 = vec![0.0; d * d * total];
    for p in 0..total {
        let cp = c.stiffness_at(p);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    for l in 0..d {
                        let sym = 0.5 * (a[(k * d + l) * total + p] + a[(l * d + k) * total + p]);
                        acc += cp.get(i, j, k, l) * sym;
                    }
                }
                p2[(i * d + j) * total + p] = acc;
            }
        }
    }
    TensorField::from_real(grid, 2, p2)
}

/// `g₂_i = C_ijkl [G_klmn ∇E_mnj + ∇E_klj]` with `G_klmn = sym_kl ∂_l X₁_kmn`.
pub fn body_force_g2(c: &StiffnessField, x1: &CorrectorX1, macro_data: &MacroData) -> Result<TensorField> {
    check_grid(c, x1, macro_data)?;
    let grid = *c.grid();
    let d = grid.d();
    let total = grid.num_points();
    let grad = &macro_data.gradient;
    let freqs = FrequencyTable::new(&grid);

    // Σ_mn ∂_l X_kmn ∇E_mnj = ∂_l A_kj since ∇E is constant in y.
    let a_hat = fft::forward_real(&grid, &macro_gradient_of_u1(x1, grad)?);
    let da: Vec<Vec<f64>> = (0..d)
        .map(|l| fft::inverse_real(&grid, partial_hat(&grid, &freqs, &a_hat, l)).0)
        .collect();

    let mut g = vec![0.0; d * total];
    for p in 0..total {
        let cp = c.stiffness_at(p);
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let b = 0.5 * (da[l][(k * d + j) * total + p] + da[k][(l * d + j) * total + p]) + grad.get(k, l, j);
                        acc += cp.get(i, j, k, l) * b;
                    }
                }
            }
            g[i * total + p] = acc;
        }
    }
    TensorField::from_real(grid, 1, g)
}

pub(crate) fn theta_hat_raw(grid: &GridSpec, freqs: &FrequencyTable, g_hat: &[Complex64]) -> Vec<Complex64> {
    let d = grid.d();
    let total = grid.num_points();
    let mut out = vec![Complex64::default(); d * d * total];
    let i_unit = Complex64::new(0.0, 1.0);
    for p in 0..total {
        if !freqs.active[p] {
            continue;
        }
        let xi = freqs.xi[p];
        let xi2: f64 = xi[..d].iter().map(|x| x * x).sum();
        let gx: Complex64 = (0..d).map(|i| g_hat[i * total + p] * xi[i]).sum();
        let scale = i_unit / (xi2 * xi2);
        for i in 0..d {
            for j in 0..d {
                let term = xi[i] * xi[j] * gx - (g_hat[i * total + p] * xi[j] + xi[i] * g_hat[j * total + p]) * xi2;
                out[(i * d + j) * total + p] = scale * term;
            }
        }
    }
    out
}

/// `θ̂(ξ) = (i/‖ξ‖⁴)[(ξ⊗ξ)(ĝ·ξ) − (ĝ⊗ξ + ξ⊗ĝ)‖ξ‖²]`, zero at `ξ = 0` and on
/// Nyquist planes.
pub fn theta_hat(g_hat: &TensorField) -> Result<TensorField> {
    if g_hat.order() != 1 {
        return Err(Error::Shape(format!("body force must be a vector field, got order {}", g_hat.order())));
    }
    let grid = *g_hat.grid();
    let freqs = FrequencyTable::new(&grid);
    TensorField::from_fourier(grid, 2, theta_hat_raw(&grid, &freqs, g_hat.fourier()?))
}

/// Loading terms of one order-α problem, all real fields.
#[derive(Debug, Clone)]
pub struct OrderAlphaTerms {
    pub polarization: TensorField,
    pub body_force: TensorField,
}

/// Result of preparing the loading terms, plus how many corrector solves it
/// cost.
fn prepare_terms(problem: &OrderAlphaProblem, op: &LsOperator, cfg: &SolveConfig) -> Result<(OrderAlphaTerms, usize)> {
    let grid = op.grid;
    let c = problem.stiffness;
    match ProblemOrder::from_alpha(problem.alpha)? {
        ProblemOrder::First => Ok((
            OrderAlphaTerms {
                polarization: TensorField::from_real(grid, 2, macro_polarization(op, &problem.macro_data.strain))?,
                body_force: TensorField::zeros(grid, 1)?,
            },
            0,
        )),
        ProblemOrder::Second => {
            let (x1, solves) = match &problem.corrector {
                Some(x) => (x.clone(), 0),
                None => (Arc::new(assemble_x1(c, &problem.reference, cfg)?), corrector_solve_count(grid.d())),
            };
            Ok((
                OrderAlphaTerms {
                    polarization: polarization_p2(c, &x1, &problem.macro_data)?,
                    body_force: body_force_g2(c, &x1, &problem.macro_data)?,
                },
                solves,
            ))
        }
        ProblemOrder::Higher(a) => Err(Error::UnsupportedOrder(a)),
    }
}

/// Loading terms `(p_α, g_α)` for an order-1 or order-2 problem.
pub fn order_alpha_terms(problem: &OrderAlphaProblem, cfg: &SolveConfig) -> Result<OrderAlphaTerms> {
    let op = LsOperator::new(problem.stiffness, &problem.reference)?;
    prepare_terms(problem, &op, cfg).map(|(t, _)| t)
}

/// Solves the order-α cell problem with the unchanged iteration loop started
/// from `ε₀ = −Γ⁰ ∗ (p_α + θ_α)`. The returned stress is `C ⫶ ε + p_α`.
pub fn solve_order_alpha(problem: &OrderAlphaProblem, cfg: &SolveConfig) -> Result<Order1Solution> {
    cfg.validate()?;
    if let ProblemOrder::Higher(a) = ProblemOrder::from_alpha(problem.alpha)? {
        return Err(Error::UnsupportedOrder(a));
    }
    let start = Instant::now();
    let op = LsOperator::new(problem.stiffness, &problem.reference)?;
    let grid = op.grid;
    let (terms, solves) = prepare_terms(problem, &op, cfg)?;

    let pol = terms.polarization.real()?;
    let mut load = fft::forward_real(&grid, pol);
    if problem.alpha >= 2 {
        let g_hat = fft::forward_real(&grid, terms.body_force.real()?);
        let theta = theta_hat_raw(&grid, &op.freqs, &g_hat);
        load.iter_mut().zip(&theta).for_each(|(a, b)| *a += b);
    }
    let rhs = op.minus_gamma_hat(load);
    let (eps, mut report) = op.iterate(rhs, cfg);
    report.corrector_solves = solves;
    let mut sol = op.finish(eps, pol, report)?;
    sol.report.wall_time = start.elapsed().as_secs_f64();
    Ok(sol)
}

/// Normalized Fourier residual of `∇_y·σ + g = 0` over non-zero,
/// non-Nyquist frequencies, where `σ = C ⫶ ε + p` is the solution stress:
/// `‖iξ·σ̂ + ĝ‖ / (mean|ξ|·‖p̂‖ + ‖ĝ‖)`.
pub fn order_alpha_residual(stress: &TensorField, terms: &OrderAlphaTerms) -> Result<f64> {
    stress.check_same(&terms.polarization)?;
    let grid = *stress.grid();
    let freqs = FrequencyTable::new(&grid);
    let total = grid.num_points();
    let s_hat = fft::forward_real(&grid, stress.real()?);
    let p_hat = fft::forward_real(&grid, terms.polarization.real()?);
    let g_hat = fft::forward_real(&grid, terms.body_force.real()?);
    let div = divergence_hat(&grid, &freqs, &s_hat);

    let active = |idx: usize| freqs.active[idx % total];
    let res: f64 = div
        .iter()
        .zip(&g_hat)
        .enumerate()
        .filter(|(i, _)| active(*i))
        .map(|(_, (a, b))| (a + b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let p_norm: f64 = p_hat.iter().enumerate().filter(|(i, _)| active(*i)).map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt();
    let g_norm: f64 = g_hat.iter().enumerate().filter(|(i, _)| active(*i)).map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = mean_frequency_magnitude(&grid) * p_norm + g_norm;
    Ok(if scale == 0.0 { res } else { res / scale })
}

/// Reuses assembled correctors across macro inputs, keyed by the stiffness
/// content, reference medium and solver settings.
#[derive(Debug, Default)]
pub struct CorrectorCache {
    entries: HashMap<u64, Arc<CorrectorX1>>,
}

impl CorrectorCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(c: &StiffnessField, reference: &ReferenceMaterial, cfg: &SolveConfig) -> u64 {
        let mut h = DefaultHasher::new();
        c.content_hash().hash(&mut h);
        reference.lambda0.to_bits().hash(&mut h);
        reference.mu0.to_bits().hash(&mut h);
        cfg.tolerance.to_bits().hash(&mut h);
        cfg.max_iterations.hash(&mut h);
        cfg.method.hash(&mut h);
        h.finish()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns the corrector and the number of fresh order-1 solves spent.
    pub fn get_or_assemble(&mut self, c: &StiffnessField, reference: &ReferenceMaterial, cfg: &SolveConfig) -> Result<(Arc<CorrectorX1>, usize)> {
        let key = Self::key(c, reference, cfg);
        if let Some(x) = self.entries.get(&key) {
            return Ok((x.clone(), 0));
        }
        let x = Arc::new(assemble_x1(c, reference, cfg)?);
        self.entries.insert(key, x.clone());
        Ok((x, corrector_solve_count(c.grid().d())))
    }
}
