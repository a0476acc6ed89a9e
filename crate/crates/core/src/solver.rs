//! Order-1 cell problem: the fixed-point Basic Scheme and a matrix-free
//! BiCGSTAB solve of `(Id + Γ⁰∗(C − C⁰)) ⫶ ε = −Γ⁰∗(C ⫶ E)`.

use std::cell::Cell;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{divergence_hat, mean_frequency_magnitude, recover_displacement, rms, FrequencyTable, GridSpec, TensorField};
use crate::green::{apply_green_hat, ReferenceMaterial};
use crate::microstructure::StiffnessField;
use crate::tensor::SymTensor2;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(alias = "fp")]
    FixedPoint,
    Krylov,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed_point",
            Method::Krylov => "krylov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: Method,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            method: Method::Krylov,
        }
    }
}

impl SolveConfig {
    pub fn new(method: Method, tolerance: f64, max_iterations: usize) -> Result<Self> {
        let cfg = Self {
            tolerance,
            max_iterations,
            method,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub iterations: usize,
    /// One entry per iteration: the Cauchy increment for the fixed point,
    /// the relative residual for BiCGSTAB.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub wall_time: f64,
    pub operator_applications: usize,
    /// Order-1 solves spent assembling correctors for this solve.
    pub corrector_solves: usize,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Order1Solution {
    pub strain_fluctuation: TensorField,
    pub stress: TensorField,
    pub displacement_fluctuation: TensorField,
    pub report: SolveReport,
}

/// Pointwise and spectral pieces of the Lippmann-Schwinger operator for one
/// stiffness field and reference medium.
pub(crate) struct LsOperator<'a> {
    pub c: &'a StiffnessField,
    pub reference: ReferenceMaterial,
    pub grid: GridSpec,
    pub freqs: FrequencyTable,
    delta: Vec<Vec<f64>>,
    full: Vec<Vec<f64>>,
    applications: Cell<usize>,
}

impl<'a> LsOperator<'a> {
    pub fn new(c: &'a StiffnessField, reference: &ReferenceMaterial) -> Result<Self> {
        reference.validate()?;
        let grid = *c.grid();
        let c0 = reference.stiffness(grid.d())?;
        let full: Vec<Vec<f64>> = c.phase_stiffness().iter().map(|s| s.to_matrix()).collect();
        let delta = c
            .phase_stiffness()
            .iter()
            .map(|s| Ok(s.sub(&c0)?.to_matrix()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            c,
            reference: *reference,
            grid,
            freqs: FrequencyTable::new(&grid),
            delta,
            full,
            applications: Cell::new(0),
        })
    }

    pub fn applications(&self) -> usize {
        self.applications.get()
    }

    fn contract(&self, tables: &[Vec<f64>], eps: &[f64], offset: Option<&[f64]>) -> Vec<f64> {
        let d = self.grid.d();
        let dd = d * d;
        let total = self.grid.num_points();
        let map = self.c.phase_map();
        let mut out = vec![0.0; dd * total];
        let mut e = [0.0; 9];
        for p in 0..total {
            for c in 0..dd {
                e[c] = eps[c * total + p] + offset.map_or(0.0, |o| o[c]);
            }
            let m = &tables[map[p] as usize];
            for r in 0..dd {
                let row = &m[r * dd..(r + 1) * dd];
                out[r * total + p] = row.iter().zip(&e[..dd]).map(|(a, b)| a * b).sum();
            }
        }
        out
    }

    /// `(C − C⁰) ⫶ ε` pointwise.
    pub fn polarize(&self, eps: &[f64]) -> Vec<f64> {
        self.contract(&self.delta, eps, None)
    }

    /// `C ⫶ (ε + offset)` pointwise, `offset` a constant row-major tensor.
    pub fn stress(&self, eps: &[f64], offset: Option<&[f64]>) -> Vec<f64> {
        self.contract(&self.full, eps, offset)
    }

    /// `Γ⁰ ∗ τ` for a real component-major field.
    pub fn gamma(&self, tau: &[f64]) -> Vec<f64> {
        let mut hat = fft::forward_real(&self.grid, tau);
        apply_green_hat(&self.reference, &self.grid, &self.freqs, &mut hat);
        fft::inverse_real(&self.grid, hat).0
    }

    /// `−Γ⁰ ∗ τ` for a spectral polarization.
    pub fn minus_gamma_hat(&self, mut tau_hat: Vec<Complex64>) -> Vec<f64> {
        apply_green_hat(&self.reference, &self.grid, &self.freqs, &mut tau_hat);
        tau_hat.iter_mut().for_each(|z| *z = -*z);
        fft::inverse_real(&self.grid, tau_hat).0
    }

    /// `Γ⁰ ∗ ((C − C⁰) ⫶ ε)`.
    pub fn gamma_polarized(&self, eps: &[f64]) -> Vec<f64> {
        self.applications.set(self.applications.get() + 1);
        self.gamma(&self.polarize(eps))
    }

    /// `(Id + Γ⁰ ∗ (C − C⁰)) ⫶ ε`.
    pub fn apply(&self, eps: &[f64]) -> Vec<f64> {
        let mut out = self.gamma_polarized(eps);
        out.iter_mut().zip(eps).for_each(|(o, e)| *o += e);
        out
    }

    fn norm(&self, v: &[f64]) -> f64 {
        rms(v, self.grid.num_points())
    }

    /// Iterates from `rhs = ε₀` with the configured method.
    pub fn iterate(&self, rhs: Vec<f64>, cfg: &SolveConfig) -> (Vec<f64>, SolveReport) {
        let start_apps = self.applications();
        let (eps, iterations, history, converged) = match cfg.method {
            Method::FixedPoint => self.fixed_point(rhs, cfg),
            Method::Krylov => self.bicgstab(rhs, cfg),
        };
        let report = SolveReport {
            method: cfg.method,
            iterations,
            residual_history: history,
            converged,
            wall_time: 0.0,
            operator_applications: self.applications() - start_apps,
            corrector_solves: 0,
        };
        (eps, report)
    }

    fn fixed_point(&self, rhs: Vec<f64>, cfg: &SolveConfig) -> (Vec<f64>, usize, Vec<f64>, bool) {
        let norm0 = self.norm(&rhs);
        if norm0 == 0.0 {
            return (rhs, 0, Vec::new(), true);
        }
        let mut eps = rhs.clone();
        let mut history = Vec::new();
        for it in 1..=cfg.max_iterations {
            let eta = self.gamma_polarized(&eps);
            let mut diff = 0.0;
            for ((e, b), g) in eps.iter_mut().zip(&rhs).zip(&eta) {
                let next = b - g;
                diff += (next - *e) * (next - *e);
                *e = next;
            }
            let res = (diff / self.grid.num_points() as f64).sqrt() / norm0;
            history.push(res);
            if res < cfg.tolerance {
                return (eps, it, history, true);
            }
        }
        (eps, cfg.max_iterations, history, false)
    }

    fn bicgstab(&self, rhs: Vec<f64>, cfg: &SolveConfig) -> (Vec<f64>, usize, Vec<f64>, bool) {
        let b_norm = self.norm(&rhs);
        let mut x = rhs.clone();
        if b_norm == 0.0 {
            return (x, 0, Vec::new(), true);
        }
        let ax = self.apply(&x);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut history = Vec::new();
        if self.norm(&r) / b_norm < cfg.tolerance {
            return (x, 0, history, true);
        }

        let len = r.len();
        let mut r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut p = vec![0.0; len];
        let mut v = vec![0.0; len];
        let mut restarted = false;

        let mut iterations = 0;
        while iterations < cfg.max_iterations {
            let rho_new = dot(&r_hat, &r);
            let scale = dot(&r_hat, &r_hat).sqrt() * dot(&r, &r).sqrt();
            if rho_new.abs() <= BREAKDOWN * scale {
                if restarted {
                    break;
                }
                restarted = true;
                r_hat = r.clone();
                rho = 1.0;
                alpha = 1.0;
                omega = 1.0;
                p.iter_mut().for_each(|z| *z = 0.0);
                v.iter_mut().for_each(|z| *z = 0.0);
                continue;
            }
            iterations += 1;
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..len {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            v = self.apply(&p);
            let denom = dot(&r_hat, &v);
            if denom.abs() <= BREAKDOWN * dot(&r_hat, &r_hat).sqrt() * dot(&v, &v).sqrt() || denom == 0.0 {
                history.push(self.norm(&r) / b_norm);
                if restarted {
                    break;
                }
                restarted = true;
                r_hat = r.clone();
                rho = 1.0;
                alpha = 1.0;
                omega = 1.0;
                p.iter_mut().for_each(|z| *z = 0.0);
                v.iter_mut().for_each(|z| *z = 0.0);
                continue;
            }
            alpha = rho / denom;
            let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
            let s_res = self.norm(&s) / b_norm;
            if s_res < cfg.tolerance {
                x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
                history.push(s_res);
                return (x, iterations, history, true);
            }
            let t = self.apply(&s);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..len {
                x[i] += alpha * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            let res = self.norm(&r) / b_norm;
            history.push(res);
            if res < cfg.tolerance {
                return (x, iterations, history, true);
            }
            if omega == 0.0 {
                if restarted {
                    break;
                }
                restarted = true;
                r_hat = r.clone();
                rho = 1.0;
                alpha = 1.0;
                omega = 1.0;
                p.iter_mut().for_each(|z| *z = 0.0);
                v.iter_mut().for_each(|z| *z = 0.0);
            }
        }
        (x, iterations, history, false)
    }

    /// Builds the solution record: stress `C ⫶ ε + p` and the zero-mean
    /// displacement recovered from `ε`.
    pub fn finish(&self, eps: Vec<f64>, polarization: &[f64], report: SolveReport) -> Result<Order1Solution> {
        let mut stress = self.stress(&eps, None);
        stress.iter_mut().zip(polarization).for_each(|(s, p)| *s += p);
        let strain = TensorField::from_real(self.grid, 2, eps)?;
        let eps_hat = TensorField::from_fourier(self.grid, 2, fft::forward_real(&self.grid, strain.real()?))?;
        let u_hat = recover_displacement(&eps_hat)?;
        let (u, _) = fft::inverse_real(&self.grid, u_hat.into_fourier()?);
        Ok(Order1Solution {
            strain_fluctuation: strain,
            stress: TensorField::from_real(self.grid, 2, stress)?,
            displacement_fluctuation: TensorField::from_real(self.grid, 1, u)?,
            report,
        })
    }
}

const BREAKDOWN: f64 = 1e-20;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_real_strain(c: &StiffnessField, eps: &TensorField) -> Result<()> {
    if eps.grid() != c.grid() || eps.order() != 2 {
        return Err(Error::Shape("strain field must be order 2 on the stiffness grid".into()));
    }
    eps.real().map(|_| ())
}

fn check_macro(c: &StiffnessField, e: &SymTensor2) -> Result<()> {
    if e.dim() != c.grid().d() {
        return Err(Error::Shape(format!("macroscopic strain is {}D, grid is {}D", e.dim(), c.grid().d())));
    }
    Ok(())
}

/// `ε + Γ⁰ ∗ ((C − C⁰) ⫶ ε)`.
pub fn lippmann_schwinger_operator(c: &StiffnessField, reference: &ReferenceMaterial, eps: &TensorField) -> Result<TensorField> {
    check_real_strain(c, eps)?;
    let op = LsOperator::new(c, reference)?;
    TensorField::from_real(*c.grid(), 2, op.apply(eps.real()?))
}

/// Constant field `C ⫶ E` evaluated pointwise.
pub(crate) fn macro_polarization(op: &LsOperator, e: &SymTensor2) -> Vec<f64> {
    let zeros = vec![0.0; e.dim() * e.dim() * op.grid.num_points()];
    op.stress(&zeros, Some(&e.to_flat()))
}

/// `ε₀ = −Γ⁰ ∗ (C ⫶ E)`.
pub fn init_rhs(c: &StiffnessField, reference: &ReferenceMaterial, e: &SymTensor2) -> Result<TensorField> {
    check_macro(c, e)?;
    let op = LsOperator::new(c, reference)?;
    let pol = macro_polarization(&op, e);
    TensorField::from_real(*c.grid(), 2, op.minus_gamma_hat(fft::forward_real(&op.grid, &pol)))
}

fn solve_order1(c: &StiffnessField, reference: &ReferenceMaterial, e: &SymTensor2, cfg: &SolveConfig) -> Result<Order1Solution> {
    cfg.validate()?;
    check_macro(c, e)?;
    let start = Instant::now();
    let op = LsOperator::new(c, reference)?;
    let pol = macro_polarization(&op, e);
    let rhs = op.minus_gamma_hat(fft::forward_real(&op.grid, &pol));
    let (eps, report) = op.iterate(rhs, cfg);
    let mut sol = op.finish(eps, &pol, report)?;
    sol.report.wall_time = start.elapsed().as_secs_f64();
    Ok(sol)
}

/// Fixed-point Basic Scheme `ε_{k+1} = ε₀ − Γ⁰ ∗ ((C − C⁰) ⫶ ε_k)` with the
/// Cauchy stopping rule `‖ε_{k+1} − ε_k‖ / ‖ε₀‖ < tol`.
pub fn solve_basic_scheme(c: &StiffnessField, reference: &ReferenceMaterial, e: &SymTensor2, cfg: &SolveConfig) -> Result<Order1Solution> {
    if cfg.method != Method::FixedPoint {
        return Err(Error::Config("basic scheme requires the fixed_point method".into()));
    }
    solve_order1(c, reference, e, cfg)
}

/// BiCGSTAB on the Lippmann-Schwinger system, started from `ε₀`, stopping on
/// the relative residual.
pub fn solve_krylov(c: &StiffnessField, reference: &ReferenceMaterial, e: &SymTensor2, cfg: &SolveConfig) -> Result<Order1Solution> {
    if cfg.method != Method::Krylov {
        return Err(Error::Config("Krylov solve requires the krylov method".into()));
    }
    solve_order1(c, reference, e, cfg)
}

/// Dispatches on `cfg.method`.
pub fn solve(c: &StiffnessField, reference: &ReferenceMaterial, e: &SymTensor2, cfg: &SolveConfig) -> Result<Order1Solution> {
    solve_order1(c, reference, e, cfg)
}

/// Volume average `⟨C ⫶ (ε + E)⟩`.
pub fn effective_stress(sol: &Order1Solution, c: &StiffnessField, e: &SymTensor2) -> Result<SymTensor2> {
    check_macro(c, e)?;
    check_real_strain(c, &sol.strain_fluctuation)?;
    let op = LsOperator::new(c, &ReferenceMaterial::new(0.0, 1.0)?)?;
    let sigma = op.stress(sol.strain_fluctuation.real()?, Some(&e.to_flat()));
    let total = c.grid().num_points();
    let means: Vec<f64> = sigma.chunks(total).map(|s| s.iter().sum::<f64>() / total as f64).collect();
    SymTensor2::from_flat_sym(e.dim(), &means)
}

/// `‖∇·σ‖ / (‖σ‖ · mean |ξ|)`, evaluated spectrally.
pub fn equilibrium_residual(stress: &TensorField) -> Result<f64> {
    let grid = *stress.grid();
    let hat = fft::forward_real(&grid, stress.real()?);
    let freqs = FrequencyTable::new(&grid);
    let div: f64 = divergence_hat(&grid, &freqs, &hat).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = stress.l2_norm() * mean_frequency_magnitude(&grid);
    Ok(if scale == 0.0 { div } else { div / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microstructure::{rasterize_hashin, rasterize_laminate, HashinSpec, LaminateSpec};
    use crate::tensor::IsotropicMaterial;

    fn laminate(n: usize) -> StiffnessField {
        let spec = LaminateSpec {
            layer_normal: 0,
            volume_fraction: 0.5,
            phase_a: IsotropicMaterial::new(100e9, 0.3).unwrap(),
            phase_b: IsotropicMaterial::new(1000e9, 0.3).unwrap(),
        };
        rasterize_laminate(&spec, GridSpec::new(2, n).unwrap()).unwrap()
    }

    fn cfg(method: Method) -> SolveConfig {
        SolveConfig::new(method, 1e-8, 5000).unwrap()
    }

    #[test]
    fn homogeneous_is_trivial() {
        let grid = GridSpec::new(2, 16).unwrap();
        let c = StiffnessField::homogeneous(grid, IsotropicMaterial::new(100e9, 0.3).unwrap()).unwrap();
        let r = ReferenceMaterial::midpoint_of(&c).unwrap();
        let e = SymTensor2::from_rows(&[vec![1.0, 0.3], vec![0.3, -0.5]]).unwrap();
        for m in [Method::FixedPoint, Method::Krylov] {
            let sol = solve(&c, &r, &e, &cfg(m)).unwrap();
            assert!(sol.report.converged);
            assert!(sol.report.iterations <= 1);
            assert_eq!(sol.strain_fluctuation.l2_norm(), 0.0);
            let eff = effective_stress(&sol, &c, &e).unwrap();
            let want = crate::tensor::ddot42(c.stiffness_at(0), &e).unwrap();
            for (a, b) in eff.to_flat().iter().zip(want.to_flat()) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn operator_identity_when_reference_matches() {
        let grid = GridSpec::new(2, 8).unwrap();
        let mat = IsotropicMaterial::new(3.0, 0.2).unwrap();
        let c = StiffnessField::homogeneous(grid, mat).unwrap();
        let r = ReferenceMaterial::new(mat.lame_lambda(), mat.lame_mu()).unwrap();
        let eps = TensorField::from_fn(grid, 2, |x| {
            let s = (6.0 * x[0]).sin();
            vec![s, 0.1, 0.1, x[1]]
        })
        .unwrap();
        let out = lippmann_schwinger_operator(&c, &r, &eps).unwrap();
        assert!(out.sub(&eps).unwrap().l2_norm() < 1e-15);
        let zero = lippmann_schwinger_operator(&laminate(8), &r, &TensorField::zeros(grid, 2).unwrap()).unwrap();
        assert_eq!(zero.l2_norm(), 0.0);
        assert!(lippmann_schwinger_operator(&laminate(16), &r, &eps).is_err());
    }

    #[test]
    fn init_rhs_trivial_cases_and_mean() {
        let grid = GridSpec::new(2, 16).unwrap();
        let c = StiffnessField::homogeneous(grid, IsotropicMaterial::new(1.0, 0.3).unwrap()).unwrap();
        let r = ReferenceMaterial::new(0.5, 0.4).unwrap();
        let id = SymTensor2::identity(2).unwrap();
        assert!(init_rhs(&c, &r, &id).unwrap().l2_norm() < 1e-15);

        let h = rasterize_hashin(&HashinSpec::default(), grid).unwrap();
        let r = ReferenceMaterial::midpoint_of(&h).unwrap();
        assert_eq!(init_rhs(&h, &r, &SymTensor2::zeros(2).unwrap()).unwrap().l2_norm(), 0.0);
        let b = init_rhs(&h, &r, &id).unwrap();
        assert!(b.l2_norm() > 1e-3);
        assert!(b.mean().iter().all(|m| m.abs() < 1e-12));
    }

    #[test]
    fn laminate_matches_closed_form() {
        let c = laminate(32);
        let r = ReferenceMaterial::midpoint_of(&c).unwrap();
        let e = SymTensor2::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let harm = 1.0 / c.mean_of(|m| 1.0 / m.p_wave_modulus());
        let ratio = c.mean_of(|m| m.lame_lambda() / m.p_wave_modulus()) * harm;
        let fp = solve_basic_scheme(&c, &r, &e, &cfg(Method::FixedPoint)).unwrap();
        let kr = solve_krylov(&c, &r, &e, &cfg(Method::Krylov)).unwrap();
        for sol in [&fp, &kr] {
            assert!(sol.report.converged);
            let eff = effective_stress(sol, &c, &e).unwrap();
            assert!((eff.get(0, 0) / harm - 1.0).abs() < 0.05);
            assert!((eff.get(1, 1) / ratio - 1.0).abs() < 0.05);
            assert!(sol.strain_fluctuation.mean().iter().all(|m| m.abs() < 1e-12));
            assert!(sol.displacement_fluctuation.mean().iter().all(|m| m.abs() < 1e-12));
        }
        let diff = fp.strain_fluctuation.sub(&kr.strain_fluctuation).unwrap().l2_norm();
        assert!(diff <= 1e-4 * kr.strain_fluctuation.l2_norm());
    }

    #[test]
    fn report_invariants() {
        let c = rasterize_hashin(&HashinSpec::default(), GridSpec::new(2, 16).unwrap()).unwrap();
        let r = ReferenceMaterial::midpoint_of(&c).unwrap();
        let id = SymTensor2::identity(2).unwrap();
        for m in [Method::FixedPoint, Method::Krylov] {
            let sol = solve(&c, &r, &id, &SolveConfig::new(m, 1e-6, 10_000).unwrap()).unwrap();
            let rep = &sol.report;
            assert!(rep.converged);
            assert_eq!(rep.residual_history.len(), rep.iterations);
            assert!(rep.final_residual() < 1e-6);
            match m {
                Method::FixedPoint => assert_eq!(rep.operator_applications, rep.iterations),
                Method::Krylov => assert!(rep.operator_applications <= 2 * rep.iterations + 1),
            }
            assert!(equilibrium_residual(&sol.stress).unwrap() < 1e-5);
        }
        let capped = solve(&c, &r, &id, &SolveConfig::new(Method::FixedPoint, 1e-14, 3).unwrap()).unwrap();
        assert!(!capped.report.converged);
        assert_eq!(capped.report.iterations, 3);
        assert_eq!(capped.report.residual_history.len(), 3);
    }

    #[test]
    fn method_preconditions() {
        let c = laminate(8);
        let r = ReferenceMaterial::midpoint_of(&c).unwrap();
        let id = SymTensor2::identity(2).unwrap();
        assert!(solve_basic_scheme(&c, &r, &id, &cfg(Method::Krylov)).is_err());
        assert!(solve_krylov(&c, &r, &id, &cfg(Method::FixedPoint)).is_err());
        assert!(SolveConfig::new(Method::Krylov, 0.0, 10).is_err());
        assert!(SolveConfig::new(Method::Krylov, 1e-6, 0).is_err());
        assert!(solve(&c, &r, &SymTensor2::identity(3).unwrap(), &cfg(Method::Krylov)).is_err());
    }
}
