//! Run configuration and experiment drivers behind the command-line tool.
//!
//! Every solve produces one [`ResultRow`]; drivers collect rows and write
//! them to `results.csv` with the column order of [`ResultRow`]:
//!
//! | column | meaning |
//! |---|---|
//! | `method` | `fixed_point` or `krylov` |
//! | `n` | grid points per axis |
//! | `contrast` | coating/core Young's modulus ratio (empty without a coated disk) |
//! | `alpha` | problem order (1 or 2) |
//! | `iterations` | solver iterations |
//! | `operator_applications` | applications of the periodic operator |
//! | `final_residual` | last recorded residual |
//! | `wall_time_seconds` | solve time including any corrector assembly |
//! | `converged` | `true` / `false` |
//! | `corrector_solves` | order-1 solves spent assembling `X₁` |
//! | `time_ratio` | order-2 over order-1 wall time for the same method and grid (order-2 rows only) |
//! | `effective_stress` | cell-average stress, `;`-joined full components, row-major |

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, TensorField};
use crate::green::ReferenceMaterial;
use crate::higher_order::{solve_order_alpha, CorrectorCache, MacroData, OrderAlphaProblem};
use crate::io;
use crate::microstructure::{rasterize_hashin, rasterize_laminate, HashinSpec, LaminateSpec, StiffnessField};
use crate::solver::{Method, SolveConfig, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use crate::tensor::{IsotropicMaterial, SymTensor2, Tensor3};

pub const CONFIG_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.csv";
pub const FIELDS_DIR: &str = "fields";
/// Grid size of the contrast sweep when the config does not set one.
pub const CONTRAST_SWEEP_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MicrostructureConfig {
    Hashin(HashinSpec),
    Laminate(LaminateSpec),
    /// Row-major integer phase ids; relative paths resolve against the
    /// config file's directory.
    PhaseMap {
        path: PathBuf,
        materials: Vec<IsotropicMaterial>,
    },
    Homogeneous {
        material: IsotropicMaterial,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default)]
    pub n: Option<usize>,
}

fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub methods: Vec<Method>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Krylov],
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// Macro loading. `strain` is a symmetric `d×d` matrix; `strain_gradient`
/// is `d×d×d`, indexed `[m][n][j]` and symmetric in `m, n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MacroConfig {
    pub strain: Option<Vec<Vec<f64>>>,
    pub strain_gradient: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "axis", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    #[default]
    None,
    Grid {
        values: Vec<usize>,
    },
    Contrast {
        values: Vec<f64>,
        #[serde(default = "default_base_young")]
        base_young: f64,
    },
}

fn default_base_young() -> f64 {
    crate::microstructure::BENCHMARK_CORE_YOUNG
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub dump_fields: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            dump_fields: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub microstructure: MicrostructureConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Overrides the midpoint reference medium.
    #[serde(default)]
    pub reference: Option<ReferenceMaterial>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<usize>,
    #[serde(default, rename = "macro")]
    pub macro_data: MacroConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Build `X₁` before the timed order-2 solve so its cost is excluded.
    #[serde(default)]
    pub seed_cache: bool,
    /// Run independent sweep points on separate threads.
    #[serde(default)]
    pub parallel: bool,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_alphas() -> Vec<usize> {
    vec![1]
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, &base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.solver.methods.is_empty() {
            return Err(Error::Config("solver.methods is empty".into()));
        }
        for &m in &self.solver.methods {
            SolveConfig::new(m, self.solver.tolerance, self.solver.max_iterations)?;
        }
        if self.alphas.is_empty() || !strictly_increasing(&self.alphas) {
            return Err(Error::Config("alphas must be non-empty and strictly increasing".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|&&a| !(1..=2).contains(&a)) {
            return Err(Error::UnsupportedOrder(a));
        }
        if let Some(r) = &self.reference {
            r.validate()?;
        }
        match &self.sweep {
            SweepConfig::None => {
                self.grid.n.ok_or_else(|| Error::Config("grid.n is required without a grid sweep".into()))?;
            }
            SweepConfig::Grid { values } => {
                if values.is_empty() || !strictly_increasing(values) {
                    return Err(Error::Config("grid sweep values must be non-empty and strictly increasing".into()));
                }
            }
            SweepConfig::Contrast { values, base_young } => {
                if values.is_empty() || !strictly_increasing(values) {
                    return Err(Error::Config("contrast sweep values must be non-empty and strictly increasing".into()));
                }
                if !matches!(self.microstructure, MicrostructureConfig::Hashin(_)) {
                    return Err(Error::Config("a contrast sweep needs the coated-disk microstructure".into()));
                }
                IsotropicMaterial::new(*base_young, crate::microstructure::BENCHMARK_POISSON)?;
            }
        }
        for n in self.grid_sizes() {
            GridSpec::new(self.grid.d, n)?;
        }
        match &self.microstructure {
            MicrostructureConfig::Hashin(spec) => {
                spec.validate()?;
                if self.grid.d != 2 {
                    return Err(Error::Config("the coated-disk structure requires d = 2".into()));
                }
            }
            MicrostructureConfig::Laminate(spec) => {
                spec.phase_a.validate()?;
                spec.phase_b.validate()?;
            }
            MicrostructureConfig::PhaseMap { path, materials } => {
                let p = self.resolve(path);
                if !p.is_file() {
                    return Err(Error::Config(format!("phase map {} does not exist", p.display())));
                }
                if materials.is_empty() {
                    return Err(Error::Config("phase map needs a non-empty material table".into()));
                }
                materials.iter().try_for_each(IsotropicMaterial::validate)?;
            }
            MicrostructureConfig::Homogeneous { material } => material.validate()?,
        }
        self.macro_data()?;
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Output directory, resolved against the current directory.
    pub fn output_dir(&self) -> &Path {
        &self.output.dir
    }

    /// Grid sizes visited by this run.
    pub fn grid_sizes(&self) -> Vec<usize> {
        match &self.sweep {
            SweepConfig::Grid { values } => values.clone(),
            SweepConfig::Contrast { .. } => vec![self.grid.n.unwrap_or(CONTRAST_SWEEP_N)],
            SweepConfig::None => self.grid.n.into_iter().collect(),
        }
    }

    /// Macro strain (identity by default) and strain gradient (the benchmark
    /// `(∇E)₁₁₁ = (∇E)₂₂₂ = 1` pattern, extended diagonally in 3D, by default).
    pub fn macro_data(&self) -> Result<MacroData> {
        let d = self.grid.d;
        let strain = match &self.macro_data.strain {
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Config(format!("macro strain must be {d}×{d}")));
                }
                SymTensor2::from_rows(rows)?
            }
            None => SymTensor2::identity(d)?,
        };
        let gradient = match &self.macro_data.strain_gradient {
            Some(g) => {
                if g.len() != d || g.iter().any(|a| a.len() != d || a.iter().any(|b| b.len() != d)) {
                    return Err(Error::Config(format!("macro strain gradient must be {d}×{d}×{d}")));
                }
                let flat: Vec<f64> = g.iter().flatten().flatten().copied().collect();
                Tensor3::from_flat(d, &flat)?
            }
            None => {
                let mut t = Tensor3::zeros(d)?;
                (0..d).for_each(|i| t.set(i, i, i, 1.0));
                t
            }
        };
        MacroData::new(strain, gradient)
    }

    /// Stiffness field at grid size `n`, optionally with the contrast applied.
    pub fn stiffness(&self, n: usize, contrast: Option<f64>) -> Result<StiffnessField> {
        let grid = GridSpec::new(self.grid.d, n)?;
        match &self.microstructure {
            MicrostructureConfig::Hashin(spec) => {
                let spec = match (contrast, &self.sweep) {
                    (Some(c), SweepConfig::Contrast { base_young, .. }) => spec.with_contrast(*base_young, c)?,
                    _ => *spec,
                };
                rasterize_hashin(&spec, grid)
            }
            MicrostructureConfig::Laminate(spec) => rasterize_laminate(spec, grid),
            MicrostructureConfig::PhaseMap { path, materials } => {
                let ids = io::read_phase_map(&self.resolve(path), &grid)?;
                StiffnessField::from_phase_map(grid, ids, materials.clone())
            }
            MicrostructureConfig::Homogeneous { material } => StiffnessField::homogeneous(grid, *material),
        }
    }

    pub fn reference_for(&self, c: &StiffnessField) -> Result<ReferenceMaterial> {
        match self.reference {
            Some(r) => Ok(r),
            None => ReferenceMaterial::midpoint_of(c),
        }
    }

    fn nominal_contrast(&self) -> Option<f64> {
        match &self.microstructure {
            MicrostructureConfig::Hashin(spec) => Some(spec.coating.young_modulus / spec.core.young_modulus),
            _ => None,
        }
    }
}

/// One CSV row; see the module documentation for the column meanings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub n: usize,
    pub contrast: Option<f64>,
    pub alpha: usize,
    pub iterations: usize,
    pub operator_applications: usize,
    pub final_residual: f64,
    pub wall_time_seconds: f64,
    pub converged: bool,
    pub corrector_solves: usize,
    pub time_ratio: Option<f64>,
    pub effective_stress: String,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    pub results_path: PathBuf,
}

impl RunOutcome {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

struct Point {
    n: usize,
    contrast: Option<f64>,
}

fn cell_average(stress: &TensorField) -> Vec<f64> {
    stress.mean()
}

fn solve_point(cfg: &RunConfig, point: &Point, fields_dir: Option<&Path>) -> Result<Vec<ResultRow>> {
    let c = cfg.stiffness(point.n, point.contrast)?;
    c.check_admissible()?;
    let reference = cfg.reference_for(&c)?;
    let macro_data = cfg.macro_data()?;
    let contrast = point.contrast.or_else(|| cfg.nominal_contrast());
    let mut rows = Vec::new();

    for &method in &cfg.solver.methods {
        let solve_cfg = SolveConfig::new(method, cfg.solver.tolerance, cfg.solver.max_iterations)?;
        let mut cache = CorrectorCache::new();
        let mut order1_time = None;
        for &alpha in &cfg.alphas {
            let mut problem = OrderAlphaProblem::new(alpha, &c, reference, macro_data)?;
            if alpha >= 2 && cfg.seed_cache {
                let (x1, _) = cache.get_or_assemble(&c, &reference, &solve_cfg)?;
                problem = problem.with_corrector(Arc::clone(&x1));
            }
            let row = match solve_order_alpha(&problem, &solve_cfg) {
                Ok(sol) => {
                    if let Some(dir) = fields_dir {
                        let tag = format!("{}_n{}_alpha{}", method.label(), point.n, alpha);
                        dump_solution(dir, &tag, &sol.strain_fluctuation, &sol.stress, &sol.displacement_fluctuation)?;
                    }
                    let r = &sol.report;
                    if alpha == 1 {
                        order1_time = Some(r.wall_time);
                    }
                    ResultRow {
                        method: method.label().into(),
                        n: point.n,
                        contrast,
                        alpha,
                        iterations: r.iterations,
                        operator_applications: r.operator_applications,
                        final_residual: r.final_residual(),
                        wall_time_seconds: r.wall_time,
                        converged: r.converged,
                        corrector_solves: r.corrector_solves,
                        time_ratio: if alpha >= 2 { order1_time.map(|t| r.wall_time / t) } else { None },
                        effective_stress: cell_average(&sol.stress)
                            .iter()
                            .map(|v| format!("{v:e}"))
                            .collect::<Vec<_>>()
                            .join(";"),
                    }
                }
                // A corrector sub-solve that fails to converge is a per-row failure.
                Err(Error::Corrector { .. }) => ResultRow {
                    method: method.label().into(),
                    n: point.n,
                    contrast,
                    alpha,
                    iterations: 0,
                    operator_applications: 0,
                    final_residual: f64::NAN,
                    wall_time_seconds: 0.0,
                    converged: false,
                    corrector_solves: 0,
                    time_ratio: None,
                    effective_stress: String::new(),
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn dump_solution(dir: &Path, tag: &str, strain: &TensorField, stress: &TensorField, displacement: &TensorField) -> Result<()> {
    io::write_field(dir, &format!("{tag}_strain"), strain)?;
    io::write_field(dir, &format!("{tag}_stress"), stress)?;
    io::write_field(dir, &format!("{tag}_displacement"), displacement)?;
    let n = displacement.grid().num_points();
    io::write_scalar(dir, &format!("{tag}_u1"), displacement.grid(), &displacement.real()?[..n])?;
    Ok(())
}

fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Reads a results table written by any driver.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn run_points(cfg: &RunConfig, points: Vec<Point>, dump: bool) -> Result<RunOutcome> {
    let out = cfg.output_dir().to_path_buf();
    fs::create_dir_all(&out)?;
    let fields = out.join(FIELDS_DIR);
    let fields_dir = dump.then_some(fields.as_path());

    let per_point: Vec<Result<Vec<ResultRow>>> = if cfg.parallel && points.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = points.iter().map(|p| s.spawn(move || solve_point(cfg, p, fields_dir))).collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        })
    } else {
        points.iter().map(|p| solve_point(cfg, p, fields_dir)).collect()
    };
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    let results_path = out.join(RESULTS_FILE);
    write_rows(&results_path, &rows)?;
    Ok(RunOutcome { rows, results_path })
}

/// One solve per configured method and order on a single grid.
pub fn run_single(cfg: &RunConfig) -> Result<RunOutcome> {
    if cfg.sweep != SweepConfig::None {
        return Err(Error::Config("`solve` expects a config without a sweep axis".into()));
    }
    let n = cfg.grid_sizes()[0];
    run_points(cfg, vec![Point { n, contrast: None }], cfg.output.dump_fields)
}

/// One row per grid size, method and order.
pub fn run_grid_sweep(cfg: &RunConfig) -> Result<RunOutcome> {
    let SweepConfig::Grid { values } = &cfg.sweep else {
        return Err(Error::Config("`sweep-grid` expects sweep.axis = \"grid\"".into()));
    };
    let points = values.iter().map(|&n| Point { n, contrast: None }).collect();
    run_points(cfg, points, false)
}

/// One row per contrast, method and order on the coated disk.
pub fn run_contrast_sweep(cfg: &RunConfig) -> Result<RunOutcome> {
    let SweepConfig::Contrast { values, .. } = &cfg.sweep else {
        return Err(Error::Config("`sweep-contrast` expects sweep.axis = \"contrast\"".into()));
    };
    let n = cfg.grid_sizes()[0];
    let points = values.iter().map(|&c| Point { n, contrast: Some(c) }).collect();
    run_points(cfg, points, false)
}

/// Writes the phase map and Young's modulus of every grid size in the config.
pub fn dump_structure(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = cfg.output_dir().join(FIELDS_DIR);
    let mut written = Vec::new();
    for n in cfg.grid_sizes() {
        let c = cfg.stiffness(n, None)?;
        let grid = *c.grid();
        let phases: Vec<f64> = c.phase_map().iter().map(|&id| id as f64).collect();
        let young: Vec<f64> = (0..grid.num_points()).map(|p| c.material_at(p).young_modulus).collect();
        written.push(io::write_scalar(&dir, &format!("phase_n{n}"), &grid, &phases)?);
        written.push(io::write_scalar(&dir, &format!("young_modulus_n{n}"), &grid, &young)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hashin_json(extra: &str) -> String {
        format!(r#"{{"version": 1, "microstructure": {{"type": "hashin"}}, "grid": {{"n": 16}}{extra}}}"#)
    }

    #[test]
    fn minimal_config_defaults() {
        let cfg = RunConfig::from_json(&hashin_json(""), Path::new(".")).unwrap();
        assert_eq!(cfg.solver.methods, vec![Method::Krylov]);
        assert_eq!(cfg.solver.max_iterations, 50_000);
        assert_eq!(cfg.alphas, vec![1]);
        assert_eq!(cfg.microstructure, MicrostructureConfig::Hashin(HashinSpec::default()));
        let m = cfg.macro_data().unwrap();
        assert_eq!(m.gradient.get(0, 0, 0), 1.0);
        assert_eq!(m.gradient.get(1, 1, 1), 1.0);
        assert_eq!(m.gradient.get(0, 1, 1), 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#", "sweep": {"axis": "grid", "values": []}"#,
            r#", "sweep": {"axis": "grid", "values": [16, 8]}"#,
            r#", "sweep": {"axis": "contrast", "values": [1.0, 1.0]}"#,
            r#", "alphas": [3]"#,
            r#", "solver": {"tolerance": 0.0}"#,
            r#", "solver": {"methods": []}"#,
            r#", "macro": {"strain": [[1.0, 2.0], [0.0, 1.0]]}"#,
            r#", "macro": {"strain_gradient": [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]}"#,
            r#", "unknown_key": 1"#,
        ];
        for extra in bad {
            assert!(RunConfig::from_json(&hashin_json(extra), Path::new(".")).is_err(), "{extra}");
        }
        let version = r#"{"version": 2, "microstructure": {"type": "hashin"}, "grid": {"n": 16}}"#;
        assert!(RunConfig::from_json(version, Path::new(".")).is_err());
    }

    #[test]
    fn missing_phase_map_rejected_before_solving() {
        let json = r#"{"version": 1, "grid": {"n": 4},
            "microstructure": {"type": "phase_map", "path": "does-not-exist.txt",
                "materials": [{"young_modulus": 1.0, "poisson_ratio": 0.3}]}}"#;
        let err = RunConfig::from_json(json, Path::new("/nonexistent")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn method_alias() {
        let cfg = RunConfig::from_json(&hashin_json(r#", "solver": {"methods": ["fp", "krylov"]}"#), Path::new(".")).unwrap();
        assert_eq!(cfg.solver.methods, vec![Method::FixedPoint, Method::Krylov]);
    }

    #[test]
    fn contrast_sweep_defaults_to_64() {
        let json = r#"{"version": 1, "microstructure": {"type": "hashin"}, "grid": {},
            "sweep": {"axis": "contrast", "values": [0.1, 10.0]}}"#;
        let cfg = RunConfig::from_json(json, Path::new(".")).unwrap();
        assert_eq!(cfg.grid_sizes(), vec![64]);
        let c = cfg.stiffness(16, Some(10.0)).unwrap();
        assert_eq!(c.materials()[1].young_modulus, 10.0 * c.materials()[0].young_modulus);
    }
}
