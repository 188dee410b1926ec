//! Convergence-study driver: built-in examples, the refinement loop that
//! couples the overlap width to the mesh size (`d_o = h^λ`), and CSV/SVG
//! emission.

mod check;
pub mod examples;
pub mod output;

pub use check::{self_check, CheckOutcome};
pub use examples::{
    example_3d, example_discontinuous_rho, example_multiface_overlap, example_smooth_homogeneous,
    ExampleCase,
};
pub use output::{csv_string, parse_csv, svg_plot, write_csv, write_svg, CsvRow};

use std::sync::Arc;

use crate::analysis::{dg_error, ConvergenceLevel, ConvergenceTable};
use crate::assembly::{assemble, AssemblyConfig, FluxVariant};
use crate::error::Error;
use crate::solver::{solve, SolveOptions};
use crate::Result;

/// Elements per direction per patch on the coarsest level; level `i` uses
/// `4 · 2^i`.
pub const COARSEST_ELEMENTS: usize = 4;

/// Configuration of one convergence run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub example: String,
    pub degree: usize,
    /// Overlap exponent: `d_o = h^λ` per level. `f64::INFINITY` keeps the
    /// interfaces matching (`d_o = 0`).
    pub lambda: f64,
    pub levels: usize,
    /// Penalty override; default `4 (p+1)²`.
    pub eta: Option<f64>,
    /// Assembly quadrature override; default `p + 1` points per direction.
    pub quadrature: Option<usize>,
    pub variant: FluxVariant,
    /// Refine the first patch once more than the others.
    pub non_matching: bool,
}

impl RunConfig {
    pub fn new(example: &str) -> Self {
        Self {
            example: example.to_string(),
            degree: 2,
            lambda: 2.0,
            levels: 4,
            eta: None,
            quadrature: None,
            variant: FluxVariant::Symmetric,
            non_matching: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if self.lambda.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.levels < 2 {
            return Err(Error::Config("need at least 2 refinement levels".into()));
        }
        if self.quadrature == Some(0) {
            return Err(Error::Config("quadrature needs at least one point".into()));
        }
        if let Some(eta) = self.eta {
            if eta <= 0.0 {
                return Err(Error::Config("eta must be positive".into()));
            }
        }
        Ok(())
    }

    fn assembly_config(&self) -> AssemblyConfig {
        let mut cfg = AssemblyConfig::for_degree(self.degree);
        if let Some(eta) = self.eta {
            cfg.penalty = eta;
        }
        if let Some(q) = self.quadrature {
            cfg.quadrature = q;
        }
        cfg.variant = self.variant;
        cfg
    }
}

fn with_level(err: Error, level: usize) -> Error {
    let tag = format!("level {}: ", level);
    match err {
        Error::Geometry(m) => Error::Geometry(format!("{}{}", tag, m)),
        Error::Topology(m) => Error::Topology(format!("{}{}", tag, m)),
        Error::Config(m) => Error::Config(format!("{}{}", tag, m)),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}{}", tag, m)),
        Error::GeometryFile(m) => Error::GeometryFile(format!("{}{}", tag, m)),
        other => other,
    }
}

/// Run the refinement sequence for a named example.
pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceTable> {
    let case = ExampleCase::by_name(&cfg.example)?;
    run_convergence_case(&case, cfg)
}

/// Run the refinement sequence for an explicit case.
///
/// Per level: build the matching geometry, displace the case's interface
/// pairs by `d_o = h_i^λ` with `h_i` the parametric mesh size (the mesh of
/// the unit-cube parametrizations, so widths are patch-scale relative),
/// assemble, solve and evaluate the DG-norm error. Reported mesh sizes and
/// rate ratios use the physical element diameter.
pub fn run_convergence_case(case: &ExampleCase, cfg: &RunConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let asm_cfg = cfg.assembly_config();
    let error_quadrature = asm_cfg.quadrature + 1;
    let mut table = ConvergenceTable::new(cfg.lambda);
    for level in 0..cfg.levels {
        let elements = COARSEST_ELEMENTS << level;
        let mp = case
            .build(cfg.degree, elements, cfg.non_matching)
            .map_err(|e| with_level(e, level))?;
        let h = mp.mesh_size();
        let width = if cfg.lambda.is_infinite() {
            0.0
        } else {
            mp.parametric_mesh_size().powf(cfg.lambda)
        };
        let mut displaced = mp;
        for &pair in &case.overlap_pairs {
            displaced = displaced
                .make_overlap(pair, width)
                .map_err(|e| with_level(e, level))?;
        }
        let system =
            assemble(&displaced, &case.spec, &asm_cfg).map_err(|e| with_level(e, level))?;
        let dofs = system.dofs();
        let mp = Arc::new(displaced);
        let sol = solve(&mp, &system, SolveOptions::default()).map_err(|e| with_level(e, level))?;
        let report = dg_error(&sol, &case.spec, error_quadrature, Some(h))
            .map_err(|e| with_level(e, level))?;
        table.push(ConvergenceLevel {
            level,
            dofs,
            nominal_width: width,
            report,
        })?;
    }
    table.compute_rates();
    Ok(table)
}

/// Run several overlap exponents with an otherwise fixed configuration.
pub fn run_sweep(cfg: &RunConfig, lambdas: &[f64]) -> Result<Vec<ConvergenceTable>> {
    let case = ExampleCase::by_name(&cfg.example)?;
    let mut tables = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let run = RunConfig {
            lambda,
            ..cfg.clone()
        };
        tables.push(run_convergence_case(&case, &run)?);
    }
    Ok(tables)
}
