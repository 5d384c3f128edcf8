//! Greedy rational fitting.
//!
//! Both drivers run the same loop: pick the sample with the largest current
//! absolute error, add its coordinates to the per-variable node axes,
//! enlarge the interpolation set, and re-solve the constrained LS problem.
//! The approximant starts as the constant mean of the sample values, and the
//! stopping metric is the relative maximum error over the training samples,
//! `max_i |f_i - r_i| / max_i |f_i|`.
//!
//! On grid data every combination of node coordinates is a sample, so the
//! interpolation set is the full node product each iteration and the solve
//! reduces to the Loewner-matrix problem; the scattered driver with the
//! default update strategy is a strict generalization, which makes the two
//! paths identical iteration for iteration on lattices.

use num_complex::Complex64;

use crate::barycentric::{complex_key, BarycentricModel};
use crate::error::{Error, Result};
use crate::lsq::{solve_constrained, SampleSet};
use crate::selection::InterpSet;
use crate::format_point;

/// How the interpolation set grows each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpUpdate {
    /// Add every sample that lies in the node product (default). Guarantees
    /// at least one new interpolation point per iteration and keeps the LS
    /// problem small.
    #[default]
    AllAvailable,
    /// Add only the greedy point itself.
    GreedyPointOnly,
}

/// Which driver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// Detect lattice structure and pick grid or scattered accordingly.
    #[default]
    Auto,
    Grid,
    Scattered,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Relative max-error target.
    pub tol: f64,
    pub max_iter: usize,
    pub interp_update: InterpUpdate,
    pub mode: FitMode,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            tol: 1e-8,
            max_iter: 100,
            interp_update: InterpUpdate::default(),
            mode: FitMode::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::invalid("tol must be a positive finite number"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Diagnostic raised during fitting; fitting continues.
#[derive(Debug, Clone, PartialEq)]
pub enum FitWarning {
    /// The model had a pole (or 0/0) at a training sample; its error was
    /// treated as infinite so the greedy step repairs it.
    PoleAtSample {
        iteration: usize,
        point: Vec<Complex64>,
    },
    /// A constrained denominator coefficient solved to exactly zero, so
    /// interpolation is not enforced at that point.
    ConstrainedAlphaZero {
        iteration: usize,
        point: Vec<Complex64>,
    },
}

impl std::fmt::Display for FitWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitWarning::PoleAtSample { iteration, point } => write!(
                f,
                "iteration {iteration}: pole at training sample {}",
                format_point(point)
            ),
            FitWarning::ConstrainedAlphaZero { iteration, point } => write!(
                f,
                "iteration {iteration}: constrained alpha entry is zero at {}; interpolation not enforced",
                format_point(point)
            ),
        }
    }
}

/// One greedy iteration.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub greedy_point: Vec<Complex64>,
    /// Relative max error over the training samples after the solve.
    pub rel_max_error: f64,
    /// Node count per axis after the update.
    pub node_counts: Vec<usize>,
    /// Interpolation set size after the update.
    pub interp_count: usize,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub final_error: f64,
    pub converged: bool,
    pub warnings: Vec<FitWarning>,
}

/// Per-iteration view passed to fit observers.
pub struct FitStep<'a> {
    pub iteration: usize,
    pub record: &'a IterationRecord,
    pub model: &'a BarycentricModel,
    pub interp: &'a InterpSet,
    pub residual: f64,
}

/// The training sample with the largest absolute error `|f - r|`, ties
/// broken by lowest sample index. A pole (or 0/0) at a sample counts as
/// infinite error, so the greedy step selects and repairs it.
pub fn greedy_argmax(samples: &SampleSet, model: &BarycentricModel) -> (Vec<Complex64>, f64) {
    let errs = sample_errors(samples, model, 0).0;
    let idx = argmax(&errs);
    (samples.point(idx).to_vec(), errs[idx])
}

fn argmax(errs: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &e) in errs.iter().enumerate() {
        if e > errs[best] {
            best = i;
        }
    }
    best
}

fn sample_errors(
    samples: &SampleSet,
    model: &BarycentricModel,
    iteration: usize,
) -> (Vec<f64>, Vec<FitWarning>) {
    let mut warnings = Vec::new();
    let errs = (0..samples.len())
        .map(|i| match model.eval(samples.point(i)) {
            Ok(r) => (samples.value(i) - r).norm(),
            Err(_) => {
                warnings.push(FitWarning::PoleAtSample {
                    iteration,
                    point: samples.point(i).to_vec(),
                });
                f64::INFINITY
            }
        })
        .collect();
    (errs, warnings)
}

fn relative(err: f64, fmax: f64) -> f64 {
    if fmax > 0.0 {
        err / fmax
    } else if err == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Scattered-data greedy fit.
pub fn fit_scattered(
    samples: &SampleSet,
    config: &FitConfig,
) -> Result<(BarycentricModel, FitReport)> {
    fit_scattered_with(samples, config, |_| {})
}

/// Scattered-data greedy fit with a per-iteration observer.
pub fn fit_scattered_with(
    samples: &SampleSet,
    config: &FitConfig,
    observer: impl FnMut(&FitStep<'_>),
) -> Result<(BarycentricModel, FitReport)> {
    fit_inner(samples, config, config.interp_update, observer)
}

/// Grid-data greedy fit. The samples must form a full lattice.
///
/// The interpolation set is the full node product every iteration (all node
/// combinations are samples on a lattice), so `interp_update` is ignored.
pub fn fit_grid(samples: &SampleSet, config: &FitConfig) -> Result<(BarycentricModel, FitReport)> {
    fit_grid_with(samples, config, |_| {})
}

/// Grid-data greedy fit with a per-iteration observer.
pub fn fit_grid_with(
    samples: &SampleSet,
    config: &FitConfig,
    observer: impl FnMut(&FitStep<'_>),
) -> Result<(BarycentricModel, FitReport)> {
    if samples.grid_axes().is_none() {
        return Err(Error::invalid(
            "sample points do not form a full grid; use the scattered fit",
        ));
    }
    fit_inner(samples, config, InterpUpdate::AllAvailable, observer)
}

fn fit_inner(
    samples: &SampleSet,
    config: &FitConfig,
    update: InterpUpdate,
    mut observer: impl FnMut(&FitStep<'_>),
) -> Result<(BarycentricModel, FitReport)> {
    config.validate()?;
    let dim = samples.dim();
    let k_samples = samples.len();
    let fmax = samples
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let mean = samples.mean_value();

    let mut axes: Vec<Vec<Complex64>> = vec![Vec::new(); dim];
    let mut interp = InterpSet::empty(dim);
    let mut model: Option<BarycentricModel> = None;
    let mut history: Vec<IterationRecord> = Vec::new();
    let mut warnings: Vec<FitWarning> = Vec::new();
    // errors of the current approximant (the mean before the first solve)
    let mut errs: Vec<f64> = samples.values().iter().map(|v| (v - mean).norm()).collect();
    let mut rel = f64::INFINITY;
    let mut converged = false;
    let mut prev_pick: Option<(usize, f64)> = None;

    for iteration in 1..=config.max_iter {
        let gi = argmax(&errs);
        let gerr = errs[gi];
        let greedy_point = samples.point(gi).to_vec();

        if let Some((pi, perr)) = prev_pick {
            let unchanged = (gerr.is_infinite() && perr.is_infinite())
                || (gerr - perr).abs() <= 1e-15 * perr.abs();
            if pi == gi && unchanged {
                return Err(stagnation(
                    format!(
                        "greedy point {} selected twice consecutively with unchanged error {gerr:e}",
                        format_point(&greedy_point)
                    ),
                    model,
                    history,
                    warnings,
                    rel,
                ));
            }
        }
        // Under the all-available update an interpolated point has zero
        // error and cannot be the argmax unless its constraint was not
        // enforceable (zero alpha); re-selecting it cannot make progress.
        if update == InterpUpdate::AllAvailable && interp.contains(&greedy_point) {
            return Err(stagnation(
                format!(
                    "greedy point {} is already an interpolation point; its constraint could not be enforced",
                    format_point(&greedy_point)
                ),
                model,
                history,
                warnings,
                rel,
            ));
        }
        prev_pick = Some((gi, gerr));

        for (axis, &coord) in axes.iter_mut().zip(&greedy_point) {
            if !axis.iter().any(|&n| n == coord) {
                axis.push(coord);
            }
        }
        match update {
            InterpUpdate::AllAvailable => {
                interp = samples_in_product(samples, &axes)?;
                debug_assert!(interp.contains(&greedy_point));
            }
            InterpUpdate::GreedyPointOnly => {
                if !interp.contains(&greedy_point) {
                    interp.insert(greedy_point.clone(), samples.value(gi))?;
                }
            }
        }

        let nodes = crate::barycentric::NodeAxes::new(axes.clone())?;
        let solved = solve_constrained(samples, &nodes, &interp)?;
        for &src in &solved.zero_alpha {
            warnings.push(FitWarning::ConstrainedAlphaZero {
                iteration,
                point: interp.points()[src].clone(),
            });
        }

        let (new_errs, pole_warnings) = sample_errors(samples, &solved.model, iteration);
        warnings.extend(pole_warnings);
        errs = new_errs;
        rel = relative(errs.iter().copied().fold(0.0, f64::max), fmax);

        let record = IterationRecord {
            greedy_point,
            rel_max_error: rel,
            node_counts: nodes.counts(),
            interp_count: interp.len(),
        };
        observer(&FitStep {
            iteration,
            record: &record,
            model: &solved.model,
            interp: &interp,
            residual: solved.residual,
        });
        history.push(record);
        model = Some(solved.model);

        if rel <= config.tol {
            converged = true;
            break;
        }
        if interp.len() == k_samples {
            // every sample is interpolated; nothing left to add
            break;
        }
    }

    let model = model.expect("at least one iteration ran");
    let report = FitReport {
        iterations: history.len(),
        history,
        final_error: rel,
        converged,
        warnings,
    };
    Ok((model, report))
}

fn stagnation(
    reason: String,
    model: Option<BarycentricModel>,
    history: Vec<IterationRecord>,
    warnings: Vec<FitWarning>,
    rel: f64,
) -> Error {
    let model = model.expect("stagnation requires a previous solve");
    let report = FitReport {
        iterations: history.len(),
        history,
        final_error: rel,
        converged: false,
        warnings,
    };
    Error::Stagnation {
        reason,
        model: Box::new(model),
        report: Box::new(report),
    }
}

/// All samples lying in the node product, in sample order.
fn samples_in_product(samples: &SampleSet, axes: &[Vec<Complex64>]) -> Result<InterpSet> {
    let keysets: Vec<std::collections::HashSet<(u64, u64)>> = axes
        .iter()
        .map(|axis| axis.iter().map(|&n| complex_key(n)).collect())
        .collect();
    let mut interp = InterpSet::empty(samples.dim());
    for i in 0..samples.len() {
        let p = samples.point(i);
        if p.iter()
            .zip(&keysets)
            .all(|(&z, keys)| keys.contains(&complex_key(z)))
        {
            interp.insert(p.to_vec(), samples.value(i))?;
        }
    }
    Ok(interp)
}
