//! Rational approximation of multivariate data in barycentric form.
//!
//! Fits a d-variate rational function to complex-valued samples by greedily
//! promoting the worst-approximated sample points to barycentric nodes and
//! re-solving a linearized least-squares problem with interpolation
//! constraints. Sample points may form a full grid or an arbitrary scattered
//! cloud; interpolation is enforced wherever data exists on the node product.
//!
//! ```no_run
//! use paaa::{fit_scattered, load_samples, FitConfig};
//!
//! let samples = load_samples("samples.csv")?;
//! let (model, report) = fit_scattered(&samples, &FitConfig::default())?;
//! println!("{} iterations, error {:e}", report.iterations, report.final_error);
//! let value = model.eval(&samples.point(0).to_vec())?;
//! # Ok::<(), paaa::Error>(())
//! ```

pub mod barycentric;
pub mod datagen;
mod error;
pub mod fit;
pub mod io;
pub mod lsq;
pub mod selection;

pub use barycentric::{cauchy_matrix, BarycentricModel, CoeffTensor, NodeAxes};
pub use error::{Error, EvalError, Result};
pub use fit::{
    fit_grid, fit_grid_with, fit_scattered, fit_scattered_with, greedy_argmax, FitConfig,
    FitMode, FitReport, FitStep, FitWarning, InterpUpdate, IterationRecord,
};
pub use io::{load_model, load_points, load_samples, save_model, save_samples, ModelMeta};
pub use lsq::{
    assemble_grid_free, assemble_grid_interp, assemble_scattered_free,
    assemble_scattered_interp, min_unit_norm, solve_constrained, ConstrainedFit, LsSystem,
    SampleSet,
};
pub use selection::{build_plan, constrained_beta, reconstruct_beta, InterpSet, SelectionPlan};

use num_complex::Complex64;

/// Stable text form of a complex scalar: `1.5`, `-2+0.5i`, `3-1i`.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Stable text form of a point: `(x, y, ..)` with [`format_complex`] parts.
pub fn format_point(point: &[Complex64]) -> String {
    let parts: Vec<String> = point.iter().map(|&z| format_complex(z)).collect();
    format!("({})", parts.join(", "))
}
