//! Selection operators for scattered interpolation constraints.
//!
//! Interpolation at a subset of the node product pins the corresponding
//! `beta` entries to `alpha * value`. The constrained / unconstrained split
//! of `vec(beta)` is represented by sorted flat-index lists; applying a
//! selection operator is a gather, applying its transpose is a scatter. The
//! 0/1 selection matrices are never materialized.

use num_complex::Complex64;

use crate::barycentric::{is_finite_complex, CoeffTensor, NodeAxes};
use crate::error::{Error, Result};
use crate::format_point;

/// Scattered interpolation points with their sample values.
///
/// Points are pairwise distinct (exact equality). Values must equal the
/// dataset sample at each point; the fit loop maintains this by copying
/// values straight from the sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpSet {
    dim: usize,
    points: Vec<Vec<Complex64>>,
    values: Vec<Complex64>,
}

impl InterpSet {
    pub fn empty(dim: usize) -> Self {
        InterpSet {
            dim,
            points: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn new(points: Vec<Vec<Complex64>>, values: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "empty interpolation set needs an explicit dimension; use InterpSet::empty",
            ));
        }
        if points.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} interpolation points but {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points[0].len();
        let mut set = InterpSet::empty(dim);
        for (p, v) in points.into_iter().zip(values) {
            set.insert(p, v)?;
        }
        Ok(set)
    }

    /// Add a point; rejects arity mismatches and exact duplicates.
    pub fn insert(&mut self, point: Vec<Complex64>, value: Complex64) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::invalid(format!(
                "interpolation point has {} coordinates, expected {}",
                point.len(),
                self.dim
            )));
        }
        if point.iter().any(|&z| !is_finite_complex(z)) || !is_finite_complex(value) {
            return Err(Error::invalid("non-finite interpolation data"));
        }
        if self.contains(&point) {
            return Err(Error::invalid(format!(
                "duplicate interpolation point {}",
                format_point(&point)
            )));
        }
        self.points.push(point);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn contains(&self, point: &[Complex64]) -> bool {
        self.points.iter().any(|p| p.as_slice() == point)
    }
}

/// Constrained/unconstrained split of the coefficient tensor entries for a
/// fixed node set and interpolation set.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionPlan {
    dims: Vec<usize>,
    /// Sorted row-major flat indices of the constrained entries.
    constrained: Vec<usize>,
    /// Sorted complement.
    unconstrained: Vec<usize>,
    /// `perm[i]` is the position in the originating `InterpSet` of
    /// `constrained[i]`, so values and indices never desynchronize.
    perm: Vec<usize>,
}

/// Build the selection plan for `interp` against `nodes`.
///
/// Every interpolation point must lie in the node product (exact coordinate
/// equality); the offending point is named otherwise.
pub fn build_plan(nodes: &NodeAxes, interp: &InterpSet) -> Result<SelectionPlan> {
    if !interp.is_empty() && interp.dim() != nodes.dim() {
        return Err(Error::invalid(format!(
            "interpolation set has dimension {}, nodes have {}",
            interp.dim(),
            nodes.dim()
        )));
    }
    let mut tagged: Vec<(usize, usize)> = Vec::with_capacity(interp.len());
    for (i, p) in interp.points().iter().enumerate() {
        let flat = nodes.flat_index(p).ok_or_else(|| {
            Error::invalid(format!(
                "interpolation point {} is not in the node product",
                format_point(p)
            ))
        })?;
        tagged.push((flat, i));
    }
    tagged.sort_unstable();
    let constrained: Vec<usize> = tagged.iter().map(|&(f, _)| f).collect();
    let perm: Vec<usize> = tagged.iter().map(|&(_, i)| i).collect();
    let mut is_constrained = vec![false; nodes.total()];
    for &f in &constrained {
        is_constrained[f] = true;
    }
    let unconstrained: Vec<usize> = (0..nodes.total()).filter(|&f| !is_constrained[f]).collect();
    Ok(SelectionPlan {
        dims: nodes.counts(),
        constrained,
        unconstrained,
        perm,
    })
}

impl SelectionPlan {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total number of coefficient entries.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of constrained entries (interpolation points).
    pub fn k(&self) -> usize {
        self.constrained.len()
    }

    pub fn constrained_idx(&self) -> &[usize] {
        &self.constrained
    }

    pub fn unconstrained_idx(&self) -> &[usize] {
        &self.unconstrained
    }

    /// Position in the originating `InterpSet` of the i-th constrained index.
    pub fn source_position(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// Reorder user-supplied per-point values (in `InterpSet` order) to align
    /// with `constrained_idx`.
    pub fn align_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.perm.len(), "value count mismatch");
        self.perm.iter().map(|&i| values[i]).collect()
    }

    /// Gather the constrained entries of a flat coefficient vector.
    pub fn gather_constrained(&self, flat: &[Complex64]) -> Vec<Complex64> {
        self.constrained.iter().map(|&f| flat[f]).collect()
    }

    /// Gather the unconstrained entries of a flat coefficient vector.
    pub fn gather_unconstrained(&self, flat: &[Complex64]) -> Vec<Complex64> {
        self.unconstrained.iter().map(|&f| flat[f]).collect()
    }
}

/// Constrained numerator coefficients `beta_c = alpha_c ∘ H`.
///
/// `values` must already be aligned with `plan.constrained_idx()` (see
/// [`SelectionPlan::align_values`]).
pub fn constrained_beta(
    plan: &SelectionPlan,
    alpha: &CoeffTensor,
    values: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(alpha.dims(), plan.dims(), "tensor dims mismatch");
    assert_eq!(values.len(), plan.k(), "value count mismatch");
    plan.constrained
        .iter()
        .zip(values)
        .map(|(&f, &h)| alpha.data()[f] * h)
        .collect()
}

/// Scatter constrained and unconstrained parts back into a full row-major
/// tensor: `vec(beta) = S_c' beta_c + S_u' beta_u`.
pub fn reconstruct_beta(
    plan: &SelectionPlan,
    beta_c: &[Complex64],
    beta_u: &[Complex64],
) -> Result<CoeffTensor> {
    if beta_c.len() != plan.k() {
        return Err(Error::invalid(format!(
            "beta_c has length {}, expected {}",
            beta_c.len(),
            plan.k()
        )));
    }
    if beta_u.len() != plan.total() - plan.k() {
        return Err(Error::invalid(format!(
            "beta_u has length {}, expected {}",
            beta_u.len(),
            plan.total() - plan.k()
        )));
    }
    let mut data = vec![Complex64::new(0.0, 0.0); plan.total()];
    for (&f, &v) in plan.constrained.iter().zip(beta_c) {
        data[f] = v;
    }
    for (&f, &v) in plan.unconstrained.iter().zip(beta_u) {
        data[f] = v;
    }
    CoeffTensor::new(plan.dims.to_vec(), data)
}
