//! Assembly of the linearized least-squares systems and the unit-norm solve.
//!
//! All four system variants are columns of one construction. With the
//! Khatri-Rao (column-wise Kronecker) product `C` of the per-axis Cauchy
//! matrices evaluated at the sample coordinates, the assembled matrix is
//!
//! ```text
//! M = [ D C' - C' H , -C' S_u' ]
//! ```
//!
//! where `D` is the diagonal of sample values and `H` the diagonal carrying
//! interpolated values at constrained coefficient positions. Special cases:
//! no constraints gives the free scattered matrix, grid samples give the
//! Kronecker-structured matrix, and constraining the full node product gives
//! the 2D Loewner matrix whose solution vector is `vec(alpha)` alone.
//!
//! `H` is applied as a column scaling at the constrained indices only; the
//! diagonal is never materialized.

use ndarray::Array2;
use num_complex::Complex64;
use num_traits::Zero;

use crate::barycentric::{
    cauchy_matrix, is_finite_complex, point_key, BarycentricModel, CoeffTensor, NodeAxes,
};
use crate::error::{Error, Result};
use crate::selection::{build_plan, constrained_beta, reconstruct_beta, InterpSet, SelectionPlan};

/// Scattered sample data: K pairwise-distinct points in C^d with values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    points: Vec<Vec<Complex64>>,
    values: Vec<Complex64>,
}

impl SampleSet {
    pub fn new(points: Vec<Vec<Complex64>>, values: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("sample set must contain at least one point"));
        }
        if points.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::invalid("sample points need at least one coordinate"));
        }
        let mut seen = std::collections::HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "sample {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|&z| !is_finite_complex(z)) {
                return Err(Error::invalid(format!("non-finite coordinate in sample {i}")));
            }
            if let Some(prev) = seen.insert(point_key(p), i) {
                return Err(Error::invalid(format!(
                    "duplicate sample points at indices {prev} and {i}"
                )));
            }
        }
        if let Some(i) = values.iter().position(|&v| !is_finite_complex(v)) {
            return Err(Error::invalid(format!("non-finite sample value at index {i}")));
        }
        Ok(SampleSet { dim, points, values })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i]
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    /// Coordinates of variable `j` across all samples.
    pub fn coordinate_column(&self, j: usize) -> Vec<Complex64> {
        self.points.iter().map(|p| p[j]).collect()
    }

    /// Distinct coordinate values of variable `j`, in order of first
    /// appearance.
    pub fn distinct_coordinates(&self, j: usize) -> Vec<Complex64> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for p in &self.points {
            if seen.insert(crate::barycentric::complex_key(p[j])) {
                out.push(p[j]);
            }
        }
        out
    }

    /// Per-variable distinct coordinates when the samples form a full
    /// Cartesian lattice (every coordinate combination present exactly once),
    /// `None` otherwise. Detection is exact, not tolerance-based.
    pub fn grid_axes(&self) -> Option<Vec<Vec<Complex64>>> {
        let axes: Vec<Vec<Complex64>> = (0..self.dim)
            .map(|j| self.distinct_coordinates(j))
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        // Points are pairwise distinct, so matching cardinality means every
        // combination occurs exactly once.
        (total == self.len()).then_some(axes)
    }

    /// Arithmetic mean of the sample values.
    pub fn mean_value(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.len() as f64
    }

    /// Look up the value at a point, exact coordinate equality.
    pub fn value_at(&self, point: &[Complex64]) -> Option<Complex64> {
        self.points
            .iter()
            .position(|p| p.as_slice() == point)
            .map(|i| self.values[i])
    }
}

/// An assembled LS matrix with its column-block layout.
///
/// Columns `0..alpha_cols` correspond to `vec(alpha)` (row-major), the
/// remaining `beta_u_cols` to the unconstrained entries of `vec(beta)` in
/// ascending flat order.
#[derive(Debug, Clone)]
pub struct LsSystem {
    pub matrix: Array2<Complex64>,
    pub alpha_cols: usize,
    pub beta_u_cols: usize,
}

impl LsSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Khatri-Rao product of the per-axis Cauchy matrices at the sample
/// coordinates; shape `(n_1 .. n_d) x K`, column `p` ordered row-major.
fn khatri_rao_columns(nodes: &NodeAxes, samples: &SampleSet) -> Result<Array2<Complex64>> {
    let axis_mats: Vec<Array2<Complex64>> = (0..nodes.dim())
        .map(|j| cauchy_matrix(nodes.axis(j), &samples.coordinate_column(j)))
        .collect::<Result<_>>()?;
    let total = nodes.total();
    let k = samples.len();
    let mut out = Array2::zeros((total, k));
    let mut col = vec![Complex64::zero(); total];
    for p in 0..k {
        col.clear();
        col.push(Complex64::new(1.0, 0.0));
        for mat in &axis_mats {
            let n = mat.nrows();
            let mut next = Vec::with_capacity(col.len() * n);
            for &w in &col {
                for i in 0..n {
                    next.push(w * mat[(i, p)]);
                }
            }
            col = next;
        }
        for (t, &v) in col.iter().enumerate() {
            out[(t, p)] = v;
        }
    }
    Ok(out)
}

/// Assemble the scattered-data LS matrix with interpolation constraints.
///
/// `interp_values` must be aligned with `plan.constrained_idx()` (use
/// [`SelectionPlan::align_values`]). Rows at samples that are interpolation
/// points come out exactly zero.
pub fn assemble_scattered_interp(
    samples: &SampleSet,
    nodes: &NodeAxes,
    plan: &SelectionPlan,
    interp_values: &[Complex64],
) -> Result<LsSystem> {
    if samples.dim() != nodes.dim() {
        return Err(Error::invalid(format!(
            "samples have dimension {}, nodes have {}",
            samples.dim(),
            nodes.dim()
        )));
    }
    if plan.dims() != nodes.counts().as_slice() {
        return Err(Error::invalid("selection plan was built for different nodes"));
    }
    if interp_values.len() != plan.k() {
        return Err(Error::invalid(format!(
            "{} interpolation values for {} constraints",
            interp_values.len(),
            plan.k()
        )));
    }
    let kr = khatri_rao_columns(nodes, samples)?;
    let total = nodes.total();
    let k = plan.k();
    // diag(S_c' H) as a dense column scaling, nonzero only at constrained
    // indices
    let mut h = vec![Complex64::zero(); total];
    for (i, &t) in plan.constrained_idx().iter().enumerate() {
        h[t] = interp_values[i];
    }
    let rows = samples.len();
    let mut m = Array2::zeros((rows, 2 * total - k));
    for row in 0..rows {
        let f = samples.value(row);
        for t in 0..total {
            m[(row, t)] = kr[(t, row)] * (f - h[t]);
        }
        for (j, &u) in plan.unconstrained_idx().iter().enumerate() {
            m[(row, total + j)] = -kr[(u, row)];
        }
    }
    Ok(LsSystem {
        matrix: m,
        alpha_cols: total,
        beta_u_cols: total - k,
    })
}

/// Scattered-data LS matrix without interpolation constraints.
pub fn assemble_scattered_free(samples: &SampleSet, nodes: &NodeAxes) -> Result<LsSystem> {
    let plan = build_plan(nodes, &InterpSet::empty(nodes.dim()))?;
    assemble_scattered_interp(samples, nodes, &plan, &[])
}

/// Grid-data LS matrix without interpolation constraints.
///
/// The samples must form a full lattice; the Kronecker columns then coincide
/// with the Khatri-Rao columns of the flattened grid, so this delegates to
/// the scattered assembly.
pub fn assemble_grid_free(samples: &SampleSet, nodes: &NodeAxes) -> Result<LsSystem> {
    require_grid(samples)?;
    assemble_scattered_free(samples, nodes)
}

/// Grid-data LS matrix with interpolation on the full node product (the 2D
/// Loewner matrix and its d-variate analogue).
///
/// `node_values` holds the sample values on the node product, row-major. The
/// nodes must form a sub-grid of the sample lattice.
pub fn assemble_grid_interp(
    samples: &SampleSet,
    nodes: &NodeAxes,
    node_values: &CoeffTensor,
) -> Result<LsSystem> {
    require_grid(samples)?;
    if node_values.dims() != nodes.counts().as_slice() {
        return Err(Error::invalid(format!(
            "node value dims {:?} do not match node counts {:?}",
            node_values.dims(),
            nodes.counts()
        )));
    }
    for j in 0..nodes.dim() {
        let coords = samples.distinct_coordinates(j);
        for &n in nodes.axis(j) {
            if !coords.iter().any(|&c| c == n) {
                return Err(Error::invalid(format!(
                    "node {} of axis {j} is not a sample coordinate",
                    crate::format_complex(n)
                )));
            }
        }
    }
    let mut interp = InterpSet::empty(nodes.dim());
    for flat in 0..nodes.total() {
        interp.insert(nodes.point_at(flat), node_values.data()[flat])?;
    }
    let plan = build_plan(nodes, &interp)?;
    let values = plan.align_values(interp.values());
    let system = assemble_scattered_interp(samples, nodes, &plan, &values)?;
    debug_assert_eq!(system.beta_u_cols, 0);
    Ok(system)
}

fn require_grid(samples: &SampleSet) -> Result<Vec<Vec<Complex64>>> {
    samples
        .grid_axes()
        .ok_or_else(|| Error::invalid("sample points do not form a full grid"))
}

fn ensure_sequential_faer() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Minimize `||M v||_2` over unit vectors: the right singular vector of the
/// smallest singular value, with that singular value as residual.
///
/// The phase is fixed by rotating the largest-magnitude entry (lowest index
/// on ties) to the positive real axis. With equal smallest singular values
/// the last column of the decomposition's right-singular basis is taken; the
/// minimizer is then implementation-defined but the residual is not.
pub fn min_unit_norm(system: &LsSystem) -> Result<(Vec<Complex64>, f64)> {
    let m = &system.matrix;
    let (rows, cols) = (m.nrows(), m.ncols());
    if cols == 0 {
        return Err(Error::invalid("LS system has no columns"));
    }
    if rows == 0 {
        return Err(Error::invalid("LS system has no rows"));
    }
    ensure_sequential_faer();
    let fm = faer::Mat::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = fm.svd().map_err(|e| {
        let fro = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Error::Numerical(format!(
            "SVD did not converge on {rows}x{cols} system (frobenius norm {fro:.3e}): {e:?}"
        ))
    })?;
    // full decomposition: for cols > rows the trailing columns of V span the
    // null space, so the last column always minimizes ||M v||
    let v = svd.V();
    let mut sol: Vec<Complex64> = (0..cols).map(|i| v[(i, cols - 1)]).collect();
    let residual = if cols <= rows {
        svd.S()[cols - 1].re
    } else {
        0.0
    };
    // phase normalization for reproducibility
    let mut imax = 0usize;
    for (i, z) in sol.iter().enumerate() {
        if z.norm_sqr() > sol[imax].norm_sqr() {
            imax = i;
        }
    }
    let pivot = sol[imax];
    if !pivot.is_zero() {
        let phase = pivot / pivot.norm();
        let rot = phase.conj();
        for z in &mut sol {
            *z *= rot;
        }
        sol[imax] = Complex64::new(pivot.norm(), 0.0);
    }
    Ok((sol, residual))
}

/// Outcome of a constrained solve.
#[derive(Debug, Clone)]
pub struct ConstrainedFit {
    pub model: BarycentricModel,
    /// Smallest singular value of the assembled system.
    pub residual: f64,
    /// Positions in `interp` whose constrained `alpha` entry is exactly zero;
    /// interpolation is not enforced there.
    pub zero_alpha: Vec<usize>,
}

/// Assemble, solve, and reconstruct a model interpolating `interp`.
///
/// The interpolation points must be sample points (with exactly matching
/// values) lying in the node product. The returned coefficients satisfy
/// `||alpha||_F^2 + ||beta_u||^2 = 1`.
pub fn solve_constrained(
    samples: &SampleSet,
    nodes: &NodeAxes,
    interp: &InterpSet,
) -> Result<ConstrainedFit> {
    for (i, p) in interp.points().iter().enumerate() {
        match samples.value_at(p) {
            None => {
                return Err(Error::invalid(format!(
                    "interpolation point {} is not a sample point",
                    crate::format_point(p)
                )))
            }
            Some(v) if v != interp.values()[i] => {
                return Err(Error::invalid(format!(
                    "interpolation value at {} does not match the sample",
                    crate::format_point(p)
                )))
            }
            Some(_) => {}
        }
    }
    let plan = build_plan(nodes, interp)?;
    let aligned = plan.align_values(interp.values());
    let system = assemble_scattered_interp(samples, nodes, &plan, &aligned)?;
    let (sol, residual) = min_unit_norm(&system)?;
    let total = nodes.total();
    let alpha = CoeffTensor::new(nodes.counts(), sol[..total].to_vec())?;
    let beta_u = &sol[total..];
    let beta_c = constrained_beta(&plan, &alpha, &aligned);
    let zero_alpha: Vec<usize> = (0..plan.k())
        .filter(|&i| alpha.data()[plan.constrained_idx()[i]].is_zero())
        .map(|i| plan.source_position(i))
        .collect();
    let beta = reconstruct_beta(&plan, &beta_c, beta_u)?;
    let model = BarycentricModel::new(nodes.clone(), alpha, beta)?;
    Ok(ConstrainedFit {
        model,
        residual,
        zero_alpha,
    })
}
