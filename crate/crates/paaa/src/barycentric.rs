//! Barycentric representation of d-variate rational functions.
//!
//! A rational function is stored as per-variable node lists together with
//! coefficient tensors `alpha` (denominator) and `beta` (numerator). The
//! numerator and denominator are
//!
//! ```text
//! n(z) = sum_{i1..id} beta[i1,..,id]  * g_1^{(i1)}(z_1) * .. * g_d^{(id)}(z_d)
//! d(z) = sum_{i1..id} alpha[i1,..,id] * g_1^{(i1)}(z_1) * .. * g_d^{(id)}(z_d)
//! ```
//!
//! where the basis function `g^{(i)}(z)` is `1/(z - node_i)` away from the
//! nodes, `1` exactly on node `i`, and `0` exactly on any other node of the
//! same axis. This modified Cauchy basis removes the singularities of the
//! classical barycentric form at the node grid, so the value at a full node
//! tuple is simply `beta / alpha` at that entry.
//!
//! Node matching is exact complex equality. Nodes are copied bit-for-bit
//! from sample coordinates by the greedy fit, so training-time matches are
//! exact; a tolerance would silently change the basis. For user-supplied
//! query points [`BarycentricModel::eval_snapped`] offers opt-in snapping.

use ndarray::Array2;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, EvalError, Result};

/// Exact-equality hash key for a complex scalar. Collapses `-0.0` to `0.0`
/// so that keys agree with `==` on floats.
pub(crate) fn complex_key(z: Complex64) -> (u64, u64) {
    ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits())
}

/// Exact-equality hash key for a point.
pub(crate) fn point_key(point: &[Complex64]) -> Vec<(u64, u64)> {
    point.iter().map(|&z| complex_key(z)).collect()
}

pub(crate) fn is_finite_complex(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Basis vector `[g^{(1)}(z), .., g^{(n)}(z)]` for one axis.
pub(crate) fn node_basis(nodes: &[Complex64], z: Complex64) -> Vec<Complex64> {
    if let Some(hit) = nodes.iter().position(|&n| n == z) {
        let mut g = vec![Complex64::zero(); nodes.len()];
        g[hit] = Complex64::one();
        g
    } else {
        nodes.iter().map(|&n| (z - n).inv()).collect()
    }
}

/// Kronecker product of the per-axis basis vectors at `point`, ordered with
/// the last axis fastest (row-major, matching [`CoeffTensor`]).
pub(crate) fn kron_basis(axes: &[Vec<Complex64>], point: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(axes.len(), point.len());
    let mut weights = vec![Complex64::one()];
    for (axis, &z) in axes.iter().zip(point) {
        let g = node_basis(axis, z);
        let mut next = Vec::with_capacity(weights.len() * g.len());
        for &w in &weights {
            for &gi in &g {
                next.push(w * gi);
            }
        }
        weights = next;
    }
    weights
}

/// Cauchy-basis matrix: entry `(i, p)` is `g^{(i)}(points[p])` for the given
/// axis nodes. Shape `n x P`.
pub fn cauchy_matrix(axis_nodes: &[Complex64], points: &[Complex64]) -> Result<Array2<Complex64>> {
    validate_axis(axis_nodes, 0)?;
    for (p, &z) in points.iter().enumerate() {
        if !is_finite_complex(z) {
            return Err(Error::invalid(format!("non-finite point at position {p}")));
        }
    }
    let mut m = Array2::zeros((axis_nodes.len(), points.len()));
    for (p, &z) in points.iter().enumerate() {
        for (i, g) in node_basis(axis_nodes, z).into_iter().enumerate() {
            m[(i, p)] = g;
        }
    }
    Ok(m)
}

fn validate_axis(axis: &[Complex64], index: usize) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::invalid(format!("axis {index} has no nodes")));
    }
    for (i, &n) in axis.iter().enumerate() {
        if !is_finite_complex(n) {
            return Err(Error::invalid(format!("non-finite node in axis {index}")));
        }
        for &m in &axis[..i] {
            if m == n {
                return Err(Error::invalid(format!(
                    "duplicate node {} in axis {index}",
                    crate::format_complex(n)
                )));
            }
        }
    }
    Ok(())
}

/// Per-variable barycentric node lists.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAxes {
    axes: Vec<Vec<Complex64>>,
}

impl NodeAxes {
    /// Nodes must be finite and pairwise distinct (exact equality) within
    /// each axis; at least one axis, each nonempty.
    pub fn new(axes: Vec<Vec<Complex64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("need at least one node axis"));
        }
        for (j, axis) in axes.iter().enumerate() {
            validate_axis(axis, j)?;
        }
        Ok(NodeAxes { axes })
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, j: usize) -> &[Complex64] {
        &self.axes[j]
    }

    pub fn axes(&self) -> &[Vec<Complex64>] {
        &self.axes
    }

    /// Node count per axis.
    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    /// Total size of the node product (= coefficient tensor length).
    pub fn total(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    /// Row-major flat index of `point` in the node product, if each
    /// coordinate exactly matches a node of its axis.
    pub fn flat_index(&self, point: &[Complex64]) -> Option<usize> {
        if point.len() != self.dim() {
            return None;
        }
        let mut flat = 0usize;
        for (axis, &z) in self.axes.iter().zip(point) {
            let i = axis.iter().position(|&n| n == z)?;
            flat = flat * axis.len() + i;
        }
        Some(flat)
    }

    /// Point of the node product at a row-major flat index.
    pub fn point_at(&self, mut flat: usize) -> Vec<Complex64> {
        assert!(flat < self.total(), "flat index out of range");
        let mut point = vec![Complex64::zero(); self.dim()];
        for (j, axis) in self.axes.iter().enumerate().rev() {
            point[j] = axis[flat % axis.len()];
            flat /= axis.len();
        }
        point
    }

    pub fn contains_point(&self, point: &[Complex64]) -> bool {
        self.flat_index(point).is_some()
    }
}

/// Dense coefficient tensor in row-major layout (last index fastest).
///
/// The flat position of entry `(i1,..,id)` is `((i1*n2 + i2)*n3 + ..)*nd + id`.
/// This matches the Kronecker ordering of [`kron_basis`] and is a hard
/// invariant of the model file format.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl CoeffTensor {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n == 0) {
            return Err(Error::invalid("tensor dimensions must be nonzero"));
        }
        let expect: usize = dims.iter().product();
        if data.len() != expect {
            return Err(Error::invalid(format!(
                "tensor data length {} does not match dims {:?} (expected {expect})",
                data.len(),
                dims
            )));
        }
        if let Some(pos) = data.iter().position(|&c| !is_finite_complex(c)) {
            return Err(Error::invalid(format!(
                "non-finite tensor entry at flat index {pos}"
            )));
        }
        Ok(CoeffTensor { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major flat index of a multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        assert_eq!(multi.len(), self.dims.len());
        let mut flat = 0usize;
        for (&i, &n) in multi.iter().zip(&self.dims) {
            assert!(i < n, "index out of range");
            flat = flat * n + i;
        }
        flat
    }

    pub fn get(&self, multi: &[usize]) -> Complex64 {
        self.data[self.flat_index(multi)]
    }
}

/// A d-variate rational function in barycentric form.
///
/// Immutable after construction; all evaluation is pure and thread-safe.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricModel {
    nodes: NodeAxes,
    alpha: CoeffTensor,
    beta: CoeffTensor,
}

impl BarycentricModel {
    pub fn new(nodes: NodeAxes, alpha: CoeffTensor, beta: CoeffTensor) -> Result<Self> {
        let counts = nodes.counts();
        if alpha.dims() != counts.as_slice() || beta.dims() != counts.as_slice() {
            return Err(Error::invalid(format!(
                "coefficient dims alpha {:?} / beta {:?} do not match node counts {:?}",
                alpha.dims(),
                beta.dims(),
                counts
            )));
        }
        Ok(BarycentricModel { nodes, alpha, beta })
    }

    pub fn nodes(&self) -> &NodeAxes {
        &self.nodes
    }

    pub fn alpha(&self) -> &CoeffTensor {
        &self.alpha
    }

    pub fn beta(&self) -> &CoeffTensor {
        &self.beta
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    /// Node count per axis.
    pub fn node_counts(&self) -> Vec<usize> {
        self.nodes.counts()
    }

    /// Barycentric numerator and denominator `(n(z), d(z))` at a point.
    ///
    /// Well-defined everywhere, including on node tuples, where exactly one
    /// basis product is 1 and all others are 0. Callers that need near-pole
    /// diagnostics can inspect `|d|` directly.
    pub fn eval_numer_denom(&self, point: &[Complex64]) -> (Complex64, Complex64) {
        assert_eq!(point.len(), self.dim(), "point arity mismatch");
        let w = kron_basis(self.nodes.axes(), point);
        let mut n = Complex64::zero();
        let mut d = Complex64::zero();
        for (i, &wi) in w.iter().enumerate() {
            n += self.beta.data()[i] * wi;
            d += self.alpha.data()[i] * wi;
        }
        (n, d)
    }

    /// Evaluate `n(z)/d(z)`.
    ///
    /// Fails only when the denominator is exactly zero: a pole when the
    /// numerator is nonzero, indeterminate when both vanish.
    pub fn eval(&self, point: &[Complex64]) -> std::result::Result<Complex64, EvalError> {
        let (n, d) = self.eval_numer_denom(point);
        if d.is_zero() {
            if n.is_zero() {
                return Err(EvalError::Indeterminate {
                    point: point.to_vec(),
                });
            }
            return Err(EvalError::Pole {
                point: point.to_vec(),
            });
        }
        Ok(n / d)
    }

    /// Like [`eval`](Self::eval), but first snaps every coordinate to the
    /// nearest node of its axis when within absolute distance `snap`.
    /// `snap = 0.0` reproduces exact matching.
    pub fn eval_snapped(
        &self,
        point: &[Complex64],
        snap: f64,
    ) -> std::result::Result<Complex64, EvalError> {
        if snap <= 0.0 {
            return self.eval(point);
        }
        let snapped: Vec<Complex64> = point
            .iter()
            .enumerate()
            .map(|(j, &z)| {
                let axis = self.nodes.axis(j);
                let nearest = axis
                    .iter()
                    .copied()
                    .min_by(|a, b| (z - a).norm().total_cmp(&(z - b).norm()))
                    .expect("axes are nonempty");
                if (z - nearest).norm() <= snap {
                    nearest
                } else {
                    z
                }
            })
            .collect();
        self.eval(&snapped)
    }

    /// Elementwise [`eval`](Self::eval); per-point failures do not abort the
    /// batch.
    pub fn eval_batch(
        &self,
        points: &[Vec<Complex64>],
    ) -> Vec<std::result::Result<Complex64, EvalError>> {
        points.iter().map(|p| self.eval(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cauchy_matrix_matches_worked_example() {
        // nodes (-1, 1) against the nine sample x-coordinates; first row of
        // the printed 2x9 matrix.
        let nodes = [r(-1.0), r(1.0)];
        let points = [
            r(-2.0),
            r(-2.0),
            r(-1.0),
            r(-1.0),
            r(0.0),
            r(0.0),
            r(1.0),
            r(2.0),
            r(2.0),
        ];
        let m = cauchy_matrix(&nodes, &points).unwrap();
        let row0 = [-1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0 / 3.0, 1.0 / 3.0];
        let row1 = [
            -1.0 / 3.0,
            -1.0 / 3.0,
            0.0,
            0.0,
            -1.0,
            -1.0,
            1.0,
            1.0,
            1.0,
        ];
        for p in 0..9 {
            assert_eq!(m[(0, p)], r(row0[p]));
            assert_eq!(m[(1, p)], r(row1[p]));
        }
    }

    #[test]
    fn cauchy_matrix_on_node_point() {
        let m = cauchy_matrix(&[r(2.0)], &[r(2.0)]).unwrap();
        assert_eq!(m[(0, 0)], r(1.0));
    }

    #[test]
    fn cauchy_matrix_direct_values() {
        let m = cauchy_matrix(&[r(0.0), r(2.0)], &[r(1.0)]).unwrap();
        assert_eq!(m[(0, 0)], r(1.0));
        assert_eq!(m[(1, 0)], r(-1.0));
    }

    #[test]
    fn cauchy_matrix_rejects_duplicate_nodes() {
        let err = cauchy_matrix(&[r(1.0), r(1.0)], &[r(0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn minus_zero_matches_plus_zero() {
        // f64 equality treats -0.0 == 0.0; the basis must follow suit.
        let m = cauchy_matrix(&[r(0.0), r(1.0)], &[c(-0.0, -0.0)]).unwrap();
        assert_eq!(m[(0, 0)], r(1.0));
        assert_eq!(m[(1, 0)], r(0.0));
        assert_eq!(complex_key(c(-0.0, 0.0)), complex_key(c(0.0, -0.0)));
    }

    fn model_2x2(alpha: [f64; 4], beta: [f64; 4]) -> BarycentricModel {
        let nodes = NodeAxes::new(vec![vec![r(-1.0), r(1.0)], vec![r(-1.0), r(2.0)]]).unwrap();
        let a = CoeffTensor::new(vec![2, 2], alpha.iter().map(|&x| r(x)).collect()).unwrap();
        let b = CoeffTensor::new(vec![2, 2], beta.iter().map(|&x| r(x)).collect()).unwrap();
        BarycentricModel::new(nodes, a, b).unwrap()
    }

    #[test]
    fn eval_at_node_tuple_is_coefficient_ratio() {
        let m = model_2x2([2.0, 3.0, 5.0, 7.0], [4.0, 9.0, 25.0, 14.0]);
        // row-major flat layout: (0,0) (0,1) (1,0) (1,1)
        assert_eq!(m.eval(&[r(-1.0), r(-1.0)]).unwrap(), r(2.0));
        assert_eq!(m.eval(&[r(-1.0), r(2.0)]).unwrap(), r(3.0));
        assert_eq!(m.eval(&[r(1.0), r(-1.0)]).unwrap(), r(5.0));
        assert_eq!(m.eval(&[r(1.0), r(2.0)]).unwrap(), r(2.0));
    }

    #[test]
    fn eval_numer_denom_at_node_tuple_returns_entries() {
        let m = model_2x2([2.0, 3.0, 5.0, 7.0], [4.0, 9.0, 25.0, 14.0]);
        let (n, d) = m.eval_numer_denom(&[r(1.0), r(-1.0)]);
        assert_eq!(n, r(25.0));
        assert_eq!(d, r(5.0));
    }

    /// Term-by-term oracle: direct nested summation of the defining series.
    fn eval_nd_oracle(m: &BarycentricModel, point: &[Complex64]) -> (Complex64, Complex64) {
        let counts = m.nodes().counts();
        let total: usize = counts.iter().product();
        let mut n = Complex64::zero();
        let mut d = Complex64::zero();
        for flat in 0..total {
            // decode multi-index, last axis fastest
            let mut rest = flat;
            let mut idx = vec![0usize; counts.len()];
            for j in (0..counts.len()).rev() {
                idx[j] = rest % counts[j];
                rest /= counts[j];
            }
            let mut basis = Complex64::one();
            for (j, &i) in idx.iter().enumerate() {
                let axis = m.nodes().axis(j);
                let z = point[j];
                let g = if axis.iter().any(|&a| a == z) {
                    if axis[i] == z {
                        Complex64::one()
                    } else {
                        Complex64::zero()
                    }
                } else {
                    (z - axis[i]).inv()
                };
                basis *= g;
            }
            n += m.beta().data()[flat] * basis;
            d += m.alpha().data()[flat] * basis;
        }
        (n, d)
    }

    #[test]
    fn eval_numer_denom_agrees_with_term_by_term_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut coeff = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let alpha: Vec<Complex64> = (0..4).map(|_| coeff()).collect();
            let beta: Vec<Complex64> = (0..4).map(|_| coeff()).collect();
            let nodes =
                NodeAxes::new(vec![vec![r(-1.0), r(1.0)], vec![r(-0.5), r(2.0)]]).unwrap();
            let m = BarycentricModel::new(
                nodes,
                CoeffTensor::new(vec![2, 2], alpha).unwrap(),
                CoeffTensor::new(vec![2, 2], beta).unwrap(),
            )
            .unwrap();
            let point = [coeff() * 3.0, coeff() * 3.0];
            let (n, d) = m.eval_numer_denom(&point);
            let (no, do_) = eval_nd_oracle(&m, &point);
            assert!((n - no).norm() <= 1e-13 * no.norm().max(1.0));
            assert!((d - do_).norm() <= 1e-13 * do_.norm().max(1.0));
        }
    }

    #[test]
    fn constant_model_evaluates_to_one() {
        // off the zeros of the shared denominator factor
        let m = model_2x2([0.3, 0.3, 0.3, 0.3], [0.3, 0.3, 0.3, 0.3]);
        for p in [
            [r(0.5), r(0.75)],
            [r(-1.0), r(0.0)],
            [r(4.0), r(-7.0)],
            [r(-1.0), r(2.0)],
        ] {
            let v = m.eval(&p).unwrap();
            assert!((v - r(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn eval_scale_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let m = model_2x2([0.3, -0.2, 0.9, 0.1], [0.25, 0.5, -0.75, 1.0]);
        let scale = c(0.7, -1.3);
        let scaled = BarycentricModel::new(
            m.nodes().clone(),
            CoeffTensor::new(vec![2, 2], m.alpha().data().iter().map(|&a| a * scale).collect())
                .unwrap(),
            CoeffTensor::new(vec![2, 2], m.beta().data().iter().map(|&b| b * scale).collect())
                .unwrap(),
        )
        .unwrap();
        for _ in 0..20 {
            let p = [
                c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
            ];
            let a = m.eval(&p).unwrap();
            let b = scaled.eval(&p).unwrap();
            assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
        }
    }

    #[test]
    fn sparse_form_pitfall_interpolates_but_has_pole_path() {
        // Off-diagonal zero coefficients force a non-removable singularity at
        // the cross combinations of the interpolated points.
        let nodes = NodeAxes::new(vec![vec![r(-1.0), r(3.0)], vec![r(1.0), r(5.0)]]).unwrap();
        let alpha =
            CoeffTensor::new(vec![2, 2], vec![r(-5.0), r(0.0), r(0.0), r(1.0)]).unwrap();
        let beta = CoeffTensor::new(vec![2, 2], vec![r(5.0), r(0.0), r(0.0), r(3.0)]).unwrap();
        let m = BarycentricModel::new(nodes, alpha, beta).unwrap();

        assert_eq!(m.eval(&[r(-1.0), r(1.0)]).unwrap(), r(-1.0));
        assert_eq!(m.eval(&[r(3.0), r(5.0)]).unwrap(), r(3.0));

        // The denominator vanishes on a curve through (-1, 5): for x near -1
        // solve -5(x-3)(y-5) + (x+1)(y-1) = 0 for y and watch |d| collapse.
        // Rounding in the curve solve grows like eps/delta^2, which caps how
        // close the probe can get while staying below 1e-6.
        for exp in 1..=3 {
            let x = -1.0 + 10f64.powi(-exp);
            let y = (-25.0 * (x - 3.0) + (x + 1.0)) / (-5.0 * (x - 3.0) + (x + 1.0));
            let (_, d) = m.eval_numer_denom(&[r(x), r(y)]);
            assert!(
                d.norm() < 1e-6,
                "expected near-zero denominator at x={x}, got |d|={}",
                d.norm()
            );
        }
        // Cross node tuples carry no data: both coefficients are zero there.
        assert!(matches!(
            m.eval(&[r(-1.0), r(5.0)]),
            Err(EvalError::Indeterminate { .. })
        ));
    }

    #[test]
    fn pole_error_carries_point() {
        // alpha == 0, beta != 0 at a node tuple: exact pole.
        let nodes = NodeAxes::new(vec![vec![r(0.0)], vec![r(0.0)]]).unwrap();
        let alpha = CoeffTensor::new(vec![1, 1], vec![r(0.0)]).unwrap();
        let beta = CoeffTensor::new(vec![1, 1], vec![r(1.0)]).unwrap();
        let m = BarycentricModel::new(nodes, alpha, beta).unwrap();
        match m.eval(&[r(0.0), r(0.0)]) {
            Err(EvalError::Pole { point }) => assert_eq!(point, vec![r(0.0), r(0.0)]),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn eval_batch_reports_per_point() {
        let m = model_2x2([1.0, 1.0, 1.0, 1.0], [3.0, 6.0, 9.0, 12.0]);
        assert!(m.eval_batch(&[]).is_empty());
        let pts = vec![
            vec![r(-1.0), r(-1.0)],
            vec![r(-1.0), r(2.0)],
            vec![r(1.0), r(-1.0)],
            vec![r(1.0), r(2.0)],
        ];
        let out = m.eval_batch(&pts);
        let want = [3.0, 6.0, 9.0, 12.0];
        for (o, w) in out.iter().zip(want) {
            assert_eq!(*o.as_ref().unwrap(), r(w));
        }
    }

    #[test]
    fn eval_snapped_matches_nearby_node() {
        let m = model_2x2([1.0, 1.0, 1.0, 1.0], [3.0, 6.0, 9.0, 12.0]);
        let z = [r(-1.0 + 1e-9), r(2.0 - 1e-9)];
        // default (exact) evaluation does not hit the node value
        assert!((m.eval(&z).unwrap() - r(6.0)).norm() > 1e-12);
        assert_eq!(m.eval_snapped(&z, 1e-6).unwrap(), r(6.0));
        assert_eq!(
            m.eval_snapped(&z, 0.0).unwrap(),
            m.eval(&z).unwrap()
        );
    }

    #[test]
    fn degree_bound_via_polynomial_expansion() {
        // Multiplying n (or d) by prod_i (x - lambda_i) * prod_j (y - mu_j)
        // must give a polynomial of coordinate degree <= (n-1, m-1). We check
        // by exact interpolation: a bivariate polynomial of degree (1,1) is
        // determined by values on a 2x2 grid; probing on a 3x3 grid must be
        // consistent with the (1,1) interpolant.
        let m = model_2x2([0.4, -1.0, 0.7, 0.2], [1.1, 0.3, -0.6, 0.9]);
        let cleared = |x: f64, y: f64, which: usize| -> Complex64 {
            let p = [r(x), r(y)];
            let (n, d) = m.eval_numer_denom(&p);
            let v = if which == 0 { n } else { d };
            v * (r(x) - r(-1.0)) * (r(x) - r(1.0)) * (r(y) - r(-1.0)) * (r(y) - r(2.0))
        };
        for which in 0..2 {
            // bilinear interpolant through values at x in {5,7}, y in {4,6}
            let f = |x: f64, y: f64| cleared(x, y, which);
            let (x0, x1, y0, y1) = (5.0, 7.0, 4.0, 6.0);
            let bilinear = |x: f64, y: f64| {
                let tx = (x - x0) / (x1 - x0);
                let ty = (y - y0) / (y1 - y0);
                f(x0, y0) * r((1.0 - tx) * (1.0 - ty))
                    + f(x0, y1) * r((1.0 - tx) * ty)
                    + f(x1, y0) * r(tx * (1.0 - ty))
                    + f(x1, y1) * r(tx * ty)
            };
            for (x, y) in [(9.0, 8.0), (11.0, 10.0), (6.0, 9.5)] {
                let got = f(x, y);
                let want = bilinear(x, y);
                assert!(
                    (got - want).norm() <= 1e-9 * want.norm().max(1.0),
                    "cleared form is not bilinear: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn node_axes_flat_index_round_trip() {
        let nodes = NodeAxes::new(vec![
            vec![r(0.0), r(1.0), r(2.0)],
            vec![r(5.0), r(6.0)],
            vec![r(-1.0), r(-2.0)],
        ])
        .unwrap();
        for flat in 0..nodes.total() {
            let p = nodes.point_at(flat);
            assert_eq!(nodes.flat_index(&p), Some(flat));
        }
        assert_eq!(nodes.flat_index(&[r(0.0), r(5.0), r(9.0)]), None);
    }
}
