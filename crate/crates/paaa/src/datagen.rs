//! Deterministic dataset generators for experiments and oracle fixtures.
//!
//! All generators are pure functions of their arguments; randomized ones use
//! ChaCha12 keyed by the caller's seed, so fixtures reproduce bit-for-bit
//! across platforms and runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::barycentric::{point_key, BarycentricModel, CoeffTensor, NodeAxes};
use crate::error::{Error, Result};
use crate::lsq::SampleSet;

/// The MATLAB "peaks" surface.
pub fn peaks(x: f64, y: f64) -> f64 {
    3.0 * (1.0 - x) * (1.0 - x) * (-x * x - (y + 1.0) * (y + 1.0)).exp()
        - 10.0 * (x / 5.0 - x.powi(3) - y.powi(5)) * (-x * x - y * y).exp()
        - (1.0 / 3.0) * (-(x + 1.0) * (x + 1.0) - y * y).exp()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Peaks samples on a uniform `n x n` grid over `domain` in both variables,
/// flattened row-major (x slowest).
pub fn gen_peaks_grid(n_per_axis: usize, domain: [f64; 2]) -> Result<SampleSet> {
    if n_per_axis < 2 {
        return Err(Error::invalid("need at least 2 points per axis"));
    }
    let [lo, hi] = domain;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("domain must be a finite interval [lo, hi]"));
    }
    let ticks = linspace(lo, hi, n_per_axis);
    let mut points = Vec::with_capacity(n_per_axis * n_per_axis);
    let mut values = Vec::with_capacity(n_per_axis * n_per_axis);
    for &x in &ticks {
        for &y in &ticks {
            points.push(vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)]);
            values.push(Complex64::new(peaks(x, y), 0.0));
        }
    }
    SampleSet::new(points, values)
}

/// Circular holes cut out of a planar sample grid.
#[derive(Debug, Clone)]
pub struct GapSpec {
    pub centers: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    /// Intended removed fraction, informational; the realized fraction is
    /// computed from the actual point set.
    pub target_removed_fraction: f64,
}

impl GapSpec {
    /// Three circles tuned to remove 20-25% of the 40x40 grid on [-3,3]^2.
    pub fn peaks_default() -> Self {
        GapSpec {
            centers: vec![[-1.2, -1.3], [1.6, 0.6], [-0.7, 1.8]],
            radii: vec![1.1, 0.9, 0.7],
            target_removed_fraction: 0.22,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.len() != self.radii.len() {
            return Err(Error::invalid(format!(
                "{} centers but {} radii",
                self.centers.len(),
                self.radii.len()
            )));
        }
        if self
            .radii
            .iter()
            .any(|r| !r.is_finite() || *r < 0.0)
        {
            return Err(Error::invalid("radii must be finite and non-negative"));
        }
        if self
            .centers
            .iter()
            .any(|c| !c[0].is_finite() || !c[1].is_finite())
        {
            return Err(Error::invalid("centers must be finite"));
        }
        if !(self.target_removed_fraction > 0.0 && self.target_removed_fraction < 1.0) {
            return Err(Error::invalid(
                "target_removed_fraction must lie in (0, 1)",
            ));
        }
        Ok(())
    }

    /// Whether `(x, y)` lies strictly inside any gap circle.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.centers
            .iter()
            .zip(&self.radii)
            .any(|(c, &r)| (x - c[0]).hypot(y - c[1]) < r)
    }
}

/// Grid split into training data (outside all gaps) and held-out data
/// (strictly inside some gap).
#[derive(Debug, Clone)]
pub struct GapSplit {
    pub train: SampleSet,
    /// `None` when the gaps remove nothing.
    pub heldout: Option<SampleSet>,
    /// Realized removed fraction of the full grid.
    pub removed_fraction: f64,
}

/// Peaks grid with circular gaps removed. Deterministic: the split depends
/// only on the geometry; `_seed` is accepted for interface uniformity with
/// the other generators.
pub fn gen_peaks_with_gaps(
    n_per_axis: usize,
    domain: [f64; 2],
    gaps: &GapSpec,
    _seed: u64,
) -> Result<GapSplit> {
    gaps.validate()?;
    let full = gen_peaks_grid(n_per_axis, domain)?;
    let mut train_points = Vec::new();
    let mut train_values = Vec::new();
    let mut held_points = Vec::new();
    let mut held_values = Vec::new();
    for i in 0..full.len() {
        let p = full.point(i);
        if gaps.contains(p[0].re, p[1].re) {
            held_points.push(p.to_vec());
            held_values.push(full.value(i));
        } else {
            train_points.push(p.to_vec());
            train_values.push(full.value(i));
        }
    }
    let removed_fraction = held_points.len() as f64 / full.len() as f64;
    if train_points.is_empty() || removed_fraction >= 0.5 {
        return Err(Error::invalid(format!(
            "gaps remove {:.1}% of the grid; at most half may be removed",
            removed_fraction * 100.0
        )));
    }
    let heldout = if held_points.is_empty() {
        None
    } else {
        Some(SampleSet::new(held_points, held_values)?)
    };
    Ok(GapSplit {
        train: SampleSet::new(train_points, train_values)?,
        heldout,
        removed_fraction,
    })
}

/// A random barycentric model together with samples drawn from it.
#[derive(Debug, Clone)]
pub struct RationalFixture {
    pub samples: SampleSet,
    pub ground_truth: BarycentricModel,
}

/// Random rational function of the given per-axis node counts, sampled at
/// `num_samples` scattered points where its denominator is bounded away from
/// zero. Points violating the bound are redrawn, up to 1000 times each.
pub fn gen_rational_fixture(
    orders: &[usize],
    num_samples: usize,
    seed: u64,
) -> Result<RationalFixture> {
    if orders.is_empty() || orders.iter().any(|&n| n == 0) {
        return Err(Error::invalid("orders must be nonempty and positive"));
    }
    let total: usize = orders.iter().product();
    if num_samples < 2 * total {
        return Err(Error::invalid(format!(
            "need at least {} samples for {} coefficients",
            2 * total,
            total
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // well-separated real nodes per axis
    let axes: Vec<Vec<Complex64>> = orders
        .iter()
        .map(|&n| {
            if n == 1 {
                vec![Complex64::new(0.0, 0.0)]
            } else {
                linspace(-1.2, 1.2, n)
                    .into_iter()
                    .map(|x| Complex64::new(x, 0.0))
                    .collect()
            }
        })
        .collect();
    let nodes = NodeAxes::new(axes)?;
    let draw = |rng: &mut ChaCha12Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let alpha = CoeffTensor::new(
        orders.to_vec(),
        (0..total).map(|_| draw(&mut rng)).collect(),
    )?;
    let beta = CoeffTensor::new(
        orders.to_vec(),
        (0..total).map(|_| draw(&mut rng)).collect(),
    )?;
    let ground_truth = BarycentricModel::new(nodes, alpha, beta)?;

    let dim = orders.len();
    let mut points: Vec<Vec<Complex64>> = Vec::with_capacity(num_samples);
    let mut values = Vec::with_capacity(num_samples);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..num_samples {
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::Generation(
                    "exceeded 1000 redraws searching for a well-conditioned sample point".into(),
                ));
            }
            let p: Vec<Complex64> = (0..dim)
                .map(|_| {
                    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5))
                })
                .collect();
            let (_, d) = ground_truth.eval_numer_denom(&p);
            if d.norm() < 1e-3 || !seen.insert(point_key(&p)) {
                continue;
            }
            let v = ground_truth.eval(&p).expect("denominator bounded away from zero");
            points.push(p);
            values.push(v);
            break;
        }
    }
    Ok(RationalFixture {
        samples: SampleSet::new(points, values)?,
        ground_truth,
    })
}
