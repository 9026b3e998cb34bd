//! Sobolev constants and discrete `H^s` operators/norms on regular grids.
//!
//! The discrete `(I-Δ)^s` is a DFT multiplier `(1+|ξ|²)^s` with `ξ` the
//! per-axis angular frequencies of the grid (periodic extension). Compactly
//! supported fields keep wrap-around effects out of the numbers that matter.

use crate::grid::{GridField, Scalar};
use crate::numeric::dft::{angular_frequencies, transform_axis, DftPlan};
use crate::{C64, Error, Result};
use ndarray::Array2;

/// The `(a, b)` pair of Sobolev orders: `a` for the parameter space, `b` for
/// the data space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevPair {
    /// Parameter-space order. The series/bounds theory needs `a ≥ 0`;
    /// inversion allows any integer.
    pub a_param: i32,
    /// Data-space order; may be fractional.
    pub b_data: f64,
}

impl SobolevPair {
    pub fn new(a_param: i32, b_data: f64) -> Self {
        Self { a_param, b_data }
    }

    /// Validates the `a ≥ 0` restriction required by the series theorems.
    pub fn require_nonnegative_a(&self) -> Result<u32> {
        u32::try_from(self.a_param)
            .map_err(|_| Error::Domain(format!("series/bounds theory requires a ≥ 0, got {}", self.a_param)))
    }
}

/// Binomial coefficient as `f64` (exact for the small arguments used here).
pub(crate) fn binomial(top: u64, k: u64) -> f64 {
    let k = k.min(top - k.min(top));
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (top - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Poincaré constant `P(s, a, n)` relating `‖f‖_{L²(B_a)}` to
/// `‖f‖_{H^s(B_a)}` for compactly supported `f`:
///
/// `P(s,a,n) = (Σ_{j=0}^{s} C(n+j-1, n-1) / (2a²)^j)^{-1/2}`.
///
/// Nonincreasing in `s`, increasing in `a`.
pub fn poincare_constant(s: u32, a: f64, n: u32) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {a}")));
    }
    if n < 1 {
        return Err(Error::Domain("dimension must be ≥ 1".into()));
    }
    let two_a2 = 2.0 * a * a;
    let mut sum = 0.0;
    for j in 0..=s as u64 {
        sum += binomial(n as u64 + j - 1, n as u64 - 1) / two_a2.powi(j as i32);
    }
    Ok(sum.powf(-0.5))
}

fn multiplier_table(shape: &[usize], spacing: &[f64]) -> Vec<Vec<f64>> {
    shape
        .iter()
        .zip(spacing.iter())
        .map(|(&n, &h)| angular_frequencies(n, h).into_iter().map(|x| x * x).collect())
        .collect()
}

fn for_each_mode(shape: &[usize], xi2: &[Vec<f64>], mut f: impl FnMut(usize, f64)) {
    let ndim = shape.len();
    let mut idx = vec![0usize; ndim];
    let total: usize = shape.iter().product();
    for flat in 0..total {
        let mut rem = flat;
        let mut sum = 0.0;
        for ax in (0..ndim).rev() {
            idx[ax] = rem % shape[ax];
            rem /= shape[ax];
            sum += xi2[ax][idx[ax]];
        }
        f(flat, sum);
    }
}

/// Applies the spectral operator `(I-Δ)^s` to a complex field.
///
/// `s = 0` is the exact identity; `apply(s)` then `apply(-s)` returns the
/// input up to roundoff.
pub fn apply_spectral_operator_c64(f: &GridField<C64>, s: f64) -> GridField<C64> {
    if s == 0.0 {
        return f.clone();
    }
    let shape = f.shape().to_vec();
    let mut data = f.values().to_vec();
    let plans: Vec<DftPlan> = shape.iter().map(|&n| DftPlan::new(n)).collect();
    for (ax, plan) in plans.iter().enumerate() {
        transform_axis(&mut data, &shape, ax, plan, false);
    }
    let xi2 = multiplier_table(&shape, f.spacing());
    for_each_mode(&shape, &xi2, |flat, sum| {
        data[flat] *= (1.0 + sum).powf(s);
    });
    for (ax, plan) in plans.iter().enumerate() {
        transform_axis(&mut data, &shape, ax, plan, true);
    }
    GridField::new(data, shape, f.spacing().to_vec(), f.offset().to_vec()).expect("same metadata")
}

/// Applies `(I-Δ)^s` to a real field (the result of the exact operator on a
/// real field is real; residual imaginary parts are roundoff and dropped).
pub fn apply_spectral_operator(f: &GridField<f64>, s: f64) -> GridField<f64> {
    if s == 0.0 {
        return f.clone();
    }
    apply_spectral_operator_c64(&f.to_complex(), s).real()
}

/// Discrete `H^s` norm: `‖(I-Δ)^{s/2} f‖_{L²}` with cell-measure weights,
/// evaluated in the Fourier domain (Parseval).
pub fn sobolev_norm<T: Scalar>(f: &GridField<T>, s: f64) -> f64 {
    let shape = f.shape().to_vec();
    let mut data: Vec<C64> = f.values().iter().map(|v| v.to_c64()).collect();
    let plans: Vec<DftPlan> = shape.iter().map(|&n| DftPlan::new(n)).collect();
    for (ax, plan) in plans.iter().enumerate() {
        transform_axis(&mut data, &shape, ax, plan, false);
    }
    let xi2 = multiplier_table(&shape, f.spacing());
    let mut acc = 0.0;
    for_each_mode(&shape, &xi2, |flat, sum| {
        acc += (1.0 + sum).powf(s) * data[flat].norm_sqr();
    });
    let n_total: usize = shape.iter().product();
    (acc * f.cell_measure() / n_total as f64).sqrt()
}

/// Applies the `(1+ξ²)^s` multiplier along one axis of a data matrix
/// (receiver axis of scattering data); the other axis is untouched.
pub fn apply_axis_multiplier(data: &Array2<C64>, axis: usize, spacing: f64, s: f64) -> Array2<C64> {
    if s == 0.0 {
        return data.clone();
    }
    let shape = [data.nrows(), data.ncols()];
    let n = shape[axis];
    let plan = DftPlan::new(n);
    let mut buf = data.as_standard_layout().as_slice().unwrap().to_vec();
    transform_axis(&mut buf, &shape, axis, &plan, false);
    let xi2: Vec<f64> = angular_frequencies(n, spacing).into_iter().map(|x| x * x).collect();
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            let m = if axis == 0 { i } else { j };
            buf[i * shape[1] + j] *= (1.0 + xi2[m]).powf(s);
        }
    }
    transform_axis(&mut buf, &shape, axis, &plan, true);
    Array2::from_shape_vec(shape, buf).expect("same shape")
}

/// Normalized derivative energies of Lemma-style Poincaré chains.
///
/// `energies[j] = Σ_{|α|=j} ‖D^α f‖²_{L²} / C(n+j-1, n-1)` for `j = 0..=s+1`,
/// computed with centered finite differences (one-sided at the grid edge).
/// The chain inequality states `energies[j] ≤ 2a² · energies[j+1]`.
#[derive(Debug, Clone)]
pub struct PoincareChain {
    pub energies: Vec<f64>,
    pub ball_radius: f64,
}

impl PoincareChain {
    /// `(lhs, rhs)` pairs of each consecutive inequality link.
    pub fn links(&self) -> Vec<(f64, f64)> {
        let two_a2 = 2.0 * self.ball_radius * self.ball_radius;
        self.energies
            .windows(2)
            .map(|w| (w[0], two_a2 * w[1]))
            .collect()
    }

    pub fn all_hold(&self, rel_slack: f64) -> bool {
        self.links().iter().all(|&(l, r)| l <= r * (1.0 + rel_slack) + 1e-300)
    }
}

/// Checks the generalized Poincaré chain on a compactly supported field.
///
/// `ball_center`/`ball_radius` describe the ball `B_a` the support must lie
/// in; errors if any nonzero sample touches the outermost grid layer or
/// leaves the ball.
pub fn check_poincare_chain(
    f: &GridField<f64>,
    s: u32,
    ball_center: &[f64],
    ball_radius: f64,
) -> Result<PoincareChain> {
    let ndim = f.ndim();
    if ball_center.len() != ndim {
        return Err(Error::Shape("ball center rank differs from grid rank".into()));
    }
    let mut idx = vec![0usize; ndim];
    let mut coords = vec![0.0; ndim];
    for flat in 0..f.len() {
        if f.values()[flat] == 0.0 {
            continue;
        }
        f.index_of(flat, &mut idx);
        for ax in 0..ndim {
            if idx[ax] == 0 || idx[ax] + 1 == f.shape()[ax] {
                return Err(Error::Domain(
                    "field support touches the grid boundary; not a valid compactly supported sample".into(),
                ));
            }
        }
        f.coords_of(flat, &mut coords);
        let r2: f64 = coords
            .iter()
            .zip(ball_center)
            .map(|(x, c)| (x - c) * (x - c))
            .sum();
        if r2 > ball_radius * ball_radius * (1.0 + 1e-12) {
            return Err(Error::Domain("field support leaves the ball B_a".into()));
        }
    }

    let mut energies = Vec::with_capacity(s as usize + 2);
    for j in 0..=(s + 1) {
        let mut total = 0.0;
        for alpha in multi_indices(ndim, j) {
            let d = mixed_derivative(f, &alpha);
            total += d.l2_norm().powi(2);
        }
        total /= binomial(ndim as u64 + j as u64 - 1, ndim as u64 - 1);
        energies.push(total);
    }
    Ok(PoincareChain { energies, ball_radius })
}

/// All multi-indices of the given total degree in `ndim` axes.
pub(crate) fn multi_indices(ndim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(ndim: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if ndim == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for d in 0..=degree {
            prefix.push(d);
            rec(ndim - 1, degree - d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(ndim, degree, &mut Vec::new(), &mut out);
    out
}

fn axis_derivative(f: &GridField<f64>, axis: usize) -> GridField<f64> {
    let shape = f.shape().to_vec();
    let n = shape[axis];
    let h = f.spacing()[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = f.clone();
    let src = f.values();
    let dst = out.values_mut();
    for o in 0..outer {
        for i in 0..stride {
            let base = o * n * stride + i;
            for k in 0..n {
                let at = base + k * stride;
                dst[at] = if k == 0 {
                    (src[base + stride] - src[base]) / h
                } else if k + 1 == n {
                    (src[at] - src[at - stride]) / h
                } else {
                    (src[at + stride] - src[at - stride]) / (2.0 * h)
                };
            }
        }
    }
    out
}

fn mixed_derivative(f: &GridField<f64>, alpha: &[u32]) -> GridField<f64> {
    let mut g = f.clone();
    for (ax, &reps) in alpha.iter().enumerate() {
        for _ in 0..reps {
            g = axis_derivative(&g, ax);
        }
    }
    g
}
