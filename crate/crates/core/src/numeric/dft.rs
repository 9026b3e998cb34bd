//! Direct O(n²) discrete Fourier transforms with precomputed twiddles.
//!
//! Every axis in this crate is short (≤ a few hundred samples), so the dense
//! transform is fast enough, works for any length, and is bit-for-bit
//! deterministic. Forward uses the `e^{-iωt}` convention; `inverse` divides
//! by `n`, so `inverse ∘ forward` is the identity up to roundoff.

use crate::C64;

#[derive(Debug, Clone)]
pub struct DftPlan {
    n: usize,
    /// twiddle[k] = exp(-2πi k / n) for k in 0..n
    twiddle: Vec<C64>,
}

impl DftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let twiddle = (0..n)
            .map(|k| {
                let ang = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
                C64::new(ang.cos(), ang.sin())
            })
            .collect();
        Self { n, twiddle }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn forward(&self, x: &[C64], out: &mut [C64]) {
        self.apply(x, out, false);
    }

    pub fn inverse(&self, x: &[C64], out: &mut [C64]) {
        self.apply(x, out, true);
        let inv_n = 1.0 / self.n as f64;
        for v in out.iter_mut() {
            *v *= inv_n;
        }
    }

    fn apply(&self, x: &[C64], out: &mut [C64], inverse: bool) {
        let n = self.n;
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for (m, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &xv in x.iter() {
                let tw = self.twiddle[idx];
                let tw = if inverse { tw.conj() } else { tw };
                acc += xv * tw;
                idx += m;
                if idx >= n {
                    idx -= n;
                }
            }
            *o = acc;
        }
    }
}

/// Signed angular frequencies `ξ_m = 2π m̃ / (n h)` of an `n`-point grid with
/// spacing `h`, in standard DFT layout (`m̃ = m` for `m ≤ n/2`, else `m - n`).
pub fn angular_frequencies(n: usize, h: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|m| {
            let signed = if m <= (n - 1) / 2 { m as f64 } else { m as f64 - n as f64 };
            base * signed
        })
        .collect()
}

/// Applies `plan` along `axis` of a row-major `shape` buffer, in place.
pub fn transform_axis(data: &mut [C64], shape: &[usize], axis: usize, plan: &DftPlan, inverse: bool) {
    let n = shape[axis];
    assert_eq!(plan.len(), n);
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let inner = stride;
    let mut line = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        let block = o * n * inner;
        for i in 0..inner {
            for (k, l) in line.iter_mut().enumerate() {
                *l = data[block + k * inner + i];
            }
            if inverse {
                plan.inverse(&line, &mut out);
            } else {
                plan.forward(&line, &mut out);
            }
            for (k, &v) in out.iter().enumerate() {
                data[block + k * inner + i] = v;
            }
        }
    }
}
