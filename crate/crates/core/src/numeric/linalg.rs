//! Dense and banded complex LU factorizations with partial pivoting, a
//! one-norm condition estimate, and power iteration for operator norms.

use crate::{C64, Error, Result};
use ndarray::Array2;

/// Dense LU factorization of a square complex matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: Array2<C64>,
    piv: Vec<usize>,
    n: usize,
    /// 1-norm of the original matrix, kept for condition estimation.
    norm1: f64,
}

impl DenseLu {
    pub fn factor(a: &Array2<C64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape(format!("LU needs square matrix, got {}x{}", n, a.ncols())));
        }
        let norm1 = (0..n)
            .map(|j| (0..n).map(|i| a[[i, j]].norm()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        let mut lu = a.clone();
        let mut piv = vec![0usize; n];
        for col in 0..n {
            let mut pivot = col;
            let mut best = lu[[col, col]].norm();
            for row in col + 1..n {
                let mag = lu[[row, col]].norm();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular { what: "dense LU pivot".into(), cond: f64::INFINITY });
            }
            piv[col] = pivot;
            if pivot != col {
                for j in 0..n {
                    lu.swap([col, j], [pivot, j]);
                }
            }
            let inv_piv = C64::new(1.0, 0.0) / lu[[col, col]];
            for row in col + 1..n {
                let factor = lu[[row, col]] * inv_piv;
                lu[[row, col]] = factor;
                if factor != C64::new(0.0, 0.0) {
                    for j in col + 1..n {
                        let upd = factor * lu[[col, j]];
                        lu[[row, j]] -= upd;
                    }
                }
            }
        }
        Ok(Self { lu, piv, n, norm1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        for col in 0..self.n {
            b.swap(col, self.piv[col]);
        }
        for col in 0..self.n {
            let bc = b[col];
            if bc != C64::new(0.0, 0.0) {
                for row in col + 1..self.n {
                    b[row] -= self.lu[[row, col]] * bc;
                }
            }
        }
        for col in (0..self.n).rev() {
            b[col] /= self.lu[[col, col]];
            let bc = b[col];
            if bc != C64::new(0.0, 0.0) {
                for row in 0..col {
                    b[row] -= self.lu[[row, col]] * bc;
                }
            }
        }
    }

    /// Solves `Aᴴ x = b` in place (conjugate-transpose system).
    pub fn solve_adjoint(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        // Aᴴ = (P L U)ᴴ = Uᴴ Lᴴ Pᵀ, so forward-substitute with Uᴴ, then Lᴴ,
        // then undo the row swaps in reverse order.
        for col in 0..self.n {
            let mut acc = b[col];
            for row in 0..col {
                acc -= self.lu[[row, col]].conj() * b[row];
            }
            b[col] = acc / self.lu[[col, col]].conj();
        }
        for col in (0..self.n).rev() {
            let mut acc = b[col];
            for row in col + 1..self.n {
                acc -= self.lu[[row, col]].conj() * b[row];
            }
            b[col] = acc;
        }
        for col in (0..self.n).rev() {
            b.swap(col, self.piv[col]);
        }
    }

    /// Hager-style 1-norm condition estimate `‖A‖₁ · est(‖A⁻¹‖₁)`.
    pub fn condition_estimate(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let n = self.n;
        let mut x: Vec<C64> = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut inv_norm = 0.0_f64;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve(&mut y);
            let y_norm: f64 = y.iter().map(|v| v.norm()).sum();
            inv_norm = inv_norm.max(y_norm);
            // Sign vector of y, then one adjoint solve to find the steepest
            // coordinate, following Hager's algorithm.
            let mut xi: Vec<C64> = y
                .iter()
                .map(|v| if v.norm() == 0.0 { C64::new(1.0, 0.0) } else { v / v.norm() })
                .collect();
            self.solve_adjoint(&mut xi);
            let (jmax, zmax) = xi
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            let zx: f64 = xi.iter().zip(x.iter()).map(|(z, xv)| (z.conj() * xv).re).sum();
            if zmax <= zx {
                break;
            }
            x = vec![C64::new(0.0, 0.0); n];
            x[jmax] = C64::new(1.0, 0.0);
        }
        self.norm1 * inv_norm
    }
}

/// Banded complex LU with partial pivoting, LAPACK `gbtrf`-style storage.
///
/// The factorized band holds `2*kl + ku + 1` diagonals; row exchanges stay
/// within the band. Built once per matrix and reused across right-hand
/// sides, which is what makes multi-source Helmholtz solves cheap.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column-major band storage: `ab[col * ldab + row_in_band]` where
    /// `row_in_band = kl + ku + row - col` after factorization fill-in.
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandedLu {
    /// Factorizes a band matrix given by `entry(row, col)` for
    /// `|row - col| <= max(kl, ku)` outside of which entries are zero.
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![C64::new(0.0, 0.0); ldab * n];
        for col in 0..n {
            let r0 = col.saturating_sub(ku);
            let r1 = (col + kl).min(n - 1);
            for row in r0..=r1 {
                ab[col * ldab + (kl + ku + row - col)] = entry(row, col);
            }
        }
        let mut piv = vec![0usize; n];
        let diag_off = kl + ku;
        let mut lbuf = vec![C64::new(0.0, 0.0); kl.max(1)];
        for col in 0..n {
            // Partial pivot among the kl sub-diagonal candidates.
            let reach = kl.min(n - 1 - col);
            let mut pivot = 0usize;
            let mut best = ab[col * ldab + diag_off].norm();
            for p in 1..=reach {
                let mag = ab[col * ldab + diag_off + p].norm();
                if mag > best {
                    best = mag;
                    pivot = p;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular { what: "banded LU pivot".into(), cond: f64::INFINITY });
            }
            piv[col] = col + pivot;
            let width = (ku + kl).min(n - 1 - col);
            if pivot != 0 {
                for j in col..=(col + width) {
                    let a = j * ldab + diag_off + col - j;
                    ab.swap(a, a + pivot);
                }
            }
            let diag = ab[col * ldab + diag_off];
            let inv = C64::new(1.0, 0.0) / diag;
            for p in 1..=reach {
                ab[col * ldab + diag_off + p] *= inv;
            }
            if reach == 0 {
                continue;
            }
            lbuf[..reach].copy_from_slice(&ab[col * ldab + diag_off + 1..col * ldab + diag_off + 1 + reach]);
            for j in col + 1..=(col + width) {
                let upper = ab[j * ldab + diag_off + col - j];
                if upper != C64::new(0.0, 0.0) {
                    let base = j * ldab + diag_off + col - j + 1;
                    let tgt = &mut ab[base..base + reach];
                    for (t, &l) in tgt.iter_mut().zip(&lbuf[..reach]) {
                        *t -= l * upper;
                    }
                }
            }
        }
        Ok(Self { n, kl, ku, ab, piv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let ldab = 2 * self.kl + self.ku + 1;
        let diag = self.kl + self.ku;
        for col in 0..self.n {
            let p = self.piv[col];
            if p != col {
                b.swap(col, p);
            }
            let bc = b[col];
            if bc != C64::new(0.0, 0.0) {
                let reach = self.kl.min(self.n - 1 - col);
                let lcol = &self.ab[col * ldab + diag + 1..col * ldab + diag + 1 + reach];
                for (bq, &l) in b[col + 1..col + 1 + reach].iter_mut().zip(lcol) {
                    *bq -= l * bc;
                }
            }
        }
        // U has ku + kl superdiagonals after fill-in; entry U[row, j] lives in
        // column j of the band at offset diag + row - j.
        for row in (0..self.n).rev() {
            let mut acc = b[row];
            let jmax = (row + self.ku + self.kl).min(self.n - 1);
            for j in row + 1..=jmax {
                acc -= self.ab[j * ldab + diag + row - j] * b[j];
            }
            b[row] = acc / self.ab[row * ldab + diag];
        }
    }

    /// Solves `Aᴴ x = b` by conjugation: for complex symmetric `A` (the PML
    /// Helmholtz case) `Aᴴ = conj(A)`, so `x = conj(A⁻¹ conj(b))`.
    pub fn solve_adjoint_symmetric(&self, b: &mut [C64]) {
        for v in b.iter_mut() {
            *v = v.conj();
        }
        self.solve(b);
        for v in b.iter_mut() {
            *v = v.conj();
        }
    }
}


/// Banded LDLᵀ factorization for complex *symmetric* matrices (no
/// pivoting). Half the band and about a quarter of the flops of the pivoted
/// LU; callers must verify a residual (or catch the small-pivot error) and
/// fall back to [`BandedLu`] when the matrix needs pivoting.
#[derive(Debug, Clone)]
pub struct SymBandedLdl {
    n: usize,
    ku: usize,
    /// Packed lower band: `ab[col*(ku+1) + (row-col)]`; entry 0 holds `D`,
    /// entries 1.. hold the unit-`L` multipliers after factorization.
    ab: Vec<C64>,
}

impl SymBandedLdl {
    pub fn factor(n: usize, ku: usize, entry: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let ld = ku + 1;
        let mut ab = vec![C64::new(0.0, 0.0); ld * n];
        let mut scale = 0.0_f64;
        for col in 0..n {
            let rmax = (col + ku).min(n - 1);
            for row in col..=rmax {
                let v = entry(row, col);
                ab[col * ld + (row - col)] = v;
                if row == col {
                    scale = scale.max(v.norm());
                }
            }
        }
        let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);
        let mut cbuf = vec![C64::new(0.0, 0.0); ku.max(1)];
        for col in 0..n {
            let d = ab[col * ld];
            if d.norm() < tiny {
                return Err(Error::Singular {
                    what: "LDLᵀ pivot too small (needs pivoted fallback)".into(),
                    cond: f64::INFINITY,
                });
            }
            let reach = ku.min(n - 1 - col);
            cbuf[..reach].copy_from_slice(&ab[col * ld + 1..col * ld + 1 + reach]);
            let inv_d = C64::new(1.0, 0.0) / d;
            // Trailing update A[r, j] -= c_r c_j / d for the lower triangle.
            for j in 1..=reach {
                let cj = cbuf[j - 1] * inv_d;
                if cj != C64::new(0.0, 0.0) {
                    let jcol = col + j;
                    let base = jcol * ld;
                    let tgt = &mut ab[base..base + (reach - j + 1)];
                    for (t, &cr) in tgt.iter_mut().zip(&cbuf[j - 1..reach]) {
                        *t -= cr * cj;
                    }
                }
            }
            // Store the unit-L multipliers.
            for j in 1..=reach {
                ab[col * ld + j] = cbuf[j - 1] * inv_d;
            }
        }
        Ok(Self { n, ku, ab })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let ld = self.ku + 1;
        for col in 0..self.n {
            let bc = b[col];
            if bc != C64::new(0.0, 0.0) {
                let reach = self.ku.min(self.n - 1 - col);
                let lcol = &self.ab[col * ld + 1..col * ld + 1 + reach];
                for (bq, &l) in b[col + 1..col + 1 + reach].iter_mut().zip(lcol) {
                    *bq -= l * bc;
                }
            }
        }
        for col in 0..self.n {
            b[col] /= self.ab[col * ld];
        }
        for col in (0..self.n).rev() {
            let reach = self.ku.min(self.n - 1 - col);
            let lcol = &self.ab[col * ld + 1..col * ld + 1 + reach];
            let mut acc = b[col];
            for (bq, &l) in b[col + 1..col + 1 + reach].iter().zip(lcol) {
                acc -= l * *bq;
            }
            b[col] = acc;
        }
    }

    /// `Aᴴ x = b` for complex symmetric `A`: `x = conj(A⁻¹ conj(b))`.
    pub fn solve_adjoint_symmetric(&self, b: &mut [C64]) {
        for v in b.iter_mut() {
            *v = v.conj();
        }
        self.solve(b);
        for v in b.iter_mut() {
            *v = v.conj();
        }
    }
}

/// Power iteration for the largest eigenvalue of a Hermitian positive
/// semi-definite operator `apply` in the inner product `inner`.
///
/// Deterministic: the starting vector comes from a fixed splitmix stream.
pub fn power_iteration(
    n: usize,
    mut apply: impl FnMut(&[C64], &mut [C64]),
    inner: impl Fn(&[C64], &[C64]) -> C64,
    max_iters: usize,
    tol: f64,
) -> f64 {
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z = z ^ (z >> 31);
        (z as f64 / u64::MAX as f64) * 2.0 - 1.0
    };
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(next(), next())).collect();
    let norm = inner(&v, &v).re.sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut lambda = 0.0_f64;
    for _ in 0..max_iters {
        apply(&v, &mut w);
        let new_lambda = inner(&w, &v).re;
        let wn = inner(&w, &w).re.sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / wn;
        }
        if (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300) {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}
