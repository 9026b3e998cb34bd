//! Spherical-harmonic analysis on the measurement sphere and the spectral
//! spherical Sobolev norm `(Σ (1+ℓ)^{2s} |f̂_{ℓk}|²)^{1/2}`.
//!
//! Quadrature is Gauss–Legendre in colatitude × uniform (trapezoid) in
//! longitude, which is exact for band-limited integrands when
//! `n_phi ≥ 2·Lmax+1` and `n_theta ≥ Lmax+1`. Transforms are direct
//! (O(L³)); grids at desk scale keep that cheap, and radially symmetric
//! kernels get a dedicated axisymmetric path that only touches `m = 0`.

use crate::numeric::quad::gauss_legendre;
use crate::{C64, Error, Result};
use ndarray::Array2;

/// Dimension `N(n, ℓ)` of the space of spherical harmonics of degree `ℓ` on
/// the unit sphere in `R^n`: `N(n,0) = 1` and
/// `N(n,ℓ) = (2ℓ+n-2)·Γ(ℓ+n-2) / (Γ(ℓ+1)·Γ(n-1))` for `ℓ ≥ 1`.
pub fn harmonic_dimension(n: u32, ell: u32) -> u64 {
    assert!(n >= 2, "harmonic dimension needs n ≥ 2");
    if ell == 0 {
        return 1;
    }
    // Γ(ℓ+n-2)/Γ(ℓ+1) = Π_{t=ℓ+1}^{ℓ+n-3} t  (empty product for n = 3, and
    // 1/ℓ for n = 2 where the formula reduces to N = 2).
    if n == 2 {
        return 2;
    }
    let mut num: u128 = (2 * ell as u128) + n as u128 - 2;
    for t in (ell + 1)..=(ell + n - 3) {
        num *= t as u128;
    }
    let mut den: u128 = 1;
    for t in 1..=(n - 2) as u128 {
        den *= t;
    }
    debug_assert_eq!(num % den, 0);
    (num / den) as u64
}

/// Quadrature grid on the sphere of a given radius: Gauss–Legendre nodes in
/// `cosθ`, uniform nodes in longitude.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Gauss–Legendre nodes `cosθ_i`, ascending.
    cos_theta: Vec<f64>,
    /// Gauss–Legendre weights on `[-1, 1]`.
    gl_weights: Vec<f64>,
}

impl SphereGrid {
    /// Grid that integrates band-limited functions up to degree `lmax`
    /// exactly: `lmax + 1` colatitude nodes, `2·lmax + 1` longitudes.
    pub fn for_band_limit(radius: f64, lmax: u32) -> Result<Self> {
        Self::new(radius, lmax as usize + 1, 2 * lmax as usize + 1)
    }

    pub fn new(radius: f64, n_theta: usize, n_phi: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain("sphere radius must be positive".into()));
        }
        if n_theta < 1 || n_phi < 1 {
            return Err(Error::Domain("sphere grid needs at least one node per axis".into()));
        }
        let (cos_theta, gl_weights) = gauss_legendre(n_theta);
        Ok(Self { radius, n_theta, n_phi, cos_theta, gl_weights })
    }

    /// Largest band limit this grid integrates exactly.
    pub fn max_band_limit(&self) -> u32 {
        let by_theta = self.n_theta as u32 - 1;
        let by_phi = ((self.n_phi - 1) / 2) as u32;
        by_theta.min(by_phi)
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.n_phi as f64
    }

    /// Area weight of any node in colatitude row `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.radius * self.radius * self.gl_weights[i] * 2.0 * std::f64::consts::PI
            / self.n_phi as f64
    }

    /// Unit direction of node `(i, j)`.
    pub fn direction(&self, i: usize, j: usize) -> [f64; 3] {
        let ct = self.cos_theta[i];
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        let phi = self.phi(j);
        [st * phi.cos(), st * phi.sin(), ct]
    }

    /// All `(unit direction, quadrature weight)` nodes, row-major over `(θ, φ)`.
    pub fn nodes(&self) -> Vec<([f64; 3], f64)> {
        let mut out = Vec::with_capacity(self.n_theta * self.n_phi);
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                out.push((self.direction(i, j), self.weight(i)));
            }
        }
        out
    }

    /// Evaluates a function of position on the full grid.
    pub fn sample(&self, mut f: impl FnMut([f64; 3]) -> C64) -> Array2<C64> {
        let mut out = Array2::from_elem((self.n_theta, self.n_phi), C64::new(0.0, 0.0));
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                let d = self.direction(i, j);
                out[[i, j]] = f([d[0] * self.radius, d[1] * self.radius, d[2] * self.radius]);
            }
        }
        out
    }
}

/// Spherical-harmonic coefficients up to a band limit, against the
/// area-measure orthonormal basis of the sphere the analysis ran on.
///
/// Storage is `(ℓ, m)` with `m ∈ -ℓ..=ℓ` flattened as `ℓ² + (m + ℓ)`; the
/// `(ℓ, k)` indexing with `k ∈ 1..=N(3,ℓ)` maps to `m = k - ℓ - 1`.
#[derive(Debug, Clone)]
pub struct ShCoefficients {
    pub lmax: u32,
    pub radius: f64,
    coeffs: Vec<C64>,
}

impl ShCoefficients {
    pub fn zeros(lmax: u32, radius: f64) -> Self {
        let n = ((lmax as usize) + 1) * ((lmax as usize) + 1);
        Self { lmax, radius, coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn flat(&self, ell: u32, m: i64) -> usize {
        debug_assert!(ell <= self.lmax && m.unsigned_abs() as u32 <= ell);
        (ell as usize) * (ell as usize) + (m + ell as i64) as usize
    }

    pub fn get(&self, ell: u32, m: i64) -> C64 {
        self.coeffs[self.flat(ell, m)]
    }

    pub fn set(&mut self, ell: u32, m: i64, v: C64) {
        let at = self.flat(ell, m);
        self.coeffs[at] = v;
    }

    /// Access by the `(ℓ, k)` convention with `k ∈ 1..=N(3,ℓ)`.
    pub fn get_lk(&self, ell: u32, k: u32) -> C64 {
        assert!(k >= 1 && k as u64 <= harmonic_dimension(3, ell));
        self.get(ell, k as i64 - ell as i64 - 1)
    }

    /// Spectral spherical Sobolev norm `(Σ (1+ℓ)^{2s} |f̂_{ℓk}|²)^{1/2}`;
    /// `s = 0` is the `L²` norm of the synthesized samples (Parseval).
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for ell in 0..=self.lmax {
            let w = (1.0 + ell as f64).powf(2.0 * s);
            let base = (ell as usize) * (ell as usize);
            let count = 2 * ell as usize + 1;
            let block: f64 = self.coeffs[base..base + count].iter().map(|c| c.norm_sqr()).sum();
            acc += w * block;
        }
        acc.sqrt()
    }
}

/// Free-function form of the spectral norm; the measure is baked into the
/// coefficients at analysis time, so `radius` is validated, not used.
pub fn spherical_sobolev_norm(c: &ShCoefficients, s: f64, radius: f64) -> Result<f64> {
    if (radius - c.radius).abs() > 1e-9 * radius.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "coefficients were computed on a sphere of radius {}, not {}",
            c.radius, radius
        )));
    }
    Ok(c.sobolev_norm(s))
}

/// Fully normalized associated Legendre values `P̄_{ℓm}(x)` for fixed `m`,
/// all degrees `ℓ = m..=lmax`, written into `out[ℓ - m]`.
///
/// Normalization makes `Y_{ℓm} = P̄_{ℓm}(cosθ) e^{imφ}` orthonormal on the
/// unit sphere with the area measure.
pub(crate) fn legendre_column(lmax: u32, m: u32, x: f64, out: &mut [f64]) {
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        pmm *= -((2.0 * k as f64 + 1.0) / (2.0 * k as f64)).sqrt() * sin_theta;
    }
    out[0] = pmm;
    if lmax == m {
        return;
    }
    let mut prev = pmm;
    let mut cur = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
    out[1] = cur;
    for ell in (m + 2)..=lmax {
        let l = ell as f64;
        let mf = m as f64;
        let a = ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
        let b = (((2.0 * l + 1.0) / (2.0 * l - 3.0))
            * (((l - 1.0) * (l - 1.0) - mf * mf) / (l * l - mf * mf)))
            .sqrt();
        let next = a * x * cur - b * prev;
        prev = cur;
        cur = next;
        out[(ell - m) as usize] = cur;
    }
}

/// Forward spherical-harmonic transform by quadrature.
///
/// Exact (to roundoff) for inputs band-limited at `lmax` on a grid that
/// satisfies the sampling invariant; errors otherwise.
pub fn sh_analyze(grid: &SphereGrid, samples: &Array2<C64>, lmax: u32) -> Result<ShCoefficients> {
    if samples.nrows() != grid.n_theta || samples.ncols() != grid.n_phi {
        return Err(Error::Shape(format!(
            "samples {}x{} do not match grid {}x{}",
            samples.nrows(),
            samples.ncols(),
            grid.n_theta,
            grid.n_phi
        )));
    }
    if grid.max_band_limit() < lmax {
        return Err(Error::Domain(format!(
            "grid supports band limit {}, requested {}",
            grid.max_band_limit(),
            lmax
        )));
    }
    let nt = grid.n_theta;
    let np = grid.n_phi;
    let dphi = 2.0 * std::f64::consts::PI / np as f64;
    // Longitude sums F[(m+lmax) * nt + i] = dφ · Σ_j f_ij e^{-i m φ_j}.
    let span = 2 * lmax as usize + 1;
    let mut phi_sums = vec![C64::new(0.0, 0.0); span * nt];
    for (mi, m) in (-(lmax as i64)..=lmax as i64).enumerate() {
        let phase: Vec<C64> = (0..np)
            .map(|j| C64::from_polar(1.0, -(m as f64) * grid.phi(j)))
            .collect();
        for i in 0..nt {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..np {
                acc += samples[[i, j]] * phase[j];
            }
            phi_sums[mi * nt + i] = acc * dphi;
        }
    }
    let mut coeffs = ShCoefficients::zeros(lmax, grid.radius);
    let mut col = vec![0.0; lmax as usize + 1];
    for m_abs in 0..=lmax {
        for sign in [1i64, -1] {
            let m = sign * m_abs as i64;
            if m_abs == 0 && sign < 0 {
                continue;
            }
            let mi = (m + lmax as i64) as usize;
            let mut acc = vec![C64::new(0.0, 0.0); (lmax - m_abs + 1) as usize];
            for i in 0..nt {
                legendre_column(lmax, m_abs, grid.cos_theta[i], &mut col);
                let f = phi_sums[mi * nt + i] * grid.gl_weights[i];
                for (d, a) in acc.iter_mut().enumerate() {
                    *a += col[d] * f;
                }
            }
            // P̄_{ℓ,-m} = (-1)^m P̄_{ℓ,m}; fold the parity in so synthesis and
            // analysis agree on the m < 0 basis functions.
            let parity = if m < 0 && m_abs % 2 == 1 { -1.0 } else { 1.0 };
            for (d, a) in acc.iter().enumerate() {
                coeffs.set(m_abs + d as u32, m, *a * parity * grid.radius);
            }
        }
    }
    Ok(coeffs)
}

/// Inverse transform: synthesizes grid samples from coefficients.
pub fn sh_synthesize(grid: &SphereGrid, coeffs: &ShCoefficients) -> Array2<C64> {
    let lmax = coeffs.lmax;
    let nt = grid.n_theta;
    let np = grid.n_phi;
    let mut per_m = vec![C64::new(0.0, 0.0); (2 * lmax as usize + 1) * nt];
    let mut col = vec![0.0; lmax as usize + 1];
    for m_abs in 0..=lmax {
        for sign in [1i64, -1] {
            let m = sign * m_abs as i64;
            if m_abs == 0 && sign < 0 {
                continue;
            }
            let mi = (m + lmax as i64) as usize;
            let parity = if m < 0 && m_abs % 2 == 1 { -1.0 } else { 1.0 };
            for i in 0..nt {
                legendre_column(lmax, m_abs, grid.cos_theta[i], &mut col);
                let mut acc = C64::new(0.0, 0.0);
                for ell in m_abs..=lmax {
                    acc += coeffs.get(ell, m) * col[(ell - m_abs) as usize];
                }
                per_m[mi * nt + i] = acc * parity;
            }
        }
    }
    let mut out = Array2::from_elem((nt, np), C64::new(0.0, 0.0));
    for j in 0..np {
        let phi = grid.phi(j);
        for (mi, m) in (-(lmax as i64)..=lmax as i64).enumerate() {
            let e = C64::from_polar(1.0, m as f64 * phi);
            for i in 0..nt {
                out[[i, j]] += per_m[mi * nt + i] * e;
            }
        }
    }
    out.mapv_inplace(|v| v / grid.radius);
    out
}

/// Analysis of a rotationally symmetric kernel `g(cosγ)` about an arbitrary
/// pole: only `m = 0` coefficients survive, returned as `c[ℓ] = f̂_{ℓ0}`.
///
/// The spectral Sobolev norm only sees degree blocks and is rotation
/// invariant, so the norm of `g` about any pole equals the norm of these
/// coefficients; this path is what makes large band limits affordable.
pub fn analyze_axisymmetric(radius: f64, lmax: u32, g: impl Fn(f64) -> C64) -> Vec<C64> {
    let n_theta = lmax as usize + 1;
    let (cos_theta, gl_weights) = gauss_legendre(n_theta);
    let mut acc = vec![C64::new(0.0, 0.0); lmax as usize + 1];
    let mut col = vec![0.0; lmax as usize + 1];
    for i in 0..n_theta {
        legendre_column(lmax, 0, cos_theta[i], &mut col);
        let f = g(cos_theta[i]) * gl_weights[i];
        for (ell, a) in acc.iter_mut().enumerate() {
            *a += col[ell] * f;
        }
    }
    let scale = 2.0 * std::f64::consts::PI * radius;
    for a in acc.iter_mut() {
        *a *= scale;
    }
    acc
}

/// `(Σ_ℓ (1+ℓ)^{2s} |c_ℓ|²)^{1/2}` for axisymmetric coefficient vectors.
pub fn axisym_sobolev_norm(coeffs: &[C64], s: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(ell, c)| (1.0 + ell as f64).powf(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_dimension_formula() {
        assert_eq!(harmonic_dimension(3, 0), 1);
        assert_eq!(harmonic_dimension(3, 1), 3);
        assert_eq!(harmonic_dimension(3, 2), 5);
        assert_eq!(harmonic_dimension(3, 10), 21);
        assert_eq!(harmonic_dimension(2, 0), 1);
        assert_eq!(harmonic_dimension(2, 5), 2);
        // n = 4: N = (ℓ+1)².
        for ell in 0..6 {
            assert_eq!(harmonic_dimension(4, ell), ((ell + 1) * (ell + 1)) as u64);
        }
    }

    #[test]
    fn grid_weights_sum_to_sphere_area() {
        for &(r, lmax) in &[(1.0, 8u32), (100.0, 33)] {
            let grid = SphereGrid::for_band_limit(r, lmax).unwrap();
            let total: f64 = (0..grid.n_theta)
                .map(|i| grid.weight(i) * grid.n_phi as f64)
                .sum();
            let area = 4.0 * std::f64::consts::PI * r * r;
            assert!((total - area).abs() < 1e-10 * area, "r={r}: {total} vs {area}");
        }
    }

    #[test]
    fn legendre_orthonormality_by_quadrature() {
        // ∫ Y_{ℓm} conj(Y_{ℓ'm}) dσ = δ_{ℓℓ'} on the unit sphere.
        let lmax = 12u32;
        let (x, w) = gauss_legendre(lmax as usize + 1);
        for m in [0u32, 1, 5] {
            let mut cols: Vec<Vec<f64>> = Vec::new();
            for &xi in &x {
                let mut col = vec![0.0; (lmax + 1) as usize];
                legendre_column(lmax, m, xi, &mut col);
                cols.push(col);
            }
            for la in m..=lmax {
                for lb in m..=lmax {
                    let mut acc = 0.0;
                    for (i, &wi) in w.iter().enumerate() {
                        acc += wi * cols[i][(la - m) as usize] * cols[i][(lb - m) as usize];
                    }
                    acc *= 2.0 * std::f64::consts::PI;
                    let want = if la == lb { 1.0 } else { 0.0 };
                    assert!(
                        (acc - want).abs() < 1e-12,
                        "m={m} ℓ={la},{lb}: {acc} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn analyze_picks_out_single_harmonics() {
        let grid = SphereGrid::for_band_limit(1.0, 8).unwrap();
        // Samples of Y₀₀ = 1/√(4π): coefficient 1 at (0, k=1), 0 elsewhere.
        let y00 = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
        let samples = grid.sample(|_| C64::new(y00, 0.0));
        let c = sh_analyze(&grid, &samples, 8).unwrap();
        assert!((c.get_lk(0, 1) - C64::new(1.0, 0.0)).norm() < 1e-12);
        for ell in 1..=8 {
            for k in 1..=(2 * ell + 1) {
                assert!(c.get_lk(ell, k).norm() < 1e-12);
            }
        }

        // 2·Y₁₀ = 2·√(3/4π)·cosθ: coefficient 2 at (ℓ=1, m=0), linearity.
        let a10 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        let samples = grid.sample(|p| C64::new(2.0 * a10 * p[2], 0.0));
        let c = sh_analyze(&grid, &samples, 8).unwrap();
        assert!((c.get(1, 0) - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(c.get(1, 1).norm() < 1e-12 && c.get(2, 0).norm() < 1e-12);
    }

    #[test]
    fn analyze_respects_band_limit_invariant() {
        let grid = SphereGrid::for_band_limit(1.0, 4).unwrap();
        let samples = grid.sample(|_| C64::new(1.0, 0.0));
        assert!(sh_analyze(&grid, &samples, 5).is_err());
    }

    fn random_coeffs(lmax: u32, radius: f64, seed: u64) -> ShCoefficients {
        let mut c = ShCoefficients::zeros(lmax, radius);
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for ell in 0..=lmax {
            for m in -(ell as i64)..=ell as i64 {
                c.set(ell, m, C64::new(next(), next()));
            }
        }
        c
    }

    #[test]
    fn synthesize_analyze_roundtrip() {
        for &(lmax, radius) in &[(10u32, 1.0), (25, 100.0), (60, 2.0)] {
            let grid = SphereGrid::for_band_limit(radius, lmax).unwrap();
            let c = random_coeffs(lmax, radius, 42 + lmax as u64);
            let samples = sh_synthesize(&grid, &c);
            let back = sh_analyze(&grid, &samples, lmax).unwrap();
            let mut worst = 0.0_f64;
            for ell in 0..=lmax {
                for m in -(ell as i64)..=ell as i64 {
                    worst = worst.max((back.get(ell, m) - c.get(ell, m)).norm());
                }
            }
            assert!(worst < 1e-10, "lmax={lmax} radius={radius}: max error {worst}");
        }
    }

    #[test]
    fn sobolev_norm_examples_and_parseval() {
        let mut c = ShCoefficients::zeros(4, 1.0);
        c.set(0, 0, C64::new(1.0, 0.0));
        for s in [-1.5, 0.0, 2.0] {
            assert!((c.sobolev_norm(s) - 1.0).abs() < 1e-15, "ℓ=0 coefficient is s-independent");
        }
        let mut c = ShCoefficients::zeros(4, 1.0);
        c.set(1, 1, C64::new(1.0, 0.0));
        // (1+1)² = 4 under the square root.
        assert!((c.sobolev_norm(1.0) - 2.0).abs() < 1e-15);

        // Parseval at s = 0 against quadrature of the synthesized samples.
        let radius = 3.0;
        let lmax = 12u32;
        let grid = SphereGrid::for_band_limit(radius, lmax).unwrap();
        let c = random_coeffs(lmax, radius, 7);
        let samples = sh_synthesize(&grid, &c);
        let mut quad = 0.0;
        for i in 0..grid.n_theta {
            for j in 0..grid.n_phi {
                quad += samples[[i, j]].norm_sqr() * grid.weight(i);
            }
        }
        let l2 = quad.sqrt();
        assert!(
            (c.sobolev_norm(0.0) - l2).abs() < 1e-10 * l2,
            "Parseval: {} vs {}",
            c.sobolev_norm(0.0),
            l2
        );
        assert!(spherical_sobolev_norm(&c, 0.0, radius).is_ok());
        assert!(spherical_sobolev_norm(&c, 0.0, radius * 2.0).is_err());
    }

    #[test]
    fn sobolev_norm_monotone_and_interpolation_bound() {
        let c = random_coeffs(9, 1.0, 3);
        let mut prev = 0.0;
        for i in 0..7 {
            let s = -1.5 + i as f64 * 0.5;
            let v = c.sobolev_norm(s);
            assert!(v >= prev);
            prev = v;
        }
        // Cauchy–Schwarz in the weighted sequence space.
        for &s in &[0.5, 1.0, 2.0] {
            assert!(c.sobolev_norm(s) * c.sobolev_norm(-s) >= c.sobolev_norm(0.0).powi(2) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn axisymmetric_path_matches_full_transform() {
        // Kernel g(cosγ) about the +z pole: full analysis has only m = 0
        // terms, equal to the axisymmetric path's coefficients.
        let radius = 5.0;
        let lmax = 24u32;
        let g = |ct: f64| C64::new((1.5 + ct).powi(3), (0.3 * ct).sin());
        let grid = SphereGrid::for_band_limit(radius, lmax).unwrap();
        let samples = grid.sample(|p| g(p[2] / radius));
        let full = sh_analyze(&grid, &samples, lmax).unwrap();
        let axi = analyze_axisymmetric(radius, lmax, g);
        for ell in 0..=lmax {
            assert!(
                (full.get(ell, 0) - axi[ell as usize]).norm() < 1e-10,
                "ℓ={ell}: {} vs {}",
                full.get(ell, 0),
                axi[ell as usize]
            );
        }
        for &s in &[0.0, -1.0, 2.5] {
            assert!(
                (full.sobolev_norm(s) - axisym_sobolev_norm(&axi, s)).abs()
                    < 1e-10 * full.sobolev_norm(s).max(1e-300)
            );
        }
    }
}
