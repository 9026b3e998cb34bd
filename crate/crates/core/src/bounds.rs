//! Convergence, stability, and approximation constants of the scattering
//! series, with sweep generators that reproduce the figure trends as tables.
//!
//! `μ` and `ν` are the operator-norm constants with `‖K_j‖ ≤ ν·μ^{j-1}`:
//!
//! * `μ = k² P(a,a,n) sup_y ‖G(y,·)‖_{L²(B_a)}` — closed forms in 3D, plus
//!   an independent quadrature route;
//! * `ν = k² P(a,a,n) C_a sup_y ‖G(y,·)‖_{H^b(∂Ω)}` with
//!   `C_a = |B_a|^{1/2} sup_y ‖u_i(y,·)‖_{L²(∂Ω)}` and `u_i = G` (delta
//!   sources), evaluated through the spectral spherical Sobolev norm.
//!
//! Derived constants follow the `‖𝒦₁‖ = Q/(μ+ν)` parameterization with a
//! fixed `0 < Q < 1`.

use crate::greens::{greens_value, WaveKind, WaveParams};
use crate::numeric::par::par_map;
use crate::numeric::quad::gauss_legendre;
use crate::sobolev::{poincare_constant, SobolevPair};
use crate::sphere::{axisym_sobolev_norm, legendre_column};
use crate::{C64, Error, Result};

/// Geometry and norm choices for one bounds computation: scatterer ball
/// `B_a` strictly inside the measurement sphere `∂Ω` (radius `outer_radius`,
/// centered at the origin).
#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    pub wave: WaveParams,
    /// Angular frequency (1/s); only the inversion experiments use it.
    pub omega: Option<f64>,
    /// Background velocity (km/s); only the inversion experiments use it.
    pub c0: Option<f64>,
    pub ball_radius: f64,
    pub ball_center: [f64; 3],
    pub outer_radius: f64,
    pub sobolev: SobolevPair,
}

impl ScatteringConfig {
    /// The reference geometry of the numeric studies: sphere of radius 100
    /// at the origin, unit ball centered at (98, 0, 0), `k = 1`.
    pub fn paper_geometry(kind: WaveKind, sobolev: SobolevPair) -> Self {
        Self {
            wave: WaveParams::new(kind, 1.0, 3).expect("valid"),
            omega: None,
            c0: None,
            ball_radius: 1.0,
            ball_center: [98.0, 0.0, 0.0],
            outer_radius: 100.0,
            sobolev,
        }
    }

    pub fn center_norm(&self) -> f64 {
        let c = &self.ball_center;
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }

    /// Positive separation between the ball and the sphere is required for
    /// every boundary-norm quantity.
    pub fn validate_containment(&self) -> Result<()> {
        if !(self.ball_radius > 0.0) {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        if self.center_norm() + self.ball_radius >= self.outer_radius {
            return Err(Error::Domain(format!(
                "ball (|c| = {}, a = {}) must lie strictly inside the sphere R = {}",
                self.center_norm(),
                self.ball_radius,
                self.outer_radius
            )));
        }
        Ok(())
    }

    pub fn ball_volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI * self.ball_radius.powi(3)
    }
}

/// Deterministic sample of `B_a` used for the suprema: center, 6 axis poles
/// just inside the surface, a 26-direction lattice shell at half radius, and
/// the point of `B_a` nearest the measurement sphere.
pub fn sup_sample_points(cfg: &ScatteringConfig) -> Vec<[f64; 3]> {
    let a = cfg.ball_radius;
    let c = cfg.ball_center;
    let delta = 1e-3 * a;
    let mut pts = vec![c];
    for ax in 0..3 {
        for sgn in [-1.0, 1.0] {
            let mut p = c;
            p[ax] += sgn * (a - delta);
            pts.push(p);
        }
    }
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for l in -1i32..=1 {
                if i == 0 && j == 0 && l == 0 {
                    continue;
                }
                let d = [i as f64, j as f64, l as f64];
                let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                let r = 0.5 * a;
                pts.push([c[0] + d[0] / norm * r, c[1] + d[1] / norm * r, c[2] + d[2] / norm * r]);
            }
        }
    }
    let cn = cfg.center_norm();
    if cn > 0.0 {
        let u = [c[0] / cn, c[1] / cn, c[2] / cn];
        pts.push([c[0] + u[0] * (a - delta), c[1] + u[1] * (a - delta), c[2] + u[2] * (a - delta)]);
    }
    pts
}

/// Closed-form `μ` for 3D:
/// Helmholtz `k² P √(a/4π)`, diffuse `k² e^{-ka/2} P √(sinh(ka)/4πk)`.
/// Independent of the data order `b`.
pub fn mu_closed_form(cfg: &ScatteringConfig) -> Result<f64> {
    if cfg.wave.dim != 3 {
        return Err(Error::Domain(format!(
            "closed-form μ is only available in 3D, got dim {}",
            cfg.wave.dim
        )));
    }
    let a_param = cfg.sobolev.require_nonnegative_a()?;
    let p = poincare_constant(a_param, cfg.ball_radius, 3)?;
    let k = cfg.wave.k;
    let a = cfg.ball_radius;
    Ok(match cfg.wave.kind {
        WaveKind::Helmholtz => k * k * p * (a / (4.0 * std::f64::consts::PI)).sqrt(),
        WaveKind::Diffuse => {
            k * k
                * (-k * a / 2.0).exp()
                * p
                * ((k * a).sinh() / (4.0 * std::f64::consts::PI * k)).sqrt()
        }
    })
}

/// `μ` by quadrature of `sup_y ‖G(y,·)‖_{L²(B_a)}`: product rule in
/// ball-centered spherical coordinates around each sample `y` (radial
/// Gauss–Legendre inside the ball avoids the diagonal), with angular
/// refinement doubled until the value settles to `rel_tol`.
pub fn mu_quadrature(cfg: &ScatteringConfig, rel_tol: f64) -> Result<f64> {
    if cfg.wave.dim != 3 {
        return Err(Error::Domain("μ quadrature is only available in 3D".into()));
    }
    let a_param = cfg.sobolev.require_nonnegative_a()?;
    let p = poincare_constant(a_param, cfg.ball_radius, 3)?;
    let a = cfg.ball_radius;
    let samples = sup_sample_points(cfg);
    let n_radial = 24;
    let (rx, rw) = gauss_legendre(n_radial);

    let sup_for_level = |n_theta: usize| -> f64 {
        let (cos_g, w_g) = gauss_legendre(n_theta);
        let n_phi = 2 * n_theta - 1;
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let vals = par_map(samples.len(), crate::thread_cap(), |si| {
            let y = samples[si];
            let rel = [
                y[0] - cfg.ball_center[0],
                y[1] - cfg.ball_center[1],
                y[2] - cfg.ball_center[2],
            ];
            let y_norm2 = rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2];
            let mut acc = 0.0;
            for (i, &ct) in cos_g.iter().enumerate() {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for jp in 0..n_phi {
                    let phi = dphi * jp as f64;
                    let dir = [st * phi.cos(), st * phi.sin(), ct];
                    let w = w_g[i] * dphi;
                    let proj = rel[0] * dir[0] + rel[1] * dir[1] + rel[2] * dir[2];
                    let disc = proj * proj + a * a - y_norm2;
                    let r_max = -proj + disc.max(0.0).sqrt();
                    // ∫₀^{r_max} |G(ρ)|² ρ² dρ on interior Gauss nodes.
                    let mut radial = 0.0;
                    for (t, tw) in rx.iter().zip(rw.iter()) {
                        let rho = 0.5 * r_max * (t + 1.0);
                        let g = greens_value(&cfg.wave, rho).expect("rho > 0");
                        radial += tw * 0.5 * r_max * g.norm_sqr() * rho * rho;
                    }
                    acc += w * radial;
                }
            }
            acc
        });
        vals.into_iter().fold(0.0_f64, f64::max)
    };

    let mut n_theta = 17;
    let mut prev = sup_for_level(n_theta);
    for _ in 0..6 {
        n_theta = 2 * n_theta - 1;
        let next = sup_for_level(n_theta);
        if (next - prev).abs() <= rel_tol * next.abs() {
            return Ok(cfg.wave.k * cfg.wave.k * p * next.sqrt());
        }
        prev = next;
    }
    Err(Error::Convergence(format!(
        "μ quadrature stalled at n_theta = {n_theta} without meeting rel_tol = {rel_tol}"
    )))
}

/// Measure convention of the boundary-norm factors entering `ν`.
///
/// The operator theory defines `C_a` and `‖G‖_{H^b(∂Ω)}` with the physical
/// boundary measure, while the computable spectral norm is stated on the
/// unit sphere; the two differ by powers of the sphere radius and the
/// substitution is only norm-equivalent. The conventions below pin that
/// ambiguity; `Hybrid` (physical measure in `C_a`, unit-sphere spectral
/// weight in the `H^b` factor) reproduces the expected crossover windows
/// of both wave kinds and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormConvention {
    /// Area measure of the radius-R sphere in both factors.
    PhysicalArea,
    /// Unit-sphere measure in both factors (the literal spectral-definition
    /// reading).
    UnitSphere,
    /// Physical `C_a`, unit-sphere spectral `H^b` factor.
    Hybrid,
}

impl NormConvention {
    pub fn name(&self) -> &'static str {
        match self {
            NormConvention::PhysicalArea => "physical-area",
            NormConvention::UnitSphere => "unit-sphere",
            NormConvention::Hybrid => "hybrid",
        }
    }

    /// Scale applied to the (area-measure) `L²` supremum.
    fn l2_scale(&self, radius: f64) -> f64 {
        match self {
            NormConvention::PhysicalArea | NormConvention::Hybrid => 1.0,
            NormConvention::UnitSphere => 1.0 / radius,
        }
    }

    /// Scale applied to the (area-measure) `H^b` supremum.
    fn hb_scale(&self, radius: f64) -> f64 {
        match self {
            NormConvention::PhysicalArea => 1.0,
            NormConvention::UnitSphere | NormConvention::Hybrid => 1.0 / radius,
        }
    }
}

/// Band-limit policy for the spectral boundary norms.
#[derive(Debug, Clone)]
pub struct LmaxPolicy {
    /// Starting band limit; `None` uses `2·ceil(k·R_Ω) + 16`.
    pub initial: Option<u32>,
    /// Relative change under doubling at which the norms count as converged.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for LmaxPolicy {
    fn default() -> Self {
        Self { initial: None, rel_tol: 1e-4, max_doublings: 5 }
    }
}

impl LmaxPolicy {
    pub fn initial_for(&self, cfg: &ScatteringConfig) -> u32 {
        self.initial
            .unwrap_or(2 * (cfg.wave.k * cfg.outer_radius).ceil() as u32 + 16)
    }
}

/// Suprema over the `y` sample of the boundary norms of `G(y,·)`, at `b = 0`
/// and at each requested `b`.
#[derive(Debug, Clone)]
pub struct BoundaryKernelSups {
    pub sup_l2: f64,
    pub sup_hb: Vec<f64>,
    pub lmax_used: u32,
}

/// Computes `sup_y ‖G(y,·)‖` norms on `∂Ω` through the spherical-harmonic
/// route. `G(y,·)` is rotationally symmetric about `ŷ` and the spectral norm
/// is rotation invariant, so each sample point needs one axisymmetric
/// analysis; the band limit doubles until every requested norm settles.
pub fn boundary_kernel_sups(
    cfg: &ScatteringConfig,
    bs: &[f64],
    policy: &LmaxPolicy,
    convention: NormConvention,
) -> Result<BoundaryKernelSups> {
    cfg.validate_containment()?;
    if cfg.wave.dim != 3 {
        return Err(Error::Domain("boundary norms are computed for 3D geometry".into()));
    }
    let samples = sup_sample_points(cfg);
    let radii: Vec<f64> = samples
        .iter()
        .map(|y| (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt())
        .collect();
    let big_r = cfg.outer_radius;
    let wave = cfg.wave;

    let norms_for = |lmax: u32| -> (f64, Vec<f64>) {
        let n_theta = lmax as usize + 1;
        let (cos_g, w_g) = gauss_legendre(n_theta);
        let per_sample = par_map(radii.len(), crate::thread_cap(), |si| {
            let r = radii[si];
            // Axisymmetric analysis of G about ŷ:
            // c_ℓ = 2πR Σ_i w_i P̄_{ℓ0}(x_i) G(d(x_i)).
            let mut coeffs = vec![C64::new(0.0, 0.0); lmax as usize + 1];
            let mut col = vec![0.0; lmax as usize + 1];
            for (i, &ct) in cos_g.iter().enumerate() {
                let d = (big_r * big_r + r * r - 2.0 * big_r * r * ct).sqrt();
                let g = greens_value(&wave, d).expect("d > 0 for strictly separated geometry");
                legendre_column(lmax, 0, ct, &mut col);
                let f = g * w_g[i];
                for (ell, c) in coeffs.iter_mut().enumerate() {
                    *c += col[ell] * f;
                }
            }
            let scale = 2.0 * std::f64::consts::PI * big_r;
            for c in coeffs.iter_mut() {
                *c *= scale;
            }
            let l2 = axisym_sobolev_norm(&coeffs, 0.0);
            let hb: Vec<f64> = bs.iter().map(|&b| axisym_sobolev_norm(&coeffs, b)).collect();
            (l2, hb)
        });
        let mut sup_l2 = 0.0_f64;
        let mut sup_hb = vec![0.0_f64; bs.len()];
        for (l2, hb) in per_sample {
            sup_l2 = sup_l2.max(l2);
            for (s, v) in sup_hb.iter_mut().zip(hb) {
                *s = s.max(v);
            }
        }
        (sup_l2, sup_hb)
    };

    let mut lmax = policy.initial_for(cfg);
    let (mut l2, mut hb) = norms_for(lmax);
    for _ in 0..policy.max_doublings {
        let lmax2 = lmax * 2;
        let (l2b, hbb) = norms_for(lmax2);
        let ok_l2 = (l2b - l2).abs() <= policy.rel_tol * l2b.abs().max(1e-300);
        let ok_hb = hb
            .iter()
            .zip(hbb.iter())
            .all(|(a, b)| (b - a).abs() <= policy.rel_tol * b.abs().max(1e-300));
        l2 = l2b;
        hb = hbb;
        lmax = lmax2;
        if ok_l2 && ok_hb {
            let hbs = convention.hb_scale(cfg.outer_radius);
            return Ok(BoundaryKernelSups {
                sup_l2: l2 * convention.l2_scale(cfg.outer_radius),
                sup_hb: hb.into_iter().map(|v| v * hbs).collect(),
                lmax_used: lmax,
            });
        }
    }
    Err(Error::Convergence(format!(
        "boundary norms did not settle to {} under band-limit doubling (lmax reached {})",
        policy.rel_tol, lmax
    )))
}

/// One `ν` evaluation (uses `cfg.sobolev.b_data`).
#[derive(Debug, Clone, Copy)]
pub struct NuValue {
    pub nu: f64,
    pub c_a: f64,
    pub lmax_used: u32,
}

/// `ν = k² P(a,a,3) C_a sup_y ‖G(y,·)‖_{H^b(∂Ω)}` with
/// `C_a = |B_a|^{1/2} sup_y ‖G(y,·)‖_{L²(∂Ω)}`.
pub fn nu_spectral(
    cfg: &ScatteringConfig,
    policy: &LmaxPolicy,
    convention: NormConvention,
) -> Result<NuValue> {
    let sups = boundary_kernel_sups(cfg, &[cfg.sobolev.b_data], policy, convention)?;
    let a_param = cfg.sobolev.require_nonnegative_a()?;
    let p = poincare_constant(a_param, cfg.ball_radius, 3)?;
    let c_a = cfg.ball_volume().sqrt() * sups.sup_l2;
    let k2 = cfg.wave.k * cfg.wave.k;
    Ok(NuValue { nu: k2 * p * c_a * sups.sup_hb[0], c_a, lmax_used: sups.lmax_used })
}

/// Classic radius of convergence `1/(μ+ν)` of the inverse scattering series.
pub fn radius_classic(mu: f64, nu: f64) -> f64 {
    1.0 / (mu + nu)
}

/// Geometric radius `(√(16C₁²+1) - 4C₁)/(2μ)` with `C₁ = max{2, ‖𝒦₁‖·ν}`;
/// constant in `b` as long as `C₁ = 2`.
pub fn radius_geometric(mu: f64, nu: f64, k1_norm: f64) -> f64 {
    let c1 = 2.0_f64.max(k1_norm * nu);
    ((16.0 * c1 * c1 + 1.0).sqrt() - 4.0 * c1) / (2.0 * mu)
}

/// Constants of the classic (Neumann-style) theory under the
/// `‖𝒦₁‖ = Q/(μ+ν)` parameterization.
#[derive(Debug, Clone)]
pub struct ClassicConstants {
    pub c: f64,
    pub c_star: f64,
    pub c_tilde: f64,
    pub c_ab: f64,
    /// Precondition violations, empty when every hypothesis holds.
    pub flags: Vec<String>,
}

/// `C = Q e^{1/(1-Q)}/(μ+ν)`, `C* = max{1/(μ+ν), C}`,
/// `C̃ = C* Q/(1-QM)²`, `C_ab = C*(μ+ν)/(1-(μ+ν)ℳ)²`.
///
/// Precondition failures are reported as flags rather than errors so sweeps
/// can chart validity regions.
pub fn classic_constants(mu: f64, nu: f64, q: f64, m_bound: f64, script_m: f64) -> ClassicConstants {
    let mut flags = Vec::new();
    let total = mu + nu;
    if !(q > 0.0 && q < 1.0) {
        flags.push("q_out_of_range".to_string());
    }
    let c = q * (1.0 / (1.0 - q)).exp() / total;
    let c_star = (1.0 / total).max(c);
    if q * m_bound >= 1.0 {
        flags.push("stability_precondition_failed".to_string());
    }
    let c_tilde = c_star * q / ((1.0 - q * m_bound) * (1.0 - q * m_bound));
    if total * script_m >= 1.0 {
        flags.push("approximation_precondition_failed".to_string());
    }
    let c_ab = c_star * total / ((1.0 - total * script_m) * (1.0 - total * script_m));
    ClassicConstants { c, c_star, c_tilde, c_ab, flags }
}

/// Constants of the geometric-function-theory route.
#[derive(Debug, Clone)]
pub struct GeometricConstants {
    pub c1: f64,
    pub c_tilde_ab: f64,
    /// The `ℳ₁` smallness condition of the approximation theorem.
    pub m1_condition_holds: bool,
}

/// `C̃_ab = (1 - ν‖𝒦₁‖/(1+ν‖𝒦₁‖-μℳ₁)²)^{-1}` with validity
/// `ℳ₁ < (1/μ)(1-√(ν‖𝒦₁‖/(1+ν‖𝒦₁‖)))`.
pub fn geometric_constants(mu: f64, nu: f64, k1_norm: f64, script_m1: f64) -> GeometricConstants {
    let c1 = 2.0_f64.max(k1_norm * nu);
    let nk = nu * k1_norm;
    let denom = 1.0 + nk - mu * script_m1;
    let c_tilde_ab = 1.0 / (1.0 - nk / (denom * denom));
    let m1_condition_holds = script_m1 < (1.0 - (nk / (1.0 + nk)).sqrt()) / mu;
    GeometricConstants { c1, c_tilde_ab, m1_condition_holds }
}

/// Upper bound on `Q₂` required by the geometric approximation theorem, in
/// the `(Q, R)` parameterization with `R = ν/μ`:
/// `(1+R)(1 - √(RQ/(1+R+RQ)))`.
pub fn q2_constraint_bound(q: f64, r: f64) -> f64 {
    (1.0 + r) * (1.0 - (r * q / (1.0 + r + r * q)).sqrt())
}

/// All constants of one configuration under the `Q`-parameterization.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub mu: f64,
    pub nu: f64,
    pub c_a: f64,
    pub r_forward: f64,
    pub r_classic: f64,
    pub r_geometric: f64,
    pub c: f64,
    pub c_star: f64,
    pub c_tilde: f64,
    pub c_ab: f64,
    pub c1: f64,
    pub c_tilde_ab: f64,
    pub q: f64,
    pub q2: f64,
    pub m_bound: f64,
    pub script_m: f64,
    pub script_m1: f64,
    pub r_ratio: f64,
    pub lmax_used: u32,
    pub flags: Vec<String>,
}

/// Knobs for report/sweep generation; `q`, `qm = Q·M`, and `q2` pick the
/// operating point of the parameterized constants.
#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub q: f64,
    pub qm: f64,
    pub q2: f64,
    pub lmax: LmaxPolicy,
    pub convention: NormConvention,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            q: 0.5,
            qm: 0.5,
            q2: 0.5,
            lmax: LmaxPolicy::default(),
            convention: NormConvention::Hybrid,
        }
    }
}

fn assemble_report(mu: f64, nu: f64, c_a: f64, lmax_used: u32, opts: &ReportOptions) -> BoundsReport {
    let total = mu + nu;
    let k1_norm = opts.q / total;
    let m_bound = opts.qm / opts.q;
    let script_m = opts.q2 / total;
    let classic = classic_constants(mu, nu, opts.q, m_bound, script_m);
    let geo = geometric_constants(mu, nu, k1_norm, script_m);
    let mut flags = classic.flags;
    if !geo.m1_condition_holds {
        flags.push("geometric_m1_condition_failed".to_string());
    }
    BoundsReport {
        mu,
        nu,
        c_a,
        r_forward: 1.0 / mu,
        r_classic: radius_classic(mu, nu),
        r_geometric: radius_geometric(mu, nu, k1_norm),
        c: classic.c,
        c_star: classic.c_star,
        c_tilde: classic.c_tilde,
        c_ab: classic.c_ab,
        c1: geo.c1,
        c_tilde_ab: geo.c_tilde_ab,
        q: opts.q,
        q2: opts.q2,
        m_bound,
        script_m,
        script_m1: script_m,
        r_ratio: nu / mu,
        lmax_used,
        flags,
    }
}

/// Computes the full report for one configuration.
pub fn bounds_report(cfg: &ScatteringConfig, opts: &ReportOptions) -> Result<BoundsReport> {
    let mu = mu_closed_form(cfg)?;
    let nu = nu_spectral(cfg, &opts.lmax, opts.convention)?;
    Ok(assemble_report(mu, nu.nu, nu.c_a, nu.lmax_used, opts))
}

/// Sweep axes matching the figure studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    BallRadius,
    AParam,
    BData,
}

/// One emitted sweep row; `ν`-dependent entries are NaN (with a flag) when
/// the geometry or a precondition rules them out.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub kind: WaveKind,
    pub a_param: i32,
    pub b_data: f64,
    pub report: BoundsReport,
}

fn nan_report(mu: f64, opts: &ReportOptions, why: &str) -> BoundsReport {
    let mut r = assemble_report(mu, f64::NAN, f64::NAN, 0, opts);
    r.flags = vec![why.to_string()];
    r
}

/// Evaluates one `BoundsReport` per axis sample.
///
/// Rows are deterministic; per-point failures surface as flagged rows, not
/// errors. `a`-sweeps reuse one boundary-norm computation (only the
/// Poincaré factor changes) and `b`-sweeps share a single band-limit search.
pub fn sweep(
    axis: SweepAxis,
    values: &[f64],
    cfg: &ScatteringConfig,
    opts: &ReportOptions,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Domain("sweep range is empty".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    match axis {
        SweepAxis::AParam => {
            // μ and ν share the factor P(a, a, n); compute the spectral part once.
            let mut base = cfg.clone();
            base.sobolev.a_param = 0;
            let mu0 = mu_closed_form(&base)?;
            let spectral =
                boundary_kernel_sups(&base, &[base.sobolev.b_data], &opts.lmax, opts.convention);
            for &v in values {
                let a_param = v.round() as i32;
                let report = match (&spectral, a_param >= 0) {
                    (Ok(s), true) => {
                        let p = poincare_constant(a_param as u32, cfg.ball_radius, 3)?;
                        let c_a = cfg.ball_volume().sqrt() * s.sup_l2;
                        let k2 = cfg.wave.k * cfg.wave.k;
                        assemble_report(mu0 * p, k2 * p * c_a * s.sup_hb[0], c_a, s.lmax_used, opts)
                    }
                    (Err(_), _) => nan_report(f64::NAN, opts, "nu_convergence_failed"),
                    (_, false) => nan_report(f64::NAN, opts, "negative_a_param"),
                };
                rows.push(SweepRow {
                    axis_value: v,
                    kind: cfg.wave.kind,
                    a_param,
                    b_data: cfg.sobolev.b_data,
                    report,
                });
            }
        }
        SweepAxis::BData => {
            let spectral = boundary_kernel_sups(cfg, values, &opts.lmax, opts.convention)?;
            let a_param = cfg.sobolev.require_nonnegative_a()?;
            let p = poincare_constant(a_param, cfg.ball_radius, 3)?;
            let mu = mu_closed_form(cfg)?;
            let c_a = cfg.ball_volume().sqrt() * spectral.sup_l2;
            let k2 = cfg.wave.k * cfg.wave.k;
            for (i, &b) in values.iter().enumerate() {
                let nu = k2 * p * c_a * spectral.sup_hb[i];
                rows.push(SweepRow {
                    axis_value: b,
                    kind: cfg.wave.kind,
                    a_param: cfg.sobolev.a_param,
                    b_data: b,
                    report: assemble_report(mu, nu, c_a, spectral.lmax_used, opts),
                });
            }
        }
        SweepAxis::BallRadius => {
            for &a in values {
                let mut row_cfg = cfg.clone();
                row_cfg.ball_radius = a;
                let mu = mu_closed_form(&row_cfg).unwrap_or(f64::NAN);
                let report = if row_cfg.validate_containment().is_ok() {
                    match nu_spectral(&row_cfg, &opts.lmax, opts.convention) {
                        Ok(nv) => assemble_report(mu, nv.nu, nv.c_a, nv.lmax_used, opts),
                        Err(_) => nan_report(mu, opts, "nu_convergence_failed"),
                    }
                } else {
                    nan_report(mu, opts, "ball_not_inside_sphere")
                };
                rows.push(SweepRow {
                    axis_value: a,
                    kind: cfg.wave.kind,
                    a_param: cfg.sobolev.a_param,
                    b_data: cfg.sobolev.b_data,
                    report,
                });
            }
        }
    }
    Ok(rows)
}
