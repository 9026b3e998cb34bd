//! Sobolev-norm objective, the `(a,b)`-weighted gradient, an L-BFGS driver,
//! and the transmission inversion experiments (rough scatterer, smooth
//! scatterer, noisy data).
//!
//! The objective is `J_b(η) = ½‖F(η) - φ‖²_{H^b×L²}`; its Sobolev gradient
//! is the `(0,0)` adjoint gradient conjugated by spectral operators,
//! `(I-Δ)^{-a} K₁* (I-Δ)^{b} (F(η) - φ)`, so `a = b = 0` reduces to plain
//! adjoint-state least squares.

use crate::grid::GridField;
use crate::helmholtz2d::{FactoredState, GridChoice, HelmholtzSolver, SolverSetup};
use crate::series::ScatterData;
use crate::sobolev::{apply_spectral_operator, sobolev_norm};
use crate::{C64, Error, Result, SobolevPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The two ground-truth scatterers of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScattererKind {
    /// Compactly supported C^∞ plateau disc with a sharp rolloff.
    RoughDisc,
    /// The same disc convolved with a Gaussian filter.
    SmoothDisc,
}

/// Experiment settings: Setting One inverts the rough disc, Setting Two the
/// smoothed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    One,
    Two,
}

impl Setting {
    pub fn scatterer(self) -> ScattererKind {
        match self {
            Setting::One => ScattererKind::RoughDisc,
            Setting::Two => ScattererKind::SmoothDisc,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::One => "one",
            Setting::Two => "two",
        }
    }
}

/// Builds the true scatterer on the solver's physical grid.
///
/// The rough disc is `amplitude · ψ((r₀ - ρ)/w)` with the standard C^∞
/// step `ψ`; the smooth variant applies a Gaussian filter (spectral
/// multiplier `exp(-σ²|ξ|²/2)`) to the same field.
pub fn make_scatterer(kind: ScattererKind, setup: &SolverSetup, amplitude: f64) -> GridField<f64> {
    let n = setup.n;
    let dx = setup.dx;
    let (cz, cx) = (0.5, 0.5);
    let r0 = 0.15;
    let w = 0.05;
    let smoothstep = |t: f64| -> f64 {
        // C^∞ transition: 0 for t ≤ 0, 1 for t ≥ 1.
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            let f = (-1.0 / t).exp();
            let g = (-1.0 / (1.0 - t)).exp();
            f / (f + g)
        }
    };
    let mut field = GridField::from_fn(&[n, n], &[dx, dx], &[0.0, 0.0], |p| {
        let rho = ((p[0] - cz).powi(2) + (p[1] - cx).powi(2)).sqrt();
        amplitude * smoothstep((r0 - rho) / w + 0.5)
    })
    .expect("valid grid");
    if kind == ScattererKind::SmoothDisc {
        field = gaussian_filter(&field, 0.04);
    }
    field
}

/// Gaussian filter of width `sigma` (km) through the DFT.
pub fn gaussian_filter(f: &GridField<f64>, sigma: f64) -> GridField<f64> {
    use crate::numeric::dft::{angular_frequencies, transform_axis, DftPlan};
    let shape = f.shape().to_vec();
    let mut data: Vec<C64> = f.values().iter().map(|&v| C64::new(v, 0.0)).collect();
    let plans: Vec<DftPlan> = shape.iter().map(|&n| DftPlan::new(n)).collect();
    for (ax, plan) in plans.iter().enumerate() {
        transform_axis(&mut data, &shape, ax, plan, false);
    }
    let tables: Vec<Vec<f64>> = shape
        .iter()
        .zip(f.spacing())
        .map(|(&n, &h)| angular_frequencies(n, h).into_iter().map(|x| x * x).collect())
        .collect();
    let ndim = shape.len();
    for (flat, v) in data.iter_mut().enumerate() {
        let mut rem = flat;
        let mut xi2 = 0.0;
        for ax in (0..ndim).rev() {
            let i = rem % shape[ax];
            rem /= shape[ax];
            xi2 += tables[ax][i];
        }
        *v *= (-0.5 * sigma * sigma * xi2).exp();
    }
    for (ax, plan) in plans.iter().enumerate() {
        transform_axis(&mut data, &shape, ax, plan, true);
    }
    let mut out = f.clone();
    for (o, v) in out.values_mut().iter_mut().zip(&data) {
        *o = v.re;
    }
    out
}

/// Adds complex white Gaussian noise scaled to an exact relative data-norm
/// level; identical seeds give identical noise.
pub fn add_noise(phi: &ScatterData, level: f64, seed: u64) -> ScatterData {
    if level == 0.0 {
        return phi.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = phi.clone();
    for v in noise.values.iter_mut() {
        // Box–Muller from uniform draws keeps the stream portable.
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let ang = 2.0 * std::f64::consts::PI * u2;
        *v = C64::new(r * ang.cos(), r * ang.sin()) / 2.0_f64.sqrt();
    }
    let phi_norm = phi.norm_b(0.0);
    let noise_norm = noise.norm_b(0.0);
    let scale = level * phi_norm / noise_norm.max(f64::MIN_POSITIVE);
    for v in noise.values.iter_mut() {
        *v *= scale;
    }
    let mut out = phi.clone();
    out.values += &noise.values;
    out
}

/// `J_b(η) = ½‖F(η) - φ_obs‖²_{H^b×L²}` from an existing forward state.
pub fn objective_from(data: &ScatterData, phi_obs: &ScatterData, b: f64) -> f64 {
    let mut residual = data.clone();
    residual.values -= &phi_obs.values;
    0.5 * residual.norm_b(b).powi(2)
}

/// Objective at a scatterer (runs one forward solve set).
pub fn objective(
    solver: &HelmholtzSolver,
    eta: &GridField<f64>,
    phi_obs: &ScatterData,
    pair: SobolevPair,
) -> Result<f64> {
    let data = solver.forward_map(eta)?;
    Ok(objective_from(&data, phi_obs, pair.b_data))
}

/// `(a,b)` Sobolev gradient from a factored state: receiver-axis
/// `(1+ξ²)^b` on the residual, adjoint solve, then `(I-Δ)^{-a}` on the
/// model grid. Returns `(J, 𝒢_ab)`.
pub fn gradient_from(
    solver: &HelmholtzSolver,
    state: &FactoredState,
    phi_obs: &ScatterData,
    pair: SobolevPair,
) -> Result<(f64, GridField<f64>)> {
    let (j, _, g) = gradient_with_dual(solver, state, phi_obs, pair)?;
    Ok((j, g))
}

/// As [`gradient_from`], additionally returning the unpreconditioned `L²`
/// gradient `g₀ = (I-Δ)^a 𝒢_ab`, which is the dual of `𝒢_ab` in the `H^a`
/// inner product (used by the L-BFGS bookkeeping).
pub fn gradient_with_dual(
    solver: &HelmholtzSolver,
    state: &FactoredState,
    phi_obs: &ScatterData,
    pair: SobolevPair,
) -> Result<(f64, GridField<f64>, GridField<f64>)> {
    let data = solver.forward_map_from(state)?;
    let mut residual = data;
    residual.values -= &phi_obs.values;
    let j = 0.5 * residual.norm_b(pair.b_data).powi(2);
    let weighted = residual.apply_receiver_multiplier(pair.b_data);
    let g0 = solver.adjoint_apply(state, &weighted)?;
    let g = apply_spectral_operator(&g0, -(pair.a_param as f64));
    Ok((j, g0, g))
}

/// Convenience wrapper: factorizes and evaluates `(J, 𝒢_ab)`.
pub fn gradient(
    solver: &HelmholtzSolver,
    eta: &GridField<f64>,
    phi_obs: &ScatterData,
    pair: SobolevPair,
) -> Result<(f64, GridField<f64>)> {
    let state = solver.factorize(eta)?;
    gradient_from(solver, &state, phi_obs, pair)
}

/// One inversion experiment.
#[derive(Debug, Clone)]
pub struct InversionConfig {
    pub setting: Setting,
    pub pair: SobolevPair,
    pub grid: GridChoice,
    /// True-scatterer amplitude.
    pub amplitude: f64,
    /// Relative data-norm noise level.
    pub noise_level: f64,
    pub seed: u64,
    pub iterations: usize,
    pub lbfgs_memory: usize,
    pub armijo_c: f64,
}

impl InversionConfig {
    pub fn new(setting: Setting, pair: SobolevPair) -> Self {
        Self {
            setting,
            pair,
            grid: GridChoice::Desk,
            amplitude: 0.1,
            noise_level: 0.0,
            seed: 7,
            iterations: 100,
            lbfgs_memory: 10,
            armijo_c: 1e-4,
        }
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub model_error: f64,
    pub grad_norm: f64,
}

/// Full experiment record.
#[derive(Debug, Clone)]
pub struct InversionTrace {
    pub rows: Vec<TraceRow>,
    pub final_model: GridField<f64>,
    pub true_model: GridField<f64>,
    pub observed_data: ScatterData,
    pub line_search_failed: bool,
}

impl InversionTrace {
    pub fn final_error(&self) -> f64 {
        self.rows.last().map(|r| r.model_error).unwrap_or(f64::NAN)
    }
}

fn relative_model_error(eta: &GridField<f64>, truth: &GridField<f64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in eta.values().iter().zip(truth.values()) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Limited-memory BFGS with Armijo backtracking on `J_b`, gradient from the
/// adjoint state; deterministic for a fixed seed.
pub fn run_inversion(cfg: &InversionConfig) -> Result<InversionTrace> {
    if cfg.iterations < 1 {
        return Err(Error::Domain("iteration count must be ≥ 1".into()));
    }
    if cfg.noise_level < 0.0 {
        return Err(Error::Domain("noise level must be ≥ 0".into()));
    }
    let setup = SolverSetup::transmission(cfg.grid)?;
    let solver = HelmholtzSolver::new(setup);
    let truth = make_scatterer(cfg.setting.scatterer(), &solver.setup, cfg.amplitude);
    let clean = solver.forward_map(&truth)?;
    let phi_obs = add_noise(&clean, cfg.noise_level, cfg.seed);

    let mut eta = solver.setup.zero_model();
    let init_state = solver.factorize(&eta)?;
    let (mut j_cur, mut dual_cur, mut grad_cur) =
        gradient_with_dual(&solver, &init_state, &phi_obs, cfg.pair)?;
    drop(init_state);

    // L-BFGS in the H^a geometry: primal vectors (model updates and the
    // Sobolev gradient 𝒢) carry their duals (images under (I-Δ)^a), so all
    // H^a inner products are plain dots and descent directions stay descent
    // directions for the true objective slope ⟨g₀, d⟩.
    let mut s_mem: Vec<(Vec<f64>, Vec<f64>)> = Vec::new(); // (s, Wa·s)
    let mut y_mem: Vec<(Vec<f64>, Vec<f64>)> = Vec::new(); // (y, Wa·y)
    let mut rows = Vec::with_capacity(cfg.iterations + 1);
    let mut line_search_failed = false;

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    for iter in 0..cfg.iterations {
        rows.push(TraceRow {
            iter,
            objective: j_cur,
            model_error: relative_model_error(&eta, &truth),
            grad_norm: sobolev_norm(&grad_cur, 0.0),
        });

        // Two-loop recursion for d = -H·𝒢 in the H^a inner product.
        let g: Vec<f64> = grad_cur.values().to_vec();
        let g_dual: Vec<f64> = dual_cur.values().to_vec();
        let mut q = g.clone();
        let mut q_dual = g_dual.clone();
        let mut alphas = Vec::with_capacity(s_mem.len());
        for ((s, _), (y, y_dual)) in s_mem.iter().zip(y_mem.iter()).rev() {
            let rho = 1.0 / dot(y_dual, s);
            let alpha = rho * dot(&q_dual, s);
            for ((qi, qd), (yi, yd)) in
                q.iter_mut().zip(q_dual.iter_mut()).zip(y.iter().zip(y_dual))
            {
                *qi -= alpha * yi;
                *qd -= alpha * yd;
            }
            alphas.push((alpha, rho));
        }
        if let (Some((s, _)), Some((y, y_dual))) = (s_mem.last(), y_mem.last()) {
            let gamma = dot(y_dual, s) / dot(y_dual, y);
            for (qi, qd) in q.iter_mut().zip(q_dual.iter_mut()) {
                *qi *= gamma;
                *qd *= gamma;
            }
        }
        for (((s, s_dual), (_, y_dual)), (alpha, rho)) in
            s_mem.iter().zip(y_mem.iter()).zip(alphas.into_iter().rev())
        {
            let beta = rho * dot(y_dual, &q);
            for ((qi, qd), (si, sd)) in
                q.iter_mut().zip(q_dual.iter_mut()).zip(s.iter().zip(s_dual))
            {
                *qi += (alpha - beta) * si;
                *qd += (alpha - beta) * sd;
            }
        }
        let direction: Vec<f64> = q.iter().map(|v| -v).collect();
        // True objective slope along d: ⟨g₀, d⟩ = ⟨𝒢, d⟩_{H^a} = -⟨𝒢, H𝒢⟩_{H^a} < 0.
        let slope = -dot(&g_dual, &q);
        let (direction, slope) = if slope < 0.0 {
            (direction, slope)
        } else {
            // Curvature pairs went bad numerically: steepest descent in H^a.
            let d: Vec<f64> = g.iter().map(|v| -v).collect();
            let s = -dot(&g_dual, &g);
            (d, s)
        };

        // Initial trial step: conservative on the first iteration, unit
        // after L-BFGS scaling kicks in.
        let mut alpha = if s_mem.is_empty() {
            let dmax = direction.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            (0.02 * cfg.amplitude.max(0.05) / dmax.max(f64::MIN_POSITIVE)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = eta.clone();
            for (t, d) in trial.values_mut().iter_mut().zip(&direction) {
                *t += alpha * d;
            }
            if trial.values().iter().any(|&v| 1.0 + v <= 0.0) {
                alpha *= 0.5;
                continue;
            }
            let trial_state = solver.factorize(&trial)?;
            let j_trial =
                objective_from(&solver.forward_map_from(&trial_state)?, &phi_obs, cfg.pair.b_data);
            if j_trial <= j_cur + cfg.armijo_c * alpha * slope {
                accepted = Some((trial, trial_state, j_trial));
                break;
            }
            alpha *= 0.5;
        }
        let Some((eta_new, state_new, j_new)) = accepted else {
            line_search_failed = true;
            break;
        };
        let (j_chk, dual_new, grad_new) =
            gradient_with_dual(&solver, &state_new, &phi_obs, cfg.pair)?;
        debug_assert!((j_chk - j_new).abs() <= 1e-9 * j_new.abs().max(1e-300));

        let s_vec: Vec<f64> = eta_new
            .values()
            .iter()
            .zip(eta.values())
            .map(|(a, b)| a - b)
            .collect();
        let y_vec: Vec<f64> = grad_new
            .values()
            .iter()
            .zip(grad_cur.values())
            .map(|(a, b)| a - b)
            .collect();
        let y_dual: Vec<f64> = dual_new
            .values()
            .iter()
            .zip(dual_cur.values())
            .map(|(a, b)| a - b)
            .collect();
        // Curvature ⟨y, s⟩_{H^a} = plain(y_dual, s); skip non-positive pairs.
        let sy = dot(&y_dual, &s_vec);
        let ss = dot(&s_vec, &s_vec).sqrt();
        let yyd = dot(&y_dual, &y_dual).sqrt();
        if sy > 1e-10 * ss * yyd {
            let s_field = GridField::new(
                s_vec.clone(),
                eta.shape().to_vec(),
                eta.spacing().to_vec(),
                eta.offset().to_vec(),
            )?;
            let s_dual = apply_spectral_operator(&s_field, cfg.pair.a_param as f64);
            s_mem.push((s_vec, s_dual.values().to_vec()));
            y_mem.push((y_vec, y_dual));
            if s_mem.len() > cfg.lbfgs_memory {
                s_mem.remove(0);
                y_mem.remove(0);
            }
        }
        eta = eta_new;
        j_cur = j_new;
        dual_cur = dual_new;
        grad_cur = grad_new;
        drop(state_new);
    }
    rows.push(TraceRow {
        iter: rows.len(),
        objective: j_cur,
        model_error: relative_model_error(&eta, &truth),
        grad_norm: sobolev_norm(&grad_cur, 0.0),
    });
    Ok(InversionTrace {
        rows,
        final_model: eta,
        true_model: truth,
        observed_data: phi_obs,
        line_search_failed,
    })
}
