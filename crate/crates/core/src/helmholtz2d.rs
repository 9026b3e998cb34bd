//! 2D frequency-domain Helmholtz solver on `Ω = [0,1]²` with complex
//! coordinate-stretched absorbing layers, exposing the forward map `F`, the
//! Born/Jacobian action `K₁`, and its adjoint `K₁*` for inversion.
//!
//! The five-point system is assembled in the symmetrized form
//! `∂_x((s_z/s_x)∂_x u) + ∂_z((s_x/s_z)∂_z u) + k² s_x s_z (1+η) u = -s_x s_z S`,
//! which is complex symmetric, so one banded LU factorization serves the
//! forward solves and (by conjugation) the adjoint solves of every source.

use crate::grid::GridField;
use crate::numeric::linalg::{BandedLu, SymBandedLdl};
use crate::numeric::par::par_map;
use crate::series::{ReceiverAxis, ScatterData};
use crate::{C64, Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

/// Discretization choice for the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    /// dx = 0.02 (51×51 physical nodes): the desk-scale default.
    Desk,
    /// dx = 0.005 (201×201): the full-resolution study grid; much slower
    /// and memory-hungry, kept behind this explicit choice.
    Paper,
    /// Spacing in milli-km; must divide 1000.
    Custom { dx_milli: u64 },
}

impl GridChoice {
    pub fn dx_milli(&self) -> u64 {
        match self {
            GridChoice::Desk => 20,
            GridChoice::Paper => 5,
            GridChoice::Custom { dx_milli } => *dx_milli,
        }
    }
}

/// Geometry and numeric parameters of one solver instance.
#[derive(Debug, Clone)]
pub struct SolverSetup {
    /// Physical nodes per axis (including the physical-region edges).
    pub n: usize,
    pub dx: f64,
    pub omega: f64,
    pub c0: f64,
    pub k: f64,
    pub pml_width: usize,
    pub sigma_max: f64,
    /// Source nodes, physical-region indices `(iz, ix)`.
    pub sources: Vec<(usize, usize)>,
    /// Receiver nodes, physical-region indices `(iz, ix)`.
    pub receivers: Vec<(usize, usize)>,
    /// Physical spacing of the receiver line (H^b axis spacing).
    pub recv_spacing: f64,
    /// Nominal source spacing (L² source-axis weight).
    pub src_spacing: f64,
}

/// Round-half-up snap of a milli-km coordinate onto the grid.
fn snap(milli: u64, dx_milli: u64) -> usize {
    ((milli + dx_milli / 2) / dx_milli) as usize
}

impl SolverSetup {
    /// The single-frequency transmission geometry of the inversion studies:
    /// `ω = 21`, `c0 = 2.5` (so `k = 8.4`), sources on the z = 0.1 line at
    /// 0.05 spacing, receivers on the z = 0.95 line every second grid node.
    /// Off-grid coordinates snap to the nearest node.
    pub fn transmission(grid: GridChoice) -> Result<Self> {
        let dx_milli = grid.dx_milli();
        if dx_milli == 0 || 1000 % dx_milli != 0 {
            return Err(Error::Domain(format!("dx = {dx_milli} milli-km must divide 1000")));
        }
        let n = (1000 / dx_milli) as usize + 1;
        let dx = dx_milli as f64 / 1000.0;
        let omega = 21.0;
        let c0 = 2.5;
        let k = omega / c0;
        if k * dx >= 0.5 {
            return Err(Error::Domain(format!(
                "k·dx = {} ≥ 0.5: not enough points per wavelength",
                k * dx
            )));
        }
        let iz_src = snap(100, dx_milli);
        let sources: Vec<(usize, usize)> =
            (0..=20).map(|i| (iz_src, snap(i * 50, dx_milli))).collect();
        let iz_rcv = snap(950, dx_milli);
        let receivers: Vec<(usize, usize)> = (0..n).step_by(2).map(|ix| (iz_rcv, ix)).collect();
        Ok(Self {
            n,
            dx,
            omega,
            c0,
            k,
            pml_width: 20,
            // Quadratic profile sized for ~1e-4 round-trip amplitude.
            sigma_max: 3.0 * (1e4_f64).ln() / (2.0 * 20.0 * dx),
            sources,
            receivers,
            recv_spacing: 2.0 * dx,
            src_spacing: 0.05,
        })
    }

    pub fn n_total(&self) -> usize {
        self.n + 2 * self.pml_width
    }

    /// Zero scatterer on this setup's physical grid.
    pub fn zero_model(&self) -> GridField<f64> {
        GridField::zeros(&[self.n, self.n], &[self.dx, self.dx], &[0.0, 0.0]).expect("valid")
    }

    fn validate_model(&self, eta: &GridField<f64>) -> Result<()> {
        if eta.shape() != [self.n, self.n] {
            return Err(Error::Shape(format!(
                "scatterer shape {:?} does not match the {}×{} physical grid",
                eta.shape(),
                self.n,
                self.n
            )));
        }
        if eta.values().iter().any(|&v| 1.0 + v <= 0.0) {
            return Err(Error::Domain("1 + η must stay positive".into()));
        }
        Ok(())
    }
}

/// Complex fields per source, with the incident set, on the full
/// (physical + absorber) grid.
#[derive(Debug, Clone)]
pub struct WaveFieldSet {
    pub n_total: usize,
    pub fields: Vec<Vec<C64>>,
    pub incident: Vec<Vec<C64>>,
}

impl WaveFieldSet {
    /// Scattered part `u - u_i` of one source's field.
    pub fn scattered(&self, s: usize) -> Vec<C64> {
        self.fields[s]
            .iter()
            .zip(&self.incident[s])
            .map(|(u, ui)| u - ui)
            .collect()
    }
}

/// Counters proving factorization reuse.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub factorizations: u64,
    pub back_substitutions: u64,
}

/// Either factorization of the complex-symmetric system: the cheap LDLᵀ is
/// the fast path, the pivoted LU the verified fallback.
enum Factorization {
    Sym(SymBandedLdl),
    Pivoted(BandedLu),
}

impl Factorization {
    fn solve(&self, b: &mut [C64]) {
        match self {
            Factorization::Sym(f) => f.solve(b),
            Factorization::Pivoted(f) => f.solve(b),
        }
    }

    fn solve_adjoint_symmetric(&self, b: &mut [C64]) {
        match self {
            Factorization::Sym(f) => f.solve_adjoint_symmetric(b),
            Factorization::Pivoted(f) => f.solve_adjoint_symmetric(b),
        }
    }
}

/// Factorization of `A(η)` together with the per-source total fields and
/// receiver data; reused by the Jacobian and adjoint.
pub struct FactoredState {
    lu: Factorization,
    /// Total-grid field per source.
    pub fields: Vec<Vec<C64>>,
    /// Receiver samples of the total field per source.
    pub recv_samples: Vec<Vec<C64>>,
}

/// Frequency-domain Helmholtz solver with cached incident state.
pub struct HelmholtzSolver {
    pub setup: SolverSetup,
    stretch_int: Vec<C64>,
    stretch_half: Vec<C64>,
    incident: OnceLock<FactoredState>,
    factor_count: AtomicU64,
    backsub_count: AtomicU64,
}

impl HelmholtzSolver {
    pub fn new(setup: SolverSetup) -> Self {
        let n_tot = setup.n_total();
        let w = setup.pml_width as f64;
        let depth = |t: f64| -> f64 {
            let left = setup.pml_width as f64 - t;
            let right = t - (n_tot as f64 - 1.0 - setup.pml_width as f64);
            left.max(right).max(0.0)
        };
        let stretch = |t: f64| -> C64 {
            let zeta = depth(t) / w;
            C64::new(1.0, setup.sigma_max * zeta * zeta / setup.k)
        };
        let stretch_int: Vec<C64> = (0..n_tot).map(|t| stretch(t as f64)).collect();
        let stretch_half: Vec<C64> = (0..n_tot).map(|t| stretch(t as f64 + 0.5)).collect();
        Self {
            setup,
            stretch_int,
            stretch_half,
            incident: OnceLock::new(),
            factor_count: AtomicU64::new(0),
            backsub_count: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> SolveStats {
        SolveStats {
            factorizations: self.factor_count.load(Ordering::Relaxed),
            back_substitutions: self.backsub_count.load(Ordering::Relaxed),
        }
    }

    fn total_index(&self, iz: usize, ix: usize) -> usize {
        let n_tot = self.setup.n_total();
        (iz + self.setup.pml_width) * n_tot + (ix + self.setup.pml_width)
    }

    /// Assembles and factorizes `A(η)`, then back-substitutes all sources.
    pub fn factorize(&self, eta: &GridField<f64>) -> Result<FactoredState> {
        self.setup.validate_model(eta)?;
        let n_tot = self.setup.n_total();
        let n_sys = n_tot * n_tot;
        let dx2 = self.setup.dx * self.setup.dx;
        let k2 = self.setup.k * self.setup.k;
        let w = self.setup.pml_width;
        let n_phys = self.setup.n;
        let sz = &self.stretch_int;
        let sx = &self.stretch_int;
        let szh = &self.stretch_half;
        let sxh = &self.stretch_half;
        let eta_at = |iz_t: usize, ix_t: usize| -> f64 {
            if iz_t >= w && iz_t < w + n_phys && ix_t >= w && ix_t < w + n_phys {
                eta.values()[(iz_t - w) * n_phys + (ix_t - w)]
            } else {
                0.0
            }
        };
        let entry = |row: usize, col: usize| -> C64 {
            let (iz, ix) = (row / n_tot, row % n_tot);
            let (jz, jx) = (col / n_tot, col % n_tot);
            if iz == jz && ix == jx {
                let cxp = sz[iz] / sxh[ix];
                let cxm = if ix > 0 { sz[iz] / sxh[ix - 1] } else { sz[iz] / sxh[ix] };
                let czp = sx[ix] / szh[iz];
                let czm = if iz > 0 { sx[ix] / szh[iz - 1] } else { sx[ix] / szh[iz] };
                -(cxp + cxm + czp + czm) / dx2 + k2 * (1.0 + eta_at(iz, ix)) * sz[iz] * sx[ix]
            } else if iz == jz && jx == ix + 1 {
                sz[iz] / sxh[ix] / dx2
            } else if iz == jz && ix == jx + 1 {
                sz[iz] / sxh[jx] / dx2
            } else if ix == jx && jz == iz + 1 {
                sx[ix] / szh[iz] / dx2
            } else if ix == jx && iz == jz + 1 {
                sx[ix] / szh[jz] / dx2
            } else {
                C64::new(0.0, 0.0)
            }
        };
        // Fast path: unpivoted complex-symmetric LDLᵀ, verified by a
        // residual check on a probe solve; pivoted LU as fallback.
        let lu = match SymBandedLdl::factor(n_sys, n_tot, &entry) {
            Ok(f) => {
                let mut probe = vec![C64::new(0.0, 0.0); n_sys];
                let at = self.total_index(self.setup.sources[0].0, self.setup.sources[0].1);
                probe[at] = C64::new(-1.0 / dx2, 0.0);
                let mut x = probe.clone();
                f.solve(&mut x);
                let rel = residual_norm(&entry, n_tot, &x, &probe);
                if rel < 1e-9 {
                    Factorization::Sym(f)
                } else {
                    Factorization::Pivoted(BandedLu::factor(n_sys, n_tot, n_tot, &entry)?)
                }
            }
            Err(_) => Factorization::Pivoted(
                BandedLu::factor(n_sys, n_tot, n_tot, &entry).map_err(|e| match e {
                    Error::Singular { cond, .. } => Error::Singular {
                        what: "Helmholtz system (near-resonant medium?)".into(),
                        cond,
                    },
                    other => other,
                })?,
            ),
        };
        self.factor_count.fetch_add(1, Ordering::Relaxed);

        let sources = self.setup.sources.clone();
        let fields: Vec<Vec<C64>> = par_map(sources.len(), crate::thread_cap(), |s| {
            let (iz, ix) = sources[s];
            let mut rhs = vec![C64::new(0.0, 0.0); n_sys];
            // Delta source scaled by the cell area; s_x s_z = 1 in the
            // physical region.
            rhs[self.total_index(iz, ix)] = C64::new(-1.0 / dx2, 0.0);
            lu.solve(&mut rhs);
            rhs
        });
        self.backsub_count.fetch_add(sources.len() as u64, Ordering::Relaxed);
        let recv_samples: Vec<Vec<C64>> = fields
            .iter()
            .map(|f| {
                self.setup
                    .receivers
                    .iter()
                    .map(|&(iz, ix)| f[self.total_index(iz, ix)])
                    .collect()
            })
            .collect();
        Ok(FactoredState { lu, fields, recv_samples })
    }

    fn incident_state(&self) -> Result<&FactoredState> {
        if self.incident.get().is_none() {
            let state = self.factorize(&self.setup.zero_model())?;
            let _ = self.incident.set(state);
        }
        Ok(self.incident.get().expect("just set"))
    }

    /// Total and incident fields for a scatterer (`η = 0` reproduces the
    /// incident set exactly: same discrete operator).
    pub fn solve(&self, eta: &GridField<f64>) -> Result<WaveFieldSet> {
        let inc = self.incident_state()?;
        let incident = inc.fields.clone();
        let state = self.factorize(eta)?;
        Ok(WaveFieldSet { n_total: self.setup.n_total(), fields: state.fields, incident })
    }

    pub fn empty_data(&self) -> ScatterData {
        ScatterData {
            values: ndarray::Array2::from_elem(
                (self.setup.receivers.len(), self.setup.sources.len()),
                C64::new(0.0, 0.0),
            ),
            recv_axis: ReceiverAxis::Grid { spacing: self.setup.recv_spacing },
            recv_weight: self.setup.recv_spacing,
            src_weight: self.setup.src_spacing,
        }
    }

    fn data_from_states(&self, total: &FactoredState, incident: &FactoredState) -> ScatterData {
        let mut out = self.empty_data();
        for s in 0..self.setup.sources.len() {
            for r in 0..self.setup.receivers.len() {
                out.values[[r, s]] = total.recv_samples[s][r] - incident.recv_samples[s][r];
            }
        }
        out
    }

    /// Scattering data `φ = u - u_i` sampled at receivers.
    pub fn forward_map(&self, eta: &GridField<f64>) -> Result<ScatterData> {
        let state = self.factorize(eta)?;
        self.forward_map_from(&state)
    }

    /// Scattering data from an existing factorization.
    pub fn forward_map_from(&self, state: &FactoredState) -> Result<ScatterData> {
        let inc = self.incident_state()?;
        Ok(self.data_from_states(state, inc))
    }

    /// Born/Jacobian action: first-order data perturbation from `δη` around
    /// the factored background state.
    pub fn jacobian_apply(&self, state: &FactoredState, delta_eta: &GridField<f64>) -> Result<ScatterData> {
        self.setup.validate_model_shape_only(delta_eta)?;
        let n_tot = self.setup.n_total();
        let n_sys = n_tot * n_tot;
        let k2 = self.setup.k * self.setup.k;
        let w = self.setup.pml_width;
        let n_phys = self.setup.n;
        let n_src = self.setup.sources.len();
        let columns: Vec<Vec<C64>> = par_map(n_src, crate::thread_cap(), |s| {
            let mut rhs = vec![C64::new(0.0, 0.0); n_sys];
            for iz in 0..n_phys {
                for ix in 0..n_phys {
                    let d = delta_eta.values()[iz * n_phys + ix];
                    if d != 0.0 {
                        let at = (iz + w) * n_tot + (ix + w);
                        rhs[at] = -k2 * d * state.fields[s][at];
                    }
                }
            }
            state.lu.solve(&mut rhs);
            self.setup
                .receivers
                .iter()
                .map(|&(iz, ix)| rhs[self.total_index(iz, ix)])
                .collect()
        });
        self.backsub_count.fetch_add(n_src as u64, Ordering::Relaxed);
        let mut out = self.empty_data();
        for (s, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                out.values[[r, s]] = *v;
            }
        }
        Ok(out)
    }

    /// Adjoint action `K₁* d`: injects the measure-weighted residual at the
    /// receivers, solves the conjugate system (one conjugated back
    /// substitution per source thanks to complex symmetry), and reduces with
    /// `Re[-k̄² ū · z]`, returning the `L²(dx²)` gradient-side field.
    pub fn adjoint_apply(&self, state: &FactoredState, residual: &ScatterData) -> Result<GridField<f64>> {
        if residual.n_receivers() != self.setup.receivers.len()
            || residual.n_sources() != self.setup.sources.len()
        {
            return Err(Error::Shape("residual shape does not match the acquisition".into()));
        }
        let n_tot = self.setup.n_total();
        let n_sys = n_tot * n_tot;
        let k2 = self.setup.k * self.setup.k;
        let w = self.setup.pml_width;
        let n_phys = self.setup.n;
        let dx2 = self.setup.dx * self.setup.dx;
        let wr = residual.recv_weight;
        let ws = residual.src_weight;
        let n_src = self.setup.sources.len();
        let partials: Vec<Vec<f64>> = par_map(n_src, crate::thread_cap(), |s| {
            let mut inj = vec![C64::new(0.0, 0.0); n_sys];
            for (r, &(iz, ix)) in self.setup.receivers.iter().enumerate() {
                inj[self.total_index(iz, ix)] += wr * ws * residual.values[[r, s]];
            }
            state.lu.solve_adjoint_symmetric(&mut inj);
            let mut g = vec![0.0; n_phys * n_phys];
            for iz in 0..n_phys {
                for ix in 0..n_phys {
                    let at = (iz + w) * n_tot + (ix + w);
                    let v = -k2 * (state.fields[s][at]).conj() * inj[at];
                    g[iz * n_phys + ix] = v.re / dx2;
                }
            }
            g
        });
        self.backsub_count.fetch_add(n_src as u64, Ordering::Relaxed);
        let mut total = vec![0.0; n_phys * n_phys];
        for p in partials {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        GridField::new(total, vec![n_phys, n_phys], vec![self.setup.dx, self.setup.dx], vec![0.0, 0.0])
    }
}

impl SolverSetup {
    fn validate_model_shape_only(&self, eta: &GridField<f64>) -> Result<()> {
        if eta.shape() != [self.n, self.n] {
            return Err(Error::Shape("perturbation shape does not match the grid".into()));
        }
        Ok(())
    }
}


/// Relative residual `‖Ax - b‖/‖b‖` of a banded system given its entry
/// function (five-point band: offsets ±1 and ±n_tot).
fn residual_norm(
    entry: &impl Fn(usize, usize) -> C64,
    n_tot: usize,
    x: &[C64],
    b: &[C64],
) -> f64 {
    let n_sys = x.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for row in 0..n_sys {
        let mut acc = entry(row, row) * x[row];
        if row >= 1 && row % n_tot != 0 {
            acc += entry(row, row - 1) * x[row - 1];
        }
        if row + 1 < n_sys && (row + 1) % n_tot != 0 {
            acc += entry(row, row + 1) * x[row + 1];
        }
        if row >= n_tot {
            acc += entry(row, row - n_tot) * x[row - n_tot];
        }
        if row + n_tot < n_sys {
            acc += entry(row, row + n_tot) * x[row + n_tot];
        }
        num += (acc - b[row]).norm_sqr();
        den += b[row].norm_sqr();
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}
