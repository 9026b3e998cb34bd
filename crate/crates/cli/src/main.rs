//! Command-line entry point: bounds sweeps, series bound-check demos, and
//! inversion runs with reproducible outputs.
//!
//! Every command resolves its configuration (flags, then optional config
//! file overrides), computes, writes CSV/snapshot outputs plus a JSON run
//! manifest into `--out`, and exits with:
//!
//! * 0 — success,
//! * 2 — usage error,
//! * 3 — numeric failure,
//! * 4 — success but with precondition-violation flags in the outputs.

use anyhow::{anyhow, Context};
use born_sobolev::bounds::{self, LmaxPolicy, NormConvention, ReportOptions, ScatteringConfig, SweepAxis};
use born_sobolev::greens::{WaveKind, WaveParams};
use born_sobolev::helmholtz2d::GridChoice;
use born_sobolev::invert::{self, InversionConfig, Setting};
use born_sobolev::io::{fmt_g17, write_csv, write_field_f64, write_scatter_csv};
use born_sobolev::series::{
    self, DiscretizedScene, IncidentModel, RegularizationPolicy, INVERSE_SERIES_MAX_TERMS,
};
use born_sobolev::SobolevPair;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "born-sobolev", version, about = "Born scattering series under Sobolev norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the convergence/stability constants along one axis.
    Bounds(BoundsArgs),
    /// Forward/inverse series demo with numeric bound checks on a 1D scene.
    Series(SeriesArgs),
    /// Run one L-BFGS inversion experiment.
    Invert(InvertArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
struct BoundsArgs {
    /// Wave kind: helmholtz | diffuse.
    #[arg(long, default_value = "helmholtz")]
    kind: String,
    /// Sweep axis: ball | a | b.
    #[arg(long)]
    sweep: String,
    /// Range start:end[:step], inclusive.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    /// Parameter-space order 𝔞 (fixed unless sweeping a).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    aparam: i32,
    /// Data-space order 𝔟 (fixed unless sweeping b).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    bdata: f64,
    /// Wavenumber k.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Geometry `R=<outer>,cx=..,cy=..,cz=..,a=<ball radius>`.
    #[arg(long, default_value = "R=100,cx=98,cy=0,cz=0,a=1")]
    geometry: String,
    /// Fixed constant of the ‖𝒦₁‖ = Q/(μ+ν) parameterization.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Q·M product entering the stability constant.
    #[arg(long, default_value_t = 0.5)]
    qm: f64,
    /// Q₂ parameter of the approximation constants.
    #[arg(long, default_value_t = 0.5)]
    q2: f64,
    /// Initial spherical band limit (default 2·ceil(k·R)+16).
    #[arg(long)]
    lmax_init: Option<u32>,
    /// Boundary-norm measure convention: hybrid | physical | unit-sphere.
    #[arg(long, default_value = "hybrid")]
    norm_convention: String,
    /// Optional key=value config file overriding the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
struct SeriesArgs {
    /// Wave kind: helmholtz | diffuse.
    #[arg(long, default_value = "diffuse")]
    kind: String,
    /// Interior quadrature nodes.
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    /// Ball radius a.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Receiver offset (must exceed a).
    #[arg(long, default_value_t = 1.5)]
    boundary: f64,
    /// Wavenumber k.
    #[arg(long, default_value_t = 0.4)]
    k: f64,
    /// Number of sources.
    #[arg(long, default_value_t = 4)]
    sources: usize,
    /// Contrast as the target of μ̂·‖η‖ (the discrete forward-series radius
    /// is 1 in these units; the inverse-series hypotheses need roughly
    /// (μ̂+ν̂)·‖η‖ < 1).
    #[arg(long, default_value_t = 0.25)]
    contrast: f64,
    /// Inverse-series depth N (≤ 6).
    #[arg(long, default_value_t = 5)]
    n_terms: usize,
    /// Regularization: fixed λ; absent means the Q-target policy.
    #[arg(long)]
    lambda: Option<f64>,
    /// Target ‖𝒦₁‖ = q/(μ̂+ν̂) when no fixed λ is given.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Parameter-space order 𝔞.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    aparam: i32,
    /// Data-space order 𝔟.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    bdata: f64,
    /// Incident model: delta | synthetic.
    #[arg(long, default_value = "delta")]
    incident: String,
    /// Seed for the synthetic incident model.
    #[arg(long, default_value_t = 5)]
    seed: u64,
    /// Forward-series depth for the convergence table.
    #[arg(long, default_value_t = 30)]
    forward_terms: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
struct InvertArgs {
    /// Experiment setting: one (rough disc) | two (smoothed disc).
    #[arg(long)]
    setting: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    aparam: i32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    bdata: f64,
    /// Relative data-noise level.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Grid: desk | paper | <spacing in milli-km>.
    #[arg(long, default_value = "desk")]
    grid: String,
    /// True scatterer amplitude.
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone, Debug)]
struct RerunArgs {
    /// Manifest written by a previous run.
    #[arg(long)]
    manifest: PathBuf,
    /// Optional new output directory (defaults to the recorded one).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct RunManifest {
    command: String,
    config: serde_json::Value,
    seed: u64,
    version: String,
    outputs: Vec<String>,
    wall_ms: u64,
    threads: usize,
}

fn usage_bail(msg: &str) -> ! {
    eprintln!("usage error: {msg}");
    std::process::exit(2);
}

fn parse_kind(s: &str) -> WaveKind {
    match s {
        "helmholtz" => WaveKind::Helmholtz,
        "diffuse" => WaveKind::Diffuse,
        other => usage_bail(&format!("unknown wave kind '{other}'")),
    }
}

fn parse_range(s: &str) -> Vec<f64> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |t: &str| -> f64 {
        t.trim()
            .parse::<f64>()
            .unwrap_or_else(|_| usage_bail(&format!("bad range component '{t}'")))
    };
    let (start, end, step) = match parts.as_slice() {
        [a, b] => (parse(a), parse(b), 1.0),
        [a, b, c] => (parse(a), parse(b), parse(c)),
        _ => usage_bail(&format!("range '{s}' must be start:end[:step]")),
    };
    if step <= 0.0 || end < start {
        usage_bail(&format!("range '{s}' is empty or descending"));
    }
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + step * i as f64;
        if v > end + 1e-12 * step {
            break;
        }
        out.push(v);
        i += 1;
    }
    if out.is_empty() {
        usage_bail(&format!("range '{s}' is empty"));
    }
    out
}

fn parse_geometry(s: &str) -> (f64, [f64; 3], f64) {
    let mut outer = 100.0;
    let mut center = [98.0, 0.0, 0.0];
    let mut a = 1.0;
    for item in s.split(',') {
        let Some((key, value)) = item.split_once('=') else {
            usage_bail(&format!("geometry item '{item}' must be key=value"));
        };
        let v: f64 = value
            .trim()
            .parse()
            .unwrap_or_else(|_| usage_bail(&format!("bad geometry value '{value}'")));
        match key.trim() {
            "R" => outer = v,
            "cx" => center[0] = v,
            "cy" => center[1] = v,
            "cz" => center[2] = v,
            "a" => a = v,
            other => usage_bail(&format!("unknown geometry key '{other}'")),
        }
    }
    (outer, center, a)
}

fn parse_grid(s: &str) -> GridChoice {
    match s {
        "desk" => GridChoice::Desk,
        "paper" => GridChoice::Paper,
        other => match other.parse::<u64>() {
            Ok(m) => GridChoice::Custom { dx_milli: m },
            Err(_) => usage_bail(&format!("grid must be desk | paper | <milli-km>, got '{other}'")),
        },
    }
}

/// Applies `key=value` lines of a config file over the serialized args;
/// config entries take precedence over flags.
fn apply_config_overrides(value: &mut serde_json::Value, path: &Path) {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| usage_bail(&format!("cannot read config {}: {e}", path.display())));
    let obj = value.as_object_mut().expect("args serialize to an object");
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, raw)) = line.split_once('=') else {
            usage_bail(&format!("config line {} is not key=value", lineno + 1));
        };
        let key = key.trim().replace('-', "_");
        let raw = raw.trim();
        let Some(slot) = obj.get_mut(&key) else {
            usage_bail(&format!("config key '{key}' is not a known option"));
        };
        let parsed: serde_json::Value = match slot {
            serde_json::Value::String(_) => serde_json::Value::String(raw.to_string()),
            _ => serde_json::from_str(raw)
                .unwrap_or_else(|_| serde_json::Value::String(raw.to_string())),
        };
        *slot = parsed;
    }
}

fn resolved_args<T: Serialize + for<'d> Deserialize<'d>>(args: &T, config: &Option<PathBuf>) -> T {
    let mut v = serde_json::to_value(args).expect("args serialize");
    if let Some(path) = config {
        apply_config_overrides(&mut v, path);
    }
    serde_json::from_value(v).unwrap_or_else(|e| usage_bail(&format!("bad config override: {e}")))
}

fn write_manifest(
    out_dir: &Path,
    command: &str,
    config: serde_json::Value,
    seed: u64,
    outputs: &[String],
    started: Instant,
) -> anyhow::Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: outputs.to_vec(),
        wall_ms: started.elapsed().as_millis() as u64,
        threads: born_sobolev::thread_cap(),
    };
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn flag_string(flags: &[String]) -> String {
    if flags.is_empty() {
        "ok".to_string()
    } else {
        flags.join(";")
    }
}

fn cmd_bounds(args: BoundsArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let args = resolved_args(&args, &args.config.clone());
    let kind = parse_kind(&args.kind);
    let values = parse_range(&args.range);
    let axis = match args.sweep.as_str() {
        "ball" => SweepAxis::BallRadius,
        "a" => SweepAxis::AParam,
        "b" => SweepAxis::BData,
        other => usage_bail(&format!("sweep axis must be ball | a | b, got '{other}'")),
    };
    let (outer, center, ball) = parse_geometry(&args.geometry);
    let wave = WaveParams::new(kind, args.k, 3).map_err(|e| anyhow!("{e}"))?;
    let cfg = ScatteringConfig {
        wave,
        omega: None,
        c0: None,
        ball_radius: ball,
        ball_center: center,
        outer_radius: outer,
        sobolev: SobolevPair::new(args.aparam, args.bdata),
    };
    let convention = match args.norm_convention.as_str() {
        "hybrid" => NormConvention::Hybrid,
        "physical" => NormConvention::PhysicalArea,
        "unit-sphere" => NormConvention::UnitSphere,
        other => usage_bail(&format!("unknown norm convention '{other}'")),
    };
    let opts = ReportOptions {
        q: args.q,
        qm: args.qm,
        q2: args.q2,
        lmax: LmaxPolicy { initial: args.lmax_init, ..Default::default() },
        convention,
    };
    let rows = bounds::sweep(axis, &values, &cfg, &opts).map_err(|e| anyhow!("{e}"))?;
    std::fs::create_dir_all(&args.out)?;
    let meta = vec![
        format!("kind={}", args.kind),
        format!("sweep={}", args.sweep),
        format!("k={}", fmt_g17(args.k)),
        format!(
            "geometry R={} center=({},{},{}) a={}",
            outer, center[0], center[1], center[2], ball
        ),
        format!("aparam={} bdata={}", args.aparam, args.bdata),
        format!("q={} qm={} q2={}", args.q, args.qm, args.q2),
        format!(
            "lmax_init={}",
            args.lmax_init.map(|v| v.to_string()).unwrap_or_else(|| "auto".into())
        ),
        format!("norm_convention={}", convention.name()),
        "sample_policy=center+6poles+26shell+nearest".to_string(),
    ];
    let columns = [
        "axis_value",
        "kind",
        "a_param",
        "b_data",
        "mu",
        "nu",
        "r_classic",
        "r_geometric",
        "C",
        "C_star",
        "C_tilde",
        "C_ab",
        "valid_flags",
    ];
    let mut any_flag = false;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            any_flag |= !row.report.flags.is_empty();
            vec![
                fmt_g17(row.axis_value),
                row.kind.name().to_string(),
                row.a_param.to_string(),
                fmt_g17(row.b_data),
                fmt_g17(row.report.mu),
                fmt_g17(row.report.nu),
                fmt_g17(row.report.r_classic),
                fmt_g17(row.report.r_geometric),
                fmt_g17(row.report.c),
                fmt_g17(row.report.c_star),
                fmt_g17(row.report.c_tilde),
                fmt_g17(row.report.c_ab),
                flag_string(&row.report.flags),
            ]
        })
        .collect();
    let csv_name = format!("bounds_{}_{}.csv", args.kind, args.sweep);
    write_csv(&args.out.join(&csv_name), &meta, &columns, &csv_rows)?;
    write_manifest(&args.out, "bounds", serde_json::to_value(&args)?, 0, &[csv_name], started)?;
    Ok(if any_flag { 4 } else { 0 })
}

fn cmd_series(args: SeriesArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let args = resolved_args(&args, &args.config.clone());
    if args.n_terms > INVERSE_SERIES_MAX_TERMS {
        usage_bail(&format!(
            "n-terms {} exceeds the inverse-series ceiling {INVERSE_SERIES_MAX_TERMS}",
            args.n_terms
        ));
    }
    let kind = parse_kind(&args.kind);
    let incident = match args.incident.as_str() {
        "delta" => IncidentModel::DeltaSources,
        "synthetic" => IncidentModel::Synthetic { seed: args.seed },
        other => usage_bail(&format!("incident must be delta | synthetic, got '{other}'")),
    };
    let wave = WaveParams::new(kind, args.k, 1).map_err(|e| anyhow!("{e}"))?;
    let scene =
        DiscretizedScene::line(wave, args.nodes, args.a, args.boundary, args.sources, incident)
            .map_err(|e| anyhow!("{e}"))?;
    let pair = SobolevPair::new(args.aparam, args.bdata);
    let consts = series::discrete_constants(&scene, pair).map_err(|e| anyhow!("{e}"))?;
    let bump = series::bump_eta(&scene);
    let bump_norm = scene.model_norm(&bump, pair.a_param as f64);
    let scale = args.contrast / (consts.mu_hat * bump_norm);
    let eta: Vec<born_sobolev::C64> = bump.iter().map(|v| v * scale).collect();

    std::fs::create_dir_all(&args.out)?;
    let mut outputs = Vec::new();

    // Forward-series convergence table against the direct solve.
    let (direct, cond) = series::solve_direct(&scene, &eta).map_err(|e| anyhow!("{e}"))?;
    let d_norm = direct.norm_b(pair.b_data);
    let mut fwd_rows = Vec::new();
    let mut diverged = false;
    for n in 1..=args.forward_terms {
        let born = series::forward_born(&scene, &eta, n).map_err(|e| anyhow!("{e}"))?;
        let mut diff = born.values.clone();
        diff -= &direct.values;
        let partial_norm = born.norm_b(pair.b_data);
        let residual =
            series::ScatterData { values: diff, ..direct.clone() }.norm_b(pair.b_data) / d_norm;
        diverged |= n >= args.forward_terms && residual > 1.0;
        fwd_rows.push(vec![n.to_string(), fmt_g17(partial_norm), fmt_g17(residual)]);
    }
    let fwd_meta = vec![
        format!("kind={} nodes={} a={} boundary={}", args.kind, args.nodes, args.a, args.boundary),
        format!("k={} sources={} incident={}", args.k, args.sources, args.incident),
        format!("mu_hat={} nu_hat={}", fmt_g17(consts.mu_hat), fmt_g17(consts.nu_hat)),
        format!("contrast(mu_hat*eta_norm)={}", fmt_g17(args.contrast)),
        format!("direct_solve_condition={}", fmt_g17(cond)),
        format!("forward_diverged={diverged}"),
    ];
    write_csv(
        &args.out.join("forward_series.csv"),
        &fwd_meta,
        &["n_terms", "partial_norm", "relative_residual"],
        &fwd_rows,
    )?;
    outputs.push("forward_series.csv".to_string());

    // Inverse-series bound checks; flagged not-applicable outside the radius.
    let policy = match args.lambda {
        Some(l) => RegularizationPolicy::Fixed(l),
        None => RegularizationPolicy::TargetNorm { q: args.q },
    };
    let inverse_applicable = args.contrast < 1.0 && !diverged;
    let mut check_rows = Vec::new();
    let mut report_meta = vec![format!("inverse_applicable={inverse_applicable}")];
    if inverse_applicable {
        match series::check_inverse_bounds(&scene, &eta, policy, args.n_terms, pair) {
            Ok(report) => {
                report_meta = vec![
                    "inverse_applicable=true".to_string(),
                    format!("lambda={}", fmt_g17(report.lambda)),
                    format!("k1_norm={}", fmt_g17(report.k1_norm)),
                    format!("k1_inv_norm={}", fmt_g17(report.k1_inv_norm)),
                    format!("rho={}", fmt_g17(report.rho)),
                    format!("preconditions_hold={}", report.preconditions_hold),
                    format!(
                        "recovery_errors={}",
                        report
                            .recovery_errors
                            .iter()
                            .map(|v| fmt_g17(*v))
                            .collect::<Vec<_>>()
                            .join(";")
                    ),
                ];
                for c in &report.checks {
                    check_rows.push(vec![
                        c.name.clone(),
                        fmt_g17(c.measured),
                        fmt_g17(c.bound),
                        if c.holds { "pass".into() } else { "fail".into() },
                    ]);
                }
            }
            Err(e) => {
                report_meta = vec![format!("inverse_applicable=false reason={e}")];
            }
        }
    }
    write_csv(
        &args.out.join("inverse_bounds.csv"),
        &report_meta,
        &["check", "measured", "bound", "status"],
        &check_rows,
    )?;
    outputs.push("inverse_bounds.csv".to_string());

    write_manifest(&args.out, "series", serde_json::to_value(&args)?, args.seed, &outputs, started)?;
    Ok(0)
}

fn cmd_invert(args: InvertArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let args = resolved_args(&args, &args.config.clone());
    let setting = match args.setting.as_str() {
        "one" => Setting::One,
        "two" => Setting::Two,
        other => usage_bail(&format!("setting must be one | two, got '{other}'")),
    };
    let cfg = InversionConfig {
        setting,
        pair: SobolevPair::new(args.aparam, args.bdata),
        grid: parse_grid(&args.grid),
        amplitude: args.amplitude,
        noise_level: args.noise,
        seed: args.seed,
        iterations: args.iters,
        lbfgs_memory: 10,
        armijo_c: 1e-4,
    };
    std::fs::create_dir_all(&args.out)?;
    let trace = invert::run_inversion(&cfg).map_err(|e| anyhow!("{e}"))?;
    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| {
            vec![
                r.iter.to_string(),
                fmt_g17(r.objective),
                fmt_g17(r.model_error),
                fmt_g17(r.grad_norm),
            ]
        })
        .collect();
    let meta = vec![
        format!("setting={} aparam={} bdata={}", args.setting, args.aparam, args.bdata),
        format!("noise={} seed={} iters={}", fmt_g17(args.noise), args.seed, args.iters),
        format!("grid={} amplitude={}", args.grid, fmt_g17(args.amplitude)),
        format!("line_search_failed={}", trace.line_search_failed),
    ];
    write_csv(
        &args.out.join("trace.csv"),
        &meta,
        &["iter", "objective", "model_error", "grad_norm"],
        &rows,
    )?;
    let mut snap_meta = BTreeMap::new();
    snap_meta.insert("role".to_string(), "final_model".to_string());
    write_field_f64(&args.out.join("final_model.bsgf"), &trace.final_model, snap_meta.clone())
        .map_err(|e| anyhow!("{e}"))?;
    snap_meta.insert("role".to_string(), "true_model".to_string());
    write_field_f64(&args.out.join("true_model.bsgf"), &trace.true_model, snap_meta)
        .map_err(|e| anyhow!("{e}"))?;
    write_scatter_csv(
        &args.out.join("observed_data.csv"),
        &trace.observed_data,
        &[format!("setting={} noise={} seed={}", args.setting, fmt_g17(args.noise), args.seed)],
    )
    .map_err(|e| anyhow!("{e}"))?;
    let outputs = vec![
        "trace.csv".into(),
        "observed_data.csv".into(),
        "final_model.bsgf".into(),
        "true_model.bsgf".into(),
    ];
    write_manifest(&args.out, "invert", serde_json::to_value(&args)?, args.seed, &outputs, started)?;
    if trace.line_search_failed {
        eprintln!("line search failed; partial trace written");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_rerun(args: RerunArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.manifest)
        .with_context(|| format!("cannot read manifest {}", args.manifest.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).context("bad manifest")?;
    let mut config = manifest.config;
    if let Some(out) = &args.out {
        config["out"] = serde_json::Value::String(out.display().to_string());
    }
    match manifest.command.as_str() {
        "bounds" => cmd_bounds(serde_json::from_value(config).context("bad bounds config")?),
        "series" => cmd_series(serde_json::from_value(config).context("bad series config")?),
        "invert" => cmd_invert(serde_json::from_value(config).context("bad invert config")?),
        other => usage_bail(&format!("manifest command '{other}' is unknown")),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Series(args) => cmd_series(args),
        Command::Invert(args) => cmd_invert(args),
        Command::Rerun(args) => cmd_rerun(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(3);
        }
    }
}
