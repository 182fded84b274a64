use std::fs;

use chanent::asymptotics::{
    conjecture_sweep, fig1_experiment, free_moment_check, output_spectrum, CONJECTURE_EXPERIMENT, FIG1_EXPERIMENT,
};
use chanent::channels::{sample_schmidt, Channel, SchmidtKind};
use chanent::entropy::{lemma1_gap, OptimizerConfig};
use chanent::io::{channel_to_json, parse_channel_spec, ChannelSpec};
use chanent::qubit_unital::{
    maximize_f, verify_concavity, verify_symmetry, verify_theorem2, PGrid, UnitalQubit, DEFAULT_GRID_POINTS,
    DEFAULT_H_STEP, TOL_CONCAVE, TOL_SYMMETRY,
};
use chanent::rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{exit, CliError, CliResult};
use crate::output::{emit, json_bytes, num, Meta, Table, Tolerances};
use crate::{ChannelArgs, Cli, Command};

const OPTIMIZER_TOLS: &[(&str, f64)] = &[("tol_improve", 1e-10), ("min_step", 1e-5), ("initial_step", 0.5)];

fn optimizer_config(cli: &Cli, restarts: usize, tols: &Tolerances) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        seed: cli.seed,
        tol_improve: tols.get("tol_improve"),
        min_step: tols.get("min_step"),
        initial_step: tols.get("initial_step"),
        ..OptimizerConfig::default()
    }
}

fn load_channel(args: &ChannelArgs, seed: u64) -> CliResult<(Channel, ChannelSpec)> {
    let spec = if let Some(src) = &args.source.channel {
        let text = if src.trim_start().starts_with('{') {
            src.clone()
        } else {
            fs::read_to_string(src).map_err(|e| CliError::input(format!("cannot read {src}: {e}")))?
        };
        parse_channel_spec(&text)?
    } else {
        let name = args.source.named.as_deref().unwrap_or_default();
        let params: Map<String, Value> = match &args.params {
            Some(p) => serde_json::from_str(p).map_err(|e| CliError::input(format!("--params: {e}")))?,
            None => Map::new(),
        };
        ChannelSpec::named(name, params, seed)
    };
    let phi = spec.build()?;
    Ok((phi, spec))
}

fn check_dims(d_list: &[usize], what: &str) -> CliResult<()> {
    if d_list.is_empty() || d_list.iter().any(|&d| d < 2) {
        return Err(CliError::input(format!("{what} needs dimensions >= 2")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Entropy { channel, restarts } => entropy(cli, channel, *restarts),
        Command::VerifyUnital { channel, restarts } => verify_unital(cli, channel, *restarts),
        Command::Fig1 {
            d_list,
            trials,
            nu,
            per_trial,
        } => fig1(cli, d_list, *trials, nu, *per_trial),
        Command::Conjecture { d_list, k, trials } => conjecture(cli, d_list, *k, *trials),
        Command::Spectrum { channel, nu } => spectrum(cli, channel, *nu),
        Command::FreeMoments { d, k, nu, trials } => free_moments(cli, *d, *k, *nu, *trials),
        Command::RandomChannel { d, k } => random_channel(cli, *d, *k),
    }
}

#[derive(Serialize)]
struct EntropyOutput {
    meta: Meta,
    channel: ChannelSpec,
    dim_in: usize,
    dim_out: usize,
    h_map: f64,
    h_channel: f64,
    gap: f64,
    converged: bool,
    optimizer: chanent::entropy::OptimizerDiagnostics,
}

fn entropy(cli: &Cli, args: &ChannelArgs, restarts: usize) -> CliResult<i32> {
    let tols = Tolerances::new(OPTIMIZER_TOLS, cli.tol.as_deref())?;
    let (phi, spec) = load_channel(args, cli.seed)?;
    let report = lemma1_gap(&phi, &optimizer_config(cli, restarts, &tols))?;
    let mut meta = Meta::new("entropy", cli.seed, cli.log_base, tols);
    meta.set("restarts", restarts);
    let b = cli.log_base;
    let out = EntropyOutput {
        meta,
        channel: spec,
        dim_in: phi.dim_in(),
        dim_out: phi.dim_out(),
        h_map: b.convert(report.h_map),
        h_channel: b.convert(report.h_channel),
        gap: b.convert(report.gap),
        converged: report.optimizer.converged,
        optimizer: report.optimizer,
    };
    emit(cli.out.as_ref(), &json_bytes(&out)?)?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    fn at_most(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }
}

#[derive(Serialize)]
struct UnitalOutput {
    meta: Meta,
    channel: ChannelSpec,
    p_star: f64,
    h_channel: f64,
    h_channel_from_p: f64,
    h_map_minus_log2: f64,
    checks: Vec<Check>,
    pass: bool,
}

fn verify_unital(cli: &Cli, args: &ChannelArgs, restarts: usize) -> CliResult<i32> {
    let mut defaults = OPTIMIZER_TOLS.to_vec();
    defaults.extend([
        ("symmetry", TOL_SYMMETRY),
        ("concavity", TOL_CONCAVE),
        ("saturation", 1e-4),
        ("saturation_golden", 1e-8),
        ("p_star", 1e-6),
    ]);
    let tols = Tolerances::new(&defaults, cli.tol.as_deref())?;
    let (phi, spec) = load_channel(args, cli.seed)?;
    UnitalQubit::new(&phi)?;

    let grid = PGrid::symmetric(DEFAULT_GRID_POINTS);
    let asym = verify_symmetry(&phi, &grid)?;
    let second = verify_concavity(&phi, &grid, DEFAULT_H_STEP)?;
    let (p_star, _) = maximize_f(&phi)?;
    let t2 = verify_theorem2(&phi, &optimizer_config(cli, restarts, &tols))?;
    let checks = vec![
        Check::at_most("symmetry", asym, tols.get("symmetry")),
        Check::at_most("concavity", second, tols.get("concavity")),
        Check::at_most("saturation", t2.delta.abs(), tols.get("saturation")),
        Check::at_most("saturation_golden", t2.delta_from_p.abs(), tols.get("saturation_golden")),
        Check::at_most("p_star", (p_star - 0.5).abs(), tols.get("p_star")),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let mut meta = Meta::new("verify-unital", cli.seed, cli.log_base, tols);
    meta.set("restarts", restarts);
    meta.set("grid_points", DEFAULT_GRID_POINTS);
    meta.set("h_step", DEFAULT_H_STEP);
    let b = cli.log_base;
    let out = UnitalOutput {
        meta,
        channel: spec,
        p_star,
        h_channel: b.convert(t2.lhs),
        h_channel_from_p: b.convert(t2.lhs_from_p),
        h_map_minus_log2: b.convert(t2.rhs),
        checks,
        pass,
    };
    emit(cli.out.as_ref(), &json_bytes(&out)?)?;
    Ok(if pass { exit::OK } else { exit::CHECK_FAILED })
}

const FIG1_HEADER: &[&str] = &[
    "experiment",
    "d",
    "nu_kind",
    "trial",
    "n",
    "value",
    "stderr",
    "entropy_bound",
    "reference",
    "seed",
];

/// Columns: `value` is `D(σ‖γ)` (the mean on aggregate rows),
/// `entropy_bound = log d − value` and `reference = log d − 1/2`.
fn fig1(cli: &Cli, d_list: &[usize], trials: usize, nu: &[SchmidtKind], per_trial: bool) -> CliResult<i32> {
    check_dims(d_list, "fig1")?;
    let tols = Tolerances::new(&[], cli.tol.as_deref())?;
    let kinds: Vec<SchmidtKind> = if nu.is_empty() { SchmidtKind::ALL.to_vec() } else { nu.to_vec() };
    let table = fig1_experiment(d_list, &kinds, trials, cli.seed)?;
    let b = cli.log_base;
    let seed = cli.seed.to_string();
    let mut t = Table::new(FIG1_HEADER);
    for p in &table.points {
        t.push(vec![
            FIG1_EXPERIMENT.into(),
            p.d.to_string(),
            p.nu_kind.to_string(),
            "aggregate".into(),
            p.trials.to_string(),
            num(b.convert(p.mean_d)),
            num(b.convert(p.stderr)),
            num(b.convert(p.entropy_bound)),
            num(b.convert(p.reference)),
            seed.clone(),
        ]);
    }
    if per_trial {
        for s in &table.samples {
            let log_d = (s.d as f64).ln();
            t.push(vec![
                FIG1_EXPERIMENT.into(),
                s.d.to_string(),
                s.nu_kind.to_string(),
                s.trial.to_string(),
                "1".into(),
                num(b.convert(s.value)),
                String::new(),
                num(b.convert(log_d - s.value)),
                num(b.convert(log_d - 0.5)),
                seed.clone(),
            ]);
        }
    }
    let mut meta = Meta::new("fig1", cli.seed, b, tols);
    meta.set("d_list", join(d_list));
    meta.set("trials", trials);
    meta.set("k", "d^2");
    meta.set("nu", kinds.iter().map(|k| k.tag()).collect::<Vec<_>>().join(","));
    meta.set("spectrum_rescaling", "mean-one");
    emit(cli.out.as_ref(), &t.render(&meta)?)?;
    Ok(exit::OK)
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

const CONJECTURE_HEADER: &[&str] = &[
    "experiment",
    "d",
    "k",
    "trial",
    "n",
    "mean_h_map",
    "h_map_stderr",
    "h_map_deviation",
    "mean_d_phi_plus_lower_bound",
    "d_phi_plus_stderr",
    "d_phi_plus_deviation",
    "h_channel_upper_bound",
    "within_tolerance",
    "seed",
];

fn conjecture(cli: &Cli, d_list: &[usize], k: Option<usize>, trials: usize) -> CliResult<i32> {
    check_dims(d_list, "conjecture")?;
    let tols = Tolerances::new(&[("deviation", 0.05)], cli.tol.as_deref())?;
    let rows = conjecture_sweep(d_list, k, trials, cli.seed)?;
    let b = cli.log_base;
    let mut t = Table::new(CONJECTURE_HEADER);
    for r in &rows {
        let ok = r.h_map_deviation.abs() <= tols.get("deviation") && r.d_phi_plus_deviation.abs() <= tols.get("deviation");
        t.push(vec![
            CONJECTURE_EXPERIMENT.into(),
            r.d.to_string(),
            r.k.to_string(),
            "aggregate".into(),
            r.trials.to_string(),
            num(b.convert(r.mean_h_map)),
            num(b.convert(r.h_map_stderr)),
            num(b.convert(r.h_map_deviation)),
            num(b.convert(r.mean_d_phi_plus)),
            num(b.convert(r.d_phi_plus_stderr)),
            num(b.convert(r.d_phi_plus_deviation)),
            num(b.convert(r.h_channel_bound)),
            ok.to_string(),
            cli.seed.to_string(),
        ]);
    }
    let mut meta = Meta::new("conjecture", cli.seed, b, tols);
    meta.set("d_list", join(d_list));
    meta.set("k", k.map_or("d^2".to_string(), |k| k.to_string()));
    meta.set("trials", trials);
    meta.set("input", "maximally-entangled");
    emit(cli.out.as_ref(), &t.render(&meta)?)?;
    Ok(exit::OK)
}

fn spectrum(cli: &Cli, args: &ChannelArgs, nu: SchmidtKind) -> CliResult<i32> {
    let tols = Tolerances::new(&[], cli.tol.as_deref())?;
    let (phi, _) = load_channel(args, cli.seed)?;
    let d = phi.dim_in();
    let lambda = sample_schmidt(d, nu, &mut rng::stream(cli.seed, "spectrum", 0))?;
    let s = output_spectrum(&phi, &lambda)?;
    let mut t = Table::new(&["experiment", "d", "nu_kind", "index", "eigenvalue", "rescaled", "seed"]);
    // largest first
    for (i, (e, r)) in s.eigenvalues.iter().zip(&s.rescaled).rev().enumerate() {
        t.push(vec![
            "spectrum".into(),
            d.to_string(),
            nu.to_string(),
            i.to_string(),
            num(*e),
            num(*r),
            cli.seed.to_string(),
        ]);
    }
    let mut meta = Meta::new("spectrum", cli.seed, cli.log_base, tols);
    meta.set("lambda", lambda.as_slice().iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"));
    meta.set("similarity_deviation", format!("{:e}", s.similarity_deviation));
    emit(cli.out.as_ref(), &t.render(&meta)?)?;
    Ok(exit::OK)
}

const MOMENT_HEADER: &[&str] = &[
    "experiment",
    "d",
    "k",
    "nu_kind",
    "trial",
    "n",
    "m1",
    "m1_predicted",
    "z_m1",
    "m2",
    "m2_predicted",
    "z_m2",
    "a1",
    "a2",
    "b1",
    "b2",
    "seed",
];

fn free_moments(cli: &Cli, d: usize, k: Option<usize>, nu: SchmidtKind, trials: usize) -> CliResult<i32> {
    check_dims(&[d], "free-moments")?;
    let tols = Tolerances::new(&[("z", 3.0)], cli.tol.as_deref())?;
    let k = k.unwrap_or(d * d);
    let r = free_moment_check(d, k, nu, trials, cli.seed)?;
    let mut t = Table::new(MOMENT_HEADER);
    t.push(vec![
        "free-moments".into(),
        d.to_string(),
        k.to_string(),
        nu.to_string(),
        "aggregate".into(),
        r.trials.to_string(),
        num(r.m1),
        num(r.m1_predicted),
        num(r.z_m1),
        num(r.m2),
        num(r.m2_predicted),
        num(r.z_m2),
        num(r.a1),
        num(r.a2),
        num(r.b1),
        num(r.b2),
        cli.seed.to_string(),
    ]);
    let mut meta = Meta::new("free-moments", cli.seed, cli.log_base, tols);
    meta.set("spectrum_rescaling", "mean-one");
    let pass = r.z_m1.abs() <= meta.tolerances.get("z") && r.z_m2.abs() <= meta.tolerances.get("z");
    meta.set("pass", pass);
    emit(cli.out.as_ref(), &t.render(&meta)?)?;
    Ok(exit::OK)
}

fn random_channel(cli: &Cli, d: usize, k: Option<usize>) -> CliResult<i32> {
    let mut params = Map::new();
    params.insert("d".into(), d.into());
    if let Some(k) = k {
        params.insert("k".into(), k.into());
    }
    let phi = ChannelSpec::named("random", params, cli.seed).build()?;
    let mut json = channel_to_json(&phi)?;
    json.push('\n');
    emit(cli.out.as_ref(), json.as_bytes())?;
    Ok(exit::OK)
}
