#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hr_lab::diagnostics::{bias_decomposition, classify_dormant, contribution_split, effective_rank, DormancyConfig, FeatureMatrix};
use hr_lab::harness::{
    format_float, resolve_output_dir, run_experiment_suite, Aggregate, ExperimentConfig,
    NormalizationMethod, RunFilter, ScoreTable,
};
use hr_lab::network::load_checkpoint;
use hr_lab::numerics::{Matrix, Rng};
use hr_lab::saturation::{collapse_probability, monte_carlo_collapse, CollapseModel};
use hr_lab::Error;

#[derive(Parser)]
#[command(name = "hr-lab", version, about = "Hadamard representation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the variant x activation x seed grid of a config file.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Dormancy, effective rank and effective bias of a saved network on a
    /// headerless CSV of observations.
    Diagnose {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20.0)]
        omega: f64,
    },
    /// Closed-form vs Monte-Carlo collapse probability over a grid of p.
    SimulateSaturation {
        /// start:stop:step, inclusive of stop.
        #[arg(long, default_value = "0.05:0.95:0.05")]
        p_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Normalize and aggregate a score table.
    Score {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "success")]
        method: String,
        #[arg(long, default_value = "iqm")]
        aggregate: String,
    },
}

/// Exit 2 for configuration or input problems, 1 for run failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidSpec(_)
        | Error::InvalidInput(_)
        | Error::InvalidReference(_)
        | Error::Parse { .. }
        | Error::UnsupportedVersion(_)
        | Error::Io { .. } => 2,
        _ => 1,
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Config(format!("bad p grid `{spec}`")))?;
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::Config(format!("p grid must be start:stop:step, got `{spec}`")));
    };
    if !(*step > 0.0) || stop < start {
        return Err(Error::Config(format!("bad p grid `{spec}`")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

fn read_observations(path: &PathBuf) -> Result<Matrix, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidInput(format!("features line {}: not numeric", i + 1)))?;
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

fn train(config: PathBuf, seed: Option<u64>, variant: Option<String>) -> Result<bool, Error> {
    let cfg = ExperimentConfig::load(&config)?;
    let filter = RunFilter {
        seed,
        variant: variant.map(|v| v.parse()).transpose().map_err(|e: Error| Error::Config(e.to_string()))?,
    };
    let fallback = cfg.experiment.output_dir.clone().unwrap_or_else(|| "hr_lab_out".into());
    let out = resolve_output_dir(fallback);
    let outcome = run_experiment_suite(&cfg, &out, &filter)?;
    for s in &outcome.manifest.summaries {
        println!(
            "{}-{}{}: seeds={} return={:.4} normalized={:.4} dormant={:.4} rank={:.1}",
            s.variant,
            s.activation,
            if s.layer_norm { "+ln" } else { "" },
            s.seeds,
            s.final_eval_return_mean,
            s.final_return_normalized_mean,
            s.final_dormant_fraction_mean,
            s.final_effective_rank_mean
        );
    }
    println!("wrote {}", outcome.manifest_path().display());
    Ok(outcome.all_ok())
}

fn diagnose(checkpoint: PathBuf, features: PathBuf, seed: u64, omega: f64) -> Result<(), Error> {
    let net = load_checkpoint(&checkpoint)?;
    let obs = read_observations(&features)?;
    let trace = net.forward_batch(&obs)?;
    let cfg = DormancyConfig {
        omega,
        ..DormancyConfig::default()
    };
    let mut rng = Rng::new(seed);
    println!("layer,activation,neurons,dormant,dormant_fraction,effective_rank");
    let mut last_report = None;
    for (i, (layer, z)) in net.layers().iter().zip(&trace.hidden).enumerate() {
        let Some(act) = layer.activation() else { continue };
        let fm = FeatureMatrix::new(z.clone())?;
        let report = classify_dormant(&fm, act, &cfg, &mut rng)?;
        let rank = effective_rank(&fm, 0.01)?;
        println!(
            "{i},{act},{},{},{},{rank}",
            fm.cols(),
            report.dormant_count(),
            format_float(report.fraction)
        );
        last_report = Some(report);
    }
    let Some(report) = last_report else {
        return Ok(());
    };
    let head = &net.head().projection;
    let z = trace.hidden.last().expect("hidden layer present");
    let decomposition = bias_decomposition(
        &head.weights,
        &head.bias,
        z.row(0),
        &report.dormant_indices(),
        &report.dormant_omegas(),
    )?;
    let split = contribution_split(&net, &obs, &report)?;
    let fmt = |v: &[f64]| v.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(" ");
    println!();
    println!("dormant_bias = {}", fmt(&decomposition.dormant_bias));
    println!("head_bias = {}", fmt(&decomposition.bias));
    println!("effective_bias = {}", fmt(&decomposition.effective_bias()));
    println!("live_contrib = {}", format_float(split.live));
    println!("dormant_contrib = {}", format_float(split.dormant));
    Ok(())
}

fn simulate(p_grid: String, trials: u64, seed: u64) -> Result<(), Error> {
    let grid = parse_grid(&p_grid)?;
    let root = Rng::new(seed);
    println!("p,activation,closed_form,monte_carlo,trials");
    for (i, p) in grid.into_iter().enumerate() {
        for (j, act) in [hr_lab::network::ActivationKind::Tanh, hr_lab::network::ActivationKind::Relu]
            .into_iter()
            .enumerate()
        {
            let model = CollapseModel::new(act, p)?;
            let mut rng = root.substream((2 * i + j) as u64);
            println!(
                "{},{act},{},{},{trials}",
                format_float(p),
                format_float(collapse_probability(&model)?),
                format_float(monte_carlo_collapse(&model, trials, &mut rng)?)
            );
        }
    }
    Ok(())
}

fn score(table: PathBuf, method: String, aggregate: String) -> Result<(), Error> {
    let method: NormalizationMethod = method.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let aggregate: Aggregate = aggregate.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let text = std::fs::read_to_string(&table).map_err(|e| Error::Config(format!("{}: {e}", table.display())))?;
    let summary = ScoreTable::parse(&text)?.summarize(method, aggregate)?;
    println!("task,normalized");
    for (task, v) in &summary.per_task {
        println!("{task},{}", format_float(*v));
    }
    println!("{aggregate},{}", format_float(summary.aggregate));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train { config, seed, variant } => train(config, seed, variant).inspect(|&ok| {
            if !ok {
                eprintln!("one or more runs failed; see manifest.json");
            }
        }),
        Command::Diagnose { checkpoint, features, seed, omega } => diagnose(checkpoint, features, seed, omega).map(|_| true),
        Command::SimulateSaturation { p_grid, trials, seed } => simulate(p_grid, trials, seed).map(|_| true),
        Command::Score { table, method, aggregate } => score(table, method, aggregate).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
