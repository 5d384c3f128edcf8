//! Command-line front end: fit models, evaluate them, report error metrics,
//! and generate benchmark datasets.
//!
//! Exit codes: 0 success, 1 input/usage error, 2 fit did not reach the
//! tolerance (max iterations or stagnation; the model is still written).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use paaa::{
    datagen, fit_grid_with, fit_scattered_with, format_point, io, BarycentricModel, Error,
    FitConfig, FitMode, FitReport, FitStep, InterpUpdate, ModelMeta, SampleSet,
};

#[derive(Parser)]
#[command(
    name = "paaa",
    version,
    about = "Multivariate rational approximation of grid or scattered data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a rational model to a sample CSV.
    Fit(FitArgs),
    /// Evaluate a model at points from a CSV.
    Eval(EvalArgs),
    /// Error metrics of a model against a test CSV.
    Report(ReportArgs),
    /// Generate benchmark datasets.
    Gen(GenArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Sample CSV (z1_re[,z1_im],..,f_re[,f_im]).
    #[arg(long)]
    input: PathBuf,
    /// Output model JSON.
    #[arg(long)]
    output: PathBuf,
    /// Relative max-error target.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// How the interpolation set grows each iteration.
    #[arg(long, value_enum, default_value_t = UpdateArg::All)]
    interp_update: UpdateArg,
    /// Also append the per-iteration log lines to this file.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Grid,
    Scattered,
}

#[derive(Clone, Copy, ValueEnum)]
enum UpdateArg {
    /// Interpolate every sample available on the node product.
    All,
    /// Interpolate only the greedy point.
    Greedy,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Points CSV (f_* columns optional, ignored).
    #[arg(long)]
    points_csv: PathBuf,
    /// Output CSV with r_re, r_im and a status column.
    #[arg(long)]
    out_csv: PathBuf,
    /// Snap query coordinates to nodes within this distance (0 = exact).
    #[arg(long, default_value_t = 0.0)]
    snap: f64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    model: PathBuf,
    /// Test CSV with reference values.
    #[arg(long)]
    test_csv: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    /// Output CSV path. peaks-gaps also writes <out>.heldout.csv,
    /// rational-fixture also writes <out>.truth.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid points per axis (peaks presets).
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Per-axis node counts for rational-fixture, e.g. "2,2".
    #[arg(long, default_value = "2,2")]
    orders: String,
    /// Sample count for rational-fixture.
    #[arg(long, default_value_t = 100)]
    num_samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Peaks,
    PeaksGaps,
    RationalFixture,
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Eval(args) => cmd_eval(args).map(|()| 0),
        Command::Report(args) => cmd_report(args).map(|()| 0),
        Command::Gen(args) => cmd_gen(args).map(|()| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn iteration_line(step: &FitStep<'_>) -> String {
    let orders: Vec<String> = step
        .record
        .node_counts
        .iter()
        .map(|n| n.to_string())
        .collect();
    format!(
        "iter={} point={} relerr={:.16e} orders=({}) |I|={}",
        step.iteration,
        format_point(&step.record.greedy_point),
        step.record.rel_max_error,
        orders.join(","),
        step.record.interp_count
    )
}

fn cmd_fit(args: FitArgs) -> Result<i32, Error> {
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        return Err(Error::InvalidArgument(
            "--tol must be a positive finite number".into(),
        ));
    }
    if args.max_iter == 0 {
        return Err(Error::InvalidArgument("--max-iter must be at least 1".into()));
    }
    let samples = io::load_samples(&args.input)?;
    let config = FitConfig {
        tol: args.tol,
        max_iter: args.max_iter,
        interp_update: match args.interp_update {
            UpdateArg::All => InterpUpdate::AllAvailable,
            UpdateArg::Greedy => InterpUpdate::GreedyPointOnly,
        },
        mode: match args.mode {
            ModeArg::Auto => FitMode::Auto,
            ModeArg::Grid => FitMode::Grid,
            ModeArg::Scattered => FitMode::Scattered,
        },
    };

    let grid = match config.mode {
        FitMode::Grid => true,
        FitMode::Scattered => false,
        FitMode::Auto => samples.grid_axes().is_some(),
    };

    let mut log_file = match &args.log {
        Some(path) => Some(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => None,
    };
    let observer = |step: &FitStep<'_>| {
        let line = iteration_line(step);
        println!("{line}");
        if let Some(f) = &mut log_file {
            // surfaced at flush time if the disk is unhappy
            let _ = writeln!(f, "{line}");
        }
    };

    let outcome = if grid {
        fit_grid_with(&samples, &config, observer)
    } else {
        fit_scattered_with(&samples, &config, observer)
    };

    let (model, report, code) = match outcome {
        Ok((model, report)) => {
            let code = if report.converged { 0 } else { 2 };
            (model, report, code)
        }
        Err(Error::Stagnation {
            reason,
            model,
            report,
        }) => {
            eprintln!("warning: fit stagnated: {reason}");
            (*model, *report, 2)
        }
        Err(e) => return Err(e),
    };
    if let Some(f) = &mut log_file {
        f.flush()?;
    }
    write_fit_outputs(&args.output, &model, &report)?;
    Ok(code)
}

fn write_fit_outputs(
    output: &Path,
    model: &BarycentricModel,
    report: &FitReport,
) -> Result<(), Error> {
    let meta = ModelMeta::from_report(report);
    io::save_model(output, model, Some(&meta))?;
    let orders: Vec<String> = model.node_counts().iter().map(|n| n.to_string()).collect();
    println!(
        "fit: converged={} iterations={} final_relerr={:.16e} orders=({}) |I|={} model={}",
        report.converged,
        report.iterations,
        report.final_error,
        orders.join(","),
        meta.interp_count,
        output.display()
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    if !args.snap.is_finite() || args.snap < 0.0 {
        return Err(Error::InvalidArgument(
            "--snap must be a non-negative finite number".into(),
        ));
    }
    let model = io::load_model(&args.model)?;
    let points = io::load_points(&args.points_csv)?;
    for (i, p) in points.iter().enumerate() {
        if p.len() != model.dim() {
            return Err(Error::InvalidArgument(format!(
                "point row {} has {} variables, model has {}",
                i + 1,
                p.len(),
                model.dim()
            )));
        }
    }
    let mut writer = csv::Writer::from_path(&args.out_csv)?;
    let mut header = Vec::new();
    for j in 1..=model.dim() {
        header.push(format!("z{j}_re"));
        header.push(format!("z{j}_im"));
    }
    header.extend(["r_re".into(), "r_im".into(), "status".into()]);
    writer.write_record(&header)?;
    let mut failures = 0usize;
    for p in &points {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for z in p {
            record.push(z.re.to_string());
            record.push(z.im.to_string());
        }
        match model.eval_snapped(p, args.snap) {
            Ok(v) => {
                record.push(v.re.to_string());
                record.push(v.im.to_string());
                record.push("ok".into());
            }
            Err(e) => {
                failures += 1;
                record.push(String::new());
                record.push(String::new());
                record.push(match e {
                    paaa::EvalError::Pole { .. } => "pole".into(),
                    paaa::EvalError::Indeterminate { .. } => "indeterminate".into(),
                });
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    if failures > 0 {
        eprintln!("warning: {failures} of {} points hit a pole", points.len());
    }
    println!("eval: wrote {} rows to {}", points.len(), args.out_csv.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Error> {
    let model = io::load_model(&args.model)?;
    let test = io::load_samples(&args.test_csv)?;
    if test.dim() != model.dim() {
        return Err(Error::InvalidArgument(format!(
            "test data has {} variables, model has {}",
            test.dim(),
            model.dim()
        )));
    }
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut fmax = 0.0f64;
    for i in 0..test.len() {
        let err = match model.eval(test.point(i)) {
            Ok(v) => (test.value(i) - v).norm(),
            Err(e) => {
                eprintln!("warning: {e}");
                f64::INFINITY
            }
        };
        max_abs = max_abs.max(err);
        sum_sq += err * err;
        fmax = fmax.max(test.value(i).norm());
    }
    let rel_max = if fmax > 0.0 { max_abs / fmax } else { max_abs };
    let rms = (sum_sq / test.len() as f64).sqrt();
    println!("samples          = {}", test.len());
    println!("max_abs_error    = {max_abs:.16e}");
    println!("rel_max_error    = {rel_max:.16e}");
    println!("rms_error        = {rms:.16e}");
    Ok(())
}

fn parse_orders(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad order {part:?} in --orders")))
        })
        .collect()
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn cmd_gen(args: GenArgs) -> Result<(), Error> {
    match args.preset {
        Preset::Peaks => {
            let grid = datagen::gen_peaks_grid(args.n, [-3.0, 3.0])?;
            io::save_samples(&args.out, &grid)?;
            println!("gen: peaks {0}x{0} grid -> {1}", args.n, args.out.display());
        }
        Preset::PeaksGaps => {
            let split = datagen::gen_peaks_with_gaps(
                args.n,
                [-3.0, 3.0],
                &datagen::GapSpec::peaks_default(),
                args.seed,
            )?;
            io::save_samples(&args.out, &split.train)?;
            let held_path = sibling(&args.out, ".heldout.csv");
            match &split.heldout {
                Some(held) => io::save_samples(&held_path, held)?,
                None => {
                    return Err(Error::InvalidArgument(
                        "gap spec held out no points".into(),
                    ))
                }
            }
            println!(
                "gen: peaks-gaps train={} heldout={} removed_fraction={:.16e} -> {} / {}",
                split.train.len(),
                split.heldout.as_ref().map_or(0, SampleSet::len),
                split.removed_fraction,
                args.out.display(),
                held_path.display()
            );
        }
        Preset::RationalFixture => {
            let orders = parse_orders(&args.orders)?;
            let fixture = datagen::gen_rational_fixture(&orders, args.num_samples, args.seed)?;
            io::save_samples(&args.out, &fixture.samples)?;
            let truth_path = sibling(&args.out, ".truth.json");
            io::save_model(&truth_path, &fixture.ground_truth, None)?;
            println!(
                "gen: rational fixture orders={:?} K={} -> {} / {}",
                orders,
                fixture.samples.len(),
                args.out.display(),
                truth_path.display()
            );
        }
    }
    Ok(())
}
