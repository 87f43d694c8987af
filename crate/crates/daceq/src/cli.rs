//! Command-line interface: design, search, estimate, sweep, fit, verify,
//! plot-data.
//!
//! Engine options resolve with the precedence CLI flags > config file >
//! defaults. Every error path exits with a distinct nonzero code and a
//! one-line machine-parsable reason on stderr (see README for the table).

use clap::{Args, Parser, Subcommand, ValueEnum};
use daceq::design::{design, design_lp, design_remez, verify_design, DesignResult};
use daceq::error::Error;
use daceq::estimate::{builtin_params, builtin_rows, usable_order};
use daceq::fir::multiplier_count;
use daceq::fit::{default_init, fit, FitOptions, FitProblem, ParamBounds, FALLBACK_STEP2};
use daceq::io::{
    self, meta_path, read_filter, read_params, read_sweep, write_json, write_sweep, FilterRecord,
    ParamsRecord,
};
use daceq::search::{minimal_order, sweep, OrderSpec, SweepConfig, SWEEP_SENTINEL};
use daceq::{BandSpec, DesignProblem, EngineOptions, EstimateParams, LinearPhaseType, PulseKind};
use serde::Deserialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub fn main() -> ! {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::exit(0),
        Err(e) => {
            let (tag, code) = classify(&e);
            eprintln!("error[{tag}]: {e}");
            std::process::exit(code);
        }
    }
}

fn classify(e: &Error) -> (&'static str, i32) {
    match e {
        Error::InvalidBandwidth(_)
        | Error::InvalidDelta(_)
        | Error::InvalidBand { .. }
        | Error::IncompatibleType { .. }
        | Error::ParityMismatch { .. }
        | Error::BadCoefficients(_)
        | Error::DegenerateProblem
        | Error::AmplitudeNotPositive { .. }
        | Error::EmptyGrid(_)
        | Error::InvalidConfig(_) => ("invalid-request", 2),
        Error::NonConvergence { .. } => ("non-convergence", 3),
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format(_) => ("io", 4),
        Error::OrderCapExceeded { .. } => ("order-cap", 5),
        Error::UnknownTableRow { .. } => ("unknown-table-row", 6),
        Error::Lp(_) => ("solver", 7),
    }
}

#[derive(Parser)]
#[command(
    name = "daceq",
    version,
    about = "Minimax linear-phase FIR equalizers for DAC pulses across Nyquist bands, with filter-order estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file with engine options (flags take precedence).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Clone, Copy, Debug, Default)]
struct EngineArgs {
    /// Grid points per free coefficient (default 16, floor 256 total).
    #[arg(long, global = true)]
    grid_density: Option<u32>,
    /// Remez relative ripple-spread convergence tolerance (default 1e-6).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Remez iteration cap (default 250).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Order-search cap (default 400).
    #[arg(long, global = true)]
    order_cap: Option<u32>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    grid_density: Option<u32>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    order_cap: Option<u32>,
    jobs: Option<usize>,
    cache_dir: Option<PathBuf>,
}

struct Resolved {
    opts: EngineOptions,
    jobs: Option<usize>,
    cache_dir: Option<PathBuf>,
}

fn resolve_options(cli_cfg: &Option<PathBuf>, args: &EngineArgs) -> Result<Resolved, Error> {
    let file: ConfigFile = match cli_cfg {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let defaults = EngineOptions::default();
    let opts = EngineOptions {
        grid_density: args
            .grid_density
            .or(file.grid_density)
            .unwrap_or(defaults.grid_density),
        tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
        max_iter: args.max_iter.or(file.max_iter).unwrap_or(defaults.max_iter),
        order_cap: args
            .order_cap
            .or(file.order_cap)
            .unwrap_or(defaults.order_cap),
    };
    if opts.tol <= 0.0 || opts.tol >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "tol must be in (0, 1), got {}",
            opts.tol
        )));
    }
    let cache_dir = file
        .cache_dir
        .or_else(|| std::env::var_os("DACEQ_CACHE_DIR").map(PathBuf::from));
    Ok(Resolved {
        opts,
        jobs: args.jobs.or(file.jobs),
        cache_dir,
    })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineChoice {
    /// Remez exchange with LP fallback.
    Auto,
    /// Remez exchange only.
    Remez,
    /// LP-on-grid oracle.
    Lp,
}

#[derive(Subcommand)]
enum Command {
    /// Design one minimax equalizer at a fixed order.
    Design {
        #[arg(long)]
        pulse: PulseKind,
        /// Nyquist band index (1-6).
        #[arg(long)]
        nb: u32,
        /// Linear-phase type: I, II, III or IV.
        #[arg(long = "type")]
        filter_type: LinearPhaseType,
        /// Filter order N.
        #[arg(long)]
        order: u32,
        /// Bandwidth as a fraction of pi, in (0, 1).
        #[arg(long)]
        bandwidth: f64,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineChoice,
        /// Write the designed filter as JSON.
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Find the minimal order meeting a (bandwidth, delta) specification.
    Search {
        #[arg(long)]
        pulse: PulseKind,
        #[arg(long)]
        nb: u32,
        #[arg(long = "type")]
        filter_type: LinearPhaseType,
        /// Bandwidth as a fraction of pi, in (0, 1).
        #[arg(long)]
        bandwidth: f64,
        /// Target peak equalization error, in (0, 1).
        #[arg(long)]
        delta: f64,
        /// Optional starting order for the scan.
        #[arg(long)]
        hint: Option<u32>,
        /// Write the minimal-order filter as JSON.
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Evaluate the closed-form order estimate.
    Estimate {
        #[arg(long)]
        pulse: PulseKind,
        #[arg(long)]
        nb: u32,
        #[arg(long = "type")]
        filter_type: LinearPhaseType,
        /// Bandwidth as a fraction of pi, in (0, 1).
        #[arg(long)]
        bandwidth: f64,
        #[arg(long)]
        delta: f64,
        /// Use a fitted parameter-set JSON instead of the built-in table.
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
    },
    /// Sweep minimal orders over a (B, delta) grid, writing a CSV cache.
    Sweep {
        #[arg(long)]
        pulse: PulseKind,
        #[arg(long)]
        nb: u32,
        #[arg(long = "type")]
        filter_type: LinearPhaseType,
        /// Lower bandwidth bound, fraction of pi.
        #[arg(long, default_value_t = 0.04)]
        b_min: f64,
        /// Upper bandwidth bound, fraction of pi.
        #[arg(long, default_value_t = 0.96)]
        b_max: f64,
        /// Linearly spaced bandwidth points.
        #[arg(long, default_value_t = 150)]
        b_points: usize,
        #[arg(long, default_value_t = 1e-5)]
        delta_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        delta_max: f64,
        /// Logarithmically spaced accuracy points.
        #[arg(long, default_value_t = 50)]
        delta_points: usize,
        /// Output CSV (default: sweep_<pulse>_nb<NB>_<type>.csv in the
        /// cache directory or the working directory).
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Reuse cells already present in the output file.
        #[arg(long)]
        resume: bool,
    },
    /// Fit estimate parameters to a sweep CSV by minimax optimization.
    Fit {
        /// Sweep CSV produced by the sweep command.
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        /// Output parameter-set JSON.
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Basic-form initialization a, b, c (defaults -2, 1, 0).
        #[arg(long, default_value_t = FALLBACK_STEP2.0)]
        init_a: f64,
        #[arg(long, default_value_t = FALLBACK_STEP2.1)]
        init_b: f64,
        #[arg(long, default_value_t = FALLBACK_STEP2.2)]
        init_c: f64,
        /// Restart seed for reproducible fits.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
    /// Re-evaluate the complex error of an exported filter on a dense grid.
    Verify {
        /// Filter JSON produced by design/search.
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        /// Densification factor relative to the design grid.
        #[arg(long, default_value_t = 8)]
        dense_factor: usize,
    },
    /// Emit CSV plot data: pulse waveforms, magnitude responses, or
    /// minimal/estimated orders versus bandwidth.
    PlotData {
        #[command(subcommand)]
        what: PlotKind,
    },
}

#[derive(Subcommand)]
enum PlotKind {
    /// Time-domain pulse shapes over one sample period.
    Pulses {
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, short, value_name = "FILE")]
        output: PathBuf,
    },
    /// Pulse magnitude responses |P(jw)|/T across Nyquist bands 1-6.
    Magnitude {
        #[arg(long, default_value_t = 1201)]
        points: usize,
        #[arg(long, short, value_name = "FILE")]
        output: PathBuf,
    },
    /// Minimal and estimated orders versus bandwidth at fixed delta.
    Orders {
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Bandwidth samples per case.
        #[arg(long, default_value_t = 24)]
        points: usize,
        /// Restrict to one case, e.g. "rtz/2/I" (default: all 22).
        #[arg(long)]
        case: Option<String>,
        #[arg(long, short, value_name = "FILE")]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    let resolved = resolve_options(&cli.config, &cli.engine)?;
    match cli.command {
        Command::Design {
            pulse,
            nb,
            filter_type,
            order,
            bandwidth,
            engine,
            output,
        } => cmd_design(
            pulse,
            nb,
            filter_type,
            order,
            bandwidth,
            engine,
            output,
            &resolved,
        ),
        Command::Search {
            pulse,
            nb,
            filter_type,
            bandwidth,
            delta,
            hint,
            output,
        } => cmd_search(
            pulse,
            nb,
            filter_type,
            bandwidth,
            delta,
            hint,
            output,
            &resolved,
        ),
        Command::Estimate {
            pulse,
            nb,
            filter_type,
            bandwidth,
            delta,
            params,
        } => cmd_estimate(pulse, nb, filter_type, bandwidth, delta, params),
        Command::Sweep {
            pulse,
            nb,
            filter_type,
            b_min,
            b_max,
            b_points,
            delta_min,
            delta_max,
            delta_points,
            output,
            resume,
        } => cmd_sweep(
            pulse,
            nb,
            filter_type,
            (b_min, b_max),
            b_points,
            (delta_min, delta_max),
            delta_points,
            output,
            resume,
            &resolved,
        ),
        Command::Fit {
            input,
            output,
            init_a,
            init_b,
            init_c,
            seed,
            restarts,
        } => cmd_fit(&input, output, (init_a, init_b, init_c), seed, restarts),
        Command::Verify {
            input,
            dense_factor,
        } => cmd_verify(&input, dense_factor),
        Command::PlotData { what } => match what {
            PlotKind::Pulses { points, output } => cmd_plot_pulses(points, &output),
            PlotKind::Magnitude { points, output } => cmd_plot_magnitude(points, &output),
            PlotKind::Orders {
                delta,
                points,
                case,
                output,
            } => cmd_plot_orders(delta, points, case.as_deref(), &output, &resolved),
        },
    }
}

fn problem_for(
    pulse: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    order: u32,
    bandwidth_over_pi: f64,
) -> Result<DesignProblem, Error> {
    let band = BandSpec::new(nb, bandwidth_over_pi * PI)?;
    DesignProblem::new(pulse, band, filter_type, order)
}

fn print_design_report(problem: &DesignProblem, result: &DesignResult) {
    println!(
        "pulse {}  NB {}  Type {}  N {}  B {:.4}*pi",
        problem.kind(),
        problem.band().nb(),
        problem.filter_type(),
        problem.order(),
        problem.band().bandwidth() / PI
    );
    println!(
        "engine {}  iterations {}  converged {}",
        result.engine, result.iterations, result.converged
    );
    println!("delta_N      {:.6e}", result.delta);
    println!("delay K      {} samples", problem.delay().samples());
    println!(
        "multipliers  {}",
        multiplier_count(problem.filter_type(), problem.order()).unwrap_or(0)
    );
    let ext: Vec<String> = result
        .extremal_frequencies
        .iter()
        .map(|w| format!("{:.5}", w / PI))
        .collect();
    println!("extremal frequencies (rad/pi): {}", ext.join(" "));
}

#[allow(clippy::too_many_arguments)]
fn cmd_design(
    pulse: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    order: u32,
    bandwidth: f64,
    engine: EngineChoice,
    output: Option<PathBuf>,
    resolved: &Resolved,
) -> Result<(), Error> {
    let problem = problem_for(pulse, nb, filter_type, order, bandwidth)?;
    let opts = &resolved.opts;
    let result = match engine {
        EngineChoice::Auto => design(&problem, opts)?,
        EngineChoice::Remez => {
            let grid = problem.grid(opts.grid_density)?;
            let r = design_remez(&problem, &grid, opts.tol, opts.max_iter)?;
            if !r.converged {
                return Err(Error::NonConvergence {
                    iterations: r.iterations,
                    best_delta: r.delta,
                });
            }
            r
        }
        EngineChoice::Lp => {
            let grid = problem.grid(opts.grid_density)?;
            design_lp(&problem, &grid)?
        }
    };
    print_design_report(&problem, &result);
    if let Some(path) = output {
        write_json(&path, &FilterRecord::from_design(&problem, &result))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    pulse: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    bandwidth: f64,
    delta: f64,
    hint: Option<u32>,
    output: Option<PathBuf>,
    resolved: &Resolved,
) -> Result<(), Error> {
    let spec = OrderSpec::new(pulse, nb, filter_type, bandwidth * PI, delta)?;
    let (n_min, result) = minimal_order(&spec, hint, &resolved.opts)?;
    println!(
        "N_min {}  (pulse {}, NB {}, Type {}, B {:.4}*pi, delta {:.3e})",
        n_min,
        pulse,
        nb,
        filter_type,
        bandwidth,
        delta
    );
    let problem = spec.problem(n_min)?;
    print_design_report(&problem, &result);
    if let Some(path) = output {
        write_json(&path, &FilterRecord::from_design(&problem, &result))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_estimate(
    pulse: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    bandwidth: f64,
    delta: f64,
    params_file: Option<PathBuf>,
) -> Result<(), Error> {
    let (params, eps_max): (EstimateParams, Option<f64>) = match params_file {
        Some(path) => {
            let rec = read_params(&path)?;
            (rec.params, rec.eps_max)
        }
        None => {
            let (p, eps) = builtin_params(pulse, nb, filter_type)?;
            (p, Some(eps))
        }
    };
    let n_est = params.evaluate(bandwidth * PI, delta)?;
    let order = usable_order(filter_type, n_est);
    println!(
        "N_est {:.3}  usable order {}  (pulse {}, NB {}, Type {}, B {:.4}*pi, delta {:.3e})",
        n_est, order, pulse, nb, filter_type, bandwidth, delta
    );
    if let Some(eps) = eps_max {
        println!("eps_max {eps}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    pulse: PulseKind,
    nb: u32,
    filter_type: LinearPhaseType,
    b_range_over_pi: (f64, f64),
    b_points: usize,
    delta_range: (f64, f64),
    delta_points: usize,
    output: Option<PathBuf>,
    resume: bool,
    resolved: &Resolved,
) -> Result<(), Error> {
    let path = output.unwrap_or_else(|| {
        let name = format!(
            "sweep_{}_nb{}_{}.csv",
            pulse.to_string().to_lowercase(),
            nb,
            filter_type
        );
        match &resolved.cache_dir {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        }
    });
    let config = SweepConfig {
        b_range: (b_range_over_pi.0 * PI, b_range_over_pi.1 * PI),
        n_b: b_points,
        delta_range,
        n_delta: delta_points,
    };
    let known = if resume && path.exists() {
        let grid = read_sweep(&path)?;
        if grid.meta.pulse != pulse || grid.meta.nb != nb || grid.meta.filter_type != filter_type {
            return Err(Error::InvalidConfig(format!(
                "cache {} holds {}/NB{}/Type {}, not {pulse}/NB{nb}/Type {filter_type}",
                path.display(),
                grid.meta.pulse,
                grid.meta.nb,
                grid.meta.filter_type
            )));
        }
        Some(grid)
    } else {
        None
    };
    let reused: usize = known
        .as_ref()
        .map(|g| g.n_min.iter().filter(|&&n| n != SWEEP_SENTINEL).count())
        .unwrap_or(0);

    let run = || sweep(pulse, nb, filter_type, &config, &resolved.opts, known.as_ref());
    let grid = match resolved.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run),
        None => run(),
    }?;

    write_sweep(&path, &grid)?;
    let done = grid.n_min.iter().filter(|&&n| n != SWEEP_SENTINEL).count();
    let total = grid.cells();
    println!(
        "sweep {}/NB{}/Type {}: {} cells ({} reused, {} computed, {} failed)",
        pulse,
        nb,
        filter_type,
        total,
        reused.min(done),
        done - reused.min(done),
        total - done
    );
    println!("wrote {}", path.display());
    println!("wrote {}", meta_path(&path).display());
    Ok(())
}

fn cmd_fit(
    input: &Path,
    output: Option<PathBuf>,
    init: (f64, f64, f64),
    seed: u64,
    restarts: usize,
) -> Result<(), Error> {
    let grid = read_sweep(input)?;
    let init_params = default_init(
        grid.meta.pulse,
        grid.meta.nb,
        grid.meta.filter_type,
        init.0,
        init.1,
        init.2,
    );
    let problem = FitProblem {
        grid: &grid,
        init: init_params,
        bounds: ParamBounds::default(),
    };
    let options = FitOptions {
        seed,
        restarts,
        ..FitOptions::default()
    };
    let result = fit(&problem, &options)?;
    println!(
        "fit {}/NB{}/Type {}: eps {:.4} over {} cells ({} evaluations, converged {})",
        grid.meta.pulse,
        grid.meta.nb,
        grid.meta.filter_type,
        result.eps,
        grid.cells(),
        result.iterations,
        result.converged
    );
    let p = &result.params;
    println!(
        "a1 {:.4}  a2 {:.4}  a3 {:.4}  a4 {:.4}  b1 {:.4}  b2 {:.4}  b3 {:.4}  b4 {:.4}  c {:.4}",
        p.a1, p.a2, p.a3, p.a4, p.b1, p.b2, p.b3, p.b4, p.c
    );
    if let Some(path) = output {
        write_json(
            &path,
            &ParamsRecord {
                params: result.params,
                eps_max: Some(result.eps),
            },
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(input: &Path, dense_factor: usize) -> Result<(), Error> {
    let record = read_filter(input)?;
    let (problem, filter) = record.restore()?;
    let result = DesignResult {
        filter,
        delta: record.delta_achieved,
        extremal_frequencies: vec![],
        iterations: 0,
        engine: record.engine,
        converged: true,
    };
    let (delta_verified, worst) = verify_design(&result, &problem, dense_factor);
    println!(
        "delta_recorded {:.6e}  delta_verified {:.6e}  ratio {:.6}",
        record.delta_achieved,
        delta_verified,
        delta_verified / record.delta_achieved
    );
    println!("worst frequency {:.6}*pi", worst / PI);
    Ok(())
}

fn cmd_plot_pulses(points: usize, output: &Path) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["t_over_T", "nrtz", "rtz", "rtc", "rtcz"])?;
    for i in 0..points {
        let t = i as f64 / points as f64;
        w.write_record([
            format!("{t}"),
            format!("{}", PulseKind::Nrtz.waveform(t)),
            format!("{}", PulseKind::Rtz.waveform(t)),
            format!("{}", PulseKind::Rtc.waveform(t)),
            format!("{}", PulseKind::Rtcz.waveform(t)),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv flush: {e}")))?;
    io::write_atomic(output, &bytes)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_plot_magnitude(points: usize, output: &Path) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["wT_over_pi", "nrtz", "rtz", "rtc", "rtcz"])?;
    for i in 0..points {
        let x = 6.0 * i as f64 / (points - 1) as f64;
        let wt = x * PI;
        w.write_record([
            format!("{x}"),
            format!("{}", PulseKind::Nrtz.amplitude(wt).abs()),
            format!("{}", PulseKind::Rtz.amplitude(wt).abs()),
            format!("{}", PulseKind::Rtc.amplitude(wt).abs()),
            format!("{}", PulseKind::Rtcz.amplitude(wt).abs()),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv flush: {e}")))?;
    io::write_atomic(output, &bytes)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn parse_case(s: &str) -> Result<(PulseKind, u32, LinearPhaseType), Error> {
    let parts: Vec<&str> = s.split('/').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidConfig(format!(
            "case '{s}' must look like pulse/nb/type, e.g. rtz/2/I"
        )));
    }
    let pulse: PulseKind = parts[0]
        .parse()
        .map_err(Error::InvalidConfig)?;
    let nb: u32 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad NB '{}'", parts[1])))?;
    let t: LinearPhaseType = parts[2]
        .parse()
        .map_err(Error::InvalidConfig)?;
    Ok((pulse, nb, t))
}

fn cmd_plot_orders(
    delta: f64,
    points: usize,
    case: Option<&str>,
    output: &Path,
    resolved: &Resolved,
) -> Result<(), Error> {
    if points < 2 {
        return Err(Error::InvalidConfig("need at least 2 points".into()));
    }
    let cases: Vec<(PulseKind, u32, LinearPhaseType)> = match case {
        Some(s) => vec![parse_case(s)?],
        None => builtin_rows().map(|(p, nb, t, _, _)| (p, nb, t)).collect(),
    };
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["pulse", "nb", "type", "B_over_pi", "n_min", "n_est"])?;
    for (pulse, nb, t) in cases {
        let (params, _) = builtin_params(pulse, nb, t)?;
        let mut hint: Option<u32> = None;
        for i in 0..points {
            let b_over_pi = 0.04 + (0.96 - 0.04) * i as f64 / (points - 1) as f64;
            let b = b_over_pi * PI;
            let spec = OrderSpec::new(pulse, nb, t, b, delta)?;
            let n_min = match minimal_order(&spec, hint, &resolved.opts) {
                Ok((n, _)) => {
                    hint = Some(n);
                    n.to_string()
                }
                Err(Error::OrderCapExceeded { .. }) => String::new(),
                Err(e) => return Err(e),
            };
            let n_est = params.evaluate(b, delta)?;
            w.write_record([
                pulse.to_string(),
                nb.to_string(),
                t.to_string(),
                format!("{b_over_pi:.6}"),
                n_min,
                format!("{n_est:.3}"),
            ])?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv flush: {e}")))?;
    io::write_atomic(output, &bytes)?;
    println!("wrote {}", output.display());
    Ok(())
}
