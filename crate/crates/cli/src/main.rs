//! `crn` command-line tool: analyze reaction network structure, simulate
//! mass-action dynamics, construct linear Lyapunov functions, report
//! extinction evidence, and render trajectory plots.

mod report;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use crn_core::dynamics::{conservation_drift, integrate, IntegrateOptions};
use crn_core::extinction::trajectory_extinction_report;
use crn_core::lyapunov::construct_w_deficiency_zero;
use crn_core::model::{MassActionSystem, RateAssignment, ReactionNetwork};
use crn_core::structure::{conservation_basis, is_consistent, ConsistencyVerdict};
use crn_core::parse_network;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "crn", about = "Reaction network analysis toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analysis with exact certificates.
    Analyze {
        /// Input `.crn` file.
        path: PathBuf,
        /// Emit the canonical JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Integrate the mass-action dynamics and write a trajectory CSV.
    Simulate {
        path: PathBuf,
        /// Initial state, comma separated (e.g. `0.4,0.3,0.3`).
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        atol: Option<f64>,
        /// Output grid spacing (default `t_end / 1000`).
        #[arg(long)]
        stride: Option<f64>,
        /// Rate constants: a single value for all edges, or per-edge
        /// overrides `e0=1.5,e2=0.3` on top of the file rates.
        #[arg(long)]
        k: Option<String>,
        /// Write the CSV here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct or report a linear Lyapunov function.
    Lyapunov { path: PathBuf },
    /// Structural extinction results, optionally with trajectory evidence.
    Extinction {
        path: PathBuf,
        /// Also integrate and report per-species minima and tail envelopes.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 500.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps_weak: f64,
        #[arg(long, default_value_t = 1e-4)]
        eps_strong: f64,
        /// Initial state for `--simulate` (default: all ones).
        #[arg(long)]
        x0: Option<String>,
        #[arg(long)]
        k: Option<String>,
    },
    /// Render a trajectory CSV to a static SVG.
    Plot {
        csv_path: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, value_enum, default_value_t = Projection::TimeSeries)]
        projection: Projection,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Projection {
    Simplex,
    TimeSeries,
}

enum CliError {
    /// Bad input from the user: exit code 2.
    User(String),
    /// Broken internal invariant: exit code 1.
    Internal(String),
}

impl CliError {
    fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { path, json } => cmd_analyze(&path, json),
        Command::Simulate {
            path,
            x0,
            t_end,
            rtol,
            atol,
            stride,
            k,
            out,
        } => cmd_simulate(&path, &x0, t_end, rtol, atol, stride, k.as_deref(), out.as_deref()),
        Command::Lyapunov { path } => cmd_lyapunov(&path),
        Command::Extinction {
            path,
            simulate,
            t_end,
            eps_weak,
            eps_strong,
            x0,
            k,
        } => cmd_extinction(&path, simulate, t_end, eps_weak, eps_strong, x0.as_deref(), k.as_deref()),
        Command::Plot {
            csv_path,
            svg,
            projection,
        } => cmd_plot(&csv_path, &svg, projection),
    }
}

fn load_network(path: &Path) -> Result<(ReactionNetwork, Option<RateAssignment>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    parse_network(&text).map_err(|diags| {
        let mut msg = format!("{} is not a valid network file:", path.display());
        for d in diags {
            let _ = write!(msg, "\n  {d}");
        }
        CliError::User(msg)
    })
}

/// Resolves rate constants from the file and the `--k` flag.
fn resolve_rates(
    net: &ReactionNetwork,
    file_rates: Option<RateAssignment>,
    k_flag: Option<&str>,
) -> Result<RateAssignment, CliError> {
    let m = net.edges.len();
    let rates = match k_flag {
        None => file_rates
            .ok_or_else(|| CliError::user("no rates in file; supply them with --k"))?,
        Some(spec) if spec.contains('=') => {
            let mut base = file_rates.unwrap_or_else(|| RateAssignment::uniform(m, 1.0));
            for part in spec.split(',') {
                let (name, value) = part
                    .split_once('=')
                    .ok_or_else(|| CliError::user(format!("bad --k entry `{part}`")))?;
                let idx: usize = name
                    .trim()
                    .strip_prefix('e')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CliError::user(format!("bad edge name `{name}` (use e0, e1, ...)")))?;
                if idx >= m {
                    return Err(CliError::user(format!(
                        "edge index {idx} out of range (network has {m} edges)"
                    )));
                }
                base.k[idx] = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::user(format!("bad rate value `{value}`")))?;
            }
            base
        }
        Some(value) => {
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::user(format!("bad --k value `{value}`")))?;
            RateAssignment::uniform(m, v)
        }
    };
    if let Some(i) = rates.k.iter().position(|&k| k.is_nan() || k <= 0.0) {
        return Err(CliError::user(format!(
            "rate constant for edge e{i} must be strictly positive"
        )));
    }
    Ok(rates)
}

fn parse_x0(spec: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != n {
        return Err(CliError::user(format!(
            "--x0 has {} components but the network has {n} species",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::user(format!("bad --x0 component `{p}`")))
        })
        .collect()
}

fn cmd_analyze(path: &Path, json: bool) -> Result<(), CliError> {
    let (net, _) = load_network(path)?;
    let report = report::build_report(&net).map_err(CliError::Internal)?;
    if json {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        println!("{text}");
    } else {
        print!("{}", report::render_text(&report));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    x0_spec: &str,
    t_end: f64,
    rtol: Option<f64>,
    atol: Option<f64>,
    stride: Option<f64>,
    k_flag: Option<&str>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (net, file_rates) = load_network(path)?;
    let rates = resolve_rates(&net, file_rates, k_flag)?;
    let x0 = parse_x0(x0_spec, net.num_species())?;
    if t_end <= 0.0 {
        return Err(CliError::user("--t-end must be positive"));
    }
    let sys = MassActionSystem::new(net.clone(), rates)
        .map_err(|e| CliError::user(e.to_string()))?;
    let mut opts = IntegrateOptions::new(t_end);
    if let Some(r) = rtol {
        opts.rtol = r;
    }
    if let Some(a) = atol {
        opts.atol = a;
    }
    if let Some(s) = stride {
        opts.dense_output_stride = s;
    }
    let traj = integrate(&sys, &x0, &opts).map_err(|e| CliError::user(e.to_string()))?;

    let names = net.species_names();
    let csv = traj.to_csv(&names);
    let mut summary = String::new();
    let final_state = traj.states.last().unwrap();
    let _ = writeln!(
        summary,
        "final state at t = {}: {:?}",
        traj.times.last().unwrap(),
        final_state
    );
    let basis = conservation_basis(&net);
    if basis.is_empty() {
        let _ = writeln!(summary, "conservation drift: no conservation vectors");
    } else {
        for c in &basis {
            let drift = conservation_drift(&net, &traj, c)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(summary, "conservation drift for c = [{}]: {drift:e}", cs.join(", "));
        }
    }
    let _ = writeln!(
        summary,
        "steps: {} accepted, {} rejected",
        traj.meta.accepted, traj.meta.rejected
    );

    match out {
        Some(file) => {
            std::fs::write(file, csv)
                .map_err(|e| CliError::user(format!("cannot write {}: {e}", file.display())))?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_lyapunov(path: &Path) -> Result<(), CliError> {
    let (net, _) = load_network(path)?;
    match construct_w_deficiency_zero(&net) {
        Ok((lyap, trace)) => {
            println!("linear Lyapunov function (geometric construction):");
            println!("  w = {}", rational_list(&lyap.w));
            println!(
                "  edge products: {}",
                lyap.edge_signs
                    .iter()
                    .map(|s| match s {
                        crn_core::lyapunov::EdgeSign::Negative => "-",
                        crn_core::lyapunov::EdgeSign::Zero => "0",
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            println!(
                "  terminal scc {:?}, v1 {:?}, crossing edge e{}",
                trace.terminal_scc, trace.v1, trace.crossing_edge
            );
            println!(
                "  dim split: {} = {} + {} + 1",
                trace.dim_s_g, trace.dim_s_g1, trace.dim_s_g2
            );
            Ok(())
        }
        Err(_) => match is_consistent(&net) {
            ConsistencyVerdict::Inconsistent { separator } => {
                let lyap = crn_core::lyapunov::lyapunov_from_separator(&net, &separator)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                println!("linear Lyapunov function (from separator):");
                println!("  w = {}", rational_list(&lyap.w));
                Ok(())
            }
            ConsistencyVerdict::Consistent { .. } => {
                println!(
                    "consistent - no linear Lyapunov function exists for all rate constants"
                );
                Ok(())
            }
        },
    }
}

fn cmd_extinction(
    path: &Path,
    simulate: bool,
    t_end: f64,
    eps_weak: f64,
    eps_strong: f64,
    x0_spec: Option<&str>,
    k_flag: Option<&str>,
) -> Result<(), CliError> {
    if !(0.0 < eps_strong && eps_strong <= eps_weak) {
        return Err(CliError::user("need 0 < --eps-strong <= --eps-weak"));
    }
    let (net, file_rates) = load_network(path)?;
    let report = report::build_report(&net).map_err(CliError::Internal)?;

    println!(
        "weak extinction guaranteed: {}",
        report.extinction.weak_guaranteed
    );
    if let Some(w) = &report.extinction.separator {
        println!("  separator w = [{}]", w.join(", "));
    }
    if let Some(c) = &report.extinction.conservation {
        println!("  conservation c = [{}]", c.join(", "));
    }
    println!(
        "  flags: deficiency = {}, weakly reversible = {}, conservative = {}",
        report.extinction.flags.deficiency,
        report.extinction.flags.weakly_reversible,
        report.extinction.flags.conservative
    );
    println!(
        "consistency verdict: {}",
        report.consistency.verdict
    );
    match (&report.extinction.strong.extinct_species, &report.extinction.strong.reason) {
        (Some(set), _) => println!(
            "strong extinction set (first-order): {:?} with layers {:?}",
            set,
            report.extinction.strong.layers.as_ref().unwrap()
        ),
        (None, Some(reason)) => println!("strong extinction set: not applicable ({reason})"),
        _ => {}
    }

    if simulate {
        let rates = resolve_rates(&net, file_rates, k_flag)?;
        let n = net.num_species();
        let x0 = match x0_spec {
            Some(spec) => parse_x0(spec, n)?,
            None => vec![1.0; n],
        };
        let sys = MassActionSystem::new(net.clone(), rates)
            .map_err(|e| CliError::user(e.to_string()))?;
        let traj =
            integrate(&sys, &x0, &IntegrateOptions::new(t_end)).map_err(|e| CliError::user(e.to_string()))?;
        if !report.extinction.flags.conservative {
            println!("warning: network is not conservative; the trajectory may be unbounded");
        }
        println!("trajectory evidence (t_end = {t_end}, eps_weak = {eps_weak}, eps_strong = {eps_strong}):");
        for fate in trajectory_extinction_report(&traj, eps_weak, eps_strong) {
            println!(
                "  {}: running_min = {:.3e}, tail range [{:.3e}, {:.3e}], final = {:.3e}{}{}",
                net.species[fate.species].name,
                fate.running_min,
                fate.tail_min,
                fate.tail_max,
                fate.final_value,
                if fate.weak_candidate { "  WEAK-CANDIDATE" } else { "" },
                if fate.strong_candidate { "  STRONG-CANDIDATE" } else { "" },
            );
        }
    }
    Ok(())
}

fn cmd_plot(csv_path: &Path, svg_out: &Path, projection: Projection) -> Result<(), CliError> {
    let text = std::fs::read_to_string(csv_path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", csv_path.display())))?;
    let data = svg::parse_csv(&text).map_err(CliError::User)?;
    let rendered = match projection {
        Projection::Simplex => svg::simplex_svg(&data).map_err(CliError::User)?,
        Projection::TimeSeries => svg::time_series_svg(&data).map_err(CliError::User)?,
    };
    std::fs::write(svg_out, rendered)
        .map_err(|e| CliError::user(format!("cannot write {}: {e}", svg_out.display())))?;
    println!("wrote {}", svg_out.display());
    Ok(())
}

fn rational_list(v: &[crn_core::Rational]) -> String {
    let items: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    format!("[{}]", items.join(", "))
}
