//! Command-line front end: machine feasibility checks, steady-state runs,
//! tradeoff-front sweeps, temperature grids, and Bell-score sweeps, with
//! JSON configs and CSV/JSON artifacts.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use entengine::bell::{bell_report_csv, BellRecord, CLUSTER_LHV_BOUND, MERMIN_LHV_BOUND};
use entengine::builder::{feasibility_single_hot, MachineSpec, TargetState};
use entengine::dynamics::{
    lindblad_liouvillian, reset_liouvillian, steady_state, JumpConfig, Model,
};
use entengine::filtering::{apply_filter, fidelity, gme_witness, max_psuc_ghz};
use entengine::optimizer::{
    bell_sweep_with, front_csv, pareto_front_with, temperature_sweep, MachineFamily,
};
use entengine::Error;

#[derive(Parser)]
#[command(
    name = "entengine",
    about = "Simulate autonomous thermal machines that herald multiqubit entangled states",
    version
)]
struct Cli {
    /// Number of worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Machine family (ghz | dicke | cluster) when no config file is given.
    family: Option<String>,
    /// Qubit count for ghz/dicke.
    n: Option<usize>,
    /// Excitation count for dicke.
    l: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master-equation model: reset | lindblad (overrides the config).
    #[arg(long)]
    model: Option<String>,
    /// Print the fully-defaulted effective config as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a target state admits an energy-conserving machine.
    Feasibility {
        /// Target state JSON file.
        target: PathBuf,
    },
    /// Solve one steady state, filter it, and write the artifacts.
    Steady(RunArgs),
    /// Trace the fidelity vs success-probability front.
    Pareto(RunArgs),
    /// Fidelity across a bath-temperature grid.
    Tempsweep(RunArgs),
    /// Bell score along the success-probability front.
    Bell(RunArgs),
    /// Print the analytic maximum filtering success probability of the
    /// N-qubit GHZ machine.
    Maxpsuc {
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        // Ignore failure when a pool already exists (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Engine(Error::InvalidInput(_)) | CliError::Engine(Error::HeraldNeverFires(_)) => 1,
        CliError::Engine(Error::Infeasible(_)) => 2,
        CliError::Engine(Error::Capacity { .. }) => 3,
        CliError::Engine(Error::DegenerateSteadyState(_)) | CliError::Engine(Error::Numerical(_)) => 4,
        CliError::Io(_) | CliError::Parse(_) | CliError::Usage(_) => 1,
        CliError::Infeasible => 2,
    }
}

#[derive(Debug)]
enum CliError {
    Engine(Error),
    Io(std::io::Error),
    Parse(String),
    Usage(String),
    /// Feasibility verdict "no": not a failure, but a distinct exit code.
    Infeasible,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Parse(e) => write!(f, "parse: {e}"),
            CliError::Usage(e) => write!(f, "usage: {e}"),
            CliError::Infeasible => write!(f, "target admits no energy-conserving machine"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Feasibility { target } => cmd_feasibility(&target),
        Command::Steady(args) => cmd_steady(args),
        Command::Pareto(args) => cmd_pareto(args),
        Command::Tempsweep(args) => cmd_tempsweep(args),
        Command::Bell(args) => cmd_bell(args),
        Command::Maxpsuc { n } => {
            let v = max_psuc_ghz(n)?;
            println!("{v:.12}");
            Ok(())
        }
    }
}

fn load_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = if let Some(path) = &args.config {
        let text = fs::read_to_string(path)?;
        serde_json::from_str::<RunConfig>(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
    } else if let Some(family) = &args.family {
        let machine = parse_family(family, args.n, args.l)?;
        RunConfig::for_family(machine)
    } else {
        return Err(CliError::Usage(
            "give either --config FILE or a machine family (ghz N | dicke N L | cluster)".into(),
        ));
    };
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(model) = &args.model {
        cfg.model = match model.as_str() {
            "reset" => Model::Reset,
            "lindblad" => Model::Lindblad,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown model '{other}' (expected reset | lindblad)"
                )))
            }
        };
    }
    Ok(cfg)
}

fn parse_family(
    family: &str,
    n: Option<usize>,
    l: Option<usize>,
) -> Result<MachineFamily, CliError> {
    match family {
        "ghz" => Ok(MachineFamily::Ghz {
            n: n.ok_or_else(|| CliError::Usage("ghz needs a qubit count".into()))?,
        }),
        "dicke" => Ok(MachineFamily::Dicke {
            n: n.ok_or_else(|| CliError::Usage("dicke needs a qubit count".into()))?,
            l: l.ok_or_else(|| CliError::Usage("dicke needs an excitation count".into()))?,
        }),
        "cluster" => Ok(MachineFamily::Cluster),
        other => Err(CliError::Usage(format!(
            "unknown machine family '{other}' (expected ghz | dicke | cluster)"
        ))),
    }
}

fn build_machine(cfg: &RunConfig) -> Result<MachineSpec, CliError> {
    let spec = cfg.machine.machine()?;
    let spec = spec.with_temperatures(cfg.temperatures.hot, cfg.temperatures.cold)?;
    let hot = spec.level_assignment().hot_sites();
    let current_gh = spec.baths().baths()[hot[0]].rate;
    let current_gc = spec
        .baths()
        .baths()
        .iter()
        .enumerate()
        .find(|&(k, _)| !hot.contains(&k))
        .map(|(_, b)| b.rate)
        .unwrap_or(current_gh);
    let spec = spec.with_couplings(
        cfg.couplings.gamma_h.unwrap_or(current_gh),
        cfg.couplings.gamma_c.unwrap_or(current_gc),
        cfg.couplings.g.unwrap_or(spec.g()),
    )?;
    Ok(spec)
}

fn jump_config(cfg: &RunConfig, spec: &MachineSpec) -> Result<JumpConfig, CliError> {
    Ok(match &cfg.jumps {
        Some(pairs) => JumpConfig::uniform_pairs(spec, pairs)?,
        None => JumpConfig::default_for(spec),
    })
}

fn print_config_and_exit(cfg: &RunConfig) -> Result<(), CliError> {
    println!(
        "{}",
        serde_json::to_string_pretty(cfg).map_err(|e| CliError::Parse(e.to_string()))?
    );
    Ok(())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn metadata(cfg: &RunConfig, spec: &MachineSpec, jumps: Option<&JumpConfig>) -> serde_json::Value {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    serde_json::json!({
        "machine": cfg.machine,
        "model": cfg.model,
        "gamma": spec.baths().baths().iter().map(|b| b.rate).collect::<Vec<_>>(),
        "g": spec.g(),
        "weak_coupling": spec.weak_coupling(),
        "jump_config": jumps,
        "tolerances": cfg.tolerances,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": timestamp,
    })
}

fn cmd_feasibility(path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(path)?;
    let target = TargetState::from_json_str(&text)?;
    match feasibility_single_hot(&target) {
        Some(w) => {
            let report = serde_json::json!({
                "feasible": true,
                "hot_site": w.hot_site,
                "delta1": w.energies.delta1(),
                "delta2": w.energies.delta2(),
                "excluded_levels": w.assignment.entries(),
            });
            println!("{report:#}");
            Ok(())
        }
        None => {
            println!("{:#}", serde_json::json!({ "feasible": false }));
            Err(CliError::Infeasible)
        }
    }
}

fn cmd_steady(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    if args.print_config {
        return print_config_and_exit(&cfg);
    }
    let spec = build_machine(&cfg)?;
    let jumps = jump_config(&cfg, &spec)?;
    let l = match cfg.model {
        Model::Reset => reset_liouvillian(&spec)?,
        Model::Lindblad => lindblad_liouvillian(&spec, &jumps)?,
    };
    let rho = steady_state(&l)?;
    let outcome = apply_filter(&rho, spec.level_assignment())?;
    let f = fidelity(&outcome.heralded, spec.target())?;

    let steady_json = serde_json::to_string_pretty(&rho.to_json())
        .map_err(|e| CliError::Parse(e.to_string()))?;
    write_out(&cfg.out, "steady_state.json", &steady_json)?;
    let heralded_json = serde_json::to_string_pretty(&outcome.to_json(Some(f)))
        .map_err(|e| CliError::Parse(e.to_string()))?;
    write_out(&cfg.out, "heralded.json", &heralded_json)?;

    let used_jumps = matches!(cfg.model, Model::Lindblad).then_some(&jumps);
    let summary = serde_json::json!({
        "p_suc": outcome.p_suc,
        "fidelity": f,
        "gme_witness": gme_witness(f),
        "metadata": metadata(&cfg, &spec, used_jumps),
    });
    let summary_text =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Parse(e.to_string()))?;
    write_out(&cfg.out, "summary.json", &summary_text)?;

    println!("machine = {}", cfg.machine);
    println!("model = {}", cfg.model);
    println!("p_suc = {:.12e}", outcome.p_suc);
    println!("fidelity = {f:.12e}");
    Ok(())
}

fn cmd_pareto(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    if args.print_config {
        return print_config_and_exit(&cfg);
    }
    let front = pareto_front_with(cfg.machine, &cfg.sweep)?;
    let csv = front_csv(cfg.machine, front.points(), false);
    let path = write_out(&cfg.out, &format!("pareto_{}.csv", cfg.machine.label()), &csv)?;
    println!("front points = {}", front.points().len());
    println!("max p_suc = {:.6}", front.max_p_suc());
    println!("max fidelity = {:.6}", front.max_fidelity());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_tempsweep(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    if args.print_config {
        return print_config_and_exit(&cfg);
    }
    let spec = build_machine(&cfg)?;
    let sweep = temperature_sweep(
        &spec,
        cfg.model,
        &cfg.temperature_grid.hot,
        &cfg.temperature_grid.cold,
    )?;
    let name = format!("tempsweep_{}_{}.csv", cfg.machine.label(), cfg.model);
    let path = write_out(&cfg.out, &name, &sweep.to_csv())?;
    println!("grid = {} x {}", cfg.temperature_grid.hot.len(), cfg.temperature_grid.cold.len());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_bell(args: RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args)?;
    if args.print_config {
        return print_config_and_exit(&cfg);
    }
    let points = bell_sweep_with(cfg.machine, &cfg.sweep)?;
    let (bell_name, lhv) = match cfg.machine {
        MachineFamily::Cluster => ("cluster", CLUSTER_LHV_BOUND),
        _ => ("mermin", MERMIN_LHV_BOUND),
    };
    let records: Vec<BellRecord> = points
        .iter()
        .map(|p| BellRecord {
            machine: cfg.machine.label().to_string(),
            p_suc: p.p_suc,
            fidelity: p.fidelity,
            bell_name: bell_name.to_string(),
            value: p.bell_value.unwrap_or(f64::NAN),
            lhv_bound: lhv,
        })
        .collect();
    let csv = bell_report_csv(&records);
    let path = write_out(&cfg.out, &format!("bell_{}.csv", cfg.machine.label()), &csv)?;
    let front_csv_text = front_csv(cfg.machine, &points, true);
    let front_path =
        write_out(&cfg.out, &format!("bell_front_{}.csv", cfg.machine.label()), &front_csv_text)?;
    println!("points = {}", points.len());
    println!("wrote {}", path.display());
    println!("wrote {}", front_path.display());
    Ok(())
}
