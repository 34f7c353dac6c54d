use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hygroplate::driver::{
    dump_path, exit_code, run_case, run_sweep, run_validation, write_csv, CaseOutcome, Mode,
    RunConfig, RunSettings,
};
use hygroplate::Error;

#[derive(Parser)]
#[command(name = "hygroplate", version, about = "Vibration and buckling of laminated plates with cutouts under hygrothermal preload")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single case.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every case of a parametric sweep.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce the cross-ply validation grid.
    Validate {
        /// Mesh densities to run (default 10 20 30 40).
        #[arg(long, num_args = 1..)]
        meshes: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct Common {
    /// Override the mesh density.
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    mesh: Option<Vec<usize>>,
    /// CSV output path (default: the config's `output`, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write legacy VTK dumps of mesh, level set and mode shapes.
    #[arg(long)]
    dump_fields: bool,
    /// Worker threads for sweep cases.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn settings(config: &RunConfig, common: &Common) -> Result<RunSettings, Error> {
    let mut s = RunSettings::from_config(config);
    if let Some(m) = &common.mesh {
        if m.iter().any(|&n| n == 0) {
            return Err(Error::Config {
                line: 0,
                message: "--mesh values must be positive".into(),
            });
        }
        s.mesh = (m[0], m[1]);
    }
    s.dump_fields = common.dump_fields;
    Ok(s)
}

fn write_outputs(outcomes: &[CaseOutcome], output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), outcomes)?,
        None => write_csv(io::stdout().lock(), outcomes)?,
    }
    for o in outcomes {
        if let Ok(v) = &o.result {
            if let Some(vtk) = &v.vtk {
                std::fs::write(dump_path(output, o.spec.id), vtk)?;
            }
        }
    }
    Ok(())
}

fn print_case(o: &CaseOutcome) {
    let s = &o.spec;
    eprintln!(
        "case {}: {} {} a = {} b = {} h = {} layup {} T = {} K C = {} %",
        s.id, s.mode, s.bc, s.a, s.b, s.h, s.layup, s.environment.temperature, s.environment.moisture
    );
    if let Ok(v) = &o.result {
        let (raw, nd) = match s.mode {
            Mode::Vibration => ("omega [rad/s]", "Omega"),
            Mode::Buckling => ("N_cr [N/m]", "Nbar"),
            Mode::Static => ("max |w| [m]", "max |w| / h"),
        };
        eprintln!("  {:>5} {:>16} {:>14}", "index", raw, nd);
        for (k, (r, n)) in v.raw.iter().zip(&v.nondim).enumerate() {
            eprintln!("  {:>5} {:>16.8e} {:>14.6}", k + 1, r, n);
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, common } => {
            let cfg = RunConfig::load(&config)?;
            if cfg.is_sweep() {
                return Err(Error::Config {
                    line: 0,
                    message: format!(
                        "`run` takes single values; swept keys: {} (use `sweep`)",
                        cfg.swept_keys().join(", ")
                    ),
                });
            }
            let settings = settings(&cfg, &common)?;
            let spec = cfg.sweep_plan()?.cases.remove(0);
            let result = run_case(&spec, &settings);
            let outcome = CaseOutcome { spec, result };
            print_case(&outcome);
            let out = common.out.as_deref().or(cfg.output.as_deref());
            write_outputs(std::slice::from_ref(&outcome), out)?;
            outcome.result.map(|_| ())
        }
        Command::Sweep { config, common } => {
            let cfg = RunConfig::load(&config)?;
            let settings = settings(&cfg, &common)?;
            let plan = cfg.sweep_plan()?;
            let outcomes = run_sweep(&plan, &settings, common.workers)?;
            let failures = outcomes.iter().filter(|o| o.result.is_err()).count();
            let out = common.out.as_deref().or(cfg.output.as_deref());
            write_outputs(&outcomes, out)?;
            eprintln!("{} cases, {} failed", outcomes.len(), failures);
            Ok(())
        }
        Command::Validate { meshes } => {
            let meshes = meshes.unwrap_or_else(|| vec![10, 20, 30, 40]);
            let report = run_validation(&meshes)?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
