mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::*;
use config::{resolve, ConfigFile};
use output::RunDir;

const COMMANDS: [&str; 7] = ["potential", "wedge", "misiurewicz", "enumerate", "hyperset", "equidist", "search-near"];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(bifurlab::Error),
    Io(std::io::Error),
}

impl From<bifurlab::Error> for CliError {
    fn from(e: bifurlab::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bifurlab", version, about = "Reproducible bifurcation-current experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with common keys and one table per subcommand; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Activity potential on a grid, optionally with its dd^c mass.
    Potential {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: PotentialFlags,
    },
    /// Wedge product of two activity currents on a two-parameter grid.
    Wedge {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: WedgeFlags,
    },
    /// Newton solve and certification of one preperiodic parameter.
    Misiurewicz {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: MisiurewiczFlags,
    },
    /// All parameters of a one-parameter family with a given preperiod and period.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: EnumerateFlags,
    },
    /// Branch system, balanced samples and holomorphic motion of a Cantor set.
    Hyperset {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: HypersetFlags,
    },
    /// Solution clouds of critical-orbit equations and their discrepancy.
    Equidist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: EquidistFlags,
    },
    /// Budgeted search for certified parameters near a point.
    SearchNear {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SearchNearFlags,
    },
}

struct Session {
    name: &'static str,
    file: ConfigFile,
    seed: u64,
    threads: Option<usize>,
    dir: RunDir,
}

impl Session {
    fn open(name: &'static str, common: &Common) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p, &COMMANDS)?,
            None => ConfigFile::default(),
        };
        let seed = common.seed.or(file.common("seed")?).unwrap_or(0);
        let threads = common.threads.or(file.common("threads")?);
        let out = common
            .out
            .clone()
            .or(file.common::<PathBuf>("out")?)
            .unwrap_or_else(|| PathBuf::from("out"));
        if let Some(n) = threads {
            if n == 0 {
                return Err(CliError::Usage("threads must be positive".into()));
            }
            // fails only if a pool already exists, which cannot happen here
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(Self {
            name,
            file,
            seed,
            threads,
            dir: RunDir::create(&out)?,
        })
    }

    fn config<R, F>(&self, flags: &F) -> Result<R, CliError>
    where
        R: Serialize + serde::de::DeserializeOwned + Default,
        F: Serialize,
    {
        resolve(self.file.section(self.name), flags)
    }

    fn finish<C: Serialize>(self, config: &C) -> Result<(), CliError> {
        self.dir.finish(self.name, self.seed, self.threads, config)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Potential { common, flags } => {
            let mut s = Session::open("potential", &common)?;
            let cfg: Potential = s.config(&flags)?;
            cfg.run(&mut s.dir)?;
            s.finish(&cfg)
        }
        Command::Wedge { common, flags } => {
            let mut s = Session::open("wedge", &common)?;
            let cfg: Wedge = s.config(&flags)?;
            cfg.run(&mut s.dir)?;
            s.finish(&cfg)
        }
        Command::Misiurewicz { common, flags } => {
            let mut s = Session::open("misiurewicz", &common)?;
            let cfg: Misiurewicz = s.config(&flags)?;
            cfg.run(&mut s.dir)?;
            s.finish(&cfg)
        }
        Command::Enumerate { common, flags } => {
            let mut s = Session::open("enumerate", &common)?;
            let cfg: Enumerate = s.config(&flags)?;
            cfg.run(&mut s.dir)?;
            s.finish(&cfg)
        }
        Command::Hyperset { common, flags } => {
            let mut s = Session::open("hyperset", &common)?;
            let cfg: Hyperset = s.config(&flags)?;
            cfg.run(s.seed, &mut s.dir)?;
            s.finish(&cfg)
        }
        Command::Equidist { common, flags } => {
            let mut s = Session::open("equidist", &common)?;
            let cfg: Equidist = s.config(&flags)?;
            cfg.run(s.seed, &mut s.dir)?;
            s.finish(&cfg)
        }
        Command::SearchNear { common, flags } => {
            let mut s = Session::open("search-near", &common)?;
            let cfg: SearchNear = s.config(&flags)?;
            cfg.run(&mut s.dir)?;
            s.finish(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bifurlab: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Domain(_) | CliError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
