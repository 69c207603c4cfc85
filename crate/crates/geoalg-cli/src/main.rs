//! `geoalg`: batch verification and exploration of geodesic-function algebras.

mod commands;
mod config;
mod report;
mod suites;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Alg, Oracle, Point};
use report::Format;
use suites::{Params, Suite};

const MAX_RANK: usize = 5;

#[derive(Parser, Debug)]
#[command(name = "geoalg", version, about = "Verify and explore Poisson algebras of geodesic functions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "jsonl", global = true)]
    format: Format,
    /// Seed for random-point checks.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long)]
        p: Option<u32>,
        /// key = value file with defaults (suites, n, level, p, seed).
        #[arg(long)]
        config: Option<String>,
    },
    /// Bracket of two expressions.
    Bracket {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
        lhs: String,
        rhs: String,
    },
    /// Braid-group action of a word on generic data.
    Braid {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// e.g. "b12 b23 b31^-1"; the rightmost generator acts first.
        #[arg(long)]
        word: String,
        /// Matrix form instead of componentwise formulas.
        #[arg(long)]
        matrix: bool,
        /// Highest level of the generic family.
        #[arg(long, default_value_t = 3)]
        cap: i32,
    },
    /// Central elements and their checks.
    Centers {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// D_n reduction rows or the level-p matrix.
    Reduce {
        #[arg(long, requires = "k")]
        dn: bool,
        #[arg(long)]
        k: Option<i32>,
        #[arg(long)]
        level_p: Option<u32>,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Geodesic function G_ij in shear coordinates.
    Geodesic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// e.g. "z1=0,z2=0,z3=0" or "s1=2,s2=1/2".
        #[arg(long)]
        at: Option<String>,
    },
    /// Stokes matrices at special or random points.
    Stokes {
        #[arg(long, value_enum)]
        point: Point,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

fn check_rank(n: usize) -> Result<(), String> {
    if (2..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(format!("rank {n} outside 2..={MAX_RANK}"))
    }
}

fn verify(suite: Vec<Suite>, n: Option<usize>, level: Option<u32>, p: Option<u32>, cfg_path: Option<String>, seed: u64) -> commands::CmdResult {
    let cfg = match cfg_path {
        Some(path) => config::load(&path)?,
        None => Default::default(),
    };
    let mut suites = suite;
    if suites.is_empty() {
        if let Some(list) = cfg.get("suites") {
            for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                suites.push(Suite::parse(name).ok_or_else(|| format!("unknown suite {name:?} in config"))?);
            }
        }
    }
    if suites.is_empty() {
        return Err("no suite selected; pass --suite or a config with suites = ...".into());
    }
    let params = Params {
        n: n.or(config::get_num(&cfg, "n")?).unwrap_or(3),
        level: level.or(config::get_num(&cfg, "level")?).unwrap_or(3),
        p: p.or(config::get_num(&cfg, "p")?).unwrap_or(2),
        seed: config::get_num(&cfg, "seed")?.unwrap_or(seed),
    };
    check_rank(params.n)?;
    if params.p == 0 {
        return Err("p must be positive".into());
    }
    Ok(suites::run(&suites, params))
}

fn dispatch(cli: Cli) -> commands::CmdResult {
    match cli.command {
        Command::Verify { suite, n, level, p, config } => verify(suite, n, level, p, config, cli.seed),
        Command::Bracket { alg, n, p, oracle, lhs, rhs } => {
            check_rank(n)?;
            commands::bracket(alg, n, p, &lhs, &rhs, oracle)
        }
        Command::Braid { alg, n, p, word, matrix, cap } => {
            check_rank(n)?;
            commands::braid(alg, n, p, &word, matrix, cap)
        }
        Command::Centers { alg, n, p } => {
            check_rank(n)?;
            commands::centers_cmd(alg, n, p, cli.seed)
        }
        Command::Reduce { dn, k, level_p, n } => {
            check_rank(n)?;
            commands::reduce(if dn { k } else { None }, level_p, n)
        }
        Command::Geodesic { n, i, j, at } => commands::geodesic(n, i, j, at.as_deref()),
        Command::Stokes { point, n } => commands::stokes(point, n, cli.seed),
    }
}

fn init_threads() {
    if let Some(t) = std::env::var("GEOALG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A second initialization only happens in tests; ignoring it is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let format = cli.format;
    match dispatch(cli) {
        Ok(reports) => match report::emit(&reports, format) {
            Ok(code) => ExitCode::from(code as u8),
            Err(_) => ExitCode::from(1),
        },
        Err(msg) => {
            eprintln!("error: {msg}\n\nRun `geoalg --help` for usage.");
            ExitCode::from(2)
        }
    }
}
