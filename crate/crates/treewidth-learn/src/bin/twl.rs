//! Thin command-line front end over the library: learn a bounded-width
//! model from a distribution or samples, project, minimize a tabulated
//! symmetric submodular function, validate decompositions, and generate
//! test models.
//!
//! Exit codes: 0 success, 1 bad input, 2 validation failure, 3 no
//! decomposition compatible with the discovered family.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use treewidth_learn::error::Error;
use treewidth_learn::modelgen::{
    draw_samples, generate, measure_alpha, random_factorizing_dist, random_ktree_td,
    GeneratorSpec,
};
use treewidth_learn::submodular::{queyranne_minimize, SetFunctionOracle};
use treewidth_learn::{io, learn, projection_kl, LearnConfig, LearnSource};

#[derive(Parser)]
#[command(name = "twl", version, about = "Learn bounded tree-width graphical models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Samples,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a width-k decomposition from a distribution or sample file.
    Learn {
        /// Distribution file (exact mode) or sample file (samples mode).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Width bound.
        #[arg(long)]
        k: usize,
        /// Target divergence in bits.
        #[arg(long)]
        epsilon: f64,
        /// Target failure probability (sample mode).
        #[arg(long)]
        delta: f64,
        /// Assumed strong-connectivity floor in bits.
        #[arg(long)]
        alpha: Option<f64>,
        /// Replace the derived per-query entropy accuracy.
        #[arg(long)]
        eps1_override: Option<f64>,
        /// Replace the derived partition threshold component.
        #[arg(long)]
        eps2_override: Option<f64>,
        /// Write the learned decomposition here.
        #[arg(long)]
        out_td: Option<PathBuf>,
        /// Write the materialized learned distribution here.
        #[arg(long)]
        out_dist: Option<PathBuf>,
        /// Write the discovered partition family here.
        #[arg(long)]
        dump_family: Option<PathBuf>,
        /// Print the derived tolerance schedule before running.
        #[arg(long)]
        verbose: bool,
    },
    /// Divergence of a distribution from its projection onto a tree.
    Project {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        td: PathBuf,
    },
    /// Minimize a tabulated symmetric submodular function.
    Minimize {
        /// `ground n` header plus one `mask value` line per subset.
        #[arg(long)]
        oracle_file: PathBuf,
    },
    /// Check a tree decomposition file; exit 2 on any defect.
    ValidateTd {
        #[arg(long)]
        td: PathBuf,
        /// Ground set size; defaults to one past the largest vertex id.
        #[arg(long)]
        n: Option<usize>,
        /// Also require width at most k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Generate a random width-k model and report its connectivity floor.
    GenModel {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        card: usize,
        /// How far conditionals sit from uniform, in (0, 0.5).
        #[arg(long, default_value_t = 0.25)]
        strength: f64,
        /// Redraw (bumping the seed) until the floor reaches this value.
        #[arg(long)]
        min_alpha: Option<f64>,
        #[arg(long, default_value_t = 100)]
        max_tries: usize,
        #[arg(long)]
        out_td: Option<PathBuf>,
        #[arg(long)]
        out_dist: Option<PathBuf>,
    },
    /// Draw seeded i.i.d. samples from a distribution file.
    Sample {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure the strong-connectivity floor of a distribution over a tree.
    MeasureAlpha {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        td: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Error::NoDecomposition) => {
            eprintln!("error: no width-bounded decomposition is compatible with the family");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn alpha_line(alpha: f64) -> String {
    if alpha.is_infinite() {
        "alpha=inf".to_string()
    } else {
        format!("alpha={alpha:.12e}")
    }
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Learn {
            input,
            mode,
            k,
            epsilon,
            delta,
            alpha,
            eps1_override,
            eps2_override,
            out_td,
            out_dist,
            dump_family,
            verbose,
        } => {
            let cfg = LearnConfig {
                k,
                eps: epsilon,
                delta,
                alpha,
                eps1_override,
                eps2_override,
            };
            let (source, n, max_card, exact) = match mode {
                Mode::Exact => {
                    let p = io::read_dist(&input)?;
                    let n = p.n();
                    let c = p.vars().cards().iter().copied().max().unwrap_or(2);
                    (LearnSource::Exact(p), n, c, true)
                }
                Mode::Samples => {
                    let s = io::read_samples(&input)?;
                    let n = s.vars().n();
                    let c = s.vars().cards().iter().copied().max().unwrap_or(2);
                    (LearnSource::Samples(s), n, c, false)
                }
            };
            if verbose {
                let t = cfg.derived(n, max_card, exact)?;
                println!(
                    "eps1={:.12e} eps2={:.12e} delta1={:.12e} threshold={:.12e}",
                    t.eps1, t.eps2, t.delta1, t.threshold
                );
                match t.required_m {
                    Some(m) => println!("required_m={m}"),
                    None => println!("required_m=none"),
                }
            }
            let learned = learn(&source, &cfg)?;
            if let Some(path) = dump_family {
                std::fs::write(&path, learned.family.dump())?;
            }
            if let Some(path) = out_td {
                io::write_td(&path, &learned.td)?;
            }
            if let Some(path) = out_dist {
                match learned.model.materialize() {
                    Ok(table) => io::write_dist(&path, &table)?,
                    Err(Error::TableTooLarge { cells, cap }) => {
                        eprintln!(
                            "note: skipped --out-dist, table needs {cells} cells (cap {cap})"
                        );
                    }
                    Err(e) => return Err(e),
                }
            }
            println!(
                "kl={:.12e} width={} bags={}",
                learned.kl,
                learned.td.width(),
                learned.td.bags.len()
            );
            Ok(0)
        }
        Command::Project { dist, td } => {
            let p = io::read_dist(&dist)?;
            let t = io::read_td(&td)?;
            let kl = projection_kl(&p, &t)?;
            println!("kl={kl:.12e}");
            Ok(0)
        }
        Command::Minimize { oracle_file } => {
            let f = io::read_set_function(&oracle_file)?;
            let values = f.values;
            let oracle = SetFunctionOracle::new((0..f.n).collect(), move |s: &[usize]| {
                let mask: usize = s.iter().map(|&v| 1usize << v).sum();
                values[mask]
            });
            let cut = queyranne_minimize(&oracle)?;
            println!("set={} value={:.12e}", cut.set, cut.value);
            Ok(0)
        }
        Command::ValidateTd { td, n, k } => {
            let t = io::read_td(&td)?;
            let n = n.unwrap_or_else(|| {
                t.bags
                    .iter()
                    .flat_map(|b| b.iter())
                    .max()
                    .map_or(0, |v| v + 1)
            });
            if let Err(e) = t.validate(n) {
                eprintln!("invalid: {e}");
                return Ok(2);
            }
            if let Some(k) = k {
                if t.width() > k {
                    eprintln!("invalid: width {} exceeds bound {k}", t.width());
                    return Ok(2);
                }
            }
            println!("valid width={} bags={}", t.width(), t.bags.len());
            Ok(0)
        }
        Command::GenModel {
            n,
            k,
            seed,
            card,
            strength,
            min_alpha,
            max_tries,
            out_td,
            out_dist,
        } => {
            let spec = GeneratorSpec {
                n,
                k,
                seed,
                card,
                dependence_strength: strength,
            };
            let (td, p, alpha) = match min_alpha {
                Some(floor) => generate(&spec, floor, max_tries)?,
                None => {
                    let td = random_ktree_td(&spec)?;
                    let p = random_factorizing_dist(&td, &spec)?;
                    let alpha = if n <= 12 {
                        measure_alpha(&p, &td)?
                    } else {
                        f64::NAN
                    };
                    (td, p, alpha)
                }
            };
            if let Some(path) = out_td {
                io::write_td(&path, &td)?;
            }
            if let Some(path) = out_dist {
                io::write_dist(&path, &p)?;
            }
            if alpha.is_nan() {
                eprintln!("note: alpha not measured (n > 12)");
            } else {
                println!("{}", alpha_line(alpha));
            }
            Ok(0)
        }
        Command::Sample { dist, m, seed, out } => {
            let p = io::read_dist(&dist)?;
            let s = draw_samples(&p, m, seed)?;
            io::write_samples(&out, &s)?;
            Ok(0)
        }
        Command::MeasureAlpha { dist, td } => {
            let p = io::read_dist(&dist)?;
            let t = io::read_td(&td)?;
            println!("{}", alpha_line(measure_alpha(&p, &t)?));
            Ok(0)
        }
    }
}
