//! `tanglekit` command-line front end.
//!
//! Thin orchestration over the core crate: exact counts, cycle spectra,
//! exact total-variation tables, samplers, limit-law reports, the generator
//! constant, brute-force ground truth, and occurrence series. Every report
//! is a pure function of the parsed configuration, so a rerun with the same
//! seed and flags is byte-identical; JSON output embeds the configuration
//! under a `config` key for auditability.

mod cache;
mod commands;
mod render;

pub use render::Format;

use cache::Cache;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use tanglekit_core::Caps;

#[derive(Parser, Debug)]
#[command(
    name = "tanglekit",
    version,
    about = "Tanglegram counting, sampling, and limit-law reports",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed; omitted seeds are drawn from process entropy and recorded
    /// in the output.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cache directory for exact tables and oracle dumps (samples are never
    /// cached). Defaults to $TANGLEKIT_CACHE when set.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Shorthand for --format csv.
    #[arg(long, global = true)]
    csv: bool,

    /// Worker threads (default: one per logical CPU). Output bytes do not
    /// depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Cap override: largest Catalan number for plane-tree enumeration.
    #[arg(long = "cap-plane-trees", global = true, value_name = "VALUE")]
    cap_plane_trees: Option<u64>,

    /// Cap override: largest isomorphism-class count for enumeration.
    #[arg(long = "cap-canonical-trees", global = true, value_name = "VALUE")]
    cap_canonical_trees: Option<u64>,

    /// Cap override: largest leaf count for cycle-spectrum computation.
    #[arg(long = "cap-spectrum", global = true, value_name = "VALUE")]
    cap_spectrum: Option<u64>,

    /// Cap override: largest leaf count for the exact sampler.
    #[arg(long = "cap-sampler", global = true, value_name = "VALUE")]
    cap_sampler: Option<u64>,

    /// Cap override: largest leaf count for brute-force enumeration.
    #[arg(long = "cap-oracle", global = true, value_name = "VALUE")]
    cap_oracle: Option<u64>,

    /// Cap override: largest automorphism-pair orbit the oracle will scan.
    #[arg(long = "cap-orbit", global = true, value_name = "VALUE")]
    cap_orbit: Option<u64>,

    /// Cap override: largest occurrence-series truncation order.
    #[arg(long = "cap-series", global = true, value_name = "VALUE")]
    cap_series: Option<u64>,

    /// Cap override: largest leaf count for exact measure-pair tables.
    #[arg(long = "cap-pairs", global = true, value_name = "VALUE")]
    cap_pairs: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact tanglegram counts and their ratio to the limiting constant.
    Count {
        /// Single size `N` or inclusive range `A..B`.
        range: String,
    },
    /// Cycle-type census of the leaf automorphism group of one tree.
    Spectrum {
        /// Tree in nested-parenthesis form, e.g. "((L,L),(L,L))".
        tree: String,
    },
    /// Exact total-variation distance between the two measures per size.
    Tvd {
        /// Single size `N` or inclusive range `A..B`.
        range: String,
    },
    /// Draw tanglegrams and print one per line.
    Sample {
        /// Leaf count.
        n: u64,
        /// Number of draws.
        count: u64,
        /// Sampling backend.
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Empirical law reports with exact or limiting references.
    Stats {
        #[command(subcommand)]
        law: LawCommand,
    },
    /// The generator-density constant to a requested number of digits.
    Gamma {
        /// Decimal digits to print (1..=150).
        #[arg(long, default_value_t = 10)]
        digits: u32,
        /// Alternative to --digits: target precision, e.g. 1e-10.
        #[arg(long)]
        precision: Option<f64>,
    },
    /// Brute-force ground truth at small sizes.
    Oracle {
        /// Leaf count (within the oracle cap).
        n: u64,
        /// Emit the per-tanglegram stabilizer audit instead of the dump.
        #[arg(long)]
        audit: bool,
    },
    /// Occurrence-count generating table for a fixed branch shape.
    Series {
        /// Branch tree in nested-parenthesis form, e.g. "(L,L)".
        branch: String,
        /// Largest size row to compute.
        #[arg(long, default_value_t = 30)]
        order: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LawCommand {
    /// Matched-cherry distribution against the Poisson(1/4) limit.
    MatchedCherries {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Cherry count of the left tree against the exact finite-n marginal.
    Cherries {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: u64,
    },
    /// Plane-tree height tails against the theta limit law.
    Height {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: u64,
    },
    /// Exact root-branch probability against its limit.
    RootBranch {
        /// Branch tree in nested-parenthesis form.
        #[arg(long)]
        branch: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Uniform over tanglegrams (capped).
    Exact,
    /// Two uniform plane trees joined by a uniform matching.
    Approximate,
}

#[derive(Serialize, Debug, Clone)]
struct CapsEcho {
    plane_trees: u64,
    canonical_trees: u64,
    spectrum_leaves: u32,
    sampler_leaves: u32,
    oracle_leaves: u32,
    orbit: u64,
    series_order: u32,
    pair_table_leaves: u32,
}

impl From<&Caps> for CapsEcho {
    fn from(c: &Caps) -> CapsEcho {
        CapsEcho {
            plane_trees: c.plane_trees,
            canonical_trees: c.canonical_trees,
            spectrum_leaves: c.spectrum_leaves,
            sampler_leaves: c.sampler_leaves,
            oracle_leaves: c.oracle_leaves,
            orbit: c.orbit,
            series_order: c.series_order,
            pair_table_leaves: c.pair_table_leaves,
        }
    }
}

/// Configuration echo embedded in every JSON report.
#[derive(Serialize, Debug, Clone)]
pub(crate) struct ConfigEcho {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    args: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_dir: Option<String>,
    caps: CapsEcho,
}

pub(crate) struct Ctx {
    pub caps: Caps,
    pub cache: Cache,
    pub format: Format,
    pub config: ConfigEcho,
}

/// Everything a command run produces.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub(crate) struct Rendered {
    pub stdout: String,
    /// Number of in-report checks that missed their stated tolerance.
    pub failed_checks: usize,
}

impl Rendered {
    pub fn plain(stdout: String) -> Rendered {
        Rendered { stdout, failed_checks: 0 }
    }
}

fn auto_seed() -> u64 {
    use std::collections::hash_map::RandomState;
    use std::hash::{BuildHasher, Hasher};
    RandomState::new().build_hasher().finish()
}

pub(crate) fn resolve_seed(given: Option<u64>) -> (u64, bool) {
    match given {
        Some(s) => (s, false),
        None => (auto_seed(), true),
    }
}

/// Inclusive size range, `"7"` or `"2..12"`.
pub(crate) struct NRange {
    pub lo: u64,
    pub hi: u64,
}

impl NRange {
    pub fn parse(text: &str) -> Result<NRange, String> {
        let parsed = match text.split_once("..") {
            Some((a, b)) => {
                let lo = a.trim().parse::<u64>().map_err(|e| e.to_string())?;
                let hi = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
                NRange { lo, hi }
            }
            None => {
                let n = text.trim().parse::<u64>().map_err(|e| e.to_string())?;
                NRange { lo: n, hi: n }
            }
        };
        if parsed.lo == 0 {
            return Err("sizes start at 1".to_string());
        }
        if parsed.lo > parsed.hi {
            return Err(format!("empty range {}..{}", parsed.lo, parsed.hi));
        }
        if parsed.hi - parsed.lo > 100_000 {
            return Err("range too large".to_string());
        }
        Ok(parsed)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

fn build_caps(cli: &Cli) -> Result<Caps, tanglekit_core::Error> {
    let mut caps = Caps::default();
    let overrides = [
        ("plane-trees", cli.cap_plane_trees),
        ("canonical-trees", cli.cap_canonical_trees),
        ("spectrum", cli.cap_spectrum),
        ("sampler", cli.cap_sampler),
        ("oracle", cli.cap_oracle),
        ("orbit", cli.cap_orbit),
        ("series", cli.cap_series),
        ("pairs", cli.cap_pairs),
    ];
    for (name, value) in overrides {
        if let Some(v) = value {
            caps.set_by_name(name, v)?;
        }
    }
    Ok(caps)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Count { .. } => "count",
        Command::Spectrum { .. } => "spectrum",
        Command::Tvd { .. } => "tvd",
        Command::Sample { .. } => "sample",
        Command::Stats { .. } => "stats",
        Command::Gamma { .. } => "gamma",
        Command::Oracle { .. } => "oracle",
        Command::Series { .. } => "series",
    }
}

fn command_args(c: &Command) -> serde_json::Value {
    match c {
        Command::Count { range } | Command::Tvd { range } => {
            serde_json::json!({ "range": range })
        }
        Command::Spectrum { tree } => serde_json::json!({ "tree": tree }),
        Command::Sample { n, count, mode } => {
            serde_json::json!({ "n": n, "count": count, "mode": mode_name(*mode) })
        }
        Command::Stats { law } => match law {
            LawCommand::MatchedCherries { n, samples, mode } => serde_json::json!({
                "law": "matched-cherries", "n": n, "samples": samples, "mode": mode_name(*mode)
            }),
            LawCommand::Cherries { n, samples } => {
                serde_json::json!({ "law": "cherries", "n": n, "samples": samples })
            }
            LawCommand::Height { n, samples } => {
                serde_json::json!({ "law": "height", "n": n, "samples": samples })
            }
            LawCommand::RootBranch { branch, n } => {
                serde_json::json!({ "law": "root-branch", "branch": branch, "n": n })
            }
        },
        Command::Gamma { digits, precision } => match precision {
            Some(p) => serde_json::json!({ "digits": digits, "precision": p }),
            None => serde_json::json!({ "digits": digits }),
        },
        Command::Oracle { n, audit } => serde_json::json!({ "n": n, "audit": audit }),
        Command::Series { branch, order } => {
            serde_json::json!({ "branch": branch, "order": order })
        }
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Approximate => "approximate",
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Text => "text",
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Parses `argv` (including the program name) and runs the command.
/// Never panics on user input; all failures come back in the outcome.
pub fn run<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let argv: Vec<&str> = argv.iter().map(|s| s.as_ref()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            let code = err.exit_code();
            return if err.use_stderr() {
                Outcome { stdout: String::new(), stderr: rendered, code }
            } else {
                Outcome { stdout: rendered, stderr: String::new(), code }
            };
        }
    };

    let caps = match build_caps(&cli) {
        Ok(caps) => caps,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
                code: 2,
            }
        }
    };

    let format = if cli.csv { Format::Csv } else { cli.format };
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("TANGLEKIT_CACHE").map(PathBuf::from));
    let config = ConfigEcho {
        command: command_name(&cli.command).to_string(),
        args: Some(command_args(&cli.command)),
        seed: cli.seed,
        format: format_name(format).to_string(),
        threads: cli.threads,
        cache_dir: cache_dir.as_ref().map(|p| p.display().to_string()),
        caps: CapsEcho::from(&caps),
    };
    let mut ctx = Ctx {
        caps,
        cache: Cache::new(cache_dir),
        format,
        config,
    };

    let mut dispatch = || -> Result<Rendered, tanglekit_core::Error> {
        match &cli.command {
            Command::Count { range } => commands::count(&mut ctx, range),
            Command::Spectrum { tree } => commands::spectrum(&mut ctx, tree),
            Command::Tvd { range } => commands::tvd(&mut ctx, range),
            Command::Sample { n, count, mode } => {
                commands::sample(&mut ctx, *n, *count, *mode, cli.seed)
            }
            Command::Stats { law } => match law {
                LawCommand::MatchedCherries { n, samples, mode } => {
                    commands::stats_matched_cherries(&mut ctx, *n, *samples, *mode, cli.seed)
                }
                LawCommand::Cherries { n, samples } => {
                    commands::stats_cherries(&mut ctx, *n, *samples, cli.seed)
                }
                LawCommand::Height { n, samples } => {
                    commands::stats_height(&mut ctx, *n, *samples, cli.seed)
                }
                LawCommand::RootBranch { branch, n } => {
                    commands::stats_root_branch(&mut ctx, branch, *n)
                }
            },
            Command::Gamma { digits, precision } => {
                commands::gamma(&mut ctx, *digits, *precision)
            }
            Command::Oracle { n, audit } => commands::oracle(&mut ctx, *n, *audit),
            Command::Series { branch, order } => commands::series(&mut ctx, branch, *order),
        }
    };

    let result = match cli.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build();
            match pool {
                Ok(pool) => pool.install(dispatch),
                Err(e) => {
                    return Outcome {
                        stdout: String::new(),
                        stderr: format!("error: {e}\n"),
                        code: 2,
                    }
                }
            }
        }
        None => dispatch(),
    };

    match result {
        Ok(rendered) => Outcome {
            stdout: rendered.stdout,
            stderr: String::new(),
            code: if rendered.failed_checks > 0 { 1 } else { 0 },
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 2,
        },
    }
}
