//! `tlpot` — peaks-over-threshold tail analysis from the command line.
//!
//! The process is a single-threaded orchestrator: any parallelism lives
//! inside the library calls and never affects output bytes, so identical
//! command lines over identical inputs produce byte-identical output.
//! Data goes to `--out` or standard output; diagnostics go to standard
//! error. Exit codes: 0 success, 1 usage error, 2 unusable input or data,
//! 3 degenerate computation.

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use tlpot_core::experiments::{self, ExperimentOutcome, Generator, Preset};
use tlpot_core::gibbs::{estimate_tlpa, GibbsConfig};
use tlpot_core::io::{self, ColumnSel, Dataset, FitReport};
use tlpot_core::posterior::{make_excesses, sp_posterior};
use tlpot_core::qq::qq_data;
use tlpot_core::threshold::{
    full_rank_range, scan, select_with_strategy, SelectionGrid, SelectionStrategy,
};
use tlpot_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tlpot",
    version,
    about = "Peaks-over-threshold tail analysis: strict Pareto and \
             Topp-Leone Pareto fits, threshold scans, automatic threshold \
             selection, and reproducible simulation studies",
    after_help = "Every randomized command is driven entirely by --seed \
                  (default 0); rerunning the same command line on the same \
                  input produces byte-identical output."
)]
struct Cli {
    /// Master seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write data output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker-pool size for the parallel stages inside experiments and
    /// scans. Output bytes do not depend on this value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Comma-separated values: UTF-8, LF line endings, header row,
    /// shortest-exact numbers (round-trip to identical bits).
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a reproducible sample from a distribution or mixture.
    ///
    /// DIST accepts sp(gamma=..), tlpa(alpha=..,gamma=..), frechet(gamma=..),
    /// burr(lambda=..,tau=..,eta=..), normal(mu=..,sigma2=..), or a spliced
    /// mixture such as "normal(mu=5,sigma2=1)*500+sp(gamma=5)*100" whose
    /// tail block is rescaled to start at the body maximum.
    Simulate {
        /// Distribution or mixture to sample.
        #[arg(long, value_name = "DIST")]
        dist: String,
        /// Sample size; required for a plain distribution, optional (but
        /// checked) for a mixture, whose component counts imply it.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
    /// Estimate both tail models at every threshold rank in a range.
    Scan {
        #[command(flatten)]
        data: DataArgs,
        /// Lowest 1-based threshold rank (default: 1).
        #[arg(long, value_name = "RANK")]
        min_rank: Option<usize>,
        /// Highest 1-based threshold rank (default: n-2).
        #[arg(long, value_name = "RANK")]
        max_rank: Option<usize>,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Select a threshold automatically by loss minimization.
    Select {
        #[command(flatten)]
        data: DataArgs,
        /// grid: joint search over exponent and rank; profile: plug-in
        /// exponent per rank.
        #[arg(long, default_value_t = tlpot_core::threshold::DEFAULT_SELECTION_STRATEGY)]
        strategy: SelectionStrategy,
    },
    /// Fit both tail models at one threshold rank.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        /// 1-based threshold rank (the threshold is the rank-th smallest
        /// observation).
        #[arg(long, value_name = "RANK")]
        rank: usize,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Emit log-scale quantile pairs for both fitted models at one rank.
    Qq {
        #[command(flatten)]
        data: DataArgs,
        /// 1-based threshold rank.
        #[arg(long, value_name = "RANK")]
        rank: usize,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Run a named simulation study end to end.
    ///
    /// case1..case3 average per-rank scans of single-distribution samples;
    /// table1/table2 run automatic selection on spliced body+tail mixtures
    /// and report the selection means.
    Experiment {
        /// case1, case2, case3, table1, or table2.
        #[arg(long, value_name = "NAME")]
        preset: String,
        /// Number of repetitions.
        #[arg(long, default_value_t = 1000)]
        repetitions: usize,
        /// Emit per-repetition records instead of the averaged block.
        #[arg(long)]
        raw: bool,
    },
    /// Histogram bin counts, optionally marking the selected threshold.
    Hist {
        #[command(flatten)]
        data: DataArgs,
        /// Number of bins (default: Freedman-Diaconis rule).
        #[arg(long, value_name = "N")]
        bins: Option<usize>,
        /// Run automatic selection (grid strategy) and mark the selected
        /// threshold in the bin that contains it.
        #[arg(long)]
        mark_selected: bool,
    },
}

#[derive(clap::Args)]
struct DataArgs {
    /// CSV file of observations.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Column holding the observations: a 0-based index or a header name.
    #[arg(long, default_value = "0")]
    column: String,
}

#[derive(clap::Args)]
struct ChainArgs {
    /// Sampler pairs per chain.
    #[arg(long, value_name = "N")]
    pairs: Option<usize>,
    /// Leading pairs dropped before averaging.
    #[arg(long, value_name = "N")]
    burn_in: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let column: ColumnSel = self.column.parse()?;
        io::ingest_csv(&self.input, &column)
    }

    /// Observations sorted ascending, as the threshold machinery expects.
    fn load_sorted(&self) -> Result<Vec<f64>> {
        let mut values = self.load()?.values;
        values.sort_unstable_by(f64::total_cmp);
        Ok(values)
    }
}

impl ChainArgs {
    fn config(&self, seed: u64) -> GibbsConfig {
        let mut cfg = GibbsConfig::new(seed);
        if let Some(p) = self.pairs {
            cfg.n_pairs = p;
        }
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        cfg
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version arrive here as "errors"; they are successes.
            let is_display = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_display {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: worker pool already initialized; --threads ignored");
        }
    }
    match run(&cli) {
        Ok(output) => match emit(&cli.out, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn emit(out: &Option<PathBuf>, data: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, data).map_err(Error::from),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data.as_bytes()).map_err(Error::from)?;
            stdout.flush().map_err(Error::from)
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    let Format::Csv = cli.format;
    match &cli.command {
        Command::Simulate { dist, n } => {
            let generator: Generator = dist.parse()?;
            let n_obs = match (n, generator.implied_n()) {
                (Some(n), _) => *n,
                (None, Some(implied)) => implied,
                (None, None) => {
                    return Err(Error::Data(
                        "--n is required when --dist is a plain distribution".into(),
                    ))
                }
            };
            let values = experiments::generate(&generator, n_obs, cli.seed)?;
            io::to_string_with(|w| io::write_values(w, "value", &values))
        }
        Command::Scan {
            data,
            min_rank,
            max_rank,
            chain,
        } => {
            let values = data.load_sorted()?;
            let (full_lo, full_hi) = full_rank_range(values.len())?;
            let range = (min_rank.unwrap_or(full_lo), max_rank.unwrap_or(full_hi));
            let curve = scan(&values, range, &chain.config(cli.seed))?;
            for skip in &curve.skipped {
                eprintln!("note: rank {} skipped: {}", skip.rank, skip.reason);
            }
            io::to_string_with(|w| io::write_curve(w, &curve))
        }
        Command::Select { data, strategy } => {
            let values = data.load_sorted()?;
            let grid = SelectionGrid::default_for_len(values.len())?;
            let sel = select_with_strategy(&values, &grid, *strategy)?;
            io::to_string_with(|w| io::write_selection(w, &sel))
        }
        Command::Fit { data, rank, chain } => {
            let values = data.load_sorted()?;
            let (u, sample) = make_excesses(&values, *rank)?;
            let sp = sp_posterior(&sample);
            let tlpa = estimate_tlpa(&sample, &chain.config(cli.seed))?;
            let report = FitReport::new(*rank, u, sample.n(), &sp, &tlpa);
            io::to_string_with(|w| io::write_fit(w, &report))
        }
        Command::Qq { data, rank, chain } => {
            let values = data.load_sorted()?;
            let (u, sample) = make_excesses(&values, *rank)?;
            let sp = sp_posterior(&sample);
            let tlpa = estimate_tlpa(&sample, &chain.config(cli.seed))?;
            let table = qq_data(&sample, u, &sp, &tlpa);
            io::to_string_with(|w| io::write_qq(w, &table))
        }
        Command::Experiment {
            preset,
            repetitions,
            raw,
        } => {
            let preset: Preset = preset.parse()?;
            let spec = preset.spec(*repetitions, cli.seed)?;
            match experiments::run(&spec)? {
                ExperimentOutcome::Curve(case) => {
                    report_failures(case.failures.iter().map(|f| (f.rep, &f.reason)));
                    if *raw {
                        io::to_string_with(|w| io::write_raw_case(w, &case))
                    } else {
                        io::to_string_with(|w| io::write_avg_curve(w, &case.averaged))
                    }
                }
                ExperimentOutcome::Selection(study) => {
                    report_failures(study.failures.iter().map(|f| (f.rep, &f.reason)));
                    if *raw {
                        io::to_string_with(|w| io::write_raw_selections(w, &study))
                    } else {
                        io::to_string_with(|w| io::write_mixture_summary(w, &study))
                    }
                }
            }
        }
        Command::Hist {
            data,
            bins,
            mark_selected,
        } => {
            let values = data.load_sorted()?;
            let marker = if *mark_selected {
                let grid = SelectionGrid::default_for_len(values.len())?;
                let sel = select_with_strategy(&values, &grid, SelectionStrategy::Grid)?;
                eprintln!(
                    "note: selected rank {} (threshold {})",
                    sel.rank_sharp, sel.u_sharp
                );
                Some(sel.u_sharp)
            } else {
                None
            };
            let bins = io::hist_bins(&values, *bins)?;
            io::to_string_with(|w| io::write_hist(w, &bins, marker))
        }
    }
}

fn report_failures<'a>(failures: impl Iterator<Item = (usize, &'a String)>) {
    for (rep, reason) in failures {
        eprintln!("note: repetition {rep} dropped: {reason}");
    }
}
