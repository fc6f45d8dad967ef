use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use crashskew::inference::Criterion;
use crashskew::simulate::{Innovation, DEFAULT_BURN_IN};
use crashskew::GarchSParams;

use crashskew_cli::commands::{self, FitArgs, RegressArgs, SeriesInput, SimulateArgs, Transform};
use crashskew_cli::config::Settings;
use crashskew_cli::{pipeline, CliResult, Outcome};

#[derive(Parser)]
#[command(name = "crashskew", version, about = "Conditional-skewness crash-risk toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every table.
    Pipeline(PipelineArgs),
    /// Fit GARCH-S and GARCH(1,1) to a price (or return) series.
    Fit(FitCmd),
    /// Run one regression described by a spec file.
    Regress(RegressCmd),
    /// Augmented Dickey-Fuller test (constant, no trend).
    Adf(AdfCmd),
    /// Mean, min, max and standard deviation of a series.
    Describe(SeriesCmd),
    /// Pairwise correlations of a wide CSV.
    Corr(CorrCmd),
    /// Simulate a GARCH-S price path.
    Simulate(SimulateCmd),
}

#[derive(Args)]
struct PipelineArgs {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    prices: Option<String>,
    #[arg(long)]
    cases: Option<String>,
    #[arg(long)]
    epu: Option<String>,
    #[arg(long)]
    emu: Option<String>,
    #[arg(long = "emv-id")]
    emv_id: Option<String>,
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long = "max-p")]
    max_p: Option<String>,
    #[arg(long = "max-q")]
    max_q: Option<String>,
    /// aic or sc
    #[arg(long)]
    criterion: Option<String>,
    #[arg(long = "out-dir")]
    out_dir: Option<String>,
    #[arg(long = "date-col")]
    date_col: Option<String>,
    #[arg(long = "value-col")]
    value_col: Option<String>,
}

#[derive(Args)]
struct SeriesCmd {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "date-col", default_value = "date")]
    date_col: String,
    #[arg(long = "value-col", default_value = "value")]
    value_col: String,
    /// none, log-return, log-growth or log-change
    #[arg(long, default_value = "none")]
    transform: Transform,
}

impl SeriesCmd {
    fn input(&self) -> SeriesInput {
        SeriesInput {
            path: self.input.clone(),
            date_col: self.date_col.clone(),
            value_col: self.value_col.clone(),
            transform: self.transform,
        }
    }
}

#[derive(Args)]
struct FitCmd {
    #[arg(long)]
    prices: PathBuf,
    #[arg(long = "date-col", default_value = "date")]
    date_col: String,
    #[arg(long = "value-col", default_value = "value")]
    value_col: String,
    /// The value column already holds log returns.
    #[arg(long)]
    returns: bool,
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RegressCmd {
    /// Wide CSV with a date column and one column per variable.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "date-col", default_value = "date")]
    date_col: String,
    /// Used when the spec contains a `search` line.
    #[arg(long, default_value = "aic")]
    criterion: Criterion,
    /// Also write the result as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdfCmd {
    #[command(flatten)]
    series: SeriesCmd,
    /// Defaults to the Schwert rule.
    #[arg(long = "max-lags")]
    max_lags: Option<usize>,
}

#[derive(Args)]
struct CorrCmd {
    #[arg(long)]
    data: PathBuf,
    #[arg(long = "date-col", default_value = "date")]
    date_col: String,
    /// Add before/after panels split at this date.
    #[arg(long)]
    split: Option<NaiveDate>,
}

#[derive(Args)]
struct SimulateCmd {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "burn-in", default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Gaussian innovations instead of Gram-Charlier.
    #[arg(long)]
    gaussian: bool,
    #[arg(long, default_value = "2017-01-03")]
    start: NaiveDate,
    #[arg(long, default_value = "simulated.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = -0.0425, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 3.69e-6)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.2065)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.7720)]
    alpha2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta0: f64,
    #[arg(long, default_value_t = 0.0361, allow_hyphen_values = true)]
    beta1: f64,
    #[arg(long, default_value_t = 0.1544, allow_hyphen_values = true)]
    beta2: f64,
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Pipeline(a) => {
            let file = match &a.config {
                Some(p) => Settings::load(p)?,
                None => Settings::default(),
            };
            let flags = Settings {
                prices: a.prices,
                cases: a.cases,
                epu: a.epu,
                emu: a.emu,
                emv_id: a.emv_id,
                date_col: a.date_col,
                value_col: a.value_col,
                cutoff: a.cutoff,
                max_p: a.max_p,
                max_q: a.max_q,
                criterion: a.criterion,
                out_dir: a.out_dir,
                ..Default::default()
            };
            let cfg = file.overridden_by(flags).resolve()?;
            let out = pipeline::run(&cfg)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(out.outcome)
        }
        Command::Fit(a) => {
            let out = commands::fit(&FitArgs {
                input: SeriesInput {
                    path: a.prices,
                    date_col: a.date_col,
                    value_col: a.value_col,
                    transform: Transform::None,
                },
                returns: a.returns,
                out_dir: a.out_dir,
            })?;
            print!("{}", out.table.render_text());
            Ok(out.outcome)
        }
        Command::Regress(a) => {
            print!(
                "{}",
                commands::regress(&RegressArgs {
                    data: a.data,
                    spec: a.spec,
                    date_col: a.date_col,
                    criterion: a.criterion,
                    out: a.out,
                })?
            );
            Ok(Outcome::Success)
        }
        Command::Adf(a) => {
            print!("{}", commands::adf(&a.series.input(), a.max_lags)?);
            Ok(Outcome::Success)
        }
        Command::Describe(a) => {
            print!("{}", commands::describe_cmd(&a.input())?);
            Ok(Outcome::Success)
        }
        Command::Corr(a) => {
            print!("{}", commands::corr(&a.data, &a.date_col, a.split)?);
            Ok(Outcome::Success)
        }
        Command::Simulate(a) => {
            let params = GarchSParams::from_array([
                a.mu, a.alpha0, a.alpha1, a.alpha2, a.beta0, a.beta1, a.beta2,
            ]);
            print!(
                "{}",
                commands::simulate(&SimulateArgs {
                    params,
                    n: a.n,
                    burn_in: a.burn_in,
                    seed: a.seed,
                    innovation: if a.gaussian { Innovation::Gaussian } else { Innovation::GramCharlier },
                    start: a.start,
                    out: a.out,
                })?
            );
            Ok(Outcome::Success)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on bad usage; 2 is reserved for non-convergence here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            if outcome == Outcome::NotConverged {
                eprintln!("warning: the optimizer did not converge; results were written anyway");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
