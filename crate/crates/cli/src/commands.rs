//! The subcommands. Each returns the text it would print (if any) so the
//! binary and the tests share one code path.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use crashskew::garchs::{
    arch_lm_test, conditional_skewness, GarchSFit, GarchSParams, Model, DEFAULT_ARCH_LAGS,
    PARAM_NAMES,
};
use crashskew::inference::{
    adf_test, corr_matrix, describe, lag_search, ols, schwert_max_lags, CorrCell, Criterion,
    RegressionSpec, Term,
};
use crashskew::optimizer::{fit_garch11, fit_garchs};
use crashskew::simulate::{simulate_path, Innovation, SimConfig, RNG_ALGORITHM};
use crashskew::timeseries::{
    load_csv, load_table_csv, log_change_zero_guard, log_growth, log_return, parse_date,
};
use crashskew::DatedSeries;

use crate::error::{CliError, CliResult, Outcome};
use crate::pipeline::{regression_table, series_csv};
use crate::report::{fmt4, write_file, Entry, Panel, Row, Table, STAR_NOTE};

/// Where a command reads its single series from.
#[derive(Debug, Clone)]
pub struct SeriesInput {
    pub path: PathBuf,
    pub date_col: String,
    pub value_col: String,
    pub transform: Transform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    None,
    LogReturn,
    LogGrowth,
    LogChange,
}

impl std::str::FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Transform::None),
            "log-return" => Ok(Transform::LogReturn),
            "log-growth" => Ok(Transform::LogGrowth),
            "log-change" => Ok(Transform::LogChange),
            _ => Err(format!(
                "unknown transform `{s}` (none, log-return, log-growth, log-change)"
            )),
        }
    }
}

impl SeriesInput {
    pub fn load(&self) -> CliResult<DatedSeries> {
        let (s, report) = load_csv(&self.path, &self.date_col, &self.value_col)
            .map_err(CliError::context(format!("loading {}", self.path.display())))?;
        if report.dropped > 0 {
            eprintln!("{}: {report}", self.path.display());
        }
        Ok(match self.transform {
            Transform::None => s,
            Transform::LogReturn => log_return(&s)?,
            Transform::LogGrowth => log_growth(&s)?,
            Transform::LogChange => log_change_zero_guard(&s)?,
        })
    }
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------- fit

pub struct FitArgs {
    pub input: SeriesInput,
    /// The input column already holds returns.
    pub returns: bool,
    pub out_dir: PathBuf,
}

pub struct FitOutput {
    pub garchs: GarchSFit,
    pub garch11: GarchSFit,
    pub table: Table,
    pub files: Vec<PathBuf>,
    pub outcome: Outcome,
}

pub fn fit(args: &FitArgs) -> CliResult<FitOutput> {
    let raw = args.input.load()?;
    let r = if args.returns { raw } else { log_return(&raw)? }.renamed("r");
    let garch11 = fit_garch11(&r).map_err(CliError::context("fitting GARCH(1,1)"))?;
    let garchs = fit_garchs(&r, None).map_err(CliError::context("fitting GARCH-S"))?;
    let arch = arch_lm_test(&garch11.state.eps, DEFAULT_ARCH_LAGS)?;
    let table = table1(&garchs, &garch11, arch.f_stat, arch.p_value);

    create_dir(&args.out_dir)?;
    let mut files = table.write(&args.out_dir)?.to_vec();
    let skew = args.out_dir.join("skew.csv");
    write_file(&skew, &series_csv(&conditional_skewness(&garchs)?))?;
    files.push(skew);

    let outcome = if garchs.converged() && garch11.converged() {
        Outcome::Success
    } else {
        Outcome::NotConverged
    };
    Ok(FitOutput {
        garchs,
        garch11,
        table,
        files,
        outcome,
    })
}

fn table1(s: &GarchSFit, g: &GarchSFit, arch_f: f64, arch_p: f64) -> Table {
    let labels = ["mu", "alpha_0", "alpha_1", "alpha_2", "beta_0", "beta_1", "beta_2"];
    let column = |f: &GarchSFit| -> Vec<Entry> {
        let values = f.params.to_array();
        let p = f.p_values();
        (0..7)
            .map(|i| {
                if f.model == Model::Garch11 && i >= 4 {
                    Entry::Text("N/A".into())
                } else {
                    Entry::estimate(values[i], f.zstats[i], p[i])
                }
            })
            .collect()
    };
    let (cs, cg) = (column(s), column(g));
    let rows = (0..7)
        .map(|i| Row::new(labels[i], vec![cs[i].clone(), cg[i].clone()]))
        .collect();
    let both = |f: &dyn Fn(&GarchSFit) -> Entry| vec![f(s), f(g)];
    let yes_no = |b: bool| Entry::Text(if b { "yes" } else { "no" }.into());
    let footer = vec![
        Row::new("Log-likelihood", both(&|f| Entry::Number(f.loglik))),
        Row::new("AIC", both(&|f| Entry::Number(f.criteria.aic))),
        Row::new("SIC", both(&|f| Entry::Number(f.criteria.sc))),
        Row::new("HQ", both(&|f| Entry::Number(f.criteria.hq))),
        Row::new("Obs", both(&|f| Entry::Count(f.n_obs))),
        Row::new("Converged", both(&|f| yes_no(f.converged()))),
        Row::new("Iterations", both(&|f| Entry::Count(f.report.iterations))),
    ];
    Table {
        id: "table1".into(),
        title: "Estimation results of GARCH-S model and GARCH (1,1) model".into(),
        columns: vec!["GARCH-S".into(), "GARCH(1,1)".into()],
        panels: vec![Panel {
            title: None,
            rows,
            footer,
        }],
        notes: vec![
            format!("{STAR_NOTE} The z-statistics are presented in the brackets."),
            "GARCH-S starts from the GARCH(1,1) estimates.".into(),
            format!(
                "ARCH-LM test ({DEFAULT_ARCH_LAGS} lags) on the AR(1) residuals: F = {}, p = {}.",
                fmt4(arch_f),
                fmt4(arch_p)
            ),
        ],
    }
}

// ---------------------------------------------------------------- regress

/// A regression read from a `key = value` spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressFile {
    pub spec: RegressionSpec,
    /// Lag search `(p_var, q_var, max_p, max_q)` instead of fixed terms.
    pub search: Option<(String, String, usize, usize)>,
}

/// Term grammar: `const`, `lagdep`, `name` (lag 0), `name(k)`, `dummy*name(k)`.
pub fn parse_term(raw: &str) -> Result<Term, String> {
    let t = raw.trim();
    match t {
        "const" | "intercept" | "c" => return Ok(Term::Intercept),
        "lagdep" => return Ok(Term::LaggedDep),
        _ => {}
    }
    let (name, lag) = match t.split_once('(') {
        Some((n, rest)) => {
            let k = rest
                .strip_suffix(')')
                .and_then(|k| k.trim().parse::<usize>().ok())
                .ok_or_else(|| format!("bad lag in term `{t}`"))?;
            (n.trim(), k)
        }
        None => (t, 0),
    };
    if name.is_empty() {
        return Err(format!("empty term in `{raw}`"));
    }
    Ok(match name.split_once('*') {
        Some((d, v)) => Term::interaction(d.trim(), v.trim(), lag),
        None => Term::var(name, lag),
    })
}

impl RegressFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut dependent = None;
        let mut terms = Vec::new();
        let mut sample = None;
        let mut search = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("spec line {}: {msg}", i + 1));
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`".into()))?;
            let v = v.trim();
            match k.trim() {
                "dependent" => dependent = Some(v.to_string()),
                "terms" => {
                    for t in v.split(',').filter(|t| !t.trim().is_empty()) {
                        terms.push(parse_term(t).map_err(bad)?);
                    }
                }
                "sample" => {
                    let (a, b) = v
                        .split_once("..")
                        .ok_or_else(|| bad("sample must be `START..END`".into()))?;
                    let date = |s: &str| parse_date(s).ok_or_else(|| bad(format!("bad date `{s}`")));
                    sample = Some((date(a)?, date(b)?));
                }
                "search" => {
                    // search = rCases:3, rEPU:3
                    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                    let one = |s: &str| -> CliResult<(String, usize)> {
                        let (n, m) = s
                            .split_once(':')
                            .ok_or_else(|| bad(format!("search entry `{s}` must be `name:max`")))?;
                        let m = m.trim().parse().map_err(|_| bad(format!("bad maximum in `{s}`")))?;
                        Ok((n.trim().to_string(), m))
                    };
                    if parts.len() != 2 {
                        return Err(bad("search needs `p_var:max_p, q_var:max_q`".into()));
                    }
                    let (pv, mp) = one(parts[0])?;
                    let (qv, mq) = one(parts[1])?;
                    search = Some((pv, qv, mp, mq));
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let dependent = dependent.ok_or_else(|| CliError::Usage("spec names no `dependent`".into()))?;
        let mut spec = RegressionSpec::new(dependent).with_terms(terms);
        spec.sample = sample;
        Ok(Self { spec, search })
    }
}

pub struct RegressArgs {
    pub data: PathBuf,
    pub date_col: String,
    pub spec: PathBuf,
    pub criterion: Criterion,
    pub out: Option<PathBuf>,
}

pub fn regress(args: &RegressArgs) -> CliResult<String> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Usage(format!("cannot read spec {}: {e}", args.spec.display())))?;
    let file = RegressFile::parse(&text)?;
    let (data, _) = load_table_csv::<f64>(&args.data, &args.date_col)
        .map_err(CliError::context(format!("loading {}", args.data.display())))?;
    let result = match &file.search {
        None => ols(&file.spec, &data).map_err(CliError::context(format!("regression {}", file.spec)))?,
        Some((pv, qv, mp, mq)) => {
            let sampled = match file.spec.sample {
                Some((a, b)) => data.filter_dates(|d| d >= a && d <= b),
                None => data,
            };
            lag_search(&file.spec, pv, qv, *mp, *mq, args.criterion, &sampled)
                .map_err(CliError::context(format!("lag search over {}", file.spec)))?
                .result
        }
    };
    let table = regression_table("regression", &result.dependent.clone(), &[Some(result)]);
    if let Some(out) = &args.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            create_dir(dir)?;
        }
        write_file(out, &table.render_csv())?;
    }
    Ok(table.render_text())
}

// ---------------------------------------------------------------- adf / describe / corr

pub fn adf(input: &SeriesInput, max_lags: Option<usize>) -> CliResult<String> {
    let s = input.load()?;
    let res = adf_test(&s, max_lags.unwrap_or_else(|| schwert_max_lags(s.len())))?;
    let [c1, c5, c10] = res.critical_values;
    Ok(format!(
        "series {}\nstatistic {}{}\nlags {}\nobs {}\ncritical 1% {} 5% {} 10% {}\nreject unit root at 5%: {}\n",
        s.name(),
        fmt4(res.statistic),
        res.stars(),
        res.lags,
        res.n_obs,
        fmt4(c1),
        fmt4(c5),
        fmt4(c10),
        if res.rejects_at_5pct() { "yes" } else { "no" }
    ))
}

pub fn describe_cmd(input: &SeriesInput) -> CliResult<String> {
    let s = input.load()?;
    let d = describe(&s)?;
    Ok(format!(
        "series {} n {}\nmean {} min {} max {} std {}\n",
        s.name(),
        d.n,
        fmt4(d.mean),
        fmt4(d.min),
        fmt4(d.max),
        fmt4(d.std)
    ))
}

pub fn corr(data: &Path, date_col: &str, split: Option<NaiveDate>) -> CliResult<String> {
    let (table, _) = load_table_csv::<f64>(data, date_col)
        .map_err(CliError::context(format!("loading {}", data.display())))?;
    let names: Vec<&str> = table.names().iter().map(String::as_str).collect();
    let mut panels = vec![("All observations".to_string(), table.clone())];
    if let Some(c) = split {
        panels.push((format!("Before {c}"), table.filter_dates(|d| d < c)));
        panels.push((format!("From {c}"), table.filter_dates(|d| d >= c)));
    }
    let mut out = String::new();
    for (title, t) in panels {
        let m = corr_matrix(&t);
        let _ = writeln!(out, "{title} (N = {})", t.len());
        for (i, a) in names.iter().enumerate() {
            let cells: Vec<String> = names[..=i]
                .iter()
                .map(|b| match m.get(a, b) {
                    Some(CorrCell::Value { r, p_value, .. }) => {
                        format!("{}{}", fmt4(r), crashskew::inference::stars(p_value))
                    }
                    _ => "N/A".into(),
                })
                .collect();
            let _ = writeln!(out, "{a}\t{}", cells.join("\t"));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- simulate

pub struct SimulateArgs {
    pub params: GarchSParams,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub innovation: Innovation,
    pub start: NaiveDate,
    pub out: PathBuf,
}

/// Writes `date,price,r,h,s`; the first row carries the starting price only.
pub fn simulate(args: &SimulateArgs) -> CliResult<String> {
    let mut cfg = SimConfig::new(args.params, args.n, args.seed);
    cfg.burn_in = args.burn_in;
    cfg.innovation = args.innovation;
    cfg.start = args.start;
    let path = simulate_path(&cfg)?;
    let dates = path.returns.dates();
    let first = dates[0].pred_opt().unwrap_or(dates[0]);
    let mut price = 100.0f64;
    let mut out = format!("date,price,r,h,s\n{first},{price},,,\n");
    for (i, (d, r)) in path.returns.iter().enumerate() {
        price *= r.exp();
        let _ = writeln!(out, "{d},{price},{r},{},{}", path.h[i], path.s[i]);
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_file(&args.out, &out)?;
    let names = PARAM_NAMES
        .iter()
        .zip(args.params.to_array())
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(format!(
        "wrote {} observations to {} (seed {}, {RNG_ALGORITHM}; {names})\n",
        args.n,
        args.out.display(),
        args.seed
    ))
}
