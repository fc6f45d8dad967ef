//! End-to-end run: returns → GARCH-S skewness → descriptive, correlation and
//! regression tables.

use std::path::PathBuf;

use chrono::NaiveDate;
use crashskew::garchs::{conditional_skewness, GarchSFit};
use crashskew::inference::{
    adf_test, corr_matrix, describe, lag_search, ols, schwert_max_lags, CorrCell, Criterion,
    RegressionResult, RegressionSpec, Term,
};
use crashskew::optimizer::fit_garchs;
use crashskew::timeseries::{align, dummy, load_csv, log_change_zero_guard, log_growth, log_return};
use crashskew::{AlignedTable, DatedSeries};

use crate::config::{Input, PipelineConfig};
use crate::error::{CliError, CliResult, Outcome};
use crate::report::{write_file, Entry, Panel, Row, Table, STAR_NOTE};

pub const SKEW: &str = "Skew";
pub const CASES: &str = "rCases";
pub const DUMMY: &str = "D_epid";
const T_NOTE: &str = "The t-statistics are presented in the brackets.";

/// Everything the pipeline produced, for callers that want more than files.
#[derive(Debug)]
pub struct PipelineOutput {
    pub fit: GarchSFit,
    pub data: AlignedTable,
    pub tables: Vec<Table>,
    pub files: Vec<PathBuf>,
    pub outcome: Outcome,
}

fn load(input: &Input, date_col: &str, what: &str) -> CliResult<DatedSeries> {
    let (s, report) = load_csv(&input.path, date_col, &input.value_col)
        .map_err(CliError::context(format!("loading {what} from {}", input.path.display())))?;
    if report.dropped > 0 {
        eprintln!("{what}: {report}");
    }
    Ok(s)
}

/// Uncertainty series that take the place of rEPU in the robustness tables.
struct Uncertainty {
    name: &'static str,
    table_id: &'static str,
    title: &'static str,
}

const ALTERNATIVES: [Uncertainty; 2] = [
    Uncertainty {
        name: "rEMU",
        table_id: "table8",
        title: "Robustness results from EMU",
    },
    Uncertainty {
        name: "rEMV_ID",
        table_id: "table9",
        title: "Robustness results from EMV_ID",
    },
];

pub fn run(cfg: &PipelineConfig) -> CliResult<PipelineOutput> {
    let prices = load(&cfg.prices, &cfg.date_col, "prices")?;
    let r = log_return(&prices)?.renamed("r");
    let fit = fit_garchs(&r, None).map_err(CliError::context("fitting GARCH-S"))?;
    let skew = conditional_skewness(&fit)?;

    let cases = log_growth(&load(&cfg.cases, &cfg.date_col, "cases")?)?.renamed(CASES);
    let epu = log_change_zero_guard(&load(&cfg.epu, &cfg.date_col, "EPU")?)?.renamed("rEPU");
    let mut series = vec![r, skew, cases, epu];
    for (input, alt) in [&cfg.emu, &cfg.emv_id].into_iter().zip(&ALTERNATIVES) {
        if let Some(input) = input {
            series.push(log_change_zero_guard(&load(input, &cfg.date_col, alt.name)?)?.renamed(alt.name));
        }
    }
    let joined = align(&series).map_err(CliError::context("aligning inputs"))?;
    let d = dummy::<f64>(DUMMY, joined.dates(), cfg.cutoff)?;
    let data = joined.with_column(DUMMY, d.values().to_vec())?;

    let mut tables = vec![table2(&data)?, table3(&data, cfg.cutoff)];
    tables.push(ladder(
        "table4",
        "The effects of COVID-19 on stock market crash risk",
        &data,
        (1..=cfg.max_p).map(|p| base().with_terms((1..=p).map(|i| Term::var(CASES, i)))),
    )?);
    tables.push(ladder(
        "table5",
        "The effects of EPU on stock market crash risk",
        &data,
        (0..=cfg.max_q).map(|q| base().with_terms((0..=q).map(|j| Term::var("rEPU", j)))),
    )?);

    let search = |c: Criterion| {
        lag_search(&base(), CASES, "rEPU", cfg.max_p, cfg.max_q, c, &data)
            .map_err(CliError::context(format!("lag search by {}", criterion_name(c))))
    };
    let aic = search(Criterion::Aic)?;
    let sc = search(Criterion::Sc)?;
    let mut t6 = regression_table(
        "table6",
        "The effects of COVID-19 and EPU on stock market crash risk",
        &[Some(aic.result.clone()), Some(sc.result.clone())],
    );
    t6.notes.push(format!(
        "The optimal lag length in column (1) is determined by the AIC criterion (p = {}, q = {}), while the SC criterion determines the optimal lag length in column (2) (p = {}, q = {}).",
        aic.p, aic.q, sc.p, sc.q
    ));
    if cfg.criterion == Criterion::Sc {
        t6.notes.push("Preferred criterion: SC.".into());
    } else {
        t6.notes.push("Preferred criterion: AIC.".into());
    }
    tables.push(t6);

    let orders = [(sc.p, sc.q), (aic.p, aic.q)];
    let mut t7 = ladder(
        "table7",
        "The different role of EPU during the pandemic",
        &data,
        orders.iter().map(|&(p, q)| interacted(p, "rEPU", q)),
    )?;
    t7.notes.push(format!(
        "Lag lengths follow Table 6: column (1) uses the SC choice, column (2) the AIC choice. {DUMMY} is one from {} onwards.",
        cfg.cutoff
    ));
    tables.push(t7);

    for alt in &ALTERNATIVES {
        tables.push(robustness(alt, &data, orders)?);
    }

    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Write {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let mut files = Vec::new();
    for t in &tables {
        files.extend(t.write(&cfg.out_dir)?);
    }
    let skew_path = cfg.out_dir.join("skew.csv");
    write_file(&skew_path, &series_csv(&conditional_skewness(&fit)?))?;
    files.push(skew_path);

    let outcome = if fit.converged() {
        Outcome::Success
    } else {
        eprintln!("warning: GARCH-S optimizer did not converge; tables use the last iterate");
        Outcome::NotConverged
    };
    Ok(PipelineOutput {
        fit,
        data,
        tables,
        files,
        outcome,
    })
}

fn criterion_name(c: Criterion) -> &'static str {
    match c {
        Criterion::Aic => "AIC",
        Criterion::Sc => "SC",
    }
}

pub fn series_csv(s: &DatedSeries) -> String {
    let mut out = format!("date,{}\n", s.name());
    for (d, v) in s.iter() {
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}

fn base() -> RegressionSpec {
    RegressionSpec::new(SKEW).with(Term::Intercept).with(Term::LaggedDep)
}

/// The interacted specification with `p` case lags and `q + 1` uncertainty terms.
fn interacted(p: usize, unc: &str, q: usize) -> RegressionSpec {
    RegressionSpec::new(SKEW)
        .with(Term::Intercept)
        .with(Term::var(DUMMY, 0))
        .with(Term::LaggedDep)
        .with_terms((1..=p).map(|i| Term::var(CASES, i)))
        .with_terms((0..=q).map(|j| Term::var(unc, j)))
        .with_terms((0..=q).map(|j| Term::interaction(DUMMY, unc, j)))
}

fn additive(p: usize, unc: &str, q: usize) -> RegressionSpec {
    base()
        .with_terms((1..=p).map(|i| Term::var(CASES, i)))
        .with_terms((0..=q).map(|j| Term::var(unc, j)))
}

/// `None` for a regime specification whose dummy never switches within the
/// sample (the cutoff lies outside it), which cannot be estimated.
fn fit_all(
    data: &AlignedTable,
    specs: impl IntoIterator<Item = RegressionSpec>,
) -> CliResult<Vec<Option<RegressionResult>>> {
    let degenerate_dummy = data
        .column(DUMMY)
        .is_some_and(|d| d.windows(2).all(|w| w[0] == w[1]));
    specs
        .into_iter()
        .map(|s| {
            if degenerate_dummy && s.terms.contains(&Term::var(DUMMY, 0)) {
                return Ok(None);
            }
            ols(&s, data)
                .map(Some)
                .map_err(CliError::context(format!("regression {s}")))
        })
        .collect()
}

const DEGENERATE_NOTE: &str =
    "N/A columns: the pandemic dummy is constant over the sample, so the interaction model is not estimable.";

fn ladder(
    id: &str,
    title: &str,
    data: &AlignedTable,
    specs: impl IntoIterator<Item = RegressionSpec>,
) -> CliResult<Table> {
    Ok(regression_table(id, title, &fit_all(data, specs)?))
}

fn robustness(alt: &Uncertainty, data: &AlignedTable, orders: [(usize, usize); 2]) -> CliResult<Table> {
    if data.column(alt.name).is_none() {
        return Ok(Table {
            id: alt.table_id.into(),
            title: alt.title.into(),
            columns: vec![],
            panels: vec![],
            notes: vec![format!("{} was not supplied; no estimates.", alt.name)],
        });
    }
    let specs = [
        additive(orders[0].0, alt.name, orders[0].1),
        additive(orders[1].0, alt.name, orders[1].1),
        interacted(orders[0].0, alt.name, orders[0].1),
        interacted(orders[1].0, alt.name, orders[1].1),
    ];
    let mut t = regression_table(alt.table_id, alt.title, &fit_all(data, specs)?);
    t.notes.push(
        "Columns (1) and (3) use the SC lag lengths of Table 6, columns (2) and (4) the AIC lag lengths.".into(),
    );
    Ok(t)
}

/// Display order: intercept, dummy, lagged dependent, regressors by first
/// appearance and lag, interactions last.
fn term_key(t: &Term, vars: &[String]) -> (u8, usize, usize) {
    match t {
        Term::Intercept => (0, 0, 0),
        Term::Var { name, .. } if name == DUMMY => (1, 0, 0),
        Term::LaggedDep => (2, 0, 0),
        Term::Var { name, lag } => (3, vars.iter().position(|v| v == name).unwrap_or(0), *lag),
        Term::Interaction { var, lag, .. } => (4, vars.iter().position(|v| v == var).unwrap_or(0), *lag),
    }
}

pub fn regression_table(id: &str, title: &str, columns: &[Option<RegressionResult>]) -> Table {
    let mut terms: Vec<Term> = Vec::new();
    let mut vars: Vec<String> = Vec::new();
    for r in columns.iter().flatten() {
        for t in &r.terms {
            if let Term::Var { name, .. } = t {
                if !vars.contains(name) {
                    vars.push(name.clone());
                }
            }
            if !terms.contains(t) {
                terms.push(t.clone());
            }
        }
    }
    terms.sort_by_key(|t| term_key(t, &vars));
    let dependent = columns
        .iter()
        .flatten()
        .next()
        .map(|r| r.dependent.as_str())
        .unwrap_or(SKEW);
    let na = || Entry::Text("N/A".into());
    let rows = terms
        .iter()
        .map(|t| {
            let entries = columns
                .iter()
                .map(|r| match r {
                    None => na(),
                    Some(r) => match r.index_of(t) {
                        Some(i) => Entry::estimate(r.coefficients[i], Some(r.t_stats[i]), Some(r.p_values[i])),
                        None => Entry::Empty,
                    },
                })
                .collect();
            let label = match t {
                Term::Var { name, lag: 0 } if name == DUMMY => DUMMY.to_string(),
                _ => t.label(dependent),
            };
            Row::new(label, entries)
        })
        .collect();
    let stat = |label: &str, f: &dyn Fn(&RegressionResult) -> Entry| {
        Row::new(label, columns.iter().map(|r| r.as_ref().map_or_else(na, f)).collect())
    };
    let footer = vec![
        stat("N", &|r| Entry::Count(r.n_obs)),
        stat("R²", &|r| Entry::Number(r.r2)),
        stat("Adj-R²", &|r| Entry::Number(r.adj_r2)),
        stat("AIC", &|r| Entry::Number(r.criteria.aic)),
        stat("SC", &|r| Entry::Number(r.criteria.sc)),
    ];
    let mut notes = vec![format!("{STAR_NOTE} {T_NOTE}")];
    if columns.iter().any(Option::is_none) {
        notes.push(DEGENERATE_NOTE.into());
    }
    Table {
        id: id.into(),
        title: title.into(),
        columns: (1..=columns.len()).map(|i| format!("({i})")).collect(),
        panels: vec![Panel {
            title: None,
            rows,
            footer,
        }],
        notes,
    }
}

const TABLE2_VARS: [&str; 6] = ["r", SKEW, CASES, "rEPU", "rEMU", "rEMV_ID"];

fn table2(data: &AlignedTable) -> CliResult<Table> {
    let mut rows = Vec::new();
    for name in TABLE2_VARS {
        let Some(_) = data.column(name) else { continue };
        let s = data.series(name)?;
        let d = describe(&s)?;
        let adf = adf_test(&s, schwert_max_lags(s.len()))
            .map_err(CliError::context(format!("ADF test of {name}")))?;
        rows.push(Row::new(
            name,
            vec![
                Entry::Number(d.mean),
                Entry::Number(d.min),
                Entry::Number(d.max),
                Entry::Number(d.std),
                Entry::Starred(adf.statistic, adf.stars()),
            ],
        ));
    }
    Ok(Table {
        id: "table2".into(),
        title: "Descriptive statistics".into(),
        columns: ["Mean", "Min", "Max", "Std. Dev.", "ADF"].map(String::from).to_vec(),
        panels: vec![Panel {
            title: None,
            rows,
            footer: vec![],
        }],
        notes: vec![format!(
            "{STAR_NOTE} ADF regressions include a constant; lag length chosen by AIC. The total observations are {}.",
            data.len()
        )],
    })
}

const TABLE3_VARS: [&str; 5] = [SKEW, CASES, "rEPU", "rEMU", "rEMV_ID"];

fn correlation_panel(title: String, data: &AlignedTable, names: &[&str]) -> Panel {
    let rows = match data.select(names) {
        Ok(sub) if !sub.is_empty() => {
            let m = corr_matrix(&sub);
            names
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let entries = names
                        .iter()
                        .enumerate()
                        .map(|(j, b)| {
                            if j > i {
                                return Entry::Empty;
                            }
                            match m.get(a, b) {
                                Some(CorrCell::Value { r, p_value, .. }) => {
                                    Entry::Starred(r, crashskew::inference::stars(p_value))
                                }
                                _ => Entry::Text("N/A".into()),
                            }
                        })
                        .collect();
                    Row::new(*a, entries)
                })
                .collect()
        }
        _ => names
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let entries = (0..names.len())
                    .map(|j| if j > i { Entry::Empty } else { Entry::Text("N/A".into()) })
                    .collect();
                Row::new(*a, entries)
            })
            .collect(),
    };
    Panel {
        title: Some(title),
        rows,
        footer: vec![Row::new("N", vec![Entry::Count(data.len())])],
    }
}

fn table3(data: &AlignedTable, cutoff: NaiveDate) -> Table {
    let names: Vec<&str> = TABLE3_VARS.into_iter().filter(|n| data.column(n).is_some()).collect();
    let before = data.filter_dates(|d| d < cutoff);
    let after = data.filter_dates(|d| d >= cutoff);
    let last_pre = cutoff.pred_opt().unwrap_or(cutoff);
    Table {
        id: "table3".into(),
        title: "Correlation matrix of the related variables".into(),
        columns: names.iter().map(|s| s.to_string()).collect(),
        panels: vec![
            correlation_panel("Panel A The whole sample".into(), data, &names),
            correlation_panel(
                format!("Panel B Subsample with ending date {}", last_pre.format("%B %-d, %Y")),
                &before,
                &names,
            ),
            correlation_panel(
                format!("Panel C Subsample with starting date {}", cutoff.format("%B %-d, %Y")),
                &after,
                &names,
            ),
        ],
        notes: vec![format!(
            "{STAR_NOTE} N/A marks correlations that are undefined (constant variable or fewer than three observations)."
        )],
    }
}
