//! Plain-text tables in the paper's layout plus machine-readable CSV sidecars.
//!
//! Text output rounds to four decimals; the CSV keeps full precision.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crashskew::inference::stars;

use crate::error::{CliError, CliResult};

pub const STAR_NOTE: &str =
    "Notes: ***, **, * represent statistical significance at 1%, 5%, and 10% levels, respectively.";

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Empty,
    Number(f64),
    Count(usize),
    /// A coefficient with stars from `p_value` and its test statistic in brackets.
    Estimate {
        value: f64,
        stat: Option<f64>,
        p_value: Option<f64>,
    },
    /// A statistic with a precomputed significance marker.
    Starred(f64, &'static str),
    Text(String),
}

impl Entry {
    pub fn estimate(value: f64, stat: Option<f64>, p_value: Option<f64>) -> Self {
        Entry::Estimate { value, stat, p_value }
    }

    fn text(&self) -> String {
        match self {
            Entry::Empty => String::new(),
            Entry::Number(v) => fmt4(*v),
            Entry::Count(n) => n.to_string(),
            Entry::Estimate { value, stat, p_value } => {
                let marks = p_value.map(stars).unwrap_or("");
                match stat {
                    Some(t) => format!("{}{marks} ({})", fmt4(*value), fmt4(*t)),
                    None => format!("{}{marks} (N/A)", fmt4(*value)),
                }
            }
            Entry::Starred(v, marks) => format!("{}{marks}", fmt4(*v)),
            Entry::Text(s) => s.clone(),
        }
    }

    /// `(value, stat, p_value)` CSV cells at full precision.
    fn csv_cells(&self) -> Option<[String; 3]> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        match self {
            Entry::Empty => None,
            Entry::Number(v) | Entry::Starred(v, _) => Some([v.to_string(), String::new(), String::new()]),
            Entry::Count(n) => Some([n.to_string(), String::new(), String::new()]),
            Entry::Estimate { value, stat, p_value } => Some([value.to_string(), opt(*stat), opt(*p_value)]),
            Entry::Text(s) => Some([s.clone(), String::new(), String::new()]),
        }
    }
}

/// Four decimals, with negative zero printed as zero.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub entries: Vec<Entry>,
}

impl Row {
    pub fn new(label: impl Into<String>, entries: Vec<Entry>) -> Self {
        Self {
            label: label.into(),
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    pub title: Option<String>,
    pub rows: Vec<Row>,
    /// Summary rows printed after a blank line (N, R², criteria, ...).
    pub footer: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `table4`.
    pub id: String,
    pub title: String,
    pub columns: Vec<String>,
    pub panels: Vec<Panel>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn render_text(&self) -> String {
        let all_rows = || self.panels.iter().flat_map(|p| p.rows.iter().chain(&p.footer));
        let label_w = all_rows()
            .map(|r| r.label.chars().count())
            .chain(std::iter::once("Variables".len()))
            .max()
            .unwrap_or(0);
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for r in all_rows() {
            for (w, e) in widths.iter_mut().zip(&r.entries) {
                *w = (*w).max(e.text().chars().count());
            }
        }
        let line = |label: &str, cells: Vec<String>| {
            let mut s = format!("{label:<label_w$}");
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(s, "  {c:>w$}");
            }
            s.trim_end().to_string()
        };

        let mut out = format!("{}\n{}\n\n", display_id(&self.id), self.title);
        out.push_str(&line("Variables", self.columns.clone()));
        out.push('\n');
        for p in &self.panels {
            if let Some(t) = &p.title {
                out.push_str(t);
                out.push('\n');
            }
            for r in &p.rows {
                out.push_str(&line(&r.label, r.entries.iter().map(Entry::text).collect()));
                out.push('\n');
            }
            if !p.footer.is_empty() {
                out.push('\n');
                for r in &p.footer {
                    out.push_str(&line(&r.label, r.entries.iter().map(Entry::text).collect()));
                    out.push('\n');
                }
            }
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(n);
                out.push('\n');
            }
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("panel,row,column,value,stat,p_value\n");
        for p in &self.panels {
            let panel = p.title.as_deref().unwrap_or("");
            for r in p.rows.iter().chain(&p.footer) {
                for (col, e) in self.columns.iter().zip(&r.entries) {
                    if let Some([v, t, pv]) = e.csv_cells() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            csv_field(panel),
                            csv_field(&r.label),
                            csv_field(col),
                            csv_field(&v),
                            t,
                            pv
                        );
                    }
                }
            }
        }
        out
    }

    /// Writes `<id>.txt` and `<id>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<[PathBuf; 2]> {
        let txt = dir.join(format!("{}.txt", self.id));
        let csv = dir.join(format!("{}.csv", self.id));
        write_file(&txt, &self.render_text())?;
        write_file(&csv, &self.render_csv())?;
        Ok([txt, csv])
    }
}

fn display_id(id: &str) -> String {
    match id.strip_prefix("table") {
        Some(n) if !n.is_empty() => format!("Table {n}"),
        _ => id.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
