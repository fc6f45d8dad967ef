//! Pipeline configuration: a flat `key = value` file whose keys can all be
//! overridden from the command line.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use crashskew::inference::Criterion;
use crashskew::timeseries::parse_date;

use crate::error::{CliError, CliResult};

pub const DEFAULT_CUTOFF: &str = "2020-01-21";

/// One input file and the columns to read from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Input {
    pub path: PathBuf,
    pub value_col: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub prices: Input,
    pub cases: Input,
    pub epu: Input,
    pub emu: Option<Input>,
    pub emv_id: Option<Input>,
    pub date_col: String,
    pub cutoff: NaiveDate,
    pub max_p: usize,
    pub max_q: usize,
    pub criterion: Criterion,
    pub out_dir: PathBuf,
}

/// Every setting as an optional string, in the order: file, then flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub prices: Option<String>,
    pub cases: Option<String>,
    pub epu: Option<String>,
    pub emu: Option<String>,
    pub emv_id: Option<String>,
    pub date_col: Option<String>,
    pub value_col: Option<String>,
    pub prices_col: Option<String>,
    pub cases_col: Option<String>,
    pub epu_col: Option<String>,
    pub emu_col: Option<String>,
    pub emv_id_col: Option<String>,
    pub cutoff: Option<String>,
    pub max_p: Option<String>,
    pub max_q: Option<String>,
    pub criterion: Option<String>,
    pub out_dir: Option<String>,
}

impl Settings {
    fn slot(&mut self, key: &str) -> Option<&mut Option<String>> {
        Some(match key.replace('-', "_").as_str() {
            "prices" => &mut self.prices,
            "cases" => &mut self.cases,
            "epu" => &mut self.epu,
            "emu" => &mut self.emu,
            "emv_id" => &mut self.emv_id,
            "date_col" => &mut self.date_col,
            "value_col" => &mut self.value_col,
            "prices_col" => &mut self.prices_col,
            "cases_col" => &mut self.cases_col,
            "epu_col" => &mut self.epu_col,
            "emu_col" => &mut self.emu_col,
            "emv_id_col" => &mut self.emv_id_col,
            "cutoff" => &mut self.cutoff,
            "max_p" => &mut self.max_p,
            "max_q" => &mut self.max_q,
            "criterion" => &mut self.criterion,
            "out_dir" => &mut self.out_dir,
            _ => return None,
        })
    }

    /// Parses `key = value` lines; `#` starts a comment. Relative paths are
    /// resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> CliResult<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
            })?;
            let key = key.trim();
            let mut value = value.trim().to_string();
            if let Some(b) = base {
                if matches!(key, "prices" | "cases" | "epu" | "emu" | "emv_id" | "emv-id" | "out_dir" | "out-dir")
                    && Path::new(&value).is_relative()
                {
                    value = b.join(&value).display().to_string();
                }
            }
            let slot = s
                .slot(key)
                .ok_or_else(|| CliError::Usage(format!("config line {}: unknown key `{key}`", i + 1)))?;
            *slot = Some(value);
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Values set in `other` win.
    pub fn overridden_by(mut self, other: Settings) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            prices, cases, epu, emu, emv_id, date_col, value_col, prices_col, cases_col, epu_col,
            emu_col, emv_id_col, cutoff, max_p, max_q, criterion, out_dir
        );
        self
    }

    pub fn resolve(self) -> CliResult<PipelineConfig> {
        let value_col = self.value_col.clone().unwrap_or_else(|| "value".into());
        let input = |path: Option<String>, col: Option<String>, key: &str| -> CliResult<Input> {
            let path = path.ok_or_else(|| CliError::Usage(format!("missing required setting `{key}`")))?;
            Ok(Input {
                path: PathBuf::from(path),
                value_col: col.unwrap_or_else(|| value_col.clone()),
            })
        };
        let optional = |path: Option<String>, col: Option<String>| {
            path.map(|p| Input {
                path: PathBuf::from(p),
                value_col: col.unwrap_or_else(|| value_col.clone()),
            })
        };
        let cutoff_raw = self.cutoff.unwrap_or_else(|| DEFAULT_CUTOFF.into());
        let cutoff = parse_date(&cutoff_raw)
            .ok_or_else(|| CliError::Usage(format!("cutoff `{cutoff_raw}` is not a YYYY-MM-DD date")))?;
        let max_p = parse_count(self.max_p.as_deref(), "max_p", 3)?;
        let max_q = parse_count(self.max_q.as_deref(), "max_q", 3)?;
        if max_p < 1 {
            return Err(CliError::Usage("max_p must be at least 1".into()));
        }
        let criterion = match self.criterion.as_deref() {
            None => Criterion::Aic,
            Some(c) => c
                .parse()
                .map_err(|_| CliError::Usage(format!("criterion `{c}` must be aic or sc")))?,
        };
        Ok(PipelineConfig {
            prices: input(self.prices, self.prices_col, "prices")?,
            cases: input(self.cases, self.cases_col, "cases")?,
            epu: input(self.epu, self.epu_col, "epu")?,
            emu: optional(self.emu, self.emu_col),
            emv_id: optional(self.emv_id, self.emv_id_col),
            date_col: self.date_col.unwrap_or_else(|| "date".into()),
            cutoff,
            max_p,
            max_q,
            criterion,
            out_dir: PathBuf::from(self.out_dir.unwrap_or_else(|| "out".into())),
        })
    }
}

fn parse_count(raw: Option<&str>, key: &str, default: usize) -> CliResult<usize> {
    match raw {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("{key} must be a non-negative integer, got `{v}`"))),
    }
}
