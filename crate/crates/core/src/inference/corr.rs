use super::ols::student_p;
use crate::scalar::Scalar;
use crate::timeseries::AlignedTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrCell {
    Value { r: f64, p_value: f64, n: usize },
    /// Undefined correlation (a constant column or fewer than 3 observations).
    NotAvailable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrMatrix {
    pub names: Vec<String>,
    pub n_obs: usize,
    pub cells: Vec<Vec<CorrCell>>,
}

impl CorrMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<CorrCell> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(self.cells[i][j])
    }
}

fn pearson(x: &[f64], y: &[f64]) -> CorrCell {
    let n = x.len();
    if n < 3 {
        return CorrCell::NotAvailable;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return CorrCell::NotAvailable;
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * ((nf - 2.0) / (1.0 - r * r)).sqrt();
        student_p(t, nf - 2.0)
    };
    CorrCell::Value { r, p_value, n }
}

/// Pairwise Pearson correlations of every column, with t-test p-values.
pub fn corr_matrix<T: Scalar>(table: &AlignedTable<T>) -> CorrMatrix {
    let cols: Vec<Vec<f64>> = table
        .names()
        .iter()
        .map(|n| {
            table
                .column(n)
                .expect("column listed in names")
                .iter()
                .map(|v| v.as_f64())
                .collect()
        })
        .collect();
    let k = cols.len();
    let mut cells = vec![vec![CorrCell::NotAvailable; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let c = pearson(&cols[i], &cols[j]);
            cells[i][j] = c;
            cells[j][i] = c;
        }
    }
    CorrMatrix {
        names: table.names().to_vec(),
        n_obs: table.len(),
        cells,
    }
}
