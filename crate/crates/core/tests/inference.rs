use chrono::{Days, NaiveDate};
use crashskew::inference::*;
use crashskew::simulate::SimRng;
use crashskew::AlignedTable;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2017, 1, 2).unwrap();
    (0..n).map(|i| start + Days::new(i as u64)).collect()
}

fn table(cols: &[(&str, Vec<f64>)]) -> AlignedTable {
    let n = cols[0].1.len();
    AlignedTable::from_columns(
        dates(n),
        cols.iter().map(|c| c.0.to_string()).collect(),
        cols.iter().map(|c| c.1.clone()).collect(),
    )
    .unwrap()
}

fn normals(rng: &mut SimRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Gaussian elimination with partial pivoting on `X'X b = X'y`.
fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, yi) in x.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * yi;
        }
    }
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for j in c..=k {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[i][j] * b[j]).sum();
        b[i] = (a[i][k] - s) / a[i][i];
    }
    b
}

#[test]
fn ols_matches_normal_equations() {
    let mut rng = SimRng::seed_from_u64(2024);
    for _ in 0..200 {
        let k = rng.random_range(1..=5usize);
        let n = rng.random_range(k + 3..=50usize);
        let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let mut cols: Vec<(&str, Vec<f64>)> = vec![("y", normals(&mut rng, n))];
        let xs: Vec<Vec<f64>> = (0..k).map(|_| normals(&mut rng, n)).collect();
        for (name, c) in names.iter().zip(&xs) {
            cols.push((name.as_str(), c.clone()));
        }
        let t = table(&cols);
        let spec = RegressionSpec::new("y")
            .with(Term::Intercept)
            .with_terms(names.iter().map(|nm| Term::var(nm.as_str(), 0)));
        let fit = ols(&spec, &t).unwrap();
        let design: Vec<Vec<f64>> = (0..n)
            .map(|r| std::iter::once(1.0).chain(xs.iter().map(|c| c[r])).collect())
            .collect();
        let oracle = normal_equations(&design, &cols[0].1);
        for (a, b) in fit.coefficients.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn exactly_linear_data_fits_perfectly() {
    let x: Vec<f64> = (0..30).map(|i| (i as f64).sin() * 3.0).collect();
    let z: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).cos()).collect();
    let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.5 - 2.0 * a + 4.0 * b).collect();
    let t = table(&[("y", y), ("x", x), ("z", z)]);
    let spec = RegressionSpec::new("y")
        .with(Term::Intercept)
        .with(Term::var("x", 0))
        .with(Term::var("z", 0));
    let fit = ols(&spec, &t).unwrap();
    assert!((fit.r2 - 1.0).abs() < 1e-12);
    assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
}

#[test]
fn adf_size_and_power() {
    let n = 2000;
    let lags = schwert_max_lags(n);
    let (walk_rejections, noise_rejections): (usize, usize) = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = SimRng::seed_from_u64(seed);
            let e = normals(&mut rng, n);
            let walk: Vec<f64> = e
                .iter()
                .scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect();
            let w = adf_test_values(&walk, lags).unwrap().rejects_at_5pct() as usize;
            let z = adf_test_values(&e, lags).unwrap().rejects_at_5pct() as usize;
            (w, z)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    assert!(walk_rejections <= 10, "random walk rejected {walk_rejections}/100");
    assert!(noise_rejections >= 99, "white noise rejected {noise_rejections}/100");
}

#[test]
fn split_matches_reparameterized_regression() {
    let mut rng = SimRng::seed_from_u64(8);
    let n = 120;
    let x = normals(&mut rng, n);
    let d: Vec<f64> = (0..n).map(|i| if i >= 70 { 1.0 } else { 0.0 }).collect();
    let noise = normals(&mut rng, n);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let xl = if i > 0 { x[i - 1] } else { 0.0 };
            0.3 + 0.8 * xl - 1.1 * d[i] * xl + 0.2 * noise[i]
        })
        .collect();
    // Regressors switched on in only one regime: x_{t-1} (1 - D_t) and x_{t-1} D_t.
    let mut off = vec![0.0; n];
    let mut on = vec![0.0; n];
    for i in 1..n {
        off[i] = x[i - 1] * (1.0 - d[i]);
        on[i] = x[i - 1] * d[i];
    }
    let t = table(&[
        ("y", y),
        ("x", x),
        ("D", d),
        ("x_off", off),
        ("x_on", on),
    ]);
    let interacted = RegressionSpec::new("y")
        .with(Term::Intercept)
        .with(Term::var("x", 1))
        .with(Term::interaction("D", "x", 1));
    let split = split_coefficient(&ols(&interacted, &t).unwrap(), "D", "x", 1).unwrap();

    // Drop the first row so both regressions share a sample.
    let t1 = t.filter_dates(|dt| dt > t.dates()[0]);
    let reparam = RegressionSpec::new("y")
        .with(Term::Intercept)
        .with(Term::var("x_off", 0))
        .with(Term::var("x_on", 0));
    let r = ols(&reparam, &t1).unwrap();
    assert!((split.pandemic.estimate - r.coefficients[2]).abs() < 1e-8);
    assert!((split.pandemic.std_error - r.std_errors[2]).abs() < 1e-8);
    assert!((split.pre_period.estimate - r.coefficients[1]).abs() < 1e-8);
}

/// Builds exactly-linear data so OLS returns the chosen slopes, then splits them.
#[test]
fn split_adds_the_interaction_to_the_base_slope() {
    let (lambda, theta) = (-0.0062, -0.0345);
    let mut rng = SimRng::seed_from_u64(31);
    let n = 60;
    let x = normals(&mut rng, n);
    let d: Vec<f64> = (0..n).map(|i| if i >= 40 { 1.0 } else { 0.0 }).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| 0.001 + lambda * x[i] + theta * d[i] * x[i] + 1e-9 * (i as f64).sin())
        .collect();
    let t = table(&[("y", y), ("x", x), ("D", d)]);
    let spec = RegressionSpec::new("y")
        .with(Term::Intercept)
        .with(Term::var("x", 0))
        .with(Term::interaction("D", "x", 0));
    let split = split_coefficient(&ols(&spec, &t).unwrap(), "D", "x", 0).unwrap();
    assert!((split.pre_period.estimate - lambda).abs() < 1e-7);
    assert!((split.pandemic.estimate - (-0.0407)).abs() < 1e-7);
    assert!((split.pandemic.estimate - (-0.0408)).abs() <= 1e-4 + 1e-12);
}

#[test]
fn lag_search_finds_the_generating_orders() {
    let (p_true, q_true) = (2usize, 1usize);
    let hits = (0..10u64)
        .filter(|&seed| {
            let mut rng = SimRng::seed_from_u64(300 + seed);
            let n = 900;
            let c = normals(&mut rng, n);
            let e = normals(&mut rng, n);
            let noise = normals(&mut rng, n);
            let mut y = vec![0.0; n];
            for t in 2..n {
                y[t] = 0.3 * y[t - 1] - 0.5 * c[t - 1] + 0.4 * c[t - 2] + 0.6 * e[t]
                    - 0.45 * e[t - 1]
                    + 0.3 * noise[t];
            }
            let t = table(&[("y", y), ("c", c), ("e", e)]);
            let base = RegressionSpec::new("y").with(Term::Intercept).with(Term::LaggedDep);
            let choice = lag_search(&base, "c", "e", 3, 3, Criterion::Sc, &t).unwrap();
            choice.p == p_true && choice.q == q_true
        })
        .count();
    assert!(hits >= 9, "true orders chosen in {hits}/10");
}

#[test]
fn lag_search_is_order_deterministic() {
    let mut rng = SimRng::seed_from_u64(5);
    let t = table(&[
        ("y", normals(&mut rng, 200)),
        ("c", normals(&mut rng, 200)),
        ("e", normals(&mut rng, 200)),
    ]);
    let base = RegressionSpec::new("y").with(Term::Intercept);
    let a = lag_search(&base, "c", "e", 3, 3, Criterion::Aic, &t).unwrap();
    let b = lag_search(&base, "c", "e", 3, 3, Criterion::Aic, &t).unwrap();
    assert_eq!((a.p, a.q), (b.p, b.q));
    assert_eq!(a.result, b.result);
}

#[test]
fn corr_is_symmetric_with_unit_diagonal() {
    let mut rng = SimRng::seed_from_u64(11);
    let a = normals(&mut rng, 60);
    let b: Vec<f64> = a.iter().zip(normals(&mut rng, 60)).map(|(x, e)| x + e).collect();
    let c = normals(&mut rng, 60);
    let m = corr_matrix(&table(&[("a", a), ("b", b), ("c", c)]));
    for x in ["a", "b", "c"] {
        match m.get(x, x).unwrap() {
            CorrCell::Value { r, .. } => assert!((r - 1.0).abs() < 1e-12),
            CorrCell::NotAvailable => panic!("diagonal N/A"),
        }
        for y in ["a", "b", "c"] {
            assert_eq!(m.get(x, y), m.get(y, x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_a_regressor_never_lowers_r2(seed in 0u64..10_000, n in 12usize..60) {
        let mut rng = SimRng::seed_from_u64(seed);
        let t = table(&[
            ("y", normals(&mut rng, n)),
            ("a", normals(&mut rng, n)),
            ("b", normals(&mut rng, n)),
        ]);
        let small = RegressionSpec::new("y").with(Term::Intercept).with(Term::var("a", 0));
        let big = small.clone().with(Term::var("b", 0));
        let r_small = ols(&small, &t).unwrap().r2;
        let r_big = ols(&big, &t).unwrap().r2;
        prop_assert!(r_big >= r_small - 1e-12);
    }

    #[test]
    fn adf_statistic_is_affine_invariant(seed in 0u64..10_000, a in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0], b in -100.0f64..100.0) {
        let mut rng = SimRng::seed_from_u64(seed);
        let y: Vec<f64> = normals(&mut rng, 150).iter().scan(0.0, |s, e| { *s = 0.7 * *s + e; Some(*s) }).collect();
        let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let l = schwert_max_lags(y.len());
        let r1 = adf_test_values(&y, l).unwrap();
        let r2 = adf_test_values(&z, l).unwrap();
        prop_assert_eq!(r1.lags, r2.lags);
        prop_assert!((r1.statistic - r2.statistic).abs() < 1e-8);
    }

    #[test]
    fn sc_penalizes_more_than_aic(ll in -1e3f64..1e3, k in 1usize..10, n in 8usize..5000) {
        let a = InfoCriteria::from_loglik(ll, k, n);
        let b = InfoCriteria::from_loglik(ll, k + 1, n);
        prop_assert!(b.sc - a.sc > b.aic - a.aic);
    }
}
