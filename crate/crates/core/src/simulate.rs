//! Synthetic GARCH-S return paths with known coefficients.
//!
//! Innovations are drawn exactly from the squared Gram-Charlier density by
//! accept-reject. The proposal is the mixture
//! `phi(eta) * [A + B (eta^6 + 9 eta^2)]`, with `A = 1 + c` and
//! `B = (1 + 1/c) (s/6)^2`, which dominates `phi * psi^2` everywhere because
//! `(1 + x)^2 <= (1 + c) + (1 + 1/c) x^2` and `He3^2 <= eta^6 + 9 eta^2`.
//! Each mixture component is a signed chi variate, so the envelope mass
//! `M(s) = (A + 24 B) / Gamma(s)` stays small even far in the tails.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::garchs::{gc_normalizer, gc_polynomial, standardize, GarchSParams};
use crate::timeseries::DatedSeries;

/// Generator used for every simulated path; seeded with `seed_from_u64`.
pub type SimRng = ChaCha8Rng;
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

pub const DEFAULT_BURN_IN: usize = 500;
const MAX_ABS_SKEW: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Innovation {
    #[default]
    GramCharlier,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: GarchSParams,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub innovation: Innovation,
    /// First date of the retained path; later dates step over weekends.
    pub start: NaiveDate,
}

impl SimConfig {
    pub fn new(params: GarchSParams, n: usize, seed: u64) -> Self {
        Self {
            params,
            n,
            burn_in: DEFAULT_BURN_IN,
            seed,
            innovation: Innovation::GramCharlier,
            start: NaiveDate::from_ymd_opt(2017, 1, 3).expect("valid date"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Size("simulated path length must be at least 1".into()));
        }
        self.params.validate()
    }
}

/// Accept-reject sampler for one skewness value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    arch: f64,
    tail: f64,
    mass: f64,
    normalizer: f64,
    s: f64,
}

impl Envelope {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.abs() < MAX_ABS_SKEW) {
            return Err(Error::InvalidParams(format!(
                "cannot build sampling envelope for skewness {s}"
            )));
        }
        let a = s / 6.0;
        let (arch, tail) = if a == 0.0 {
            (1.0, 0.0)
        } else {
            let c = 24f64.sqrt() * a.abs();
            (1.0 + c, (1.0 + 1.0 / c) * a * a)
        };
        let normalizer = gc_normalizer(s);
        Ok(Self {
            arch,
            tail,
            mass: (arch + 24.0 * tail) / normalizer,
            normalizer,
            s,
        })
    }

    /// `M(s)`: expected proposals per accepted draw.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn bound(&self, eta: f64) -> f64 {
        let e2 = eta * eta;
        self.arch + self.tail * (e2 * e2 * e2 + 9.0 * e2)
    }

    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = self.arch + 24.0 * self.tail;
        let u: f64 = rng.random::<f64>() * total;
        if u < self.arch {
            return rng.sample(StandardNormal);
        }
        let dof = if u < self.arch + 9.0 * self.tail {
            3.0
        } else {
            7.0
        };
        let chi2: f64 = ChiSquared::new(dof).expect("positive dof").sample(rng);
        let r = chi2.sqrt();
        if rng.random_bool(0.5) {
            r
        } else {
            -r
        }
    }

    /// One exact draw and the number of proposals it took.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, usize) {
        let mut tries = 0;
        loop {
            tries += 1;
            let eta = self.propose(rng);
            let psi = gc_polynomial(eta, self.s);
            let u: f64 = rng.random();
            if u * self.bound(eta) <= psi * psi {
                return (eta, tries);
            }
        }
    }
}

/// One draw from the innovation density with skewness `s`.
pub fn sample_eta<R: Rng + ?Sized>(s: f64, rng: &mut R) -> Result<f64> {
    Ok(Envelope::new(s)?.sample(rng).0)
}

/// Returns together with the generator's internal paths, all of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub returns: DatedSeries,
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub eta: Vec<f64>,
    pub s: Vec<f64>,
}

fn weekdays(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Runs the model forward from its unconditional state.
///
/// The residual and standardized residual fed to the recursions are recomputed
/// from the generated returns with the same expressions the filter uses, so
/// filtering the path with the true coefficients (and the generator's state at
/// the second observation) reproduces `h` and `s` exactly.
pub fn simulate_path(config: &SimConfig) -> Result<SimulatedPath> {
    config.validate()?;
    let p = &config.params;
    let mut rng = SimRng::seed_from_u64(config.seed);
    let mut h = p.unconditional_variance();
    let mut s = p.beta0 / (1.0 - p.beta2);
    let mut r_prev = 0.0;

    let n = config.n;
    let mut out = SimulatedPath {
        returns: DatedSeries::new("r", vec![], vec![])?,
        eps: Vec::with_capacity(n),
        h: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
    };
    let mut returns = Vec::with_capacity(n);
    for t in 0..config.burn_in + n {
        let draw = match config.innovation {
            Innovation::Gaussian => rng.sample(StandardNormal),
            Innovation::GramCharlier => {
                let clamped = s.clamp(-MAX_ABS_SKEW + 1e-9, MAX_ABS_SKEW - 1e-9);
                sample_eta(clamped, &mut rng)?
            }
        };
        let r = p.mu * r_prev + h.sqrt() * draw;
        let eps = p.residual(r, r_prev);
        let eta = standardize(eps, h);
        if t >= config.burn_in {
            returns.push(r);
            out.eps.push(eps);
            out.h.push(h);
            out.eta.push(eta);
            out.s.push(s);
        }
        h = p.next_variance(eps, h);
        s = p.next_skew(eta, s);
        r_prev = r;
    }
    out.returns = DatedSeries::new("r", weekdays(config.start, n), returns)?;
    Ok(out)
}

pub fn simulate_returns(config: &SimConfig) -> Result<DatedSeries> {
    Ok(simulate_path(config)?.returns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_skew_envelope_is_exact_normal() {
        let e = Envelope::new(0.0).unwrap();
        assert_eq!(e.mass(), 1.0);
        let mut rng = SimRng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(e.sample(&mut rng).1, 1);
        }
    }

    #[test]
    fn envelope_dominates_target() {
        for s in [-3.9, -2.0, -0.8, -0.05, 0.03, 0.5, 1.0, 3.5] {
            let e = Envelope::new(s).unwrap();
            let mut x = -30.0;
            while x <= 30.0 {
                let psi = gc_polynomial(x, s);
                assert!(psi * psi <= e.bound(x) * (1.0 + 1e-12), "s={s} eta={x}");
                x += 0.01;
            }
        }
    }

    #[test]
    fn envelope_mass_is_moderate() {
        assert!(Envelope::new(0.8).unwrap().mass() < 3.0);
        assert!(Envelope::new(3.9).unwrap().mass() < 6.0);
        assert!(Envelope::new(4.0).is_err());
    }

    #[test]
    fn weekday_calendar() {
        let d = weekdays(NaiveDate::from_ymd_opt(2020, 1, 3).unwrap(), 3);
        assert_eq!(d[1], NaiveDate::from_ymd_opt(2020, 1, 6).unwrap());
    }

    #[test]
    fn reproducible() {
        let p = GarchSParams {
            mu: 0.05,
            alpha0: 1e-6,
            alpha1: 0.1,
            alpha2: 0.85,
            beta0: 0.0,
            beta1: 0.05,
            beta2: 0.3,
        };
        let c = SimConfig::new(p, 300, 9);
        assert_eq!(simulate_path(&c).unwrap(), simulate_path(&c).unwrap());
        let mut c2 = c.clone();
        c2.seed = 10;
        assert_ne!(simulate_path(&c).unwrap(), simulate_path(&c2).unwrap());
    }
}
