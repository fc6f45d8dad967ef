//! Map between the constrained coefficient space and an unconstrained search space.
//!
//! | coefficient      | unconstrained coordinate                        |
//! |------------------|-------------------------------------------------|
//! | `mu`             | `atanh(mu)`                                     |
//! | `alpha0`         | `ln(alpha0)`                                    |
//! | `alpha1, alpha2` | `logit(alpha1 + alpha2)`, `logit(alpha1 / (alpha1 + alpha2))` |
//! | `beta0, beta1`   | identity                                        |
//! | `beta2`          | `atanh(beta2)`                                  |

use crate::garchs::{GarchSParams, Model};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamTransform {
    pub model: Model,
}

fn logistic<T: Scalar>(x: T) -> T {
    let bound = T::epsilon().recip().ln();
    let x = x.max(-bound).min(bound);
    T::one() / (T::one() + (-x).exp())
}

fn logit<T: Scalar>(p: T) -> T {
    let eps = T::epsilon();
    let p = p.max(eps).min(T::one() - eps);
    (p / (T::one() - p)).ln()
}

fn bounded_tanh<T: Scalar>(x: T) -> T {
    let bound = T::lit(0.5) * (T::lit(2.0) / T::epsilon()).ln();
    x.max(-bound).min(bound).tanh()
}

fn exp_positive<T: Scalar>(x: T) -> T {
    let bound = T::max_value().ln() - T::one();
    let v = x.max(-bound).min(bound).exp();
    v.max(T::min_positive_value())
}

impl ParamTransform {
    pub fn new(model: Model) -> Self {
        Self { model }
    }

    pub fn dim(&self) -> usize {
        self.model.n_params()
    }

    pub fn to_unconstrained<T: Scalar>(&self, p: &GarchSParams<T>) -> Vec<T> {
        let persistence = p.alpha1 + p.alpha2;
        let share = if persistence > T::zero() {
            p.alpha1 / persistence
        } else {
            T::lit(0.5)
        };
        let mut u = vec![p.mu.atanh(), p.alpha0.ln(), logit(persistence), logit(share)];
        if self.model == Model::GarchS {
            u.extend([p.beta0, p.beta1, p.beta2.atanh()]);
        }
        u
    }

    /// Always yields coefficients satisfying every parameter invariant.
    pub fn to_constrained<T: Scalar>(&self, u: &[T]) -> GarchSParams<T> {
        let persistence = logistic(u[2]);
        let share = logistic(u[3]);
        let mut p = GarchSParams::garch11(
            bounded_tanh(u[0]),
            exp_positive(u[1]),
            persistence * share,
            persistence * (T::one() - share),
        );
        if self.model == Model::GarchS {
            p.beta0 = u[4];
            p.beta1 = u[5];
            p.beta2 = bounded_tanh(u[6]);
        }
        p
    }

    /// `d theta / d u` as a 7 x dim matrix (rows follow the coefficient order).
    pub fn jacobian<T: Scalar>(&self, u: &[T]) -> Matrix<T> {
        let d = self.dim();
        let p = self.to_constrained(u);
        let pers = logistic(u[2]);
        let share = logistic(u[3]);
        let dp = pers * (T::one() - pers);
        let dw = share * (T::one() - share);
        let mut j = vec![vec![T::zero(); d]; 7];
        j[0][0] = T::one() - p.mu * p.mu;
        j[1][1] = p.alpha0;
        j[2][2] = dp * share;
        j[2][3] = pers * dw;
        j[3][2] = dp * (T::one() - share);
        j[3][3] = -pers * dw;
        if self.model == Model::GarchS {
            j[4][4] = T::one();
            j[5][5] = T::one();
            j[6][6] = T::one() - p.beta2 * p.beta2;
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_params() -> impl Strategy<Value = GarchSParams> {
        (
            -0.95f64..0.95,
            1e-8f64..1.0,
            0.001f64..0.998,
            0.001f64..0.999,
            -0.5f64..0.5,
            -0.5f64..0.5,
            -0.95f64..0.95,
        )
            .prop_map(|(mu, a0, pers, share, b0, b1, b2)| GarchSParams {
                mu,
                alpha0: a0,
                alpha1: pers * share,
                alpha2: pers * (1.0 - share),
                beta0: b0,
                beta1: b1,
                beta2: b2,
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip(p in arb_params()) {
            let t = ParamTransform::new(Model::GarchS);
            let back = t.to_constrained(&t.to_unconstrained(&p));
            for (a, b) in p.to_array().iter().zip(back.to_array()) {
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{p:?} -> {back:?}");
            }
        }

        #[test]
        fn any_vector_is_valid(u in prop::collection::vec(-1e3f64..1e3, 7)) {
            let t = ParamTransform::new(Model::GarchS);
            prop_assert!(t.to_constrained(&u).validate().is_ok());
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let t = ParamTransform::new(Model::GarchS);
        let u = [0.3f64, -9.0, 2.0, -1.5, 0.01, 0.05, 0.4];
        let j = t.jacobian(&u);
        for c in 0..7 {
            let h = 1e-6;
            let mut up = u;
            let mut dn = u;
            up[c] += h;
            dn[c] -= h;
            let fp = t.to_constrained(&up).to_array();
            let fm = t.to_constrained(&dn).to_array();
            for r in 0..7 {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                assert!((fd - j[r][c]).abs() < 1e-7 * (1.0 + fd.abs()), "({r},{c})");
            }
        }
    }

    #[test]
    fn garch11_dimension() {
        let t = ParamTransform::new(Model::Garch11);
        let p = GarchSParams::garch11(0.1, 1e-5, 0.1, 0.85);
        let u = t.to_unconstrained(&p);
        assert_eq!(u.len(), 4);
        assert_eq!(t.to_constrained(&u).beta1, 0.0);
    }
}
