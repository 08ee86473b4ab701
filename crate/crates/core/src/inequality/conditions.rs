//! Exact admissibility decisions for each theorem's hypotheses.
//!
//! Every condition is evaluated in rational arithmetic, so boundary cases
//! (equalities) are classified exactly according to the strict or non-strict
//! sign of the hypothesis.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::params::{format_rational, one, Exponent, ParamSet, TheoremId};
use crate::error::Result;

/// Outcome of [`check_conditions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub theorem: TheoremId,
    pub admissible: bool,
    /// Names of the violated hypotheses, in the order they are stated.
    pub violated: Vec<String>,
    /// Remarks that do not affect the verdict (e.g. sign-convention notes).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

struct Checker {
    violated: Vec<String>,
    notes: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Self { violated: Vec::new(), notes: Vec::new() }
    }

    fn need(&mut self, holds: bool, name: &str) {
        if !holds {
            self.violated.push(name.to_string());
        }
    }

    fn finish(self, theorem: TheoremId) -> Admissibility {
        Admissibility { theorem, admissible: self.violated.is_empty(), violated: self.violated, notes: self.notes }
    }
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `1 < p < ∞`.
fn open_exponent(ck: &mut Checker, p: &Exponent, name: &str) {
    let ok = p.finite().is_some_and(|p| p > &one());
    ck.need(ok, &format!("1 < {name} < inf"));
}

/// `1/p'` for `p ≥ 1`: `1 - 1/p`.
fn dual_recip(p: &Exponent) -> BigRational {
    one() - p.recip()
}

/// Decides the hypotheses of `t` for `params` exactly.
pub fn check_conditions(t: TheoremId, params: &ParamSet) -> Result<Admissibility> {
    use TheoremId::*;
    let mut ck = Checker::new();
    let n = params.require_n(t)?;
    ck.need(n >= 1, "n >= 1");
    let nn = int(n);
    let nm1 = int(n.saturating_sub(1));
    match t {
        Sobolev_1_1 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let q = params.require(t, "q", &params.q)?;
            open_exponent(&mut ck, p, "p");
            ck.need(s.is_positive(), "s > 0");
            let sp_lt_n = p.finite().is_some_and(|p| s * p < nn);
            ck.need(sp_lt_n, "s*p < n");
            ck.need(p.recip() >= q.recip(), "p <= q");
            match params.p_star() {
                Some(ps) => ck.need(q.finite().is_some_and(|q| q <= &ps), "q <= p*"),
                None => ck.notes.push("p* is undefined because s*p >= n".into()),
            }
        }
        HLS_2_1 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let q = params.require(t, "q", &params.q)?;
            ck.need(s.is_positive() && s < &nn, "0 < s < n");
            ck.need(p.finite().is_some_and(|p| p > &one()), "p > 1");
            ck.need(!q.is_infinite(), "q < inf");
            ck.need(q.recip() == p.recip() - s / &nn, "1/q = 1/p - s/n");
        }
        SteinWeiss_2_2 | RadialSW_2_3 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let q = params.require(t, "q", &params.q)?;
            let alpha = params.require(t, "alpha", &params.alpha)?;
            let beta = params.require(t, "beta", &params.beta)?;
            ck.need(s.is_positive() && s < &nn, "0 < s < n");
            let p_is_one = p.finite().is_some_and(|p| p == &one());
            if t == RadialSW_2_3 {
                // the endpoint p = 1 is allowed with a strict weight condition
                ck.need(p.finite().is_some_and(|p| p >= &one()), "1 <= p < inf");
            } else {
                open_exponent(&mut ck, p, "p");
            }
            ck.need(alpha < &(&nn * dual_recip(p)), "alpha < n/p'");
            ck.need(beta < &(&nn * q.recip()), "beta < n/q");
            let sum = alpha + beta;
            if t == SteinWeiss_2_2 {
                ck.need(!sum.is_negative(), "alpha + beta >= 0");
            } else {
                let floor = &nm1 * (q.recip() - p.recip());
                if p_is_one {
                    ck.need(sum > floor, "alpha + beta > (n-1)(1/q - 1/p)");
                } else {
                    ck.need(sum >= floor, "alpha + beta >= (n-1)(1/q - 1/p)");
                }
            }
            ck.need(q.recip() == p.recip() + (alpha + beta - s) / &nn, "1/q = 1/p + (alpha + beta - s)/n");
            ck.need(p.recip() >= q.recip(), "p <= q");
            ck.need(!q.is_infinite(), "q < inf");
        }
        RadialSW_qinf_2_4 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let alpha = params.require(t, "alpha", &params.alpha)?;
            let beta = params.require(t, "beta", &params.beta)?;
            let q = params.q.clone().unwrap_or(Exponent::Infinite);
            ck.need(q.is_infinite(), "q = inf");
            ck.need(s.is_positive() && s < &nn, "0 < s < n");
            open_exponent(&mut ck, p, "p");
            ck.need(alpha < &(&nn * dual_recip(p)), "alpha < n/p'");
            ck.need(beta < &(&nn * q.recip()), "beta < n/q");
            ck.need(q.recip() == p.recip() + (alpha + beta - s) / &nn, "1/q = 1/p + (alpha + beta - s)/n");
            let sum = alpha + beta;
            // encoded as printed; the finite-q theorem has the opposite sign
            let printed = sum > &nm1 * (p.recip() - q.recip());
            let finite_q_sign = sum > &nm1 * (q.recip() - p.recip());
            ck.need(printed, "alpha + beta > (n-1)(1/p - 1/q)");
            if printed != finite_q_sign {
                ck.notes.push(format!(
                    "sign convention: with (n-1)(1/q - 1/p), as in the finite-q statement, this condition would {}",
                    if finite_q_sign { "hold" } else { "fail" }
                ));
            }
        }
        Strauss_5_2 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            open_exponent(&mut ck, p, "p");
            ck.need(p.recip() < *s, "1/p < s");
            ck.need(s < &nn, "s < n");
        }
        Ni_6_1 | NiBall_8_1 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            open_exponent(&mut ck, p, "p");
            ck.need(p.recip() < *s, "1/p < s");
            ck.need(s < &(&nn * p.recip()), "s < n/p");
        }
        Critical_6_2 | CriticalBall_8_2 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let c = params.require(t, "c", &params.c)?;
            open_exponent(&mut ck, p, "p");
            ck.need(s.is_positive(), "s > 0");
            ck.need(s < &(&nn * p.recip()), "s < n/p");
            ck.need(c > &-nn.clone(), "c > -n");
            let cond = p.finite().is_some_and(|p| (one() - s * p) * c <= &nm1 * p * s);
            ck.need(cond, "(1 - s*p)*c <= (n-1)*p*s");
        }
        WeightedConv_6_3 => {
            let p = params.require(t, "p", &params.p)?;
            let q = params.require(t, "q", &params.q)?;
            let r = params.require(t, "r", &params.r)?;
            let alpha = params.require(t, "alpha", &params.alpha)?;
            let beta = params.require(t, "beta", &params.beta)?;
            let gamma = params.require(t, "gamma", &params.gamma)?;
            let (ip, iq, ir) = (p.recip(), q.recip(), r.recip());
            ck.need(ir == &ip + &iq + (alpha + beta + gamma) / &nn - one(), "1/r = 1/p + 1/q + (alpha + beta + gamma)/n - 1");
            open_exponent(&mut ck, p, "p");
            open_exponent(&mut ck, q, "q");
            open_exponent(&mut ck, r, "r");
            ck.need(ir <= &ip + &iq, "1/r <= 1/p + 1/q");
            ck.need(alpha < &(&nn * (one() - &ip)), "alpha < n/p'");
            ck.need(beta < &(&nn * (one() - &iq)), "beta < n/q'");
            ck.need(gamma < &(&nn * &ir), "gamma < n/r");
            ck.need(alpha + beta >= &nm1 * (one() - &ip - &iq), "alpha + beta >= (n-1)(1 - 1/p - 1/q)");
            ck.need(beta + gamma >= &nm1 * (&ir - &iq), "beta + gamma >= (n-1)(1/r - 1/q)");
            ck.need(gamma + alpha >= &nm1 * (&ir - &ip), "gamma + alpha >= (n-1)(1/r - 1/p)");
            let any_positive = alpha.is_positive() || beta.is_positive() || gamma.is_positive();
            let all_zero = alpha.is_zero() && beta.is_zero() && gamma.is_zero();
            ck.need(any_positive || all_zero, "max(alpha, beta, gamma) > 0 or alpha = beta = gamma = 0");
        }
        WeightedEmb_6_4 => {
            let s = params.require(t, "s", &params.s)?;
            let p = params.require(t, "p", &params.p)?;
            let r = params.require(t, "r", &params.r)?;
            let c = params.require(t, "c", &params.c)?;
            open_exponent(&mut ck, p, "p");
            ck.need(s.is_positive(), "s > 0");
            ck.need(s < &(&nn * p.recip()), "s < n/p");
            ck.need(p.recip() >= r.recip(), "p <= r");
            match params.p_star_c() {
                Some(psc) => ck.need(r.finite().is_some_and(|r| r <= &psc), "r <= p*_c"),
                None => ck.notes.push("p*_c is undefined because s*p >= n".into()),
            }
            if let Some(pf) = p.finite() {
                ck.need(&(-s * pf) < c, "-s*p < c");
                let top = r.finite().map(|r| &nm1 * (r - pf) / pf);
                ck.need(top.is_some_and(|top| c < &top), "c < (n-1)(r-p)/p");
            } else {
                ck.need(false, "-s*p < c");
                ck.need(false, "c < (n-1)(r-p)/p");
            }
        }
    }
    let mut out = ck.finish(t);
    if let (Some(ps), Sobolev_1_1) = (params.p_star(), t) {
        out.notes.push(format!("p* = {}", format_rational(&ps)));
    }
    if let (Some(psc), Critical_6_2 | CriticalBall_8_2 | WeightedEmb_6_4) = (params.p_star_c(), t) {
        out.notes.push(format!("p*_c = {}", format_rational(&psc)));
    }
    Ok(out)
}
