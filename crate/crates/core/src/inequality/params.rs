//! Theorem identifiers and exact parameter tuples.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The inequalities under test.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// `H^{s,p} ⊂ L^q`, `p ≤ q ≤ p*`.
    Sobolev_1_1,
    /// Hardy–Littlewood–Sobolev.
    HLS_2_1,
    /// Stein–Weiss power-weighted HLS.
    SteinWeiss_2_2,
    /// Stein–Weiss for radial data, with the relaxed `α + β` condition.
    RadialSW_2_3,
    /// The radial Stein–Weiss inequality at `q = ∞`.
    RadialSW_qinf_2_4,
    /// Strauss decay `|u(x)| ≤ C|x|^{-(n-1)/p}‖u‖_{H^{s,p}}`.
    Strauss_5_2,
    /// Ni-type decay `|u(x)| ≤ C|x|^{s-n/p}‖u‖_{H^{s,p}}`.
    Ni_6_1,
    /// Critical weighted embedding into `L^{p*_c}(|x|^c)`.
    Critical_6_2,
    /// Weighted convolution inequality for radial pairs.
    WeightedConv_6_3,
    /// `H^{s,p}_rad ⊂ L^r(|x|^c dx)`.
    WeightedEmb_6_4,
    /// Ni-type decay for the Dirichlet potential space of a ball.
    NiBall_8_1,
    /// Critical weighted embedding for the ball.
    CriticalBall_8_2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::Sobolev_1_1,
        TheoremId::HLS_2_1,
        TheoremId::SteinWeiss_2_2,
        TheoremId::RadialSW_2_3,
        TheoremId::RadialSW_qinf_2_4,
        TheoremId::Strauss_5_2,
        TheoremId::Ni_6_1,
        TheoremId::Critical_6_2,
        TheoremId::WeightedConv_6_3,
        TheoremId::WeightedEmb_6_4,
        TheoremId::NiBall_8_1,
        TheoremId::CriticalBall_8_2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Sobolev_1_1 => "Sobolev_1_1",
            TheoremId::HLS_2_1 => "HLS_2_1",
            TheoremId::SteinWeiss_2_2 => "SteinWeiss_2_2",
            TheoremId::RadialSW_2_3 => "RadialSW_2_3",
            TheoremId::RadialSW_qinf_2_4 => "RadialSW_qinf_2_4",
            TheoremId::Strauss_5_2 => "Strauss_5_2",
            TheoremId::Ni_6_1 => "Ni_6_1",
            TheoremId::Critical_6_2 => "Critical_6_2",
            TheoremId::WeightedConv_6_3 => "WeightedConv_6_3",
            TheoremId::WeightedEmb_6_4 => "WeightedEmb_6_4",
            TheoremId::NiBall_8_1 => "NiBall_8_1",
            TheoremId::CriticalBall_8_2 => "CriticalBall_8_2",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::domain("TheoremId", format!("unknown theorem `{s}`")))
    }
}

/// Parses `"3"`, `"-9/20"`, `"0.25"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::domain("parse_rational", format!("`{text}` is not a rational number"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::domain("parse_rational", format!("`{text}` has a zero denominator")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let all: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(all) * ten.pow(scale);
    if neg {
        value = -value;
    }
    Ok(value)
}

/// `a/b` in lowest terms, or the integer alone.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// An integrability exponent in `[1, ∞]` (any rational accepted; range is a
/// hypothesis to check, not a parse error).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            t => Ok(Exponent::Finite(parse_rational(t)?)),
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(&self) -> BigRational {
        match self {
            Exponent::Finite(p) if !p.is_zero() => p.recip(),
            Exponent::Finite(_) => BigRational::zero(),
            Exponent::Infinite => BigRational::zero(),
        }
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => to_f64(p),
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => f.write_str(&format_rational(p)),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

/// A parameter tuple, stored exactly. Fields a theorem does not use are
/// left empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamSet {
    pub n: Option<u32>,
    pub s: Option<BigRational>,
    pub p: Option<Exponent>,
    pub q: Option<Exponent>,
    pub r: Option<Exponent>,
    pub alpha: Option<BigRational>,
    pub beta: Option<BigRational>,
    pub gamma: Option<BigRational>,
    pub c: Option<BigRational>,
}

const KEYS: [&str; 9] = ["n", "s", "p", "q", "r", "alpha", "beta", "gamma", "c"];

impl ParamSet {
    /// Parses `"n=3, s=1, p=2, q=10, alpha=-9/20, beta=1/4"` (commas or
    /// whitespace between entries).
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ParamSet::default();
        for item in text.split([',', ' ', '\t', '\n']).filter(|t| !t.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::domain("ParamSet::parse", format!("entry `{item}` is not of the form key=value")))?;
            out.set(key.trim(), value.trim())?;
        }
        Ok(out)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let dup = |set: bool| if set { Err(Error::domain("ParamSet", format!("field `{key}` given twice"))) } else { Ok(()) };
        match key {
            "n" => {
                dup(self.n.is_some())?;
                let n: u32 = value.parse().map_err(|_| Error::domain("ParamSet", format!("dimension `{value}` must be a positive integer")))?;
                self.n = Some(n);
            }
            "s" => {
                dup(self.s.is_some())?;
                self.s = Some(parse_rational(value)?);
            }
            "p" => {
                dup(self.p.is_some())?;
                self.p = Some(Exponent::parse(value)?);
            }
            "q" => {
                dup(self.q.is_some())?;
                self.q = Some(Exponent::parse(value)?);
            }
            "r" => {
                dup(self.r.is_some())?;
                self.r = Some(Exponent::parse(value)?);
            }
            "alpha" | "α" => {
                dup(self.alpha.is_some())?;
                self.alpha = Some(parse_rational(value)?);
            }
            "beta" | "β" => {
                dup(self.beta.is_some())?;
                self.beta = Some(parse_rational(value)?);
            }
            "gamma" | "γ" => {
                dup(self.gamma.is_some())?;
                self.gamma = Some(parse_rational(value)?);
            }
            "c" => {
                dup(self.c.is_some())?;
                self.c = Some(parse_rational(value)?);
            }
            other => return Err(Error::domain("ParamSet", format!("unknown field `{other}`; expected one of {KEYS:?}"))),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(n) = self.n {
            out.push(("n", n.to_string()));
        }
        let rats = [("s", &self.s)];
        let exps = [("p", &self.p), ("q", &self.q), ("r", &self.r)];
        let rest = [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("c", &self.c)];
        out.extend(rats.iter().filter_map(|(k, v)| v.as_ref().map(|x| (*k, format_rational(x)))));
        out.extend(exps.iter().filter_map(|(k, v)| v.as_ref().map(|x| (*k, x.to_string()))));
        out.extend(rest.iter().filter_map(|(k, v)| v.as_ref().map(|x| (*k, format_rational(x)))));
        out
    }

    /// `p* = np/(n - sp)` when `sp < n`.
    pub fn p_star(&self) -> Option<BigRational> {
        let (n, s, p) = (self.n?, self.s.as_ref()?, self.p.as_ref()?.finite()?);
        let n = BigRational::from_integer(n.into());
        let den = &n - s * p;
        den.is_positive().then(|| n * p / den)
    }

    /// `p*_c = p(n + c)/(n - sp)` when `sp < n`.
    pub fn p_star_c(&self) -> Option<BigRational> {
        let (n, s, p, c) = (self.n?, self.s.as_ref()?, self.p.as_ref()?.finite()?, self.c.as_ref()?);
        let n = BigRational::from_integer(n.into());
        let den = &n - s * p;
        den.is_positive().then(|| p * (n + c) / den)
    }

    pub(crate) fn require_n(&self, t: TheoremId) -> Result<u32> {
        self.n.ok_or_else(|| missing(t, "n"))
    }

    pub(crate) fn require<'a, T>(&self, t: TheoremId, field: &'static str, v: &'a Option<T>) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| missing(t, field))
    }

    pub fn s_f64(&self) -> Option<f64> {
        self.s.as_ref().map(to_f64)
    }

    pub fn p_f64(&self) -> Option<f64> {
        self.p.as_ref().map(Exponent::to_f64)
    }

    pub fn q_f64(&self) -> Option<f64> {
        self.q.as_ref().map(Exponent::to_f64)
    }

    pub fn r_f64(&self) -> Option<f64> {
        self.r.as_ref().map(Exponent::to_f64)
    }

    pub fn alpha_f64(&self) -> Option<f64> {
        self.alpha.as_ref().map(to_f64)
    }

    pub fn beta_f64(&self) -> Option<f64> {
        self.beta.as_ref().map(to_f64)
    }

    pub fn gamma_f64(&self) -> Option<f64> {
        self.gamma.as_ref().map(to_f64)
    }

    pub fn c_f64(&self) -> Option<f64> {
        self.c.as_ref().map(to_f64)
    }
}

fn missing(t: TheoremId, field: &'static str) -> Error {
    Error::MissingField { theorem: t.name().to_string(), field }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for ParamSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamSet::parse(s)
    }
}

// Serialized as a map of exact strings, in a fixed key order.
impl Serialize for ParamSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let entries = self.entries();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (k, v) in entries {
            map.serialize_entry(k, &v)?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for ParamSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Text(String),
            Map(std::collections::BTreeMap<String, Scalar>),
        }
        match Form::deserialize(deserializer).map_err(|_| {
            D::Error::custom("parameters must be a string like \"n=3, p=3/2\" or a table of integers and exact strings (floats are rejected)")
        })? {
            Form::Text(t) => ParamSet::parse(&t).map_err(D::Error::custom),
            Form::Map(m) => {
                let mut out = ParamSet::default();
                for (k, v) in m {
                    let text = match v {
                        Scalar::Int(i) => i.to_string(),
                        Scalar::Text(t) => t,
                    };
                    out.set(&k, &text).map_err(D::Error::custom)?;
                }
                Ok(out)
            }
        }
    }
}

pub(crate) fn one() -> BigRational {
    BigRational::one()
}
