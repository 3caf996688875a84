//! Non-negative weight sequences s = (s_k) with divergent partial sums.
//!
//! Every [`WeightSeq`] kind guarantees Σ s_k = ∞ structurally: positive
//! constants, the harmonic sequence, power laws k^(-p) with p ∈ (0, 1],
//! and explicit tables whose tail falls back to one of those rules.
//!
//! [`WeightSums`] is the prefix-sum engine behind density estimates and
//! block constructions. Prefixes up to 10⁶ are Kahan-summed exactly;
//! beyond that an Euler–Maclaurin expansion anchored at the cached
//! boundary takes over, accurate to far below 10⁻¹² relative error. That
//! reach matters: greedy harmonic block partitions pass 10²⁰ within a few
//! dozen blocks, far out of range of any element-by-element scan.

use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::KahanSum;

/// Exact Kahan prefix cache length; analytic continuation beyond.
const CACHE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("constant weight must be positive and finite, got {0}")]
    NonPositiveConstant(f64),
    #[error("power-law exponent must lie in (0, 1] for divergence, got {0}")]
    ExponentOutOfRange(f64),
    #[error("table weight at position {index} must be non-negative and finite, got {value}")]
    InvalidTableValue { index: usize, value: f64 },
    #[error("weight spec '{0}' is not constant(c), harmonic, powerlaw(p), or table(v,..;tail)")]
    UnknownSpec(String),
}

/// Tail rule for table-backed weights; restricted to structurally
/// divergent kinds so the whole table sequence stays divergent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    Constant(f64),
    Harmonic,
    PowerLaw(f64),
}

/// A weight sequence k ↦ s_k ≥ 0 with Σ s_k = ∞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSeq {
    /// s_k = c with c > 0.
    Constant(f64),
    /// s_k = 1/k.
    Harmonic,
    /// s_k = k^(-p) with p ∈ (0, 1].
    PowerLaw(f64),
    /// Explicit head, divergent tail rule for k beyond the table.
    /// The tail rule is evaluated at the absolute index k.
    Table { values: Vec<f64>, tail: TailRule },
}

impl WeightSeq {
    pub fn constant(c: f64) -> Result<Self, WeightError> {
        if c <= 0.0 || !c.is_finite() {
            return Err(WeightError::NonPositiveConstant(c));
        }
        Ok(WeightSeq::Constant(c))
    }

    pub fn power_law(p: f64) -> Result<Self, WeightError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(WeightError::ExponentOutOfRange(p));
        }
        Ok(WeightSeq::PowerLaw(p))
    }

    pub fn table(values: Vec<f64>, tail: TailRule) -> Result<Self, WeightError> {
        for (i, &v) in values.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(WeightError::InvalidTableValue { index: i, value: v });
            }
        }
        tail.validate()?;
        Ok(WeightSeq::Table { values, tail })
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        match self {
            WeightSeq::Constant(c) => {
                WeightSeq::constant(*c)?;
            }
            WeightSeq::Harmonic => {}
            WeightSeq::PowerLaw(p) => {
                WeightSeq::power_law(*p)?;
            }
            WeightSeq::Table { values, tail } => {
                WeightSeq::table(values.clone(), tail.clone())?;
            }
        }
        Ok(())
    }

    /// s_k for k ≥ 1.
    pub fn weight(&self, k: u128) -> f64 {
        debug_assert!(k >= 1);
        match self {
            WeightSeq::Constant(c) => *c,
            WeightSeq::Harmonic => 1.0 / k as f64,
            WeightSeq::PowerLaw(p) => (k as f64).powf(-p),
            WeightSeq::Table { values, tail } => {
                if (k as usize) <= values.len() && k <= usize::MAX as u128 {
                    values[k as usize - 1]
                } else {
                    tail.as_seq().weight(k)
                }
            }
        }
    }
}

impl TailRule {
    fn validate(&self) -> Result<(), WeightError> {
        self.as_seq().validate()
    }

    fn as_seq(&self) -> WeightSeq {
        match self {
            TailRule::Constant(c) => WeightSeq::Constant(*c),
            TailRule::Harmonic => WeightSeq::Harmonic,
            TailRule::PowerLaw(p) => WeightSeq::PowerLaw(*p),
        }
    }
}

/// Prefix-sum engine for one weight sequence.
///
/// Not `Sync` (it lazily grows an internal cache); construct one per
/// operation. Construction validates the sequence.
pub struct WeightSums {
    seq: WeightSeq,
    cache: RefCell<Cache>,
    table_tail: Option<Box<WeightSums>>,
    table_total: f64,
}

struct Cache {
    prefix: Vec<f64>,
    kahan: KahanSum,
}

impl WeightSums {
    pub fn new(seq: &WeightSeq) -> Result<Self, WeightError> {
        seq.validate()?;
        let (table_tail, table_total) = match seq {
            WeightSeq::Table { values, tail } => {
                let mut k = KahanSum::new();
                for &v in values {
                    k.add(v);
                }
                (Some(Box::new(WeightSums::new(&tail.as_seq())?)), k.value())
            }
            _ => (None, 0.0),
        };
        Ok(WeightSums {
            seq: seq.clone(),
            cache: RefCell::new(Cache {
                prefix: Vec::new(),
                kahan: KahanSum::new(),
            }),
            table_tail,
            table_total,
        })
    }

    pub fn seq(&self) -> &WeightSeq {
        &self.seq
    }

    pub fn weight(&self, k: u128) -> f64 {
        self.seq.weight(k)
    }

    /// S(k) = Σ_{i=1..k} s_i, with S(0) = 0.
    pub fn prefix(&self, k: u128) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match &self.seq {
            WeightSeq::Constant(c) => c * k as f64,
            WeightSeq::Harmonic => self.cached_or_analytic(k, 1.0),
            WeightSeq::PowerLaw(p) => self.cached_or_analytic(k, *p),
            WeightSeq::Table { values, .. } => {
                let len = values.len() as u128;
                if k <= len {
                    self.cached_table_prefix(k as usize)
                } else {
                    let tail = self.table_tail.as_ref().expect("table tail engine");
                    self.table_total + tail.prefix(k) - tail.prefix(len)
                }
            }
        }
    }

    /// Σ over the block (a, b] = S(b) − S(a).
    pub fn block_sum(&self, a: u128, b: u128) -> f64 {
        debug_assert!(a <= b);
        self.prefix(b) - self.prefix(a)
    }

    fn cached_or_analytic(&self, k: u128, p: f64) -> f64 {
        if k <= CACHE_LIMIT as u128 {
            self.grow_cache(k as u64);
            self.cache.borrow().prefix[k as usize - 1]
        } else {
            self.grow_cache(CACHE_LIMIT);
            let anchor = self.cache.borrow().prefix[CACHE_LIMIT as usize - 1];
            anchor + euler_maclaurin_tail(p, CACHE_LIMIT as f64, k as f64)
        }
    }

    fn cached_table_prefix(&self, k: usize) -> f64 {
        let mut cache = self.cache.borrow_mut();
        let WeightSeq::Table { values, .. } = &self.seq else {
            unreachable!()
        };
        while cache.prefix.len() < k {
            let next = values[cache.prefix.len()];
            cache.kahan.add(next);
            let v = cache.kahan.value();
            cache.prefix.push(v);
        }
        cache.prefix[k - 1]
    }

    fn grow_cache(&self, upto: u64) {
        let mut cache = self.cache.borrow_mut();
        while (cache.prefix.len() as u64) < upto {
            let i = cache.prefix.len() as u128 + 1;
            let w = self.seq.weight(i);
            cache.kahan.add(w);
            let v = cache.kahan.value();
            cache.prefix.push(v);
        }
    }
}

/// Σ_{i=a+1..b} i^(-p) by Euler–Maclaurin with corrections through the
/// third derivative; for anchors a ≥ 10⁶ the truncation error is below
/// 10⁻²⁴, effectively exact in f64.
fn euler_maclaurin_tail(p: f64, a: f64, b: f64) -> f64 {
    let integral = if (p - 1.0).abs() < 1e-15 {
        b.ln() - a.ln()
    } else {
        (b.powf(1.0 - p) - a.powf(1.0 - p)) / (1.0 - p)
    };
    let f = |x: f64| x.powf(-p);
    let fp = |x: f64| -p * x.powf(-p - 1.0);
    let fppp = |x: f64| -p * (p + 1.0) * (p + 2.0) * x.powf(-p - 3.0);
    integral + (f(b) - f(a)) / 2.0 + (fp(b) - fp(a)) / 12.0 - (fppp(b) - fppp(a)) / 720.0
}

/// Parses a weight spec in the little CLI syntax:
/// `constant(1)`, `harmonic`, `powerlaw(0.5)`,
/// `table(0.5,0,2;harmonic)`.
pub fn parse_weight_seq(text: &str) -> Result<WeightSeq, WeightError> {
    let t: String = text.split_whitespace().collect();
    if t == "harmonic" {
        return Ok(WeightSeq::Harmonic);
    }
    if let Some(arg) = strip_call(&t, "constant") {
        let c: f64 = arg
            .parse()
            .map_err(|_| WeightError::UnknownSpec(text.into()))?;
        return WeightSeq::constant(c);
    }
    if let Some(arg) = strip_call(&t, "powerlaw") {
        let p: f64 = arg
            .parse()
            .map_err(|_| WeightError::UnknownSpec(text.into()))?;
        return WeightSeq::power_law(p);
    }
    if let Some(arg) = strip_call(&t, "table") {
        let (vals, tail) = arg
            .split_once(';')
            .ok_or_else(|| WeightError::UnknownSpec(text.into()))?;
        let values = vals
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| WeightError::UnknownSpec(text.into()))?;
        let tail = match parse_weight_seq(tail)? {
            WeightSeq::Constant(c) => TailRule::Constant(c),
            WeightSeq::Harmonic => TailRule::Harmonic,
            WeightSeq::PowerLaw(p) => TailRule::PowerLaw(p),
            WeightSeq::Table { .. } => return Err(WeightError::UnknownSpec(text.into())),
        };
        return WeightSeq::table(values, tail);
    }
    Err(WeightError::UnknownSpec(text.into()))
}

fn strip_call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSeq::Constant(c) => write!(f, "constant({c})"),
            WeightSeq::Harmonic => write!(f, "harmonic"),
            WeightSeq::PowerLaw(p) => write!(f, "powerlaw({p})"),
            WeightSeq::Table { values, tail } => {
                write!(f, "table(")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ";{})", tail.as_seq())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(WeightSeq::constant(0.0).is_err());
        assert!(WeightSeq::constant(-1.0).is_err());
        assert!(WeightSeq::power_law(1.5).is_err());
        assert!(WeightSeq::power_law(0.0).is_err());
        assert!(WeightSeq::table(vec![1.0, -0.5], TailRule::Harmonic).is_err());
        assert!(WeightSeq::power_law(1.0).is_ok());
    }

    #[test]
    fn harmonic_prefixes_match_direct_sums() {
        let sums = WeightSums::new(&WeightSeq::Harmonic).unwrap();
        let mut acc = KahanSum::new();
        for k in 1..=1000u128 {
            acc.add(1.0 / k as f64);
            assert!((sums.prefix(k) - acc.value()).abs() < 1e-13);
        }
        assert!((sums.prefix(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_continuation_is_consistent_at_the_boundary() {
        // compare the Euler–Maclaurin route against direct Kahan summation
        // over a block that straddles nothing (both inside analytic range)
        let sums = WeightSums::new(&WeightSeq::Harmonic).unwrap();
        let a = 2_000_000u128;
        let b = 4_000_000u128;
        let mut direct = KahanSum::new();
        for k in (a + 1)..=b {
            direct.add(1.0 / k as f64);
        }
        let engine = sums.block_sum(a, b);
        assert!(
            (engine - direct.value()).abs() < 1e-11,
            "engine {} direct {}",
            engine,
            direct.value()
        );
    }

    #[test]
    fn power_law_block_sums() {
        let sums = WeightSums::new(&WeightSeq::PowerLaw(0.5)).unwrap();
        let mut direct = KahanSum::new();
        for k in 1..=100u128 {
            direct.add((k as f64).powf(-0.5));
        }
        assert!((sums.prefix(100) - direct.value()).abs() < 1e-12);
    }

    #[test]
    fn table_weights_fall_back_to_tail() {
        let seq = WeightSeq::table(vec![5.0, 0.0, 3.0], TailRule::Harmonic).unwrap();
        let sums = WeightSums::new(&seq).unwrap();
        assert_eq!(sums.weight(1), 5.0);
        assert_eq!(sums.weight(2), 0.0);
        assert_eq!(sums.weight(4), 0.25); // absolute index into the tail
        let expected = 8.0 + (1.0 / 4.0 + 1.0 / 5.0 + 1.0 / 6.0);
        assert!((sums.prefix(6) - expected).abs() < 1e-12);
    }

    #[test]
    fn spec_strings_round_trip() {
        for text in [
            "constant(1)",
            "harmonic",
            "powerlaw(0.5)",
            "table(1,0.5;harmonic)",
        ] {
            let seq = parse_weight_seq(text).unwrap();
            assert_eq!(parse_weight_seq(&seq.to_string()).unwrap(), seq);
        }
        assert!(parse_weight_seq("nonsense(3)").is_err());
        assert!(parse_weight_seq("constant(0)").is_err());
    }
}
