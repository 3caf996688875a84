//! Lazy structured subsets of ℕ = {1, 2, 3, …} with exact membership.
//!
//! A [`SetExpr`] is an AST over a handful of primitive sets (finite and
//! cofinite lists, arithmetic progressions, the squares, the primes,
//! block unions over a [`BlockPartition`], almost-disjoint tree branches)
//! closed under union, intersection, difference, complement, and shift.
//! Membership is decided by structural recursion — never sampled, never
//! extrapolated. Table-backed sets refuse queries beyond their horizon
//! instead of guessing, and that refusal propagates through combinators.
//!
//! Two evaluation routes exist on purpose: [`SetExpr::contains`] decides
//! one element definitionally, while [`SetExpr::bitmap_upto`] fills a
//! whole prefix word-parallel. The property suite checks they agree.

mod parse;
mod primes;

pub use parse::{ParseError, SetParser};

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::witness::{BitPattern, BlockPartition};

/// Default ceiling for prefix enumeration; override with the
/// `FILTERLAB_HORIZON_CAP` environment variable.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// Current per-process enumeration cap.
pub fn enumeration_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("FILTERLAB_HORIZON_CAP")
            .ok()
            .and_then(|v| crate::num::parse_natural_u64(&v))
            .unwrap_or(DEFAULT_ENUMERATION_CAP)
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("naturals start at 1; 0 is not in the domain")]
    ZeroNatural,
    #[error("arithmetic progressions need step >= 1 and first element >= 1")]
    BadProgression,
    #[error("membership of {queried} is beyond the known horizon {limit}")]
    BeyondHorizon { limit: u64, queried: u64 },
    #[error("horizon {requested} exceeds the enumeration cap {cap} (raise FILTERLAB_HORIZON_CAP)")]
    EnumerationCap { requested: u64, cap: u64 },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// Structured subset of ℕ.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    /// Explicit finite set; strictly increasing, all entries ≥ 1.
    Finite(Vec<u64>),
    /// ℕ minus an explicit finite list; strictly increasing, entries ≥ 1.
    Cofinite(Vec<u64>),
    /// {first, first + step, first + 2·step, …}, first ≥ 1, step ≥ 1.
    Arithmetic {
        first: u64,
        step: u64,
    },
    /// {1, 4, 9, 16, …}
    Squares,
    /// {2, 3, 5, 7, …}
    Primes,
    /// ⋃ { D_n : n ∈ index } for the blocks D_n of a partition.
    ///
    /// Membership below the last cut is exact. Beyond the last cut the
    /// partition prefix is exhausted: if the index set is certified
    /// finite the union is complete and membership is `false`; otherwise
    /// queries are rejected with [`SetError::BeyondHorizon`], because the
    /// construction extends but its later blocks were not computed.
    BlockUnion {
        label: Option<String>,
        blocks: Box<BlockPartition>,
        index: Box<SetExpr>,
    },
    Union(Box<SetExpr>, Box<SetExpr>),
    Intersection(Box<SetExpr>, Box<SetExpr>),
    Difference(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    /// { n + offset : n ∈ inner }
    Shift {
        inner: Box<SetExpr>,
        offset: u64,
    },
    /// Membership known only up to a horizon, from an explicit bit table.
    Table(PredicateTable),
    /// Unbounded branch of the binary-tree almost-disjoint family:
    /// the prefix codes of a deterministic bit stream.
    Branch(BitPattern),
}

/// Finite window onto a set: exactly the members ≤ `horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixView {
    pub horizon: u64,
    pub members: Vec<u64>,
    pub count: u64,
}

/// Packed membership bits for the prefix \[1, horizon\].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixBitmap {
    horizon: u64,
    words: Vec<u64>,
}

impl PrefixBitmap {
    pub fn empty(horizon: u64) -> Self {
        let words = vec![0u64; (horizon as usize).div_ceil(64)];
        PrefixBitmap { horizon, words }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    #[inline]
    pub fn set(&mut self, n: u64) {
        debug_assert!(n >= 1 && n <= self.horizon);
        self.words[((n - 1) / 64) as usize] |= 1 << ((n - 1) % 64);
    }

    #[inline]
    pub fn get(&self, n: u64) -> bool {
        if n == 0 || n > self.horizon {
            return false;
        }
        self.words[((n - 1) / 64) as usize] >> ((n - 1) % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn members(&self) -> Vec<u64> {
        self.iter_members().collect()
    }

    pub fn iter_members(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    Some(wi as u64 * 64 + b + 1)
                }
            })
        })
    }

    pub fn last_member(&self) -> Option<u64> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi as u64 * 64 + (63 - w.leading_zeros() as u64) + 1);
            }
        }
        None
    }

    fn mask_tail(&mut self) {
        let rem = self.horizon % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn union_with(&mut self, other: &PrefixBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PrefixBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &PrefixBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn negate(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.mask_tail();
    }

    /// Image under n ↦ n + offset, restricted to \[1, new_horizon\].
    fn shifted_up(&self, offset: u64, new_horizon: u64) -> PrefixBitmap {
        let mut out = PrefixBitmap::empty(new_horizon);
        for m in self.iter_members() {
            let n = m + offset;
            if n >= 1 && n <= new_horizon {
                out.set(n);
            }
        }
        out
    }

    fn set_range(&mut self, lo_exclusive: u64, hi_inclusive: u64) {
        for n in (lo_exclusive + 1)..=hi_inclusive.min(self.horizon) {
            self.set(n);
        }
    }
}

/// Explicit membership table with a hard horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateTable {
    bits: PrefixBitmap,
}

impl PredicateTable {
    pub fn from_fn(horizon: u64, mut member: impl FnMut(u64) -> bool) -> Result<Self, SetError> {
        check_horizon(horizon)?;
        let mut bits = PrefixBitmap::empty(horizon);
        for n in 1..=horizon {
            if member(n) {
                bits.set(n);
            }
        }
        Ok(PredicateTable { bits })
    }

    pub fn from_bitmap(bits: PrefixBitmap) -> Self {
        PredicateTable { bits }
    }

    pub fn horizon(&self) -> u64 {
        self.bits.horizon
    }

    fn get(&self, n: u64) -> Result<bool, SetError> {
        if n > self.bits.horizon {
            return Err(SetError::BeyondHorizon {
                limit: self.bits.horizon,
                queried: n,
            });
        }
        Ok(self.bits.get(n))
    }
}

fn check_horizon(horizon: u64) -> Result<(), SetError> {
    if horizon == 0 {
        return Err(SetError::ZeroHorizon);
    }
    let cap = enumeration_cap();
    if horizon > cap {
        return Err(SetError::EnumerationCap {
            requested: horizon,
            cap,
        });
    }
    Ok(())
}

fn validated_list(elems: impl IntoIterator<Item = u64>) -> Result<Vec<u64>, SetError> {
    let mut v: Vec<u64> = elems.into_iter().collect();
    if v.contains(&0) {
        return Err(SetError::ZeroNatural);
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

impl SetExpr {
    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Result<Self, SetError> {
        Ok(SetExpr::Finite(validated_list(elems)?))
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> Result<Self, SetError> {
        Ok(SetExpr::Cofinite(validated_list(excluded)?))
    }

    pub fn arithmetic(first: u64, step: u64) -> Result<Self, SetError> {
        if first == 0 || step == 0 {
            return Err(SetError::BadProgression);
        }
        Ok(SetExpr::Arithmetic { first, step })
    }

    pub fn empty() -> Self {
        SetExpr::Finite(Vec::new())
    }

    pub fn naturals() -> Self {
        SetExpr::Cofinite(Vec::new())
    }

    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Intersection(Box::new(a), Box::new(b))
    }

    pub fn difference(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Difference(Box::new(a), Box::new(b))
    }

    pub fn complement(a: SetExpr) -> Self {
        SetExpr::Complement(Box::new(a))
    }

    /// { n + offset : n ∈ self }. A zero offset is the identity.
    pub fn shift(self, offset: u64) -> Self {
        if offset == 0 {
            self
        } else {
            SetExpr::Shift {
                inner: Box::new(self),
                offset,
            }
        }
    }

    /// Exact membership by structural recursion.
    ///
    /// Errors rather than guesses when the query runs past a table or
    /// block-partition horizon anywhere in the tree.
    pub fn contains(&self, n: u64) -> Result<bool, SetError> {
        if n == 0 {
            return Err(SetError::ZeroNatural);
        }
        match self {
            SetExpr::Finite(v) => Ok(v.binary_search(&n).is_ok()),
            SetExpr::Cofinite(v) => Ok(v.binary_search(&n).is_err()),
            SetExpr::Arithmetic { first, step } => {
                Ok(n >= *first && (n - first).is_multiple_of(*step))
            }
            SetExpr::Squares => {
                let r = isqrt(n);
                Ok(r * r == n)
            }
            SetExpr::Primes => Ok(primes::is_prime(n)),
            SetExpr::BlockUnion { blocks, index, .. } => {
                let x = n as u128;
                if x > blocks.last_cut() {
                    if index.is_certified_finite() {
                        Ok(false)
                    } else {
                        Err(SetError::BeyondHorizon {
                            limit: u64::try_from(blocks.last_cut()).unwrap_or(u64::MAX),
                            queried: n,
                        })
                    }
                } else {
                    let b = blocks.block_index_of(x).expect("x within cut range");
                    index.contains(b as u64)
                }
            }
            SetExpr::Union(a, b) => Ok(a.contains(n)? || b.contains(n)?),
            SetExpr::Intersection(a, b) => Ok(a.contains(n)? && b.contains(n)?),
            SetExpr::Difference(a, b) => Ok(a.contains(n)? && !b.contains(n)?),
            SetExpr::Complement(a) => Ok(!a.contains(n)?),
            SetExpr::Shift { inner, offset } => {
                if n <= *offset {
                    Ok(false)
                } else {
                    inner.contains(n - offset)
                }
            }
            SetExpr::Table(t) => t.get(n),
            SetExpr::Branch(p) => Ok(p.branch_contains(n)),
        }
    }

    /// The sorted members ≤ `horizon`, decided element by element.
    pub fn members_upto(&self, horizon: u64) -> Result<PrefixView, SetError> {
        check_horizon(horizon)?;
        let mut members = Vec::new();
        for n in 1..=horizon {
            if self.contains(n)? {
                members.push(n);
            }
        }
        let count = members.len() as u64;
        Ok(PrefixView {
            horizon,
            members,
            count,
        })
    }

    /// Word-parallel prefix evaluation; extensionally equal to
    /// [`Self::members_upto`] wherever both succeed.
    pub fn bitmap_upto(&self, horizon: u64) -> Result<PrefixBitmap, SetError> {
        check_horizon(horizon)?;
        self.bitmap_unchecked(horizon)
    }

    fn bitmap_unchecked(&self, horizon: u64) -> Result<PrefixBitmap, SetError> {
        let mut bm = PrefixBitmap::empty(horizon);
        match self {
            SetExpr::Finite(v) => {
                for &n in v.iter().take_while(|&&n| n <= horizon) {
                    bm.set(n);
                }
            }
            SetExpr::Cofinite(v) => {
                bm.negate(); // all of [1, horizon]
                for &n in v.iter().take_while(|&&n| n <= horizon) {
                    bm.words[((n - 1) / 64) as usize] &= !(1 << ((n - 1) % 64));
                }
            }
            SetExpr::Arithmetic { first, step } => {
                let mut n = *first;
                while n <= horizon {
                    bm.set(n);
                    match n.checked_add(*step) {
                        Some(next) => n = next,
                        None => break,
                    }
                }
            }
            SetExpr::Squares => {
                let mut k = 1u64;
                while k * k <= horizon {
                    bm.set(k * k);
                    k += 1;
                }
            }
            SetExpr::Primes => primes::for_each_prime_upto(horizon, |p| bm.set(p)),
            SetExpr::BlockUnion { blocks, index, .. } => {
                if !index.is_certified_finite() && (horizon as u128) > blocks.last_cut() {
                    return Err(SetError::BeyondHorizon {
                        limit: u64::try_from(blocks.last_cut()).unwrap_or(u64::MAX),
                        queried: horizon,
                    });
                }
                for b in 1..=blocks.block_count() {
                    let (lo, hi) = blocks.block_bounds(b).expect("block in range");
                    if lo >= horizon as u128 {
                        break;
                    }
                    if index.contains(b as u64)? {
                        let lo = u64::try_from(lo).unwrap_or(u64::MAX);
                        let hi = u64::try_from(hi.min(horizon as u128)).unwrap_or(horizon);
                        bm.set_range(lo, hi);
                    }
                }
            }
            SetExpr::Union(a, b) => {
                bm = a.bitmap_unchecked(horizon)?;
                bm.union_with(&b.bitmap_unchecked(horizon)?);
            }
            SetExpr::Intersection(a, b) => {
                bm = a.bitmap_unchecked(horizon)?;
                bm.intersect_with(&b.bitmap_unchecked(horizon)?);
            }
            SetExpr::Difference(a, b) => {
                bm = a.bitmap_unchecked(horizon)?;
                bm.difference_with(&b.bitmap_unchecked(horizon)?);
            }
            SetExpr::Complement(a) => {
                bm = a.bitmap_unchecked(horizon)?;
                bm.negate();
            }
            SetExpr::Shift { inner, offset } => {
                if *offset < horizon {
                    let inner_bm = inner.bitmap_unchecked(horizon - offset)?;
                    bm = inner_bm.shifted_up(*offset, horizon);
                }
            }
            SetExpr::Table(t) => {
                if horizon > t.horizon() {
                    return Err(SetError::BeyondHorizon {
                        limit: t.horizon(),
                        queried: horizon,
                    });
                }
                for n in t.bits.iter_members().take_while(|&n| n <= horizon) {
                    bm.set(n);
                }
            }
            SetExpr::Branch(p) => {
                for m in 1..=64u32 {
                    match p.prefix_code(m) {
                        Some(code) if code <= horizon => bm.set(code),
                        _ => break,
                    }
                }
            }
        }
        Ok(bm)
    }

    /// True only when the structure proves the set finite. Sound, not
    /// complete: `false` means "unknown or infinite".
    pub fn is_certified_finite(&self) -> bool {
        match self {
            SetExpr::Finite(_) => true,
            SetExpr::Cofinite(_)
            | SetExpr::Arithmetic { .. }
            | SetExpr::Squares
            | SetExpr::Primes
            | SetExpr::Branch(_)
            | SetExpr::Table(_) => false,
            SetExpr::BlockUnion { index, .. } => index.is_certified_finite(),
            SetExpr::Union(a, b) => a.is_certified_finite() && b.is_certified_finite(),
            SetExpr::Intersection(a, b) => {
                a.is_certified_finite()
                    || b.is_certified_finite()
                    || matches!(ap_pair_class(a, b), Some(PairClass::Empty))
                    || matches!(branch_pair_class(a, b), Some(PairClass::Finite))
                    || matches!(block_union_pair_class(a, b), Some(PairClass::Finite))
            }
            SetExpr::Difference(a, b) => {
                a.is_certified_finite() || ap_difference_eventually_contained(a, b)
            }
            SetExpr::Complement(a) => a.is_certified_cofinite(),
            SetExpr::Shift { inner, .. } => inner.is_certified_finite(),
        }
    }

    /// True only when the structure proves the set infinite.
    pub fn is_certified_infinite(&self) -> bool {
        match self {
            SetExpr::Finite(_) | SetExpr::Table(_) => false,
            SetExpr::Cofinite(_)
            | SetExpr::Arithmetic { .. }
            | SetExpr::Squares
            | SetExpr::Primes
            | SetExpr::Branch(_) => true,
            SetExpr::BlockUnion { index, .. } => index.is_certified_infinite(),
            SetExpr::Union(a, b) => a.is_certified_infinite() || b.is_certified_infinite(),
            SetExpr::Intersection(a, b) => {
                (a.is_certified_infinite() && b.is_certified_cofinite())
                    || (b.is_certified_infinite() && a.is_certified_cofinite())
                    || matches!(ap_pair_class(a, b), Some(PairClass::Infinite))
                    || matches!(branch_pair_class(a, b), Some(PairClass::Infinite))
                    || matches!(block_union_pair_class(a, b), Some(PairClass::Infinite))
            }
            SetExpr::Difference(a, b) => {
                (a.is_certified_infinite() && b.is_certified_finite())
                    || ap_difference_certified_infinite(a, b)
            }
            SetExpr::Complement(a) => a.is_certified_finite(),
            SetExpr::Shift { inner, .. } => inner.is_certified_infinite(),
        }
    }

    /// True only when the structure proves the complement finite.
    pub fn is_certified_cofinite(&self) -> bool {
        match self {
            SetExpr::Cofinite(_) => true,
            SetExpr::Arithmetic { step: 1, .. } => true,
            SetExpr::Union(a, b) => a.is_certified_cofinite() || b.is_certified_cofinite(),
            SetExpr::Intersection(a, b) => a.is_certified_cofinite() && b.is_certified_cofinite(),
            SetExpr::Difference(a, b) => a.is_certified_cofinite() && b.is_certified_finite(),
            SetExpr::Complement(a) => a.is_certified_finite(),
            SetExpr::Shift { inner, .. } => inner.is_certified_cofinite(),
            _ => false,
        }
    }

    /// Largest n any member can reach when the set is certified finite.
    pub fn finite_upper_bound(&self) -> Option<u64> {
        if !self.is_certified_finite() {
            return None;
        }
        match self {
            SetExpr::Finite(v) => Some(v.last().copied().unwrap_or(0)),
            SetExpr::BlockUnion { blocks, .. } => {
                Some(u64::try_from(blocks.last_cut()).unwrap_or(u64::MAX))
            }
            SetExpr::Union(a, b) => Some(a.finite_upper_bound()?.max(b.finite_upper_bound()?)),
            SetExpr::Intersection(a, b) => {
                match (a.finite_upper_bound(), b.finite_upper_bound()) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => match (a.as_ref(), b.as_ref()) {
                        // distinct branches share exactly their common
                        // prefix codes; the largest is the last shared one
                        (SetExpr::Branch(p), SetExpr::Branch(q)) => match p.first_difference(q) {
                            Some(1) | None => Some(0),
                            Some(d) => p
                                .prefix_code(u32::try_from(d - 1).unwrap_or(u32::MAX))
                                .or(Some(u64::MAX)),
                        },
                        // same-partition block unions stay inside the cuts
                        (
                            SetExpr::BlockUnion { blocks: b1, .. },
                            SetExpr::BlockUnion { blocks: b2, .. },
                        ) => Some(
                            u64::try_from(b1.last_cut().min(b2.last_cut())).unwrap_or(u64::MAX),
                        ),
                        // progressions certified finite here are empty
                        _ => Some(0),
                    },
                }
            }
            SetExpr::Difference(a, b) => {
                a.finite_upper_bound().or_else(|| {
                    // finite via AP containment: only boundary elements below
                    // the later progression's start can survive
                    match (a.as_ref(), b.as_ref()) {
                        (SetExpr::Arithmetic { .. }, SetExpr::Arithmetic { first, .. }) => {
                            Some(*first)
                        }
                        _ => None,
                    }
                })
            }
            SetExpr::Complement(a) => complement_upper_bound(a),
            SetExpr::Shift { inner, offset } => {
                Some(inner.finite_upper_bound()?.saturating_add(*offset))
            }
            _ => None,
        }
    }

    /// Horizon beyond which membership queries fail, if any part of the
    /// tree is table- or partition-prefix-backed.
    pub fn available_horizon(&self) -> Option<u64> {
        match self {
            SetExpr::Table(t) => Some(t.horizon()),
            SetExpr::BlockUnion { blocks, index, .. } => {
                if index.is_certified_finite() {
                    None
                } else {
                    Some(u64::try_from(blocks.last_cut()).unwrap_or(u64::MAX))
                }
            }
            SetExpr::Union(a, b) | SetExpr::Intersection(a, b) | SetExpr::Difference(a, b) => {
                min_opt(a.available_horizon(), b.available_horizon())
            }
            SetExpr::Complement(a) => a.available_horizon(),
            SetExpr::Shift { inner, offset } => {
                inner.available_horizon().map(|h| h.saturating_add(*offset))
            }
            _ => None,
        }
    }
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn complement_upper_bound(inner: &SetExpr) -> Option<u64> {
    // complement certified finite ⇒ inner certified cofinite
    match inner {
        SetExpr::Cofinite(v) => Some(v.last().copied().unwrap_or(0)),
        SetExpr::Arithmetic { first, step: 1 } => Some(first.saturating_sub(1)),
        SetExpr::Union(a, b) => {
            if a.is_certified_cofinite() {
                complement_upper_bound(a)
            } else {
                complement_upper_bound(b)
            }
        }
        SetExpr::Intersection(a, b) => {
            Some(complement_upper_bound(a)?.max(complement_upper_bound(b)?))
        }
        SetExpr::Difference(a, b) => Some(complement_upper_bound(a)?.max(b.finite_upper_bound()?)),
        SetExpr::Complement(a) => a.finite_upper_bound(),
        SetExpr::Shift { inner, offset } => {
            Some(complement_upper_bound(inner)?.saturating_add(*offset))
        }
        _ => None,
    }
}

enum PairClass {
    Empty,
    Finite,
    Infinite,
}

/// Chinese-remainder classification of the intersection of two
/// arithmetic progressions: either empty or another progression.
fn ap_pair_class(a: &SetExpr, b: &SetExpr) -> Option<PairClass> {
    let (
        SetExpr::Arithmetic {
            first: a1,
            step: s1,
        },
        SetExpr::Arithmetic {
            first: a2,
            step: s2,
        },
    ) = (a, b)
    else {
        return None;
    };
    let g = gcd(*s1, *s2);
    if (*a1 as i128 - *a2 as i128).rem_euclid(g as i128) == 0 {
        Some(PairClass::Infinite)
    } else {
        Some(PairClass::Empty)
    }
}

/// Two distinct branches of the almost-disjoint family intersect in
/// exactly their common prefix codes, a finite set.
fn branch_pair_class(a: &SetExpr, b: &SetExpr) -> Option<PairClass> {
    let (SetExpr::Branch(p), SetExpr::Branch(q)) = (a, b) else {
        return None;
    };
    match p.first_difference(q) {
        Some(_) => Some(PairClass::Finite),
        None => Some(PairClass::Infinite),
    }
}

/// Block unions over one and the same partition intersect exactly in the
/// blocks both index sets select, so the pair classifies through the
/// index intersection.
fn block_union_pair_class(a: &SetExpr, b: &SetExpr) -> Option<PairClass> {
    let (
        SetExpr::BlockUnion {
            blocks: b1,
            index: i1,
            ..
        },
        SetExpr::BlockUnion {
            blocks: b2,
            index: i2,
            ..
        },
    ) = (a, b)
    else {
        return None;
    };
    if b1.cuts != b2.cuts {
        return None;
    }
    let meet = SetExpr::intersection((**i1).clone(), (**i2).clone());
    if meet.is_certified_finite() {
        Some(PairClass::Finite)
    } else if meet.is_certified_infinite() {
        Some(PairClass::Infinite)
    } else {
        None
    }
}

/// AP(a1,s1) ∖ AP(a2,s2) is finite exactly when the first progression is
/// eventually contained in the second: s2 | s1 and a1 ≡ a2 (mod s2).
fn ap_difference_eventually_contained(a: &SetExpr, b: &SetExpr) -> bool {
    let (
        SetExpr::Arithmetic {
            first: a1,
            step: s1,
        },
        SetExpr::Arithmetic {
            first: a2,
            step: s2,
        },
    ) = (a, b)
    else {
        return false;
    };
    s1 % s2 == 0 && (*a1 as i128 - *a2 as i128).rem_euclid(*s2 as i128) == 0
}

fn ap_difference_certified_infinite(a: &SetExpr, b: &SetExpr) -> bool {
    matches!(
        (a, b),
        (SetExpr::Arithmetic { .. }, SetExpr::Arithmetic { .. })
    ) && !ap_difference_eventually_contained(a, b)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// #(A ∩ B ∩ \[1, horizon\]).
pub fn intersection_count_upto(a: &SetExpr, b: &SetExpr, horizon: u64) -> Result<u64, SetError> {
    let mut bm = a.bitmap_upto(horizon)?;
    bm.intersect_with(&b.bitmap_upto(horizon)?);
    Ok(bm.count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdVerdict {
    CertifiedFinite,
    Inconclusive,
}

/// Empirical + structural almost-disjointness report for a pair of sets.
#[derive(Clone, Debug, Serialize)]
pub struct AlmostDisjointReport {
    pub horizon: u64,
    pub count_at_horizon: u64,
    pub last_common_element_seen: Option<u64>,
    pub verdict: AdVerdict,
}

/// Reports #(A ∩ B) up to a horizon, with a `CertifiedFinite` verdict
/// only when the structure proves the full intersection finite (finite
/// operands, progressions with no common residue, or distinct branches
/// of the almost-disjoint family).
pub fn almost_disjoint_report(
    a: &SetExpr,
    b: &SetExpr,
    horizon: u64,
) -> Result<AlmostDisjointReport, SetError> {
    let mut bm = a.bitmap_upto(horizon)?;
    bm.intersect_with(&b.bitmap_upto(horizon)?);
    let verdict = if SetExpr::intersection(a.clone(), b.clone()).is_certified_finite() {
        AdVerdict::CertifiedFinite
    } else {
        AdVerdict::Inconclusive
    };
    Ok(AlmostDisjointReport {
        horizon,
        count_at_horizon: bm.count(),
        last_common_element_seen: bm.last_member(),
        verdict,
    })
}

/// Parses the set DSL with no block-partition references in scope.
pub fn parse_set_expr(text: &str) -> Result<SetExpr, ParseError> {
    SetParser::new().parse(text)
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
            for (i, n) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{n}")?;
            }
            Ok(())
        }
        match self {
            SetExpr::Finite(v) => {
                write!(f, "finite{{")?;
                list(f, v)?;
                write!(f, "}}")
            }
            SetExpr::Cofinite(v) => {
                write!(f, "cofinite{{")?;
                list(f, v)?;
                write!(f, "}}")
            }
            SetExpr::Arithmetic { first, step } => write!(f, "arith({first},{step})"),
            SetExpr::Squares => write!(f, "squares"),
            SetExpr::Primes => write!(f, "primes"),
            SetExpr::BlockUnion { label, index, .. } => {
                let name = label.as_deref().unwrap_or("#anon");
                write!(f, "blockunion({name},{index})")
            }
            SetExpr::Union(a, b) => write!(f, "union({a},{b})"),
            SetExpr::Intersection(a, b) => write!(f, "inter({a},{b})"),
            SetExpr::Difference(a, b) => write!(f, "diff({a},{b})"),
            SetExpr::Complement(a) => write!(f, "compl({a})"),
            SetExpr::Shift { inner, offset } => write!(f, "shift({inner},{offset})"),
            SetExpr::Table(t) => write!(f, "table(#horizon={})", t.horizon()),
            SetExpr::Branch(p) => write!(f, "adbranch({p})"),
        }
    }
}
