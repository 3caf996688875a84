//! Conglomeration witnesses: greedy block partitions for summable and
//! weighted-density filters, plus binary-tree almost-disjoint families.
//!
//! A [`BlockPartition`] stores cut points d_1 = 0 < d_2 < … whose blocks
//! D_n = {d_n + 1, …, d_{n+1}} are finite, consecutive, and disjoint.
//! The two non-trivial constructors pick each cut greedily (least index
//! meeting the bound), which makes the output deterministic:
//!
//! * [`summable_blocks`] — every block carries weight-sum ≥ 1, so the
//!   union of blocks over any infinite index set has divergent weight.
//! * [`erdos_ulam_blocks`] — every block's weight is more than half the
//!   whole prefix weight up to its right cut, so the union over any
//!   infinite index set keeps upper density ≥ 1/2.
//!
//! A computed partition is a finite prefix of an unbounded construction.
//! [`verify_conglomeration`] recomputes the per-block certificates from
//! scratch (it never trusts stored ones), checks the selected blocks
//! against the bound, and cross-checks empirically through the set layer;
//! a `Certified` conclusion for an infinite index set combines those
//! recomputed bounds with the construction rule that produces all later
//! blocks the same way.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::IdealSpec;
use crate::num::KahanSum;
use crate::setexpr::{enumeration_cap, SetError, SetExpr};
use crate::weights::{WeightError, WeightSeq, WeightSums};

/// Absolute tolerance for weight-sum bounds recomputed in f64.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("block count must be at least 1")]
    ZeroCount,
    #[error("cut search cap {cap} exceeded after {built} of {requested} blocks")]
    CapExceeded {
        cap: u128,
        built: usize,
        requested: u32,
        partial: BlockPartition,
    },
    #[error("first weight is zero, the initial block ratio is undefined")]
    ZeroFirstWeight,
    #[error("branch depth must lie in 1..=63")]
    BadDepth,
    #[error("the cycle of a bit pattern must be non-empty")]
    EmptyCycle,
    #[error("bit patterns {left} and {right} agree on the first {depth} bits")]
    IndistinctParams {
        left: usize,
        right: usize,
        depth: u32,
    },
    #[error("partition was built for the {built} construction, not {requested}")]
    MismatchedIdeal { built: String, requested: String },
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Frechet,
    Summable,
    ErdosUlam,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::Frechet => write!(f, "frechet"),
            WitnessKind::Summable => write!(f, "summable"),
            WitnessKind::ErdosUlam => write!(f, "erdos_ulam"),
        }
    }
}

/// Increasing cut points with implied blocks D_n = (cuts\[n-1\], cuts\[n\]].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    /// d_1 = 0 < d_2 < …; block n spans (cuts\[n-1\], cuts\[n\]].
    pub cuts: Vec<u128>,
    /// Per-block construction certificate: weight sums for `summable`,
    /// prefix ratios for `erdos_ulam`, block cardinalities for `frechet`.
    pub certificates: Vec<f64>,
    pub kind: WitnessKind,
    #[serde(with = "weights_as_string", default)]
    pub weights: Option<WeightSeq>,
}

mod weights_as_string {
    use super::WeightSeq;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Option<WeightSeq>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(seq) => s.serialize_some(&seq.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<WeightSeq>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| crate::weights::parse_weight_seq(&t).map_err(D::Error::custom))
            .transpose()
    }
}

impl BlockPartition {
    pub fn block_count(&self) -> usize {
        self.cuts.len().saturating_sub(1)
    }

    pub fn last_cut(&self) -> u128 {
        self.cuts.last().copied().unwrap_or(0)
    }

    /// Bounds (lo, hi] of block n, 1-based.
    pub fn block_bounds(&self, n: usize) -> Option<(u128, u128)> {
        if n >= 1 && n < self.cuts.len() {
            Some((self.cuts[n - 1], self.cuts[n]))
        } else {
            None
        }
    }

    /// Which block x falls in, if any.
    pub fn block_index_of(&self, x: u128) -> Option<usize> {
        if x == 0 || x > self.last_cut() {
            return None;
        }
        Some(self.cuts.partition_point(|&c| c < x))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Singleton blocks D_n = {n}: the trivial conglomeration witness for the
/// filter of cofinite sets, where every finite set is small.
pub fn frechet_blocks(count: u32) -> Result<BlockPartition, WitnessError> {
    if count == 0 {
        return Err(WitnessError::ZeroCount);
    }
    Ok(BlockPartition {
        cuts: (0..=count as u128).collect(),
        certificates: vec![1.0; count as usize],
        kind: WitnessKind::Frechet,
        weights: None,
    })
}

/// Least k in (lo, cap] with `pred(k)`, for a monotone predicate.
/// Exponential bracketing then binary search, so the cost is logarithmic
/// in the answer even when cuts reach 10²⁰.
fn least_satisfying(lo: u128, cap: u128, pred: impl Fn(u128) -> bool) -> Option<u128> {
    if lo >= cap {
        return None;
    }
    let mut failing = lo;
    let mut step = 1u128;
    let mut probe = lo + 1;
    loop {
        if pred(probe) {
            break;
        }
        if probe >= cap {
            return None;
        }
        failing = probe;
        step = step.saturating_mul(2);
        probe = lo.saturating_add(step).min(cap);
    }
    let mut passing = probe;
    while passing - failing > 1 {
        let mid = failing + (passing - failing) / 2;
        if pred(mid) {
            passing = mid;
        } else {
            failing = mid;
        }
    }
    Some(passing)
}

/// Greedy-minimal cuts with block weight-sums ≥ 1.
pub fn summable_blocks(
    s: &WeightSeq,
    count: u32,
    cap: u128,
) -> Result<BlockPartition, WitnessError> {
    if count == 0 {
        return Err(WitnessError::ZeroCount);
    }
    let sums = WeightSums::new(s)?;
    let mut cuts: Vec<u128> = vec![0];
    let mut certificates = Vec::new();
    for built in 0..count {
        let d = *cuts.last().expect("non-empty");
        match least_satisfying(d, cap, |k| sums.block_sum(d, k) >= 1.0) {
            Some(next) => {
                certificates.push(sums.block_sum(d, next));
                cuts.push(next);
            }
            None => {
                return Err(WitnessError::CapExceeded {
                    cap,
                    built: built as usize,
                    requested: count,
                    partial: BlockPartition {
                        cuts,
                        certificates,
                        kind: WitnessKind::Summable,
                        weights: Some(s.clone()),
                    },
                })
            }
        }
    }
    Ok(BlockPartition {
        cuts,
        certificates,
        kind: WitnessKind::Summable,
        weights: Some(s.clone()),
    })
}

/// Greedy-minimal cuts with d_1 = 0, d_2 = 1, and every later cut the
/// least k whose block carries more than half the prefix weight up to k.
pub fn erdos_ulam_blocks(
    s: &WeightSeq,
    count: u32,
    cap: u128,
) -> Result<BlockPartition, WitnessError> {
    if count == 0 {
        return Err(WitnessError::ZeroCount);
    }
    let sums = WeightSums::new(s)?;
    if sums.prefix(1) <= 0.0 {
        return Err(WitnessError::ZeroFirstWeight);
    }
    let mut cuts: Vec<u128> = vec![0, 1];
    let mut certificates = vec![sums.block_sum(0, 1) / sums.prefix(1)];
    for built in 1..count {
        let d = *cuts.last().expect("non-empty");
        let ratio_at = |k: u128| sums.block_sum(d, k) / sums.prefix(k);
        match least_satisfying(d, cap, |k| ratio_at(k) > 0.5) {
            Some(next) => {
                certificates.push(ratio_at(next));
                cuts.push(next);
            }
            None => {
                return Err(WitnessError::CapExceeded {
                    cap,
                    built: built as usize,
                    requested: count,
                    partial: BlockPartition {
                        cuts,
                        certificates,
                        kind: WitnessKind::ErdosUlam,
                        weights: Some(s.clone()),
                    },
                })
            }
        }
    }
    Ok(BlockPartition {
        cuts,
        certificates,
        kind: WitnessKind::ErdosUlam,
        weights: Some(s.clone()),
    })
}

/// ⋃ { D_n : n ∈ index }, as a lazy set expression.
pub fn union_over_index(bp: &BlockPartition, index: &SetExpr) -> SetExpr {
    SetExpr::BlockUnion {
        label: None,
        blocks: Box::new(bp.clone()),
        index: Box::new(index.clone()),
    }
}

/// Same, carrying the name under which the partition is registered in
/// the DSL environment.
pub fn union_over_index_labeled(
    label: impl Into<String>,
    bp: &BlockPartition,
    index: &SetExpr,
) -> SetExpr {
    SetExpr::BlockUnion {
        label: Some(label.into()),
        blocks: Box::new(bp.clone()),
        index: Box::new(index.clone()),
    }
}

/// Which block indices of the computed prefix an index set selects.
#[derive(Clone, Debug, Serialize)]
pub struct IndexSelection {
    pub in_range: Vec<u32>,
    /// Explicit finite indices beyond the computed blocks.
    pub dropped_out_of_range: u64,
    /// True when the index set reaches past the computed prefix without
    /// being a known finite set.
    pub truncated: bool,
}

pub fn select_blocks(bp: &BlockPartition, index: &SetExpr) -> Result<IndexSelection, WitnessError> {
    let count = bp.block_count() as u64;
    let mut in_range = Vec::new();
    for n in 1..=count {
        if index.contains(n)? {
            in_range.push(n as u32);
        }
    }
    let mut dropped = 0;
    let mut truncated = false;
    if index.is_certified_finite() {
        if let Some(bound) = index.finite_upper_bound() {
            if bound > count {
                let upper = bound.min(enumeration_cap());
                if upper < bound {
                    truncated = true;
                }
                for n in (count + 1)..=upper {
                    if index.contains(n)? {
                        dropped += 1;
                    }
                }
            }
        }
    } else {
        truncated = true;
    }
    Ok(IndexSelection {
        in_range,
        dropped_out_of_range: dropped,
        truncated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    InGrillCertified,
    InGrillEmpirical,
    Failed,
}

/// Independent re-derivation of the union's weight along the set layer,
/// bit by bit, as opposed to the prefix-sum differences used for the
/// certificates.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalCheck {
    pub horizon: u64,
    /// summable: Kahan sum of weights over realized union members.
    pub partial_sum: Option<f64>,
    /// erdos_ulam: realized prefix ratios at the selected cut points.
    pub cut_point_ratios: Vec<f64>,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub index_set_used: String,
    pub selected_indices: Vec<u32>,
    pub certificate_per_selected_block: Vec<f64>,
    pub conclusion: Conclusion,
    pub detail: String,
    pub empirical: Option<EmpiricalCheck>,
}

/// Checks that the union of blocks over `index` lands in the grill of the
/// given ideal.
///
/// Certificates are recomputed from the weight engine; stored ones are
/// ignored. A certified conclusion additionally needs the index set to be
/// structurally infinite — a finite index yields a finite union, which
/// lies in the ideal, so the report comes back `Failed` with that
/// explanation. An index set that is neither provably finite nor provably
/// infinite downgrades the conclusion to empirical.
pub fn verify_conglomeration(
    bp: &BlockPartition,
    ideal: &IdealSpec,
    index: &SetExpr,
    horizon: u64,
) -> Result<WitnessReport, WitnessError> {
    let (weights, want_kind) = match ideal {
        IdealSpec::Summable(s) => (s, WitnessKind::Summable),
        IdealSpec::ErdosUlam(s) => (s, WitnessKind::ErdosUlam),
        IdealSpec::Frechet => {
            return Err(WitnessError::MismatchedIdeal {
                built: bp.kind.to_string(),
                requested: "frechet".to_string(),
            })
        }
    };
    if bp.kind != want_kind {
        return Err(WitnessError::MismatchedIdeal {
            built: bp.kind.to_string(),
            requested: want_kind.to_string(),
        });
    }

    let sums = WeightSums::new(weights)?;
    let selection = select_blocks(bp, index)?;
    let mut certificates = Vec::with_capacity(selection.in_range.len());
    let mut failing_blocks = Vec::new();
    for &n in &selection.in_range {
        let (lo, hi) = bp.block_bounds(n as usize).expect("selected in range");
        let cert = match want_kind {
            WitnessKind::Summable => sums.block_sum(lo, hi),
            WitnessKind::ErdosUlam => sums.block_sum(lo, hi) / sums.prefix(hi),
            WitnessKind::Frechet => unreachable!(),
        };
        let ok = match want_kind {
            WitnessKind::Summable => cert >= 1.0 - SUM_TOLERANCE,
            WitnessKind::ErdosUlam => cert > 0.5,
            WitnessKind::Frechet => unreachable!(),
        };
        if !ok {
            failing_blocks.push(n);
        }
        certificates.push(cert);
    }

    let empirical = empirical_cross_check(bp, &sums, index, &selection, want_kind, horizon)?;

    let (conclusion, detail) = if index.is_certified_finite() {
        (
            Conclusion::Failed,
            "index set is finite: the union of finitely many ideal blocks stays in the ideal"
                .to_string(),
        )
    } else if !failing_blocks.is_empty() {
        (
            Conclusion::Failed,
            format!("recomputed certificates miss the bound at blocks {failing_blocks:?}"),
        )
    } else if empirical.as_ref().is_some_and(|e| !e.consistent) {
        (
            Conclusion::Failed,
            "empirical recomputation along the set layer disagrees with the certificates"
                .to_string(),
        )
    } else if selection.in_range.is_empty() {
        (
            Conclusion::InGrillEmpirical,
            "index set selects no block of the computed prefix; only the construction rule \
             supports the claim"
                .to_string(),
        )
    } else if index.is_certified_infinite() {
        let bound = match want_kind {
            WitnessKind::Summable => {
                "every selected block carries weight >= 1, and the greedy rule grants the same \
                 bound to all later blocks, so the union's weight diverges"
            }
            WitnessKind::ErdosUlam => {
                "every selected block ratio exceeds 1/2 at its cut point, and the greedy rule \
                 grants the same bound to all later blocks, so the union keeps upper density \
                 >= 1/2"
            }
            WitnessKind::Frechet => unreachable!(),
        };
        (Conclusion::InGrillCertified, bound.to_string())
    } else {
        (
            Conclusion::InGrillEmpirical,
            "index set is not structurally certified infinite; bounds hold on the computed \
             prefix only"
                .to_string(),
        )
    };

    Ok(WitnessReport {
        index_set_used: index.to_string(),
        selected_indices: selection.in_range,
        certificate_per_selected_block: certificates,
        conclusion,
        detail,
        empirical,
    })
}

fn empirical_cross_check(
    bp: &BlockPartition,
    sums: &WeightSums,
    index: &SetExpr,
    selection: &IndexSelection,
    kind: WitnessKind,
    horizon: u64,
) -> Result<Option<EmpiricalCheck>, WitnessError> {
    let last = u64::try_from(bp.last_cut()).unwrap_or(u64::MAX);
    let h = horizon.min(last).min(enumeration_cap());
    if h == 0 {
        return Ok(None);
    }
    let union = union_over_index(bp, index);
    let bitmap = union.bitmap_upto(h)?;

    // Expected weight over [1, h] from the certificate route.
    let mut expected = KahanSum::new();
    for &n in &selection.in_range {
        let (lo, hi) = bp.block_bounds(n as usize).expect("in range");
        if lo >= h as u128 {
            break;
        }
        expected.add(sums.block_sum(lo, hi.min(h as u128)));
    }

    let mut realized = KahanSum::new();
    let mut cut_point_ratios = Vec::new();
    let mut cut_iter = selection
        .in_range
        .iter()
        .filter_map(|&n| {
            let (_, hi) = bp.block_bounds(n as usize)?;
            u64::try_from(hi).ok().filter(|&c| c <= h)
        })
        .peekable();
    let mut members = bitmap.iter_members().peekable();
    let mut position = 0u64;
    while position < h {
        let next_cut = cut_iter.peek().copied();
        let next_member = members.peek().copied();
        match (next_member, next_cut) {
            (Some(m), Some(c)) if m <= c => {
                realized.add(sums.weight(m as u128));
                members.next();
                position = m;
                if m == c {
                    cut_point_ratios.push(realized.value() / sums.prefix(c as u128));
                    cut_iter.next();
                }
            }
            (_, Some(c)) => {
                cut_point_ratios.push(realized.value() / sums.prefix(c as u128));
                cut_iter.next();
                position = c;
            }
            (Some(m), None) => {
                realized.add(sums.weight(m as u128));
                members.next();
                position = m;
            }
            (None, None) => break,
        }
    }

    let scale = expected.value().abs().max(1.0);
    let consistent = match kind {
        WitnessKind::Summable => (realized.value() - expected.value()).abs() <= 1e-6 * scale,
        WitnessKind::ErdosUlam => cut_point_ratios.iter().all(|&r| r > 0.5),
        WitnessKind::Frechet => true,
    };
    Ok(Some(EmpiricalCheck {
        horizon: h,
        partial_sum: match kind {
            WitnessKind::Summable => Some(realized.value()),
            _ => None,
        },
        cut_point_ratios,
        consistent,
    }))
}

/// Deterministic infinite bit stream: an explicit head followed by a
/// repeating non-empty cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitPattern {
    head: Vec<bool>,
    cycle: Vec<bool>,
}

impl BitPattern {
    pub fn new(head: Vec<bool>, cycle: Vec<bool>) -> Result<Self, WitnessError> {
        if cycle.is_empty() {
            return Err(WitnessError::EmptyCycle);
        }
        Ok(BitPattern { head, cycle })
    }

    pub fn constant(bit: bool) -> Self {
        BitPattern {
            head: Vec::new(),
            cycle: vec![bit],
        }
    }

    /// Explicit bits, then zeros forever.
    pub fn from_bits_then_zeros(bits: &[bool]) -> Self {
        BitPattern {
            head: bits.to_vec(),
            cycle: vec![false],
        }
    }

    /// The i-th bit, 1-indexed.
    pub fn bit(&self, i: u64) -> bool {
        debug_assert!(i >= 1);
        let idx = (i - 1) as usize;
        if idx < self.head.len() {
            self.head[idx]
        } else {
            self.cycle[(idx - self.head.len()) % self.cycle.len()]
        }
    }

    /// Encodes the first m bits as a natural: 2^m + Σ b_i·2^(m-i).
    /// Codes are distinct across all prefixes of all patterns.
    pub fn prefix_code(&self, m: u32) -> Option<u64> {
        if m == 0 || m > 63 {
            return None;
        }
        let mut value = 0u64;
        for i in 1..=m as u64 {
            value = (value << 1) | self.bit(i) as u64;
        }
        Some((1u64 << m) + value)
    }

    /// Whether x is a prefix code of this stream.
    pub fn branch_contains(&self, x: u64) -> bool {
        if x < 2 {
            return false;
        }
        let m = 63 - x.leading_zeros() as u64; // floor(log2 x)
        let value = x - (1u64 << m);
        (1..=m).all(|i| self.bit(i) == ((value >> (m - i)) & 1 == 1))
    }

    /// First position where the streams differ; `None` when they are the
    /// same stream. The scan window covers both heads plus a full common
    /// period, which decides equality of eventually periodic streams.
    pub fn first_difference(&self, other: &BitPattern) -> Option<u64> {
        let bound = (self.head.len() + other.head.len()) as u64
            + lcm(self.cycle.len() as u64, other.cycle.len() as u64);
        (1..=bound).find(|&i| self.bit(i) != other.bit(i))
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.head {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ";")?;
        for &b in &self.cycle {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The finite almost-disjoint family member for a bit stream: the codes
/// of its first `depth` prefixes, as an explicit set. Two members built
/// from streams first differing at position p share exactly p − 1
/// elements. Use [`ad_branch`] for the unbounded variant.
pub fn ad_family_member(bits: &BitPattern, depth: u32) -> Result<SetExpr, WitnessError> {
    if depth == 0 || depth > 63 {
        return Err(WitnessError::BadDepth);
    }
    let codes: Vec<u64> = (1..=depth)
        .map(|m| bits.prefix_code(m).expect("depth <= 63"))
        .collect();
    Ok(SetExpr::finite(codes).expect("codes are >= 2 and distinct"))
}

/// The unbounded branch set { code(bits|_1), code(bits|_2), … }.
pub fn ad_branch(bits: &BitPattern) -> SetExpr {
    SetExpr::Branch(bits.clone())
}

/// Pairwise intersection sizes of depth-limited family members: entry
/// (i, j) is the common-prefix length of patterns i and j; the diagonal
/// is the full depth. Patterns must be distinct within the given depth.
pub fn ad_family_pairwise_check(
    params: &[BitPattern],
    depth: u32,
) -> Result<Vec<Vec<u64>>, WitnessError> {
    if depth == 0 || depth > 63 {
        return Err(WitnessError::BadDepth);
    }
    let n = params.len();
    let mut matrix = vec![vec![0u64; n]; n];
    for i in 0..n {
        matrix[i][i] = depth as u64;
        for j in (i + 1)..n {
            let diff = (1..=depth as u64)
                .find(|&k| params[i].bit(k) != params[j].bit(k))
                .ok_or(WitnessError::IndistinctParams {
                    left: i,
                    right: j,
                    depth,
                })?;
            matrix[i][j] = diff - 1;
            matrix[j][i] = diff - 1;
        }
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::IdealSpec;

    fn kahan_block(lo: u64, hi: u64, w: impl Fn(u64) -> f64) -> f64 {
        let mut k = KahanSum::new();
        for i in (lo + 1)..=hi {
            k.add(w(i));
        }
        k.value()
    }

    #[test]
    fn frechet_blocks_are_singletons() {
        let bp = frechet_blocks(3).unwrap();
        assert_eq!(bp.cuts, vec![0, 1, 2, 3]);
        let bp = frechet_blocks(10).unwrap();
        assert_eq!(bp.block_bounds(7), Some((6, 7)));
        assert!(frechet_blocks(1).unwrap().block_count() == 1);
    }

    #[test]
    fn constant_summable_blocks_are_singletons() {
        let bp = summable_blocks(&WeightSeq::Constant(1.0), 4, 1_000_000).unwrap();
        assert_eq!(bp.cuts, vec![0, 1, 2, 3, 4]);
        for c in &bp.certificates {
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_summable_blocks_match_direct_oracle() {
        let bp = summable_blocks(&WeightSeq::Harmonic, 3, 1_000_000).unwrap();
        // direct Kahan recomputation fixes the greedy cuts:
        // {1} -> 1; {2,3,4} -> 13/12; {5..11} sums to ~0.9365 (< 1), so the
        // third block must run through 12.
        assert!(kahan_block(1, 4, |i| 1.0 / i as f64) >= 1.0);
        assert!(kahan_block(1, 3, |i| 1.0 / i as f64) < 1.0);
        assert!(kahan_block(4, 11, |i| 1.0 / i as f64) < 1.0);
        assert!(kahan_block(4, 12, |i| 1.0 / i as f64) >= 1.0);
        assert_eq!(bp.cuts, vec![0, 1, 4, 12]);
        for (n, cert) in bp.certificates.iter().enumerate() {
            let (lo, hi) = bp.block_bounds(n + 1).unwrap();
            let direct = kahan_block(lo as u64, hi as u64, |i| 1.0 / i as f64);
            assert!((cert - direct).abs() < 1e-12);
            assert!(*cert >= 1.0);
        }
    }

    #[test]
    fn power_law_blocks_start_at_one() {
        let bp = summable_blocks(&WeightSeq::PowerLaw(0.5), 2, 1_000_000).unwrap();
        assert_eq!(bp.cuts[1], 1); // s_1 = 1 >= 1 already
        for c in &bp.certificates {
            assert!(*c >= 1.0);
        }
        let direct = kahan_block(1, bp.cuts[2] as u64, |i| (i as f64).powf(-0.5));
        assert!((bp.certificates[1] - direct).abs() < 1e-10);
    }

    #[test]
    fn constant_density_blocks_double() {
        let bp = erdos_ulam_blocks(&WeightSeq::Constant(1.0), 4, 1_000_000).unwrap();
        assert_eq!(bp.cuts, vec![0, 1, 3, 7, 15]);
        let expected = [1.0, 2.0 / 3.0, 4.0 / 7.0, 8.0 / 15.0];
        for (c, e) in bp.certificates.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12);
        }
        let single = erdos_ulam_blocks(&WeightSeq::Constant(1.0), 1, 1_000_000).unwrap();
        assert_eq!(single.cuts, vec![0, 1]);
        assert!((single.certificates[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_density_second_cut() {
        // least k with (H(k) - H(1)) / H(k) > 1/2, i.e. H(k) > 2, is k = 4
        let bp = erdos_ulam_blocks(&WeightSeq::Harmonic, 2, 1_000_000).unwrap();
        assert_eq!(bp.cuts, vec![0, 1, 4]);
        let h = |k: u64| kahan_block(0, k, |i| 1.0 / i as f64);
        assert!(h(3) <= 2.0 && h(4) > 2.0);
    }

    #[test]
    fn greedy_minimality_holds_block_by_block() {
        let sums = WeightSums::new(&WeightSeq::Harmonic).unwrap();
        let bp = summable_blocks(&WeightSeq::Harmonic, 8, u128::MAX).unwrap();
        for n in 1..=bp.block_count() {
            let (lo, hi) = bp.block_bounds(n).unwrap();
            assert!(sums.block_sum(lo, hi) >= 1.0);
            if hi - lo > 1 {
                assert!(sums.block_sum(lo, hi - 1) < 1.0, "block {n} not minimal");
            }
        }
        let eu = erdos_ulam_blocks(&WeightSeq::Constant(2.0), 6, u128::MAX).unwrap();
        let csums = WeightSums::new(&WeightSeq::Constant(2.0)).unwrap();
        for n in 2..=eu.block_count() {
            let (lo, hi) = eu.block_bounds(n).unwrap();
            assert!(csums.block_sum(lo, hi) / csums.prefix(hi) > 0.5);
            assert!(csums.block_sum(lo, hi - 1) / csums.prefix(hi - 1) <= 0.5);
        }
    }

    #[test]
    fn cap_exceeded_returns_partial() {
        let err = summable_blocks(&WeightSeq::Harmonic, 10, 50).unwrap_err();
        match err {
            WitnessError::CapExceeded { partial, built, .. } => {
                assert!(built >= 2);
                assert_eq!(partial.cuts.len(), built + 1);
            }
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn union_expansion_matches_block_layout() {
        let bp = erdos_ulam_blocks(&WeightSeq::Constant(1.0), 4, 1 << 20).unwrap();
        // cuts (0,1,3,7,15); indices {1,3} select {1} and {4..7}
        let m = SetExpr::finite([1, 3]).unwrap();
        let u = union_over_index(&bp, &m);
        assert_eq!(u.members_upto(15).unwrap().members, vec![1, 4, 5, 6, 7]);
        let none = union_over_index(&bp, &SetExpr::empty());
        assert_eq!(none.members_upto(15).unwrap().count, 0);
        let all = union_over_index(
            &frechet_blocks(3).unwrap(),
            &SetExpr::finite([1, 2, 3]).unwrap(),
        );
        assert_eq!(all.members_upto(3).unwrap().members, vec![1, 2, 3]);
    }

    #[test]
    fn verify_accepts_infinite_structured_index() {
        let s = WeightSeq::Harmonic;
        let bp = summable_blocks(&s, 30, u128::MAX).unwrap();
        let report = verify_conglomeration(
            &bp,
            &IdealSpec::Summable(s.clone()),
            &SetExpr::Squares,
            1_000_000,
        )
        .unwrap();
        assert_eq!(report.conclusion, Conclusion::InGrillCertified);
        assert!(report
            .certificate_per_selected_block
            .iter()
            .all(|&c| c >= 1.0 - SUM_TOLERANCE));
        assert!(report.empirical.unwrap().consistent);
    }

    #[test]
    fn verify_fails_finite_index() {
        let s = WeightSeq::Constant(1.0);
        let bp = erdos_ulam_blocks(&s, 10, 1 << 24).unwrap();
        let report = verify_conglomeration(
            &bp,
            &IdealSpec::ErdosUlam(s.clone()),
            &SetExpr::finite([2, 5]).unwrap(),
            1 << 20,
        )
        .unwrap();
        assert_eq!(report.conclusion, Conclusion::Failed);
        assert!(report.detail.contains("finite"));
    }

    #[test]
    fn verify_downgrades_uncertified_index_sets() {
        // a table-backed index is neither provably finite nor infinite, so
        // passing bounds only earn an empirical conclusion
        let s = WeightSeq::Constant(1.0);
        let bp = erdos_ulam_blocks(&s, 10, 1 << 24).unwrap();
        let table =
            SetExpr::Table(crate::setexpr::PredicateTable::from_fn(10, |n| n % 2 == 1).unwrap());
        let report =
            verify_conglomeration(&bp, &IdealSpec::ErdosUlam(s.clone()), &table, 1 << 10).unwrap();
        assert_eq!(report.conclusion, Conclusion::InGrillEmpirical);
        assert!(!report.selected_indices.is_empty());
    }

    #[test]
    fn verify_rejects_mismatched_kind() {
        let s = WeightSeq::Constant(1.0);
        let bp = erdos_ulam_blocks(&s, 5, 1 << 20).unwrap();
        let err = verify_conglomeration(
            &bp,
            &IdealSpec::Summable(s.clone()),
            &SetExpr::Squares,
            1000,
        )
        .unwrap_err();
        assert!(matches!(err, WitnessError::MismatchedIdeal { .. }));
    }

    #[test]
    fn branch_codes() {
        let zeros = BitPattern::constant(false);
        let member = ad_family_member(&zeros, 3).unwrap();
        assert_eq!(member.members_upto(10).unwrap().members, vec![2, 4, 8]);

        let ones = BitPattern::constant(true);
        let member = ad_family_member(&ones, 2).unwrap();
        assert_eq!(member.members_upto(10).unwrap().members, vec![3, 7]);

        assert!(ad_family_member(&zeros, 0).is_err());
    }

    #[test]
    fn branch_intersections_equal_shared_prefix() {
        // 010... vs 011...: shared prefixes are "0" and "01"
        let p = BitPattern::from_bits_then_zeros(&[false, true, false]);
        let q = BitPattern::from_bits_then_zeros(&[false, true, true]);
        let a = ad_family_member(&p, 5).unwrap();
        let b = ad_family_member(&q, 5).unwrap();
        let mut bm = a.bitmap_upto(100).unwrap();
        bm.intersect_with(&b.bitmap_upto(100).unwrap());
        assert_eq!(bm.members(), vec![2, 5]);
    }

    #[test]
    fn branch_set_contains_exactly_prefix_codes() {
        let p = BitPattern::new(vec![true, false], vec![true, false]).unwrap();
        let branch = ad_branch(&p);
        let view = branch.members_upto(200).unwrap();
        let expected: Vec<u64> = (1..=7)
            .map(|m| p.prefix_code(m).unwrap())
            .filter(|&c| c <= 200)
            .collect();
        assert_eq!(view.members, expected);
        for n in 1..=200 {
            assert_eq!(branch.contains(n).unwrap(), expected.contains(&n));
        }
    }

    #[test]
    fn pairwise_matrix_matches_prefix_lengths() {
        let params: Vec<BitPattern> = [
            [false, false, false],
            [false, false, true],
            [false, true, false],
            [false, true, true],
        ]
        .iter()
        .map(|b| BitPattern::from_bits_then_zeros(b))
        .collect();
        let m = ad_family_pairwise_check(&params, 3).unwrap();
        assert_eq!(m[0][0], 3);
        assert_eq!(m[0][1], 2); // 000 vs 001 share "00"
        assert_eq!(m[0][2], 1); // 000 vs 010 share "0"
        assert_eq!(m[2][3], 2); // 010 vs 011 share "01"
                                // identical params at this depth are rejected
        let dup = vec![params[0].clone(), params[0].clone()];
        assert!(ad_family_pairwise_check(&dup, 3).is_err());
        // single param: 1x1 matrix [depth]
        let single = ad_family_pairwise_check(&params[..1], 3).unwrap();
        assert_eq!(single, vec![vec![3]]);
    }

    #[test]
    fn composition_law_over_branch_indexed_unions() {
        // distinct branch index sets produce block unions that are
        // pairwise almost-disjoint-certified and individually certified
        // grill members
        let s = WeightSeq::Constant(1.0);
        let bp = erdos_ulam_blocks(&s, 20, 1 << 40).unwrap();
        let patterns = [
            BitPattern::constant(false),
            BitPattern::constant(true),
            BitPattern::from_bits_then_zeros(&[false, true]),
            BitPattern::new(vec![], vec![true, false]).unwrap(),
        ];
        let unions: Vec<SetExpr> = patterns
            .iter()
            .map(|p| union_over_index(&bp, &ad_branch(p)))
            .collect();
        for i in 0..unions.len() {
            for j in (i + 1)..unions.len() {
                let report =
                    crate::setexpr::almost_disjoint_report(&unions[i], &unions[j], 1_000_000)
                        .unwrap();
                assert_eq!(
                    report.verdict,
                    crate::setexpr::AdVerdict::CertifiedFinite,
                    "unions {i} and {j} not certified almost disjoint"
                );
            }
            let r = verify_conglomeration(
                &bp,
                &IdealSpec::ErdosUlam(s.clone()),
                &ad_branch(&patterns[i]),
                1_000_000,
            )
            .unwrap();
            assert_eq!(r.conclusion, Conclusion::InGrillCertified);
        }
    }

    #[test]
    fn partition_json_round_trip() {
        let bp = erdos_ulam_blocks(&WeightSeq::Constant(1.0), 4, 1 << 20).unwrap();
        let json = bp.to_json();
        assert!(json.contains("\"erdos_ulam\""));
        assert!(json.contains("\"constant(1)\""));
        let back = BlockPartition::from_json(&json).unwrap();
        assert_eq!(back, bp);
    }
}
