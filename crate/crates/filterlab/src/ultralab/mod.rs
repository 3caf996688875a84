//! Exact filter/ultrafilter combinatorics on small finite universes.
//!
//! Everything here is decidable by brute force: subsets of {1, …, n} are
//! bitmasks, families of subsets are enumerable, and the lattice facts
//! about intersections of ultrafilters become finite checks.
//!
//! Scope caveat, stated once: on a finite universe every filter is
//! principal (the intersection of its finitely many members is a least
//! member), and every ultrafilter is a point filter. Free filters and
//! free ultrafilters — the objects the infinite theory quantifies over —
//! do not exist here. What this laboratory exercises faithfully are the
//! choice-free lattice arguments: the complement dichotomy, union
//! elements of intersections, uniqueness of finite representations, the
//! decomposition and partition recurrences, trace filters, inavoidable
//! members, grill duality, and the measure counting bound. Statements
//! that genuinely need freeness (anything about cofinite tails or
//! countable minimal collections) are modelled only analogically, and the
//! per-operation docs say which is which.
//!
//! The base of a [`FiniteFilter`] is kept as a minimal antichain. For a
//! family satisfying the filter axioms that antichain is necessarily a
//! single core set; the representation keeps the general shape so family
//! calculations stay uniform, and the axioms are re-verified from scratch
//! wherever a theorem check depends on them.

pub mod sweeps;

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Universes above this size make family-of-families enumeration
/// infeasible; exhaustive sweeps refuse to run there.
pub const MAX_SWEEP_N: u8 = 6;

/// Hard cap for subset-level work (2^20 masks).
pub const MAX_UNIVERSE_N: u8 = 20;

const MEASURE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum UltralabError {
    #[error("universe size must lie in 2..={MAX_UNIVERSE_N}, got {0}")]
    UniverseSize(u8),
    #[error("operands live on different universes")]
    UniverseMismatch,
    #[error("point {0} is outside the universe")]
    PointOutOfRange(u8),
    #[error("a filter core must be a non-empty subset")]
    EmptyCore,
    #[error("family is not a filter: {0}")]
    NotAFilter(String),
    #[error("collection of filters must be non-empty")]
    EmptyCollection,
    #[error("minimality is defined for collections of at least two distinct members")]
    NeedAtLeastTwo,
    #[error("collection members must be pairwise distinct")]
    DuplicateMembers,
    #[error("pick {index} is not a member of its filter")]
    PickNotInFilter { index: usize },
    #[error("no witness: the filter is contained in the ultrafilter")]
    NoWitness,
    #[error("the set to decompose must belong to both the filter and the ultrafilter")]
    NotInBothFilters,
    #[error("the filter is not contained in the ultrafilter")]
    FilterNotInUltrafilter,
    #[error("the trace carrier misses a filter member, so the trace would contain the empty set")]
    EmptyTrace,
    #[error("family members {left} and {right} overlap")]
    NotDisjoint { left: usize, right: usize },
    #[error("sets for a minimal family must be non-empty")]
    EmptyFamilyMember,
    #[error("invalid measure: {0}")]
    BadMeasure(String),
    #[error("invalid coefficients: {0}")]
    BadCoefficients(String),
    #[error("counting bound needs n_inv >= 1")]
    ZeroInverse,
    #[error("exhaustive sweeps are capped at n <= {MAX_SWEEP_N}, got {0}")]
    SweepTooLarge(u8),
}

/// The finite universe {1, …, n}, 2 ≤ n ≤ 20.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Universe {
    n: u8,
}

impl Universe {
    pub fn new(n: u8) -> Result<Self, UltralabError> {
        if !(2..=MAX_UNIVERSE_N).contains(&n) {
            return Err(UltralabError::UniverseSize(n));
        }
        Ok(Universe { n })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn full(&self) -> Subset {
        Subset((1u32 << self.n) - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = u8> {
        1..=self.n
    }

    pub fn singleton(&self, p: u8) -> Result<Subset, UltralabError> {
        if p == 0 || p > self.n {
            return Err(UltralabError::PointOutOfRange(p));
        }
        Ok(Subset(1 << (p - 1)))
    }

    pub fn subset(&self, points: &[u8]) -> Result<Subset, UltralabError> {
        let mut mask = 0u32;
        for &p in points {
            mask |= self.singleton(p)?.0;
        }
        Ok(Subset(mask))
    }

    /// All 2^n subsets in mask order (∅ first, Ω last).
    pub fn all_subsets(&self) -> impl Iterator<Item = Subset> {
        (0..=((1u32 << self.n) - 1)).map(Subset)
    }

    pub fn complement(&self, s: Subset) -> Subset {
        Subset(!s.0 & self.full().0)
    }

    pub fn contains_subset(&self, s: Subset) -> bool {
        s.0 <= self.full().0
    }
}

/// Subset of a universe, encoded as a bitmask (bit p−1 ⇔ p ∈ subset).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn contains(&self, p: u8) -> bool {
        p >= 1 && self.0 >> (p - 1) & 1 == 1
    }

    pub fn union(&self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn inter(&self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(&self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn points(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=32u8).filter(|&p| self.contains(p))
    }

    pub fn least_point(&self) -> Option<u8> {
        if self.is_empty() {
            None
        } else {
            Some(self.0.trailing_zeros() as u8 + 1)
        }
    }
}

// Subsets print and serialize as their sorted point lists.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len() as usize))?;
        for p in self.points() {
            seq.serialize_element(&p)?;
        }
        seq.end()
    }
}

/// Up-closed, intersection-closed, ∅-free family of subsets, stored by
/// its minimal antichain base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteFilter {
    universe: Universe,
    base: Vec<Subset>,
}

impl FiniteFilter {
    /// The filter { A : A ⊇ core }.
    pub fn principal(universe: Universe, core: Subset) -> Result<Self, UltralabError> {
        if core.is_empty() {
            return Err(UltralabError::EmptyCore);
        }
        if !universe.contains_subset(core) {
            return Err(UltralabError::UniverseMismatch);
        }
        Ok(FiniteFilter {
            universe,
            base: vec![core],
        })
    }

    /// The trivial filter {Ω}.
    pub fn trivial(universe: Universe) -> Self {
        FiniteFilter {
            universe,
            base: vec![universe.full()],
        }
    }

    /// Builds a filter from an explicit family, verifying the axioms
    /// (no ∅, closed under intersection and superset) by enumeration.
    pub fn from_family(universe: Universe, members: &[Subset]) -> Result<Self, UltralabError> {
        if members.is_empty() {
            return Err(UltralabError::NotAFilter("family is empty".into()));
        }
        let family: std::collections::BTreeSet<Subset> = members.iter().copied().collect();
        if family.contains(&Subset::EMPTY) {
            return Err(UltralabError::NotAFilter(
                "family contains the empty set".into(),
            ));
        }
        for &a in &family {
            if !universe.contains_subset(a) {
                return Err(UltralabError::UniverseMismatch);
            }
            for &b in &family {
                if !family.contains(&a.inter(b)) {
                    return Err(UltralabError::NotAFilter(format!(
                        "not closed under intersection: {a} ∩ {b} is missing"
                    )));
                }
            }
            for sup in universe.all_subsets() {
                if a.is_subset_of(sup) && !family.contains(&sup) {
                    return Err(UltralabError::NotAFilter(format!(
                        "not closed under superset: {sup} ⊇ {a} is missing"
                    )));
                }
            }
        }
        // intersection-closure gives a least member; it is the whole base
        let core = family.iter().fold(universe.full(), |acc, &s| acc.inter(s));
        debug_assert!(family.contains(&core));
        Ok(FiniteFilter {
            universe,
            base: vec![core],
        })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    /// Minimal antichain generating the filter upward.
    pub fn base(&self) -> &[Subset] {
        &self.base
    }

    /// Least member (the intersection of the whole family).
    pub fn core(&self) -> Subset {
        self.base
            .iter()
            .fold(self.universe.full(), |acc, &s| acc.inter(s))
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.base.iter().any(|&b| b.is_subset_of(s))
    }

    /// Every member, in mask order.
    pub fn members(&self) -> Vec<Subset> {
        self.universe
            .all_subsets()
            .filter(|&s| self.contains(s))
            .collect()
    }

    /// Family as a bitset over subset masks; sweep workhorse for n ≤ 6.
    pub fn family_mask(&self) -> u64 {
        assert!(
            self.universe.n <= MAX_SWEEP_N,
            "family masks need n <= {MAX_SWEEP_N}"
        );
        let mut fm = 0u64;
        for s in self.universe.all_subsets() {
            if self.contains(s) {
                fm |= 1u64 << s.0;
            }
        }
        fm
    }

    pub fn is_ultrafilter(&self) -> bool {
        self.core().len() == 1
    }

    /// Re-checks the filter axioms by enumeration.
    pub fn verify_axioms(&self) -> Result<(), UltralabError> {
        Self::from_family(self.universe, &self.members()).map(|_| ())
    }
}

/// The ultrafilter { A : point ∈ A } — the only kind a finite universe
/// admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipalUltrafilter {
    universe: Universe,
    point: u8,
}

impl PrincipalUltrafilter {
    pub fn new(universe: Universe, point: u8) -> Result<Self, UltralabError> {
        universe.singleton(point)?;
        Ok(PrincipalUltrafilter { universe, point })
    }

    pub fn point(&self) -> u8 {
        self.point
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn contains(&self, s: Subset) -> bool {
        s.contains(self.point)
    }

    pub fn filter(&self) -> FiniteFilter {
        FiniteFilter::principal(
            self.universe,
            self.universe.singleton(self.point).expect("valid"),
        )
        .expect("singleton core")
    }

    /// Exactly one of A, Ω∖A is a member.
    pub fn dichotomy_holds(&self, s: Subset) -> bool {
        self.contains(s) != self.contains(self.universe.complement(s))
    }
}

fn require_same_universe<'a>(
    filters: impl IntoIterator<Item = &'a Universe>,
) -> Result<Universe, UltralabError> {
    let mut iter = filters.into_iter();
    let first = *iter.next().ok_or(UltralabError::EmptyCollection)?;
    for u in iter {
        if *u != first {
            return Err(UltralabError::UniverseMismatch);
        }
    }
    Ok(first)
}

/// ∩W: the sets belonging to every filter of the collection. Duplicate
/// entries are collapsed (collections are sets of filters).
pub fn intersect_collection(filters: &[FiniteFilter]) -> Result<FiniteFilter, UltralabError> {
    let universe = require_same_universe(filters.iter().map(FiniteFilter::universe2))?;
    let mut distinct: Vec<&FiniteFilter> = Vec::new();
    for f in filters {
        if !distinct.contains(&f) {
            distinct.push(f);
        }
    }
    // member-wise: A ∈ ∩W iff A ⊇ every core, i.e. A ⊇ ∪ cores
    let core = distinct
        .iter()
        .fold(Subset::EMPTY, |acc, f| acc.union(f.core()));
    FiniteFilter::principal(universe, core)
}

impl FiniteFilter {
    fn universe2(&self) -> &Universe {
        &self.universe
    }
}

/// Checks the union-element fact: given one member from each filter, the
/// union of the picks belongs to the intersection of the collection.
pub fn union_element_check(
    filters: &[FiniteFilter],
    picks: &[Subset],
) -> Result<bool, UltralabError> {
    if filters.is_empty() || filters.len() != picks.len() {
        return Err(UltralabError::EmptyCollection);
    }
    for (i, (f, &p)) in filters.iter().zip(picks).enumerate() {
        if !f.contains(p) {
            return Err(UltralabError::PickNotInFilter { index: i });
        }
    }
    let union = picks.iter().fold(Subset::EMPTY, |acc, &p| acc.union(p));
    Ok(intersect_collection(filters)?.contains(union))
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipLemmaVerdict {
    /// ∩W ⊆ 𝔘, checked subset by subset.
    pub premise: bool,
    /// 𝔘 ∈ W.
    pub conclusion: bool,
    /// premise ⇒ conclusion.
    pub holds: bool,
}

/// The membership lemma for finite collections: an ultrafilter containing
/// the intersection of the collection is itself a member.
pub fn ultrafilter_membership_lemma_check(
    collection: &[PrincipalUltrafilter],
    candidate: &PrincipalUltrafilter,
) -> Result<MembershipLemmaVerdict, UltralabError> {
    let universe = require_same_universe(
        collection
            .iter()
            .map(|u| u.universe2())
            .chain([candidate.universe2()]),
    )?;
    let filters: Vec<FiniteFilter> = collection
        .iter()
        .map(PrincipalUltrafilter::filter)
        .collect();
    let inter = intersect_collection(&filters)?;
    let premise = universe
        .all_subsets()
        .all(|s| !inter.contains(s) || candidate.contains(s));
    let conclusion = collection.iter().any(|u| u.point == candidate.point);
    Ok(MembershipLemmaVerdict {
        premise,
        conclusion,
        holds: !premise || conclusion,
    })
}

impl PrincipalUltrafilter {
    fn universe2(&self) -> &Universe {
        &self.universe
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub universe_n: u8,
    pub max_size: usize,
    pub collections_checked: u64,
    pub pairs_checked: u64,
    pub violations: Vec<String>,
}

/// Distinct collections of principal ultrafilters (up to the size bound)
/// must have distinct intersections; checked pairwise by comparing whole
/// families.
pub fn representation_uniqueness_check(
    universe: Universe,
    max_size: usize,
) -> Result<UniquenessReport, UltralabError> {
    if universe.n > MAX_SWEEP_N {
        return Err(UltralabError::SweepTooLarge(universe.n));
    }
    let mut families: Vec<(u32, u64)> = Vec::new(); // (point mask, family mask)
    for pts in 1..(1u32 << universe.n) {
        if (pts.count_ones() as usize) > max_size {
            continue;
        }
        let filters: Vec<FiniteFilter> = Subset(pts)
            .points()
            .map(|p| {
                PrincipalUltrafilter::new(universe, p)
                    .expect("valid")
                    .filter()
            })
            .collect();
        families.push((pts, intersect_collection(&filters)?.family_mask()));
    }
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for i in 0..families.len() {
        for j in (i + 1)..families.len() {
            pairs_checked += 1;
            if families[i].1 == families[j].1 {
                violations.push(format!(
                    "collections {} and {} share the same intersection",
                    Subset(families[i].0),
                    Subset(families[j].0)
                ));
            }
        }
    }
    Ok(UniquenessReport {
        universe_n: universe.n,
        max_size,
        collections_checked: families.len() as u64,
        pairs_checked,
        violations,
    })
}

/// Dropping any single member must strictly enlarge the intersection.
pub fn is_minimal(filters: &[FiniteFilter]) -> Result<bool, UltralabError> {
    if filters.len() < 2 {
        return Err(UltralabError::NeedAtLeastTwo);
    }
    require_same_universe(filters.iter().map(FiniteFilter::universe2))?;
    for i in 0..filters.len() {
        for j in (i + 1)..filters.len() {
            if filters[i] == filters[j] {
                return Err(UltralabError::DuplicateMembers);
            }
        }
    }
    let whole = intersect_collection(filters)?;
    for i in 0..filters.len() {
        let rest: Vec<FiniteFilter> = filters
            .iter()
            .enumerate()
            .filter(|&(j, _f)| j != i)
            .map(|(_j, f)| f.clone())
            .collect();
        if intersect_collection(&rest)? == whole {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    /// The part landing in the ultrafilter.
    pub in_ultrafilter: Subset,
    /// The part landing in the other filter (K ∩ D for the least witness K).
    pub in_filter: Subset,
    /// The witness K ∈ 𝔉₀ ∖ 𝔘 used, least in mask order.
    pub witness: Subset,
    /// Whether the trace of 𝔉₀ ∩ 𝔘 on the ultrafilter part equals the
    /// ultrafilter's own trace there.
    pub trace_claim_verified: bool,
}

/// Splits D ∈ 𝔉₀ ∩ 𝔘 into a disjoint pair A ⊔ B with A ∈ 𝔘 and B ∈ 𝔉₀,
/// using the mask-least witness K ∈ 𝔉₀ ∖ 𝔘 (B = K ∩ D, A = D ∖ B).
/// Requires 𝔉₀ ⊄ 𝔘; fails with `NoWitness` otherwise.
pub fn decompose_by_lemma(
    d: Subset,
    f0: &FiniteFilter,
    u: &PrincipalUltrafilter,
) -> Result<Decomposition, UltralabError> {
    let universe = require_same_universe([f0.universe2(), u.universe2()])?;
    if !(f0.contains(d) && u.contains(d)) {
        return Err(UltralabError::NotInBothFilters);
    }
    let witness = universe
        .all_subsets()
        .find(|&k| f0.contains(k) && !u.contains(k))
        .ok_or(UltralabError::NoWitness)?;
    let in_filter = witness.inter(d);
    let in_ultrafilter = d.minus(in_filter);
    debug_assert!(u.contains(in_ultrafilter));
    debug_assert!(f0.contains(in_filter));

    let meet = intersect_collection(&[f0.clone(), u.filter()])?;
    let trace_claim_verified =
        trace_filter(&meet, in_ultrafilter)? == trace_filter(&u.filter(), in_ultrafilter)?;
    Ok(Decomposition {
        in_ultrafilter,
        in_filter,
        witness,
        trace_claim_verified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionOutcome {
    /// N_k ∈ 𝔘_k, pairwise disjoint, covering the universe.
    pub parts: Vec<Subset>,
    /// Disjointness, coverage, and N_k ∋ point_k, re-checked.
    pub item1_verified: bool,
    /// Reconstruction A ∈ ∩W ⇔ A = ⊔ (A ∩ N_k) with every A ∩ N_k ∈ 𝔘_k,
    /// enumerated over all subsets (only for n ≤ MAX_SWEEP_N).
    pub item2_verified: Option<bool>,
}

/// Builds the disjoint cover {N_k} with N_k ∈ 𝔘_k by the decomposition
/// recurrence, absorbing any leftover into N_1 (a no-op for a finite
/// collection, kept for fidelity to the construction).
pub fn partition_for_collection(
    collection: &[PrincipalUltrafilter],
) -> Result<PartitionOutcome, UltralabError> {
    if collection.len() < 2 {
        return Err(UltralabError::NeedAtLeastTwo);
    }
    let universe = require_same_universe(collection.iter().map(|u| u.universe2()))?;
    for i in 0..collection.len() {
        for j in (i + 1)..collection.len() {
            if collection[i].point == collection[j].point {
                return Err(UltralabError::DuplicateMembers);
            }
        }
    }

    let mut parts: Vec<Subset> = Vec::with_capacity(collection.len());
    let mut remaining = universe.full();
    for k in 0..collection.len() - 1 {
        let rest: Vec<FiniteFilter> = collection[k + 1..]
            .iter()
            .map(PrincipalUltrafilter::filter)
            .collect();
        let f_rest = intersect_collection(&rest)?;
        let dec = decompose_by_lemma(remaining, &f_rest, &collection[k])?;
        parts.push(dec.in_ultrafilter);
        remaining = dec.in_filter;
    }
    parts.push(remaining);

    // absorb whatever the recurrence left uncovered into the first part
    let covered = parts.iter().fold(Subset::EMPTY, |acc, &p| acc.union(p));
    let leftover = universe.full().minus(covered);
    if !leftover.is_empty() {
        parts[0] = parts[0].union(leftover);
    }

    let mut item1 = parts.len() == collection.len();
    for (i, (&p, u)) in parts.iter().zip(collection).enumerate() {
        item1 &= u.contains(p);
        for &q in &parts[i + 1..] {
            item1 &= p.inter(q).is_empty();
        }
    }
    item1 &= parts.iter().fold(Subset::EMPTY, |acc, &p| acc.union(p)) == universe.full();

    let item2_verified = if universe.n <= MAX_SWEEP_N {
        let filters: Vec<FiniteFilter> = collection
            .iter()
            .map(PrincipalUltrafilter::filter)
            .collect();
        let inter = intersect_collection(&filters)?;
        let ok = universe.all_subsets().all(|a| {
            let reconstructed = collection
                .iter()
                .zip(&parts)
                .all(|(u, &nk)| u.contains(a.inter(nk)));
            inter.contains(a) == reconstructed
        });
        Some(ok)
    } else {
        None
    };

    Ok(PartitionOutcome {
        parts,
        item1_verified: item1,
        item2_verified,
    })
}

/// Filter on a sub-universe: the traces { carrier ∩ B : B ∈ filter }.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceFilter {
    universe: Universe,
    carrier: Subset,
    base: Vec<Subset>,
}

impl TraceFilter {
    pub fn carrier(&self) -> Subset {
        self.carrier
    }

    pub fn base(&self) -> &[Subset] {
        &self.base
    }

    pub fn contains(&self, s: Subset) -> bool {
        s.is_subset_of(self.carrier) && self.base.iter().any(|&b| b.is_subset_of(s))
    }

    /// Members, as subsets of the carrier.
    pub fn members(&self) -> Vec<Subset> {
        let mut out = Vec::new();
        // enumerate subsets of the carrier via the standard submask walk
        let carrier = self.carrier.0;
        let mut sub = carrier;
        loop {
            let s = Subset(sub);
            if self.contains(s) {
                out.push(s);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & carrier;
        }
        out.sort_unstable();
        out
    }

    /// An ultrafilter on the carrier is a point trace.
    pub fn is_ultrafilter_on_carrier(&self) -> bool {
        self.base.len() == 1 && self.base[0].len() == 1
    }
}

/// The trace of a filter on a carrier set; defined when the carrier meets
/// every member (otherwise ∅ would slip in).
pub fn trace_filter(f: &FiniteFilter, carrier: Subset) -> Result<TraceFilter, UltralabError> {
    if f.base().iter().any(|&b| carrier.inter(b).is_empty()) {
        return Err(UltralabError::EmptyTrace);
    }
    let base: Vec<Subset> = f.base().iter().map(|&b| carrier.inter(b)).collect();
    Ok(TraceFilter {
        universe: f.universe,
        carrier,
        base,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InavoidabilityReport {
    pub holds: bool,
    /// A member of the ultrafilter on which the filter's trace equals the
    /// ultrafilter's trace, if one exists.
    pub witness: Option<Subset>,
    /// For n ≤ MAX_SWEEP_N: every representation of the filter as an
    /// intersection of principal ultrafilters was enumerated and checked
    /// to contain the candidate.
    pub representations_checked: Option<u64>,
    pub representations_all_contain_candidate: Option<bool>,
}

/// Trace criterion for inavoidability: the ultrafilter appears in every
/// representation of the filter exactly when some member carries equal
/// traces. Requires filter ⊆ ultrafilter.
pub fn inavoidability_check(
    f: &FiniteFilter,
    u: &PrincipalUltrafilter,
) -> Result<InavoidabilityReport, UltralabError> {
    let universe = require_same_universe([f.universe2(), u.universe2()])?;
    let contained = universe
        .all_subsets()
        .all(|s| !f.contains(s) || u.contains(s));
    if !contained {
        return Err(UltralabError::FilterNotInUltrafilter);
    }
    let mut witness = None;
    for a in universe.all_subsets() {
        if a.is_empty() || !u.contains(a) {
            continue;
        }
        if let Ok(tf) = trace_filter(f, a) {
            if tf == trace_filter(&u.filter(), a)? {
                witness = Some(a);
                break;
            }
        }
    }
    let (mut checked, mut all_contain) = (None, None);
    if universe.n <= MAX_SWEEP_N {
        let target = f.family_mask();
        let mut count = 0u64;
        let mut all = true;
        for pts in 1..(1u32 << universe.n) {
            let filters: Vec<FiniteFilter> = Subset(pts)
                .points()
                .map(|p| {
                    PrincipalUltrafilter::new(universe, p)
                        .expect("valid")
                        .filter()
                })
                .collect();
            if intersect_collection(&filters)?.family_mask() == target {
                count += 1;
                all &= Subset(pts).contains(u.point);
            }
        }
        checked = Some(count);
        all_contain = Some(all);
    }
    Ok(InavoidabilityReport {
        holds: witness.is_some(),
        witness,
        representations_checked: checked,
        representations_all_contain_candidate: all_contain,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrillIdealReport {
    pub ideal: Vec<Subset>,
    pub grill: Vec<Subset>,
    /// grill computed as complement-of-ideal and as meets-every-member
    /// agree set by set.
    pub characterizations_agree: bool,
}

/// The ideal (complements of members) and grill (sets meeting every
/// member) of a filter, computed by both characterizations.
pub fn grill_and_ideal(f: &FiniteFilter) -> GrillIdealReport {
    let universe = f.universe;
    let members = f.members();
    let ideal: Vec<Subset> = members
        .iter()
        .map(|&m| universe.complement(m))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let ideal_set: std::collections::BTreeSet<Subset> = ideal.iter().copied().collect();
    let mut grill = Vec::new();
    let mut agree = true;
    for s in universe.all_subsets() {
        let via_ideal = !ideal_set.contains(&s);
        let via_meets = members.iter().all(|&m| !s.inter(m).is_empty());
        agree &= via_ideal == via_meets;
        if via_meets {
            grill.push(s);
        }
    }
    GrillIdealReport {
        ideal,
        grill,
        characterizations_agree: agree,
    }
}

/// Finitely additive probability weights on the points of a universe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteMeasure {
    universe: Universe,
    weights: Vec<f64>,
}

impl FiniteMeasure {
    pub fn new(universe: Universe, weights: Vec<f64>) -> Result<Self, UltralabError> {
        if weights.len() != universe.n as usize {
            return Err(UltralabError::BadMeasure(format!(
                "need {} weights, got {}",
                universe.n,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(UltralabError::BadMeasure(
                "weights must be finite and >= 0".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MEASURE_TOLERANCE {
            return Err(UltralabError::BadMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(FiniteMeasure { universe, weights })
    }

    pub fn point_mass(universe: Universe, p: u8) -> Result<Self, UltralabError> {
        universe.singleton(p)?;
        let mut weights = vec![0.0; universe.n as usize];
        weights[p as usize - 1] = 1.0;
        Ok(FiniteMeasure { universe, weights })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn mu(&self, s: Subset) -> f64 {
        s.points().map(|p| self.weights[p as usize - 1]).sum()
    }

    pub fn support(&self) -> Subset {
        let mut mask = 0u32;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                mask |= 1 << i;
            }
        }
        Subset(mask)
    }
}

/// { A : μ(A) = 1 } (to measure tolerance): the filter a measure
/// generates. For a genuine measure this is the principal filter over the
/// support; the family is enumerated and the filter axioms re-verified.
pub fn measure_generated_filter(m: &FiniteMeasure) -> Result<FiniteFilter, UltralabError> {
    let family: Vec<Subset> = m
        .universe
        .all_subsets()
        .filter(|&s| m.mu(s) >= 1.0 - MEASURE_TOLERANCE)
        .collect();
    FiniteFilter::from_family(m.universe, &family)
}

/// Pointwise convex combination of measures. The generated filter equals
/// the intersection of the individual generated filters; the identity is
/// exercised exhaustively in the sweeps.
pub fn convex_combination(
    measures: &[FiniteMeasure],
    coefficients: &[f64],
) -> Result<FiniteMeasure, UltralabError> {
    if measures.is_empty() || measures.len() != coefficients.len() {
        return Err(UltralabError::BadCoefficients(
            "need one positive coefficient per measure".into(),
        ));
    }
    let universe = require_same_universe(measures.iter().map(|m| &m.universe))?;
    if coefficients.iter().any(|c| !c.is_finite() || *c <= 0.0) {
        return Err(UltralabError::BadCoefficients(
            "coefficients must be positive".into(),
        ));
    }
    let total: f64 = coefficients.iter().sum();
    if (total - 1.0).abs() > MEASURE_TOLERANCE {
        return Err(UltralabError::BadCoefficients(format!(
            "coefficients sum to {total}, not 1"
        )));
    }
    let mut weights = vec![0.0; universe.n as usize];
    for (m, &c) in measures.iter().zip(coefficients) {
        for (w, &mw) in weights.iter_mut().zip(&m.weights) {
            *w += c * mw;
        }
    }
    // guard against drift before revalidating
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    FiniteMeasure::new(universe, weights)
}

/// The counting bound behind "measure filters are poor": among pairwise
/// disjoint sets, fewer than n can have measure above 1/n.
pub fn poorness_bound_check(
    m: &FiniteMeasure,
    family: &[Subset],
    n_inv: u32,
) -> Result<bool, UltralabError> {
    if n_inv == 0 {
        return Err(UltralabError::ZeroInverse);
    }
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            if !family[i].inter(family[j]).is_empty() {
                return Err(UltralabError::NotDisjoint { left: i, right: j });
            }
        }
    }
    let threshold = 1.0 / n_inv as f64;
    let count = family.iter().filter(|&&a| m.mu(a) > threshold).count();
    Ok(count < n_inv as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalFamilyReport {
    pub ultrafilters: Vec<PrincipalUltrafilter>,
    pub minimal: bool,
    /// For each member B, the separator ⋃_{A≠B} (A∖B) lies in the
    /// intersection of the others but not in 𝔘_B.
    pub separators_verified: bool,
}

/// One principal ultrafilter per disjoint set (pinned at its least
/// point); the resulting collection is minimal, witnessed by explicit
/// separator sets.
pub fn minimal_family_from_disjoint_sets(
    universe: Universe,
    sets: &[Subset],
) -> Result<MinimalFamilyReport, UltralabError> {
    if sets.len() < 2 {
        return Err(UltralabError::NeedAtLeastTwo);
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(UltralabError::EmptyFamilyMember);
        }
        if !universe.contains_subset(*s) {
            return Err(UltralabError::UniverseMismatch);
        }
        for (j, other) in sets.iter().enumerate().skip(i + 1) {
            if !s.inter(*other).is_empty() {
                return Err(UltralabError::NotDisjoint { left: i, right: j });
            }
        }
    }
    let ultrafilters: Vec<PrincipalUltrafilter> = sets
        .iter()
        .map(|s| {
            PrincipalUltrafilter::new(universe, s.least_point().expect("non-empty"))
                .expect("valid point")
        })
        .collect();
    let filters: Vec<FiniteFilter> = ultrafilters
        .iter()
        .map(PrincipalUltrafilter::filter)
        .collect();
    let minimal = is_minimal(&filters)?;

    let mut separators_verified = true;
    for b in 0..sets.len() {
        let separator = sets
            .iter()
            .enumerate()
            .filter(|&(a, _)| a != b)
            .fold(Subset::EMPTY, |acc, (_, &s)| acc.union(s.minus(sets[b])));
        let others: Vec<FiniteFilter> = filters
            .iter()
            .enumerate()
            .filter(|&(a, _f)| a != b)
            .map(|(_a, f)| f.clone())
            .collect();
        separators_verified &= intersect_collection(&others)?.contains(separator);
        separators_verified &= !ultrafilters[b].contains(separator);
    }
    Ok(MinimalFamilyReport {
        ultrafilters,
        minimal,
        separators_verified,
    })
}
