//! Exhaustive theorem sweeps over a small universe.
//!
//! Each sweep enumerates every instance of one lattice statement on the
//! given universe, re-deriving everything by brute force, and reports the
//! case count plus any violations (a non-empty violation list means an
//! implementation bug, not new mathematics).

use serde::Serialize;

use super::{
    convex_combination, grill_and_ideal, intersect_collection, measure_generated_filter,
    partition_for_collection, poorness_bound_check, representation_uniqueness_check,
    ultrafilter_membership_lemma_check, FiniteFilter, FiniteMeasure, PrincipalUltrafilter, Subset,
    UltralabError, Universe, MAX_SWEEP_N,
};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub theorem_id: String,
    pub universe_n: u8,
    pub cases_checked: u64,
    pub violations: Vec<String>,
}

impl SweepReport {
    fn new(theorem_id: &str, universe_n: u8) -> Self {
        SweepReport {
            theorem_id: theorem_id.to_string(),
            universe_n,
            cases_checked: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn guard(universe: Universe) -> Result<(), UltralabError> {
    if universe.n() > MAX_SWEEP_N {
        return Err(UltralabError::SweepTooLarge(universe.n()));
    }
    Ok(())
}

fn ultrafilters(universe: Universe) -> Vec<PrincipalUltrafilter> {
    universe
        .points()
        .map(|p| PrincipalUltrafilter::new(universe, p).expect("point in range"))
        .collect()
}

/// Non-empty sub-collections of the principal ultrafilters, as point masks.
fn collections(universe: Universe) -> impl Iterator<Item = Subset> {
    let full = universe.full().0;
    (1..=full).map(Subset)
}

/// For every collection and every choice of one member per filter, the
/// union of the picks belongs to the intersection.
pub fn sweep_union_element(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("union_element", universe.n());
    let all = ultrafilters(universe);
    for pts in collections(universe) {
        let members: Vec<&PrincipalUltrafilter> =
            all.iter().filter(|u| pts.contains(u.point())).collect();
        let filters: Vec<FiniteFilter> = members.iter().map(|u| u.filter()).collect();
        let inter = intersect_collection(&filters)?;
        // each pick ranges over the full member list of its filter
        let member_lists: Vec<Vec<Subset>> = filters.iter().map(|f| f.members()).collect();
        let mut indices = vec![0usize; member_lists.len()];
        loop {
            let union = indices
                .iter()
                .zip(&member_lists)
                .fold(Subset::EMPTY, |acc, (&i, list)| acc.union(list[i]));
            report.cases_checked += 1;
            if !inter.contains(union) {
                report.violations.push(format!(
                    "collection {pts}: union {union} escaped the intersection"
                ));
            }
            // odometer over pick indices
            let mut k = 0;
            loop {
                if k == indices.len() {
                    break;
                }
                indices[k] += 1;
                if indices[k] < member_lists[k].len() {
                    break;
                }
                indices[k] = 0;
                k += 1;
            }
            if k == indices.len() {
                break;
            }
        }
    }
    Ok(report)
}

/// Any ultrafilter containing the intersection of a collection of size
/// ≤ 4 is a member of the collection.
pub fn sweep_membership_lemma(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("ultrafilter_membership", universe.n());
    let all = ultrafilters(universe);
    for pts in collections(universe) {
        if pts.len() > 4 {
            continue;
        }
        let members: Vec<PrincipalUltrafilter> = all
            .iter()
            .filter(|u| pts.contains(u.point()))
            .copied()
            .collect();
        for candidate in &all {
            report.cases_checked += 1;
            let verdict = ultrafilter_membership_lemma_check(&members, candidate)?;
            if !verdict.holds {
                report.violations.push(format!(
                    "collection {pts}, candidate point {}: containment without membership",
                    candidate.point()
                ));
            }
        }
    }
    Ok(report)
}

/// Distinct collections have distinct intersections.
pub fn sweep_uniqueness(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let inner = representation_uniqueness_check(universe, universe.n() as usize)?;
    Ok(SweepReport {
        theorem_id: "representation_uniqueness".to_string(),
        universe_n: universe.n(),
        cases_checked: inner.pairs_checked,
        violations: inner.violations,
    })
}

/// The partition construction succeeds for every collection of ≥ 2
/// ultrafilters, and both of its claims re-verify by enumeration.
pub fn sweep_partition(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("partition_reconstruction", universe.n());
    let all = ultrafilters(universe);
    for pts in collections(universe) {
        if pts.len() < 2 {
            continue;
        }
        let members: Vec<PrincipalUltrafilter> = all
            .iter()
            .filter(|u| pts.contains(u.point()))
            .copied()
            .collect();
        report.cases_checked += 1;
        let outcome = partition_for_collection(&members)?;
        if !outcome.item1_verified {
            report
                .violations
                .push(format!("collection {pts}: cover/disjointness failed"));
        }
        if outcome.item2_verified != Some(true) {
            report
                .violations
                .push(format!("collection {pts}: reconstruction failed"));
        }
    }
    Ok(report)
}

/// A ∉ 𝔉 ⇔ Ω∖A ∈ 𝔊(𝔉), for every filter on the universe and every A;
/// also checks that shrinking a filter grows its grill.
pub fn sweep_grill_duality(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("grill_duality", universe.n());
    // every filter on a finite universe is principal over a non-empty core
    let mut grills: Vec<(Subset, Vec<Subset>)> = Vec::new();
    for core in universe.all_subsets().skip(1) {
        let f = FiniteFilter::principal(universe, core)?;
        let gi = grill_and_ideal(&f);
        if !gi.characterizations_agree {
            report
                .violations
                .push(format!("core {core}: grill characterizations disagree"));
        }
        let grill: Vec<Subset> = gi.grill.clone();
        for a in universe.all_subsets() {
            report.cases_checked += 1;
            let in_filter = f.contains(a);
            let complement_in_grill = grill.contains(&universe.complement(a));
            if in_filter == complement_in_grill {
                report
                    .violations
                    .push(format!("core {core}, set {a}: duality failed"));
            }
        }
        grills.push((core, grill));
    }
    // monotonicity: smaller filter (larger core) has larger grill
    for (c1, g1) in &grills {
        for (c2, g2) in &grills {
            if c1.is_subset_of(*c2) {
                // principal(c2) ⊆ principal(c1)
                report.cases_checked += 1;
                if !g1.iter().all(|s| g2.contains(s)) {
                    report
                        .violations
                        .push(format!("cores {c1} ⊆ {c2}: grill monotonicity failed"));
                }
            }
        }
    }
    Ok(report)
}

/// Mixing point masses with positive coefficients generates exactly the
/// intersection of the point filters; exhaustive over the support choice,
/// with two coefficient patterns per support.
pub fn sweep_convex_identity(universe: Universe) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("convex_combination_identity", universe.n());
    for pts in collections(universe) {
        let points: Vec<u8> = pts.points().collect();
        let masses: Vec<FiniteMeasure> = points
            .iter()
            .map(|&p| FiniteMeasure::point_mass(universe, p).expect("point in range"))
            .collect();
        let k = masses.len();
        let uniform = vec![1.0 / k as f64; k];
        // geometric weights 1/2, 1/4, … renormalized
        let mut geometric: Vec<f64> = (0..k).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        let total: f64 = geometric.iter().sum();
        geometric.iter_mut().for_each(|c| *c /= total);

        let filters: Vec<FiniteFilter> = points
            .iter()
            .map(|&p| {
                PrincipalUltrafilter::new(universe, p)
                    .expect("valid")
                    .filter()
            })
            .collect();
        let expected = intersect_collection(&filters)?;
        for coeffs in [uniform, geometric] {
            report.cases_checked += 1;
            let mix = convex_combination(&masses, &coeffs)?;
            let generated = measure_generated_filter(&mix)?;
            if generated != expected {
                report.violations.push(format!(
                    "support {pts}: generated filter disagrees with the intersection"
                ));
            }
        }
    }
    Ok(report)
}

/// Randomized sweep of the counting bound: among pairwise disjoint sets,
/// fewer than n can carry measure above 1/n.
pub fn sweep_poorness_bound(
    universe: Universe,
    cases: u64,
    seed: u64,
) -> Result<SweepReport, UltralabError> {
    guard(universe)?;
    let mut report = SweepReport::new("poorness_counting_bound", universe.n());
    let n = universe.n() as usize;
    let mut rng = SplitMix64::new(seed);
    for case in 0..cases {
        // random weights, normalized
        let mut weights: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            weights = vec![1.0 / n as f64; n];
        } else {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        let measure = FiniteMeasure::new(universe, weights)
            .map_err(|e| UltralabError::BadMeasure(e.to_string()))?;
        // random disjoint family: each point joins one of up to n cells, or none
        let cells = 1 + rng.next_below(n as u64) as usize;
        let mut family = vec![Subset::EMPTY; cells];
        for p in universe.points() {
            let slot = rng.next_below(cells as u64 + 1) as usize;
            if slot < cells {
                family[slot] = family[slot].union(universe.singleton(p)?);
            }
        }
        family.retain(|s| !s.is_empty());
        let n_inv = 1 + rng.next_below(10) as u32;
        report.cases_checked += 1;
        if !poorness_bound_check(&measure, &family, n_inv)? {
            report
                .violations
                .push(format!("case {case}: counting bound failed"));
        }
    }
    Ok(report)
}

/// Which sweeps to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepSelect {
    All,
    UnionElement,
    Membership,
    Uniqueness,
    Partition,
    GrillDuality,
    ConvexIdentity,
    PoornessBound,
}

impl SweepSelect {
    pub fn parse(text: &str) -> Option<Self> {
        Some(match text {
            "all" => SweepSelect::All,
            "union" | "union_element" => SweepSelect::UnionElement,
            "membership" | "ultrafilter_membership" => SweepSelect::Membership,
            "uniqueness" | "representation_uniqueness" => SweepSelect::Uniqueness,
            "partition" | "partition_reconstruction" => SweepSelect::Partition,
            "grill" | "grill_duality" => SweepSelect::GrillDuality,
            "remark_convex" | "convex" | "convex_combination_identity" => {
                SweepSelect::ConvexIdentity
            }
            "poorness" | "poorness_counting_bound" => SweepSelect::PoornessBound,
            _ => return None,
        })
    }
}

/// Runs the selected sweeps; `poorness_cases` and `seed` only affect the
/// randomized counting-bound sweep.
pub fn run_sweeps(
    universe: Universe,
    select: SweepSelect,
    poorness_cases: u64,
    seed: u64,
) -> Result<Vec<SweepReport>, UltralabError> {
    let mut reports = Vec::new();
    let want = |s: SweepSelect| select == SweepSelect::All || select == s;
    if want(SweepSelect::UnionElement) {
        reports.push(sweep_union_element(universe)?);
    }
    if want(SweepSelect::Membership) {
        reports.push(sweep_membership_lemma(universe)?);
    }
    if want(SweepSelect::Uniqueness) {
        reports.push(sweep_uniqueness(universe)?);
    }
    if want(SweepSelect::Partition) {
        reports.push(sweep_partition(universe)?);
    }
    if want(SweepSelect::GrillDuality) {
        reports.push(sweep_grill_duality(universe)?);
    }
    if want(SweepSelect::ConvexIdentity) {
        reports.push(sweep_convex_identity(universe)?);
    }
    if want(SweepSelect::PoornessBound) {
        reports.push(sweep_poorness_bound(universe, poorness_cases, seed)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_sweeps_pass_at_n4() {
        let u = Universe::new(4).unwrap();
        let reports = run_sweeps(u, SweepSelect::All, 500, 13).unwrap();
        assert_eq!(reports.len(), 7);
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", r.theorem_id, r.violations);
            assert!(r.cases_checked > 0);
        }
    }

    #[test]
    fn sweeps_refuse_large_universes() {
        let u = Universe::new(8).unwrap();
        assert!(matches!(
            sweep_union_element(u),
            Err(UltralabError::SweepTooLarge(8))
        ));
    }

    #[test]
    fn select_parsing() {
        assert_eq!(SweepSelect::parse("all"), Some(SweepSelect::All));
        assert_eq!(
            SweepSelect::parse("uniqueness"),
            Some(SweepSelect::Uniqueness)
        );
        assert_eq!(SweepSelect::parse("grill"), Some(SweepSelect::GrillDuality));
        assert_eq!(SweepSelect::parse("nope"), None);
    }
}
