//! Finite-universe lattice walk: intersections of point ultrafilters,
//! the decomposition and partition constructions, traces, inavoidable
//! members, grills, and measure-generated filters.
//!
//! ```bash
//! cargo run -p filterlab --example ultralab_tour
//! ```

use filterlab::ultralab::{
    convex_combination, decompose_by_lemma, grill_and_ideal, inavoidability_check,
    intersect_collection, is_minimal, measure_generated_filter, minimal_family_from_disjoint_sets,
    partition_for_collection, trace_filter, FiniteMeasure, PrincipalUltrafilter, Universe,
};

fn main() {
    let u4 = Universe::new(4).unwrap();
    let uf = |p| PrincipalUltrafilter::new(u4, p).unwrap();

    // the intersection of point filters is the filter over the point set
    let meet = intersect_collection(&[uf(1).filter(), uf(2).filter()]).unwrap();
    println!("U1 ∩ U2 base: {}", meet.base()[0]);

    // a set in both filters splits into an ultrafilter part and a rest
    let d = u4.subset(&[1, 2, 3]).unwrap();
    let dec = decompose_by_lemma(d, &uf(2).filter(), &uf(1)).unwrap();
    println!(
        "decompose {{1,2,3}}: ultrafilter part {}, filter part {}, witness {} (traces agree: {})",
        dec.in_ultrafilter, dec.in_filter, dec.witness, dec.trace_claim_verified
    );

    // the recurrence covers the universe with one piece per ultrafilter
    let out = partition_for_collection(&[uf(1), uf(2)]).unwrap();
    println!(
        "partition for {{U1, U2}}: {} ⊔ {} (reconstruction verified: {:?})",
        out.parts[0], out.parts[1], out.item2_verified
    );

    // traces restrict a filter to a sub-universe
    let t = trace_filter(&meet, u4.subset(&[1, 3]).unwrap()).unwrap();
    println!(
        "trace of U1 ∩ U2 on {{1,3}}: members {:?} (ultrafilter there: {})",
        t.members()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
        t.is_ultrafilter_on_carrier()
    );

    // inavoidability: U1 appears in every representation of U1 ∩ U2
    let rep = inavoidability_check(&meet, &uf(1)).unwrap();
    println!(
        "U1 inavoidable for U1 ∩ U2: {} (witness {:?}, {} representations enumerated)",
        rep.holds,
        rep.witness.map(|w| w.to_string()),
        rep.representations_checked.unwrap_or(0)
    );

    // grill duality, both characterizations computed independently
    let gi = grill_and_ideal(&meet);
    println!(
        "ideal size {}, grill size {}, characterizations agree: {}",
        gi.ideal.len(),
        gi.grill.len(),
        gi.characterizations_agree
    );

    // measures: point masses are ultrafilter indicators, mixtures
    // generate intersections
    let m1 = FiniteMeasure::point_mass(u4, 1).unwrap();
    let m2 = FiniteMeasure::point_mass(u4, 2).unwrap();
    let mix = convex_combination(&[m1, m2], &[0.5, 0.5]).unwrap();
    let generated = measure_generated_filter(&mix).unwrap();
    println!(
        "filter of the half/half mixture equals U1 ∩ U2: {}",
        generated == meet
    );

    // minimal families from disjoint sets, with explicit separators
    let u6 = Universe::new(6).unwrap();
    let sets = [
        u6.subset(&[1, 2]).unwrap(),
        u6.subset(&[3, 4]).unwrap(),
        u6.subset(&[5, 6]).unwrap(),
    ];
    let fam = minimal_family_from_disjoint_sets(u6, &sets).unwrap();
    println!(
        "disjoint-set family: points {:?}, minimal {}, separators verified {}",
        fam.ultrafilters
            .iter()
            .map(|f| f.point())
            .collect::<Vec<_>>(),
        fam.minimal,
        fam.separators_verified
    );
    let filters: Vec<_> = fam.ultrafilters.iter().map(|f| f.filter()).collect();
    assert!(is_minimal(&filters).unwrap());
}
