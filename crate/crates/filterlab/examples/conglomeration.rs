//! Conglomeration in action: select blocks along an infinite index set
//! and verify the union lands in the grill — with recomputed
//! certificates, never trusted ones.
//!
//! ```bash
//! cargo run -p filterlab --example conglomeration
//! ```

use filterlab::density::IdealSpec;
use filterlab::setexpr::{parse_set_expr, SetParser};
use filterlab::weights::WeightSeq;
use filterlab::witness::{
    ad_branch, erdos_ulam_blocks, summable_blocks, union_over_index, verify_conglomeration,
    BitPattern,
};

fn main() {
    let harmonic = WeightSeq::Harmonic;
    let ones = WeightSeq::Constant(1.0);

    let summable_bp = summable_blocks(&harmonic, 30, u128::MAX).unwrap();
    let eu_bp = erdos_ulam_blocks(&ones, 20, 1 << 24).unwrap();

    // infinite structured index sets certify; a finite one fails
    let index_sets = [
        ("squares", parse_set_expr("squares").unwrap()),
        ("arith(3,7)", parse_set_expr("arith(3,7)").unwrap()),
        ("adbranch(;0)", ad_branch(&BitPattern::constant(false))),
        ("finite{2,5}", parse_set_expr("finite{2,5}").unwrap()),
    ];
    for (name, index) in &index_sets {
        let r = verify_conglomeration(
            &summable_bp,
            &IdealSpec::Summable(harmonic.clone()),
            index,
            1_000_000,
        )
        .unwrap();
        println!("summable witness over {name}: {:?}", r.conclusion);
        let r = verify_conglomeration(&eu_bp, &IdealSpec::ErdosUlam(ones.clone()), index, 1 << 20)
            .unwrap();
        println!("density  witness over {name}: {:?}", r.conclusion);
    }

    // the union itself is an ordinary set expression
    let union = union_over_index(&eu_bp, &parse_set_expr("arith(1,2)").unwrap());
    println!(
        "\nunion over odd blocks, members up to 40: {:?}",
        union.members_upto(40).unwrap().members
    );

    // and partitions can be named and referenced from the DSL
    let mut parser = SetParser::new();
    parser.register_blocks("eu", eu_bp.clone());
    let via_dsl = parser.parse("blockunion(eu, arith(1,2))").unwrap();
    assert_eq!(
        via_dsl.members_upto(40).unwrap().members,
        union.members_upto(40).unwrap().members
    );
    println!("blockunion(eu, arith(1,2)) parses and agrees");

    // the certificates in a report are re-derived from the weights
    let r = verify_conglomeration(
        &eu_bp,
        &IdealSpec::ErdosUlam(ones.clone()),
        &parse_set_expr("arith(1,2)").unwrap(),
        1 << 20,
    )
    .unwrap();
    println!(
        "\nselected blocks {:?}\nfirst ratios {:?}\nempirical consistent: {}",
        &r.selected_indices[..6.min(r.selected_indices.len())],
        &r.certificate_per_selected_block[..4.min(r.certificate_per_selected_block.len())],
        r.empirical.as_ref().map(|e| e.consistent).unwrap_or(false),
    );
}
