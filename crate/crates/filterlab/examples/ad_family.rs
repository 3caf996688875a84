//! The binary-tree almost-disjoint family: one infinite set per bit
//! stream, any two of which intersect in exactly their common prefix.
//!
//! ```bash
//! cargo run -p filterlab --example ad_family
//! ```

use filterlab::setexpr::almost_disjoint_report;
use filterlab::witness::{ad_branch, ad_family_member, ad_family_pairwise_check, BitPattern};

fn main() {
    // prefix codes: bits b_1..b_m encode to 2^m + value(b)
    let zeros = BitPattern::constant(false);
    let ones = BitPattern::constant(true);
    println!(
        "codes of 0,00,000: {:?}",
        ad_family_member(&zeros, 3)
            .unwrap()
            .members_upto(10)
            .unwrap()
            .members
    );
    println!(
        "codes of 1,11:     {:?}",
        ad_family_member(&ones, 2)
            .unwrap()
            .members_upto(10)
            .unwrap()
            .members
    );

    // two branches differing first at position 3 share exactly 2 codes
    let p010 = BitPattern::from_bits_then_zeros(&[false, true, false]);
    let p011 = BitPattern::from_bits_then_zeros(&[false, true, true]);
    let report = almost_disjoint_report(&ad_branch(&p010), &ad_branch(&p011), 1_000_000).unwrap();
    println!("\nbranch(010...) vs branch(011...): {report:?}");

    // the unbounded variant keeps producing codes forever
    let alternating = BitPattern::new(vec![], vec![false, true]).unwrap();
    let branch = ad_branch(&alternating);
    println!(
        "\nalternating-stream branch up to 10^6: {:?}",
        branch.members_upto(1_000_000).unwrap().members
    );

    // pairwise intersection sizes equal common-prefix lengths, exhaustively
    let depth = 4;
    let params: Vec<BitPattern> = (0u32..16)
        .map(|v| {
            let bits: Vec<bool> = (0..depth).map(|i| v >> (depth - 1 - i) & 1 == 1).collect();
            BitPattern::from_bits_then_zeros(&bits)
        })
        .collect();
    let matrix = ad_family_pairwise_check(&params, depth as u32).unwrap();
    println!("\npairwise common-prefix matrix at depth {depth}:");
    for row in &matrix {
        println!("  {row:?}");
    }
}
