//! Greedy block-partition witnesses: singleton blocks for the cofinite
//! filter, weight-sum blocks for summable filters, and majority-ratio
//! blocks for density filters.
//!
//! ```bash
//! cargo run -p filterlab --example witness_blocks
//! ```

use filterlab::weights::WeightSeq;
use filterlab::witness::{erdos_ulam_blocks, frechet_blocks, summable_blocks};

fn main() {
    // trivial witness: one number per block
    let bp = frechet_blocks(5).unwrap();
    println!("singleton blocks: cuts {:?}", bp.cuts);

    // summable construction: greedy-least cuts with block sums >= 1
    let bp = summable_blocks(&WeightSeq::Harmonic, 8, u128::MAX).unwrap();
    println!("\nharmonic summable blocks:");
    for n in 1..=bp.block_count() {
        let (lo, hi) = bp.block_bounds(n).unwrap();
        println!(
            "  block {n}: ({lo}, {hi}] sum {:.6}",
            bp.certificates[n - 1]
        );
    }
    // the cuts grow like e^n: deep witnesses leave u64 range quickly
    let deep = summable_blocks(&WeightSeq::Harmonic, 50, u128::MAX).unwrap();
    println!(
        "block 50 ends at {} (~10^{})",
        deep.last_cut(),
        deep.last_cut().to_string().len() - 1
    );

    // density construction: each block outweighs everything before it
    let bp = erdos_ulam_blocks(&WeightSeq::Constant(1.0), 6, 1 << 30).unwrap();
    println!("\nunit-weight density blocks: cuts {:?}", bp.cuts);
    println!("ratios: {:?}", bp.certificates);

    // partitions serialize to JSON and load back (usable as blockunion
    // references in the set DSL)
    let json = bp.to_json();
    println!("\nJSON: {json}");

    // a cap that is too small returns the partial partition inside the error
    match summable_blocks(&WeightSeq::Harmonic, 10, 100) {
        Err(filterlab::witness::WitnessError::CapExceeded { built, partial, .. }) => {
            println!(
                "\ncap of 100 allowed only {built} blocks: cuts {:?}",
                partial.cuts
            );
        }
        other => panic!("expected the cap to bite, got {other:?}"),
    }
}
