//! Weighted prefix densities: ratios, checkpoint estimates, exact values.
//!
//! ```bash
//! cargo run -p filterlab --example density_basics
//! ```

use filterlab::density::{
    density_estimate, erdos_ulam_normalization_advisory, weighted_prefix_ratio,
};
use filterlab::setexpr::parse_set_expr;
use filterlab::weights::{parse_weight_seq, WeightSeq};

fn main() {
    let evens = parse_set_expr("arith(2,2)").unwrap();
    let squares = parse_set_expr("squares").unwrap();
    let ones = WeightSeq::Constant(1.0);

    // half of every prefix is even
    let r = weighted_prefix_ratio(&ones, &evens, 10).unwrap();
    println!("count ratio of evens at 10: {r}");

    // harmonic weights skew mass toward small numbers
    let first = parse_set_expr("finite{1}").unwrap();
    let r = weighted_prefix_ratio(&WeightSeq::Harmonic, &first, 4).unwrap();
    println!("harmonic mass of {{1}} within [1,4]: {r} (= 12/25)");

    // checkpoint trajectories with exact values where structure decides
    let est = density_estimate(&ones, &evens, &[100, 10_000, 1_000_000]).unwrap();
    println!(
        "\nevens: ratios {:?} exact {:?}",
        est.ratios_at_checkpoints, est.exact
    );

    let est = density_estimate(&ones, &squares, &[10_000, 1_000_000]).unwrap();
    println!(
        "squares: ratios {:?} exact {:?}",
        est.ratios_at_checkpoints, est.exact
    );

    // density responds to the weight sequence, not just to counting
    let powerlaw = parse_weight_seq("powerlaw(0.5)").unwrap();
    let est = density_estimate(&powerlaw, &evens, &[10_000, 1_000_000]).unwrap();
    println!(
        "evens under powerlaw(0.5): last ratio {:.6}, exact {:?}",
        est.ratios_at_checkpoints.last().unwrap().1,
        est.exact
    );

    // the optional normalization condition s_k / S(k) -> 0, as an advisory
    let adv = erdos_ulam_normalization_advisory(&WeightSeq::Harmonic, 1_000_000).unwrap();
    println!(
        "\nnormalization advisory for harmonic weights: vanishing={} (max tail ratio {:.2e})",
        adv.vanishing_empirically, adv.max_ratio_in_tail
    );
}
