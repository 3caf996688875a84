//! Ideal/grill membership verdicts for the three implemented filters,
//! with their certification status and evidence.
//!
//! ```bash
//! cargo run -p filterlab --example classify_ideals
//! ```

use filterlab::density::{
    classify_erdos_ulam, classify_frechet, classify_in_ideal, classify_summable, parse_ideal_spec,
    ClassifyConfig,
};
use filterlab::setexpr::parse_set_expr;
use filterlab::weights::WeightSeq;

fn main() {
    let finite = parse_set_expr("finite{1,2,3}").unwrap();
    let progression = parse_set_expr("arith(1,3)").unwrap();
    let squares = parse_set_expr("squares").unwrap();

    // cofinite filter: decidable exactly when the structure knows the tail
    println!("== cofinite filter ==");
    for (name, set) in [("finite{1,2,3}", &finite), ("arith(1,3)", &progression)] {
        let v = classify_frechet(set);
        println!(
            "{name}: {:?} ({:?}) — {}",
            v.side, v.certainty, v.evidence.reason
        );
    }

    // summable ideal: convergence/divergence certificates where possible
    println!("\n== summable ideal, harmonic weights ==");
    for (name, set) in [
        ("squares", &squares),
        ("cofinite{}", &parse_set_expr("cofinite{}").unwrap()),
    ] {
        let v = classify_summable(&WeightSeq::Harmonic, set, 1_000_000).unwrap();
        println!(
            "{name}: {:?} ({:?}) — {}",
            v.side, v.certainty, v.evidence.reason
        );
    }
    // no certificate either way: honest heuristic with the scan evidence
    let primes = parse_set_expr("primes").unwrap();
    let v = classify_summable(&WeightSeq::Harmonic, &primes, 1_000_000).unwrap();
    println!(
        "primes: {:?} ({:?}) — partial sum {:.4} at horizon {}",
        v.side,
        v.certainty,
        v.evidence.partial_sum.unwrap(),
        v.evidence.horizon.unwrap()
    );

    // weighted-density ideal
    println!("\n== density ideal, unit weights ==");
    let evens = parse_set_expr("arith(2,2)").unwrap();
    for (name, set) in [("arith(2,2)", &evens), ("squares", &squares)] {
        let v = classify_erdos_ulam(&WeightSeq::Constant(1.0), set, &[10_000, 1_000_000], 0.01)
            .unwrap();
        println!(
            "{name}: {:?} ({:?}) — {}",
            v.side, v.certainty, v.evidence.reason
        );
    }

    // the ideal-spec strings used across the command line
    println!("\n== via ideal specs ==");
    let cfg = ClassifyConfig::default();
    for spec in ["frechet", "summable:harmonic", "eu:constant(1)"] {
        let ideal = parse_ideal_spec(spec).unwrap();
        let v = classify_in_ideal(&ideal, &squares, &cfg).unwrap();
        println!("squares against {spec}: {:?} ({:?})", v.side, v.certainty);
    }
}
