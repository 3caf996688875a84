//! Filter limits: ordinary convergence, statistical convergence, and the
//! grid search for limit candidates.
//!
//! ```bash
//! cargo run -p filterlab --example statistical_convergence
//! ```

use filterlab::convergence::{
    f_limit_check, parse_seq_expr, statistical_limit_search, LimitConfig,
};
use filterlab::density::parse_ideal_spec;

fn main() {
    let cfg = LimitConfig::default();

    // the indicator of the squares converges statistically to 0: its
    // exception set is the squares themselves, certified density zero
    let x = parse_seq_expr("piecewise(squares, const(1), const(0))").unwrap();
    let statistical = parse_ideal_spec("eu:constant(1)").unwrap();
    let report = f_limit_check(&x, 0.0, &statistical, &[0.5], &cfg).unwrap();
    println!(
        "indicator(squares) -> 0 statistically: {:?}",
        report.verdict
    );
    println!(
        "  exception set {}, density exact {:?}",
        report.per_epsilon[0].exception_set, report.exception_density_per_epsilon[0].exact
    );

    // ...but NOT along the cofinite filter: the exception set is infinite
    let frechet = parse_ideal_spec("frechet").unwrap();
    let report = f_limit_check(&x, 0.0, &frechet, &[0.5], &cfg).unwrap();
    println!(
        "indicator(squares) -> 0 ordinarily:    {:?}",
        report.verdict
    );

    // ordinary convergence passes every filter with the same limit
    let harmonic = parse_seq_expr("harmonic").unwrap();
    for spec in ["frechet", "summable:harmonic", "eu:constant(1)"] {
        let ideal = parse_ideal_spec(spec).unwrap();
        let report = f_limit_check(&harmonic, 0.0, &ideal, &[0.01], &cfg).unwrap();
        println!("harmonic -> 0 along {spec}: {:?}", report.verdict);
    }

    // the alternating sequence has no statistical limit at 1: the odd
    // numbers form an exception set of density 1/2
    let alt = parse_seq_expr("alt").unwrap();
    let report = f_limit_check(&alt, 1.0, &statistical, &[0.5], &cfg).unwrap();
    println!(
        "alt -> 1 statistically: {:?} (exceptions {})",
        report.verdict, report.per_epsilon[0].exception_set
    );

    // grid search proposes a candidate, then the check confirms it
    let y = parse_seq_expr("piecewise(squares, const(7), const(3))").unwrap();
    let candidate = statistical_limit_search(&y, 10_000, 0.05).unwrap();
    println!("\nsearch over piecewise(squares, 7, 3): candidate {candidate:?}");
    if let Some(c) = candidate {
        let confirm = f_limit_check(&y, c, &statistical, &[0.5], &cfg).unwrap();
        println!("confirmation at {c}: {:?}", confirm.verdict);
    }
    let none = statistical_limit_search(&alt, 10_000, 0.05).unwrap();
    println!("search over alt: {none:?} (no density-1 concentration)");
}
