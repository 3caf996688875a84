//! Tour of the set DSL: parsing, exact membership, prefix algebra, and
//! almost-disjointness reports.
//!
//! ```bash
//! cargo run -p filterlab --example set_dsl
//! ```

use filterlab::setexpr::{almost_disjoint_report, intersection_count_upto, parse_set_expr};

fn main() {
    // every structured set parses from a small text form
    let evens = parse_set_expr("arith(2,2)").unwrap();
    let non_squares = parse_set_expr("diff(cofinite{}, squares)").unwrap();
    let mixed = parse_set_expr("union(finite{1,2}, shift(squares, 1))").unwrap();

    println!(
        "evens up to 20:       {:?}",
        evens.members_upto(20).unwrap().members
    );
    println!(
        "non-squares up to 20: {:?}",
        non_squares.members_upto(20).unwrap().members
    );
    println!(
        "mixed up to 20:       {:?}",
        mixed.members_upto(20).unwrap().members
    );

    // membership is exact and structural
    println!(
        "\n49 square? {:?}",
        parse_set_expr("squares").unwrap().contains(49).unwrap()
    );
    println!(
        "50 in squares+1? {:?}",
        parse_set_expr("shift(squares,1)")
            .unwrap()
            .contains(50)
            .unwrap()
    );

    // tables refuse questions they cannot answer instead of guessing
    let primes = parse_set_expr("primes").unwrap();
    println!(
        "\nprimes up to 20: {:?}",
        primes.members_upto(20).unwrap().members
    );

    // prefix-level intersection counts
    let squares = parse_set_expr("squares").unwrap();
    println!(
        "\neven squares up to 100: {}",
        intersection_count_upto(&squares, &evens, 100).unwrap()
    );

    // structural almost-disjointness: parity classes never meet
    let odds = parse_set_expr("arith(1,2)").unwrap();
    let report = almost_disjoint_report(&odds, &evens, 10_000).unwrap();
    println!("\nodds vs evens: {report:?}");

    // the same progression twice is inconclusive (it is its own infinite
    // intersection), and the report says so
    let report = almost_disjoint_report(&squares, &squares, 10_000).unwrap();
    println!("squares vs squares: {report:?}");

    // round trip: the printed form re-parses to the same AST
    let printed = mixed.to_string();
    println!("\nprinted: {printed}");
    assert_eq!(parse_set_expr(&printed).unwrap(), mixed);
}
