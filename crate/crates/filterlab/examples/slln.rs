//! Seeded Monte-Carlo experiment: Cesàro means of random indicator
//! sequences concentrate at 1/2, and the spread shrinks like 1/√n.
//!
//! ```bash
//! cargo run -p filterlab --example slln
//! ```

use filterlab::convergence::slln_experiment;

fn main() {
    let seed = 7;
    println!("seed {seed}, 100 trials per prefix length\n");
    println!(
        "{:>10} {:>12} {:>12} {:>12}",
        "n", "grand mean", "rms dev", "max dev"
    );
    let mut previous_rms = None;
    for n in [1_000u64, 10_000, 100_000] {
        let r = slln_experiment(n, 100, seed).unwrap();
        println!(
            "{:>10} {:>12.6} {:>12.6} {:>12.6}",
            n, r.grand_mean, r.rms_deviation_from_half, r.max_abs_deviation_from_half
        );
        if let Some(prev) = previous_rms {
            println!(
                "{:>10} rms shrink factor {:.2} (≈ √10 per decade)",
                "",
                prev / r.rms_deviation_from_half
            );
        }
        previous_rms = Some(r.rms_deviation_from_half);
    }

    // determinism: the same seed reproduces every trial bit for bit
    let a = slln_experiment(10_000, 3, 42).unwrap();
    let b = slln_experiment(10_000, 3, 42).unwrap();
    assert_eq!(a.per_trial_final_means, b.per_trial_final_means);
    println!(
        "\nrng: {} — identical seeds give identical trials",
        a.rng_algorithm
    );
}
