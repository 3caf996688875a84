//! Exhaustive theorem sweeps on finite universes: every lattice fact the
//! library exposes, checked on every instance.
//!
//! ```bash
//! cargo run -p filterlab --example ultralab_sweeps
//! ```

use filterlab::ultralab::sweeps::{run_sweeps, SweepSelect};
use filterlab::ultralab::Universe;

fn main() {
    for n in [4u8, 5] {
        let universe = Universe::new(n).unwrap();
        let reports = run_sweeps(universe, SweepSelect::All, 10_000, 2024).unwrap();
        println!("universe {{1..{n}}}:");
        for r in &reports {
            println!(
                "  {:<30} {:>9} cases  {}",
                r.theorem_id,
                r.cases_checked,
                if r.passed() { "ok" } else { "VIOLATIONS" }
            );
            for v in &r.violations {
                println!("    !! {v}");
            }
        }
    }
}
