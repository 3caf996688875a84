//! Process-wide incremental prime sieve.
//!
//! The sieve grows geometrically on demand and is shared behind a mutex,
//! so concurrent set evaluations reuse one table.

use std::sync::Mutex;

struct Sieve {
    limit: u64,
    // bit k set ⇔ k is composite (indices 0 and 1 forced non-prime)
    composite: Vec<u64>,
}

impl Sieve {
    fn new() -> Self {
        let mut s = Sieve {
            limit: 0,
            composite: Vec::new(),
        };
        s.grow(1 << 10);
        s
    }

    fn grow(&mut self, want: u64) {
        if want <= self.limit {
            return;
        }
        let limit = want.max(self.limit * 2).max(1 << 10);
        let words = (limit as usize + 1) / 64 + 1;
        let mut composite = vec![0u64; words];
        let mark = |bits: &mut [u64], k: u64| bits[(k / 64) as usize] |= 1 << (k % 64);
        mark(&mut composite, 0);
        mark(&mut composite, 1);
        let mut p = 2u64;
        while p * p <= limit {
            if composite[(p / 64) as usize] >> (p % 64) & 1 == 0 {
                let mut q = p * p;
                while q <= limit {
                    mark(&mut composite, q);
                    q += p;
                }
            }
            p += 1;
        }
        self.limit = limit;
        self.composite = composite;
    }

    fn is_prime(&mut self, n: u64) -> bool {
        self.grow(n);
        self.composite[(n / 64) as usize] >> (n % 64) & 1 == 0
    }
}

static SIEVE: Mutex<Option<Sieve>> = Mutex::new(None);

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut guard = SIEVE.lock().unwrap();
    guard.get_or_insert_with(Sieve::new).is_prime(n)
}

/// Calls `f` for every prime ≤ horizon, in increasing order.
pub fn for_each_prime_upto(horizon: u64, mut f: impl FnMut(u64)) {
    let mut guard = SIEVE.lock().unwrap();
    let sieve = guard.get_or_insert_with(Sieve::new);
    sieve.grow(horizon);
    for n in 2..=horizon {
        if sieve.composite[(n / 64) as usize] >> (n % 64) & 1 == 0 {
            f(n);
        }
    }
}
