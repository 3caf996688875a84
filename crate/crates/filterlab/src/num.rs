//! Small numeric helpers shared across modules.

/// Compensated (Kahan) summation accumulator.
///
/// Partial sums over long prefixes (horizons up to 10⁸) would otherwise
/// lose precision in plain f64 accumulation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Parses a natural number, accepting plain decimal ("1000000") and the
/// shorthand scientific form used on the command line ("1e6", "2.5e3").
pub fn parse_natural_u128(text: &str) -> Option<u128> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(v) = t.parse::<u128>() {
        return Some(v);
    }
    // NeM / N.DeM scientific shorthand, integral values only.
    let (mant, exp) = t.split_once(['e', 'E'])?;
    let exp: u32 = exp.parse().ok()?;
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac_part.len() as u32 > exp {
        return None; // non-integral value
    }
    let digits: String = [int_part, frac_part].concat();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let base: u128 = digits.parse().ok()?;
    let shift = exp - frac_part.len() as u32;
    base.checked_mul(10u128.checked_pow(shift)?)
}

pub fn parse_natural_u64(text: &str) -> Option<u64> {
    parse_natural_u128(text).and_then(|v| u64::try_from(v).ok())
}

/// Parses a comma-separated checkpoint list such as "1e2,1e4,1e6".
pub fn parse_checkpoints(text: &str) -> Option<Vec<u64>> {
    text.split(',')
        .map(parse_natural_u64)
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
}
