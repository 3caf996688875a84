//! Filter limits of real sequences along density-defined filters.
//!
//! A sequence converges to x along a filter when, for every ε, the
//! exception set { n : |x_n − x| ≥ ε } lies in the filter's ideal.
//! Against the cofinite filter this is ordinary convergence; against the
//! density filter with unit weights it is statistical convergence.
//!
//! Exception sets are built structurally whenever the sequence shape
//! allows it (constants, indicators, piecewise-constant-by-set, the
//! harmonic and alternating sequences, affine images of these), which is
//! what makes `Certified` convergence verdicts possible. Anything else
//! falls back to a scanned membership table up to a horizon and can only
//! ever produce empirical verdicts.

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::density::{
    classify_in_ideal, density_estimate, usable_checkpoints, ClassifyConfig, DensityError,
    DensityEstimate, IdealSpec, Side, Verdict,
};
use crate::num::KahanSum;
use crate::rng::{trial_seed, SplitMix64, ALGORITHM};
use crate::setexpr::{enumeration_cap, ParseError, PredicateTable, SetError, SetExpr, SetParser};
use crate::weights::WeightSeq;

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error("sequence value at {queried} is beyond the table horizon {limit}")]
    TableHorizon { limit: u64, queried: u64 },
    #[error("epsilons must be positive, finite, and strictly decreasing")]
    BadEpsilons,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("grid resolution must be positive and finite")]
    BadGrid,
    #[error("prefix length and trial count must be at least 1")]
    EmptyExperiment,
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// Structured real sequence x_1, x_2, …
#[derive(Clone, Debug, PartialEq)]
pub enum SeqExpr {
    Const(f64),
    /// 1 on the set, 0 off it.
    IndicatorOf(SetExpr),
    /// x_n = 1/n.
    Harmonic,
    /// x_n = (−1)^n.
    Alternating,
    /// scale·inner + offset, pointwise.
    Affine {
        scale: f64,
        offset: f64,
        inner: Box<SeqExpr>,
    },
    Sum(Box<SeqExpr>, Box<SeqExpr>),
    Product(Box<SeqExpr>, Box<SeqExpr>),
    /// `on` over the set, `off` elsewhere.
    PiecewiseBySet {
        set: SetExpr,
        on: Box<SeqExpr>,
        off: Box<SeqExpr>,
    },
    /// Explicit values; defined only up to the table length.
    Table(Vec<f64>),
}

impl SeqExpr {
    pub fn affine(scale: f64, offset: f64, inner: SeqExpr) -> Self {
        SeqExpr::Affine {
            scale,
            offset,
            inner: Box::new(inner),
        }
    }

    pub fn piecewise(set: SetExpr, on: SeqExpr, off: SeqExpr) -> Self {
        SeqExpr::PiecewiseBySet {
            set,
            on: Box::new(on),
            off: Box::new(off),
        }
    }

    /// Horizon beyond which evaluation fails, if any table backs the tree.
    pub fn available_horizon(&self) -> Option<u64> {
        match self {
            SeqExpr::Table(v) => Some(v.len() as u64),
            SeqExpr::IndicatorOf(s) => s.available_horizon(),
            SeqExpr::Affine { inner, .. } => inner.available_horizon(),
            SeqExpr::Sum(a, b) | SeqExpr::Product(a, b) => {
                min_opt(a.available_horizon(), b.available_horizon())
            }
            SeqExpr::PiecewiseBySet { set, on, off } => min_opt(
                set.available_horizon(),
                min_opt(on.available_horizon(), off.available_horizon()),
            ),
            _ => None,
        }
    }

    /// Ordinary (cofinite-filter) limit when the structure certifies one.
    pub fn ordinary_limit(&self) -> Option<f64> {
        match self {
            SeqExpr::Const(v) => Some(*v),
            SeqExpr::Harmonic => Some(0.0),
            SeqExpr::Alternating | SeqExpr::Table(_) => None,
            SeqExpr::IndicatorOf(s) => {
                if s.is_certified_finite() {
                    Some(0.0)
                } else if s.is_certified_cofinite() {
                    Some(1.0)
                } else {
                    None
                }
            }
            SeqExpr::Affine {
                scale,
                offset,
                inner,
            } => Some(scale * inner.ordinary_limit()? + offset),
            SeqExpr::Sum(a, b) => Some(a.ordinary_limit()? + b.ordinary_limit()?),
            SeqExpr::Product(a, b) => Some(a.ordinary_limit()? * b.ordinary_limit()?),
            SeqExpr::PiecewiseBySet { set, on, off } => {
                if set.is_certified_finite() {
                    off.ordinary_limit()
                } else if set.is_certified_cofinite() {
                    on.ordinary_limit()
                } else {
                    None
                }
            }
        }
    }
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// x_n, exactly.
pub fn eval_seq(x: &SeqExpr, n: u64) -> Result<f64, ConvergenceError> {
    if n == 0 {
        return Err(ConvergenceError::Set(SetError::ZeroNatural));
    }
    match x {
        SeqExpr::Const(v) => Ok(*v),
        SeqExpr::IndicatorOf(s) => Ok(if s.contains(n)? { 1.0 } else { 0.0 }),
        SeqExpr::Harmonic => Ok(1.0 / n as f64),
        SeqExpr::Alternating => Ok(if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
        SeqExpr::Affine {
            scale,
            offset,
            inner,
        } => Ok(scale * eval_seq(inner, n)? + offset),
        SeqExpr::Sum(a, b) => Ok(eval_seq(a, n)? + eval_seq(b, n)?),
        SeqExpr::Product(a, b) => Ok(eval_seq(a, n)? * eval_seq(b, n)?),
        SeqExpr::PiecewiseBySet { set, on, off } => {
            if set.contains(n)? {
                eval_seq(on, n)
            } else {
                eval_seq(off, n)
            }
        }
        SeqExpr::Table(v) => v
            .get(n as usize - 1)
            .copied()
            .ok_or(ConvergenceError::TableHorizon {
                limit: v.len() as u64,
                queried: n,
            }),
    }
}

/// Exception set { n : |x_n − candidate| ≥ ε } in closed structural form,
/// when the sequence shape allows one.
fn structural_exception_set(x: &SeqExpr, candidate: f64, eps: f64) -> Option<SetExpr> {
    let bad = |v: f64| (v - candidate).abs() >= eps;
    match x {
        SeqExpr::Const(v) => Some(if bad(*v) {
            SetExpr::naturals()
        } else {
            SetExpr::empty()
        }),
        SeqExpr::IndicatorOf(s) => piecewise_exception(s, 1.0, 0.0, candidate, eps),
        SeqExpr::PiecewiseBySet { set, on, off } => {
            if let (SeqExpr::Const(a), SeqExpr::Const(b)) = (on.as_ref(), off.as_ref()) {
                piecewise_exception(set, *a, *b, candidate, eps)
            } else {
                None
            }
        }
        SeqExpr::Alternating => {
            let even_bad = bad(1.0);
            let odd_bad = bad(-1.0);
            Some(match (even_bad, odd_bad) {
                (true, true) => SetExpr::naturals(),
                (true, false) => SetExpr::Arithmetic { first: 2, step: 2 },
                (false, true) => SetExpr::Arithmetic { first: 1, step: 2 },
                (false, false) => SetExpr::empty(),
            })
        }
        SeqExpr::Harmonic => Some(harmonic_exception(candidate, eps)),
        SeqExpr::Affine {
            scale,
            offset,
            inner,
        } => {
            if *scale == 0.0 {
                Some(if bad(*offset) {
                    SetExpr::naturals()
                } else {
                    SetExpr::empty()
                })
            } else {
                structural_exception_set(inner, (candidate - offset) / scale, eps / scale.abs())
            }
        }
        _ => None,
    }
}

fn piecewise_exception(
    set: &SetExpr,
    on_value: f64,
    off_value: f64,
    candidate: f64,
    eps: f64,
) -> Option<SetExpr> {
    let on_bad = (on_value - candidate).abs() >= eps;
    let off_bad = (off_value - candidate).abs() >= eps;
    Some(match (on_bad, off_bad) {
        (true, true) => SetExpr::naturals(),
        (true, false) => set.clone(),
        (false, true) => SetExpr::complement(set.clone()),
        (false, false) => SetExpr::empty(),
    })
}

/// Exceptions of 1/n against a candidate: a finite head, a cofinite tail,
/// or all of ℕ, depending on where the candidate sits. Thresholds are
/// nudged so the set agrees pointwise with the evaluation route.
fn harmonic_exception(candidate: f64, eps: f64) -> SetExpr {
    let bad = |n: u64| (1.0 / n as f64 - candidate).abs() >= eps;
    // head: n with 1/n >= candidate + eps
    let head_end = if candidate + eps <= 0.0 {
        return SetExpr::naturals();
    } else {
        let mut guess = (1.0 / (candidate + eps)).floor().max(0.0) as u64 + 2;
        while guess > 0 && (1.0 / guess as f64) < candidate + eps {
            guess -= 1;
        }
        guess // largest n with 1/n >= candidate + eps (0 when none)
    };
    // tail: n with 1/n <= candidate - eps
    if candidate - eps > 0.0 {
        let mut tail_start = (1.0 / (candidate - eps)).ceil().max(1.0) as u64;
        while !bad(tail_start) {
            tail_start += 1;
        }
        while tail_start > 1 && bad(tail_start - 1) && 1.0 / (tail_start - 1) as f64 <= candidate {
            tail_start -= 1;
        }
        // everything except the good window (head_end, tail_start)
        let goods: Vec<u64> = (head_end + 1..tail_start).collect();
        SetExpr::cofinite(goods).expect("window entries are >= 1")
    } else if head_end == 0 {
        SetExpr::empty()
    } else {
        SetExpr::finite(1..=head_end).expect("head entries are >= 1")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    ConvergesCertified,
    ConvergesEmpirical,
    DivergesEmpirical,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonOutcome {
    pub epsilon: f64,
    pub exception_set: String,
    pub structural: bool,
    pub verdict: Verdict,
}

/// Per-ε exception classification plus the aggregate verdict.
/// `ConvergesCertified` requires every exception set to be certified
/// inside the ideal.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub candidate: Option<f64>,
    pub ideal: String,
    pub epsilons: Vec<f64>,
    pub exception_density_per_epsilon: Vec<DensityEstimate>,
    pub per_epsilon: Vec<EpsilonOutcome>,
    pub verdict: LimitVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitConfig {
    /// Scan horizon for table-backed exception sets.
    pub horizon: u64,
    pub classify: ClassifyConfig,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            horizon: 1_000_000,
            classify: ClassifyConfig::default(),
        }
    }
}

/// Checks x_n → candidate along the given filter.
pub fn f_limit_check(
    x: &SeqExpr,
    candidate: f64,
    ideal: &IdealSpec,
    epsilons: &[f64],
    cfg: &LimitConfig,
) -> Result<LimitReport, ConvergenceError> {
    if epsilons.is_empty()
        || epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0))
        || epsilons.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(ConvergenceError::BadEpsilons);
    }
    let density_weights = match ideal {
        IdealSpec::Summable(s) | IdealSpec::ErdosUlam(s) => s.clone(),
        IdealSpec::Frechet => WeightSeq::Constant(1.0),
    };
    let mut per_epsilon = Vec::new();
    let mut estimates = Vec::new();
    for &eps in epsilons {
        let (exception, structural) = match structural_exception_set(x, candidate, eps) {
            Some(e) => (e, true),
            None => (scan_exception_table(x, candidate, eps, cfg.horizon)?, false),
        };
        let verdict = classify_in_ideal(ideal, &exception, &cfg.classify)?;
        let cps = usable_checkpoints(&exception, &cfg.classify.checkpoints)?;
        estimates.push(density_estimate(&density_weights, &exception, &cps)?);
        per_epsilon.push(EpsilonOutcome {
            epsilon: eps,
            exception_set: exception.to_string(),
            structural,
            verdict,
        });
    }
    let verdict = aggregate(&per_epsilon);
    Ok(LimitReport {
        candidate: Some(candidate),
        ideal: ideal.to_string(),
        epsilons: epsilons.to_vec(),
        exception_density_per_epsilon: estimates,
        per_epsilon,
        verdict,
    })
}

fn scan_exception_table(
    x: &SeqExpr,
    candidate: f64,
    eps: f64,
    horizon: u64,
) -> Result<SetExpr, ConvergenceError> {
    let mut h = horizon.max(1).min(enumeration_cap());
    if let Some(avail) = x.available_horizon() {
        h = h.min(avail);
    }
    if h == 0 {
        return Err(ConvergenceError::ZeroHorizon);
    }
    let mut bad = Vec::new();
    for n in 1..=h {
        if (eval_seq(x, n)? - candidate).abs() >= eps {
            bad.push(n);
        }
    }
    let mut bits = crate::setexpr::PrefixBitmap::empty(h);
    for n in bad {
        bits.set(n);
    }
    Ok(SetExpr::Table(PredicateTable::from_bitmap(bits)))
}

fn aggregate(per_epsilon: &[EpsilonOutcome]) -> LimitVerdict {
    if per_epsilon.iter().any(|o| o.verdict.side == Side::InGrill) {
        return LimitVerdict::DivergesEmpirical;
    }
    if per_epsilon.iter().all(|o| o.verdict.side == Side::InIdeal) {
        if per_epsilon.iter().all(|o| o.verdict.is_certified()) {
            LimitVerdict::ConvergesCertified
        } else {
            LimitVerdict::ConvergesEmpirical
        }
    } else {
        LimitVerdict::Unknown
    }
}

/// Grid scan for a statistical-limit candidate: the midpoint of the most
/// populated value bucket, provided the values outside it make up less
/// than a `grid` fraction of the prefix. Any candidate returned here
/// should still be confirmed through [`f_limit_check`].
pub fn statistical_limit_search(
    x: &SeqExpr,
    horizon: u64,
    grid: f64,
) -> Result<Option<f64>, ConvergenceError> {
    if horizon == 0 {
        return Err(ConvergenceError::ZeroHorizon);
    }
    if !(grid.is_finite() && grid > 0.0) {
        return Err(ConvergenceError::BadGrid);
    }
    let mut h = horizon.min(enumeration_cap());
    if let Some(avail) = x.available_horizon() {
        h = h.min(avail);
    }
    let values: Vec<f64> = (1..=h).map(|n| eval_seq(x, n)).collect::<Result<_, _>>()?;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if max - min < grid {
        return Ok(Some((min + max) / 2.0));
    }
    let buckets = ((max - min) / grid).ceil() as usize + 1;
    let mut counts = vec![0u64; buckets];
    for &v in &values {
        let idx = (((v - min) / grid) as usize).min(buckets - 1);
        counts[idx] += 1;
    }
    let (best_idx, &best) = counts
        .iter()
        .enumerate()
        .max_by_key(|&(_, c)| *c)
        .expect("buckets non-empty");
    let exceptions = h - best;
    if (exceptions as f64) / (h as f64) < grid {
        Ok(Some(min + (best_idx as f64 + 0.5) * grid))
    } else {
        Ok(None)
    }
}

/// Seeded coin-flip experiment: for each trial, draw a random subset of
/// \[1, n_prefix\] by fair coins and report the Cesàro mean of its
/// indicator, which concentrates at 1/2 as the prefix grows.
#[derive(Clone, Debug, Serialize)]
pub struct SllnReport {
    pub n_prefix: u64,
    pub trials: u32,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub per_trial_final_means: Vec<f64>,
    pub grand_mean: f64,
    pub max_abs_deviation_from_half: f64,
    pub rms_deviation_from_half: f64,
}

pub fn slln_experiment(
    n_prefix: u64,
    trials: u32,
    seed: u64,
) -> Result<SllnReport, ConvergenceError> {
    if n_prefix == 0 || trials == 0 {
        return Err(ConvergenceError::EmptyExperiment);
    }
    let mut per_trial_final_means = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = SplitMix64::new(trial_seed(seed, t));
        let mut count = 0u64;
        let mut remaining = n_prefix;
        while remaining >= 64 {
            count += rng.next_u64().count_ones() as u64;
            remaining -= 64;
        }
        if remaining > 0 {
            count += (rng.next_u64() & ((1u64 << remaining) - 1)).count_ones() as u64;
        }
        per_trial_final_means.push(count as f64 / n_prefix as f64);
    }
    let mut acc = KahanSum::new();
    let mut sq = KahanSum::new();
    let mut max_dev = 0.0f64;
    for &m in &per_trial_final_means {
        acc.add(m);
        let d = (m - 0.5).abs();
        sq.add(d * d);
        max_dev = max_dev.max(d);
    }
    Ok(SllnReport {
        n_prefix,
        trials,
        seed,
        rng_algorithm: ALGORITHM,
        grand_mean: acc.value() / trials as f64,
        max_abs_deviation_from_half: max_dev,
        rms_deviation_from_half: (sq.value() / trials as f64).sqrt(),
        per_trial_final_means,
    })
}

/// Parser for the sequence DSL:
/// `const(v)`, `indicator(SET)`, `harmonic`, `alt`,
/// `affine(a, b, SEQ)` (a·SEQ + b), `sum(SEQ, SEQ)`, `prod(SEQ, SEQ)`,
/// `piecewise(SET, SEQ, SEQ)`, `table(FILE)`.
/// File loading only happens when a base directory is configured.
#[derive(Debug, Default, Clone)]
pub struct SeqParser {
    pub sets: SetParser,
    pub table_dir: Option<PathBuf>,
}

impl SeqParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(&self, text: &str) -> Result<SeqExpr, ParseError> {
        self.parse_at(text.trim(), 0)
    }

    fn parse_at(&self, text: &str, base: usize) -> Result<SeqExpr, ParseError> {
        let text = text.trim();
        let err = |offset: usize, message: String| ParseError {
            offset: base + offset,
            message,
        };
        match text {
            "harmonic" => return Ok(SeqExpr::Harmonic),
            "alt" => return Ok(SeqExpr::Alternating),
            _ => {}
        }
        let open = text
            .find('(')
            .ok_or_else(|| err(0, format!("unknown sequence constructor '{text}'")))?;
        if !text.ends_with(')') {
            return Err(err(text.len(), "expected ')'".into()));
        }
        let head = &text[..open];
        let inner = &text[open + 1..text.len() - 1];
        let inner_base = base + open + 1;
        let args = split_top_level(inner);
        let float_arg = |i: usize| -> Result<f64, ParseError> {
            let (off, arg) = args[i];
            arg.trim().parse::<f64>().map_err(|_| {
                err(
                    open + 1 + off,
                    format!("expected a real number, got '{}'", arg.trim()),
                )
            })
        };
        match head {
            "const" if args.len() == 1 => Ok(SeqExpr::Const(float_arg(0)?)),
            "indicator" if args.len() == 1 => {
                let (off, arg) = args[0];
                let set = self
                    .sets
                    .parse(arg.trim())
                    .map_err(|e| err(open + 1 + off + e.offset, e.message))?;
                Ok(SeqExpr::IndicatorOf(set))
            }
            "affine" if args.len() == 3 => {
                let scale = float_arg(0)?;
                let offset = float_arg(1)?;
                let (off, arg) = args[2];
                Ok(SeqExpr::affine(
                    scale,
                    offset,
                    self.parse_at(arg, inner_base + off)?,
                ))
            }
            "sum" | "prod" if args.len() == 2 => {
                let (off_a, a) = args[0];
                let (off_b, b) = args[1];
                let left = self.parse_at(a, inner_base + off_a)?;
                let right = self.parse_at(b, inner_base + off_b)?;
                Ok(if head == "sum" {
                    SeqExpr::Sum(Box::new(left), Box::new(right))
                } else {
                    SeqExpr::Product(Box::new(left), Box::new(right))
                })
            }
            "piecewise" if args.len() == 3 => {
                let (off_s, s) = args[0];
                let set = self
                    .sets
                    .parse(s.trim())
                    .map_err(|e| err(open + 1 + off_s + e.offset, e.message))?;
                let (off_on, on) = args[1];
                let (off_off, offseq) = args[2];
                Ok(SeqExpr::piecewise(
                    set,
                    self.parse_at(on, inner_base + off_on)?,
                    self.parse_at(offseq, inner_base + off_off)?,
                ))
            }
            "table" if args.len() == 1 => {
                let dir = self.table_dir.as_ref().ok_or_else(|| {
                    err(
                        0,
                        "table(file) is only available when a table directory is set".into(),
                    )
                })?;
                let path = dir.join(args[0].1.trim());
                let content = std::fs::read_to_string(&path)
                    .map_err(|e| err(open + 1, format!("cannot read '{}': {e}", path.display())))?;
                let values: Result<Vec<f64>, _> = content
                    .split([',', ' ', '\n', '\t', '\r'])
                    .filter(|t| !t.is_empty())
                    .map(str::parse::<f64>)
                    .collect();
                match values {
                    Ok(v) if !v.is_empty() => Ok(SeqExpr::Table(v)),
                    _ => Err(err(open + 1, "table file must hold real numbers".into())),
                }
            }
            _ => Err(err(0, format!("unknown sequence constructor '{head}'"))),
        }
    }
}

/// Splits comma-separated arguments, honouring nesting in () and {}.
/// Returns (byte offset within the input, argument text) pairs.
fn split_top_level(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    if !text[start..].trim().is_empty() || !out.is_empty() {
        out.push((start, &text[start..]));
    }
    out
}

/// Parses the sequence DSL without file-backed tables.
pub fn parse_seq_expr(text: &str) -> Result<SeqExpr, ParseError> {
    SeqParser::new().parse(text)
}
