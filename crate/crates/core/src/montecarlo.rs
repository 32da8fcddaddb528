//! Replicated simulation of the rare-edge statistics.
//!
//! Every replica draws from its own counter-based stream, so results are a
//! pure function of `(parameters, master_seed)`. Aggregates are integer sums,
//! which makes them independent of how rayon splits the work.
//!
//! Thresholds `a (ln n)^2` use the natural logarithm and a strict inequality.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{precondition, Result};
use crate::rng::ReplicaStream;
use crate::walk::EdgeLedger;

/// Steps packed 64 to a word: bit `i` set means step `i` goes up.
pub trait StepSource {
    fn next_word(&mut self) -> u64;
}

/// Fair coin flips from a replica stream.
#[derive(Clone, Debug)]
pub struct FairSteps(ReplicaStream);

impl FairSteps {
    pub fn new(master_seed: u64, replica: u64) -> Self {
        Self(ReplicaStream::new(master_seed, replica))
    }
}

impl StepSource for FairSteps {
    #[inline]
    fn next_word(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// Up-steps with probability `p`, one 64-bit draw per step.
#[derive(Clone, Debug)]
pub struct BiasedSteps {
    stream: ReplicaStream,
    p: f64,
}

impl BiasedSteps {
    pub fn new(master_seed: u64, replica: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return precondition("BiasedSteps::new", format!("p = {p} is not in [0, 1]"));
        }
        Ok(Self {
            stream: ReplicaStream::new(master_seed, replica),
            p,
        })
    }
}

impl StepSource for BiasedSteps {
    fn next_word(&mut self) -> u64 {
        if self.p >= 1.0 {
            return u64::MAX;
        }
        if self.p <= 0.0 {
            return 0;
        }
        let mut w = 0;
        for i in 0..64 {
            if self.stream.next_f64() < self.p {
                w |= 1 << i;
            }
        }
        w
    }
}

/// A fixed step sequence, repeated cyclically.
#[derive(Clone, Debug)]
pub struct ForcedSteps {
    up: Vec<bool>,
    at: usize,
}

impl ForcedSteps {
    pub fn new(steps: &[i8]) -> Result<Self> {
        if steps.is_empty() || steps.iter().any(|&s| s != 1 && s != -1) {
            return precondition("ForcedSteps::new", "steps must be a nonempty sequence of +-1");
        }
        Ok(Self {
            up: steps.iter().map(|&s| s == 1).collect(),
            at: 0,
        })
    }
}

impl StepSource for ForcedSteps {
    fn next_word(&mut self) -> u64 {
        let mut w = 0;
        for i in 0..64 {
            if self.up[self.at] {
                w |= 1 << i;
            }
            self.at = (self.at + 1) % self.up.len();
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicaSummary {
    pub alpha: u64,
    pub alpha_plus: u64,
    pub alpha_minus: u64,
    pub f1: u64,
    pub terminal_position: i64,
    /// `(n, alpha(n))` at the requested checkpoints.
    pub checkpoint_values: Option<Vec<(u64, u64)>>,
}

/// Runs `n` steps from the origin into `ledger` (cleared first) and returns
/// the terminal position.
///
/// Hot loop: the ledger is grown once per 64-step word so the per-step work
/// is an index update and one increment.
fn run_steps<S: StepSource + ?Sized>(ledger: &mut EdgeLedger, n: u64, src: &mut S) -> i64 {
    ledger.clear();
    let mut pos: i64 = 0;
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    let mut left = n;
    while left > 0 {
        let take = left.min(64);
        ledger.ensure_keys(pos - 64, pos + 63);
        let (counts, base) = ledger.raw();
        let start = (pos - base) as usize;
        let mut i = start;
        let mut w = src.next_word();
        for _ in 0..take {
            let up = (w & 1) as usize;
            w >>= 1;
            // Edge key is `pos` going up and `pos - 1` going down.
            let e = i + up - 1;
            counts[e] += 1;
            i = e + up;
        }
        lo = lo.min(pos - take as i64);
        hi = hi.max(pos + take as i64 - 1);
        pos = base + i as i64;
        left -= take;
        ledger.set_touched(lo, hi, n - left);
    }
    pos
}

fn summarize(ledger: &mut EdgeLedger, terminal: i64) -> ReplicaSummary {
    let rare = ledger.rescan();
    ReplicaSummary {
        alpha: rare.alpha,
        alpha_plus: rare.alpha_plus,
        alpha_minus: rare.alpha_minus,
        f1: ledger.sites_visited_once(0, terminal),
        terminal_position: terminal,
        checkpoint_values: None,
    }
}

fn simulate_into<S: StepSource + ?Sized>(
    ledger: &mut EdgeLedger,
    n: u64,
    src: &mut S,
    spot_check: bool,
) -> ReplicaSummary {
    let terminal = run_steps(ledger, n, src);
    let s = summarize(ledger, terminal);
    if cfg!(debug_assertions) && spot_check {
        let bad = ledger.invariant_violations(0, terminal);
        debug_assert!(bad.is_empty(), "ledger invariants violated: {bad:?}");
    }
    s
}

/// One walk of `n` steps from the origin.
pub fn simulate_replica<S: StepSource + ?Sized>(n: u64, src: &mut S) -> ReplicaSummary {
    simulate_into(&mut EdgeLedger::with_capacity(256), n, src, true)
}

/// Like [`simulate_replica`], also recording `alpha` at each checkpoint
/// `n_i <= n` (in the given order).
pub fn simulate_replica_with_checkpoints<S: StepSource + ?Sized>(
    n: u64,
    src: &mut S,
    checkpoints: &[u64],
) -> ReplicaSummary {
    let mut ledger = EdgeLedger::with_capacity(256);
    let mut want: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= n).collect();
    want.sort_unstable();
    let mut values = Vec::with_capacity(want.len());
    let mut next = want.iter().peekable();
    while next.peek() == Some(&&0) {
        values.push((0, 0));
        next.next();
    }
    let mut pos = 0i64;
    let mut t = 0u64;
    while t < n {
        let mut w = src.next_word();
        for _ in 0..(n - t).min(64) {
            let to = pos + if w & 1 == 1 { 1 } else { -1 };
            w >>= 1;
            ledger.extend(pos, to).expect("unit step");
            pos = to;
            t += 1;
            while next.peek() == Some(&&t) {
                values.push((t, ledger.alpha()));
                next.next();
            }
        }
    }
    let mut s = summarize(&mut ledger, pos);
    s.checkpoint_values = Some(values);
    s
}

/// Integer sums over replicas: exact, associative, order-free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Sums {
    count: u64,
    alpha: u128,
    alpha_sq: u128,
    alpha_plus: u128,
    alpha_minus: u128,
    plus_side: u64,
    minus_side: u64,
    f1: u128,
    f1_sq: u128,
    hits: u64,
}

impl Sums {
    fn add(&mut self, s: &ReplicaSummary, threshold: f64) {
        self.count += 1;
        self.alpha += s.alpha as u128;
        self.alpha_sq += (s.alpha as u128) * (s.alpha as u128);
        self.alpha_plus += s.alpha_plus as u128;
        self.alpha_minus += s.alpha_minus as u128;
        self.plus_side += (s.alpha_plus > 0) as u64;
        self.minus_side += (s.alpha_minus > 0) as u64;
        self.f1 += s.f1 as u128;
        self.f1_sq += (s.f1 as u128) * (s.f1 as u128);
        self.hits += (s.alpha as f64 > threshold) as u64;
    }

    fn merge(mut self, o: Self) -> Self {
        self.count += o.count;
        self.alpha += o.alpha;
        self.alpha_sq += o.alpha_sq;
        self.alpha_plus += o.alpha_plus;
        self.alpha_minus += o.alpha_minus;
        self.plus_side += o.plus_side;
        self.minus_side += o.minus_side;
        self.f1 += o.f1;
        self.f1_sq += o.f1_sq;
        self.hits += o.hits;
        self
    }
}

/// Mean and standard error from integer sums.
fn mean_se(count: u64, sum: u128, sum_sq: u128) -> (f64, f64) {
    let r = count as f64;
    let mean = sum as f64 / r;
    if count < 2 {
        return (mean, 0.0);
    }
    // count * sum_sq - sum^2 is exact in integers (and >= 0).
    let c = count as u128;
    let spread = c
        .checked_mul(sum_sq)
        .and_then(|x| x.checked_sub(sum * sum))
        .map(|x| x as f64)
        .unwrap_or_else(|| (sum_sq as f64 - (sum as f64) * mean).max(0.0) * r);
    let var = spread / (r * (r - 1.0));
    (mean, (var / r).sqrt())
}

fn replicate<F, S>(n: u64, replicas: u64, threshold: f64, source: F) -> Sums
where
    F: Fn(u64) -> S + Sync,
    S: StepSource,
{
    (0..replicas)
        .into_par_iter()
        .fold(
            || (EdgeLedger::with_capacity(1024), Sums::default()),
            |(mut ledger, mut acc), i| {
                let mut src = source(i);
                let s = simulate_into(&mut ledger, n, &mut src, i % 100 == 0);
                acc.add(&s, threshold);
                (ledger, acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(Sums::default, Sums::merge)
}

/// `a (ln n)^2`.
pub fn tail_threshold(n: u64, a: f64) -> f64 {
    let l = (n as f64).ln();
    a * l * l
}

fn check_replicas(op: &'static str, replicas: u64) -> Result<()> {
    if replicas == 0 {
        return precondition(op, "replicas must be >= 1");
    }
    Ok(())
}

fn check_n(op: &'static str, n: u64) -> Result<()> {
    if n == 0 {
        return precondition(op, "n must be >= 1");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub n: u64,
    pub replicas: u64,
    pub mean: f64,
    pub std_error: f64,
    pub master_seed: u64,
}

/// Sample mean of `alpha(n)` with its standard error.
pub fn estimate_expectation(n: u64, replicas: u64, master_seed: u64) -> Result<MeanEstimate> {
    check_n("estimate_expectation", n)?;
    check_replicas("estimate_expectation", replicas)?;
    let s = replicate(n, replicas, f64::INFINITY, |i| FairSteps::new(master_seed, i));
    let (mean, std_error) = mean_se(s.count, s.alpha, s.alpha_sq);
    Ok(MeanEstimate {
        n,
        replicas,
        mean,
        std_error,
        master_seed,
    })
}

/// Sample mean of `f_1(n)`, the number of sites visited exactly once.
pub fn estimate_sites_once(n: u64, replicas: u64, master_seed: u64) -> Result<MeanEstimate> {
    check_n("estimate_sites_once", n)?;
    check_replicas("estimate_sites_once", replicas)?;
    let s = replicate(n, replicas, f64::INFINITY, |i| FairSteps::new(master_seed, i));
    let (mean, std_error) = mean_se(s.count, s.f1, s.f1_sq);
    Ok(MeanEstimate {
        n,
        replicas,
        mean,
        std_error,
        master_seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub n: u64,
    pub a: f64,
    pub threshold: f64,
    pub hits: u64,
    pub replicas: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
}

/// Exact (Clopper–Pearson) two-sided interval for a binomial proportion.
pub fn clopper_pearson(hits: u64, trials: u64, level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    let (k, m) = (hits as f64, trials as f64);
    let low = if hits == 0 {
        0.0
    } else {
        Beta::new(k, m - k + 1.0)
            .map(|b| b.inverse_cdf(tail))
            .unwrap_or(0.0)
    };
    let high = if hits == trials {
        1.0
    } else {
        Beta::new(k + 1.0, m - k)
            .map(|b| b.inverse_cdf(1.0 - tail))
            .unwrap_or(1.0)
    };
    let p = k / m;
    (low.clamp(0.0, p), high.clamp(p, 1.0))
}

fn tail_from(n: u64, a: f64, threshold: f64, hits: u64, replicas: u64, seed: u64) -> TailEstimate {
    let (ci_low, ci_high) = clopper_pearson(hits, replicas, 0.95);
    TailEstimate {
        n,
        a,
        threshold,
        hits,
        replicas,
        p_hat: hits as f64 / replicas as f64,
        ci_low,
        ci_high,
        master_seed: seed,
    }
}

/// Estimates `P(alpha(n) > a (ln n)^2)`.
pub fn estimate_tail(n: u64, a: f64, replicas: u64, master_seed: u64) -> Result<TailEstimate> {
    check_n("estimate_tail", n)?;
    check_replicas("estimate_tail", replicas)?;
    if !(a > 0.0 && a.is_finite()) {
        return precondition("estimate_tail", format!("a = {a} must be finite and > 0"));
    }
    let threshold = tail_threshold(n, a);
    let s = replicate(n, replicas, threshold, |i| FairSteps::new(master_seed, i));
    Ok(tail_from(n, a, threshold, s.hits, replicas, master_seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub tail: TailEstimate,
    /// `ln p_hat / ln n`; absent when there were no hits.
    pub log_ratio: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub a: f64,
    pub target_slope: f64,
    /// Least-squares slope of `ln p_hat` on `ln n` over unflagged rows.
    pub fitted_slope: Option<f64>,
    pub rows: Vec<SlopeRow>,
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Tail estimates over `n_grid`, with the fitted exponent of `n`.
///
/// Each `n` uses an independent family of streams (seed `master_seed + j`
/// for grid index `j`).
pub fn tail_slope_report(
    n_grid: &[u64],
    a: f64,
    replicas_per_n: u64,
    master_seed: u64,
) -> Result<SlopeReport> {
    if n_grid.is_empty() || n_grid.iter().any(|&n| n < 3) {
        return precondition("tail_slope_report", "n_grid must be nonempty with every n >= 3");
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for (j, &n) in n_grid.iter().enumerate() {
        let tail = estimate_tail(n, a, replicas_per_n, master_seed.wrapping_add(j as u64))?;
        let flagged = tail.hits == 0;
        if flagged {
            log::warn!("tail_slope_report: no hits at n = {n}; row excluded from the fit");
        }
        let log_ratio = (!flagged).then(|| tail.p_hat.ln() / (n as f64).ln());
        rows.push(SlopeRow {
            tail,
            log_ratio,
            flagged,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.flagged)
        .map(|r| ((r.tail.n as f64).ln(), r.tail.p_hat.ln()))
        .collect();
    Ok(SlopeReport {
        a,
        target_slope: -2.0 * a,
        fitted_slope: least_squares_slope(&pts),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimsupProbe {
    pub horizon: u64,
    pub n_min: u64,
    pub master_seed: u64,
    /// Per replica: `max alpha(n) / (ln n)^2` over `n_min <= n <= horizon`.
    pub maxima: Vec<f64>,
    /// Where each maximum was first attained.
    pub argmax: Vec<u64>,
    /// `(level, value)` pairs over the maxima.
    pub quantiles: Vec<(f64, f64)>,
    /// Reference bracket for the limsup constant; not asserted.
    pub bracket: (f64, f64),
}

pub const QUANTILE_LEVELS: [f64; 7] = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];

/// Linear-interpolation quantiles of `xs`.
pub fn quantiles(xs: &[f64], levels: &[f64]) -> Vec<(f64, f64)> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    levels
        .iter()
        .map(|&q| {
            if v.is_empty() {
                return (q, f64::NAN);
            }
            let h = q * (v.len() - 1) as f64;
            let (i, frac) = (h.floor() as usize, h - h.floor());
            let x = if i + 1 < v.len() {
                v[i] + frac * (v[i + 1] - v[i])
            } else {
                v[i]
            };
            (q, x)
        })
        .collect()
}

/// Streams one walk to `horizon`, returning the running maximum of
/// `alpha(n) / (ln n)^2` over `n >= n_min` and where it occurred.
///
/// Within a stretch of constant `alpha` the ratio decreases, so it is
/// evaluated only at `n_min` and whenever `alpha` increases.
pub fn limsup_trajectory<S: StepSource + ?Sized>(
    horizon: u64,
    n_min: u64,
    src: &mut S,
    ledger: &mut EdgeLedger,
) -> (f64, u64) {
    ledger.clear();
    let mut pos = 0i64;
    let mut best = (f64::NEG_INFINITY, n_min);
    let mut t = 0u64;
    while t < horizon {
        let mut w = src.next_word();
        for _ in 0..(horizon - t).min(64) {
            let to = pos + if w & 1 == 1 { 1 } else { -1 };
            w >>= 1;
            let before = ledger.alpha();
            ledger.extend(pos, to).expect("unit step");
            pos = to;
            t += 1;
            if t == n_min || (t > n_min && ledger.alpha() > before) {
                let l = (t as f64).ln();
                let r = ledger.alpha() as f64 / (l * l);
                if r > best.0 {
                    best = (r, t);
                }
            }
        }
    }
    best
}

pub fn limsup_probe(
    horizon: u64,
    n_min: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<LimsupProbe> {
    if n_min < 2 {
        return precondition("limsup_probe", "n_min must be >= 2");
    }
    if horizon < n_min {
        return precondition("limsup_probe", "horizon must be >= n_min");
    }
    check_replicas("limsup_probe", replicas)?;
    let results: Vec<(f64, u64)> = (0..replicas)
        .into_par_iter()
        .map_init(
            || EdgeLedger::with_capacity(4096),
            |ledger, i| {
                limsup_trajectory(horizon, n_min, &mut FairSteps::new(master_seed, i), ledger)
            },
        )
        .collect();
    let maxima: Vec<f64> = results.iter().map(|r| r.0).collect();
    Ok(LimsupProbe {
        horizon,
        n_min,
        master_seed,
        quantiles: quantiles(&maxima, &QUANTILE_LEVELS),
        argmax: results.iter().map(|r| r.1).collect(),
        maxima,
        bracket: (1.0 / 128.0, 0.5),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasedSummary {
    pub n: u64,
    pub p: f64,
    pub replicas: u64,
    pub master_seed: u64,
    pub mean_alpha: f64,
    pub std_error: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_alpha_plus: f64,
    pub mean_alpha_minus: f64,
    /// Fraction of replicas whose rare edges lie on the positive side.
    pub frac_plus_side: f64,
    pub frac_minus_side: f64,
    pub tail: TailEstimate,
}

/// Exploratory: the statistics under `P(step = +1) = p`.
///
/// `p = 1/2` uses the fair engine, so it reproduces [`estimate_expectation`]
/// exactly.
pub fn biased_walk_summary(
    n: u64,
    p: f64,
    a: f64,
    replicas: u64,
    master_seed: u64,
) -> Result<BiasedSummary> {
    check_n("biased_walk_summary", n)?;
    check_replicas("biased_walk_summary", replicas)?;
    if !(0.0..=1.0).contains(&p) {
        return precondition("biased_walk_summary", format!("p = {p} is not in [0, 1]"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return precondition("biased_walk_summary", format!("a = {a} must be finite and > 0"));
    }
    let threshold = tail_threshold(n, a);
    let s = if p == 0.5 {
        replicate(n, replicas, threshold, |i| FairSteps::new(master_seed, i))
    } else {
        replicate(n, replicas, threshold, |i| {
            BiasedSteps::new(master_seed, i, p).expect("p checked")
        })
    };
    let (mean, se) = mean_se(s.count, s.alpha, s.alpha_sq);
    let r = replicas as f64;
    Ok(BiasedSummary {
        n,
        p,
        replicas,
        master_seed,
        mean_alpha: mean,
        std_error: se,
        ci_low: mean - 1.959963984540054 * se,
        ci_high: mean + 1.959963984540054 * se,
        mean_alpha_plus: s.alpha_plus as f64 / r,
        mean_alpha_minus: s.alpha_minus as f64 / r,
        frac_plus_side: s.plus_side as f64 / r,
        frac_minus_side: s.minus_side as f64 / r,
        tail: tail_from(n, a, threshold, s.hits, replicas, master_seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enum_distribution_alpha;
    use crate::walk::{rare_edge_count, rare_site_count, WalkPath};
    use proptest::prelude::*;

    fn forced(steps: &[i8], n: u64) -> ReplicaSummary {
        simulate_replica(n, &mut ForcedSteps::new(steps).unwrap())
    }

    #[test]
    fn forced_examples() {
        let s = forced(&[1, 1, -1, -1], 4);
        assert_eq!((s.alpha, s.alpha_plus, s.alpha_minus, s.f1, s.terminal_position), (0, 0, 0, 1, 0));
        let s = forced(&[1, 1, 1], 3);
        assert_eq!((s.alpha, s.alpha_plus, s.alpha_minus, s.f1, s.terminal_position), (3, 3, 0, 4, 3));
        assert_eq!(forced(&[-1], 1).alpha, 1);
        assert_eq!(forced(&[1], 1).alpha, 1);
    }

    #[test]
    fn n_one_is_exact() {
        let e = estimate_expectation(1, 1000, 7).unwrap();
        assert_eq!((e.mean, e.std_error), (1.0, 0.0));
        assert!(estimate_expectation(5, 0, 7).is_err());
    }

    #[test]
    fn small_n_mean_near_exact() {
        let e = estimate_expectation(3, 200_000, 11).unwrap();
        assert!((e.mean - 1.25).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn tail_examples() {
        // a (ln 3)^2 = 1: true value 1/4.
        let a = 1.0 / 3f64.ln().powi(2);
        let t = estimate_tail(3, a * (1.0 + 1e-12), 20_000, 3).unwrap();
        assert!(t.ci_low <= 0.25 && 0.25 <= t.ci_high, "{t:?}");
        let t = estimate_tail(1, 1e-9, 100, 3).unwrap();
        assert_eq!(t.p_hat, 1.0);
        let t = estimate_tail(50, 1e6, 100, 3).unwrap();
        assert_eq!((t.p_hat, t.hits), (0.0, 0));
        assert!(estimate_tail(5, 0.0, 10, 1).is_err());
    }

    #[test]
    fn clopper_pearson_known_values() {
        // 0 of 10: upper = 1 - 0.025^(1/10).
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(5, 10, 0.95);
        assert!((lo - 0.18708602844739).abs() < 1e-8, "{lo}");
        assert!((hi - 0.81291397155261).abs() < 1e-8, "{hi}");
    }

    #[test]
    fn ci_width_scales_with_replicas() {
        let (a, b) = clopper_pearson(10_000, 100_000, 0.95);
        let (c, d) = clopper_pearson(20_000, 200_000, 0.95);
        let ratio = (d - c) / (b - a);
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn limsup_all_up() {
        let mut ledger = EdgeLedger::new();
        let (m, at) = limsup_trajectory(8, 2, &mut ForcedSteps::new(&[1]).unwrap(), &mut ledger);
        assert!((m - 2.0 / 2f64.ln().powi(2)).abs() < 1e-12);
        assert_eq!(at, 2);
        let (m, at) = limsup_trajectory(5, 5, &mut ForcedSteps::new(&[1]).unwrap(), &mut ledger);
        assert!((m - 5.0 / 5f64.ln().powi(2)).abs() < 1e-12);
        assert_eq!(at, 5);
        let probe = limsup_probe(1000, 10, 8, 5).unwrap();
        assert_eq!(probe.maxima.len(), 8);
        assert!(probe.maxima.iter().all(|&x| x >= 0.0));
        assert_eq!(probe, limsup_probe(1000, 10, 8, 5).unwrap());
        assert!(limsup_probe(10, 1, 1, 0).is_err());
    }

    #[test]
    fn biased_extremes() {
        let s = biased_walk_summary(100, 1.0, 0.25, 10, 1).unwrap();
        assert_eq!((s.mean_alpha, s.std_error), (100.0, 0.0));
        let fair = biased_walk_summary(50, 0.5, 0.25, 5000, 9).unwrap();
        let e = estimate_expectation(50, 5000, 9).unwrap();
        assert_eq!(fair.mean_alpha, e.mean);
        let drift = biased_walk_summary(400, 0.6, 0.25, 500, 9).unwrap();
        assert!(drift.frac_plus_side > 0.9);
    }

    #[test]
    fn deterministic_across_pools() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    (
                        estimate_expectation(200, 3000, 42).unwrap(),
                        estimate_tail(200, 0.25, 3000, 42).unwrap(),
                    )
                })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn checkpoints_match_prefix_runs() {
        let mut a = FairSteps::new(5, 0);
        let s = simulate_replica_with_checkpoints(300, &mut a, &[0, 1, 64, 65, 299, 300, 500]);
        let cps = s.checkpoint_values.clone().unwrap();
        assert_eq!(cps.len(), 6);
        for &(t, alpha) in &cps {
            let r = simulate_replica(t, &mut FairSteps::new(5, 0));
            assert_eq!(r.alpha, alpha, "t = {t}");
        }
        let plain = simulate_replica(300, &mut FairSteps::new(5, 0));
        assert_eq!(ReplicaSummary { checkpoint_values: None, ..s }, plain);
    }

    /// |mean - exact| <= 4 SE in at least 99% of repeated runs.
    #[test]
    fn mean_within_four_se_of_enumeration() {
        let exact = crate::closed_form::expectation_alpha_recursion(12).unwrap().to_f64();
        let runs = 200;
        let ok = (0..runs)
            .filter(|&seed| {
                let e = estimate_expectation(12, 2000, 1000 + seed).unwrap();
                (e.mean - exact).abs() <= 4.0 * e.std_error
            })
            .count();
        assert!(ok * 100 >= 99 * runs as usize, "{ok}/{runs}");
    }

    /// The 95% interval covers the enumerated tail in at least 90% of runs.
    #[test]
    fn tail_interval_coverage() {
        let dist = enum_distribution_alpha(10).unwrap();
        let a = 0.4;
        let thr = tail_threshold(10, a);
        let truth: f64 = dist
            .iter()
            .filter(|(k, _)| **k as f64 > thr)
            .map(|(_, p)| p.to_f64())
            .sum();
        assert!(truth > 0.05 && truth < 0.95, "{truth}");
        let runs = 200;
        let covered = (0..runs)
            .filter(|&seed| {
                let t = estimate_tail(10, a, 500, 5000 + seed).unwrap();
                t.ci_low <= truth && truth <= t.ci_high
            })
            .count();
        assert!(covered * 10 >= 9 * runs as usize, "{covered}/{runs}");
    }

    proptest! {
        #[test]
        fn kernel_matches_batch(steps in prop::collection::vec(prop::bool::ANY, 1..400)) {
            let signed: Vec<i8> = steps.iter().map(|&u| if u { 1 } else { -1 }).collect();
            let n = signed.len() as u64;
            let s = simulate_replica(n, &mut ForcedSteps::new(&signed).unwrap());
            let path = WalkPath::from_origin(signed).unwrap();
            let batch = rare_edge_count(&path);
            prop_assert_eq!((s.alpha, s.alpha_plus, s.alpha_minus), (batch.alpha, batch.alpha_plus, batch.alpha_minus));
            prop_assert_eq!(s.f1, rare_site_count(&path));
            prop_assert_eq!(s.terminal_position, path.terminal());
        }

        #[test]
        fn summaries_satisfy_invariants(seed in any::<u64>(), n in 1u64..3000) {
            let s = simulate_replica(n, &mut FairSteps::new(seed, 0));
            prop_assert_eq!(s.alpha, s.alpha_plus + s.alpha_minus);
            prop_assert_eq!(s.alpha_plus * s.alpha_minus, 0);
            prop_assert!(s.alpha <= s.terminal_position.unsigned_abs());
        }
    }
}
