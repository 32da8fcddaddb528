//! Exhaustive enumeration of all `2^n` equally likely paths.
//!
//! Paths are `n`-bit integers (bit `i` set = step `i+1` up). Work is split
//! over fixed high-bit prefixes and combined with integer sums, so results do
//! not depend on the worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::closed_form::binomial;
use crate::error::{precondition, refused, Result};
use crate::rational::ExactRational;

pub const DEFAULT_CAP: u32 = 24;
pub const HARD_CAP: u32 = 30;

/// Limit on the enumerated path length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub cap: u32,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

static WARNED: AtomicBool = AtomicBool::new(false);

impl EnumConfig {
    pub fn with_cap(cap: u32) -> Result<Self> {
        if cap > HARD_CAP {
            return refused(
                "EnumConfig",
                format!("cap {cap} exceeds the hard limit {HARD_CAP} (2^{HARD_CAP} paths)"),
            );
        }
        Ok(Self { cap })
    }

    fn check(&self, op: &'static str, n: u32) -> Result<()> {
        if n > HARD_CAP {
            return refused(
                op,
                format!("n = {n} exceeds the hard limit {HARD_CAP}; 2^{n} paths is out of reach"),
            );
        }
        if n > self.cap {
            return refused(
                op,
                format!("n = {n} exceeds the configured cap {} (raise it up to {HARD_CAP})", self.cap),
            );
        }
        if n > DEFAULT_CAP && !WARNED.swap(true, Ordering::Relaxed) {
            log::warn!("{op}: enumerating 2^{n} paths; expect a long run");
        }
        Ok(())
    }
}

/// Per-path statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStats {
    pub alpha: u32,
    pub alpha_plus: u32,
    pub alpha_minus: u32,
    pub f1: u32,
}

/// Scratch-buffer evaluation of one bit-packed path from 0. `edges` needs
/// `2n` slots and `sites` `2n + 1`; both are returned zeroed.
fn path_stats(bits: u64, n: u32, edges: &mut [u32], sites: &mut [u32]) -> PathStats {
    let off = n as i64;
    let mut pos = 0i64;
    let (mut lo, mut hi) = (0i64, 0i64);
    sites[off as usize] = 1;
    for i in 0..n {
        let up = (bits >> i) & 1 == 1;
        let y = if up { pos } else { pos - 1 };
        edges[(y + off) as usize] += 1;
        pos = if up { pos + 1 } else { pos - 1 };
        sites[(pos + off) as usize] += 1;
        lo = lo.min(pos);
        hi = hi.max(pos);
    }
    let mut s = PathStats {
        alpha: 0,
        alpha_plus: 0,
        alpha_minus: 0,
        f1: 0,
    };
    for x in lo..=hi {
        let ix = (x + off) as usize;
        if sites[ix] == 1 {
            s.f1 += 1;
        }
        sites[ix] = 0;
        if x < hi {
            if edges[ix] == 1 {
                s.alpha += 1;
                if x >= 0 {
                    s.alpha_plus += 1;
                } else {
                    s.alpha_minus += 1;
                }
            }
            edges[ix] = 0;
        }
    }
    s
}

/// Runs `visit` on every path of length `n` and merges the per-chunk
/// accumulators with `merge`.
fn for_all_paths<A, V, M>(n: u32, init: impl Fn() -> A + Sync, visit: V, merge: M) -> A
where
    A: Send,
    V: Fn(&mut A, u64) + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    let prefix_bits = n.saturating_sub(12).min(16);
    let low_bits = n - prefix_bits;
    (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut acc = init();
            let base = prefix << low_bits;
            for low in 0..1u64 << low_bits {
                visit(&mut acc, base | low);
            }
            acc
        })
        .reduce(&init, &merge)
}

/// Integer tallies over all `2^n` paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub n: u32,
    /// `alpha_counts[a]` = number of paths with `alpha = a`.
    pub alpha_counts: Vec<u64>,
    pub alpha_plus_counts: Vec<u64>,
    pub alpha_minus_counts: Vec<u64>,
    pub f1_total: u64,
}

impl EnumerationSummary {
    fn empty(n: u32) -> Self {
        let len = n as usize + 1;
        Self {
            n,
            alpha_counts: vec![0; len],
            alpha_plus_counts: vec![0; len],
            alpha_minus_counts: vec![0; len],
            f1_total: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.alpha_counts.iter_mut().zip(other.alpha_counts) {
            *a += b;
        }
        for (a, b) in self.alpha_plus_counts.iter_mut().zip(other.alpha_plus_counts) {
            *a += b;
        }
        for (a, b) in self.alpha_minus_counts.iter_mut().zip(other.alpha_minus_counts) {
            *a += b;
        }
        self.f1_total += other.f1_total;
        self
    }

    fn over_paths(&self, total: impl Into<BigInt>) -> ExactRational {
        ExactRational::from_dyadic(total.into(), self.n as u64)
    }

    /// `E[C(X, k)]` for a tally of `X`.
    fn binomial_moment(&self, counts: &[u64], k: u64) -> ExactRational {
        let mut total = BigInt::from(0);
        for (a, &c) in counts.iter().enumerate() {
            if c > 0 {
                total += BigInt::from(binomial(a as u64, k)) * c;
            }
        }
        self.over_paths(total)
    }

    pub fn expectation_alpha(&self) -> ExactRational {
        self.binomial_moment(&self.alpha_counts, 1)
    }

    pub fn moment_alpha_k(&self, k: u64) -> ExactRational {
        self.binomial_moment(&self.alpha_counts, k)
    }

    pub fn moment_alpha_plus_k(&self, k: u64) -> ExactRational {
        self.binomial_moment(&self.alpha_plus_counts, k)
    }

    pub fn moment_alpha_minus_k(&self, k: u64) -> ExactRational {
        self.binomial_moment(&self.alpha_minus_counts, k)
    }

    pub fn expectation_f1(&self) -> ExactRational {
        self.over_paths(self.f1_total)
    }

    /// Exact law of `alpha(n)`, zero masses omitted.
    pub fn distribution_alpha(&self) -> BTreeMap<u64, ExactRational> {
        self.alpha_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a as u64, self.over_paths(c)))
            .collect()
    }

    /// `P(alpha(n) > threshold)`.
    pub fn tail_alpha(&self, threshold: f64) -> ExactRational {
        let hits: u64 = self
            .alpha_counts
            .iter()
            .enumerate()
            .filter(|(a, _)| *a as f64 > threshold)
            .map(|(_, c)| c)
            .sum();
        self.over_paths(hits)
    }
}

/// Tallies `alpha`, `alpha+`, `alpha-` and `f1` over every path of length `n`.
pub fn enumerate_paths(n: u32, cfg: &EnumConfig) -> Result<EnumerationSummary> {
    if n < 1 {
        return precondition("enumerate_paths", "n must be >= 1");
    }
    cfg.check("enumerate_paths", n)?;
    let len = 2 * n as usize + 1;
    let summary = for_all_paths(
        n,
        || (EnumerationSummary::empty(n), vec![0u32; len], vec![0u32; len]),
        |(acc, edges, sites), bits| {
            let s = path_stats(bits, n, edges, sites);
            acc.alpha_counts[s.alpha as usize] += 1;
            acc.alpha_plus_counts[s.alpha_plus as usize] += 1;
            acc.alpha_minus_counts[s.alpha_minus as usize] += 1;
            acc.f1_total += s.f1 as u64;
        },
        |(a, e, s), (b, _, _)| (a.merge(b), e, s),
    );
    Ok(summary.0)
}

pub fn enum_expectation_alpha(n: u32) -> Result<ExactRational> {
    Ok(enumerate_paths(n, &EnumConfig::default())?.expectation_alpha())
}

pub fn enum_distribution_alpha(n: u32) -> Result<BTreeMap<u64, ExactRational>> {
    Ok(enumerate_paths(n, &EnumConfig::default())?.distribution_alpha())
}

pub fn enum_moment_alpha_k(n: u32, k: u64) -> Result<ExactRational> {
    Ok(enumerate_paths(n, &EnumConfig::default())?.moment_alpha_k(k))
}

pub fn enum_expectation_f1(n: u32) -> Result<ExactRational> {
    Ok(enumerate_paths(n, &EnumConfig::default())?.expectation_f1())
}

/// Path predicate over the position sequence `S_0..=S_n`.
pub type PathPredicate = Arc<dyn Fn(&[i64]) -> bool + Send + Sync>;

/// An event on the walk started at 0.
#[derive(Clone)]
pub enum EventSpec {
    /// `0 < S_l < S_t` for `0 < l < t`.
    C1 { t: u64 },
    /// `0 < S_l <= S_t` for `0 < l <= t`.
    C2 { t: u64 },
    /// `S_r < S_l <= S_t` for `r < l <= t`.
    C2Between { r: u64, t: u64 },
    /// `S_l <= S_t` for `0 <= l <= t`.
    D1 { t: u64 },
    /// `S_r < S_l` for `r < l <= t`.
    D2 { r: u64, t: u64 },
    /// `S_l > 0` for `0 < l <= t`.
    PositiveStrict { t: u64 },
    /// `S_l >= 0` for `0 <= l <= t`.
    NonNegative { t: u64 },
    /// `S_t = 0`.
    ReturnZero { t: u64 },
    /// Arbitrary predicate reading positions up to `horizon`.
    Custom {
        name: String,
        horizon: u64,
        predicate: PathPredicate,
    },
}

impl fmt::Debug for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::C1 { t } => write!(f, "C1({t})"),
            Self::C2 { t } => write!(f, "C2({t})"),
            Self::C2Between { r, t } => write!(f, "C2({r},{t})"),
            Self::D1 { t } => write!(f, "D1({t})"),
            Self::D2 { r, t } => write!(f, "D2({r},{t})"),
            Self::PositiveStrict { t } => write!(f, "PositiveStrict({t})"),
            Self::NonNegative { t } => write!(f, "NonNegative({t})"),
            Self::ReturnZero { t } => write!(f, "ReturnZero({t})"),
            Self::Custom { name, horizon, .. } => write!(f, "Custom({name}, {horizon})"),
        }
    }
}

impl EventSpec {
    /// Last time index the event reads.
    pub fn horizon(&self) -> u64 {
        match *self {
            Self::C1 { t }
            | Self::C2 { t }
            | Self::C2Between { t, .. }
            | Self::D1 { t }
            | Self::D2 { t, .. }
            | Self::PositiveStrict { t }
            | Self::NonNegative { t }
            | Self::ReturnZero { t } => t,
            Self::Custom { horizon, .. } => horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |d: String| precondition("EventSpec", d);
        match *self {
            Self::C1 { t } | Self::C2 { t } | Self::PositiveStrict { t } if t < 1 => {
                bad(format!("{self:?}: t must be >= 1"))
            }
            Self::C2Between { r, t } | Self::D2 { r, t } if r >= t => {
                bad(format!("{self:?}: need r < t"))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the event on `s = [S_0, ..., S_n]` with `n >= horizon`.
    pub fn holds(&self, s: &[i64]) -> bool {
        match self {
            Self::C1 { t } => {
                let t = *t as usize;
                (1..t).all(|l| 0 < s[l] && s[l] < s[t])
            }
            Self::C2 { t } => {
                let t = *t as usize;
                (1..=t).all(|l| 0 < s[l] && s[l] <= s[t])
            }
            Self::C2Between { r, t } => {
                let (r, t) = (*r as usize, *t as usize);
                (r + 1..=t).all(|l| s[r] < s[l] && s[l] <= s[t])
            }
            Self::D1 { t } => {
                let t = *t as usize;
                (0..=t).all(|l| s[l] <= s[t])
            }
            Self::D2 { r, t } => {
                let (r, t) = (*r as usize, *t as usize);
                (r + 1..=t).all(|l| s[r] < s[l])
            }
            Self::PositiveStrict { t } => (1..=*t as usize).all(|l| s[l] > 0),
            Self::NonNegative { t } => (0..=*t as usize).all(|l| s[l] >= 0),
            Self::ReturnZero { t } => s[*t as usize] == 0,
            Self::Custom { predicate, .. } => predicate(s),
        }
    }
}

/// Exact fraction of the `2^n` paths of length `n` lying in `spec`.
pub fn enum_event_probability(spec: &EventSpec, n: u32) -> Result<ExactRational> {
    enum_event_probability_with(spec, n, &EnumConfig::default())
}

pub fn enum_event_probability_with(
    spec: &EventSpec,
    n: u32,
    cfg: &EnumConfig,
) -> Result<ExactRational> {
    spec.validate()?;
    if (n as u64) < spec.horizon() {
        return precondition(
            "enum_event_probability",
            format!("path length {n} shorter than event horizon {}", spec.horizon()),
        );
    }
    cfg.check("enum_event_probability", n)?;
    let len = n as usize + 1;
    let (hits, _) = for_all_paths(
        n,
        || (0u64, vec![0i64; len]),
        |(hits, pos), bits| {
            for i in 0..n as usize {
                pos[i + 1] = pos[i] + if (bits >> i) & 1 == 1 { 1 } else { -1 };
            }
            if spec.holds(pos) {
                *hits += 1;
            }
        },
        |(a, p), (b, _)| (a + b, p),
    );
    Ok(ExactRational::from_dyadic(BigInt::from(hits), n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(enum_expectation_alpha(1).unwrap(), 1u64);
        assert_eq!(enum_expectation_alpha(2).unwrap(), 1u64);
        assert_eq!(enum_expectation_alpha(3).unwrap(), q(5, 4));
        assert!(enum_expectation_alpha(0).is_err());
        assert!(enum_expectation_alpha(25).is_err());
        assert!(enumerate_paths(31, &EnumConfig { cap: 31 }).is_err());
        assert!(EnumConfig::with_cap(31).is_err());
    }

    #[test]
    fn distribution_examples() {
        let d1 = enum_distribution_alpha(1).unwrap();
        assert_eq!(d1.into_iter().collect::<Vec<_>>(), vec![(1, ExactRational::one())]);
        let d2 = enum_distribution_alpha(2).unwrap();
        assert_eq!(d2.into_iter().collect::<Vec<_>>(), vec![(0, q(1, 2)), (2, q(1, 2))]);
        let d3 = enum_distribution_alpha(3).unwrap();
        assert_eq!(
            d3.into_iter().collect::<Vec<_>>(),
            vec![(0, q(2, 8)), (1, q(4, 8)), (3, q(2, 8))]
        );
    }

    #[test]
    fn distributions_sum_to_one_over_dyadic_denominators() {
        for n in 1..=16 {
            let d = enum_distribution_alpha(n).unwrap();
            let total = d.values().fold(ExactRational::zero(), |a, b| &a + b);
            assert_eq!(total, 1u64);
            assert!(d.values().all(|p| p.denominator_divides_pow2(n as u64)));
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(enum_moment_alpha_k(3, 2).unwrap(), q(3, 4));
        assert_eq!(enum_moment_alpha_k(3, 1).unwrap(), q(5, 4));
        assert_eq!(enum_moment_alpha_k(3, 4).unwrap(), 0u64);
        assert_eq!(enum_moment_alpha_k(3, 0).unwrap(), 1u64);
        for n in 1..=14 {
            assert_eq!(
                enum_moment_alpha_k(n, 1).unwrap(),
                enum_expectation_alpha(n).unwrap()
            );
        }
    }

    #[test]
    fn f1_examples() {
        assert_eq!(enum_expectation_f1(1).unwrap(), 2u64);
        assert_eq!(enum_expectation_f1(5).unwrap(), 2u64);
        assert_eq!(enum_expectation_f1(12).unwrap(), 2u64);
    }

    #[test]
    fn sides_balance() {
        for n in 1..=16 {
            let s = enumerate_paths(n, &EnumConfig::default()).unwrap();
            let plus = s.moment_alpha_plus_k(1);
            assert_eq!(plus, s.moment_alpha_minus_k(1));
            assert_eq!(&plus + &plus, s.expectation_alpha());
            for k in 2..=4 {
                assert_eq!(s.moment_alpha_plus_k(k), s.moment_alpha_minus_k(k));
            }
        }
    }

    #[test]
    fn event_examples() {
        assert_eq!(enum_event_probability(&EventSpec::D1 { t: 2 }, 2).unwrap(), q(1, 2));
        assert_eq!(enum_event_probability(&EventSpec::C2 { t: 3 }, 3).unwrap(), q(1, 8));
        assert_eq!(
            enum_event_probability(&EventSpec::D2 { r: 0, t: 2 }, 2).unwrap(),
            q(1, 4)
        );
        // Longer paths do not change an event that stops at its horizon.
        assert_eq!(enum_event_probability(&EventSpec::C2 { t: 3 }, 9).unwrap(), q(1, 8));
        assert_eq!(enum_event_probability(&EventSpec::ReturnZero { t: 4 }, 4).unwrap(), q(3, 8));
        assert_eq!(
            enum_event_probability(&EventSpec::PositiveStrict { t: 4 }, 4).unwrap(),
            q(3, 16)
        );
        assert_eq!(enum_event_probability(&EventSpec::NonNegative { t: 4 }, 4).unwrap(), q(3, 8));
    }

    #[test]
    fn malformed_events_are_rejected() {
        assert!(enum_event_probability(&EventSpec::D2 { r: 2, t: 2 }, 4).is_err());
        assert!(enum_event_probability(&EventSpec::C2 { t: 0 }, 4).is_err());
        assert!(enum_event_probability(&EventSpec::C1 { t: 5 }, 4).is_err());
    }

    #[test]
    fn mirrored_event_has_same_probability() {
        let mirror: PathPredicate =
            Arc::new(|s: &[i64]| (1..=6).all(|l| 0 > s[l] && s[l] >= s[6]));
        let spec = EventSpec::Custom {
            name: "mirror C2".into(),
            horizon: 6,
            predicate: mirror,
        };
        assert_eq!(
            enum_event_probability(&spec, 8).unwrap(),
            enum_event_probability(&EventSpec::C2 { t: 6 }, 8).unwrap()
        );
    }

    #[test]
    fn scratch_stats_agree_with_walk_core() {
        use crate::walk::{rare_edge_count, rare_site_count, WalkPath};
        let n = 10;
        let mut e = vec![0; 21];
        let mut s = vec![0; 21];
        for bits in 0..1u64 << n {
            let st = path_stats(bits, n, &mut e, &mut s);
            let path = WalkPath::from_bits(bits, n, 0);
            let r = rare_edge_count(&path);
            assert_eq!(
                (st.alpha as u64, st.alpha_plus as u64, st.alpha_minus as u64),
                (r.alpha, r.alpha_plus, r.alpha_minus)
            );
            assert_eq!(st.f1 as u64, rare_site_count(&path));
        }
    }
}
