//! Exact analytic evaluators for the expected number of rare edges and the
//! path events built from running maxima.
//!
//! Event definitions (walk from 0, times `0 <= r < t`):
//!
//! * `C1(t)`: `0 < S_l < S_t` for `0 < l < t`
//! * `C2(t)`: `0 < S_l <= S_t` for `0 < l <= t`
//! * `D1(t)`: `S_l <= S_t` for `0 <= l <= t`
//! * `D2(r, t)`: `S_r < S_l` for `r < l <= t`; depends only on the gap `t - r`
//!
//! All probabilities here are dyadic; exact routes accumulate integers over
//! a power of two and reduce once.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::rational::{Dyadic, ExactRational};

/// Largest index evaluated with exact rationals by default.
pub const EXACT_HORIZON: u64 = 4096;

pub const LIMIT_T_C2: f64 = 0.5;
pub const LIMIT_T_C1: f64 = 0.25;
/// `sqrt(2 / pi)`.
pub const LIMIT_SQRT_T_D1: f64 = 0.797_884_560_802_865_4;
/// `1 / sqrt(2 pi)`.
pub const LIMIT_SQRT_T_D2: f64 = 0.398_942_280_401_432_7;

pub fn double_factorial(k: i64) -> Result<BigUint> {
    if k < -1 {
        return precondition("double_factorial", format!("k = {k} < -1"));
    }
    let mut acc = BigUint::one();
    let mut i = k;
    while i > 1 {
        acc *= i as u64;
        i -= 2;
    }
    Ok(acc)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row `C(n, 0..=n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut cur = BigUint::one();
    row.push(cur.clone());
    for i in 0..n {
        cur = cur * (n - i) / (i + 1);
        row.push(cur.clone());
    }
    row
}

/// Growable cache of `C(2m, m)`.
#[derive(Clone, Debug)]
pub struct CentralBinomials {
    values: Vec<BigUint>,
}

impl Default for CentralBinomials {
    fn default() -> Self {
        Self::new()
    }
}

impl CentralBinomials {
    pub fn new() -> Self {
        Self {
            values: vec![BigUint::one()],
        }
    }

    pub fn get(&mut self, m: u64) -> &BigUint {
        while self.values.len() as u64 <= m {
            let k = self.values.len() as u64;
            // C(2k, k) = C(2k-2, k-1) * 2(2k-1) / k
            let next = self.values.last().unwrap() * (2 * (2 * k - 1)) / k;
            self.values.push(next);
        }
        &self.values[m as usize]
    }
}

/// Streams `E alpha(n)` for `n = 1, 2, ...` through the increment rule:
/// from `n` to `n + 1` the value grows by `2 (n-1)!! / (n+2)!!` when `n` is
/// even and stays put when `n` is odd.
///
/// For even `n = 2k` the increment is kept as the integer `c_k` over
/// `4^k`, advanced by `c_{k+1} = c_k * 2(2k+1) / (k+2)` (the ratio of
/// consecutive double-factorial quotients).
#[derive(Clone, Debug)]
pub struct AlphaExpectationRecursion {
    n: u64,
    value: Dyadic,
    inc_num: BigUint,
    inc_k: u64,
}

impl Default for AlphaExpectationRecursion {
    fn default() -> Self {
        Self::new()
    }
}

impl AlphaExpectationRecursion {
    /// Starts at `E alpha(1) = 1`.
    pub fn new() -> Self {
        Self {
            n: 1,
            value: Dyadic::new(BigInt::one(), 0),
            // 2 * 1!! / 4!! = 1/4 at n = 2.
            inc_num: BigUint::one(),
            inc_k: 1,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Moves from `n` to `n + 1`; returns whether the value changed.
    pub fn advance(&mut self) -> bool {
        let grew = self.n % 2 == 0;
        if grew {
            debug_assert_eq!(self.n, 2 * self.inc_k);
            let k = self.inc_k;
            self.value
                .add_assign(&Dyadic::new(BigInt::from(self.inc_num.clone()), 2 * k));
            self.inc_num = &self.inc_num * (2 * (2 * k + 1)) / (k + 2);
            self.inc_k += 1;
        }
        self.n += 1;
        grew
    }

    pub fn value(&self) -> ExactRational {
        self.value.to_rational()
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_rational().to_f64()
    }

    /// The current value as `(numerator, e)` meaning `numerator / 2^e`.
    pub fn dyadic(&self) -> (&BigInt, u64) {
        (&self.value.num, self.value.exp)
    }

    /// Whether the current value is strictly below the integer `bound`.
    pub fn is_below(&self, bound: u64) -> bool {
        let scaled = BigInt::from(bound) << self.value.exp;
        self.value.num < scaled
    }
}

/// `E alpha(n)` from the even-step increment rule.
pub fn expectation_alpha_recursion(n: u64) -> Result<ExactRational> {
    if n < 1 {
        return precondition("expectation_alpha_recursion", "n must be >= 1");
    }
    let mut it = AlphaExpectationRecursion::new();
    while it.n() < n {
        it.advance();
    }
    Ok(it.value())
}

/// `2 (n-1)!! / (n+2)!!`, the increment from `n` to `n + 1` for even `n`.
pub fn recursion_increment(n: u64) -> Result<ExactRational> {
    let num = double_factorial(n as i64 - 1)? * 2u32;
    let den = double_factorial(n as i64 + 2)?;
    Ok(ExactRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Ladder-time route: `E alpha(n) = 2 sum_{j<n} P(D1(j)) P(D2(j, n))`.
pub fn expectation_alpha_ladder(n: u64) -> Result<ExactRational> {
    if n < 1 {
        return precondition("expectation_alpha_ladder", "n must be >= 1");
    }
    let mut central = CentralBinomials::new();
    Ok(ladder_with(&mut central, n))
}

pub(crate) fn ladder_with(central: &mut CentralBinomials, n: u64) -> ExactRational {
    // 2 P(D1(j)) P(D2(n-j)) = C(2a,a) C(2b,b) / 2^(2a+2b), 2a+2b <= n+1.
    let mut acc = BigUint::zero();
    for j in 0..n {
        let a = j.div_ceil(2);
        let b = (n - j) / 2;
        let term = central.get(a).clone() * central.get(b);
        acc += term << (n + 1 - 2 * a - 2 * b);
    }
    ExactRational::from_dyadic(BigInt::from(acc), n + 1)
}

/// `P(S_n = 0)`.
pub fn prob_return_zero(n: u64) -> ExactRational {
    if n % 2 == 1 {
        return ExactRational::zero();
    }
    ExactRational::from_dyadic(BigInt::from(binomial(n, n / 2)), n)
}

/// `P(D1(t)) = P(S_{2m} = 0)` with `m = ceil(t / 2)`.
pub fn prob_d1(t: u64) -> ExactRational {
    prob_return_zero(2 * t.div_ceil(2))
}

/// `P(D2(r, r + gap)) = P(S_{2m} = 0) / 2` with `m = floor(gap / 2)`.
pub fn prob_d2(gap: u64) -> Result<ExactRational> {
    if gap < 1 {
        return precondition("prob_D2", "gap must be >= 1");
    }
    let m = gap / 2;
    Ok(ExactRational::from_dyadic(
        BigInt::from(binomial(2 * m, m)),
        2 * m + 1,
    ))
}

/// Number of `t`-step paths from 0 with `0 < S_l <= m` for `0 < l <= t`
/// and `S_t = m`, by dynamic programming over the strip.
pub fn strip_count_dp(t: u64, m: u64) -> BigUint {
    if t == 0 || m == 0 {
        return BigUint::zero();
    }
    let m = m as usize;
    // cur[x] counts paths at level x (1..=m) after the current step.
    let mut cur = vec![BigUint::zero(); m + 2];
    cur[1] = BigUint::one();
    let mut next = vec![BigUint::zero(); m + 2];
    for _ in 1..t {
        for x in 1..=m {
            next[x] = &cur[x - 1] + &cur[x + 1];
        }
        std::mem::swap(&mut cur, &mut next);
        cur[0] = BigUint::zero();
        cur[m + 1] = BigUint::zero();
    }
    cur[m].clone()
}

/// Images of `1 -> m` in `t - 1` steps with absorbing barriers at 0 and
/// `m + 1`: `sum_k [B(m - 1 + 2kw) - B(m + 1 + 2kw)]`, `w = m + 1`, where
/// `B(d) = C(s, (s + d) / 2)`. `row` is the binomial row of `s = t - 1`.
fn strip_count_images(row: &[BigUint], t: u64, m: u64) -> BigInt {
    if t == 0 || m == 0 || m > t || (t + m) % 2 == 1 {
        return BigInt::zero();
    }
    let s = (t - 1) as i64;
    let w = (m + 1) as i64;
    let pick = |d: i64| -> Option<&BigUint> {
        if d.abs() > s || (s + d) % 2 != 0 {
            None
        } else {
            Some(&row[((s + d) / 2) as usize])
        }
    };
    let mut acc = BigInt::zero();
    let kmax = s / (2 * w) + 1;
    for k in -kmax..=kmax {
        if let Some(v) = pick(m as i64 - 1 + 2 * k * w) {
            acc += BigInt::from(v.clone());
        }
        if let Some(v) = pick(m as i64 + 1 + 2 * k * w) {
            acc -= BigInt::from(v.clone());
        }
    }
    acc
}

/// Same count as [`strip_count_dp`] by the reflection-image sum.
pub fn strip_count_reflection(t: u64, m: u64) -> BigUint {
    if t == 0 {
        return BigUint::zero();
    }
    let row = binomial_row(t - 1);
    strip_count_images(&row, t, m)
        .to_biguint()
        .expect("strip counts are nonnegative")
}

/// `sum_m N(t, m)`, the number of `t`-step paths in `C2(t)`.
pub fn c2_path_count(t: u64) -> BigUint {
    if t == 0 {
        return BigUint::one();
    }
    let row = binomial_row(t - 1);
    let mut total = BigInt::zero();
    let mut m = if t % 2 == 0 { 2 } else { 1 };
    while m <= t {
        total += strip_count_images(&row, t, m);
        m += 2;
    }
    total.to_biguint().expect("nonnegative")
}

pub fn prob_c2(t: u64) -> Result<ExactRational> {
    if t < 1 {
        return precondition("prob_C2", "t must be >= 1");
    }
    Ok(ExactRational::from_dyadic(BigInt::from(c2_path_count(t)), t))
}

/// `P(C1(1)) = 1` (no interior times); `P(C1(t)) = P(C2(t-1)) / 2` otherwise.
pub fn prob_c1(t: u64) -> Result<ExactRational> {
    match t {
        0 => precondition("prob_C1", "t must be >= 1"),
        1 => Ok(ExactRational::one()),
        _ => Ok(ExactRational::from_dyadic(
            BigInt::from(c2_path_count(t - 1)),
            t,
        )),
    }
}

/// `C(s, i) / 2^s` for `i = 0..=s`, built outward from the centre.
pub fn binomial_pmf_row(s: u64) -> Vec<f64> {
    let n = s as usize;
    let mut row = vec![0.0; n + 1];
    let c = n / 2;
    row[c] = central_pmf(s);
    for i in c..n {
        row[i + 1] = row[i] * (n - i) as f64 / (i + 1) as f64;
    }
    for i in (1..=c).rev() {
        row[i - 1] = row[i] * i as f64 / (n - i + 1) as f64;
    }
    row
}

/// `C(s, floor(s/2)) / 2^s`.
fn central_pmf(s: u64) -> f64 {
    let q = s / 2;
    let even = return_zero_f64(2 * q);
    if s % 2 == 0 {
        even
    } else {
        even * (2 * q + 1) as f64 / (2 * (q + 1)) as f64
    }
}

/// `P(S_n = 0)` in floating point.
pub fn return_zero_f64(n: u64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let m = n / 2;
    if m > 1 << 20 {
        // Far past any exact horizon: log-gamma with the Stirling series.
        let mf = m as f64;
        let ln = ln_gamma(2.0 * mf + 1.0) - 2.0 * ln_gamma(mf + 1.0) - n as f64 * 2f64.ln();
        return ln.exp();
    }
    let mut p = 1.0;
    for i in 1..=m {
        p *= (2 * i - 1) as f64 / (2 * i) as f64;
    }
    p
}

fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn prob_d1_f64(t: u64) -> f64 {
    return_zero_f64(2 * t.div_ceil(2))
}

pub fn prob_d2_f64(gap: u64) -> f64 {
    0.5 * return_zero_f64(2 * (gap / 2))
}

/// `P(C2(t))` in floating point. Narrow strips use the eigen-expansion of
/// the strip transfer matrix (all terms of one sign pair up); wide strips
/// use the reflection images, which then decay fast.
pub fn prob_c2_f64(t: u64) -> f64 {
    if t == 0 {
        return 1.0;
    }
    let s = t - 1;
    let row = binomial_pmf_row(s);
    let mut total = 0.0;
    let mut m = if t % 2 == 0 { 2 } else { 1 };
    while m <= t {
        let w = (m + 1) as f64;
        let value = if (s as f64) * (PI / w).powi(2) >= 1.0 {
            strip_spectral(s, m)
        } else {
            strip_images_f64(&row, s, m)
        };
        total += value;
        m += 2;
    }
    0.5 * total
}

/// `N / 2^s` for paths `1 -> m` in `s` steps inside `[1, m]`.
fn strip_spectral(s: u64, m: u64) -> f64 {
    let w = (m + 1) as f64;
    let mut acc = 0.0;
    for j in 1..=m {
        let theta = j as f64 * PI / w;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * theta.sin().powi(2) * theta.cos().powi(s as i32);
    }
    (2.0 / w * acc).max(0.0)
}

fn strip_images_f64(row: &[f64], s: u64, m: u64) -> f64 {
    let s = s as i64;
    let w = (m + 1) as i64;
    let pick = |d: i64| -> f64 {
        if d.abs() > s || (s + d) % 2 != 0 {
            0.0
        } else {
            row[((s + d) / 2) as usize]
        }
    };
    let kmax = s / (2 * w) + 1;
    let mut acc = 0.0;
    for k in -kmax..=kmax {
        acc += pick(m as i64 - 1 + 2 * k * w) - pick(m as i64 + 1 + 2 * k * w);
    }
    acc.max(0.0)
}

pub fn prob_c1_f64(t: u64) -> f64 {
    if t <= 1 {
        1.0
    } else {
        0.5 * prob_c2_f64(t - 1)
    }
}

/// Exact tables of `P(C2(t))` (`t >= 1`), `P(D1(t))` (`t >= 0`) and
/// `P(D2)` by gap (`g >= 1`) up to `horizon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventTable {
    pub horizon: u64,
    c2: Vec<ExactRational>,
    d1: Vec<ExactRational>,
    d2_gap: Vec<ExactRational>,
}

impl EventTable {
    pub fn build(horizon: u64) -> Self {
        use rayon::prelude::*;
        let c2 = (1..=horizon)
            .into_par_iter()
            .map(|t| prob_c2(t).expect("t >= 1"))
            .collect();
        let d1 = (0..=horizon).map(prob_d1).collect();
        let d2_gap = (1..=horizon)
            .map(|g| prob_d2(g).expect("g >= 1"))
            .collect();
        Self {
            horizon,
            c2,
            d1,
            d2_gap,
        }
    }

    pub fn c2(&self, t: u64) -> Option<&ExactRational> {
        t.checked_sub(1).and_then(|i| self.c2.get(i as usize))
    }

    pub fn d1(&self, t: u64) -> Option<&ExactRational> {
        self.d1.get(t as usize)
    }

    pub fn d2_gap(&self, g: u64) -> Option<&ExactRational> {
        g.checked_sub(1).and_then(|i| self.d2_gap.get(i as usize))
    }

    pub fn to_f64(&self) -> FloatEventTable {
        FloatEventTable {
            horizon: self.horizon,
            c2: self.c2.iter().map(ExactRational::to_f64).collect(),
            d1: self.d1.iter().map(ExactRational::to_f64).collect(),
            d2_gap: self.d2_gap.iter().map(ExactRational::to_f64).collect(),
        }
    }
}

/// Floating counterpart of [`EventTable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatEventTable {
    pub horizon: u64,
    c2: Vec<f64>,
    d1: Vec<f64>,
    d2_gap: Vec<f64>,
}

impl FloatEventTable {
    pub fn build(horizon: u64) -> Self {
        use rayon::prelude::*;
        Self {
            horizon,
            c2: (1..=horizon).into_par_iter().map(prob_c2_f64).collect(),
            d1: (0..=horizon).map(prob_d1_f64).collect(),
            d2_gap: (1..=horizon).map(prob_d2_f64).collect(),
        }
    }

    pub fn c2(&self, t: u64) -> f64 {
        self.c2[(t - 1) as usize]
    }

    pub fn d1(&self, t: u64) -> f64 {
        self.d1[t as usize]
    }

    pub fn d2_gap(&self, g: u64) -> f64 {
        self.d2_gap[(g - 1) as usize]
    }
}

/// One row of the convergence report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub t: u64,
    pub t_p_c2: f64,
    pub sqrt_t_p_d1: f64,
    pub sqrt_t_p_d2: f64,
    pub t_p_c1: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(t P(C2), sqrt(t) P(D1), sqrt(t) P(D2), t P(C1))` limits.
    pub limits: [f64; 4],
    pub rows: Vec<ConvergenceRow>,
}

/// Evaluation grid: every `t` up to 16, then doublings, then `t_max`.
pub fn convergence_grid(t_max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (2..=t_max.min(16)).collect();
    let mut t = 32;
    while t < t_max {
        grid.push(t);
        t *= 2;
    }
    if t_max > 16 {
        grid.push(t_max);
    }
    grid
}

pub fn convergence_row(t: u64) -> ConvergenceRow {
    let tf = t as f64;
    let exact = t <= EXACT_HORIZON;
    let (c2, d1, d2, c1) = if exact {
        (
            prob_c2(t).unwrap().to_f64(),
            prob_d1(t).to_f64(),
            prob_d2(t).unwrap().to_f64(),
            prob_c1(t).unwrap().to_f64(),
        )
    } else {
        (prob_c2_f64(t), prob_d1_f64(t), prob_d2_f64(t), prob_c1_f64(t))
    };
    ConvergenceRow {
        t,
        t_p_c2: tf * c2,
        sqrt_t_p_d1: tf.sqrt() * d1,
        sqrt_t_p_d2: tf.sqrt() * d2,
        t_p_c1: tf * c1,
        exact,
    }
}

pub fn convergence_report(t_max: u64) -> Result<ConvergenceReport> {
    if t_max < 2 {
        return precondition("convergence_report", "t_max must be >= 2");
    }
    use rayon::prelude::*;
    let rows = convergence_grid(t_max)
        .into_par_iter()
        .map(convergence_row)
        .collect();
    Ok(ConvergenceReport {
        limits: [LIMIT_T_C2, LIMIT_SQRT_T_D1, LIMIT_SQRT_T_D2, LIMIT_T_C1],
        rows,
    })
}

/// `P(S_j >= 0 for j <= n, S_n = 0)` by the reflection identity
/// `[C(n, n/2) - C(n, n/2 + 1)] / 2^n`; zero for odd `n`.
pub fn prob_nonneg_bridge(n: u64) -> ExactRational {
    if n % 2 == 1 {
        return ExactRational::zero();
    }
    let diff = BigInt::from(binomial(n, n / 2)) - BigInt::from(binomial(n, n / 2 + 1));
    ExactRational::from_dyadic(diff, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn double_factorial_conventions() {
        assert_eq!(double_factorial(-1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(0).unwrap(), BigUint::one());
        assert_eq!(double_factorial(5).unwrap(), BigUint::from(15u32));
        assert_eq!(double_factorial(6).unwrap(), BigUint::from(48u32));
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn recursion_examples() {
        assert_eq!(expectation_alpha_recursion(1).unwrap(), 1u64);
        assert_eq!(expectation_alpha_recursion(2).unwrap(), 1u64);
        assert_eq!(expectation_alpha_recursion(3).unwrap(), q(5, 4));
        assert_eq!(expectation_alpha_recursion(5).unwrap(), q(11, 8));
        assert!(expectation_alpha_recursion(0).is_err());
    }

    #[test]
    fn recursion_increments_are_double_factorial_quotients() {
        let mut it = AlphaExpectationRecursion::new();
        let mut prev = it.value();
        while it.n() < 200 {
            let n = it.n();
            it.advance();
            let cur = it.value();
            let inc = &cur - &prev;
            if n % 2 == 0 {
                assert_eq!(inc, recursion_increment(n).unwrap(), "n = {n}");
                // Same increment written as the nonnegative bridge probability.
                assert_eq!(inc, prob_nonneg_bridge(n));
            } else {
                assert!(inc.is_zero());
            }
            prev = cur;
        }
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(expectation_alpha_ladder(1).unwrap(), 1u64);
        assert_eq!(expectation_alpha_ladder(2).unwrap(), 1u64);
        assert_eq!(expectation_alpha_ladder(3).unwrap(), q(5, 4));
        assert!(expectation_alpha_ladder(0).is_err());
        for n in 1..=200 {
            assert_eq!(
                expectation_alpha_ladder(n).unwrap(),
                expectation_alpha_recursion(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn simple_event_examples() {
        assert_eq!(prob_return_zero(0), 1u64);
        assert_eq!(prob_return_zero(2), q(1, 2));
        assert_eq!(prob_return_zero(4), q(3, 8));
        assert_eq!(prob_return_zero(5), 0u64);
        assert_eq!(prob_d1(0), 1u64);
        assert_eq!(prob_d1(2), q(1, 2));
        assert_eq!(prob_d1(4), q(3, 8));
        assert_eq!(prob_d2(1).unwrap(), q(1, 2));
        assert_eq!(prob_d2(2).unwrap(), q(1, 4));
        assert_eq!(prob_d2(3).unwrap(), q(1, 4));
        assert!(prob_d2(0).is_err());
    }

    #[test]
    fn c_event_examples() {
        assert_eq!(prob_c2(1).unwrap(), q(1, 2));
        assert_eq!(prob_c2(2).unwrap(), q(1, 4));
        assert_eq!(prob_c2(3).unwrap(), q(1, 8));
        assert!(prob_c2(0).is_err());
        assert_eq!(prob_c1(1).unwrap(), 1u64);
        assert_eq!(prob_c1(2).unwrap(), q(1, 4));
        assert_eq!(prob_c1(4).unwrap(), q(1, 16));
        assert!(prob_c1(0).is_err());
    }

    #[test]
    fn strip_routes_agree() {
        for t in 1..=64u64 {
            for m in 0..=t + 1 {
                assert_eq!(strip_count_dp(t, m), strip_count_reflection(t, m), "t={t} m={m}");
            }
        }
    }

    #[test]
    fn increment_identity() {
        for n in (2..=200u64).step_by(2) {
            let lhs = prob_return_zero(n)
                - ExactRational::from_dyadic(BigInt::from(binomial(n, (n + 2) / 2)), n);
            let df = ExactRational::new(
                BigInt::from(double_factorial(n as i64 - 1).unwrap() * 2u32),
                BigInt::from(double_factorial(n as i64 + 2).unwrap()),
            );
            assert_eq!(lhs, df, "n = {n}");
        }
    }

    #[test]
    fn recursion_is_monotone_and_below_two() {
        let mut it = AlphaExpectationRecursion::new();
        let mut prev = it.value_f64();
        while it.n() < 3000 {
            let odd = it.n() % 2 == 1;
            let grew = it.advance();
            assert_eq!(grew, !odd);
            assert!(it.is_below(2));
            assert!(it.value_f64() >= prev);
            prev = it.value_f64();
        }
    }

    #[test]
    fn floating_routes_track_exact() {
        for t in [1u64, 2, 3, 7, 10, 33, 100, 257, 600, 1500] {
            let exact = prob_c2(t).unwrap().to_f64();
            let float = prob_c2_f64(t);
            let rel = ((float - exact) / exact).abs();
            assert!(rel <= 1e-12, "t = {t}: rel err {rel:e}");
            let d1 = prob_d1(t).to_f64();
            assert!(((prob_d1_f64(t) - d1) / d1).abs() <= 1e-12);
            let d2 = prob_d2(t).unwrap().to_f64();
            assert!(((prob_d2_f64(t) - d2) / d2).abs() <= 1e-12);
        }
        let row = binomial_pmf_row(9);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // log-gamma branch.
        let big = return_zero_f64(1 << 22);
        let approx = 1.0 / (PI * (1u64 << 21) as f64).sqrt();
        assert!((big / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn convergence_small_rows() {
        let rep = convergence_report(4).unwrap();
        assert_eq!(rep.rows[0].t, 2);
        assert_eq!(rep.rows[0].t_p_c2, 0.5);
        assert_eq!(rep.limits, [0.5, LIMIT_SQRT_T_D1, LIMIT_SQRT_T_D2, 0.25]);
        assert!((LIMIT_SQRT_T_D1 - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((LIMIT_SQRT_T_D2 - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!(convergence_report(1).is_err());
        assert_eq!(convergence_grid(100), {
            let mut g: Vec<u64> = (2..=16).collect();
            g.extend([32, 64, 100]);
            g
        });
    }

    #[test]
    fn event_table_matches_functions() {
        let table = EventTable::build(30);
        for t in 1..=30 {
            assert_eq!(table.c2(t).unwrap(), &prob_c2(t).unwrap());
            assert_eq!(table.d2_gap(t).unwrap(), &prob_d2(t).unwrap());
        }
        assert_eq!(table.d1(0).unwrap(), &ExactRational::one());
        assert!(table.c2(0).is_none());
        let f = table.to_f64();
        let g = FloatEventTable::build(30);
        for t in 1..=30 {
            assert!((f.c2(t) - g.c2(t)).abs() < 1e-15);
        }
    }
}
