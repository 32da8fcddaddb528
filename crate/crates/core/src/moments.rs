//! Binomial moments `E C(alpha(n), k)` through the ladder decomposition.
//!
//! A `k`-set of positive rare edges is a chain of ladder times
//! `j_1 < ... < j_k`: a running maximum at `j_1` (`D1`), strict records with
//! no return in between (`C2` on each gap), and no return after `j_k`
//! (`D2`). With `r = j_k - j_1`,
//!
//! `E alpha+_k(n) = sum_{r=k-1}^{n-1} H(n - r) f^{*(k-1)}(r)`
//!
//! where `H(g) = sum_{j<g} P(D1(j)) P(D2 gap g-j)` and `f(t) = P(C2(t))`.
//! The negative side has the same law and `alpha+ alpha- = 0`, so
//! `E alpha_k = 2 E alpha+_k` for `k >= 1`.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{c2_path_count, expectation_alpha_ladder, CentralBinomials, FloatEventTable};
use crate::error::{precondition, refused, Result};
use crate::rational::ExactRational;

/// Largest `n` evaluated with exact rationals.
pub const EXACT_MOMENT_HORIZON: u64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMode {
    Exact,
    Floating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub n: u64,
    pub k: u64,
    pub mode: MomentMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentValue {
    Exact(ExactRational),
    Floating(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => r.to_f64(),
            Self::Floating(x) => *x,
        }
    }
}

impl MomentRequest {
    fn validate(&self) -> Result<()> {
        if self.n < 1 || self.k < 1 {
            return precondition("MomentRequest", format!("need n >= 1 and k >= 1, got n={} k={}", self.n, self.k));
        }
        if self.mode == MomentMode::Exact && self.n > EXACT_MOMENT_HORIZON {
            return refused(
                "MomentRequest",
                format!("exact mode is limited to n <= {EXACT_MOMENT_HORIZON}; use floating mode"),
            );
        }
        Ok(())
    }

    pub fn alpha_k_plus(&self) -> Result<MomentValue> {
        self.validate()?;
        Ok(match self.mode {
            MomentMode::Exact => MomentValue::Exact(expected_alpha_k_plus(self.n, self.k)?),
            MomentMode::Floating => {
                MomentValue::Floating(FloatMoments::new(self.n).alpha_k_plus(self.n, self.k))
            }
        })
    }

    pub fn alpha_k(&self) -> Result<MomentValue> {
        Ok(match self.alpha_k_plus()? {
            MomentValue::Exact(r) => MomentValue::Exact(&r + &r),
            MomentValue::Floating(x) => MomentValue::Floating(2.0 * x),
        })
    }
}

/// Exact evaluator with integer tables scaled by powers of two:
/// `f(t) = c2[t] / 2^t`, `H(g) = h[g] / 2^(g+2)`.
#[derive(Clone, Debug)]
pub struct ExactMoments {
    horizon: u64,
    c2: Vec<BigUint>,
    h: Vec<BigUint>,
}

impl ExactMoments {
    pub fn new(horizon: u64) -> Self {
        let c2 = (0..=horizon)
            .into_par_iter()
            .map(|t| if t == 0 { BigUint::zero() } else { c2_path_count(t) })
            .collect();
        let mut central = CentralBinomials::new();
        central.get(horizon / 2 + 1);
        let h = (0..=horizon).map(|g| ladder_kernel(&mut central, g)).collect();
        Self { horizon, c2, h }
    }

    /// `H(g)`.
    pub fn ladder_weight(&self, gap: u64) -> ExactRational {
        ExactRational::from_dyadic(BigInt::from(self.h[gap as usize].clone()), gap + 2)
    }

    /// `W(r, n) = sum_{j=0}^{n-1-r} P(D1(j)) P(D2(j + r, n))`, summed
    /// directly over `j` rather than through `H`.
    pub fn window_weight(&self, r: u64, n: u64) -> ExactRational {
        use crate::closed_form::{prob_d1, prob_d2};
        let mut acc = ExactRational::zero();
        for j in 0..n - r {
            acc = &acc + &(&prob_d1(j) * &prob_d2(n - j - r).expect("gap >= 1"));
        }
        acc
    }

    /// Integer numerators of the `(k-1)`-fold convolution of `f` over
    /// `r = 0..=max`, each over `2^r`.
    fn convolution_power(&self, layers: u64, max: u64) -> Vec<BigUint> {
        let len = max as usize + 1;
        let mut cur = vec![BigUint::zero(); len];
        cur[0] = BigUint::from(1u32);
        for _ in 0..layers {
            let next: Vec<BigUint> = (0..len)
                .into_par_iter()
                .map(|r| {
                    let mut acc = BigUint::zero();
                    for y in 1..=r {
                        if !cur[r - y].is_zero() {
                            acc += &cur[r - y] * &self.c2[y];
                        }
                    }
                    acc
                })
                .collect();
            cur = next;
        }
        cur
    }

    pub fn alpha_k_plus(&self, n: u64, k: u64) -> ExactRational {
        assert!(n >= 1 && n <= self.horizon && k >= 1);
        if k > n {
            return ExactRational::zero();
        }
        let g = self.convolution_power(k - 1, n - 1);
        let mut acc = BigUint::zero();
        for r in (k - 1)..n {
            let gr = &g[r as usize];
            if !gr.is_zero() {
                acc += &self.h[(n - r) as usize] * gr;
            }
        }
        ExactRational::from_dyadic(BigInt::from(acc), n + 2)
    }
}

/// `H(g) * 2^(g+2)`.
fn ladder_kernel(central: &mut CentralBinomials, g: u64) -> BigUint {
    let mut acc = BigUint::zero();
    for j in 0..g {
        let a = j.div_ceil(2);
        let b = (g - j) / 2;
        // P(D1(j)) P(D2(g-j)) = C(2a,a) C(2b,b) / 2^(2a+2b+1)
        acc += (central.get(a).clone() * central.get(b)) << (g + 1 - 2 * a - 2 * b);
    }
    acc
}

/// Floating evaluator on a shared event table.
#[derive(Clone, Debug)]
pub struct FloatMoments {
    table: FloatEventTable,
    h: Vec<f64>,
}

impl FloatMoments {
    pub fn new(horizon: u64) -> Self {
        Self::from_table(FloatEventTable::build(horizon.max(1)))
    }

    pub fn from_table(table: FloatEventTable) -> Self {
        let h = (0..=table.horizon)
            .map(|g| (0..g).map(|j| table.d1(j) * table.d2_gap(g - j)).sum())
            .collect();
        Self { table, h }
    }

    pub fn alpha_k_plus(&self, n: u64, k: u64) -> f64 {
        assert!(n >= 1 && n <= self.table.horizon && k >= 1);
        if k > n {
            return 0.0;
        }
        let len = n as usize;
        let mut cur = vec![0.0; len];
        cur[0] = 1.0;
        for _ in 1..k {
            let next: Vec<f64> = (0..len)
                .map(|r| (1..=r).map(|y| cur[r - y] * self.table.c2(y as u64)).sum())
                .collect();
            cur = next;
        }
        ((k - 1)..n).map(|r| self.h[(n - r) as usize] * cur[r as usize]).sum()
    }

    pub fn alpha_k(&self, n: u64, k: u64) -> f64 {
        2.0 * self.alpha_k_plus(n, k)
    }
}

/// `E alpha+_k(n)`, exact.
pub fn expected_alpha_k_plus(n: u64, k: u64) -> Result<ExactRational> {
    if n < 1 || k < 1 {
        return precondition("expected_alpha_k_plus", "need n >= 1 and k >= 1");
    }
    if n > EXACT_MOMENT_HORIZON {
        return refused(
            "expected_alpha_k_plus",
            format!("exact mode is limited to n <= {EXACT_MOMENT_HORIZON}"),
        );
    }
    if k == 1 {
        let full = expectation_alpha_ladder(n)?;
        return Ok(&full / &ExactRational::from(2u64));
    }
    Ok(ExactMoments::new(n).alpha_k_plus(n, k))
}

/// `E alpha_k(n) = E C(alpha(n), k)`, exact.
pub fn expected_alpha_k(n: u64, k: u64) -> Result<ExactRational> {
    let half = expected_alpha_k_plus(n, k)?;
    Ok(&half + &half)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u64,
    pub k: u64,
    pub moment: f64,
    pub lower: f64,
    pub upper: f64,
    /// `moment^(1/k) / ln n`.
    pub ratio: f64,
    pub in_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub a: f64,
    pub epsilon: f64,
    pub band: (f64, f64),
    pub rows: Vec<GrowthRow>,
}

/// Compares `E alpha_k(n)` with `[(1/2 -+ eps) ln n]^k` for `k = round(a ln n)`
/// (at least 1). Natural logarithms throughout. Report only.
pub fn lemma_growth_report(n_list: &[u64], a: f64, epsilon: f64) -> Result<GrowthReport> {
    if !(a > 0.0) {
        return precondition("lemma_growth_report", "a must be > 0");
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return precondition("lemma_growth_report", "epsilon must lie in (0, 1/2)");
    }
    if let Some(bad) = n_list.iter().find(|&&n| n < 2) {
        return precondition("lemma_growth_report", format!("n = {bad} < 2 has ln n <= 0"));
    }
    let max_n = n_list.iter().copied().max().unwrap_or(2);
    let engine = FloatMoments::new(max_n);
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let ln = (n as f64).ln();
            let k = ((a * ln).round() as u64).max(1);
            let moment = engine.alpha_k(n, k);
            let lower = ((0.5 - epsilon) * ln).powi(k as i32);
            let upper = ((0.5 + epsilon) * ln).powi(k as i32);
            let ratio = moment.powf(1.0 / k as f64) / ln;
            GrowthRow {
                n,
                k,
                moment,
                lower,
                upper,
                ratio,
                in_band: lower < moment && moment < upper,
            }
        })
        .collect();
    Ok(GrowthReport {
        a,
        epsilon,
        band: (0.5 - epsilon, 0.5 + epsilon),
        rows,
    })
}
