//! Executable path transformations behind the increment rule for
//! `E alpha(n)`, with exhaustive certification on small horizons.
//!
//! Paths here are explicit position sequences; this module checks claims, it
//! is not on any hot path.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::binomial;
use crate::error::{precondition, refused, Result};
use crate::walk::{hitting_time, WalkPath};

pub const MAX_CERTIFIED_LENGTH: u32 = 20;

/// `sigma = sup{0 < k <= len : S_k = 1}`.
pub fn last_visit_to_one(path: &WalkPath) -> Option<usize> {
    let pos = path.positions();
    (1..pos.len()).rev().find(|&k| pos[k] == 1)
}

/// Keeps the path up to `sigma` and reflects it through level 1 afterwards
/// (`w'_k = 2 - w_k` for `k > sigma`).
pub fn flip_after_last_visit(path: &WalkPath) -> Result<WalkPath> {
    let Some(sigma) = last_visit_to_one(path) else {
        return refused("flip_after_last_visit", "path never visits level 1 after time 0");
    };
    let mut pos = path.positions();
    for p in pos.iter_mut().skip(sigma + 1) {
        *p = 2 - *p;
    }
    WalkPath::from_positions(&pos)
}

/// Reflects the path through `level` up to and including its first hitting
/// time of `level` (`w''_k = 2 level - w_k`), leaving the rest unchanged.
pub fn reflect_before_first_hit(path: &WalkPath, level: i64) -> Result<WalkPath> {
    let Some(sigma) = hitting_time(path, level) else {
        return refused(
            "reflect_before_first_hit",
            format!("path never hits level {level}"),
        );
    };
    let mut pos = path.positions();
    for p in pos.iter_mut().take(sigma + 1) {
        *p = 2 * level - *p;
    }
    WalkPath::from_positions(&pos)
}

/// Crossings of edge `<y, y+1>`.
fn edge_visits(pos: &[i64], y: i64) -> usize {
    pos.windows(2).filter(|w| w[0].min(w[1]) == y).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub length: u32,
    pub counts: BTreeMap<String, u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub n_plus_1: u32,
    pub claims: Vec<Claim>,
    pub all_pass: bool,
}

fn claim(name: &str, length: u32, counts: &[(&str, u64)], pass: bool) -> Claim {
    Claim {
        name: name.to_string(),
        length,
        counts: counts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        pass,
    }
}

fn all_paths(len: u32, start: i64) -> Vec<WalkPath> {
    (0..1u64 << len)
        .into_par_iter()
        .map(|bits| WalkPath::from_bits(bits, len, start))
        .collect()
}

/// Checks `f` maps `from` injectively into the set accepted by `target`, and
/// that applying `f` twice is the identity on `from`.
fn check_map(
    from: &[WalkPath],
    f: impl Fn(&WalkPath) -> Result<WalkPath> + Sync,
    target: impl Fn(&WalkPath) -> bool + Sync,
) -> (bool, bool, bool) {
    let images: Vec<Option<WalkPath>> = from.par_iter().map(|p| f(p).ok()).collect();
    let into = images.iter().all(|im| im.as_ref().is_some_and(&target));
    let distinct: HashSet<&WalkPath> = images.iter().flatten().collect();
    let injective = distinct.len() == from.len();
    let involution = from
        .par_iter()
        .zip(images.par_iter())
        .all(|(p, im)| im.as_ref().and_then(|im| f(im).ok()).as_ref() == Some(p));
    (into, injective, involution)
}

/// Exhaustively certifies, for walks of length `n_plus_1` from 0:
///
/// * the last-visit flip is a bijection between
///   `{L(0) = 1, X_1 = 1, sigma < n+1}` and `{L(0) = 2, X_1 = 1}`;
/// * `{L(0) = 1, X_1 = 1, sigma = n+1}` has as many paths as length-`n`
///   nonnegative bridges;
/// * for every even `m <= n_plus_1`, the first-hit reflection through `-1`
///   is a bijection between `{S_0 = 0, S_m = 0, sigma_{-1} <= m}` and
///   `{S_0 = -2, S_m = 0}`, both of size `C(m, m/2 + 1)`, and the number of
///   nonnegative bridges is `C(m, m/2) - C(m, m/2 + 1)`.
pub fn verify_injection_sets(n_plus_1: u32) -> Result<BijectionReport> {
    if n_plus_1 < 1 {
        return precondition("verify_injection_sets", "n_plus_1 must be >= 1");
    }
    if n_plus_1 > MAX_CERTIFIED_LENGTH {
        return refused(
            "verify_injection_sets",
            format!("n_plus_1 = {n_plus_1} exceeds {MAX_CERTIFIED_LENGTH}"),
        );
    }
    let len = n_plus_1;
    let paths = all_paths(len, 0);
    let first_up = |p: &WalkPath| p.steps()[0] == 1;
    let in_one = |p: &WalkPath| {
        let pos = p.positions();
        p.start() == 0
            && first_up(p)
            && edge_visits(&pos, 0) == 1
            && last_visit_to_one(p).is_some_and(|s| s < len as usize)
    };
    let in_two = |p: &WalkPath| {
        p.start() == 0 && first_up(p) && edge_visits(&p.positions(), 0) == 2
    };
    let set_one: Vec<WalkPath> = paths.iter().filter(|p| in_one(p)).cloned().collect();
    let set_two: Vec<WalkPath> = paths.iter().filter(|p| in_two(p)).cloned().collect();
    let (a, b) = (set_one.len() as u64, set_two.len() as u64);

    let mut claims = Vec::new();
    let (into, inj, inv) = check_map(&set_one, flip_after_last_visit, in_two);
    claims.push(claim(
        "flip maps {L=1, X1=1, sigma<n+1} injectively into {L=2, X1=1}",
        len,
        &[("domain", a), ("codomain", b)],
        into && inj,
    ));
    // Images land on L = 2 exactly, never L >= 3.
    let exact_two = set_one
        .iter()
        .filter_map(|p| flip_after_last_visit(p).ok())
        .all(|im| edge_visits(&im.positions(), 0) == 2);
    claims.push(claim(
        "flip images satisfy L(0,n+1) = 2 exactly",
        len,
        &[("images", a)],
        exact_two,
    ));
    let (into2, inj2, inv2) = check_map(&set_two, flip_after_last_visit, in_one);
    claims.push(claim(
        "flip maps {L=2, X1=1} injectively into {L=1, X1=1, sigma<n+1}",
        len,
        &[("domain", b), ("codomain", a)],
        into2 && inj2,
    ));
    claims.push(claim(
        "flip is an involution on both sets",
        len,
        &[("checked", a + b)],
        inv && inv2,
    ));
    claims.push(claim(
        "P(L=1, X1=1, sigma<n+1) = P(L=2, X1=1) as path counts",
        len,
        &[("lhs", a), ("rhs", b)],
        a == b,
    ));

    // sigma = n+1: the walk stays >= 1 and ends at 1.
    let n = len - 1;
    let last_leg = paths
        .iter()
        .filter(|p| {
            first_up(p)
                && edge_visits(&p.positions(), 0) == 1
                && last_visit_to_one(p) == Some(len as usize)
        })
        .count() as u64;
    let bridges_n = nonneg_bridges(n);
    claims.push(claim(
        "#{L=1, X1=1, sigma=n+1} = #{S_j >= 0, S_n = 0} (length n)",
        len,
        &[("lhs", last_leg), ("rhs", bridges_n)],
        last_leg == bridges_n,
    ));

    for m in (2..=len).step_by(2) {
        claims.extend(reflection_claims(m));
    }

    let all_pass = claims.iter().all(|c| c.pass);
    Ok(BijectionReport {
        n_plus_1,
        claims,
        all_pass,
    })
}

fn nonneg_bridges(m: u32) -> u64 {
    all_paths(m, 0)
        .iter()
        .filter(|p| p.terminal() == 0 && p.positions().iter().all(|&x| x >= 0))
        .count() as u64
}

fn reflection_claims(m: u32) -> Vec<Claim> {
    let mm = m as u64;
    let expected: u64 = binomial(mm, mm / 2 + 1).try_into().expect("fits");
    let from_zero: Vec<WalkPath> = all_paths(m, 0)
        .into_iter()
        .filter(|p| p.terminal() == 0 && hitting_time(p, -1).is_some())
        .collect();
    let from_minus_two: Vec<WalkPath> = all_paths(m, -2)
        .into_iter()
        .filter(|p| p.terminal() == 0)
        .collect();
    let reflect = |p: &WalkPath| reflect_before_first_hit(p, -1);
    let (into, inj, inv) = check_map(&from_zero, reflect, |p| p.start() == -2 && p.terminal() == 0);
    let (back_into, back_inj, back_inv) = check_map(&from_minus_two, reflect, |p| {
        p.start() == 0 && p.terminal() == 0 && hitting_time(p, -1).is_some()
    });
    let (l, r) = (from_zero.len() as u64, from_minus_two.len() as u64);
    let bridges = nonneg_bridges(m);
    let central: u64 = binomial(mm, mm / 2).try_into().expect("fits");
    vec![
        claim(
            "reflection through -1 is a bijection {S0=0, Sn=0, sigma_-1<=n} <-> {S0=-2, Sn=0}",
            m,
            &[("start_0", l), ("start_minus_2", r), ("binom(n,(n+2)/2)", expected)],
            into && inj && back_into && back_inj && inv && back_inv && l == r && r == expected,
        ),
        claim(
            "#{S_j >= 0, S_n = 0} = C(n,n/2) - C(n,(n+2)/2)",
            m,
            &[("bridges", bridges), ("binomial_difference", central - expected)],
            bridges == central - expected,
        ),
    ]
}
