//! Sample paths and edge/site local times.
//!
//! Edge `<y, y+1>` is keyed by its left endpoint `y`. The positive side holds
//! edges with `y >= 0`, the negative side edges with `y <= -1`, so `<-1, 0>`
//! is a negative edge.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

/// A finite nearest-neighbour path on Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkPath {
    steps: Vec<i8>,
    start: i64,
}

impl WalkPath {
    pub fn new(steps: Vec<i8>, start: i64) -> Result<Self> {
        if let Some(k) = steps.iter().position(|s| *s != 1 && *s != -1) {
            return precondition("WalkPath::new", format!("step {k} is {}, not ±1", steps[k]));
        }
        Ok(Self { steps, start })
    }

    pub fn from_origin(steps: Vec<i8>) -> Result<Self> {
        Self::new(steps, 0)
    }

    /// Bit `i` of `bits` set means step `i+1` goes up.
    pub fn from_bits(bits: u64, len: u32, start: i64) -> Self {
        assert!(len <= 64);
        let steps = (0..len)
            .map(|i| if (bits >> i) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { steps, start }
    }

    /// Rebuilds a path from its position sequence.
    pub fn from_positions(positions: &[i64]) -> Result<Self> {
        let Some(&start) = positions.first() else {
            return precondition("WalkPath::from_positions", "empty position sequence");
        };
        let mut steps = Vec::with_capacity(positions.len() - 1);
        for w in positions.windows(2) {
            match w[1] - w[0] {
                1 => steps.push(1),
                -1 => steps.push(-1),
                d => {
                    return precondition(
                        "WalkPath::from_positions",
                        format!("positions {} -> {} differ by {d}", w[0], w[1]),
                    )
                }
            }
        }
        Ok(Self { steps, start })
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `positions[0] = start`, `positions[k] = start + steps[0] + ... + steps[k-1]`.
    pub fn positions(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut pos = self.start;
        out.push(pos);
        for &s in &self.steps {
            pos += s as i64;
            out.push(pos);
        }
        out
    }

    pub fn terminal(&self) -> i64 {
        self.start + self.steps.iter().map(|&s| s as i64).sum::<i64>()
    }

    /// Path with every step negated, started from `-start`.
    pub fn negated(&self) -> Self {
        Self {
            steps: self.steps.iter().map(|s| -s).collect(),
            start: -self.start,
        }
    }
}

/// Rare-edge counts `(alpha, alpha_plus, alpha_minus)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RareEdges {
    pub alpha: u64,
    pub alpha_plus: u64,
    pub alpha_minus: u64,
}

/// Edge local times `L(y, n)` stored densely over the visited range, with
/// the rare-edge counts maintained on every crossing.
#[derive(Clone, Debug)]
pub struct EdgeLedger {
    counts: Vec<u32>,
    /// Edge key stored at `counts[0]`.
    base: i64,
    /// Touched key range, inclusive; empty when `lo > hi`.
    lo: i64,
    hi: i64,
    rare: RareEdges,
    steps: u64,
}

impl Default for EdgeLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl EdgeLedger {
    pub fn new() -> Self {
        Self::with_capacity(16)
    }

    pub fn with_capacity(cap: usize) -> Self {
        let cap = cap.max(4);
        Self {
            counts: vec![0; cap],
            base: -(cap as i64) / 2,
            lo: 1,
            hi: 0,
            rare: RareEdges::default(),
            steps: 0,
        }
    }

    /// Zeroes the touched range, keeping the allocation.
    pub fn clear(&mut self) {
        if self.lo <= self.hi {
            let a = (self.lo - self.base) as usize;
            let b = (self.hi - self.base) as usize;
            self.counts[a..=b].fill(0);
        }
        self.lo = 1;
        self.hi = 0;
        self.rare = RareEdges::default();
        self.steps = 0;
    }

    /// Makes keys `lo..=hi` addressable, re-centring with geometric growth.
    pub(crate) fn ensure_keys(&mut self, lo: i64, hi: i64) {
        let end = self.base + self.counts.len() as i64;
        if lo >= self.base && hi < end {
            return;
        }
        let (t_lo, t_hi) = if self.lo <= self.hi {
            (self.lo.min(lo), self.hi.max(hi))
        } else {
            (lo, hi)
        };
        let need = (t_hi - t_lo + 1) as usize;
        let cap = (self.counts.len() * 2).max(need * 2);
        let new_base = t_lo - ((cap - need) / 2) as i64;
        let mut fresh = vec![0u32; cap];
        if self.lo <= self.hi {
            let src = (self.lo - self.base) as usize..=(self.hi - self.base) as usize;
            let dst = (self.lo - new_base) as usize;
            let len = (self.hi - self.lo + 1) as usize;
            fresh[dst..dst + len].copy_from_slice(&self.counts[src]);
        }
        self.counts = fresh;
        self.base = new_base;
    }

    /// Records one step `from -> to`.
    pub fn extend(&mut self, from: i64, to: i64) -> Result<()> {
        if (to - from).abs() != 1 {
            return precondition(
                "EdgeLedger::extend",
                format!("positions {from} and {to} are not adjacent"),
            );
        }
        let y = from.min(to);
        self.ensure_keys(y, y);
        let slot = &mut self.counts[(y - self.base) as usize];
        *slot += 1;
        let c = *slot;
        let side = if y >= 0 {
            &mut self.rare.alpha_plus
        } else {
            &mut self.rare.alpha_minus
        };
        match c {
            1 => {
                self.rare.alpha += 1;
                *side += 1;
            }
            2 => {
                self.rare.alpha -= 1;
                *side -= 1;
            }
            _ => {}
        }
        if self.lo > self.hi {
            self.lo = y;
            self.hi = y;
        } else {
            self.lo = self.lo.min(y);
            self.hi = self.hi.max(y);
        }
        self.steps += 1;
        Ok(())
    }

    /// Feeds every step of `path`.
    pub fn from_path(path: &WalkPath) -> Self {
        let mut ledger = Self::new();
        let mut pos = path.start();
        for &s in path.steps() {
            let next = pos + s as i64;
            ledger.extend(pos, next).expect("unit steps are adjacent");
            pos = next;
        }
        ledger
    }

    pub fn count(&self, y: i64) -> u32 {
        let idx = y - self.base;
        if idx < 0 || idx >= self.counts.len() as i64 {
            0
        } else {
            self.counts[idx as usize]
        }
    }

    pub fn rare(&self) -> RareEdges {
        self.rare
    }

    pub fn alpha(&self) -> u64 {
        self.rare.alpha
    }

    pub fn alpha_plus(&self) -> u64 {
        self.rare.alpha_plus
    }

    pub fn alpha_minus(&self) -> u64 {
        self.rare.alpha_minus
    }

    pub fn steps_consumed(&self) -> u64 {
        self.steps
    }

    /// Touched key range, if any step was recorded.
    pub fn key_range(&self) -> Option<(i64, i64)> {
        (self.lo <= self.hi).then_some((self.lo, self.hi))
    }

    /// `(y, L(y, n))` over the touched range, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        let (lo, hi) = self.key_range().unwrap_or((1, 0));
        (lo..=hi).map(move |y| (y, self.counts[(y - self.base) as usize]))
    }

    pub(crate) fn raw(&mut self) -> (&mut [u32], i64) {
        (&mut self.counts, self.base)
    }

    /// Declares the touched range and step total after raw writes.
    pub(crate) fn set_touched(&mut self, lo: i64, hi: i64, steps: u64) {
        self.lo = lo;
        self.hi = hi;
        self.steps = steps;
    }

    /// Recomputes the rare-edge counts from the stored local times.
    pub fn rescan(&mut self) -> RareEdges {
        let mut rare = RareEdges::default();
        for (y, c) in self.iter() {
            if c == 1 {
                rare.alpha += 1;
                if y >= 0 {
                    rare.alpha_plus += 1;
                } else {
                    rare.alpha_minus += 1;
                }
            }
        }
        self.rare = rare;
        rare
    }

    /// Number of sites visited exactly once, recovered from edge local times:
    /// `2 xi(x, n) = L(x-1, n) + L(x, n) + [x = start] + [x = terminal]`.
    pub fn sites_visited_once(&self, start: i64, terminal: i64) -> u64 {
        let Some((lo, hi)) = self.key_range() else {
            // No step taken: only the start site, visited once.
            return 1;
        };
        let mut f1 = 0;
        for x in lo..=hi + 1 {
            let twice = self.count(x - 1) as i64
                + self.count(x) as i64
                + (x == start) as i64
                + (x == terminal) as i64;
            if twice == 2 {
                f1 += 1;
            }
        }
        f1
    }

    /// Checks the ledger invariants for a walk `start -> terminal`; returns
    /// the names of the violated ones.
    pub fn invariant_violations(&self, start: i64, terminal: i64) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let total: u64 = self.iter().map(|(_, c)| c as u64).sum();
        if total != self.steps {
            bad.push("sum of local times != steps");
        }
        let r = self.rare;
        if r.alpha != r.alpha_plus + r.alpha_minus {
            bad.push("alpha != alpha_plus + alpha_minus");
        }
        if r.alpha_plus > 0 && r.alpha_minus > 0 {
            bad.push("alpha_plus * alpha_minus != 0");
        }
        let ones = self.iter().filter(|&(_, c)| c == 1).count() as u64;
        if ones != r.alpha {
            bad.push("alpha != #{y : L(y,n) = 1}");
        }
        let (a, b) = (start.min(terminal), start.max(terminal));
        if self.iter().any(|(y, c)| (c % 2 == 1) != (a <= y && y < b)) {
            bad.push("parity law");
        }
        if terminal == start && r.alpha != 0 {
            bad.push("closed walk with rare edges");
        }
        bad
    }
}

/// Site occupation times `xi(x, n)`, time 0 included.
#[derive(Clone, Debug, Default)]
pub struct SiteLedger {
    visits: BTreeMap<i64, u64>,
    f1: u64,
}

impl SiteLedger {
    pub fn new(start: i64) -> Self {
        let mut s = Self::default();
        s.visit(start);
        s
    }

    pub fn visit(&mut self, x: i64) {
        let v = self.visits.entry(x).or_insert(0);
        *v += 1;
        match *v {
            1 => self.f1 += 1,
            2 => self.f1 -= 1,
            _ => {}
        }
    }

    pub fn from_path(path: &WalkPath) -> Self {
        let positions = path.positions();
        let mut s = Self::new(positions[0]);
        for &x in &positions[1..] {
            s.visit(x);
        }
        s
    }

    pub fn visits(&self, x: i64) -> u64 {
        self.visits.get(&x).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.visits.values().sum()
    }

    pub fn f1(&self) -> u64 {
        self.f1
    }
}

/// Rare-edge counts by direct tabulation of the crossings of `path`.
pub fn rare_edge_count(path: &WalkPath) -> RareEdges {
    let mut counts: HashMap<i64, u32> = HashMap::new();
    let positions = path.positions();
    for w in positions.windows(2) {
        *counts.entry(w[0].min(w[1])).or_insert(0) += 1;
    }
    let mut r = RareEdges::default();
    for (&y, &c) in &counts {
        if c == 1 {
            r.alpha += 1;
            if y >= 0 {
                r.alpha_plus += 1;
            } else {
                r.alpha_minus += 1;
            }
        }
    }
    r
}

/// `f1(n)`: sites occupied at exactly one time in `0..=n`.
pub fn rare_site_count(path: &WalkPath) -> u64 {
    let mut visits: HashMap<i64, u32> = HashMap::new();
    for x in path.positions() {
        *visits.entry(x).or_insert(0) += 1;
    }
    visits.values().filter(|&&v| v == 1).count() as u64
}

/// First time `k >= 0` with `positions[k] == x`.
pub fn hitting_time(path: &WalkPath, x: i64) -> Option<usize> {
    path.positions().iter().position(|&p| p == x)
}
