//! Deterministic pseudorandom instance generation, for test suites and
//! fuzzing. A fixed seed always yields the same instance on every platform.

use alloc::vec::Vec;

use crate::model::{Edge, Instance};

/// SplitMix64 generator: tiny, seedable, platform-independent.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (`n > 0`).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Bounds for the random instance generator.
#[derive(Debug, Clone, Copy)]
pub struct GenBounds {
    pub k_min: usize,
    pub k_max: usize,
    /// Maximum node count (at least `k + 1` is always used).
    pub n_max: usize,
    pub m_max: usize,
    pub cap_max: i64,
    pub cost_max: i64,
}

/// A connected random instance within the bounds: a spanning tree whose
/// terminals hang off nonterminals, plus random extra edges avoiding
/// terminal pairs and duplicates. Costs may be zero; capacities may be zero.
pub fn random_instance(rng: &mut Rng64, b: &GenBounds) -> Instance {
    let k = rng.range(b.k_min as i64, b.k_max as i64) as usize;
    let n = rng.range((k + 1) as i64, b.n_max.max(k + 1) as i64) as usize;
    let mut edges: Vec<Edge> = Vec::new();
    let mut present = alloc::collections::BTreeSet::new();
    let mut add = |edges: &mut Vec<Edge>, u: usize, v: usize, cost: i64| -> bool {
        let key = (u.min(v), u.max(v));
        if u == v || (u < k && v < k) || !present.insert(key) {
            return false;
        }
        edges.push(Edge { u, v, cost });
        true
    };
    // tree over nonterminals
    for i in (k + 1)..n {
        let j = k + rng.below((i - k) as u64) as usize;
        let cost = rng.range(0, b.cost_max);
        add(&mut edges, i, j, cost);
    }
    // each terminal attaches to some nonterminal
    for s in 0..k {
        let j = k + rng.below((n - k) as u64) as usize;
        let cost = rng.range(0, b.cost_max);
        add(&mut edges, s, j, cost);
    }
    // extra edges
    let target = rng.range(edges.len() as i64, b.m_max.max(edges.len()) as i64) as usize;
    let mut attempts = 0;
    while edges.len() < target && attempts < 20 * target + 50 {
        attempts += 1;
        let u = rng.below(n as u64) as usize;
        let v = rng.below(n as u64) as usize;
        let cost = rng.range(0, b.cost_max);
        add(&mut edges, u, v, cost);
    }
    let mut capacity = alloc::vec![0i64; n];
    for c in capacity.iter_mut().skip(k) {
        *c = rng.range(0, b.cap_max);
    }
    Instance::new(n, k, edges, capacity).expect("generator produced an invalid instance")
}
