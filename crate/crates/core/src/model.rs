//! Problem instances, preprocessing, and dual potentials.
//!
//! An instance is an undirected simple graph with terminals `0..k`, integer
//! capacities on nonterminal nodes, and integer costs on edges (no edge joins
//! two terminals). Preprocessing perturbs zero costs away and fixes the value
//! weight `M` as a power of two, which also sets up the scaling phases.
//!
//! A potential assigns each node a grid point; terminals are pinned at radius
//! `M` on their own branch at height zero. The dual objective is the
//! capacity-weighted sum of heights, infinite off the feasible set.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::grid::{pi2, star_dist2, GridPoint, StarPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: i64,
}

/// An undirected node-capacitated network with terminals `0..k`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Edge>,
    /// Capacity per node; zero on terminals.
    pub capacity: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    Malformed(String),
    TerminalEdge(usize, usize),
    DuplicateEdge(usize, usize),
    SelfLoop(usize),
    TooFewTerminals(usize),
    Negative(String),
    OutOfRange(String),
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::Malformed(s) => write!(f, "malformed input: {s}"),
            ModelError::TerminalEdge(u, v) => {
                write!(f, "edge joins two terminals: {} {}", u + 1, v + 1)
            }
            ModelError::DuplicateEdge(u, v) => {
                write!(f, "duplicate edge: {} {}", u + 1, v + 1)
            }
            ModelError::SelfLoop(u) => write!(f, "self-loop at node {}", u + 1),
            ModelError::TooFewTerminals(k) => {
                write!(f, "at least 3 terminals required, got {k}")
            }
            ModelError::Negative(s) => write!(f, "negative value: {s}"),
            ModelError::OutOfRange(s) => write!(f, "id out of range: {s}"),
        }
    }
}

impl Instance {
    pub fn new(
        n: usize,
        k: usize,
        edges: Vec<Edge>,
        capacity: Vec<i64>,
    ) -> Result<Self, ModelError> {
        if k < 3 {
            return Err(ModelError::TooFewTerminals(k));
        }
        if n < k {
            return Err(ModelError::Malformed(format!("n={n} smaller than k={k}")));
        }
        if capacity.len() != n {
            return Err(ModelError::Malformed(format!(
                "capacity vector has length {}, expected {n}",
                capacity.len()
            )));
        }
        for (i, &c) in capacity.iter().enumerate() {
            if c < 0 {
                return Err(ModelError::Negative(format!("capacity of node {}", i + 1)));
            }
            if i < k && c != 0 {
                return Err(ModelError::Malformed(format!(
                    "terminal {} carries a capacity",
                    i + 1
                )));
            }
        }
        let mut seen = alloc::collections::BTreeSet::new();
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(ModelError::OutOfRange(format!(
                    "edge {} {}",
                    e.u + 1,
                    e.v + 1
                )));
            }
            if e.u == e.v {
                return Err(ModelError::SelfLoop(e.u));
            }
            if e.u < k && e.v < k {
                return Err(ModelError::TerminalEdge(e.u, e.v));
            }
            if e.cost < 0 {
                return Err(ModelError::Negative(format!(
                    "cost of edge {} {}",
                    e.u + 1,
                    e.v + 1
                )));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return Err(ModelError::DuplicateEdge(e.u, e.v));
            }
        }
        Ok(Instance {
            n,
            k,
            edges,
            capacity,
        })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        i < self.k
    }

    /// Maximum node capacity.
    pub fn max_capacity(&self) -> i64 {
        self.capacity.iter().copied().max().unwrap_or(0)
    }

    pub fn max_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.cost).max().unwrap_or(0)
    }
}

/// Parse the plain-text instance format:
///
/// ```text
/// mnmf <n> <m> <k>
/// node <i> <capacity>      # one line per nonterminal i in {k+1..n}
/// edge <u> <v> <cost>      # m lines, 1-based ids
/// ```
///
/// `#` starts a comment; tokens are whitespace-separated.
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut caps: Vec<Option<i64>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let ctx = |what: &str| format!("line {}: {}", lineno + 1, what);
        let parse_u = |s: &str, what: &str| -> Result<usize, ModelError> {
            s.parse::<usize>()
                .map_err(|_| ModelError::Malformed(ctx(what)))
        };
        let parse_i = |s: &str, what: &str| -> Result<i64, ModelError> {
            s.parse::<i64>()
                .map_err(|_| ModelError::Malformed(ctx(what)))
        };
        match toks[0] {
            "mnmf" => {
                if header.is_some() || toks.len() != 4 {
                    return Err(ModelError::Malformed(ctx("header")));
                }
                let n = parse_u(toks[1], "n")?;
                let m = parse_u(toks[2], "m")?;
                let k = parse_u(toks[3], "k")?;
                header = Some((n, m, k));
                caps = vec![None; n];
            }
            "node" => {
                let (n, _, k) = header.ok_or_else(|| ModelError::Malformed(ctx("node before header")))?;
                if toks.len() != 3 {
                    return Err(ModelError::Malformed(ctx("node line")));
                }
                let i = parse_u(toks[1], "node id")?;
                let c = parse_i(toks[2], "capacity")?;
                if i < 1 || i > n {
                    return Err(ModelError::OutOfRange(ctx("node id")));
                }
                if i <= k {
                    return Err(ModelError::Malformed(ctx("capacity line for a terminal")));
                }
                if caps[i - 1].is_some() {
                    return Err(ModelError::Malformed(ctx("duplicate node line")));
                }
                if c < 0 {
                    return Err(ModelError::Negative(ctx("capacity")));
                }
                caps[i - 1] = Some(c);
            }
            "edge" => {
                let (n, _, _) = header.ok_or_else(|| ModelError::Malformed(ctx("edge before header")))?;
                if toks.len() != 4 {
                    return Err(ModelError::Malformed(ctx("edge line")));
                }
                let u = parse_u(toks[1], "edge endpoint")?;
                let v = parse_u(toks[2], "edge endpoint")?;
                let cost = parse_i(toks[3], "cost")?;
                if u < 1 || u > n || v < 1 || v > n {
                    return Err(ModelError::OutOfRange(ctx("edge endpoint")));
                }
                edges.push(Edge {
                    u: u - 1,
                    v: v - 1,
                    cost,
                });
            }
            other => {
                return Err(ModelError::Malformed(ctx(other)));
            }
        }
    }
    let (n, m, k) = header.ok_or_else(|| ModelError::Malformed("missing header".into()))?;
    if edges.len() != m {
        return Err(ModelError::Malformed(format!(
            "expected {m} edges, got {}",
            edges.len()
        )));
    }
    let mut capacity = Vec::with_capacity(n);
    for (i, c) in caps.into_iter().enumerate() {
        if i < k {
            capacity.push(0);
        } else {
            capacity.push(c.ok_or_else(|| {
                ModelError::Malformed(format!("missing capacity for node {}", i + 1))
            })?);
        }
    }
    Instance::new(n, k, edges, capacity)
}

/// Replace zero costs so that every cost is positive while preserving the
/// set of optimal multiflows: zero-cost edges get cost 1, every other edge
/// is scaled by `2*C*|Z| + 1` where `Z` is the zero-cost edge set.
pub fn perturb_costs(inst: &Instance) -> (Vec<i64>, usize) {
    let zero_count = inst.edges.iter().filter(|e| e.cost == 0).count() as i64;
    let factor = 2 * inst.max_capacity() * zero_count + 1;
    let d = inst
        .edges
        .iter()
        .map(|e| if e.cost == 0 { 1 } else { factor * e.cost })
        .collect();
    (d, zero_count as usize)
}

/// Smallest power of two strictly greater than `2*C*D'`, with its exponent.
pub fn choose_m(c_max: i64, d_max: i64) -> (i64, u32) {
    let bound = 2 * c_max * d_max;
    let mut m = 1i64;
    let mut mu = 0u32;
    while m <= bound {
        m *= 2;
        mu += 1;
    }
    (m, mu)
}

/// An instance together with perturbed positive costs and the value weight.
#[derive(Debug, Clone)]
pub struct PreparedInstance {
    pub base: Instance,
    /// Positive perturbed costs, parallel to `base.edges`.
    pub costs: Vec<i64>,
    /// Value weight, a power of two strictly greater than `2*C*max(costs)`.
    pub m: i64,
    pub mu: u32,
    pub zero_set_size: usize,
}

pub fn prepare(inst: Instance) -> PreparedInstance {
    let (costs, zero_set_size) = perturb_costs(&inst);
    let d_max = costs.iter().copied().max().unwrap_or(0);
    let (m, mu) = choose_m(inst.max_capacity(), d_max);
    PreparedInstance {
        base: inst,
        costs,
        m,
        mu,
        zero_set_size,
    }
}

impl PreparedInstance {
    /// The dual problem of one scaling phase: costs rounded up by `2^t`,
    /// value weight divided by the same power.
    pub fn phase(&self, t: u32) -> DualProblem<'_> {
        let div = 1i64 << t;
        let costs = self
            .costs
            .iter()
            .map(|&d| (d + div - 1) / div)
            .collect();
        DualProblem {
            inst: &self.base,
            costs,
            m: self.m >> t,
        }
    }

    /// The final (unscaled) dual problem, under the perturbed costs.
    pub fn full_problem(&self) -> DualProblem<'_> {
        self.phase(0)
    }
}

pub type GridVector = Vec<GridPoint>;

/// One dual problem: the instance, a positive integral cost function, and
/// the value weight for this phase.
#[derive(Debug, Clone)]
pub struct DualProblem<'a> {
    pub inst: &'a Instance,
    pub costs: Vec<i64>,
    pub m: i64,
}

impl<'a> DualProblem<'a> {
    /// The pinned coordinate of terminal `s`: radius `m` on branch `s`,
    /// height zero.
    pub fn terminal_point(&self, s: usize) -> GridPoint {
        GridPoint::new(StarPoint::on_branch(s, 2 * self.m), 0)
    }

    /// Feasibility of the edge and pinning constraints, heights included,
    /// without the radius normalization bound.
    pub fn is_potential_core(&self, p: &[GridPoint]) -> bool {
        if p.len() != self.inst.n {
            return false;
        }
        for s in 0..self.inst.k {
            if p[s] != self.terminal_point(s) {
                return false;
            }
        }
        if p.iter().any(|g| g.y2 < 0) {
            return false;
        }
        self.inst
            .edges
            .iter()
            .zip(&self.costs)
            .all(|(e, &d)| pi2(p[e.u], p[e.v]) <= 4 * d)
    }

    /// Full potential check: core constraints plus every radius at most `m`.
    pub fn is_potential(&self, p: &[GridPoint]) -> bool {
        self.is_potential_core(p) && p.iter().all(|g| g.x.radius2() <= 2 * self.m)
    }

    /// Doubled dual objective: `sum_i capacity(i) * y2(i)` over nonterminals,
    /// or `None` when `p` is not a potential.
    pub fn h2(&self, p: &[GridPoint]) -> Option<i64> {
        if self.is_potential(p) {
            Some(self.h2_unchecked(p))
        } else {
            None
        }
    }

    /// Same objective under the core feasibility check only.
    pub fn h2_core(&self, p: &[GridPoint]) -> Option<i64> {
        if self.is_potential_core(p) {
            Some(self.h2_unchecked(p))
        } else {
            None
        }
    }

    pub fn h2_unchecked(&self, p: &[GridPoint]) -> i64 {
        (self.inst.k..self.inst.n)
            .map(|i| self.inst.capacity[i] * p[i].y2)
            .sum()
    }

    /// Starting potential. At value weight 1 this is the optimal zero-height
    /// point (objective zero); otherwise nonterminals sit at the origin at
    /// height `m`, which is feasible for any costs.
    pub fn initial_potential(&self) -> GridVector {
        let nonterminal_y2 = if self.m == 1 { 0 } else { 2 * self.m };
        (0..self.inst.n)
            .map(|i| {
                if self.inst.is_terminal(i) {
                    self.terminal_point(i)
                } else {
                    GridPoint::origin(nonterminal_y2)
                }
            })
            .collect()
    }

    /// Pull every star coordinate back within radius `m`, preserving heights
    /// and hence the objective. Pulled-back distances never grow, so every
    /// edge constraint keeps holding.
    pub fn normalize_potential(&self, p: &[GridPoint]) -> GridVector {
        let r2_max = 2 * self.m;
        p.iter()
            .map(|&g| {
                if g.x.radius2() <= r2_max {
                    g
                } else {
                    let r2 = if g.is_integral() { r2_max } else { r2_max - 1 };
                    GridPoint::new(StarPoint::new(g.x.branch(), r2), g.y2)
                }
            })
            .collect()
    }
}

/// Doubled edge distance `2 * dist(x_u, x_v)` of an instance edge under a
/// potential.
pub fn edge_dist2(p: &[GridPoint], e: &Edge) -> i64 {
    star_dist2(p[e.u].x, p[e.v].x)
}
