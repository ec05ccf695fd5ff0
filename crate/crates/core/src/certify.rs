//! Bit-exact verification of a primal/dual pair: multiflow feasibility,
//! complementary slackness, and zero duality gap. Everything is integer
//! arithmetic on doubled quantities, so a clean certificate is exact.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::decompose::Multiflow;
use crate::grid::{pi2, star_dist2, GridPoint};
use crate::model::{DualProblem, Instance, PreparedInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Structural defect of one path (index into the path list).
    BadPath { index: usize, reason: String },
    CapacityExceeded { node: usize, used2: i64, cap2: i64 },
    /// A used edge whose dual constraint is slack.
    SlackEdgeUsed { edge: usize },
    /// Positive height with unsaturated capacity.
    Unsaturated { node: usize, used2: i64, cap2: i64 },
    /// A used path that is not geodesic in the embedding.
    NotGeodesic { index: usize },
    NotAPotential,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::BadPath { index, reason } => write!(f, "path {index}: {reason}"),
            Violation::CapacityExceeded { node, used2, cap2 } => write!(
                f,
                "capacity exceeded at node {}: {used2}/2 > {cap2}/2",
                node + 1
            ),
            Violation::SlackEdgeUsed { edge } => {
                write!(f, "flow on slack edge {edge}")
            }
            Violation::Unsaturated { node, used2, cap2 } => write!(
                f,
                "positive height but unsaturated node {}: {used2}/2 < {cap2}/2",
                node + 1
            ),
            Violation::NotGeodesic { index } => write!(f, "path {index} is not geodesic"),
            Violation::NotAPotential => write!(f, "dual point is not a potential"),
        }
    }
}

/// Structural feasibility of a multiflow: paths join distinct terminals
/// through distinct nonterminal nodes along instance edges, with positive
/// doubled values, and node capacities are respected.
pub fn check_multiflow(inst: &Instance, flow: &Multiflow) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut edge_set = alloc::collections::BTreeSet::new();
    for e in &inst.edges {
        edge_set.insert((e.u.min(e.v), e.u.max(e.v)));
    }
    for (index, path) in flow.paths.iter().enumerate() {
        let nodes = &path.nodes;
        let mut bad = |reason: &str| {
            out.push(Violation::BadPath {
                index,
                reason: reason.into(),
            })
        };
        if path.lambda2 <= 0 {
            bad("nonpositive value");
        }
        if nodes.len() < 2 {
            bad("fewer than two nodes");
            continue;
        }
        let (first, last) = (nodes[0], *nodes.last().unwrap());
        if !inst.is_terminal(first) || !inst.is_terminal(last) {
            bad("endpoint is not a terminal");
        }
        if first == last {
            bad("endpoints coincide");
        }
        if nodes[1..nodes.len() - 1].iter().any(|&v| inst.is_terminal(v)) {
            bad("terminal in the interior");
        }
        let mut seen = alloc::collections::BTreeSet::new();
        if !nodes.iter().all(|&v| seen.insert(v)) {
            bad("repeated node");
        }
        if nodes.iter().any(|&v| v >= inst.n) {
            bad("node id out of range");
            continue;
        }
        for w in nodes.windows(2) {
            if !edge_set.contains(&(w[0].min(w[1]), w[0].max(w[1]))) {
                out.push(Violation::BadPath {
                    index,
                    reason: format!("missing edge {} {}", w[0] + 1, w[1] + 1),
                });
            }
        }
    }
    let used2 = flow.node_flow2(inst.n);
    for i in inst.k..inst.n {
        if used2[i] > 2 * inst.capacity[i] {
            out.push(Violation::CapacityExceeded {
                node: i,
                used2: used2[i],
                cap2: 2 * inst.capacity[i],
            });
        }
    }
    out
}

/// Complementary slackness of a feasible pair: used edges are tight,
/// positive-height nodes are saturated, used paths embed to geodesics.
pub fn check_slackness(
    prob: &DualProblem,
    p: &[GridPoint],
    flow: &Multiflow,
) -> Vec<Violation> {
    let inst = prob.inst;
    let mut out = Vec::new();
    let edge_flow2 = flow.edge_flow2(inst);
    for (ei, (e, &d)) in inst.edges.iter().zip(&prob.costs).enumerate() {
        if edge_flow2[ei] > 0 && pi2(p[e.u], p[e.v]) != 4 * d {
            out.push(Violation::SlackEdgeUsed { edge: ei });
        }
    }
    let used2 = flow.node_flow2(inst.n);
    for i in inst.k..inst.n {
        if p[i].y2 > 0 && used2[i] != 2 * inst.capacity[i] {
            out.push(Violation::Unsaturated {
                node: i,
                used2: used2[i],
                cap2: 2 * inst.capacity[i],
            });
        }
    }
    for (index, path) in flow.paths.iter().enumerate() {
        if path.nodes.len() < 2 {
            continue;
        }
        let total: i64 = path
            .nodes
            .windows(2)
            .map(|w| star_dist2(p[w[0]].x, p[w[1]].x))
            .sum();
        if total != star_dist2(p[path.nodes[0]].x, p[*path.nodes.last().unwrap()].x) {
            out.push(Violation::NotGeodesic { index });
        }
    }
    out
}

/// Doubled duality gap: dual objective minus primal objective, nonnegative
/// for every feasible pair and zero exactly at joint optimality.
pub fn duality_gap2(prob: &DualProblem, p: &[GridPoint], flow: &Multiflow) -> Option<i64> {
    let h2 = prob.h2_core(p)?;
    let primal2 = prob.m * flow.value2() - flow.cost2(prob.inst, &prob.costs);
    Some(h2 - primal2)
}

/// A full certificate of one solve.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub value2: i64,
    pub cost2_original: i64,
    pub cost2_perturbed: i64,
    pub dual2h: i64,
    pub gap: i64,
    pub violations: Vec<Violation>,
}

impl Certificate {
    pub fn is_clean(&self) -> bool {
        self.gap == 0 && self.violations.is_empty()
    }
}

/// Certify a primal/dual pair against the prepared instance.
pub fn certify(prep: &PreparedInstance, p: &[GridPoint], flow: &Multiflow) -> Certificate {
    let prob = prep.full_problem();
    let inst = &prep.base;
    let mut violations = Vec::new();
    if !prob.is_potential_core(p) {
        violations.push(Violation::NotAPotential);
    }
    violations.extend(check_multiflow(inst, flow));
    violations.extend(check_slackness(&prob, p, flow));
    let original_costs: Vec<i64> = inst.edges.iter().map(|e| e.cost).collect();
    let dual2h = prob.h2_core(p).unwrap_or(i64::MAX);
    let gap = duality_gap2(&prob, p, flow).unwrap_or(i64::MAX);
    Certificate {
        value2: flow.value2(),
        cost2_original: flow.cost2(inst, &original_costs),
        cost2_perturbed: flow.cost2(inst, &prep.costs),
        dual2h,
        gap,
        violations,
    }
}
