//! Recover a half-integral multiflow from a feasible support.
//!
//! Walks are traced in doubled units: one unit is a path of value one half.
//! A walk starts at a terminal with remaining tight-edge weight, descends
//! toward the origin crossing each off-origin node through its two ports,
//! turns exactly once (at a node on the origin, or along a tight edge whose
//! endpoints sit on different branches), and ascends to another terminal.
//! At an origin node the exit branch is the one with the largest remaining
//! boundary weight among branches other than the entry; pairing against the
//! largest entry keeps the branch-balance condition invariant, so a walk can
//! never strand weight. Used-up weights are decremented as walks are traced
//! and must come out exactly zero.

use alloc::vec::Vec;
use alloc::{format, vec};

use crate::dualnet::{DualError, EdgeClass, NodePorts, Support};
use crate::grid::star_dist2;
use crate::model::{DualProblem, Instance};

/// A path between two distinct terminals with a doubled flow value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath {
    pub nodes: Vec<usize>,
    pub lambda2: i64,
}

/// A multiflow as a list of weighted terminal-to-terminal paths.
#[derive(Debug, Clone, Default)]
pub struct Multiflow {
    pub paths: Vec<FlowPath>,
}

impl Multiflow {
    /// Doubled total value.
    pub fn value2(&self) -> i64 {
        self.paths.iter().map(|p| p.lambda2).sum()
    }

    /// Doubled flow through each node.
    pub fn node_flow2(&self, n: usize) -> Vec<i64> {
        let mut f = vec![0i64; n];
        for p in &self.paths {
            for &v in &p.nodes {
                f[v] += p.lambda2;
            }
        }
        f
    }

    /// Doubled flow on each instance edge.
    pub fn edge_flow2(&self, inst: &Instance) -> Vec<i64> {
        let mut index = alloc::collections::BTreeMap::new();
        for (ei, e) in inst.edges.iter().enumerate() {
            index.insert((e.u.min(e.v), e.u.max(e.v)), ei);
        }
        let mut f = vec![0i64; inst.edges.len()];
        for p in &self.paths {
            for w in p.nodes.windows(2) {
                let key = (w[0].min(w[1]), w[0].max(w[1]));
                let ei = index[&key];
                f[ei] += p.lambda2;
            }
        }
        f
    }

    /// Doubled cost under the given edge costs.
    pub fn cost2(&self, inst: &Instance, costs: &[i64]) -> i64 {
        self.edge_flow2(inst)
            .iter()
            .zip(costs)
            .map(|(&f2, &d)| f2 * d)
            .sum()
    }
}

/// Decompose a feasible support into a multiflow whose support weights
/// reproduce the input exactly.
pub fn support_to_multiflow(
    prob: &DualProblem,
    sup: &Support,
) -> Result<Multiflow, DualError> {
    let inst = prob.inst;
    let net = &sup.net;
    let mut residual = sup.psi2.clone();

    // tight edges incident to each port
    let mut eq_at: Vec<Vec<usize>> = vec![Vec::new(); net.bi.n];
    let mut minus_edge: Vec<Option<usize>> = vec![None; inst.n];
    for (ei, class) in net.classes.iter().enumerate() {
        match class {
            EdgeClass::Eq { .. } => {
                let e = &net.bi.edges[ei];
                eq_at[e.u].push(ei);
                eq_at[e.v].push(ei);
            }
            EdgeClass::Minus { orig_node } => minus_edge[*orig_node] = Some(ei),
            EdgeClass::Loop { .. } => {}
        }
    }
    let other_end = |ei: usize, port: usize| -> usize {
        let e = &net.bi.edges[ei];
        if e.u == port {
            e.v
        } else {
            e.u
        }
    };

    let mut raw_paths: Vec<Vec<usize>> = Vec::new();
    'walks: loop {
        // lowest terminal with remaining tight-edge weight
        let mut start: Option<(usize, usize)> = None;
        'scan: for s in 0..inst.k {
            let NodePorts::Terminal { port } = net.node_ports[s] else {
                unreachable!()
            };
            for &ei in &eq_at[port] {
                if residual[ei] > 0 {
                    start = Some((s, ei));
                    break 'scan;
                }
            }
        }
        let Some((s, first_edge)) = start else {
            break 'walks;
        };

        let mut nodes = vec![s];
        let NodePorts::Terminal { port: sport } = net.node_ports[s] else {
            unreachable!()
        };
        residual[first_edge] -= 1;
        let mut port = other_end(first_edge, sport);
        loop {
            let i = net.ports[port].orig;
            if nodes.contains(&i) {
                return Err(DualError::Invariant(format!(
                    "walk revisits node {i}"
                )));
            }
            nodes.push(i);
            match net.node_ports[i] {
                NodePorts::Terminal { .. } => break,
                NodePorts::Sided { origin, far } => {
                    let ei = minus_edge[i].expect("off-origin node without crossing edge");
                    if residual[ei] < 1 {
                        return Err(DualError::Invariant(format!(
                            "crossing weight exhausted at node {i}"
                        )));
                    }
                    residual[ei] -= 1;
                    let exit_port = if port == origin { far } else { origin };
                    let next = eq_at[exit_port]
                        .iter()
                        .copied()
                        .find(|&e| residual[e] > 0)
                        .ok_or_else(|| {
                            DualError::Invariant(format!("walk stuck at node {i}"))
                        })?;
                    residual[next] -= 1;
                    port = other_end(next, exit_port);
                }
                NodePorts::Hub { first, k } => {
                    let entry = port - first;
                    // remaining weight per branch
                    let branch_weight = |b: usize| -> i64 {
                        eq_at[first + b].iter().map(|&e| residual[e]).sum()
                    };
                    let exit = (0..k)
                        .filter(|&b| b != entry)
                        .max_by_key(|&b| (branch_weight(b), core::cmp::Reverse(b)))
                        .filter(|&b| branch_weight(b) > 0)
                        .ok_or_else(|| {
                            DualError::Invariant(format!("walk stuck at origin node {i}"))
                        })?;
                    let next = eq_at[first + exit]
                        .iter()
                        .copied()
                        .find(|&e| residual[e] > 0)
                        .unwrap();
                    residual[next] -= 1;
                    port = other_end(next, first + exit);
                }
            }
        }
        let t = *nodes.last().unwrap();
        if t == s {
            return Err(DualError::Invariant(
                "walk returned to its starting terminal".into(),
            ));
        }
        // canonical orientation: smaller terminal first
        if nodes[0] > *nodes.last().unwrap() {
            nodes.reverse();
        }
        raw_paths.push(nodes);
    }

    // every non-loop weight must be used up
    for (ei, class) in net.classes.iter().enumerate() {
        if !matches!(class, EdgeClass::Loop { .. }) && residual[ei] != 0 {
            return Err(DualError::Invariant(format!(
                "support weight left over on edge {ei}"
            )));
        }
    }

    raw_paths.sort();
    let mut paths: Vec<FlowPath> = Vec::new();
    for nodes in raw_paths {
        match paths.last_mut() {
            Some(last) if last.nodes == nodes => last.lambda2 += 1,
            _ => paths.push(FlowPath { nodes, lambda2: 1 }),
        }
    }
    Ok(Multiflow { paths })
}

/// Recompute support weights from a multiflow: tight-edge weights are edge
/// flows, crossing weights are node flows, loop weights are half the
/// terminal flows. Used to check the decomposition round trip.
pub fn support_weights_of(
    prob: &DualProblem,
    sup: &Support,
    flow: &Multiflow,
) -> Result<Vec<i64>, DualError> {
    let inst = prob.inst;
    let edge_flow2 = flow.edge_flow2(inst);
    let node_flow2 = flow.node_flow2(inst.n);
    sup.net
        .classes
        .iter()
        .map(|class| match class {
            EdgeClass::Eq { orig_edge } => Ok(edge_flow2[*orig_edge]),
            EdgeClass::Minus { orig_node } => Ok(node_flow2[*orig_node]),
            EdgeClass::Loop { terminal } => {
                if node_flow2[*terminal] % 2 != 0 {
                    Err(DualError::Invariant(format!(
                        "odd number of path ends at terminal {terminal}"
                    )))
                } else {
                    Ok(node_flow2[*terminal] / 2)
                }
            }
        })
        .collect()
}

/// Every path, embedded by the potential, must be a geodesic of the star.
pub fn paths_are_geodesic(p: &[crate::grid::GridPoint], flow: &Multiflow) -> bool {
    flow.paths.iter().all(|path| {
        let total: i64 = path
            .nodes
            .windows(2)
            .map(|w| star_dist2(p[w[0]].x, p[w[1]].x))
            .sum();
        total == star_dist2(p[path.nodes[0]].x, p[*path.nodes.last().unwrap()].x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualnet::find_feasible_support;
    use crate::dualnet::SupportOutcome;
    use crate::grid::GridPoint;
    use crate::model::{prepare, Edge, Instance};

    fn star_instance() -> Instance {
        Instance::new(
            4,
            3,
            vec![
                Edge { u: 0, v: 3, cost: 1 },
                Edge { u: 1, v: 3, cost: 1 },
                Edge { u: 2, v: 3, cost: 1 },
            ],
            vec![0, 0, 0, 1],
        )
        .unwrap()
    }

    #[test]
    fn star_support_decomposes_to_one_path() {
        let prep = prepare(star_instance());
        let prob = prep.full_problem();
        let mut p = prob.initial_potential();
        p[3] = GridPoint::origin(4);
        let sup = match find_feasible_support(&prob, &p).unwrap() {
            SupportOutcome::Feasible(sup) => sup,
            _ => panic!("optimal point must have a support"),
        };
        let flow = support_to_multiflow(&prob, &sup).unwrap();
        assert_eq!(flow.value2(), 2);
        // 2 half-units through the hub, saturating its capacity
        assert_eq!(flow.node_flow2(4)[3], 2);
        assert!(paths_are_geodesic(&p, &flow));
        // round trip: recomputed weights equal the input support
        let back = support_weights_of(&prob, &sup, &flow).unwrap();
        assert_eq!(back, sup.psi2);
    }

    #[test]
    fn empty_support_gives_empty_multiflow() {
        let prep = prepare(star_instance());
        let phase = prep.phase(prep.mu);
        let p = phase.initial_potential();
        let sup = match find_feasible_support(&phase, &p).unwrap() {
            SupportOutcome::Feasible(sup) => sup,
            _ => panic!("zero-height start is optimal at the coarsest phase"),
        };
        let flow = support_to_multiflow(&phase, &sup).unwrap();
        assert_eq!(flow.value2(), 0);
        assert!(flow.paths.is_empty());
    }
}
