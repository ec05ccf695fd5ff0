//! The bidirected support network of a potential, and the descent machinery
//! driven by its violating cuts.
//!
//! Each node splits into ports according to where its star coordinate sits:
//! a node at the origin gets one port per branch, a node off the origin gets
//! an origin-side and a far-side port, a terminal keeps a single port.
//! Tight edges (slack equal to twice the cost) are rewired between ports;
//! every off-origin node gets a crossing edge between its two ports and every
//! terminal a self-loop. A feasible flow of the resulting bidirected network
//! is a support of an optimal multiflow, so feasibility certifies optimality
//! of the potential. When infeasible, the maximum violating cut is normalized
//! into per-node movable shapes, split along the parity classes of the
//! current point, and mapped to the steepest descent direction.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::bisubflow::{
    bf_solve, BfOutcome, BiEdge, BiGroup, BidirectedNetwork, Cut, GroupKind, SignedGroupFunction,
};
use crate::ext::Ext;
use crate::grid::{parity, GridPoint, Parity, StarPoint};
use crate::model::{DualProblem, GridVector};
use crate::subflow::SfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortRole {
    /// Branch `s` port of a node at the origin.
    Branch(usize),
    /// Port toward the origin of a node off the origin.
    OriginSide,
    /// Port away from the origin of a node off the origin.
    FarSide,
    /// The single port of a terminal.
    Terminal,
}

#[derive(Debug, Clone, Copy)]
pub struct PortInfo {
    pub orig: usize,
    pub role: PortRole,
}

/// Port layout of one original node.
#[derive(Debug, Clone, Copy)]
pub enum NodePorts {
    /// Node at the origin: ports `first..first + k`, one per branch.
    Hub { first: usize, k: usize },
    /// Node off the origin.
    Sided { origin: usize, far: usize },
    Terminal { port: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Rewired tight instance edge.
    Eq { orig_edge: usize },
    /// Crossing edge between the two ports of an off-origin node.
    Minus { orig_node: usize },
    /// Terminal self-loop.
    Loop { terminal: usize },
}

#[derive(Debug, Clone)]
pub struct SupportNetwork {
    pub bi: BidirectedNetwork,
    pub ports: Vec<PortInfo>,
    pub node_ports: Vec<NodePorts>,
    pub classes: Vec<EdgeClass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualError {
    NotAPotential,
    Solver(SfError),
    Invariant(String),
}

impl core::fmt::Display for DualError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DualError::NotAPotential => write!(f, "point is not a potential"),
            DualError::Solver(e) => write!(f, "{e}"),
            DualError::Invariant(s) => write!(f, "internal invariant violation: {s}"),
        }
    }
}

impl From<SfError> for DualError {
    fn from(e: SfError) -> Self {
        DualError::Solver(e)
    }
}

/// Build the support network of a potential. Requires positive costs and a
/// normalized potential (all radii within the value weight).
pub fn build_support_network(
    prob: &DualProblem,
    p: &[GridPoint],
) -> Result<SupportNetwork, DualError> {
    if !prob.is_potential(p) {
        return Err(DualError::NotAPotential);
    }
    let inst = prob.inst;
    let mut ports: Vec<PortInfo> = Vec::new();
    let mut node_ports: Vec<NodePorts> = Vec::with_capacity(inst.n);
    for i in 0..inst.n {
        if inst.is_terminal(i) {
            node_ports.push(NodePorts::Terminal { port: ports.len() });
            ports.push(PortInfo {
                orig: i,
                role: PortRole::Terminal,
            });
        } else if p[i].x.is_origin() {
            node_ports.push(NodePorts::Hub {
                first: ports.len(),
                k: inst.k,
            });
            for s in 0..inst.k {
                ports.push(PortInfo {
                    orig: i,
                    role: PortRole::Branch(s),
                });
            }
        } else {
            node_ports.push(NodePorts::Sided {
                origin: ports.len(),
                far: ports.len() + 1,
            });
            ports.push(PortInfo {
                orig: i,
                role: PortRole::OriginSide,
            });
            ports.push(PortInfo {
                orig: i,
                role: PortRole::FarSide,
            });
        }
    }

    // port of node `i` for a tight edge toward the position `other`
    let attach = |i: usize, other: StarPoint| -> usize {
        let x = p[i].x;
        match node_ports[i] {
            NodePorts::Terminal { port } => port,
            NodePorts::Hub { first, .. } => {
                let s = other.branch().expect("tight edge between two origin nodes");
                first + s
            }
            NodePorts::Sided { origin, far } => {
                if other.is_origin() || other.branch() != x.branch() {
                    origin
                } else if x.radius2() < other.radius2() {
                    far
                } else {
                    origin
                }
            }
        }
    };

    let mut edges: Vec<BiEdge> = Vec::new();
    let mut classes: Vec<EdgeClass> = Vec::new();
    for (ei, (e, &d)) in inst.edges.iter().zip(&prob.costs).enumerate() {
        if crate::grid::pi2(p[e.u], p[e.v]) != 4 * d {
            continue;
        }
        assert_ne!(p[e.u].x, p[e.v].x, "tight edge between coincident positions");
        if p[e.u].x.branch() == p[e.v].x.branch() && !p[e.u].x.is_origin() {
            // same branch: the nearer endpoint must be a nonterminal
            let nearer = if p[e.u].x.radius2() < p[e.v].x.radius2() {
                e.u
            } else {
                e.v
            };
            assert!(!inst.is_terminal(nearer), "terminal inside the radius range");
        }
        edges.push(BiEdge {
            u: attach(e.u, p[e.v].x),
            v: attach(e.v, p[e.u].x),
            sign_u: 1,
            sign_v: 1,
            lower: Ext::Fin(0),
            upper: Ext::PosInf,
        });
        classes.push(EdgeClass::Eq { orig_edge: ei });
    }
    for i in inst.k..inst.n {
        if let NodePorts::Sided { origin, far } = node_ports[i] {
            let lower = if p[i].y2 > 0 { inst.capacity[i] } else { 0 };
            edges.push(BiEdge {
                u: origin,
                v: far,
                sign_u: -1,
                sign_v: -1,
                lower: Ext::Fin(lower),
                upper: Ext::Fin(inst.capacity[i]),
            });
            classes.push(EdgeClass::Minus { orig_node: i });
        }
    }
    for s in 0..inst.k {
        let NodePorts::Terminal { port } = node_ports[s] else {
            unreachable!()
        };
        edges.push(BiEdge {
            u: port,
            v: port,
            sign_u: -1,
            sign_v: -1,
            lower: Ext::Fin(0),
            upper: Ext::PosInf,
        });
        classes.push(EdgeClass::Loop { terminal: s });
    }

    let mut groups: Vec<BiGroup> = Vec::new();
    for i in 0..inst.n {
        match node_ports[i] {
            NodePorts::Hub { first, k } => {
                let kind = if p[i].y2 > 0 {
                    GroupKind::TightNodeFlowing {
                        cap: inst.capacity[i],
                    }
                } else {
                    GroupKind::NodeFlowing {
                        cap: inst.capacity[i],
                    }
                };
                groups.push(BiGroup {
                    func: SignedGroupFunction::new(kind, k),
                    members: (first..first + k).collect(),
                });
            }
            NodePorts::Sided { origin, far } => {
                for port in [origin, far] {
                    groups.push(BiGroup {
                        func: SignedGroupFunction::new(GroupKind::ZeroForcing, 1),
                        members: vec![port],
                    });
                }
            }
            NodePorts::Terminal { port } => {
                groups.push(BiGroup {
                    func: SignedGroupFunction::new(GroupKind::ZeroForcing, 1),
                    members: vec![port],
                });
            }
        }
    }

    Ok(SupportNetwork {
        bi: BidirectedNetwork {
            n: ports.len(),
            edges,
            groups,
        },
        ports,
        node_ports,
        classes,
    })
}

/// A feasible support: doubled half-integral edge weights on the support
/// network.
#[derive(Debug, Clone)]
pub struct Support {
    pub net: SupportNetwork,
    /// Doubled weights, parallel to `net.bi.edges`.
    pub psi2: Vec<i64>,
}

#[derive(Debug)]
pub enum SupportOutcome {
    Feasible(Support),
    Violated { net: SupportNetwork, cut: Cut },
}

/// Solve the support feasibility problem at a potential. Feasible exactly
/// when the potential is optimal.
pub fn find_feasible_support(
    prob: &DualProblem,
    p: &[GridPoint],
) -> Result<SupportOutcome, DualError> {
    let net = build_support_network(prob, p)?;
    match bf_solve(&net.bi)? {
        BfOutcome::Flow(psi2) => Ok(SupportOutcome::Feasible(Support { net, psi2 })),
        BfOutcome::MaxViolatingCut(cut) => Ok(SupportOutcome::Violated { net, cut }),
    }
}

/// Check the defining conditions of a feasible support; returns the list of
/// violated conditions (empty for a genuine support).
pub fn verify_support(prob: &DualProblem, p: &[GridPoint], sup: &Support) -> Vec<String> {
    let mut out = Vec::new();
    let net = &sup.net;
    let inst = prob.inst;
    let mut grad2 = vec![0i64; net.bi.n];
    for (e, &w) in net.bi.edges.iter().zip(&sup.psi2) {
        if w < 0 {
            out.push(format!("negative support weight {w}"));
        }
        grad2[e.u] += e.sign_u as i64 * w;
        grad2[e.v] += e.sign_v as i64 * w;
        let lo = e.lower.finite();
        if w < 2 * lo {
            out.push(format!("weight {w} below doubled lower bound {}", 2 * lo));
        }
        if let Ext::Fin(hi) = e.upper {
            if w > 2 * hi {
                out.push(format!("weight {w} above doubled upper bound {}", 2 * hi));
            }
        }
    }
    for i in 0..inst.n {
        match net.node_ports[i] {
            NodePorts::Terminal { port } => {
                if grad2[port] != 0 {
                    out.push(format!("terminal {i} has nonzero boundary"));
                }
            }
            NodePorts::Sided { origin, far } => {
                if grad2[origin] != 0 || grad2[far] != 0 {
                    out.push(format!("off-origin node {i} has nonzero boundary"));
                }
            }
            NodePorts::Hub { first, k } => {
                let total: i64 = (first..first + k).map(|u| grad2[u]).sum();
                for u in first..first + k {
                    if grad2[u] - (total - grad2[u]) > 0 {
                        out.push(format!("branch balance fails at node {i}"));
                    }
                }
                let cap4 = 4 * inst.capacity[i];
                if p[i].y2 > 0 {
                    if total != cap4 {
                        out.push(format!("node {i} not saturated: {total} != {cap4}"));
                    }
                } else if total > cap4 {
                    out.push(format!("node {i} over capacity: {total} > {cap4}"));
                }
                if total % 2 != 0 || total < 0 {
                    out.push(format!("node {i} boundary not a nonnegative integer"));
                }
            }
        }
    }
    out
}

/// Per-node shape of a movable cut. `t` is a local port index: the branch
/// for a hub, `0` for the origin side / `1` for the far side otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeShape {
    Empty,
    FullY,
    FullZ,
    SingleY(usize),
    SingleYRestZ(usize),
    RestZ(usize),
}

fn node_port_list(np: NodePorts) -> Vec<usize> {
    match np {
        NodePorts::Hub { first, k } => (first..first + k).collect(),
        NodePorts::Sided { origin, far } => vec![origin, far],
        NodePorts::Terminal { port } => vec![port],
    }
}

/// Classify a cut restricted to one node, if it is one of the movable
/// shapes for that node's height.
pub fn classify_shape(np: NodePorts, y2: i64, cut: &Cut) -> Option<NodeShape> {
    let ports = node_port_list(np);
    if matches!(np, NodePorts::Terminal { .. }) {
        return (!cut.y[ports[0]] && !cut.z[ports[0]]).then_some(NodeShape::Empty);
    }
    let y_local: Vec<usize> = (0..ports.len()).filter(|&t| cut.y[ports[t]]).collect();
    let z_local: Vec<usize> = (0..ports.len()).filter(|&t| cut.z[ports[t]]).collect();
    let k = ports.len();
    let shape = match (y_local.len(), z_local.len()) {
        (0, 0) => NodeShape::Empty,
        (yc, 0) if yc == k => NodeShape::FullY,
        (0, zc) if zc == k => NodeShape::FullZ,
        (1, 0) => NodeShape::SingleY(y_local[0]),
        (1, zc) if zc == k - 1 => NodeShape::SingleYRestZ(y_local[0]),
        (0, zc) if zc == k - 1 => {
            let t = (0..k).find(|t| !z_local.contains(t)).unwrap();
            NodeShape::RestZ(t)
        }
        _ => return None,
    };
    match shape {
        NodeShape::FullZ | NodeShape::RestZ(_) if y2 == 0 => None,
        _ => Some(shape),
    }
}

/// All movable shapes for a node kind and height, in a fixed order.
pub fn movable_shapes(np: NodePorts, y2: i64) -> Vec<NodeShape> {
    let k = node_port_list(np).len();
    let mut shapes = vec![NodeShape::Empty, NodeShape::FullY];
    for t in 0..k {
        shapes.push(NodeShape::SingleY(t));
        shapes.push(NodeShape::SingleYRestZ(t));
    }
    if y2 > 0 {
        shapes.push(NodeShape::FullZ);
        for t in 0..k {
            shapes.push(NodeShape::RestZ(t));
        }
    }
    shapes
}

/// The grid move encoded by a movable shape at one node.
pub fn apply_shape(g: GridPoint, np: NodePorts, shape: NodeShape) -> GridPoint {
    let hub = matches!(np, NodePorts::Hub { .. });
    let step_x = |t: usize, halves: i64| -> StarPoint {
        if hub {
            StarPoint::on_branch(t, halves)
        } else {
            let dir = if t == 1 { 1 } else { -1 };
            let r2 = g.x.radius2() + dir * halves;
            assert!(r2 >= 0, "move toward the origin from too small a radius");
            StarPoint::new(g.x.branch(), r2)
        }
    };
    match shape {
        NodeShape::Empty => g,
        NodeShape::FullY => GridPoint::new(g.x, g.y2 + 2),
        NodeShape::FullZ => GridPoint::new(g.x, g.y2 - 2),
        NodeShape::SingleY(t) => GridPoint::new(step_x(t, 1), g.y2 + 1),
        NodeShape::RestZ(t) => GridPoint::new(step_x(t, 1), g.y2 - 1),
        NodeShape::SingleYRestZ(t) => GridPoint::new(step_x(t, 2), g.y2),
    }
}

/// Normalize a maximum violating cut into movable form, preserving its
/// violation value exactly: clear terminal ports from the negative side,
/// clear the negative side of height-zero nodes it cannot help, drop small
/// negative parts at hubs, and promote hubs with two or more positive ports
/// to fully positive.
pub fn make_movable(
    prob: &DualProblem,
    p: &[GridPoint],
    net: &SupportNetwork,
    cut: &Cut,
) -> Result<Cut, DualError> {
    let before = net.bi.violation(cut);
    let mut c = cut.clone();
    for i in 0..prob.inst.n {
        match net.node_ports[i] {
            NodePorts::Terminal { port } => {
                if c.y[port] {
                    return Err(DualError::Invariant(
                        "violating cut touches a terminal from the positive side".into(),
                    ));
                }
                c.z[port] = false;
            }
            NodePorts::Sided { origin, far } => {
                if p[i].y2 == 0 && !c.y[origin] && !c.y[far] {
                    c.z[origin] = false;
                    c.z[far] = false;
                }
            }
            NodePorts::Hub { first, k } => {
                let ports: Vec<usize> = (first..first + k).collect();
                let yc = ports.iter().filter(|&&u| c.y[u]).count();
                let zc = ports.iter().filter(|&&u| c.z[u]).count();
                if p[i].y2 == 0 && yc == 0 {
                    for &u in &ports {
                        c.z[u] = false;
                    }
                } else if yc <= 1 && (1..=k - 2).contains(&zc) {
                    for &u in &ports {
                        c.z[u] = false;
                    }
                } else if yc >= 2 {
                    for &u in &ports {
                        c.y[u] = true;
                        c.z[u] = false;
                    }
                }
            }
        }
    }
    let after = net.bi.violation(&c);
    if before != after {
        return Err(DualError::Invariant(format!(
            "movable normalization changed the violation: {before} -> {after}"
        )));
    }
    for i in 0..prob.inst.n {
        if classify_shape(net.node_ports[i], p[i].y2, &c).is_none() {
            return Err(DualError::Invariant(format!(
                "cut is not movable at node {i}"
            )));
        }
    }
    Ok(c)
}

/// Which side of the parity split each port belongs to: `true` for the
/// ascending (up-set) side.
pub fn ascending_ports(p: &[GridPoint], net: &SupportNetwork) -> Vec<bool> {
    let mut up = vec![false; net.bi.n];
    for i in 0..net.node_ports.len() {
        let par = parity(p[i]);
        match net.node_ports[i] {
            NodePorts::Hub { first, k } => {
                debug_assert!(par.is_integral());
                for u in first..first + k {
                    up[u] = par == Parity::Even;
                }
            }
            NodePorts::Terminal { port } => {
                up[port] = par == Parity::Even;
            }
            NodePorts::Sided { origin, far } => match par {
                Parity::Even => {
                    up[origin] = true;
                    up[far] = true;
                }
                Parity::Odd => {}
                // the far port ascends from a point whose shift lands even,
                // the origin port from one whose shift lands odd
                Parity::NonIntEven => up[far] = true,
                Parity::NonIntOdd => up[origin] = true,
            },
        }
    }
    up
}

/// Split a movable cut along the parity classes into an ascending part and
/// a descending part; the violation splits additively.
pub fn split_fi(
    p: &[GridPoint],
    net: &SupportNetwork,
    cut: &Cut,
) -> Result<(Cut, Cut), DualError> {
    let up = ascending_ports(p, net);
    let restrict = |keep_up: bool| -> Cut {
        let mut c = Cut::empty(net.bi.n);
        for u in 0..net.bi.n {
            if up[u] == keep_up {
                c.y[u] = cut.y[u];
                c.z[u] = cut.z[u];
            }
        }
        c
    };
    let f_cut = restrict(true);
    let i_cut = restrict(false);
    let total = net.bi.violation(cut);
    let f_v = net.bi.violation(&f_cut);
    let i_v = net.bi.violation(&i_cut);
    match (total, f_v, i_v) {
        (Ext::Fin(t), Ext::Fin(f), Ext::Fin(i)) if t == f + i => Ok((f_cut, i_cut)),
        _ => Err(DualError::Invariant(format!(
            "violation does not split additively: {total} != {f_v} + {i_v}"
        ))),
    }
}

/// Map a movable (sub)cut to the grid vector it encodes: terminals stay
/// pinned, every other node moves by its shape.
pub fn apply_cut(
    prob: &DualProblem,
    p: &[GridPoint],
    net: &SupportNetwork,
    cut: &Cut,
) -> Result<GridVector, DualError> {
    let mut q = Vec::with_capacity(p.len());
    for i in 0..prob.inst.n {
        let np = net.node_ports[i];
        let shape = classify_shape(np, p[i].y2, cut).ok_or_else(|| {
            DualError::Invariant(format!("cut is not movable at node {i}"))
        })?;
        if prob.inst.is_terminal(i) {
            q.push(p[i]);
        } else {
            q.push(apply_shape(p[i], np, shape));
        }
    }
    Ok(q)
}

/// One descent step candidate.
#[derive(Debug, Clone)]
pub struct Descent {
    /// The chosen neighbor, before radius normalization.
    pub q: GridVector,
    /// Exact doubled decrease of the objective.
    pub delta2h: i64,
    /// Violations of the ascending and descending parts of the movable cut.
    pub viol_up: i64,
    pub viol_down: i64,
}

#[derive(Debug)]
pub enum Direction {
    Optimal(Support),
    Descent(Descent),
}

/// Optimality test and steepest descent direction at a potential: feasible
/// support means optimal; otherwise the maximum violating cut, made movable
/// and split by parity, yields the best ascending and descending neighbors,
/// and the better of the two decreases the objective by exactly half the
/// part's violation (in doubled units, by the violation itself).
pub fn steepest_direction(prob: &DualProblem, p: &[GridPoint]) -> Result<Direction, DualError> {
    let (net, cut) = match find_feasible_support(prob, p)? {
        SupportOutcome::Feasible(sup) => return Ok(Direction::Optimal(sup)),
        SupportOutcome::Violated { net, cut } => (net, cut),
    };
    let movable = make_movable(prob, p, &net, &cut)?;
    let (f_cut, i_cut) = split_fi(p, &net, &movable)?;
    let h2_here = prob
        .h2_core(p)
        .ok_or_else(|| DualError::Invariant("descent from an infeasible point".into()))?;

    let evaluate = |part: &Cut| -> Result<(GridVector, i64), DualError> {
        let viol = match net.bi.violation(part) {
            Ext::Fin(v) => v,
            v => {
                return Err(DualError::Invariant(format!(
                    "movable part has non-finite violation {v}"
                )))
            }
        };
        let q = apply_cut(prob, p, &net, part)?;
        match prob.h2_core(&q) {
            Some(h2_q) if h2_q == h2_here - viol => Ok((q, viol)),
            other => Err(DualError::Invariant(format!(
                "descent identity fails: h2 {other:?} vs {h2_here} - {viol}"
            ))),
        }
    };
    let (q_f, viol_f) = evaluate(&f_cut)?;
    let (q_i, viol_i) = evaluate(&i_cut)?;
    // prefer the ascending candidate on ties
    let (q, delta2h) = if viol_f >= viol_i {
        (q_f, viol_f)
    } else {
        (q_i, viol_i)
    };
    if delta2h <= 0 {
        return Err(DualError::Invariant(
            "no improving neighbor at a non-optimal potential".into(),
        ));
    }
    Ok(Direction::Descent(Descent {
        q,
        delta2h,
        viol_up: viol_f,
        viol_down: viol_i,
    }))
}
