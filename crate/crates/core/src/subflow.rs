//! Submodular flow feasibility on a directed graph, with the submodular
//! function given as a direct sum of per-group functions over a partition of
//! the ground set.
//!
//! The solver keeps a bounds-feasible flow and a base vector of the
//! submodular function and drives the surplus (flow boundary minus base
//! vector) to zero along shortest augmenting paths of the auxiliary network,
//! whose arcs are flow residuals plus in-group exchange arcs of positive
//! exchange capacity. Shortest paths admit no shortcuts, so the combined
//! exchange steps keep the base vector inside the base polyhedron. When some
//! surplus remains and no sink is reachable, the reachable set is a violating
//! cut; since any cut's violation is bounded by the current total positive
//! surplus, that cut is maximum.

use alloc::vec;
use alloc::vec::Vec;

use crate::bisubflow::SignedGroupFunction;
use crate::ext::Ext;

#[derive(Debug, Clone, Copy)]
pub struct SfArc {
    pub tail: usize,
    pub head: usize,
    pub lower: Ext,
    pub upper: Ext,
}

#[derive(Debug, Clone)]
pub struct SfGroup {
    pub func: SignedGroupFunction,
    /// Global element ids in local signed order (plus/minus interleaved).
    pub elements: Vec<usize>,
}

/// A directed network with arc bounds and a separable submodular boundary
/// constraint.
#[derive(Debug, Clone)]
pub struct SfNetwork {
    pub ground: usize,
    pub arcs: Vec<SfArc>,
    pub groups: Vec<SfGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SfError {
    BadGroups(&'static str),
    Internal(&'static str),
}

impl core::fmt::Display for SfError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SfError::BadGroups(s) => write!(f, "invalid group structure: {s}"),
            SfError::Internal(s) => write!(f, "internal invariant violation: {s}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SfOutcome {
    /// An integral feasible flow, per arc.
    Flow(Vec<i64>),
    /// A maximum violating cut as a membership vector over the ground set.
    MaxViolatingCut(Vec<bool>),
}

impl SfNetwork {
    pub fn validate(&self) -> Result<(), SfError> {
        let mut owner = vec![false; self.ground];
        for g in &self.groups {
            if g.elements.len() != g.func.ground_size() {
                return Err(SfError::BadGroups("group element count mismatch"));
            }
            for &e in &g.elements {
                if e >= self.ground || owner[e] {
                    return Err(SfError::BadGroups("groups must partition the ground set"));
                }
                owner[e] = true;
            }
            if g.func.rho((1u32 << g.func.ground_size()) - 1) != 0 {
                return Err(SfError::BadGroups("group function must vanish on its ground"));
            }
        }
        if owner.iter().any(|&o| !o) {
            return Err(SfError::BadGroups("uncovered element"));
        }
        for a in &self.arcs {
            assert!(a.tail < self.ground && a.head < self.ground);
            assert!(a.lower <= a.upper);
            assert!(a.lower != Ext::PosInf && a.upper != Ext::NegInf);
        }
        Ok(())
    }

    /// Cut function: lower bounds on arcs leaving the set minus upper bounds
    /// on arcs entering it.
    pub fn cut_value(&self, x: &[bool]) -> Ext {
        let mut total = Ext::Fin(0);
        for a in &self.arcs {
            if x[a.tail] && !x[a.head] {
                total = total.add(a.lower);
            } else if !x[a.tail] && x[a.head] {
                total = total.add(a.upper.scale(-1));
            }
        }
        total
    }

    /// Separable submodular value of a subset.
    pub fn rho_value(&self, x: &[bool]) -> i64 {
        self.groups
            .iter()
            .map(|g| {
                let mut mask = 0u32;
                for (loc, &e) in g.elements.iter().enumerate() {
                    if x[e] {
                        mask |= 1 << loc;
                    }
                }
                g.func.rho(mask)
            })
            .sum()
    }

    fn boundary(&self, phi: &[i64]) -> Vec<i64> {
        let mut grad = vec![0i64; self.ground];
        for (a, &f) in self.arcs.iter().zip(phi) {
            grad[a.tail] += f;
            grad[a.head] -= f;
        }
        grad
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Decrease flow on the arc (traversed tail to head).
    ArcDec(usize),
    /// Increase flow on the arc (traversed head to tail).
    ArcInc(usize),
    /// In-group exchange from the previous element.
    Exchange,
}

/// Solve the feasibility problem: an integral feasible flow, or a maximum
/// violating cut.
pub fn sf_solve(net: &SfNetwork) -> Result<SfOutcome, SfError> {
    net.validate()?;
    let ground = net.ground;

    // element -> (group index, local signed index)
    let mut locate = vec![(usize::MAX, 0usize); ground];
    for (gi, g) in net.groups.iter().enumerate() {
        for (loc, &e) in g.elements.iter().enumerate() {
            locate[e] = (gi, loc);
        }
    }

    // base vector from the greedy vertex of each group
    let mut x = vec![0i64; ground];
    for g in &net.groups {
        for (loc, v) in g.func.greedy_base().into_iter().enumerate() {
            x[g.elements[loc]] = v;
        }
    }

    // bounds-feasible start
    let mut phi: Vec<i64> = net
        .arcs
        .iter()
        .map(|a| match (a.lower, a.upper) {
            (Ext::Fin(lo), _) => lo.max(0.min(a.upper.finite_or(i64::MAX))),
            (Ext::NegInf, Ext::Fin(hi)) => hi.min(0),
            _ => 0,
        })
        .collect();
    for (a, &f) in net.arcs.iter().zip(&phi) {
        debug_assert!(a.lower <= Ext::Fin(f) && Ext::Fin(f) <= a.upper);
    }

    let mut tail_arcs: Vec<Vec<usize>> = vec![Vec::new(); ground];
    let mut head_arcs: Vec<Vec<usize>> = vec![Vec::new(); ground];
    for (ai, a) in net.arcs.iter().enumerate() {
        tail_arcs[a.tail].push(ai);
        head_arcs[a.head].push(ai);
    }

    let local_x = |x: &[i64], gi: usize| -> Vec<i64> {
        net.groups[gi].elements.iter().map(|&e| x[e]).collect()
    };

    let mut rounds = 0u64;
    loop {
        rounds += 1;
        if rounds > 1_000_000 {
            return Err(SfError::Internal("augmentation did not terminate"));
        }
        let grad = net.boundary(&phi);
        let surplus: Vec<i64> = grad.iter().zip(&x).map(|(g, xv)| g - xv).collect();
        let total_pos: i64 = surplus.iter().filter(|&&s| s > 0).sum();
        if total_pos == 0 {
            debug_assert!(surplus.iter().all(|&s| s == 0));
            for g in &net.groups {
                debug_assert_eq!(g.elements.iter().map(|&e| x[e]).sum::<i64>(), 0);
            }
            return Ok(SfOutcome::Flow(phi));
        }

        // multi-source BFS over the auxiliary network
        let mut parent: Vec<Option<(usize, Step)>> = vec![None; ground];
        let mut visited = vec![false; ground];
        let mut queue: Vec<usize> = (0..ground).filter(|&e| surplus[e] > 0).collect();
        for &s in &queue {
            visited[s] = true;
        }
        let mut qi = 0;
        let mut sink = None;
        'bfs: while qi < queue.len() {
            let u = queue[qi];
            qi += 1;
            if surplus[u] < 0 {
                sink = Some(u);
                break 'bfs;
            }
            for &ai in &tail_arcs[u] {
                let a = &net.arcs[ai];
                let v = a.head;
                if !visited[v] && Ext::Fin(phi[ai]) > a.lower {
                    visited[v] = true;
                    parent[v] = Some((u, Step::ArcDec(ai)));
                    queue.push(v);
                }
            }
            for &ai in &head_arcs[u] {
                let a = &net.arcs[ai];
                let v = a.tail;
                if !visited[v] && Ext::Fin(phi[ai]) < a.upper {
                    visited[v] = true;
                    parent[v] = Some((u, Step::ArcInc(ai)));
                    queue.push(v);
                }
            }
            let (gi, lu) = locate[u];
            let lx = local_x(&x, gi);
            for (lv, &v) in net.groups[gi].elements.iter().enumerate() {
                if lv == lu || visited[v] {
                    continue;
                }
                if net.groups[gi].func.exchange_capacity(&lx, lu, lv) >= 1 {
                    visited[v] = true;
                    parent[v] = Some((u, Step::Exchange));
                    queue.push(v);
                }
            }
        }

        let Some(t) = sink else {
            // stuck: the visited set is a maximum violating cut
            let kappa = net.cut_value(&visited);
            let rho = net.rho_value(&visited);
            if kappa != Ext::Fin(rho + total_pos) {
                return Err(SfError::Internal("stuck cut does not certify the surplus"));
            }
            return Ok(SfOutcome::MaxViolatingCut(visited));
        };

        // reconstruct the path and its bottleneck
        let mut path: Vec<(usize, usize, Step)> = Vec::new();
        let mut cur = t;
        while let Some((prev, step)) = parent[cur] {
            path.push((prev, cur, step));
            cur = prev;
        }
        path.reverse();
        let source = cur;
        let mut delta = surplus[source].min(-surplus[t]);
        for &(u, v, step) in &path {
            let room = match step {
                Step::ArcDec(ai) => match net.arcs[ai].lower {
                    Ext::Fin(lo) => phi[ai] - lo,
                    _ => i64::MAX,
                },
                Step::ArcInc(ai) => match net.arcs[ai].upper {
                    Ext::Fin(hi) => hi - phi[ai],
                    _ => i64::MAX,
                },
                Step::Exchange => {
                    let (gi, lu) = locate[u];
                    let (_, lv) = locate[v];
                    let lx = local_x(&x, gi);
                    net.groups[gi].func.exchange_capacity(&lx, lu, lv)
                }
            };
            delta = delta.min(room);
        }
        debug_assert!(delta >= 1);
        for &(u, v, step) in &path {
            match step {
                Step::ArcDec(ai) => phi[ai] -= delta,
                Step::ArcInc(ai) => phi[ai] += delta,
                Step::Exchange => {
                    x[u] += delta;
                    x[v] -= delta;
                }
            }
        }
    }
}

impl Ext {
    fn finite_or(self, default: i64) -> i64 {
        match self {
            Ext::Fin(v) => v,
            _ => default,
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Exhaustive verification of a solver outcome on a small network.
    pub fn verify_outcome(net: &SfNetwork, outcome: &SfOutcome) {
        assert!(net.ground <= 20, "exhaustive check needs a small ground set");
        match outcome {
            SfOutcome::Flow(phi) => {
                for (a, &f) in net.arcs.iter().zip(phi) {
                    assert!(a.lower <= Ext::Fin(f) && Ext::Fin(f) <= a.upper);
                }
                let grad = net.boundary(phi);
                // boundary lies in the base polyhedron: total zero per group,
                // all subset inequalities hold
                let mut subset = vec![false; net.ground];
                loop {
                    let xs: i64 = (0..net.ground).filter(|&e| subset[e]).map(|e| grad[e]).sum();
                    assert!(xs <= net.rho_value(&subset), "boundary violates {subset:?}");
                    if !increment(&mut subset) {
                        break;
                    }
                }
                assert_eq!(grad.iter().sum::<i64>(), 0);
            }
            SfOutcome::MaxViolatingCut(cut) => {
                let viol = violation(net, cut);
                assert!(viol > 0, "returned cut is not violating");
                let mut subset = vec![false; net.ground];
                loop {
                    assert!(
                        violation(net, &subset) <= viol,
                        "cut {subset:?} violates more than the returned one"
                    );
                    if !increment(&mut subset) {
                        break;
                    }
                }
            }
        }
    }

    pub fn violation(net: &SfNetwork, x: &[bool]) -> i64 {
        match net.cut_value(x) {
            Ext::Fin(kappa) => kappa - net.rho_value(x),
            Ext::NegInf => i64::MIN / 2,
            Ext::PosInf => unreachable!(),
        }
    }

    fn increment(subset: &mut [bool]) -> bool {
        for b in subset.iter_mut() {
            *b = !*b;
            if *b {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::bisubflow::GroupKind;
    use crate::instgen::Rng64;

    fn zero_group(e0: usize, e1: usize) -> SfGroup {
        SfGroup {
            func: SignedGroupFunction::new(GroupKind::ZeroForcing, 1),
            elements: vec![e0, e1],
        }
    }

    #[test]
    fn empty_network_is_feasible() {
        let net = SfNetwork {
            ground: 4,
            arcs: vec![],
            groups: vec![zero_group(0, 1), zero_group(2, 3)],
        };
        match sf_solve(&net).unwrap() {
            SfOutcome::Flow(phi) => assert!(phi.is_empty()),
            other => panic!("expected a flow, got {other:?}"),
        }
    }

    #[test]
    fn forced_arc_against_zero_groups_gives_max_cut() {
        // one arc with lower bound 1, but both endpoints pinned to boundary 0
        let net = SfNetwork {
            ground: 4,
            arcs: vec![SfArc {
                tail: 0,
                head: 2,
                lower: Ext::Fin(1),
                upper: Ext::Fin(1),
            }],
            groups: vec![zero_group(0, 1), zero_group(2, 3)],
        };
        let outcome = sf_solve(&net).unwrap();
        verify_outcome(&net, &outcome);
        match outcome {
            SfOutcome::MaxViolatingCut(cut) => {
                assert_eq!(violation(&net, &cut), 1);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn cut_value_examples() {
        let net = SfNetwork {
            ground: 2,
            arcs: vec![SfArc {
                tail: 0,
                head: 1,
                lower: Ext::Fin(1),
                upper: Ext::Fin(3),
            }],
            groups: vec![],
        };
        assert_eq!(net.cut_value(&[false, false]), Ext::Fin(0));
        assert_eq!(net.cut_value(&[true, false]), Ext::Fin(1));
        assert_eq!(net.cut_value(&[false, true]), Ext::Fin(-3));
        let inf = SfNetwork {
            ground: 2,
            arcs: vec![SfArc {
                tail: 0,
                head: 1,
                lower: Ext::Fin(0),
                upper: Ext::PosInf,
            }],
            groups: vec![],
        };
        assert_eq!(inf.cut_value(&[false, true]), Ext::NegInf);
    }

    /// Random small networks with mixed group kinds: every outcome verified
    /// against exhaustive enumeration.
    #[test]
    fn random_networks_verified_exhaustively() {
        let mut rng = Rng64::new(0xabcdef);
        for case in 0..400 {
            let k = 3 + (rng.next() % 2) as usize; // group arity 3 or 4
            let cap = 1 + (rng.next() % 2) as i64;
            let kind = match rng.next() % 3 {
                0 => GroupKind::NodeFlowing { cap },
                1 => GroupKind::TightNodeFlowing { cap },
                _ => GroupKind::NodeFlowing { cap: 0 },
            };
            // one flow group plus a few zero-forcing pairs
            let flow_elems = 2 * k;
            let pairs = 2;
            let ground = flow_elems + 2 * pairs;
            let mut groups = vec![SfGroup {
                func: SignedGroupFunction::new(kind, k),
                elements: (0..flow_elems).collect(),
            }];
            for p in 0..pairs {
                groups.push(zero_group(flow_elems + 2 * p, flow_elems + 2 * p + 1));
            }
            let arcs = (0..(rng.next() % 7) as usize)
                .map(|_| {
                    let tail = (rng.next() % ground as u64) as usize;
                    let head = (rng.next() % ground as u64) as usize;
                    let lo = rng.range(-1, 2);
                    let hi = lo + rng.range(0, 2);
                    SfArc {
                        tail,
                        head,
                        lower: if rng.next() % 5 == 0 { Ext::NegInf } else { Ext::Fin(lo) },
                        upper: if rng.next() % 5 == 0 { Ext::PosInf } else { Ext::Fin(hi) },
                    }
                })
                .collect();
            let net = SfNetwork { ground, arcs, groups };
            let outcome = sf_solve(&net).unwrap_or_else(|e| panic!("case {case}: {e}"));
            verify_outcome(&net, &outcome);
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let mut rng = Rng64::new(99);
        let k = 3;
        let groups = vec![
            SfGroup {
                func: SignedGroupFunction::new(GroupKind::NodeFlowing { cap: 2 }, k),
                elements: (0..6).collect(),
            },
            zero_group(6, 7),
        ];
        let arcs: Vec<SfArc> = (0..6)
            .map(|_| SfArc {
                tail: (rng.next() % 8) as usize,
                head: (rng.next() % 8) as usize,
                lower: Ext::Fin(0),
                upper: Ext::Fin(rng.range(0, 2)),
            })
            .collect();
        let net = SfNetwork { ground: 8, arcs, groups };
        let a = sf_solve(&net).unwrap();
        let b = sf_solve(&net).unwrap();
        match (a, b) {
            (SfOutcome::Flow(x), SfOutcome::Flow(y)) => assert_eq!(x, y),
            (SfOutcome::MaxViolatingCut(x), SfOutcome::MaxViolatingCut(y)) => assert_eq!(x, y),
            _ => panic!("nondeterministic outcome kind"),
        }
    }
}
