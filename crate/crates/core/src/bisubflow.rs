//! Bidirected flows with separable reducible bisubmodular boundary
//! constraints, reduced to submodular flow by signed doubling.
//!
//! A group attaches one submodular function on the signed copies of its
//! members. Three kinds occur: the node-flowing function (capacity plus
//! no-U-turn constraints at a node sitting on the star origin), its tight
//! variant (capacity met with equality), and the zero-forcing function that
//! pins a single node's boundary to zero. Each is t-monotone with zero total,
//! so projecting its base polyhedron yields the bisubmodular polyhedron used
//! by the support network, and feasibility transfers both ways between the
//! bidirected network and its signed double.

use alloc::vec::Vec;

use crate::ext::Ext;
use crate::subflow::{sf_solve, SfArc, SfError, SfGroup, SfNetwork, SfOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// Node-flowing with the given capacity: boundary in the node-flowing
    /// polytope (total at most `2c`, each branch at most the others).
    NodeFlowing { cap: i64 },
    /// Tight node-flowing: total exactly `2c`.
    TightNodeFlowing { cap: i64 },
    /// Single node with boundary forced to zero.
    ZeroForcing,
}

/// A submodular function on the signed ground set of a group.
///
/// Local signed indexing: element `2t` is the plus copy of member `t`,
/// element `2t + 1` the minus copy. Subsets are bitmasks over `0..2*arity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedGroupFunction {
    pub kind: GroupKind,
    pub arity: usize,
}

impl SignedGroupFunction {
    pub fn new(kind: GroupKind, arity: usize) -> Self {
        match kind {
            GroupKind::ZeroForcing => assert_eq!(arity, 1),
            _ => assert!(arity >= 3, "node-flowing groups need at least 3 branches"),
        }
        assert!(arity <= 15, "group arity too large for bitmask subsets");
        SignedGroupFunction { kind, arity }
    }

    pub fn ground_size(&self) -> usize {
        2 * self.arity
    }

    fn plus_minus_counts(&self, mask: u32) -> (u32, u32) {
        let mut pc = 0;
        let mut mc = 0;
        for t in 0..self.arity {
            if mask & (1 << (2 * t)) != 0 {
                pc += 1;
            }
            if mask & (1 << (2 * t + 1)) != 0 {
                mc += 1;
            }
        }
        (pc, mc)
    }

    /// `X` is a starred set: a single plus copy together with all minus
    /// copies except the one of the same member.
    fn is_star(&self, mask: u32) -> bool {
        let (pc, mc) = self.plus_minus_counts(mask);
        if pc != 1 || mc as usize != self.arity - 1 {
            return false;
        }
        let t = (0..self.arity)
            .find(|&t| mask & (1 << (2 * t)) != 0)
            .unwrap();
        mask & (1 << (2 * t + 1)) == 0
    }

    /// Value of the group's submodular function on a signed subset.
    pub fn rho(&self, mask: u32) -> i64 {
        assert_eq!(mask >> self.ground_size(), 0, "foreign elements in subset");
        let k = self.arity as i64;
        let (pc, mc) = self.plus_minus_counts(mask);
        let (pc, mc) = (pc as i64, mc as i64);
        match self.kind {
            GroupKind::ZeroForcing => 0,
            GroupKind::NodeFlowing { cap } => {
                // rows |X+| in {0, 1, >=2}, columns |X-| in {k, k-1, <=k-2}
                match (pc.min(2), mc) {
                    (0, _) => 0,
                    (_, m) if m == k => 0,
                    (1, m) if m == k - 1 => {
                        if self.is_star(mask) {
                            0
                        } else {
                            cap
                        }
                    }
                    (1, _) => cap,
                    (2, m) if m == k - 1 => cap,
                    (2, _) => 2 * cap,
                    _ => unreachable!(),
                }
            }
            GroupKind::TightNodeFlowing { cap } => cap * (pc.min(2) + (k - 2 - mc).min(0)),
        }
    }

    /// The induced bisubmodular value on a disjoint member pair, evaluated
    /// as `rho` of the plus copies of `y` joined with the minus copies of `z`.
    pub fn beta(&self, y_mask: u32, z_mask: u32) -> i64 {
        assert_eq!(y_mask & z_mask, 0, "overlapping cut sides");
        let mut mask = 0u32;
        for t in 0..self.arity {
            if y_mask & (1 << t) != 0 {
                mask |= 1 << (2 * t);
            }
            if z_mask & (1 << t) != 0 {
                mask |= 1 << (2 * t + 1);
            }
        }
        self.rho(mask)
    }

    /// Greedy vertex of the base polyhedron in ground-set index order.
    pub fn greedy_base(&self) -> Vec<i64> {
        let mut x = Vec::with_capacity(self.ground_size());
        let mut prefix = 0u32;
        let mut prev = 0;
        for e in 0..self.ground_size() {
            prefix |= 1 << e;
            let cur = self.rho(prefix);
            x.push(cur - prev);
            prev = cur;
        }
        debug_assert_eq!(prev, 0, "group function must vanish on its ground set");
        x
    }

    /// Exchange capacity: the minimum of `rho(X) - x(X)` over subsets with
    /// `i` inside and `j` outside, assuming `x` lies in the base polyhedron.
    /// Runs over the constant number of value classes, choosing the subset of
    /// maximum `x`-weight inside each.
    pub fn exchange_capacity(&self, x: &[i64], i: usize, j: usize) -> i64 {
        assert!(i != j && i < self.ground_size() && j < self.ground_size());
        let k = self.arity;
        if matches!(self.kind, GroupKind::ZeroForcing) {
            // ground has two elements; the only admissible subset is {i}
            return -x[i];
        }
        let cap = match self.kind {
            GroupKind::NodeFlowing { cap } | GroupKind::TightNodeFlowing { cap } => cap,
            GroupKind::ZeroForcing => unreachable!(),
        };
        let xp = |t: usize| x[2 * t];
        let xm = |t: usize| x[2 * t + 1];
        let sum_m: i64 = (0..k).map(xm).sum();
        let (i_plus, ti) = (i % 2 == 0, i / 2);
        let (j_plus, tj) = (j % 2 == 0, j / 2);
        let (i_minus, j_minus) = (!i_plus, !j_plus);
        let sum_p: i64 = (0..k).map(xp).sum();

        // best (max x-weight) plus side per class: exactly 0, exactly 1, all
        let plus_best = |class: usize| -> Option<i64> {
            match class {
                0 => (!i_plus).then_some(0),
                1 => {
                    if i_plus {
                        Some(xp(ti))
                    } else {
                        (0..k).filter(|&t| !(j_plus && t == tj)).map(xp).max()
                    }
                }
                _ => Some(sum_p - if j_plus { xp(tj) } else { 0 }),
            }
        };
        // best minus side per class: all of them, all but one, only forced
        let minus_best = |class: usize| -> Option<i64> {
            match class {
                0 => (!j_minus).then_some(sum_m),
                1 => {
                    if j_minus {
                        Some(sum_m - xm(tj))
                    } else {
                        (0..k)
                            .filter(|&b| !(i_minus && b == ti))
                            .map(|b| sum_m - xm(b))
                            .max()
                    }
                }
                _ => Some(if i_minus { xm(ti) } else { 0 }),
            }
        };

        let value_of = |pc: usize, mc_class: usize| -> i64 {
            match self.kind {
                GroupKind::NodeFlowing { cap } => match (pc, mc_class) {
                    (0, _) => 0,
                    (_, 0) => 0,
                    (1, 2) => cap,
                    (2, 1) => cap,
                    (2, 2) => 2 * cap,
                    _ => unreachable!("class (1, 1) handled separately"),
                },
                GroupKind::TightNodeFlowing { cap } => {
                    let pcv = pc as i64;
                    let mcv = match mc_class {
                        0 => k as i64,
                        1 => k as i64 - 1,
                        _ => k as i64 - 2,
                    };
                    cap * (pcv.min(2) + (k as i64 - 2 - mcv).min(0))
                }
                GroupKind::ZeroForcing => unreachable!(),
            }
        };

        let mut best = i64::MAX;
        for pc in 0..3 {
            for mc in 0..3 {
                if matches!(self.kind, GroupKind::NodeFlowing { .. }) && pc == 1 && mc == 1 {
                    continue;
                }
                if let (Some(pv), Some(mv)) = (plus_best(pc), minus_best(mc)) {
                    best = best.min(value_of(pc, mc) - pv - mv);
                }
            }
        }
        if matches!(self.kind, GroupKind::NodeFlowing { .. }) {
            // class with one plus copy and all but one minus copy: the value
            // depends on whether the dropped minus matches the plus member
            for a in 0..k {
                if (i_plus && a != ti) || (!i_plus && j_plus && a == tj) {
                    continue;
                }
                for b in 0..k {
                    if (j_minus && b != tj) || (!j_minus && i_minus && b == ti) {
                        continue;
                    }
                    let rho = if a == b { 0 } else { cap };
                    best = best.min(rho - (xp(a) + sum_m - xm(b)));
                }
            }
        }
        best
    }
}

/// Closed form of the node-flowing bisubmodular function (for cross-checks).
pub fn beta_node_flowing(cap: i64, k: usize, y_count: usize, z_count: usize) -> i64 {
    if y_count >= 2 {
        2 * cap
    } else if y_count == 1 && z_count <= k - 2 {
        cap
    } else {
        0
    }
}

/// Closed form of the tight node-flowing bisubmodular function.
pub fn beta_tight(cap: i64, k: usize, y_count: usize, z_count: usize) -> i64 {
    if y_count >= 2 {
        2 * cap
    } else if y_count == 1 && z_count <= k - 2 {
        cap
    } else if y_count == 0 && z_count == k - 1 {
        -cap
    } else if y_count == 0 && z_count == k {
        -2 * cap
    } else {
        0
    }
}

/// A bidirected edge: endpoints with signs, so the boundary adds
/// `sign_u` at `u` and `sign_v` at `v` per unit of flow. Self-loops must
/// carry equal signs.
#[derive(Debug, Clone, Copy)]
pub struct BiEdge {
    pub u: usize,
    pub v: usize,
    pub sign_u: i8,
    pub sign_v: i8,
    pub lower: Ext,
    pub upper: Ext,
}

impl BiEdge {
    /// Inner product of the edge boundary with the signed indicator of a cut.
    fn pairing(&self, side: &[i8]) -> i64 {
        self.sign_u as i64 * side[self.u] as i64 + self.sign_v as i64 * side[self.v] as i64
    }
}

#[derive(Debug, Clone)]
pub struct BiGroup {
    pub func: SignedGroupFunction,
    /// Node ids, in the group's local member order.
    pub members: Vec<usize>,
}

/// A bidirected network whose boundary constraint is the separable
/// bisubmodular function given by the groups (which partition the nodes).
#[derive(Debug, Clone)]
pub struct BidirectedNetwork {
    pub n: usize,
    pub edges: Vec<BiEdge>,
    pub groups: Vec<BiGroup>,
}

/// A disjoint signed node pair `(Y, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub y: Vec<bool>,
    pub z: Vec<bool>,
}

impl Cut {
    pub fn empty(n: usize) -> Self {
        Cut {
            y: alloc::vec![false; n],
            z: alloc::vec![false; n],
        }
    }

    /// Signed membership: +1 in `Y`, -1 in `Z`, 0 outside.
    pub fn side(&self) -> Vec<i8> {
        self.y
            .iter()
            .zip(&self.z)
            .map(|(&y, &z)| {
                debug_assert!(!(y && z));
                if y {
                    1
                } else if z {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.y.iter().chain(self.z.iter()).any(|&b| b)
    }
}

impl BidirectedNetwork {
    pub fn validate(&self) -> Result<(), SfError> {
        let mut owner = alloc::vec![usize::MAX; self.n];
        for (gi, g) in self.groups.iter().enumerate() {
            if g.members.len() != g.func.arity {
                return Err(SfError::BadGroups("group arity mismatch"));
            }
            for &u in &g.members {
                if u >= self.n || owner[u] != usize::MAX {
                    return Err(SfError::BadGroups("groups must partition the nodes"));
                }
                owner[u] = gi;
            }
            if g.func.rho((1u32 << g.func.ground_size()) - 1) != 0 {
                return Err(SfError::BadGroups("group function must vanish on its ground"));
            }
        }
        if owner.iter().any(|&o| o == usize::MAX) {
            return Err(SfError::BadGroups("uncovered node"));
        }
        for e in &self.edges {
            assert!(e.sign_u.abs() == 1 && e.sign_v.abs() == 1);
            assert!(e.u != e.v || e.sign_u == e.sign_v, "mixed-sign self-loop");
            assert!(e.lower <= e.upper);
        }
        Ok(())
    }

    /// Cut function of the bidirected network: lower capacities on edges
    /// whose boundary pairs positively with the cut, upper capacities on
    /// those pairing negatively.
    pub fn bicut_value(&self, cut: &Cut) -> Ext {
        let side = cut.side();
        let mut total = Ext::Fin(0);
        for e in &self.edges {
            let pairing = e.pairing(&side);
            if pairing > 0 {
                total = total.add(e.lower.scale(pairing));
            } else if pairing < 0 {
                total = total.add(e.upper.scale(pairing));
            }
        }
        total
    }

    /// Separable bisubmodular value of a cut.
    pub fn beta_value(&self, cut: &Cut) -> i64 {
        self.groups
            .iter()
            .map(|g| {
                let mut y_mask = 0u32;
                let mut z_mask = 0u32;
                for (t, &u) in g.members.iter().enumerate() {
                    if cut.y[u] {
                        y_mask |= 1 << t;
                    }
                    if cut.z[u] {
                        z_mask |= 1 << t;
                    }
                }
                g.func.beta(y_mask, z_mask)
            })
            .sum()
    }

    /// Violation `kappa - beta` of a cut, `NegInf` when the cut is blocked
    /// by an infinite capacity.
    pub fn violation(&self, cut: &Cut) -> Ext {
        self.bicut_value(cut).add(Ext::Fin(-self.beta_value(cut)))
    }

    /// The signed double: each node splits into a plus and a minus copy,
    /// each bidirected edge becomes the two arcs of its orientation pair,
    /// and groups carry over onto the signed copies.
    pub fn signed_double(&self) -> SfNetwork {
        let plus = |u: usize| 2 * u;
        let minus = |u: usize| 2 * u + 1;
        let mut arcs = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            // an edge with boundary s_u*chi_u + s_v*chi_v yields the arcs
            // (u^{s_u} -> v^{-s_v}) and (v^{s_v} -> u^{-s_u});
            // parallel arcs from self-loops are kept
            let (up, un) = if e.sign_u > 0 {
                (plus(e.u), minus(e.u))
            } else {
                (minus(e.u), plus(e.u))
            };
            let (vp, vn) = if e.sign_v > 0 {
                (plus(e.v), minus(e.v))
            } else {
                (minus(e.v), plus(e.v))
            };
            arcs.push(SfArc {
                tail: up,
                head: vn,
                lower: e.lower,
                upper: e.upper,
            });
            arcs.push(SfArc {
                tail: vp,
                head: un,
                lower: e.lower,
                upper: e.upper,
            });
        }
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let mut elements = Vec::with_capacity(2 * g.members.len());
                for &u in &g.members {
                    elements.push(plus(u));
                    elements.push(minus(u));
                }
                SfGroup {
                    func: g.func,
                    elements,
                }
            })
            .collect();
        SfNetwork {
            ground: 2 * self.n,
            arcs,
            groups,
        }
    }

    /// Half of the doubled flow on each arc pair of the signed double.
    /// Returns the doubled bidirected flow `2 * psi`.
    pub fn project_flow(&self, phi: &[i64]) -> Vec<i64> {
        assert_eq!(phi.len(), 2 * self.edges.len());
        (0..self.edges.len())
            .map(|e| phi[2 * e] + phi[2 * e + 1])
            .collect()
    }
}

/// Strip complete signed pairs from a subset of the signed double and read
/// the remainder as a cut: plus copies into `Y`, minus copies into `Z`.
pub fn underline_to_cut(x: &[bool], n: usize) -> Cut {
    assert_eq!(x.len(), 2 * n);
    let mut cut = Cut::empty(n);
    for u in 0..n {
        match (x[2 * u], x[2 * u + 1]) {
            (true, false) => cut.y[u] = true,
            (false, true) => cut.z[u] = true,
            _ => {}
        }
    }
    cut
}

#[derive(Debug, Clone)]
pub enum BfOutcome {
    /// Feasible: doubled half-integral flow `2 * psi` per edge, with integral
    /// boundary on every group.
    Flow(Vec<i64>),
    /// A maximum violating cut, in underlined (pair-free) form.
    MaxViolatingCut(Cut),
}

/// Solve bidirected flow feasibility through the signed double.
pub fn bf_solve(net: &BidirectedNetwork) -> Result<BfOutcome, SfError> {
    net.validate()?;
    let sf = net.signed_double();
    match sf_solve(&sf)? {
        SfOutcome::Flow(phi) => Ok(BfOutcome::Flow(net.project_flow(&phi))),
        SfOutcome::MaxViolatingCut(x) => {
            let cut = underline_to_cut(&x, net.n);
            // violation must survive underlining exactly
            let sf_viol = match sf.cut_value(&x) {
                Ext::Fin(kappa) => kappa - sf.rho_value(&x),
                v => panic!("violating cut with non-finite value {v}"),
            };
            debug_assert_eq!(net.violation(&cut), Ext::Fin(sf_viol));
            Ok(BfOutcome::MaxViolatingCut(cut))
        }
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::instgen::Rng64;
    use alloc::vec;

    fn mask_of(plus: &[usize], minus: &[usize]) -> u32 {
        let mut m = 0;
        for &t in plus {
            m |= 1 << (2 * t);
        }
        for &t in minus {
            m |= 1 << (2 * t + 1);
        }
        m
    }

    #[test]
    fn rho_table_entries() {
        let g = SignedGroupFunction::new(GroupKind::NodeFlowing { cap: 3 }, 4);
        // one plus copy, two minus copies
        assert_eq!(g.rho(mask_of(&[0], &[1, 2])), 3);
        // starred set: zero
        assert_eq!(g.rho(mask_of(&[0], &[1, 2, 3])), 0);
        // same shape, non-starred: the dropped minus differs from the plus member
        assert_eq!(g.rho(mask_of(&[1], &[1, 2, 3])), 3);
        // type (>=2, <=k-2)
        assert_eq!(g.rho(mask_of(&[0, 1], &[2])), 6);
        // everything with full minus side is zero
        assert_eq!(g.rho(mask_of(&[0, 1, 2], &[0, 1, 2, 3])), 0);

        let t = SignedGroupFunction::new(GroupKind::TightNodeFlowing { cap: 2 }, 3);
        assert_eq!(t.rho(mask_of(&[], &[0, 1, 2])), -4);
        assert_eq!(t.rho(mask_of(&[], &[0, 1])), -2);
        assert_eq!(t.rho(mask_of(&[0], &[1, 2])), 0);
        assert_eq!(t.rho(mask_of(&[0, 1], &[2])), 4);
        assert_eq!(t.rho((1 << 6) - 1), 0);
    }

    #[test]
    fn beta_matches_closed_forms() {
        for k in 3..=5usize {
            for cap in 0..=2i64 {
                let nf = SignedGroupFunction::new(GroupKind::NodeFlowing { cap }, k);
                let tf = SignedGroupFunction::new(GroupKind::TightNodeFlowing { cap }, k);
                for y_mask in 0..(1u32 << k) {
                    for z_mask in 0..(1u32 << k) {
                        if y_mask & z_mask != 0 {
                            continue;
                        }
                        let yc = y_mask.count_ones() as usize;
                        let zc = z_mask.count_ones() as usize;
                        assert_eq!(nf.beta(y_mask, z_mask), beta_node_flowing(cap, k, yc, zc));
                        assert_eq!(tf.beta(y_mask, z_mask), beta_tight(cap, k, yc, zc));
                    }
                }
            }
        }
    }

    #[test]
    fn beta_examples() {
        let g = SignedGroupFunction::new(GroupKind::NodeFlowing { cap: 5 }, 4);
        assert_eq!(g.beta(0b0011, 0), 10); // |Y| >= 2
        assert_eq!(g.beta(0, 0), 0);
        let t = SignedGroupFunction::new(GroupKind::TightNodeFlowing { cap: 5 }, 4);
        assert_eq!(t.beta(0, 0b1111), -10); // Y empty, Z everything
    }

    fn submodular_and_t_monotone(g: &SignedGroupFunction) {
        let size = g.ground_size();
        let full = (1u32 << size) - 1;
        assert_eq!(g.rho(0), 0);
        assert_eq!(g.rho(full), 0);
        for a in 0..=full {
            for b in 0..=full {
                assert!(
                    g.rho(a) + g.rho(b) >= g.rho(a & b) + g.rho(a | b),
                    "submodularity fails at {a:b}, {b:b}"
                );
            }
            // t-monotonicity: removing complete signed pairs never raises rho
            let mut underlined = a;
            for t in 0..g.arity {
                let pair = (1 << (2 * t)) | (1 << (2 * t + 1));
                if a & pair == pair {
                    underlined &= !pair;
                }
            }
            assert!(g.rho(underlined) <= g.rho(a));
        }
    }

    #[test]
    fn group_functions_are_submodular_and_t_monotone() {
        for k in 3..=4 {
            for cap in 1..=2 {
                submodular_and_t_monotone(&SignedGroupFunction::new(
                    GroupKind::NodeFlowing { cap },
                    k,
                ));
                submodular_and_t_monotone(&SignedGroupFunction::new(
                    GroupKind::TightNodeFlowing { cap },
                    k,
                ));
            }
        }
        submodular_and_t_monotone(&SignedGroupFunction::new(GroupKind::ZeroForcing, 1));
    }

    #[test]
    fn exchange_capacity_matches_brute_force() {
        let mut rng = Rng64::new(0x5eed);
        for k in 3..=4usize {
            for cap in 1..=2i64 {
                for kind in [
                    GroupKind::NodeFlowing { cap },
                    GroupKind::TightNodeFlowing { cap },
                ] {
                    let g = SignedGroupFunction::new(kind, k);
                    for x in random_base_points(&g, &mut rng, 30) {
                        for i in 0..g.ground_size() {
                            for j in 0..g.ground_size() {
                                if i == j {
                                    continue;
                                }
                                assert_eq!(
                                    g.exchange_capacity(&x, i, j),
                                    brute_exchange(&g, &x, i, j),
                                    "kind={kind:?} k={k} x={x:?} i={i} j={j}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exchange_examples() {
        // zero base vector of a node-flowing group: capacity 0 via a starred set
        let g = SignedGroupFunction::new(GroupKind::NodeFlowing { cap: 1 }, 3);
        let x = vec![0i64; 6];
        assert_eq!(g.exchange_capacity(&x, 0, 1), 0);

        let z = SignedGroupFunction::new(GroupKind::ZeroForcing, 1);
        assert_eq!(z.exchange_capacity(&[0, 0], 0, 1), 0);

        // tight group at the greedy vertex: agree with brute force
        let t = SignedGroupFunction::new(GroupKind::TightNodeFlowing { cap: 2 }, 3);
        let x = t.greedy_base();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(t.exchange_capacity(&x, i, j), brute_exchange(&t, &x, i, j));
                }
            }
        }
    }

    /// Doubled-lattice membership scan: the explicit inequality systems
    /// describe exactly the base polyhedra of the two node-flowing functions.
    #[test]
    fn lift_polyhedra_match_inequality_systems() {
        for k in 3..=4usize {
            for cap in 1..=2i64 {
                check_lift(k, cap, false);
                check_lift(k, cap, true);
            }
        }
    }

    fn check_lift(k: usize, cap: i64, tight: bool) {
        let kind = if tight {
            GroupKind::TightNodeFlowing { cap }
        } else {
            GroupKind::NodeFlowing { cap }
        };
        let g = SignedGroupFunction::new(kind, k);
        let size = 2 * k;
        // doubled coordinates: lattice points of [-c, c]^{2k} in half steps
        let side = 4 * cap + 1;
        let mut point = vec![0i64; size];
        let mut count_checked = 0u64;
        let mut stack = vec![0usize];
        // iterate the product lattice depth-first
        let mut idx = vec![0i64; size];
        loop {
            let depth = stack.len() - 1;
            if idx[depth] == side {
                if depth == 0 {
                    break;
                }
                idx[depth] = 0;
                stack.pop();
                idx[stack.len() - 1] += 1;
                continue;
            }
            point[depth] = idx[depth] - 2 * cap;
            if depth + 1 < size {
                stack.push(depth + 1);
                continue;
            }
            // full point assembled (doubled units)
            count_checked += 1;
            let in_ineq = in_lift_system(k, cap, tight, &point);
            let in_base = in_base_doubled(&g, &point);
            assert_eq!(in_ineq, in_base, "k={k} cap={cap} tight={tight} {point:?}");
            idx[depth] += 1;
        }
        assert!(count_checked > 0);
    }

    /// The explicit system, in doubled units (every bound doubled).
    fn in_lift_system(k: usize, cap: i64, tight: bool, x2: &[i64]) -> bool {
        let xp = |t: usize| x2[2 * t];
        let xm = |t: usize| x2[2 * t + 1];
        let sp: i64 = (0..k).map(xp).sum();
        let sm: i64 = (0..k).map(xm).sum();
        if sp + sm != 0 || sp > 4 * cap {
            return false;
        }
        for t in 0..k {
            if xp(t) + (sm - xm(t)) > 0 {
                return false;
            }
            if xp(t) < 0 || xp(t) > 2 * cap || xm(t) < -2 * cap || xm(t) > 0 {
                return false;
            }
        }
        if tight && sm > -4 * cap {
            return false;
        }
        true
    }

    fn in_base_doubled(g: &SignedGroupFunction, x2: &[i64]) -> bool {
        let size = g.ground_size();
        let full = (1u32 << size) - 1;
        let total: i64 = x2.iter().sum();
        if total != 2 * g.rho(full) {
            return false;
        }
        (0..=full).all(|mask| {
            let xs: i64 = (0..size).filter(|&e| mask & (1 << e) != 0).map(|e| x2[e]).sum();
            xs <= 2 * g.rho(mask)
        })
    }

    #[test]
    fn underline_examples() {
        // {0+, 0-, 1+} underlines to ({1}, {})
        let x = [true, true, true, false, false, false];
        let cut = underline_to_cut(&x, 3);
        assert_eq!(cut.y, vec![false, true, false]);
        assert_eq!(cut.z, vec![false, false, false]);

        let x = [true, false, false, true, false, false];
        let cut = underline_to_cut(&x, 3);
        assert_eq!(cut.y, vec![true, false, false]);
        assert_eq!(cut.z, vec![false, true, false]);

        let cut = underline_to_cut(&[false; 6], 3);
        assert!(cut.is_empty());
    }

    #[test]
    fn signed_double_arcs() {
        // a single (+, +) edge doubles into (u+, v-) and (v+, u-)
        let net = BidirectedNetwork {
            n: 2,
            edges: vec![BiEdge {
                u: 0,
                v: 1,
                sign_u: 1,
                sign_v: 1,
                lower: Ext::Fin(0),
                upper: Ext::PosInf,
            }],
            groups: vec![
                BiGroup {
                    func: SignedGroupFunction::new(GroupKind::ZeroForcing, 1),
                    members: vec![0],
                },
                BiGroup {
                    func: SignedGroupFunction::new(GroupKind::ZeroForcing, 1),
                    members: vec![1],
                },
            ],
        };
        let sf = net.signed_double();
        assert_eq!(sf.arcs.len(), 2);
        assert_eq!((sf.arcs[0].tail, sf.arcs[0].head), (0, 3));
        assert_eq!((sf.arcs[1].tail, sf.arcs[1].head), (2, 1));

        // a (-, -) self-loop doubles into two parallel (u-, u+) arcs
        let mut net2 = net.clone();
        net2.edges[0] = BiEdge {
            u: 0,
            v: 0,
            sign_u: -1,
            sign_v: -1,
            lower: Ext::Fin(0),
            upper: Ext::PosInf,
        };
        let sf2 = net2.signed_double();
        assert_eq!((sf2.arcs[0].tail, sf2.arcs[0].head), (1, 0));
        assert_eq!((sf2.arcs[1].tail, sf2.arcs[1].head), (1, 0));
    }

    #[test]
    fn bicut_examples() {
        let net = BidirectedNetwork {
            n: 2,
            edges: vec![BiEdge {
                u: 0,
                v: 1,
                sign_u: 1,
                sign_v: 1,
                lower: Ext::Fin(0),
                upper: Ext::PosInf,
            }],
            groups: vec![],
        };
        let empty = Cut::empty(2);
        assert_eq!(net.bicut_value(&empty), Ext::Fin(0));
        let mut y_cut = Cut::empty(2);
        y_cut.y[0] = true;
        assert_eq!(net.bicut_value(&y_cut), Ext::Fin(0));
        let mut z_cut = Cut::empty(2);
        z_cut.z[0] = true;
        assert_eq!(net.bicut_value(&z_cut), Ext::NegInf);
    }
}
