//! Independent brute-force solver for tiny instances.
//!
//! Enumerates the full half-integral lattice over all terminal-to-terminal
//! paths, guarded against blowup. Returns the maximum total value, the
//! minimum original cost among maximum-value multiflows, and the maximum of
//! the weighted objective (value weight times value minus cost). With a
//! sufficiently large value weight the objective maximizer attains the first
//! two quantities as well, which is asserted on every run.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// Instance exceeds the enumeration guard; the oracle refuses rather
    /// than approximate.
    TooLarge(String),
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::TooLarge(s) => write!(f, "instance too large for the oracle: {s}"),
        }
    }
}

const MAX_NODES: usize = 12;
const MAX_LATTICE: u64 = 10_000_000;

/// All simple paths between distinct terminals with nonterminal interiors,
/// oriented from the smaller terminal and sorted.
pub fn enumerate_s_paths(inst: &Instance) -> Result<Vec<Vec<usize>>, OracleError> {
    if inst.n > MAX_NODES {
        return Err(OracleError::TooLarge(format!(
            "{} nodes exceeds the {MAX_NODES}-node path enumeration guard",
            inst.n
        )));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); inst.n];
    for e in &inst.edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    let mut paths = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut on_stack = vec![false; inst.n];

    fn dfs(
        inst: &Instance,
        adj: &[Vec<usize>],
        stack: &mut Vec<usize>,
        on_stack: &mut [bool],
        paths: &mut Vec<Vec<usize>>,
    ) {
        let v = *stack.last().unwrap();
        for &w in &adj[v] {
            if on_stack[w] {
                continue;
            }
            if inst.is_terminal(w) {
                if w > stack[0] {
                    let mut path = stack.clone();
                    path.push(w);
                    paths.push(path);
                }
                continue;
            }
            stack.push(w);
            on_stack[w] = true;
            dfs(inst, adj, stack, on_stack, paths);
            on_stack[w] = false;
            stack.pop();
        }
    }

    for s in 0..inst.k {
        stack.push(s);
        on_stack[s] = true;
        dfs(inst, &adj, &mut stack, &mut on_stack, &mut paths);
        on_stack[s] = false;
        stack.pop();
    }
    paths.sort();
    Ok(paths)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteResult {
    /// Maximum doubled total value over all half-integral multiflows.
    pub value2: i64,
    /// Minimum doubled original cost among maximum-value multiflows.
    pub min_cost2: i64,
    /// Maximum of `m * value2 - cost2(obj_costs)`.
    pub obj2: i64,
}

/// Exhaust the half-integral lattice of path values subject to node
/// capacities. `obj_costs` is the cost function for the weighted objective
/// (the original costs are always used for `min_cost2`).
pub fn brute_solve(
    inst: &Instance,
    m: i64,
    obj_costs: &[i64],
) -> Result<BruteResult, OracleError> {
    let paths = enumerate_s_paths(inst)?;
    // per-path upper bound from the tightest interior capacity
    let bounds: Vec<i64> = paths
        .iter()
        .map(|p| {
            p[1..p.len() - 1]
                .iter()
                .map(|&v| 2 * inst.capacity[v])
                .min()
                .unwrap_or(0)
        })
        .collect();
    let mut lattice: u64 = 1;
    for &b in &bounds {
        lattice = lattice.saturating_mul(b as u64 + 1);
        if lattice > MAX_LATTICE {
            return Err(OracleError::TooLarge(format!(
                "value lattice exceeds {MAX_LATTICE} points"
            )));
        }
    }
    let orig_costs: Vec<i64> = inst.edges.iter().map(|e| e.cost).collect();
    let path_cost = |p: &[usize], costs: &[i64]| -> i64 {
        let mut index = alloc::collections::BTreeMap::new();
        for (ei, e) in inst.edges.iter().enumerate() {
            index.insert((e.u.min(e.v), e.u.max(e.v)), ei);
        }
        p.windows(2)
            .map(|w| costs[index[&(w[0].min(w[1]), w[0].max(w[1]))]])
            .sum()
    };
    let cost_orig: Vec<i64> = paths.iter().map(|p| path_cost(p, &orig_costs)).collect();
    let cost_obj: Vec<i64> = paths.iter().map(|p| path_cost(p, obj_costs)).collect();

    struct Search<'a> {
        inst: &'a Instance,
        paths: &'a [Vec<usize>],
        bounds: &'a [i64],
        cost_orig: &'a [i64],
        cost_obj: &'a [i64],
        m: i64,
        remaining: Vec<i64>,
        best_value2: i64,
        best_cost2: i64,
        best_obj2: i64,
        obj_value2: i64,
        obj_cost2: i64,
    }

    impl Search<'_> {
        fn run(&mut self, idx: usize, value2: i64, c_orig: i64, c_obj: i64) {
            if idx == self.paths.len() {
                if value2 > self.best_value2
                    || (value2 == self.best_value2 && c_orig < self.best_cost2)
                {
                    self.best_value2 = value2;
                    self.best_cost2 = c_orig;
                } else if value2 == self.best_value2 {
                    self.best_cost2 = self.best_cost2.min(c_orig);
                }
                let obj = self.m * value2 - c_obj;
                if obj > self.best_obj2
                    || (obj == self.best_obj2
                        && (value2, c_orig) < (self.obj_value2, self.obj_cost2))
                {
                    self.best_obj2 = obj;
                    self.obj_value2 = value2;
                    self.obj_cost2 = c_orig;
                }
                return;
            }
            let cap = self.paths[idx][1..self.paths[idx].len() - 1]
                .iter()
                .map(|&v| self.remaining[v])
                .min()
                .unwrap_or(0)
                .min(self.bounds[idx]);
            for lambda2 in 0..=cap {
                if lambda2 > 0 {
                    for &v in &self.paths[idx][1..self.paths[idx].len() - 1] {
                        self.remaining[v] -= 1;
                    }
                }
                self.run(
                    idx + 1,
                    value2 + lambda2,
                    c_orig + lambda2 * self.cost_orig[idx],
                    c_obj + lambda2 * self.cost_obj[idx],
                );
            }
            for &v in &self.paths[idx][1..self.paths[idx].len() - 1] {
                self.remaining[v] += cap;
            }
        }
    }

    let mut search = Search {
        inst,
        paths: &paths,
        bounds: &bounds,
        cost_orig: &cost_orig,
        cost_obj: &cost_obj,
        m,
        remaining: inst.capacity.iter().map(|&c| 2 * c).collect(),
        best_value2: 0,
        best_cost2: 0,
        best_obj2: 0,
        obj_value2: 0,
        obj_cost2: 0,
    };
    search.run(0, 0, 0, 0);
    let _ = search.inst;

    let result = BruteResult {
        value2: search.best_value2,
        min_cost2: search.best_cost2,
        obj2: search.best_obj2,
    };
    // with a large enough weight the objective maximizer is also a
    // minimum-cost maximum multiflow
    let c_max = inst.max_capacity();
    let d_max = obj_costs.iter().copied().max().unwrap_or(0);
    if m > 2 * c_max * d_max {
        assert_eq!(
            (search.obj_value2, search.obj_cost2),
            (result.value2, result.min_cost2),
            "objective maximizer disagrees with the value/cost optimum"
        );
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, Instance};

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
    fn star_paths() {
        let paths = enumerate_s_paths(&star_instance()).unwrap();
        assert_eq!(
            paths,
            vec![vec![0, 3, 1], vec![0, 3, 2], vec![1, 3, 2]]
        );
    }

    #[test]
    fn no_edges_no_paths() {
        let inst = Instance::new(4, 3, vec![], vec![0, 0, 0, 1]).unwrap();
        assert!(enumerate_s_paths(&inst).unwrap().is_empty());
    }

    #[test]
    fn chain_path() {
        let inst = Instance::new(
            5,
            3,
            vec![
                Edge { u: 0, v: 3, cost: 1 },
                Edge { u: 3, v: 4, cost: 1 },
                Edge { u: 4, v: 1, cost: 1 },
            ],
            vec![0, 0, 0, 1, 1],
        )
        .unwrap();
        let paths = enumerate_s_paths(&inst).unwrap();
        assert_eq!(paths, vec![vec![0, 3, 4, 1]]);
    }

    #[test]
    fn star_brute_solve() {
        let inst = star_instance();
        let costs: Vec<i64> = inst.edges.iter().map(|e| e.cost).collect();
        let r = brute_solve(&inst, 4, &costs).unwrap();
        assert_eq!(r.value2, 2);
        assert_eq!(r.min_cost2, 4);
        assert_eq!(r.obj2, 4);
    }

    #[test]
    fn zero_capacity_gives_zero_value() {
        let inst = Instance::new(
            4,
            3,
            vec![
                Edge { u: 0, v: 3, cost: 1 },
                Edge { u: 1, v: 3, cost: 1 },
                Edge { u: 2, v: 3, cost: 2 },
            ],
            vec![0, 0, 0, 0],
        )
        .unwrap();
        let costs: Vec<i64> = inst.edges.iter().map(|e| e.cost).collect();
        let r = brute_solve(&inst, 16, &costs).unwrap();
        assert_eq!(r.value2, 0);
    }

    #[test]
    fn single_wide_path() {
        let inst = Instance::new(
            5,
            3,
            vec![
                Edge { u: 0, v: 3, cost: 1 },
                Edge { u: 3, v: 4, cost: 1 },
                Edge { u: 4, v: 1, cost: 1 },
            ],
            vec![0, 0, 0, 2, 3],
        )
        .unwrap();
        let costs: Vec<i64> = inst.edges.iter().map(|e| e.cost).collect();
        let r = brute_solve(&inst, 32, &costs).unwrap();
        // one path through a capacity-2 bottleneck
        assert_eq!(r.value2, 4);
        assert_eq!(r.min_cost2, 4 * 3);
    }

    #[test]
    fn guard_refuses_oversize() {
        let inst = Instance::new(13, 3, vec![], vec![0; 13]).unwrap();
        assert!(matches!(
            enumerate_s_paths(&inst),
            Err(OracleError::TooLarge(_))
        ));
    }
}
