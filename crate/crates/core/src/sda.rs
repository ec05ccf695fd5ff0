//! Steepest descent over the dual objective, and the cost-scaling driver.
//!
//! Each phase halves the cost divisor: phase `t` minimizes the dual of the
//! problem with costs rounded up by `2^t` and value weight `m / 2^t`. The
//! first phase starts optimal at the zero-height point; every later phase
//! warm-starts from the doubled previous optimum, repaired by a uniform
//! height lift when rounding made some edge infeasible. Sensitivity of the
//! minimizers under unit cost changes bounds every phase after the first by
//! `2m + 4` descent steps, which is asserted (with slack two) at runtime.

use alloc::vec::Vec;
use alloc::{format, vec};

use crate::dualnet::{steepest_direction, Direction, DualError, Support};
use crate::grid::GridPoint;
use crate::model::{DualProblem, GridVector, PreparedInstance};

/// One descent step, with enough context to re-check the exact descent
/// identity and the steepest-direction property.
#[derive(Debug, Clone)]
pub struct DescentRecord {
    /// Point the step was computed at (normalized).
    pub p: GridVector,
    /// Chosen neighbor before radius normalization.
    pub q: GridVector,
    /// Exact doubled objective decrease; equals the violation of the chosen
    /// movable part.
    pub delta2h: i64,
    pub viol_up: i64,
    pub viol_down: i64,
    pub h2_before: i64,
    pub h2_after: i64,
}

#[derive(Debug)]
pub struct SdaResult {
    pub potential: GridVector,
    pub steps: usize,
    pub records: Vec<DescentRecord>,
    /// Feasible support at the returned optimal potential.
    pub support: Support,
}

/// Minimize the dual objective by steepest descent from `p0`. Errors if the
/// step budget is exhausted, which would contradict the termination bound.
pub fn sda_minimize(
    prob: &DualProblem,
    p0: GridVector,
    budget: usize,
) -> Result<SdaResult, DualError> {
    let mut p = prob.normalize_potential(&p0);
    let mut h2 = prob
        .h2(&p)
        .ok_or_else(|| DualError::NotAPotential)?;
    let mut records = Vec::new();
    loop {
        match steepest_direction(prob, &p)? {
            Direction::Optimal(support) => {
                return Ok(SdaResult {
                    potential: p,
                    steps: records.len(),
                    records,
                    support,
                });
            }
            Direction::Descent(d) => {
                if records.len() >= budget {
                    return Err(DualError::Invariant(format!(
                        "descent exceeded its budget of {budget} steps"
                    )));
                }
                let q = prob.normalize_potential(&d.q);
                let h2_after = prob.h2(&q).ok_or_else(|| {
                    DualError::Invariant("descent left the feasible region".into())
                })?;
                if h2_after != h2 - d.delta2h {
                    return Err(DualError::Invariant(format!(
                        "objective decrease mismatch: {h2} -> {h2_after}, expected step {}",
                        d.delta2h
                    )));
                }
                records.push(DescentRecord {
                    p: core::mem::take(&mut p),
                    q: d.q,
                    delta2h: d.delta2h,
                    viol_up: d.viol_up,
                    viol_down: d.viol_down,
                    h2_before: h2,
                    h2_after,
                });
                p = q;
                h2 = h2_after;
            }
        }
    }
}

/// Double every coordinate; maps the grid into its integral points and the
/// previous phase's terminals onto the next phase's pins.
pub fn double_potential(p: &[GridPoint]) -> GridVector {
    p.iter()
        .map(|g| {
            GridPoint::new(
                crate::grid::StarPoint::new(g.x.branch(), 2 * g.x.radius2()),
                2 * g.y2,
            )
        })
        .collect()
}

/// Make the doubled previous optimum feasible for the current phase: if the
/// rounded costs cut some edge constraint, lift every nonterminal height by
/// one unit (doubled: two). The result is within norm two of the input.
pub fn repair_potential(prob: &DualProblem, q: GridVector) -> Result<GridVector, DualError> {
    if prob.is_potential(&q) {
        return Ok(q);
    }
    let repaired: GridVector = q
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if prob.inst.is_terminal(i) {
                *g
            } else {
                GridPoint::new(g.x, g.y2 + 4)
            }
        })
        .collect();
    if !prob.is_potential(&repaired) {
        return Err(DualError::Invariant(
            "height lift did not repair the doubled potential".into(),
        ));
    }
    Ok(repaired)
}

#[derive(Debug)]
pub struct PhaseReport {
    pub t: u32,
    pub m_t: i64,
    pub steps: usize,
    pub h2_start: i64,
    pub h2_end: i64,
    pub records: Vec<DescentRecord>,
}

#[derive(Debug)]
pub struct ScalingResult {
    /// Minimizer of the full dual (perturbed costs, full value weight).
    pub potential: GridVector,
    /// Feasible support at the final potential.
    pub support: Support,
    pub phases: Vec<PhaseReport>,
}

/// Per-phase hard budget: the proven bound plus slack two for the repair.
pub fn phase_budget(m_edges: usize) -> usize {
    2 * m_edges + 6
}

/// Cost-scaled descent: phases from the coarsest costs down to the full
/// ones, each warm-started from the previous optimum.
pub fn scaling_solve(prep: &PreparedInstance) -> Result<ScalingResult, DualError> {
    let m_edges = prep.base.m();
    let mut phases = Vec::new();
    let mut current: Option<(GridVector, Support)> = None;
    for t in (0..=prep.mu).rev() {
        let prob = prep.phase(t);
        let p0 = match current.take() {
            None => prob.initial_potential(),
            Some((prev, _)) => repair_potential(&prob, double_potential(&prev))?,
        };
        let h2_start = prob
            .h2(&p0)
            .ok_or_else(|| DualError::Invariant("phase start is not a potential".into()))?;
        let result = sda_minimize(&prob, p0, phase_budget(m_edges))?;
        if t == prep.mu && result.steps != 0 {
            return Err(DualError::Invariant(
                "the coarsest phase must start optimal".into(),
            ));
        }
        phases.push(PhaseReport {
            t,
            m_t: prob.m,
            steps: result.steps,
            h2_start,
            h2_end: prob.h2(&result.potential).unwrap_or(i64::MIN),
            records: result.records,
        });
        current = Some((result.potential, result.support));
    }
    let (potential, support) = current.expect("at least one phase always runs");
    Ok(ScalingResult {
        potential,
        support,
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::StarPoint;
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
    fn direct_descent_on_star() {
        let prep = prepare(star_instance());
        let prob = prep.full_problem();
        let p0 = prob.initial_potential();
        let result = sda_minimize(&prob, p0, 200).unwrap();
        assert_eq!(prob.h2(&result.potential), Some(4));
        // strictly decreasing objective
        for w in result.records.windows(2) {
            assert!(w[1].h2_before < w[0].h2_before);
        }
        assert!(result
            .records
            .iter()
            .all(|r| r.h2_after == r.h2_before - r.delta2h));
    }

    #[test]
    fn already_optimal_takes_no_steps() {
        let prep = prepare(star_instance());
        let prob = prep.full_problem();
        let mut p = prob.initial_potential();
        p[3] = GridPoint::origin(4);
        let result = sda_minimize(&prob, p.clone(), 10).unwrap();
        assert_eq!(result.steps, 0);
        assert_eq!(result.potential, p);
    }

    #[test]
    fn doubling_examples() {
        let p = vec![
            GridPoint::origin(0),
            GridPoint::on_branch(0, 1, 1),
            GridPoint::on_branch(1, 4, 0),
        ];
        let d = double_potential(&p);
        assert_eq!(d[0], GridPoint::origin(0));
        assert_eq!(d[1], GridPoint::on_branch(0, 2, 2));
        assert_eq!(d[2], GridPoint::on_branch(1, 8, 0));
    }

    #[test]
    fn scaling_on_star() {
        let prep = prepare(star_instance());
        let result = scaling_solve(&prep).unwrap();
        assert_eq!(result.phases.len(), 3); // value weights 1, 2, 4
        assert_eq!(result.phases[0].steps, 0);
        let prob = prep.full_problem();
        assert_eq!(prob.h2(&result.potential), Some(4));
        for ph in &result.phases {
            assert!(ph.steps <= 2 * prep.base.m() + 4, "phase {} too long", ph.t);
        }
    }

    #[test]
    fn repair_restores_feasibility() {
        // costs 3 round to 2 at phase 1 and back to 3 at phase 0; the
        // doubled phase-1 optimum can sit on an edge that tightens
        let inst = Instance::new(
            4,
            3,
            vec![
                Edge { u: 0, v: 3, cost: 3 },
                Edge { u: 1, v: 3, cost: 3 },
                Edge { u: 2, v: 3, cost: 3 },
            ],
            vec![0, 0, 0, 2],
        )
        .unwrap();
        let prep = prepare(inst);
        let result = scaling_solve(&prep).unwrap();
        let prob = prep.full_problem();
        assert!(prob.is_potential(&result.potential));
        // terminals stay pinned through every phase
        for s in 0..3 {
            assert_eq!(
                result.potential[s],
                GridPoint::new(StarPoint::on_branch(s, 2 * prep.m), 0)
            );
        }
    }
}
