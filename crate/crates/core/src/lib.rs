//! Exact solver for the minimum-cost node-capacitated free multiflow problem.
//!
//! Given an undirected network with terminals, node capacities, and edge
//! costs, the solver finds a half-integral multiflow of maximum total value
//! and, among those, minimum cost. It works on the dual side: the dual is an
//! L-convex function over a product of star-shaped grids, minimized by cost-
//! scaled steepest descent where every descent step is a bisubmodular flow
//! feasibility problem reduced to submodular flow. The primal solution is
//! read off an optimal dual point and certified bit-exactly by zero duality
//! gap and complementary slackness.
//!
//! Everything is integer arithmetic on doubled (half-integral) quantities;
//! the crate is `no_std` (with `alloc`).

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bisubflow;
pub mod certify;
pub mod decompose;
pub mod dualnet;
pub mod ext;
pub mod grid;
pub mod instgen;
pub mod model;
pub mod oracle;
pub mod sda;
pub mod subflow;

pub use certify::{certify, Certificate};
pub use decompose::{support_to_multiflow, Multiflow};
pub use model::{parse_instance, prepare, Instance, ModelError, PreparedInstance};
pub use sda::{scaling_solve, PhaseReport};

use alloc::vec::Vec;

#[derive(Debug)]
pub enum SolveError {
    Model(ModelError),
    Dual(dualnet::DualError),
    /// The self-certification gate failed; carries the full solution for
    /// inspection. This indicates a bug, never a property of the input.
    Certificate(Solution),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::Model(e) => write!(f, "{e}"),
            SolveError::Dual(e) => write!(f, "{e}"),
            SolveError::Certificate(s) => {
                write!(f, "certificate failed: gap {}", s.certificate.gap)?;
                for v in &s.certificate.violations {
                    write!(f, "; {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Model(e)
    }
}

impl From<dualnet::DualError> for SolveError {
    fn from(e: dualnet::DualError) -> Self {
        SolveError::Dual(e)
    }
}

/// A solved instance: optimal dual potential, optimal half-integral
/// multiflow, certificate, and the per-phase descent reports.
#[derive(Debug)]
pub struct Solution {
    pub prepared: PreparedInstance,
    pub potential: model::GridVector,
    pub multiflow: Multiflow,
    pub certificate: Certificate,
    pub phases: Vec<PhaseReport>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Fail with `SolveError::Certificate` unless the certificate is clean.
    pub enforce_certificate: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            enforce_certificate: true,
        }
    }
}

/// Full pipeline: perturb costs, pick the value weight, run the scaling
/// descent, read off a multiflow from the final support, and certify.
pub fn solve_with(inst: Instance, opts: SolveOptions) -> Result<Solution, SolveError> {
    let prep = prepare(inst);
    let scaled = scaling_solve(&prep)?;
    let prob = prep.full_problem();
    let multiflow = support_to_multiflow(&prob, &scaled.support)?;
    let certificate = certify(&prep, &scaled.potential, &multiflow);
    let solution = Solution {
        prepared: prep,
        potential: scaled.potential,
        multiflow,
        certificate,
        phases: scaled.phases,
    };
    if opts.enforce_certificate && !solution.certificate.is_clean() {
        return Err(SolveError::Certificate(solution));
    }
    Ok(solution)
}

pub fn solve(inst: Instance) -> Result<Solution, SolveError> {
    solve_with(inst, SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use model::Edge;

    #[test]
    fn solve_star_end_to_end() {
        let inst = Instance::new(
            4,
            3,
            alloc::vec![
                Edge { u: 0, v: 3, cost: 1 },
                Edge { u: 1, v: 3, cost: 1 },
                Edge { u: 2, v: 3, cost: 1 },
            ],
            alloc::vec![0, 0, 0, 1],
        )
        .unwrap();
        let sol = solve(inst).unwrap();
        assert_eq!(sol.certificate.value2, 2);
        assert_eq!(sol.certificate.cost2_original, 4);
        assert_eq!(sol.certificate.gap, 0);
        assert!(sol.certificate.is_clean());
    }

    #[test]
    fn solve_edgeless_instance() {
        let inst = Instance::new(4, 3, alloc::vec![], alloc::vec![0, 0, 0, 5]).unwrap();
        let sol = solve(inst).unwrap();
        assert_eq!(sol.certificate.value2, 0);
        assert!(sol.certificate.is_clean());
        assert_eq!(sol.phases.len(), 1);
    }

    #[test]
    fn solve_zero_capacity() {
        let inst = Instance::new(
            4,
            3,
            alloc::vec![
                Edge { u: 0, v: 3, cost: 2 },
                Edge { u: 1, v: 3, cost: 0 },
                Edge { u: 2, v: 3, cost: 1 },
            ],
            alloc::vec![0, 0, 0, 0],
        )
        .unwrap();
        let sol = solve(inst).unwrap();
        assert_eq!(sol.certificate.value2, 0);
        assert!(sol.certificate.is_clean());
    }
}
