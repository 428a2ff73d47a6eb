//! Solving many `(α, N)` points at fixed `D`.
//!
//! Points are independent and run on the ambient rayon pool. Results come back
//! in input order whatever the scheduling, so output built from them is
//! reproducible byte for byte.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::GridSpec;
use crate::entanglement::{tangles, TangleResult};
use crate::error::Result;
use crate::model::DimensionlessParams;
use crate::observables::{assemble, checked_assemble, ObservableSet, PotentialKind};

/// Every observable and both tangles at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSolution {
    pub alpha: f64,
    pub n_qubits: u64,
    pub d_ratio: f64,
    pub observables: ObservableSet,
    pub tangles: TangleResult,
    pub converged: bool,
}

/// Solves the full adiabatic potential at `(α, D, N)`.
///
/// A ladder that ends short of `tolerance` still yields values; the shortfall
/// is reported through `converged` so a sweep can flag the row and carry on.
pub fn solve_point(alpha: f64, d_ratio: f64, n_qubits: u64, tolerance: f64) -> Result<PointSolution> {
    solve_point_on(alpha, d_ratio, n_qubits, tolerance, None)
}

/// [`solve_point`] with the refinement ladder started from `grid` instead of
/// the automatic choice.
pub fn solve_point_on(
    alpha: f64,
    d_ratio: f64,
    n_qubits: u64,
    tolerance: f64,
    grid: Option<&GridSpec>,
) -> Result<PointSolution> {
    let p = DimensionlessParams::from_alpha(alpha, d_ratio, n_qubits)?;
    let ground = match grid {
        Some(g) => PotentialKind::Full.ground_state_on(&p, g, tolerance)?,
        None => PotentialKind::Full.ground_state(&p, tolerance)?,
    };
    let converged = ground.converged;
    let observables = if converged {
        checked_assemble(&ground, &p, n_qubits, PotentialKind::Full)?
    } else {
        assemble(&ground, &p, n_qubits, PotentialKind::Full)
    };
    let tangles = tangles(&ground, &p, n_qubits);
    Ok(PointSolution {
        alpha,
        n_qubits,
        d_ratio,
        observables,
        tangles,
        converged,
    })
}

/// Solves every `(α, N)` pair, results in input order.
pub fn solve_points(points: &[(f64, u64)], d_ratio: f64, tolerance: f64) -> Vec<Result<PointSolution>> {
    solve_points_on(points, d_ratio, tolerance, None)
}

pub fn solve_points_on(
    points: &[(f64, u64)],
    d_ratio: f64,
    tolerance: f64,
    grid: Option<&GridSpec>,
) -> Vec<Result<PointSolution>> {
    points
        .par_iter()
        .map(|&(alpha, n)| solve_point_on(alpha, d_ratio, n, tolerance, grid))
        .collect()
}

/// The `(α, N)` grid sorted by `N`, then `α`.
pub fn ordered_grid(alphas: &[f64], n_values: &[u64]) -> Vec<(f64, u64)> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut als = alphas.to_vec();
    als.sort_by(f64::total_cmp);
    als.dedup();
    ns.iter()
        .flat_map(|&n| als.iter().map(move |&a| (a, n)))
        .collect()
}
