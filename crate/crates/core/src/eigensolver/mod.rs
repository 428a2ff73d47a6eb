//! Ground state of `−d²/dq² + V(q)` for even, confining potentials.
//!
//! The operator is discretised with second-order central differences on a
//! uniform grid with Dirichlet walls at `±q_max`. Only the even-parity sector
//! is assembled (half grid, node `q = 0` symmetrised), so the lowest
//! eigenvector is the symmetric ground state even when a deep double well
//! makes the even/odd pair numerically degenerate.
//!
//! Accuracy is certified by refinement: the grid is halved until two
//! successive Richardson-extrapolated eigenvalues agree within tolerance.

mod tridiagonal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Potential, ScaledQuartic};

pub use tridiagonal::SymTridiagonal;

/// Default eigenvalue tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Maximum number of grid halvings in [`solve_ground`].
pub const MAX_REFINEMENTS: usize = 8;

/// Smallest admissible number of grid nodes.
pub const MIN_POINTS: usize = 201;

/// Margin of the potential above the energy at the domain edge.
const WALL_MARGIN: f64 = 40.0;

/// WKB decay exponent required between the outer turning point and the wall.
const WALL_ACTION: f64 = 25.0;

/// Symmetric uniform grid on `[−q_max, q_max]` with an odd number of nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    q_max: f64,
    num_points: usize,
}

impl GridSpec {
    pub fn new(q_max: f64, num_points: usize) -> Result<Self> {
        if !(q_max.is_finite() && q_max > 0.0) {
            return Err(Error::InvalidGrid(format!("q_max must be positive, got {q_max}")));
        }
        if num_points < MIN_POINTS || num_points % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "num_points must be odd and at least {MIN_POINTS}, got {num_points}"
            )));
        }
        Ok(Self { q_max, num_points })
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.q_max / (self.num_points - 1) as f64
    }

    /// Index of the node at `q = 0`.
    pub fn center(&self) -> usize {
        (self.num_points - 1) / 2
    }

    /// Coordinate of node `i`; exactly antisymmetric about the centre.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|i| self.node(i))
    }

    /// Same domain, spacing halved; every old node is kept.
    pub fn refined(&self) -> Self {
        Self {
            q_max: self.q_max,
            num_points: 2 * self.num_points - 1,
        }
    }
}

/// Real wavefunction sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.num_points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid weights times `φ²` at each node.
    pub fn density(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.grid.spacing();
        let last = self.values.len() - 1;
        self.values.iter().enumerate().map(move |(i, &v)| {
            let w = if i == 0 || i == last { 0.5 * h } else { h };
            (self.grid.node(i), w * v * v)
        })
    }

    /// `∫ φ² dq`
    pub fn norm_squared(&self) -> f64 {
        self.density().map(|(_, w)| w).sum()
    }

    /// `∫ f(q) φ²(q) dq`
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.density().map(|(q, w)| w * f(q)).sum()
    }

    /// `∫ φ⁴ dq`
    pub fn inverse_participation(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().map(|v| v.powi(4)).sum::<f64>() * h
    }

    /// `∫ (dφ/dq)² dq` with differences taken between neighbouring nodes.
    ///
    /// This is exactly the kinetic term of the discrete Hamiltonian's Rayleigh
    /// quotient, so `kinetic + ⟨V⟩` reproduces the grid eigenvalue.
    pub fn kinetic(&self) -> f64 {
        let h = self.grid.spacing();
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
            .sum::<f64>()
            / h
    }

    /// Largest `|φ(q) − φ(−q)|` over the grid.
    pub fn parity_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// No sign change on the interior nodes.
    pub fn is_nodeless(&self) -> bool {
        let n = self.values.len();
        let interior = &self.values[1..n - 1];
        interior.iter().all(|&v| v >= 0.0) || interior.iter().all(|&v| v <= 0.0)
    }
}

/// Converged ground state of a one-dimensional problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    /// Extrapolated lowest eigenvalue, including the potential's offset.
    pub energy: f64,
    /// Extrapolated eigenvalue measured from the potential's offset.
    pub shifted_energy: f64,
    /// Ground state on the finest grid.
    pub wavefunction: WaveFunction,
    /// Ground state on the next-coarser grid, used for extrapolating observables.
    pub coarse: WaveFunction,
    pub converged: bool,
    pub refinement_error: f64,
    pub tolerance: f64,
    /// Starting grid of the refinement ladder.
    pub base_grid: GridSpec,
    /// Number of halvings applied to `base_grid`.
    pub refinements: usize,
}

impl GroundState {
    /// Richardson extrapolation of a grid functional, `(4f(h/2) − f(h))/3`.
    pub fn extrapolate(&self, f: impl Fn(&WaveFunction) -> f64) -> f64 {
        let fine = f(&self.wavefunction);
        let coarse = f(&self.coarse);
        (4.0 * fine - coarse) / 3.0
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                refinements: self.refinements,
                refinement_error: self.refinement_error,
                tolerance: self.tolerance,
            })
        }
    }
}

/// The pure quartic oscillator constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticConstants {
    /// `e₀(0)`, lowest eigenvalue of `−d²/dq² + q⁴`
    pub beta0: f64,
    /// `∫ q² φ₀² dq = e₀′(0)`
    pub beta1: f64,
    /// `∫ φ₀⁴ dq`
    pub k_const: f64,
    pub beta0_error: f64,
    pub beta1_error: f64,
    pub k_error: f64,
}

fn check_even<P: Potential + ?Sized>(potential: &P, probes: &[f64]) -> Result<()> {
    for &q in probes {
        let (left, right) = (potential.shifted(q), potential.shifted(-q));
        if (left - right).abs() > 1e-12 * left.abs().max(right.abs()).max(1.0) {
            return Err(Error::NotEven { q, left, right });
        }
    }
    Ok(())
}

/// Outer wall: a `q > 0` with `V(q) ≥ level` on the rising flank, found by
/// doubling outward and then halving back while the flank stays above `level`.
/// Starting on the outer flank keeps the search out of a central barrier.
fn find_wall<P: Potential + ?Sized>(potential: &P, level: f64) -> Result<f64> {
    let rising = |q: f64, v: f64| potential.shifted(1.01 * q) >= v && potential.shifted(2.0 * q) >= v;
    let mut q = 1.0;
    let mut largest = f64::NEG_INFINITY;
    let mut found = false;
    for _ in 0..200 {
        let v = potential.shifted(q);
        if !v.is_finite() {
            return Err(Error::NotConfining(format!("V({q}) = {v}")));
        }
        largest = largest.max(v);
        if v >= level && rising(q, v) {
            found = true;
            break;
        }
        q *= 2.0;
    }
    if !found {
        return Err(Error::NotConfining(format!(
            "V stays below {level} out to q = {q:e} (largest value seen {largest})"
        )));
    }
    while q > 1e-150 {
        let inner = potential.shifted(0.5 * q);
        if inner < level || !rising(0.5 * q, inner) {
            break;
        }
        q *= 0.5;
    }
    Ok(q)
}

/// Samples `V` on `[0, q_hi]`.
fn sample<P: Potential + ?Sized>(potential: &P, q_hi: f64, count: usize) -> Vec<(f64, f64)> {
    (0..=count)
        .map(|i| {
            let q = q_hi * i as f64 / count as f64;
            (q, potential.shifted(q))
        })
        .collect()
}

/// Rough ground-energy estimate (in shifted units) from the self-consistent
/// condition `(E − V_min)·μ(E)² = 1`, where `μ(E)` is the measure of
/// `{q ≥ 0 : V(q) < E}`. Exact for `q²`; within 10% for `q⁴`.
pub fn estimate_shifted_energy<P: Potential + ?Sized>(potential: &P) -> Result<f64> {
    let v0 = potential.shifted(0.0);
    let mut q_hi = find_wall(potential, v0 + 1.0)?;
    let mut samples = sample(potential, q_hi, 1 << 16);
    let mut v_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    // deep wells: make sure the sampled window rises well above the minimum
    for _ in 0..64 {
        if samples.last().map_or(true, |s| s.1 >= v_min + 1.0) {
            break;
        }
        q_hi = find_wall(potential, v_min + 1.0)?.max(2.0 * q_hi);
        samples = sample(potential, q_hi, 1 << 16);
        v_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    }
    let step = q_hi / (samples.len() - 1) as f64;
    let measure = |e: f64| samples.iter().filter(|s| s.1 < e).count() as f64 * step;
    let excess = |e: f64| (e - v_min) * measure(e).powi(2) - 1.0;

    // bracket in log-space of E − V_min
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    while excess(v_min + hi) < 0.0 {
        hi *= 4.0;
        if hi > 1e300 {
            return Err(Error::NotConfining("energy estimate diverged".into()));
        }
    }
    while lo < hi && excess(v_min + lo) > 0.0 {
        lo *= 0.25;
        if lo < 1e-300 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if excess(v_min + mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    Ok(v_min + hi)
}

/// Chooses the domain and base resolution for an even confining potential.
///
/// `q_max` sits beyond the outer turning point of `energy_guess` by at least a
/// WKB decay exponent of 25 (tail amplitude below 1e-10) and where the
/// potential exceeds the guess by at least 40. The spacing resolves the
/// shortest classical wavelength `1/√(E − V_min)` to `tolerance^{1/4}`, the
/// accuracy reached after one Richardson step.
pub fn auto_grid<P: Potential + ?Sized>(
    potential: &P,
    energy_guess: f64,
    tolerance: f64,
) -> Result<GridSpec> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            reason: format!("must be positive, got {tolerance}"),
        });
    }
    let e = energy_guess - potential.offset();
    let wall = find_wall(potential, e + WALL_MARGIN)?;
    let probes: Vec<f64> = (1..=8).map(|i| wall * i as f64 / 8.0).collect();
    check_even(potential, &probes)?;
    if potential.shifted(2.0 * wall) <= potential.shifted(wall) {
        return Err(Error::NotConfining(format!(
            "V does not rise beyond q = {wall}"
        )));
    }

    let samples = sample(potential, wall, 1 << 14);
    let v_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let turning = samples
        .iter()
        .rev()
        .find(|s| s.1 < e)
        .map_or(0.0, |s| s.0);

    // integrate the WKB exponent outward from the turning point
    let dq = (wall - turning).max(wall * 1e-3) / 4096.0;
    let mut q = turning;
    let mut action = 0.0;
    while action < WALL_ACTION || potential.shifted(q) < e + WALL_MARGIN {
        let mid = potential.shifted(q + 0.5 * dq);
        action += (mid - e).max(0.0).sqrt() * dq;
        q += dq;
        if q > 1e6 * wall {
            return Err(Error::NotConfining(format!("no decay beyond q = {wall}")));
        }
    }
    let q_max = q;

    let kinetic = (e - v_min).max(f64::MIN_POSITIVE);
    let wavelength = 1.0 / kinetic.sqrt();
    let h = wavelength * tolerance.powf(0.25).clamp(0.005, 0.1);
    let half = ((q_max / h).ceil() as usize).max((MIN_POINTS - 1) / 2);
    GridSpec::new(q_max, 2 * half + 1)
}

/// Lowest even eigenpair on one grid: shifted eigenvalue and the normalised,
/// positive wavefunction on every node (zero at the walls).
pub fn solve_on_grid<P: Potential + ?Sized>(
    potential: &P,
    grid: &GridSpec,
) -> Result<(f64, WaveFunction)> {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let half = grid.center();

    let mut diag = Vec::with_capacity(half);
    for i in 0..half {
        let q = i as f64 * h;
        let v = potential.shifted(q);
        if !v.is_finite() {
            return Err(Error::NotConfining(format!("V({q}) = {v}")));
        }
        diag.push(2.0 * inv_h2 + v);
    }
    // φ(−h) = φ(h) couples the centre row with weight 2; symmetrised to √2
    let mut off = vec![-inv_h2; half - 1];
    off[0] = -std::f64::consts::SQRT_2 * inv_h2;

    let matrix = SymTridiagonal::new(diag, off);
    let (lambda, half_vector) = matrix.lowest_eigenpair();

    let n = grid.num_points();
    let center = grid.center();
    let mut values = vec![0.0; n];
    values[center] = std::f64::consts::SQRT_2 * half_vector[0];
    for (i, &v) in half_vector.iter().enumerate().skip(1) {
        values[center + i] = v;
        values[center - i] = v;
    }
    let norm = (values.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    values.iter_mut().for_each(|v| *v /= norm);
    let wavefunction = WaveFunction { grid: *grid, values };

    // Bisection resolves λ only to ε·‖T‖ ~ ε/h². The Rayleigh quotient in
    // difference form has no such cancellation and is quadratic in the
    // eigenvector error.
    let rayleigh = wavefunction.kinetic() + wavefunction.expectation(|q| potential.shifted(q));
    debug_assert!((rayleigh - lambda).abs() <= 1e-6 * lambda.abs().max(inv_h2 * f64::EPSILON * 1e6));
    Ok((rayleigh, wavefunction))
}

fn accept(error: f64, energy: f64, tolerance: f64) -> bool {
    error <= tolerance * energy.abs().max(1.0)
}

/// The WKB tail between the outer turning point of `energy` and the wall must
/// suppress the amplitude to `√tolerance`; otherwise the box, not the
/// potential, is confining the state.
fn decayed<P: Potential + ?Sized>(potential: &P, grid: &GridSpec, energy: f64, tolerance: f64) -> bool {
    let h = grid.spacing();
    let mut action = 0.0;
    for i in (0..grid.center()).rev() {
        let excess = potential.shifted(i as f64 * h) - energy;
        if excess <= 0.0 {
            break;
        }
        action += excess.sqrt() * h;
    }
    action >= -0.5 * tolerance.ln()
}

/// Halves the grid up to `max_levels` times. The energy is the Richardson
/// extrapolation of the last two grids; `refinement_error` is the change of
/// that extrapolation against the previous rung (after the first halving, the
/// estimated error of the finer raw eigenvalue).
fn run_ladder<P: Potential + ?Sized>(
    potential: &P,
    grid: &GridSpec,
    max_levels: usize,
    tolerance: f64,
    stop_when_converged: bool,
) -> Result<GroundState> {
    let (mut previous_energy, mut previous) = solve_on_grid(potential, grid)?;
    let mut current_grid = *grid;
    let mut previous_extrapolated = f64::NAN;
    let mut level = 0;
    loop {
        level += 1;
        current_grid = current_grid.refined();
        let (energy, wavefunction) = solve_on_grid(potential, &current_grid)?;
        let extrapolated = (4.0 * energy - previous_energy) / 3.0;
        let error = if level == 1 {
            (extrapolated - energy).abs()
        } else {
            (extrapolated - previous_extrapolated).abs()
        };
        let converged = accept(error, extrapolated, tolerance)
            && decayed(potential, &current_grid, extrapolated, tolerance);
        if level >= max_levels || (stop_when_converged && converged) {
            return Ok(GroundState {
                energy: potential.offset() + extrapolated,
                shifted_energy: extrapolated,
                wavefunction,
                coarse: previous,
                converged,
                refinement_error: error,
                tolerance,
                base_grid: *grid,
                refinements: level,
            });
        }
        previous_extrapolated = extrapolated;
        previous_energy = energy;
        previous = wavefunction;
    }
}

/// Runs exactly `levels ≥ 1` halvings starting from `grid`; used where several
/// solves must share one discretisation.
pub fn solve_with_levels<P: Potential + ?Sized>(
    potential: &P,
    grid: &GridSpec,
    levels: usize,
    tolerance: f64,
) -> Result<GroundState> {
    run_ladder(potential, grid, levels.max(1), tolerance, false)
}

/// Ground state with refinement until the extrapolated eigenvalue is stable to
/// `tolerance` (relative to `max(1, |E_shifted|)`), or [`MAX_REFINEMENTS`]
/// halvings. Non-convergence is reported through `converged = false`.
pub fn solve_ground<P: Potential + ?Sized>(
    potential: &P,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<GroundState> {
    let probes: Vec<f64> = (1..=8).map(|i| grid.q_max() * i as f64 / 8.0).collect();
    check_even(potential, &probes)?;
    run_ladder(potential, grid, MAX_REFINEMENTS, tolerance, true)
}

/// [`auto_grid`] seeded by [`estimate_shifted_energy`], then [`solve_ground`].
pub fn solve_ground_auto<P: Potential + ?Sized>(
    potential: &P,
    tolerance: f64,
) -> Result<GroundState> {
    let guess = estimate_shifted_energy(potential)? + potential.offset();
    let grid = auto_grid(potential, guess, tolerance)?;
    solve_ground(potential, &grid, tolerance)
}

/// Ground state of `−d²/dq² + ζq² + q⁴`.
pub fn solve_scaled_quartic(zeta: f64, tolerance: f64) -> Result<GroundState> {
    if !zeta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "zeta",
            reason: format!("must be finite, got {zeta}"),
        });
    }
    solve_ground_auto(&ScaledQuartic { zeta }, tolerance)
}

/// `β₀`, `β₁` and `K` of the pure quartic oscillator.
///
/// `β₁` is the quadrature `∫q²φ₀²`; it is cross-checked against a centred
/// difference of `e₀(ζ)` on the same grid ladder, extrapolated in the step.
pub fn quartic_constants(tolerance: f64) -> Result<QuarticConstants> {
    let ground = solve_scaled_quartic(0.0, tolerance)?.require_converged()?;
    let beta0 = ground.shifted_energy;
    let beta1 = ground.extrapolate(|wf| wf.expectation(|q| q * q));
    let k_const = ground.extrapolate(WaveFunction::inverse_participation);
    let fine_beta1 = ground.wavefunction.expectation(|q| q * q);
    let fine_k = ground.wavefunction.inverse_participation();

    let energy_at = |zeta: f64| -> Result<f64> {
        Ok(solve_with_levels(
            &ScaledQuartic { zeta },
            &ground.base_grid,
            ground.refinements,
            tolerance,
        )?
        .shifted_energy)
    };
    let slope = |step: f64| -> Result<f64> {
        Ok((energy_at(step)? - energy_at(-step)?) / (2.0 * step))
    };
    let step = 2e-3;
    let finite_difference = (4.0 * slope(0.5 * step)? - slope(step)?) / 3.0;
    if (finite_difference - beta1).abs() > 10.0 * tolerance.max(1e-9) {
        return Err(Error::CrossCheck {
            quantity: "beta1",
            direct: beta1,
            finite_difference,
        });
    }

    Ok(QuarticConstants {
        beta0,
        beta1,
        k_const,
        beta0_error: ground.refinement_error,
        beta1_error: (beta1 - fine_beta1).abs(),
        k_error: (k_const - fine_k).abs(),
    })
}
