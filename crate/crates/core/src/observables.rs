//! Ground-state expectation values.
//!
//! Every spin observable follows from the integrals
//! `Φ_ν = ∫ φ₀²(Q) (1 + 2αQ²/ND)^ν dQ`. They are evaluated as `Φ_ν − 1` so
//! that the small finite-size deviations near the critical point keep their
//! digits.

use serde::{Deserialize, Serialize};

use crate::eigensolver::{
    solve_ground, solve_ground_auto, solve_with_levels, GridSpec, GroundState, QuarticConstants, WaveFunction,
};
use crate::error::{invalid, Error, Result};
use crate::model::{DimensionlessParams, EffectivePotential, Potential, QuarticPotential};

/// Which oscillator potential the ground state is solved in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum PotentialKind {
    /// `Q² − NΘ(Q)`
    #[default]
    Full,
    /// `(1 − α)Q² + α²Q⁴/(2ND)`, the expansion to quartic order
    Quartic,
}

impl PotentialKind {
    pub fn ground_state(self, p: &DimensionlessParams, tolerance: f64) -> Result<GroundState> {
        match self {
            Self::Full => solve_ground_auto(&EffectivePotential::new(p), tolerance),
            Self::Quartic => solve_ground_auto(&QuarticPotential::new(p), tolerance),
        }
    }

    /// Ground state with the refinement ladder starting from `grid`.
    pub fn ground_state_on(self, p: &DimensionlessParams, grid: &GridSpec, tolerance: f64) -> Result<GroundState> {
        match self {
            Self::Full => solve_ground(&EffectivePotential::new(p), grid, tolerance),
            Self::Quartic => solve_ground(&QuarticPotential::new(p), grid, tolerance),
        }
    }
}

/// `Φ_ν` for the exponents that generate the spin moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    pub minus_one: f64,
    pub minus_half: f64,
    pub plus_half: f64,
}

/// Spin moments of the adiabatic ground state. `⟨S_y⟩ = ⟨S_z⟩ = 0` by symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinObservables {
    pub sx_per_n: f64,
    /// `1 + ⟨S_x⟩/N`, computed without cancellation.
    pub sx_deviation: f64,
    pub sx2_per_n2: f64,
    pub sy2_per_n2: f64,
    pub sz2_per_n2: f64,
}

/// All ground-state observables at one `(α, N, D)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub params: DimensionlessParams,
    pub n_qubits: u64,
    pub kind: PotentialKind,
    pub sx_per_n: f64,
    pub sx_deviation: f64,
    pub sx2_per_n2: f64,
    pub sy2_per_n2: f64,
    pub sz2_per_n2: f64,
    pub q2: f64,
    pub q4: f64,
    pub p2: f64,
    /// `⟨P² + Q²⟩/N`
    pub order_param: f64,
    /// `E₀ = 2ε₀/ω`
    pub e0_reduced: f64,
    /// `e₀ = E₀ + ND`
    pub e0_shifted: f64,
    pub phi: PhiTable,
    /// `e₀ − (⟨P²⟩ + ⟨V + ND⟩)` with `⟨V⟩` rebuilt from the moments.
    pub bookkeeping_residual: f64,
    pub refinement_error: f64,
}

impl ObservableSet {
    /// `e₀/ND`
    pub fn e0_per_nd(&self) -> f64 {
        self.e0_shifted / self.params.nd
    }
}

/// `Φ_ν − 1` by trapezoid quadrature.
pub fn phi_nu_deviation(wf: &WaveFunction, nu: f64, p: &DimensionlessParams) -> f64 {
    if nu == 0.0 || p.alpha == 0.0 {
        return 0.0;
    }
    let stiffness = p.stiffness();
    wf.expectation(|q| (nu * (stiffness * q * q).ln_1p()).exp_m1())
}

/// `Φ_ν = ∫ φ₀² (1 + 2αQ²/ND)^ν dQ`
pub fn phi_nu(wf: &WaveFunction, nu: f64, p: &DimensionlessParams) -> f64 {
    1.0 + phi_nu_deviation(wf, nu, p)
}

fn spins_from_deviations(dev_minus_half: f64, dev_minus_one: f64, n_qubits: u64) -> SpinObservables {
    let inv_n = 1.0 / n_qubits as f64;
    let sx2 = 1.0 + (1.0 - inv_n) * dev_minus_one;
    SpinObservables {
        sx_per_n: -(1.0 + dev_minus_half),
        sx_deviation: -dev_minus_half,
        sx2_per_n2: sx2,
        sy2_per_n2: inv_n,
        sz2_per_n2: (1.0 + inv_n) - sx2,
    }
}

/// Spin moments from one wavefunction.
pub fn spin_observables(wf: &WaveFunction, p: &DimensionlessParams, n_qubits: u64) -> SpinObservables {
    spins_from_deviations(
        phi_nu_deviation(wf, -0.5, p),
        phi_nu_deviation(wf, -1.0, p),
        n_qubits,
    )
}

/// `⟨P²⟩ = ∫ (dφ/dQ)² dQ`
pub fn momentum_variance(wf: &WaveFunction) -> f64 {
    wf.kinetic()
}

/// `⟨Q^k⟩`; odd orders vanish by parity and are returned as exactly zero.
pub fn moment(wf: &WaveFunction, k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    if k == 0 {
        return wf.norm_squared();
    }
    wf.expectation(|q| q.powi(k as i32))
}

/// Assembles an [`ObservableSet`] from a solved ground state, extrapolating
/// every quadrature over the last two grids.
pub fn assemble(
    ground: &GroundState,
    p: &DimensionlessParams,
    n_qubits: u64,
    kind: PotentialKind,
) -> ObservableSet {
    let dev = |nu: f64| ground.extrapolate(|wf| phi_nu_deviation(wf, nu, p));
    let (dev_m1, dev_mh, dev_ph) = (dev(-1.0), dev(-0.5), dev(0.5));
    let spins = spins_from_deviations(dev_mh, dev_m1, n_qubits);
    let q2 = ground.extrapolate(|wf| moment(wf, 2));
    let q4 = ground.extrapolate(|wf| moment(wf, 4));
    let p2 = ground.extrapolate(momentum_variance);
    let potential = match kind {
        PotentialKind::Full => q2 - p.nd * dev_ph,
        PotentialKind::Quartic => {
            (1.0 - p.alpha) * q2 + p.alpha * p.alpha * q4 / (2.0 * p.nd)
        }
    };
    ObservableSet {
        params: *p,
        n_qubits,
        kind,
        sx_per_n: spins.sx_per_n,
        sx_deviation: spins.sx_deviation,
        sx2_per_n2: spins.sx2_per_n2,
        sy2_per_n2: spins.sy2_per_n2,
        sz2_per_n2: spins.sz2_per_n2,
        q2,
        q4,
        p2,
        order_param: (p2 + q2) / n_qubits as f64,
        e0_reduced: ground.energy,
        e0_shifted: ground.shifted_energy,
        phi: PhiTable {
            minus_one: 1.0 + dev_m1,
            minus_half: 1.0 + dev_mh,
            plus_half: 1.0 + dev_ph,
        },
        bookkeeping_residual: ground.shifted_energy - (p2 + potential),
        refinement_error: ground.refinement_error,
    }
}

fn check_n(p: &DimensionlessParams, n_qubits: u64) -> Result<()> {
    if n_qubits == 0 {
        return Err(invalid("n_qubits", "must be at least 1"));
    }
    let implied = p.nd / p.d_ratio;
    if (implied - n_qubits as f64).abs() > 1e-9 * implied.max(1.0) {
        return Err(invalid(
            "n_qubits",
            format!("{n_qubits} disagrees with nd/d_ratio = {implied}"),
        ));
    }
    Ok(())
}

/// [`assemble`] followed by the energy bookkeeping check: `e₀` against
/// `⟨P²⟩ + ⟨V + ND⟩` rebuilt from the moments, within `10·tolerance`.
pub fn checked_assemble(
    ground: &GroundState,
    p: &DimensionlessParams,
    n_qubits: u64,
    kind: PotentialKind,
) -> Result<ObservableSet> {
    check_n(p, n_qubits)?;
    let set = assemble(ground, p, n_qubits, kind);
    let scale = set.e0_shifted.abs().max(1.0);
    if set.bookkeeping_residual.abs() > 10.0 * ground.tolerance * scale {
        return Err(Error::CrossCheck {
            quantity: "energy bookkeeping",
            direct: set.e0_shifted,
            finite_difference: set.e0_shifted - set.bookkeeping_residual,
        });
    }
    Ok(set)
}

/// Solves the ground state in the chosen potential and assembles all observables.
pub fn observables_with(
    p: &DimensionlessParams,
    n_qubits: u64,
    kind: PotentialKind,
    tolerance: f64,
) -> Result<(ObservableSet, GroundState)> {
    check_n(p, n_qubits)?;
    let ground = kind.ground_state(p, tolerance)?.require_converged()?;
    let set = checked_assemble(&ground, p, n_qubits, kind)?;
    Ok((set, ground))
}

/// All observables in the full adiabatic potential.
pub fn full_observables(p: &DimensionlessParams, n_qubits: u64, tolerance: f64) -> Result<ObservableSet> {
    observables_with(p, n_qubits, PotentialKind::Full, tolerance).map(|(set, _)| set)
}

/// Finite-difference derivatives of `E₀` in the quartic-reduced problem
/// against their Feynman–Hellmann expectation values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeynmanHellmannReport {
    pub alpha: f64,
    pub nd: f64,
    /// `∂E₀/∂α` by finite differences
    pub de_dalpha: f64,
    /// `−⟨Q²⟩ + (α/ND)⟨Q⁴⟩`
    pub de_dalpha_expected: f64,
    /// `∂E₀/∂(ND)` by finite differences
    pub de_dnd: f64,
    /// `−1 − α²⟨Q⁴⟩/(2(ND)²)`
    pub de_dnd_expected: f64,
    pub residual_alpha: f64,
    pub residual_nd: f64,
    /// `α` too close to zero for a centred difference
    pub one_sided_alpha: bool,
}

impl FeynmanHellmannReport {
    /// Largest residual relative to `max(1, |expected|)`.
    pub fn max_relative_residual(&self) -> f64 {
        let a = self.residual_alpha.abs() / self.de_dalpha_expected.abs().max(1.0);
        let b = self.residual_nd.abs() / self.de_dnd_expected.abs().max(1.0);
        a.max(b)
    }
}

/// Checks `∂E₀/∂α` and `∂E₀/∂(ND)` of the quartic-reduced problem.
///
/// Steps are `δ(ND) = step·ND` and `δα = step·max((2ND)^{−2/3}, |1 − α|)`:
/// the critical window sets the α-scale near `α = 1`, the distance to it
/// elsewhere. All solves share one grid ladder, on which the
/// Hellmann–Feynman relation holds exactly, so the residual measures the
/// difference formula alone; each difference is extrapolated in the step.
pub fn feynman_hellmann_check(
    p: &DimensionlessParams,
    n_qubits: u64,
    step: f64,
    tolerance: f64,
) -> Result<FeynmanHellmannReport> {
    check_n(p, n_qubits)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(invalid("step", format!("must be positive, got {step}")));
    }
    let (alpha, nd) = (p.alpha, p.nd);
    let center = solve_ground_auto(&QuarticPotential { alpha, nd }, tolerance)?.require_converged()?;
    let q2 = center.extrapolate(|wf| moment(wf, 2));
    let q4 = center.extrapolate(|wf| moment(wf, 4));

    let energy = |alpha: f64, nd: f64| -> Result<f64> {
        let v = QuarticPotential { alpha, nd };
        let gs = solve_with_levels(&v, &center.base_grid, center.refinements, tolerance)?;
        Ok(gs.energy)
    };

    let d_alpha = step * (2.0 * nd).powf(-2.0 / 3.0).max((1.0 - alpha).abs());
    let one_sided = alpha < 2.0 * d_alpha;
    let alpha_slope = |h: f64| -> Result<f64> {
        if one_sided {
            let (f0, f1, f2) = (energy(alpha, nd)?, energy(alpha + h, nd)?, energy(alpha + 2.0 * h, nd)?);
            Ok((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
        } else {
            Ok((energy(alpha + h, nd)? - energy(alpha - h, nd)?) / (2.0 * h))
        }
    };
    let de_dalpha = (4.0 * alpha_slope(0.5 * d_alpha)? - alpha_slope(d_alpha)?) / 3.0;

    let d_nd = step * nd;
    let nd_slope = |h: f64| -> Result<f64> {
        Ok((energy(alpha, nd + h)? - energy(alpha, nd - h)?) / (2.0 * h))
    };
    let de_dnd = (4.0 * nd_slope(0.5 * d_nd)? - nd_slope(d_nd)?) / 3.0;

    let de_dalpha_expected = -q2 + alpha / nd * q4;
    let de_dnd_expected = -1.0 - alpha * alpha * q4 / (2.0 * nd * nd);
    Ok(FeynmanHellmannReport {
        alpha,
        nd,
        de_dalpha,
        de_dalpha_expected,
        de_dnd,
        de_dnd_expected,
        residual_alpha: de_dalpha - de_dalpha_expected,
        residual_nd: de_dnd - de_dnd_expected,
        one_sided_alpha: one_sided,
    })
}

/// One rung of the critical-point moment recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionResidual {
    pub k: u32,
    /// `⟨Q^{k+4}⟩/(2ND)^{2/3}` by quadrature
    pub lhs: f64,
    /// right-hand side built from lower moments
    pub rhs: f64,
    pub relative: f64,
}

/// Checks the hypervirial recursion of `−d²/dQ² + Q⁴/(2ND)` at `α = 1`,
///
/// `⟨Q^{k+4}⟩/(2ND)^{2/3} = (k+1)/(k+3)·β₀⟨Q^k⟩ + k(k²−1)/(4(k+3))·(2ND)^{1/3}⟨Q^{k−2}⟩`,
///
/// for even `k = 0, 2, …, k_max`.
pub fn moment_recursion_check(
    wf: &WaveFunction,
    nd: f64,
    constants: &QuarticConstants,
    k_max: u32,
) -> Vec<RecursionResidual> {
    let scale = 2.0 * nd;
    (0..=k_max)
        .step_by(2)
        .map(|k| {
            let kf = k as f64;
            let lhs = moment(wf, k + 4) / scale.powf(2.0 / 3.0);
            let mut rhs = (kf + 1.0) / (kf + 3.0) * constants.beta0 * moment(wf, k);
            if k >= 2 {
                rhs += kf * (kf * kf - 1.0) / (4.0 * (kf + 3.0))
                    * scale.powf(1.0 / 3.0)
                    * moment(wf, k - 2);
            }
            RecursionResidual {
                k,
                lhs,
                rhs,
                relative: ((lhs - rhs) / lhs).abs(),
            }
        })
        .collect()
}

/// `⟨V⟩ + ⟨P²⟩` of the shifted potential on one grid (the discrete Rayleigh quotient).
pub fn rayleigh_quotient<P: Potential + ?Sized>(wf: &WaveFunction, potential: &P) -> f64 {
    momentum_variance(wf) + wf.expectation(|q| potential.shifted(q))
}
