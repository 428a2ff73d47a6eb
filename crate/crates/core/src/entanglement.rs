//! Tangles of the adiabatic ground state.
//!
//! `τ₁` is the tangle of one qubit with the rest of the system; `τ_N` is the
//! normalised linear entropy of the oscillator–qubits bipartition,
//! `τ_N = η(1 − Tr ρ_N²)` with `η = 2^N/(2^N − 1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{GroundState, WaveFunction};
use crate::model::{adiabatic_amplitudes, thermo_limit, theta, DimensionlessParams};
use crate::observables::phi_nu_deviation;

/// Terms with `N·sin²(Δθ/2)` above this weigh less than `e^{−60}`.
const BAND_EXPONENT: f64 = 60.0;

/// Rows whose quadrature weight `h·φ²` is below this are dropped.
const ROW_WEIGHT_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangleResult {
    /// `1 − ⟨S_x⟩²/N²`
    pub tau1: f64,
    /// `2(1 − Tr ρ₁²)` from the explicit single-qubit state
    pub tau1_state: f64,
    pub tau_n: f64,
    /// `Tr ρ_N²`
    pub purity: f64,
    pub eta: f64,
    /// `|purity(fine) − purity(coarse)|` over the last grid halving; zero for
    /// a single-grid evaluation.
    pub purity_change: f64,
}

/// `τ₁ = 1 − (⟨S_x⟩/N)²`
pub fn tau_one(sx_per_n: f64) -> f64 {
    (1.0 - sx_per_n * sx_per_n).clamp(0.0, 1.0)
}

/// Single-qubit reduced state in the `σ_x` basis, by direct quadrature of the
/// adiabatic amplitudes:
/// `ρ₊₊ = ½∫φ²A₋²`, `ρ₋₋ = ½∫φ²A₊²`, `ρ₊₋ = −½∫φ²A₊A₋`.
pub fn single_qubit_state(wf: &WaveFunction, p: &DimensionlessParams, n_qubits: u64) -> [[f64; 2]; 2] {
    let plus = 0.5 * wf.expectation(|q| {
        let (_, am) = adiabatic_amplitudes(q, p, n_qubits);
        am * am
    });
    let minus = 0.5 * wf.expectation(|q| {
        let (ap, _) = adiabatic_amplitudes(q, p, n_qubits);
        ap * ap
    });
    let coherence = -0.5 * wf.expectation(|q| {
        let (ap, am) = adiabatic_amplitudes(q, p, n_qubits);
        ap * am
    });
    [[plus, coherence], [coherence, minus]]
}

/// `2(1 − Tr ρ²)` of a 2×2 density matrix.
pub fn qubit_tangle(rho: &[[f64; 2]; 2]) -> f64 {
    let trace_sq = rho[0][0] * rho[0][0] + rho[1][1] * rho[1][1] + 2.0 * rho[0][1] * rho[1][0];
    2.0 * (1.0 - trace_sq)
}

/// Per-qubit overlap `O(Q,Q′) = ½[1 + (D² + L²QQ′/N)/(Θ(Q)Θ(Q′))]`.
pub fn overlap_kernel(q: f64, q_prime: f64, p: &DimensionlessParams, n_qubits: u64) -> f64 {
    let n = n_qubits as f64;
    let num = p.d_ratio * p.d_ratio + p.l_coupling * p.l_coupling * (q * q_prime) / n;
    0.5 * (1.0 + num / (theta(q, p, n_qubits) * theta(q_prime, p, n_qubits)))
}

/// `η = 1/(1 − 2^{−N})`, exactly 1 once `2^{−N}` is below rounding.
pub fn eta(n_qubits: u64) -> f64 {
    if n_qubits == 0 {
        return f64::INFINITY;
    }
    -1.0 / (-(n_qubits as f64) * std::f64::consts::LN_2).exp_m1()
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Relative change between successive strides accepted as converged.
const STRIDE_TOLERANCE: f64 = 1e-12;

/// Nodes kept on the first (sparsest) pass of the stride search.
const MIN_STRIDE_NODES: usize = 64;

/// Tensor trapezoid sum over every `stride`-th node, centred on `Q = 0`.
fn purity_on_stride(wf: &WaveFunction, root: f64, n: f64, stride: usize) -> f64 {
    let center = wf.grid().center();
    let nodes: Vec<(f64, f64)> = wf
        .density()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(center) % stride == 0)
        .map(|(_, (q, weight))| ((root * q).atan(), weight * stride as f64))
        .collect();
    let rows: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let (theta_i, w_i) = nodes[i];
            if w_i < ROW_WEIGHT_FLOOR {
                return 0.0;
            }
            let mut off = 0.0;
            for &(theta_j, w_j) in &nodes[i + 1..] {
                let s = (0.5 * (theta_j - theta_i)).sin();
                let s2 = s * s;
                if n * s2 > BAND_EXPONENT {
                    break;
                }
                off += w_j * (n * (-s2).ln_1p()).exp();
            }
            w_i * (w_i + 2.0 * off)
        })
        .collect();
    pairwise_sum(&rows)
}

/// Purity and the node stride it converged at.
fn purity_with_stride(wf: &WaveFunction, p: &DimensionlessParams, n_qubits: u64) -> (f64, usize) {
    if p.alpha == 0.0 || p.l_coupling == 0.0 {
        return (1.0, 1);
    }
    let root = p.stiffness().sqrt();
    let n = n_qubits as f64;
    let mut stride = 1;
    while wf.grid().center() / (2 * stride) >= MIN_STRIDE_NODES / 2 {
        stride *= 2;
    }
    let mut value = purity_on_stride(wf, root, n, stride);
    while stride > 1 {
        let finer = purity_on_stride(wf, root, n, stride / 2);
        let settled = (finer - value).abs() <= STRIDE_TOLERANCE * finer.abs();
        value = finer;
        stride /= 2;
        if settled {
            break;
        }
    }
    (value.clamp(f64::MIN_POSITIVE, 1.0), stride)
}

/// `Tr ρ_N² = ∬ φ²(Q)φ²(Q′) O(Q,Q′)^N dQ dQ′` by the tensor trapezoid rule.
///
/// With `θ = arctan(√(2α/ND)·Q)` the overlap is `cos²((θ − θ′)/2)`, so `O^N`
/// is evaluated as `exp(N·ln(1 − sin²((θ − θ′)/2)))`. `θ` is monotone in `Q`,
/// which lets each row stop once the kernel has decayed below `e^{−60}`.
/// Rows run in parallel; their sums are combined pairwise in a fixed order.
///
/// The integrand is smooth and decays fast, so the trapezoid sum converges
/// much faster than the eigensolver grid refines. It is evaluated on every
/// `2^k`-th node, halving the stride until the value is stable to 1e-12.
pub fn purity_qubits(wf: &WaveFunction, p: &DimensionlessParams, n_qubits: u64) -> f64 {
    purity_with_stride(wf, p, n_qubits).0
}

fn assemble(sx_per_n: f64, rho: [[f64; 2]; 2], purity: f64, change: f64, n_qubits: u64) -> TangleResult {
    let eta = eta(n_qubits);
    TangleResult {
        tau1: tau_one(sx_per_n),
        tau1_state: qubit_tangle(&rho),
        tau_n: (eta * (1.0 - purity)).clamp(0.0, 1.0),
        purity,
        eta,
        purity_change: change,
    }
}

/// Both tangles from one wavefunction.
pub fn tau_n(wf: &WaveFunction, p: &DimensionlessParams, n_qubits: u64) -> TangleResult {
    let sx = -(1.0 + phi_nu_deviation(wf, -0.5, p));
    let rho = single_qubit_state(wf, p, n_qubits);
    assemble(sx, rho, purity_qubits(wf, p, n_qubits), 0.0, n_qubits)
}

/// Both tangles with every quadrature extrapolated over the last two grids.
pub fn tangles(ground: &GroundState, p: &DimensionlessParams, n_qubits: u64) -> TangleResult {
    let sx = -(1.0 + ground.extrapolate(|wf| phi_nu_deviation(wf, -0.5, p)));
    let element = |r: usize, c: usize| {
        ground.extrapolate(|wf| single_qubit_state(wf, p, n_qubits)[r][c])
    };
    let rho = [[element(0, 0), element(0, 1)], [element(1, 0), element(1, 1)]];
    let (fine, stride) = purity_with_stride(&ground.wavefunction, p, n_qubits);
    // the same physical nodes on the coarse grid, so only φ itself differs
    let coarse = if stride >= 2 && p.alpha != 0.0 && p.l_coupling != 0.0 {
        purity_on_stride(&ground.coarse, p.stiffness().sqrt(), n_qubits as f64, stride / 2)
    } else {
        purity_qubits(&ground.coarse, p, n_qubits)
    };
    let purity = ((4.0 * fine - coarse) / 3.0).clamp(f64::MIN_POSITIVE, 1.0);
    assemble(sx, rho, purity, (fine - coarse).abs(), n_qubits)
}

/// Thermodynamic-limit tangle; `τ∞ = 1` at `α = 1`.
pub fn tau_infinity(alpha: f64, d_ratio: f64) -> f64 {
    thermo_limit(alpha, d_ratio).tau_infinity
}

/// Critical-point tangle law in its commonly quoted form,
/// `τ_N ≈ 1 − √π·K/((2D)^{1/3} N^{1/6})`.
pub fn tau_n_critical_prediction(n_qubits: u64, d_ratio: f64, k_const: f64) -> f64 {
    1.0 - std::f64::consts::PI.sqrt() * k_const
        / ((2.0 * d_ratio).powf(1.0 / 3.0) * (n_qubits as f64).powf(1.0 / 6.0))
}

/// Large-`N` purity at `α = 1` from the narrow-kernel limit of the overlap:
/// `O^N → exp(−(Q − Q′)²/(2D))` and `∫φ⁴ = K(2ND)^{−1/6}` give
/// `Tr ρ_N² ≈ √π·K·(2D)^{1/3}·N^{−1/6}`.
pub fn purity_critical_asymptote(n_qubits: u64, d_ratio: f64, k_const: f64) -> f64 {
    std::f64::consts::PI.sqrt() * k_const * (2.0 * d_ratio).powf(1.0 / 3.0)
        / (n_qubits as f64).powf(1.0 / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{quartic_constants, solve_ground_auto};
    use crate::model::EffectivePotential;

    const TOL: f64 = 1e-9;

    fn ground(alpha: f64, d: f64, n: u64) -> (DimensionlessParams, GroundState) {
        let p = DimensionlessParams::from_alpha(alpha, d, n).unwrap();
        let gs = solve_ground_auto(&EffectivePotential::new(&p), TOL).unwrap();
        (p, gs)
    }

    #[test]
    fn tau_one_examples() {
        assert_eq!(tau_one(-1.0), 0.0);
        assert!((tau_one(-0.5) - 0.75).abs() < 1e-15);
        assert_eq!(tau_one(0.0), 1.0);
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(1), 2.0);
        assert!((eta(2) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(eta(61), 1.0);
        assert_eq!(eta(1 << 20), 1.0);
    }

    #[test]
    fn decoupled_product_state() {
        let (p, gs) = ground(0.0, 10.0, 16);
        let t = tangles(&gs, &p, 16);
        assert_eq!(t.purity, 1.0);
        assert_eq!(t.tau_n, 0.0);
        assert_eq!(t.tau1, 0.0);
    }

    #[test]
    fn kernel_symmetry_and_diagonal() {
        let p = DimensionlessParams::from_alpha(1.3, 10.0, 32).unwrap();
        for &(a, b) in &[(0.3, -2.0), (5.0, 7.5), (-11.0, 4.0)] {
            let (x, y) = (overlap_kernel(a, b, &p, 32), overlap_kernel(b, a, &p, 32));
            assert_eq!(x, y);
            assert!(x > 0.0 && x <= 1.0);
            assert!((overlap_kernel(a, a, &p, 32) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_matches_angle_form() {
        let p = DimensionlessParams::from_alpha(0.8, 10.0, 8).unwrap();
        let root = p.stiffness().sqrt();
        for &(a, b) in &[(0.5, -1.5), (3.0, 2.0), (-4.0, 6.0)] {
            let d = 0.5 * ((root * a).atan() - (root * b).atan());
            assert!((overlap_kernel(a, b, &p, 8) - d.cos().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_qubit_routes_agree() {
        for (alpha, n) in [(0.5, 1), (1.0, 1), (1.0, 64), (2.0, 16)] {
            let (p, gs) = ground(alpha, 10.0, n);
            let t = tau_n(&gs.wavefunction, &p, n);
            assert!((t.tau1 - t.tau1_state).abs() < 1e-10, "{t:?}");
            let rho = single_qubit_state(&gs.wavefunction, &p, n);
            assert!((rho[0][0] + rho[1][1] - 1.0).abs() < 1e-12);
            assert!((rho[0][0] - rho[1][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn one_qubit_purity_equals_qubit_purity() {
        // with N = 1 the oscillator and the qubit share one pure state
        let (p, gs) = ground(1.0, 10.0, 1);
        let t = tau_n(&gs.wavefunction, &p, 1);
        let rho = single_qubit_state(&gs.wavefunction, &p, 1);
        let qubit_purity = 1.0 - 0.5 * qubit_tangle(&rho);
        assert!((t.purity - qubit_purity).abs() < 1e-10, "{} vs {qubit_purity}", t.purity);
    }

    #[test]
    fn critical_tau_one_scaling() {
        let c = quartic_constants(TOL).unwrap();
        let (p, gs) = ground(1.0, 10.0, 10_000);
        let t = tangles(&gs, &p, 10_000);
        let predicted = 4.0 * c.beta1 / (2.0 * p.nd).powf(2.0 / 3.0);
        assert!((t.tau1 / predicted - 1.0).abs() < 0.05, "{} vs {predicted}", t.tau1);
    }

    #[test]
    fn superradiant_tangle_near_limit() {
        let (p, gs) = ground(2.0, 10.0, 1024);
        let t = tangles(&gs, &p, 1024);
        let limit = tau_infinity(2.0, 10.0);
        assert!((t.tau_n / limit - 1.0).abs() < 0.02, "{} vs {limit}", t.tau_n);
    }

    #[test]
    fn quenching_with_size() {
        let mut last = 0.0;
        for n in [4, 16, 64, 256] {
            let (p, gs) = ground(1.0, 10.0, n);
            let t = tangles(&gs, &p, n);
            assert!(t.tau_n > last && t.tau_n < 1.0, "N = {n}: {}", t.tau_n);
            last = t.tau_n;
        }
    }

    #[test]
    fn strided_purity_matches_every_node() {
        for (alpha, n) in [(1.0, 64), (2.0, 16), (0.4, 1000)] {
            let (p, gs) = ground(alpha, 10.0, n);
            let full = purity_on_stride(&gs.wavefunction, p.stiffness().sqrt(), n as f64, 1);
            let (strided, stride) = purity_with_stride(&gs.wavefunction, &p, n);
            assert!(stride > 1);
            assert!((full - strided).abs() < 1e-11, "{full} vs {strided} at stride {stride}");
        }
    }

    #[test]
    fn purity_is_bit_stable() {
        let (p, gs) = ground(1.0, 10.0, 256);
        let a = purity_qubits(&gs.wavefunction, &p, 256);
        let b = purity_qubits(&gs.wavefunction, &p, 256);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn thermodynamic_values() {
        assert_eq!(tau_infinity(1.0, 10.0), 1.0);
        assert_eq!(tau_infinity(0.0, 10.0), 0.0);
        assert!((tau_infinity(2.0, 10.0) - 0.5036).abs() < 1e-4);
    }

    #[test]
    fn critical_prediction_forms() {
        let law = tau_n_critical_prediction(1_000_000, 10.0, 0.46);
        assert!((law - 0.970).abs() < 5e-4, "{law}");
        assert!(tau_n_critical_prediction(u64::MAX, 10.0, 0.46) > 0.999);
        assert!(tau_n_critical_prediction(1000, 1e12, 0.46) > 0.999);
        let derived = purity_critical_asymptote(1_000_000, 10.0, 0.46);
        assert!((derived - 0.46 * std::f64::consts::PI.sqrt() * 20f64.powf(1.0 / 3.0) / 10.0).abs() < 1e-15);
    }

    #[test]
    fn critical_purity_follows_asymptote() {
        let k = quartic_constants(TOL).unwrap().k_const;
        let n = 1u64 << 20;
        let (p, gs) = ground(1.0, 10.0, n);
        let t = tangles(&gs, &p, n);
        let predicted = purity_critical_asymptote(n, 10.0, k);
        assert!((t.purity / predicted - 1.0).abs() < 0.05, "{} vs {predicted}", t.purity);
    }
}
