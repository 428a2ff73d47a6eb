//! Parameter algebra, adiabatic qubit solution, effective potentials and the
//! thermodynamic-limit closed forms.
//!
//! All energies are in the reduced unit `E = 2ε/ω`, so the oscillator part of
//! every Hamiltonian reads `-d²/dQ² + Q²` and has ground energy 1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Critical coupling of the superradiant transition.
pub const ALPHA_CRITICAL: f64 = 1.0;

/// Physical parameters: oscillator frequency ω, qubit splitting Δ, coupling λ
/// (all in the same energy unit) and the number of qubits N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub delta: f64,
    pub coupling: f64,
    pub n_qubits: u64,
}

impl ModelParams {
    pub fn new(omega: f64, delta: f64, coupling: f64, n_qubits: u64) -> Result<Self> {
        let params = Self {
            omega,
            delta,
            coupling,
            n_qubits,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(invalid("omega", format!("must be positive, got {}", self.omega)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {}", self.delta)));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(invalid(
                "coupling",
                format!("must be non-negative, got {}", self.coupling),
            ));
        }
        if self.n_qubits == 0 {
            return Err(invalid("n_qubits", "must be at least 1"));
        }
        Ok(())
    }
}

/// Reduced parameters `D = 2Δ/ω`, `L = 2√2·λ/ω`, `α = L²/2D` and the product `N·D`.
///
/// Every oscillator observable depends on the model only through `(α, N·D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub d_ratio: f64,
    pub l_coupling: f64,
    pub alpha: f64,
    pub nd: f64,
}

impl DimensionlessParams {
    pub fn new(d_ratio: f64, l_coupling: f64, n_qubits: u64) -> Result<Self> {
        if !(d_ratio.is_finite() && d_ratio > 0.0) {
            return Err(invalid("d_ratio", format!("must be positive, got {d_ratio}")));
        }
        if !(l_coupling.is_finite() && l_coupling >= 0.0) {
            return Err(invalid(
                "l_coupling",
                format!("must be non-negative, got {l_coupling}"),
            ));
        }
        if n_qubits == 0 {
            return Err(invalid("n_qubits", "must be at least 1"));
        }
        Ok(Self {
            d_ratio,
            l_coupling,
            alpha: l_coupling * l_coupling / (2.0 * d_ratio),
            nd: n_qubits as f64 * d_ratio,
        })
    }

    /// Parameters at a given `α`; `L` is recovered as `√(2αD)`.
    pub fn from_alpha(alpha: f64, d_ratio: f64, n_qubits: u64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("alpha", format!("must be non-negative, got {alpha}")));
        }
        if !(d_ratio.is_finite() && d_ratio > 0.0) {
            return Err(invalid("d_ratio", format!("must be positive, got {d_ratio}")));
        }
        let mut p = Self::new(d_ratio, (2.0 * alpha * d_ratio).sqrt(), n_qubits)?;
        // keep α exactly as requested; L²/2D reproduces it to rounding
        p.alpha = alpha;
        Ok(p)
    }

    /// Number of qubits implied by `nd / d_ratio`, rounded.
    pub fn n_qubits(&self) -> u64 {
        (self.nd / self.d_ratio).round() as u64
    }

    /// `2α/(N·D)`, the coefficient of `Q²` inside `Θ²/D²`.
    pub fn stiffness(&self) -> f64 {
        2.0 * self.alpha / self.nd
    }
}

/// Maps physical parameters onto the reduced set.
pub fn reduce(params: &ModelParams) -> Result<DimensionlessParams> {
    params.validate()?;
    let d_ratio = 2.0 * params.delta / params.omega;
    let l_coupling = 2.0 * std::f64::consts::SQRT_2 * params.coupling / params.omega;
    DimensionlessParams::new(d_ratio, l_coupling, params.n_qubits)
}

/// Adiabatic level spacing per qubit, `Θ(q) = √(D² + L²q²/N)`.
pub fn theta(q: f64, p: &DimensionlessParams, n_qubits: u64) -> f64 {
    let l2 = p.l_coupling * p.l_coupling;
    (p.d_ratio * p.d_ratio + l2 * q * q / n_qubits as f64).sqrt()
}

/// Amplitudes `A±(q) = √(1 ± Lq/(√N Θ))` of the single-qubit adiabatic ground state.
pub fn adiabatic_amplitudes(q: f64, p: &DimensionlessParams, n_qubits: u64) -> (f64, f64) {
    let c = polarization(q, p, n_qubits);
    ((1.0 + c).max(0.0).sqrt(), (1.0 - c).max(0.0).sqrt())
}

/// `Lq/(√N Θ(q))`, the z-polarisation of each qubit in the adiabatic state.
pub(crate) fn polarization(q: f64, p: &DimensionlessParams, n_qubits: u64) -> f64 {
    if p.l_coupling == 0.0 || q == 0.0 {
        return 0.0;
    }
    let lq = p.l_coupling * q / (n_qubits as f64).sqrt();
    // lq/√(D² + lq²) without overflow for large |q|
    lq / p.d_ratio.hypot(lq)
}

/// Effective oscillator potential `Q² − NΘ(Q)` (reduced units).
pub fn effective_potential(q: f64, p: &DimensionlessParams, n_qubits: u64) -> f64 {
    q * q - n_qubits as f64 * theta(q, p, n_qubits)
}

/// Minima of the effective potential: `{0}` for `α ≤ 1`, `{−Q₀, +Q₀}` above.
pub fn well_minima(p: &DimensionlessParams, n_qubits: u64) -> Vec<f64> {
    if p.alpha <= ALPHA_CRITICAL {
        return vec![0.0];
    }
    let q0 = (n_qubits as f64).sqrt() * p.d_ratio * (p.alpha * p.alpha - 1.0).sqrt()
        / p.l_coupling;
    vec![-q0, q0]
}

/// A one-dimensional even potential `V(q)`, split as `offset + shifted(q)` so
/// that large constant parts do not cost precision in the eigenproblem.
pub trait Potential: Sync {
    /// Potential measured from [`Potential::offset`].
    fn shifted(&self, q: f64) -> f64;

    fn offset(&self) -> f64 {
        0.0
    }

    fn value(&self, q: f64) -> f64 {
        self.offset() + self.shifted(q)
    }
}

impl<F> Potential for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn shifted(&self, q: f64) -> f64 {
        self(q)
    }
}

/// The adiabatic effective potential `Q² − √((ND)² + 2αND·Q²)`, offset `−ND`.
///
/// Parametrised by `(α, N·D)` alone; the shifted part is evaluated without
/// cancellation as `Q² − 2αQ²/(1 + √(1 + 2αQ²/ND))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub alpha: f64,
    pub nd: f64,
}

impl EffectivePotential {
    pub fn new(p: &DimensionlessParams) -> Self {
        Self {
            alpha: p.alpha,
            nd: p.nd,
        }
    }
}

impl Potential for EffectivePotential {
    fn shifted(&self, q: f64) -> f64 {
        let q2 = q * q;
        let x = 2.0 * self.alpha * q2 / self.nd;
        q2 - 2.0 * self.alpha * q2 / (1.0 + (1.0 + x).sqrt())
    }

    fn offset(&self) -> f64 {
        -self.nd
    }
}

/// Quartic truncation `(1 − α)Q² + α²Q⁴/(2ND)`, offset `−ND`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPotential {
    pub alpha: f64,
    pub nd: f64,
}

impl QuarticPotential {
    pub fn new(p: &DimensionlessParams) -> Self {
        Self {
            alpha: p.alpha,
            nd: p.nd,
        }
    }
}

impl Potential for QuarticPotential {
    fn shifted(&self, q: f64) -> f64 {
        let q2 = q * q;
        (1.0 - self.alpha) * q2 + self.alpha * self.alpha * q2 * q2 / (2.0 * self.nd)
    }

    fn offset(&self) -> f64 {
        -self.nd
    }
}

/// The one-parameter family `ζq² + q⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledQuartic {
    pub zeta: f64,
}

impl Potential for ScaledQuartic {
    fn shifted(&self, q: f64) -> f64 {
        let q2 = q * q;
        self.zeta * q2 + q2 * q2
    }
}

/// Thermodynamic-limit (`N → ∞`) observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoObservables {
    pub sx_per_n: f64,
    pub sx2_per_n2: f64,
    pub sz2_per_n2: f64,
    pub sy2_per_n2: f64,
    /// `⟨Q² + P²⟩/N`
    pub order_param: f64,
    /// `E₀/N` with `E₀ = 2ε₀/ω`
    pub e0_per_n: f64,
    pub tau_infinity: f64,
}

/// Normal-phase branch (`α ≤ 1`) of the thermodynamic limit.
pub fn normal_phase(alpha: f64, d_ratio: f64) -> ThermoObservables {
    ThermoObservables {
        sx_per_n: -1.0,
        sx2_per_n2: 1.0,
        sz2_per_n2: 0.0,
        sy2_per_n2: 0.0,
        order_param: 0.0,
        e0_per_n: -d_ratio,
        tau_infinity: 1.0 - (1.0 + alpha / (d_ratio * (1.0 - alpha).sqrt())).powf(-0.5),
    }
}

/// Superradiant branch (`α > 1`) of the thermodynamic limit.
pub fn superradiant_phase(alpha: f64, d_ratio: f64) -> ThermoObservables {
    let sx2 = 1.0 / (alpha * alpha);
    ThermoObservables {
        sx_per_n: -1.0 / alpha,
        sx2_per_n2: sx2,
        sz2_per_n2: 1.0 - sx2,
        sy2_per_n2: 0.0,
        // D²/L² = 1/(2α) D
        order_param: d_ratio / (2.0 * alpha) * (alpha * alpha - 1.0),
        e0_per_n: -0.5 * d_ratio * (alpha + 1.0 / alpha),
        tau_infinity: 1.0
            - 0.5
                * (1.0 + 1.0 / (d_ratio * alpha * alpha * (alpha * alpha - 1.0).sqrt()))
                    .powf(-0.5),
    }
}

/// Piecewise thermodynamic limit; `α = 1` belongs to the normal branch.
pub fn thermo_limit(alpha: f64, d_ratio: f64) -> ThermoObservables {
    if alpha <= ALPHA_CRITICAL {
        normal_phase(alpha, d_ratio)
    } else {
        superradiant_phase(alpha, d_ratio)
    }
}
