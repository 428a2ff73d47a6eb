//! Critical-point scaling: the Symanzik variables, truncated large-`N`
//! expansions at `α = 1`, and power-law fits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigensolver::{solve_scaled_quartic, QuarticConstants};
use crate::entanglement::{purity_critical_asymptote, tau_n_critical_prediction};
use crate::error::{invalid, Error, Result};
use crate::sweep::PointSolution;

/// Symanzik variables of the quartic-reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymanzikMap {
    /// `ζ = (2ND/α²)^{2/3}(1 − α)`
    pub zeta: f64,
    /// `q = Q·q_scale` with `q_scale = (α²/2ND)^{1/6}`
    pub q_scale: f64,
    /// `E₀ + ND = energy_scale·e(ζ)` with `energy_scale = (α²/2ND)^{1/3}`
    pub energy_scale: f64,
}

pub fn symanzik_map(alpha: f64, nd: f64) -> Result<SymanzikMap> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid("alpha", format!("must be positive for the scaling map, got {alpha}")));
    }
    if !(nd.is_finite() && nd > 0.0) {
        return Err(invalid("nd", format!("must be positive, got {nd}")));
    }
    let ratio = alpha * alpha / (2.0 * nd);
    Ok(SymanzikMap {
        zeta: ratio.powf(-2.0 / 3.0) * (1.0 - alpha),
        q_scale: ratio.powf(1.0 / 6.0),
        energy_scale: ratio.powf(1.0 / 3.0),
    })
}

/// `E₀ = −ND + (α²/2ND)^{1/3}·e(ζ)`
pub fn energy_from_scaled(alpha: f64, nd: f64, scaled_energy: f64) -> Result<f64> {
    Ok(-nd + symanzik_map(alpha, nd)?.energy_scale * scaled_energy)
}

/// `e₀ = E₀ + ND` of the quartic-reduced problem via `−d²/dq² + ζq² + q⁴`.
pub fn shifted_energy_via_scaling(alpha: f64, nd: f64, tolerance: f64) -> Result<f64> {
    let map = symanzik_map(alpha, nd)?;
    let gs = solve_scaled_quartic(map.zeta, tolerance)?.require_converged()?;
    Ok(map.energy_scale * gs.shifted_energy)
}

/// Named observables with a large-`N` prediction at the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    PhiNu(f64),
    SxPerN,
    Sx2PerN2,
    /// `⟨P² + Q²⟩/(ND)`
    OrderParamOverD,
    Q2,
    Q4,
    /// `e₀ = E₀ + ND`
    E0Correction,
    /// `e₀/(ND)`
    E0PerNd,
    Tau1,
    TauN,
    /// `Tr ρ_N² = 1 − τ_N` for large `N`
    QubitPurity,
}

impl Observable {
    pub const ALL_FIXED: [Observable; 10] = [
        Observable::SxPerN,
        Observable::Sx2PerN2,
        Observable::OrderParamOverD,
        Observable::Q2,
        Observable::Q4,
        Observable::E0Correction,
        Observable::E0PerNd,
        Observable::Tau1,
        Observable::TauN,
        Observable::QubitPurity,
    ];

    /// The observable's value in a solved point.
    pub fn value(&self, s: &PointSolution) -> f64 {
        let o = &s.observables;
        match *self {
            Observable::PhiNu(nu) => {
                if nu == -1.0 {
                    o.phi.minus_one
                } else if nu == -0.5 {
                    o.phi.minus_half
                } else if nu == 0.5 {
                    o.phi.plus_half
                } else if nu == 0.0 {
                    1.0
                } else {
                    f64::NAN
                }
            }
            Observable::SxPerN => o.sx_per_n,
            Observable::Sx2PerN2 => o.sx2_per_n2,
            Observable::OrderParamOverD => o.order_param / o.params.d_ratio,
            Observable::Q2 => o.q2,
            Observable::Q4 => o.q4,
            Observable::E0Correction => o.e0_shifted,
            Observable::E0PerNd => o.e0_per_nd(),
            Observable::Tau1 => s.tangles.tau1,
            Observable::TauN => s.tangles.tau_n,
            Observable::QubitPurity => s.tangles.purity,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::PhiNu(nu) => write!(f, "phi_nu({nu})"),
            Observable::SxPerN => f.write_str("sx_per_n"),
            Observable::Sx2PerN2 => f.write_str("sx2_per_n2"),
            Observable::OrderParamOverD => f.write_str("order_param_over_D"),
            Observable::Q2 => f.write_str("q2"),
            Observable::Q4 => f.write_str("q4"),
            Observable::E0Correction => f.write_str("e0_correction"),
            Observable::E0PerNd => f.write_str("e0_per_nd"),
            Observable::Tau1 => f.write_str("tau1"),
            Observable::TauN => f.write_str("tau_n"),
            Observable::QubitPurity => f.write_str("qubit_purity"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("phi_nu(").and_then(|r| r.strip_suffix(')')) {
            return inner
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|nu| nu.is_finite())
                .map(Observable::PhiNu)
                .ok_or_else(|| Error::UnknownObservable(s.to_string()));
        }
        Ok(match s {
            "sx_per_n" => Observable::SxPerN,
            "sx2_per_n2" => Observable::Sx2PerN2,
            "order_param_over_D" | "order_param_over_d" => Observable::OrderParamOverD,
            "q2" => Observable::Q2,
            "q4" => Observable::Q4,
            "e0_correction" => Observable::E0Correction,
            "e0_per_nd" => Observable::E0PerNd,
            "tau1" => Observable::Tau1,
            "tau_n" => Observable::TauN,
            "qubit_purity" => Observable::QubitPurity,
            _ => return Err(Error::UnknownObservable(s.to_string())),
        })
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Truncated large-`N` expansion of `observable` at `α = 1`.
pub fn finite_size_prediction(
    observable: Observable,
    n_qubits: u64,
    d_ratio: f64,
    c: &QuarticConstants,
) -> f64 {
    let n = n_qubits as f64;
    let s = 2.0 * n * d_ratio;
    let x = s.powf(-2.0 / 3.0);
    let (b0, b1) = (c.beta0, c.beta1);
    match observable {
        Observable::PhiNu(nu) => 1.0 + 4.0 * nu * b1 * x + 8.0 / 3.0 * nu * (nu - 1.0) * b0 * x * x,
        Observable::SxPerN => -1.0 + 2.0 * b1 * x - 2.0 * b0 * x * x,
        Observable::Sx2PerN2 => 1.0 - (n - 1.0) / n * (4.0 * b1 * x - 16.0 / 3.0 * b0 * x * x),
        Observable::OrderParamOverD => 2.0 * b1 * x + 4.0 / 3.0 * b0 * x * x,
        Observable::Q2 => b1 * s.cbrt(),
        Observable::Q4 => b0 / 3.0 * s.powf(2.0 / 3.0),
        Observable::E0Correction => b0 / s.cbrt(),
        Observable::E0PerNd => 2.0 * b0 * s.powf(-4.0 / 3.0),
        Observable::Tau1 => 4.0 * b1 * x,
        Observable::TauN => tau_n_critical_prediction(n_qubits, d_ratio, c.k_const),
        Observable::QubitPurity => purity_critical_asymptote(n_qubits, d_ratio, c.k_const),
    }
}

/// Size of the leading finite-size term of the prediction: the first
/// `N`-dependent correction for quantities with an `N`-independent limit,
/// the whole prediction otherwise.
pub fn leading_term(observable: Observable, n_qubits: u64, d_ratio: f64, c: &QuarticConstants) -> f64 {
    let x = (2.0 * n_qubits as f64 * d_ratio).powf(-2.0 / 3.0);
    match observable {
        Observable::PhiNu(nu) => (4.0 * nu * c.beta1 * x).abs(),
        Observable::SxPerN => 2.0 * c.beta1 * x,
        Observable::Sx2PerN2 => 4.0 * c.beta1 * x,
        Observable::TauN => 1.0 - tau_n_critical_prediction(n_qubits, d_ratio, c.k_const),
        other => finite_size_prediction(other, n_qubits, d_ratio, c).abs(),
    }
}

/// One observable at one parameter point; the input record for fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n_qubits: u64,
    pub d_ratio: f64,
    pub alpha: f64,
    pub observable: Observable,
    pub value: f64,
}

impl ScalingPoint {
    pub fn from_solution(s: &PointSolution, observable: Observable) -> Self {
        Self {
            n_qubits: s.n_qubits,
            d_ratio: s.d_ratio,
            alpha: s.alpha,
            observable,
            value: observable.value(s),
        }
    }
}

/// What is fitted against `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    /// the value itself
    Identity,
    /// `|value − limit|`
    DeviationFrom(f64),
    /// `1 − value`
    OneMinus,
}

impl Transform {
    pub fn apply(&self, value: f64) -> f64 {
        match *self {
            Transform::Identity => value,
            Transform::DeviationFrom(limit) => (value - limit).abs(),
            Transform::OneMinus => 1.0 - value,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("identity"),
            Transform::DeviationFrom(x) => write!(f, "deviation:{x}"),
            Transform::OneMinus => f.write_str("one-minus"),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" => Ok(Transform::Identity),
            "one-minus" => Ok(Transform::OneMinus),
            _ => s
                .strip_prefix("deviation:")
                .and_then(|x| x.trim().parse::<f64>().ok())
                .filter(|x| x.is_finite())
                .map(Transform::DeviationFrom)
                .ok_or_else(|| invalid("transform", format!("unknown transform '{s}'"))),
        }
    }
}

/// Least-squares power law `y = prefactor·N^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub n_range: [u64; 2],
    pub points: usize,
}

/// Minimum number of points and decades of `N` a fit must span.
pub const MIN_FIT_POINTS: usize = 4;
pub const MIN_FIT_DECADES: f64 = 1.5;

fn fit_inputs(points: &[ScalingPoint], transform: Transform) -> Result<(Vec<(f64, f64)>, [u64; 2])> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points given, at least {MIN_FIT_POINTS} needed",
            points.len()
        )));
    }
    let n_min = points.iter().map(|p| p.n_qubits).min().unwrap_or(0);
    let n_max = points.iter().map(|p| p.n_qubits).max().unwrap_or(0);
    if n_min == 0 {
        return Err(Error::Fit("N = 0 in fit input".into()));
    }
    let decades = (n_max as f64 / n_min as f64).log10();
    if decades < MIN_FIT_DECADES {
        return Err(Error::Fit(format!(
            "N spans {decades:.2} decades, at least {MIN_FIT_DECADES} needed"
        )));
    }
    let mut xy = Vec::with_capacity(points.len());
    for p in points {
        let y = transform.apply(p.value);
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::Fit(format!(
                "transformed value {y} at N = {} is not positive",
                p.n_qubits
            )));
        }
        xy.push(((p.n_qubits as f64).ln(), y.ln()));
    }
    Ok((xy, [n_min, n_max]))
}

/// Straight-line fit of `ln(transform(value))` against `ln N`.
pub fn fit_exponent(points: &[ScalingPoint], transform: Transform) -> Result<FitResult> {
    let (xy, n_range) = fit_inputs(points, transform)?;
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        n_range,
        points: xy.len(),
    })
}

/// Amplitude of `y = A·N^exponent` with the exponent held fixed
/// (geometric mean of `y·N^{−exponent}`).
pub fn fit_amplitude(points: &[ScalingPoint], transform: Transform, exponent: f64) -> Result<f64> {
    let (xy, _) = fit_inputs(points, transform)?;
    let mean = xy.iter().map(|(x, y)| y - exponent * x).sum::<f64>() / xy.len() as f64;
    Ok(mean.exp())
}

/// Dyadic ladder `{2^lo, …, 2^hi}`.
pub fn dyadic_ladder(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}
