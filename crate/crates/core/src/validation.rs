//! Invariant suite run by `dicke validate`.
//!
//! Each check is self-contained and reports a measured figure against its
//! bound. Nothing here panics on a failed check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{
    auto_grid, quartic_constants, solve_ground_auto, solve_on_grid, QuarticConstants,
};
use crate::entanglement::{overlap_kernel, tangles};
use crate::error::Result;
use crate::model::{
    adiabatic_amplitudes, effective_potential, normal_phase, superradiant_phase, theta,
    DimensionlessParams, EffectivePotential, Potential, QuarticPotential,
};
use crate::observables::{
    feynman_hellmann_check, moment_recursion_check, observables_with, ObservableSet, PotentialKind,
};
use crate::scaling::{shifted_energy_via_scaling, symanzik_map};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// measured figure of merit
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn at_most(name: &str, measured: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: measured.is_finite() && measured <= bound,
            measured,
            bound,
            detail: detail.into(),
        }
    }

    fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            measured: if passed { 0.0 } else { 1.0 },
            bound: 0.0,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            bound: f64::NAN,
            detail: format!("error: {err}"),
        }
    }
}

fn guarded(name: &str, f: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    f().unwrap_or_else(|e| CheckOutcome::failed(name, e))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `count` points of the 2-D Halton sequence in the unit square.
fn halton(count: usize) -> Vec<(f64, f64)> {
    let radical = |mut i: usize, base: usize| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    (1..=count).map(|i| (radical(i, 2), radical(i, 3))).collect()
}

fn model_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let samples = halton(1000);

    let mut parity: f64 = 0.0;
    let mut theta_margin = f64::INFINITY;
    let mut norm: f64 = 0.0;
    for &(u, v) in &samples {
        let alpha = 3.0 * u;
        let n = 1 + (v * 1000.0) as u64;
        let p = DimensionlessParams::from_alpha(alpha, 10.0, n).unwrap();
        let q = 40.0 * (v - 0.5) + u;
        let (a, b) = (effective_potential(q, &p, n), effective_potential(-q, &p, n));
        parity = parity.max(rel(a, b));
        theta_margin = theta_margin.min(theta(q, &p, n) - p.d_ratio);
        let (ap, am) = adiabatic_amplitudes(q, &p, n);
        norm = norm.max((ap * ap + am * am - 2.0).abs());
    }
    out.push(CheckOutcome::at_most("model: potential parity", parity, 1e-15, "1000 Halton points"));
    out.push(CheckOutcome::flag(
        "model: theta >= D",
        theta_margin >= 0.0,
        format!("smallest Θ − D = {theta_margin:e}"),
    ));
    out.push(CheckOutcome::at_most("model: amplitude normalisation", norm, 1e-12, "A₊² + A₋² = 2"));

    let a = DimensionlessParams::from_alpha(1.3, 10.0, 100).unwrap();
    let b = DimensionlessParams::from_alpha(1.3, 100.0, 10).unwrap();
    let (va, vb) = (EffectivePotential::new(&a), EffectivePotential::new(&b));
    let collapse = (0..=400)
        .map(|i| {
            let q = -60.0 + 0.3 * i as f64;
            rel(va.value(q), vb.value(q))
        })
        .fold(0.0, f64::max);
    out.push(CheckOutcome::at_most(
        "model: (alpha, ND) collapse of the potential",
        collapse,
        1e-12,
        "D=10,N=100 against D=100,N=10",
    ));

    let mut continuity: f64 = 0.0;
    for d in [1.0, 10.0, 100.0] {
        let (l, r) = (normal_phase(1.0, d), superradiant_phase(1.0, d));
        for (x, y) in [
            (l.sx_per_n, r.sx_per_n),
            (l.sx2_per_n2, r.sx2_per_n2),
            (l.sz2_per_n2, r.sz2_per_n2),
            (l.order_param, r.order_param),
            (l.e0_per_n, r.e0_per_n),
            (l.tau_infinity, r.tau_infinity),
        ] {
            continuity = continuity.max((x - y).abs());
        }
    }
    out.push(CheckOutcome::at_most("model: thermodynamic branches meet at alpha=1", continuity, 1e-12, ""));
    out
}

fn eigensolver_checks(tolerance: f64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    out.push(guarded("eigensolver: grid eigenvalue rises monotonically under refinement", || {
        let p = DimensionlessParams::from_alpha(1.0, 10.0, 64).unwrap();
        let v = EffectivePotential::new(&p);
        let mut grid = auto_grid(&v, -640.0, 1e-4)?;
        let mut last = f64::NEG_INFINITY;
        let mut worst = f64::INFINITY;
        for _ in 0..5 {
            let (e, _) = solve_on_grid(&v, &grid)?;
            worst = worst.min(e - last + 1e-12);
            last = e;
            grid = grid.refined();
        }
        Ok(CheckOutcome::flag(
            "eigensolver: grid eigenvalue rises monotonically under refinement",
            worst >= 0.0,
            "second-order differences approach from below at fixed q_max",
        ))
    }));

    out.push(guarded("eigensolver: parity and nodelessness", || {
        let mut defect: f64 = 0.0;
        let mut nodeless = true;
        for (alpha, n) in [(0.0, 4), (0.7, 16), (1.0, 256), (1.5, 64), (3.0, 32)] {
            let p = DimensionlessParams::from_alpha(alpha, 10.0, n).unwrap();
            let gs = solve_ground_auto(&EffectivePotential::new(&p), tolerance)?;
            defect = defect.max(gs.wavefunction.parity_defect());
            nodeless &= gs.wavefunction.is_nodeless();
        }
        let mut o = CheckOutcome::at_most("eigensolver: parity and nodelessness", defect, 1e-12, "");
        o.passed &= nodeless;
        Ok(o)
    }));

    out.push(guarded("eigensolver: scaled-quartic reconstruction", || {
        let worst = halton(20)
            .par_iter()
            .map(|&(u, v)| -> Result<f64> {
                let alpha = 0.8 + 0.4 * u;
                let nd = 10f64.powf(1.0 + 3.0 * v);
                let direct = solve_ground_auto(&QuarticPotential { alpha, nd }, tolerance)?
                    .require_converged()?
                    .shifted_energy;
                Ok(rel(direct, shifted_energy_via_scaling(alpha, nd, tolerance)?))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(CheckOutcome::at_most(
            "eigensolver: scaled-quartic reconstruction",
            worst,
            1e-6,
            "20 points, α ∈ [0.8, 1.2], ND ∈ [10, 10⁴]",
        ))
    }));

    out.push(guarded("eigensolver: quartic truncation gap at D=100, N=100", || {
        let c = quartic_constants(tolerance)?;
        let p = DimensionlessParams::from_alpha(1.0, 100.0, 100).unwrap();
        let full = solve_ground_auto(&EffectivePotential::new(&p), tolerance)?.shifted_energy;
        let quartic = solve_ground_auto(&QuarticPotential::new(&p), tolerance)?.shifted_energy;
        let gap = full - quartic;
        // the dropped sextic term −Q⁶/(2(ND)²) shifts e₀ by −⟨q⁶⟩/ND at first
        // order, with ⟨q⁶⟩ = (3/5)β₀β₁ + 3/10 for the pure quartic ground state
        let estimate = -(0.6 * c.beta0 * c.beta1 + 0.3) / p.nd;
        Ok(CheckOutcome::at_most(
            "eigensolver: quartic truncation gap at D=100, N=100",
            rel(gap, estimate),
            0.05,
            format!("gap {gap:.4e} against first-order estimate {estimate:.4e}, {:.3e} of e₀", gap.abs() / quartic),
        ))
    }));
    out
}

fn collapse_fields(s: &ObservableSet) -> [f64; 9] {
    [
        s.phi.minus_one,
        s.phi.minus_half,
        s.phi.plus_half,
        s.sx_per_n,
        s.q2,
        s.q4,
        s.p2,
        s.e0_shifted,
        s.e0_reduced,
    ]
}

fn observable_checks(tolerance: f64, c: &QuarticConstants) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let lattice: Vec<(f64, u64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (0.25 * i as f64, 1u64 << j)))
        .collect();
    let sets: Result<Vec<ObservableSet>> = lattice
        .par_iter()
        .map(|&(alpha, n)| {
            let p = DimensionlessParams::from_alpha(alpha, 10.0, n)?;
            Ok(observables_with(&p, n, PotentialKind::Full, tolerance)?.0)
        })
        .collect();
    match sets {
        Ok(sets) => {
            let book = sets
                .iter()
                .map(|s| s.bookkeeping_residual.abs() / s.e0_reduced.abs().max(1.0))
                .fold(0.0, f64::max);
            out.push(CheckOutcome::at_most(
                "observables: energy bookkeeping",
                book,
                1e-6,
                "10×10 lattice α ∈ [0, 2.25], N ∈ {1…512}",
            ));
            let exact = sets
                .iter()
                .map(|s| {
                    let n = s.n_qubits as f64;
                    (s.sy2_per_n2 - 1.0 / n)
                        .abs()
                        .max((s.sz2_per_n2 - ((1.0 + 1.0 / n) - s.sx2_per_n2)).abs())
                })
                .fold(0.0, f64::max);
            out.push(CheckOutcome::at_most("observables: exact spin identities", exact, 0.0, ""));
            let mut monotone = true;
            for j in 0..10 {
                let column: Vec<f64> = (0..10).map(|i| sets[10 * i + j].sx_per_n).collect();
                monotone &= column.windows(2).all(|w| w[1].abs() <= w[0].abs() + 1e-12);
            }
            out.push(CheckOutcome::flag(
                "observables: |sx_per_n| non-increasing in alpha",
                monotone,
                "",
            ));
        }
        Err(e) => out.push(CheckOutcome::failed("observables: 10×10 lattice", e)),
    }

    for kind in [PotentialKind::Quartic, PotentialKind::Full] {
        let name = format!("observables: (alpha, ND) collapse, {kind:?} potential");
        out.push(guarded(&name, || {
            let mut worst: f64 = 0.0;
            for alpha in [0.5, 1.0, 1.5] {
                let a = DimensionlessParams::from_alpha(alpha, 10.0, 100)?;
                let b = DimensionlessParams::from_alpha(alpha, 100.0, 10)?;
                let sa = observables_with(&a, 100, kind, tolerance)?.0;
                let sb = observables_with(&b, 10, kind, tolerance)?.0;
                for (x, y) in collapse_fields(&sa).iter().zip(collapse_fields(&sb)) {
                    worst = worst.max(rel(*x, y));
                }
            }
            Ok(CheckOutcome::at_most(&name, worst, 1e-8, "D=10,N=100 against D=100,N=10"))
        }));
    }

    out.push(guarded("observables: Feynman-Hellmann", || {
        let lattice: Vec<(f64, u64)> = [0.0, 0.5, 1.0, 1.5, 2.0]
            .iter()
            .flat_map(|&a| [1u64, 10, 100, 1000, 10_000].map(|n| (a, n)))
            .collect();
        let worst = lattice
            .par_iter()
            .map(|&(alpha, n)| -> Result<f64> {
                let p = DimensionlessParams::from_alpha(alpha, 10.0, n)?;
                Ok(feynman_hellmann_check(&p, n, 1e-3, tolerance)?.max_relative_residual())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(CheckOutcome::at_most(
            "observables: Feynman-Hellmann",
            worst,
            1e-5,
            "5×5 lattice α ∈ {0…2}, ND ∈ {10…10⁵}; residual / max(1, |derivative|)",
        ))
    }));

    out.push(guarded("observables: critical moment recursion at k=0", || {
        let p = DimensionlessParams::from_alpha(1.0, 10.0, 1 << 16)?;
        let gs = solve_ground_auto(&QuarticPotential::new(&p), tolerance)?;
        let r = moment_recursion_check(&gs.wavefunction, p.nd, c, 0);
        Ok(CheckOutcome::at_most(
            "observables: critical moment recursion at k=0",
            r[0].relative,
            0.02,
            "N = 2¹⁶, D = 10",
        ))
    }));
    out
}

fn entanglement_checks(tolerance: f64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(guarded("entanglement: tau1 two routes", || {
        let mut worst: f64 = 0.0;
        for (alpha, n) in [(0.3, 4), (1.0, 64), (1.0, 4096), (2.0, 256)] {
            let p = DimensionlessParams::from_alpha(alpha, 10.0, n)?;
            let gs = solve_ground_auto(&EffectivePotential::new(&p), tolerance)?;
            let t = tangles(&gs, &p, n);
            worst = worst.max((t.tau1 - t.tau1_state).abs());
        }
        Ok(CheckOutcome::at_most("entanglement: tau1 two routes", worst, 1e-8, ""))
    }));
    out.push(guarded("entanglement: purity is 1 without coupling", || {
        let p = DimensionlessParams::new(10.0, 0.0, 64)?;
        let gs = solve_ground_auto(&EffectivePotential::new(&p), tolerance)?;
        let t = tangles(&gs, &p, 64);
        Ok(CheckOutcome::at_most("entanglement: purity is 1 without coupling", (1.0 - t.purity).abs(), 1e-12, ""))
    }));
    let p = DimensionlessParams::from_alpha(1.7, 10.0, 50).unwrap();
    let asym = halton(500)
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (60.0 * (u - 0.5), 60.0 * (v - 0.5));
            (overlap_kernel(a, b, &p, 50) - overlap_kernel(b, a, &p, 50)).abs()
        })
        .fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("entanglement: overlap kernel symmetry", asym, 0.0, ""));
    out.push(guarded("entanglement: quenching with N at alpha=1", || {
        let mut taus = Vec::new();
        for n in [4, 16, 64, 256] {
            let p = DimensionlessParams::from_alpha(1.0, 10.0, n)?;
            let gs = solve_ground_auto(&EffectivePotential::new(&p), tolerance)?;
            taus.push(tangles(&gs, &p, n).tau_n);
        }
        let ok = taus.windows(2).all(|w| w[1] > w[0]) && taus.iter().all(|&t| t < 1.0);
        Ok(CheckOutcome::flag(
            "entanglement: quenching with N at alpha=1",
            ok,
            format!("τ_N = {taus:.4?}"),
        ))
    }));
    out
}

fn scaling_checks() -> Vec<CheckOutcome> {
    let signs = [(0.5, 1.0), (0.99, 1.0), (1.0, 0.0), (1.01, -1.0), (2.0, -1.0)]
        .iter()
        .all(|&(a, sign)| {
            let z = symanzik_map(a, 100.0).map(|m| m.zeta).unwrap_or(f64::NAN);
            if sign == 0.0 {
                z == 0.0
            } else {
                z.signum() == sign
            }
        });
    vec![CheckOutcome::flag("scaling: sign of zeta", signs, "ζ > 0 below α = 1, < 0 above")]
}

/// Runs every check. `tolerance` is the eigensolver tolerance used throughout.
pub fn run_invariants(tolerance: f64) -> Vec<CheckOutcome> {
    let mut out = model_checks();
    out.extend(eigensolver_checks(tolerance));
    match quartic_constants(tolerance) {
        Ok(c) => out.extend(observable_checks(tolerance, &c)),
        Err(e) => out.push(CheckOutcome::failed("eigensolver: quartic constants", e)),
    }
    out.extend(entanglement_checks(tolerance));
    out.extend(scaling_checks());
    out
}
