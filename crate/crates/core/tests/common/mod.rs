//! Independent ground state of `−d²/dq² + ζq² + q⁴` by diagonalising in a
//! scaled harmonic-oscillator basis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub struct OracleGround {
    pub energy: f64,
    /// `⟨q²⟩`
    pub q2: f64,
    /// `∫φ⁴ dq`
    pub k_const: f64,
}

/// `x = (a + a†)/√2` on `size` basis states.
fn position(size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| {
        if j == i + 1 {
            (j as f64 / 2.0).sqrt()
        } else if i == j + 1 {
            (i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    })
}

/// `basis` states of width `scale`, i.e. `q = scale·x`.
pub fn scaled_quartic(zeta: f64, basis: usize, scale: f64) -> OracleGround {
    // matrix powers are exact in the leading block when built four states larger
    let x = position(basis + 4);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x2 = x2.view((0, 0), (basis, basis)).into_owned();
    let x4 = x4.view((0, 0), (basis, basis)).into_owned();
    let oscillator = DMatrix::from_diagonal(&DVector::from_fn(basis, |n, _| 2.0 * n as f64 + 1.0));
    let p2 = &oscillator - &x2;
    let s2 = scale * scale;
    let h = p2 / s2 + &x2 * (zeta * s2) + &x4 * (s2 * s2);

    let eig = SymmetricEigen::new(h);
    let (idx, energy) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let c = eig.eigenvectors.column(idx).into_owned();
    let q2 = s2 * (c.transpose() * &x2 * &c)[(0, 0)];

    // φ(q) = Σ cₙ hₙ(q/s)/√s by the Hermite-function recurrence
    let (half_width, nodes) = (12.0, 6001);
    let step = 2.0 * half_width / (nodes - 1) as f64;
    let mut k_const = 0.0;
    for i in 0..nodes {
        let q = -half_width + step * i as f64;
        let y = q / scale;
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
        let mut phi = 0.0;
        for n in 0..basis {
            phi += c[n] * cur;
            let next = (2.0 / (n + 1) as f64).sqrt() * y * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        let phi = phi / scale.sqrt();
        k_const += step * phi.powi(4);
    }
    OracleGround { energy, q2, k_const }
}
