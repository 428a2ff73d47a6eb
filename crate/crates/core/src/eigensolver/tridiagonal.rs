//! Lowest eigenpair of a real symmetric tridiagonal matrix by Sturm-sequence
//! bisection followed by inverse iteration.

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Lower and upper Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.scale();
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            d = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d
            };
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// True when `T − xI` is positive definite, i.e. `x` lies below the spectrum.
    fn below_spectrum(&self, x: f64) -> bool {
        let mut d = self.diag[0] - x;
        if d <= 0.0 {
            return false;
        }
        for i in 1..self.len() {
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d <= 0.0 {
                return false;
            }
        }
        true
    }

    /// Bracket `[lo, hi]` of the smallest eigenvalue, with `lo` strictly below
    /// the spectrum and `hi − lo` at the level of rounding.
    pub fn lowest_eigenvalue_bracket(&self) -> (f64, f64) {
        let (mut lo, _) = self.gershgorin();
        // the Rayleigh quotient of a unit vector bounds λ_min from above
        let mut hi = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = self.scale();
        lo -= f64::EPSILON * scale;
        while !self.below_spectrum(lo) {
            lo -= (hi - lo).abs().max(f64::EPSILON * scale);
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs())
            {
                break;
            }
            if self.below_spectrum(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    /// Smallest eigenvalue and its unit-norm eigenvector, with non-negative sum.
    pub fn lowest_eigenpair(&self) -> (f64, Vec<f64>) {
        let (lo, hi) = self.lowest_eigenvalue_bracket();
        let lambda = 0.5 * (lo + hi);
        let n = self.len();
        if n == 1 {
            return (self.diag[0], vec![1.0]);
        }

        // T − σI is positive definite for σ below the spectrum, so LDLᵀ needs no pivoting
        let sigma = lo - 2.0 * f64::EPSILON * self.scale();
        let mut pivots = vec![0.0; n];
        pivots[0] = self.diag[0] - sigma;
        for i in 1..n {
            pivots[i] = self.diag[i] - sigma - self.off[i - 1] * self.off[i - 1] / pivots[i - 1];
        }

        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..3 {
            // forward substitution with the unit lower factor, then back substitution
            for i in 1..n {
                x[i] -= self.off[i - 1] / pivots[i - 1] * x[i - 1];
            }
            x[n - 1] /= pivots[n - 1];
            for i in (0..n - 1).rev() {
                x[i] = (x[i] - self.off[i] * x[i + 1]) / pivots[i];
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        (lambda, x)
    }

    /// `‖Tx − λx‖∞`
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = (self.diag[i] - lambda) * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y.abs()
            })
            .fold(0.0, f64::max)
    }
}
