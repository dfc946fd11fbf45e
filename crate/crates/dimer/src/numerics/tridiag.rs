use super::NumericsError;

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct TridiagonalSymmetric {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalSymmetric {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self, NumericsError> {
        if diag.is_empty() {
            return Err(NumericsError::InvalidInput("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(NumericsError::InvalidInput(format!(
                "offdiag length {} must be diag length {} minus one",
                offdiag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(NumericsError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// y = T x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.offdiag[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }
}

/// Full spectrum of a symmetric tridiagonal matrix.
///
/// `eigenvectors[j]` is the eigenvector belonging to `eigenvalues[j]`;
/// eigenvalues are sorted ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Implicit-shift QL with eigenvector accumulation (EISPACK `tql2` lineage).
///
/// The matrix is never densified; cost is O(n^2) per sweep, which is all the
/// dimer Hamiltonian needs even at a few thousand particles.
pub fn eigh_tridiagonal(m: &TridiagonalSymmetric) -> Result<EigenDecomposition, NumericsError> {
    let n = m.dim();
    let mut d = m.diag().to_vec();
    let mut e = m.offdiag().to_vec();
    e.push(0.0);

    // Eigenvector accumulator, stored column-wise; starts as identity.
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element to split the matrix.
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(NumericsError::Convergence { index: l });
            }

            // Form the implicit shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0;

            for i in (l..mm).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Recover from underflow by skipping the transformation.
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for k in 0..n {
                    f = z[i + 1][k];
                    z[i + 1][k] = s * z[i][k] + c * f;
                    z[i][k] = c * z[i][k] - s * f;
                }
            }
            if r == 0.0 && e[l].abs() > f64::EPSILON * (d[l].abs() + d[l + 1].abs()) {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    // Sort ascending, carrying the eigenvectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order.iter().map(|&i| z[i].clone()).collect();

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
