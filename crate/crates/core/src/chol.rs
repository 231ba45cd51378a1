//! Blocked Cholesky factorization for dense SPD matrices.
//!
//! Right-looking blocked algorithm: factor the diagonal block, solve the
//! panel below it, then apply the rank-`nb` update to the trailing lower
//! triangle. The panel solve and trailing update are row-independent, so
//! they parallelize over rows; every entry is computed from finalized
//! inputs, which keeps the factorization bitwise deterministic under any
//! thread count.

const BLOCK: usize = 96;

/// Lower-triangular Cholesky factor, row-major full storage (upper part zeroed).
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// `L z` for a standard-normal draw `z`; the sampled Gaussian vector.
    pub fn multiply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = &self.l[i * self.n..i * self.n + i + 1];
                row.iter().zip(&z[..i + 1]).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}

/// Factor a symmetric positive-definite matrix given by its lower triangle
/// in row-major full storage. Returns the failing pivot index if the matrix
/// is numerically not positive definite.
pub fn cholesky(mut a: Vec<f64>, n: usize) -> Result<CholeskyFactor, usize> {
    assert_eq!(a.len(), n * n);
    factor_in_place(&mut a, n, true)?;
    zero_upper(&mut a, n);
    Ok(CholeskyFactor { n, l: a })
}

/// Sequential variant with an identical result, kept callable for the
/// benchmark comparison.
pub fn cholesky_seq(mut a: Vec<f64>, n: usize) -> Result<CholeskyFactor, usize> {
    assert_eq!(a.len(), n * n);
    factor_in_place(&mut a, n, false)?;
    zero_upper(&mut a, n);
    Ok(CholeskyFactor { n, l: a })
}

fn zero_upper(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn factor_in_place(a: &mut [f64], n: usize, parallel: bool) -> Result<(), usize> {
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + BLOCK).min(n);
        let nb = k1 - k0;

        // Unblocked factorization of the diagonal block; earlier block
        // columns have already been folded in by previous trailing updates.
        for j in k0..k1 {
            let d = a[j * n + j] - dot(&a[j * n + k0..j * n + j], &a[j * n + k0..j * n + j]);
            if !(d > 0.0) || !d.is_finite() {
                return Err(j);
            }
            let ljj = d.sqrt();
            a[j * n + j] = ljj;
            for i in j + 1..k1 {
                let s = dot(&a[i * n + k0..i * n + j], &a[j * n + k0..j * n + j]);
                a[i * n + j] = (a[i * n + j] - s) / ljj;
            }
        }

        if k1 == n {
            break;
        }

        // Snapshot of the finalized diagonal block, so panel rows can be
        // updated independently.
        let mut diag = vec![0.0; nb * nb];
        for j in k0..k1 {
            diag[(j - k0) * nb..(j - k0) * nb + (j - k0 + 1)]
                .copy_from_slice(&a[j * n + k0..j * n + j + 1]);
        }

        // Panel solve: row i of A[k1.., k0..k1] <- row * L11^{-T}.
        let solve_row = |row: &mut [f64]| {
            for j in 0..nb {
                let dj = &diag[j * nb..j * nb + j];
                let s = dot(&row[k0..k0 + j], dj);
                row[k0 + j] = (row[k0 + j] - s) / diag[j * nb + j];
            }
        };
        row_apply(&mut a[k1 * n..n * n], n, parallel, solve_row);

        // Snapshot of the finalized panel for the symmetric update.
        let rows_below = n - k1;
        let mut panel = vec![0.0; rows_below * nb];
        for i in 0..rows_below {
            panel[i * nb..(i + 1) * nb].copy_from_slice(&a[(k1 + i) * n + k0..(k1 + i) * n + k1]);
        }

        // Trailing update: A22 (lower triangle) -= P P^T, one row at a time.
        let update_row = move |idx: usize, row: &mut [f64]| {
            let pi = &panel[idx * nb..(idx + 1) * nb];
            for j in 0..=idx {
                let pj = &panel[j * nb..(j + 1) * nb];
                row[k1 + j] -= dot(pi, pj);
            }
        };
        row_apply_indexed(&mut a[k1 * n..n * n], n, parallel, update_row);

        k0 = k1;
    }
    Ok(())
}

fn row_apply(buf: &mut [f64], n: usize, parallel: bool, f: impl Fn(&mut [f64]) + Sync + Send) {
    row_apply_indexed(buf, n, parallel, move |_, row| f(row));
}

fn row_apply_indexed(
    buf: &mut [f64],
    n: usize,
    parallel: bool,
    f: impl Fn(usize, &mut [f64]) + Sync + Send,
) {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        buf.par_chunks_mut(n).enumerate().for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = parallel;
    buf.chunks_mut(n).enumerate().for_each(|(i, row)| f(i, row));
}

/// Factor with the execution mode implied by the crate features.
pub fn cholesky_default(a: Vec<f64>, n: usize) -> Result<CholeskyFactor, usize> {
    #[cfg(feature = "parallel")]
    {
        cholesky(a, n)
    }
    #[cfg(not(feature = "parallel"))]
    {
        cholesky_seq(a, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd_example(n: usize) -> Vec<f64> {
        // A = B B^T + n I with B_{ij} = sin(3 i + j); SPD by construction.
        let b: Vec<f64> = (0..n * n).map(|k| ((3 * (k / n) + k % n) as f64).sin()).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += b[i * n + k] * b[j * n + k];
                }
                a[i * n + j] = s + if i == j { n as f64 } else { 0.0 };
            }
        }
        a
    }

    #[test]
    fn factor_reconstructs_matrix() {
        let n = 37;
        let a = spd_example(n);
        let f = cholesky(a.clone(), n).unwrap();
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..=j {
                    s += f.entry(i, k) * f.entry(j, k);
                }
                assert!(
                    (s - a[i * n + j]).abs() <= 1e-9 * (1.0 + a[i * n + j].abs()),
                    "entry ({i},{j}): {} vs {}",
                    s,
                    a[i * n + j]
                );
            }
        }
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let n = 2 * BLOCK + 17;
        let a = spd_example(n);
        let fp = cholesky(a.clone(), n).unwrap();
        let fs = cholesky_seq(a, n).unwrap();
        assert_eq!(fp.l, fs.l);
    }

    #[test]
    fn non_positive_definite_reports_pivot() {
        let n = 3;
        // Second pivot becomes negative.
        let a = vec![1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(cholesky(a, n).unwrap_err(), 1);
    }
}
