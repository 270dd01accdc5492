//! Small dense helpers: cyclic Jacobi eigensolver for symmetric matrices and
//! a least-squares solve, enough for the cross-checks and rank tests used by
//! the tensor modules. No external linear-algebra dependency is needed at
//! these sizes.

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi
/// rotations. Returns `(eigenvalues, columns)` with eigenvalues ascending;
/// column `j` of the returned matrix is the eigenvector for eigenvalue `j`.
pub fn jacobi_eigen<const N: usize>(m: [[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut a = m;
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut vals = [0.0; N];
    for i in 0..N {
        vals[i] = a[i][i];
    }
    // sort ascending, carrying eigenvector columns along
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let mut sorted_vals = [0.0; N];
    let mut sorted_vecs = [[0.0; N]; N];
    for (new, &old) in order.iter().enumerate() {
        sorted_vals[new] = vals[old];
        for r in 0..N {
            sorted_vecs[r][new] = v[r][old];
        }
    }
    (sorted_vals, sorted_vecs)
}

/// Singular values of a tall matrix with up to four columns, through the
/// eigenvalues of the Gram matrix. Ascending order.
pub fn singular_values(rows: &[[f64; 4]], cols: usize) -> Vec<f64> {
    assert!(cols <= 4);
    let mut gram = [[0.0; 4]; 4];
    for r in rows {
        for i in 0..cols {
            for j in 0..cols {
                gram[i][j] += r[i] * r[j];
            }
        }
    }
    let (vals, _) = jacobi_eigen::<4>(gram);
    let mut out: Vec<f64> = vals
        .iter()
        .skip(4 - cols)
        .map(|v| v.max(0.0).sqrt())
        .collect();
    // gram was padded with zero rows/cols; keep the `cols` largest magnitudes
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Least-squares coefficients solving `basis * x ~= target` for up to four
/// basis vectors, via normal equations. Returns the coefficients and the
/// residual norm.
pub fn least_squares(basis: &[[f64; 4]], target: [f64; 4]) -> (Vec<f64>, f64) {
    let n = basis.len();
    assert!(n <= 4 && n > 0);
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = dot4(basis[i], basis[j]);
        }
        rhs[i] = dot4(basis[i], target);
    }
    let x = solve_dense(&mut gram, &mut rhs);
    let mut resid = target;
    for (c, b) in x.iter().zip(basis) {
        for k in 0..4 {
            resid[k] -= c * b[k];
        }
    }
    (x, dot4(resid, resid).sqrt())
}

fn dot4(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a small system.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        if diag.abs() < 1e-300 {
            continue;
        }
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = if a[row][row].abs() < 1e-300 {
            0.0
        } else {
            acc / a[row][row]
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonal_matrix() {
        let (vals, _) = jacobi_eigen::<3>([[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(vals, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let m = [[2.0, 1.0, 0.3], [1.0, -1.0, 0.5], [0.3, 0.5, 4.0]];
        let (vals, vecs) = jacobi_eigen::<3>(m);
        for i in 0..3 {
            for j in 0..3 {
                let mut r = 0.0;
                for k in 0..3 {
                    r += vecs[i][k] * vals[k] * vecs[j][k];
                }
                assert!((r - m[i][j]).abs() < 1e-12, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn least_squares_exact_for_consistent_system() {
        let basis = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0]];
        let (x, r) = least_squares(&basis, [2.0, -3.0, -3.0, 0.0]);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] + 3.0).abs() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn singular_values_of_orthogonal_columns() {
        let rows = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        let sv = singular_values(&rows, 2);
        assert!((sv[0] - 2.0).abs() < 1e-12);
        assert!((sv[1] - 3.0).abs() < 1e-12);
    }
}
