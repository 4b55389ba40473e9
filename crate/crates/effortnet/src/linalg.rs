//! Small dense solvers behind the exact-design second layer.
//!
//! The second-layer system is underdetermined (Q equations, Q+1 unknowns),
//! so two least-squares routes are provided: a basic solution from
//! Householder QR with column pivoting (at most `rank` nonzero
//! coefficients), and a minimum-norm solution from the normal equations
//! `x = A' (A A')^-1 b`. Both apply one step of iterative refinement.

// index-heavy dense kernels; ranges read better than iterator chains here
#![allow(clippy::needless_range_loop)]

#[derive(Debug, Clone)]
pub(crate) struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * x[c]).sum())
            .collect()
    }

    pub fn matvec_transposed(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[c] += self.at(r, c) * x[r];
            }
        }
        out
    }
}

/// Householder QR factorization with greedy column pivoting.
pub(crate) struct PivotedQr {
    factored: DenseMatrix,
    reflectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
    /// `perm[k]` is the original column index now at factored position `k`.
    perm: Vec<usize>,
    rank: usize,
    diag_first: f64,
    diag_last: f64,
}

const RANK_TOL: f64 = 1e-12;

impl PivotedQr {
    pub fn factor(a: &DenseMatrix) -> PivotedQr {
        let (m, n) = (a.rows, a.cols);
        let steps = m.min(n);
        let mut fac = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(steps);
        let mut betas = Vec::with_capacity(steps);

        for k in 0..steps {
            // pivot: remaining column with the largest trailing norm
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let norm: f64 = (k..m).map(|r| fac.at(r, j) * fac.at(r, j)).sum();
                if norm > best_norm {
                    best_norm = norm;
                    best = j;
                }
            }
            if best != k {
                for r in 0..m {
                    let tmp = fac.at(r, k);
                    *fac.at_mut(r, k) = fac.at(r, best);
                    *fac.at_mut(r, best) = tmp;
                }
                perm.swap(k, best);
            }

            // Householder reflector for column k, rows k..m
            let mut v: Vec<f64> = (k..m).map(|r| fac.at(r, k)).collect();
            let sigma = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
            v[0] += sign * sigma;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };

            for j in k..n {
                let s: f64 = beta * (k..m).map(|r| v[r - k] * fac.at(r, j)).sum::<f64>();
                if s != 0.0 {
                    for r in k..m {
                        *fac.at_mut(r, j) -= s * v[r - k];
                    }
                }
            }
            reflectors.push(v);
            betas.push(beta);
        }

        let diag_first = fac.at(0, 0).abs();
        let diag_last = if steps > 0 { fac.at(steps - 1, steps - 1).abs() } else { 0.0 };
        let mut rank = 0;
        for k in 0..steps {
            if fac.at(k, k).abs() > RANK_TOL * diag_first.max(f64::MIN_POSITIVE) {
                rank = k + 1;
            } else {
                break;
            }
        }

        PivotedQr { factored: fac, reflectors, betas, perm, rank, diag_first, diag_last }
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Ratio of the largest to the smallest `R` diagonal magnitude;
    /// infinite when the trailing diagonal vanished.
    pub fn condition_estimate(&self) -> f64 {
        if self.diag_last > 0.0 {
            self.diag_first / self.diag_last
        } else {
            f64::INFINITY
        }
    }

    fn apply_qt(&self, v: &mut [f64]) {
        for (k, refl) in self.reflectors.iter().enumerate() {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let s: f64 = beta * refl.iter().zip(&v[k..]).map(|(a, b)| a * b).sum::<f64>();
            if s != 0.0 {
                for (i, r) in refl.iter().enumerate() {
                    v[k + i] -= s * r;
                }
            }
        }
    }

    /// Basic least-squares solution: the coefficients of the non-pivot
    /// columns are zero.
    pub fn solve_basic(&self, rhs: &[f64]) -> Vec<f64> {
        let mut y = rhs.to_vec();
        self.apply_qt(&mut y);
        let r = self.rank;
        let mut z = vec![0.0; r];
        for i in (0..r).rev() {
            let mut sum = y[i];
            for j in i + 1..r {
                sum -= self.factored.at(i, j) * z[j];
            }
            z[i] = sum / self.factored.at(i, i);
        }
        let mut x = vec![0.0; self.factored.cols];
        for i in 0..r {
            x[self.perm[i]] = z[i];
        }
        x
    }

    /// Basic solution plus one step of iterative refinement.
    pub fn solve_basic_refined(&self, a: &DenseMatrix, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.solve_basic(rhs);
        let ax = a.matvec(&x);
        let residual: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let dx = self.solve_basic(&residual);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        x
    }
}

/// Minimum-norm least-squares solution of a full-row-rank underdetermined
/// system via `x = A' (A A' + ridge I)^-1 b`. Returns `None` when the
/// Cholesky factorization breaks down (rank-deficient rows and no ridge).
pub(crate) fn solve_min_norm(a: &DenseMatrix, rhs: &[f64], ridge: f64) -> Option<Vec<f64>> {
    let m = a.rows;
    let mut gram = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut s: f64 = (0..a.cols).map(|c| a.at(i, c) * a.at(j, c)).sum();
            if i == j {
                s += ridge;
            }
            *gram.at_mut(i, j) = s;
            *gram.at_mut(j, i) = s;
        }
    }
    let chol = Cholesky::factor(&gram)?;

    let y = chol.solve(rhs);
    let mut x = a.matvec_transposed(&y);

    // one refinement pass
    let ax = a.matvec(&x);
    let residual: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
    let y2 = chol.solve(&residual);
    let dx = a.matvec_transposed(&y2);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    Some(x)
}

struct Cholesky {
    lower: DenseMatrix,
}

impl Cholesky {
    fn factor(a: &DenseMatrix) -> Option<Cholesky> {
        let n = a.rows;
        // pivots that are fp noise relative to the diagonal scale mean the
        // matrix lost positive definiteness
        let scale = (0..n).map(|i| a.at(i, i)).fold(0.0, f64::max);
        let floor = scale * 1e-13;
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a.at(i, j);
                for k in 0..j {
                    sum -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if sum <= floor || !sum.is_finite() {
                        return None;
                    }
                    *l.at_mut(i, j) = sum.sqrt();
                } else {
                    *l.at_mut(i, j) = sum / l.at(j, j);
                }
            }
        }
        Some(Cholesky { lower: l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lower.rows;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.lower.at(i, k) * y[k];
            }
            y[i] = sum / self.lower.at(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= self.lower.at(k, i) * x[k];
            }
            x[i] = sum / self.lower.at(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                *m.at_mut(i, j) = *v;
            }
        }
        m
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn square_solve_recovers_exact_solution() {
        let a = from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let qr = PivotedQr::factor(&a);
        let x = qr.solve_basic_refined(&a, &[5.0, 10.0]);
        assert!(max_abs_diff(&x, &[1.0, 3.0]) < 1e-12);
        assert_eq!(qr.rank(), 2);
    }

    #[test]
    fn underdetermined_basic_solution_is_exact_and_sparse() {
        let a = from_rows(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
        let rhs = [3.0, 5.0];
        let qr = PivotedQr::factor(&a);
        let x = qr.solve_basic_refined(&a, &rhs);
        assert!(max_abs_diff(&a.matvec(&x), &rhs) < 1e-12);
        let zeros = x.iter().filter(|v| **v == 0.0).count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn min_norm_matches_hand_computed_pseudoinverse() {
        // G G' = [[2,1],[1,2]]; x = G' (G G')^-1 [3,5] = [1/3, 7/3, 8/3]
        let a = from_rows(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
        let rhs = [3.0, 5.0];
        let x = solve_min_norm(&a, &rhs, 0.0).unwrap();
        assert!(max_abs_diff(&x, &[1.0 / 3.0, 7.0 / 3.0, 8.0 / 3.0]) < 1e-12);

        let qr = PivotedQr::factor(&a);
        let basic = qr.solve_basic_refined(&a, &rhs);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        assert!(norm(&x) <= norm(&basic) + 1e-12);
    }

    #[test]
    fn rank_deficient_consistent_system_still_solved() {
        let a = from_rows(&[&[1.0, 1.0], &[2.0, 2.0]]);
        let qr = PivotedQr::factor(&a);
        assert_eq!(qr.rank(), 1);
        assert!(qr.condition_estimate().is_infinite() || qr.condition_estimate() > 1e12);
        let x = qr.solve_basic_refined(&a, &[1.0, 2.0]);
        assert!(max_abs_diff(&a.matvec(&x), &[1.0, 2.0]) < 1e-12);
    }

    #[test]
    fn min_norm_needs_ridge_on_rank_deficient_rows() {
        let a = from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(solve_min_norm(&a, &[2.0, 2.0], 0.0).is_none());
        let x = solve_min_norm(&a, &[2.0, 2.0], 1e-8).unwrap();
        assert!(max_abs_diff(&a.matvec(&x), &[2.0, 2.0]) < 1e-4);
    }

    #[test]
    fn overdetermined_least_squares_minimizes_residual() {
        let a = from_rows(&[&[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let rhs = [1.0, 2.0, 2.0];
        let qr = PivotedQr::factor(&a);
        let x = qr.solve_basic_refined(&a, &rhs);
        // normal equations: A'A x = A'b with A'A = [[3,6],[6,14]], A'b = [5,11]
        assert!(max_abs_diff(&x, &[2.0 / 3.0, 0.5]) < 1e-12);
    }
}
