//! Small dense linear-algebra helpers shared by the rest of the crate.

use nalgebra::{DMatrix, DVector};

/// Relative threshold used for rank decisions: singular values at or below
/// `RANK_RTOL * sigma_max` count as zero.
pub const RANK_RTOL: f64 = 1e-8;

/// Standard symplectic form `[[0, I], [-I, 0]]` on `n` modes.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank with threshold `rtol * sigma_max`.
pub fn rank(a: &DMatrix<f64>, rtol: f64) -> usize {
    let s = singular_values(a);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rtol * smax).count()
}

/// Full left singular basis of `a` (rows x rows) and the singular values
/// aligned with its leading columns, sorted descending.
fn full_left_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let rows = a.nrows();
    // Pad with zero columns so the thin SVD returns a complete left basis.
    let padded = if a.ncols() < rows {
        let mut p = DMatrix::zeros(rows, rows);
        p.view_mut((0, 0), (rows, a.ncols())).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut basis = DMatrix::zeros(rows, rows);
    let mut sv = Vec::with_capacity(rows);
    for (dst, &src) in order.iter().take(rows).enumerate() {
        basis.set_column(dst, &u.column(src));
        sv.push(svd.singular_values[src]);
    }
    (basis, sv)
}

/// Orthonormal basis of `ker(a^T)` returned as rows (d x a.nrows()).
pub fn left_null_space(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let rows = a.nrows();
    if rows == 0 {
        return DMatrix::zeros(0, 0);
    }
    let (u, sv) = full_left_svd(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let r = if smax == 0.0 {
        0
    } else {
        sv.iter().take(a.ncols().min(rows)).filter(|&&v| v > rtol * smax).count()
    };
    u.columns(r, rows - r).transpose()
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > rtol * smax {
            out += (v_t.row(i).transpose() * u.column(i).transpose()) / s;
        }
    }
    out
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut vecs = DMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
        vals.push(eig.eigenvalues[src]);
    }
    (vals, vecs)
}

/// Remove the components of `v` along each (orthonormal) vector in `basis`.
/// Two passes keep the result orthogonal to working precision.
pub fn project_out(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&r);
            r.axpy(-c, b, 1.0);
        }
    }
    r
}

/// Among the coordinate vectors, the one with the largest component outside
/// `span(basis)`, returned normalized. Ties resolve to the lowest index.
pub fn best_coordinate_complement(dim: usize, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    let mut best: Option<(f64, DVector<f64>)> = None;
    for i in 0..dim {
        let e = DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
        let res = project_out(&e, basis);
        let norm = res.norm();
        if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
            best = Some((norm, res));
        }
    }
    best.filter(|(n, _)| *n > 1e-8).map(|(n, v)| v / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_zero_is_everything() {
        let m = DMatrix::<f64>::zeros(4, 2);
        let k = left_null_space(&m, RANK_RTOL);
        assert_eq!(k.nrows(), 4);
        assert!(max_abs_diff(&(&k * k.transpose()), &DMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn null_space_wide_matrix() {
        // more columns than rows, full row rank: empty kernel
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]);
        assert_eq!(left_null_space(&m, RANK_RTOL).nrows(), 0);
    }

    #[test]
    fn pinv_left_inverse() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 3.0, -1.0]);
        let p = pinv(&a, RANK_RTOL);
        assert!(max_abs_diff(&(&p * &a), &DMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn rank_of_zero_is_zero() {
        assert_eq!(rank(&DMatrix::<f64>::zeros(3, 3), RANK_RTOL), 0);
        assert_eq!(rank(&DMatrix::<f64>::zeros(0, 3), RANK_RTOL), 0);
    }
}
