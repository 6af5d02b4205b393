//! Real symplectic and orthogonal-symplectic matrix algebra.
//!
//! All matrices act on quadrature vectors ordered `(q_1..q_n, p_1..p_n)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg::{j_matrix, max_abs, max_abs_diff, project_out, sym_eigen_sorted};
use crate::{Error, Result, DEFAULT_TOL};

/// The standard symplectic form `J` on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::Dimension("symplectic form needs at least one mode".into()));
    }
    Ok(SymplecticForm { n, matrix: j_matrix(n) })
}

/// `x^T J y` for two phase-space vectors of equal even length.
pub fn symplectic_product(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "vector lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() % 2 != 0 {
        return Err(Error::Dimension(format!("odd vector length {}", x.len())));
    }
    let n = x.len() / 2;
    Ok((0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum())
}

fn check_square_even(s: &DMatrix<f64>) -> Result<usize> {
    if s.nrows() != s.ncols() || s.nrows() % 2 != 0 || s.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a square matrix of even dimension, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(s.nrows() / 2)
}

/// Max-abs deviation of `S J S^T` from `J`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> Result<f64> {
    let n = check_square_even(s)?;
    let j = j_matrix(n);
    Ok(max_abs_diff(&(s * &j * s.transpose()), &j))
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(s)? <= tol)
}

/// Max-abs deviation of `S S^T` from the identity.
pub fn orthogonal_defect(s: &DMatrix<f64>) -> f64 {
    let id = DMatrix::identity(s.nrows(), s.nrows());
    max_abs_diff(&(s * s.transpose()), &id)
}

/// A real matrix `S` with `S J S^T = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let defect = symplectic_defect(&matrix)?;
        if defect > tol {
            return Err(Error::Validation(format!(
                "matrix is not symplectic: |SJS^T - J|max = {defect:.3e} > {tol:.1e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wrap a matrix that is symplectic by construction.
    pub(crate) fn trusted(matrix: DMatrix<f64>) -> Self {
        debug_assert!(matrix.nrows() == matrix.ncols() && matrix.nrows() % 2 == 0);
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(2 * n, 2 * n) }
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Matrix product `self * other`; the result is symplectic.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { matrix: &self.matrix * &other.matrix }
    }
}

/// A passive interferometer: the unitary `X + iY`, equivalently the
/// orthogonal-symplectic matrix `[[X, -Y], [Y, X]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveInterferometer {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl PassiveInterferometer {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(x, y, DEFAULT_TOL)
    }

    pub fn with_tolerance(x: DMatrix<f64>, y: DMatrix<f64>, tol: f64) -> Result<Self> {
        if x.nrows() != x.ncols() || x.shape() != y.shape() || x.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "X and Y must be equal nonempty square blocks, got {:?} and {:?}",
                x.shape(),
                y.shape()
            )));
        }
        let n = x.nrows();
        let gram = x.transpose() * &x + y.transpose() * &y;
        let cross = x.transpose() * &y - y.transpose() * &x;
        let defect = max_abs_diff(&gram, &DMatrix::identity(n, n)).max(max_abs(&cross));
        if defect > tol {
            return Err(Error::Validation(format!(
                "X + iY is not unitary: deviation {defect:.3e} > {tol:.1e}"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn identity(n: usize) -> Self {
        Self { x: DMatrix::identity(n, n), y: DMatrix::zeros(n, n) }
    }

    /// Read the blocks off an orthogonal-symplectic matrix, averaging the
    /// redundant copies of `X` and `Y`.
    pub fn from_orthosymplectic(s: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = check_square_even(s)?;
        let s11 = s.view((0, 0), (n, n));
        let s12 = s.view((0, n), (n, n));
        let s21 = s.view((n, 0), (n, n));
        let s22 = s.view((n, n), (n, n));
        let x = (s11 + s22) * 0.5;
        let y = (s21 - s12) * 0.5;
        let out = Self::with_tolerance(x, y, tol)?;
        let defect = max_abs_diff(&out.matrix(), s);
        if defect > tol {
            return Err(Error::Validation(format!(
                "matrix is not of passive block form: deviation {defect:.3e}"
            )));
        }
        Ok(out)
    }

    pub fn modes(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn unitary(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.modes(), self.modes(), |i, j| {
            Complex64::new(self.x[(i, j)], self.y[(i, j)])
        })
    }

    /// The induced `2n x 2n` matrix `[[X, -Y], [Y, X]]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.modes();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&self.x);
        s.view_mut((0, n), (n, n)).copy_from(&(-&self.y));
        s.view_mut((n, 0), (n, n)).copy_from(&self.y);
        s.view_mut((n, n), (n, n)).copy_from(&self.x);
        s
    }

    pub fn symplectic(&self) -> SymplecticMatrix {
        SymplecticMatrix::trusted(self.matrix())
    }
}

/// Convert a complex unitary to its passive-interferometer representation.
pub fn unitary_to_symplectic(u: &DMatrix<Complex64>, tol: f64) -> Result<PassiveInterferometer> {
    let x = u.map(|z| z.re);
    let y = u.map(|z| z.im);
    PassiveInterferometer::with_tolerance(x, y, tol)
}

/// Single-mode squeezing parameters; `r > 0` squeezes momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezerProfile {
    pub r: Vec<f64>,
}

impl SqueezerProfile {
    pub fn new(r: Vec<f64>) -> Self {
        Self { r }
    }

    pub fn uniform(n: usize, r: f64) -> Self {
        Self { r: vec![r; n] }
    }

    pub fn modes(&self) -> usize {
        self.r.len()
    }

    /// `true` when every entry shares one value (within `1e-15`).
    pub fn uniform_value(&self) -> Option<f64> {
        let first = *self.r.first()?;
        self.r.iter().all(|v| (v - first).abs() <= 1e-15).then_some(first)
    }
}

/// `diag(e^{r_1}..e^{r_n}, e^{-r_1}..e^{-r_n})`.
pub fn squeezer_matrix(profile: &SqueezerProfile) -> SymplecticMatrix {
    let n = profile.modes();
    let mut diag = DVector::zeros(2 * n);
    for (i, r) in profile.r.iter().enumerate() {
        diag[i] = r.exp();
        diag[n + i] = (-r).exp();
    }
    SymplecticMatrix::trusted(DMatrix::from_diagonal(&diag))
}

/// `S = left * K(squeeze) * right` with nonnegative squeezing.
#[derive(Debug, Clone)]
pub struct BlochMessiahFactors {
    pub left: PassiveInterferometer,
    pub squeeze: SqueezerProfile,
    pub right: PassiveInterferometer,
}

impl BlochMessiahFactors {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.left.matrix() * squeezer_matrix(&self.squeeze).matrix() * self.right.matrix()
    }
}

/// Bloch-Messiah (Euler) decomposition of a symplectic matrix.
///
/// The polar factor `P = (S^T S)^{1/2}` comes from the SVD of `S`. Its
/// logarithm has the Hamiltonian block form `[[A, B], [B, -A]]`, whose
/// eigenvectors pair up as `(u; v)` at `+r` and `(-v; u)` at `-r`. Collecting
/// one vector per pair gives the passive diagonalizer of `P`. Zero modes
/// (including degenerate ones) are paired by Gram-Schmidt under the same
/// rotation.
pub fn bloch_messiah(s: &SymplecticMatrix, tol: f64) -> Result<BlochMessiahFactors> {
    let defect = symplectic_defect(s.matrix())?;
    if defect > tol {
        return Err(Error::Validation(format!(
            "bloch_messiah input is not symplectic: defect {defect:.3e} > {tol:.1e}"
        )));
    }
    let n = s.modes();
    let svd = s.matrix().clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;

    // S = (U V^T)(V diag(s) V^T)
    let ortho = &u * &v_t;
    let log_diag = DMatrix::from_diagonal(&sv.map(f64::ln));
    let h = v_t.transpose() * log_diag * &v_t;

    let a = (h.view((0, 0), (n, n)) - h.view((n, n), (n, n))) * 0.5;
    let b = (h.view((0, n), (n, n)) + h.view((n, 0), (n, n))) * 0.5;
    let mut hr = DMatrix::zeros(2 * n, 2 * n);
    hr.view_mut((0, 0), (n, n)).copy_from(&a);
    hr.view_mut((0, n), (n, n)).copy_from(&b);
    hr.view_mut((n, 0), (n, n)).copy_from(&b);
    hr.view_mut((n, n), (n, n)).copy_from(&(-&a));

    let (_, vecs) = sym_eigen_sorted(&hr);
    // descending eigenvalue order for candidates
    let candidates: Vec<DVector<f64>> =
        (0..2 * n).rev().map(|i| vecs.column(i).into_owned()).collect();

    let rotate = |c: &DVector<f64>| -> DVector<f64> {
        // (u; v) -> (-v; u)
        DVector::from_fn(2 * n, |i, _| if i < n { -c[n + i] } else { c[i - n] })
    };

    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    let mut firsts = Vec::with_capacity(n);
    let mut rs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for c in &candidates {
            let res = project_out(c, &chosen);
            let norm = res.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
                best = Some((norm, res));
            }
        }
        let (norm, res) = best.expect("at least one candidate");
        if norm < 1e-6 {
            return Err(Error::Validation("bloch_messiah: failed to pair eigenvectors".into()));
        }
        let mut c1 = res / norm;
        let mut c2 = project_out(&rotate(&c1), &chosen);
        c2 /= c2.norm();
        let mut r = (c1.transpose() * &hr * &c1)[(0, 0)];
        if r < 0.0 {
            let neg = -&c1;
            c1 = c2;
            c2 = neg;
            r = -r;
        }
        chosen.push(c1.clone());
        chosen.push(c2);
        firsts.push(c1);
        rs.push(r);
    }

    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for (i, c) in firsts.iter().enumerate() {
        w.set_column(i, c);
        w.set_column(n + i, &rotate(c));
    }
    let left_m = &ortho * &w;
    let right_m = w.transpose();
    let passive_tol = 1e3 * tol.max(1e-12);
    let left = PassiveInterferometer::from_orthosymplectic(&left_m, passive_tol)?;
    let right = PassiveInterferometer::from_orthosymplectic(&right_m, passive_tol)?;
    Ok(BlochMessiahFactors { left, squeeze: SqueezerProfile::new(rs), right })
}

/// Williamson normal form `G = S diag(nu, nu) S^T`.
#[derive(Debug, Clone)]
pub struct Williamson {
    pub transform: SymplecticMatrix,
    /// Symplectic eigenvalues, sorted descending.
    pub nu: Vec<f64>,
}

/// Williamson decomposition of a symmetric positive-definite matrix.
///
/// Works on `A = G^{-1/2} J G^{-1/2}`: an orthogonal `O` bringing `A` to
/// `[[0, 1/nu], [-1/nu, 0]]` block form yields `S = G^{1/2} O diag(nu, nu)^{-1/2}`.
pub fn williamson(g: &DMatrix<f64>) -> Result<Williamson> {
    let n = check_square_even(g)?;
    let asym = max_abs_diff(g, &g.transpose());
    if asym > 1e-9 * max_abs(g).max(1.0) {
        return Err(Error::Validation(format!("williamson input is not symmetric ({asym:.3e})")));
    }
    let (vals, vecs) = sym_eigen_sorted(g);
    if vals[0] <= 0.0 {
        return Err(Error::Validation(format!(
            "williamson input is not positive definite (min eigenvalue {:.3e})",
            vals[0]
        )));
    }
    let sqrt_g = &vecs * DMatrix::from_diagonal(&DVector::from_iterator(2 * n, vals.iter().map(|v| v.sqrt()))) * vecs.transpose();
    let inv_sqrt_g = &vecs
        * DMatrix::from_diagonal(&DVector::from_iterator(2 * n, vals.iter().map(|v| 1.0 / v.sqrt())))
        * vecs.transpose();
    let a = &inv_sqrt_g * j_matrix(n) * &inv_sqrt_g;
    let a = (&a - a.transpose()) * 0.5;
    let (_, evecs) = sym_eigen_sorted(&(a.transpose() * &a));
    let candidates: Vec<DVector<f64>> = (0..2 * n).map(|i| evecs.column(i).into_owned()).collect();

    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for c in &candidates {
            let res = project_out(c, &chosen);
            let norm = res.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
                best = Some((norm, res));
            }
        }
        let (norm, res) = best.expect("candidates");
        if norm < 1e-6 {
            return Err(Error::Validation("williamson: failed to pair eigenvectors".into()));
        }
        let u = res / norm;
        let au = &a * &u;
        let lambda = au.norm();
        let mut v = project_out(&(-au / lambda), &chosen);
        v /= v.norm();
        chosen.push(u.clone());
        chosen.push(v.clone());
        pairs.push((1.0 / lambda, u, v));
    }
    pairs.sort_by(|p, q| q.0.total_cmp(&p.0));

    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut scale = DVector::zeros(2 * n);
    for (i, (nu, u, v)) in pairs.iter().enumerate() {
        o.set_column(i, u);
        o.set_column(n + i, v);
        scale[i] = 1.0 / nu.sqrt();
        scale[n + i] = 1.0 / nu.sqrt();
    }
    let s = sqrt_g * o * DMatrix::from_diagonal(&scale);
    Ok(Williamson {
        transform: SymplecticMatrix::trusted(s),
        nu: pairs.iter().map(|p| p.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn form_layout() {
        let j1 = symplectic_form(1).unwrap();
        assert_eq!(j1.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let j2 = symplectic_form(2).unwrap();
        assert_eq!(j2.matrix()[(0, 2)], 1.0);
        assert_eq!(j2.matrix()[(1, 3)], 1.0);
        assert_eq!(j2.matrix()[(2, 0)], -1.0);
        assert_eq!(j2.matrix()[(0, 3)], 0.0);
        for n in 1..=6 {
            let j = symplectic_form(n).unwrap();
            let sq = j.matrix() * j.matrix();
            assert_eq!(sq, -DMatrix::<f64>::identity(2 * n, 2 * n));
            assert_eq!(j.matrix().transpose(), -j.matrix());
        }
        assert!(symplectic_form(0).is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(symplectic_product(&[1., 0., 0., 0.], &[0., 0., 1., 0.]).unwrap(), 1.0);
        assert_eq!(symplectic_product(&[0.3, -2., 5., 1.], &[0.3, -2., 5., 1.]).unwrap(), 0.0);
        // brute force x^T J y with an explicit 4x4 J
        let x = DVector::from_row_slice(&[1., 2., 3., 4.]);
        let y = DVector::from_row_slice(&[4., 3., 2., 1.]);
        let j = DMatrix::from_row_slice(
            4,
            4,
            &[0., 0., 1., 0., 0., 0., 0., 1., -1., 0., 0., 0., 0., -1., 0., 0.],
        );
        let oracle = (x.transpose() * j * &y)[(0, 0)];
        assert_eq!(oracle, -20.0);
        assert_eq!(symplectic_product(x.as_slice(), y.as_slice()).unwrap(), oracle);
        assert!(symplectic_product(&[1., 2.], &[1., 2., 3., 4.]).is_err());
        assert!(symplectic_product(&[1., 2., 3.], &[1., 2., 3.]).is_err());
    }

    #[test]
    fn unitary_conversions() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        let p = unitary_to_symplectic(&id, 1e-12).unwrap();
        assert_eq!(p.matrix(), DMatrix::identity(6, 6));

        let iu = id.map(|z| z * Complex64::i());
        let p = unitary_to_symplectic(&iu, 1e-12).unwrap();
        assert_eq!(p.x(), &DMatrix::zeros(3, 3));
        assert_eq!(p.y(), &DMatrix::identity(3, 3));
        assert!(is_symplectic(&p.matrix(), 1e-12).unwrap());
        assert!(orthogonal_defect(&p.matrix()) < 1e-12);

        let bad = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(unitary_to_symplectic(&bad, 1e-9), Err(Error::Validation(_))));
    }

    #[test]
    fn symplectic_checks() {
        assert!(is_symplectic(&DMatrix::identity(4, 4), 1e-12).unwrap());
        assert!(!is_symplectic(&(DMatrix::identity(4, 4) * 2.0), 1e-9).unwrap());
        let k = squeezer_matrix(&SqueezerProfile::new(vec![0.5]));
        assert!(is_symplectic(k.matrix(), 1e-12).unwrap());
        assert!(is_symplectic(&DMatrix::identity(3, 3), 1e-9).is_err());
    }

    #[test]
    fn squeezer_examples() {
        assert_eq!(squeezer_matrix(&SqueezerProfile::new(vec![0.0])).matrix(), &DMatrix::identity(2, 2));
        let k = squeezer_matrix(&SqueezerProfile::new(vec![LN_2]));
        assert!((k.matrix()[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((k.matrix()[(1, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bloch_messiah_of_passive_has_no_squeezing() {
        let u = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]).map(|v| Complex64::new(v, 0.0))
            * Complex64::from_polar(1.0, 0.3);
        let p = unitary_to_symplectic(&u, 1e-12).unwrap();
        let f = bloch_messiah(&p.symplectic(), 1e-9).unwrap();
        assert!(f.squeeze.r.iter().all(|r| r.abs() < 1e-9));
        assert!(max_abs_diff(&f.reconstruct(), &p.matrix()) < 1e-10);
    }

    #[test]
    fn bloch_messiah_of_diagonal_squeezer() {
        let k = squeezer_matrix(&SqueezerProfile::new(vec![0.4, -0.9, 0.0]));
        let f = bloch_messiah(&k, 1e-9).unwrap();
        let mut got = f.squeeze.r.clone();
        got.sort_by(f64::total_cmp);
        let want = [0.0, 0.4, 0.9];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{got:?}");
        }
        assert!(max_abs_diff(&f.reconstruct(), k.matrix()) < 1e-10);
    }

    #[test]
    fn bloch_messiah_degenerate_squeezing() {
        let k = squeezer_matrix(&SqueezerProfile::new(vec![0.7, 0.7, 0.7]));
        let f = bloch_messiah(&k, 1e-9).unwrap();
        assert!(f.squeeze.r.iter().all(|r| (r - 0.7).abs() < 1e-10));
        assert!(max_abs_diff(&f.reconstruct(), k.matrix()) < 1e-10);
    }

    #[test]
    fn bloch_messiah_rejects_non_symplectic() {
        let s = SymplecticMatrix { matrix: DMatrix::identity(2, 2) * 3.0 };
        assert!(bloch_messiah(&s, 1e-9).is_err());
    }

    #[test]
    fn williamson_examples() {
        let w = williamson(&DMatrix::identity(4, 4)).unwrap();
        assert!(w.nu.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(orthogonal_defect(w.transform.matrix()) < 1e-12);

        let g = DMatrix::from_diagonal(&DVector::from_row_slice(&[3.0, 1.0 / 3.0]));
        let w = williamson(&g).unwrap();
        assert!((w.nu[0] - 1.0).abs() < 1e-12);

        let g = DMatrix::from_diagonal(&DVector::from_row_slice(&[2.0, 5.0, 8.0, 0.5]));
        let w = williamson(&g).unwrap();
        // paired diagonal entries: nu = sqrt(g_i g_{n+i}), sorted descending
        assert!((w.nu[0] - 4.0).abs() < 1e-12);
        assert!((w.nu[1] - 2.5f64.sqrt()).abs() < 1e-12);

        assert!(williamson(&DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -1.0]))).is_err());
    }
}
