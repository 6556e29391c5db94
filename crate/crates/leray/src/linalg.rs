//! Small dense helpers on top of nalgebra: hermitian functions, Takagi
//! factorization, orthonormalization and extreme singular values.

use crate::{c, CMat, CVec, Error, Result, RMat, C64};
use nalgebra::{DMatrix, SymmetricEigen};

/// Hermitian square root and inverse square root of a positive definite matrix.
pub fn hermitian_sqrt_pair(h: &CMat) -> Result<(CMat, CMat)> {
    if h.nrows() == 0 {
        return Ok((h.clone(), h.clone()));
    }
    let hs = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(hs);
    let n = eig.eigenvalues.len();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NotPseudoconvex(format!("smallest eigenvalue {min:e}")));
    }
    let v = &eig.eigenvectors;
    let mut s = CMat::zeros(n, n);
    let mut si = CMat::zeros(n, n);
    for k in 0..n {
        let l = eig.eigenvalues[k];
        let col = v.column(k);
        let outer = col * col.adjoint();
        s += &outer * c(l.sqrt(), 0.0);
        si += &outer * c(1.0 / l.sqrt(), 0.0);
    }
    Ok((s, si))
}

/// Eigenvalues (ascending) of a hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let hs = (h + h.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(hs).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Takagi factorization of a complex symmetric matrix: `k = U Σ Uᵀ` with
/// `U` unitary and `Σ ≥ 0` sorted in descending order.
pub fn takagi(k: &CMat) -> (CMat, Vec<f64>) {
    let m = k.nrows();
    let mut big = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = (k[(i, j)] + k[(j, i)]) * 0.5;
            big[(i, j)] = z.re;
            big[(i, j + m)] = z.im;
            big[(i + m, j)] = z.im;
            big[(i + m, j + m)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(big);
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let scale = k.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-12 * scale;
    let mut cols: Vec<CVec> = Vec::new();
    let mut sig = Vec::new();
    for &idx in &order {
        if cols.len() == m || eig.eigenvalues[idx] <= tol {
            break;
        }
        let v = eig.eigenvectors.column(idx);
        let mut u = CVec::from_fn(m, |i, _| c(v[i], v[i + m]));
        for q in &cols {
            let p = q.dotc(&u);
            u -= q * p;
        }
        let nrm = u.norm();
        if nrm < 1e-8 {
            continue;
        }
        cols.push(u / c(nrm, 0.0));
        sig.push(eig.eigenvalues[idx]);
    }
    // complete with an orthonormal basis of the null directions
    let mut e = 0;
    while cols.len() < m && e < m {
        let mut u = CVec::from_fn(m, |i, _| if i == e { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for _ in 0..2 {
            for q in &cols {
                let p = q.dotc(&u);
                u -= q * p;
            }
        }
        let nrm = u.norm();
        if nrm > 1e-6 {
            cols.push(u / c(nrm, 0.0));
            sig.push(0.0);
        }
        e += 1;
    }
    let u = CMat::from_columns(&cols);
    (u, sig)
}

/// Orthonormal basis (columns) of the orthogonal complement of `v` in ℂⁿ.
pub fn complement_basis(v: &CVec) -> CMat {
    let n = v.len();
    let nv = v.norm();
    let vhat = v / c(nv, 0.0);
    let mut cols: Vec<CVec> = Vec::with_capacity(n - 1);
    // Start from the coordinate axes least aligned with v.
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| vhat[a].norm().partial_cmp(&vhat[b].norm()).unwrap());
    for &a in &axes {
        if cols.len() == n - 1 {
            break;
        }
        let mut u = CVec::from_fn(n, |i, _| if i == a { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for _ in 0..2 {
            let p = vhat.dotc(&u);
            u -= &vhat * p;
            for q in &cols {
                let p = q.dotc(&u);
                u -= q * p;
            }
        }
        let nrm = u.norm();
        if nrm > 1e-8 {
            cols.push(u / c(nrm, 0.0));
        }
    }
    if cols.is_empty() {
        return CMat::zeros(n, 0);
    }
    CMat::from_columns(&cols)
}

/// Largest singular value of a dense complex matrix.
///
/// Full SVD for moderate sizes; Lanczos with full reorthogonalization on
/// `AᴴA` otherwise.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.nrows().max(a.ncols()) <= 600 {
        return a.clone().singular_values().max();
    }
    lanczos_top_singular(a, 1e-13)
}

/// Lanczos estimate of the top singular value of `a`.
pub fn lanczos_top_singular(a: &CMat, tol: f64) -> f64 {
    let n = a.ncols();
    let steps = n.min(160);
    let ah = a.adjoint();
    let mut q: Vec<CVec> = Vec::with_capacity(steps + 1);
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    // deterministic, generic start vector
    let mut v = CVec::from_fn(n, |i, _| c(1.0 + 0.37 * (i as f64).sin(), 0.21 * (1.3 * i as f64).cos()));
    let nv = v.norm();
    v /= c(nv, 0.0);
    q.push(v);
    let mut last = 0.0;
    for k in 0..steps {
        let mut w = &ah * (a * &q[k]);
        let ak = q[k].dotc(&w).re;
        alpha.push(ak);
        for _ in 0..2 {
            for qi in &q {
                let p = qi.dotc(&w);
                w -= qi * p;
            }
        }
        let bk = w.norm();
        // top Ritz value of the current tridiagonal
        let m = alpha.len();
        let mut t = RMat::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let top = SymmetricEigen::new(t).eigenvalues.max();
        if k > 4 && (top - last).abs() <= tol * top.abs() {
            return top.max(0.0).sqrt();
        }
        last = top;
        if bk < 1e-14 * top.abs().max(1e-300) {
            return top.max(0.0).sqrt();
        }
        beta.push(bk);
        q.push(w / c(bk, 0.0));
    }
    last.max(0.0).sqrt()
}

/// Weighted Gram–Schmidt with reorthogonalization. Columns whose residual
/// norm falls below `drop_tol` times their original norm are discarded.
/// Returns the orthonormal vectors (in the weighted inner product
/// `⟨u,v⟩ = Σ w uᵢ v̄ᵢ`) and the indices of the kept inputs.
pub fn weighted_gram_schmidt(vs: &[CVec], w: &[f64], drop_tol: f64) -> (Vec<CVec>, Vec<usize>) {
    let ip = |a: &CVec, b: &CVec| -> C64 {
        a.iter().zip(b.iter()).zip(w.iter()).map(|((x, y), wi)| x * y.conj() * *wi).sum()
    };
    let mut out: Vec<CVec> = Vec::new();
    let mut kept = Vec::new();
    for (idx, v) in vs.iter().enumerate() {
        let n0 = ip(v, v).re.sqrt();
        if n0 == 0.0 {
            continue;
        }
        let mut u = v.clone();
        for _ in 0..2 {
            for q in &out {
                let p = ip(&u, q);
                u -= q * p;
            }
        }
        let nu = ip(&u, &u).re.sqrt();
        if nu <= drop_tol * n0 {
            continue;
        }
        out.push(u / c(nu, 0.0));
        kept.push(idx);
    }
    (out, kept)
}

/// Condition number of a hermitian positive semidefinite Gram matrix.
pub fn gram_condition(g: &CMat) -> f64 {
    let ev = hermitian_eigenvalues(g);
    let lo = ev.first().cloned().unwrap_or(0.0);
    let hi = ev.last().cloned().unwrap_or(0.0);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Real matrix inverse with a singularity check.
pub fn real_inverse(m: &RMat) -> Result<RMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular real linear map".into()))
}

/// Complex determinant.
pub fn det(m: &CMat) -> C64 {
    if m.nrows() == 0 {
        return c(1.0, 0.0);
    }
    m.clone().determinant()
}

pub fn zeros(n: usize, m: usize) -> CMat {
    DMatrix::from_element(n, m, c(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn takagi_reconstructs_symmetric_matrix() {
        let k = CMat::from_row_slice(3, 3, &[
            c(1.0, 0.2), c(0.3, -0.1), c(0.0, 0.5),
            c(0.3, -0.1), c(-0.4, 0.0), c(0.2, 0.2),
            c(0.0, 0.5), c(0.2, 0.2), c(0.7, -0.3),
        ]);
        let (u, s) = takagi(&k);
        let sig = CMat::from_diagonal(&CVec::from_iterator(3, s.iter().map(|x| c(*x, 0.0))));
        let rec = &u * sig * u.transpose();
        assert!((rec - &k).norm() < 1e-12);
        assert!((u.adjoint() * &u - CMat::identity(3, 3)).norm() < 1e-12);
        assert!(s[0] >= s[1] && s[1] >= s[2]);
    }

    #[test]
    fn takagi_handles_zero_matrix() {
        let (u, s) = takagi(&zeros(2, 2));
        assert_eq!(s, vec![0.0, 0.0]);
        assert!((u.adjoint() * &u - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn lanczos_matches_svd() {
        let a = CMat::from_fn(80, 80, |i, j| c(1.0 / (1.0 + (i + j) as f64), ((i * j) % 7) as f64 * 0.01));
        let exact = a.clone().singular_values().max();
        assert!((lanczos_top_singular(&a, 1e-14) - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = CVec::from_vec(vec![c(0.3, 0.1), c(-1.0, 0.4), c(0.0, 2.0)]);
        let e = complement_basis(&v);
        assert_eq!(e.ncols(), 2);
        assert!((e.adjoint() * &e - CMat::identity(2, 2)).norm() < 1e-12);
        assert!((e.adjoint() * &v).norm() < 1e-12);
    }
}
