//! Spectral extraction helpers: eigenvalues of symmetric and Hermitian
//! matrices and eigenphases of unitary matrices.
//!
//! Only a real symmetric eigensolver is used. A Hermitian `H = A + iB`
//! realifies to the symmetric `[[A, -B], [B, A]]` whose spectrum is that of
//! `H` with every eigenvalue doubled; unitary eigenphases are recovered from
//! a generic Hermitian combination of `(U + U^H)/2` and `(U - U^H)/(2i)`,
//! whose eigenvectors are eigenvectors of `U`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Real symmetric doubling of a Hermitian matrix.
fn realified_symmetric(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[(i, j)] = z.re;
            s[(i, j + n)] = -z.im;
            s[(i + n, j)] = z.im;
            s[(i + n, j + n)] = z.re;
        }
    }
    s
}

/// Ascending eigenvalues of a complex Hermitian matrix. Each eigenvalue of
/// the realified doubling appears twice; adjacent pairs are averaged.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let doubled = symmetric_eigenvalues(&realified_symmetric(h));
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        vals.push(0.5 * (doubled[2 * k] + doubled[2 * k + 1]));
    }
    vals
}

/// Eigenvalues and complex eigenvectors of a Hermitian matrix, via the
/// realified doubling. For each doubled pair one real eigenvector `(x; y)`
/// is taken and read back as `x + i y`.
fn hermitian_eigen(h: &DMatrix<Complex64>) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = h.nrows();
    let eig = realified_symmetric(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = Vec::with_capacity(n);
    let mut vecs = Vec::with_capacity(n);
    for k in 0..n {
        let ia = order[2 * k];
        let ib = order[2 * k + 1];
        vals.push(0.5 * (eig.eigenvalues[ia] + eig.eigenvalues[ib]));
        let col = eig.eigenvectors.column(ia);
        let v = DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]));
        vecs.push(v);
    }
    (vals, vecs)
}

/// Eigenphases of a unitary matrix, ascending in `[0, 2pi)`.
///
/// `C = (U + U^H)/2` and `S = (U - U^H)/(2i)` are commuting Hermitian
/// matrices; for a generic mixing weight `a` the combination `aC + (1-a)S`
/// has simple spectrum whenever `U` does, and its eigenvectors diagonalize
/// `U`. Each phase is read off a Rayleigh quotient. Fixed fallback weights
/// keep the routine deterministic.
pub fn unitary_eigenphases(u: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = u.nrows();
    if n != u.ncols() {
        return Err(Error::SizeMismatch {
            left_rows: u.nrows(),
            left_cols: u.ncols(),
            right_rows: u.ncols(),
            right_cols: u.ncols(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let uh = u.adjoint();
    let c = (u + &uh).map(|z| z * Complex64::new(0.5, 0.0));
    let s = (u - &uh).map(|z| z * Complex64::new(0.0, -0.5));

    const WEIGHTS: [f64; 5] = [
        0.6180339887498949,
        0.3141592653589793,
        0.7431268549103712,
        0.1234567890123456,
        0.9090909090909091,
    ];
    let mut best: Option<Vec<f64>> = None;
    let mut best_defect = f64::INFINITY;
    for &a in &WEIGHTS {
        let m = c.map(|z| z * Complex64::new(a, 0.0)) + s.map(|z| z * Complex64::new(1.0 - a, 0.0));
        let (_vals, vecs) = hermitian_eigen(&m);
        let mut phases = Vec::with_capacity(n);
        let mut defect = 0.0_f64;
        for v in &vecs {
            let uv = u * v;
            let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let mu: Complex64 = v
                .iter()
                .zip(uv.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                / Complex64::new(norm_sq, 0.0);
            // For a true eigenvector of a unitary matrix, |mu| = 1 and
            // U v = mu v. Track the worst residual as the retry criterion.
            let r = (&uv - v * mu).norm() / norm_sq.sqrt();
            defect = defect.max(r).max((mu.norm() - 1.0).abs());
            let mut theta = mu.im.atan2(mu.re);
            if theta < 0.0 {
                theta += std::f64::consts::TAU;
            }
            if theta >= std::f64::consts::TAU {
                theta -= std::f64::consts::TAU;
            }
            phases.push(theta);
        }
        phases.sort_by(f64::total_cmp);
        if defect < best_defect {
            best_defect = defect;
            best = Some(phases);
        }
        if best_defect < 1e-10 {
            break;
        }
    }
    if best_defect > 1e-6 {
        return Err(Error::Internal(format!(
            "unitary eigenphase extraction did not converge (residual {best_defect:.3e})"
        )));
    }
    Ok(best.expect("at least one weight was tried"))
}
