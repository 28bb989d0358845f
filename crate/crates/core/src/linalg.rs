//! Largest Takagi value of a complex symmetric matrix.
//!
//! For symmetric `B` the supremum of `|xᵀBx|` over unit vectors equals the
//! largest singular value. It is the top eigenvalue of the real symmetric
//! embedding `[[Re B, Im B], [Im B, −Re B]]`, which represents the
//! real-linear map `x ↦ B x̄`; the eigenvector also yields a maximizer.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::series::C64;

/// Dimension above which the dense eigensolver is replaced by power iteration.
pub const DENSE_LIMIT: usize = 160;

#[derive(Clone, Debug)]
pub struct TakagiMax {
    pub sigma: f64,
    /// Unit vector with `xᵀBx = sigma` (real and nonnegative).
    pub vector: Vec<C64>,
}

fn embedding(b: &DMatrix<C64>) -> DMatrix<f64> {
    let n = b.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = b[(i, j)];
            m[(i, j)] = v.re;
            m[(i, j + n)] = v.im;
            m[(i + n, j)] = v.im;
            m[(i + n, j + n)] = -v.re;
        }
    }
    m
}

/// Turns an eigenvector `(p; q)` of the embedding into a maximizer.
fn maximizer(b: &DMatrix<C64>, pq: &DVector<f64>) -> TakagiMax {
    let n = b.nrows();
    let u: Vec<C64> = (0..n).map(|i| C64::new(pq[i], pq[i + n])).collect();
    let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let x: Vec<C64> = u.iter().map(|c| c.conj() / norm).collect();
    let q = quadratic_form(b, &x);
    // Rotate away any residual phase so the form is real and nonnegative.
    let phase = if q.norm() > 0.0 { (q / q.norm()).sqrt().conj() } else { C64::new(1.0, 0.0) };
    let x = x.into_iter().map(|c| c * phase).collect::<Vec<_>>();
    TakagiMax {
        sigma: quadratic_form(b, &x).norm(),
        vector: x,
    }
}

/// `xᵀBx` without conjugation.
pub fn quadratic_form(b: &DMatrix<C64>, x: &[C64]) -> C64 {
    let n = b.nrows();
    let mut acc = C64::default();
    for i in 0..n {
        let mut row = C64::default();
        for j in 0..n {
            row += b[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

pub fn takagi_max(b: &DMatrix<C64>) -> TakagiMax {
    let n = b.nrows();
    if n == 0 {
        return TakagiMax { sigma: 0.0, vector: vec![] };
    }
    if n > DENSE_LIMIT {
        return takagi_power(b, 2000, 1e-14);
    }
    let eig = SymmetricEigen::new(embedding(b));
    let (imax, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let top = eig.eigenvalues[imax];
    if top <= 0.0 {
        let mut vector = vec![C64::default(); n];
        vector[0] = C64::new(1.0, 0.0);
        return TakagiMax { sigma: 0.0, vector };
    }
    let mut t = maximizer(b, &eig.eigenvectors.column(imax).into_owned());
    t.sigma = t.sigma.max(top);
    t
}

/// Power iteration on `x ↦ B conj(B x̄)`, i.e. on `B B*`, whose top
/// eigenvalue is `σ²`.
pub fn takagi_power(b: &DMatrix<C64>, max_iter: usize, tol: f64) -> TakagiMax {
    let n = b.nrows();
    let m = embedding(b);
    let mut v = DVector::<f64>::from_fn(2 * n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = &m * (&m * &v);
        let nw = w.norm();
        if nw == 0.0 {
            break;
        }
        let next = w / nw;
        let done = (nw - lambda).abs() <= tol * nw.max(1.0);
        lambda = nw;
        v = next;
        if done {
            break;
        }
    }
    // v spans the ±σ eigenspaces; project onto +σ.
    let mv = &m * &v;
    let sigma = lambda.sqrt();
    let plus = &v + &mv / sigma.max(f64::MIN_POSITIVE);
    let pq = if plus.norm() > 1e-8 { plus } else { v };
    maximizer(b, &pq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_top_entry() {
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.3, 0.4),
            C64::new(-0.2, 0.0),
            C64::new(0.0, 0.1),
        ]));
        let t = takagi_max(&b);
        assert!((t.sigma - 0.5).abs() < 1e-14);
        let q = quadratic_form(&b, &t.vector);
        assert!((q - C64::new(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn agrees_with_svd_and_power_iteration() {
        let n = 9;
        let mut b = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = C64::new(((i * 3 + j * 5) % 7) as f64 - 3.0, ((i + 2 * j) % 5) as f64 - 2.0) / 10.0;
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let svd = b.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let t = takagi_max(&b);
        assert!((t.sigma - smax).abs() < 1e-12);
        let p = takagi_power(&b, 5000, 1e-15);
        assert!((p.sigma - smax).abs() < 1e-9);
        assert!((quadratic_form(&b, &t.vector).norm() - smax).abs() < 1e-12);
    }
}
