use crate::numerics::{dot, Matrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values of `m` in descending order, via one-sided Jacobi
/// (Hestenes) rotations on the columns of the taller orientation.
///
/// Returns `min(rows, cols)` values, each `>= 0`.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidInput("singular values of an empty matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }

    // Orthogonalize the shorter dimension. Vectors are stored contiguously:
    // for a tall matrix they are its columns, for a wide one its rows.
    let mut vecs: Vec<Vec<f64>> = if m.rows() >= m.cols() {
        (0..m.cols()).map(|c| m.column(c)).collect()
    } else {
        (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
    };
    let n = vecs.len();
    let mut norms: Vec<f64> = vecs.iter().map(|v| dot(v, v)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&vecs[p], &vecs[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;

                let (head, tail) = vecs.split_at_mut(q);
                let vp = &mut head[p];
                let vq = &mut tail[0];
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
                norms[p] = dot(vp, vp);
                norms[q] = dot(vq, vq);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = norms.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_values() {
        assert_eq!(singular_values(&Matrix::identity(3)).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn all_ones_rank_one() {
        let sv = singular_values(&Matrix::filled(2, 2, 1.0)).unwrap();
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!(sv[1].abs() < 1e-14);
    }

    #[test]
    fn wide_and_tall_lengths() {
        let m = Matrix::from_fn(3, 7, |r, c| ((r * 7 + c) as f64).sin());
        assert_eq!(singular_values(&m).unwrap().len(), 3);
        assert_eq!(singular_values(&m.transpose()).unwrap().len(), 3);
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            singular_values(&Matrix::zeros(0, 3)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&Matrix::zeros(4, 2)).unwrap(), vec![0.0, 0.0]);
    }
}
