//! Gaussian elimination over a [`Scalar`].

use crate::scalar::Scalar;

fn elim_tol<T: Scalar>(scale: f64) -> f64 {
    if T::EXACT {
        0.0
    } else {
        1e-11 * scale.max(1.0)
    }
}

/// Solves the square system `a x = b`. Returns `None` when singular.
pub fn solve_square<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let tol = elim_tol::<T>(scale);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .expect("comparable")
                // prefer the lowest row among equals
                .then(j.cmp(&i))
        })?;
        if m[piv][col].is_zero() || m[piv][col].to_f64().abs() <= tol {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut().skip(col) {
            *v = v.clone() / p.clone();
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow).skip(col) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Rank of a (possibly rectangular) matrix.
pub fn rank<T: Scalar>(a: &[Vec<T>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let mut m = a.to_vec();
    let cols = m[0].len();
    let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let tol = elim_tol::<T>(scale);
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let piv = (r..m.len())
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).expect("comparable").then(j.cmp(&i)));
        let Some(piv) = piv else { break };
        if m[piv][c].is_zero() || m[piv][c].to_f64().abs() <= tol {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][c].clone();
        let prow: Vec<T> = m[r].iter().map(|v| v.clone() / p.clone()).collect();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        r += 1;
    }
    r
}
