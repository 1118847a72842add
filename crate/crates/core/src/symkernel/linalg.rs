//! Small dense linear systems, symbolic and numeric.

use nalgebra::{DMatrix, DVector};

use super::expr::Expr;

fn pivot_rank(e: &Expr) -> Option<u8> {
    if e.is_literal_zero() {
        return None;
    }
    match e.as_number() {
        Some(_) => Some(0),
        None => match e.expand(512) {
            Some(x) if x.is_literal_zero() => None,
            _ => Some(1),
        },
    }
}

/// Gauss–Jordan elimination over expressions. Numeric pivots are preferred;
/// returns `None` if some column has no structurally nonzero pivot.
///
/// Callers are expected to confirm regularity numerically: a symbolic pivot
/// that vanishes on part of the domain is not detected here.
pub fn solve_symbolic(matrix: &[Vec<Expr>], rhs: &[Vec<Expr>]) -> Option<Vec<Vec<Expr>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Expr>> = matrix.iter().map(|r| r.iter().map(Expr::simplify).collect()).collect();
    let mut b: Vec<Vec<Expr>> = rhs.iter().map(|r| r.iter().map(Expr::simplify).collect()).collect();
    for col in 0..n {
        let (piv, _) = (col..n).filter_map(|r| pivot_rank(&a[r][col]).map(|k| (r, k))).min_by_key(|(_, k)| *k)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        b[col] = b[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r == col || a[r][col].is_literal_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let (pa, pb) = (a[col].clone(), b[col].clone());
            a[r] = a[r].iter().zip(&pa).map(|(x, p)| x - &factor * p).collect();
            b[r] = b[r].iter().zip(&pb).map(|(x, p)| x - &factor * p).collect();
        }
    }
    Some(b)
}

/// Solve `matrix · v = rhs` for a single right-hand side.
pub fn solve_vector(matrix: &[Vec<Expr>], rhs: &[Expr]) -> Option<Vec<Expr>> {
    let cols: Vec<Vec<Expr>> = rhs.iter().map(|r| vec![r.clone()]).collect();
    solve_symbolic(matrix, &cols).map(|rows| rows.into_iter().map(|mut r| r.remove(0)).collect())
}

/// Symbolic inverse of a square matrix.
pub fn invert(matrix: &[Vec<Expr>]) -> Option<Vec<Vec<Expr>>> {
    let n = matrix.len();
    let id: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
        .collect();
    solve_symbolic(matrix, &id)
}

/// Numeric solve with partial pivoting. `None` for a singular system.
pub fn solve_numeric(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
    let lu = m.lu();
    if lu.determinant().abs() <= f64::MIN_POSITIVE {
        return None;
    }
    let v = lu.solve(&DVector::from_column_slice(rhs))?;
    v.iter().all(|x| x.is_finite()).then(|| v.iter().copied().collect())
}

pub fn determinant(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, |i, j| matrix[i][j]).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_inverse_of_triangular_coframe() {
        let y = Expr::var("y");
        let m = vec![
            vec![Expr::one(), Expr::zero()],
            vec![-y.clone(), Expr::one()],
        ];
        let inv = invert(&m).unwrap();
        assert_eq!(inv[1][0], y);
        assert!(inv[0][1].is_literal_zero());
    }

    #[test]
    fn singular_systems_are_rejected() {
        let m = vec![vec![Expr::one(), Expr::int(2)], vec![Expr::int(2), Expr::int(4)]];
        assert!(invert(&m).is_none());
        assert!(solve_numeric(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn numeric_solve() {
        let v = solve_numeric(&[vec![0.0, 2.0], vec![3.0, 1.0]], &[4.0, 5.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
    }
}
