//! Matrix algebra over the valuation ring `O_p`.
//!
//! All transformations here are invertible over `O_p`: swaps, scaling by
//! units, and adding multiples of valuation `>= 0`. Because a
//! minimal-valuation entry divides every other element of `O_p`, a single
//! elimination pass per pivot suffices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{PadicContext, Scalar};

/// Result of column-reducing a matrix by `O_p`-unimodular column operations.
#[derive(Debug, Clone)]
pub struct ColumnReduction {
    /// `input · transform`
    pub reduced: Matrix,
    pub transform: Matrix,
    /// `(row, column)` of each pivot, in processing order.
    pub pivots: Vec<(usize, usize)>,
    /// Columns of `reduced` that ended up zero, ascending.
    pub zero_columns: Vec<usize>,
}

/// Column-reduces `m`, visiting rows in `row_order`. In each row the
/// remaining column of minimal valuation (lowest index on ties) becomes the
/// pivot and clears the rest of that row.
pub fn column_reduce(ctx: &PadicContext, m: &Matrix, row_order: &[usize]) -> ColumnReduction {
    let mut work = m.clone();
    let mut transform = Matrix::identity(m.cols());
    let mut available: Vec<usize> = (0..m.cols()).collect();
    let mut pivots = Vec::new();

    for &i in row_order {
        let best = available
            .iter()
            .enumerate()
            .filter(|(_, &c)| !work[(i, c)].is_zero())
            .min_by_key(|(_, &c)| (ctx.val(&work[(i, c)]), c))
            .map(|(pos, &c)| (pos, c));
        let Some((pos, c)) = best else { continue };
        available.remove(pos);
        let pivot_inv = work[(i, c)].inv().expect("nonzero pivot");
        for &other in &available {
            if work[(i, other)].is_zero() {
                continue;
            }
            let f = -(&work[(i, other)] * &pivot_inv);
            work.add_col_multiple(other, c, &f);
            transform.add_col_multiple(other, c, &f);
        }
        pivots.push((i, c));
    }

    ColumnReduction {
        reduced: work,
        transform,
        pivots,
        zero_columns: available,
    }
}

/// The canonical upper-triangular generator matrix of the `O_p`-column
/// module of `m`: diagonal entries are exact powers `p^d_i` and every entry
/// right of the diagonal in row `i` is reduced modulo `p^d_i`.
pub fn hnf_canonical(ctx: &PadicContext, m: &Matrix) -> Result<Matrix> {
    let r = m.rows();
    if r > m.cols() {
        return Err(Error::Rank {
            expected: r,
            found: m.rank(),
        });
    }
    let order: Vec<usize> = (0..r).rev().collect();
    let red = column_reduce(ctx, m, &order);
    if red.pivots.len() < r {
        return Err(Error::Rank {
            expected: r,
            found: red.pivots.len(),
        });
    }
    let mut cols = vec![0; r];
    for &(row, col) in &red.pivots {
        cols[row] = col;
    }
    let mut h = red.reduced.select_columns(&cols);

    let mut exps = vec![0i64; r];
    for (i, e) in exps.iter_mut().enumerate() {
        let (v, unit) = ctx.split_unit(&h[(i, i)]);
        *e = v;
        h.scale_col(i, &unit.inv().expect("unit"));
    }
    for i in (0..r).rev() {
        let pivot_inv = ctx.power(-exps[i]);
        for j in i + 1..r {
            let x = h[(i, j)].clone();
            let target = ctx.reduce_mod_power(&x, exps[i]);
            if target == x {
                continue;
            }
            let f = -(&(&x - &target) * &pivot_inv);
            h.add_col_multiple(j, i, &f);
        }
    }
    Ok(h)
}

/// Smith form `M = left · diag(p^e_1, …, p^e_n) · right` with `left`, `right`
/// invertible over `O_p` and `e` ascending.
#[derive(Debug, Clone)]
pub struct Snf {
    pub exponents: Vec<i64>,
    pub left: Matrix,
    pub right: Matrix,
}

impl Snf {
    pub fn diagonal(&self, ctx: &PadicContext) -> Matrix {
        Matrix::diagonal(self.exponents.iter().map(|&e| ctx.power(e)).collect())
    }
}

fn square_invertible_check(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "Smith form needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Elementary-divisor exponents of a square invertible matrix, ascending.
pub fn snf_exponents(ctx: &PadicContext, m: &Matrix) -> Result<Vec<i64>> {
    Ok(snf_impl(ctx, m, false)?.exponents)
}

/// Smith form with the transforms.
pub fn snf(ctx: &PadicContext, m: &Matrix) -> Result<Snf> {
    snf_impl(ctx, m, true)
}

fn snf_impl(ctx: &PadicContext, m: &Matrix, track: bool) -> Result<Snf> {
    square_invertible_check(m)?;
    let n = m.rows();
    let mut w = m.clone();
    // row_ops · m · col_ops = diag
    let mut row_ops = Matrix::identity(if track { n } else { 0 });
    let mut col_ops = Matrix::identity(if track { n } else { 0 });
    let mut exponents = Vec::with_capacity(n);

    for t in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for j in t..n {
            for i in t..n {
                if w[(i, j)].is_zero() {
                    continue;
                }
                let key = (ctx.val(&w[(i, j)]), j, i);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, j, i)) = best else {
            return Err(Error::Rank {
                expected: n,
                found: t,
            });
        };
        w.swap_rows(t, i);
        w.swap_cols(t, j);
        if track {
            row_ops.swap_rows(t, i);
            col_ops.swap_cols(t, j);
        }
        let pivot_inv = w[(t, t)].inv()?;
        for i in t + 1..n {
            if w[(i, t)].is_zero() {
                continue;
            }
            let f = -(&w[(i, t)] * &pivot_inv);
            w.add_row_multiple(i, t, &f);
            if track {
                row_ops.add_row_multiple(i, t, &f);
            }
        }
        for j in t + 1..n {
            if w[(t, j)].is_zero() {
                continue;
            }
            let f = -(&w[(t, j)] * &pivot_inv);
            w.add_col_multiple(j, t, &f);
            if track {
                col_ops.add_col_multiple(j, t, &f);
            }
        }
        let (e, unit) = ctx.split_unit(&w[(t, t)]);
        if track {
            row_ops.scale_row(t, &unit.inv()?);
        }
        exponents.push(e);
    }
    debug_assert!(exponents.windows(2).all(|p| p[0] <= p[1]));

    let (left, right) = if track {
        (row_ops.inverse()?, col_ops.inverse()?)
    } else {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    };
    Ok(Snf {
        exponents,
        left,
        right,
    })
}

/// Generators of the saturated module `{x ∈ A·O^m : B·x = 0}`.
///
/// Returns an `m × s` matrix, `s = m - rank(B·A)`; `s = 0` gives an empty
/// column set.
pub fn kernel_sublattice(ctx: &PadicContext, b: &Matrix, a: &Matrix) -> Result<Matrix> {
    if !a.is_square() || b.cols() != a.rows() {
        return Err(Error::Dimension(format!(
            "kernel of a {}x{} map on a {}x{} basis",
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let c = b.try_mul(a)?;
    let order: Vec<usize> = (0..c.rows()).collect();
    let red = column_reduce(ctx, &c, &order);
    let au = a.try_mul(&red.transform)?;
    Ok(au.select_columns(&red.zero_columns))
}

/// Some `x ∈ O^c` with `m·x = v`, if one exists. `m` must have full row rank.
pub fn integral_preimage(ctx: &PadicContext, m: &Matrix, v: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let order: Vec<usize> = (0..m.rows()).collect();
    let red = column_reduce(ctx, m, &order);
    if red.pivots.len() < m.rows() {
        return Err(Error::Rank {
            expected: m.rows(),
            found: red.pivots.len(),
        });
    }
    let pivot_cols: Vec<usize> = red.pivots.iter().map(|&(_, c)| c).collect();
    let square = red.reduced.select_columns(&pivot_cols);
    let y = square.inverse()?.mul_vec(v)?;
    if !y.iter().all(|x| ctx.is_integral(x)) {
        return Ok(None);
    }
    let mut full = vec![Scalar::zero(); m.cols()];
    for (&c, yc) in pivot_cols.iter().zip(y) {
        full[c] = yc;
    }
    Ok(Some(red.transform.mul_vec(&full)?))
}

/// Invertible over `O_p`: integral entries and a unit determinant.
pub fn is_unimodular(ctx: &PadicContext, m: &Matrix) -> bool {
    m.is_square()
        && m.is_integral(ctx)
        && m.determinant()
            .map(|d| ctx.valuation(&d) == crate::scalar::Valuation::Finite(0))
            .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Valuation;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn two() -> PadicContext {
        PadicContext::new(2).unwrap()
    }

    #[test]
    fn hnf_identity() {
        let ctx = two();
        assert_eq!(hnf_canonical(&ctx, &Matrix::identity(2)).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn hnf_of_two_by_two() {
        // columns (2,0) and (1,2): (1,0) is not in the module (first
        // coordinate odd forces second coordinate ≡ 2 mod 4), index 4.
        // Oracle-confirmed in tests/acceptance.rs.
        let ctx = two();
        let m = Matrix::from_int_rows(&[&[2, 1], &[0, 2]]);
        let h = hnf_canonical(&ctx, &m).unwrap();
        assert_eq!(h, Matrix::from_int_rows(&[&[2, 1], &[0, 2]]));
        assert_eq!(hnf_canonical(&ctx, &h).unwrap(), h);
    }

    #[test]
    fn hnf_drops_duplicate_columns() {
        let ctx = two();
        let m = Matrix::from_rows(vec![
            vec![q("1"), q("1"), q("0")],
            vec![q("0"), q("0"), q("1/2")],
        ])
        .unwrap();
        let expected = Matrix::from_rows(vec![vec![q("1"), q("0")], vec![q("0"), q("1/2")]]).unwrap();
        assert_eq!(hnf_canonical(&ctx, &m).unwrap(), expected);
    }

    #[test]
    fn hnf_rank_error() {
        let ctx = two();
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(hnf_canonical(&ctx, &m), Err(Error::Rank { expected: 2, found: 1 })));
    }

    #[test]
    fn snf_examples() {
        let ctx = two();
        assert_eq!(snf_exponents(&ctx, &Matrix::from_int_rows(&[&[1, 1], &[0, 2]])).unwrap(), vec![0, 1]);
        assert_eq!(snf_exponents(&ctx, &Matrix::identity(3)).unwrap(), vec![0, 0, 0]);
        let three = PadicContext::new(3).unwrap();
        assert_eq!(snf_exponents(&three, &Matrix::from_int_rows(&[&[2, 0], &[0, 3]])).unwrap(), vec![0, 1]);
    }

    #[test]
    fn snf_rejects_singular_and_rectangular() {
        let ctx = two();
        assert!(matches!(
            snf_exponents(&ctx, &Matrix::from_int_rows(&[&[1, 2], &[2, 4]])),
            Err(Error::Rank { .. })
        ));
        assert!(matches!(
            snf_exponents(&ctx, &Matrix::from_int_rows(&[&[1, 2, 3]])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn snf_transforms_reassemble() {
        let ctx = two();
        let m = Matrix::from_rows(vec![
            vec![q("3/2"), q("4"), q("1")],
            vec![q("6"), q("1/4"), q("0")],
            vec![q("2"), q("2"), q("8")],
        ])
        .unwrap();
        let s = snf(&ctx, &m).unwrap();
        assert!(is_unimodular(&ctx, &s.left));
        assert!(is_unimodular(&ctx, &s.right));
        assert_eq!(&(&s.left * &s.diagonal(&ctx)) * &s.right, m);
        let det = m.determinant().unwrap();
        assert_eq!(Valuation::Finite(s.exponents.iter().sum()), ctx.valuation(&det));
    }

    #[test]
    fn kernel_examples() {
        let ctx = two();
        let k = kernel_sublattice(&ctx, &Matrix::from_int_rows(&[&[1, 1]]), &Matrix::identity(2)).unwrap();
        assert_eq!(k.cols(), 1);
        // (1,-1) up to a unit
        assert_eq!(&k[(0, 0)] + &k[(1, 0)], Scalar::zero());
        assert_eq!(ctx.valuation(&k[(0, 0)]), Valuation::Finite(0));

        let k = kernel_sublattice(&ctx, &Matrix::zeros(1, 2), &Matrix::identity(2)).unwrap();
        assert_eq!(k, Matrix::identity(2));

        let k = kernel_sublattice(&ctx, &Matrix::from_int_rows(&[&[1, 2]]), &Matrix::identity(2)).unwrap();
        assert_eq!(k.cols(), 1);
        // (-2, 1) up to a unit: primitive, first coordinate = -2 × second
        assert_eq!(k[(0, 0)], &k[(1, 0)] * &q("-2"));
        assert_eq!(ctx.valuation(&k[(1, 0)]), Valuation::Finite(0));
    }

    #[test]
    fn kernel_of_full_rank_map_is_empty() {
        let ctx = two();
        let k = kernel_sublattice(&ctx, &Matrix::identity(2), &Matrix::identity(2)).unwrap();
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn preimage() {
        let ctx = two();
        let m = Matrix::from_int_rows(&[&[2, 1, 0], &[0, 2, 4]]);
        let v = vec![q("1"), q("2")];
        let x = integral_preimage(&ctx, &m, &v).unwrap().unwrap();
        assert!(x.iter().all(|c| ctx.is_integral(c)));
        assert_eq!(m.mul_vec(&x).unwrap(), v);
        assert_eq!(integral_preimage(&ctx, &m, &[q("1/2"), q("0")]).unwrap(), None);
    }
}
