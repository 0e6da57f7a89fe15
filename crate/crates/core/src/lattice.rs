//! The space `Lat_n` of lattices in `Q_p^n`.
//!
//! A [`Lattice`] keeps its basis in canonical form, so two lattices are equal
//! exactly when their stored bases are identical.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::dvr::{hnf_canonical, snf, snf_exponents};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{PadicContext, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ctx: PadicContext,
    basis: Matrix,
}

/// Exponent `m` of a lattice norm `‖v‖ = p^m`; the zero vector has norm 0,
/// represented by `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormExponent {
    NegInfinity,
    Finite(i64),
}

impl NormExponent {
    pub fn finite(self) -> Option<i64> {
        match self {
            NormExponent::Finite(m) => Some(m),
            NormExponent::NegInfinity => None,
        }
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExponent::Finite(m) => write!(f, "{m}"),
            NormExponent::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// The non-increasing integers `k_1 ≥ … ≥ k_n` with `R = ⊕ O f_j` and
/// `S = ⊕ p^(-k_j) O f_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ComplexDistance {
    #[serde(rename = "k")]
    ks: Vec<i64>,
}

impl ComplexDistance {
    pub fn new(mut ks: Vec<i64>) -> Self {
        ks.sort_unstable_by(|a, b| b.cmp(a));
        ComplexDistance { ks }
    }

    pub fn ks(&self) -> &[i64] {
        &self.ks
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    /// The distance seen from the other end: `k(S,R) = -reverse(k(R,S))`.
    pub fn swapped(&self) -> ComplexDistance {
        ComplexDistance {
            ks: self.ks.iter().rev().map(|k| -k).collect(),
        }
    }

    /// Exponents of the cyclic factors of `S/(R∩S)`, largest first.
    pub fn positive_part(&self) -> Vec<i64> {
        self.ks.iter().copied().filter(|&k| k > 0).collect()
    }

    /// Exponents of the cyclic factors of `R/(R∩S)`, largest first.
    pub fn negative_part(&self) -> Vec<i64> {
        let mut neg: Vec<i64> = self.ks.iter().filter(|&&k| k < 0).map(|k| -k).collect();
        neg.reverse();
        neg
    }
}

impl fmt::Display for ComplexDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.ks)
    }
}

/// A `j`-dimensional subspace of `Q_p^n`, given by `j` independent columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn new(basis: Matrix) -> Result<Self> {
        let rank = basis.rank();
        if basis.cols() == 0 || rank != basis.cols() {
            return Err(Error::Rank {
                expected: basis.cols(),
                found: rank,
            });
        }
        Ok(Subspace { basis })
    }

    pub fn from_vectors(n: usize, vectors: &[Vec<Scalar>]) -> Result<Self> {
        Subspace::new(Matrix::from_columns(n, vectors)?)
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

impl Lattice {
    /// The `O_p`-span of the columns of `gens`, which must have rank `n`.
    pub fn from_generator_matrix(ctx: PadicContext, gens: &Matrix) -> Result<Self> {
        if gens.rows() == 0 {
            return Err(Error::Dimension("lattices need n >= 1".into()));
        }
        let basis = hnf_canonical(&ctx, gens)?;
        Ok(Lattice { ctx, basis })
    }

    pub fn from_generators(ctx: PadicContext, n: usize, gens: &[Vec<Scalar>]) -> Result<Self> {
        Lattice::from_generator_matrix(ctx, &Matrix::from_columns(n, gens)?)
    }

    /// `O_p^n`
    pub fn standard(ctx: PadicContext, n: usize) -> Self {
        Lattice {
            ctx,
            basis: Matrix::identity(n),
        }
    }

    /// `⊕ p^(a_i) O_p e_i`
    pub fn diagonal(ctx: PadicContext, exponents: &[i64]) -> Self {
        Lattice {
            ctx,
            basis: Matrix::diagonal(exponents.iter().map(|&a| ctx.power(a)).collect()),
        }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    /// The canonical basis, one column per basis vector.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn check_compatible(&self, other: &Lattice) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "lattices of dimension {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    fn basis_inverse(&self) -> Matrix {
        self.basis.inverse().expect("lattice basis is invertible")
    }

    /// `A_self⁻¹ · A_other`: coordinates of `other`'s basis in `self`'s basis.
    pub fn transition_to(&self, other: &Lattice) -> Result<Matrix> {
        self.check_compatible(other)?;
        self.basis_inverse().try_mul(&other.basis)
    }

    /// `other ⊆ self`
    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        Ok(self.transition_to(other)?.is_integral(&self.ctx))
    }

    /// Module equality through the transition criterion, independent of the
    /// canonical form.
    pub fn equal_by_transition(&self, other: &Lattice) -> Result<bool> {
        Ok(self.contains(other)? && other.contains(self)?)
    }

    /// Exponent `m` with `‖v‖_L = p^m`: minus the smallest valuation of the
    /// coordinates of `v` in the basis of `L`.
    pub fn norm(&self, v: &[Scalar]) -> Result<NormExponent> {
        let coords = self.basis_inverse().mul_vec(v)?;
        Ok(match coords.iter().map(|x| self.ctx.valuation(x)).min() {
            Some(Valuation::Finite(m)) => NormExponent::Finite(-m),
            _ => NormExponent::NegInfinity,
        })
    }

    pub fn member(&self, v: &[Scalar]) -> Result<bool> {
        Ok(self.norm(v)? <= NormExponent::Finite(0))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        Lattice::from_generator_matrix(self.ctx, &self.basis.hstack(&other.basis)?)
    }

    /// Functionals integral on `self`, under the coordinate pairing.
    pub fn dual(&self) -> Lattice {
        let b = self.basis_inverse().transpose();
        Lattice::from_generator_matrix(self.ctx, &b).expect("inverse transpose is invertible")
    }

    /// `L ∩ M = (L^□ + M^□)^□`
    pub fn meet(&self, other: &Lattice) -> Result<Lattice> {
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// `g · L` for an invertible `g`.
    pub fn transform(&self, g: &Matrix) -> Result<Lattice> {
        if g.rows() != self.n() || g.cols() != self.n() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix acting on dimension {}",
                g.rows(),
                g.cols(),
                self.n()
            )));
        }
        Lattice::from_generator_matrix(self.ctx, &g.try_mul(&self.basis)?)
    }

    /// `p^k · L`
    pub fn scaled(&self, k: i64) -> Lattice {
        Lattice::from_generator_matrix(self.ctx, &self.basis.scale(&self.ctx.power(k)))
            .expect("scaling preserves rank")
    }

    pub fn complex_distance(&self, other: &Lattice) -> Result<ComplexDistance> {
        let e = snf_exponents(&self.ctx, &self.transition_to(other)?)?;
        Ok(ComplexDistance::new(e.into_iter().map(|e| -e).collect()))
    }

    /// A basis `f` with `self = ⊕ O f_j` and `other = ⊕ p^(-k_j) O f_j`,
    /// columns ordered like [`Lattice::complex_distance`].
    pub fn adapted_basis(&self, other: &Lattice) -> Result<Matrix> {
        let s = snf(&self.ctx, &self.transition_to(other)?)?;
        self.basis.try_mul(&s.left)
    }

    /// Cyclic exponents of `other/(self∩other)` and of `self/(self∩other)`.
    pub fn quotient_invariants(&self, other: &Lattice) -> Result<(Vec<i64>, Vec<i64>)> {
        let k = self.complex_distance(other)?;
        Ok((k.positive_part(), k.negative_part()))
    }

    /// `{c ∈ Q_p^j : W·c ∈ L}` in the coordinates of `W`.
    pub fn restrict_to_subspace(&self, w: &Subspace) -> Result<Lattice> {
        if w.ambient_dim() != self.n() {
            return Err(Error::Dimension(format!(
                "subspace of Q^{} in a lattice of dimension {}",
                w.ambient_dim(),
                self.n()
            )));
        }
        // W·c ∈ L  ⇔  X·c ∈ O^n with X = A⁻¹W  ⇔  c pairs integrally with
        // every row of X, so the answer is the dual of the row module.
        let x = self.basis_inverse().try_mul(w.basis())?;
        Ok(Lattice::from_generator_matrix(self.ctx, &x.transpose())?.dual())
    }

    /// Smallest `a >= 0` with `p^a O^n ⊆ L ⊆ p^(-a) O^n`.
    pub fn window_radius(&self) -> u32 {
        let bound = |m: &Matrix| match m.min_valuation(&self.ctx) {
            Valuation::Finite(v) => (-v).max(0) as u32,
            Valuation::Infinite => 0,
        };
        bound(&self.basis).max(bound(&self.basis_inverse()))
    }
}

/// `min_{v ∈ W, v ≠ 0}` of the exponent of `‖v‖_R / ‖v‖_S`.
pub fn minimax_value(r: &Lattice, s: &Lattice, w: &Subspace) -> Result<i64> {
    r.check_compatible(s)?;
    let k = r.restrict_to_subspace(w)?.complex_distance(&s.restrict_to_subspace(w)?)?;
    Ok(*k.ks().last().expect("nonempty subspace"))
}

/// `max_{v ∈ W, v ≠ 0}` of the exponent of `‖v‖_R / ‖v‖_S`.
pub fn maximin_value(r: &Lattice, s: &Lattice, w: &Subspace) -> Result<i64> {
    r.check_compatible(s)?;
    let k = r.restrict_to_subspace(w)?.complex_distance(&s.restrict_to_subspace(w)?)?;
    Ok(k.ks()[0])
}

/// Whether `x` lies in the closed interval between 0 and `bound`.
pub fn between_zero_and(x: i64, bound: i64) -> bool {
    match bound.cmp(&0) {
        Ordering::Greater => (0..=bound).contains(&x),
        Ordering::Less => (bound..=0).contains(&x),
        Ordering::Equal => x == 0,
    }
}

/// Whether `x` lies strictly between 0 and `bound`.
pub fn strictly_between_zero_and(x: i64, bound: i64) -> bool {
    (x > 0 && x < bound) || (x < 0 && x > bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn v(xs: &[&str]) -> Vec<Scalar> {
        xs.iter().map(|x| q(x)).collect()
    }

    fn two() -> PadicContext {
        PadicContext::new(2).unwrap()
    }

    fn lat(ctx: PadicContext, gens: &[&[&str]]) -> Lattice {
        let n = gens[0].len();
        let gens: Vec<Vec<Scalar>> = gens.iter().map(|g| v(g)).collect();
        Lattice::from_generators(ctx, n, &gens).unwrap()
    }

    #[test]
    fn construction() {
        let ctx = two();
        assert_eq!(lat(ctx, &[&["1", "0"], &["0", "1"]]), Lattice::standard(ctx, 2));
        let over = lat(ctx, &[&["1", "0"], &["0", "1"], &["1/2", "1/2"]]);
        let exps: i64 = (0..2).map(|i| ctx.val(&over.basis()[(i, i)])).sum();
        assert_eq!(exps, -1);
        let rank_def = Lattice::from_generators(ctx, 2, &[v(&["1", "0"])]);
        assert!(matches!(rank_def, Err(Error::Rank { expected: 2, found: 1 })));
    }

    #[test]
    fn equality() {
        let ctx = two();
        let l = lat(ctx, &[&["1", "0"], &["0", "1"]]);
        let m = lat(ctx, &[&["1", "0"], &["1", "1"]]);
        assert_eq!(l, m);
        assert!(l.equal_by_transition(&m).unwrap());
        let index_two = lat(ctx, &[&["2", "0"], &["0", "1"]]);
        assert_ne!(l, index_two);
        assert!(!l.equal_by_transition(&index_two).unwrap());
    }

    #[test]
    fn mismatched_contexts() {
        let l = Lattice::standard(two(), 2);
        let m = Lattice::standard(PadicContext::new(3).unwrap(), 2);
        assert!(matches!(l.sum(&m), Err(Error::ContextMismatch { .. })));
        let k = Lattice::standard(two(), 3);
        assert!(matches!(l.complex_distance(&k), Err(Error::Dimension(_))));
    }

    #[test]
    fn norms() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        assert_eq!(o2.norm(&v(&["2", "4"])).unwrap(), NormExponent::Finite(-1));
        let l = lat(ctx, &[&["1", "1"], &["0", "2"]]);
        assert_eq!(l.norm(&v(&["2", "2"])).unwrap(), NormExponent::Finite(-1));
        assert_eq!(l.norm(&v(&["0", "0"])).unwrap(), NormExponent::NegInfinity);
    }

    #[test]
    fn membership() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        assert!(o2.member(&v(&["1", "1"])).unwrap());
        assert!(!o2.member(&v(&["1/2", "0"])).unwrap());
        assert!(o2.member(&v(&["0", "0"])).unwrap());
        let l = lat(ctx, &[&["1/2", "0"], &["0", "1"]]);
        assert!(l.member(&v(&["1/2", "1"])).unwrap());
    }

    #[test]
    fn sums() {
        let ctx = two();
        let l = lat(ctx, &[&["1/2", "0"], &["0", "1"]]);
        let m = lat(ctx, &[&["1", "0"], &["0", "1/2"]]);
        assert_eq!(l.sum(&m).unwrap(), Lattice::diagonal(ctx, &[-1, -1]));
        assert_eq!(l.sum(&l).unwrap(), l);
        let big = lat(ctx, &[&["1/2", "1/2"], &["0", "1"]]);
        let o2 = Lattice::standard(ctx, 2);
        assert_eq!(o2.sum(&big).unwrap(), big);
        assert!(big.contains(&o2).unwrap());
    }

    #[test]
    fn duals() {
        let ctx = two();
        assert_eq!(Lattice::standard(ctx, 3).dual(), Lattice::standard(ctx, 3));
        assert_eq!(Lattice::diagonal(ctx, &[2, -1, 0]).dual(), Lattice::diagonal(ctx, &[-2, 1, 0]));
        let l = lat(ctx, &[&["1", "1"], &["0", "2"]]);
        let expected = lat(ctx, &[&["1", "0"], &["-1/2", "1/2"]]);
        assert_eq!(l.dual(), expected);
        // pairing integrality on generators, both ways
        for f in l.dual().basis().columns() {
            for x in l.basis().columns() {
                let pairing = f.iter().zip(&x).fold(Scalar::zero(), |acc, (a, b)| acc + a * b);
                assert!(ctx.is_integral(&pairing));
            }
        }
    }

    #[test]
    fn meets() {
        let ctx = two();
        let l = lat(ctx, &[&["1/2", "0"], &["0", "1"]]);
        let m = lat(ctx, &[&["1", "0"], &["0", "1/2"]]);
        assert_eq!(l.meet(&m).unwrap(), Lattice::standard(ctx, 2));
        assert_eq!(l.meet(&l).unwrap(), l);
        let o2 = Lattice::standard(ctx, 2);
        assert_eq!(o2.meet(&Lattice::diagonal(ctx, &[-1, 1])).unwrap(), Lattice::diagonal(ctx, &[0, 1]));
    }

    #[test]
    fn complex_distances() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        let s = Lattice::diagonal(ctx, &[-1, 2]);
        assert_eq!(o2.complex_distance(&s).unwrap().ks(), &[1, -2]);
        assert_eq!(s.complex_distance(&s).unwrap().ks(), &[0, 0]);
        let t = lat(ctx, &[&["1", "0"], &["1", "2"]]);
        assert_eq!(o2.complex_distance(&t).unwrap().ks(), &[0, -1]);
        assert_eq!(t.complex_distance(&o2).unwrap(), o2.complex_distance(&t).unwrap().swapped());
    }

    #[test]
    fn adapted_bases() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        let t = lat(ctx, &[&["1", "0"], &["1", "2"]]);
        for (r, s) in [(&o2, &o2), (&o2, &t), (&Lattice::diagonal(ctx, &[1, -3]), &Lattice::diagonal(ctx, &[2, 2]))] {
            let f = r.adapted_basis(s).unwrap();
            let k = r.complex_distance(s).unwrap();
            assert_eq!(Lattice::from_generator_matrix(ctx, &f).unwrap(), *r);
            let scaled: Vec<Vec<Scalar>> = f
                .columns()
                .into_iter()
                .zip(k.ks())
                .map(|(col, &kj)| col.iter().map(|x| x * &ctx.power(-kj)).collect())
                .collect();
            assert_eq!(Lattice::from_generators(ctx, 2, &scaled).unwrap(), *s);
        }
    }

    #[test]
    fn quotients() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        let m = Lattice::diagonal(ctx, &[-1, 1]);
        assert_eq!(o2.quotient_invariants(&m).unwrap(), (vec![1], vec![1]));
        assert_eq!(m.quotient_invariants(&m).unwrap(), (vec![], vec![]));
        let t = lat(ctx, &[&["1", "0"], &["1", "2"]]);
        assert_eq!(o2.quotient_invariants(&t).unwrap(), (vec![], vec![1]));
    }

    #[test]
    fn restriction() {
        let ctx = two();
        let l = Lattice::diagonal(ctx, &[1, -2, 3]);
        let axes = Subspace::new(Matrix::from_int_rows(&[&[1, 0], &[0, 1], &[0, 0]])).unwrap();
        assert_eq!(l.restrict_to_subspace(&axes).unwrap(), Lattice::diagonal(ctx, &[1, -2]));

        let full = Subspace::new(Matrix::identity(3)).unwrap();
        assert_eq!(l.restrict_to_subspace(&full).unwrap(), l);

        let o2 = Lattice::standard(ctx, 2);
        let line = Subspace::from_vectors(2, &[v(&["1", "1"])]).unwrap();
        assert_eq!(o2.restrict_to_subspace(&line).unwrap(), Lattice::standard(ctx, 1));

        let bad = Subspace::new(Matrix::from_int_rows(&[&[1, 2], &[2, 4]]));
        assert!(matches!(bad, Err(Error::Rank { .. })));
    }

    #[test]
    fn minimax_examples() {
        let ctx = two();
        let o2 = Lattice::standard(ctx, 2);
        let t = lat(ctx, &[&["1", "0"], &["1", "2"]]);
        let w = Subspace::from_vectors(2, &[v(&["1", "0"])]).unwrap();
        assert_eq!(minimax_value(&o2, &t, &w).unwrap(), 0);
        assert_eq!(minimax_value(&t, &t, &w).unwrap(), 0);
        let f = o2.adapted_basis(&t).unwrap();
        let k = o2.complex_distance(&t).unwrap();
        for j in 1..=2 {
            let w = Subspace::new(f.select_columns(&(0..j).collect::<Vec<_>>())).unwrap();
            assert_eq!(minimax_value(&o2, &t, &w).unwrap(), k.ks()[j - 1]);
        }
    }

    #[test]
    fn window_radius() {
        let ctx = two();
        assert_eq!(Lattice::standard(ctx, 2).window_radius(), 0);
        assert_eq!(Lattice::diagonal(ctx, &[2, -1]).window_radius(), 2);
        assert_eq!(Lattice::diagonal(ctx, &[-3, 0]).window_radius(), 3);
    }

    #[test]
    fn interval_helper() {
        assert!(between_zero_and(0, 3));
        assert!(between_zero_and(3, 3));
        assert!(!between_zero_and(4, 3));
        assert!(between_zero_and(-2, -2));
        assert!(!between_zero_and(1, -2));
        assert!(between_zero_and(0, 0));
        assert!(!between_zero_and(1, 0));
        assert!(strictly_between_zero_and(1, 3));
        assert!(!strictly_between_zero_and(3, 3));
        assert!(strictly_between_zero_and(-1, -2));
    }
}
