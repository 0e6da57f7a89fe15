//! The Nazarov semigroup `Γ_n`: lattices in `Q_p^n ⊕ Q_p^n` read as
//! relations from the first block (source) to the second (target).

use crate::dvr::{integral_preimage, kernel_sublattice};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::scalar::{PadicContext, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    carrier: Lattice,
}

impl Relation {
    pub fn new(carrier: Lattice) -> Result<Self> {
        if carrier.n() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "relation carrier must have even dimension, got {}",
                carrier.n()
            )));
        }
        Ok(Relation {
            n: carrier.n() / 2,
            carrier,
        })
    }

    /// Generators are vectors of length `2n`, source coordinates first.
    pub fn from_generators(ctx: PadicContext, n: usize, gens: &[Vec<Scalar>]) -> Result<Self> {
        Relation::new(Lattice::from_generators(ctx, 2 * n, gens)?)
    }

    /// `L ⊕ M`
    pub fn block_diagonal(source: &Lattice, target: &Lattice) -> Result<Self> {
        source.check_compatible(target)?;
        let basis = source.basis().block_diag(target.basis());
        Relation::new(Lattice::from_generator_matrix(*source.ctx(), &basis)?)
    }

    /// `O^n ⊕ O^n`
    pub fn standard(ctx: PadicContext, n: usize) -> Self {
        Relation {
            n,
            carrier: Lattice::standard(ctx, 2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> &PadicContext {
        self.carrier.ctx()
    }

    pub fn carrier(&self) -> &Lattice {
        &self.carrier
    }

    fn check_compatible(&self, other: &Relation) -> Result<()> {
        self.carrier.check_compatible(&other.carrier)
    }

    fn check_operand(&self, r: &Lattice) -> Result<()> {
        self.ctx().check_same(r.ctx())?;
        if r.n() != self.n {
            return Err(Error::Dimension(format!(
                "relation on dimension {} applied to a lattice of dimension {}",
                self.n,
                r.n()
            )));
        }
        Ok(())
    }

    fn source_rows(&self) -> Matrix {
        self.carrier.basis().select_rows(0..self.n)
    }

    fn target_rows(&self) -> Matrix {
        self.carrier.basis().select_rows(self.n..2 * self.n)
    }

    /// Projection of the carrier to the source block.
    pub fn dom(&self) -> Lattice {
        Lattice::from_generator_matrix(*self.ctx(), &self.source_rows()).expect("carrier is open")
    }

    /// Projection of the carrier to the target block.
    pub fn im(&self) -> Lattice {
        Lattice::from_generator_matrix(*self.ctx(), &self.target_rows()).expect("carrier is open")
    }

    /// `H ∩ (Q^n ⊕ 0)`, in source coordinates.
    pub fn ker(&self) -> Lattice {
        self.block_intersection(self.n..2 * self.n, 0..self.n)
    }

    /// `H ∩ (0 ⊕ Q^n)`, in target coordinates.
    pub fn indef(&self) -> Lattice {
        self.block_intersection(0..self.n, self.n..2 * self.n)
    }

    fn block_intersection(
        &self,
        vanishing: std::ops::Range<usize>,
        kept: std::ops::Range<usize>,
    ) -> Lattice {
        let n = self.n;
        let mut proj = Matrix::zeros(n, 2 * n);
        for (k, i) in vanishing.enumerate() {
            proj[(k, i)] = Scalar::one();
        }
        let k = kernel_sublattice(self.ctx(), &proj, self.carrier.basis()).expect("square carrier");
        Lattice::from_generator_matrix(*self.ctx(), &k.select_rows(kept)).expect("carrier is open")
    }

    /// `H·R = {w : ∃ v ∈ R, (v, w) ∈ H}`
    pub fn act(&self, r: &Lattice) -> Result<Lattice> {
        self.check_operand(r)?;
        let bounding = r.basis().block_diag(self.im().basis());
        let slab = Lattice::from_generator_matrix(*self.ctx(), &bounding)?;
        let cut = self.carrier.meet(&slab)?;
        Lattice::from_generator_matrix(*self.ctx(), &cut.basis().select_rows(self.n..2 * self.n))
    }

    /// Whether `ker ⊕ indef ⊆ H ⊆ dom ⊕ im`.
    pub fn sandwich_holds(&self) -> bool {
        let inner = Relation::block_diagonal(&self.ker(), &self.indef()).expect("same context");
        let outer = Relation::block_diagonal(&self.dom(), &self.im()).expect("same context");
        self.carrier.contains(&inner.carrier).unwrap_or(false)
            && outer.carrier.contains(&self.carrier).unwrap_or(false)
    }

    /// An invertible `g` inducing the isomorphism `Dom/Ker → Im/Indef`
    /// carried by `H`, so that `g·Dom = Im` and `g·Ker = Indef`.
    pub fn structure_map(&self) -> Matrix {
        let ctx = *self.ctx();
        let n = self.n;
        let (dom, ker, im, indef) = (self.dom(), self.ker(), self.im(), self.indef());

        // Dom = ⊕ O f_i and Ker = ⊕ p^a_i O f_i with a ascending; the same
        // for (Im, Indef).
        let f = dom.adapted_basis(&ker).expect("same context");
        let a: Vec<i64> = dom.complex_distance(&ker).expect("same context").ks().iter().map(|k| -k).collect();
        let f_img = im.adapted_basis(&indef).expect("same context");
        let b: Vec<i64> = im.complex_distance(&indef).expect("same context").ks().iter().map(|k| -k).collect();
        assert_eq!(a, b, "Dom/Ker and Im/Indef must be isomorphic");

        // w_i with (f_i, w_i) ∈ H, written in the f' basis.
        let top = self.source_rows();
        let bottom = self.target_rows();
        let f_img_inv = f_img.inverse().expect("basis");
        let mut lifted = Matrix::identity(n);
        for i in 0..n {
            let x = integral_preimage(&ctx, &top, &f.column(i))
                .expect("full row rank")
                .expect("adapted basis lies in Dom");
            let w = bottom.mul_vec(&x).expect("shape");
            let coords = f_img_inv.mul_vec(&w).expect("shape");
            for (k, c) in coords.into_iter().enumerate() {
                if a[k] > 0 {
                    lifted[(k, i)] = c;
                }
            }
        }
        // Rows with a_k = 0 stay those of the identity; modulo p the matrix
        // is block triangular with the invertible σ-block, so it is
        // unimodular and so is diag(p^-a)·X·diag(p^a).
        let g = f_img
            .try_mul(&lifted)
            .and_then(|m| m.try_mul(&f.inverse().expect("basis")))
            .expect("square");
        debug_assert_eq!(dom.transform(&g).unwrap(), im);
        debug_assert_eq!(ker.transform(&g).unwrap(), indef);
        g
    }

    /// `H·L = g·(L ∩ Dom H) + Indef H` with `g` the structure map.
    pub fn decomposition_identity(&self, l: &Lattice) -> Result<bool> {
        self.check_operand(l)?;
        let g = self.structure_map();
        let rhs = l.meet(&self.dom())?.transform(&g)?.sum(&self.indef())?;
        Ok(self.act(l)? == rhs)
    }
}

/// The product `G·H`: first `H: V ⇉ W`, then `G: W ⇉ Y`.
pub fn compose(g: &Relation, h: &Relation) -> Result<Relation> {
    g.check_compatible(h)?;
    let n = h.n;
    let ctx = *h.ctx();
    // blocks V, W, Y
    let first = h.carrier.basis().block_diag(g.im().basis());
    let second = h.dom().basis().block_diag(g.carrier.basis());
    let p1 = Lattice::from_generator_matrix(ctx, &first)?;
    let p2 = Lattice::from_generator_matrix(ctx, &second)?;
    let both = p1.meet(&p2)?;
    let basis = both.basis();
    let mut proj = Matrix::zeros(2 * n, 3 * n);
    for j in 0..3 * n {
        for i in 0..n {
            proj[(i, j)] = basis[(i, j)].clone();
            proj[(n + i, j)] = basis[(2 * n + i, j)].clone();
        }
    }
    Relation::new(Lattice::from_generator_matrix(ctx, &proj)?)
}

/// `G·H` through the kernel of the map matching the middle blocks.
pub fn compose_via_kernel(g: &Relation, h: &Relation) -> Result<Relation> {
    g.check_compatible(h)?;
    let n = h.n;
    let ctx = *h.ctx();
    // coefficients (x, y) with W(A_H x) = V(A_G y)
    let a = h.carrier.basis().block_diag(g.carrier.basis());
    let mut matching = Matrix::zeros(n, 4 * n);
    for i in 0..n {
        matching[(i, n + i)] = Scalar::one();
        matching[(i, 2 * n + i)] = -Scalar::one();
    }
    let k = kernel_sublattice(&ctx, &matching, &a)?;
    let mut proj = Matrix::zeros(2 * n, k.cols());
    for j in 0..k.cols() {
        for i in 0..n {
            proj[(i, j)] = k[(i, j)].clone();
            proj[(n + i, j)] = k[(3 * n + i, j)].clone();
        }
    }
    Relation::new(Lattice::from_generator_matrix(ctx, &proj)?)
}

/// `Z_j = span_O{p^-j (e_i, g e_i)} + p^j O^2n`, which tends to the graph of
/// `g` as `j` grows.
pub fn graph_approx(ctx: PadicContext, g: &Matrix, j: i64) -> Result<Relation> {
    if !g.is_square() {
        return Err(Error::Dimension("graph of a non-square matrix".into()));
    }
    let n = g.rows();
    let rank = g.rank();
    if rank < n {
        return Err(Error::Rank {
            expected: n,
            found: rank,
        });
    }
    let mut graph = Matrix::zeros(2 * n, n);
    graph.set_block(0, 0, &Matrix::identity(n));
    graph.set_block(n, 0, g);
    let gens = graph
        .scale(&ctx.power(-j))
        .hstack(&Matrix::identity(2 * n).scale(&ctx.power(j)))?;
    Relation::new(Lattice::from_generator_matrix(ctx, &gens)?)
}

/// A `j` from which on `act(graph_approx(g, j), r) = g·r`:
/// `window(r) + max(0, -minval(g), -minval(g⁻¹))`.
pub fn graph_threshold(g: &Matrix, r: &Lattice) -> Result<i64> {
    let ctx = r.ctx();
    let spread = |m: &Matrix| match m.min_valuation(ctx) {
        Valuation::Finite(v) => (-v).max(0),
        Valuation::Infinite => 0,
    };
    let g_inv = g.inverse()?;
    Ok(r.window_radius() as i64 + spread(g).max(spread(&g_inv)))
}
