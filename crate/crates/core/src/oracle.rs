//! Brute-force ground truth for window-bounded lattices.
//!
//! A lattice `L` with `p^a O^n ⊆ L ⊆ p^-a O^n` is stored as the finite
//! subgroup `p^a L / p^2a O^n` of `(Z/p^2a)^n`, listed element by element.
//! Set operations here follow the definitions directly and never touch the
//! linear algebra in [`crate::dvr`].

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::relation::Relation;
use crate::scalar::{PadicContext, Scalar};

/// Largest group the oracle will enumerate.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    ctx: PadicContext,
    a: u32,
}

impl Window {
    pub fn new(ctx: PadicContext, a: u32) -> Self {
        Window { ctx, a }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    /// `p^2a`, the exponent of the ambient group.
    pub fn modulus(&self) -> u64 {
        self.ctx.p().pow(2 * self.a)
    }

    /// `|(Z/p^2a)^dim|`
    pub fn group_size(&self, dim: usize) -> u128 {
        (self.modulus() as u128).saturating_pow(dim as u32)
    }

    pub fn check_guard(&self, dim: usize) -> Result<()> {
        let size = self.group_size(dim);
        if size > ENUMERATION_GUARD {
            return Err(Error::WindowTooLarge { size });
        }
        Ok(())
    }

    pub fn admits(&self, l: &Lattice) -> bool {
        l.window_radius() <= self.a
    }
}

/// A subgroup of `(Z/p^2a)^dim`, elements encoded little-endian in base
/// `p^2a`.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    window: Window,
    dim: usize,
    members: Vec<bool>,
    elements: Vec<u32>,
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.window == other.window && self.dim == other.dim && self.elements == other.elements
    }
}

impl Eq for FiniteLattice {}

struct Codec {
    q: u64,
    dim: usize,
}

impl Codec {
    fn encode(&self, coords: &[u64]) -> u32 {
        coords.iter().rev().fold(0u64, |acc, &c| acc * self.q + c % self.q) as u32
    }

    fn decode(&self, mut x: u32) -> Vec<u64> {
        (0..self.dim)
            .map(|_| {
                let c = x as u64 % self.q;
                x = (x as u64 / self.q) as u32;
                c
            })
            .collect()
    }

    /// Digit-wise `x + y` without carries between coordinates.
    fn add(&self, x: u32, y: u32) -> u32 {
        let (mut x, mut y) = (x as u64, y as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.dim {
            out += ((x % self.q + y % self.q) % self.q) * place;
            x /= self.q;
            y /= self.q;
            place *= self.q;
        }
        out as u32
    }

    fn scale(&self, x: u32, k: u64) -> u32 {
        let mut x = x as u64;
        let (mut out, mut place) = (0u64, 1u64);
        let k = k % self.q;
        for _ in 0..self.dim {
            out += ((x % self.q) * k % self.q) * place;
            x /= self.q;
            place *= self.q;
        }
        out as u32
    }
}

/// Grows the subgroup `members` to `members + <x>`, one coset `S + kx` at a
/// time until `kx` falls back into `S`.
fn adjoin(codec: &Codec, members: &mut [bool], elements: &mut Vec<u32>, x: u32) {
    let base = elements.len();
    let mut multiple = x;
    while !members[multiple as usize] {
        for i in 0..base {
            let y = codec.add(elements[i], multiple);
            members[y as usize] = true;
            elements.push(y);
        }
        multiple = codec.add(multiple, x);
    }
}

impl FiniteLattice {
    fn codec(&self) -> Codec {
        Codec {
            q: self.window.modulus(),
            dim: self.dim,
        }
    }

    /// The subgroup generated by `gens` (encoded elements).
    fn generated(window: Window, dim: usize, gens: &[u32]) -> Result<Self> {
        window.check_guard(dim)?;
        let codec = Codec {
            q: window.modulus(),
            dim,
        };
        let mut members = vec![false; window.group_size(dim) as usize];
        members[0] = true;
        let mut elements = vec![0u32];
        for &g in gens {
            adjoin(&codec, &mut members, &mut elements, g);
        }
        Ok(FiniteLattice::from_members(window, dim, members))
    }

    /// Encoded generators, picked greedily in element order.
    fn generator_codes(&self) -> Vec<u32> {
        let codec = self.codec();
        let mut members = vec![false; self.members.len()];
        members[0] = true;
        let mut span = vec![0u32];
        let mut gens = Vec::new();
        for &x in &self.elements {
            if span.len() == self.elements.len() {
                break;
            }
            if !members[x as usize] {
                gens.push(x);
                adjoin(&codec, &mut members, &mut span, x);
            }
        }
        gens
    }

    fn from_members(window: Window, dim: usize, members: Vec<bool>) -> Self {
        let elements = members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i as u32)
            .collect();
        FiniteLattice {
            window,
            dim,
            members,
            elements,
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements as coordinate vectors in `[0, p^2a)`.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let codec = self.codec();
        self.elements.iter().map(|&x| codec.decode(x)).collect()
    }

    pub fn contains(&self, coords: &[u64]) -> bool {
        self.members[self.codec().encode(coords) as usize]
    }

    /// The whole group `(Z/p^2a)^dim`, image of `p^-a O^dim`.
    pub fn full(window: Window, dim: usize) -> Result<Self> {
        window.check_guard(dim)?;
        Ok(FiniteLattice::from_members(
            window,
            dim,
            vec![true; window.group_size(dim) as usize],
        ))
    }

    /// `{0}`, image of `p^a O^dim`.
    pub fn zero(window: Window, dim: usize) -> Result<Self> {
        FiniteLattice::generated(window, dim, &[])
    }

    /// Subgroup generated by explicit coordinate vectors.
    pub fn from_coords(window: Window, dim: usize, gens: &[Vec<u64>]) -> Result<Self> {
        window.check_guard(dim)?;
        let codec = Codec {
            q: window.modulus(),
            dim,
        };
        let gens: Vec<u32> = gens.iter().map(|g| codec.encode(g)).collect();
        FiniteLattice::generated(window, dim, &gens)
    }

    fn check_same(&self, other: &FiniteLattice) -> Result<()> {
        if self.window != other.window || self.dim != other.dim {
            return Err(Error::WindowMismatch(format!(
                "(a={}, dim={}) vs (a={}, dim={})",
                self.window.a, self.dim, other.window.a, other.dim
            )));
        }
        Ok(())
    }

    /// A small generating set, picked greedily in element order.
    pub fn generators(&self) -> Vec<Vec<u64>> {
        let codec = self.codec();
        self.generator_codes().into_iter().map(|g| codec.decode(g)).collect()
    }
}

fn to_residue(ctx: &PadicContext, x: &Scalar, k: i64) -> u64 {
    // x is integral here, so the representative is an integer in [0, p^k)
    let r = ctx.reduce_mod_power(x, k);
    debug_assert!(r.is_integer());
    r.numer().to_u64().expect("residue fits in u64")
}

/// Image of `p^a L` in `(Z/p^2a)^n`.
pub fn project_to_window(l: &Lattice, w: &Window) -> Result<FiniteLattice> {
    w.ctx.check_same(l.ctx())?;
    if !w.admits(l) {
        return Err(Error::WindowViolation { a: w.a });
    }
    w.check_guard(l.n())?;
    let ctx = w.ctx;
    let scale = ctx.power(w.a as i64);
    let k = 2 * w.a as i64;
    let gens: Vec<Vec<u64>> = l
        .basis()
        .columns()
        .iter()
        .map(|col| col.iter().map(|x| to_residue(&ctx, &(x * &scale), k)).collect())
        .collect();
    FiniteLattice::from_coords(*w, l.n(), &gens)
}

/// The lattice `p^-a · lift(F) + p^a O^n`.
pub fn lift_from_window(f: &FiniteLattice) -> Lattice {
    let ctx = f.window.ctx;
    let a = f.window.a as i64;
    let n = f.dim;
    let down = ctx.power(-a);
    let mut cols: Vec<Vec<Scalar>> = f
        .generators()
        .into_iter()
        .map(|g| g.into_iter().map(|c| &Scalar::from_bigint(BigInt::from(c)) * &down).collect())
        .collect();
    let floor = Matrix::identity(n).scale(&ctx.power(a));
    cols.extend(floor.columns());
    Lattice::from_generators(ctx, n, &cols).expect("contains p^a O^n")
}

pub fn oracle_sum(f: &FiniteLattice, g: &FiniteLattice) -> Result<FiniteLattice> {
    f.check_same(g)?;
    let codec = f.codec();
    let mut members = f.members.clone();
    let mut elements = f.elements.clone();
    for x in g.generator_codes() {
        adjoin(&codec, &mut members, &mut elements, x);
    }
    Ok(FiniteLattice::from_members(f.window, f.dim, members))
}

pub fn oracle_meet(f: &FiniteLattice, g: &FiniteLattice) -> Result<FiniteLattice> {
    f.check_same(g)?;
    let members = f.members.iter().zip(&g.members).map(|(a, b)| *a && *b).collect();
    Ok(FiniteLattice::from_members(f.window, f.dim, members))
}

/// Cyclic exponents of the finite group `big / small` (`small ⊆ big`), found
/// by counting elements killed by `p^i` modulo `small`.
fn quotient_partition(big: &FiniteLattice, small: &FiniteLattice) -> Vec<i64> {
    let codec = big.codec();
    let p = big.window.ctx.p();
    let max_level = 2 * big.window.a;
    // log_p #{x ∈ big/small : p^i x = 0}
    let log_counts: Vec<i64> = (0..=max_level)
        .map(|i| {
            let pi = p.pow(i);
            let hits = big
                .elements
                .iter()
                .filter(|&&x| small.members[codec.scale(x, pi) as usize])
                .count();
            ilog(hits / small.len(), p)
        })
        .collect();
    // number of cyclic factors of order >= p^i
    let at_least: Vec<i64> = (1..=max_level as usize)
        .map(|i| log_counts[i] - log_counts[i - 1])
        .chain(std::iter::once(0))
        .collect();
    let mut parts = Vec::new();
    for i in (1..=max_level as usize).rev() {
        let exact = at_least[i - 1] - at_least[i];
        parts.extend(std::iter::repeat(i as i64).take(exact as usize));
    }
    parts
}

fn ilog(mut x: usize, p: u64) -> i64 {
    let mut k = 0;
    while x > 1 {
        debug_assert_eq!(x as u64 % p, 0);
        x /= p as usize;
        k += 1;
    }
    k
}

/// `(pos, neg)`: cyclic exponents of `G/(F∩G)` and `F/(F∩G)`, largest first.
pub fn oracle_group_invariants(f: &FiniteLattice, g: &FiniteLattice) -> Result<(Vec<i64>, Vec<i64>)> {
    let common = oracle_meet(f, g)?;
    Ok((quotient_partition(g, &common), quotient_partition(f, &common)))
}

/// Complex distance `k(F, G)` assembled from the quotient invariants.
pub fn oracle_complex_distance(f: &FiniteLattice, g: &FiniteLattice) -> Result<Vec<i64>> {
    let (pos, neg) = oracle_group_invariants(f, g)?;
    let zeros = f.dim - pos.len() - neg.len();
    let mut k = pos;
    k.extend(std::iter::repeat(0).take(zeros));
    k.extend(neg.iter().rev().map(|e| -e));
    Ok(k)
}

/// `{w : ∃ v ∈ R, (v, w) ∈ H}` by enumeration of `H`.
pub fn oracle_act(h: &FiniteLattice, r: &FiniteLattice) -> Result<FiniteLattice> {
    if h.window != r.window || h.dim != 2 * r.dim {
        return Err(Error::WindowMismatch("relation and lattice windows differ".into()));
    }
    let half = r.window.group_size(r.dim) as u32;
    let mut members = vec![false; half as usize];
    for &x in &h.elements {
        let (v, w) = (x % half, x / half);
        if r.members[v as usize] {
            members[w as usize] = true;
        }
    }
    Ok(FiniteLattice::from_members(r.window, r.dim, members))
}

/// `{(v, y) : ∃ w, (v, w) ∈ H, (w, y) ∈ G}` by enumeration.
pub fn oracle_compose(g: &FiniteLattice, h: &FiniteLattice) -> Result<FiniteLattice> {
    g.check_same(h)?;
    let n = h.dim / 2;
    let half = h.window.group_size(n) as u32;
    let mut by_middle: HashMap<u32, Vec<u32>> = HashMap::new();
    for &x in &g.elements {
        by_middle.entry(x % half).or_default().push(x / half);
    }
    let mut members = vec![false; h.members.len()];
    for &x in &h.elements {
        let (v, w) = (x % half, x / half);
        if let Some(ys) = by_middle.get(&w) {
            for &y in ys {
                members[(v + half * y) as usize] = true;
            }
        }
    }
    Ok(FiniteLattice::from_members(h.window, h.dim, members))
}

/// Window image of a relation's carrier.
pub fn project_relation(h: &Relation, w: &Window) -> Result<FiniteLattice> {
    project_to_window(h.carrier(), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(p: u64, a: u32) -> Window {
        Window::new(PadicContext::new(p).unwrap(), a)
    }

    #[test]
    fn projections() {
        let w = window(2, 1);
        let ctx = *w.ctx();
        let o2 = project_to_window(&Lattice::standard(ctx, 2), &w).unwrap();
        assert_eq!(o2.len(), 4);
        assert!(o2.elements().iter().all(|e| e.iter().all(|c| c % 2 == 0)));
        let full = project_to_window(&Lattice::diagonal(ctx, &[-1, -1]), &w).unwrap();
        assert_eq!(full, FiniteLattice::full(w, 2).unwrap());
        let small = project_to_window(&Lattice::diagonal(ctx, &[1]), &w).unwrap();
        assert_eq!(small.elements(), vec![vec![0]]);
    }

    #[test]
    fn window_violation() {
        let w = window(2, 1);
        let l = Lattice::diagonal(*w.ctx(), &[2]);
        assert_eq!(project_to_window(&l, &w), Err(Error::WindowViolation { a: 1 }));
    }

    #[test]
    fn guard() {
        let w = window(3, 2);
        assert!(matches!(FiniteLattice::full(w, 4), Err(Error::WindowTooLarge { .. })));
        assert!(FiniteLattice::full(w, 2).is_ok());
    }

    #[test]
    fn sums_and_meets() {
        let w = window(2, 1);
        let f = project_to_window(&Lattice::standard(*w.ctx(), 1), &w).unwrap();
        let full = FiniteLattice::full(w, 1).unwrap();
        assert_eq!(f.elements(), vec![vec![0], vec![2]]);
        assert_eq!(oracle_sum(&f, &full).unwrap(), full);
        assert_eq!(oracle_meet(&f, &f).unwrap(), f);
        assert_eq!(oracle_meet(&f, &full).unwrap(), f);
        let other = window(2, 2);
        assert!(matches!(
            oracle_sum(&f, &FiniteLattice::full(other, 1).unwrap()),
            Err(Error::WindowMismatch(_))
        ));
    }

    #[test]
    fn group_invariants() {
        let w = window(2, 1);
        let ctx = *w.ctx();
        let f = project_to_window(&Lattice::standard(ctx, 1), &w).unwrap();
        assert_eq!(oracle_group_invariants(&f, &f).unwrap(), (vec![], vec![]));
        let g = project_to_window(&Lattice::diagonal(ctx, &[-1]), &w).unwrap();
        assert_eq!(oracle_group_invariants(&f, &g).unwrap(), (vec![1], vec![]));

        let o2 = project_to_window(&Lattice::standard(ctx, 2), &w).unwrap();
        let t = Lattice::from_generator_matrix(ctx, &Matrix::from_int_rows(&[&[1, 1], &[0, 2]])).unwrap();
        let t = project_to_window(&t, &w).unwrap();
        assert_eq!(oracle_group_invariants(&o2, &t).unwrap(), (vec![], vec![1]));
        assert_eq!(oracle_complex_distance(&o2, &t).unwrap(), vec![0, -1]);
    }

    #[test]
    fn mixed_partitions() {
        // (Z/p^2a)^2 over p^a·diag(1, p^2)·O: quotient Z/4 ⊕ Z/16 over {0}
        let w = window(2, 2);
        let ctx = *w.ctx();
        let l = project_to_window(&Lattice::diagonal(ctx, &[0, -2]), &w).unwrap();
        let zero = FiniteLattice::zero(w, 2).unwrap();
        assert_eq!(oracle_group_invariants(&zero, &l).unwrap(), (vec![4, 2], vec![]));
    }

    #[test]
    fn actions() {
        let w = window(2, 2);
        let ctx = *w.ctx();
        let full2 = FiniteLattice::full(w, 2).unwrap();
        let o1 = project_to_window(&Lattice::standard(ctx, 1), &w).unwrap();
        assert_eq!(oracle_act(&full2, &o1).unwrap(), FiniteLattice::full(w, 1).unwrap());

        let f = project_to_window(&Lattice::diagonal(ctx, &[1]), &w).unwrap();
        let g = project_to_window(&Lattice::diagonal(ctx, &[-1]), &w).unwrap();
        let box_fg = project_relation(
            &Relation::block_diagonal(&Lattice::diagonal(ctx, &[1]), &Lattice::diagonal(ctx, &[-1])).unwrap(),
            &w,
        )
        .unwrap();
        assert_eq!(oracle_act(&box_fg, &f).unwrap(), g);

        let band = Relation::from_generators(
            ctx,
            1,
            &[vec![Scalar::from_int(1), Scalar::from_int(1)], vec![Scalar::zero(), Scalar::from_int(4)]],
        )
        .unwrap();
        let band_f = project_relation(&band, &w).unwrap();
        assert_eq!(oracle_act(&band_f, &o1).unwrap(), o1);
        assert_eq!(oracle_compose(&band_f, &band_f).unwrap(), band_f);
        assert_eq!(oracle_compose(&full2, &full2).unwrap(), full2);
    }

    #[test]
    fn lifts() {
        let w = window(3, 1);
        assert_eq!(lift_from_window(&FiniteLattice::zero(w, 2).unwrap()), Lattice::diagonal(*w.ctx(), &[1, 1]));
        assert_eq!(lift_from_window(&FiniteLattice::full(w, 2).unwrap()), Lattice::diagonal(*w.ctx(), &[-1, -1]));
        let f = FiniteLattice::from_coords(w, 2, &[vec![1, 3], vec![0, 6]]).unwrap();
        assert_eq!(project_to_window(&lift_from_window(&f), &w).unwrap(), f);
    }
}
