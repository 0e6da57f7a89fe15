//! Randomized property harnesses: the compression theorem, the supporting
//! lemmas, semigroup laws, and agreement with the finite oracle.
//!
//! Each harness runs independent trials in parallel, one seeded stream per
//! trial, and reports the violation count together with the first failing
//! instance (lowest trial index) serialized in full.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dvr::{hnf_canonical, snf_exponents};
use crate::error::Result;
use crate::json::{lattice_json, matrix_json, relation_json};
use crate::lattice::{between_zero_and, maximin_value, minimax_value, strictly_between_zero_and, Lattice, Subspace};
use crate::matrix::Matrix;
use crate::oracle::{
    oracle_act, oracle_complex_distance, oracle_compose, oracle_meet, oracle_sum, project_relation,
    project_to_window, Window,
};
use crate::random::{
    random_invertible, random_lattice, random_relation, random_subspace, random_unimodular, random_vector,
    trial_rng, RandomSpec,
};
use crate::relation::{compose, compose_via_kernel, graph_approx, graph_threshold};
use crate::scalar::{PadicContext, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub trials: u64,
    pub violations: u64,
    #[serde(skip_serializing_if = "is_zero")]
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_compressions: Option<u64>,
    pub first_counterexample: Option<Value>,
}

fn is_zero(x: &u64) -> bool {
    *x == 0
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Outcome of a single trial.
#[derive(Debug, Default)]
pub struct Trial {
    pub counterexample: Option<Value>,
    pub strict: bool,
    pub skipped: bool,
}

impl Trial {
    fn check(holds: bool, witness: impl FnOnce() -> Value) -> Self {
        Trial {
            counterexample: (!holds).then(witness),
            ..Trial::default()
        }
    }

    fn skip() -> Self {
        Trial {
            skipped: true,
            ..Trial::default()
        }
    }

    fn from_result(r: Result<Trial>) -> Self {
        r.unwrap_or_else(|e| Trial {
            counterexample: Some(json!({ "error": e.to_string() })),
            ..Trial::default()
        })
    }
}

/// Runs `trials` independent trials of `body` and folds them into a report.
pub fn run_trials<F>(name: &str, seed: u64, trials: u64, body: F) -> Report
where
    F: Fn(&mut ChaCha8Rng) -> Result<Trial> + Sync,
{
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| Trial::from_result(body(&mut trial_rng(seed, i))))
        .collect();
    let violations = outcomes.iter().filter(|t| t.counterexample.is_some()).count() as u64;
    let skipped = outcomes.iter().filter(|t| t.skipped).count() as u64;
    let strict = outcomes.iter().filter(|t| t.strict).count() as u64;
    let first = outcomes
        .iter()
        .enumerate()
        .find_map(|(i, t)| t.counterexample.clone().map(|c| json!({ "trial": i, "seed": seed, "instance": c })));
    Report {
        name: name.to_string(),
        trials,
        violations,
        skipped,
        strict_compressions: Some(strict).filter(|&s| s > 0),
        first_counterexample: first,
    }
}

fn context(spec: &RandomSpec) -> PadicContext {
    PadicContext::new(spec.p).expect("harness called with a prime")
}

/// Compression: `k_j(HR, HS)` lies between 0 and `k_j(R, S)` for every `j`.
pub fn check_theorem(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    let mut report = run_trials("theorem", spec.seed, spec.trials, |rng| {
        let h = random_relation(&ctx, n, b, rng);
        let r = random_lattice(&ctx, n, b, rng);
        let s = random_lattice(&ctx, n, b, rng);
        let before = r.complex_distance(&s)?;
        let after = h.act(&r)?.complex_distance(&h.act(&s)?)?;
        let pairs = || before.ks().iter().zip(after.ks());
        let holds = pairs().all(|(&k, &k2)| between_zero_and(k2, k));
        let mut t = Trial::check(holds, || {
            json!({
                "H": relation_json(&h), "R": lattice_json(&r), "S": lattice_json(&s),
                "k_RS": before, "k_HR_HS": after,
            })
        });
        t.strict = pairs().any(|(&k, &k2)| strictly_between_zero_and(k2, k));
        Ok(t)
    });
    report.strict_compressions.get_or_insert(0);
    report
}

/// Minimax characterization: sampled subspaces never beat `k_j`, and the
/// adapted subspaces attain it; likewise for the codimension form.
pub fn check_minimax(spec: &RandomSpec, samples: usize) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("minimax", spec.seed, spec.trials, |rng| {
        let r = random_lattice(&ctx, n, b, rng);
        let s = random_lattice(&ctx, n, b, rng);
        let k = r.complex_distance(&s)?;
        let f = r.adapted_basis(&s)?;
        let mut bad = Vec::new();
        for _ in 0..samples {
            let j = rng.gen_range(1..=n);
            let w = random_subspace(&ctx, n, j, rng);
            if minimax_value(&r, &s, &w)? > k.ks()[j - 1] {
                bad.push(json!({ "form": "max-min", "j": j, "W": matrix_json(&ctx, w.basis()) }));
            }
            let wc = random_subspace(&ctx, n, n - j + 1, rng);
            if maximin_value(&r, &s, &wc)? < k.ks()[j - 1] {
                bad.push(json!({ "form": "min-max", "j": j, "W": matrix_json(&ctx, wc.basis()) }));
            }
        }
        for j in 1..=n {
            let head = Subspace::new(f.select_columns(&(0..j).collect::<Vec<_>>()))?;
            if minimax_value(&r, &s, &head)? != k.ks()[j - 1] {
                bad.push(json!({ "form": "attain max-min", "j": j }));
            }
            let tail = Subspace::new(f.select_columns(&(j - 1..n).collect::<Vec<_>>()))?;
            if maximin_value(&r, &s, &tail)? != k.ks()[j - 1] {
                bad.push(json!({ "form": "attain min-max", "j": j }));
            }
        }
        Ok(Trial::check(bad.is_empty(), || {
            json!({ "R": lattice_json(&r), "S": lattice_json(&s), "k": k, "failures": bad })
        }))
    })
}

/// Largest window radius `<= bound` whose group of dimension `dim` passes
/// the enumeration guard.
pub fn fitting_window(ctx: PadicContext, bound: u32, dim: usize) -> Option<Window> {
    (0..=bound)
        .rev()
        .map(|a| Window::new(ctx, a))
        .find(|w| w.check_guard(dim).is_ok())
}

/// Quotient invariants against element-order counting in the window.
pub fn check_quotient_invariants(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let n = spec.n;
    let window = fitting_window(ctx, spec.bound, n);
    run_trials("quotient_invariants", spec.seed, spec.trials, |rng| {
        let Some(w) = window else { return Ok(Trial::skip()) };
        let l = random_lattice(&ctx, n, w.a(), rng);
        let m = random_lattice(&ctx, n, w.a(), rng);
        let k = l.complex_distance(&m)?;
        let oracle = oracle_complex_distance(&project_to_window(&l, &w)?, &project_to_window(&m, &w)?)?;
        Ok(Trial::check(k.ks() == oracle.as_slice(), || {
            json!({ "L": lattice_json(&l), "M": lattice_json(&m), "k": k, "oracle": oracle })
        }))
    })
}

/// Duality: involution, `k(L,M) = k(M^□, L^□)`, and both De Morgan laws.
pub fn check_duality(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("duality", spec.seed, spec.trials, |rng| {
        let l = random_lattice(&ctx, n, b, rng);
        let m = random_lattice(&ctx, n, b, rng);
        let (ld, md) = (l.dual(), m.dual());
        let checks = [
            ("involution", ld.dual() == l),
            ("distance", l.complex_distance(&m)? == md.complex_distance(&ld)?),
            ("dual of sum", l.sum(&m)?.dual() == ld.meet(&md)?),
            ("dual of meet", l.meet(&m)?.dual() == ld.sum(&md)?),
        ];
        let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        Ok(Trial::check(failed.is_empty(), || {
            json!({ "L": lattice_json(&l), "M": lattice_json(&m), "failed": failed })
        }))
    })
}

fn triple(ctx: &PadicContext, spec: &RandomSpec, rng: &mut ChaCha8Rng) -> (Lattice, Lattice, Lattice) {
    (
        random_lattice(ctx, spec.n, spec.bound, rng),
        random_lattice(ctx, spec.n, spec.bound, rng),
        random_lattice(ctx, spec.n, spec.bound, rng),
    )
}

fn triple_json(l: &Lattice, m: &Lattice, n: &Lattice) -> Value {
    json!({ "L": lattice_json(l), "M": lattice_json(m), "N": lattice_json(n) })
}

/// `k_j(L∩M, L∩N)` lies between 0 and `k_j(M, N)`.
pub fn check_meet_monotone(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    run_trials("meet_monotone", spec.seed, spec.trials, |rng| {
        let (l, m, n) = triple(&ctx, spec, rng);
        let outer = m.complex_distance(&n)?;
        let inner = l.meet(&m)?.complex_distance(&l.meet(&n)?)?;
        let holds = outer.ks().iter().zip(inner.ks()).all(|(&k, &k2)| between_zero_and(k2, k));
        Ok(Trial::check(holds, || triple_json(&l, &m, &n)))
    })
}

/// `‖v‖_{L∩M} / ‖v‖_{L∩N}` lies between 1 and `‖v‖_M / ‖v‖_N`.
pub fn check_norm_ratio(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    run_trials("norm_ratio", spec.seed, spec.trials, |rng| {
        let (l, m, n) = triple(&ctx, spec, rng);
        let v = random_vector(&ctx, spec.n, rng);
        let exp = |lat: &Lattice| -> Result<i64> { Ok(lat.norm(&v)?.finite().expect("v is nonzero")) };
        let inner = exp(&l.meet(&m)?)? - exp(&l.meet(&n)?)?;
        let outer = exp(&m)? - exp(&n)?;
        Ok(Trial::check(between_zero_and(inner, outer), || {
            let mut c = triple_json(&l, &m, &n);
            c["v"] = json!(v);
            c
        }))
    })
}

/// `k_j(L+M, L+N)` lies between 0 and `k_j(M, N)`.
pub fn check_sum_monotone(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    run_trials("sum_monotone", spec.seed, spec.trials, |rng| {
        let (l, m, n) = triple(&ctx, spec, rng);
        let outer = m.complex_distance(&n)?;
        let inner = l.sum(&m)?.complex_distance(&l.sum(&n)?)?;
        let holds = outer.ks().iter().zip(inner.ks()).all(|(&k, &k2)| between_zero_and(k2, k));
        Ok(Trial::check(holds, || triple_json(&l, &m, &n)))
    })
}

/// `H·L = g(L ∩ Dom) + Indef`, `k(Dom, Ker) = k(Im, Indef)`, and
/// `Ker ⊕ Indef ⊆ H ⊆ Dom ⊕ Im`.
pub fn check_decomposition(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("decomposition", spec.seed, spec.trials, |rng| {
        let h = random_relation(&ctx, n, b, rng);
        let l = random_lattice(&ctx, n, b, rng);
        let identity = h.decomposition_identity(&l)?;
        let quotients = h.dom().complex_distance(&h.ker())? == h.im().complex_distance(&h.indef())?;
        let sandwich = h.sandwich_holds();
        Ok(Trial::check(identity && quotients && sandwich, || {
            json!({
                "H": relation_json(&h), "L": lattice_json(&l),
                "identity": identity, "quotients": quotients, "sandwich": sandwich,
            })
        }))
    })
}

/// Associativity of composition and `(G·H)·R = G·(H·R)`; also cross-checks
/// composition against the kernel-based route.
pub fn check_semigroup(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("semigroup", spec.seed, spec.trials, |rng| {
        let f = random_relation(&ctx, n, b, rng);
        let g = random_relation(&ctx, n, b, rng);
        let h = random_relation(&ctx, n, b, rng);
        let r = random_lattice(&ctx, n, b, rng);
        let gh = compose(&g, &h)?;
        let assoc = compose(&f, &gh)? == compose(&compose(&f, &g)?, &h)?;
        let action = gh.act(&r)? == g.act(&h.act(&r)?)?;
        let routes = compose_via_kernel(&g, &h)? == gh;
        Ok(Trial::check(assoc && action && routes, || {
            json!({
                "F": relation_json(&f), "G": relation_json(&g), "H": relation_json(&h), "R": lattice_json(&r),
                "associative": assoc, "action": action, "routes_agree": routes,
            })
        }))
    })
}

/// `act(graph_approx(g, j), R) = g·R` for `j` from the threshold on.
pub fn check_graph_approx(spec: &RandomSpec, extra_steps: i64) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("graph_approx", spec.seed, spec.trials, |rng| {
        let g = random_invertible(&ctx, n, b, rng);
        let r = random_lattice(&ctx, n, b, rng);
        let target = r.transform(&g)?;
        let t = graph_threshold(&g, &r)?;
        let mut results = Vec::new();
        for j in t..=t + extra_steps {
            results.push(graph_approx(ctx, &g, j)?.act(&r)?);
        }
        let holds = results.iter().all(|x| *x == target);
        Ok(Trial::check(holds, || {
            json!({ "g": matrix_json(&ctx, &g), "R": lattice_json(&r), "threshold": t })
        }))
    })
}

fn random_rational_matrix(ctx: &PadicContext, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let x = Scalar::new(rng.gen_range(-12..=12), rng.gen_range(1..=6)).expect("nonzero");
            m[(i, j)] = &x * &ctx.power(rng.gen_range(-2..=2));
        }
    }
    m
}

/// Canonical form idempotence and unimodular invariance; Smith exponents
/// invariant and summing to the determinant valuation.
pub fn check_canonical_forms(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let n = spec.n;
    run_trials("canonical_forms", spec.seed, spec.trials, |rng| {
        let m = loop {
            let m = random_rational_matrix(&ctx, n, n, rng);
            if m.rank() == n {
                break m;
            }
        };
        let u = random_unimodular(&ctx, n, spec.bound, rng);
        let u2 = random_unimodular(&ctx, n, spec.bound, rng);
        let h = hnf_canonical(&ctx, &m)?;
        let e = snf_exponents(&ctx, &m)?;
        let det = m.determinant()?;
        let checks = [
            ("idempotent", hnf_canonical(&ctx, &h)? == h),
            ("column invariance", hnf_canonical(&ctx, &(&m * &u))? == h),
            ("snf invariance", snf_exponents(&ctx, &(&(&u * &m) * &u2))? == e),
            ("snf sum", ctx.valuation(&det) == Valuation::Finite(e.iter().sum())),
        ];
        let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        Ok(Trial::check(failed.is_empty(), || {
            json!({ "M": matrix_json(&ctx, &m), "U": matrix_json(&ctx, &u), "failed": failed })
        }))
    })
}

/// Equality three ways, antisymmetry and GL-invariance of the distance.
pub fn check_lattice_laws(spec: &RandomSpec) -> Report {
    let ctx = context(spec);
    let (n, b) = (spec.n, spec.bound);
    run_trials("lattice_laws", spec.seed, spec.trials, |rng| {
        let r = random_lattice(&ctx, n, b, rng);
        // sometimes a re-generated copy of r, to exercise the equal branch
        let s = if rng.gen_bool(0.3) {
            let u = random_unimodular(&ctx, n, b, rng);
            Lattice::from_generator_matrix(ctx, &(r.basis() * &u))?
        } else {
            random_lattice(&ctx, n, b, rng)
        };
        let g = random_invertible(&ctx, n, b, rng);
        let k = r.complex_distance(&s)?;
        let structural = r == s;
        let transition = r.equal_by_transition(&s)?;
        let checks = [
            ("equality agreement", structural == transition),
            ("antisymmetry", s.complex_distance(&r)? == k.swapped()),
            ("gl invariance", r.transform(&g)?.complex_distance(&s.transform(&g)?)? == k),
        ];
        let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        Ok(Trial::check(failed.is_empty(), || {
            json!({ "R": lattice_json(&r), "S": lattice_json(&s), "g": matrix_json(&ctx, &g), "failed": failed })
        }))
    })
}

/// Every lemma-level harness, as run by `check-lemmas`.
pub fn check_lemmas(spec: &RandomSpec) -> Vec<Report> {
    vec![
        check_minimax(spec, 10),
        check_quotient_invariants(spec),
        check_duality(spec),
        check_meet_monotone(spec),
        check_norm_ratio(spec),
        check_sum_monotone(spec),
        check_decomposition(spec),
        check_semigroup(spec),
        check_graph_approx(spec, 2),
        check_canonical_forms(spec),
        check_lattice_laws(spec),
    ]
}

/// Which operations to compare against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOp {
    Sum,
    Meet,
    Act,
    Compose,
    Distance,
}

impl OracleOp {
    pub const ALL: [OracleOp; 5] = [OracleOp::Sum, OracleOp::Meet, OracleOp::Act, OracleOp::Compose, OracleOp::Distance];

    pub fn name(self) -> &'static str {
        match self {
            OracleOp::Sum => "oracle_sum",
            OracleOp::Meet => "oracle_meet",
            OracleOp::Act => "oracle_act",
            OracleOp::Compose => "oracle_compose",
            OracleOp::Distance => "oracle_distance",
        }
    }
}

/// Compares one lattice-level operation with its brute-force counterpart on
/// random instances inside the window of radius `a`.
pub fn oracle_diff_op(spec: &RandomSpec, a: u32, op: OracleOp) -> Report {
    let ctx = context(spec);
    let n = spec.n;
    let w = Window::new(ctx, a);
    let dim = match op {
        OracleOp::Act | OracleOp::Compose => 2 * n,
        _ => n,
    };
    let fits = w.check_guard(dim).is_ok();
    run_trials(op.name(), spec.seed, spec.trials, |rng| {
        if !fits {
            return Ok(Trial::skip());
        }
        let agree = match op {
            OracleOp::Sum | OracleOp::Meet | OracleOp::Distance => {
                let l = random_lattice(&ctx, n, a, rng);
                let m = random_lattice(&ctx, n, a, rng);
                let (lf, mf) = (project_to_window(&l, &w)?, project_to_window(&m, &w)?);
                let ok = match op {
                    OracleOp::Sum => project_to_window(&l.sum(&m)?, &w)? == oracle_sum(&lf, &mf)?,
                    OracleOp::Meet => project_to_window(&l.meet(&m)?, &w)? == oracle_meet(&lf, &mf)?,
                    _ => l.complex_distance(&m)?.ks() == oracle_complex_distance(&lf, &mf)?.as_slice(),
                };
                (ok, json!({ "L": lattice_json(&l), "M": lattice_json(&m) }))
            }
            OracleOp::Act => {
                let h = random_relation(&ctx, n, a, rng);
                let r = random_lattice(&ctx, n, a, rng);
                let expected = oracle_act(&project_relation(&h, &w)?, &project_to_window(&r, &w)?)?;
                let ok = project_to_window(&h.act(&r)?, &w)? == expected;
                (ok, json!({ "H": relation_json(&h), "R": lattice_json(&r) }))
            }
            OracleOp::Compose => {
                let g = random_relation(&ctx, n, a, rng);
                let h = random_relation(&ctx, n, a, rng);
                let expected = oracle_compose(&project_relation(&g, &w)?, &project_relation(&h, &w)?)?;
                let ok = project_relation(&compose(&g, &h)?, &w)? == expected;
                (ok, json!({ "G": relation_json(&g), "H": relation_json(&h) }))
            }
        };
        Ok(Trial::check(agree.0, || agree.1))
    })
}

pub fn oracle_diff(spec: &RandomSpec, a: u32) -> Vec<Report> {
    OracleOp::ALL.iter().map(|&op| oracle_diff_op(spec, a, op)).collect()
}
