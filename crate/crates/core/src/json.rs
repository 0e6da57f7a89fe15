//! JSON envelopes for lattices, relations, matrices and vectors.
//!
//! Lattice: `{"p": 2, "n": 2, "generators": [["1","0"],["1/2","1"]]}`, one
//! inner array per generator. Canonical output lists exactly `n` generators,
//! the columns of the canonical basis in order. Relations add
//! `"blocks": ["source","target"]` and use generators of length `2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::relation::Relation;
use crate::scalar::{PadicContext, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeEnvelope {
    pub p: u64,
    pub n: usize,
    pub generators: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEnvelope {
    pub p: u64,
    pub n: usize,
    #[serde(default = "default_blocks")]
    pub blocks: Vec<String>,
    pub generators: Vec<Vec<Scalar>>,
}

fn default_blocks() -> Vec<String> {
    vec!["source".into(), "target".into()]
}

/// A matrix as nested row arrays, with its prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub p: u64,
    pub rows: Vec<Vec<Scalar>>,
}

fn context(p: u64) -> Result<PadicContext> {
    PadicContext::new(p).map_err(|e| Error::parse("p", e.to_string()))
}

fn check_lengths(gens: &[Vec<Scalar>], len: usize) -> Result<()> {
    for (i, g) in gens.iter().enumerate() {
        if g.len() != len {
            return Err(Error::parse(
                format!("generators[{i}]"),
                format!("expected {len} entries, found {}", g.len()),
            ));
        }
    }
    if gens.len() < len {
        return Err(Error::parse(
            "generators",
            format!("need at least {len} generators, found {}", gens.len()),
        ));
    }
    Ok(())
}

impl LatticeEnvelope {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeEnvelope {
            p: l.ctx().p(),
            n: l.n(),
            generators: l.basis().columns(),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        let ctx = context(self.p)?;
        if self.n == 0 {
            return Err(Error::parse("n", "dimension must be positive"));
        }
        check_lengths(&self.generators, self.n)?;
        Lattice::from_generators(ctx, self.n, &self.generators)
    }
}

impl RelationEnvelope {
    pub fn from_relation(h: &Relation) -> Self {
        RelationEnvelope {
            p: h.ctx().p(),
            n: h.n(),
            blocks: default_blocks(),
            generators: h.carrier().basis().columns(),
        }
    }

    pub fn to_relation(&self) -> Result<Relation> {
        let ctx = context(self.p)?;
        if self.n == 0 {
            return Err(Error::parse("n", "dimension must be positive"));
        }
        if self.blocks != default_blocks() {
            return Err(Error::parse("blocks", "expected [\"source\", \"target\"]"));
        }
        check_lengths(&self.generators, 2 * self.n)?;
        Relation::from_generators(ctx, self.n, &self.generators)
    }
}

impl MatrixEnvelope {
    pub fn from_matrix(ctx: &PadicContext, m: &Matrix) -> Self {
        MatrixEnvelope {
            p: ctx.p(),
            rows: (0..m.rows()).map(|i| m.row(i).to_vec()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<(PadicContext, Matrix)> {
        let ctx = context(self.p)?;
        let m = Matrix::from_rows(self.rows.clone()).map_err(|e| Error::parse("rows", e.to_string()))?;
        Ok((ctx, m))
    }
}

pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let env: LatticeEnvelope =
        serde_json::from_str(text).map_err(|e| Error::parse("lattice", e.to_string()))?;
    env.to_lattice()
}

pub fn parse_relation(text: &str) -> Result<Relation> {
    let env: RelationEnvelope =
        serde_json::from_str(text).map_err(|e| Error::parse("relation", e.to_string()))?;
    env.to_relation()
}

pub fn parse_matrix(text: &str) -> Result<(PadicContext, Matrix)> {
    let env: MatrixEnvelope =
        serde_json::from_str(text).map_err(|e| Error::parse("matrix", e.to_string()))?;
    env.to_matrix()
}

pub fn parse_vector(text: &str) -> Result<Vec<Scalar>> {
    serde_json::from_str(text).map_err(|e| Error::parse("vector", e.to_string()))
}

pub fn lattice_json(l: &Lattice) -> serde_json::Value {
    serde_json::to_value(LatticeEnvelope::from_lattice(l)).expect("serializable")
}

pub fn relation_json(h: &Relation) -> serde_json::Value {
    serde_json::to_value(RelationEnvelope::from_relation(h)).expect("serializable")
}

pub fn matrix_json(ctx: &PadicContext, m: &Matrix) -> serde_json::Value {
    serde_json::to_value(MatrixEnvelope::from_matrix(ctx, m)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_envelope_round_trip() {
        let text = r#"{"p": 2, "n": 2, "generators": [["1","0"],["0","1"],["1/2","1/2"]]}"#;
        let l = parse_lattice(text).unwrap();
        let out = serde_json::to_string(&LatticeEnvelope::from_lattice(&l)).unwrap();
        assert_eq!(parse_lattice(&out).unwrap(), l);
        assert_eq!(LatticeEnvelope::from_lattice(&l).generators.len(), 2);
    }

    #[test]
    fn errors_name_the_field() {
        let short = r#"{"p": 2, "n": 2, "generators": [["1","0"],["1"]]}"#;
        assert!(matches!(parse_lattice(short), Err(Error::Parse { field, .. }) if field == "generators[1]"));
        let bad_p = r#"{"p": 4, "n": 1, "generators": [["1"]]}"#;
        assert!(matches!(parse_lattice(bad_p), Err(Error::Parse { field, .. }) if field == "p"));
        let missing = r#"{"p": 2, "generators": [["1"]]}"#;
        let err = parse_lattice(missing).unwrap_err().to_string();
        assert!(err.contains("`n`"), "{err}");
        let bad_scalar = r#"{"p": 2, "n": 1, "generators": [["1/0"]]}"#;
        assert!(parse_lattice(bad_scalar).is_err());
    }

    #[test]
    fn relation_envelope() {
        let text = r#"{"p": 2, "n": 1, "blocks": ["source","target"], "generators": [["1","1"],["0","4"]]}"#;
        let h = parse_relation(text).unwrap();
        assert_eq!(h.n(), 1);
        let back = serde_json::to_string(&RelationEnvelope::from_relation(&h)).unwrap();
        assert_eq!(parse_relation(&back).unwrap(), h);
        let wrong = r#"{"p": 2, "n": 1, "blocks": ["target","source"], "generators": [["1","1"],["0","4"]]}"#;
        assert!(matches!(parse_relation(wrong), Err(Error::Parse { field, .. }) if field == "blocks"));
    }

    #[test]
    fn matrices_and_vectors() {
        let (ctx, m) = parse_matrix(r#"{"p": 3, "rows": [["1","2"],["0","1/3"]]}"#).unwrap();
        assert_eq!(ctx.p(), 3);
        assert_eq!(m[(1, 1)], "1/3".parse().unwrap());
        assert_eq!(parse_vector(r#"["1","-2/3"]"#).unwrap().len(), 2);
    }
}
