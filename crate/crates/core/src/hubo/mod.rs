//! Multilinear polynomials over spin or boolean variables and the symbolic
//! negative-volume objective.

mod build;
mod poly;
mod text;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_objective, build_objective_with, default_penalty_weight, volume_polynomial, BuildOptions};
pub use poly::{Domain, Monomial, Polynomial, CLEANUP_EPS};
pub use text::{parse_poly_text, write_poly_text};

use crate::encoding::{EncodingError, EncodingKind};
use crate::molgraph::MolError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HuboError {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("assignment has {var} values but the polynomial has {num_vars} variables")]
    MissingVariable { var: usize, num_vars: usize },
    #[error("value {value} for variable {var} is outside the {domain} domain")]
    OutOfDomain { var: usize, value: i8, domain: Domain },
    #[error("derivatives are only defined on the spin domain")]
    NotSpin,
    #[error("molecule has no rotatable bonds; nothing to optimize")]
    NoTorsions,
    #[error("registry has {registry} torsions, decomposition has {fragments}")]
    RegistryMismatch { registry: usize, fragments: usize },
    #[error("registry encoding does not match the encoding ({0} vs {1})")]
    EncodingMismatch(EncodingKind, EncodingKind),
    #[error("negative prune threshold {0}")]
    NegativeThreshold(f64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed HUBO JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Mol(#[from] MolError),
}

/// `(torsion i, bit j) ↔ i·bits + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableRegistry {
    pub encoding: EncodingKind,
    pub torsions: usize,
    pub bits_per_torsion: usize,
}

impl VariableRegistry {
    /// `d` is the grid size; phase encoding uses `log₂ d` bits per torsion.
    pub fn new(encoding: EncodingKind, torsions: usize, d: usize) -> Result<Self, EncodingError> {
        let bits_per_torsion = match encoding {
            EncodingKind::Phase => {
                if !d.is_power_of_two() || d < 2 {
                    return Err(EncodingError::NotPowerOfTwo(d));
                }
                d.trailing_zeros() as usize
            }
            EncodingKind::OneHot => {
                if d < 2 {
                    return Err(EncodingError::GridTooSmall { got: d, min: 2 });
                }
                d
            }
        };
        Ok(Self { encoding, torsions, bits_per_torsion })
    }

    pub fn for_encoding(encoding: &crate::encoding::Encoding, torsions: usize) -> Self {
        Self { encoding: encoding.kind(), torsions, bits_per_torsion: encoding.bits_per_torsion() }
    }

    pub fn num_vars(&self) -> usize {
        self.torsions * self.bits_per_torsion
    }

    pub fn var(&self, torsion: usize, bit: usize) -> u32 {
        assert!(torsion < self.torsions && bit < self.bits_per_torsion, "({torsion}, {bit}) outside registry");
        (torsion * self.bits_per_torsion + bit) as u32
    }

    pub fn locate(&self, var: u32) -> (usize, usize) {
        let v = var as usize;
        assert!(v < self.num_vars(), "variable {v} outside registry");
        (v / self.bits_per_torsion, v % self.bits_per_torsion)
    }

    pub fn name(&self, var: u32) -> String {
        let (i, j) = self.locate(var);
        format!("b_{i}_{j}")
    }

    pub fn domain(&self) -> Domain {
        match self.encoding {
            EncodingKind::Phase => Domain::Spin,
            EncodingKind::OneHot => Domain::Boolean,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HuboJson {
    domain: Domain,
    num_vars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    registry: Option<VariableRegistry>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    vars: Vec<u32>,
    coeff: f64,
}

/// Terms in canonical order (degree, then indices).
pub fn to_json(p: &Polynomial, registry: Option<&VariableRegistry>) -> String {
    let doc = HuboJson {
        domain: p.domain(),
        num_vars: p.num_vars(),
        registry: registry.copied(),
        terms: p.terms().map(|(m, c)| TermJson { vars: m.vars().to_vec(), coeff: c }).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("polynomial serializes")
}

pub fn from_json(text: &str) -> Result<(Polynomial, Option<VariableRegistry>), HuboError> {
    let doc: HuboJson = serde_json::from_str(text).map_err(|e| HuboError::Json(e.to_string()))?;
    if let Some(reg) = &doc.registry {
        if reg.num_vars() != doc.num_vars || reg.domain() != doc.domain {
            return Err(HuboError::Json("registry disagrees with domain or num_vars".into()));
        }
    }
    let mut p = Polynomial::zero(doc.domain, doc.num_vars);
    for t in doc.terms {
        if !t.coeff.is_finite() {
            return Err(HuboError::Json("non-finite coefficient".into()));
        }
        if let Some(&v) = t.vars.iter().find(|&&v| v as usize >= doc.num_vars) {
            return Err(HuboError::Json(format!("variable {v} outside num_vars {}", doc.num_vars)));
        }
        let mut vars = t.vars;
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(HuboError::Json("repeated variable in a term".into()));
        }
        p.add_term(Monomial::from_vars(doc.domain, vars), t.coeff);
    }
    Ok((p, doc.registry))
}

/// Histogram buckets are decades of |c|: bucket `k` holds `10^k ≤ |c| < 10^{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermStats {
    pub num_terms: usize,
    pub non_constant_terms: usize,
    pub max_degree: usize,
    pub terms_by_degree: Vec<usize>,
    pub coefficient_histogram: Vec<(i32, usize)>,
}

pub fn term_stats(p: &Polynomial) -> TermStats {
    let max_degree = p.max_degree();
    let mut terms_by_degree = vec![0; if p.is_empty() { 0 } else { max_degree + 1 }];
    let mut hist = std::collections::BTreeMap::new();
    for (m, c) in p.terms() {
        terms_by_degree[m.degree()] += 1;
        *hist.entry(c.abs().log10().floor() as i32).or_insert(0usize) += 1;
    }
    let has_const = p.constant_term() != 0.0;
    TermStats {
        num_terms: p.len(),
        non_constant_terms: p.len() - usize::from(has_const),
        max_degree,
        terms_by_degree,
        coefficient_histogram: hist.into_iter().collect(),
    }
}

/// One row per (label, degree): `label,degree,count`.
pub fn term_stats_csv(rows: &[(String, TermStats)]) -> String {
    let mut out = String::from("label,num_terms,max_degree,degree,count\n");
    for (label, s) in rows {
        for (deg, count) in s.terms_by_degree.iter().enumerate() {
            let _ = writeln!(out, "{label},{},{},{deg},{count}", s.num_terms, s.max_degree);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_layout() {
        let r = VariableRegistry::new(EncodingKind::Phase, 3, 16).unwrap();
        assert_eq!(r.num_vars(), 12);
        assert_eq!(r.var(2, 1), 9);
        assert_eq!(r.locate(9), (2, 1));
        assert_eq!(r.name(5), "b_1_1");
        let oh = VariableRegistry::new(EncodingKind::OneHot, 3, 16).unwrap();
        assert_eq!(oh.num_vars(), 48);
        assert!(VariableRegistry::new(EncodingKind::Phase, 3, 12).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::from_terms(Domain::Spin, 4, [(vec![], -2.5), (vec![0, 3], 0.125), (vec![1], 1.0 / 3.0)]);
        let reg = VariableRegistry::new(EncodingKind::Phase, 2, 4).unwrap();
        let (back, r) = from_json(&to_json(&p, Some(&reg))).unwrap();
        assert_eq!(back, p);
        assert_eq!(r, Some(reg));
        assert!(from_json("{\"domain\":\"spin\",\"num_vars\":1,\"terms\":[{\"vars\":[3],\"coeff\":1.0}]}").is_err());
        assert!(from_json("{\"domain\":\"spin\",\"num_vars\":2,\"terms\":[{\"vars\":[1,1],\"coeff\":1.0}]}").is_err());
    }

    #[test]
    fn stats() {
        let empty = term_stats(&Polynomial::zero(Domain::Spin, 2));
        assert_eq!(empty.num_terms, 0);
        let p = Polynomial::from_terms(Domain::Spin, 3, [(vec![], 5.0), (vec![0, 1, 2], 0.02), (vec![1], 0.5)]);
        let s = term_stats(&p);
        assert_eq!((s.num_terms, s.non_constant_terms, s.max_degree), (3, 2, 3));
        assert_eq!(s.terms_by_degree, vec![1, 1, 0, 1]);
        assert_eq!(s.coefficient_histogram, vec![(-2, 1), (-1, 1), (0, 1)]);
        assert!(term_stats_csv(&[("x".into(), s)]).lines().count() == 5);
    }
}
