//! Torsion-angle grids and their binary encodings.
//!
//! Phase encoding represents `d = 2ⁿ` uniformly spaced angles with `n` spins
//! through a complex polynomial `p_n(s)` of `2^{n-1}` odd-degree monomials
//! whose values are exactly the `d`-th roots of unity; `cos θ` and `sin θ` are
//! its real and imaginary parts. One-hot encoding uses `d` booleans per angle
//! and a quadratic penalty for the sum-to-one constraint.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::TorsionAssignment;
use crate::hubo::{Domain, Polynomial};

pub const MAX_PHASE_BITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("phase encoding needs 1 <= n <= {MAX_PHASE_BITS}, got {0}")]
    BitsOutOfRange(usize),
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("grid size must be at least {min}, got {got}")]
    GridTooSmall { got: usize, min: usize },
    #[error("no hard-coded phase table for n = {0} (only 2 and 3)")]
    NoPaperTable(usize),
    #[error("expected {expected} binary values, got {got}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("value {value} at position {index} is not valid for this encoding")]
    BadValue { index: usize, value: i8 },
    #[error("torsion {torsion}: one-hot constraint violated ({hot} hot bits)")]
    OneHotViolation { torsion: usize, hot: usize },
    #[error("phase polynomial values do not form the 2^n-th roots of unity")]
    NotRootsOfUnity,
    #[error("penalty weight must be positive, got {0}")]
    BadPenalty(f64),
    #[error("malformed phase-code JSON: {0}")]
    Json(String),
}

/// `φ_k = 2πk/d` for `k = 0..d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGrid {
    d: usize,
}

impl AngleGrid {
    pub fn new(d: usize) -> Result<Self, EncodingError> {
        if d < 2 {
            return Err(EncodingError::GridTooSmall { got: d, min: 2 });
        }
        Ok(Self { d })
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn value(&self, k: usize) -> f64 {
        TAU * k as f64 / self.d as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.d).map(|k| self.value(k)).collect()
    }

    pub fn assignment(&self, indices: &[usize]) -> TorsionAssignment {
        TorsionAssignment::new(indices.iter().map(|&k| self.value(k)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Phase,
    #[serde(rename = "onehot")]
    OneHot,
}

impl std::str::FromStr for EncodingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "phase" => Ok(Self::Phase),
            "onehot" | "one-hot" => Ok(Self::OneHot),
            other => Err(format!("unknown encoding {other:?} (phase|onehot)")),
        }
    }
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Phase => "phase",
            Self::OneHot => "onehot",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub bits: Vec<usize>,
    pub coeff: Complex64,
}

/// Spins are indexed by a bit mask: bit `j` set ⇔ `s_j = −1`.
pub fn spins_from_mask(mask: usize, n: usize) -> Vec<i8> {
    (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect()
}

pub fn mask_from_spins(spins: &[i8]) -> usize {
    spins.iter().enumerate().filter(|(_, &s)| s == -1).fold(0, |m, (j, _)| m | 1 << j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCode {
    n: usize,
    terms: Vec<PhaseTerm>,
    /// spin mask → grid index
    grid_of_mask: Vec<usize>,
    /// grid index → spin mask
    mask_of_grid: Vec<usize>,
}

impl PhaseCode {
    /// General construction for any `n`.
    ///
    /// With `b_j = (1 − s_j)/2` and `k = Σ b_j 2^j`, `e^{2πik/2ⁿ}` factors as
    /// `Π_j (a_j + c_j s_j)`; the top factor is exactly `s_{n−1}`. Substituting
    /// `s_j → s_j s_{n−1}` for `j < n−1` relabels the grid and folds every
    /// monomial onto an odd-cardinality set, leaving `2^{n−1}` terms.
    pub fn build(n: usize) -> Result<Self, EncodingError> {
        if n == 0 || n > MAX_PHASE_BITS {
            return Err(EncodingError::BitsOutOfRange(n));
        }
        let d = 1usize << n;
        let low = n - 1;
        let factors: Vec<(Complex64, Complex64)> = (0..low)
            .map(|j| {
                let w = Complex64::from_polar(1.0, TAU * (1usize << j) as f64 / d as f64);
                ((1.0 + w) / 2.0, (1.0 - w) / 2.0)
            })
            .collect();
        let mut terms = Vec::with_capacity(1 << low);
        for subset in 0..(1usize << low) {
            let mut coeff = Complex64::new(1.0, 0.0);
            let mut bits = Vec::new();
            for (j, &(a, c)) in factors.iter().enumerate() {
                if subset >> j & 1 == 1 {
                    coeff *= c;
                    bits.push(j);
                } else {
                    coeff *= a;
                }
            }
            if bits.len() % 2 == 0 {
                bits.push(n - 1);
            }
            terms.push(PhaseTerm { bits, coeff });
        }
        terms.sort_by(|a, b| (a.bits.len(), &a.bits).cmp(&(b.bits.len(), &b.bits)));
        // z = P_odd(s) + s_last P_even(s) with P(s) = Π (a_j + b_j s_j), O(n) per mask
        let product = |s: &[i8], sign: f64| -> Complex64 {
            factors.iter().zip(s).map(|(&(a, b), &v)| a + b * (sign * f64::from(v))).product()
        };
        Self::with_evaluator(n, terms, |s| {
            let (p, q) = (product(s, 1.0), product(s, -1.0));
            (p - q) / 2.0 + (p + q) / 2.0 * f64::from(s[n - 1])
        })
    }

    /// The explicit `n = 2` and `n = 3` coefficient tables.
    pub fn paper(n: usize) -> Result<Self, EncodingError> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let terms = match n {
            2 => {
                vec![PhaseTerm { bits: vec![0], coeff: c(0.5, -0.5) }, PhaseTerm { bits: vec![1], coeff: c(0.5, 0.5) }]
            }
            3 => vec![
                PhaseTerm { bits: vec![0], coeff: c(1.0, SQRT_2 - 1.0) / 4.0 },
                PhaseTerm { bits: vec![1], coeff: c(1.0, -(SQRT_2 + 1.0)) / 4.0 },
                PhaseTerm { bits: vec![2], coeff: c(1.0 + SQRT_2, 1.0) / 4.0 },
                PhaseTerm { bits: vec![0, 1, 2], coeff: c(1.0 - SQRT_2, 1.0) / 4.0 },
            ],
            _ => return Err(EncodingError::NoPaperTable(n)),
        };
        Self::from_terms(n, terms)
    }

    /// Validates that the value set is the `2ⁿ`-th roots of unity and derives
    /// the assignment ↔ grid-index tables.
    pub fn from_terms(n: usize, terms: Vec<PhaseTerm>) -> Result<Self, EncodingError> {
        if n == 0 || n > MAX_PHASE_BITS {
            return Err(EncodingError::BitsOutOfRange(n));
        }
        if terms.iter().any(|t| t.bits.iter().any(|&b| b >= n) || !t.coeff.re.is_finite() || !t.coeff.im.is_finite()) {
            return Err(EncodingError::NotRootsOfUnity);
        }
        Self::with_evaluator(n, terms.clone(), |s| eval_terms(&terms, s))
    }

    fn with_evaluator(
        n: usize,
        terms: Vec<PhaseTerm>,
        eval: impl Fn(&[i8]) -> Complex64,
    ) -> Result<Self, EncodingError> {
        let d = 1usize << n;
        let mut grid_of_mask = vec![0; d];
        let mut mask_of_grid = vec![usize::MAX; d];
        for mask in 0..d {
            let z = eval(&spins_from_mask(mask, n));
            let k = ((z.arg() / TAU * d as f64).round() as i64).rem_euclid(d as i64) as usize;
            let target = Complex64::from_polar(1.0, TAU * k as f64 / d as f64);
            if (z - target).norm() > 1e-9 || mask_of_grid[k] != usize::MAX {
                return Err(EncodingError::NotRootsOfUnity);
            }
            grid_of_mask[mask] = k;
            mask_of_grid[k] = mask;
        }
        Ok(Self { n, terms, grid_of_mask, mask_of_grid })
    }

    pub fn bits(&self) -> usize {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        1 << self.n
    }

    pub fn terms(&self) -> &[PhaseTerm] {
        &self.terms
    }

    pub fn eval(&self, spins: &[i8]) -> Complex64 {
        eval_terms(&self.terms, spins)
    }

    pub fn grid_index(&self, spins: &[i8]) -> usize {
        self.grid_of_mask[mask_from_spins(spins)]
    }

    pub fn spins_for(&self, k: usize) -> Vec<i8> {
        spins_from_mask(self.mask_of_grid[k], self.n)
    }

    /// Grid index per spin mask.
    pub fn correspondence(&self) -> &[usize] {
        &self.grid_of_mask
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PhaseCodeDump::from(self)).expect("phase code serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, EncodingError> {
        let dump: PhaseCodeDump = serde_json::from_str(text).map_err(|e| EncodingError::Json(e.to_string()))?;
        let terms = dump
            .terms
            .into_iter()
            .map(|t| {
                let mut bits = t.bits;
                bits.sort_unstable();
                bits.dedup();
                PhaseTerm { bits, coeff: Complex64::new(t.re, t.im) }
            })
            .collect();
        let code = Self::from_terms(dump.n, terms)?;
        if !dump.correspondence.is_empty() && dump.correspondence != code.grid_of_mask {
            return Err(EncodingError::Json("correspondence table disagrees with coefficients".into()));
        }
        Ok(code)
    }
}

fn eval_terms(terms: &[PhaseTerm], spins: &[i8]) -> Complex64 {
    terms.iter().map(|t| t.coeff * t.bits.iter().map(|&b| f64::from(spins[b])).product::<f64>()).sum()
}

#[derive(Serialize, Deserialize)]
struct PhaseCodeDump {
    n: usize,
    terms: Vec<PhaseTermDump>,
    #[serde(default)]
    correspondence: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PhaseTermDump {
    bits: Vec<usize>,
    re: f64,
    im: f64,
}

impl From<&PhaseCode> for PhaseCodeDump {
    fn from(code: &PhaseCode) -> Self {
        Self {
            n: code.n,
            terms: code
                .terms
                .iter()
                .map(|t| PhaseTermDump { bits: t.bits.clone(), re: t.coeff.re, im: t.coeff.im })
                .collect(),
            correspondence: code.grid_of_mask.clone(),
        }
    }
}

pub fn build_phase_code(n: usize) -> Result<PhaseCode, EncodingError> {
    PhaseCode::build(n)
}

/// `sin θ` and `cos θ` of one torsion as polynomials in its local variables.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub sin_poly: Polynomial,
    pub cos_poly: Polynomial,
}

impl TrigPolynomial {
    pub fn relabel(&self, num_vars: usize, offset: u32) -> Self {
        Self {
            sin_poly: self.sin_poly.map_vars(num_vars, |v| v + offset),
            cos_poly: self.cos_poly.map_vars(num_vars, |v| v + offset),
        }
    }
}

/// `sin θ = Im p_n`, `cos θ = Re p_n`.
pub fn trig_polys_phase(code: &PhaseCode) -> TrigPolynomial {
    let to_u32 = |bits: &[usize]| bits.iter().map(|&b| b as u32).collect::<Vec<_>>();
    let sin_poly =
        Polynomial::from_terms(Domain::Spin, code.n, code.terms.iter().map(|t| (to_u32(&t.bits), t.coeff.im)));
    let cos_poly =
        Polynomial::from_terms(Domain::Spin, code.n, code.terms.iter().map(|t| (to_u32(&t.bits), t.coeff.re)));
    TrigPolynomial { sin_poly, cos_poly }
}

/// `sin θ = Σ_k sin φ_k b_k`, `cos θ = Σ_k cos φ_k b_k`.
pub fn trig_polys_onehot(d: usize) -> Result<TrigPolynomial, EncodingError> {
    let grid = AngleGrid::new(d)?;
    let sin_poly =
        Polynomial::from_terms(Domain::Boolean, d, (0..d).map(|k| (vec![k as u32], snap(grid.value(k).sin()))));
    let cos_poly =
        Polynomial::from_terms(Domain::Boolean, d, (0..d).map(|k| (vec![k as u32], snap(grid.value(k).cos()))));
    Ok(TrigPolynomial { sin_poly, cos_poly })
}

/// Zeroes floating residue of structurally zero grid trig values.
fn snap(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneHotCode {
    pub d: usize,
    /// `None` selects twice the largest absolute coefficient of the
    /// unpenalized objective.
    pub penalty_weight: Option<f64>,
}

impl OneHotCode {
    pub fn new(d: usize) -> Result<Self, EncodingError> {
        AngleGrid::new(d)?;
        Ok(Self { d, penalty_weight: None })
    }

    pub fn with_penalty(d: usize, weight: f64) -> Result<Self, EncodingError> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(EncodingError::BadPenalty(weight));
        }
        Ok(Self { d, penalty_weight: Some(weight) })
    }
}

/// `A Σ_i (Σ_k b_ik − 1)²` over variables `i·d + k`.
pub fn penalty_polynomial(d: usize, m: usize, weight: f64) -> Result<Polynomial, EncodingError> {
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(EncodingError::BadPenalty(weight));
    }
    let num_vars = d * m;
    let mut total = Polynomial::zero(Domain::Boolean, num_vars);
    for i in 0..m {
        let mut lin = Polynomial::constant(Domain::Boolean, num_vars, -1.0);
        for k in 0..d {
            lin.add_term(crate::hubo::Monomial::var((i * d + k) as u32), 1.0);
        }
        let sq = lin.mul(&lin).expect("same domain");
        total.add_assign_unchecked(&sq, weight);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Encoding {
    Phase(PhaseCode),
    OneHot(OneHotCode),
}

impl Encoding {
    /// Phase encoding needs `d` to be a power of two.
    pub fn new(kind: EncodingKind, d: usize) -> Result<Self, EncodingError> {
        match kind {
            EncodingKind::Phase => {
                if d < 2 {
                    return Err(EncodingError::GridTooSmall { got: d, min: 2 });
                }
                if !d.is_power_of_two() {
                    return Err(EncodingError::NotPowerOfTwo(d));
                }
                Ok(Self::Phase(PhaseCode::build(d.trailing_zeros() as usize)?))
            }
            EncodingKind::OneHot => Ok(Self::OneHot(OneHotCode::new(d)?)),
        }
    }

    pub fn kind(&self) -> EncodingKind {
        match self {
            Self::Phase(_) => EncodingKind::Phase,
            Self::OneHot(_) => EncodingKind::OneHot,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Self::Phase(_) => Domain::Spin,
            Self::OneHot(_) => Domain::Boolean,
        }
    }

    pub fn grid(&self) -> AngleGrid {
        AngleGrid { d: self.grid_size() }
    }

    pub fn grid_size(&self) -> usize {
        match self {
            Self::Phase(code) => code.grid_size(),
            Self::OneHot(code) => code.d,
        }
    }

    pub fn bits_per_torsion(&self) -> usize {
        match self {
            Self::Phase(code) => code.n,
            Self::OneHot(code) => code.d,
        }
    }

    pub fn trig_polys(&self) -> TrigPolynomial {
        match self {
            Self::Phase(code) => trig_polys_phase(code),
            Self::OneHot(code) => trig_polys_onehot(code.d).expect("validated grid"),
        }
    }

    /// Grid index per torsion.
    pub fn decode_indices(&self, assignment: &[i8]) -> Result<Vec<usize>, EncodingError> {
        let bits = self.bits_per_torsion();
        if assignment.len() % bits != 0 {
            return Err(EncodingError::AssignmentLength {
                expected: bits * (assignment.len() / bits + 1),
                got: assignment.len(),
            });
        }
        let domain = self.domain();
        if let Some((index, &value)) = assignment.iter().enumerate().find(|(_, &v)| !domain.admits(v)) {
            return Err(EncodingError::BadValue { index, value });
        }
        assignment
            .chunks(bits)
            .enumerate()
            .map(|(torsion, chunk)| match self {
                Self::Phase(code) => Ok(code.grid_index(chunk)),
                Self::OneHot(_) => {
                    let hot: Vec<usize> = chunk.iter().enumerate().filter(|(_, &b)| b == 1).map(|(k, _)| k).collect();
                    match hot.as_slice() {
                        [k] => Ok(*k),
                        _ => Err(EncodingError::OneHotViolation { torsion, hot: hot.len() }),
                    }
                }
            })
            .collect()
    }

    pub fn decode(&self, assignment: &[i8]) -> Result<TorsionAssignment, EncodingError> {
        Ok(self.grid().assignment(&self.decode_indices(assignment)?))
    }

    pub fn encode(&self, indices: &[usize]) -> Vec<i8> {
        let mut out = Vec::with_capacity(indices.len() * self.bits_per_torsion());
        for &k in indices {
            match self {
                Self::Phase(code) => out.extend(code.spins_for(k)),
                Self::OneHot(code) => out.extend((0..code.d).map(|j| i8::from(j == k))),
            }
        }
        out
    }
}

pub fn decode(encoding: &Encoding, assignment: &[i8]) -> Result<TorsionAssignment, EncodingError> {
    encoding.decode(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn n2_product_matches_explicit_table() {
        let code = PhaseCode::build(2).unwrap();
        assert_eq!(code.terms().len(), 2);
        assert_eq!(code.terms()[0].bits, vec![0]);
        assert!(close(code.terms()[0].coeff, Complex64::new(0.5, -0.5)));
        assert_eq!(code.terms()[1].bits, vec![1]);
        assert!(close(code.terms()[1].coeff, Complex64::new(0.5, 0.5)));
        // s0 = -1, s1 = +1 is the quarter turn
        assert_eq!(code.grid_index(&[-1, 1]), 1);
    }

    #[test]
    fn paper_tables_are_valid_codes() {
        for n in [2, 3] {
            let code = PhaseCode::paper(n).unwrap();
            assert_eq!(code.terms().len(), 1 << (n - 1));
        }
        let p3 = PhaseCode::paper(3).unwrap();
        assert_eq!(p3.terms()[3].bits, vec![0, 1, 2]);
        assert!(PhaseCode::paper(4).is_err());
    }

    #[test]
    fn closed_form_matches_term_sum() {
        for n in 1..=8 {
            let code = PhaseCode::build(n).unwrap();
            let d = 1usize << n;
            for mask in 0..d {
                let z = code.eval(&spins_from_mask(mask, n));
                let k = code.correspondence()[mask];
                assert!(close(z, Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)));
            }
        }
    }

    #[test]
    fn out_of_range_bits() {
        assert_eq!(PhaseCode::build(0).unwrap_err(), EncodingError::BitsOutOfRange(0));
        assert_eq!(PhaseCode::build(17).unwrap_err(), EncodingError::BitsOutOfRange(17));
        assert!(PhaseCode::build(16).is_ok());
    }

    #[test]
    fn n1_trig() {
        let trig = trig_polys_phase(&PhaseCode::build(1).unwrap());
        assert!(trig.sin_poly.is_empty());
        assert_eq!(trig.cos_poly, Polynomial::variable(Domain::Spin, 1, 0));
    }

    #[test]
    fn n2_trig_by_enumeration() {
        let trig = trig_polys_phase(&PhaseCode::build(2).unwrap());
        for mask in 0..4 {
            let s = spins_from_mask(mask, 2);
            let sin = (-f64::from(s[0]) + f64::from(s[1])) / 2.0;
            let cos = (f64::from(s[0]) + f64::from(s[1])) / 2.0;
            assert!((trig.sin_poly.evaluate(&s).unwrap() - sin).abs() < 1e-15);
            assert!((trig.cos_poly.evaluate(&s).unwrap() - cos).abs() < 1e-15);
        }
    }

    #[test]
    fn onehot_trig() {
        let trig = trig_polys_onehot(4).unwrap();
        let expected = Polynomial::from_terms(Domain::Boolean, 4, [(vec![0], 1.0), (vec![2], -1.0)]);
        assert_eq!(trig.cos_poly, expected);
        let trig16 = trig_polys_onehot(16).unwrap();
        let mut b = vec![0i8; 16];
        b[3] = 1;
        assert!((trig16.sin_poly.evaluate(&b).unwrap() - (3.0 * PI / 8.0).sin()).abs() < 1e-15);
        assert!((trig16.cos_poly.evaluate(&b).unwrap() - (3.0 * PI / 8.0).cos()).abs() < 1e-15);
        let zero = vec![0i8; 16];
        assert_eq!(trig16.sin_poly.evaluate(&zero).unwrap(), 0.0);
        assert_eq!(trig16.cos_poly.evaluate(&zero).unwrap(), 0.0);
        let enc = Encoding::new(EncodingKind::OneHot, 16).unwrap();
        assert!(matches!(enc.decode(&zero), Err(EncodingError::OneHotViolation { torsion: 0, hot: 0 })));
    }

    #[test]
    fn penalty_values() {
        let p = penalty_polynomial(4, 2, 3.0).unwrap();
        assert_eq!(p.evaluate(&[1, 0, 0, 0, 0, 0, 1, 0]).unwrap(), 0.0);
        assert!((p.evaluate(&[1, 1, 0, 0, 0, 0, 1, 0]).unwrap() - 3.0).abs() < 1e-12);
        assert!((p.evaluate(&[0; 8]).unwrap() - 6.0).abs() < 1e-12);
        assert!(penalty_polynomial(4, 1, 0.0).is_err());
    }

    #[test]
    fn decode_examples() {
        let enc = Encoding::Phase(PhaseCode::build(2).unwrap());
        assert!((enc.decode(&[-1, 1]).unwrap().angles()[0] - PI / 2.0).abs() < 1e-15);
        let enc4 = Encoding::new(EncodingKind::Phase, 16).unwrap();
        assert_eq!(enc4.decode(&[1, 1, 1, 1]).unwrap().angles()[0], 0.0);
        let oh = Encoding::new(EncodingKind::OneHot, 4).unwrap();
        assert_eq!(oh.decode(&[1, 0, 0, 0]).unwrap().angles()[0], 0.0);
        assert!(Encoding::new(EncodingKind::Phase, 12).is_err());
        assert!(matches!(enc.decode(&[1, 0]), Err(EncodingError::BadValue { index: 1, value: 0 })));
    }

    #[test]
    fn json_round_trip() {
        let code = PhaseCode::build(3).unwrap();
        let back = PhaseCode::from_json(&code.to_json()).unwrap();
        assert_eq!(back.correspondence(), code.correspondence());
        assert!(PhaseCode::from_json("{\"n\":2,\"terms\":[{\"bits\":[0],\"re\":1.0,\"im\":0.0}]}").is_err());
    }
}
