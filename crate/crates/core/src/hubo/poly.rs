//! Sparse multilinear polynomials over spin (±1) or boolean (0/1) variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::HuboError;

/// Coefficients with smaller magnitude are dropped by every operation.
pub const CLEANUP_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Spin,
    Boolean,
}

impl Domain {
    pub fn admits(self, value: i8) -> bool {
        match self {
            Domain::Spin => value == 1 || value == -1,
            Domain::Boolean => value == 0 || value == 1,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Spin => "spin",
            Domain::Boolean => "boolean",
        })
    }
}

/// Strictly increasing variable indices. Ordered by degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: u32) -> Self {
        Self(vec![i])
    }

    /// Sorts and applies the domain's reduction to repeated indices.
    pub fn from_vars(domain: Domain, vars: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = vars.into_iter().collect();
        v.sort_unstable();
        match domain {
            Domain::Boolean => v.dedup(),
            Domain::Spin => {
                let mut out: Vec<u32> = Vec::with_capacity(v.len());
                for x in v {
                    if out.last() == Some(&x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                v = out;
            }
        }
        Self(v)
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: u32) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    pub fn without(&self, var: u32) -> Self {
        Self(self.0.iter().copied().filter(|&v| v != var).collect())
    }

    /// Product with the domain's reduction (`s² = 1` or `b² = b`).
    pub fn mul(&self, other: &Self, domain: Domain) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    if domain == Domain::Boolean {
                        out.push(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    domain: Domain,
    num_vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(domain: Domain, num_vars: usize) -> Self {
        Self { domain, num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(domain: Domain, num_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(domain, num_vars);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn variable(domain: Domain, num_vars: usize, var: u32) -> Self {
        let mut p = Self::zero(domain, num_vars.max(var as usize + 1));
        p.add_term(Monomial::var(var), 1.0);
        p
    }

    /// Builds from `(variables, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I, V>(domain: Domain, num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (V, f64)>,
        V: IntoIterator<Item = u32>,
    {
        let mut p = Self::zero(domain, num_vars);
        for (vars, c) in terms {
            let m = Monomial::from_vars(domain, vars);
            if let Some(&last) = m.vars().last() {
                p.num_vars = p.num_vars.max(last as usize + 1);
            }
            p.add_term(m, c);
        }
        p
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_num_vars(&mut self, n: usize) {
        let needed = self.terms.keys().filter_map(|m| m.vars().last()).map(|&v| v as usize + 1).max().unwrap_or(0);
        self.num_vars = n.max(needed);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order (degree, then indices).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::one())
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Adds `c` to the coefficient of `m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().abs() < CLEANUP_EPS {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c.abs() >= CLEANUP_EPS {
                    e.insert(c);
                }
            }
        }
    }

    fn check_domain(&self, other: &Self) -> Result<(), HuboError> {
        if self.domain != other.domain {
            return Err(HuboError::DomainMismatch(self.domain, other.domain));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, HuboError> {
        self.check_domain(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, 1.0);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HuboError> {
        self.check_domain(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, -1.0);
        Ok(out)
    }

    /// `self += scale * other`; domains must already agree.
    pub(crate) fn add_assign_unchecked(&mut self, other: &Self, scale: f64) {
        debug_assert_eq!(self.domain, other.domain);
        self.num_vars = self.num_vars.max(other.num_vars);
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), scale * c);
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.domain, self.num_vars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, HuboError> {
        self.check_domain(other)?;
        let domain = self.domain;
        Ok(self.mul_with(other, |a, b| Some(a.mul(b, domain))))
    }

    /// Product where `combine` maps a monomial pair to its product, or `None`
    /// when the product vanishes identically.
    pub(crate) fn mul_with<F>(&self, other: &Self, combine: F) -> Self
    where
        F: Fn(&Monomial, &Monomial) -> Option<Monomial>,
    {
        let mut out = Self::zero(self.domain, self.num_vars.max(other.num_vars));
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                if let Some(m) = combine(ma, mb) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }

    fn check_assignment(&self, assignment: &[i8]) -> Result<(), HuboError> {
        if assignment.len() < self.num_vars {
            return Err(HuboError::MissingVariable { var: assignment.len(), num_vars: self.num_vars });
        }
        if let Some((i, &v)) = assignment.iter().enumerate().find(|(_, &v)| !self.domain.admits(v)) {
            return Err(HuboError::OutOfDomain { var: i, value: v, domain: self.domain });
        }
        Ok(())
    }

    pub fn evaluate(&self, assignment: &[i8]) -> Result<f64, HuboError> {
        self.check_assignment(assignment)?;
        Ok(self
            .terms
            .iter()
            .map(|(m, &c)| c * m.vars().iter().map(|&v| f64::from(assignment[v as usize])).product::<f64>())
            .sum())
    }

    /// Evaluates the multilinear form at real points (no domain check).
    pub fn evaluate_real(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, &c)| c * m.vars().iter().map(|&v| x[v as usize]).product::<f64>()).sum()
    }

    /// ∂/∂x_var of the multilinear relaxation. Spin domain only.
    pub fn partial_derivative(&self, var: u32) -> Result<Self, HuboError> {
        if self.domain != Domain::Spin {
            return Err(HuboError::NotSpin);
        }
        let mut out = Self::zero(self.domain, self.num_vars);
        for (m, &c) in &self.terms {
            if m.contains(var) {
                out.add_term(m.without(var), c);
            }
        }
        Ok(out)
    }

    /// Keeps the constant and every other term with `|c| >= tau`.
    pub fn prune_threshold(&self, tau: f64) -> Self {
        let mut out = Self::zero(self.domain, self.num_vars);
        for (m, &c) in &self.terms {
            if m.is_constant() || c.abs() >= tau {
                out.terms.insert(m.clone(), c);
            }
        }
        out
    }

    /// Drops non-constant terms below `rel * max|c|`.
    pub fn cleanup_relative(&mut self, rel: f64) {
        let cutoff = rel * self.max_abs_coefficient();
        self.terms.retain(|m, c| m.is_constant() || c.abs() >= cutoff);
    }

    pub(crate) fn map_vars(&self, num_vars: usize, f: impl Fn(u32) -> u32) -> Self {
        let mut out = Self::zero(self.domain, num_vars);
        for (m, &c) in &self.terms {
            out.add_term(Monomial::from_vars(self.domain, m.vars().iter().map(|&v| f(v))), c);
        }
        out
    }
}
