use crate::hubo::{Domain, Polynomial};

/// Flat term arrays for repeated evaluation, gradients, and single-variable
/// lookups.
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    domain: Domain,
    num_vars: usize,
    constant: f64,
    coeffs: Vec<f64>,
    offsets: Vec<usize>,
    vars: Vec<u32>,
    /// Terms containing each variable.
    by_var: Vec<Vec<u32>>,
}

impl CompiledPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        let mut coeffs = Vec::with_capacity(p.len());
        let mut offsets = vec![0];
        let mut vars = Vec::new();
        let mut constant = 0.0;
        let mut by_var = vec![Vec::new(); p.num_vars()];
        for (m, c) in p.terms() {
            if m.is_constant() {
                constant += c;
                continue;
            }
            let t = coeffs.len() as u32;
            for &v in m.vars() {
                by_var[v as usize].push(t);
            }
            coeffs.push(c);
            vars.extend_from_slice(m.vars());
            offsets.push(vars.len());
        }
        Self { domain: p.domain(), num_vars: p.num_vars(), constant, coeffs, offsets, vars, by_var }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn term(&self, t: usize) -> &[u32] {
        &self.vars[self.offsets[t]..self.offsets[t + 1]]
    }

    pub fn coefficient_of(&self, t: usize) -> f64 {
        self.coeffs[t]
    }

    pub fn term_vars(&self, t: usize) -> &[u32] {
        self.term(t)
    }

    pub fn terms_with(&self, var: usize) -> &[u32] {
        &self.by_var[var]
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut total = self.constant;
        for t in 0..self.coeffs.len() {
            let mut prod = self.coeffs[t];
            for &v in self.term(t) {
                prod *= x[v as usize];
            }
            total += prod;
        }
        total
    }

    pub fn evaluate_discrete(&self, s: &[i8]) -> f64 {
        let mut total = self.constant;
        for t in 0..self.coeffs.len() {
            let vars = self.term(t);
            match self.domain {
                Domain::Spin => {
                    let neg = vars.iter().filter(|&&v| s[v as usize] < 0).count();
                    total += if neg % 2 == 0 { self.coeffs[t] } else { -self.coeffs[t] };
                }
                Domain::Boolean => {
                    if vars.iter().all(|&v| s[v as usize] == 1) {
                        total += self.coeffs[t];
                    }
                }
            }
        }
        total
    }

    /// `out[i] = ∂E/∂x_i` of the multilinear form.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        let mut prefix = [0.0f64; 64];
        for t in 0..self.coeffs.len() {
            let vars = self.term(t);
            let c = self.coeffs[t];
            match vars.len() {
                1 => out[vars[0] as usize] += c,
                2 => {
                    let (a, b) = (vars[0] as usize, vars[1] as usize);
                    out[a] += c * x[b];
                    out[b] += c * x[a];
                }
                k if k <= 64 => {
                    // prefix/suffix products avoid dividing by zero coordinates
                    let mut acc = 1.0;
                    for (j, &v) in vars.iter().enumerate() {
                        prefix[j] = acc;
                        acc *= x[v as usize];
                    }
                    let mut suffix = c;
                    for j in (0..k).rev() {
                        let v = vars[j] as usize;
                        out[v] += prefix[j] * suffix;
                        suffix *= x[v];
                    }
                }
                _ => {
                    for (j, &v) in vars.iter().enumerate() {
                        let mut prod = c;
                        for (l, &w) in vars.iter().enumerate() {
                            if l != j {
                                prod *= x[w as usize];
                            }
                        }
                        out[v as usize] += prod;
                    }
                }
            }
        }
    }
}
