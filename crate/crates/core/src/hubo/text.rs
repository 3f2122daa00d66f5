//! Plain-text polynomials such as `-240.7234 - 0.0112 b_{00} b_{12} + ...`.
//!
//! Variables are `b_{IJ}` / `b_{I,J}` / `b_I_J` (torsion `I`, bit `J`; the
//! brace form without a comma takes one digit each) or `x_K` / `x_{K}` for a
//! raw global index. LaTeX line noise (`\\`, `\nonumber`, `&`), an optional
//! `lhs =` prefix, `*`, and a trailing period are ignored.

use std::fmt::Write as _;

use super::{Domain, HuboError, Monomial, Polynomial, VariableRegistry};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> HuboError {
        HuboError::Parse { pos: self.base + self.pos, msg: msg.into() }
    }

    fn skip_noise(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            if rest.starts_with(b"\\nonumber") {
                self.pos += 9;
            } else if rest.starts_with(b"\\\\") {
                self.pos += 2;
            } else if rest.starts_with(b"\\cdot") {
                self.pos += 5;
            } else if matches!(rest.first(), Some(b' ' | b'\t' | b'\n' | b'\r' | b'&' | b'*')) {
                self.pos += 1;
            } else {
                return;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<usize, HuboError> {
        let d = self.digits();
        if d.is_empty() {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(d).unwrap().parse().map_err(|_| self.err("index too large"))
    }

    fn expect(&mut self, c: u8) -> Result<(), HuboError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {:?}", c as char)))
        }
    }

    fn coefficient(&mut self) -> Result<Option<f64>, HuboError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                self.pos = save;
            }
        }
        if start == self.pos {
            return Ok(None);
        }
        let tok = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let tok = tok.strip_suffix('.').filter(|_| self.pos == self.src.len()).unwrap_or(tok);
        tok.parse::<f64>().map(Some).map_err(|_| self.err(format!("bad number {tok:?}")))
    }

    fn variable(&mut self, bits: usize) -> Result<Option<u32>, HuboError> {
        let global = match self.peek() {
            Some(b'b') => false,
            Some(b'x') => true,
            _ => return Ok(None),
        };
        self.pos += 1;
        self.expect(b'_')?;
        let index = if global {
            if self.peek() == Some(b'{') {
                self.pos += 1;
                let k = self.number()?;
                self.expect(b'}')?;
                k
            } else {
                self.number()?
            }
        } else {
            let (i, j) = if self.peek() == Some(b'{') {
                self.pos += 1;
                let at = self.pos;
                let d = self.digits();
                let pair = if self.peek() == Some(b',') {
                    let i =
                        std::str::from_utf8(d).unwrap().parse::<usize>().map_err(|_| self.err("bad torsion index"))?;
                    self.pos += 1;
                    (i, self.number()?)
                } else if d.len() == 2 {
                    (usize::from(d[0] - b'0'), usize::from(d[1] - b'0'))
                } else {
                    self.pos = at;
                    return Err(self.err("brace index needs two digits or 'I,J'"));
                };
                self.expect(b'}')?;
                pair
            } else {
                let i = self.number()?;
                self.expect(b'_')?;
                (i, self.number()?)
            };
            if j >= bits {
                return Err(self.err(format!("bit index {j} >= bits per torsion {bits}")));
            }
            i * bits + j
        };
        u32::try_from(index).map(Some).map_err(|_| self.err("variable index too large"))
    }
}

/// A final period is punctuation only after a variable, not after a number.
fn ends_with_variable(body: &str) -> bool {
    let trimmed = body.trim_end_matches(|c: char| c.is_ascii_digit());
    body.ends_with('}') || (trimmed.len() < body.len() && trimmed.ends_with('_'))
}

/// `bits_per_torsion` resolves `b_IJ` to `I·bits + J`; the result has
/// `max index + 1` variables.
pub fn parse_poly_text(text: &str, domain: Domain, bits_per_torsion: usize) -> Result<Polynomial, HuboError> {
    if bits_per_torsion == 0 {
        return Err(HuboError::Parse { pos: 0, msg: "bits per torsion must be positive".into() });
    }
    let base = text.find('=').map_or(0, |p| p + 1);
    let body = text[base..].trim_end();
    let body = body.strip_suffix('.').filter(|b| ends_with_variable(b)).unwrap_or(body);
    let mut cur = Cursor { src: body.as_bytes(), pos: 0, base };
    let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut first = true;
    loop {
        cur.skip_noise();
        if cur.peek().is_none() {
            break;
        }
        let mut sign = 1.0;
        match cur.peek() {
            Some(b'+') => cur.pos += 1,
            Some(b'-') => {
                sign = -1.0;
                cur.pos += 1;
            }
            _ if !first => return Err(cur.err("expected '+' or '-' between terms")),
            _ => {}
        }
        first = false;
        cur.skip_noise();
        let coeff = cur.coefficient()?;
        let mut vars = Vec::new();
        loop {
            cur.skip_noise();
            match cur.variable(bits_per_torsion)? {
                Some(v) => vars.push(v),
                None => break,
            }
        }
        if coeff.is_none() && vars.is_empty() {
            return Err(cur.err("expected a coefficient or variable"));
        }
        let c = sign * coeff.unwrap_or(1.0);
        if !c.is_finite() {
            return Err(cur.err("non-finite coefficient"));
        }
        terms.push((vars, c));
    }
    let num_vars = terms.iter().flat_map(|(v, _)| v.iter()).max().map_or(0, |&m| m as usize + 1);
    let mut p = Polynomial::zero(domain, num_vars);
    for (vars, c) in terms {
        p.add_term(Monomial::from_vars(domain, vars), c);
    }
    Ok(p)
}

/// Canonical term order; `b_I_J` names with a registry, `x_K` without.
pub fn write_poly_text(p: &Polynomial, registry: Option<&VariableRegistry>) -> String {
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let sign = if c < 0.0 { '-' } else { '+' };
        if k == 0 {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let _ = write!(out, "{}", c.abs());
        for &v in m.vars() {
            match registry {
                Some(r) => {
                    let _ = write!(out, " {}", r.name(v));
                }
                None => {
                    let _ = write!(out, " x_{v}");
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingKind;

    #[test]
    fn forms_agree() {
        let a = parse_poly_text("1.5 b_{01} b_{12} - x_2", Domain::Spin, 3).unwrap();
        let b = parse_poly_text("1.5*b_0_1*b_1_2 - 1 x_{2}", Domain::Spin, 3).unwrap();
        let c = parse_poly_text("O = +1.5 b_{0,1} b_{1,2} -x_2.", Domain::Spin, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.coefficient(&Monomial::from_vars(Domain::Spin, [1, 5])), 1.5);
    }

    #[test]
    fn reduction_on_parse() {
        let p = parse_poly_text("2 x_0 x_0 + 1e-3 x_1", Domain::Spin, 1).unwrap();
        assert_eq!(p.constant_term(), 2.0);
        assert_eq!(p.coefficient(&Monomial::var(1)), 1e-3);
    }

    #[test]
    fn errors() {
        assert!(parse_poly_text("1 + ", Domain::Spin, 2).is_err());
        assert!(parse_poly_text("b_{03}", Domain::Spin, 3).is_err());
        assert!(parse_poly_text("1 2", Domain::Spin, 3).is_err());
        assert!(parse_poly_text("b_{123}", Domain::Spin, 3).is_err());
        assert!(parse_poly_text("q_1", Domain::Spin, 3).is_err());
    }

    #[test]
    fn writer_round_trips() {
        let p = Polynomial::from_terms(Domain::Boolean, 6, [(vec![], -3.25), (vec![0, 4], 0.1), (vec![2], -1e-7)]);
        let reg = VariableRegistry::new(EncodingKind::Phase, 2, 8).unwrap();
        for r in [None, Some(&reg)] {
            let text = write_poly_text(&p, r);
            let mut back = parse_poly_text(&text, Domain::Boolean, 3).unwrap();
            back.set_num_vars(6);
            assert_eq!(back, p, "{text}");
        }
        assert_eq!(write_poly_text(&Polynomial::zero(Domain::Spin, 0), None), "0");
    }
}
