//! Gate-level cost layer: each `Z_S` rotation as a CNOT ladder around one RZ.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{QaoaError, Statevector};
use crate::hubo::{Monomial, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    /// `e^{−iθX/2}`
    Rx(usize, f64),
    /// `e^{−iθZ/2}`
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => q,
            Gate::Cnot { control, target } => control.max(target),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateList {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// Applied as `e^{i·global_phase}`.
    pub global_phase: f64,
}

impl GateList {
    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn rz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Rz(..))).count()
    }

    pub fn extend(&mut self, other: GateList) {
        self.n_qubits = self.n_qubits.max(other.n_qubits);
        self.gates.extend(other.gates);
        self.global_phase += other.global_phase;
    }
}

/// `e^{iγ Z_S}` for the term's qubits `S`: CNOT ladder onto the last qubit,
/// `RZ(−2γ)`, and the mirrored ladder. The empty term is a global phase.
pub fn decompose_term(term: &Monomial, gamma: f64) -> GateList {
    let q = term.vars();
    let Some(&last) = q.last() else {
        return GateList { n_qubits: 0, gates: Vec::new(), global_phase: gamma };
    };
    let ladder: Vec<Gate> =
        q.windows(2).map(|w| Gate::Cnot { control: w[0] as usize, target: w[1] as usize }).collect();
    let mut gates = ladder.clone();
    gates.push(Gate::Rz(last as usize, -2.0 * gamma));
    gates.extend(ladder.into_iter().rev());
    GateList { n_qubits: last as usize + 1, gates, global_phase: 0.0 }
}

/// `e^{−iγ H}` for the spin polynomial `H`, term by term.
pub fn cost_layer_circuit(p: &Polynomial, gamma: f64) -> GateList {
    let mut out = GateList { n_qubits: p.num_vars(), ..GateList::default() };
    for (m, c) in p.terms() {
        out.extend(decompose_term(m, -gamma * c));
    }
    out
}

fn pairs(sv: &mut Statevector, q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
    let bit = 1usize << q;
    for block in sv.amplitudes_mut().chunks_mut(2 * bit) {
        let (lo, hi) = block.split_at_mut(bit);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

pub fn apply_gate(sv: &mut Statevector, gate: &Gate) -> Result<(), QaoaError> {
    let n = sv.n_qubits();
    if gate.max_qubit() >= n {
        return Err(QaoaError::QubitOutOfRange { qubit: gate.max_qubit(), n_qubits: n });
    }
    match *gate {
        Gate::H(q) => pairs(sv, q, |a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * FRAC_1_SQRT_2;
            *b = (x - y) * FRAC_1_SQRT_2;
        }),
        Gate::Rx(q, theta) => {
            let (c, s) = ((theta / 2.0).cos(), Complex64::new(0.0, -(theta / 2.0).sin()));
            pairs(sv, q, |a, b| {
                let (x, y) = (*a, *b);
                *a = x * c + y * s;
                *b = x * s + y * c;
            })
        }
        Gate::Rz(q, theta) => {
            let (p0, p1) = (Complex64::from_polar(1.0, -theta / 2.0), Complex64::from_polar(1.0, theta / 2.0));
            pairs(sv, q, |a, b| {
                *a *= p0;
                *b *= p1;
            })
        }
        Gate::Cnot { control, target } => {
            if control == target {
                return Err(QaoaError::SameQubit(control));
            }
            let (cb, tb) = (1usize << control, 1usize << target);
            let amps = sv.amplitudes_mut();
            for z in 0..amps.len() {
                if z & cb != 0 && z & tb == 0 {
                    amps.swap(z, z | tb);
                }
            }
        }
    }
    Ok(())
}

pub fn apply_gates(sv: &mut Statevector, list: &GateList) -> Result<(), QaoaError> {
    for g in &list.gates {
        apply_gate(sv, g)?;
    }
    if list.global_phase != 0.0 {
        let ph = Complex64::from_polar(1.0, list.global_phase);
        sv.amplitudes_mut().iter_mut().for_each(|a| *a *= ph);
    }
    Ok(())
}

/// One gate per line (`H q`, `RX q θ`, `RZ q θ`, `CNOT c t`) after a
/// `# qubits N` / `# global_phase φ` header.
pub fn write_gate_list(list: &GateList) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits {}", list.n_qubits);
    if list.global_phase != 0.0 {
        let _ = writeln!(out, "# global_phase {:?}", list.global_phase);
    }
    for g in &list.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(out, "H {q}"),
            Gate::Rx(q, t) => writeln!(out, "RX {q} {t:?}"),
            Gate::Rz(q, t) => writeln!(out, "RZ {q} {t:?}"),
            Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
        };
    }
    out
}

/// Blank lines and other `#` comments are ignored; without a `# qubits`
/// header the width is the largest index plus one.
pub fn parse_gate_list(text: &str) -> Result<GateList, QaoaError> {
    let mut declared = None;
    let mut list = GateList::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| QaoaError::Parse { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let qubit = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad qubit index {s:?}")));
        let angle = |s: &str| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(err(format!("bad angle {s:?}"))),
        };
        if toks[0].starts_with('#') {
            match toks.as_slice() {
                ["#", "qubits", n] | ["#qubits", n] => declared = Some(qubit(n)?),
                ["#", "global_phase", p] | ["#global_phase", p] => list.global_phase += angle(p)?,
                _ => {}
            }
            continue;
        }
        let gate = match toks.as_slice() {
            ["H", q] => Gate::H(qubit(q)?),
            ["RX", q, t] => Gate::Rx(qubit(q)?, angle(t)?),
            ["RZ", q, t] => Gate::Rz(qubit(q)?, angle(t)?),
            ["CNOT", c, t] => {
                let (control, target) = (qubit(c)?, qubit(t)?);
                if control == target {
                    return Err(err(format!("CNOT control and target are both {control}")));
                }
                Gate::Cnot { control, target }
            }
            _ => return Err(err(format!("unrecognized gate line {line:?}"))),
        };
        if let Some(n) = declared {
            if gate.max_qubit() >= n {
                return Err(err(format!("qubit {} out of range for {n} qubits", gate.max_qubit())));
            }
        }
        list.gates.push(gate);
    }
    let used = list.gates.iter().map(|g| g.max_qubit() + 1).max().unwrap_or(0);
    list.n_qubits = declared.unwrap_or(used);
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubo::Domain;
    use crate::qaoa::build_diagonal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
        let amps = (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Statevector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn gate_counts() {
        for k in 1..=5u32 {
            let list = decompose_term(&Monomial::from_vars(Domain::Spin, 0..k), 0.3);
            assert_eq!(list.cnot_count(), 2 * (k as usize - 1));
            assert_eq!(list.rz_count(), 1);
        }
        let empty = decompose_term(&Monomial::one(), 0.4);
        assert!(empty.gates.is_empty());
        assert_eq!(empty.global_phase, 0.4);
    }

    #[test]
    fn term_matches_direct_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = Monomial::from_vars(Domain::Spin, [0, 2, 3]);
        let gamma = 0.77;
        let sv = random_state(4, &mut rng);
        let mut via_gates = sv.clone();
        apply_gates(&mut via_gates, &decompose_term(&m, gamma)).unwrap();
        for (z, (a, b)) in sv.amplitudes().iter().zip(via_gates.amplitudes()).enumerate() {
            let parity = [0, 2, 3].iter().filter(|&&q| z >> q & 1 == 1).count() % 2;
            let zval = if parity == 0 { 1.0 } else { -1.0 };
            assert!((a * Complex64::from_polar(1.0, gamma * zval) - b).norm() < 1e-12);
        }
    }

    #[test]
    fn full_cost_circuit_matches_elementwise() {
        let p = Polynomial::from_terms(
            Domain::Spin,
            5,
            [(vec![], 0.3), (vec![0, 4], -1.2), (vec![1, 2, 3], 0.4), (vec![2], 2.0)],
        );
        let h = build_diagonal(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sv = random_state(5, &mut rng);
        let mut fast = sv.clone();
        fast.apply_cost(&h, 0.61);
        let mut slow = sv;
        apply_gates(&mut slow, &cost_layer_circuit(&p, 0.61)).unwrap();
        for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn mixer_gates_match_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sv = random_state(3, &mut rng);
        let mut a = sv.clone();
        a.apply_mixer(0.9);
        let mut b = sv;
        for q in 0..3 {
            apply_gate(&mut b, &Gate::Rx(q, 1.8)).unwrap();
        }
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let mut list = decompose_term(&Monomial::from_vars(Domain::Spin, [1, 3]), 0.25);
        list.gates.insert(0, Gate::H(0));
        list.gates.push(Gate::Rx(2, -1.5));
        list.global_phase = 0.125;
        let back = parse_gate_list(&write_gate_list(&list)).unwrap();
        assert_eq!(back, list);
        assert!(parse_gate_list("CNOT 1 1").is_err());
        assert!(parse_gate_list("# qubits 2\nH 2").is_err());
        assert!(matches!(parse_gate_list("H 0\nFOO 1"), Err(QaoaError::Parse { line: 2, .. })));
        assert!(apply_gate(&mut Statevector::uniform(2), &Gate::H(2)).is_err());
    }
}
