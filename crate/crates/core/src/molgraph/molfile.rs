//! MDL molfile, V2000 connection tables only. SDF input is accepted; only the
//! first record is read.

use std::fmt::Write as _;

use super::{apply_override, parse_err, parse_rotatable_line, Atom, Bond, MolError, Molecule};
use crate::geom::Vec3;

fn field(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    if start >= end {
        return "";
    }
    line.get(start..end).unwrap_or("").trim()
}

fn parse_count(text: &str, line_no: usize, what: &str) -> Result<usize, MolError> {
    text.parse().map_err(|_| parse_err(line_no, format!("bad {what} count {text:?}")))
}

pub fn parse_mol_v2000(text: &str) -> Result<Molecule, MolError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 4 {
        return Err(parse_err(lines.len().max(1), "molfile header needs 4 lines"));
    }
    let name = lines[0].trim().to_string();
    let counts = lines[3];
    if counts.contains("V3000") {
        return Err(MolError::UnsupportedV3000);
    }
    if !counts.is_ascii() {
        return Err(parse_err(4, "counts line is not ASCII"));
    }
    let n_atoms = parse_count(field(counts, 0, 3), 4, "atom")?;
    let n_bonds = parse_count(field(counts, 3, 6), 4, "bond")?;
    if n_atoms == 0 {
        return Err(parse_err(4, "counts line declares 0 atoms"));
    }
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(parse_err(
            lines.len(),
            format!("expected {n_atoms} atom and {n_bonds} bond lines, file ends early"),
        ));
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let line_no = 5 + i;
        let line = lines[4 + i];
        if !line.is_ascii() || line.len() < 32 {
            return Err(parse_err(line_no, "atom line too short"));
        }
        let coord = |start: usize| -> Result<f64, MolError> {
            let tok = field(line, start, start + 10);
            let v: f64 = tok.parse().map_err(|_| parse_err(line_no, format!("non-numeric coordinate {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, "non-finite coordinate"));
            }
            Ok(v)
        };
        let position = Vec3::new(coord(0)?, coord(10)?, coord(20)?);
        let element = field(line, 31, 34);
        if element.is_empty() {
            return Err(parse_err(line_no, "missing element symbol"));
        }
        atoms.push(Atom::new(element, position));
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for i in 0..n_bonds {
        let line_no = 5 + n_atoms + i;
        let line = lines[4 + n_atoms + i];
        if !line.is_ascii() || line.len() < 9 {
            return Err(parse_err(line_no, "bond line too short"));
        }
        let index = |start: usize| -> Result<usize, MolError> {
            let tok = field(line, start, start + 3);
            let v: usize = tok.parse().map_err(|_| parse_err(line_no, format!("bad atom index {tok:?}")))?;
            if v == 0 || v > n_atoms {
                return Err(parse_err(line_no, format!("atom index {v} out of range 1..={n_atoms}")));
            }
            Ok(v - 1)
        };
        let a = index(0)?;
        let b = index(3)?;
        let tok = field(line, 6, 9);
        let order: u8 = tok.parse().map_err(|_| parse_err(line_no, format!("bad bond type {tok:?}")))?;
        // Types 4..8 are query/aromatic codes; treat them as not single.
        bonds.push(Bond::new(a, b, order.max(1)));
    }

    let mut rotatable = Vec::new();
    for (i, line) in lines[4 + n_atoms + n_bonds..].iter().enumerate() {
        let line_no = 5 + n_atoms + n_bonds + i;
        if line.starts_with("$$$$") {
            break;
        }
        if let Some((a, b)) = parse_rotatable_line(line.trim(), line_no)? {
            rotatable.push((a, b, line_no));
        }
    }

    let mut mol = Molecule::new(name, atoms, bonds)?;
    apply_override(&mut mol, &rotatable)?;
    Ok(mol)
}

pub fn write_mol_v2000(mol: &Molecule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", mol.name.replace('\n', " "));
    let _ = writeln!(out, "     molunfold      3D");
    out.push('\n');
    let _ = writeln!(out, "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000", mol.atom_count(), mol.bonds().len());
    for atom in mol.atoms() {
        let p = atom.position;
        let _ = writeln!(
            out,
            "{:>10.4}{:>10.4}{:>10.4} {:<3} 0  0  0  0  0  0  0  0  0  0  0  0",
            p.x, p.y, p.z, atom.element
        );
    }
    for bond in mol.bonds() {
        let _ = writeln!(out, "{:>3}{:>3}{:>3}  0", bond.a + 1, bond.b + 1, bond.order);
    }
    out.push_str("M  END\n");
    if let Some(over) = mol.rotatable_override() {
        for &b in over {
            let bond = &mol.bonds()[b];
            let _ = writeln!(out, "ROTATABLE {} {}", bond.a, bond.b);
        }
    }
    out
}
