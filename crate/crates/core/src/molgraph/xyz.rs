//! XYZ with an appended bond table.
//!
//! ```text
//! 4
//! comment / molecule name
//! C  0.0 0.0 0.0
//! ...
//!
//! 0 1 1
//! 1 2 2
//! ROTATABLE 0 1
//! ```
//!
//! Bond lines are `a b order` with 0-based atom indices; the order column may
//! be omitted (single bond).

use std::fmt::Write as _;

use super::{apply_override, parse_err, parse_rotatable_line, Atom, Bond, MolError, Molecule};
use crate::geom::Vec3;

pub fn parse_xyz_bonds(text: &str) -> Result<Molecule, MolError> {
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
    let n: usize =
        header.trim().parse().map_err(|_| parse_err(1, format!("expected atom count, found {:?}", header.trim())))?;
    if n == 0 {
        return Err(parse_err(1, "atom count is zero"));
    }
    if lines.len() < n + 2 {
        return Err(parse_err(lines.len().max(1), format!("expected {n} atom lines")));
    }
    let name = lines[1].trim().to_string();

    let mut atoms = Vec::with_capacity(n);
    for (i, line) in lines[2..n + 2].iter().enumerate() {
        let line_no = i + 3;
        let mut tokens = line.split_whitespace();
        let element = tokens.next().ok_or_else(|| parse_err(line_no, "missing atom record"))?;
        let mut coord = || -> Result<f64, MolError> {
            let tok = tokens.next().ok_or_else(|| parse_err(line_no, "expected 3 coordinates"))?;
            let v: f64 = tok.parse().map_err(|_| parse_err(line_no, format!("non-numeric coordinate {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, "non-finite coordinate"));
            }
            Ok(v)
        };
        let position = Vec3::new(coord()?, coord()?, coord()?);
        atoms.push(Atom::new(element, position));
    }

    let mut bonds = Vec::new();
    let mut rotatable = Vec::new();
    for (i, line) in lines[n + 2..].iter().enumerate() {
        let line_no = n + 3 + i;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some((a, b)) = parse_rotatable_line(trimmed, line_no)? {
            rotatable.push((a, b, line_no));
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(parse_err(line_no, "bond line must be `a b [order]`"));
        }
        let index = |tok: &str| -> Result<usize, MolError> {
            let v: usize = tok.parse().map_err(|_| parse_err(line_no, format!("bad atom index {tok:?}")))?;
            if v >= n {
                return Err(parse_err(line_no, format!("atom index {v} out of range for {n} atoms")));
            }
            Ok(v)
        };
        let a = index(tokens[0])?;
        let b = index(tokens[1])?;
        let order = match tokens.get(2) {
            Some(tok) => tok.parse::<u8>().map_err(|_| parse_err(line_no, format!("bad bond order {tok:?}")))?,
            None => 1,
        };
        bonds.push(Bond::new(a, b, order));
    }

    let mut mol = Molecule::new(name, atoms, bonds)?;
    apply_override(&mut mol, &rotatable)?;
    Ok(mol)
}

pub fn write_xyz_bonds(mol: &Molecule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", mol.atom_count());
    let _ = writeln!(out, "{}", mol.name.replace('\n', " "));
    for atom in mol.atoms() {
        let p = atom.position;
        let _ = writeln!(out, "{} {:?} {:?} {:?}", atom.element, p.x, p.y, p.z);
    }
    out.push('\n');
    for bond in mol.bonds() {
        let _ = writeln!(out, "{} {} {}", bond.a, bond.b, bond.order);
    }
    if let Some(over) = mol.rotatable_override() {
        for &b in over {
            let bond = &mol.bonds()[b];
            let _ = writeln!(out, "ROTATABLE {} {}", bond.a, bond.b);
        }
    }
    out
}
