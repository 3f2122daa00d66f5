//! Molecule graphs: parsing, ring perception, rotatable bonds and the rigid
//! fragment tree they induce.

mod molfile;
pub(crate) mod topology;
mod xyz;

use std::path::Path;

use thiserror::Error;

use crate::geom::{Conformation, Vec3};

pub use molfile::{parse_mol_v2000, write_mol_v2000};
pub use topology::{
    cross_fragment_pairs, decompose_fragments, detect_rotatable_bonds, edge_betweenness, torsion_path,
    FragmentDecomposition, PathStep, RotatableBond, TorsionPath,
};
pub use xyz::{parse_xyz_bonds, write_xyz_bonds};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MolError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("molecule has no atoms")]
    Empty,
    #[error("atom {atom}: non-finite coordinate")]
    NonFinite { atom: usize },
    #[error("bond {bond}: atom index {index} out of range for {atoms} atoms")]
    IndexOutOfRange { bond: usize, index: usize, atoms: usize },
    #[error("bond {bond}: both ends are atom {atom}")]
    SelfBond { bond: usize, atom: usize },
    #[error("bond {bond}: duplicates an earlier bond between {a} and {b}")]
    DuplicateBond { bond: usize, a: usize, b: usize },
    #[error("bond {bond}: order must be at least 1")]
    ZeroOrder { bond: usize },
    #[error("molecule graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("V3000 molfiles are not supported")]
    UnsupportedV3000,
    #[error("no bond between atoms {a} and {b}")]
    NoSuchBond { a: usize, b: usize },
    #[error("bond {bond} ({a}-{b}) lies on a ring; cutting it does not split the molecule")]
    NotABridge { bond: usize, a: usize, b: usize },
    #[error("rotatable bond {bond} listed twice")]
    RepeatedTorsion { bond: usize },
    #[error("atoms {alpha} and {beta} are in the same fragment")]
    SameFragment { alpha: usize, beta: usize },
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: String,
    pub position: Vec3,
}

impl Atom {
    pub fn new(element: impl Into<String>, position: Vec3) -> Self {
        Self { element: element.into(), position }
    }

    pub fn is_hydrogen(&self) -> bool {
        matches!(self.element.as_str(), "H" | "D" | "T")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u8,
    /// Set by ring perception: true when the bond lies on a cycle.
    pub in_ring: bool,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: u8) -> Self {
        Self { a, b, order, in_ring: false }
    }

    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// A connected atom/bond graph with 3D coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub name: String,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: `(neighbor, bond index)`.
    adjacency: Vec<Vec<(usize, usize)>>,
    rotatable_override: Option<Vec<usize>>,
}

impl Molecule {
    /// Validates the graph, fills the adjacency lists and marks ring bonds.
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, MolError> {
        if atoms.is_empty() {
            return Err(MolError::Empty);
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !atom.position.iter().all(|c| c.is_finite()) {
                return Err(MolError::NonFinite { atom: i });
            }
        }
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for (i, bond) in bonds.iter().enumerate() {
            for index in [bond.a, bond.b] {
                if index >= n {
                    return Err(MolError::IndexOutOfRange { bond: i, index, atoms: n });
                }
            }
            if bond.a == bond.b {
                return Err(MolError::SelfBond { bond: i, atom: bond.a });
            }
            if bond.order == 0 {
                return Err(MolError::ZeroOrder { bond: i });
            }
            if !seen.insert((bond.a.min(bond.b), bond.a.max(bond.b))) {
                return Err(MolError::DuplicateBond { bond: i, a: bond.a, b: bond.b });
            }
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        let mut mol = Self { name: name.into(), atoms, bonds, adjacency, rotatable_override: None };
        let components = mol.component_count(&[]);
        if components != 1 {
            return Err(MolError::Disconnected { components });
        }
        let bridges = topology::bridges(&mol);
        for (bond, is_bridge) in mol.bonds.iter_mut().zip(bridges) {
            bond.in_ring = !is_bridge;
        }
        Ok(mol)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.atoms.iter().map(|a| a.position).collect()
    }

    pub fn conformation(&self) -> Conformation {
        Conformation::new(self.positions())
    }

    pub fn find_bond(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency.get(a)?.iter().find(|(nb, _)| *nb == b).map(|&(_, bond)| bond)
    }

    /// Explicit rotatable bonds (indices into `bonds`) supplied by the input file.
    pub fn rotatable_override(&self) -> Option<&[usize]> {
        self.rotatable_override.as_deref()
    }

    /// Replaces rotatable-bond detection with an explicit atom-pair list.
    pub fn set_rotatable_override(&mut self, pairs: &[(usize, usize)]) -> Result<(), MolError> {
        let mut bonds = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let bond = self.find_bond(a, b).ok_or(MolError::NoSuchBond { a, b })?;
            if bonds.contains(&bond) {
                return Err(MolError::RepeatedTorsion { bond });
            }
            bonds.push(bond);
        }
        self.rotatable_override = Some(bonds);
        Ok(())
    }

    pub fn clear_rotatable_override(&mut self) {
        self.rotatable_override = None;
    }

    /// Same graph, new coordinates.
    pub fn with_conformation(&self, conf: &Conformation) -> Molecule {
        assert_eq!(conf.len(), self.atoms.len(), "conformation length mismatch");
        let mut out = self.clone();
        for (atom, p) in out.atoms.iter_mut().zip(conf.positions()) {
            atom.position = *p;
        }
        out
    }

    /// Drops hydrogens (and bonds to them). An override list survives when
    /// none of its bonds touch a hydrogen.
    pub fn without_hydrogens(&self) -> Result<Molecule, MolError> {
        let mut map = vec![usize::MAX; self.atoms.len()];
        let mut atoms = Vec::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if !atom.is_hydrogen() {
                map[i] = atoms.len();
                atoms.push(atom.clone());
            }
        }
        let mut bonds = Vec::new();
        let mut bond_map = vec![usize::MAX; self.bonds.len()];
        for (i, bond) in self.bonds.iter().enumerate() {
            if map[bond.a] != usize::MAX && map[bond.b] != usize::MAX {
                bond_map[i] = bonds.len();
                bonds.push(Bond::new(map[bond.a], map[bond.b], bond.order));
            }
        }
        let mut mol = Molecule::new(self.name.clone(), atoms, bonds)?;
        if let Some(over) = &self.rotatable_override {
            if over.iter().all(|&b| bond_map[b] != usize::MAX) {
                mol.rotatable_override = Some(over.iter().map(|&b| bond_map[b]).collect());
            }
        }
        Ok(mol)
    }

    /// Number of connected components after deleting the given bonds.
    pub fn component_count(&self, removed: &[usize]) -> usize {
        self.components(removed).1
    }

    /// Component labels after deleting the given bonds; labels are assigned in
    /// order of each component's lowest atom index.
    pub fn components(&self, removed: &[usize]) -> (Vec<usize>, usize) {
        let n = self.atoms.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, bond) in &self.adjacency[u] {
                    if label[v] == usize::MAX && !removed.contains(&bond) {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

/// Parses either format, sniffing a V2000/V3000 counts line on line 4.
pub fn parse_molecule(text: &str) -> Result<Molecule, MolError> {
    let counts = text.lines().nth(3).unwrap_or("");
    if counts.contains("V2000") || counts.contains("V3000") {
        parse_mol_v2000(text)
    } else {
        parse_xyz_bonds(text)
    }
}

pub fn read_molecule(path: impl AsRef<Path>) -> Result<Molecule, MolError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| MolError::Io(format!("{}: {e}", path.display())))?;
    let mut mol = parse_molecule(&text)?;
    if mol.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            mol.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(mol)
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> MolError {
    MolError::Parse { line, msg: msg.into() }
}

/// `ROTATABLE a b` sidecar line, 0-based atom indices.
pub(crate) fn parse_rotatable_line(line: &str, line_no: usize) -> Result<Option<(usize, usize)>, MolError> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("ROTATABLE") {
        return Ok(None);
    }
    let mut index = || -> Result<usize, MolError> {
        tokens
            .next()
            .ok_or_else(|| parse_err(line_no, "ROTATABLE needs two atom indices"))?
            .parse()
            .map_err(|_| parse_err(line_no, "ROTATABLE index is not an integer"))
    };
    let a = index()?;
    let b = index()?;
    Ok(Some((a, b)))
}

pub(crate) fn apply_override(mol: &mut Molecule, pairs: &[(usize, usize, usize)]) -> Result<(), MolError> {
    if pairs.is_empty() {
        return Ok(());
    }
    for &(a, b, line) in pairs {
        if mol.find_bond(a, b).is_none() {
            return Err(parse_err(line, format!("ROTATABLE {a} {b}: no such bond")));
        }
    }
    let plain: Vec<_> = pairs.iter().map(|&(a, b, _)| (a, b)).collect();
    mol.set_rotatable_override(&plain).map_err(|e| parse_err(pairs[0].2, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(x: f64) -> Atom {
        Atom::new("C", Vec3::new(x, 0.0, 0.0))
    }

    #[test]
    fn rejects_disconnected_graph() {
        let err = Molecule::new("x", vec![atom(0.0), atom(1.0), atom(2.0)], vec![Bond::new(0, 1, 1)]).unwrap_err();
        assert_eq!(err, MolError::Disconnected { components: 2 });
    }

    #[test]
    fn rejects_bad_bonds() {
        let atoms = vec![atom(0.0), atom(1.0)];
        assert!(matches!(Molecule::new("x", atoms.clone(), vec![Bond::new(0, 0, 1)]), Err(MolError::SelfBond { .. })));
        assert!(matches!(
            Molecule::new("x", atoms.clone(), vec![Bond::new(0, 1, 1), Bond::new(1, 0, 2)]),
            Err(MolError::DuplicateBond { .. })
        ));
        assert!(matches!(Molecule::new("x", atoms, vec![Bond::new(0, 1, 0)]), Err(MolError::ZeroOrder { .. })));
        assert_eq!(Molecule::new("x", vec![], vec![]).unwrap_err(), MolError::Empty);
    }

    #[test]
    fn hydrogen_stripping_keeps_heavy_skeleton() {
        let atoms = vec![atom(0.0), atom(1.5), Atom::new("H", Vec3::new(-1.0, 0.0, 0.0))];
        let mol = Molecule::new("x", atoms, vec![Bond::new(0, 1, 1), Bond::new(0, 2, 1)]).unwrap();
        let heavy = mol.without_hydrogens().unwrap();
        assert_eq!(heavy.atom_count(), 2);
        assert_eq!(heavy.bonds().len(), 1);
    }
}
