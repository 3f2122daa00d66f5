#![allow(dead_code)]

use std::path::{Path, PathBuf};

use molunfold::molgraph::{decompose_fragments, detect_rotatable_bonds, read_molecule};
use molunfold::{FragmentDecomposition, Molecule};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/molecules")
}

pub fn load(name: &str) -> (Molecule, FragmentDecomposition) {
    let mol = read_molecule(data_dir().join(format!("{name}.mol"))).unwrap();
    let fd = decompose_fragments(&mol, &detect_rotatable_bonds(&mol)).unwrap();
    (mol, fd)
}

/// Every fixture, sorted by name, with its decomposition.
pub fn all() -> Vec<(String, Molecule, FragmentDecomposition)> {
    let mut names: Vec<String> = std::fs::read_dir(data_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "mol").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let (m, f) = load(&n);
            (n, m, f)
        })
        .collect()
}

pub fn with_torsions(range: std::ops::RangeInclusive<usize>) -> Vec<(String, Molecule, FragmentDecomposition)> {
    all().into_iter().filter(|(_, _, fd)| range.contains(&fd.torsion_count())).collect()
}
