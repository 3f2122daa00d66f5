//! Replays the checked-in fuzz corpus through the same entry points and
//! round-trip checks as the fuzz targets, on a stable toolchain.

use std::path::{Path, PathBuf};

use molunfold::encoding::PhaseCode;
use molunfold::hubo::{from_json, parse_poly_text, to_json, write_poly_text};
use molunfold::molgraph::{
    decompose_fragments, detect_rotatable_bonds, parse_mol_v2000, parse_molecule, parse_xyz_bonds, write_mol_v2000,
    write_xyz_bonds,
};
use molunfold::qaoa::{parse_gate_list, write_gate_list};
use molunfold::Domain;

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut v: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    assert!(!v.is_empty(), "no seeds for {target}");
    v
}

fn text(p: &Path) -> String {
    String::from_utf8_lossy(&std::fs::read(p).unwrap()).into_owned()
}

#[test]
fn molfile_seeds() {
    let mut ok = 0;
    for p in seeds("parse_molfile") {
        if let Ok(mol) = parse_mol_v2000(&text(&p)) {
            let _ = decompose_fragments(&mol, &detect_rotatable_bonds(&mol));
            let back = parse_mol_v2000(&write_mol_v2000(&mol)).unwrap();
            assert_eq!(back.atom_count(), mol.atom_count());
            assert_eq!(back.bonds().len(), mol.bonds().len());
            ok += 1;
        }
    }
    assert!(ok > 0);
}

#[test]
fn xyz_seeds() {
    let mut results = Vec::new();
    for p in seeds("parse_xyz") {
        let r = parse_xyz_bonds(&text(&p));
        if let Ok(mol) = &r {
            let back = parse_xyz_bonds(&write_xyz_bonds(mol)).unwrap();
            assert_eq!(back.bonds(), mol.bonds());
        }
        results.push(r.is_ok());
    }
    assert!(results.contains(&true) && results.contains(&false));
}

#[test]
fn molecule_seeds() {
    for p in seeds("parse_molecule") {
        let mol = parse_molecule(&text(&p)).unwrap();
        let fd = decompose_fragments(&mol, &detect_rotatable_bonds(&mol)).unwrap();
        assert_eq!(fd.atom_count(), mol.atom_count());
    }
}

#[test]
fn hubo_json_seeds() {
    for p in seeds("hubo_json") {
        let (poly, reg) = from_json(&text(&p)).unwrap();
        let (back, _) = from_json(&to_json(&poly, reg.as_ref())).unwrap();
        assert_eq!(back, poly);
    }
}

#[test]
fn poly_text_seeds() {
    for p in seeds("poly_text") {
        let data = std::fs::read(&p).unwrap();
        let (&head, rest) = data.split_first().unwrap();
        let domain = if head & 1 == 0 { Domain::Spin } else { Domain::Boolean };
        let bits = usize::from(head >> 1) % 16 + 1;
        let poly = parse_poly_text(std::str::from_utf8(rest).unwrap(), domain, bits)
            .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let mut back = parse_poly_text(&write_poly_text(&poly, None), domain, 1).unwrap();
        back.set_num_vars(poly.num_vars());
        assert_eq!(back, poly);
    }
}

#[test]
fn gate_list_seeds() {
    for p in seeds("gate_list") {
        let list = parse_gate_list(&text(&p)).unwrap();
        let back = parse_gate_list(&write_gate_list(&list)).unwrap();
        assert_eq!(back.gates, list.gates);
        assert_eq!(back.n_qubits, list.n_qubits);
    }
}

#[test]
fn phase_code_seeds() {
    let mut valid = 0;
    for p in seeds("phase_code_json") {
        if let Ok(code) = PhaseCode::from_json(&text(&p)) {
            let back = PhaseCode::from_json(&code.to_json()).unwrap();
            assert_eq!(back.correspondence(), code.correspondence());
            valid += 1;
        }
    }
    assert_eq!(valid, 1);
}
