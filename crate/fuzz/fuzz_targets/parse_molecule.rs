#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::molgraph::{decompose_fragments, detect_rotatable_bonds, parse_molecule};

fuzz_target!(|data: &str| {
    if let Ok(mol) = parse_molecule(data) {
        let rbs = detect_rotatable_bonds(&mol);
        if let Ok(fd) = decompose_fragments(&mol, &rbs) {
            assert_eq!(fd.atom_count(), mol.atom_count());
            assert!(fd.fragment_count() >= 1);
        }
        let _ = mol.without_hydrogens();
    }
});
