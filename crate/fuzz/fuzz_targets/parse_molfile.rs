#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::molgraph::{decompose_fragments, detect_rotatable_bonds, parse_mol_v2000, write_mol_v2000};

fuzz_target!(|data: &str| {
    if let Ok(mol) = parse_mol_v2000(data) {
        let rbs = detect_rotatable_bonds(&mol);
        let _ = decompose_fragments(&mol, &rbs);
        let back = parse_mol_v2000(&write_mol_v2000(&mol)).expect("written molfile parses");
        assert_eq!(back.atom_count(), mol.atom_count());
        assert_eq!(back.bonds().len(), mol.bonds().len());
    }
});
