#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::molgraph::{parse_xyz_bonds, write_xyz_bonds};

fuzz_target!(|data: &str| {
    if let Ok(mol) = parse_xyz_bonds(data) {
        let back = parse_xyz_bonds(&write_xyz_bonds(&mol)).expect("written xyz parses");
        assert_eq!(back.atom_count(), mol.atom_count());
        assert_eq!(back.bonds(), mol.bonds());
    }
});
