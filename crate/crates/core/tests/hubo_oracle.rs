mod common;

use molunfold::encoding::Encoding;
use molunfold::geom::molecular_volume;
use molunfold::hubo::{build_objective, volume_polynomial, BuildOptions};
use molunfold::{EncodingKind, OneHotCode, VariableRegistry};

fn spins(mask: usize, n: usize) -> Vec<i8> {
    (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect()
}

#[test]
fn phase_objective_matches_geometry_on_every_assignment() {
    let fixtures = common::with_torsions(1..=2);
    assert!(fixtures.len() >= 10);
    for (name, mol, fd) in &fixtures {
        for n in 1..=3 {
            let enc = Encoding::new(EncodingKind::Phase, 1 << n).unwrap();
            let reg = VariableRegistry::for_encoding(&enc, fd.torsion_count());
            let obj = build_objective(mol, fd, &enc, &reg).unwrap();
            for mask in 0..1usize << reg.num_vars() {
                let s = spins(mask, reg.num_vars());
                let vol = molecular_volume(mol, fd, &enc.decode(&s).unwrap()).unwrap();
                let val = obj.evaluate(&s).unwrap();
                assert!((val + vol).abs() <= 1e-6 * (1.0 + vol.abs()), "{name} n={n} mask={mask}: {val} vs {vol}");
            }
        }
    }
}

#[test]
fn onehot_objective_matches_geometry_on_valid_assignments() {
    for (name, mol, fd) in common::with_torsions(1..=2).iter().take(6) {
        let d = 8;
        let enc = Encoding::new(EncodingKind::OneHot, d).unwrap();
        let reg = VariableRegistry::for_encoding(&enc, fd.torsion_count());
        let obj = build_objective(mol, fd, &enc, &reg).unwrap();
        let m = fd.torsion_count();
        for idx in 0..d.pow(m as u32) {
            let ks: Vec<usize> = (0..m).map(|i| idx / d.pow(i as u32) % d).collect();
            let b = enc.encode(&ks);
            let vol = molecular_volume(mol, fd, &enc.decode(&b).unwrap()).unwrap();
            let val = obj.evaluate(&b).unwrap();
            assert!((val + vol).abs() <= 1e-6 * (1.0 + vol.abs()), "{name} {ks:?}: {val} vs {vol}");
        }
    }
}

#[test]
fn parallel_and_sequential_builds_are_identical() {
    let (mol, fd) = common::load("hexane");
    let enc = Encoding::new(EncodingKind::Phase, 16).unwrap();
    let reg = VariableRegistry::for_encoding(&enc, fd.torsion_count());
    let seq = BuildOptions { parallel: false, ..BuildOptions::default() };
    let a = volume_polynomial(&mol, &fd, &enc, &reg, &seq).unwrap();
    let b = volume_polynomial(&mol, &fd, &enc, &reg, &BuildOptions::default()).unwrap();
    assert_eq!(a, b);
    let _ = OneHotCode::new(16).unwrap();
}
