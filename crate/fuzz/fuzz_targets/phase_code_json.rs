#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::encoding::PhaseCode;

fuzz_target!(|data: &str| {
    if let Ok(code) = PhaseCode::from_json(data) {
        let mut seen = vec![false; code.grid_size()];
        for &k in code.correspondence() {
            assert!(!seen[k]);
            seen[k] = true;
        }
        let back = PhaseCode::from_json(&code.to_json()).expect("written code parses");
        assert_eq!(back.correspondence(), code.correspondence());
    }
});
