#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::qaoa::{parse_gate_list, write_gate_list};

fuzz_target!(|data: &str| {
    if let Ok(list) = parse_gate_list(data) {
        let back = parse_gate_list(&write_gate_list(&list)).expect("written gate list parses");
        assert_eq!(back.gates.len(), list.gates.len());
        assert_eq!(back.n_qubits, list.n_qubits);
    }
});
