#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::hubo::{from_json, term_stats, to_json};

fuzz_target!(|data: &str| {
    if let Ok((poly, registry)) = from_json(data) {
        let _ = term_stats(&poly);
        let (back, _) = from_json(&to_json(&poly, registry.as_ref())).expect("written HUBO parses");
        assert_eq!(back.len(), poly.len());
        assert_eq!(back.num_vars(), poly.num_vars());
    }
});
