#![no_main]

use libfuzzer_sys::fuzz_target;
use molunfold::hubo::{parse_poly_text, write_poly_text};
use molunfold::Domain;

fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let domain = if head & 1 == 0 { Domain::Spin } else { Domain::Boolean };
    let bits = usize::from(head >> 1) % 16 + 1;
    if let Ok(poly) = parse_poly_text(text, domain, bits) {
        if poly.terms().all(|(_, c)| c.is_finite()) {
            let mut back = parse_poly_text(&write_poly_text(&poly, None), domain, 1).expect("written text parses");
            back.set_num_vars(poly.num_vars());
            assert_eq!(back, poly);
        }
    }
});
