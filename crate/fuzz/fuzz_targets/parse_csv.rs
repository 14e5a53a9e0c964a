#![no_main]

use libfuzzer_sys::fuzz_target;
use rindler_noise::sweep::{parse_csv, write_csv_to};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(records) = parse_csv(text) else { return };
    // whatever parses must survive a write/parse round trip
    let mut out = Vec::new();
    write_csv_to(&records, &mut out).unwrap();
    let again = parse_csv(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(again.len(), records.len());
});
