#![no_main]

use libfuzzer_sys::fuzz_target;
use rindler_noise::cli::parse_value_grid;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = parse_value_grid(text) {
            assert!(!values.is_empty());
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
