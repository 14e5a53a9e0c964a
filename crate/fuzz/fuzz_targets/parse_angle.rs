#![no_main]

use libfuzzer_sys::fuzz_target;
use rindler_noise::cli::parse_angle;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = parse_angle(text) {
            assert!(r.is_finite());
        }
    }
});
