#![no_main]

use libfuzzer_sys::fuzz_target;
use rindler_noise::channels::{ChannelKind, Coupling, GlobalMode, Variant};
use rindler_noise::sweep::{Axis, Figure};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(k) = text.parse::<ChannelKind>() {
        assert_eq!(k.as_str().parse::<ChannelKind>().ok(), Some(k));
    }
    if let Ok(c) = text.parse::<Coupling>() {
        assert_eq!(c.as_str().parse::<Coupling>().ok(), Some(c));
    }
    if let Ok(m) = text.parse::<GlobalMode>() {
        assert_eq!(m.as_str().parse::<GlobalMode>().ok(), Some(m));
    }
    if let Ok(v) = text.parse::<Variant>() {
        assert_eq!(v.as_str().parse::<Variant>().ok(), Some(v));
    }
    if let Ok(f) = text.parse::<Figure>() {
        assert_eq!(f.name().parse::<Figure>().ok(), Some(f));
    }
    let _ = text.parse::<Axis>();
});
