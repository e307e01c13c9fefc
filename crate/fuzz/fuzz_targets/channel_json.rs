//! Fuzzes the channel JSON parser: must never panic, and anything it accepts
//! must satisfy the parser's own size and shape limits.

#![no_main]

use libfuzzer_sys::fuzz_target;

use channel_bounds::channels::parse_channel_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_channel_json(text) {
        let ch = &parsed.channel;
        assert!(ch.dim_in() >= 1 && ch.dim_in() <= 64);
        assert!(ch.dim_out() >= 1 && ch.dim_out() <= 64);
        assert!(!ch.kraus_ops().is_empty());
        assert!(parsed.tp_residual.is_finite());
    }
});
