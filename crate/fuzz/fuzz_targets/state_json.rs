//! Fuzzes the state JSON parser: must never panic, and accepted inputs must
//! be genuine density matrices within the documented dimension cap.

#![no_main]

use libfuzzer_sys::fuzz_target;

use channel_bounds::entmeasures::parse_state_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rho) = parse_state_json(text) {
        assert!(rho.dim() >= 1 && rho.dim() <= 64);
        assert_eq!(rho.dims().iter().product::<usize>(), rho.dim());
    }
});
