#![no_main]

use libfuzzer_sys::fuzz_target;
use spinquant::config::parse_tau_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(taus) = parse_tau_list(s) {
            assert!(!taus.is_empty());
            assert!(taus.iter().all(|t| t.is_finite() && *t > 0.0));
        }
    }
});
