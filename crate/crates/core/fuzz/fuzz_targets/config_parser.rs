#![no_main]

use libfuzzer_sys::fuzz_target;
use spinquant::config::validate_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        // any accepted config renders back to text that parses to the same value
        if let Ok(cfg) = validate_config(s) {
            let again = validate_config(&cfg.to_text()).expect("rendered config parses");
            assert_eq!(cfg, again);
        }
    }
});
