//! Replays the checked-in fuzz seed corpora through the fuzz targets' properties, so the seeds and
//! the invariants stay exercised on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use spinquant::config::{parse_tau_list, validate_config};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fuzz", "corpus", target]
        .iter()
        .collect();
    let mut v: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    assert!(!v.is_empty());
    v
}

#[test]
fn config_seeds_round_trip_when_accepted() {
    let mut accepted = 0;
    for (name, text) in seeds("config_parser") {
        if let Ok(cfg) = validate_config(&text) {
            accepted += 1;
            assert_eq!(validate_config(&cfg.to_text()).unwrap(), cfg, "{name}");
        }
    }
    // the corpus holds both valid and invalid files
    assert!(accepted >= 3, "{accepted}");
}

#[test]
fn tau_list_seeds_yield_positive_times_when_accepted() {
    let mut accepted = 0;
    for (name, text) in seeds("tau_list") {
        if let Ok(taus) = parse_tau_list(&text) {
            accepted += 1;
            assert!(
                !taus.is_empty() && taus.iter().all(|t| t.is_finite() && *t > 0.0),
                "{name}"
            );
        }
    }
    assert!(accepted >= 3, "{accepted}");
}
