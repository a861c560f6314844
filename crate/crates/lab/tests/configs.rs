//! The shipped example configs parse and run at low degree.

use std::path::PathBuf;

use sphere_ls_lab::runner::run;
use sphere_ls_lab::ExperimentConfig;

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths
}

#[test]
fn every_shipped_config_runs_at_low_degree() {
    let paths = shipped();
    assert!(paths.len() >= 6);
    for path in paths {
        let mut config = ExperimentConfig::load(&path).unwrap();
        config.degrees = vec![if config.d == 1 { 8 } else { 3 }];
        let rows = run(&config, 1).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!rows.is_empty());
        for r in rows {
            assert!(r.value.is_finite() && r.value >= -1e-12, "{}: {r:?}", path.display());
        }
    }
}

#[test]
fn every_functional_has_an_example() {
    let mut seen = std::collections::BTreeSet::new();
    for path in shipped() {
        let f = ExperimentConfig::load(&path).unwrap().functionals;
        for (name, present) in [
            ("eigen", f.eigen.is_some()),
            ("harmonic", f.harmonic.is_some()),
            ("density", f.density.is_some()),
            ("pnorm", f.pnorm.is_some()),
            ("supnorm", f.supnorm.is_some()),
            ("weights", f.weights.is_some()),
            ("regularize", f.regularize.is_some()),
        ] {
            if present {
                seen.insert(name);
            }
        }
    }
    assert_eq!(seen.len(), 7, "{seen:?}");
}
