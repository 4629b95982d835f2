use std::path::PathBuf;

use blocklat::fixtures;
use blocklat::gwp::GwpSpecFile;
use blocklat::perm::GroupFile;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn files_match_constructors() {
    for (rel, text) in fixtures::render() {
        let on_disk = std::fs::read_to_string(root().join(&rel)).unwrap_or_else(|e| {
            panic!("{rel}: {e}; regenerate with `cargo run -p blocklat --example export_fixtures`")
        });
        assert_eq!(on_disk, text, "{rel} is stale");
    }
}

#[test]
fn coset_files_realise_the_same_groups() {
    for (coset, direct) in [("a5_on15_coset", "a5_on15"), ("gl32_flags21_coset", "gl32_flags21")] {
        let read = |stem: &str| -> GroupFile {
            serde_json::from_str(&std::fs::read_to_string(root().join(format!("groups/{stem}.json"))).unwrap()).unwrap()
        };
        let a = read(coset).realise().unwrap();
        let b = read(direct).realise().unwrap();
        assert_eq!(a.degree(), b.degree());
        assert!(a.same_group(&b).unwrap(), "{coset}");
    }
}

#[test]
fn spec_files_load() {
    for (stem, spec) in fixtures::all_specs() {
        let loaded = GwpSpecFile::load(&root().join(format!("gwp/{stem}.json"))).unwrap();
        assert_eq!(loaded.expected_order().unwrap(), spec.expected_order().unwrap(), "{stem}");
    }
}
