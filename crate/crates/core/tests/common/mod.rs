#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use cartan_core::algspec::GradedAlgebraSpec;
use cartan_core::prolong::{BeginningPart, Prolonger};
use cartan_core::realize::{realization_from_json, realize, ColumnOrder, Realization};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn spec(name: &str) -> Arc<GradedAlgebraSpec> {
    Arc::new(GradedAlgebraSpec::from_json(&read(name)).unwrap())
}

pub fn realization(spec_name: &str, realization_name: Option<&str>) -> Realization {
    let s = spec(spec_name);
    match realization_name {
        Some(r) => realization_from_json(&s, &read(r)).unwrap(),
        None => realize(&s, &ColumnOrder::default()).unwrap(),
    }
}

pub fn prolonger(spec_name: &str, realization_name: Option<&str>) -> Prolonger {
    Prolonger::new(&realization(spec_name, realization_name))
}

pub fn contact(n: usize) -> Prolonger {
    prolonger(
        &format!("heisenberg-n{n}.json"),
        Some(&format!("heisenberg-n{n}-realization.json")),
    )
}

pub fn beginning(p: &Prolonger, name: &str) -> BeginningPart {
    BeginningPart::from_json(&read(name), p).unwrap()
}
