//! Fixture loading shared by the benchmarks.

use std::path::PathBuf;
use std::sync::Arc;

use cartan_core::algspec::GradedAlgebraSpec;
use cartan_core::prolong::{BeginningPart, Prolonger};
use cartan_core::realize::{realization_from_json, realize, ColumnOrder, Realization};

pub fn read(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn spec(name: &str) -> Arc<GradedAlgebraSpec> {
    Arc::new(GradedAlgebraSpec::from_json(&read(name)).expect("fixture parses"))
}

/// The solved realization, or the supplied one when a file is named.
pub fn realization(spec_name: &str, realization_name: Option<&str>) -> Realization {
    let s = spec(spec_name);
    match realization_name {
        Some(r) => realization_from_json(&s, &read(r)).expect("fixture realization is valid"),
        None => realize(&s, &ColumnOrder::default()).expect("fixture realizes"),
    }
}

pub fn beginning(p: &Prolonger, name: &str) -> BeginningPart {
    BeginningPart::from_json(&read(name), p).expect("fixture beginning part parses")
}
