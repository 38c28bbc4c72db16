//! The shipped catalog files must stay in step with the embedded entries.

use std::path::PathBuf;

use enf_core::catalog::catalog;

#[test]
fn shipped_files_match_embedded_catalog() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/catalog");
    for entry in catalog() {
        let file = dir.join(format!("{}.cmap", entry.name.replace('.', "_")));
        let text = std::fs::read_to_string(&file)
            .unwrap_or_else(|e| panic!("missing catalog file {}: {e}", file.display()));
        assert_eq!(
            text,
            entry.map.to_cmap_string(entry.name),
            "{} drifted from its shipped file",
            entry.name
        );
    }
}
