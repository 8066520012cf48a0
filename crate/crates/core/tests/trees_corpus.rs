mod common;

use qmono::trees::{star_monomialize, verify_tree};

#[test]
fn corpus_star_monomializes_and_verifies() {
    for (name, f) in common::corpus() {
        let tree = star_monomialize(std::slice::from_ref(&f), 32).unwrap_or_else(|e| panic!("{name}: {e}"));
        let reports = verify_tree(&tree, &[f]).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(reports.len(), tree.leaf_count(), "{name}");
        println!("{name}: {} leaves, depth {}", tree.leaf_count(), tree.depth());
    }
}
