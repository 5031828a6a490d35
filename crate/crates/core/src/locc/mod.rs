//! Adaptive one-way LOCC measurement trees.

mod synth;
mod tree;

pub use synth::{
    discriminate, discrimination_report, leaf_residual, synthesize_for_family, synthesize_tree, verify_tree,
    DiscriminationReport, LeafAssignment, DISCRIMINATION_TOL, LEAF_TOL, NODE_TRACE_TOL, ORTHO_TOL,
};
pub use tree::{bloch, path_label, write_bloch_csv, BlochRow, Leaf, MeasurementTree, TreeNode, GRAM_TOL};
