//! Difference hierarchy computations over finite posets and symbolic
//! quasi-Polish space models.

pub mod alt_trees;
pub mod diff_hierarchy;
pub mod effective_codes;
pub mod finite_space;
pub mod games;
pub mod ordinals;
pub mod residues;
pub mod space_models;
