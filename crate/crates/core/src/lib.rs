//! Multicriteria skylines, Skycubes, and partial Skycube materialization
//! through the skyline-concept lattice.
//!
//! The pipeline: agree sets of a [`Relation`] define a Galois connection
//! between criterion sets and partitions of row ids; its closed criterion
//! sets index the concepts of a lattice; storing one skyline per concept is
//! enough to rebuild every cuboid of the Skycube exactly.
//!
//! ```
//! use skylattice::{fixtures, materialize_partial};
//!
//! let r = fixtures::logements();
//! let store = materialize_partial(&r);
//! let ec = r.parse_set("EC").unwrap();
//! assert_eq!(store.reconstruct_cuboid(ec).unwrap().rows.len(), 1);
//! ```

pub mod cli;
pub mod dominance;
pub mod error;
pub mod fixtures;
pub mod galois;
pub mod lattice;
pub mod model;
pub mod partition;
pub mod skycube;

pub use dominance::{
    dominates, dominates_under_cna, is_cna, pi_sky, skyline, skyline_with, skyline_within,
    strictly_dominates, SkylineAlgorithm, SkylineResult,
};
pub use error::{Error, Result};
pub use galois::{
    acc_pair, acc_set, agree_sets, closed_sets, equiv_class, f_map, g_map, h_closure, h_prime,
    AgreeSetFamily,
};
pub use lattice::{
    build_agree_lattice, build_skyline_lattice, concept_join, concept_meet, export_dot,
    AgreeConcept, Concept, ConceptLattice, SkylineConcept,
};
pub use model::{load_csv, project, CriterionId, CriterionSet, Relation, RowId, Tuple};
pub use partition::{r_helper, Block, Partition};
pub use skycube::{
    build_skycube, materialize_partial, stats, verify_equivalence, EquivalenceReport,
    PartialSkycube, Skycube, StatsReport,
};
