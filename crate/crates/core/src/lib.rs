//! Factorization-length invariants of monoids of zero-sum sequences over
//! finite abelian groups and of finitely primary monoids: sets of lengths,
//! elasticity, minimal distances, and `Δ_ρ`, the set of differences of long
//! arithmetical progressions inside sets of lengths of maximal elasticity.

pub mod arith;
pub mod atoms;
pub mod budget;
pub mod cyclic_cf;
pub mod delta_rho;
pub mod error;
pub mod group;
pub mod lattice;
pub mod lengths;
pub mod primary;
pub mod scan;
pub mod sequence;
pub mod verify;

pub use atoms::{davenport, enumerate_atoms, max_length_atoms, AtomSet};
pub use budget::ResourceConfig;
pub use cyclic_cf::{
    cf_odd_length, cf_regular, min_delta_pair_cf, min_delta_quad_cf, smallest_witness, witness_filters, CFExpansion,
    FilterTag,
};
pub use delta_rho::{
    delta_rho, delta_rho_star, delta_rho_with, gcd_closure, one_in_delta_rho, qualifying_supports, realize_delta_set,
    DeltaRhoResult, Provenance, QualifyingSupport,
};
pub use error::{Error, Result};
pub use group::{AbelianGroup, CyclicEmbedding, GroupElement};
pub use lattice::RelationKernel;
pub use lengths::{
    length_set, max_elasticity_witness, min_delta, rho_of_support, AAPWitness, LengthCalculator, LengthSet,
};
pub use primary::{
    delta_rho_star_product, fp_atoms, fp_length_set, local_profile, transfer_obstruction, FPMonoid, LocalProfile,
    ObstructionReport,
};
pub use scan::{scan_exceptional, Engine, ScanOptions, ScanReport};
pub use sequence::{g_norm, GSequence, SupportSet};
