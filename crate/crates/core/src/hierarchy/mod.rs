//! Parametric symmetry flows of degree 0, 1 and 2, their parameter
//! constraints, the Hamiltonian form of the first-degree flow, conservation
//! laws and the printed appendix identities.

mod appendix;
mod conservation;
mod derive;
mod error;
mod family;
mod hamiltonian;

pub use appendix::{
    residual_witness, rig3_perturbed, verify_appendix, verify_appendix_identities, AppendixCheck,
    AppendixReading, IdentityOutcome,
};
pub use conservation::{
    conservation_check, conservation_check_with, density_one, density_two, on_space,
    second_degree_flux_one, second_degree_flux_two, DensityFluxPair,
};
pub use derive::{
    derive_parameter_constraints, hm_matrix, is_symmetric, parse_relation, resolve_first_degree,
    shift_point, space_from_relations, three_wave_point, SignResolution, FIRST_DEGREE_RELATIONS,
    GD_RELATIONS, HM_RELATIONS, NU_RELATIONS,
};
pub use error::HierarchyError;
pub use family::{
    first_degree_family, first_degree_family_with, second_degree_family, zero_degree_family,
    FlowFamily, SignConvention, SECOND_DEGREE_PARAMS,
};
pub use hamiltonian::{
    check_hamiltonian, first_degree_hamiltonian, hamiltonian_flow, HamiltonianCheck,
    PoissonStructure,
};
