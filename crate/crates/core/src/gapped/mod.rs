//! Gapped spin chains: exact diagonalization, Gaussian energy filters,
//! boundary-localized ground-state projectors and Lieb-Robinson probes.

mod approx;
mod lemmas;
mod localize;
mod lr;
mod model;
mod region;
mod spectrum;

pub use approx::{
    commutator_norm, filtered_energy_bound, gs_projector_approx, hamiltonian_split, local_surrogates, surrogate_error,
    EnergyProbe, FilterBound, GsApproxResult, GsDiagnostics, GsOptions, HamiltonianSplit, PaperConstants, PbMethod,
    Surrogates, LATTICE_DIM, LR_MU,
};
pub use lemmas::{entropy_bound_eval, extremal_distribution, extremal_entropy, sphere_bound, sphere_count, sphere_count_brute, EntropyBound};
pub use localize::{haar_average_mc, localize};
pub use lr::{lr_probe, LrRow, LrSweep, ARRIVAL_THRESHOLD};
pub use model::{build_model, LocalOperator, ModelKind, SpinChainModel, Term};
pub use region::{boundary_of, neighbourhood, region_split, RegionSplit};
pub use spectrum::{
    approx_projector, approx_projector_error, diagonalize, entropy_profile, evolution, filter_in_basis,
    filter_on_ground, gauss_hermite, gaussian_average, gaussian_filter, gaussian_kernel, EntropyPoint, ProjectorError,
    SpectralData, DEGENERACY_TOL,
};

#[cfg(test)]
mod tests;
