//! Long-time asymptotics in the two transition regions.

pub mod local;
pub mod region;
pub mod solution;
pub mod tfunc;

pub use local::{
    correction_bundle, local_matrices, painleve_values, phase_offsets, region_one_prefactor, region_two_prefactors, CorrectionBundle, LocalMatrices,
    PhaseOffsets, MERGE_POINTS,
};
pub use region::{classify_region, stationary_points, HalfZone, Region, StationarySet, XI_LEFT, XI_RIGHT};
pub use solution::{evaluate_in_region, evaluate_solution, expansions_to_csv, AsymptoticExpansion, AsymptoticOptions, AsymptoticProblem, ViiSign};
pub use tfunc::{partition_poles, t_function, Boundary, PolePartition, TFunctionContext};
