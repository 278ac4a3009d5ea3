//! Forward scattering: initial datum, Jost solutions, the scattering pair
//! (a, b), reflection coefficient, trace formula and symmetry audits.

mod data;
mod datum;
mod jost;
mod locate;

pub use data::{
    reflection_grid, scattering_pair, symmetry_audit, trace_formula_eval, AuditReport, DiscreteEigen, ScatteringData, SpectralGrid,
    SpectralSample, A_FLOOR,
};
pub use datum::{build_initial_datum, parse_table, read_table, DatumSpec, InitialDatum, BOUNDARY_TOL};
pub use jost::{a_continued, jost_integrate, omega, JostOptions, JostPair};
pub use locate::{close_orbit, locate_discrete_spectrum, locate_zeros, winding_number, LocatorOptions, LocatorReport, SearchBox};
