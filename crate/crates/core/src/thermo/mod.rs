//! Transfer operators, pressure, equilibrium measures and Bowen's equation.
//!
//! Two engines compute the dimension: the operator engine discretizes the
//! Ruelle operator of a coding, the orbit engine sums over its periodic
//! orbits using only translation lengths, so it also runs on deformed
//! representations that have no coding of their own.

mod bowen;
mod ensemble;
mod operator;
mod rpf;

pub use bowen::{
    bowen_dimension_operator, operator_dimension, orbit_dimension, orbit_dimension_of, BowenSolveResult, Engine,
    OperatorSettings, RefinementStep, BISECT_WIDTH, DEFAULT_BRACKET, MAX_CYLINDERS, REFINEMENT_TARGET,
};
pub use ensemble::{
    livsic_test, EnsembleOrbit, LengthSpectrum, LevelLengths, LivsicVerdict, OrbitEnsemble, OrbitLevel, MIN_TOP_LEVEL,
};
pub use operator::{chebyshev, lagrange, Discretization, Site, SparseMatrix, TransferOperator};
pub use rpf::{
    equilibrium_measure, pressure, pressure_derivatives, rpf_leading_triple, EquilibriumMeasure, PressureDerivatives,
    RpfTriple,
};
