//! Adversarial finite-sum instances, their exact proximal oracles, reference
//! stochastic solvers, and the probabilistic tools used to certify query
//! lower bounds.

pub mod analysis;
pub mod error;
pub mod hexfloat;
pub mod instances;
pub mod nonconvex;
pub mod oracle;
pub mod probe;
pub mod roots;
pub mod solvers;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use instances::{
    certificate, make_avg_c, make_avg_sc, make_c, make_nc, make_one_d, make_sc, minimizer, restricted_gap,
    restricted_min, restricted_min_distance, restricted_minimizer, Certificate, Family, HardInstance, Scalars,
};
pub use oracle::{component_gradient, component_prox, component_value, full_gradient, full_value, pifo_call, Oracle, OracleReply};
pub use structure::{BandSpec, RowPartition, SubspaceOrientation};
