//! Exact certificates for the vanishing of Novikov homology of finitely
//! presented groups, and the fibring verdicts they imply.

pub mod chain;
pub mod coefficients;
pub mod fibring;
pub mod groupring;
pub mod novikov;
pub mod oracle;
pub mod presentation;
