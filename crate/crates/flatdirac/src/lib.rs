pub mod clifford;
pub mod error;
pub mod quadratic;
pub mod group;
pub mod shells;
pub mod spin;
pub mod dirac;
pub mod oracle;
pub mod eta;
pub mod zp;
pub mod hodge;
pub mod families;
pub mod isospec;
pub mod cli;
