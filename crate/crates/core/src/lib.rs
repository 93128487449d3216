pub mod classicality;
pub mod cli;
pub mod entities;
pub mod error;
pub mod exec;
pub mod liar;
pub mod lp;
pub mod quantum;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod scenario;
