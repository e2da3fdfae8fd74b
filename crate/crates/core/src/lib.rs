pub mod arcs;
pub mod chain;
pub mod cli;
pub mod cone;
pub mod engine;
pub mod histogram;
pub mod junction;
pub mod lp;
pub mod pricing;
pub mod rational;
pub mod sails;
pub mod surgery;
