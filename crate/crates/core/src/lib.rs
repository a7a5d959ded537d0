pub mod bdd;
pub mod cex;
pub mod cutset;
pub mod encode;
pub mod fixpoint;
pub mod ltl;
pub mod model;
pub mod oracle;
pub mod random;
pub mod report;
pub mod tableau;
