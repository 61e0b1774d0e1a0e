pub mod arith;
pub mod egyptian;
pub mod identities;
pub mod sieve;
pub mod harness;
pub mod cli;
