//! Figure fixtures, random instance generation, falsification and
//! brute-force oracles.

pub mod falsify;
pub mod fixtures;
pub mod generate;
pub mod oracle;
