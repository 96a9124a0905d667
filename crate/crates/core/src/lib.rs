// SPDX-License-Identifier: Apache-2.0

//! Universal-circuit obfuscation of gate-level netlists, and the attack and
//! metric machinery used to evaluate it.
//!
//! The pipeline is: parse a `.bench` netlist, unroll it to a combinational
//! core, map it to LUTs, embed the LUTs into a programmable fabric whose
//! configuration bitstream is the secret key, and lower the fabric to a plain
//! gate netlist with `keyinput*` ports. The [`attacks`] module then attacks
//! that locked netlist, and [`metrics`] turns attack records into reports.

pub mod attacks;
pub mod circuits;
pub mod cnf;
pub mod equiv;
pub mod fabric;
pub mod metrics;
pub mod netlist;
pub mod sat;
pub mod transform;

pub use fabric::{obfuscate, Bitstream, Fabric, LockedNetlist, Obfuscated};
pub use netlist::{parse_bench, write_bench, Flop, Gate, GateKind, Netlist, NetlistError};
pub use transform::{LutNetlist, MapMode};
