// SPDX-License-Identifier: Apache-2.0

//! Classic key-gate insertion, used as a leaky reference scheme.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AttackError;
use crate::fabric::LockedNetlist;
use crate::netlist::{Gate, GateKind, Netlist};

/// Locks `net` with `n_keys` AND/OR key gates on randomly chosen gate
/// outputs. An AND gate needs key bit 1 to pass its signal, an OR gate key
/// bit 0. Returns the locked netlist and its correct key.
pub fn insert_key_gates(net: &Netlist, n_keys: usize, seed: u64) -> Result<(LockedNetlist, Vec<bool>), AttackError> {
    if !net.is_combinational() {
        return Err(AttackError::Sequential(net.name().to_string()));
    }
    if n_keys == 0 || n_keys > net.gates().len() {
        return Err(AttackError::InvalidParam(format!(
            "{n_keys} key gates requested for {} gates",
            net.gates().len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut targets = sample(&mut rng, net.gates().len(), n_keys).into_vec();
    targets.sort_unstable();
    let mut gates: Vec<Gate> = net.gates().to_vec();
    let mut key = Vec::with_capacity(n_keys);
    let mut inputs: Vec<String> = Vec::with_capacity(n_keys + net.inputs().len());
    for (i, &t) in targets.iter().enumerate() {
        let name = gates[t].output.clone();
        let pre = format!("{name}__pre");
        gates[t].output = pre.clone();
        let k = format!("keyinput{i}");
        let use_and: bool = rng.gen();
        key.push(use_and);
        gates.push(Gate {
            output: name,
            kind: if use_and { GateKind::And } else { GateKind::Or },
            inputs: vec![pre, k.clone()],
        });
        inputs.push(k);
    }
    inputs.extend(net.inputs().iter().cloned());
    let locked = Netlist::new(
        format!("{}_kg", net.name()),
        inputs,
        net.outputs().to_vec(),
        gates,
        vec![],
    )
    .map_err(crate::fabric::FabricError::from)?;
    Ok((LockedNetlist::from_netlist(locked)?, key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::exhaustive_mismatch;
    use crate::netlist::Simulator;

    #[test]
    fn correct_key_restores_function() {
        let net = crate::circuits::random_dag(11, 5, 40, 3);
        let (locked, key) = insert_key_gates(&net, 16, 2).unwrap();
        assert_eq!(locked.key_len(), 16);
        assert!(exhaustive_mismatch(&locked.keyed(&key), &Simulator::new(&net)).is_none());
    }
}
