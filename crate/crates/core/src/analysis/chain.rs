//! Carry-chain surrogates: `k` always-enabled transmission gates in series,
//! optionally with a restoring inverter after each gate.

use super::{path_delay, DelayError, Loads, TimingModel};
use crate::gates::{Control, Stamp, VDD};
use crate::logic::Radix;
use crate::netlist::{NetRole, Netlist};
use crate::solver::step_waveforms;
use crate::Scalar;

/// Chain netlist with ports `in` and `out`.
pub fn rc_chain(stages: usize, restored: bool) -> Netlist {
    assert!(stages > 0, "a chain needs at least one stage");
    let kind = if restored { "restored" } else { "bare" };
    let mut nl = Netlist::new(format!("chain_{kind}_{stages}"));
    let hi = nl.supply(VDD);
    let lo = nl.supply(0.0);
    let input = nl.add_net("in", NetRole::input(Radix::BINARY)).expect("fresh netlist");
    let out = nl
        .add_net("out", NetRole::output(Radix::BINARY))
        .expect("fresh netlist");
    let on = Control { on: hi, off: lo };
    let mut s = Stamp::new(&mut nl, "");
    let mut prev = input;
    for i in 1..=stages {
        let last = i == stages;
        let pass = if last && !restored {
            out
        } else {
            s.net(&format!("t{i}"))
        };
        s.tgate(prev, pass, on);
        prev = if restored {
            let y = if last { out } else { s.net(&format!("n{i}")) };
            s.inverter(pass, y);
            y
        } else {
            pass
        };
    }
    nl
}

/// Worst `in -> out` delay with `load_ff` on every internal node and the output.
pub fn chain_delay<T: Scalar>(
    stages: usize,
    restored: bool,
    model: &TimingModel<T>,
    load_ff: T,
) -> Result<T, DelayError> {
    let nl = rc_chain(stages, restored);
    let input = nl.lookup("in").expect("chain port");
    let out = nl.lookup("out").expect("chain port");
    let trace = step_waveforms(&nl, &[(input, 0)], &[(input, vec![0, 1, 0])], 1e-9).expect("chains always solve");
    let loads = Loads::on(
        nl.net_ids()
            .filter(|&id| matches!(nl.net(id).role, NetRole::Internal | NetRole::Output { .. })),
        load_ff,
    );
    path_delay(&nl, &trace, model, &loads, input, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_chain_is_quadratic() {
        let m = TimingModel::<f64>::default();
        let d4 = chain_delay(4, false, &m, 2.0).unwrap();
        let d8 = chain_delay(8, false, &m, 2.0).unwrap();
        assert!(d8 / d4 > 2.5, "{}", d8 / d4);
    }

    #[test]
    fn restored_chain_is_linear() {
        let m = TimingModel::<f64>::default();
        let d4 = chain_delay(4, true, &m, 2.0).unwrap();
        let d8 = chain_delay(8, true, &m, 2.0).unwrap();
        assert!((d8 / d4 - 2.0).abs() < 0.2, "{}", d8 / d4);
        assert!(d8 < chain_delay(8, false, &m, 2.0).unwrap());
    }
}
