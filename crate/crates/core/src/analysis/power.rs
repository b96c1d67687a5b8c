//! Dynamic switching energy: `C·ΔV²` per changed net per step.

use super::{node_capacitance, Loads, TimingModel};
use crate::netlist::Netlist;
use crate::solver::{DcState, StepTrace};
use crate::Scalar;

/// Energy in joules drawn by one step, given per-net capacitance in farads.
pub fn step_energy<T: Scalar>(caps: &[T], prev: &DcState, next: &DcState) -> T {
    prev.values()
        .iter()
        .zip(next.values())
        .zip(caps)
        .fold(T::zero(), |acc, ((a, b), &c)| match (a.voltage(), b.voltage()) {
            (Some(x), Some(y)) => {
                let dv = T::lit(y - x);
                acc + c * dv * dv
            }
            _ => acc,
        })
}

pub fn trace_energy<T: Scalar>(nl: &Netlist, model: &TimingModel<T>, loads: &Loads<T>, trace: &StepTrace) -> T {
    let caps = node_capacitance(nl, model, loads);
    trace
        .steps
        .windows(2)
        .fold(T::zero(), |acc, w| acc + step_energy(&caps, &w[0].state, &w[1].state))
}

/// Average power in watts with every step lasting `period` seconds.
pub fn dynamic_power<T: Scalar>(
    nl: &Netlist,
    trace: &StepTrace,
    model: &TimingModel<T>,
    loads: &Loads<T>,
    period: T,
) -> T {
    let steps = trace.steps.len().saturating_sub(1);
    if steps == 0 {
        return T::zero();
    }
    trace_energy(nl, model, loads, trace) / (period * T::lit(steps as f64))
}

pub fn pdp<T: Scalar>(power: T, delay: T) -> T {
    power * delay
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;
    use crate::solver::step_waveforms;

    #[test]
    fn full_cycle_costs_two_cv2() {
        let nl = GateKind::Inverter { vdd: 0.9, n: 19, p: 19 }.build().unwrap();
        let a = nl.lookup("a").unwrap();
        let y = nl.lookup("y").unwrap();
        let trace = step_waveforms(&nl, &[(a, 0)], &[(a, vec![0, 1, 0])], 1e-9).unwrap();
        let m = TimingModel::<f64>::default();
        let caps = node_capacitance(&nl, &m, &Loads::default());
        let e = trace_energy(&nl, &m, &Loads::default(), &trace);
        let want = 2.0 * (caps[a.index()] + caps[y.index()]) * 0.81;
        assert!((e - want).abs() < 1e-24);
        let p = dynamic_power(&nl, &trace, &m, &Loads::default(), 1e-9);
        assert!((p - want / 2e-9).abs() < 1e-15);
    }
}
