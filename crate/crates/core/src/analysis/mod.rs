//! Area, first-order RC timing, dynamic power and load sweeps.
//!
//! Absolute numbers come from a calibrated switch-level RC model and are not
//! physical measurements. Only ratios and orderings are meaningful.

mod bench;
mod chain;
mod power;
mod timing;

pub use bench::*;
pub use chain::*;
pub use power::*;
pub use timing::*;

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use crate::device::CntfetSpec;
use crate::netlist::{NetId, NetRole, Netlist};
use crate::Scalar;

/// Σ of device diameters in nm over the flattened circuit.
pub fn area<T: Scalar>(nl: &Netlist) -> T {
    let own = nl
        .devices()
        .iter()
        .fold(T::zero(), |acc, d| acc + d.spec.diameter::<T>());
    nl.instances().iter().fold(own, |acc, inst| {
        let sub = nl.library().get(&inst.subckt).map_or(T::zero(), |s| area::<T>(s));
        acc + sub
    })
}

const FEMTO: f64 = 1e-15;

/// Switch-level RC parameters. A conducting device has resistance
/// `rho / overdrive`; capacitances are in fF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel<T> {
    /// Ω·V.
    pub rho: T,
    pub c_gate_ff: T,
    pub c_diff_ff: T,
}

impl<T: Scalar> TimingModel<T> {
    pub const REFERENCE_LOAD_FF: f64 = 2.0;
    pub const REFERENCE_DELAY_S: f64 = 10e-12;
    pub const REFERENCE_VDD: f64 = 0.9;
    pub const REFERENCE_CHIRALITY: u32 = 19;

    /// Chooses `rho` so the reference inverter (N and P at chirality 19,
    /// 0.9 V) driving `load_ff` switches in `delay_s`.
    pub fn calibrate(c_gate_ff: T, c_diff_ff: T, load_ff: T, delay_s: T) -> Self {
        let vth = CntfetSpec::n(Self::REFERENCE_CHIRALITY).threshold_voltage::<T>();
        let overdrive = T::lit(Self::REFERENCE_VDD) - vth;
        // The output node also sees both drain terminals.
        let c = (load_ff + T::lit(2.0) * c_diff_ff) * T::lit(FEMTO);
        Self {
            rho: delay_s * overdrive / (T::lit(LN_2) * c),
            c_gate_ff,
            c_diff_ff,
        }
    }

    pub fn with_rho_scaled(self, s: T) -> Self {
        Self {
            rho: self.rho * s,
            ..self
        }
    }

    pub fn with_caps_scaled(self, s: T) -> Self {
        Self {
            c_gate_ff: self.c_gate_ff * s,
            c_diff_ff: self.c_diff_ff * s,
            ..self
        }
    }

    pub fn resistance(&self, overdrive: T) -> T {
        self.rho / overdrive
    }

    pub fn is_valid(&self) -> bool {
        [self.rho, self.c_gate_ff, self.c_diff_ff]
            .iter()
            .all(|v| v.is_finite() && *v > T::zero())
    }
}

impl<T: Scalar> Default for TimingModel<T> {
    fn default() -> Self {
        Self::calibrate(
            T::lit(0.10),
            T::lit(0.05),
            T::lit(Self::REFERENCE_LOAD_FF),
            T::lit(Self::REFERENCE_DELAY_S),
        )
    }
}

/// External capacitance per net, in fF.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Loads<T> {
    pub per_net: BTreeMap<NetId, T>,
}

impl<T: Scalar> Loads<T> {
    /// `load_ff` on every Output net.
    pub fn on_outputs(nl: &Netlist, load_ff: T) -> Self {
        Self::on(nl.outputs(), load_ff)
    }

    pub fn on(nets: impl Iterator<Item = NetId>, load_ff: T) -> Self {
        Self {
            per_net: nets.map(|n| (n, load_ff)).collect(),
        }
    }

    pub fn get(&self, net: NetId) -> T {
        self.per_net.get(&net).copied().unwrap_or_else(T::zero)
    }
}

/// Capacitance of every net in farads.
pub fn node_capacitance<T: Scalar>(nl: &Netlist, model: &TimingModel<T>, loads: &Loads<T>) -> Vec<T> {
    let mut c = vec![T::zero(); nl.nets().len()];
    for d in nl.devices() {
        c[d.gate.index()] = c[d.gate.index()] + model.c_gate_ff;
        c[d.source.index()] = c[d.source.index()] + model.c_diff_ff;
        c[d.drain.index()] = c[d.drain.index()] + model.c_diff_ff;
    }
    for (net, load) in &loads.per_net {
        c[net.index()] = c[net.index()] + *load;
    }
    c.into_iter().map(|v| v * T::lit(FEMTO)).collect()
}

/// Supplies and primary inputs: nets held by ideal sources.
pub(crate) fn is_source(nl: &Netlist, id: NetId) -> bool {
    matches!(nl.net(id).role, NetRole::Supply(_) | NetRole::Input { .. })
}
