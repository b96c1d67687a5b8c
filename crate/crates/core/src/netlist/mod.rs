//! Transistor-level circuit model with hierarchical composition.
//!
//! A [`Netlist`] owns its nets, devices and subcircuit instances. Subcircuit
//! definitions live in the library of the root netlist; instances refer to
//! them by name. [`Netlist::flatten`] inlines every instance, renaming the
//! instance-internal nets `<instance>__<net>` and merging supply rails by
//! name.

mod flatten;
mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::device::CntfetSpec;
use crate::logic::{Radix, VoltageMap};

pub use text::{parse, serialize, Location, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetRole {
    /// Fixed rail voltage.
    Supply(f64),
    /// Externally driven; `full_scale` defaults to the highest supply.
    Input {
        radix: Radix,
        full_scale: Option<f64>,
    },
    Output {
        radix: Radix,
        full_scale: Option<f64>,
    },
    Internal,
}

impl NetRole {
    pub fn input(radix: Radix) -> Self {
        NetRole::Input {
            radix,
            full_scale: None,
        }
    }

    pub fn output(radix: Radix) -> Self {
        NetRole::Output {
            radix,
            full_scale: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub name: String,
    pub role: NetRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Device {
    pub spec: CntfetSpec,
    pub gate: NetId,
    pub source: NetId,
    pub drain: NetId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub subckt: String,
    pub name: String,
    /// `(subcircuit port name, parent net)` pairs.
    pub connections: Vec<(String, NetId)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetlistError {
    #[error("duplicate net `{0}`")]
    DuplicateNet(String),
    #[error("duplicate instance `{0}`")]
    DuplicateInstance(String),
    #[error("duplicate subcircuit `{0}`")]
    DuplicateSubckt(String),
    #[error("undefined net `{0}`")]
    UndefinedNet(String),
    #[error("unknown subcircuit `{0}`")]
    UnknownSubckt(String),
    #[error("instance `{instance}` of `{subckt}`: {reason}")]
    BadConnection {
        instance: String,
        subckt: String,
        reason: String,
    },
    #[error("cyclic instantiation: {0}")]
    Cycle(String),
    #[error("supply `{name}` declared at both {a} V and {b} V")]
    SupplyMismatch { name: String, a: f64, b: f64 },
    #[error("netlist `{0}` has no supply net")]
    NoSupply(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
}

/// Names a rail by its voltage: `gnd`, `v0p9`, `v0p45`, ...
pub fn supply_name(volts: f64) -> String {
    let v = round_volts(volts);
    if v == 0.0 {
        return "gnd".to_string();
    }
    format!("v{v}").replace('.', "p").replace('-', "m")
}

/// Snaps a voltage to nanovolt resolution so derived rails print cleanly.
pub fn round_volts(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    name: String,
    nets: Vec<Net>,
    by_name: HashMap<String, NetId>,
    devices: Vec<Device>,
    ports: Vec<NetId>,
    instances: Vec<Instance>,
    library: BTreeMap<String, Netlist>,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.index()]
    }

    pub fn net_ids(&self) -> impl Iterator<Item = NetId> + '_ {
        (0..self.nets.len() as u32).map(NetId)
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn ports(&self) -> &[NetId] {
        &self.ports
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn library(&self) -> &BTreeMap<String, Netlist> {
        &self.library
    }

    pub fn is_flat(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<NetId> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<NetId, NetlistError> {
        self.lookup(name)
            .ok_or_else(|| NetlistError::UndefinedNet(name.to_string()))
    }

    pub fn add_net(&mut self, name: &str, role: NetRole) -> Result<NetId, NetlistError> {
        if !is_identifier(name) {
            return Err(NetlistError::BadIdentifier(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(NetlistError::DuplicateNet(name.to_string()));
        }
        let id = NetId(self.nets.len() as u32);
        self.nets.push(Net {
            name: name.to_string(),
            role,
        });
        self.by_name.insert(name.to_string(), id);
        if matches!(role, NetRole::Input { .. } | NetRole::Output { .. }) {
            self.ports.push(id);
        }
        Ok(id)
    }

    /// Existing net of that name, or a new internal one.
    pub fn net_or_internal(&mut self, name: &str) -> Result<NetId, NetlistError> {
        match self.lookup(name) {
            Some(id) => Ok(id),
            None => self.add_net(name, NetRole::Internal),
        }
    }

    /// Rail at `volts`, created on first use.
    pub fn supply(&mut self, volts: f64) -> NetId {
        let name = supply_name(volts);
        match self.lookup(&name) {
            Some(id) => id,
            None => self
                .add_net(&name, NetRole::Supply(round_volts(volts)))
                .expect("generated supply name is valid"),
        }
    }

    /// Gives an implicitly created internal net its declared role.
    pub(crate) fn promote(&mut self, id: NetId, role: NetRole) -> Result<(), NetlistError> {
        let net = &mut self.nets[id.index()];
        if net.role != NetRole::Internal {
            return Err(NetlistError::DuplicateNet(net.name.clone()));
        }
        net.role = role;
        if matches!(role, NetRole::Input { .. } | NetRole::Output { .. }) {
            self.ports.push(id);
        }
        Ok(())
    }

    pub fn add_device(&mut self, spec: CntfetSpec, gate: NetId, source: NetId, drain: NetId) {
        self.devices.push(Device {
            spec,
            gate,
            source,
            drain,
        });
    }

    /// Replaces the port list (subcircuit headers define their own order).
    pub fn set_ports(&mut self, ports: Vec<NetId>) {
        self.ports = ports;
    }

    pub fn add_instance(&mut self, instance: Instance) -> Result<(), NetlistError> {
        if self.instances.iter().any(|i| i.name == instance.name) {
            return Err(NetlistError::DuplicateInstance(instance.name));
        }
        self.instances.push(instance);
        Ok(())
    }

    /// Adds a subcircuit definition (and its own library) to this netlist's library.
    pub fn add_subckt(&mut self, mut sub: Netlist) -> Result<(), NetlistError> {
        for (name, def) in std::mem::take(&mut sub.library) {
            self.add_or_share_subckt(name, def)?;
        }
        let name = sub.name.clone();
        self.add_or_share_subckt(name, sub)
    }

    fn add_or_share_subckt(&mut self, name: String, def: Netlist) -> Result<(), NetlistError> {
        match self.library.get(&name) {
            Some(existing) if *existing == def => Ok(()),
            Some(_) => Err(NetlistError::DuplicateSubckt(name)),
            None => {
                self.library.insert(name, def);
                Ok(())
            }
        }
    }

    pub fn supplies(&self) -> impl Iterator<Item = (NetId, f64)> + '_ {
        self.net_ids().filter_map(|id| match self.net(id).role {
            NetRole::Supply(v) => Some((id, v)),
            _ => None,
        })
    }

    pub fn inputs(&self) -> impl Iterator<Item = NetId> + '_ {
        self.net_ids()
            .filter(|&id| matches!(self.net(id).role, NetRole::Input { .. }))
    }

    pub fn outputs(&self) -> impl Iterator<Item = NetId> + '_ {
        self.net_ids()
            .filter(|&id| matches!(self.net(id).role, NetRole::Output { .. }))
    }

    pub fn max_supply(&self) -> f64 {
        self.supplies().map(|(_, v)| v).fold(0.0, f64::max)
    }

    /// Level map of an input or output net.
    pub fn voltage_map(&self, id: NetId) -> Option<VoltageMap> {
        match self.net(id).role {
            NetRole::Input { radix, full_scale } | NetRole::Output { radix, full_scale } => {
                Some(VoltageMap::new(radix, full_scale.unwrap_or_else(|| self.max_supply())))
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), NetlistError> {
        if self.supplies().next().is_none() {
            return Err(NetlistError::NoSupply(self.name.clone()));
        }
        let n = self.nets.len() as u32;
        for d in &self.devices {
            for t in [d.gate, d.source, d.drain] {
                if t.0 >= n {
                    return Err(NetlistError::UndefinedNet(format!("#{}", t.0)));
                }
            }
        }
        Ok(())
    }

    /// Total device count after flattening, without building the flat netlist.
    pub fn flat_device_count(&self) -> Result<usize, NetlistError> {
        flatten::count_devices(self, self)
    }

    pub fn flatten(&self) -> Result<Netlist, NetlistError> {
        flatten::flatten(self)
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}
