use std::collections::HashMap;

use super::{Instance, NetId, NetRole, Netlist, NetlistError};

fn resolve<'a>(root: &'a Netlist, inst: &Instance, stack: &[&str]) -> Result<&'a Netlist, NetlistError> {
    if stack.contains(&inst.subckt.as_str()) {
        let mut path: Vec<&str> = stack.to_vec();
        path.push(&inst.subckt);
        return Err(NetlistError::Cycle(path.join(" -> ")));
    }
    root.library
        .get(&inst.subckt)
        .ok_or_else(|| NetlistError::UnknownSubckt(inst.subckt.clone()))
}

/// Maps each subcircuit port to the parent net it is bound to.
fn bind_ports(def: &Netlist, inst: &Instance) -> Result<HashMap<NetId, NetId>, NetlistError> {
    let bad = |reason: String| NetlistError::BadConnection {
        instance: inst.name.clone(),
        subckt: inst.subckt.clone(),
        reason,
    };
    let mut map = HashMap::new();
    for (port, parent) in &inst.connections {
        let id = def
            .lookup(port)
            .filter(|id| def.ports.contains(id))
            .ok_or_else(|| bad(format!("no port `{port}`")))?;
        if map.insert(id, *parent).is_some() {
            return Err(bad(format!("port `{port}` connected twice")));
        }
    }
    if let Some(missing) = def.ports.iter().find(|p| !map.contains_key(p)) {
        return Err(bad(format!("port `{}` left open", def.net(*missing).name)));
    }
    Ok(map)
}

pub(super) fn count_devices(root: &Netlist, nl: &Netlist) -> Result<usize, NetlistError> {
    fn go<'a>(root: &'a Netlist, nl: &'a Netlist, stack: &mut Vec<&'a str>) -> Result<usize, NetlistError> {
        let mut total = nl.devices.len();
        for inst in &nl.instances {
            let def = resolve(root, inst, stack)?;
            stack.push(&inst.subckt);
            total += go(root, def, stack)?;
            stack.pop();
        }
        Ok(total)
    }
    let mut stack = vec![nl.name.as_str()];
    go(root, nl, &mut stack)
}

pub(super) fn flatten(root: &Netlist) -> Result<Netlist, NetlistError> {
    let mut out = Netlist {
        name: root.name.clone(),
        nets: root.nets.clone(),
        by_name: root.by_name.clone(),
        devices: root.devices.clone(),
        ports: root.ports.clone(),
        instances: Vec::new(),
        library: Default::default(),
    };
    let mut stack = vec![root.name.as_str()];
    for inst in &root.instances {
        inline(root, &mut out, inst, &inst.name, &mut stack)?;
    }
    Ok(out)
}

fn inline<'a>(
    root: &'a Netlist,
    out: &mut Netlist,
    inst: &Instance,
    prefix: &str,
    stack: &mut Vec<&'a str>,
) -> Result<(), NetlistError> {
    let def = resolve(root, inst, stack)?;
    let mut map = bind_ports(def, inst)?;
    for id in def.net_ids() {
        if map.contains_key(&id) {
            continue;
        }
        let net = def.net(id);
        let target = match net.role {
            NetRole::Supply(v) => match out.lookup(&net.name) {
                Some(existing) => match out.net(existing).role {
                    NetRole::Supply(w) if w == v => existing,
                    NetRole::Supply(w) => {
                        return Err(NetlistError::SupplyMismatch {
                            name: net.name.clone(),
                            a: w,
                            b: v,
                        })
                    }
                    _ => return Err(NetlistError::DuplicateNet(net.name.clone())),
                },
                None => out.add_net(&net.name, NetRole::Supply(v))?,
            },
            _ => out.add_net(&format!("{prefix}__{}", net.name), NetRole::Internal)?,
        };
        map.insert(id, target);
    }
    for d in &def.devices {
        out.add_device(d.spec, map[&d.gate], map[&d.source], map[&d.drain]);
    }
    stack.push(def.name.as_str());
    for child in &def.instances {
        let rebound = Instance {
            subckt: child.subckt.clone(),
            name: child.name.clone(),
            connections: child.connections.iter().map(|(p, n)| (p.clone(), map[n])).collect(),
        };
        inline(root, out, &rebound, &format!("{prefix}__{}", child.name), stack)?;
    }
    stack.pop();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::CntfetSpec;
    use crate::logic::Radix;

    fn inverter() -> Netlist {
        let mut nl = Netlist::new("inv");
        let vdd = nl.supply(0.9);
        let gnd = nl.supply(0.0);
        let a = nl.add_net("a", NetRole::input(Radix::BINARY)).unwrap();
        let y = nl.add_net("y", NetRole::output(Radix::BINARY)).unwrap();
        nl.add_device(CntfetSpec::p(19), a, vdd, y);
        nl.add_device(CntfetSpec::n(19), a, gnd, y);
        nl
    }

    fn inst(sub: &str, name: &str, conns: &[(&str, NetId)]) -> Instance {
        Instance {
            subckt: sub.into(),
            name: name.into(),
            connections: conns.iter().map(|(p, n)| (p.to_string(), *n)).collect(),
        }
    }

    #[test]
    fn two_inverters_flatten_to_four_devices() {
        let mut top = Netlist::new("top");
        top.supply(0.9);
        let a = top.add_net("a", NetRole::input(Radix::BINARY)).unwrap();
        let m = top.net_or_internal("m").unwrap();
        let y = top.add_net("y", NetRole::output(Radix::BINARY)).unwrap();
        top.add_subckt(inverter()).unwrap();
        top.add_instance(inst("inv", "x1", &[("a", a), ("y", m)])).unwrap();
        top.add_instance(inst("inv", "x2", &[("a", m), ("y", y)])).unwrap();
        assert_eq!(top.flat_device_count(), Ok(4));
        let flat = top.flatten().unwrap();
        assert!(flat.is_flat());
        assert_eq!(flat.devices().len(), 4);
        assert_eq!(flat.ports(), top.ports());
        // Rails merge by name: gnd is created once.
        assert_eq!(flat.supplies().count(), 2);
        assert!(flat.lookup("x1__a").is_none());
    }

    #[test]
    fn self_instantiation_is_a_cycle() {
        let mut sub = inverter();
        let a = sub.lookup("a").unwrap();
        let y = sub.lookup("y").unwrap();
        sub.add_instance(inst("inv", "again", &[("a", a), ("y", y)])).unwrap();
        let mut top = Netlist::new("top");
        let ta = top.add_net("a", NetRole::input(Radix::BINARY)).unwrap();
        let ty = top.add_net("y", NetRole::output(Radix::BINARY)).unwrap();
        top.add_subckt(sub).unwrap();
        top.add_instance(inst("inv", "x", &[("a", ta), ("y", ty)])).unwrap();
        assert!(matches!(top.flatten(), Err(NetlistError::Cycle(_))));
        assert!(matches!(top.flat_device_count(), Err(NetlistError::Cycle(_))));
    }

    #[test]
    fn open_port_and_supply_mismatch() {
        let mut top = Netlist::new("top");
        let a = top.add_net("a", NetRole::input(Radix::BINARY)).unwrap();
        top.add_subckt(inverter()).unwrap();
        top.add_instance(inst("inv", "x", &[("a", a)])).unwrap();
        assert!(matches!(top.flatten(), Err(NetlistError::BadConnection { .. })));

        let mut top = Netlist::new("top");
        top.add_net("v0p9", NetRole::Supply(1.2)).unwrap();
        let a = top.add_net("a", NetRole::input(Radix::BINARY)).unwrap();
        let y = top.add_net("y", NetRole::output(Radix::BINARY)).unwrap();
        top.add_subckt(inverter()).unwrap();
        top.add_instance(inst("inv", "x", &[("a", a), ("y", y)])).unwrap();
        assert!(matches!(top.flatten(), Err(NetlistError::SupplyMismatch { .. })));
    }
}
