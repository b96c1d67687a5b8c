//! Parametric netlist generators for the building blocks.
//!
//! Multi-valued signals are decoded into thermometer controls by threshold
//! detectors: control `j` (1-based) is asserted while the digit is below `j`.
//! Each detector is an inverter whose N and P thresholds bracket the
//! switching point between two adjacent levels:
//!
//! | detector | N (n, Vth)  | P (n, Vth)  | switches between |
//! |----------|-------------|-------------|------------------|
//! | NTI      | 19, 0.293 V | 10, 0.557 V | 0 and 0.45 V     |
//! | PTI      | 10, 0.557 V | 19, 0.293 V | 0.45 and 0.9 V   |
//! | QDetLow  | 37, 0.150 V | 8, 0.696 V  | 0 and 0.3 V      |
//! | QDetMid  | 13, 0.428 V | 13, 0.428 V | 0.3 and 0.6 V    |
//! | QDetHigh | 8, 0.696 V  | 29, 0.192 V | 0.6 and 0.9 V    |
//!
//! At every level exactly one device of a detector conducts, so no detector
//! shorts its rails. Multiplexers and successor circuits steer levels with
//! complementary transmission gates only.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::device::{CntfetSpec, REFERENCE_TABLE};
use crate::logic::{self, Radix};
use crate::netlist::{NetId, NetRole, Netlist, NetlistError};
use crate::solver::{solve_dc, stimulus_from_digits, NodeValue, SolveError};

/// Supply of every multi-valued circuit.
pub const VDD: f64 = 0.9;
/// Chirality of plain binary logic and transmission gates.
pub const LOGIC_CHIRALITY: u32 = 19;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// A complementary control pair: `on` is high when the condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub on: NetId,
    pub off: NetId,
}

impl Control {
    pub fn inverted(self) -> Self {
        Control {
            on: self.off,
            off: self.on,
        }
    }
}

/// Threshold detector flavours, by the level pair they switch between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Binary,
    Nti,
    Pti,
    QLow,
    QMid,
    QHigh,
}

impl Detector {
    /// `(N chirality, P chirality)`.
    pub fn chiralities(self) -> (u32, u32) {
        match self {
            Detector::Binary => (19, 19),
            Detector::Nti => (19, 10),
            Detector::Pti => (10, 19),
            Detector::QLow => (37, 8),
            Detector::QMid => (13, 13),
            Detector::QHigh => (8, 29),
        }
    }

    /// Detector `j` of the thermometer code is high while the digit is below `j`.
    pub fn thermometer(radix: Radix) -> &'static [Detector] {
        match radix.get() {
            2 => &[Detector::Binary],
            3 => &[Detector::Nti, Detector::Pti],
            _ => &[Detector::QLow, Detector::QMid, Detector::QHigh],
        }
    }
}

/// Stamps cells into a netlist, naming internal nets `<prefix><local>`.
pub struct Stamp<'a> {
    pub nl: &'a mut Netlist,
    prefix: String,
    fresh: usize,
    vdd: f64,
}

impl<'a> Stamp<'a> {
    pub fn new(nl: &'a mut Netlist, prefix: impl Into<String>) -> Self {
        Self {
            nl,
            prefix: prefix.into(),
            fresh: 0,
            vdd: VDD,
        }
    }

    /// Supply used by logic inverters, detectors and successor rails.
    pub fn at_supply(mut self, vdd: f64) -> Self {
        self.vdd = vdd;
        self
    }

    pub fn vdd(&self) -> f64 {
        self.vdd
    }

    pub fn with_prefix(&mut self, prefix: &str) -> Stamp<'_> {
        Stamp {
            nl: self.nl,
            prefix: format!("{}{prefix}", self.prefix),
            fresh: 0,
            vdd: self.vdd,
        }
    }

    pub fn net(&mut self, local: &str) -> NetId {
        let name = format!("{}{local}", self.prefix);
        self.nl
            .net_or_internal(&name)
            .expect("generated net names are identifiers")
    }

    pub fn anon(&mut self) -> NetId {
        self.fresh += 1;
        let name = format!("t{}", self.fresh);
        self.net(&name)
    }

    pub fn rail(&mut self, volts: f64) -> NetId {
        self.nl.supply(volts)
    }

    pub fn inverter_sized(&mut self, a: NetId, y: NetId, vdd: f64, n: u32, p: u32) {
        let hi = self.rail(vdd);
        let lo = self.rail(0.0);
        self.nl.add_device(CntfetSpec::p(p), a, hi, y);
        self.nl.add_device(CntfetSpec::n(n), a, lo, y);
    }

    pub fn inverter(&mut self, a: NetId, y: NetId) {
        self.inverter_sized(a, y, self.vdd, LOGIC_CHIRALITY, LOGIC_CHIRALITY);
    }

    pub fn detector(&mut self, kind: Detector, a: NetId, y: NetId) {
        let (n, p) = kind.chiralities();
        self.inverter_sized(a, y, self.vdd, n, p);
    }

    pub fn tgate_sized(&mut self, x: NetId, y: NetId, en: Control, chirality: u32) {
        self.nl.add_device(CntfetSpec::n(chirality), en.on, x, y);
        self.nl.add_device(CntfetSpec::p(chirality), en.off, x, y);
    }

    pub fn tgate(&mut self, x: NetId, y: NetId, en: Control) {
        self.tgate_sized(x, y, en, LOGIC_CHIRALITY);
    }

    /// Thermometer controls of a digit: detector, inverter and, when
    /// `buffered`, a second inverter driving the `on` side.
    pub fn decode(&mut self, a: NetId, radix: Radix, tag: &str, buffered: bool) -> Vec<Control> {
        Detector::thermometer(radix)
            .iter()
            .enumerate()
            .map(|(j, &det)| {
                let raw = self.net(&format!("{tag}{}", j + 1));
                let inv = self.net(&format!("{tag}{}b", j + 1));
                self.detector(det, a, raw);
                self.inverter(raw, inv);
                if buffered {
                    let buf = self.net(&format!("{tag}{}bb", j + 1));
                    self.inverter(inv, buf);
                    Control { on: buf, off: inv }
                } else {
                    Control { on: raw, off: inv }
                }
            })
            .collect()
    }

    /// Selects `data[s]` under thermometer controls of `s`.
    pub fn thermo_mux_sized(&mut self, data: &[NetId], levels: &[Control], y: NetId, chirality: u32) {
        assert_eq!(data.len(), levels.len() + 1, "one control per level boundary");
        let last = levels.len();
        for (j, &d) in data.iter().enumerate() {
            match j {
                0 => self.tgate_sized(d, y, levels[0], chirality),
                j if j == last => self.tgate_sized(d, y, levels[last - 1].inverted(), chirality),
                j => {
                    let mid = self.anon();
                    self.tgate_sized(d, mid, levels[j - 1].inverted(), chirality);
                    self.tgate_sized(mid, y, levels[j], chirality);
                }
            }
        }
    }

    pub fn thermo_mux(&mut self, data: &[NetId], levels: &[Control], y: NetId) {
        self.thermo_mux_sized(data, levels, y, LOGIC_CHIRALITY);
    }

    /// `y = sel ? d1 : d0`.
    pub fn mux2_sized(&mut self, d0: NetId, d1: NetId, sel: Control, y: NetId, chirality: u32) {
        self.tgate_sized(d0, y, sel.inverted(), chirality);
        self.tgate_sized(d1, y, sel, chirality);
    }

    pub fn mux2(&mut self, d0: NetId, d1: NetId, sel: Control, y: NetId) {
        self.mux2_sized(d0, d1, sel, y, LOGIC_CHIRALITY);
    }

    /// `(a + k) mod radix` by steering supply rails.
    pub fn successor(&mut self, levels: &[Control], radix: Radix, k: u32, y: NetId) {
        let step = self.vdd / f64::from(radix.max_digit());
        let rails: Vec<NetId> = radix
            .digits()
            .map(|j| self.rail(step * f64::from((j + k) % radix.get())))
            .collect();
        self.thermo_mux(&rails, levels, y);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Inverter { vdd: f64, n: u32, p: u32 },
    Nti,
    Pti,
    QDetLow,
    QDetMid,
    QDetHigh,
    Buffer,
    TGate,
    Mux2,
    Mux3Ternary,
    Mux4Quaternary,
    SuccTernary(u32),
    SuccQuaternary(u32),
    Nand2,
    Nor2,
    Xor2,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.subckt_name())
    }
}

struct Port {
    name: &'static str,
    radix: Radix,
}

const fn port(name: &'static str, radix: Radix) -> Port {
    Port { name, radix }
}

const B: Radix = Radix::BINARY;
const T: Radix = Radix::TERNARY;
const Q: Radix = Radix::QUATERNARY;

impl GateKind {
    /// Every kind at its reference parameters.
    pub fn library() -> Vec<GateKind> {
        vec![
            GateKind::Inverter { vdd: VDD, n: 19, p: 19 },
            GateKind::Inverter {
                vdd: 0.45,
                n: 19,
                p: 19,
            },
            GateKind::Nti,
            GateKind::Pti,
            GateKind::QDetLow,
            GateKind::QDetMid,
            GateKind::QDetHigh,
            GateKind::Buffer,
            GateKind::TGate,
            GateKind::Mux2,
            GateKind::Mux3Ternary,
            GateKind::Mux4Quaternary,
            GateKind::SuccTernary(1),
            GateKind::SuccTernary(2),
            GateKind::SuccQuaternary(1),
            GateKind::SuccQuaternary(2),
            GateKind::SuccQuaternary(3),
            GateKind::Nand2,
            GateKind::Nor2,
            GateKind::Xor2,
        ]
    }

    pub fn subckt_name(&self) -> String {
        match *self {
            GateKind::Inverter { vdd, n, p } => {
                format!("inv_{}_n{n}_p{p}", crate::netlist::supply_name(vdd))
            }
            GateKind::Nti => "nti".into(),
            GateKind::Pti => "pti".into(),
            GateKind::QDetLow => "qdet_low".into(),
            GateKind::QDetMid => "qdet_mid".into(),
            GateKind::QDetHigh => "qdet_high".into(),
            GateKind::Buffer => "buf".into(),
            GateKind::TGate => "tgate".into(),
            GateKind::Mux2 => "mux2".into(),
            GateKind::Mux3Ternary => "mux3".into(),
            GateKind::Mux4Quaternary => "mux4".into(),
            GateKind::SuccTernary(k) => format!("succ3_{k}"),
            GateKind::SuccQuaternary(k) => format!("succ4_{k}"),
            GateKind::Nand2 => "nand2".into(),
            GateKind::Nor2 => "nor2".into(),
            GateKind::Xor2 => "xor2".into(),
        }
    }

    fn supply(&self) -> f64 {
        match *self {
            GateKind::Inverter { vdd, .. } => vdd,
            _ => VDD,
        }
    }

    fn inputs(&self) -> Vec<Port> {
        match self {
            GateKind::Inverter { .. } | GateKind::Buffer => vec![port("a", B)],
            GateKind::Nti | GateKind::Pti | GateKind::SuccTernary(_) => vec![port("a", T)],
            GateKind::QDetLow | GateKind::QDetMid | GateKind::QDetHigh | GateKind::SuccQuaternary(_) => {
                vec![port("a", Q)]
            }
            GateKind::TGate => vec![port("d", T), port("en", B), port("enb", B)],
            GateKind::Mux2 => vec![port("d0", T), port("d1", T), port("s", B)],
            GateKind::Mux3Ternary => vec![port("d0", T), port("d1", T), port("d2", T), port("s", T)],
            GateKind::Mux4Quaternary => vec![port("d0", Q), port("d1", Q), port("d2", Q), port("d3", Q), port("s", Q)],
            GateKind::Nand2 | GateKind::Nor2 | GateKind::Xor2 => vec![port("a", B), port("b", B)],
        }
    }

    fn output_radix(&self) -> Radix {
        match self {
            GateKind::Nti | GateKind::Pti | GateKind::SuccTernary(_) => T,
            GateKind::QDetLow | GateKind::QDetMid | GateKind::QDetHigh | GateKind::SuccQuaternary(_) => Q,
            GateKind::TGate | GateKind::Mux2 | GateKind::Mux3Ternary => T,
            GateKind::Mux4Quaternary => Q,
            _ => B,
        }
    }

    fn check(&self) -> Result<(), GateError> {
        let supported = |c: u32| REFERENCE_TABLE.iter().any(|row| row.0 == c);
        match *self {
            GateKind::Inverter { vdd, n, p } => {
                if !(supported(n) && supported(p)) {
                    return Err(GateError::Unsupported(format!("inverter chirality n={n} p={p}")));
                }
                if !(vdd > 0.0 && vdd.is_finite()) {
                    return Err(GateError::Unsupported(format!("inverter supply {vdd} V")));
                }
                Ok(())
            }
            GateKind::SuccTernary(k) if !(1..=2).contains(&k) => {
                Err(GateError::Unsupported(format!("ternary successor offset {k}")))
            }
            GateKind::SuccQuaternary(k) if !(1..=3).contains(&k) => {
                Err(GateError::Unsupported(format!("quaternary successor offset {k}")))
            }
            _ => Ok(()),
        }
    }

    /// All input digit vectors the kind is specified over, in port order.
    pub fn input_domain(&self) -> Vec<Vec<u32>> {
        let ports = self.inputs();
        let mut out = vec![Vec::new()];
        for p in &ports {
            out = out
                .into_iter()
                .flat_map(|v| {
                    p.radix.digits().map(move |d| {
                        let mut w = v.clone();
                        w.push(d);
                        w
                    })
                })
                .collect();
        }
        if *self == GateKind::TGate {
            // en and enb are complementary.
            out.retain(|v| v[1] + v[2] == 1);
        }
        out
    }

    /// Expected output digit per input vector; `None` is a released (undriven) output.
    pub fn behavioral_table(&self) -> BTreeMap<Vec<u32>, Option<u32>> {
        self.input_domain()
            .into_iter()
            .map(|v| {
                let y = self.evaluate(&v);
                (v, y)
            })
            .collect()
    }

    fn evaluate(&self, v: &[u32]) -> Option<u32> {
        let below = |a: u32, j: u32, r: u32| if a < j { r - 1 } else { 0 };
        Some(match *self {
            GateKind::Inverter { .. } => 1 - v[0],
            GateKind::Buffer => v[0],
            GateKind::Nti => logic::ni(v[0]).ok()?,
            GateKind::Pti => logic::pi(v[0]).ok()?,
            GateKind::QDetLow => below(v[0], 1, 4),
            GateKind::QDetMid => below(v[0], 2, 4),
            GateKind::QDetHigh => below(v[0], 3, 4),
            GateKind::TGate => return (v[1] == 1).then_some(v[0]),
            GateKind::Mux2 => v[v[2] as usize],
            GateKind::Mux3Ternary => v[v[3] as usize],
            GateKind::Mux4Quaternary => v[v[4] as usize],
            GateKind::SuccTernary(k) => logic::succ(T, v[0], k).ok()?,
            GateKind::SuccQuaternary(k) => logic::succ(Q, v[0], k).ok()?,
            GateKind::Nand2 => 1 - (v[0] & v[1]),
            GateKind::Nor2 => 1 - (v[0] | v[1]),
            GateKind::Xor2 => v[0] ^ v[1],
        })
    }

    /// Flat subcircuit with ports `<inputs...> y`.
    pub fn build(&self) -> Result<Netlist, GateError> {
        self.check()?;
        let vdd = self.supply();
        let mut nl = Netlist::new(self.subckt_name());
        nl.supply(vdd);
        nl.supply(0.0);
        let mut ins = Vec::new();
        for p in self.inputs() {
            let full_scale = (p.radix == B && vdd != VDD).then_some(vdd);
            ins.push(nl.add_net(
                p.name,
                NetRole::Input {
                    radix: p.radix,
                    full_scale,
                },
            )?);
        }
        let full_scale = (vdd != VDD).then_some(vdd);
        let y = nl.add_net(
            "y",
            NetRole::Output {
                radix: self.output_radix(),
                full_scale,
            },
        )?;
        let mut s = Stamp::new(&mut nl, "");
        match *self {
            GateKind::Inverter { vdd, n, p } => s.inverter_sized(ins[0], y, vdd, n, p),
            GateKind::Nti => s.detector(Detector::Nti, ins[0], y),
            GateKind::Pti => s.detector(Detector::Pti, ins[0], y),
            GateKind::QDetLow => s.detector(Detector::QLow, ins[0], y),
            GateKind::QDetMid => s.detector(Detector::QMid, ins[0], y),
            GateKind::QDetHigh => s.detector(Detector::QHigh, ins[0], y),
            GateKind::Buffer => {
                let m = s.net("ab");
                s.inverter(ins[0], m);
                s.inverter(m, y);
            }
            GateKind::TGate => s.tgate(
                ins[0],
                y,
                Control {
                    on: ins[1],
                    off: ins[2],
                },
            ),
            GateKind::Mux2 => {
                let sb = s.net("sb");
                s.inverter(ins[2], sb);
                s.mux2(ins[0], ins[1], Control { on: ins[2], off: sb }, y);
            }
            GateKind::Mux3Ternary => {
                let levels = s.decode(ins[3], T, "s", false);
                s.thermo_mux(&ins[..3], &levels, y);
            }
            GateKind::Mux4Quaternary => {
                let levels = s.decode(ins[4], Q, "s", true);
                s.thermo_mux(&ins[..4], &levels, y);
            }
            GateKind::SuccTernary(k) => {
                let levels = s.decode(ins[0], T, "a", false);
                s.successor(&levels, T, k, y);
            }
            GateKind::SuccQuaternary(k) => {
                let levels = s.decode(ins[0], Q, "a", false);
                s.successor(&levels, Q, k, y);
            }
            GateKind::Nand2 | GateKind::Nor2 => {
                let hi = s.rail(VDD);
                let lo = s.rail(0.0);
                let m = s.net("m");
                let (a, b) = (ins[0], ins[1]);
                let (n, p) = (CntfetSpec::n(19), CntfetSpec::p(19));
                if *self == GateKind::Nand2 {
                    s.nl.add_device(p, a, hi, y);
                    s.nl.add_device(p, b, hi, y);
                    s.nl.add_device(n, a, y, m);
                    s.nl.add_device(n, b, m, lo);
                } else {
                    s.nl.add_device(p, a, hi, m);
                    s.nl.add_device(p, b, m, y);
                    s.nl.add_device(n, a, y, lo);
                    s.nl.add_device(n, b, y, lo);
                }
            }
            GateKind::Xor2 => {
                let ab = s.net("ab");
                let bb = s.net("bb");
                s.inverter(ins[0], ab);
                s.inverter(ins[1], bb);
                s.mux2(ins[0], ab, Control { on: ins[1], off: bb }, y);
            }
        }
        Ok(nl)
    }
}

/// One input vector where the built circuit disagrees with its table.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub inputs: Vec<u32>,
    pub expected: Option<u32>,
    pub observed: NodeValue,
    pub conflicts: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConformanceError {
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("{vector:?}: {source}")]
    Solve { vector: Vec<u32>, source: SolveError },
}

/// Solves `build(kind)` at every input vector and compares against the table.
pub fn check_conformance(kind: GateKind) -> Result<Vec<Mismatch>, ConformanceError> {
    let nl = kind.build()?;
    let ins: Vec<NetId> = kind
        .inputs()
        .iter()
        .map(|p| nl.lookup(p.name).expect("port exists"))
        .collect();
    let y = nl.lookup("y").expect("output exists");
    let out_map = nl.voltage_map(y).expect("output has a level map");
    let mut bad = Vec::new();
    for (vector, expected) in kind.behavioral_table() {
        let stim = stimulus_from_digits(&nl, ins.iter().copied().zip(vector.iter().copied())).map_err(|source| {
            ConformanceError::Solve {
                vector: vector.clone(),
                source,
            }
        })?;
        let st = solve_dc(&nl, &stim).map_err(|source| ConformanceError::Solve {
            vector: vector.clone(),
            source,
        })?;
        let observed = st.value(y);
        let ok = st.is_conflict_free()
            && match expected {
                Some(d) => observed.driven().and_then(|v| out_map.decode(v)) == Some(d),
                None => observed.driven().is_none(),
            };
        if !ok {
            bad.push(Mismatch {
                inputs: vector,
                expected,
                observed,
                conflicts: st.conflicts().len(),
            });
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse, serialize};

    fn output_volts(kind: GateKind, inputs: &[u32]) -> NodeValue {
        let nl = kind.build().unwrap();
        let ins: Vec<NetId> = kind.inputs().iter().map(|p| nl.lookup(p.name).unwrap()).collect();
        let stim = stimulus_from_digits(&nl, ins.into_iter().zip(inputs.iter().copied())).unwrap();
        solve_dc(&nl, &stim).unwrap().value(nl.lookup("y").unwrap())
    }

    #[test]
    fn every_kind_conforms() {
        for kind in GateKind::library() {
            let bad = check_conformance(kind).unwrap();
            assert!(bad.is_empty(), "{kind}: {bad:?}");
        }
    }

    #[test]
    fn nti_voltages() {
        assert_eq!(output_volts(GateKind::Nti, &[0]), NodeValue::Driven(0.9));
        assert_eq!(output_volts(GateKind::Nti, &[1]), NodeValue::Driven(0.0));
        assert_eq!(output_volts(GateKind::Nti, &[2]), NodeValue::Driven(0.0));
    }

    #[test]
    fn qdet_mid_switches_between_0p3_and_0p6() {
        let got: Vec<NodeValue> = (0..4).map(|a| output_volts(GateKind::QDetMid, &[a])).collect();
        use NodeValue::Driven;
        assert_eq!(got, vec![Driven(0.9), Driven(0.9), Driven(0.0), Driven(0.0)]);
    }

    #[test]
    fn successor_wraps() {
        let nl = GateKind::SuccTernary(1).build().unwrap();
        let a = nl.lookup("a").unwrap();
        let y = nl.lookup("y").unwrap();
        let st = solve_dc(&nl, &stimulus_from_digits(&nl, [(a, 2)]).unwrap()).unwrap();
        assert_eq!(st.value(y), NodeValue::Driven(0.0));
    }

    #[test]
    fn behavioral_tables() {
        let mux3 = GateKind::Mux3Ternary.behavioral_table();
        for s in 0..3 {
            assert_eq!(mux3[&vec![0, 1, 2, s]], Some(s));
        }
        assert_eq!(
            GateKind::Mux4Quaternary.behavioral_table()[&vec![0, 1, 2, 1, 3]],
            Some(1)
        );
        let tg = GateKind::TGate.behavioral_table();
        for d in 0..3 {
            assert_eq!(tg[&vec![d, 1, 0]], Some(d));
            assert_eq!(tg[&vec![d, 0, 1]], None);
        }
        assert_eq!(tg.len(), 6);
    }

    #[test]
    fn unsupported_parameters() {
        assert!(GateKind::SuccTernary(3).build().is_err());
        assert!(GateKind::SuccQuaternary(0).build().is_err());
        assert!(GateKind::Inverter { vdd: 0.9, n: 11, p: 19 }.build().is_err());
    }

    #[test]
    fn detectors_never_short() {
        for kind in [
            GateKind::Nti,
            GateKind::Pti,
            GateKind::QDetLow,
            GateKind::QDetMid,
            GateKind::QDetHigh,
        ] {
            let nl = kind.build().unwrap();
            let a = nl.lookup("a").unwrap();
            for v in kind.input_domain() {
                let st = solve_dc(&nl, &stimulus_from_digits(&nl, [(a, v[0])]).unwrap()).unwrap();
                assert_eq!(st.conducting().iter().filter(|&&c| c).count(), 1, "{kind} at {v:?}");
            }
        }
    }

    #[test]
    fn subckt_text_round_trips() {
        for kind in GateKind::library() {
            let nl = kind.build().unwrap();
            let text = serialize(&nl);
            let back = parse(&text).unwrap();
            assert_eq!(back.devices().len(), nl.devices().len(), "{kind}");
            assert_eq!(serialize(&back), text);
        }
    }
}
