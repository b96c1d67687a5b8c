//! Full-adder cells and the ripple-carry composer.
//!
//! Every cell exposes `A B Cin Sum Cout`. Digits use the full 0.9 V range
//! (binary cells may also run at 0.45 V); the carries are binary and swing
//! either to the full supply or to the first multi-valued level.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::device::CntfetSpec;
use crate::gates::{Control, Detector, Stamp, VDD};
use crate::logic::{self, CarrySwing, Radix};
use crate::netlist::{Instance, NetId, NetRole, Netlist, NetlistError};
use crate::solver::{solve_dc, SolveError};

/// Supplies a binary cell may run from.
pub const BINARY_SUPPLIES: [f64; 2] = [0.9, 0.45];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdderVariant {
    Tfa1,
    Tfa2,
    Qfa1,
    Qfa2,
    Bfa1,
    Bfa2,
    Bfa3,
}

impl AdderVariant {
    pub const ALL: [AdderVariant; 7] = [
        AdderVariant::Tfa1,
        AdderVariant::Tfa2,
        AdderVariant::Qfa1,
        AdderVariant::Qfa2,
        AdderVariant::Bfa1,
        AdderVariant::Bfa2,
        AdderVariant::Bfa3,
    ];

    pub fn radix(self) -> Radix {
        match self {
            AdderVariant::Tfa1 | AdderVariant::Tfa2 => Radix::TERNARY,
            AdderVariant::Qfa1 | AdderVariant::Qfa2 => Radix::QUATERNARY,
            _ => Radix::BINARY,
        }
    }

    /// Every legal `(swing, vdd)` pair.
    pub fn configurations(self) -> Vec<(CarrySwing, f64)> {
        match self {
            AdderVariant::Tfa1 | AdderVariant::Tfa2 => {
                vec![(CarrySwing::Reduced, VDD), (CarrySwing::Full, VDD)]
            }
            AdderVariant::Qfa1 => vec![(CarrySwing::Reduced, VDD)],
            AdderVariant::Qfa2 => vec![(CarrySwing::Full, VDD)],
            _ => BINARY_SUPPLIES.iter().map(|&v| (CarrySwing::Full, v)).collect(),
        }
    }

    pub fn default_swing(self) -> CarrySwing {
        match self {
            AdderVariant::Qfa1 => CarrySwing::Reduced,
            _ => CarrySwing::Full,
        }
    }

    pub fn check(self, swing: CarrySwing, vdd: f64) -> Result<(), AdderError> {
        let ok = self
            .configurations()
            .iter()
            .any(|&(s, v)| s == swing && (v - vdd).abs() < 1e-9);
        if ok {
            Ok(())
        } else {
            Err(AdderError::Illegal {
                variant: self,
                swing,
                vdd,
            })
        }
    }

    /// Cell name, e.g. `tfa2_reduced` or `bfa1_v0p45`.
    pub fn cell_name(self, swing: CarrySwing, vdd: f64) -> String {
        let base = self.to_string().to_ascii_lowercase();
        if self.radix() == Radix::BINARY {
            format!("{base}_{}", crate::netlist::supply_name(vdd))
        } else {
            format!("{base}_{swing}")
        }
    }
}

impl fmt::Display for AdderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdderVariant::Tfa1 => "TFA1",
            AdderVariant::Tfa2 => "TFA2",
            AdderVariant::Qfa1 => "QFA1",
            AdderVariant::Qfa2 => "QFA2",
            AdderVariant::Bfa1 => "BFA1",
            AdderVariant::Bfa2 => "BFA2",
            AdderVariant::Bfa3 => "BFA3",
        })
    }
}

impl FromStr for AdderVariant {
    type Err = AdderError;

    /// Case-insensitive; binary names may carry their style suffix (`bfa1_14t`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "tfa1" => AdderVariant::Tfa1,
            "tfa2" => AdderVariant::Tfa2,
            "qfa1" => AdderVariant::Qfa1,
            "qfa2" => AdderVariant::Qfa2,
            "bfa1" | "bfa1_14t" => AdderVariant::Bfa1,
            "bfa2" | "bfa2_28t" => AdderVariant::Bfa2,
            "bfa3" | "bfa3_mux" => AdderVariant::Bfa3,
            _ => return Err(AdderError::UnknownVariant(s.to_string())),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdderError {
    #[error("unknown adder variant `{0}`")]
    UnknownVariant(String),
    #[error("{variant} does not support {swing} carry swing at {vdd} V")]
    Illegal {
        variant: AdderVariant,
        swing: CarrySwing,
        vdd: f64,
    },
    #[error("a carry-propagate adder needs at least one digit")]
    NoDigits,
    #[error("load must be finite and non-negative, got {0} fF")]
    BadLoad(f64),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Port names of a single cell.
pub mod port {
    pub const A: &str = "A";
    pub const B: &str = "B";
    pub const CIN: &str = "Cin";
    pub const SUM: &str = "Sum";
    pub const COUT: &str = "Cout";
}

struct Cell<'a> {
    s: Stamp<'a>,
    radix: Radix,
    swing: f64,
    a: NetId,
    b: NetId,
    cin: NetId,
    sum: NetId,
    cout: NetId,
}

fn declare(name: String, radix: Radix, swing: f64, vdd: f64, nl: &mut Netlist) -> Result<[NetId; 5], NetlistError> {
    nl.set_name(name);
    nl.supply(vdd);
    nl.supply(0.0);
    if swing < vdd {
        nl.supply(swing);
    }
    let digit = if radix == Radix::BINARY { Some(vdd) } else { None };
    let a = nl.add_net(
        port::A,
        NetRole::Input {
            radix,
            full_scale: digit,
        },
    )?;
    let b = nl.add_net(
        port::B,
        NetRole::Input {
            radix,
            full_scale: digit,
        },
    )?;
    let carry = Some(swing);
    let cin = nl.add_net(
        port::CIN,
        NetRole::Input {
            radix: Radix::BINARY,
            full_scale: carry,
        },
    )?;
    let sum = nl.add_net(
        port::SUM,
        NetRole::Output {
            radix,
            full_scale: digit,
        },
    )?;
    let cout = nl.add_net(
        port::COUT,
        NetRole::Output {
            radix: Radix::BINARY,
            full_scale: carry,
        },
    )?;
    Ok([a, b, cin, sum, cout])
}

/// Builds one full-adder cell as a flat subcircuit.
pub fn build_full_adder(variant: AdderVariant, swing: CarrySwing, vdd: f64) -> Result<Netlist, AdderError> {
    variant.check(swing, vdd)?;
    let radix = variant.radix();
    let swing_v = swing.one_voltage(radix, vdd);
    let mut nl = Netlist::new("cell");
    let [a, b, cin, sum, cout] = declare(variant.cell_name(swing, vdd), radix, swing_v, vdd, &mut nl)?;
    let mut cell = Cell {
        s: Stamp::new(&mut nl, "").at_supply(vdd),
        radix,
        swing: swing_v,
        a,
        b,
        cin,
        sum,
        cout,
    };
    match variant {
        AdderVariant::Tfa1 => cell.tfa1(),
        AdderVariant::Tfa2 | AdderVariant::Qfa1 | AdderVariant::Qfa2 | AdderVariant::Bfa3 => cell.mux_style(),
        AdderVariant::Bfa1 => cell.bfa1(),
        AdderVariant::Bfa2 => cell.bfa2(),
    }
    Ok(nl)
}

impl Cell<'_> {
    /// Full-swing select pair for the Cin multiplexers. A reduced carry is
    /// lifted back to the supply by the detector that switches just below it.
    fn cin_control(&mut self, inv: u32) -> Control {
        let cinb = self.s.net("Cinb");
        let cinf = self.s.net("Cinf");
        let vdd = self.s.vdd();
        if self.swing < vdd {
            let det = if self.radix == Radix::TERNARY {
                Detector::Nti
            } else {
                Detector::QLow
            };
            self.s.detector(det, self.cin, cinb);
        } else {
            self.s.inverter_sized(self.cin, cinb, vdd, inv, inv);
        }
        self.s.inverter_sized(cinb, cinf, vdd, inv, inv);
        Control { on: cinf, off: cinb }
    }

    /// Restoring carry inverter powered at the carry swing.
    fn carry_out(&mut self, coutb: NetId) {
        let p = if self.swing < 0.35 { 37 } else { 19 };
        self.s.inverter_sized(coutb, self.cout, self.swing, 19, p);
    }

    /// Complemented conditional carries selected by B, then by Cin.
    /// With thermometer controls `L_j = [A < j]`:
    /// `!Cout0 = [A < r - B]` and `!Cout1 = [A < r - 1 - B]`.
    fn carry_path(&mut self, la: &[Control], lb: &[Control], cin: Control, tg: u32) {
        let r = self.radix.get() as usize;
        let hi = self.s.rail(self.s.vdd());
        let lo = self.s.rail(0.0);
        let l = |j: usize| la[j - 1].on;
        let c0: Vec<NetId> = (0..r).map(|j| if j == 0 { hi } else { l(r - j) }).collect();
        let c1: Vec<NetId> = (0..r).map(|j| if j == r - 1 { lo } else { l(r - 1 - j) }).collect();
        let cout0b = self.s.net("Cout0b");
        let cout1b = self.s.net("Cout1b");
        let coutb = self.s.net("Coutb");
        self.s.with_prefix("k0_").thermo_mux_sized(&c0, lb, cout0b, tg);
        self.s.with_prefix("k1_").thermo_mux_sized(&c1, lb, cout1b, tg);
        self.s.mux2_sized(cout0b, cout1b, cin, coutb, tg);
        self.carry_out(coutb);
    }

    /// Successors of A selected by B into two sum candidates, then by Cin.
    fn mux_style(&mut self) {
        let r = self.radix;
        let la = self.s.decode(self.a, r, "An", false);
        let lb = self.s.decode(self.b, r, "Bn", r == Radix::QUATERNARY);
        let mut succ = vec![self.a];
        for k in 1..r.get() {
            let y = self.s.net(&format!("A{k}"));
            self.s.with_prefix(&format!("a{k}_")).successor(&la, r, k, y);
            succ.push(y);
        }
        let shifted: Vec<NetId> = succ.iter().cycle().skip(1).take(succ.len()).copied().collect();
        let s0 = self.s.net("S0");
        let s1 = self.s.net("S1");
        self.s.with_prefix("s0_").thermo_mux(&succ, &lb, s0);
        self.s.with_prefix("s1_").thermo_mux(&shifted, &lb, s1);
        let cin = self.cin_control(19);
        self.s.mux2(s0, s1, cin, self.sum);
        self.carry_path(&la, &lb, cin, 19);
    }

    /// Ternary cell with five-transistor successors and the sum
    /// multiplexers reordered so Cin selects first.
    fn tfa1(&mut self) {
        // Gates passing the 0.45 V level need the low-threshold tube; the
        // rail-only devices and the binary carry logic use the small one.
        const SUM_TG: u32 = 19;
        const LOGIC: u32 = 10;
        let vdd = self.s.vdd();
        let hi = self.s.rail(vdd);
        let mid = self.s.rail(vdd / 2.0);
        let lo = self.s.rail(0.0);
        let decode = |s: &mut Stamp<'_>, x: NetId, tag: &str| -> Vec<Control> {
            [Detector::Nti, Detector::Pti]
                .iter()
                .zip(["n", "p"])
                .map(|(&det, side)| {
                    let raw = s.net(&format!("{tag}{side}"));
                    let inv = s.net(&format!("{tag}{side}b"));
                    s.detector(det, x, raw);
                    s.inverter_sized(raw, inv, vdd, LOGIC, LOGIC);
                    Control { on: raw, off: inv }
                })
                .collect()
        };
        let la = decode(&mut self.s, self.a, "A");
        let lb = decode(&mut self.s, self.b, "B");
        let (an, ap) = (la[0], la[1]);

        // A+1: 0 -> 0.45 V, 1 -> 0.9 V, 2 -> 0 V.
        let a1 = self.s.net("A1");
        let m1 = self.s.net("a1_m");
        self.s.tgate_sized(mid, a1, an, SUM_TG);
        self.s.nl.add_device(CntfetSpec::p(LOGIC), an.on, hi, m1);
        self.s.nl.add_device(CntfetSpec::p(LOGIC), ap.off, m1, a1);
        self.s.nl.add_device(CntfetSpec::n(LOGIC), ap.off, lo, a1);

        // A+2: 0 -> 0.9 V, 1 -> 0 V, 2 -> 0.45 V.
        let a2 = self.s.net("A2");
        let m2 = self.s.net("a2_m");
        self.s.nl.add_device(CntfetSpec::p(LOGIC), an.off, hi, a2);
        self.s.nl.add_device(CntfetSpec::n(LOGIC), an.off, lo, m2);
        self.s.nl.add_device(CntfetSpec::n(LOGIC), ap.on, m2, a2);
        self.s.tgate_sized(mid, a2, ap.inverted(), SUM_TG);

        let cin = self.cin_control(19);
        let succ = [self.a, a1, a2];
        let x: Vec<NetId> = (0..3)
            .map(|j| {
                let y = self.s.net(&format!("X{j}"));
                self.s.mux2_sized(succ[j], succ[(j + 1) % 3], cin, y, SUM_TG);
                y
            })
            .collect();
        self.s.with_prefix("s_").thermo_mux_sized(&x, &lb, self.sum, SUM_TG);
        self.carry_path(&la, &lb, cin, LOGIC);
    }

    /// Transmission-gate binary adder: `X = A xor B`, `Sum = X xor Cin`,
    /// `Cout = X ? Cin : A`. The carry is passed, not restored.
    fn bfa1(&mut self) {
        let ab = self.s.net("Ab");
        let x = self.s.net("X");
        let xb = self.s.net("Xb");
        self.s.inverter(self.a, ab);
        self.xor_cell(self.b, self.a, Control { on: ab, off: self.a }, ab, x);
        self.s.inverter(x, xb);
        let xc = Control { on: x, off: xb };
        self.xor_cell(self.cin, x, xc.inverted(), xb, self.sum);
        self.s.tgate(self.cin, self.cout, xc);
        self.s.tgate(self.a, self.cout, xc.inverted());
    }

    /// `y = g ? nb : p`, plus a gate passing `g` while `pass` is asserted.
    fn xor_cell(&mut self, g: NetId, p: NetId, pass: Control, nb: NetId, y: NetId) {
        self.s.nl.add_device(CntfetSpec::p(19), g, p, y);
        self.s.nl.add_device(CntfetSpec::n(19), g, nb, y);
        self.s.tgate(g, y, pass);
    }

    /// Static complementary mirror adder with output inverters.
    fn bfa2(&mut self) {
        let vdd = self.s.vdd();
        let hi = self.s.rail(vdd);
        let lo = self.s.rail(0.0);
        let (a, b, c) = (self.a, self.b, self.cin);
        let coutb = self.s.net("Coutb");
        let sumb = self.s.net("Sumb");
        let dev = |s: &mut Stamp<'_>, p: bool, g: NetId, x: NetId, y: NetId| {
            let spec = if p { CntfetSpec::p(19) } else { CntfetSpec::n(19) };
            s.nl.add_device(spec, g, x, y);
        };
        for (p, rail) in [(true, hi), (false, lo)] {
            let side = if p { "p" } else { "n" };
            let x = self.s.net(&format!("c{side}1"));
            let y = self.s.net(&format!("c{side}2"));
            dev(&mut self.s, p, a, rail, x);
            dev(&mut self.s, p, b, rail, x);
            dev(&mut self.s, p, c, x, coutb);
            dev(&mut self.s, p, a, rail, y);
            dev(&mut self.s, p, b, y, coutb);

            let u = self.s.net(&format!("s{side}1"));
            let v = self.s.net(&format!("s{side}2"));
            let w = self.s.net(&format!("s{side}3"));
            dev(&mut self.s, p, a, rail, u);
            dev(&mut self.s, p, b, rail, u);
            dev(&mut self.s, p, c, rail, u);
            dev(&mut self.s, p, coutb, u, sumb);
            dev(&mut self.s, p, a, rail, v);
            dev(&mut self.s, p, b, v, w);
            dev(&mut self.s, p, c, w, sumb);
        }
        self.s.inverter(sumb, self.sum);
        self.s.inverter(coutb, self.cout);
    }
}

/// Ripple-carry adder parameters. `load_ff` is the capacitance hung on every
/// sum output and inter-stage carry during analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpaConfig {
    pub variant: AdderVariant,
    pub digits: usize,
    pub swing: CarrySwing,
    pub vdd: f64,
    pub load_ff: f64,
}

impl CpaConfig {
    pub fn new(variant: AdderVariant, digits: usize) -> Self {
        Self {
            variant,
            digits,
            swing: variant.default_swing(),
            vdd: VDD,
            load_ff: 2.0,
        }
    }

    pub fn with_swing(mut self, swing: CarrySwing) -> Self {
        self.swing = swing;
        self
    }

    pub fn with_vdd(mut self, vdd: f64) -> Self {
        self.vdd = vdd;
        self
    }

    pub fn with_load(mut self, load_ff: f64) -> Self {
        self.load_ff = load_ff;
        self
    }

    pub fn radix(&self) -> Radix {
        self.variant.radix()
    }

    /// Digit count of the standard comparison for this radix.
    pub fn standard_digits(radix: Radix) -> usize {
        match radix.get() {
            2 => 6,
            3 => 4,
            _ => 3,
        }
    }

    pub fn carry_volts(&self) -> f64 {
        self.swing.one_voltage(self.radix(), self.vdd)
    }

    pub fn validate(&self) -> Result<(), AdderError> {
        self.variant.check(self.swing, self.vdd)?;
        if self.digits == 0 {
            return Err(AdderError::NoDigits);
        }
        if !(self.load_ff.is_finite() && self.load_ff >= 0.0) {
            return Err(AdderError::BadLoad(self.load_ff));
        }
        Ok(())
    }
}

/// Port names of an N-digit adder.
pub mod cpa_port {
    pub fn a(i: usize) -> String {
        format!("A{i}")
    }
    pub fn b(i: usize) -> String {
        format!("B{i}")
    }
    pub fn s(i: usize) -> String {
        format!("S{i}")
    }
    /// Carry into stage `i`; `C0` is the adder's carry-in.
    pub fn c(i: usize) -> String {
        format!("C{i}")
    }
    pub const C_FINAL: &str = "C_final";
}

/// Hierarchical ripple-carry adder: one cell instance per digit, chained
/// `Cout_i -> Cin_(i+1)` with no extra buffering.
pub fn build_cpa(config: &CpaConfig) -> Result<Netlist, AdderError> {
    config.validate()?;
    let cell = build_full_adder(config.variant, config.swing, config.vdd)?;
    let radix = config.radix();
    let n = config.digits;
    let digit = (radix == Radix::BINARY).then_some(config.vdd);
    let carry = Some(config.carry_volts());
    let mut nl = Netlist::new(format!("cpa_{}x{n}", cell.name()));
    for (_, v) in cell.supplies() {
        nl.supply(v);
    }
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let a = nl.add_net(
            &cpa_port::a(i),
            NetRole::Input {
                radix,
                full_scale: digit,
            },
        )?;
        let b = nl.add_net(
            &cpa_port::b(i),
            NetRole::Input {
                radix,
                full_scale: digit,
            },
        )?;
        ids.push((a, b));
    }
    let c0 = nl.add_net(
        &cpa_port::c(0),
        NetRole::Input {
            radix: Radix::BINARY,
            full_scale: carry,
        },
    )?;
    let mut carries = vec![c0];
    for i in 1..n {
        carries.push(nl.add_net(&cpa_port::c(i), NetRole::Internal)?);
    }
    let mut sums = Vec::with_capacity(n);
    for i in 0..n {
        sums.push(nl.add_net(
            &cpa_port::s(i),
            NetRole::Output {
                radix,
                full_scale: digit,
            },
        )?);
    }
    let c_final = nl.add_net(
        cpa_port::C_FINAL,
        NetRole::Output {
            radix: Radix::BINARY,
            full_scale: carry,
        },
    )?;
    carries.push(c_final);
    let subckt = cell.name().to_string();
    nl.add_subckt(cell)?;
    for i in 0..n {
        nl.add_instance(Instance {
            subckt: subckt.clone(),
            name: format!("fa{i}"),
            connections: vec![
                (port::A.to_string(), ids[i].0),
                (port::B.to_string(), ids[i].1),
                (port::CIN.to_string(), carries[i]),
                (port::SUM.to_string(), sums[i]),
                (port::COUT.to_string(), carries[i + 1]),
            ],
        })?;
    }
    Ok(nl)
}

/// Resolved ports of an adder, single cell or N-digit.
#[derive(Debug, Clone, PartialEq)]
pub struct AdderPorts {
    pub a: Vec<NetId>,
    pub b: Vec<NetId>,
    pub cin: NetId,
    pub sum: Vec<NetId>,
    pub cout: NetId,
}

impl AdderPorts {
    /// Tries the single-cell names first, then the N-digit names.
    pub fn find(nl: &Netlist, digits: usize) -> Result<Self, NetlistError> {
        if digits == 1 {
            if let (Some(a), Some(b), Some(cin), Some(sum), Some(cout)) = (
                nl.lookup(port::A),
                nl.lookup(port::B),
                nl.lookup(port::CIN),
                nl.lookup(port::SUM),
                nl.lookup(port::COUT),
            ) {
                return Ok(Self {
                    a: vec![a],
                    b: vec![b],
                    cin,
                    sum: vec![sum],
                    cout,
                });
            }
        }
        let many = |f: fn(usize) -> String| (0..digits).map(|i| nl.require(&f(i))).collect::<Result<Vec<_>, _>>();
        Ok(Self {
            a: many(cpa_port::a)?,
            b: many(cpa_port::b)?,
            cin: nl.require(&cpa_port::c(0))?,
            sum: many(cpa_port::s)?,
            cout: nl.require(cpa_port::C_FINAL)?,
        })
    }

    pub fn digits(&self) -> usize {
        self.a.len()
    }

    /// Input assignment for operands `a`, `b` and carry-in `cin`.
    pub fn assignment(&self, radix: Radix, a: u64, b: u64, cin: u32) -> Vec<(NetId, u32)> {
        let n = self.digits();
        let da = logic::value_to_digits(radix, a, n).expect("operand fits");
        let db = logic::value_to_digits(radix, b, n).expect("operand fits");
        let mut out: Vec<(NetId, u32)> = self.a.iter().copied().zip(da).collect();
        out.extend(self.b.iter().copied().zip(db));
        out.push((self.cin, cin));
        out
    }
}

/// One failing input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFailure {
    pub a: u64,
    pub b: u64,
    pub cin: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub vectors: usize,
    pub failures: usize,
    pub conflicts: usize,
    /// The first few failures in vector order.
    pub examples: Vec<VectorFailure>,
}

impl VerifyReport {
    pub const MAX_EXAMPLES: usize = 8;

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.conflicts == 0 && self.vectors > 0
    }

    fn merge(mut self, other: Self) -> Self {
        self.vectors += other.vectors;
        self.failures += other.failures;
        self.conflicts += other.conflicts;
        self.examples.extend(other.examples);
        self.examples.truncate(Self::MAX_EXAMPLES);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("operand space {radix}^{digits} is too large to enumerate")]
    TooLarge { radix: u32, digits: usize },
}

/// Checks `A + B + Cin == Sum + radix^digits * Cout` over every input vector.
pub fn verify_exhaustive(nl: &Netlist, radix: Radix, digits: usize) -> Result<VerifyReport, VerifyError> {
    let flat;
    let nl = if nl.is_flat() {
        nl
    } else {
        flat = nl.flatten()?;
        &flat
    };
    let ports = AdderPorts::find(nl, digits)?;
    let too_large = || VerifyError::TooLarge {
        radix: radix.get(),
        digits,
    };
    let span = u64::from(radix.get())
        .checked_pow(u32::try_from(digits).map_err(|_| too_large())?)
        .ok_or_else(too_large)?;
    let total = span
        .checked_mul(span)
        .and_then(|v| v.checked_mul(2))
        .ok_or_else(too_large)?;
    let sum_maps: Vec<_> = ports.sum.iter().map(|&s| nl.voltage_map(s)).collect();
    let cout_map = nl.voltage_map(ports.cout);

    let report = (0..total)
        .into_par_iter()
        .map(|index| {
            let cin = (index % 2) as u32;
            let a = (index / 2) % span;
            let b = index / 2 / span;
            let mut r = VerifyReport {
                vectors: 1,
                ..Default::default()
            };
            let fail = |reason: String| VectorFailure { a, b, cin, reason };
            let outcome = check_vector(nl, &ports, radix, &sum_maps, cout_map.as_ref(), a, b, cin);
            match outcome {
                Ok(None) => {}
                Ok(Some(reason)) => {
                    r.failures = 1;
                    r.examples.push(fail(reason));
                }
                Err(Conflicted(reason)) => {
                    r.failures = 1;
                    r.conflicts = 1;
                    r.examples.push(fail(reason));
                }
            }
            r
        })
        .reduce(VerifyReport::default, VerifyReport::merge);
    let mut report = report;
    report.examples.sort_by_key(|f| (f.b, f.a, f.cin));
    Ok(report)
}

struct Conflicted(String);

#[allow(clippy::too_many_arguments)]
fn check_vector(
    nl: &Netlist,
    ports: &AdderPorts,
    radix: Radix,
    sum_maps: &[Option<logic::VoltageMap>],
    cout_map: Option<&logic::VoltageMap>,
    a: u64,
    b: u64,
    cin: u32,
) -> Result<Option<String>, Conflicted> {
    let assignment = ports.assignment(radix, a, b, cin);
    let stim = match crate::solver::stimulus_from_digits(nl, assignment) {
        Ok(s) => s,
        Err(e) => return Ok(Some(e.to_string())),
    };
    let st = match solve_dc(nl, &stim) {
        Ok(st) => st,
        Err(e @ SolveError::NonConvergence(_)) => return Err(Conflicted(e.to_string())),
        Err(e) => return Ok(Some(e.to_string())),
    };
    if !st.is_conflict_free() {
        return Err(Conflicted(format!("{} conflicting node groups", st.conflicts().len())));
    }
    let decode =
        |id: NetId, map: Option<&logic::VoltageMap>| st.value(id).driven().and_then(|v| map.and_then(|m| m.decode(v)));
    let mut sum = Vec::with_capacity(ports.sum.len());
    for (i, (&id, map)) in ports.sum.iter().zip(sum_maps).enumerate() {
        match decode(id, map.as_ref()) {
            Some(d) => sum.push(d),
            None => return Ok(Some(format!("sum digit {i} is {:?}", st.value(id)))),
        }
    }
    let Some(cout) = decode(ports.cout, cout_map) else {
        return Ok(Some(format!("carry-out is {:?}", st.value(ports.cout))));
    };
    let n = ports.digits();
    let got = logic::digits_to_value(radix, &sum).expect("decoded digits are in range")
        + u64::from(cout) * logic::capacity(radix, n);
    let want = a + b + u64::from(cin);
    Ok((got != want).then(|| format!("got {got}, expected {want}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::stimulus_from_digits;

    fn eval(nl: &Netlist, a: u32, b: u32, cin: u32) -> (u32, u32) {
        let p = AdderPorts::find(nl, 1).unwrap();
        let st = solve_dc(
            nl,
            &stimulus_from_digits(nl, [(p.a[0], a), (p.b[0], b), (p.cin, cin)]).unwrap(),
        )
        .unwrap();
        let d = |id| {
            nl.voltage_map(id)
                .unwrap()
                .decode(st.value(id).driven().unwrap())
                .unwrap()
        };
        (d(p.sum[0]), d(p.cout))
    }

    #[test]
    fn paper_rows() {
        let tfa2 = build_full_adder(AdderVariant::Tfa2, CarrySwing::Full, VDD).unwrap();
        assert_eq!(eval(&tfa2, 1, 2, 1), (1, 1));
        let qfa2 = build_full_adder(AdderVariant::Qfa2, CarrySwing::Full, VDD).unwrap();
        assert_eq!(eval(&qfa2, 2, 2, 0), (0, 1));
        let bfa1 = build_full_adder(AdderVariant::Bfa1, CarrySwing::Full, VDD).unwrap();
        assert_eq!(eval(&bfa1, 1, 1, 1), (1, 1));
    }

    #[test]
    fn every_cell_verifies() {
        for v in AdderVariant::ALL {
            for (swing, vdd) in v.configurations() {
                let nl = build_full_adder(v, swing, vdd).unwrap();
                let r = verify_exhaustive(&nl, v.radix(), 1).unwrap();
                let expect = 2 * (v.radix().get() as usize).pow(2);
                assert_eq!(r.vectors, expect);
                assert!(r.passed(), "{v} {swing} {vdd}: {r:?}");
            }
        }
    }

    #[test]
    fn illegal_combinations() {
        assert!(build_full_adder(AdderVariant::Qfa1, CarrySwing::Full, VDD).is_err());
        assert!(build_full_adder(AdderVariant::Qfa2, CarrySwing::Reduced, VDD).is_err());
        assert!(build_full_adder(AdderVariant::Bfa1, CarrySwing::Full, 0.6).is_err());
        assert!(build_full_adder(AdderVariant::Tfa1, CarrySwing::Full, 0.45).is_err());
        assert!(build_cpa(&CpaConfig::new(AdderVariant::Tfa2, 0)).is_err());
    }

    #[test]
    fn variant_names() {
        for v in AdderVariant::ALL {
            assert_eq!(v.to_string().parse::<AdderVariant>().unwrap(), v);
        }
        assert_eq!("bfa1_14t".parse::<AdderVariant>().unwrap(), AdderVariant::Bfa1);
        assert!("tfa3".parse::<AdderVariant>().is_err());
    }

    #[test]
    fn cpa_flattens_to_stage_multiple() {
        let cell = build_full_adder(AdderVariant::Tfa2, CarrySwing::Full, VDD).unwrap();
        let cpa = build_cpa(&CpaConfig::new(AdderVariant::Tfa2, 4)).unwrap();
        assert_eq!(cpa.flatten().unwrap().devices().len(), 4 * cell.devices().len());
    }
}
