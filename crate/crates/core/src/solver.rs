//! Switch-level steady-state solver.
//!
//! Every device is an ideal switch: conducting or open, decided by comparing
//! its gate overdrive against the threshold voltage. Nets joined by
//! conducting channels form channel-connected components; a component that
//! contains sources (supplies and driven inputs) takes their voltage, and a
//! component without sources floats. The solve repeats until the conduction
//! pattern reproduces itself.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::device::{CntfetSpec, Polarity};
use crate::netlist::{NetId, NetRole, Netlist};

/// Two source voltages closer than this are the same rail.
const SAME_VOLTAGE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("netlist `{0}` still has subcircuit instances; flatten it first")]
    NotFlat(String),
    #[error("input `{0}` is not assigned")]
    MissingInput(String),
    #[error("net `{0}` is not an input")]
    NotAnInput(String),
    #[error("digit {digit} is not a level of input `{net}`")]
    BadLevel { net: String, digit: u32 },
    #[error("no fixed point after {0} iterations")]
    NonConvergence(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("step {step}: {source}")]
pub struct TraceError {
    pub step: usize,
    #[source]
    pub source: SolveError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeValue {
    /// Connected to sources of one voltage.
    Driven(f64),
    /// Undriven, keeping an earlier voltage.
    Held(f64),
    /// Connected to sources of different voltages.
    Contested,
    Floating,
}

impl NodeValue {
    pub fn voltage(self) -> Option<f64> {
        match self {
            NodeValue::Driven(v) | NodeValue::Held(v) => Some(v),
            _ => None,
        }
    }

    pub fn driven(self) -> Option<f64> {
        match self {
            NodeValue::Driven(v) => Some(v),
            _ => None,
        }
    }
}

/// Sources of different voltages shorted through conducting channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Conflict {
    pub nets: Vec<NetId>,
    pub voltages: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcState {
    values: Vec<NodeValue>,
    conducting: Vec<bool>,
    conflicts: Vec<Conflict>,
    iterations: usize,
}

impl DcState {
    pub fn value(&self, net: NetId) -> NodeValue {
        self.values[net.index()]
    }

    pub fn voltage(&self, net: NetId) -> Option<f64> {
        self.value(net).voltage()
    }

    pub fn values(&self) -> &[NodeValue] {
        &self.values
    }

    /// Conduction of each device, indexed like `Netlist::devices`.
    pub fn conducting(&self) -> &[bool] {
        &self.conducting
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn is_conflict_free(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Input voltages keyed by net.
pub type Stimulus = BTreeMap<NetId, f64>;

/// Builds a stimulus from input digits, using each input's level map.
pub fn stimulus_from_digits(
    nl: &Netlist,
    digits: impl IntoIterator<Item = (NetId, u32)>,
) -> Result<Stimulus, SolveError> {
    digits
        .into_iter()
        .map(|(net, digit)| {
            let name = || nl.net(net).name.clone();
            let map = match nl.net(net).role {
                NetRole::Input { .. } => nl.voltage_map(net).expect("input has a level map"),
                _ => return Err(SolveError::NotAnInput(name())),
            };
            if digit >= map.radix.get() {
                return Err(SolveError::BadLevel { net: name(), digit });
            }
            Ok((net, map.encode(digit)))
        })
        .collect()
}

/// Positive gate overdrive of a conducting device, `None` when it is open.
///
/// Unknown channel terminals are ignored; with no known channel terminal, or
/// an unknown gate, the device is open.
pub fn overdrive(spec: CntfetSpec, v_gate: Option<f64>, v_a: Option<f64>, v_b: Option<f64>) -> Option<f64> {
    let vg = v_gate?;
    let vth: f64 = spec.threshold_voltage();
    let known = [v_a, v_b].into_iter().flatten();
    let od = match spec.polarity {
        Polarity::N => vg - known.reduce(f64::min)? - vth,
        Polarity::P => known.reduce(f64::max)? - vg - vth,
    };
    (od > 0.0).then_some(od)
}

pub fn conducts(spec: CntfetSpec, v_gate: Option<f64>, v_a: Option<f64>, v_b: Option<f64>) -> bool {
    overdrive(spec, v_gate, v_a, v_b).is_some()
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let next = self.0[x as usize];
            self.0[x as usize] = self.0[next as usize];
            x = next;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Maximum number of relaxation rounds for a netlist.
pub fn iteration_cap(nl: &Netlist) -> usize {
    2 + 2 * nl.devices().len()
}

fn sources(nl: &Netlist, stimulus: &Stimulus) -> Result<Vec<Option<f64>>, SolveError> {
    if !nl.is_flat() {
        return Err(SolveError::NotFlat(nl.name().to_string()));
    }
    for &net in stimulus.keys() {
        if !matches!(nl.net(net).role, NetRole::Input { .. }) {
            return Err(SolveError::NotAnInput(nl.net(net).name.clone()));
        }
    }
    nl.nets()
        .iter()
        .enumerate()
        .map(|(i, net)| match net.role {
            NetRole::Supply(v) => Ok(Some(v)),
            NetRole::Input { .. } => stimulus
                .get(&NetId(i as u32))
                .copied()
                .map(Some)
                .ok_or_else(|| SolveError::MissingInput(net.name.clone())),
            _ => Ok(None),
        })
        .collect()
}

/// Cold-start solve: every non-source net starts unknown.
pub fn solve_dc(nl: &Netlist, stimulus: &Stimulus) -> Result<DcState, SolveError> {
    solve_dc_warm(nl, stimulus, None)
}

/// Solve starting from a previous state; undriven nets keep their prior voltage.
pub fn solve_dc_warm(nl: &Netlist, stimulus: &Stimulus, prev: Option<&DcState>) -> Result<DcState, SolveError> {
    let fixed = sources(nl, stimulus)?;
    let n = fixed.len();
    let devices = nl.devices();
    let mut values: Vec<NodeValue> = (0..n)
        .map(|i| match (fixed[i], prev.and_then(|p| p.values[i].voltage())) {
            (Some(v), _) => NodeValue::Driven(v),
            (None, Some(v)) => NodeValue::Held(v),
            (None, None) => NodeValue::Floating,
        })
        .collect();
    let cap = iteration_cap(nl);

    for iteration in 1..=cap {
        let conducting: Vec<bool> = devices
            .iter()
            .map(|d| {
                conducts(
                    d.spec,
                    values[d.gate.index()].voltage(),
                    values[d.source.index()].voltage(),
                    values[d.drain.index()].voltage(),
                )
            })
            .collect();
        let mut uf = UnionFind::new(n);
        for (d, _) in devices.iter().zip(&conducting).filter(|(_, &on)| on) {
            uf.union(d.source.0, d.drain.0);
        }
        let roots: Vec<u32> = (0..n as u32).map(|i| uf.find(i)).collect();

        // Distinct source voltages per component.
        let mut rails: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for (i, v) in fixed.iter().enumerate() {
            if let Some(v) = *v {
                let set = rails.entry(roots[i]).or_default();
                if !set.iter().any(|w| (w - v).abs() <= SAME_VOLTAGE) {
                    set.push(v);
                }
            }
        }

        let next: Vec<NodeValue> = (0..n)
            .map(|i| {
                if let Some(v) = fixed[i] {
                    return NodeValue::Driven(v);
                }
                match rails.get(&roots[i]).map(Vec::as_slice) {
                    Some([v]) => NodeValue::Driven(*v),
                    Some(_) => NodeValue::Contested,
                    None => match values[i].voltage() {
                        Some(v) => NodeValue::Held(v),
                        None => NodeValue::Floating,
                    },
                }
            })
            .collect();

        if next == values {
            let mut members: BTreeMap<u32, Vec<NetId>> = BTreeMap::new();
            for (i, &r) in roots.iter().enumerate() {
                if rails.get(&r).is_some_and(|s| s.len() > 1) {
                    members.entry(r).or_default().push(NetId(i as u32));
                }
            }
            let conflicts = members
                .into_iter()
                .map(|(r, nets)| {
                    let mut voltages = rails[&r].clone();
                    voltages.sort_by(f64::total_cmp);
                    Conflict { nets, voltages }
                })
                .collect();
            return Ok(DcState {
                values,
                conducting,
                conflicts,
                iterations: iteration,
            });
        }
        values = next;
    }
    Err(SolveError::NonConvergence(cap))
}

/// One solved sample of a waveform run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub time: f64,
    pub stimulus: Stimulus,
    pub state: DcState,
    /// Nets whose voltage moved since the previous sample, with the signed change.
    pub changed: Vec<(NetId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepTrace {
    pub steps: Vec<TraceStep>,
}

impl StepTrace {
    pub fn final_state(&self) -> Option<&DcState> {
        self.steps.last().map(|s| &s.state)
    }
}

/// Solves a sequence of input vectors, each warm-started from the previous one.
pub fn step_vectors(nl: &Netlist, vectors: &[Stimulus], step_time: f64) -> Result<StepTrace, TraceError> {
    let mut trace = StepTrace::default();
    let mut prev: Option<DcState> = None;
    for (step, stim) in vectors.iter().enumerate() {
        let state = solve_dc_warm(nl, stim, prev.as_ref()).map_err(|source| TraceError { step, source })?;
        let changed = match &prev {
            None => Vec::new(),
            Some(p) => p
                .values
                .iter()
                .zip(&state.values)
                .enumerate()
                .filter_map(|(i, (a, b))| match (a.voltage(), b.voltage()) {
                    (Some(x), Some(y)) if x != y => Some((NetId(i as u32), y - x)),
                    _ => None,
                })
                .collect(),
        };
        trace.steps.push(TraceStep {
            time: step as f64 * step_time,
            stimulus: stim.clone(),
            state: state.clone(),
            changed,
        });
        prev = Some(state);
    }
    Ok(trace)
}

/// Steps digit waveforms: `initial` fixes every input, `waveforms` override
/// some of them per step. All sequences must have the same length.
pub fn step_waveforms(
    nl: &Netlist,
    initial: &[(NetId, u32)],
    waveforms: &[(NetId, Vec<u32>)],
    step_time: f64,
) -> Result<StepTrace, TraceError> {
    let len = waveforms.first().map_or(1, |(_, w)| w.len());
    if let Some((net, _)) = waveforms.iter().find(|(_, w)| w.len() != len) {
        return Err(TraceError {
            step: 0,
            source: SolveError::BadLevel {
                net: format!("{} (sequence length differs)", nl.net(*net).name),
                digit: 0,
            },
        });
    }
    let vectors = (0..len)
        .map(|step| {
            let mut digits: BTreeMap<NetId, u32> = initial.iter().copied().collect();
            for (net, seq) in waveforms {
                digits.insert(*net, seq[step]);
            }
            stimulus_from_digits(nl, digits).map_err(|source| TraceError { step, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    step_vectors(nl, &vectors, step_time)
}
