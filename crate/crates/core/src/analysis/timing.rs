//! Quasi-static Elmore timing of solver steps.
//!
//! For one step every changed, driven net gets an arrival time: the latest
//! event that enabled its driving path (a changed input at the root, or a
//! device on the path switched on by a changed gate) plus `ln 2` times the
//! Elmore delay of the path from its source, charging every changed node of
//! the same channel-connected group.

use std::f64::consts::LN_2;

use thiserror::Error;

use super::{is_source, node_capacitance, Loads, TimingModel};
use crate::netlist::{NetId, Netlist};
use crate::solver::{overdrive, DcState, StepTrace};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelayError {
    #[error("net `{0}` never changes in a step where `{1}` changes")]
    NoTransition(String, String),
    #[error("net `{0}` does not settle to a driven value")]
    NotSettled(String),
}

struct Edge<T> {
    a: usize,
    b: usize,
    conductance: T,
    devices: Vec<usize>,
}

/// Shortest-resistance tree of one group of non-source nets.
struct Tree<T> {
    /// Resistance from the nearest source, per net (`None` outside the group).
    dist: Vec<Option<T>>,
    /// `(parent net or None at a source, edge index)`.
    parent: Vec<Option<(Option<usize>, usize)>>,
    root: Vec<Option<usize>>,
    members: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum Memo<T> {
    Todo,
    Busy,
    Done(Option<T>),
}

struct Timer<'a, T> {
    nl: &'a Netlist,
    prev: &'a DcState,
    next: &'a DcState,
    caps: &'a [T],
    changed: Vec<bool>,
    source: Vec<bool>,
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
    group: Vec<Option<usize>>,
    trees: Vec<Option<Tree<T>>>,
    memo: Vec<Memo<T>>,
}

impl<'a, T: Scalar> Timer<'a, T> {
    fn new(nl: &'a Netlist, model: &TimingModel<T>, caps: &'a [T], prev: &'a DcState, next: &'a DcState) -> Self {
        let n = nl.nets().len();
        let changed: Vec<bool> = (0..n)
            .map(|i| match (prev.values()[i].voltage(), next.values()[i].voltage()) {
                (Some(a), Some(b)) => a != b,
                (None, Some(_)) => true,
                _ => false,
            })
            .collect();
        let source: Vec<bool> = (0..n).map(|i| is_source(nl, NetId(i as u32))).collect();

        let mut edges: Vec<Edge<T>> = Vec::new();
        let mut by_pair = std::collections::HashMap::new();
        for (k, d) in nl.devices().iter().enumerate() {
            if !next.conducting()[k] || d.source == d.drain {
                continue;
            }
            let v = |id: NetId| next.voltage(id);
            let Some(od) = overdrive(d.spec, v(d.gate), v(d.source), v(d.drain)) else {
                continue;
            };
            let g = T::lit(od) / model.rho;
            let (a, b) = (
                d.source.index().min(d.drain.index()),
                d.source.index().max(d.drain.index()),
            );
            let e = *by_pair.entry((a, b)).or_insert_with(|| {
                edges.push(Edge {
                    a,
                    b,
                    conductance: T::zero(),
                    devices: Vec::new(),
                });
                edges.len() - 1
            });
            edges[e].conductance = edges[e].conductance + g;
            edges[e].devices.push(k);
        }
        let mut adj = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            adj[edge.a].push(e);
            adj[edge.b].push(e);
        }

        // Groups of non-source nets joined by conducting channels.
        let mut group = vec![None; n];
        let mut count = 0;
        for start in 0..n {
            if source[start] || group[start].is_some() {
                continue;
            }
            group[start] = Some(count);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &e in &adj[u] {
                    let w = if edges[e].a == u { edges[e].b } else { edges[e].a };
                    if !source[w] && group[w].is_none() {
                        group[w] = Some(count);
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }

        let mut trees = Vec::with_capacity(count);
        trees.resize_with(count, || None);
        Self {
            nl,
            prev,
            next,
            caps,
            changed,
            source,
            edges,
            adj,
            group,
            trees,
            memo: vec![Memo::Todo; n],
        }
    }

    fn other(&self, e: usize, u: usize) -> usize {
        if self.edges[e].a == u {
            self.edges[e].b
        } else {
            self.edges[e].a
        }
    }

    fn build_tree(&self, g: usize) -> Tree<T> {
        let n = self.group.len();
        let members: Vec<usize> = (0..n).filter(|&i| self.group[i] == Some(g)).collect();
        let mut dist: Vec<Option<T>> = vec![None; n];
        let mut parent = vec![None; n];
        let mut root = vec![None; n];
        let mut done = vec![false; n];
        for &u in &members {
            for &e in &self.adj[u] {
                let s = self.other(e, u);
                if self.source[s] {
                    let r = T::one() / self.edges[e].conductance;
                    if dist[u].is_none_or(|d| r < d) {
                        dist[u] = Some(r);
                        parent[u] = Some((None, e));
                        root[u] = Some(s);
                    }
                }
            }
        }
        // Groups are small, so a linear scan for the minimum is enough.
        loop {
            let next = members
                .iter()
                .copied()
                .filter(|&u| !done[u] && dist[u].is_some())
                .min_by(|&x, &y| dist[x].partial_cmp(&dist[y]).expect("finite resistance"));
            let Some(u) = next else { break };
            done[u] = true;
            let du = dist[u].expect("selected with a distance");
            for &e in &self.adj[u] {
                let w = self.other(e, u);
                if self.source[w] || done[w] {
                    continue;
                }
                let alt = du + T::one() / self.edges[e].conductance;
                if dist[w].is_none_or(|d| alt < d) {
                    dist[w] = Some(alt);
                    parent[w] = Some((Some(u), e));
                    root[w] = root[u];
                }
            }
        }
        Tree {
            dist,
            parent,
            root,
            members,
        }
    }

    fn gate_changed_on(&self, k: usize) -> Option<usize> {
        let turned_on = self.next.conducting()[k] && !self.prev.conducting()[k];
        let gate = self.nl.devices()[k].gate.index();
        (turned_on && self.changed[gate]).then_some(gate)
    }

    fn arrival(&mut self, net: usize) -> Option<T> {
        match self.memo[net] {
            Memo::Done(v) => return v,
            Memo::Busy => return None,
            Memo::Todo => {}
        }
        self.memo[net] = Memo::Busy;
        let v = self.compute(net);
        self.memo[net] = Memo::Done(v);
        v
    }

    fn compute(&mut self, net: usize) -> Option<T> {
        if !self.changed[net] {
            return None;
        }
        if self.source[net] {
            return Some(T::zero());
        }
        self.next.values()[net].driven()?;
        let g = self.group[net].expect("non-source nets are grouped");
        let (path_edges, root, elmore, members) = {
            if self.trees[g].is_none() {
                self.trees[g] = Some(self.build_tree(g));
            }
            let tree = self.trees[g].as_ref().expect("built above");
            tree.dist[net]?;
            let mut path = vec![net];
            let mut edges = Vec::new();
            let mut u = net;
            while let Some((p, e)) = tree.parent[u] {
                edges.push(e);
                match p {
                    Some(p) => {
                        path.push(p);
                        u = p;
                    }
                    None => break,
                }
            }
            let on_path = |x: usize| path.contains(&x);
            let mut elmore = T::zero();
            for &i in &tree.members {
                if !self.changed[i] || tree.dist[i].is_none() {
                    continue;
                }
                // Resistance shared by the paths to `i` and to `net`.
                let mut x = i;
                let shared = loop {
                    if on_path(x) {
                        break tree.dist[x].expect("reached nodes have a distance");
                    }
                    match tree.parent[x] {
                        Some((Some(p), _)) if tree.root[p] == tree.root[net] => x = p,
                        _ => break T::zero(),
                    }
                };
                elmore = elmore + self.caps[i] * shared;
            }
            (edges, tree.root[net], elmore, tree.members.clone())
        };

        let mut triggers: Vec<usize> = path_edges
            .iter()
            .flat_map(|&e| self.edges[e].devices.clone())
            .filter_map(|k| self.gate_changed_on(k))
            .collect();
        let mut trigger = match root {
            Some(r) if self.changed[r] => Some(T::zero()),
            _ => None,
        };
        if triggers.is_empty() && trigger.is_none() {
            // Nothing switched on along the path: blame any device touching
            // the group whose gate moved it either way.
            triggers = self
                .nl
                .devices()
                .iter()
                .enumerate()
                .filter(|(k, d)| {
                    self.prev.conducting()[*k] != self.next.conducting()[*k]
                        && self.changed[d.gate.index()]
                        && (members.contains(&d.source.index()) || members.contains(&d.drain.index()))
                })
                .map(|(_, d)| d.gate.index())
                .collect();
        }
        for gnet in triggers {
            if let Some(t) = self.arrival(gnet) {
                trigger = Some(trigger.map_or(t, |x: T| x.max(t)));
            }
        }
        Some(trigger.unwrap_or_else(T::zero) + T::lit(LN_2) * elmore)
    }
}

/// Arrival time, in seconds after the step's input edge, of every net that
/// changed between two consecutive states. `None` for nets that did not
/// change or did not settle to a driven value.
pub fn step_arrivals<T: Scalar>(
    nl: &Netlist,
    model: &TimingModel<T>,
    caps: &[T],
    prev: &DcState,
    next: &DcState,
) -> Vec<Option<T>> {
    let mut timer = Timer::new(nl, model, caps, prev, next);
    (0..nl.nets().len()).map(|i| timer.arrival(i)).collect()
}

/// Per-step arrivals of a whole trace (entry `i` covers step `i + 1`).
pub fn trace_arrivals<T: Scalar>(
    nl: &Netlist,
    model: &TimingModel<T>,
    loads: &Loads<T>,
    trace: &StepTrace,
) -> Vec<Vec<Option<T>>> {
    let caps = node_capacitance(nl, model, loads);
    trace
        .steps
        .windows(2)
        .map(|w| step_arrivals(nl, model, &caps, &w[0].state, &w[1].state))
        .collect()
}

/// Worst delay from `from` to `to` over every step where `from` switches.
pub fn path_delay<T: Scalar>(
    nl: &Netlist,
    trace: &StepTrace,
    model: &TimingModel<T>,
    loads: &Loads<T>,
    from: NetId,
    to: NetId,
) -> Result<T, DelayError> {
    let name = |id: NetId| nl.net(id).name.clone();
    if let Some(last) = trace.final_state() {
        if last.value(to).driven().is_none() {
            return Err(DelayError::NotSettled(name(to)));
        }
    }
    let mut worst: Option<T> = None;
    for arrivals in trace_arrivals(nl, model, loads, trace) {
        if arrivals[from.index()].is_none() {
            continue;
        }
        if let Some(t) = arrivals[to.index()] {
            worst = Some(worst.map_or(t, |w| w.max(t)));
        }
    }
    worst.ok_or_else(|| DelayError::NoTransition(name(to), name(from)))
}
