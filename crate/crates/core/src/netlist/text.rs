//! Line-oriented text format.
//!
//! ```text
//! # comment
//! SUPPLY <name> <volts>
//! INPUT <name> <radix> [<full-scale volts>]
//! OUTPUT <name> <radix> [<full-scale volts>]
//! NET <name>
//! DEVICE <N|P> n=<chirality> g=<net> s=<net> d=<net>
//! SUBCKT <name> <port...>
//!   ...
//! ENDS
//! INSTANCE <subckt> <name> <port=net ...>
//! ```
//!
//! Nets named by DEVICE terminals are declared implicitly as internal nets.
//! Every other reference must resolve to a declared net.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{is_identifier, Instance, NetRole, Netlist, NetlistError};
use crate::device::{Chirality, CntfetSpec, Polarity};
use crate::logic::Radix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("undefined net `{0}`")]
    UndefinedNet(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{location}: {kind}")]
pub struct ParseError {
    pub location: Location,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    column: s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &body[s..],
            column: s + 1,
        });
    }
    out
}

struct PendingInstance {
    subckt: String,
    name: String,
    connections: Vec<(String, String, Location)>,
    at: Location,
}

/// A netlist body under construction (top level or one SUBCKT block).
struct Block {
    nl: Netlist,
    declared: HashSet<String>,
    header_ports: Vec<(String, Location)>,
    instances: Vec<PendingInstance>,
    start: Location,
}

impl Block {
    fn new(name: &str, start: Location) -> Self {
        Self {
            nl: Netlist::new(name),
            declared: HashSet::new(),
            header_ports: Vec::new(),
            instances: Vec::new(),
            start,
        }
    }

    fn declare(&mut self, tok: &Token<'_>, role: NetRole, line: usize) -> Result<(), ParseError> {
        let at = Location {
            line,
            column: tok.column,
        };
        if !self.declared.insert(tok.text.to_string()) {
            return Err(err(at, ParseErrorKind::DuplicateName(tok.text.to_string())));
        }
        let res = match self.nl.lookup(tok.text) {
            Some(_) if role == NetRole::Internal => Ok(()),
            Some(id) => self.nl.promote(id, role),
            None => self.nl.add_net(tok.text, role).map(|_| ()),
        };
        res.map_err(|e| err(at, e.into()))
    }

    /// Resolves deferred references; subcircuit blocks also fix their port order.
    fn finish(mut self, is_subckt: bool) -> Result<Netlist, ParseError> {
        if is_subckt {
            let mut ports = Vec::new();
            for (name, at) in &self.header_ports {
                let id = self
                    .nl
                    .lookup(name)
                    .ok_or_else(|| err(*at, ParseErrorKind::UndefinedNet(name.clone())))?;
                ports.push(id);
            }
            self.nl.set_ports(ports);
        }
        for p in std::mem::take(&mut self.instances) {
            let mut connections = Vec::new();
            for (port, net, at) in p.connections {
                let id = self
                    .nl
                    .lookup(&net)
                    .ok_or_else(|| err(at, ParseErrorKind::UndefinedNet(net.clone())))?;
                connections.push((port, id));
            }
            self.nl
                .add_instance(Instance {
                    subckt: p.subckt,
                    name: p.name,
                    connections,
                })
                .map_err(|e| err(p.at, e.into()))?;
        }
        Ok(self.nl)
    }
}

fn err(location: Location, kind: ParseErrorKind) -> ParseError {
    ParseError { location, kind }
}

fn ident<'a>(tok: &Token<'a>, line: usize) -> Result<&'a str, ParseError> {
    if super::is_identifier(tok.text) {
        Ok(tok.text)
    } else {
        Err(err(
            Location {
                line,
                column: tok.column,
            },
            NetlistError::BadIdentifier(tok.text.to_string()).into(),
        ))
    }
}

fn number(tok: &Token<'_>, line: usize) -> Result<f64, ParseError> {
    tok.text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
        err(
            Location {
                line,
                column: tok.column,
            },
            ParseErrorKind::MalformedNumber(tok.text.to_string()),
        )
    })
}

fn radix(tok: &Token<'_>, line: usize) -> Result<Radix, ParseError> {
    let at = Location {
        line,
        column: tok.column,
    };
    let r: u32 = tok
        .text
        .parse()
        .map_err(|_| err(at, ParseErrorKind::MalformedNumber(tok.text.to_string())))?;
    Radix::new(r).map_err(|e| err(at, ParseErrorKind::Syntax(e.to_string())))
}

fn key_value<'a>(tok: &Token<'a>, line: usize) -> Result<(&'a str, &'a str), ParseError> {
    tok.text.split_once('=').ok_or_else(|| {
        err(
            Location {
                line,
                column: tok.column,
            },
            ParseErrorKind::Syntax(format!("expected key=value, found `{}`", tok.text)),
        )
    })
}

pub fn parse(text: &str) -> Result<Netlist, ParseError> {
    let origin = Location { line: 1, column: 1 };
    let mut top = Block::new("top", origin);
    let mut current: Option<Block> = None;
    let mut subckts: Vec<(Netlist, Location)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if idx == 0 {
            if let Some(name) = raw.trim().strip_prefix("# netlist ") {
                let name = name.trim();
                if is_identifier(name) {
                    top.nl.set_name(name);
                }
            }
        }
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        let at = Location {
            line,
            column: head.column,
        };
        let arity = |min: usize, max: usize| -> Result<(), ParseError> {
            if toks.len() < min || toks.len() > max {
                Err(err(
                    at,
                    ParseErrorKind::Syntax(format!("wrong number of fields for {}", head.text)),
                ))
            } else {
                Ok(())
            }
        };
        let block = current.as_mut().unwrap_or(&mut top);
        match head.text {
            "SUPPLY" => {
                arity(3, 3)?;
                let v = number(&toks[2], line)?;
                ident(&toks[1], line)?;
                block.declare(&toks[1], NetRole::Supply(v), line)?;
            }
            "INPUT" | "OUTPUT" => {
                arity(3, 4)?;
                ident(&toks[1], line)?;
                let r = radix(&toks[2], line)?;
                let full_scale = toks.get(3).map(|t| number(t, line)).transpose()?;
                let role = if head.text == "INPUT" {
                    NetRole::Input { radix: r, full_scale }
                } else {
                    NetRole::Output { radix: r, full_scale }
                };
                block.declare(&toks[1], role, line)?;
            }
            "NET" => {
                arity(2, 2)?;
                ident(&toks[1], line)?;
                block.declare(&toks[1], NetRole::Internal, line)?;
            }
            "DEVICE" => {
                arity(6, 6)?;
                let polarity: Polarity = toks[1].text.parse().map_err(|e: crate::device::DeviceError| {
                    err(
                        Location {
                            line,
                            column: toks[1].column,
                        },
                        ParseErrorKind::Syntax(e.to_string()),
                    )
                })?;
                let (mut n, mut g, mut s, mut d) = (None, None, None, None);
                for tok in &toks[2..] {
                    let (k, v) = key_value(tok, line)?;
                    let tat = Location {
                        line,
                        column: tok.column,
                    };
                    let slot = match k {
                        "n" => {
                            let c = v
                                .parse::<u32>()
                                .ok()
                                .and_then(|c| Chirality::new(c).ok())
                                .ok_or_else(|| err(tat, ParseErrorKind::MalformedNumber(v.to_string())))?;
                            n = Some(c);
                            continue;
                        }
                        "g" => &mut g,
                        "s" => &mut s,
                        "d" => &mut d,
                        other => {
                            return Err(err(
                                tat,
                                ParseErrorKind::Syntax(format!("unknown device field `{other}`")),
                            ))
                        }
                    };
                    if !super::is_identifier(v) {
                        return Err(err(tat, NetlistError::BadIdentifier(v.to_string()).into()));
                    }
                    let id = block.nl.net_or_internal(v).map_err(|e| err(tat, e.into()))?;
                    *slot = Some(id);
                }
                match (n, g, s, d) {
                    (Some(chirality), Some(g), Some(s), Some(d)) => {
                        block.nl.add_device(CntfetSpec { polarity, chirality }, g, s, d)
                    }
                    _ => return Err(err(at, ParseErrorKind::Syntax("DEVICE needs n=, g=, s= and d=".into()))),
                }
            }
            "SUBCKT" => {
                arity(2, usize::MAX)?;
                if current.is_some() {
                    return Err(err(at, ParseErrorKind::Syntax("nested SUBCKT".into())));
                }
                let name = ident(&toks[1], line)?;
                let mut b = Block::new(name, at);
                for tok in &toks[2..] {
                    ident(tok, line)?;
                    b.header_ports.push((
                        tok.text.to_string(),
                        Location {
                            line,
                            column: tok.column,
                        },
                    ));
                }
                current = Some(b);
            }
            "ENDS" => {
                arity(1, 1)?;
                let b = current
                    .take()
                    .ok_or_else(|| err(at, ParseErrorKind::Syntax("ENDS without SUBCKT".into())))?;
                let start = b.start;
                subckts.push((b.finish(true)?, start));
            }
            "INSTANCE" => {
                arity(3, usize::MAX)?;
                let subckt = ident(&toks[1], line)?.to_string();
                let name = ident(&toks[2], line)?.to_string();
                let mut connections = Vec::new();
                for tok in &toks[3..] {
                    let (p, n) = key_value(tok, line)?;
                    connections.push((
                        p.to_string(),
                        n.to_string(),
                        Location {
                            line,
                            column: tok.column,
                        },
                    ));
                }
                block.instances.push(PendingInstance {
                    subckt,
                    name,
                    connections,
                    at,
                });
            }
            other => return Err(err(at, ParseErrorKind::UnknownDirective(other.to_string()))),
        }
    }
    if let Some(b) = current {
        return Err(err(b.start, ParseErrorKind::Syntax("SUBCKT without ENDS".into())));
    }

    let mut root = top.finish(false)?;
    for (sub, at) in subckts {
        let name = sub.name().to_string();
        if root.library().contains_key(&name) {
            return Err(err(at, ParseErrorKind::DuplicateName(name)));
        }
        root.add_subckt(sub).map_err(|e| err(at, e.into()))?;
    }
    let known = |n: &str| root.library().contains_key(n);
    let mut all: Vec<&Instance> = root.instances().iter().collect();
    for def in root.library().values() {
        all.extend(def.instances());
    }
    if let Some(bad) = all.into_iter().find(|i| !known(&i.subckt)) {
        return Err(err(origin, NetlistError::UnknownSubckt(bad.subckt.clone()).into()));
    }
    Ok(root)
}

fn role_line(name: &str, role: &NetRole) -> (u8, String) {
    let scale = |fs: &Option<f64>| fs.map(|v| format!(" {v}")).unwrap_or_default();
    match role {
        NetRole::Supply(v) => (0, format!("SUPPLY {name} {v}")),
        NetRole::Input { radix, full_scale } => (1, format!("INPUT {name} {radix}{}", scale(full_scale))),
        NetRole::Output { radix, full_scale } => (2, format!("OUTPUT {name} {radix}{}", scale(full_scale))),
        NetRole::Internal => (3, format!("NET {name}")),
    }
}

fn write_body(out: &mut String, nl: &Netlist, indent: &str) {
    let mut nets: Vec<(u8, &str, String)> = nl
        .nets()
        .iter()
        .map(|n| {
            let (rank, line) = role_line(&n.name, &n.role);
            (rank, n.name.as_str(), line)
        })
        .collect();
    nets.sort();
    for (_, _, line) in nets {
        let _ = writeln!(out, "{indent}{line}");
    }
    let mut devices: Vec<String> = nl
        .devices()
        .iter()
        .map(|d| {
            format!(
                "DEVICE {} n={} g={} s={} d={}",
                d.spec.polarity,
                d.spec.chirality,
                nl.net(d.gate).name,
                nl.net(d.source).name,
                nl.net(d.drain).name
            )
        })
        .collect();
    devices.sort();
    for line in devices {
        let _ = writeln!(out, "{indent}{line}");
    }
    let mut instances: Vec<&Instance> = nl.instances().iter().collect();
    instances.sort_by(|a, b| a.name.cmp(&b.name));
    for inst in instances {
        let mut conns: Vec<String> = inst
            .connections
            .iter()
            .map(|(p, n)| format!("{p}={}", nl.net(*n).name))
            .collect();
        conns.sort();
        let _ = writeln!(
            out,
            "{indent}INSTANCE {} {} {}",
            inst.subckt,
            inst.name,
            conns.join(" ")
        );
    }
}

/// Canonical text: library blocks, then nets, devices and instances, each sorted.
pub fn serialize(nl: &Netlist) -> String {
    let mut out = format!("# netlist {}\n", nl.name());
    for (name, def) in nl.library() {
        let ports: Vec<&str> = def.ports().iter().map(|p| def.net(*p).name.as_str()).collect();
        let _ = writeln!(out, "SUBCKT {name} {}", ports.join(" "));
        write_body(&mut out, def, "  ");
        out.push_str("ENDS\n");
    }
    write_body(&mut out, nl, "");
    out
}
