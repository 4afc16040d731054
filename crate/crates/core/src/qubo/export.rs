//! Coordinate text export and the JSON registry sidecar. Vertex ids are 1-based in
//! both files.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{QuadPoly, Qubo, QuboError, Registry, VarKind};

fn one_based(kind: VarKind) -> VarKind {
    match kind {
        VarKind::X { parent, child } => VarKind::X {
            parent: parent + 1,
            child: child + 1,
        },
        VarKind::Y { vertex, level } => VarKind::Y {
            vertex: vertex + 1,
            level,
        },
        VarKind::Z { vertex, slot } => VarKind::Z {
            vertex: vertex + 1,
            slot,
        },
        VarKind::Anc {
            parent,
            child,
            level,
        } => VarKind::Anc {
            parent: parent + 1,
            child: child + 1,
            level,
        },
    }
}

fn zero_based(kind: VarKind) -> Result<VarKind, QuboError> {
    let dec = |v: usize| {
        v.checked_sub(1)
            .ok_or_else(|| QuboError::Registry("vertex ids are 1-based".into()))
    };
    Ok(match kind {
        VarKind::X { parent, child } => VarKind::X {
            parent: dec(parent)?,
            child: dec(child)?,
        },
        VarKind::Y { vertex, level } => VarKind::Y {
            vertex: dec(vertex)?,
            level,
        },
        VarKind::Z { vertex, slot } => VarKind::Z {
            vertex: dec(vertex)?,
            slot,
        },
        VarKind::Anc {
            parent,
            child,
            level,
        } => VarKind::Anc {
            parent: dec(parent)?,
            child: dec(child)?,
            level,
        },
    })
}

fn describe(kind: VarKind) -> String {
    match one_based(kind) {
        VarKind::X { parent, child } => format!("X {parent} {child}"),
        VarKind::Y { vertex, level } => format!("Y {vertex} {level}"),
        VarKind::Z { vertex, slot } => format!("Z {vertex} {slot}"),
        VarKind::Anc {
            parent,
            child,
            level,
        } => format!("ANC {parent} {child} {level}"),
    }
}

/// Writes `i j coeff` lines (0-based dense indices, `i == j` for linear terms) after a
/// header carrying the registry, the penalty weight and the constant offset.
pub fn write_coo(qubo: &Qubo, label: &str, out: &mut impl Write) -> Result<(), QuboError> {
    let mut s = String::new();
    let _ = writeln!(s, "# qubo {label}");
    let _ = writeln!(s, "# num_vars {}", qubo.num_vars());
    let _ = writeln!(s, "# penalty_weight {}", qubo.penalty_weight);
    let _ = writeln!(s, "# offset {}", qubo.poly.offset);
    for (i, &k) in qubo.registry.vars().iter().enumerate() {
        let _ = writeln!(s, "# var {i} {}", describe(k));
    }
    for (i, &c) in qubo.poly.linear.iter().enumerate() {
        if c != 0 {
            let _ = writeln!(s, "{i} {i} {c}");
        }
    }
    for (&(i, j), &c) in &qubo.poly.quadratic {
        let _ = writeln!(s, "{i} {j} {c}");
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Parses the output of [`write_coo`] back into a QUBO.
pub fn read_coo(input: impl BufRead) -> Result<Qubo, QuboError> {
    let bad = |line: &str| QuboError::Registry(format!("cannot parse line {line:?}"));
    let mut vars = Vec::new();
    let mut num_vars: Option<usize> = None;
    let mut penalty_weight = 0;
    let mut offset = 0;
    let mut terms = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "#" {
            match fields.get(1).copied() {
                Some("num_vars") => num_vars = fields.get(2).and_then(|f| f.parse().ok()),
                Some("penalty_weight") => {
                    penalty_weight = fields.get(2).and_then(|f| f.parse().ok()).ok_or_else(|| bad(line))?
                }
                Some("offset") => {
                    offset = fields.get(2).and_then(|f| f.parse().ok()).ok_or_else(|| bad(line))?
                }
                Some("var") => {
                    let nums: Vec<usize> = fields[4..]
                        .iter()
                        .map(|f| f.parse().map_err(|_| bad(line)))
                        .collect::<Result<_, _>>()?;
                    let kind = match (fields.get(3).copied(), nums.as_slice()) {
                        (Some("X"), &[parent, child]) => VarKind::X { parent, child },
                        (Some("Y"), &[vertex, level]) => VarKind::Y { vertex, level },
                        (Some("Z"), &[vertex, slot]) => VarKind::Z { vertex, slot },
                        (Some("ANC"), &[parent, child, level]) => VarKind::Anc {
                            parent,
                            child,
                            level,
                        },
                        _ => return Err(bad(line)),
                    };
                    vars.push(zero_based(kind)?);
                }
                _ => {}
            }
            continue;
        }
        if fields.len() != 3 {
            return Err(bad(line));
        }
        let i: usize = fields[0].parse().map_err(|_| bad(line))?;
        let j: usize = fields[1].parse().map_err(|_| bad(line))?;
        let c: i64 = fields[2].parse().map_err(|_| bad(line))?;
        terms.push((i, j, c));
    }
    if num_vars.is_some_and(|n| n != vars.len()) {
        return Err(QuboError::Registry("header and registry sizes differ".into()));
    }
    let mut poly = QuadPoly::zeros(vars.len());
    poly.offset = offset;
    for (i, j, c) in terms {
        if i >= vars.len() || j >= vars.len() {
            return Err(QuboError::Registry(format!("term ({i}, {j}) out of range")));
        }
        poly.add_quadratic(i, j, c);
    }
    Ok(Qubo {
        registry: Registry::from_vars(vars),
        poly,
        penalty_weight,
    })
}

/// JSON sidecar: dense index order with 1-based vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryFile {
    pub label: String,
    pub penalty_weight: i64,
    pub vars: Vec<VarKind>,
}

pub fn registry_json(qubo: &Qubo, label: &str) -> Result<String, QuboError> {
    let file = RegistryFile {
        label: label.to_string(),
        penalty_weight: qubo.penalty_weight,
        vars: qubo.registry.vars().iter().map(|&k| one_based(k)).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses a registry sidecar back into a 0-based registry.
pub fn read_registry_json(text: &str) -> Result<(RegistryFile, Registry), QuboError> {
    let file: RegistryFile = serde_json::from_str(text)?;
    let vars = file
        .vars
        .iter()
        .map(|&k| zero_based(k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((file, Registry::from_vars(vars)))
}
