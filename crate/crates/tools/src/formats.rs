//! Text formats read and written by the `pgc` binary.
//!
//! Every writer produces output that the matching reader parses back into a
//! structurally equal value, and writing that value again gives the same
//! bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use pgc_core::circuit::{Assignment, Circuit, Node, StructuralError, VarId};
use pgc_core::dpp::{Abp, AbpEdge, AffineForm, DppError, DppRepresentation, Formula, Label, MatrixEntry};
use pgc_core::hardness::BipartiteGraph;
use pgc_core::marginal::MarginalQuery;
use pgc_core::partition::VariablePartition;
use pgc_core::pgc::DistributionTable;
use pgc_core::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("structure: {0}")]
    Structure(#[from] StructuralError),
    #[error(transparent)]
    Dpp(#[from] DppError),
}

fn line_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line { line: line + 1, message: message.into() }
}

/// Non-empty lines with `#` comments stripped, paired with their 0-based
/// line number.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((k, l))
    })
}

fn rational_at(line: usize, text: &str) -> Result<Rational, FormatError> {
    parse_rational(text).map_err(|e| line_error(line, e.to_string()))
}

fn number_at<T: std::str::FromStr>(line: usize, text: &str) -> Result<T, FormatError> {
    text.parse().map_err(|_| line_error(line, format!("expected a number, got `{text}`")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Const,
    Var,
    Sum,
    Prod,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct NodeDoc {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CircuitDoc {
    variables: Vec<String>,
    nodes: Vec<NodeDoc>,
    output: usize,
}

pub fn write_circuit(c: &Circuit) -> String {
    let nodes = c
        .nodes()
        .iter()
        .map(|n| {
            let mut doc = NodeDoc { kind: Kind::Const, value: None, var: None, children: None, weights: None };
            match n {
                Node::Const(v) => doc.value = Some(format_rational(v)),
                Node::Var(slot) => {
                    doc.kind = Kind::Var;
                    doc.var = Some(c.variables()[*slot].name().to_string());
                }
                Node::Sum(terms) => {
                    doc.kind = Kind::Sum;
                    doc.children = Some(terms.iter().map(|(id, _)| *id).collect());
                    doc.weights = Some(terms.iter().map(|(_, w)| format_rational(w)).collect());
                }
                Node::Prod(factors) => {
                    doc.kind = Kind::Prod;
                    doc.children = Some(factors.clone());
                }
                Node::Div(a, b) => {
                    doc.kind = Kind::Div;
                    doc.children = Some(vec![*a, *b]);
                }
            }
            doc
        })
        .collect();
    let doc = CircuitDoc {
        variables: c.variables().iter().map(|v| v.name().to_string()).collect(),
        nodes,
        output: c.output(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn read_circuit(text: &str) -> Result<Circuit, FormatError> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    let vars: Vec<VarId> = doc.variables.iter().map(|v| VarId::new(v)).collect();
    let slots: BTreeMap<&str, usize> = doc.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    if slots.len() != vars.len() {
        return Err(FormatError::Invalid("duplicate variable name".into()));
    }
    let bad = |k: usize, m: &str| FormatError::Invalid(format!("node {k}: {m}"));
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (k, n) in doc.nodes.iter().enumerate() {
        let children = || n.children.clone().ok_or_else(|| bad(k, "missing children"));
        let node = match n.kind {
            Kind::Const => {
                let v = n.value.as_deref().ok_or_else(|| bad(k, "missing value"))?;
                Node::Const(parse_rational(v).map_err(|e| bad(k, &e.to_string()))?)
            }
            Kind::Var => {
                let name = n.var.as_deref().ok_or_else(|| bad(k, "missing var"))?;
                Node::Var(*slots.get(name).ok_or_else(|| bad(k, "undeclared variable"))?)
            }
            Kind::Sum => {
                let ch = children()?;
                let weights = match &n.weights {
                    Some(w) => w
                        .iter()
                        .map(|w| parse_rational(w).map_err(|e| bad(k, &e.to_string())))
                        .collect::<Result<Vec<_>, _>>()?,
                    None => vec![Rational::from_integer(1.into()); ch.len()],
                };
                if weights.len() != ch.len() {
                    return Err(bad(k, "weights and children differ in length"));
                }
                Node::Sum(ch.into_iter().zip(weights).collect())
            }
            Kind::Prod => Node::Prod(children()?),
            Kind::Div => match children()?.as_slice() {
                [a, b] => Node::Div(*a, *b),
                _ => return Err(bad(k, "division takes two children")),
            },
        };
        nodes.push(node);
    }
    Ok(Circuit::from_parts(vars, nodes, doc.output)?)
}

/// One line per part, variable names separated by spaces.
pub fn write_partition(p: &VariablePartition) -> String {
    p.to_string()
}

pub fn read_partition(text: &str) -> Result<VariablePartition, FormatError> {
    let parts = content_lines(text).map(|(_, l)| l.split_whitespace().map(VarId::new).collect()).collect();
    VariablePartition::new(parts).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// `i: j1 j2 ...` per line, `i` 1-based. Parts without a line get the empty
/// set; `n` is the number of parts.
pub fn read_query(text: &str, n: usize) -> Result<MarginalQuery, FormatError> {
    let mut sets = vec![BTreeSet::new(); n];
    let mut seen = BTreeSet::new();
    for (k, l) in content_lines(text) {
        let (head, rest) = l.split_once(':').ok_or_else(|| line_error(k, "expected `i: j1 j2 ...`"))?;
        let i: usize = number_at(k, head.trim())?;
        if i == 0 || i > n {
            return Err(line_error(k, format!("variable {i} outside 1..={n}")));
        }
        if !seen.insert(i) {
            return Err(line_error(k, format!("variable {i} listed twice")));
        }
        for j in rest.split_whitespace() {
            sets[i - 1].insert(number_at(k, j)?);
        }
    }
    Ok(MarginalQuery::new(sets))
}

pub fn write_query(q: &MarginalQuery) -> String {
    let mut out = String::new();
    for (i, s) in q.sets.iter().enumerate() {
        let values: Vec<String> = s.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{}: {}", i + 1, values.join(" "));
    }
    out
}

/// `var = p/q` per line.
pub fn read_point(text: &str) -> Result<Assignment<Rational>, FormatError> {
    let mut point = Assignment::new();
    for (k, l) in content_lines(text) {
        let (name, value) = l.split_once('=').ok_or_else(|| line_error(k, "expected `var = p/q`"))?;
        point.set(VarId::new(name.trim()), rational_at(k, value)?);
    }
    Ok(point)
}

pub fn write_point<'a, I: IntoIterator<Item = (&'a VarId, String)>>(values: I) -> String {
    let mut out = String::new();
    for (v, x) in values {
        let _ = writeln!(out, "{v} = {x}");
    }
    out
}

/// Header `n d`, then `j1 .. jn p/q` per nonzero entry in lexicographic
/// order.
pub fn write_table(t: &DistributionTable) -> String {
    let mut out = format!("{} {}\n", t.n(), t.arity());
    for (tuple, p) in t.entries() {
        for j in tuple {
            let _ = write!(out, "{j} ");
        }
        let _ = writeln!(out, "{}", format_rational(p));
    }
    out
}

pub fn read_table(text: &str) -> Result<DistributionTable, FormatError> {
    let mut lines = content_lines(text);
    let (k, header) = lines.next().ok_or_else(|| FormatError::Invalid("empty table".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let [n, d] = h.as_slice() else {
        return Err(line_error(k, "header must be `n d`"));
    };
    let (n, d): (usize, u32) = (number_at(k, n)?, number_at(k, d)?);
    let mut entries = Vec::new();
    for (k, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != n + 1 {
            return Err(line_error(k, format!("expected {n} values and a probability")));
        }
        let tuple = fields[..n].iter().map(|j| number_at(k, j)).collect::<Result<Vec<u32>, _>>()?;
        entries.push((tuple, rational_at(k, fields[n])?));
    }
    DistributionTable::new(n, d, entries).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Header `m n` (left and right sizes), then `u v` per edge, 1-based.
pub fn write_graph(g: &BipartiteGraph) -> String {
    let mut out = format!("{} {}\n", g.left(), g.right());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn read_graph(text: &str) -> Result<BipartiteGraph, FormatError> {
    let mut lines = content_lines(text);
    let (k, header) = lines.next().ok_or_else(|| FormatError::Invalid("empty graph".into()))?;
    let pair = |k: usize, l: &str| -> Result<(usize, usize), FormatError> {
        let f: Vec<&str> = l.split_whitespace().collect();
        match f.as_slice() {
            [a, b] => Ok((number_at(k, a)?, number_at(k, b)?)),
            _ => Err(line_error(k, "expected two numbers")),
        }
    };
    let (m, n) = pair(k, header)?;
    let mut edges = Vec::new();
    for (k, l) in lines {
        let (u, v) = pair(k, l)?;
        if u == 0 || v == 0 {
            return Err(line_error(k, "vertices are 1-based"));
        }
        edges.push((u - 1, v - 1));
    }
    BipartiteGraph::new(m, n, edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Variables and arities of a generating circuit, `name arity` per line.
pub fn write_arities(vars: &[VarId], arities: &[u32]) -> String {
    let mut out = String::new();
    for (v, a) in vars.iter().zip(arities) {
        let _ = writeln!(out, "{v} {a}");
    }
    out
}

pub fn read_arities(text: &str) -> Result<(Vec<VarId>, Vec<u32>), FormatError> {
    let mut vars = Vec::new();
    let mut arities = Vec::new();
    for (k, l) in content_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        let [name, a] = f.as_slice() else {
            return Err(line_error(k, "expected `name arity`"));
        };
        vars.push(VarId::new(name));
        arities.push(number_at(k, a)?);
    }
    Ok((vars, arities))
}

pub fn read_formula(text: &str) -> Result<Formula, FormatError> {
    let joined: String = content_lines(text).map(|(_, l)| l).collect::<Vec<_>>().join(" ");
    Formula::parse(&joined).map_err(|e| FormatError::Invalid(e.to_string()))
}

fn label_text(label: &Label) -> String {
    match label {
        Label::Const(c) => format_rational(c),
        Label::Var(v) => v.name().to_string(),
    }
}

fn parse_label(k: usize, text: &str) -> Result<Label, FormatError> {
    if text.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        Ok(Label::Var(VarId::new(text)))
    } else {
        Ok(Label::Const(rational_at(k, text)?))
    }
}

/// Optional `layers w0 w1 ... wd` header, then `layer u v label` per edge
/// with 0-based layer and node indices. Without a header the widths are
/// inferred from the edges.
pub fn write_abp(abp: &Abp) -> String {
    let widths: Vec<String> = abp.layers().iter().map(usize::to_string).collect();
    let mut out = format!("layers {}\n", widths.join(" "));
    for e in abp.edges() {
        let _ = writeln!(out, "{} {} {} {}", e.layer, e.from, e.to, label_text(&e.label));
    }
    out
}

pub fn read_abp(text: &str) -> Result<Abp, FormatError> {
    let mut layers: Option<Vec<usize>> = None;
    let mut edges = Vec::new();
    for (k, l) in content_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.first() == Some(&"layers") {
            layers = Some(f[1..].iter().map(|w| number_at(k, w)).collect::<Result<_, _>>()?);
            continue;
        }
        let [layer, from, to, label] = f.as_slice() else {
            return Err(line_error(k, "expected `layer u v label`"));
        };
        edges.push(AbpEdge {
            layer: number_at(k, layer)?,
            from: number_at(k, from)?,
            to: number_at(k, to)?,
            label: parse_label(k, label)?,
        });
    }
    let layers = layers.unwrap_or_else(|| {
        let depth = edges.iter().map(|e| e.layer + 1).max().unwrap_or(1);
        let mut w = vec![1; depth + 1];
        for e in &edges {
            w[e.layer] = w[e.layer].max(e.from + 1);
            w[e.layer + 1] = w[e.layer + 1].max(e.to + 1);
        }
        w
    });
    Abp::new(layers, edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

fn entry_text(e: &MatrixEntry) -> String {
    match &e.var {
        None => format_rational(&e.constant),
        Some(v) if e.constant == Rational::from_integer(0.into()) => v.name().to_string(),
        Some(v) if e.constant < Rational::from_integer(0.into()) => format!("{v}{}", format_rational(&e.constant)),
        Some(v) => format!("{v}+{}", format_rational(&e.constant)),
    }
}

fn parse_entry(k: usize, text: &str) -> Result<MatrixEntry, FormatError> {
    if !text.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        return Ok(MatrixEntry { var: None, constant: rational_at(k, text)? });
    }
    let split = text.find(['+', '-']).unwrap_or(text.len());
    let (name, rest) = text.split_at(split);
    let constant = match rest {
        "" => Rational::from_integer(0.into()),
        r => rational_at(k, r.strip_prefix('+').unwrap_or(r))?,
    };
    Ok(MatrixEntry { var: Some(VarId::new(name)), constant })
}

/// Dense matrix, one row per line; diagonal cells may read `D3+1/2`.
pub fn write_matrix(rep: &DppRepresentation) -> String {
    let mut out = String::new();
    for row in rep.entries() {
        let cells: Vec<String> = row.iter().map(entry_text).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

/// `D3 = 2*y1 + -1*y2 + 1/2` per projected position.
pub fn write_projection(rep: &DppRepresentation) -> String {
    let mut out = String::new();
    for (v, form) in rep.named_projection() {
        let _ = writeln!(out, "{v} = {form}");
    }
    out
}

fn parse_affine(k: usize, text: &str) -> Result<AffineForm, FormatError> {
    let mut form = AffineForm::default();
    for token in text.split(" + ").map(str::trim) {
        match token.split_once('*') {
            Some((c, v)) => {
                let c = rational_at(k, c)?;
                *form.terms.entry(VarId::new(v.trim())).or_default() += c;
            }
            None if token.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') => {
                *form.terms.entry(VarId::new(token)).or_default() += Rational::from_integer(1.into());
            }
            None => form.constant += rational_at(k, token)?,
        }
    }
    Ok(form)
}

pub fn read_dpp(matrix: &str, projection: &str) -> Result<DppRepresentation, FormatError> {
    let entries = content_lines(matrix)
        .map(|(k, l)| l.split_whitespace().map(|c| parse_entry(k, c)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut sources = BTreeMap::new();
    for (k, l) in content_lines(projection) {
        let (name, rhs) = l.split_once('=').ok_or_else(|| line_error(k, "expected `var = form`"))?;
        sources.insert(VarId::new(name.trim()), parse_affine(k, rhs.trim())?);
    }
    if entries.iter().any(|r| r.len() != entries.len()) {
        return Err(FormatError::Invalid("matrix is not square".into()));
    }
    Ok(DppRepresentation::from_entries(&entries, &sources)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pgc_core::corpus::figures;

    #[test]
    fn circuit_round_trip_is_bit_exact() {
        let (c, _) = figures::fig2_pc();
        let text = write_circuit(&c);
        let back = read_circuit(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(write_circuit(&back), text);
    }

    #[test]
    fn entries() {
        for text in ["D1+1/2", "D2-3", "D4", "7/3", "-2"] {
            let e = parse_entry(0, text).unwrap();
            let again = entry_text(&e);
            assert_eq!(parse_entry(0, &again).unwrap(), e);
        }
        assert_eq!(entry_text(&parse_entry(0, "D2-3").unwrap()), "D2-3");
    }

    #[test]
    fn affine() {
        let f = parse_affine(0, "2*y1 + -1/2*y2 + 3").unwrap();
        assert_eq!(f.to_string(), "2*y1 + -1/2*y2 + 3");
        assert_eq!(parse_affine(0, "y1").unwrap(), AffineForm::var(VarId::new("y1")));
    }
}
