//! Text formats: spec documents, DOT, adjacency lists and field rows.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::electric::{EdgeField, VertexField};
use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredSpec, Vertex};
use crate::numeric::{parse_rational, Scalar};

/// Parses `{"m": .., "intra": [[a,b],..], "cross": [[j,j'],..]}`.
pub fn parse_spec(text: &str) -> Result<LayeredSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec document: {e}")))
}

pub fn spec_to_json(spec: &LayeredSpec) -> String {
    serde_json::to_string(spec).expect("spec serialises")
}

const LAYER_PALETTE: [&str; 6] = [
    "lightblue",
    "palegreen",
    "lightyellow",
    "lightpink",
    "lavender",
    "peachpuff",
];

/// DOT options: per-layer vertex fill and optional per-edge colours.
#[derive(Debug, Clone, Default)]
pub struct DotStyle<'a> {
    pub colour_layers: bool,
    pub edge_colours: Option<&'a [&'a str]>,
}

/// Undirected DOT with vertex labels `"n,k"`.
pub fn graph_to_dot(g: &Graph, name: &str, style: &DotStyle<'_>) -> String {
    let mut out = String::new();
    writeln!(out, "graph {name} {{").unwrap();
    if style.colour_layers {
        writeln!(out, "  node [style=filled];").unwrap();
    }
    for v in g.vertices() {
        if style.colour_layers {
            let colour = LAYER_PALETTE[v.layer.rem_euclid(LAYER_PALETTE.len() as i64) as usize];
            writeln!(out, "  \"{v}\" [label=\"{v}\", fillcolor={colour}];").unwrap();
        } else {
            writeln!(out, "  \"{v}\" [label=\"{v}\"];").unwrap();
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (x, y) = (g.vertex(a), g.vertex(b));
        match style.edge_colours {
            Some(colours) => writeln!(out, "  \"{x}\" -- \"{y}\" [color={}];", colours[e]).unwrap(),
            None => writeln!(out, "  \"{x}\" -- \"{y}\";").unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

/// One line per vertex: `n,k: n,k n,k ...`.
pub fn adjacency_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let nbrs: Vec<String> = g.neighbours(i).map(|j| g.vertex(j).to_string()).collect();
        writeln!(out, "{v}: {}", nbrs.join(" ")).unwrap();
    }
    out
}

/// Rows `[n, k, n', k', value]` on canonical orientations.
pub fn edge_field_rows<T: Scalar>(f: &EdgeField<T>) -> Value {
    let g = f.carrier();
    let rows: Vec<Value> = g
        .edges()
        .iter()
        .zip(f.canonical_values())
        .map(|(&(a, b), val)| {
            let (x, y) = (g.vertex(a), g.vertex(b));
            json!([x.layer, x.pos, y.layer, y.pos, val.to_json()])
        })
        .collect();
    Value::Array(rows)
}

/// Rows `[n, k, value]`.
pub fn vertex_field_rows<T: Scalar>(u: &VertexField<T>) -> Value {
    let g = u.carrier();
    let rows: Vec<Value> = g
        .vertices()
        .iter()
        .zip(u.values())
        .map(|(v, val)| json!([v.layer, v.pos, val.to_json()]))
        .collect();
    Value::Array(rows)
}

fn row_vertex(row: &[Value], at: usize) -> Result<Vertex> {
    let layer = row
        .get(at)
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse(format!("row {row:?}: bad layer")))?;
    let pos = row
        .get(at + 1)
        .and_then(Value::as_u64)
        .and_then(|p| u32::try_from(p).ok())
        .ok_or_else(|| Error::Parse(format!("row {row:?}: bad position")))?;
    Ok(Vertex::new(layer, pos))
}

fn row_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => {
            Ok(<BigRational as Scalar>::from_i64(n.as_i64().unwrap()))
        }
        other => Err(Error::Parse(format!("expected \"p/q\", got {other}"))),
    }
}

fn row_float(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Parse(format!("expected a number, got {v}")))
}

/// Parses values on canonical edge orientations of `g` from rows.
pub fn parse_edge_rows<T: RowScalar>(
    g: &std::sync::Arc<Graph>,
    rows: &Value,
) -> Result<EdgeField<T>> {
    let rows = rows
        .as_array()
        .ok_or_else(|| Error::Parse("edge field must be an array of rows".into()))?;
    let mut f = EdgeField::<T>::zero(g);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("bad row {row}")))?;
        let x = g.require(row_vertex(row, 0)?)?;
        let y = g.require(row_vertex(row, 2)?)?;
        let val = T::parse_row_value(row.get(4).unwrap_or(&Value::Null))?;
        f.set(x, y, val)?;
    }
    Ok(f)
}

pub fn parse_vertex_rows<T: RowScalar>(
    g: &std::sync::Arc<Graph>,
    rows: &Value,
) -> Result<VertexField<T>> {
    let rows = rows
        .as_array()
        .ok_or_else(|| Error::Parse("vertex field must be an array of rows".into()))?;
    let mut values = vec![T::zero(); g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("bad row {row}")))?;
        let i = g.require(row_vertex(row, 0)?)?;
        values[i] = T::parse_row_value(row.get(2).unwrap_or(&Value::Null))?;
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("no value for vertex {}", g.vertex(i))));
    }
    Ok(VertexField::new(g, values))
}

/// Scalars that can be read back from field rows.
pub trait RowScalar: Scalar {
    fn parse_row_value(v: &Value) -> Result<Self>;
}

impl RowScalar for f64 {
    fn parse_row_value(v: &Value) -> Result<Self> {
        row_float(v)
    }
}

impl RowScalar for BigRational {
    fn parse_row_value(v: &Value) -> Result<Self> {
        row_rational(v)
    }
}
