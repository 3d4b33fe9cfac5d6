//! 3-edge-colouring of cubic 2-ended specs from a harmonic function.
//!
//! At each vertex the three differences `g(u) - g(o)` sum to zero, so after
//! rescaling `g` (possibly by a negative factor) they form one of three
//! patterns. The pattern decides which edges are red; the remaining edges
//! form a 2-regular subgraph whose cycles are even and get alternating
//! blue/green colours.

use std::fmt;
use std::sync::Arc;

use crate::electric::VertexField;
use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredSpec, Vertex};
use crate::harmonic::periodic_harmonic;
use crate::numeric::{NumericMode, Scalar};
use crate::report::{Report, Verdict};

/// Float comparisons of rescaled differences use this tolerance.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

fn tol<T: Scalar>() -> T {
    match T::MODE {
        NumericMode::Exact => T::zero(),
        NumericMode::Float => T::from_f64(FLOAT_TOLERANCE),
    }
}

fn close<T: Scalar>(a: &T, b: &T) -> bool {
    (a.clone() - b.clone()).abs() <= tol::<T>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColourCase {
    /// Differences `(-1, 0, 1)`.
    Case1,
    /// Differences `(-1/2, -1/2, 1)`.
    Case2,
    /// Differences `a < b < 0 < c` with `a + b + c = 0`.
    Case3,
}

impl fmt::Display for ColourCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColourCase::Case1 => "CASE1",
            ColourCase::Case2 => "CASE2",
            ColourCase::Case3 => "CASE3",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    pub case: ColourCase,
    /// Factor applied to `g`; negative when the pattern is mirrored.
    pub scale: T,
    /// Sorted differences at the classified vertex, after rescaling.
    pub normalised: [T; 3],
}

fn sort3<T: Scalar>(mut d: [T; 3]) -> [T; 3] {
    d.sort_by(|a, b| a.partial_cmp(b).expect("comparable differences"));
    d
}

/// Classifies the gradient pattern of `g` at the interior cubic vertex `o`.
pub fn classify_case<T: Scalar>(g: &VertexField<T>, o: Vertex) -> Result<Classification<T>> {
    let carrier = g.carrier();
    let i = carrier.require(o)?;
    if !carrier.is_interior(i) {
        return Err(Error::TruncatedDegree(o));
    }
    if carrier.degree(i) != 3 {
        return Err(Error::ColourPattern(format!(
            "{o} has degree {}, expected 3",
            carrier.degree(i)
        )));
    }
    let raw: Vec<T> = carrier
        .neighbours(i)
        .map(|j| g.value(j).clone() - g.value(i).clone())
        .collect();
    let [a, b, c] = sort3([raw[0].clone(), raw[1].clone(), raw[2].clone()]);
    let total = a.clone() + b.clone() + c.clone();
    if !close(&total, &T::zero()) {
        return Err(Error::NotHarmonic {
            residual: total.to_f64(),
            vertex: o,
        });
    }
    if close(&c, &T::zero()) {
        return Err(Error::ColourPattern(format!("g is constant around {o}")));
    }
    let zero = T::zero();
    let (case, scale) = if close(&b, &zero) {
        (ColourCase::Case1, T::one() / c.clone())
    } else if close(&a, &b) {
        (ColourCase::Case2, T::one() / c.clone())
    } else if close(&b, &c) {
        (ColourCase::Case2, T::one() / a.clone())
    } else if b < zero {
        (ColourCase::Case3, T::one() / c.clone())
    } else {
        (ColourCase::Case3, T::one() / a.clone())
    };
    let normalised = sort3([a * scale.clone(), b * scale.clone(), c * scale.clone()]);
    Ok(Classification {
        case,
        scale,
        normalised,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Colour {
    Red,
    Blue,
    Green,
}

impl Colour {
    pub const ALL: [Colour; 3] = [Colour::Red, Colour::Blue, Colour::Green];

    pub fn as_str(self) -> &'static str {
        match self {
            Colour::Red => "red",
            Colour::Blue => "blue",
            Colour::Green => "green",
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A colour per canonical edge of the carrier window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColouring {
    pub carrier: Arc<Graph>,
    pub colours: Vec<Colour>,
    /// Lengths of the closed non-red cycles met while alternating.
    pub cycle_lengths: Vec<usize>,
}

impl EdgeColouring {
    pub fn colour_between(&self, a: Vertex, b: Vertex) -> Option<Colour> {
        let (x, y) = (self.carrier.index_of(a)?, self.carrier.index_of(b)?);
        self.carrier.edge_between(x, y).map(|e| self.colours[e])
    }

    /// Rows `[n, k, n', k', colour]`.
    pub fn rows(&self) -> serde_json::Value {
        let g = &self.carrier;
        serde_json::Value::Array(
            g.edges()
                .iter()
                .zip(&self.colours)
                .map(|(&(a, b), c)| {
                    let (x, y) = (g.vertex(a), g.vertex(b));
                    serde_json::json!([x.layer, x.pos, y.layer, y.pos, c.as_str()])
                })
                .collect(),
        )
    }

    pub fn colour_names(&self) -> Vec<&'static str> {
        self.colours.iter().map(|c| c.as_str()).collect()
    }
}

/// Colours the edges of `window` using the pattern of `g` rescaled by `class.scale`.
pub fn three_edge_colour<T: Scalar>(
    window: &Arc<Graph>,
    g: &VertexField<T>,
    class: &Classification<T>,
) -> Result<EdgeColouring> {
    let gap = |e: usize| -> Result<T> {
        let (a, b) = window.edges()[e];
        let (x, y) = (window.vertex(a), window.vertex(b));
        Ok(((g.at(x)?.clone() - g.at(y)?.clone()) * class.scale.clone()).abs())
    };
    let gaps: Vec<T> = (0..window.edge_count()).map(gap).collect::<Result<_>>()?;

    if class.case == ColourCase::Case3 {
        let mut levels: Vec<T> = class.normalised.iter().map(|d| d.abs()).collect();
        levels.sort_by(|a, b| b.partial_cmp(a).expect("comparable"));
        let colours = gaps
            .iter()
            .map(|d| {
                levels
                    .iter()
                    .position(|l| close(l, d))
                    .map(|i| Colour::ALL[i])
                    .ok_or_else(|| {
                        Error::ColourPattern(format!(
                            "edge gradient {} matches none of the three levels",
                            d.to_text()
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(EdgeColouring {
            carrier: window.clone(),
            colours,
            cycle_lengths: Vec::new(),
        });
    }

    let red_gap = match class.case {
        ColourCase::Case1 => T::zero(),
        _ => T::one(),
    };
    let red: Vec<bool> = gaps.iter().map(|d| close(d, &red_gap)).collect();
    let mut colours: Vec<Option<Colour>> = red
        .iter()
        .map(|&r| if r { Some(Colour::Red) } else { None })
        .collect();
    let h_adj: Vec<Vec<(usize, usize)>> = (0..window.vertex_count())
        .map(|i| {
            window
                .adjacent(i)
                .iter()
                .copied()
                .filter(|&(_, e)| !red[e])
                .collect()
        })
        .collect();
    if let Some(i) = (0..window.vertex_count()).find(|&i| h_adj[i].len() > 2) {
        return Err(Error::ColourPattern(format!(
            "{} has {} non-red edges",
            window.vertex(i),
            h_adj[i].len()
        )));
    }

    let mut visited = vec![false; window.vertex_count()];
    let mut cycle_lengths = Vec::new();
    for start in 0..window.vertex_count() {
        if visited[start] || h_adj[start].is_empty() {
            continue;
        }
        // walk back to a path end if there is one, so paths start at an endpoint
        let component = collect_component(&h_adj, start);
        let ends: Vec<usize> = component
            .iter()
            .copied()
            .filter(|&v| h_adj[v].len() == 1)
            .collect();
        let first = ends.first().copied().unwrap_or(component[0]);
        let is_cycle = ends.is_empty();
        let mut prev_edge = None;
        let mut at = first;
        let mut colour = Colour::Blue;
        let mut length = 0usize;
        let mut signed_balance = 0i64;
        loop {
            visited[at] = true;
            let mut options: Vec<(usize, usize)> = h_adj[at]
                .iter()
                .copied()
                .filter(|&(_, e)| Some(e) != prev_edge && colours[e].is_none())
                .collect();
            options.sort();
            let Some(&(next, e)) = options.first() else {
                break;
            };
            colours[e] = Some(colour);
            let step = g.value(next).clone() - g.value(at).clone();
            signed_balance += if step > T::zero() { 1 } else { -1 };
            length += 1;
            colour = if colour == Colour::Blue {
                Colour::Green
            } else {
                Colour::Blue
            };
            prev_edge = Some(e);
            at = next;
        }
        if is_cycle {
            if length % 2 == 1 || signed_balance != 0 {
                return Err(Error::OddColourCycle {
                    length,
                    start: window.vertex(first),
                });
            }
            cycle_lengths.push(length);
        }
    }
    let colours = colours
        .into_iter()
        .map(|c| c.expect("every edge is red or lies on a non-red component"))
        .collect();
    Ok(EdgeColouring {
        carrier: window.clone(),
        colours,
        cycle_lengths,
    })
}

fn collect_component(adj: &[Vec<(usize, usize)>], start: usize) -> Vec<usize> {
    let mut seen = vec![start];
    let mut stack = vec![start];
    let mut mark = std::collections::HashSet::from([start]);
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if mark.insert(w) {
                seen.push(w);
                stack.push(w);
            }
        }
    }
    seen.sort_unstable();
    seen
}

/// Properness and perfect-matching coverage on interior vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouringReport {
    pub interior_vertices: usize,
    pub class_sizes: [usize; 3],
    /// `(vertex, problem)` for each interior violation.
    pub violations: Vec<(Vertex, String)>,
}

impl ColouringReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("interior_vertices", self.interior_vertices);
        for (c, n) in Colour::ALL.iter().zip(self.class_sizes) {
            r.push(format!("edges.{c}"), n);
        }
        for (v, why) in &self.violations {
            r.push(format!("violation.{v}"), why);
        }
        r.push("verdict", Verdict::from_bool(self.passed()));
        r
    }
}

pub fn verify_colouring(c: &EdgeColouring) -> ColouringReport {
    let g = &c.carrier;
    let mut class_sizes = [0usize; 3];
    for colour in &c.colours {
        class_sizes[*colour as usize] += 1;
    }
    let interior = g.interior();
    let mut violations = Vec::new();
    for &i in &interior {
        let mut seen = [0usize; 3];
        for &(_, e) in g.adjacent(i) {
            seen[c.colours[e] as usize] += 1;
        }
        for colour in Colour::ALL {
            match seen[colour as usize] {
                1 => {}
                0 => violations.push((g.vertex(i), format!("no {colour} edge"))),
                n => violations.push((g.vertex(i), format!("{n} {colour} edges"))),
            }
        }
    }
    ColouringReport {
        interior_vertices: interior.len(),
        class_sizes,
        violations,
    }
}

/// Outcome of colouring a window `[-radius, radius]` of a cubic spec.
#[derive(Debug, Clone)]
pub struct SpecColouring {
    pub classification: Classification<num_rational::BigRational>,
    pub colouring: EdgeColouring,
    pub check: ColouringReport,
}

impl SpecColouring {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("case", self.classification.case)
            .push("scale", self.classification.scale.to_text())
            .push(
                "normalised_differences",
                self.classification
                    .normalised
                    .iter()
                    .map(|d| d.to_text())
                    .collect::<Vec<_>>()
                    .join(","),
            )
            .push(
                "cycle_lengths",
                self.colouring
                    .cycle_lengths
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            )
            .push(
                "all_cycles_even",
                self.colouring.cycle_lengths.iter().all(|n| n % 2 == 0),
            );
        r.extend_prefixed("check", &self.check.to_report());
        r
    }
}

/// Colours layers `[-radius, radius]` using the exact periodic harmonic function.
///
/// The case is classified at `(0, 0)` and must agree at every interior vertex.
pub fn colour_spec(spec: &LayeredSpec, radius: i64) -> Result<SpecColouring> {
    if radius < 1 {
        return Err(Error::InvalidArgument(format!(
            "radius must be at least 1, got {radius}"
        )));
    }
    let harmonic = periodic_harmonic(spec, 0)?;
    let window = Arc::new(spec.expand(-radius, radius, 0)?);
    let g = harmonic.field_on(&window);
    let classification = classify_case(&g, Vertex::new(0, 0))?;
    for i in window.interior() {
        let here = classify_case(&g, window.vertex(i))?;
        if here.case != classification.case {
            return Err(Error::ColourPattern(format!(
                "{} is {} but the origin is {}",
                window.vertex(i),
                here.case,
                classification.case
            )));
        }
    }
    let colouring = three_edge_colour(&window, &g, &classification)?;
    let check = verify_colouring(&colouring);
    Ok(SpecColouring {
        classification,
        colouring,
        check,
    })
}
