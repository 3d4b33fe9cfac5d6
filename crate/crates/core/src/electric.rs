//! Antisymmetric edge fields, vertex potentials, Kirchhoff's laws and unit
//! currents on finite graphs. All conductances are 1.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph, Vertex};
use crate::numeric::Scalar;
use crate::solve::BandedSystem;

/// Antisymmetric function on directed edges.
///
/// Only the value on the canonical orientation `lo -> hi` (by vertex index)
/// is stored, so `f(x,y) = -f(y,x)` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField<T> {
    carrier: Arc<Graph>,
    values: Vec<T>,
}

impl<T: Scalar> EdgeField<T> {
    pub fn zero(carrier: &Arc<Graph>) -> Self {
        EdgeField {
            carrier: Arc::clone(carrier),
            values: vec![T::zero(); carrier.edge_count()],
        }
    }

    /// Values on canonical orientations, one per carrier edge.
    pub fn from_canonical(carrier: &Arc<Graph>, values: Vec<T>) -> Self {
        assert_eq!(values.len(), carrier.edge_count());
        EdgeField {
            carrier: Arc::clone(carrier),
            values,
        }
    }

    pub fn carrier(&self) -> &Arc<Graph> {
        &self.carrier
    }

    pub fn canonical_values(&self) -> &[T] {
        &self.values
    }

    /// `f(x -> y)` for vertex indices joined by edge `e`.
    pub fn oriented(&self, e: usize, from: usize) -> T {
        let (lo, _) = self.carrier.edges()[e];
        if from == lo {
            self.values[e].clone()
        } else {
            -self.values[e].clone()
        }
    }

    /// `f(x -> y)` by vertex indices; `None` if `xy` is not an edge.
    pub fn get(&self, x: usize, y: usize) -> Option<T> {
        self.carrier.edge_between(x, y).map(|e| self.oriented(e, x))
    }

    pub fn at(&self, x: Vertex, y: Vertex) -> Result<T> {
        let a = self.carrier.require(x)?;
        let b = self.carrier.require(y)?;
        self.get(a, b)
            .ok_or_else(|| Error::InvalidArgument(format!("{x} -- {y} is not an edge")))
    }

    /// Sets `f(x -> y) = v` (and so `f(y -> x) = -v`).
    pub fn set(&mut self, x: usize, y: usize, v: T) -> Result<()> {
        let e = self.carrier.edge_between(x, y).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{} -- {} is not an edge",
                self.carrier.vertex(x),
                self.carrier.vertex(y)
            ))
        })?;
        let (lo, _) = self.carrier.edges()[e];
        self.values[e] = if x == lo { v } else { -v };
        Ok(())
    }

    pub fn scaled(&self, c: &T) -> Self {
        EdgeField {
            carrier: Arc::clone(&self.carrier),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn added(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier);
        EdgeField {
            carrier: Arc::clone(&self.carrier),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// `max |f(e)|` over edges.
    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(Scalar::abs)
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> EdgeField<U> {
        EdgeField {
            carrier: Arc::clone(&self.carrier),
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// Real (or rational) function on the vertices of a carrier graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField<T> {
    carrier: Arc<Graph>,
    values: Vec<T>,
}

impl<T: Scalar> VertexField<T> {
    pub fn new(carrier: &Arc<Graph>, values: Vec<T>) -> Self {
        assert_eq!(values.len(), carrier.vertex_count());
        VertexField {
            carrier: Arc::clone(carrier),
            values,
        }
    }

    pub fn constant(carrier: &Arc<Graph>, c: T) -> Self {
        Self::new(carrier, vec![c; carrier.vertex_count()])
    }

    pub fn from_fn(carrier: &Arc<Graph>, f: impl Fn(Vertex) -> T) -> Self {
        let values = carrier.vertices().iter().map(|&v| f(v)).collect();
        Self::new(carrier, values)
    }

    pub fn carrier(&self) -> &Arc<Graph> {
        &self.carrier
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn at(&self, v: Vertex) -> Result<&T> {
        Ok(&self.values[self.carrier.require(v)?])
    }

    pub fn get(&self, v: Vertex) -> Option<&T> {
        self.carrier.index_of(v).map(|i| &self.values[i])
    }

    /// Restriction to `sub`, whose vertices must all lie in this carrier.
    pub fn restrict(&self, sub: &Arc<Graph>) -> Result<Self> {
        let values = sub
            .vertices()
            .iter()
            .map(|&v| self.at(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(sub, values))
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self::new(&self.carrier, self.values.iter().map(f).collect())
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> VertexField<U> {
        VertexField::new(&self.carrier, self.values.iter().map(f).collect())
    }

    /// `max |u(e_x) - u(e_y)|` over edges.
    pub fn lipschitz_constant(&self) -> T {
        ohm_dual_edge(self).max_abs()
    }

    /// `max_v |self(v) - other(v)|` over this carrier's vertices.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        let mut best = T::zero();
        for (i, &v) in self.carrier.vertices().iter().enumerate() {
            let d = (self.values[i].clone() - other.at(v)?.clone()).abs();
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }
}

/// Net flow `f*(x)` out of vertex index `x`.
pub fn net_out<T: Scalar>(f: &EdgeField<T>, x: usize) -> T {
    f.carrier
        .adjacent(x)
        .iter()
        .fold(T::zero(), |acc, &(_, e)| acc + f.oriented(e, x))
}

/// `max |f*(x)|` over vertices not in `exclude`.
pub fn knl_residual<T: Scalar>(f: &EdgeField<T>, exclude: &[Vertex]) -> T {
    let mut skip = vec![false; f.carrier.vertex_count()];
    for v in exclude {
        if let Some(i) = f.carrier.index_of(*v) {
            skip[i] = true;
        }
    }
    (0..f.carrier.vertex_count())
        .filter(|&x| !skip[x])
        .map(|x| net_out(f, x).abs())
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// BFS spanning tree rooted at `root`: parent vertex and parent edge per vertex.
struct SpanningTree {
    order: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

fn spanning_tree(g: &Graph, root: usize) -> Result<SpanningTree> {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, e) in g.adjacent(v) {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return Err(Error::Disconnected);
    }
    Ok(SpanningTree {
        order,
        parent,
        depth,
    })
}

/// Potentials with `u(root) = v0` and `u(x) - u(y) = f(x -> y)` on tree edges.
fn tree_potential<T: Scalar>(f: &EdgeField<T>, tree: &SpanningTree, root: usize, v0: T) -> Vec<T> {
    let mut u = vec![T::zero(); f.carrier.vertex_count()];
    u[root] = v0;
    for &w in tree.order.iter().skip(1) {
        let (v, e) = tree.parent[w].expect("non-root vertex has a parent");
        u[w] = u[v].clone() - f.oriented(e, v);
    }
    u
}

/// Worst fundamental-cycle sum of `f` and the cycle realising it.
fn worst_fundamental_cycle<T: Scalar>(
    f: &EdgeField<T>,
    tree: &SpanningTree,
    u: &[T],
) -> (T, Option<(usize, usize)>) {
    let mut worst = T::zero();
    let mut at = None;
    for (e, &(a, b)) in f.carrier.edges().iter().enumerate() {
        if tree.parent[a].map(|p| p.1) == Some(e) || tree.parent[b].map(|p| p.1) == Some(e) {
            continue;
        }
        // Fundamental cycle of the non-tree edge a -> b closed through the tree:
        // f(a->b) + (tree path b -> a) = f(a->b) - (u(a) - u(b)).
        let r = (f.oriented(e, a) - (u[a].clone() - u[b].clone())).abs();
        if r > worst || at.is_none() {
            if r > worst {
                worst = r;
            }
            at = Some((a, b));
        }
    }
    (worst, at)
}

fn cycle_through(g: &Graph, tree: &SpanningTree, a: usize, b: usize) -> Vec<Vertex> {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while x != y {
        if tree.depth[x] >= tree.depth[y] {
            x = tree.parent[x].expect("non-root").0;
            left.push(x);
        } else {
            y = tree.parent[y].expect("non-root").0;
            right.push(y);
        }
    }
    right.pop();
    left.extend(right.into_iter().rev());
    left.into_iter().map(|i| g.vertex(i)).collect()
}

/// `max |sum of f around C|` over a fundamental cycle basis `C` of a BFS
/// spanning tree. Every cycle sum is an integer combination of basis sums, so
/// zero here means KCL holds for every cycle.
pub fn kcl_residual<T: Scalar>(f: &EdgeField<T>) -> Result<T> {
    if f.carrier.vertex_count() == 0 {
        return Ok(T::zero());
    }
    let root = f.carrier.origin();
    let tree = spanning_tree(&f.carrier, root)?;
    let u = tree_potential(f, &tree, root, T::zero());
    Ok(worst_fundamental_cycle(f, &tree, &u).0)
}

/// Potential `u` with `u(o) = v0` and `∂u = i`, by spanning-tree propagation.
/// Fails with the worst fundamental cycle when KCL is violated beyond the
/// default tolerance of `T`.
pub fn ohm_dual_vertex<T: Scalar>(i: &EdgeField<T>, o: Vertex, v0: T) -> Result<VertexField<T>> {
    ohm_dual_vertex_tol(i, o, v0, &T::tolerance())
}

pub fn ohm_dual_vertex_tol<T: Scalar>(
    i: &EdgeField<T>,
    o: Vertex,
    v0: T,
    tol: &T,
) -> Result<VertexField<T>> {
    let g = &i.carrier;
    let root = g.require(o)?;
    let tree = spanning_tree(g, root)?;
    let u = tree_potential(i, &tree, root, v0);
    let (worst, at) = worst_fundamental_cycle(i, &tree, &u);
    if worst > *tol {
        let (a, b) = at.expect("positive residual comes from a non-tree edge");
        return Err(Error::KclViolation {
            residual: worst.to_f64(),
            cycle: cycle_through(g, &tree, a, b),
        });
    }
    Ok(VertexField::new(g, u))
}

/// `∂u(x -> y) = u(x) - u(y)`.
pub fn ohm_dual_edge<T: Scalar>(u: &VertexField<T>) -> EdgeField<T> {
    let g = &u.carrier;
    let values = g
        .edges()
        .iter()
        .map(|&(a, b)| u.values[a].clone() - u.values[b].clone())
        .collect();
    EdgeField::from_canonical(g, values)
}

/// Potential of the unit current and the residual of its linear solve.
#[derive(Debug, Clone)]
pub struct UnitSolve<T> {
    /// Solution of `L u = χ_p - χ_q` grounded at `u(q) = 0`.
    pub potential: VertexField<T>,
    /// `max |L u - b|` over the grounded system.
    pub residual: f64,
}

/// Solves the grounded Laplacian system for a unit current from `p` to `q`.
pub fn unit_potential<T: Scalar>(g: &Arc<Graph>, p: Vertex, q: Vertex) -> Result<UnitSolve<T>> {
    let pi = g.require(p)?;
    let qi = g.require(q)?;
    if pi == qi {
        return Err(Error::SameTerminals(p));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    // unknowns: every vertex except q, in vertex order (keeps the band narrow)
    let unknown = |v: usize| if v < qi { v } else { v - 1 };
    let mut entries = Vec::with_capacity(n + 2 * g.edge_count());
    for v in (0..n).filter(|&v| v != qi) {
        entries.push((unknown(v), unknown(v), T::from_i64(g.degree(v) as i64)));
    }
    for &(a, b) in g.edges() {
        if a != qi && b != qi {
            entries.push((unknown(a), unknown(b), -T::one()));
            entries.push((unknown(b), unknown(a), -T::one()));
        }
    }
    let system = BandedSystem::from_triplets(n - 1, &entries);
    let mut rhs = vec![T::zero(); n - 1];
    rhs[unknown(pi)] = T::one();
    let check = system.clone();
    let x = system.solve(rhs.clone())?;
    let residual = check
        .apply(&x)
        .iter()
        .zip(&rhs)
        .map(|(ax, b)| (ax.clone() - b.clone()).abs().to_f64())
        .fold(0.0, f64::max);
    let mut u = Vec::with_capacity(n);
    for v in 0..n {
        u.push(if v == qi {
            T::zero()
        } else {
            x[unknown(v)].clone()
        });
    }
    Ok(UnitSolve {
        potential: VertexField::new(g, u),
        residual,
    })
}

/// The electrical current of intensity 1 from `p` to `q`.
pub fn unit_current<T: Scalar>(g: &Arc<Graph>, p: Vertex, q: Vertex) -> Result<EdgeField<T>> {
    Ok(ohm_dual_edge(&unit_potential::<T>(g, p, q)?.potential))
}

/// Net flow of `f` through a cut, oriented `X -> Y`.
pub fn cut_flow<T: Scalar>(f: &EdgeField<T>, c: &Cut) -> Result<T> {
    if !(Arc::ptr_eq(&f.carrier, c.carrier()) || *f.carrier == **c.carrier()) {
        return Err(Error::InvalidArgument(
            "cut and field live on different carriers".into(),
        ));
    }
    Ok(c.crossing().iter().fold(T::zero(), |acc, &e| {
        let (a, b) = f.carrier.edges()[e];
        let from = if c.in_x(a) { a } else { b };
        acc + f.oriented(e, from)
    }))
}

fn vertex_mask(g: &Graph, set: &[Vertex]) -> Result<Vec<usize>> {
    set.iter().map(|&v| g.require(v)).collect()
}

/// `max |u(x) - mean of u over neighbours|` over `set`.
///
/// Every vertex of `set` must keep its full ambient degree in the carrier.
pub fn harmonic_residual<T: Scalar>(u: &VertexField<T>, set: &[Vertex]) -> Result<T> {
    let g = &u.carrier;
    let mut worst = T::zero();
    for x in vertex_mask(g, set)? {
        if !g.is_interior(x) {
            return Err(Error::TruncatedDegree(g.vertex(x)));
        }
        worst = max(worst, harmonic_defect(u, x).abs());
    }
    Ok(worst)
}

fn harmonic_defect<T: Scalar>(u: &VertexField<T>, x: usize) -> T {
    let g = &u.carrier;
    let sum = g
        .neighbours(x)
        .fold(T::zero(), |acc, y| acc + u.values[y].clone());
    u.values[x].clone() - sum / T::from_i64(g.degree(x) as i64)
}

fn max<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// Outcome of the maximum-principle check.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleReport {
    pub passed: bool,
    pub constant: bool,
    pub max: f64,
    pub min: f64,
    /// Vertices of the harmonic set where an extremum is attained.
    pub interior_extrema: Vec<Vertex>,
}

/// Checks that a function harmonic on `set` is constant or attains both its
/// maximum and its minimum only outside `set`.
pub fn maximum_principle_check<T: Scalar>(
    u: &VertexField<T>,
    set: &[Vertex],
) -> Result<MaxPrincipleReport> {
    let g = &u.carrier;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let tol = T::tolerance();
    for x in vertex_mask(g, set)? {
        if !g.is_interior(x) {
            return Err(Error::TruncatedDegree(g.vertex(x)));
        }
        let r = harmonic_defect(u, x).abs();
        if r > tol {
            return Err(Error::NotHarmonic {
                residual: r.to_f64(),
                vertex: g.vertex(x),
            });
        }
    }
    let hi = u.values.iter().cloned().fold(u.values[0].clone(), max);
    let lo = u
        .values
        .iter()
        .cloned()
        .fold(u.values[0].clone(), |a, b| if b < a { b } else { a });
    let constant = (hi.clone() - lo.clone()).abs() <= tol;
    let interior_extrema: Vec<Vertex> = if constant {
        Vec::new()
    } else {
        vertex_mask(g, set)?
            .into_iter()
            .filter(|&x| {
                (u.values[x].clone() - hi.clone()).abs() <= tol
                    || (u.values[x].clone() - lo.clone()).abs() <= tol
            })
            .map(|x| g.vertex(x))
            .collect()
    };
    Ok(MaxPrincipleReport {
        passed: constant || interior_extrema.is_empty(),
        constant,
        max: hi.to_f64(),
        min: lo.to_f64(),
        interior_extrema,
    })
}
