//! Layered specs, finite truncations, balls and cuts.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex `(n, k)`: layer index `n` and position `k` in `Z/mZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub layer: i64,
    pub pos: u32,
}

impl Vertex {
    pub const fn new(layer: i64, pos: u32) -> Self {
        Vertex { layer, pos }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.layer, self.pos)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, k) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `n,k`, got `{s}`")))?;
        let layer = n
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad layer in `{s}`: {e}")))?;
        let pos = k
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad position in `{s}`: {e}")))?;
        Ok(Vertex { layer, pos })
    }
}

/// Periodic description of a 2-ended graph.
///
/// Vertex `(n, a)` is adjacent to `(n, b)` for every intra pair `{a, b}` and to
/// `(n + 1, b)` for every cross pair `(a, b)`, for all `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredSpec {
    pub m: u32,
    #[serde(default)]
    pub intra: Vec<(u32, u32)>,
    #[serde(default)]
    pub cross: Vec<(u32, u32)>,
}

impl LayeredSpec {
    /// Builds and validates a spec.
    pub fn new(m: u32, intra: Vec<(u32, u32)>, cross: Vec<(u32, u32)>) -> Result<Self> {
        let spec = LayeredSpec { m, intra, cross };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants: positions in range, no self-loops or
    /// duplicate edges, at least one cross rule, and a connected expansion.
    ///
    /// Connectivity is checked on the window `[-(m+1), m+1]`.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidSpec("layer size m must be positive".into()));
        }
        let mut seen_intra = BTreeSet::new();
        for &(a, b) in &self.intra {
            if a >= self.m || b >= self.m {
                return Err(Error::InvalidSpec(format!(
                    "intra rule [{a},{b}] out of range for m={}",
                    self.m
                )));
            }
            if a == b {
                return Err(Error::InvalidSpec(format!(
                    "intra rule [{a},{b}] is a self-loop"
                )));
            }
            if !seen_intra.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidSpec(format!(
                    "intra rule [{a},{b}] is duplicated"
                )));
            }
        }
        let mut seen_cross = BTreeSet::new();
        for &(a, b) in &self.cross {
            if a >= self.m || b >= self.m {
                return Err(Error::InvalidSpec(format!(
                    "cross rule [{a},{b}] out of range for m={}",
                    self.m
                )));
            }
            if !seen_cross.insert((a, b)) {
                return Err(Error::InvalidSpec(format!(
                    "cross rule [{a},{b}] is duplicated"
                )));
            }
        }
        if self.cross.is_empty() {
            return Err(Error::InvalidSpec(
                "no cross rules: layers do not contract to a 2-way infinite path".into(),
            ));
        }
        let w = i64::from(self.m) + 1;
        let g = self.expand_unchecked(-w, w, 0);
        if !g.is_connected() {
            return Err(Error::InvalidSpec(format!(
                "expansion on window [{}, {w}] is disconnected",
                -w
            )));
        }
        Ok(())
    }

    /// Neighbours of `v` in the infinite expansion, sorted.
    pub fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(4);
        for &(a, b) in &self.intra {
            if v.pos == a {
                out.push(Vertex::new(v.layer, b));
            }
            if v.pos == b {
                out.push(Vertex::new(v.layer, a));
            }
        }
        for &(a, b) in &self.cross {
            if v.pos == a {
                out.push(Vertex::new(v.layer + 1, b));
            }
            if v.pos == b {
                out.push(Vertex::new(v.layer - 1, a));
            }
        }
        out.sort();
        out
    }

    /// Degree of `(n, pos)` in the infinite expansion (independent of `n`).
    pub fn degree(&self, pos: u32) -> usize {
        self.neighbours(Vertex::new(0, pos)).len()
    }

    pub fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        if u.pos >= self.m || v.pos >= self.m {
            return false;
        }
        match v.layer - u.layer {
            0 => self
                .intra
                .iter()
                .any(|&(a, b)| (a, b) == (u.pos, v.pos) || (b, a) == (u.pos, v.pos)),
            1 => self.cross.contains(&(u.pos, v.pos)),
            -1 => self.cross.contains(&(v.pos, u.pos)),
            _ => false,
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.pos < self.m
    }

    /// Graph distances from `origin` in the infinite expansion, up to `radius`.
    pub fn distances(&self, origin: Vertex, radius: usize) -> HashMap<Vertex, usize> {
        let mut dist = HashMap::new();
        dist.insert(origin, 0);
        let mut queue = VecDeque::from([origin]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d == radius {
                continue;
            }
            for w in self.neighbours(v) {
                dist.entry(w).or_insert_with(|| {
                    queue.push_back(w);
                    d + 1
                });
            }
        }
        dist
    }

    /// Least and greatest layer reached by the ball of `radius` around `origin`.
    pub fn ball_layer_extent(&self, origin: Vertex, radius: usize) -> (i64, i64) {
        let dist = self.distances(origin, radius);
        let lo = dist.keys().map(|v| v.layer).min().unwrap_or(origin.layer);
        let hi = dist.keys().map(|v| v.layer).max().unwrap_or(origin.layer);
        (lo, hi)
    }

    /// The induced subgraph on layers `n_lo..=n_hi` with origin `(0, k0)`.
    pub fn expand(&self, n_lo: i64, n_hi: i64, k0: u32) -> Result<Graph> {
        self.validate()?;
        if !(n_lo < 0 && 0 < n_hi) {
            return Err(Error::InvalidArgument(format!(
                "window [{n_lo}, {n_hi}] must satisfy n_lo < 0 < n_hi"
            )));
        }
        if k0 >= self.m {
            return Err(Error::InvalidArgument(format!(
                "origin position {k0} out of range for m={}",
                self.m
            )));
        }
        Ok(self.expand_unchecked(n_lo, n_hi, k0))
    }

    /// Window that strictly contains the ball of `radius` around `(0, k0)`,
    /// padded by `margin` layers on each side.
    pub fn expand_around_ball(&self, k0: u32, radius: usize, margin: i64) -> Result<Graph> {
        let (lo, hi) = self.ball_layer_extent(Vertex::new(0, k0), radius);
        self.expand((lo - margin).min(-1), (hi + margin).max(1), k0)
    }

    fn expand_unchecked(&self, n_lo: i64, n_hi: i64, k0: u32) -> Graph {
        let mut vertices = Vec::new();
        for n in n_lo..=n_hi {
            for k in 0..self.m {
                vertices.push(Vertex::new(n, k));
            }
        }
        let mut edges = Vec::new();
        for n in n_lo..=n_hi {
            for &(a, b) in &self.intra {
                edges.push((Vertex::new(n, a), Vertex::new(n, b)));
            }
            if n < n_hi {
                for &(a, b) in &self.cross {
                    edges.push((Vertex::new(n, a), Vertex::new(n + 1, b)));
                }
            }
        }
        let ambient: Vec<usize> = vertices.iter().map(|v| self.degree(v.pos)).collect();
        Graph::build(
            vertices,
            &edges,
            Vertex::new(0, k0),
            (n_lo, n_hi),
            Some(ambient),
        )
        .expect("expansion of a checked spec is a simple graph")
    }
}

/// A finite simple graph with layer coordinates on every vertex.
///
/// Vertices are kept sorted by `(layer, pos)`; edges are stored once with
/// `lo < hi` (vertex indices), which fixes the canonical orientation used by
/// edge fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    ambient_degree: Vec<usize>,
    origin: usize,
    window: (i64, i64),
}

impl Graph {
    /// Builds a graph from explicit vertices and edges.
    ///
    /// `ambient_degree` is the degree each vertex has in the graph this one
    /// truncates; `None` means the graph stands alone.
    pub fn build(
        mut vertices: Vec<Vertex>,
        edges: &[(Vertex, Vertex)],
        origin: Vertex,
        window: (i64, i64),
        ambient_degree: Option<Vec<usize>>,
    ) -> Result<Self> {
        let ambient_by_vertex: Option<HashMap<Vertex, usize>> = ambient_degree.map(|d| {
            if d.len() != vertices.len() {
                panic!("ambient degree list length mismatch");
            }
            vertices.iter().copied().zip(d).collect()
        });
        vertices.sort();
        vertices.dedup();
        let index: HashMap<Vertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let origin_idx = *index.get(&origin).ok_or(Error::NotInCarrier(origin))?;
        let mut edge_list: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let a = *index.get(&u).ok_or(Error::NotInCarrier(u))?;
            let b = *index.get(&v).ok_or(Error::NotInCarrier(v))?;
            if a == b {
                return Err(Error::InvalidSpec(format!("self-loop at {u}")));
            }
            if (u.layer - v.layer).abs() > 1 {
                return Err(Error::InvalidSpec(format!(
                    "edge {u} -- {v} spans more than one layer"
                )));
            }
            edge_list.push((a.min(b), a.max(b)));
        }
        edge_list.sort_unstable();
        if let Some(w) = edge_list.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = w[0];
            return Err(Error::InvalidSpec(format!(
                "duplicate edge {} -- {}",
                vertices[a], vertices[b]
            )));
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (e, &(a, b)) in edge_list.iter().enumerate() {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let ambient_degree = match ambient_by_vertex {
            Some(map) => vertices.iter().map(|v| map[v]).collect(),
            None => adjacency.iter().map(Vec::len).collect(),
        };
        Ok(Graph {
            vertices,
            index,
            edges: edge_list,
            adjacency,
            ambient_degree,
            origin: origin_idx,
            window,
        })
    }

    /// A stand-alone graph on vertices `(0, 0..n)`, for small-graph catalogues.
    pub fn from_simple_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let vertices: Vec<Vertex> = (0..n as u32).map(|k| Vertex::new(0, k)).collect();
        let edges: Vec<(Vertex, Vertex)> = edges
            .iter()
            .map(|&(a, b)| (vertices[a], vertices[b]))
            .collect();
        Graph::build(vertices.clone(), &edges, vertices[0], (0, 0), None)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn require(&self, v: Vertex) -> Result<usize> {
        self.index_of(v).ok_or(Error::NotInCarrier(v))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }

    /// Edges as `(lo, hi)` vertex-index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbour, edge index)` pairs of vertex `i`, sorted by neighbour.
    pub fn adjacent(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|&(j, _)| j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn ambient_degree(&self, i: usize) -> usize {
        self.ambient_degree[i]
    }

    /// Whether vertex `i` keeps all of its ambient neighbours.
    pub fn is_interior(&self, i: usize) -> bool {
        self.degree(i) == self.ambient_degree[i]
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&i| self.is_interior(i))
            .collect()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(j, _)| j)
            .ok()
            .map(|pos| self.adjacency[a][pos].1)
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn origin_vertex(&self) -> Vertex {
        self.vertices[self.origin]
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    /// Breadth-first distances from `source`; `usize::MAX` if unreachable.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        self.bfs_avoiding(source, &[])
    }

    fn bfs_avoiding(&self, source: usize, blocked: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbours(v) {
                if dist[w] == usize::MAX && !blocked.get(w).copied().unwrap_or(false) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs(0).iter().all(|&d| d != usize::MAX)
    }

    /// Component label per vertex of the graph with `removed` vertices deleted;
    /// removed vertices get `None`.
    pub fn components_without(&self, removed: &[bool]) -> Vec<Option<usize>> {
        let mut label = vec![None; self.vertex_count()];
        let mut next = 0;
        for s in 0..self.vertex_count() {
            if removed[s] || label[s].is_some() {
                continue;
            }
            label[s] = Some(next);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbours(v) {
                    if !removed[w] && label[w].is_none() {
                        label[w] = Some(next);
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Induced subgraph on `keep`, preserving ambient degrees and origin.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut inside = vec![false; self.vertex_count()];
        for &i in keep {
            inside[i] = true;
        }
        let vertices: Vec<Vertex> = keep.iter().map(|&i| self.vertices[i]).collect();
        let ambient: Vec<usize> = keep.iter().map(|&i| self.ambient_degree[i]).collect();
        let edges: Vec<(Vertex, Vertex)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| inside[a] && inside[b])
            .map(|&(a, b)| (self.vertices[a], self.vertices[b]))
            .collect();
        Graph::build(
            vertices,
            &edges,
            self.origin_vertex(),
            self.window,
            Some(ambient),
        )
    }

    /// Vertex indices lying on the lowest / highest layer of the window.
    pub fn boundary_layers(&self) -> (Vec<usize>, Vec<usize>) {
        let (lo, hi) = self.window;
        let bottom = (0..self.vertex_count())
            .filter(|&i| self.vertices[i].layer == lo)
            .collect();
        let top = (0..self.vertex_count())
            .filter(|&i| self.vertices[i].layer == hi)
            .collect();
        (bottom, top)
    }
}

/// Operational stand-in for the two ends of the infinite graph: a vertex set
/// on the side of each end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ends {
    /// Vertices on the side of the end at `n -> +inf`.
    pub upper: Vec<Vertex>,
    /// Vertices on the side of the end at `n -> -inf`.
    pub lower: Vec<Vertex>,
}

impl Ends {
    /// Top and bottom layers of a truncation window.
    pub fn window_boundary(g: &Graph) -> Self {
        let (bottom, top) = g.boundary_layers();
        Ends {
            upper: top.into_iter().map(|i| g.vertex(i)).collect(),
            lower: bottom.into_iter().map(|i| g.vertex(i)).collect(),
        }
    }
}

/// Which end the `X` side of a cut contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndSide {
    Upper,
    Lower,
}

impl EndSide {
    pub fn sign(self) -> i64 {
        match self {
            EndSide::Upper => 1,
            EndSide::Lower => -1,
        }
    }
}

/// A vertex bipartition `(X, Y)` of a graph and its crossing edges.
#[derive(Debug, Clone)]
pub struct Cut {
    carrier: Arc<Graph>,
    in_x: Vec<bool>,
    crossing: Vec<usize>,
}

impl Cut {
    /// Cut with `X = x` and `Y = V \ X`.
    pub fn from_vertices(x: &[Vertex], g: &Arc<Graph>) -> Result<Self> {
        let mut in_x = vec![false; g.vertex_count()];
        for &v in x {
            in_x[g.require(v)?] = true;
        }
        Ok(Self::from_mask(in_x, g))
    }

    pub fn from_mask(in_x: Vec<bool>, g: &Arc<Graph>) -> Self {
        assert_eq!(in_x.len(), g.vertex_count());
        let crossing = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| in_x[a] != in_x[b])
            .map(|(e, _)| e)
            .collect();
        Cut {
            carrier: Arc::clone(g),
            in_x,
            crossing,
        }
    }

    /// `X = { v : v.layer >= threshold }`.
    pub fn layer_cut(g: &Arc<Graph>, threshold: i64) -> Self {
        let mask = g.vertices().iter().map(|v| v.layer >= threshold).collect();
        Self::from_mask(mask, g)
    }

    /// The same bipartition with sides swapped.
    pub fn reversed(&self) -> Self {
        Cut {
            carrier: Arc::clone(&self.carrier),
            in_x: self.in_x.iter().map(|b| !b).collect(),
            crossing: self.crossing.clone(),
        }
    }

    pub fn carrier(&self) -> &Arc<Graph> {
        &self.carrier
    }

    pub fn in_x(&self, i: usize) -> bool {
        self.in_x[i]
    }

    pub fn x(&self) -> Vec<Vertex> {
        self.side(true)
    }

    pub fn y(&self) -> Vec<Vertex> {
        self.side(false)
    }

    fn side(&self, want: bool) -> Vec<Vertex> {
        (0..self.in_x.len())
            .filter(|&i| self.in_x[i] == want)
            .map(|i| self.carrier.vertex(i))
            .collect()
    }

    /// Crossing edge indices into the carrier.
    pub fn crossing(&self) -> &[usize] {
        &self.crossing
    }

    /// Which end `X` contains, or `None` when the cut does not separate them.
    pub fn end_side(&self, ends: &Ends) -> Option<EndSide> {
        let side_of = |vs: &[Vertex]| -> Option<bool> {
            let mut it = vs
                .iter()
                .map(|&v| self.carrier.index_of(v).map(|i| self.in_x[i]));
            let first = it.next()??;
            for s in it {
                if s? != first {
                    return None;
                }
            }
            Some(first)
        };
        let up = side_of(&ends.upper)?;
        let low = side_of(&ends.lower)?;
        match (up, low) {
            (true, false) => Some(EndSide::Upper),
            (false, true) => Some(EndSide::Lower),
            _ => None,
        }
    }
}

/// Ball, sphere and terminal layers around the origin of a truncation.
#[derive(Debug, Clone)]
pub struct BallView {
    pub radius: usize,
    /// Distance from the origin per vertex of the truncation.
    pub distance: Vec<usize>,
    pub ball: Vec<Vertex>,
    pub sphere: Vec<Vertex>,
    /// `L_n`: sphere vertices on the side of the upper end.
    pub upper_layer: Vec<Vertex>,
    /// `L_{-n}`: sphere vertices on the side of the lower end.
    pub lower_layer: Vec<Vertex>,
    /// Least `k` such that `B_k` separates the two ends.
    pub n0: usize,
}

impl BallView {
    /// Computes `B_n`, `S_n`, `L_n`, `L_{-n}` and `n0` inside truncation `g`.
    ///
    /// The window must strictly contain `B_{n+1}` (and `B_{n0}`), otherwise
    /// boundary-reaching components cannot stand in for the ends.
    pub fn new(g: &Graph, radius: usize) -> Result<Self> {
        let distance = g.bfs(g.origin());
        check_window(g, &distance, radius + 1)?;
        let n0 = separation_radius(g, &distance)?;
        let ball: Vec<Vertex> = ball_indices(&distance, radius)
            .into_iter()
            .map(|i| g.vertex(i))
            .collect();
        let sphere_idx: Vec<usize> = (0..g.vertex_count())
            .filter(|&i| distance[i] == radius)
            .collect();
        let sphere = sphere_idx.iter().map(|&i| g.vertex(i)).collect();

        let (upper_layer, lower_layer) = if radius == 0 {
            let o = g.origin_vertex();
            (vec![o], vec![o])
        } else {
            let removed: Vec<bool> = distance.iter().map(|&d| d < radius).collect();
            let (upper, lower) = end_components(g, &removed, radius - 1)?;
            let label = g.components_without(&removed);
            let pick = |c: usize| -> Vec<Vertex> {
                sphere_idx
                    .iter()
                    .filter(|&&i| label[i] == Some(c))
                    .map(|&i| g.vertex(i))
                    .collect()
            };
            (pick(upper), pick(lower))
        };
        Ok(BallView {
            radius,
            distance,
            ball,
            sphere,
            upper_layer,
            lower_layer,
            n0,
        })
    }

    pub fn ends(&self) -> Ends {
        Ends {
            upper: self.upper_layer.clone(),
            lower: self.lower_layer.clone(),
        }
    }

    /// The ball as an induced subgraph of `g`.
    pub fn ball_graph(&self, g: &Graph) -> Result<Graph> {
        let keep = ball_indices(&self.distance, self.radius);
        g.induced(&keep)
    }
}

fn ball_indices(distance: &[usize], radius: usize) -> Vec<usize> {
    (0..distance.len())
        .filter(|&i| distance[i] <= radius)
        .collect()
}

fn check_window(g: &Graph, distance: &[usize], radius: usize) -> Result<()> {
    let (lo, hi) = g.window();
    let reached: Vec<i64> = (0..g.vertex_count())
        .filter(|&i| distance[i] <= radius)
        .map(|i| g.vertex(i).layer)
        .collect();
    let r_lo = reached.iter().copied().min().unwrap_or(0);
    let r_hi = reached.iter().copied().max().unwrap_or(0);
    if r_lo <= lo || r_hi >= hi {
        return Err(Error::InsufficientTruncation {
            radius,
            window_lo: lo,
            window_hi: hi,
            needed_lo: if r_lo <= lo { r_lo - 1 } else { r_lo },
            needed_hi: if r_hi >= hi { r_hi + 1 } else { r_hi },
        });
    }
    Ok(())
}

/// Component ids of `g - removed` that reach the top and bottom window layers.
fn end_components(g: &Graph, removed: &[bool], radius: usize) -> Result<(usize, usize)> {
    let label = g.components_without(removed);
    let (bottom, top) = g.boundary_layers();
    let unique = |idx: &[usize]| -> Option<usize> {
        let ids: BTreeSet<usize> = idx.iter().filter_map(|&i| label[i]).collect();
        (ids.len() == 1).then(|| *ids.iter().next().unwrap())
    };
    match (unique(&top), unique(&bottom)) {
        (Some(u), Some(l)) => Ok((u, l)),
        _ => {
            let (lo, hi) = g.window();
            Err(Error::InsufficientTruncation {
                radius,
                window_lo: lo,
                window_hi: hi,
                needed_lo: lo - 1,
                needed_hi: hi + 1,
            })
        }
    }
}

fn separation_radius(g: &Graph, distance: &[usize]) -> Result<usize> {
    let max_d = distance
        .iter()
        .copied()
        .filter(|&d| d != usize::MAX)
        .max()
        .unwrap_or(0);
    for k in 0..=max_d {
        check_window(g, distance, k)?;
        let removed: Vec<bool> = distance.iter().map(|&d| d <= k).collect();
        let (u, l) = end_components(g, &removed, k)?;
        if u != l {
            return Ok(k);
        }
    }
    let (lo, hi) = g.window();
    Err(Error::InsufficientTruncation {
        radius: max_d,
        window_lo: lo,
        window_hi: hi,
        needed_lo: lo - 1,
        needed_hi: hi + 1,
    })
}

/// The fixed end-separating cut `C` of the limit construction: `X` is the
/// upper boundary-reaching component of `g - B_{n0}`. Its crossing edges join
/// `B_{n0}` to `S_{n0+1}`.
pub fn separating_cut_mask(g: &Graph, view: &BallView) -> Result<Vec<bool>> {
    let removed: Vec<bool> = view.distance.iter().map(|&d| d <= view.n0).collect();
    let (upper, _) = end_components(g, &removed, view.n0)?;
    let label = g.components_without(&removed);
    Ok(label.iter().map(|&c| c == Some(upper)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specs;

    fn ladder_window(lo: i64, hi: i64) -> Graph {
        specs::ladder().expand(lo, hi, 0).unwrap()
    }

    #[test]
    fn ladder_expansion_counts() {
        let g = ladder_window(-3, 3);
        assert_eq!(g.vertex_count(), 14);
        for i in g.interior() {
            assert_eq!(g.degree(i), 3);
        }
        // boundary layers lose one neighbour each
        assert_eq!(g.interior().len(), 10);
    }

    #[test]
    fn path_expansion_is_a_path() {
        let g = specs::path().expand(-2, 2, 0).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
        assert!(g.is_connected());
    }

    #[test]
    fn rejects_self_loop_and_disconnected_specs() {
        let err = LayeredSpec::new(2, vec![(1, 1)], vec![(0, 0)]).unwrap_err();
        assert!(err.to_string().contains("[1,1]"), "{err}");
        // two interleaved copies of the path
        let err = LayeredSpec::new(2, vec![], vec![(0, 1), (1, 0)]).unwrap_err();
        assert!(err.to_string().contains("disconnected"), "{err}");
        let err = LayeredSpec::new(2, vec![(0, 1)], vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
        let err = LayeredSpec::new(3, vec![(0, 1), (1, 0)], vec![(0, 0)]).unwrap_err();
        assert!(err.to_string().contains("duplicated"), "{err}");
    }

    #[test]
    fn expand_checks_window_and_origin() {
        assert!(specs::ladder().expand(0, 3, 0).is_err());
        assert!(specs::ladder().expand(-1, 3, 2).is_err());
    }

    #[test]
    fn path_ball_view() {
        let g = specs::path().expand(-5, 5, 0).unwrap();
        let view = BallView::new(&g, 2).unwrap();
        assert_eq!(view.upper_layer, vec![Vertex::new(2, 0)]);
        assert_eq!(view.lower_layer, vec![Vertex::new(-2, 0)]);
        assert_eq!(view.n0, 0);
    }

    #[test]
    fn ladder_ball_view_radius_one_coincides_before_separation() {
        let g = ladder_window(-5, 5);
        let view = BallView::new(&g, 1).unwrap();
        let s1 = vec![Vertex::new(-1, 0), Vertex::new(0, 1), Vertex::new(1, 0)];
        assert_eq!(view.sphere, s1);
        assert_eq!(view.n0, 1);
        // B_0 does not separate, so both terminal layers are all of S_1.
        assert_eq!(view.upper_layer, s1);
        assert_eq!(view.lower_layer, s1);
    }

    #[test]
    fn ladder_ball_view_radius_two_is_split() {
        let g = ladder_window(-6, 6);
        let view = BallView::new(&g, 2).unwrap();
        assert_eq!(view.upper_layer, vec![Vertex::new(1, 1), Vertex::new(2, 0)]);
        assert_eq!(
            view.lower_layer,
            vec![Vertex::new(-2, 0), Vertex::new(-1, 1)]
        );
    }

    #[test]
    fn small_window_is_reported() {
        let g = ladder_window(-2, 2);
        match BallView::new(&g, 2) {
            Err(Error::InsufficientTruncation {
                needed_lo,
                needed_hi,
                ..
            }) => {
                assert!(needed_lo < -2 && needed_hi > 2);
            }
            other => panic!("expected insufficient truncation, got {other:?}"),
        }
    }

    #[test]
    fn gamma_terminal_layers_disjoint_at_six() {
        let g = specs::gamma().expand_around_ball(0, 7, 3).unwrap();
        let view = BallView::new(&g, 6).unwrap();
        assert_eq!(view.n0, 3);
        assert!(!view.upper_layer.is_empty() && !view.lower_layer.is_empty());
        let up: BTreeSet<_> = view.upper_layer.iter().collect();
        assert!(view.lower_layer.iter().all(|v| !up.contains(v)));
    }

    #[test]
    fn cut_sides_and_end_detection() {
        let g = Arc::new(ladder_window(-4, 4));
        let c = Cut::layer_cut(&g, 1);
        assert_eq!(c.crossing().len(), 2);
        let ends = Ends::window_boundary(&g);
        assert_eq!(c.end_side(&ends), Some(EndSide::Upper));
        assert_eq!(c.reversed().end_side(&ends), Some(EndSide::Lower));
        let bad = Cut::from_vertices(&[Vertex::new(0, 0)], &g).unwrap();
        assert_eq!(bad.end_side(&ends), None);
        assert!(Cut::from_vertices(&[Vertex::new(9, 0)], &g).is_err());
    }
}
