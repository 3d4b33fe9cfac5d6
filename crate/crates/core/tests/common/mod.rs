#![allow(dead_code)]

use std::collections::HashSet;

use num_rational::BigRational;
use rand::Rng;
use twoended::Graph;

/// Adjacency bitmask over the pairs `(i, j)`, `i < j < n`.
type Mask = u64;

fn bit(n: usize, i: usize, j: usize) -> u32 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    // pairs ordered (0,1),(0,2),..,(0,n-1),(1,2),..
    (a * (2 * n - a - 1) / 2 + (b - a - 1)) as u32
}

fn adjacency(n: usize, mask: Mask) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit(n, i, j) & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    adj
}

fn encode(n: usize, adj: &[Vec<bool>], perm: &[usize]) -> Mask {
    let mut m = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[perm[i]][perm[j]] {
                m |= 1 << bit(n, i, j);
            }
        }
    }
    m
}

/// Smallest encoding over relabellings that keep vertices sorted by
/// (degree, sorted neighbour degrees); isomorphic graphs share it.
fn canonical(n: usize, mask: Mask) -> Mask {
    let adj = adjacency(n, mask);
    let deg: Vec<usize> = adj
        .iter()
        .map(|r| r.iter().filter(|&&x| x).count())
        .collect();
    let key: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<usize> = (0..n).filter(|&w| adj[v][w]).map(|w| deg[w]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key[a].cmp(&key[b]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if key[c[0]] == key[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = Mask::MAX;
    let mut perm = Vec::with_capacity(n);
    permute_classes(&classes, 0, &mut vec![false; n], &mut perm, &mut |p| {
        best = best.min(encode(n, &adj, p));
    });
    best
}

fn permute_classes(
    classes: &[Vec<usize>],
    at: usize,
    used: &mut Vec<bool>,
    perm: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    // position `perm.len()` belongs to class `at`
    if at == classes.len() {
        visit(perm);
        return;
    }
    let filled: usize = classes[..at].iter().map(Vec::len).sum();
    if perm.len() == filled + classes[at].len() {
        permute_classes(classes, at + 1, used, perm, visit);
        return;
    }
    for &v in &classes[at] {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            permute_classes(classes, at, used, perm, visit);
            perm.pop();
            used[v] = false;
        }
    }
}

/// Connected graphs on `n` vertices up to isomorphism, as edge lists.
///
/// Every connected graph has a vertex whose removal keeps it connected, so
/// joining a new vertex to each non-empty subset of each smaller graph
/// reaches every isomorphism class.
pub fn connected_graphs(max_n: usize) -> Vec<Vec<Vec<(usize, usize)>>> {
    let mut by_size: Vec<Vec<Mask>> = vec![vec![], vec![0]];
    for n in 2..=max_n {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &small in &by_size[n - 1] {
            let adj = adjacency(n - 1, small);
            for subset in 1u32..(1 << (n - 1)) {
                let mut m: Mask = 0;
                for i in 0..n - 1 {
                    for j in i + 1..n - 1 {
                        if adj[i][j] {
                            m |= 1 << bit(n, i, j);
                        }
                    }
                    if subset >> i & 1 == 1 {
                        m |= 1 << bit(n, i, n - 1);
                    }
                }
                let c = canonical(n, m);
                if seen.insert(c) {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        by_size.push(out);
    }
    by_size
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, masks)| {
            masks
                .iter()
                .map(|&m| {
                    let adj = adjacency(n, m);
                    let mut edges = Vec::new();
                    for i in 0..n {
                        for j in i + 1..n {
                            if adj[i][j] {
                                edges.push((i, j));
                            }
                        }
                    }
                    edges
                })
                .collect()
        })
        .collect()
}

/// A random connected graph: a random tree plus extra random edges.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: usize) -> Graph {
    let mut edges = HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Graph::from_simple_edges(n, &edges).expect("simple connected graph")
}

pub fn random_rational(rng: &mut impl Rng) -> BigRational {
    BigRational::new(
        rng.gen_range(-50i64..=50).into(),
        rng.gen_range(1i64..=12).into(),
    )
}
