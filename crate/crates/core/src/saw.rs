//! Exact self-avoiding walk counts and growth-rate checks against the golden mean.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::thread;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredSpec, Vertex};
use crate::report::{Report, Verdict};

pub const GOLDEN_MEAN: f64 = 1.618_033_988_749_895;

/// `c_1..c_N` for walks starting at `origin`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SawCounts {
    pub origin: Vertex,
    pub max_len: usize,
    /// `counts[n - 1] = c_n`.
    pub counts: Vec<BigUint>,
    pub window_radius: usize,
}

impl SawCounts {
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(1).and_then(|i| self.counts.get(i))
    }

    /// `c_{m+n} <= c_m * c_n` for every computed pair.
    pub fn is_submultiplicative(&self) -> bool {
        (1..=self.max_len).all(|m| {
            (1..=self.max_len - m)
                .all(|n| self.get(m + n).unwrap() <= &(self.get(m).unwrap() * self.get(n).unwrap()))
        })
    }

    /// CSV with header `n,c_n,c_n^(1/n),ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_n,c_n^(1/n),ratio\n");
        for e in mu_estimates(self) {
            let ratio = e.ratio.map_or(String::new(), |r| format!("{r:.15}"));
            writeln!(
                out,
                "{},{},{:.15},{ratio}",
                e.n,
                self.get(e.n).unwrap(),
                e.root
            )
            .unwrap();
        }
        out
    }
}

/// Exhaustive enumeration on the window of layers within `window_radius`
/// of the origin, parallel over first steps.
pub fn count_saws(
    spec: &LayeredSpec,
    origin: Vertex,
    max_len: usize,
    window_radius: usize,
) -> Result<SawCounts> {
    spec.validate()?;
    if !spec.contains(origin) {
        return Err(Error::NotInCarrier(origin));
    }
    if window_radius < max_len + 1 {
        let r = max_len as i64 + 1;
        return Err(Error::InsufficientTruncation {
            radius: max_len,
            window_lo: origin.layer - window_radius as i64,
            window_hi: origin.layer + window_radius as i64,
            needed_lo: origin.layer - r,
            needed_hi: origin.layer + r,
        });
    }
    // layers are translation invariant, so count around layer 0
    let r = window_radius as i64;
    let g = spec.expand(-r, r, origin.pos)?;
    let start = g.origin();
    let first_steps: Vec<usize> = g.neighbours(start).collect();
    let per_branch: Vec<Vec<u128>> = thread::scope(|scope| {
        let handles: Vec<_> = first_steps
            .iter()
            .map(|&first| {
                let g = &g;
                scope.spawn(move || count_from(g, start, first, max_len))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration thread"))
            .collect()
    });
    let mut counts = vec![BigUint::zero(); max_len];
    for branch in per_branch {
        for (total, c) in counts.iter_mut().zip(branch) {
            *total += BigUint::from(c);
        }
    }
    Ok(SawCounts {
        origin,
        max_len,
        counts,
        window_radius,
    })
}

/// Counts walks `start, first, ...` by length with an explicit stack.
fn count_from(g: &Graph, start: usize, first: usize, max_len: usize) -> Vec<u128> {
    let mut counts = vec![0u128; max_len];
    if max_len == 0 {
        return counts;
    }
    let mut on_path = vec![false; g.vertex_count()];
    on_path[start] = true;
    on_path[first] = true;
    counts[0] = 1;
    // each frame: vertex and the index of the next neighbour to try
    let mut stack: Vec<(usize, usize)> = vec![(first, 0)];
    while let Some(&(v, next)) = stack.last() {
        let depth = stack.len();
        let adjacent = g.adjacent(v);
        if depth == max_len || next >= adjacent.len() {
            on_path[v] = false;
            stack.pop();
            continue;
        }
        stack[depth - 1].1 += 1;
        let w = adjacent[next].0;
        if !on_path[w] {
            on_path[w] = true;
            counts[depth] += 1;
            stack.push((w, 0));
        }
    }
    counts
}

/// Independent recursive enumeration on the spec's implicit neighbours.
pub fn count_saws_recursive(spec: &LayeredSpec, origin: Vertex, max_len: usize) -> Vec<BigUint> {
    fn walk(
        spec: &LayeredSpec,
        at: Vertex,
        depth: usize,
        visited: &mut HashSet<Vertex>,
        counts: &mut [BigUint],
    ) {
        if depth == counts.len() {
            return;
        }
        for w in spec.neighbours(at) {
            if visited.insert(w) {
                counts[depth] += 1u32;
                walk(spec, w, depth + 1, visited, counts);
                visited.remove(&w);
            }
        }
    }
    let mut counts = vec![BigUint::zero(); max_len];
    let mut visited = HashSet::from([origin]);
    walk(spec, origin, 0, &mut visited, &mut counts);
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuEstimate {
    pub n: usize,
    /// `c_n^(1/n)`.
    pub root: f64,
    /// `c_{n+1} / c_n`, when `c_{n+1}` is known.
    pub ratio: Option<f64>,
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

pub fn mu_estimates(counts: &SawCounts) -> Vec<MuEstimate> {
    (1..=counts.max_len)
        .map(|n| {
            let c = big_to_f64(counts.get(n).unwrap());
            MuEstimate {
                n,
                root: c.powf(1.0 / n as f64),
                ratio: counts.get(n + 1).map(|next| big_to_f64(next) / c),
            }
        })
        .collect()
}

/// `(F_n, L_n)`: Fibonacci and Lucas numbers, so that `phi^n = (L_n + F_n sqrt 5) / 2`.
fn fibonacci_lucas(n: usize) -> (BigInt, BigInt) {
    let (mut f0, mut f1) = (BigInt::from(0), BigInt::from(1));
    for _ in 0..n {
        let f2 = &f0 + &f1;
        f0 = std::mem::replace(&mut f1, f2);
    }
    // L_n = F_{n-1} + F_{n+1} = 2 F_{n+1} - F_n
    let lucas = BigInt::from(2) * &f1 - &f0;
    (f0, lucas)
}

/// Exact test of `c >= phi^n`.
pub fn at_least_golden_power(c: &BigUint, n: usize) -> bool {
    let (fib, lucas) = fibonacci_lucas(n);
    let lhs = BigInt::from(2) * BigInt::from(c.clone()) - lucas;
    lhs >= BigInt::from(0) && &lhs * &lhs >= BigInt::from(5) * &fib * &fib
}

/// Finite-length evidence for `mu >= phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenReport {
    /// `(n, c_n^(1/n), c_n >= phi^n)` for `n >= 2`.
    pub rows: Vec<(usize, f64, bool)>,
    pub submultiplicative: bool,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.2)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("phi", format!("{GOLDEN_MEAN:.15}"));
        for (n, root, ok) in &self.rows {
            r.push(
                format!("n.{n}"),
                format!("root={root:.15} at_least_phi={ok}"),
            );
        }
        r.push("submultiplicative", self.submultiplicative)
            .push("verdict", Verdict::from_bool(self.passed()));
        r
    }
}

/// Checks `c_n^(1/n) >= phi` exactly for every `2 <= n <= N`.
///
/// Passing is consistent with `mu >= phi`; finite counts prove nothing about the limit.
pub fn golden_check(counts: &SawCounts) -> GoldenReport {
    let rows = (2..=counts.max_len)
        .map(|n| {
            let c = counts.get(n).unwrap();
            (
                n,
                big_to_f64(c).powf(1.0 / n as f64),
                at_least_golden_power(c, n),
            )
        })
        .collect();
    GoldenReport {
        rows,
        submultiplicative: counts.is_submultiplicative(),
    }
}
