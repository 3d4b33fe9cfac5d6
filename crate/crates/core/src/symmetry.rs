//! The cubic non-Cayley graph on `Z x Z/10` and its automorphisms.
//!
//! Every automorphism generated by `sigma`, `tau`, `sigma~`, `tau~` acts on
//! coordinates piecewise-affinely, with the branch chosen by `n mod 4`:
//!
//! ```text
//! (n, k) -> (e * n + c,  s[n mod 4] * k + d[n mod 4]  mod 10)
//! ```
//!
//! [`CoordinateMap`] stores exactly these tables. Composition and inversion
//! stay inside the family, so words in the generators evaluate exactly on the
//! whole infinite graph and equal maps compare equal.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::electric::VertexField;
use crate::error::{Error, Result};
use crate::graph::{Graph, LayeredSpec, Vertex};
use crate::numeric::Scalar;
use crate::report::{Report, Verdict};
use crate::specs;

/// Vertices per layer.
pub const LAYER_SIZE: i64 = 10;

pub fn gamma_spec() -> LayeredSpec {
    specs::gamma()
}

/// A piecewise-affine bijection of `Z x Z/10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordinateMap {
    layer_sign: i64,
    layer_shift: i64,
    pos_sign: [i64; 4],
    pos_shift: [i64; 4],
}

impl CoordinateMap {
    /// `pos_rules[r] = (s, d)` acts on layers `n ≡ r (mod 4)`.
    pub fn new(layer_sign: i64, layer_shift: i64, pos_rules: [(i64, i64); 4]) -> Result<Self> {
        if layer_sign.abs() != 1 || pos_rules.iter().any(|&(s, _)| s.abs() != 1) {
            return Err(Error::InvalidArgument(
                "coordinate map signs must be ±1".into(),
            ));
        }
        Ok(CoordinateMap {
            layer_sign,
            layer_shift,
            pos_sign: pos_rules.map(|(s, _)| s),
            pos_shift: pos_rules.map(|(_, d)| d.rem_euclid(LAYER_SIZE)),
        })
    }

    fn table(layer_sign: i64, layer_shift: i64, pos_rules: [(i64, i64); 4]) -> Self {
        Self::new(layer_sign, layer_shift, pos_rules).expect("generator table")
    }

    pub fn identity() -> Self {
        Self::table(1, 0, [(1, 0); 4])
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        let r = v.layer.rem_euclid(4) as usize;
        let k = self.pos_sign[r] * i64::from(v.pos) + self.pos_shift[r];
        Vertex::new(
            self.layer_sign * v.layer + self.layer_shift,
            k.rem_euclid(LAYER_SIZE) as u32,
        )
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &CoordinateMap) -> CoordinateMap {
        let mut pos_sign = [0; 4];
        let mut pos_shift = [0; 4];
        for r in 0..4 {
            let image = (inner.layer_sign * r as i64 + inner.layer_shift).rem_euclid(4) as usize;
            pos_sign[r] = self.pos_sign[image] * inner.pos_sign[r];
            pos_shift[r] = (self.pos_sign[image] * inner.pos_shift[r] + self.pos_shift[image])
                .rem_euclid(LAYER_SIZE);
        }
        CoordinateMap {
            layer_sign: self.layer_sign * inner.layer_sign,
            layer_shift: self.layer_sign * inner.layer_shift + self.layer_shift,
            pos_sign,
            pos_shift,
        }
    }

    pub fn inverse(&self) -> CoordinateMap {
        let mut pos_sign = [0; 4];
        let mut pos_shift = [0; 4];
        for image in 0..4 {
            let r = (self.layer_sign * (image as i64 - self.layer_shift)).rem_euclid(4) as usize;
            pos_sign[image] = self.pos_sign[r];
            pos_shift[image] = (-self.pos_sign[r] * self.pos_shift[r]).rem_euclid(LAYER_SIZE);
        }
        CoordinateMap {
            layer_sign: self.layer_sign,
            layer_shift: -self.layer_sign * self.layer_shift,
            pos_sign,
            pos_shift,
        }
    }

    pub fn power(&self, e: i64) -> CoordinateMap {
        let base = if e < 0 { self.inverse() } else { *self };
        (0..e.unsigned_abs()).fold(Self::identity(), |acc, _| acc.compose(&base))
    }

    /// Image layer of layer `n`.
    pub fn layer_image(&self, n: i64) -> i64 {
        self.layer_sign * n + self.layer_shift
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// The four named automorphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Sigma,
    Tau,
    SigmaTilde,
    TauTilde,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::Sigma,
        Generator::Tau,
        Generator::SigmaTilde,
        Generator::TauTilde,
    ];

    pub fn map(self) -> CoordinateMap {
        match self {
            Generator::Sigma => CoordinateMap::table(1, 1, [(1, 0); 4]),
            Generator::Tau => CoordinateMap::table(-1, 0, [(1, 1), (-1, 3), (1, 9), (-1, 7)]),
            Generator::SigmaTilde => {
                CoordinateMap::table(1, 1, [(-1, 2), (-1, 4), (-1, 8), (-1, 6)])
            }
            Generator::TauTilde => CoordinateMap::table(-1, 0, [(-1, 3), (1, -1), (-1, 7), (1, 1)]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Sigma => "sigma",
            Generator::Tau => "tau",
            Generator::SigmaTilde => "sigma~",
            Generator::TauTilde => "tau~",
        }
    }
}

/// `generator^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub power: i64,
}

/// A product of generator powers, written left to right and applied right to left.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, merging adjacent powers and dropping zero powers.
    pub fn from_letters(letters: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for (generator, power) in letters {
            match out.last_mut() {
                Some(last) if last.generator == generator => last.power += power,
                _ => out.push(Letter { generator, power }),
            }
            if out.last().is_some_and(|l| l.power == 0) {
                out.pop();
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Total number of generator applications.
    pub fn length(&self) -> u64 {
        self.0.iter().map(|l| l.power.unsigned_abs()).sum()
    }

    /// `self * other`: `other` acts first.
    pub fn then_after(&self, other: &Word) -> Word {
        Word::from_letters(
            self.0
                .iter()
                .chain(&other.0)
                .map(|l| (l.generator, l.power)),
        )
    }

    pub fn to_map(&self) -> CoordinateMap {
        self.0.iter().fold(CoordinateMap::identity(), |acc, l| {
            acc.compose(&l.generator.map().power(l.power))
        })
    }

    /// Evaluates one generator step at a time, rightmost first.
    pub fn apply(&self, v: Vertex) -> Vertex {
        let mut v = v;
        for l in self.0.iter().rev() {
            let step = if l.power < 0 {
                l.generator.map().inverse()
            } else {
                l.generator.map()
            };
            for _ in 0..l.power.unsigned_abs() {
                v = step.apply(v);
            }
        }
        v
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| match l.power {
                1 => l.generator.name().to_string(),
                p => format!("{}^{p}", l.generator.name()),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `"tau^-3 sigma tau sigma"`; `"id"` is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in s.split_whitespace().filter(|t| *t != "id") {
            let (name, power) = match token.split_once('^') {
                Some((name, p)) => (
                    name,
                    p.parse::<i64>()
                        .map_err(|e| Error::Parse(format!("bad exponent in `{token}`: {e}")))?,
                ),
                None => (token, 1),
            };
            let generator = Generator::ALL
                .into_iter()
                .find(|g| g.name() == name)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))?;
            letters.push((generator, power));
        }
        Ok(Word::from_letters(letters))
    }
}

fn window_vertices(radius: i64) -> impl Iterator<Item = Vertex> {
    (-radius..=radius).flat_map(|n| (0..LAYER_SIZE as u32).map(move |k| Vertex::new(n, k)))
}

/// Whether `map` and its inverse send every edge with both ends in layers
/// `[-radius, radius]` to an edge, judged by the spec rule.
pub fn check_automorphism(map: &CoordinateMap, radius: i64) -> bool {
    let spec = gamma_spec();
    let inverse = map.inverse();
    let mut images = HashSet::new();
    for v in window_vertices(radius) {
        if inverse.apply(map.apply(v)) != v || !images.insert(map.apply(v)) {
            return false;
        }
        for w in spec.neighbours(v) {
            if w.layer.abs() > radius {
                continue;
            }
            if !spec.is_edge(map.apply(v), map.apply(w))
                || !spec.is_edge(inverse.apply(v), inverse.apply(w))
            {
                return false;
            }
        }
    }
    true
}

/// `sigma^{n'} tau^{k'-k} sigma^{-n}`, checked by evaluation.
pub fn transitivity_witness(u: Vertex, v: Vertex) -> Result<Word> {
    let shift = (i64::from(v.pos) - i64::from(u.pos)).rem_euclid(LAYER_SIZE);
    let word = Word::from_letters([
        (Generator::Sigma, v.layer),
        (Generator::Tau, shift),
        (Generator::Sigma, -u.layer),
    ]);
    if word.apply(u) != v || word.to_map().apply(u) != v {
        return Err(Error::Verification(format!(
            "{word} does not map {u} to {v}"
        )));
    }
    Ok(word)
}

/// Outcome of one mechanical claim check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub id: String,
    pub verdict: Verdict,
    pub witnesses: Vec<(String, String)>,
}

impl ClaimReport {
    fn new(id: &str) -> Self {
        ClaimReport {
            id: id.to_string(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
        }
    }

    fn witness(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.witnesses.push((key.into(), value.to_string()));
        self
    }

    /// Records a check; any failed check fails the claim.
    fn check(&mut self, key: impl Into<String>, ok: bool) -> &mut Self {
        if !ok {
            self.verdict = Verdict::Fail;
        }
        self.witness(key, Verdict::from_bool(ok))
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        for (k, v) in &self.witnesses {
            r.push(format!("{}.{k}", self.id), v);
        }
        r.push(format!("{}.verdict", self.id), self.verdict);
        r
    }
}

fn word(text: &str) -> Word {
    text.parse().expect("built-in word")
}

fn layer0(k: i64) -> Vertex {
    Vertex::new(0, k.rem_euclid(LAYER_SIZE) as u32)
}

/// Transitivity: generators preserve edges and random pairs are joined by witnesses.
pub fn claim_transitivity(pairs: usize, seed: u64) -> ClaimReport {
    let mut report = ClaimReport::new("claim1");
    for g in [Generator::Sigma, Generator::Tau] {
        report.check(
            format!("{}_preserves_edges", g.name()),
            check_automorphism(&g.map(), 12),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verified = 0;
    for _ in 0..pairs {
        let mut pick = || Vertex::new(rng.gen_range(-50..=50), rng.gen_range(0..LAYER_SIZE as u32));
        let (u, v) = (pick(), pick());
        match transitivity_witness(u, v) {
            Ok(_) => verified += 1,
            Err(_) => {
                report.check(format!("witness_{u}_to_{v}"), false);
            }
        }
    }
    let example = transitivity_witness(Vertex::new(2, 3), Vertex::new(-1, 7));
    report
        .witness("seed", seed)
        .check("random_pairs", verified == pairs)
        .witness("random_pairs_verified", format!("{verified}/{pairs}"))
        .check("example_2,3_to_-1,7", example.is_ok());
    if let Ok(w) = example {
        report.witness("example_word", w);
    }
    report
}

/// Non-freeness: `tau^-3 sigma tau sigma` fixes `(0,0)` but is not the identity.
pub fn claim_nonfree() -> ClaimReport {
    let mut report = ClaimReport::new("claim2");
    let w = word("tau^-3 sigma tau sigma");
    report
        .witness("word", &w)
        .check("fixes_0,0", w.apply(layer0(0)) == layer0(0))
        .check("maps_0,1_to_0,9", w.apply(layer0(1)) == layer0(9))
        .check(
            "acts_as_k_to_-k_on_layer_0",
            (0..LAYER_SIZE).all(|k| w.apply(layer0(k)) == layer0(-k)),
        )
        .check("not_identity", !w.to_map().is_identity());
    report
}

/// Distinct group elements reachable by words of length at most `max_len`,
/// each with one shortest word.
pub fn enumerate_elements(max_len: u64) -> HashMap<CoordinateMap, Word> {
    let mut seen: HashMap<CoordinateMap, Word> = HashMap::new();
    seen.insert(CoordinateMap::identity(), Word::identity());
    let mut frontier = VecDeque::from([(CoordinateMap::identity(), Word::identity())]);
    while let Some((map, w)) = frontier.pop_front() {
        if w.length() >= max_len {
            continue;
        }
        for g in Generator::ALL {
            for power in [1, -1] {
                let step = Word::from_letters([(g, power)]);
                let next = step.to_map().compose(&map);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(next) {
                    let next_word = step.then_after(&w);
                    slot.insert(next_word.clone());
                    frontier.push_back((next, next_word));
                }
            }
        }
    }
    seen
}

/// Sorted element list, for deterministic iteration.
fn sorted_elements(max_len: u64) -> Vec<(CoordinateMap, Word)> {
    let mut out: Vec<_> = enumerate_elements(max_len).into_iter().collect();
    out.sort_by_key(|(m, w)| (w.length(), w.to_string(), format!("{m:?}")));
    out
}

/// All 10-cycles of `g`, as sorted vertex lists.
pub fn ten_cycles(g: &Graph) -> Vec<Vec<usize>> {
    fn extend(g: &Graph, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let start = path[0];
        let last = *path.last().unwrap();
        for w in g.neighbours(last) {
            if path.len() == 10 {
                // close the cycle once, in the orientation with path[1] < path[9]
                if w == start && path[1] < path[9] {
                    let mut cycle = path.clone();
                    cycle.sort_unstable();
                    out.push(cycle);
                }
                continue;
            }
            if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                extend(g, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; g.vertex_count()];
    for s in 0..g.vertex_count() {
        on_path[s] = true;
        extend(g, &mut vec![s], &mut on_path, &mut out);
        on_path[s] = false;
    }
    out.sort();
    out
}

/// Whether removing `removed` leaves the top and bottom layers of `g` in different components.
fn separates_boundaries(g: &Graph, removed: &[Vertex]) -> bool {
    let mut mask = vec![false; g.vertex_count()];
    for &v in removed {
        if let Some(i) = g.index_of(v) {
            mask[i] = true;
        }
    }
    let comp = g.components_without(&mask);
    let (bottom, top) = g.boundary_layers();
    let top_ids: HashSet<usize> = top.iter().filter_map(|&i| comp[i]).collect();
    bottom
        .iter()
        .filter_map(|&i| comp[i])
        .all(|c| !top_ids.contains(&c))
}

/// Partition preservation: every enumerated element maps layers onto layers,
/// and only the layer cycles among all 10-cycles in layers `[-2, 2]` separate.
pub fn claim_layer_preservation(max_len: u64, radius: i64) -> ClaimReport {
    let mut report = ClaimReport::new("claim3_4");
    report
        .witness("max_word_length", max_len)
        .witness("radius", radius)
        .check("radius_covers_words", radius >= max_len as i64 + 2);
    let elements = sorted_elements(max_len);
    let mut layer_failures = 0usize;
    let mut edge_failures = 0usize;
    for (map, _) in &elements {
        for n in -radius..=radius {
            let images: HashSet<i64> = (0..LAYER_SIZE)
                .map(|k| map.apply(Vertex::new(n, k as u32)).layer)
                .collect();
            if images.len() != 1 || !images.contains(&map.layer_image(n)) {
                layer_failures += 1;
            }
        }
        if !check_automorphism(map, radius) {
            edge_failures += 1;
        }
    }
    report
        .witness("elements", elements.len())
        .check("layers_map_to_layers", layer_failures == 0)
        .check("elements_preserve_edges", edge_failures == 0)
        .check(
            "sigma_maps_L0_to_L1",
            Generator::Sigma.map().layer_image(0) == 1,
        )
        .check(
            "tau_maps_L1_to_L-1",
            Generator::Tau.map().layer_image(1) == -1,
        );

    let spec = gamma_spec();
    let small = spec.expand(-2, 2, 0).expect("gamma window");
    let large = spec.expand(-8, 8, 0).expect("gamma window");
    let cycles = ten_cycles(&small);
    let mut separating = Vec::new();
    for c in &cycles {
        let verts: Vec<Vertex> = c.iter().map(|&i| small.vertex(i)).collect();
        if separates_boundaries(&large, &verts) {
            separating.push(verts);
        }
    }
    let only_layers = separating.len() == 5
        && separating
            .iter()
            .all(|c| c.iter().all(|v| v.layer == c[0].layer));
    report
        .witness("ten_cycles", cycles.len())
        .witness("separating_ten_cycles", separating.len())
        .check("only_layers_separate", only_layers);
    report
}

/// Unique determination by the images of `(0,1)` and `(0,2)`, on enumerated
/// elements, plus the order-2 stabiliser of `(0,0)`.
pub fn claim_unique_determination(max_len: u64, radius: i64) -> ClaimReport {
    let mut report = ClaimReport::new("claim5");
    let elements = sorted_elements(max_len);
    let mut by_key: HashMap<(Vertex, Vertex), Vec<Vertex>> = HashMap::new();
    let mut conflicts = 0usize;
    for (map, _) in &elements {
        let key = (map.apply(layer0(1)), map.apply(layer0(2)));
        let action: Vec<Vertex> = window_vertices(radius).map(|v| map.apply(v)).collect();
        match by_key.get(&key) {
            Some(existing) if *existing != action => conflicts += 1,
            Some(_) => {}
            None => {
                by_key.insert(key, action);
            }
        }
    }
    report
        .witness("elements", elements.len())
        .witness("distinct_keys", by_key.len())
        .check("determined_by_two_images", conflicts == 0);

    let flip = word("tau^-3 sigma tau sigma").to_map();
    let stabiliser: Vec<&(CoordinateMap, Word)> = elements
        .iter()
        .filter(|(m, w)| w.length() <= 6 && m.apply(layer0(0)) == layer0(0))
        .collect();
    let stabiliser_ok = stabiliser.iter().all(|(m, _)| {
        let on_layer0 = (0..LAYER_SIZE).map(|k| m.apply(layer0(k)));
        let identity = on_layer0.clone().zip(0..).all(|(v, k)| v == layer0(k));
        let negation = on_layer0.zip(0..).all(|(v, k)| v == layer0(-k));
        (identity || negation) && (m.is_identity() || *m == flip)
    });
    let distinct: HashSet<CoordinateMap> = stabiliser.iter().map(|(m, _)| *m).collect();
    report.witness("stabiliser_elements", distinct.len()).check(
        "stabiliser_is_identity_or_flip",
        stabiliser_ok && distinct.len() == 2,
    );
    report
}

/// The four words showing no transitive subgroup acts freely.
pub fn non_regularity_words() -> [(&'static str, i64, i64); 4] {
    // (word, c, fixed k) with word(0,k) = (0, c - k)
    [
        ("tau^-3 sigma tau sigma", 0, 0),
        ("tau sigma~ tau sigma~", 6, 3),
        ("tau~ sigma tau~ sigma", 4, 2),
        ("tau~ sigma~ tau~ sigma~", -2, 9),
    ]
}

/// Non-Cayley evidence: each candidate pair yields a non-trivial element
/// with a fixed point.
pub fn claim_not_cayley() -> ClaimReport {
    let mut report = ClaimReport::new("claim6");
    report
        .check(
            "tau~_equals_sigma_tau_sigma",
            Generator::TauTilde.map() == word("sigma tau sigma").to_map(),
        )
        .check(
            "sigma~_equals_sigma_tau^-1_sigma_tau_sigma",
            Generator::SigmaTilde.map() == word("sigma tau^-1 sigma tau sigma").to_map(),
        );
    for g in Generator::ALL {
        report.check(
            format!("{}_preserves_edges", g.name()),
            check_automorphism(&g.map(), 12),
        );
    }
    for (i, (text, c, fixed)) in non_regularity_words().into_iter().enumerate() {
        let w = word(text);
        let closed_form = (0..LAYER_SIZE).all(|k| w.apply(layer0(k)) == layer0(c - k));
        let fixes = w.apply(layer0(fixed)) == layer0(fixed);
        let moves = (0..LAYER_SIZE).any(|k| w.apply(layer0(k)) != layer0(k));
        report
            .witness(format!("word{i}"), &w)
            .witness(
                format!("word{i}.closed_form"),
                format!("(0,k) -> (0,{c}-k)"),
            )
            .check(format!("word{i}.closed_form_all_k"), closed_form)
            .check(format!("word{i}.fixes_0,{fixed}"), fixes)
            .check(format!("word{i}.moves_some_vertex"), moves);
    }
    report
}

pub const RELATORS: [&str; 4] = [
    "tau^10",
    "tau^-1 sigma tau sigma tau^-1 sigma tau sigma",
    "sigma^-1 tau^2 sigma tau^-4",
    "sigma^-2 tau sigma^-2 tau",
];

/// Each relator acts as the identity on layers `[-radius, radius]`.
pub fn relations_check(radius: i64) -> ClaimReport {
    let mut report = ClaimReport::new("relators");
    report
        .witness("radius", radius)
        .check("radius_at_least_8", radius >= 8);
    for (i, text) in RELATORS.into_iter().enumerate() {
        let w = word(text);
        let fixes_window = window_vertices(radius).all(|v| w.apply(v) == v);
        report
            .witness(format!("relator{i}"), &w)
            .check(format!("relator{i}.identity_on_window"), fixes_window)
            .check(format!("relator{i}.identity_map"), w.to_map().is_identity());
    }
    let corrupted = word("tau^9");
    report.check(
        "tau^9_is_not_identity",
        window_vertices(radius).any(|v| corrupted.apply(v) != v),
    );
    report
}

/// `g ∘ z = sign * g + shift` on the part of the carrier that `z` maps into it.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewFit<T> {
    pub sign: i64,
    pub shift: T,
    pub residual: T,
    pub sample_size: usize,
}

pub fn skew_invariance<T: Scalar>(
    g: &VertexField<T>,
    z: &CoordinateMap,
    tol: f64,
) -> Result<SkewFit<T>> {
    let pairs: Vec<(&T, &T)> = g
        .carrier()
        .vertices()
        .iter()
        .zip(g.values())
        .filter_map(|(&v, val)| g.get(z.apply(v)).map(|image| (val, image)))
        .collect();
    let Some(&(g0, gz0)) = pairs.first() else {
        return Err(Error::InvalidArgument(
            "no carrier vertex has its image inside the carrier".into(),
        ));
    };
    let fit = |sign: i64| {
        let s = T::from_i64(sign);
        let shift = gz0.clone() - s.clone() * g0.clone();
        let residual = pairs.iter().fold(T::zero(), |worst, &(x, zx)| {
            let r = (zx.clone() - s.clone() * x.clone() - shift.clone()).abs();
            if r > worst {
                r
            } else {
                worst
            }
        });
        SkewFit {
            sign,
            shift,
            residual,
            sample_size: pairs.len(),
        }
    };
    let (plus, minus) = (fit(1), fit(-1));
    let best = if minus.residual < plus.residual {
        minus
    } else {
        plus
    };
    if best.residual > T::from_f64(tol) {
        return Err(Error::SkewMismatch(best.residual.to_f64()));
    }
    Ok(best)
}

/// Two edges at `o` with different `|∂g|`.
pub fn odd_degree_witness<T: Scalar>(
    g: &VertexField<T>,
    o: Vertex,
) -> Result<((Vertex, Vertex), (Vertex, Vertex))> {
    let carrier = g.carrier();
    let i = carrier.require(o)?;
    if !carrier.is_interior(i) {
        return Err(Error::TruncatedDegree(o));
    }
    if carrier.degree(i).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "{o} has even degree {}",
            carrier.degree(i)
        )));
    }
    let diffs: Vec<(Vertex, T)> = carrier
        .neighbours(i)
        .map(|j| (carrier.vertex(j), g.value(j).clone() - g.value(i).clone()))
        .collect();
    let total = diffs.iter().fold(T::zero(), |acc, (_, d)| acc + d.clone());
    if !total.is_negligible(&T::tolerance()) {
        return Err(Error::NotSourceless(total.to_f64()));
    }
    for (a, (u, du)) in diffs.iter().enumerate() {
        for (v, dv) in &diffs[a + 1..] {
            if !(du.abs() - dv.abs()).is_negligible(&T::tolerance()) {
                return Ok(((o, *u), (o, *v)));
            }
        }
    }
    Err(Error::Verification(format!(
        "all edge gradients at {o} have equal size"
    )))
}

/// Every claim check in order.
pub fn check_all(seed: u64) -> Vec<ClaimReport> {
    vec![
        claim_transitivity(100, seed),
        claim_nonfree(),
        claim_layer_preservation(8, 12),
        claim_unique_determination(8, 12),
        claim_not_cayley(),
        relations_check(12),
        skew_closed_form_report(),
    ]
}

/// The closed form `3n + (k mod 2)` against all four generators, exactly.
pub fn skew_closed_form_report() -> ClaimReport {
    use num_rational::BigRational;
    let mut report = ClaimReport::new("skew");
    let window = std::sync::Arc::new(gamma_spec().expand(-6, 6, 0).expect("gamma window"));
    let g = VertexField::from_fn(&window, |v| {
        <BigRational as Scalar>::from_i64(3 * v.layer + i64::from(v.pos % 2))
    });
    let expected = [(1, 3), (-1, 1), (1, 3), (-1, 1)];
    for (gen, (sign, shift)) in Generator::ALL.into_iter().zip(expected) {
        match skew_invariance(&g, &gen.map(), 0.0) {
            Ok(fit) => {
                report
                    .witness(
                        format!("{}.fit", gen.name()),
                        format!("({:+}, {})", fit.sign, fit.shift),
                    )
                    .check(
                        format!("{}.matches", gen.name()),
                        fit.sign == sign && fit.shift == <BigRational as Scalar>::from_i64(shift),
                    );
            }
            Err(e) => {
                report.witness(format!("{}.error", gen.name()), e);
                report.check(format!("{}.matches", gen.name()), false);
            }
        }
    }
    report
}

/// Claim checks selectable by name: `all`, `claim1`..`claim6`, `relators`, `skew`.
pub fn check_by_name(name: &str, seed: u64) -> Result<Vec<ClaimReport>> {
    Ok(match name {
        "all" => check_all(seed),
        "claim1" => vec![claim_transitivity(100, seed)],
        "claim2" => vec![claim_nonfree()],
        "claim3" | "claim4" => vec![claim_layer_preservation(8, 12)],
        "claim5" => vec![claim_unique_determination(8, 12)],
        "claim6" => vec![claim_not_cayley()],
        "relators" => vec![relations_check(12)],
        "skew" => vec![skew_closed_form_report()],
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown check `{other}`; expected all, claim1..claim6, relators or skew"
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn v(n: i64, k: u32) -> Vertex {
        Vertex::new(n, k)
    }

    #[test]
    fn gamma_neighbourhood() {
        let spec = gamma_spec();
        assert_eq!(spec.neighbours(v(0, 0)), vec![v(-1, 5), v(0, 1), v(0, 9)]);
        assert!((0..10).all(|k| spec.degree(k) == 3));
    }

    #[test]
    fn generator_values() {
        assert_eq!(Generator::Sigma.map().apply(v(0, 5)), v(1, 5));
        for k in 0..10u32 {
            assert_eq!(Generator::Tau.map().apply(v(1, k)), v(-1, (13 - k) % 10));
        }
        assert_eq!(Generator::Tau.map().apply(v(0, 9)), v(0, 0));
        let w = word("tau^-3 sigma tau sigma");
        for k in 0..10 {
            assert_eq!(w.apply(layer0(k)), layer0(-k));
        }
    }

    #[test]
    fn composition_and_inverse_agree_with_stepwise_evaluation() {
        let w = word("tau^-3 sigma~ tau sigma^2 tau~^-1");
        let map = w.to_map();
        for v in window_vertices(9) {
            assert_eq!(map.apply(v), w.apply(v));
            assert_eq!(map.inverse().apply(map.apply(v)), v);
        }
        assert!(map.compose(&map.inverse()).is_identity());
    }

    #[test]
    fn automorphism_checks() {
        for g in Generator::ALL {
            assert!(check_automorphism(&g.map(), 6), "{}", g.name());
        }
        let rotate = CoordinateMap::new(1, 0, [(1, 1); 4]).unwrap();
        assert!(!check_automorphism(&rotate, 2));
        assert!(!gamma_spec().is_edge(rotate.apply(v(0, 1)), rotate.apply(v(1, 2))));
    }

    #[test]
    fn witnesses() {
        assert_eq!(
            transitivity_witness(v(0, 0), v(0, 0)).unwrap(),
            Word::identity()
        );
        let w = transitivity_witness(v(2, 3), v(-1, 7)).unwrap();
        assert_eq!(w.to_string(), "sigma^-1 tau^4 sigma^-2");
        assert_eq!(
            transitivity_witness(v(0, 4), v(0, 5)).unwrap().to_string(),
            "tau"
        );
    }

    #[test]
    fn word_parsing() {
        assert_eq!(word("id"), Word::identity());
        assert_eq!(word("tau tau^-1"), Word::identity());
        assert_eq!(word("sigma sigma").to_string(), "sigma^2");
        assert!("rho".parse::<Word>().is_err());
        assert!("tau^x".parse::<Word>().is_err());
    }

    #[test]
    fn every_claim_passes() {
        for report in check_all(7) {
            assert!(report.passed(), "{}", report.to_report());
        }
    }

    #[test]
    fn ten_cycle_census() {
        let report = claim_layer_preservation(4, 6);
        assert_eq!(
            report
                .witnesses
                .iter()
                .find(|(k, _)| k == "separating_ten_cycles")
                .unwrap()
                .1,
            "5"
        );
        assert!(report.passed());
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(check_by_name("claim9", 0).is_err());
        assert_eq!(check_by_name("claim4", 0).unwrap()[0].id, "claim3_4");
    }

    #[test]
    fn skew_on_closed_form() {
        let window = Arc::new(gamma_spec().expand(-5, 5, 0).unwrap());
        let g = VertexField::from_fn(&window, |v| (3 * v.layer + i64::from(v.pos % 2)) as f64);
        let fit = skew_invariance(&g, &CoordinateMap::identity(), 0.0).unwrap();
        assert_eq!((fit.sign, fit.shift, fit.residual), (1, 0.0, 0.0));
        let fit = skew_invariance(&g, &Generator::Tau.map(), 0.0).unwrap();
        assert_eq!((fit.sign, fit.shift), (-1, 1.0));
        let bumped =
            VertexField::from_fn(&window, |v| if v == Vertex::new(0, 0) { 1.0 } else { 0.0 });
        assert!(matches!(
            skew_invariance(&bumped, &Generator::Sigma.map(), 1e-9),
            Err(Error::SkewMismatch(_))
        ));
    }

    #[test]
    fn odd_degree_witnesses() {
        let window = Arc::new(gamma_spec().expand(-3, 3, 0).unwrap());
        let g = VertexField::from_fn(&window, |v| {
            <BigRational as Scalar>::from_i64(3 * v.layer + i64::from(v.pos % 2))
        });
        let (a, b) = odd_degree_witness(&g, v(0, 0)).unwrap();
        let size = |(x, y): (Vertex, Vertex)| (g.at(y).unwrap() - g.at(x).unwrap()).abs();
        assert_ne!(size(a), size(b));

        let ladder = Arc::new(specs::ladder().expand(-3, 3, 0).unwrap());
        let h = VertexField::from_fn(&ladder, |v| v.layer as f64);
        assert!(odd_degree_witness(&h, v(0, 0)).is_ok());
        let flat = VertexField::constant(&ladder, 2.0);
        assert!(odd_degree_witness(&flat, v(0, 0)).is_err());
    }
}
