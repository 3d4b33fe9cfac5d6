//! Lipschitz harmonic functions on 2-ended specs.
//!
//! [`limit_harmonic`] runs the ball-current construction: for growing radii
//! `n` it sends a unit current through the ball `B_n` from a vertex of `L_n`
//! to a vertex of `L_{-n}`, takes the potential normalised to vanish at the
//! origin and watches its restriction to a fixed probe ball. The run stops
//! once two consecutive restrictions agree to within `eps` in sup-norm.
//!
//! [`periodic_harmonic`] is an independent route: every 2-ended layered spec
//! admits a harmonic function of the form `s * n + x_k`, found from an
//! `m x m` Laplacian system on one period.

use std::sync::Arc;

use num_rational::BigRational;

use crate::electric::{
    cut_flow, harmonic_residual, knl_residual, ohm_dual_edge, ohm_dual_vertex, unit_potential,
    VertexField,
};
use crate::error::{Error, Result};
use crate::graph::{separating_cut_mask, BallView, Cut, EndSide, Ends, Graph, LayeredSpec, Vertex};
use crate::numeric::Scalar;
use crate::report::{Report, Verdict};
use crate::solve::BandedSystem;

/// Extra layers padded around every ball before identifying `L_{±n}`.
const WINDOW_MARGIN: i64 = 3;

/// How the terminals `p ∈ L_n`, `q ∈ L_{-n}` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalRule {
    /// Smallest position `k`, then smallest `|n|`.
    SmallestPosition,
    /// Largest position `k`, then largest `|n|`.
    LargestPosition,
}

impl TerminalRule {
    pub fn pick(self, layer: &[Vertex]) -> Option<Vertex> {
        let key = |v: &&Vertex| (v.pos, v.layer.unsigned_abs());
        match self {
            TerminalRule::SmallestPosition => layer.iter().min_by_key(key).copied(),
            TerminalRule::LargestPosition => layer.iter().max_by_key(key).copied(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TerminalRule::SmallestPosition => "smallest-k",
            TerminalRule::LargestPosition => "largest-k",
        }
    }
}

/// Parameters of a limit run.
#[derive(Debug, Clone)]
pub struct LimitConfig {
    /// Position `k0` of the origin `(0, k0)`.
    pub origin_pos: u32,
    /// Probe radius `m`: convergence is judged on `B_m`.
    pub probe: usize,
    pub eps: f64,
    /// Strictly increasing radii; `None` uses [`default_schedule`] up to `max_radius`.
    pub schedule: Option<Vec<usize>>,
    pub max_radius: usize,
    pub rule: TerminalRule,
}

impl LimitConfig {
    pub fn new(probe: usize, eps: f64, max_radius: usize) -> Self {
        LimitConfig {
            origin_pos: 0,
            probe,
            eps,
            schedule: None,
            max_radius,
            rule: TerminalRule::SmallestPosition,
        }
    }

    pub fn with_rule(mut self, rule: TerminalRule) -> Self {
        self.rule = rule;
        self
    }
}

/// `n0 + 2^i` for `i = 0, 1, ...` while below `cap`, then `cap` itself,
/// keeping only radii above the probe radius.
pub fn default_schedule(n0: usize, probe: usize, cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut step = 1usize;
    while n0 + step < cap {
        out.push(n0 + step);
        step *= 2;
    }
    out.push(cap);
    out.retain(|&n| n > probe && n > n0);
    out.dedup();
    out
}

/// Least `k` such that `B_k` around `(0, k0)` separates the two ends.
pub fn separation_radius(spec: &LayeredSpec, k0: u32) -> Result<usize> {
    let mut reach = 4usize;
    loop {
        let g = spec.expand_around_ball(k0, reach, WINDOW_MARGIN)?;
        match BallView::new(&g, 0) {
            Ok(view) => return Ok(view.n0),
            Err(Error::InsufficientTruncation { .. }) if reach < 1 << 12 => reach *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// One radius of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitStep {
    pub radius: usize,
    pub ball_size: usize,
    pub p: Vertex,
    pub q: Vertex,
    /// Sup-norm distance on `B_m` to the previous step.
    pub sup_diff: Option<f64>,
    pub solve_residual: f64,
}

/// A converged limit run and its diagnostics.
#[derive(Debug, Clone)]
pub struct LimitRun<T> {
    pub spec: LayeredSpec,
    pub origin: Vertex,
    pub probe: usize,
    pub eps: f64,
    pub rule: TerminalRule,
    pub schedule: Vec<usize>,
    pub n0: usize,
    pub steps: Vec<LimitStep>,
    /// The limit on the probe ball `B_m`, with `h(o) = 0`.
    pub h: VertexField<T>,
    /// Potential of the last step on its whole ball `B_n`.
    pub last_field: VertexField<T>,
    /// `L_n` and `L_{-n}` of the last step.
    pub last_ends: Ends,
    /// The fixed cut `C` inside `B_{n0+1}`, on the last ball.
    pub cut: Cut,
    /// Flow of the last current through `C`, oriented towards the lower end.
    pub cut_flow: T,
    pub lipschitz: T,
    /// Harmonic residual of `h` on the interior of `B_m`.
    pub harmonic_residual: T,
}

impl<T: Scalar> LimitRun<T> {
    pub fn converged_radius(&self) -> usize {
        self.steps.last().map(|s| s.radius).unwrap_or(0)
    }

    /// Structured report: per-step trace, diagnostics and the field rows.
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("mode", T::MODE.as_str())
            .push("origin", self.origin)
            .push("probe", self.probe)
            .push("eps", format!("{:e}", self.eps))
            .push("terminal_rule", self.rule.as_str())
            .push("n0", self.n0)
            .push(
                "schedule",
                self.schedule
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
        for (i, s) in self.steps.iter().enumerate() {
            let diff = s.sup_diff.map_or("-".to_string(), |d| format!("{d:e}"));
            r.push(
                format!("step.{i}"),
                format!(
                    "radius={} ball={} p={} q={} sup_diff={diff}",
                    s.radius, s.ball_size, s.p, s.q
                ),
            );
        }
        r.push("converged_radius", self.converged_radius())
            .push("lipschitz", self.lipschitz.to_text())
            .push("harmonic_residual", self.harmonic_residual.to_text())
            .push("cut_flow", self.cut_flow.to_text())
            .push("cut_edges", self.cut.crossing().len());
        for (v, val) in self.h.carrier().vertices().iter().zip(self.h.values()) {
            r.push(format!("h[{v}]"), val.to_text());
        }
        r
    }
}

/// Runs the ball-current limit construction.
pub fn limit_harmonic<T: Scalar>(spec: &LayeredSpec, config: &LimitConfig) -> Result<LimitRun<T>> {
    spec.validate()?;
    if config.eps.is_nan() || config.eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {}",
            config.eps
        )));
    }
    let k0 = config.origin_pos;
    let origin = Vertex::new(0, k0);
    let n0 = separation_radius(spec, k0)?;
    let schedule = match &config.schedule {
        Some(s) => s.clone(),
        None => default_schedule(n0, config.probe, config.max_radius),
    };
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "schedule {schedule:?} is not strictly increasing"
        )));
    }
    if schedule[0] <= n0 || schedule[0] <= config.probe {
        return Err(Error::InvalidArgument(format!(
            "schedule must start above n0={n0} and probe={}; got {schedule:?}",
            config.probe
        )));
    }

    let probe_graph = {
        let g = spec.expand_around_ball(k0, config.probe + 1, WINDOW_MARGIN)?;
        let view = BallView::new(&g, config.probe)?;
        Arc::new(view.ball_graph(&g)?)
    };
    let eps = T::from_f64(config.eps);

    let mut steps: Vec<LimitStep> = Vec::new();
    let mut previous: Option<VertexField<T>> = None;
    let mut last = None;
    for &n in &schedule {
        let window = spec.expand_around_ball(k0, n + 1, WINDOW_MARGIN)?;
        let view = BallView::new(&window, n)?;
        let ball = Arc::new(view.ball_graph(&window)?);
        let p = config.rule.pick(&view.upper_layer).ok_or_else(|| {
            Error::Verification(format!("empty upper terminal layer at radius {n}"))
        })?;
        let q = config.rule.pick(&view.lower_layer).ok_or_else(|| {
            Error::Verification(format!("empty lower terminal layer at radius {n}"))
        })?;
        let solve = unit_potential::<T>(&ball, p, q)?;
        let current = ohm_dual_edge(&solve.potential);
        let field = ohm_dual_vertex(&current, origin, T::zero())?;
        let on_probe = field.restrict(&probe_graph)?;
        let sup_diff = match &previous {
            Some(prev) => Some(on_probe.sup_distance(prev)?),
            None => None,
        };
        steps.push(LimitStep {
            radius: n,
            ball_size: ball.vertex_count(),
            p,
            q,
            sup_diff: sup_diff.as_ref().map(Scalar::to_f64),
            solve_residual: solve.residual,
        });
        let converged = sup_diff.is_some_and(|d| d <= eps);
        previous = Some(on_probe);
        last = Some((window, view, field));
        if converged {
            break;
        }
    }
    let converged = steps
        .last()
        .and_then(|s| s.sup_diff)
        .is_some_and(|d| T::from_f64(d) <= eps || d <= config.eps);
    if !converged {
        return Err(Error::NotConverged {
            trace: steps
                .iter()
                .filter_map(|s| s.sup_diff.map(|d| (s.radius, d)))
                .collect(),
        });
    }

    let (window, view, last_field) = last.expect("schedule is non-empty");
    let h = previous.expect("schedule is non-empty");
    let cut = {
        let mask = separating_cut_mask(&window, &view)?;
        let x: Vec<Vertex> = last_field
            .carrier()
            .vertices()
            .iter()
            .copied()
            .filter(|&v| mask[window.index_of(v).expect("ball lies in window")])
            .collect();
        Cut::from_vertices(&x, last_field.carrier())?
    };
    let flow = cut_flow(&ohm_dual_edge(&last_field), &cut)?;
    let interior: Vec<Vertex> = probe_graph
        .interior()
        .into_iter()
        .map(|i| probe_graph.vertex(i))
        .collect();
    let harmonic_residual = harmonic_residual(&h, &interior)?;
    let lipschitz = h.lipschitz_constant();
    Ok(LimitRun {
        spec: spec.clone(),
        origin,
        probe: config.probe,
        eps: config.eps,
        rule: config.rule,
        schedule,
        n0,
        steps,
        h,
        last_ends: view.ends(),
        last_field,
        cut,
        cut_flow: flow,
        lipschitz,
        harmonic_residual,
    })
}

impl<T: Scalar> LimitRun<T> {
    /// Five distinct end-separating cuts of the last ball: the fixed cut `C`,
    /// layer cuts `X = {n >= t}` for `t = -3, 2, 5`, and the reversed cut at `t = 0`.
    pub fn standard_cuts(&self) -> Vec<Cut> {
        let ball = self.last_field.carrier();
        vec![
            self.cut.clone(),
            Cut::layer_cut(ball, -3),
            Cut::layer_cut(ball, 2),
            Cut::layer_cut(ball, 5),
            Cut::layer_cut(ball, 0).reversed(),
        ]
    }

    /// Cut invariance of the last potential over [`Self::standard_cuts`].
    pub fn cut_invariance(&self) -> Result<CutInvarianceReport> {
        verify_cut_invariance(&self.last_field, &self.standard_cuts(), &self.last_ends)
    }
}

/// Result of comparing the flow of `∂h` through several cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct CutInvarianceReport {
    pub flows: Vec<f64>,
    pub sides: Vec<EndSide>,
    /// Spread of `flow * side` across the cuts.
    pub max_deviation: f64,
    pub signs_consistent: bool,
    pub passed: bool,
}

/// Checks that `∂h` has the same net flow, up to the end-containment sign,
/// through every cut. `∂h` must be sourceless away from the end sets.
pub fn verify_cut_invariance<T: Scalar>(
    h: &VertexField<T>,
    cuts: &[Cut],
    ends: &Ends,
) -> Result<CutInvarianceReport> {
    let f = ohm_dual_edge(h);
    let mut exempt = ends.upper.clone();
    exempt.extend(ends.lower.iter().copied());
    let residual = knl_residual(&f, &exempt);
    if residual > T::tolerance() {
        return Err(Error::NotSourceless(residual.to_f64()));
    }
    let mut flows = Vec::with_capacity(cuts.len());
    let mut sides = Vec::with_capacity(cuts.len());
    let mut normalised: Vec<T> = Vec::with_capacity(cuts.len());
    for (i, c) in cuts.iter().enumerate() {
        let side = c.end_side(ends).ok_or(Error::NonSeparatingCut(i))?;
        let flow = cut_flow(&f, c)?;
        flows.push(flow.to_f64());
        sides.push(side);
        normalised.push(if side == EndSide::Upper { flow } else { -flow });
    }
    let (lo, hi) = min_max(&normalised);
    let max_deviation = (hi.clone() - lo.clone()).to_f64();
    let signs_consistent = lo > T::zero() || hi < T::zero();
    Ok(CutInvarianceReport {
        flows,
        sides,
        max_deviation,
        signs_consistent,
        passed: signs_consistent && max_deviation <= 1e-9,
    })
}

fn min_max<T: Scalar>(values: &[T]) -> (T, T) {
    let mut lo = values.first().cloned().unwrap_or_else(T::zero);
    let mut hi = lo.clone();
    for v in values {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

/// Least-squares coefficients of `h2 ≈ alpha * h1 + beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit<T> {
    pub alpha: T,
    pub beta: T,
    /// Sup-norm residual of the fit.
    pub residual: T,
}

/// Fits `h2 = alpha * h1 + beta` over the vertices of `h1`'s carrier.
pub fn affine_fit<T: Scalar>(h1: &VertexField<T>, h2: &VertexField<T>) -> Result<AffineFit<T>> {
    let xs = h1.values();
    let ys: Vec<T> = h1
        .carrier()
        .vertices()
        .iter()
        .map(|&v| h2.at(v).cloned())
        .collect::<Result<_>>()?;
    let (lo, hi) = min_max(xs);
    if (hi - lo).abs() <= T::tolerance() {
        return Err(Error::DegenerateFit("h1 is constant".into()));
    }
    let count = T::from_i64(xs.len() as i64);
    let mean = |v: &[T]| v.iter().cloned().fold(T::zero(), |a, b| a + b) / count.clone();
    let mx = mean(xs);
    let my = mean(&ys);
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x.clone() - mx.clone();
        sxy = sxy + dx.clone() * (y.clone() - my.clone());
        sxx = sxx + dx.clone() * dx;
    }
    let alpha = sxy / sxx;
    let beta = my - alpha.clone() * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y.clone() - alpha.clone() * x.clone() - beta.clone()).abs())
        .fold(T::zero(), |m, r| if r > m { r } else { m });
    Ok(AffineFit {
        alpha,
        beta,
        residual,
    })
}

/// `|∂h(X,Y)|` against the variation of `h` on its carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFlowReport {
    pub flow_abs: f64,
    pub variation: f64,
    /// False when a vanishing flow meets a non-constant `h`.
    pub consistent: bool,
}

pub fn zero_flow_implies_constant_check<T: Scalar>(
    h: &VertexField<T>,
    c: &Cut,
) -> Result<ZeroFlowReport> {
    let flow_abs = cut_flow(&ohm_dual_edge(h), c)?.abs().to_f64();
    let (lo, hi) = min_max(h.values());
    let variation = (hi - lo).to_f64();
    Ok(ZeroFlowReport {
        flow_abs,
        variation,
        consistent: !(flow_abs <= 1e-9 && variation > 1e-9),
    })
}

/// The harmonic function `h(n, k) = slope * n + offset[k]`, normalised so
/// that `h(0, k0) = 0` and the flow of `∂h` towards the lower end through
/// any layer cut is `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicHarmonic {
    pub slope: BigRational,
    pub offsets: Vec<BigRational>,
}

impl PeriodicHarmonic {
    pub fn value(&self, v: Vertex) -> BigRational {
        self.slope.clone() * BigRational::from_i64(v.layer) + self.offsets[v.pos as usize].clone()
    }

    pub fn field_on(&self, g: &Arc<Graph>) -> VertexField<BigRational> {
        VertexField::from_fn(g, |v| self.value(v))
    }

    pub fn field_on_f64(&self, g: &Arc<Graph>) -> VertexField<f64> {
        VertexField::from_fn(g, |v| self.value(v).to_f64())
    }
}

/// Solves for the periodic Lipschitz harmonic function of `spec` exactly.
pub fn periodic_harmonic(spec: &LayeredSpec, k0: u32) -> Result<PeriodicHarmonic> {
    spec.validate()?;
    let m = spec.m as usize;
    let k0 = k0 as usize;
    if k0 >= m {
        return Err(Error::InvalidArgument(format!(
            "origin position {k0} out of range"
        )));
    }
    // Harmonicity at (n, k) with slope 1: sum over neighbours of g(w) - g(v) = 0,
    // i.e. (L x)_k = (#cross rules leaving k upwards) - (#arriving from below).
    let mut lap = vec![vec![0i64; m]; m];
    let mut rhs = vec![0i64; m];
    let mut link = |a: usize, b: usize| {
        lap[a][a] += 1;
        lap[b][b] += 1;
        lap[a][b] -= 1;
        lap[b][a] -= 1;
    };
    for &(a, b) in &spec.intra {
        link(a as usize, b as usize);
    }
    for &(a, b) in &spec.cross {
        let (a, b) = (a as usize, b as usize);
        if a != b {
            link(a, b);
        }
        rhs[a] += 1;
        rhs[b] -= 1;
    }
    let unknown = |k: usize| if k < k0 { k } else { k - 1 };
    let mut entries = Vec::new();
    for i in (0..m).filter(|&i| i != k0) {
        for j in (0..m).filter(|&j| j != k0) {
            if lap[i][j] != 0 {
                entries.push((unknown(i), unknown(j), BigRational::from_i64(lap[i][j])));
            }
        }
    }
    let b: Vec<BigRational> = (0..m)
        .filter(|&i| i != k0)
        .map(|i| BigRational::from_i64(rhs[i]))
        .collect();
    let x = if m > 1 {
        BandedSystem::from_triplets(m - 1, &entries).solve(b)?
    } else {
        Vec::new()
    };
    let mut offsets = vec![BigRational::from_i64(0); m];
    for k in (0..m).filter(|&k| k != k0) {
        offsets[k] = x[unknown(k)].clone();
    }
    // flow from layers >= 1 down to layers <= 0 through the cross edges
    let flow = spec
        .cross
        .iter()
        .fold(BigRational::from_i64(0), |acc, &(a, b)| {
            acc + BigRational::from_i64(1) + offsets[b as usize].clone()
                - offsets[a as usize].clone()
        });
    if flow == BigRational::from_i64(0) {
        return Err(Error::Verification(
            "periodic solution carries no flow".into(),
        ));
    }
    Ok(PeriodicHarmonic {
        slope: BigRational::from_i64(1) / flow.clone(),
        offsets: offsets.into_iter().map(|o| o / flow.clone()).collect(),
    })
}

/// Cut-invariance summary as a report.
pub fn cut_invariance_report(r: &CutInvarianceReport) -> Report {
    let mut out = Report::new();
    for (i, (f, s)) in r.flows.iter().zip(&r.sides).enumerate() {
        out.push(format!("cut.{i}"), format!("flow={f:e} x_side={s:?}"));
    }
    out.push("max_deviation", format!("{:e}", r.max_deviation))
        .push("signs_consistent", r.signs_consistent)
        .push("verdict", Verdict::from_bool(r.passed));
    out
}
