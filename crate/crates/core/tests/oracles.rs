mod common;

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use twoended::color::{
    classify_case, colour_spec, three_edge_colour, verify_colouring, Colour, ColourCase,
};
use twoended::electric::{
    cut_flow, harmonic_residual, kcl_residual, knl_residual, net_out, ohm_dual_edge,
    ohm_dual_vertex, unit_current, unit_potential, EdgeField, VertexField,
};
use twoended::harmonic::{affine_fit, limit_harmonic, periodic_harmonic, LimitConfig};
use twoended::numeric::rational;
use twoended::saw::{count_saws, mu_estimates, GOLDEN_MEAN};
use twoended::symmetry::{
    self, check_automorphism, claim_nonfree, non_regularity_words, odd_degree_witness,
    relations_check, skew_invariance, transitivity_witness, CoordinateMap, Generator, Word,
};
use twoended::{specs, BallView, Cut, Graph, Vertex};

type Q = BigRational;

fn v(layer: i64, pos: u32) -> Vertex {
    Vertex::new(layer, pos)
}

fn q(p: i64, d: i64) -> Q {
    rational(p, d)
}

fn four_cycle() -> Arc<Graph> {
    Arc::new(Graph::from_simple_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap())
}

fn path3() -> Arc<Graph> {
    Arc::new(Graph::from_simple_edges(3, &[(0, 1), (1, 2)]).unwrap())
}

fn closed_form(g: &Arc<Graph>) -> VertexField<Q> {
    VertexField::from_fn(g, |v| {
        Q::from_integer((3 * v.layer + i64::from(v.pos % 2)).into())
    })
}

#[test]
fn ladder_window_has_fourteen_cubic_interior_vertices() {
    let g = specs::ladder().expand(-3, 3, 0).unwrap();
    assert_eq!(g.vertex_count(), 14);
    for i in g.interior() {
        assert_eq!(g.degree(i), 3);
    }
}

#[test]
fn gamma_window_and_origin_neighbourhood() {
    let spec = specs::gamma();
    assert_eq!(spec, symmetry::gamma_spec());
    let g = spec.expand(-1, 1, 0).unwrap();
    assert_eq!(g.vertex_count(), 30);
    assert_eq!(spec.neighbours(v(0, 0)), vec![v(-1, 5), v(0, 1), v(0, 9)]);
    let wide = spec.expand(-4, 4, 0).unwrap();
    for i in wide.interior() {
        assert_eq!(wide.degree(i), 3);
    }
}

#[test]
fn single_position_spec_expands_to_a_path() {
    let g = specs::path().expand(-2, 2, 0).unwrap();
    assert_eq!(g.vertex_count(), 5);
    assert_eq!(g.edge_count(), 4);
}

#[test]
fn ball_views_on_path_ladder_and_gamma() {
    let path = specs::path().expand(-6, 6, 0).unwrap();
    let view = BallView::new(&path, 2).unwrap();
    assert_eq!(view.upper_layer, vec![v(2, 0)]);
    assert_eq!(view.lower_layer, vec![v(-2, 0)]);
    assert_eq!(view.n0, 0);

    let ladder = specs::ladder().expand(-6, 6, 0).unwrap();
    let view = BallView::new(&ladder, 1).unwrap();
    let mut sphere = view.sphere.clone();
    sphere.sort();
    assert_eq!(sphere, vec![v(-1, 0), v(0, 1), v(1, 0)]);
    assert_eq!(view.n0, 1);
    // B_0 does not separate, so both terminal layers are the whole sphere
    let mut upper = view.upper_layer.clone();
    upper.sort();
    assert_eq!(upper, sphere);
    assert_eq!(view.upper_layer, view.lower_layer);
    let view = BallView::new(&ladder, 2).unwrap();
    assert!(view
        .upper_layer
        .iter()
        .all(|x| !view.lower_layer.contains(x)));

    let gamma = specs::gamma().expand(-10, 10, 0).unwrap();
    let view = BallView::new(&gamma, 6).unwrap();
    assert!(!view.upper_layer.is_empty() && !view.lower_layer.is_empty());
    assert!(view
        .upper_layer
        .iter()
        .all(|x| !view.lower_layer.contains(x)));
}

#[test]
fn small_window_is_rejected() {
    let g = specs::gamma().expand(-1, 1, 0).unwrap();
    assert!(BallView::new(&g, 4).is_err());
}

#[test]
fn net_out_on_series_flow() {
    let g = path3();
    let mut f = EdgeField::<Q>::zero(&g);
    f.set(0, 1, Q::one()).unwrap();
    f.set(1, 2, Q::one()).unwrap();
    assert_eq!(net_out(&f, 1), Q::zero());
    assert_eq!(net_out(&f, 0), Q::one());
    assert_eq!(net_out(&f, 2), -Q::one());
    let total = (0..3).fold(Q::zero(), |acc, x| acc + net_out(&f, x));
    assert!(total.is_zero());
}

#[test]
fn kcl_residual_of_circulation_is_four() {
    let g = four_cycle();
    let mut f = EdgeField::<Q>::zero(&g);
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        f.set(a, b, Q::one()).unwrap();
    }
    assert_eq!(kcl_residual(&f).unwrap(), q(4, 1));
}

#[test]
fn four_cycle_unit_current_splits_three_to_one() {
    let g = four_cycle();
    let (p, t) = (g.vertex(0), g.vertex(1));
    let i = unit_current::<Q>(&g, p, t).unwrap();
    assert_eq!(i.at(p, t).unwrap(), q(3, 4));
    assert_eq!(i.at(p, g.vertex(3)).unwrap(), q(1, 4));
    assert_eq!(i.at(g.vertex(3), g.vertex(2)).unwrap(), q(1, 4));
    assert_eq!(i.at(g.vertex(2), t).unwrap(), q(1, 4));
    assert!(knl_residual(&i, &[p, t]).is_zero());
    assert_eq!(knl_residual(&i, &[]), Q::one());

    let u = unit_potential::<Q>(&g, p, t).unwrap().potential;
    let shift = q(7, 8) - u.value(0).clone();
    let shifted: Vec<Q> = u
        .values()
        .iter()
        .map(|x| x.clone() + shift.clone())
        .collect();
    assert_eq!(shifted, vec![q(7, 8), q(1, 8), q(3, 8), q(5, 8)]);
}

#[test]
fn series_circuit_current_and_potential() {
    let g = path3();
    let i = unit_current::<Q>(&g, g.vertex(0), g.vertex(2)).unwrap();
    assert_eq!(i.canonical_values(), &[Q::one(), Q::one()]);
    let u = ohm_dual_vertex(&i, g.vertex(2), Q::zero()).unwrap();
    assert_eq!(u.values(), &[q(2, 1), q(1, 1), q(0, 1)]);
    let back = ohm_dual_edge(&u);
    assert_eq!(back, i);
    let constant = ohm_dual_vertex(&EdgeField::<Q>::zero(&g), g.vertex(1), q(5, 1)).unwrap();
    assert!(constant.values().iter().all(|x| *x == q(5, 1)));
}

#[test]
fn path_cut_carries_the_whole_current_and_reverses_sign() {
    let g = Arc::new(specs::path().expand(-3, 3, 0).unwrap());
    let i = unit_current::<Q>(&g, v(3, 0), v(-3, 0)).unwrap();
    let cut = Cut::from_vertices(&[v(1, 0), v(2, 0), v(3, 0)], &g).unwrap();
    assert_eq!(cut_flow(&i, &cut).unwrap(), Q::one());
    assert_eq!(cut_flow(&i, &cut.reversed()).unwrap(), -Q::one());
    assert!(cut_flow(&EdgeField::<Q>::zero(&g), &cut).unwrap().is_zero());
}

#[test]
fn closed_form_is_harmonic_on_gamma_window() {
    let g = Arc::new(specs::gamma().expand(-4, 4, 0).unwrap());
    let h = closed_form(&g);
    let interior: Vec<Vertex> = g.interior().into_iter().map(|i| g.vertex(i)).collect();
    assert!(harmonic_residual(&h, &interior).unwrap().is_zero());
    let periodic = periodic_harmonic(&specs::gamma(), 0).unwrap();
    assert_eq!(periodic.slope, q(3, 10));
    assert_eq!(periodic.offsets[1], q(1, 10));
}

#[test]
fn float_and_exact_currents_agree_on_small_catalogue() {
    let catalogue = common::connected_graphs(7);
    for (idx, graphs) in catalogue.iter().enumerate() {
        let n = idx + 1;
        for edges in graphs {
            let g = Arc::new(Graph::from_simple_edges(n, edges).unwrap());
            for b in 1..n {
                let (p, t) = (g.vertex(0), g.vertex(b));
                let exact = unit_current::<Q>(&g, p, t).unwrap();
                let float = unit_current::<f64>(&g, p, t).unwrap();
                for (e, f) in exact
                    .canonical_values()
                    .iter()
                    .zip(float.canonical_values())
                {
                    let e = twoended::Scalar::to_f64(e);
                    assert!((e - f).abs() <= 1e-9, "{edges:?} {b}: {e} vs {f}");
                }
            }
        }
    }
}

#[test]
fn path_limit_is_the_layer_index() {
    let run = limit_harmonic::<Q>(&specs::path(), &LimitConfig::new(3, 1e-8, 64)).unwrap();
    let sign = run.h.at(v(1, 0)).unwrap().clone();
    for x in run.h.carrier().vertices() {
        assert_eq!(
            *run.h.at(*x).unwrap(),
            sign.clone() * Q::from_integer(x.layer.into())
        );
    }
    assert_eq!(sign.abs(), Q::one());
}

#[test]
fn ladder_limit_is_constant_per_layer_with_half_slope() {
    let run = limit_harmonic::<f64>(&specs::ladder(), &LimitConfig::new(3, 1e-8, 64)).unwrap();
    for x in run.h.carrier().vertices() {
        let here = *run.h.at(*x).unwrap();
        if let Some(twin) = run.h.get(v(x.layer, 1 - x.pos)) {
            assert!((here - twin).abs() < 1e-7);
        }
        assert!((here - x.layer as f64 / 2.0).abs() < 1e-7, "{x}: {here}");
    }
    assert!((run.cut_flow.abs() - 1.0).abs() < 1e-10);
}

#[test]
fn gamma_limit_is_proportional_to_closed_form() {
    let run = limit_harmonic::<f64>(&specs::gamma(), &LimitConfig::new(3, 1e-8, 64)).unwrap();
    let reference = closed_form(run.h.carrier()).map_scalar(twoended::Scalar::to_f64);
    let fit = affine_fit(&reference, &run.h).unwrap();
    assert!(fit.residual < 1e-7);
    assert!((fit.alpha.abs() - 0.1).abs() < 1e-7);
    assert!(run.lipschitz <= 1.0 + 1e-12);
}

#[test]
fn affine_fit_recovers_exact_coefficients() {
    let g = Arc::new(specs::gamma().expand(-2, 2, 0).unwrap());
    let h1 = closed_form(&g);
    let same = affine_fit(&h1, &h1).unwrap();
    assert_eq!(
        (same.alpha, same.beta, same.residual),
        (q(1, 1), q(0, 1), q(0, 1))
    );
    let h2 = h1.map(|x| q(-2, 1) * x.clone() + q(7, 1));
    let fit = affine_fit(&h1, &h2).unwrap();
    assert_eq!(
        (fit.alpha, fit.beta, fit.residual),
        (q(-2, 1), q(7, 1), q(0, 1))
    );
}

#[test]
fn generator_values() {
    assert_eq!(Generator::Sigma.map().apply(v(0, 5)), v(1, 5));
    let tau = Generator::Tau.map();
    for k in 0..10u32 {
        assert_eq!(tau.apply(v(1, k)), v(-1, (13 - k) % 10));
        assert_eq!(tau.apply(v(0, k)), v(0, (k + 1) % 10));
    }
    let word = Word::from_str("tau^-3 sigma tau sigma").unwrap();
    for k in 0..10u32 {
        assert_eq!(word.apply(v(0, k)), v(0, (10 - k) % 10));
    }
    assert_eq!(word.apply(v(0, 0)), v(0, 0));
    assert_eq!(word.apply(v(0, 1)), v(0, 9));
}

#[test]
fn automorphism_checks() {
    assert!(check_automorphism(&Generator::Sigma.map(), 6));
    assert!(check_automorphism(&Generator::Tau.map(), 6));
    assert!(check_automorphism(&Generator::SigmaTilde.map(), 6));
    assert!(check_automorphism(&Generator::TauTilde.map(), 6));
    let rotate = CoordinateMap::new(1, 0, [(1, 1); 4]).unwrap();
    assert!(!check_automorphism(&rotate, 6));
}

#[test]
fn transitivity_witnesses() {
    assert_eq!(
        transitivity_witness(v(0, 0), v(0, 0)).unwrap(),
        Word::identity()
    );
    let w = transitivity_witness(v(2, 3), v(-1, 7)).unwrap();
    assert_eq!(w.to_string(), "sigma^-1 tau^4 sigma^-2");
    assert_eq!(w.apply(v(2, 3)), v(-1, 7));
    assert_eq!(
        transitivity_witness(v(0, 4), v(0, 5)).unwrap().to_string(),
        "tau"
    );
}

#[test]
fn non_free_and_non_regular_words() {
    assert!(claim_nonfree().passed());
    let expected = [
        ("tau^-3 sigma tau sigma", 0),
        ("tau sigma~ tau sigma~", 3),
        ("tau~ sigma tau~ sigma", 2),
        ("tau~ sigma~ tau~ sigma~", 9),
    ];
    for ((text, _, fixed), (want, k)) in non_regularity_words().iter().zip(expected) {
        let w = Word::from_str(text).unwrap();
        assert_eq!(w, Word::from_str(want).unwrap());
        assert_eq!(*fixed, k);
        assert_eq!(w.apply(v(0, k as u32)), v(0, k as u32));
        assert!(!w.to_map().is_identity());
    }
}

#[test]
fn layer_images_and_relators() {
    let sigma = Generator::Sigma.map();
    let tau = Generator::Tau.map();
    assert_eq!(sigma.layer_image(0), 1);
    assert_eq!(tau.layer_image(1), -1);
    assert!(tau.power(10).is_identity());
    assert!(!tau.power(9).is_identity());
    let rel = Word::from_str("sigma^-2 tau sigma^-2 tau").unwrap();
    assert!(rel.to_map().is_identity());
    assert!(relations_check(10).passed());
}

#[test]
fn skew_values_of_closed_form() {
    let g = Arc::new(specs::gamma().expand(-6, 6, 0).unwrap());
    let h = closed_form(&g);
    let id = skew_invariance(&h, &CoordinateMap::identity(), 0.0).unwrap();
    assert_eq!((id.sign, id.shift), (1, q(0, 1)));
    let s = skew_invariance(&h, &Generator::Sigma.map(), 0.0).unwrap();
    assert_eq!((s.sign, s.shift, s.residual), (1, q(3, 1), q(0, 1)));
    let t = skew_invariance(&h, &Generator::Tau.map(), 0.0).unwrap();
    assert_eq!((t.sign, t.shift, t.residual), (-1, q(1, 1), q(0, 1)));
}

#[test]
fn odd_degree_witness_at_origin() {
    let g = Arc::new(specs::gamma().expand(-2, 2, 0).unwrap());
    let h = closed_form(&g);
    let ((a, b), (c, d)) = odd_degree_witness(&h, v(0, 0)).unwrap();
    let diff = |x: Vertex, y: Vertex| (h.at(x).unwrap().clone() - h.at(y).unwrap().clone()).abs();
    assert_ne!(diff(a, b), diff(c, d));
    let flat = VertexField::constant(&g, Q::one());
    assert!(odd_degree_witness(&flat, v(0, 0)).is_err());
}

#[test]
fn classification_cases() {
    let ladder = Arc::new(specs::ladder().expand(-3, 3, 0).unwrap());
    let h = VertexField::from_fn(&ladder, |x| Q::from_integer(x.layer.into()));
    let c = classify_case(&h, v(0, 0)).unwrap();
    assert_eq!(c.case, ColourCase::Case1);
    assert_eq!(c.normalised, [q(-1, 1), q(0, 1), q(1, 1)]);

    let gamma = Arc::new(specs::gamma().expand(-2, 2, 0).unwrap());
    let c = classify_case(&closed_form(&gamma), v(0, 1)).unwrap();
    assert_eq!(c.case, ColourCase::Case2);
    assert_eq!(c.scale, q(1, 2));
    assert_eq!(c.normalised, [q(-1, 2), q(-1, 2), q(1, 1)]);

    let star = Arc::new(Graph::from_simple_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap());
    let values = VertexField::new(&star, vec![q(0, 1), q(-3, 1), q(-1, 1), q(4, 1)]);
    assert_eq!(
        classify_case(&values, star.vertex(0)).unwrap().case,
        ColourCase::Case3
    );
    let unbalanced = VertexField::new(&star, vec![q(0, 1), q(-3, 1), q(-1, 1), q(5, 1)]);
    assert!(classify_case(&unbalanced, star.vertex(0)).is_err());
}

#[test]
fn ladder_rungs_are_red() {
    let c = colour_spec(&specs::ladder(), 6).unwrap();
    assert_eq!(c.classification.case, ColourCase::Case1);
    assert!(c.check.passed());
    for n in -6..=4 {
        assert_eq!(
            c.colouring.colour_between(v(n, 0), v(n, 1)),
            Some(Colour::Red)
        );
        let a = c.colouring.colour_between(v(n, 0), v(n + 1, 0)).unwrap();
        let b = c
            .colouring
            .colour_between(v(n + 1, 0), v(n + 2, 0))
            .unwrap();
        assert_ne!(a, Colour::Red);
        assert_ne!(a, b);
    }
}

#[test]
fn gamma_cross_edges_are_red_and_layers_alternate() {
    let c = colour_spec(&specs::gamma(), 6).unwrap();
    assert_eq!(c.classification.case, ColourCase::Case2);
    assert!(c.check.passed());
    let spec = specs::gamma();
    for n in -4..=4 {
        for &(a, b) in &spec.cross {
            assert_eq!(
                c.colouring.colour_between(v(n, a), v(n + 1, b)),
                Some(Colour::Red)
            );
        }
        for k in 0..10u32 {
            let here = c
                .colouring
                .colour_between(v(n, k), v(n, (k + 1) % 10))
                .unwrap();
            let next = c
                .colouring
                .colour_between(v(n, (k + 1) % 10), v(n, (k + 2) % 10))
                .unwrap();
            assert_ne!(here, Colour::Red);
            assert_ne!(here, next);
        }
    }
    assert!(c.colouring.cycle_lengths.iter().all(|&l| l == 10));
}

#[test]
fn three_level_spec_colours_by_difference() {
    let c = colour_spec(&specs::twisted4(), 6).unwrap();
    assert_eq!(c.classification.case, ColourCase::Case3);
    assert!(c.check.passed());
}

#[test]
fn doubled_red_edge_is_reported() {
    let g = Arc::new(specs::ladder().expand(-4, 4, 0).unwrap());
    let h = VertexField::from_fn(&g, |x| Q::from_integer(x.layer.into()));
    let class = classify_case(&h, v(0, 0)).unwrap();
    let mut colouring = three_edge_colour(&g, &h, &class).unwrap();
    assert!(verify_colouring(&colouring).passed());
    let e = g
        .edge_between(g.require(v(0, 0)).unwrap(), g.require(v(1, 0)).unwrap())
        .unwrap();
    colouring.colours[e] = Colour::Red;
    let report = verify_colouring(&colouring);
    assert!(!report.passed());
}

#[test]
fn small_walk_counts() {
    let o = v(0, 0);
    let path = count_saws(&specs::path(), o, 10, 11).unwrap();
    assert!(path.counts.iter().all(|c| *c == BigUint::from(2u32)));
    for spec in [specs::ladder(), specs::gamma()] {
        let c = count_saws(&spec, o, 3, 4).unwrap();
        assert_eq!(
            c.counts,
            vec![
                BigUint::from(3u32),
                BigUint::from(6u32),
                BigUint::from(12u32)
            ]
        );
    }
    assert!(count_saws(&specs::gamma(), o, 5, 5).is_err());
}

#[test]
fn gamma_walk_counts_to_sixteen() {
    let c = count_saws(&specs::gamma(), v(0, 0), 16, 17).unwrap();
    let expected: [u32; 16] = [
        3, 6, 12, 24, 48, 96, 192, 368, 720, 1356, 2596, 4900, 9312, 17384, 32744, 60456,
    ];
    assert_eq!(
        c.counts,
        expected
            .iter()
            .map(|&x| BigUint::from(x))
            .collect::<Vec<_>>()
    );
    assert!(mu_estimates(&c).iter().all(|e| e.root >= GOLDEN_MEAN));
}

#[test]
fn ladder_growth_ratio_approaches_golden_mean() {
    let c = count_saws(&specs::ladder(), v(0, 0), 20, 21).unwrap();
    let last = mu_estimates(&c)
        .into_iter()
        .filter_map(|e| e.ratio)
        .next_back()
        .unwrap();
    assert!((last - GOLDEN_MEAN).abs() < 0.05, "{last}");
}
