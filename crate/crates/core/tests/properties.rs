//! Invariants of the metric, hyperbolicity, quasigeodesic and subspace
//! modules over random graphs.

use std::collections::BTreeSet;

use coarsegeo::families::{self, detour_path, generate, FamilySpec, SplitMix64};
use coarsegeo::hyperbolicity::{delta_four_point, delta_slim, evaluate_witness};
use coarsegeo::metric::{build_space, hausdorff_distance};
use coarsegeo::quasigeodesic::{fit_c, morse_radius, tame, tame_bound, verify_qg};
use coarsegeo::rational::int;
use coarsegeo::subspaces::{
    certify_qg_subspace, splice_bound, splice_union, triangle_bound, triangle_experiment, Subspace, TriangleStatus,
};
use coarsegeo::{Error, GeodesicSpace, Graph, ParamPath, QGParams, Rational};
use proptest::prelude::*;

const WEIGHTS: [(i64, i64); 5] = [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];

/// Random connected graph: a random tree plus extra edges, weights drawn
/// from a small set of rationals.
fn arb_graph(max_n: usize, weighted: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>(), 0usize..6).prop_map(move |(n, seed, extra)| {
        let mut rng = SplitMix64::new(seed);
        let w = |rng: &mut SplitMix64| {
            if weighted {
                let (p, q) = WEIGHTS[rng.below(WEIGHTS.len())];
                Rational::new(p, q)
            } else {
                int(1)
            }
        };
        let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
        let mut present = BTreeSet::new();
        for i in 1..n {
            let p = rng.below(i);
            present.insert((p, i));
            edges.push((p, i, w(&mut rng)));
        }
        for _ in 0..extra {
            if n < 3 {
                break;
            }
            let (u, v) = (rng.below(n), rng.below(n));
            let key = (u.min(v), u.max(v));
            if u != v && present.insert(key) {
                edges.push((key.0, key.1, w(&mut rng)));
            }
        }
        Graph::new(n, edges).unwrap()
    })
}

fn unit_space(spec: FamilySpec) -> GeodesicSpace {
    GeodesicSpace::new(generate(&spec).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_axioms_hold(g in arb_graph(24, true)) {
        let s = build_space(&g).unwrap();
        let n = s.len();
        for i in 0..n {
            prop_assert_eq!(s.dist(i, i), int(0));
            for j in 0..n {
                prop_assert_eq!(s.dist(i, j), s.dist(j, i));
                if i != j {
                    prop_assert!(s.dist(i, j) > int(0));
                }
                for k in 0..n {
                    prop_assert!(s.dist(i, k) <= s.dist(i, j) + s.dist(j, k));
                }
            }
        }
        prop_assert_eq!(build_space(&g).unwrap(), s);
    }

    #[test]
    fn geodesics_have_exact_length(g in arb_graph(16, true), a in 0usize..16, b in 0usize..16) {
        let sp = GeodesicSpace::new(g).unwrap();
        let (a, b) = (a % sp.n(), b % sp.n());
        let geos = sp.geodesics(a, b, 32);
        prop_assert!(!geos.paths.is_empty());
        for p in &geos.paths {
            prop_assert_eq!(p.first(), a);
            prop_assert_eq!(p.last(), b);
            prop_assert_eq!(sp.path_length(p).unwrap(), sp.dist(a, b));
            let qg = ParamPath::from_vertex_path(&sp, p).unwrap();
            prop_assert!(verify_qg(sp.metric(), &qg, &QGParams::geodesic()).unwrap().passed());
        }
        let distinct: BTreeSet<_> = geos.paths.iter().collect();
        prop_assert_eq!(distinct.len(), geos.paths.len());
    }

    #[test]
    fn hausdorff_zero_iff_equal(g in arb_graph(14, true), ma in 1u32..(1 << 14), mb in 1u32..(1 << 14)) {
        let s = build_space(&g).unwrap();
        let n = s.len();
        let pick = |m: u32| -> Vec<usize> { (0..n).filter(|&i| m >> i & 1 == 1).collect() };
        let (a, b) = (pick(ma), pick(mb));
        prop_assume!(!a.is_empty() && !b.is_empty());
        let h = hausdorff_distance(&s, &a, &b).unwrap();
        prop_assert_eq!(h == int(0), a == b);
        prop_assert_eq!(hausdorff_distance(&s, &b, &a).unwrap(), h);
    }

    #[test]
    fn four_point_scales_exactly(g in arb_graph(12, true)) {
        let s = build_space(&g).unwrap();
        let base = delta_four_point(&s).delta;
        for f in [2, 3] {
            let scaled = s.scaled_by(int(f)).unwrap();
            prop_assert_eq!(delta_four_point(&scaled).delta, base * f);
        }
    }

    #[test]
    fn witnesses_reproduce_delta(g in arb_graph(10, true)) {
        let sp = GeodesicSpace::new(g).unwrap();
        let four = delta_four_point(sp.metric());
        prop_assert_eq!(evaluate_witness(&sp, &four, 16).unwrap(), four.delta);
        let slim = delta_slim(&sp, 16);
        prop_assert_eq!(evaluate_witness(&sp, &slim, 16).unwrap(), slim.delta);
    }

    // Slim triangles are only sampled at vertices, so on weighted graphs a
    // long edge can hide a fat triangle; unit weights leave no such gap.
    #[test]
    fn zero_slim_forces_zero_four_point_on_unit_graphs(g in arb_graph(10, false)) {
        let sp = GeodesicSpace::new(g).unwrap();
        if delta_slim(&sp, 16).delta == int(0) {
            prop_assert_eq!(delta_four_point(sp.metric()).delta, int(0));
        }
    }

    #[test]
    fn fit_c_is_tight(g in arb_graph(12, true), seed in any::<u64>(), lambda_num in 2i64..8) {
        let sp = GeodesicSpace::new(g).unwrap();
        let mut rng = SplitMix64::new(seed);
        let len = 1 + rng.below(8);
        let pts: Vec<usize> = (0..len).map(|_| rng.below(sp.n())).collect();
        let path = ParamPath::unit_steps(pts).unwrap();
        let lambda = Rational::new(lambda_num, 2);
        let c = fit_c(sp.metric(), &path, lambda).unwrap();
        prop_assert!(verify_qg(sp.metric(), &path, &QGParams::new(lambda, c).unwrap()).unwrap().passed());
        if c > int(0) {
            let eps = Rational::new(1, 1000);
            let below = QGParams::new(lambda, (c - eps).max(int(0))).unwrap();
            prop_assert!(!verify_qg(sp.metric(), &path, &below).unwrap().passed());
        }
    }

    #[test]
    fn tame_invariants(g in arb_graph(14, true), seed in any::<u64>()) {
        let sp = GeodesicSpace::new(g).unwrap();
        let mut rng = SplitMix64::new(seed);
        let (a, b) = (rng.below(sp.n()), rng.below(sp.n()));
        let path = detour_path(&sp, &mut rng, a, b, 3, 8).unwrap();
        let (tamed, est) = tame(&sp, &path, 64).unwrap();
        prop_assert_eq!(tamed.endpoints(), path.endpoints());
        let image: BTreeSet<_> = path.image().into_iter().collect();
        prop_assert!(tamed.points().iter().all(|p| image.contains(p)));
        let q = QGParams::new(int(1), tame_bound(est.r, sp.max_weight())).unwrap();
        prop_assert!(verify_qg(sp.metric(), &tamed, &q).unwrap().passed());
        // The grid construction is already (1, 2r) without slack.
        prop_assert!(verify_qg(sp.metric(), &tamed, &QGParams::new(int(1), est.r * 2).unwrap()).unwrap().passed());
        prop_assert_eq!(
            est.r,
            hausdorff_distance(sp.metric(), &path.image(), est.geodesic.vertices()).unwrap()
        );
    }
}

#[test]
fn triangle_inequality_at_n128() {
    for spec in [
        FamilySpec::RandomTree { n: 128, seed: 11 },
        FamilySpec::NoisyTree {
            n: 128,
            chords: 12,
            seed: 5,
        },
        FamilySpec::Grid { k: 11 },
    ] {
        let s = build_space(&generate(&spec).unwrap()).unwrap();
        let n = s.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!(s.raw(i, k) <= s.raw(i, j) + s.raw(j, k), "{spec:?}");
                }
            }
        }
    }
}

#[test]
fn geodesics_have_distance_zero_radius() {
    let sp = unit_space(FamilySpec::Grid { k: 4 });
    for (a, b) in [(0, 15), (3, 12), (5, 6)] {
        for g in sp.geodesics(a, b, 20).paths {
            let p = ParamPath::from_vertex_path(&sp, &g).unwrap();
            assert_eq!(morse_radius(&sp, &p, 20).unwrap().r, int(0));
        }
    }
}

#[test]
fn tree_zero_delta_under_both_definitions() {
    for seed in 0..20 {
        let sp = unit_space(FamilySpec::RandomTree { n: 40, seed });
        assert_eq!(delta_four_point(sp.metric()).delta, int(0));
        assert_eq!(delta_slim(&sp, 4).delta, int(0));
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let sp = unit_space(FamilySpec::NoisyTree {
        n: 30,
        chords: 6,
        seed: 4,
    });
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (delta_four_point(sp.metric()), delta_slim(&sp, 16)))
    };
    assert_eq!(run(1), run(4));
}

/// Random (A, B, w, qgA, qgB) instance: detour walks a → w and w → b with
/// A and B their images.
fn splice_instance(sp: &GeodesicSpace, rng: &mut SplitMix64) -> (Subspace, Subspace, ParamPath, ParamPath) {
    let n = sp.n();
    let (a, w, b) = (rng.below(n), rng.below(n), rng.below(n));
    let (da, db) = (rng.below(3), rng.below(3));
    let qa = detour_path(sp, rng, a, w, da, 8).unwrap();
    let qb = detour_path(sp, rng, w, b, db, 8).unwrap();
    let a_sub = Subspace::new("A", qa.image()).unwrap();
    let b_sub = Subspace::new("B", qb.image()).unwrap();
    (a_sub, b_sub, qa, qb)
}

#[test]
fn splice_invariants_on_mixed_families() {
    let mut rng = SplitMix64::new(99);
    let specs = [
        FamilySpec::RandomTree { n: 25, seed: 1 },
        FamilySpec::Cycle { n: 11 },
        FamilySpec::NoisyTree {
            n: 20,
            chords: 3,
            seed: 2,
        },
        FamilySpec::Grid { k: 4 },
    ];
    for spec in specs {
        let sp = unit_space(spec);
        let delta = delta_slim(&sp, 64);
        assert!(!delta.truncated);
        for _ in 0..15 {
            let (a_sub, b_sub, qa, qb) = splice_instance(&sp, &mut rng);
            let c = fit_c(sp.metric(), &qa, int(1))
                .unwrap()
                .max(fit_c(sp.metric(), &qb, int(1)).unwrap());
            let r = morse_radius(&sp, &qa, 64)
                .unwrap()
                .r
                .max(morse_radius(&sp, &qb, 64).unwrap().r);
            let q = QGParams::new(int(1), c).unwrap();
            let (out, wit) = splice_union(&sp, &a_sub, &b_sub, &qa, &qb, &q, delta.delta, r, 64)
                .unwrap_or_else(|e| panic!("{spec:?}: {e}"));
            assert_eq!(out.endpoints(), (qa.endpoints().0, qb.endpoints().1));
            assert!(out.points().iter().all(|&p| a_sub.contains(p) || b_sub.contains(p)));
            assert_eq!(wit.bound, splice_bound(c, r, delta.delta, int(1)));
            assert!(wit.join_within_r_delta, "{spec:?}: {wit:?}");
            assert_eq!(wit.t, out.domain_length());
        }
    }
}

#[test]
fn splice_on_weighted_graph_within_declared_slack() {
    let g = Graph::new(
        6,
        [
            (0, 1, int(2)),
            (1, 2, Rational::new(1, 2)),
            (2, 3, int(1)),
            (3, 4, Rational::new(3, 2)),
            (4, 5, int(1)),
            (5, 0, int(2)),
        ],
    )
    .unwrap();
    let sp = GeodesicSpace::new(g).unwrap();
    let delta = delta_slim(&sp, 16).delta;
    let mut rng = SplitMix64::new(5);
    for _ in 0..30 {
        let (a_sub, b_sub, qa, qb) = splice_instance(&sp, &mut rng);
        let lambda = int(2);
        let c = fit_c(sp.metric(), &qa, lambda)
            .unwrap()
            .max(fit_c(sp.metric(), &qb, lambda).unwrap());
        let r = morse_radius(&sp, &qa, 16)
            .unwrap()
            .r
            .max(morse_radius(&sp, &qb, 16).unwrap().r);
        let q = QGParams::new(lambda, c).unwrap();
        match splice_union(&sp, &a_sub, &b_sub, &qa, &qb, &q, delta, r, 16) {
            Ok((out, _)) => assert_eq!(out.endpoints(), (qa.endpoints().0, qb.endpoints().1)),
            Err(Error::BoundMissed { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn crossing_claim_on_successful_searches() {
    // Around-the-cycle detours cannot be (1, C) once both sides are long, so
    // cycles and grids need λ > 1 to produce successful searches.
    let corpus = [
        (FamilySpec::RandomTree { n: 30, seed: 3 }, int(1)),
        (
            FamilySpec::NoisyTree {
                n: 40,
                chords: 6,
                seed: 2,
            },
            int(1),
        ),
        (FamilySpec::Cycle { n: 16 }, int(2)),
        (FamilySpec::Cycle { n: 20 }, Rational::new(5, 2)),
        (FamilySpec::Grid { k: 6 }, int(2)),
    ];
    let (mut successes, mut nontrivial) = (0, 0);
    for (spec, lambda) in corpus {
        let sp = unit_space(spec);
        let mut rng = SplitMix64::new(7);
        for c_const in 0..=2 {
            let q = QGParams::new(lambda, int(c_const)).unwrap();
            for _ in 0..40 {
                let (a, b, c) = (rng.below(sp.n()), rng.below(sp.n()), rng.below(sp.n()));
                if a == b || b == c || a == c {
                    continue;
                }
                let rec = triangle_experiment(&sp, a, b, c, &q, 20_000, 4).unwrap();
                if rec.status == TriangleStatus::Found {
                    successes += 1;
                    let z = rec.z.unwrap_or_else(|| panic!("no crossing: {rec:?}"));
                    assert!(rec.side_ac.contains(&z) || rec.side_bc.contains(&z));
                    assert!(rec.bound_holds, "{rec:?}");
                    if rec.z != rec.x_a {
                        nontrivial += 1;
                    }
                }
            }
        }
    }
    assert!(successes >= 30 && nontrivial > 0, "{successes} / {nontrivial}");
}

/// Where every four-segment union the experiment builds is certified at
/// (λ, C), the slim constant stays below λ²(2C + 1) + C + 1 (+2 slack).
#[test]
fn delta_bound_when_all_unions_certify() {
    let mut non_vacuous = 0;
    let specs = [
        FamilySpec::Cycle { n: 4 },
        FamilySpec::Cycle { n: 6 },
        FamilySpec::Cycle { n: 8 },
        FamilySpec::Cycle { n: 10 },
        FamilySpec::Grid { k: 3 },
        FamilySpec::RandomTree { n: 9, seed: 3 },
        FamilySpec::NoisyTree {
            n: 9,
            chords: 2,
            seed: 8,
        },
    ];
    for spec in specs {
        let sp = unit_space(spec);
        let slim = delta_slim(&sp, 32).delta;
        for c_const in 0..=4 {
            let q = QGParams::new(int(1), int(c_const)).unwrap();
            let mut all_certified = true;
            'tri: for a in 0..sp.n() {
                for b in 0..sp.n() {
                    for c in 0..sp.n() {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        let rec = triangle_experiment(&sp, a, b, c, &q, 2_000, 4).unwrap();
                        if rec.y.is_empty() {
                            continue;
                        }
                        let y = Subspace::new("Y", rec.y.iter().copied()).unwrap();
                        if !certify_qg_subspace(&sp, &y, &q, 2_000).unwrap().is_certified() {
                            all_certified = false;
                            break 'tri;
                        }
                    }
                }
            }
            if all_certified {
                if slim > int(0) {
                    non_vacuous += 1;
                }
                assert!(slim <= triangle_bound(&q) + 1 + 2, "{spec:?} C={c_const}: δ={slim}");
            }
        }
    }
    assert!(non_vacuous > 0);
}

#[test]
fn families_generate_zero_delta_trees() {
    for seed in 0..10 {
        let g = families::generate(&FamilySpec::RandomTree { n: 60, seed }).unwrap();
        assert_eq!(delta_four_point(&build_space(&g).unwrap()).delta, int(0));
    }
}
