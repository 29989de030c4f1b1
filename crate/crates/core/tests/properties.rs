mod common;

use common::{canonical_code, catalog_all, connected_graphs, experiment_catalog, half_variant, random_graph};
use graphon_cover::cone::{
    active_facets, cone_dimension, cone_membership, cone_membership_counts, facet_hyperplanes, has_odd_cycle,
    in_omega_star, incidence_matrix, transform_tn, Certificate, ConeTest, Direction, Verdict,
};
use graphon_cover::cover::{decide_complete_partite, exact_cycle_cover, has_cycle_cover, verify_witness, Decision};
use graphon_cover::graph::SkeletonGraph;
use graphon_cover::graphon::{build_complete_partite, parse_graphon, StepGraphon};
use graphon_cover::linalg::rank;
use graphon_cover::rational::{from_f64, int, ratio, to_f64, Rational};
use graphon_cover::stochastic::{build_gaussian, sample_community_sizes, sample_graph, sample_omega_star, RngStream};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (0i64..=20, 1i64..=20).prop_map(|(p, q)| ratio(p.min(q), q))
}

fn graphon_strategy() -> impl Strategy<Value = StepGraphon> {
    (1usize..=4)
        .prop_flat_map(|q| {
            (
                proptest::collection::btree_set(1i64..64, q - 1),
                proptest::collection::vec(rational_strategy(), q * q),
                Just(q),
            )
        })
        .prop_map(|(cuts, raw, q)| {
            let mut sigma = vec![int(0)];
            sigma.extend(cuts.into_iter().map(|c| ratio(c, 64)));
            sigma.push(int(1));
            let mut values = vec![vec![Rational::zero(); q]; q];
            for i in 0..q {
                for j in i..q {
                    values[i][j] = raw[i * q + j].clone();
                    values[j][i] = raw[i * q + j].clone();
                }
            }
            StepGraphon::new("prop", sigma, values).unwrap()
        })
}

proptest! {
    #[test]
    fn graphon_json_round_trip(w in graphon_strategy()) {
        let back = parse_graphon(&w.to_json()).unwrap();
        prop_assert_eq!(back.name(), w.name());
        prop_assert_eq!(back.sigma(), w.sigma());
        prop_assert_eq!(back.values(), w.values());
        let total: Rational = w.concentration_vector().iter().sum();
        prop_assert!(total.is_one());
    }

    #[test]
    fn split_graphon_has_no_loops(w in graphon_strategy()) {
        let split = w.split_self_loops();
        prop_assert_eq!(split.skeleton_graph().self_loop_count(), 0);
    }
}

#[test]
fn catalog_concentrations_sum_to_one_and_split_cleanly() {
    for w in catalog_all() {
        let total: Rational = w.concentration_vector().iter().sum();
        assert!(total.is_one(), "{}", w.name());
        assert_eq!(w.split_self_loops().skeleton_graph().self_loop_count(), 0);
    }
}

/// Every skeleton on up to 3 nodes with loops, plus the catalog skeletons.
fn small_skeletons() -> Vec<SkeletonGraph> {
    let mut out: Vec<SkeletonGraph> = catalog_all().iter().map(|w| w.skeleton_graph()).collect();
    for q in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..q).flat_map(|i| (i..q).map(move |j| (i, j))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
            out.push(SkeletonGraph::from_edges(q, &edges));
        }
    }
    out
}

#[test]
fn complete_partite_edge_counts() {
    for s in small_skeletons() {
        let q = s.q();
        let bound = if q <= 3 { 4 } else { 2 };
        let mut y = vec![0usize; q];
        loop {
            let g = build_complete_partite(&s, &y);
            let mut formula = 0;
            for (i, j) in s.edges() {
                formula += if i == j { y[i] * y[i].saturating_sub(1) / 2 } else { y[i] * y[j] };
            }
            let mut direct = 0;
            for u in 0..g.node_count() {
                for v in u + 1..g.node_count() {
                    if s.adjacent(g.community[u], g.community[v]) {
                        direct += 1;
                    }
                }
            }
            assert_eq!(g.graph.edge_count(), formula, "{y:?}");
            assert_eq!(direct, formula);
            assert!(g.is_s_partite(&s));
            let Some(k) = y.iter().position(|&v| v < bound) else { break };
            y[..k].iter_mut().for_each(|v| *v = 0);
            y[k] += 1;
        }
    }
}

#[test]
fn sampled_graphs_are_s_partite_and_reproducible() {
    for base in catalog_all() {
        for w in [half_variant(&base), base] {
            let s = w.skeleton_graph();
            for n in [1, 7, 23, 50] {
                let a = sample_graph(&w, n, &mut RngStream::new(n as u64));
                let b = sample_graph(&w, n, &mut RngStream::new(n as u64));
                assert!(a.is_s_partite(&s), "{} n={n}", w.name());
                assert_eq!(a.graph, b.graph);
                assert_eq!(a.community, b.community);
            }
        }
    }
}

#[test]
fn hoeffding_tails() {
    let w = graphon_cover::graphon::catalog("a").unwrap();
    let xstar: Vec<f64> = w.concentration_vector().iter().map(to_f64).collect();
    let q = xstar.len() as f64;
    let batches = 20_000;
    for n in [50usize, 100] {
        for delta in [0.05, 0.1] {
            let mut rng = RngStream::new(1000 + n as u64);
            let mut exceed = 0;
            for _ in 0..batches {
                let y = sample_community_sizes(&w.concentration_vector(), n, &mut rng);
                let d2: f64 = y.iter().zip(&xstar).map(|(&c, &x)| (c as f64 / n as f64 - x).powi(2)).sum();
                if d2.sqrt() > delta {
                    exceed += 1;
                }
            }
            let freq = exceed as f64 / batches as f64;
            let se = (freq * (1.0 - freq) / batches as f64).sqrt();
            let bound = 2.0 * q * (-2.0 * n as f64 * delta * delta / q).exp();
            assert!(freq <= bound + 3.0 * se, "n={n} delta={delta}: {freq} > {bound}");
        }
    }
}

#[test]
fn multinomial_covariance() {
    let xstar = vec![ratio(1, 4), ratio(1, 4), ratio(1, 8), ratio(3, 8)];
    let x: Vec<f64> = xstar.iter().map(to_f64).collect();
    let n = 40usize;
    let draws = 100_000;
    let q = x.len();
    let mut rng = RngStream::new(17);
    let mut sum = vec![0.0; q];
    let mut prod = vec![vec![0.0; q]; q];
    for _ in 0..draws {
        let y = sample_community_sizes(&xstar, n, &mut rng);
        for i in 0..q {
            sum[i] += y[i] as f64;
            for j in 0..q {
                prod[i][j] += (y[i] * y[j]) as f64;
            }
        }
    }
    for i in 0..q {
        let mean_i = sum[i] / draws as f64;
        assert!((mean_i - n as f64 * x[i]).abs() < 0.05, "mean {i}");
        for j in 0..q {
            let cov = prod[i][j] / draws as f64 - mean_i * sum[j] / draws as f64;
            let expected = n as f64 * (if i == j { x[i] } else { 0.0 } - x[i] * x[j]);
            assert!((cov - expected).abs() < 0.15, "cov {i}{j}: {cov} vs {expected}");
        }
    }
}

#[test]
fn gaussian_limit_moments() {
    let w = graphon_cover::graphon::catalog("k").unwrap();
    let x: Vec<f64> = w.concentration_vector().iter().map(to_f64).collect();
    let model = build_gaussian(&x).unwrap();
    let q = x.len();
    for i in 0..q {
        let row_sum: f64 = (0..q).map(|j| model.sigma[(i, j)]).sum();
        assert!(row_sum.abs() < 1e-12);
        for j in 0..q {
            let expected = if i == j { x[i] } else { 0.0 } - x[i] * x[j];
            assert!((model.sigma[(i, j)] - expected).abs() < 1e-12);
        }
    }
    assert_eq!(model.sigma.rank(1e-10), q - 1);
    let draws = 1_000_000;
    let mut rng = RngStream::new(5);
    let mut sum = vec![0.0; q];
    let mut prod = vec![vec![0.0; q]; q];
    for _ in 0..draws {
        let s = sample_omega_star(&model, &mut rng);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..q {
            sum[i] += s[i];
            for j in 0..q {
                prod[i][j] += (s[i] - x[i]) * (s[j] - x[j]);
            }
        }
    }
    for i in 0..q {
        let mean = sum[i] / draws as f64;
        let se = (model.sigma[(i, i)] / draws as f64).sqrt();
        assert!((mean - x[i]).abs() <= 3.0 * se, "mean {i}");
        for j in 0..q {
            let cov = prod[i][j] / draws as f64;
            assert!((cov - model.sigma[(i, j)]).abs() < 5e-3, "cov {i}{j}");
        }
    }
}

fn rational_point_in_cone(columns: &[Vec<Rational>], rng: &mut RngStream) -> Vec<Rational> {
    let q = columns[0].len();
    let coeffs: Vec<i64> = columns.iter().map(|_| 1 + (rng.next_53() % 1000) as i64).collect();
    let total: i64 = coeffs.iter().sum();
    (0..q).map(|i| columns.iter().zip(&coeffs).map(|(c, &a)| &c[i] * int(a)).sum::<Rational>() / int(total)).collect()
}

#[test]
fn omega_n_inside_omega_star() {
    let mut rng = RngStream::new(99);
    for w in experiment_catalog() {
        let z = incidence_matrix(&w.skeleton_graph());
        let xstar = w.concentration_vector();
        if cone_membership(&z, &xstar).unwrap().verdict == Verdict::Outside {
            continue;
        }
        let active = active_facets(&facet_hyperplanes(&z).unwrap(), &z, &xstar).unwrap();
        let columns = z.columns();
        let xs: Vec<f64> = xstar.iter().map(to_f64).collect();
        for _ in 0..1000 {
            let x = rational_point_in_cone(&columns, &mut rng);
            for root in [1i64, 2, 5, 100] {
                // √n is an integer here, so T_n(x) is exact before rounding
                let omega: Vec<f64> =
                    x.iter().zip(&xstar).map(|(xi, si)| to_f64(&((xi - si) * int(root) + si))).collect();
                assert!(in_omega_star(&active, &omega).unwrap(), "{} n={}", w.name(), root * root);
                let via_f64 = transform_tn(
                    &x.iter().map(to_f64).collect::<Vec<_>>(),
                    &xs,
                    (root * root) as u64,
                    Direction::Forward,
                );
                assert!(via_f64.iter().zip(&omega).all(|(a, b)| (a - b).abs() < 1e-9));
            }
        }
    }
}

#[test]
fn small_omega_ball_pulls_back_into_cone() {
    let w = graphon_cover::graphon::catalog("k").unwrap();
    let z = incidence_matrix(&w.skeleton_graph());
    let xstar = w.concentration_vector();
    let active = active_facets(&facet_hyperplanes(&z).unwrap(), &z, &xstar).unwrap();
    let xs: Vec<f64> = xstar.iter().map(to_f64).collect();
    let model = build_gaussian(&xs).unwrap();
    let n = 10_000u64;
    let radius = (n as f64).sqrt() / 16.0;
    let mut rng = RngStream::new(4);
    let mut checked = 0;
    while checked < 1000 {
        let omega = sample_omega_star(&model, &mut rng);
        let dist = omega.iter().zip(&xs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if !in_omega_star(&active, &omega).unwrap() || dist > radius {
            continue;
        }
        let x = transform_tn(&omega, &xs, n, Direction::Inverse);
        let exact: Vec<Rational> = x.iter().map(|&v| from_f64(v).unwrap()).collect();
        // rounding can leave the exact point a hair off the simplex; the cone
        // itself is scale invariant, so test the ray
        assert_ne!(cone_membership(&z, &exact).unwrap().verdict, Verdict::Outside, "{omega:?}");
        checked += 1;
    }
}

fn gcd_of(v: &[num_bigint::BigInt]) -> num_bigint::BigInt {
    v.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x))
}

#[test]
fn facet_normals_are_exact_supports() {
    for s in small_skeletons() {
        let z = incidence_matrix(&s);
        if s.q() < 2 || !s.is_connected() {
            continue;
        }
        let facets = facet_hyperplanes(&z).unwrap();
        let columns = z.columns();
        for v in &facets.normals {
            assert!(gcd_of(v).is_one());
            let tight: Vec<Vec<Rational>> =
                columns.iter().filter(|c| graphon_cover::cone::dot_int(v, c).is_zero()).cloned().collect();
            assert!(columns.iter().all(|c| !graphon_cover::cone::dot_int(v, c).is_negative()));
            assert!(rank(&tight) >= s.q() - 1);
        }
    }
}

#[test]
fn membership_certificates() {
    let mut rng = RngStream::new(8);
    for s in small_skeletons() {
        if s.q() < 2 || !s.is_connected() {
            continue;
        }
        let z = incidence_matrix(&s);
        let full = cone_dimension(&z) == s.q();
        let facets = facet_hyperplanes(&z).unwrap();
        for _ in 0..50 {
            let raw: Vec<i64> = (0..s.q()).map(|_| (rng.next_53() % 7) as i64).collect();
            let total: i64 = raw.iter().sum::<i64>().max(1);
            let x: Vec<Rational> = raw.iter().map(|&r| ratio(r, total)).collect();
            let m = cone_membership(&z, &x).unwrap();
            match (m.verdict, &m.certificate) {
                (Verdict::Outside, Certificate::Separator(w)) => {
                    let wx: Rational = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                    assert!(wx.is_negative());
                    if full {
                        assert!(facets.normals.iter().any(|v| graphon_cover::cone::dot_int(v, &x).is_negative()));
                    }
                }
                (verdict, Certificate::Coefficients(c)) => {
                    assert!(c.iter().all(|v| !v.is_negative()));
                    if verdict == Verdict::Interior {
                        assert!(c.iter().all(|v| v.is_positive()));
                    }
                    let cols = z.columns();
                    for (i, xi) in x.iter().enumerate() {
                        let zc: Rational = cols.iter().zip(c).map(|(col, cj)| &col[i] * cj).sum();
                        assert_eq!(&zc, xi);
                    }
                }
                other => panic!("verdict and certificate disagree: {other:?}"),
            }
        }
    }
}

#[test]
fn fast_paths_agree_with_exact_matching() {
    for w in catalog_all() {
        let s = w.skeleton_graph();
        let z = incidence_matrix(&s);
        let cone = ConeTest::new(&z);
        let q = s.q();
        let top = if q >= 6 { 4 } else { 6 };
        let mut y = vec![0usize; q];
        loop {
            if y.iter().sum::<usize>() > 0 {
                let decision = decide_complete_partite(&s, &y, &z);
                assert_eq!(graphon_cover::cover::decide_complete_partite_with(&s, &y, &cone), decision);
                if decision != Decision::Unknown {
                    let exact = exact_cycle_cover(&build_complete_partite(&s, &y).graph, false).exists;
                    assert_eq!(exact, decision == Decision::Yes, "{} y={y:?}", w.name());
                }
                let lp = cone_membership_counts(&z, &y).unwrap().verdict != Verdict::Outside;
                assert_eq!(cone.contains_counts(&y), lp);
            }
            let Some(k) = y.iter().position(|&v| v < top) else { break };
            y[..k].iter_mut().for_each(|v| *v = 0);
            y[k] += 1;
        }
    }
}

#[test]
fn witnesses_are_cycle_covers() {
    let mut rng = RngStream::new(21);
    let mut found = 0;
    for t in 0..2000 {
        let n = 3 + t % 30;
        let g = random_graph(&mut rng, n, 0.15 + 0.05 * (t % 10) as f64);
        let v = exact_cycle_cover(&g, true);
        if v.exists {
            found += 1;
            assert!(verify_witness(&g, v.witness.as_ref().unwrap()));
        } else {
            assert!(v.witness.is_none());
        }
    }
    assert!(found > 200);
    for w in experiment_catalog() {
        let g = sample_graph(&half_variant(&w), 30, &mut RngStream::new(3));
        let v = has_cycle_cover(&g, None, true);
        if let Some(cycles) = &v.witness {
            assert!(verify_witness(&g.graph, cycles));
        }
    }
}

#[test]
fn canonical_generation_counts() {
    // connected graphs on 1..=7 nodes, counted up to isomorphism
    let levels = connected_graphs(7);
    let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
    assert_eq!(counts, vec![1, 1, 2, 6, 21, 112, 853]);
    let c5 = graphon_cover::graph::Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    let c5b = graphon_cover::graph::Graph::from_edges(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]).unwrap();
    assert_eq!(canonical_code(&c5), canonical_code(&c5b));
}

#[test]
fn odd_cycle_matches_dimension_on_catalog() {
    for w in catalog_all() {
        let s = w.skeleton_graph();
        let z = incidence_matrix(&s);
        let expected = if has_odd_cycle(&s) { s.q() } else { s.q() - 1 };
        assert_eq!(cone_dimension(&z), expected, "{}", w.name());
    }
}
