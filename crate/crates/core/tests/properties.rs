use std::f64::consts::PI;

use cheegernet_core::generate;
use cheegernet_core::graphtools::{
    all_pairs_hops, cheeger, gromov_product, parse_edge_list, write_edge_list, CheegerMode,
};
use cheegernet_core::hypmath::{
    collar_width, separation_floor, thin_boundary_length, thin_collar_area, thin_separation, MargulisParam,
};
use cheegernet_core::netgraph::{
    boundary_vertex_set, build_net, estimate_qi_constants, quantize, NetBuildParams, VertexTag, GRID_STEP,
};
use cheegernet_core::surface::{domain_from_pieces, Surface};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eps_strategy() -> impl Strategy<Value = MargulisParam> {
    (0.01..0.88f64).prop_map(|e| MargulisParam::new(e).unwrap())
}

fn tag_strategy() -> impl Strategy<Value = VertexTag> {
    prop_oneof![
        (0..500usize).prop_map(|piece| VertexTag::Hub { piece }),
        (0..500usize, 0..3usize, 0..100usize).prop_map(|(piece, slot, index)| VertexTag::Sample { piece, slot, index }),
        (0..500usize).prop_map(|cusp| VertexTag::CuspW { cusp }),
        (0..500usize).prop_map(|geodesic| VertexTag::ThinV { geodesic }),
    ]
}

proptest! {
    #[test]
    fn thin_collar_bounds(eps in eps_strategy(), t in 0.001..0.999f64) {
        let l = t * 2.0 * eps.get();
        prop_assert!(thin_boundary_length(l, eps).unwrap() <= 2.0 * eps.sinh() + 1e-12);
        prop_assert!(thin_collar_area(l, eps).unwrap() < 4.0 * eps.sinh());
        prop_assert!(thin_separation(l, eps).unwrap() > separation_floor(eps));
    }

    #[test]
    fn separation_increases_with_length(eps in eps_strategy(), a in 0.001..0.99f64, b in 0.001..0.99f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s = |t: f64| thin_separation(t * 2.0 * eps.get(), eps).unwrap();
        prop_assert!(s(lo) < s(hi));
    }

    #[test]
    fn collar_width_decreases(a in 0.001..20.0f64, b in 0.001..20.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(collar_width(lo).unwrap() > collar_width(hi).unwrap());
    }

    #[test]
    fn quantize_rounds_up_to_grid(x in 0.0..50.0f64) {
        let q = quantize(x);
        prop_assert!(q >= x - 1e-8);
        prop_assert!(q - x < GRID_STEP + 1e-9);
        prop_assert_eq!((q / GRID_STEP).fract(), 0.0);
    }

    #[test]
    fn tags_round_trip(tag in tag_strategy()) {
        let back: VertexTag = tag.to_string().parse().unwrap();
        prop_assert_eq!(back, tag);
    }

    #[test]
    fn gromov_products_are_bounded(seed in any::<u64>(), n in 2..30usize, extra in 0..20usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected(&mut rng, n, extra);
        let d = all_pairs_hops(&g);
        for o in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let p = gromov_product(&d, x, y, o);
                    prop_assert!(p >= 0.0 && p <= d.get(x, o).min(d.get(y, o)));
                }
            }
        }
    }

    #[test]
    fn edge_lists_round_trip(seed in any::<u64>(), n in 1..40usize, extra in 0..40usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected(&mut rng, n, extra);
        let text = write_edge_list(n, g.edges().map(|(u, v)| (u, v, None)), None);
        prop_assert_eq!(parse_edge_list(&text).unwrap().to_graph().unwrap(), g);
    }

    #[test]
    fn cheeger_minimum_beats_every_singleton(seed in any::<u64>(), n in 2..20usize, extra in 0..25usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected(&mut rng, n, extra);
        let r = cheeger(&g, &CheegerMode::FiniteHalf, n).unwrap();
        let min_degree = (0..n).map(|v| g.degree(v)).min().unwrap() as f64;
        prop_assert!(r.value <= min_degree);
        prop_assert!(r.witness_set.len() <= n / 2);
        prop_assert_eq!(g.vertex_boundary(&r.witness_set).len(), r.boundary_size);
    }

    #[test]
    fn qi_identity_is_exact(seed in any::<u64>(), n in 2..30usize, extra in 0..20usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected(&mut rng, n, extra);
        let d = all_pairs_hops(&g);
        let map: Vec<Option<usize>> = (0..n).map(Some).collect();
        let q = estimate_qi_constants(&d, &d, &map).unwrap();
        prop_assert_eq!((q.alpha, q.beta, q.fullness), (1.0, 0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_nets_are_well_formed(seed in any::<u64>(), k in 1..9usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Surface::new(generate::random_spec(&mut rng, k)).unwrap();
        let params = NetBuildParams::default_for(MargulisParam::default_value());
        let net = build_net(&s, params).unwrap();
        prop_assert!(net.check_structure().is_ok());
        prop_assert!(net.max_degree() <= params.degree_bound());
        let all: Vec<usize> = (0..k).collect();
        let d = domain_from_pieces(&s, &all).unwrap();
        prop_assert!((d.area - 2.0 * PI * k as f64).abs() < 1e-9);
        let b = boundary_vertex_set(&net, &d).unwrap();
        prop_assert!(b.boundary.is_empty());
        prop_assert_eq!(b.s_g.len(), net.vertex_count());
    }
}
