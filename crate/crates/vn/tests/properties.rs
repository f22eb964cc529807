use proptest::prelude::*;

use vn::centralizer::{build_g1, s_exponent, stair_extend, StairCandidate};
use vn::distortion::jump_profile;
use vn::flowgraph::{build_flow_graph, cone_in_union, ComponentKind};
use vn::revealing::{is_revealing, partition_tz, Order};
use vn::{make_revealing, parse_element, samples, serialize_element, Address, Element, Point};

fn element(n: usize) -> impl Strategy<Value = Element> {
    (1usize..9, any::<u64>()).prop_map(move |(size, seed)| Element::random(n, size, seed))
}

fn arity_and_pair() -> impl Strategy<Value = (Element, Element)> {
    (2usize..4).prop_flat_map(|n| (element(n), element(n)))
}

fn point(n: usize) -> impl Strategy<Value = Point> {
    (prop::collection::vec(0..n as u8, 0..5), prop::collection::vec(0..n as u8, 1..4))
        .prop_map(|(a, b)| Point::new(Address(a), Address(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_round_trip(e in element(3)) {
        prop_assert_eq!(parse_element(&serialize_element(&e)).unwrap(), e);
    }

    #[test]
    fn inverse_and_reduction((a, b) in arity_and_pair()) {
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.compose(&ab.invert()).unwrap().is_identity());
        prop_assert_eq!(ab.invert(), b.invert().compose(&a.invert()).unwrap());
        prop_assert_eq!(ab.reduce(), ab.clone());
        prop_assert!(ab.is_reduced());
    }

    #[test]
    fn points_follow_composition(a in element(2), b in element(2), p in point(2)) {
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.apply_point(&p), b.apply_point(&a.apply_point(&p)));
        prop_assert_eq!(a.invert().apply_point(&a.apply_point(&p)), p);
    }

    #[test]
    fn revealing_represents_the_element(e in element(2)) {
        let rp = make_revealing(&e).unwrap();
        prop_assert!(is_revealing(&rp.element));
        prop_assert!(rp.element.same_map(&e));
        // the torsion part and the rest partition the Cantor set
        let (t, z) = partition_tz(&rp);
        let all: Vec<Address> = t.iter().chain(z.iter()).cloned().collect();
        prop_assert!(cone_in_union(&all, &Address::root(), 2));
    }

    #[test]
    fn component_supports_are_invariant(e in element(2)) {
        let rp = make_revealing(&e).unwrap();
        let fg = build_flow_graph(&rp);
        for c in &fg.components {
            for cone in &c.support.cones {
                let image = rp.element.expand_to_contain(cone);
                for (d, r) in image.rules() {
                    if cone.is_prefix_of(d) {
                        prop_assert!(cone_in_union(&c.support.cones, r, 2), "{cone} -> {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn jumps_sum_to_zero(e in element(2)) {
        let rp = make_revealing(&e).unwrap();
        for s in rp.repellers() {
            let p = jump_profile(&rp, &s.chain[0]).unwrap();
            prop_assert_eq!(p.jumps.iter().sum::<i64>(), 0);
            prop_assert!(p.u >= 1 && p.spine_length >= 1);
        }
    }

    #[test]
    fn s_is_additive_on_powers(e in element(2), i in -3i64..4, j in -3i64..4) {
        let rp = make_revealing(&e).unwrap();
        prop_assume!(!rp.is_torsion());
        let (gi, gj) = (e.pow(i), e.pow(j));
        let sum = s_exponent(&gi.compose(&gj).unwrap(), &rp).unwrap();
        prop_assert_eq!(sum, s_exponent(&gi, &rp).unwrap() + s_exponent(&gj, &rp).unwrap());
        prop_assert_eq!(s_exponent(&e, &rp).unwrap() * (i + j), sum);
    }

    #[test]
    fn g1_commutes_and_has_order_m(e in element(2)) {
        let rp = make_revealing(&e).unwrap();
        for o in &rp.neutral_periodic_orbits {
            let g = build_g1(&e, o.len()).unwrap();
            prop_assert!(g.commutes_with(&e));
            prop_assert_eq!(g.order().unwrap(), Order::Finite(o.len() as u64));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Outputs of the stair construction commute with α, are unique per candidate,
    /// preserve the periodic structure and add their slopes.
    #[test]
    fn stair_outputs_behave(seed in any::<u64>(), k in -3i64..4) {
        let e = Element::random(2, 4, seed);
        let rp = make_revealing(&e).unwrap();
        let fg = build_flow_graph(&rp);
        let Some(c) = fg.components.iter().find(|c| c.kind == ComponentKind::NonTorsion) else {
            return Ok(());
        };
        let base = c.vertices.iter().map(|&v| &fg.vertices[v]).find(|v| !v.points.is_empty()
            && rp.repellers().any(|s| s.orbit == v.points)).unwrap().points[0].clone();
        let cand = StairCandidate { source: base.clone(), target: base.clone(), exponent: k };
        let Ok(g) = stair_extend(&e, &cand, 8) else { return Ok(()) };
        prop_assert_eq!(Ok(g.clone()), stair_extend(&e, &cand, 8));
        prop_assert!(g.commutes_with(&e));
        let reps: Vec<Point> = rp.repellers().flat_map(|s| s.orbit.clone()).collect();
        let atts: Vec<Point> = rp.attractors().flat_map(|s| s.orbit.clone()).collect();
        for r in &reps {
            prop_assert!(reps.contains(&g.apply_point(r)));
        }
        for a in &atts {
            prop_assert!(atts.contains(&g.apply_point(a)));
        }
        let s1 = s_exponent(&g, &rp).unwrap();
        let s2 = s_exponent(&g.compose(&e).unwrap(), &rp).unwrap();
        prop_assert_eq!(s2, s1 + s_exponent(&e, &rp).unwrap());
    }
}

#[test]
fn swap_maps_wing_onto_wing() {
    let mu = samples::mu();
    let rp = make_revealing(&mu).unwrap();
    let fg = build_flow_graph(&rp);
    let classes = vn::centralizer::icc_partition(&fg, &mu, 8).unwrap();
    let swap = &classes[0].swaps[0];
    let (a, b) = (&fg.components[classes[0].members[0]].support, &fg.components[classes[0].members[1]].support);
    for cone in &a.cones {
        let img = swap.expand_to_contain(cone);
        for (d, r) in img.rules() {
            if cone.is_prefix_of(d) {
                assert!(cone_in_union(&b.cones, r, 2));
            }
        }
    }
    // cycle-length separation: the periodic points keep their orbit lengths
    for s in rp.spines.iter() {
        for p in &s.orbit {
            let q = swap.apply_point(p);
            let t = rp.spines.iter().find(|t| t.orbit.contains(&q)).unwrap();
            assert_eq!(t.orbit.len(), s.orbit.len());
            assert_eq!(t.is_repeller(), s.is_repeller());
        }
    }
}
