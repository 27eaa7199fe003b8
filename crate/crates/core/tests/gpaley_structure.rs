use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use gpaley_core::graph::hamming_graph;
use gpaley_core::perm::affine_generators;
use gpaley_core::{
    build_field, is_isomorphic, Classification, Error, FieldElement, FieldSpec, GPaleyParams, ParamSpec,
    ParamViolation, Variant,
};

/// `d` is a nonzero k-th power iff `d^((q-1)/k) = 1`.
fn in_connection_set(f: &FieldSpec, k: u64, d: FieldElement) -> bool {
    !d.is_zero() && f.pow(d, ((f.q() - 1) / k) as i64).unwrap() == f.one()
}

/// Component count by BFS over the field, with adjacency from the power test.
fn bfs_component_count(f: &FieldSpec, k: u64) -> usize {
    let s: Vec<FieldElement> = f.elements().filter(|&d| in_connection_set(f, k, d)).collect();
    let mut seen = vec![false; f.size()];
    let mut count = 0;
    for start in 0..f.size() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([f.element(start).unwrap()]);
        while let Some(x) = queue.pop_front() {
            for &d in &s {
                let y = f.add(x, d);
                if !std::mem::replace(&mut seen[y.index()], true) {
                    queue.push_back(y);
                }
            }
        }
    }
    count
}

fn valid_params(max_q: u64) -> Vec<GPaleyParams> {
    ParamSpec::enumerate(max_q).into_iter().map(|s| GPaleyParams::new(s.p(), s.degree(), s.k()).unwrap()).collect()
}

#[test]
fn graph_edges_are_kth_power_differences() {
    for params in valid_params(64) {
        let f = params.field();
        let g = params.build().unwrap();
        for x in f.elements() {
            for y in f.elements() {
                let expected = x != y && in_connection_set(f, params.k(), f.sub(x, y));
                assert_eq!(g.has_edge(x.index(), y.index()), expected, "{}", params.spec());
            }
        }
        assert_eq!(g.regular_valency(), Some(params.valency() as usize));
    }
}

#[test]
fn connectivity_criterion_matches_bfs() {
    for params in valid_params(256) {
        let components = bfs_component_count(params.field(), params.k());
        assert_eq!(params.is_connected_by_criterion(), components == 1, "{}", params.spec());
        let classification = params.classify();
        if let Ok(Classification { variant: Variant::Disconnected { component_count, .. }, .. }) = classification {
            assert_eq!(component_count as usize, components, "{}", params.spec());
        }
    }
}

#[test]
fn span_degree_matches_arithmetic_and_closure() {
    for params in valid_params(256) {
        let a = params.span_field_degree().unwrap();
        assert_eq!(a, params.spec().span_degree_by_arithmetic(), "{}", params.spec());
        // Closure of S under + and * has p^a elements.
        let span = params.span(&params.connecting_set());
        assert_eq!(span.len() as u64, params.p().pow(a), "{}", params.spec());
    }
}

#[test]
fn disconnected_graphs_split_into_subfield_cosets() {
    let mut seen = 0;
    for params in valid_params(256) {
        let Ok(c) = params.classify() else { continue };
        let Variant::Disconnected { a, k_prime, component_count } = c.variant else {
            assert!(matches!(params.decompose(), Err(Error::IsConnected)));
            continue;
        };
        let d = params.decompose().unwrap();
        assert_eq!((d.a, d.k_prime, d.component_count), (a, k_prime, component_count));
        assert_eq!(d.translates.len() as u64, component_count);
        let f = params.field();
        let sub: HashSet<FieldElement> = f.subfield_elements(a).unwrap().into_iter().collect();
        // Translates lie in distinct cosets.
        for (i, &s) in d.translates.iter().enumerate() {
            for &t in &d.translates[..i] {
                assert!(!sub.contains(&f.sub(s, t)));
            }
        }
        let model = gpaley_core::gpaley::subfield_model(params.p(), a, k_prime).unwrap();
        let map = is_isomorphic(&d.component, &model).unwrap().expect("component matches model");
        assert!(d.component.is_isomorphism_to(&model, &map));
        seen += 1;
    }
    assert!(seen > 10);
}

#[test]
fn hamming_map_is_an_isomorphism() {
    let mut seen = 0;
    for params in valid_params(256) {
        let Ok(Classification { variant: Variant::Hamming { a, b }, .. }) = params.classify() else {
            assert!(params.hamming_isomorphism().is_err());
            continue;
        };
        let theta = params.hamming_isomorphism().unwrap();
        let f = params.field();
        let g = params.build().unwrap();
        let h = hamming_graph(params.p().pow(a) as usize, b as usize, 1 << 20).unwrap();
        let map = theta.vertex_map();
        assert!(g.is_isomorphism_to(&h, &map), "{}", params.spec());
        // Θ is additive and sends the basis to unit vectors.
        for x in f.elements().step_by(7) {
            for y in f.elements().step_by(11) {
                let sum: Vec<FieldElement> =
                    theta.tuple(x).iter().zip(theta.tuple(y)).map(|(&u, v)| f.add(u, v)).collect();
                assert_eq!(theta.tuple(f.add(x, y)), sum);
            }
        }
        for (j, &x) in theta.basis.iter().enumerate() {
            let t = theta.tuple(x);
            assert!(t.iter().enumerate().all(|(i, &c)| c == if i == j { f.one() } else { f.zero() }));
        }
        seen += 1;
    }
    assert!(seen >= 3, "{seen}");
}

#[test]
fn affine_group_is_arc_transitive() {
    for params in valid_params(128) {
        let g = params.build().unwrap();
        let group = affine_generators(params.field(), params.k()).unwrap();
        assert!(group.generators().iter().all(|p| g.is_automorphism(&p.images())));
        let arcs = params.q() * params.valency();
        let one = params.field().one().index();
        assert_eq!(group.pair_orbit_size((0, one)) as u64, arcs, "{}", params.spec());
    }
}

#[test]
fn parameter_validation() {
    assert!(matches!(ParamSpec::new(4, 1, 3), Err(Error::NotPrime(4))));
    assert!(matches!(ParamSpec::new(3, 2, 1), Err(Error::InvalidParams(ParamViolation::KTooSmall { .. }))));
    assert!(matches!(ParamSpec::new(3, 2, 3), Err(Error::InvalidParams(ParamViolation::NotADivisor { .. }))));
    // q = 7, k = 2: valency 3 is odd in odd characteristic.
    assert!(matches!(ParamSpec::new(7, 1, 2), Err(Error::InvalidParams(ParamViolation::Parity { .. }))));
    assert!(ParamSpec::new(2, 3, 7).is_ok());
    assert!(matches!(GPaleyParams::with_bound(2, 12, 3, 1024), Err(Error::BoundExceeded { .. })));
}

#[test]
fn enumeration_is_exactly_the_valid_pairs() {
    let listed: HashSet<(u64, u64)> = ParamSpec::enumerate(200).iter().map(|s| (s.q(), s.k())).collect();
    let mut expected = HashSet::new();
    for q in 2..=200u64 {
        let Some(p) = (2..=q).find(|d| q % d == 0) else { continue };
        let mut r = q;
        while r % p == 0 {
            r /= p;
        }
        if r != 1 {
            continue;
        }
        for k in 2..q {
            if (q - 1) % k == 0 && (q % 2 == 0 || ((q - 1) / k) % 2 == 0) {
                expected.insert((q, k));
            }
        }
    }
    assert_eq!(listed, expected);
}

#[test]
fn classification_round_trips_through_json() {
    for spec in ParamSpec::enumerate(256) {
        let Ok(c) = spec.classify() else { continue };
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["schema"], "gpaley/1");
        assert_eq!(json["variant"], c.variant.name());
        let back: Classification = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }
}

#[test]
fn from_field_reuses_the_field() {
    let f = Arc::new(build_field(3, 4).unwrap());
    let params = GPaleyParams::from_field(f.clone(), 20).unwrap();
    assert!(Arc::ptr_eq(params.field(), &f));
    assert_eq!(params.valency(), 4);
}
