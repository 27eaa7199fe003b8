use std::collections::HashSet;

use gpaley_core::perm::{affine_generators, agl_one, translations, wreath_product_action};
use gpaley_core::{
    automorphism_group, build_field, color_automorphism_group, Graph, Permutation, PermutationGroup, SearchOptions,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every element of the group, by closing the generators under products.
/// Gives up (None) past `limit` elements.
fn enumerate_group(degree: usize, gens: &[Permutation], limit: usize) -> Option<HashSet<Vec<usize>>> {
    let id: Vec<usize> = (0..degree).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y: Vec<usize> = x.iter().map(|&i| g.apply(i)).collect();
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push(y);
            }
        }
    }
    Some(seen)
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::from_images(v).unwrap()
}

/// A random permutation with small support, so generated groups stay small.
fn random_sparse_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    let m = rng.gen_range(2..=4.min(n));
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let pts = &pts[..m];
    for (i, &x) in pts.iter().enumerate() {
        v[x] = pts[(i + 1) % m];
    }
    Permutation::from_images(v).unwrap()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut v: Vec<usize> = (0..n).collect();
    fn heap(k: usize, v: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, v, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            v.swap(j, k - 1);
        }
    }
    heap(n, &mut v, &mut out);
    out
}

fn brute_force_automorphisms(g: &Graph) -> usize {
    all_permutations(g.n()).iter().filter(|p| g.is_automorphism(p)).count()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

#[test]
fn schreier_sims_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for trial in 0..300 {
        let n = rng.gen_range(3..=12);
        let count = rng.gen_range(1..=3);
        let gens: Vec<Permutation> = (0..count)
            .map(|_| if n <= 8 { random_perm(&mut rng, n) } else { random_sparse_perm(&mut rng, n) })
            .collect();
        let Some(elements) = enumerate_group(n, &gens, 100_000) else { continue };
        let group = PermutationGroup::new(n, gens).unwrap();
        assert_eq!(group.order(), BigUint::from(elements.len()), "trial {trial}");
        // Membership agrees on a sample of all permutations.
        for _ in 0..20 {
            let p = random_perm(&mut rng, n);
            assert_eq!(group.contains(&p).unwrap(), elements.contains(&p.images()), "trial {trial}");
        }
        for e in elements.iter().take(20) {
            assert!(group.contains(&Permutation::from_images(e.clone()).unwrap()).unwrap());
        }
        checked += 1;
    }
    assert!(checked > 200, "only {checked} groups were small enough");
}

#[test]
fn structured_groups_match_enumeration() {
    let f = build_field(2, 5).unwrap();
    let cases: Vec<(&str, PermutationGroup)> = vec![
        ("AGL(1,32)", agl_one(&f)),
        ("T(32)", translations(&f)),
        ("affine k=31", affine_generators(&f, 31).unwrap()),
        ("S4 wr S2", wreath_product_action(4, 2, 1 << 20).unwrap()),
        ("S3 wr S3", wreath_product_action(3, 3, 1 << 20).unwrap()),
        ("A7", PermutationGroup::alternating(7)),
        ("C11", PermutationGroup::cyclic(11)),
    ];
    for (name, group) in cases {
        let elements = enumerate_group(group.degree(), group.generators(), 100_000).unwrap();
        assert_eq!(group.order(), BigUint::from(elements.len()), "{name}");
    }
}

#[test]
fn orbit_stabilizer_holds() {
    let f = build_field(3, 3).unwrap();
    let groups = [
        agl_one(&f),
        affine_generators(&f, 2).unwrap(),
        wreath_product_action(3, 3, 1 << 20).unwrap(),
        PermutationGroup::symmetric(9),
    ];
    for group in &groups {
        for point in [0, 1, group.degree() - 1] {
            let orbit = group.orbit(point).len();
            let stab = group.stabilizer(point).unwrap();
            assert_eq!(stab.order() * orbit, group.order());
            assert!(stab.generators().iter().all(|g| g.apply(point) == point));
            assert!(stab.is_subgroup_of(group).unwrap());
        }
    }
}

#[test]
fn derived_series_of_known_groups() {
    let orders = |g: &PermutationGroup| g.derived_series_orders().unwrap();
    let s4 = PermutationGroup::symmetric(4);
    let expected: Vec<BigUint> = [24u32, 12, 4, 1].iter().map(|&x| x.into()).collect();
    assert_eq!(orders(&s4), expected);
    let s6 = PermutationGroup::symmetric(6);
    let expected: Vec<BigUint> = [720u32, 360].iter().map(|&x| x.into()).collect();
    assert_eq!(orders(&s6), expected);
}

#[test]
fn primitivity_of_known_groups() {
    let f = build_field(2, 4).unwrap();
    assert!(agl_one(&f).is_primitive().unwrap());
    // Multiplying by GF(4)* only keeps the GF(4)-lines as blocks.
    assert!(!affine_generators(&f, 5).unwrap().is_primitive().unwrap());
    // Product action is primitive exactly when the factor degree is at least 3.
    assert!(wreath_product_action(3, 2, 1 << 20).unwrap().is_primitive().unwrap());
    assert!(!wreath_product_action(2, 2, 1 << 20).unwrap().is_primitive().unwrap());
    assert!(PermutationGroup::alternating(9).is_primitive().unwrap());
    assert!(!PermutationGroup::cyclic(9).is_primitive().unwrap());
    assert!(PermutationGroup::cyclic(7).is_primitive().unwrap());
}

#[test]
fn search_matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..120 {
        let n = rng.gen_range(1..=8);
        let density = [0.2, 0.5, 0.8][trial % 3];
        let g = random_graph(&mut rng, n, density);
        let group = automorphism_group(&g, &SearchOptions::automorphism()).unwrap();
        assert_eq!(group.order(), BigUint::from(brute_force_automorphisms(&g)), "trial {trial}: {}", g.to_graph6());
        assert!(group.generators().iter().all(|p| g.is_automorphism(&p.images())));
    }
}

#[test]
fn search_matches_brute_force_on_symmetric_graphs() {
    let cube = Graph::from_edges(
        8,
        &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
    )
    .unwrap();
    let graphs = [Graph::complete(8), Graph::empty(7), Graph::cycle(8), Graph::cycle(7), cube];
    for g in &graphs {
        let group = automorphism_group(g, &SearchOptions::automorphism()).unwrap();
        assert_eq!(group.order(), BigUint::from(brute_force_automorphisms(g)), "{}", g.to_graph6());
    }
}

#[test]
fn coloured_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..60 {
        let n = rng.gen_range(2..=6);
        let colours = rng.gen_range(1..=3u8);
        let mut coloring = vec![0u8; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let c = rng.gen_range(1..=colours);
                coloring[u * n + v] = c;
                coloring[v * n + u] = c;
            }
        }
        let expected = all_permutations(n)
            .iter()
            .filter(|p| (0..n).all(|u| (0..n).all(|v| coloring[u * n + v] == coloring[p[u] * n + p[v]])))
            .count();
        let group = color_automorphism_group(n, &coloring, &SearchOptions::automorphism()).unwrap();
        assert_eq!(group.order(), BigUint::from(expected), "trial {trial}");
    }
}

#[test]
fn isomorphism_search_finds_relabelled_copies() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let n = rng.gen_range(5..=30);
        let g = random_graph(&mut rng, n, 0.4);
        let p = random_perm(&mut rng, n);
        let h = g.relabeled(&p.images()).unwrap();
        let map = gpaley_core::is_isomorphic(&g, &h).unwrap().expect("relabelled copy");
        assert!(g.is_isomorphism_to(&h, &map));
    }
    // C6 and two triangles have the same degree sequence.
    let c6 = Graph::cycle(6);
    let triangles = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
    assert!(gpaley_core::is_isomorphic(&c6, &triangles).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_right_action(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_perm(&mut rng, n), random_perm(&mut rng, n));
        let ab = a.then(&b);
        for x in 0..n {
            prop_assert_eq!(ab.apply(x), b.apply(a.apply(x)));
        }
        prop_assert!(a.then(&a.inverse()).is_identity());
        let conj = b.conjugate_by(&a);
        prop_assert_eq!(conj, a.inverse().then(&b).then(&a));
    }

    #[test]
    fn group_order_is_relabel_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 9;
        let gens: Vec<Permutation> = (0..2).map(|_| random_sparse_perm(&mut rng, n)).collect();
        let c = random_perm(&mut rng, n);
        let conj: Vec<Permutation> = gens.iter().map(|g| g.conjugate_by(&c)).collect();
        let g1 = PermutationGroup::new(n, gens).unwrap();
        let g2 = PermutationGroup::new(n, conj).unwrap();
        prop_assert_eq!(g1.order(), g2.order());
    }
}
