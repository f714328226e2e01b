//! Property tests for structural invariants.

use ambit_core::canon::{are_isomorphic, canonical_encoding};
use ambit_core::dynamics::{act_on_order, left_translate, return_set, syndetic_bound, GroupAction};
use ambit_core::embed::{check_embedding, enumerate_embeddings};
use ambit_core::order::all_linear_orders;
use ambit_core::perm::{Perm, PermGroup};
use ambit_core::ramsey::{arrow_holds, validate_certificate, Verdict};
use ambit_core::structure::FinStructure;
use ambit_core::substructure::{enumerate_copies, substructures};
use proptest::prelude::*;

fn pairs(n: usize) -> Vec<(u32, u32)> {
    (0..n as u32).flat_map(|i| (i + 1..n as u32).map(move |j| (i, j))).collect()
}

fn graph_strategy(max: usize) -> impl Strategy<Value = FinStructure> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), pairs(n).len()).prop_map(move |bits| {
            let edges: Vec<(u32, u32)> = pairs(n).into_iter().zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            FinStructure::graph(n, &edges).unwrap()
        })
    })
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn relabel(g: &FinStructure, p: &Perm) -> FinStructure {
    let edges: Vec<(u32, u32)> = pairs(g.len())
        .into_iter()
        .filter(|&(i, j)| g.adjacent(i, j))
        .map(|(i, j)| (p.apply(i), p.apply(j)))
        .collect();
    FinStructure::graph(g.len(), &edges).unwrap()
}

fn all_perms(n: usize) -> Vec<Vec<u32>> {
    all_linear_orders(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_encoding_is_relabeling_invariant((g, p) in graph_strategy(7).prop_flat_map(|g| { let n = g.len(); (Just(g), perm_strategy(n)) })) {
        let h = relabel(&g, &p);
        prop_assert_eq!(canonical_encoding(&g), canonical_encoding(&h));
        let iso = are_isomorphic(&g, &h).unwrap().unwrap();
        prop_assert!(check_embedding(&g, &h, &iso).is_ok());
    }

    #[test]
    fn isomorphism_matches_brute_force(a in graph_strategy(5), b in graph_strategy(5)) {
        let brute = a.len() == b.len() && all_perms(a.len()).iter().any(|p| check_embedding(&a, &b, p).is_ok());
        prop_assert_eq!(are_isomorphic(&a, &b).unwrap().is_some(), brute);
        prop_assert_eq!(canonical_encoding(&a) == canonical_encoding(&b), brute);
    }

    #[test]
    fn embeddings_match_brute_force(a in graph_strategy(3), b in graph_strategy(5)) {
        let found: Vec<Vec<u32>> = enumerate_embeddings(&a, &b).unwrap().iter().map(|e| e.map().to_vec()).collect();
        // brute force over all injective maps
        let n = b.len() as u32;
        let mut brute = Vec::new();
        let mut stack = vec![Vec::<u32>::new()];
        while let Some(m) = stack.pop() {
            if m.len() == a.len() {
                if check_embedding(&a, &b, &m).is_ok() {
                    brute.push(m);
                }
                continue;
            }
            for y in 0..n {
                if !m.contains(&y) {
                    let mut next = m.clone();
                    next.push(y);
                    stack.push(next);
                }
            }
        }
        brute.sort();
        prop_assert_eq!(found, brute);
    }

    #[test]
    fn copies_are_the_isomorphic_substructures(a in graph_strategy(3), b in graph_strategy(6)) {
        let copies = enumerate_copies(&a, &b).unwrap();
        let target = canonical_encoding(&a);
        let mut expected: Vec<Vec<u32>> = substructures(&b)
            .unwrap()
            .into_iter()
            .filter(|s| canonical_encoding(&s.structure) == target)
            .map(|s| s.elements())
            .collect();
        expected.sort();
        prop_assert_eq!(copies.copies, expected);
    }

    #[test]
    fn order_action_is_an_action(g in perm_strategy(6), h in perm_strategy(6), ord in perm_strategy(6)) {
        let ord = ord.images().to_vec();
        let lhs = act_on_order(&g.compose(&h), &ord).unwrap();
        let rhs = act_on_order(&g, &act_on_order(&h, &ord).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn perm_inverse_and_associativity(a in perm_strategy(7), b in perm_strategy(7), c in perm_strategy(7)) {
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn syndetic_bound_is_a_cover(mask in 1u32..1 << 12) {
        let g = PermGroup::generate(4, vec![Perm::from_images(vec![1, 2, 0, 3]).unwrap(), Perm::from_images(vec![1, 0, 3, 2]).unwrap()]).unwrap();
        prop_assert_eq!(g.order(), 12);
        let set: Vec<usize> = (0..12).filter(|&i| mask >> i & 1 == 1).collect();
        let t = syndetic_bound(&g, &set).unwrap();
        // lower bound by counting, upper bound from the set size
        prop_assert!(t * set.len() >= 12);
        prop_assert!(t <= 12 - set.len() + 1);
        // no cover by t - 1 translates: check all (t-1)-subsets when small
        if (2..=4).contains(&t) {
            let mut idx: Vec<usize> = (0..t - 1).collect();
            loop {
                let mut hit = [false; 12];
                for &x in &idx {
                    for s in left_translate(&g, x, &set) {
                        hit[s] = true;
                    }
                }
                prop_assert!(!hit.iter().all(|&h| h));
                let k = t - 1;
                let mut i = k;
                while i > 0 && idx[i - 1] == 12 - k + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }

    #[test]
    fn return_sets_translate(mask in 1u32..64, g in 0usize..6, x in 0usize..6) {
        let orders = all_linear_orders(3).unwrap();
        let action = GroupAction::on_orders(PermGroup::symmetric(3).unwrap(), &orders).unwrap();
        let o: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
        let mut go: Vec<usize> = o.iter().map(|&y| action.act(g, y)).collect();
        go.sort_unstable();
        prop_assert_eq!(return_set(&action, x, &go), left_translate(action.group(), g, &return_set(&action, x, &o)));
    }

    #[test]
    fn structures_roundtrip_json(g in graph_strategy(8), ord in perm_strategy(8)) {
        let back = FinStructure::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(&back, &g);
        let n = g.len();
        let mut ranking: Vec<u32> = ord.images().iter().copied().filter(|&x| (x as usize) < n).collect();
        // compress to a ranking of 0..n
        let mut sorted = ranking.clone();
        sorted.sort_unstable();
        for r in ranking.iter_mut() {
            *r = sorted.binary_search(r).unwrap() as u32;
        }
        let ordered = g.with_order(ranking).unwrap();
        prop_assert_eq!(FinStructure::from_json(&ordered.to_json()).unwrap(), ordered);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ramsey_certificates_revalidate(n in 3usize..=5, k in 2usize..=3) {
        let c = FinStructure::set(n);
        let (b, a) = (FinStructure::set(3), FinStructure::set(2));
        let cert = arrow_holds(&c, &b, &a, k).unwrap();
        prop_assert!(validate_certificate(&c, &b, &a, &cert).is_ok());
        prop_assert_eq!(cert.verdict, Verdict::Negative);
    }
}
