//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

use std::time::Instant;

use ambit_core::amenability::{is_extremely_amenable_finite, ordered_rigidity_check, preserves_linear_order};
use ambit_core::canon::are_isomorphic;
use ambit_core::catalog::catalog;
use ambit_core::class::{class_by_name, shipped_classes};
use ambit_core::dynamics::{is_minimal, minimal_flow_check_no, GroupAction};
use ambit_core::fraisse::fraisse_grid;
use ambit_core::order::{
    all_linear_orders, check_order_forgetful, natural_order_vs, natural_orders_boolean, ordered_bases, OrderClass,
};
use ambit_core::perm::{Perm, PermGroup};
use ambit_core::ramsey::{arrow_holds, find_monochromatic_copy, minimal_arrow_witness, validate_certificate, Coloring, Verdict};
use ambit_core::samuel::{samuel_check, SubgroupFamily};
use ambit_core::structure::{FinStructure, StructKind};
use ambit_core::substructure::{automorphism_group, enumerate_copies};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {id} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

#[test]
fn criterion_3_fraisse_grid() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut instances = 0;
    for class in shipped_classes() {
        let r = fraisse_grid(&class, class.size_bound).unwrap();
        eprintln!("{} bound {}: hd {} jep {} ap {} in {:?}", r.class, r.bound, r.hereditary.members_checked, r.jep_instances, r.ap_instances, t.elapsed());
        instances += r.jep_instances + r.ap_instances;
        if !r.passed() {
            failures.push(format!("{}: {:?}", r.class, r.first_failure));
        }
    }
    report(
        3,
        "fraisse grid",
        failures.is_empty(),
        &format!("{instances} instances, {} failing classes {:?}, {:.1?}", failures.len(), failures, t.elapsed()),
    );
}

/// Every 2-coloring of the copies of `a` in `c`, tested for a monochromatic copy of `b`.
fn bad_colorings(c: &FinStructure, b: &FinStructure, a: &FinStructure) -> Vec<Vec<u8>> {
    let m = enumerate_copies(a, c).unwrap().len();
    (0u32..1 << m)
        .map(|mask| (0..m).map(|i| (mask >> (m - 1 - i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|colors| {
            let coloring = Coloring { k: 2, colors: colors.clone() };
            find_monochromatic_copy(c, b, a, &coloring).unwrap().is_none()
        })
        .collect()
}

#[test]
fn criterion_1_ramsey_arrows() {
    let (a, b) = (FinStructure::set(2), FinStructure::set(3));
    let mut notes = Vec::new();
    let mut ok = true;

    let t = Instant::now();
    let c6 = FinStructure::set(6);
    let pos = arrow_holds(&c6, &b, &a, 2).unwrap();
    let secs6 = t.elapsed().as_secs_f64();
    ok &= pos.verdict == Verdict::Positive && secs6 <= 60.0;
    notes.push(format!("6-set {:?} in {secs6:.2}s", pos.verdict));
    // oracle: none of the 2^15 colorings avoids a monochromatic triangle
    let oracle6 = bad_colorings(&c6, &b, &a);
    ok &= oracle6.is_empty();

    let t = Instant::now();
    let c5 = FinStructure::set(5);
    let neg = arrow_holds(&c5, &b, &a, 2).unwrap();
    let secs5 = t.elapsed().as_secs_f64();
    let coloring = neg.bad_coloring.clone().unwrap_or_default();
    ok &= neg.verdict == Verdict::Negative && secs5 <= 60.0 && coloring.len() == 10;
    ok &= validate_certificate(&c5, &b, &a, &neg).is_ok();
    // oracle: the certificate is the lex-least of the exhaustively found bad colorings
    let oracle5 = bad_colorings(&c5, &b, &a);
    ok &= oracle5.first() == Some(&coloring);
    notes.push(format!("5-set {:?} in {secs5:.2}s, {} bad colorings of 1024", neg.verdict, oracle5.len()));

    let sets = class_by_name("sets").unwrap();
    let w = minimal_arrow_witness(&sets, &b, &a, 2, 6).unwrap();
    ok &= w.as_ref().map(|w| w.len()) == Some(6);
    notes.push(format!("minimal witness {:?}", w.map(|w| w.len())));
    report(1, "ramsey arrows", ok, &notes.join("; "));
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(k as usize).copied().unwrap_or(0)
}

fn stirling2(n: u64, k: u64) -> u64 {
    match (n, k) {
        (0, 0) => 1,
        (0, _) | (_, 0) => 0,
        _ => k * stirling2(n - 1, k) + stirling2(n - 1, k - 1),
    }
}

fn gaussian(d: u32, k: u32, p: u64) -> u64 {
    let num: u64 = (0..k).map(|i| p.pow(d - i) - 1).product();
    let den: u64 = (0..k).map(|i| p.pow(k - i) - 1).product();
    num / den
}

#[test]
fn criterion_2_counting_oracles() {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in 1..=8 {
        for k in 1..=n {
            let got = enumerate_copies(&FinStructure::set(k), &FinStructure::set(n)).unwrap().len() as u64;
            checked += 1;
            if got != binomial(n as u64, k as u64) {
                mismatches.push(format!("set {k} in {n}: {got}"));
            }
        }
    }
    for m in 1..=5u32 {
        for k in 1..=m {
            let got = enumerate_copies(&FinStructure::boolean(k).unwrap(), &FinStructure::boolean(m).unwrap())
                .unwrap()
                .len() as u64;
            checked += 1;
            if got != stirling2(m as u64, k as u64) {
                mismatches.push(format!("B({k}) in B({m}): {got}"));
            }
        }
    }
    for p in [2u32, 3] {
        for d in 0..=4u32 {
            for k in 0..=d {
                let got = enumerate_copies(
                    &FinStructure::vector_space(p, k).unwrap(),
                    &FinStructure::vector_space(p, d).unwrap(),
                )
                .unwrap()
                .len() as u64;
                checked += 1;
                if got != gaussian(d, k, p as u64) {
                    mismatches.push(format!("F_{p}^{k} in F_{p}^{d}: {got}"));
                }
            }
        }
    }
    report(2, "counting oracles", mismatches.is_empty(), &format!("{checked} counts, mismatches {mismatches:?}"));
}

#[test]
fn criterion_4_order_expansion() {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in 1..=4u32 {
        let b = FinStructure::boolean(m).unwrap();
        let orders = natural_orders_boolean(&b).unwrap();
        let factorial: usize = (1..=m as usize).product();
        let mut rankings: Vec<Vec<u32>> = orders.iter().map(|o| o.ranking().to_vec()).collect();
        rankings.sort();
        rankings.dedup();
        let iso = orders.iter().all(|o| are_isomorphic(&orders[0], o).unwrap().is_some());
        ok &= orders.len() == factorial && rankings.len() == factorial && iso;
        notes.push(format!("B({m}): {} natural orders", rankings.len()));
    }
    let graphs = check_order_forgetful(OrderClass::AllOrders(StructKind::Graph), 3, 2).unwrap();
    let witness = graphs.counterexample.clone();
    let explicit = witness.as_ref().is_some_and(|(x, y)| {
        x.len() == 3
            && y.len() == 3
            && are_isomorphic(&x.reduct(), &y.reduct()).unwrap().is_some()
            && are_isomorphic(x, y).unwrap().is_none()
    });
    ok &= explicit;
    // independent witness: the path 0-1-2 ordered with its middle vertex first vs second
    let path = FinStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
    let middle_first = path.with_order(vec![1, 0, 2]).unwrap();
    let middle_second = path.with_order(vec![0, 1, 2]).unwrap();
    ok &= are_isomorphic(&middle_first, &middle_second).unwrap().is_none();
    notes.push(format!("ordered graphs counterexample on 3 vertices: {explicit}"));
    let chains = check_order_forgetful(OrderClass::AllOrders(StructKind::Set), 6, 2).unwrap();
    ok &= chains.holds();
    notes.push(format!("chains over sets forgetful up to 6 ({} checked)", chains.checked));
    report(4, "order expansion", ok, &notes.join("; "));
}

#[test]
fn criterion_5_minimality_criteria_agree() {
    let mut actions: Vec<(String, GroupAction)> = Vec::new();
    for n in 1..=4 {
        let orders = all_linear_orders(n).unwrap();
        actions.push((format!("S_{n} on LO({n})"), GroupAction::on_orders(PermGroup::symmetric(n).unwrap(), &orders).unwrap()));
    }
    for (name, g) in catalog().unwrap() {
        let n = g.degree();
        if n > 6 {
            continue;
        }
        actions.push((format!("{name} on points"), GroupAction::natural(g.clone()).unwrap()));
        // action on point subsets: the empty set is a fixed point, so never minimal for n ≥ 1
        if n <= 5 {
            let act = |p: &Perm, x: usize| Ok(p.image_of_set(&(0..n as u32).filter(|&i| x >> i & 1 == 1).collect::<Vec<_>>()).iter().fold(0, |acc, &i| acc | 1 << i));
            actions.push((format!("{name} on subsets"), GroupAction::new(g.clone(), 1 << n, act).unwrap()));
        }
    }
    // an intransitive action: a transposition on 3 points
    let swap = PermGroup::generate(3, vec![Perm::from_images(vec![1, 0, 2]).unwrap()]).unwrap();
    actions.push(("transposition on 3 points".into(), GroupAction::natural(swap).unwrap()));

    let mut minimal = 0;
    let mut failures = Vec::new();
    for (name, action) in &actions {
        match is_minimal(action) {
            Ok(r) => {
                if r.minimal {
                    minimal += 1;
                }
                // independent orbit oracle
                let seen: std::collections::BTreeSet<usize> = (0..action.group().order()).map(|g| action.act(g, 0)).collect();
                if r.minimal != (seen.len() == action.points()) {
                    failures.push(name.clone());
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    report(
        5,
        "minimality criteria agree",
        actions.len() >= 20 && failures.is_empty() && minimal < actions.len(),
        &format!("{} actions, {minimal} minimal, failures {failures:?}", actions.len()),
    );
}

#[test]
fn criterion_6_main_theorem_finite() {
    let t = Instant::now();
    let mut instances: Vec<(String, FinStructure, OrderClass)> = Vec::new();
    for n in 1..=5 {
        instances.push((format!("set {n}"), FinStructure::set(n), OrderClass::AllOrders(StructKind::Set)));
    }
    for m in 1..=4 {
        instances.push((format!("B({m})"), FinStructure::boolean(m).unwrap(), OrderClass::NaturalBoolean));
    }
    for d in 0..=3 {
        instances.push((format!("F_2^{d}"), FinStructure::vector_space(2, d).unwrap(), OrderClass::NaturalVector));
    }
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, s, class) in &instances {
        let g = automorphism_group(s).unwrap();
        let r = minimal_flow_check_no(s, *class, &g).unwrap();
        ok &= r.passed();
        if *class == OrderClass::AllOrders(StructKind::Set) {
            // the bound |A|! is attained or beaten
            let factorial = |k: usize| (1..=k).product::<usize>();
            ok &= r.records.iter().all(|rec| rec.index == factorial(rec.substructure.len()) && rec.worst_bound <= rec.index);
        }
        notes.push(format!(
            "{name}: |NO|={} checks={} index violations={} |Aut(A)| violations={}",
            r.no_points, r.bound_checks, r.bound_violations, r.aut_bound_violations
        ));
    }
    notes.push(format!("{:.1?}", t.elapsed()));
    report(6, "main theorem finite analog", ok, &notes.join("; "));
}

#[test]
fn criterion_7_samuel_suite() {
    let t = Instant::now();
    let mut instances = 0;
    let mut failures = Vec::new();
    for (name, g) in catalog().unwrap() {
        let families = SubgroupFamily::all(&g).unwrap();
        let results: Vec<_> = {
            use rayon::prelude::*;
            families.par_iter().map(|f| (f.members(), samuel_check(f))).collect()
        };
        for (members, r) in results {
            instances += 1;
            match r {
                Ok(r) if r.passed() => {}
                Ok(_) => failures.push(format!("{name} {members:?}")),
                Err(e) => failures.push(format!("{name} {members:?}: {e}")),
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        7,
        "samuel suite",
        failures.is_empty() && secs <= 300.0,
        &format!("{instances} (G, N) instances, failures {failures:?}, {secs:.1}s"),
    );
}

/// All subgroups of `S_n`, as element-index bitsets over at most 128 elements.
fn subgroups_of_symmetric(n: usize) -> Vec<PermGroup> {
    let s = PermGroup::symmetric(n).unwrap();
    let closure = |seed: u128| -> u128 {
        let mut cur = seed | 1 << s.identity_index();
        loop {
            let mut next = cur;
            for x in (0..s.order()).filter(|&x| cur >> x & 1 == 1) {
                for y in (0..s.order()).filter(|&y| cur >> y & 1 == 1) {
                    next |= 1 << s.mul_index(x, y);
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    };
    let mut found = std::collections::BTreeSet::new();
    let mut frontier = vec![closure(0)];
    found.insert(frontier[0]);
    while let Some(h) = frontier.pop() {
        for g in (0..s.order()).filter(|&g| h >> g & 1 == 0) {
            let k = closure(h | 1 << g);
            if found.insert(k) {
                frontier.push(k);
            }
        }
    }
    found
        .into_iter()
        .map(|bits| {
            let elems = (0..s.order()).filter(|&i| bits >> i & 1 == 1).map(|i| s.element(i).clone()).collect();
            PermGroup::from_elements(n, elems).unwrap()
        })
        .collect()
}

#[test]
fn criterion_8_rigidity_and_amenability() {
    use rayon::prelude::*;
    let mut ok = true;
    let mut notes = Vec::new();

    let mut rigid = 0;
    for m in 1..=4 {
        for o in natural_orders_boolean(&FinStructure::boolean(m).unwrap()).unwrap() {
            ok &= ordered_rigidity_check(&o).unwrap();
            rigid += 1;
        }
    }
    for p in [2, 3] {
        for d in 0..=3 {
            let v = FinStructure::vector_space(p, d).unwrap();
            let bases = ordered_bases(&v);
            let all = bases.par_iter().all(|b| ordered_rigidity_check(&natural_order_vs(&v, b).unwrap()).unwrap());
            ok &= all;
            rigid += bases.len();
        }
    }
    notes.push(format!("{rigid} naturally ordered structures rigid"));

    let mut agree = 0;
    for (name, g) in catalog().unwrap() {
        match is_extremely_amenable_finite(&g) {
            Ok(r) if r.cross_check && r.verdict == (g.order() == 1) => agree += 1,
            other => {
                ok = false;
                notes.push(format!("{name}: {other:?}"));
            }
        }
    }
    notes.push(format!("{agree} catalog groups agree"));

    let mut nontrivial = 0;
    for n in 1..=5 {
        for h in subgroups_of_symmetric(n).into_iter().filter(|h| !h.is_trivial()) {
            ok &= preserves_linear_order(&h).unwrap().is_none();
            nontrivial += 1;
        }
    }
    notes.push(format!("{nontrivial} nontrivial subgroups of S_n (n ≤ 5) preserve no order"));
    report(8, "rigidity and amenability", ok, &notes.join("; "));
}
