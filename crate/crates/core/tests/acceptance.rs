//! Exit-gate checks, one line per criterion. Every comparison is exact.

use std::time::{Duration, Instant};

use graphcsm::catalog::{self, connected_multigraphs};
use graphcsm::feynman::{
    c_to_csm, chi_identity_check, compute_c, compute_c_with, csm_to_c, delcon, doubling, goodform_closed,
    multi_edge_closed, multi_edge_recursion, CsmRecord, FeynmanPoly, Provenance, Registry,
};
use graphcsm::graphpoly::{graph_vars, psi_enumerate, psi_matrix_tree, psi_recursion};
use graphcsm::groebner::{ideal_membership, jacobian_generators};
use graphcsm::guards::Limits;
use graphcsm::multigraph::{EdgeClass, EdgeId, Multigraph};
use graphcsm::multipoly::MultiPoly;
use graphcsm::pointcount::{
    count_affine_with, count_full_enumeration_with, verify_doubling_star_with, verify_triple_recursion_with,
};
use graphcsm::{conditions, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Check = Result<String, String>;

fn f(s: &str) -> FeynmanPoly {
    FeynmanPoly::parse(s).expect("valid polynomial")
}

fn id(s: &str) -> EdgeId {
    EdgeId::new(s).expect("valid label")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < budget, || format!("took {spent:?}, budget {budget:?}"))
}

fn psi_three_way() -> Check {
    let start = Instant::now();
    let corpus = connected_multigraphs(6);
    for g in &corpus {
        let a = psi_enumerate::<Rational>(g).map_err(|e| e.to_string())?.polynomial;
        let b = psi_matrix_tree::<Rational>(g).map_err(|e| e.to_string())?.polynomial;
        let c = psi_recursion::<Rational>(g).polynomial;
        ensure(a == b && b == c, || format!("{}: {a} | {b} | {c}", g.to_text()))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{} graphs in {:?}", corpus.len(), start.elapsed()))
}

fn banana_closed_form() -> Check {
    let empty = Registry::empty();
    for n in 1..=8usize {
        let expected = &f(&format!("{n}*t^{}", n - 1)) + &(&FeynmanPoly::t() * &FeynmanPoly::t_plus(-1).pow(n - 1));
        let (c, d) = compute_c_with(&Multigraph::banana(n), &empty);
        ensure(c.as_ref() == Some(&expected), || format!("n = {n}: got {c:?}, trace {d:?}"))?;
    }
    Ok("n = 1..8 from deletion rules alone".into())
}

fn doubled_triangle_family() -> Check {
    let c_g = f("t^5 + 2*t^4 + 4*t^3 + 2*t^2");
    let c_del = f("(t+1)^2*t^2");
    let c_con = f("4*t^3 + t*(t-1)^3");
    let c_2e = f("t^6 + 2*t^5 + 7*t^4 + 2*t^3 + t^2 - t");

    // the seeds agree with the shipped fixtures and the derivation rules
    let g = catalog::triangle_two_doubled();
    let e5 = id("e5");
    let shipped = |h: &Multigraph| compute_c(h).0;
    ensure(shipped(&g) == Some(c_g.clone()), || "C of the base graph".into())?;
    ensure(shipped(&g.delete_edge(&e5).unwrap()) == Some(c_del), || "C of the deletion".into())?;
    ensure(shipped(&g.contract_edge(&e5).unwrap()) == Some(c_con.clone()), || "C of the contraction".into())?;
    ensure(shipped(&catalog::triangle_all_doubled()) == Some(c_2e.clone()), || "C of the doubled graph".into())?;

    for m in 1..=6usize {
        let k = BigInt::from(m - 1);
        let first = &(&f("(t^2 - t + 1)^2*t") * &FeynmanPoly::t_plus(-1).pow(m - 1));
        let inner = &f("4*t^3 + t^2 + 4*t - 1") + &f("t^3 + t^2 + 3*t - 1").scalar_mul(&k);
        let expected = first + &(&inner * &FeynmanPoly::monomial(m));
        let closed = multi_edge_closed(&c_g, &c_2e, &c_con, m).map_err(|e| e.to_string())?;
        ensure(closed == expected, || format!("m = {m}: closed form {closed}, expected {expected}"))?;
        let (pipeline, _) = compute_c(&g.multiply_edge(&e5, m).unwrap());
        ensure(pipeline.as_ref() == Some(&expected), || format!("m = {m}: pipeline {pipeline:?}"))?;
    }
    ensure(multi_edge_closed(&c_g, &c_2e, &c_con, 2).unwrap() == c_2e, || "m = 2".into())?;
    Ok("m = 1..6".into())
}

fn deletion_contraction_fixture() -> Check {
    let registry = Registry::shipped();
    let g = catalog::triangle_two_doubled();
    let e1 = id("e1");
    let int = registry
        .intersection(&g, &e1)
        .map_err(|e| e.to_string())?
        .ok_or("no intersection fixture for the doubled side")?;
    let (c_del, _) = compute_c(&g.delete_edge(&e1).unwrap());
    let c_del = c_del.ok_or("deletion blocked")?;
    let got = delcon(&int.c, &c_del);
    ensure(got == f("t^5 + 2*t^4 + 4*t^3 + 2*t^2"), || format!("delcon gave {got}"))?;

    let e5 = id("e5");
    let naive = doubling(
        &f("t^5 + 2*t^4 + 4*t^3 + 2*t^2"),
        &f("(t+1)^2*t^2"),
        &f("4*t^3 + t*(t-1)^3"),
    );
    ensure(naive == f("t^6 + 2*t^5 + 8*t^4 + 2*t^3 + t^2 - t"), || format!("doubling gave {naive}"))?;
    let truth = compute_c(&g.multiply_edge(&e5, 2).unwrap()).0.ok_or("doubled graph blocked")?;
    ensure(&naive - &truth == FeynmanPoly::monomial(4), || format!("difference {}", &naive - &truth))?;
    Ok("delcon matches; naive doubling overshoots by exactly t^4".into())
}

fn condition_i_verdicts() -> Check {
    let budget = Duration::from_secs(60);
    let start = Instant::now();
    let v = conditions::check_conditions(&catalog::triangle_two_doubled(), &id("e5")).map_err(|e| e.to_string())?;
    within(start, budget)?;
    ensure(v.condition_i == conditions::ConditionI::HoldsByMembership, || format!("{v:?}"))?;
    let t1 = start.elapsed();
    let start = Instant::now();
    let v = conditions::check_conditions(&catalog::k4_one_doubled(), &id("e7")).map_err(|e| e.to_string())?;
    within(start, budget)?;
    ensure(v.condition_i == conditions::ConditionI::FailsByMembership, || format!("{v:?}"))?;
    Ok(format!("holds in {t1:?}, fails in {:?}", start.elapsed()))
}

fn csm_conversion() -> Check {
    let rec = CsmRecord::new(7, &[7, 21, 29, 26, 12, 4], Provenance::Published);
    let c = csm_to_c(&rec);
    ensure(c == f("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"), || format!("got {c}"))?;
    let back = c_to_csm(&c, 7, Provenance::Published).map_err(|e| e.to_string())?;
    ensure(back == rec, || format!("round trip gave {back:?}"))?;
    Ok("C and round trip exact".into())
}

fn grothendieck_star() -> Check {
    let start = Instant::now();
    let limits = Limits::default();
    let mut checks = 0;
    for g in connected_multigraphs(5) {
        for e in g.edge_ids() {
            if matches!(g.classify_edge(e).unwrap(), EdgeClass::Bridge | EdgeClass::Loop) {
                continue;
            }
            for p in [2, 3, 5, 7] {
                let r = verify_doubling_star_with(&g, e, p, &limits).map_err(|e| e.to_string())?;
                ensure(r.holds, || format!("{} edge {e}, p = {p}: {r:?}", g.to_text()))?;
                checks += 1;
            }
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{checks} checks in {:?}", start.elapsed()))
}

fn triple_recursion() -> Check {
    let limits = Limits::default();
    let mut checks = 0;
    for p in [2, 3, 5] {
        let r = verify_triple_recursion_with(&Multigraph::banana(3), &id("e1"), p, 1, &limits).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("banana, p = {p}: {r:?}"))?;
        checks += 1;
    }
    let doubled = Multigraph::from_edges(&[("a", "b"), ("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
    for e in ["e1", "e3"] {
        let r = verify_triple_recursion_with(&doubled, &id(e), 2, 1, &limits).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("doubled triangle, edge {e}: {r:?}"))?;
        checks += 1;
    }
    Ok(format!("{checks} checks"))
}

fn euler_identity() -> Check {
    let registry = Registry::shipped();
    let graphs = [
        catalog::triangle_two_doubled(),
        catalog::triangle_all_doubled(),
        catalog::k4_one_doubled(),
    ];
    let mut checked = Vec::new();
    for entry in registry.entries() {
        if entry.provenance != Provenance::Published || entry.intersections.is_empty() {
            continue;
        }
        let g = graphs
            .iter()
            .find(|g| g.canonical_key().ok().as_ref() == Some(&entry.key))
            .ok_or_else(|| format!("no catalog graph for fixture {}", entry.name))?;
        let c_g = entry.c.clone().ok_or("fixture without C")?;
        for e in g.edge_ids() {
            let orbit = g.canonical_edge_key(e).unwrap();
            let Some(int) = entry.intersections.get(&orbit) else { continue };
            if g.classify_edge(e).unwrap() != EdgeClass::Regular {
                continue;
            }
            let c_del = compute_c(&g.delete_edge(e).unwrap()).0.ok_or("deletion blocked")?;
            ensure(chi_identity_check(&c_g, &c_del, &int.c, g.edge_count()), || {
                format!("{} edge {e}", entry.name)
            })?;
            checked.push(format!("{}:{e}", entry.name));
        }
    }
    for needed in ["e5", "e1", "e7"] {
        ensure(checked.iter().any(|c| c.ends_with(&format!(":{needed}"))), || {
            format!("edge {needed} not covered: {checked:?}")
        })?;
    }
    Ok(format!("{} fixture edges", checked.len()))
}

fn small_poly() -> impl Strategy<Value = FeynmanPoly> {
    prop::collection::vec(-20i64..=20, 0..=7).prop_map(|c| FeynmanPoly::from_i64s(&c))
}

fn property_suites() -> Check {
    // closed forms against recursion unrolling
    let config = Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(
        config,
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    runner
        .run(&(small_poly(), small_poly(), small_poly()), |(c_g, c_2e, c_con)| {
            let c_3e = multi_edge_closed(&c_g, &c_2e, &c_con, 3).unwrap();
            let mut seq = vec![c_g.clone(), c_2e.clone(), c_3e.clone()];
            while seq.len() < 10 {
                let k = seq.len();
                seq.push(multi_edge_recursion(&seq[k - 3], &seq[k - 2], &seq[k - 1]));
            }
            for m in 1..=10 {
                let closed = multi_edge_closed(&c_g, &c_2e, &c_con, m).unwrap();
                prop_assert_eq!(&closed, &seq[m - 1]);
                if m >= 2 {
                    prop_assert_eq!(&closed, &goodform_closed(&c_g, &c_2e, &c_3e, m - 1).unwrap());
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // Euler relation: Σ t_i ∂Ψ/∂t_i = deg(Ψ) Ψ, so Ψ lies in its Jacobian ideal
    let corpus = connected_multigraphs(6);
    let mut memberships = 0;
    for g in &corpus {
        let psi = psi_recursion::<Rational>(g).polynomial;
        let deg = psi.total_degree().unwrap_or(0);
        if deg == 0 {
            continue;
        }
        let vars = graph_vars(g);
        let mut euler = MultiPoly::zero(vars.clone());
        for (i, name) in vars.names().iter().enumerate() {
            euler = &euler + &(&psi.partial(name) * &MultiPoly::var(vars.clone(), i));
        }
        ensure(euler == psi.scalar_mul(&Rational::from_integer(BigInt::from(deg))), || {
            format!("Euler relation fails for {}", g.to_text())
        })?;
        let member = ideal_membership(&psi, &jacobian_generators(&psi)).map_err(|e| e.to_string())?;
        ensure(member, || format!("Psi not in its Jacobian ideal: {}", g.to_text()))?;
        memberships += 1;
    }

    // multilinear shortcut against full enumeration
    let limits = Limits::default();
    let mut counts = 0;
    for g in &corpus {
        for p in [2u64, 3, 5, 7] {
            if p.pow(g.edge_count() as u32) > 1_000_000 {
                continue;
            }
            let full = count_full_enumeration_with(g, p, &limits).map_err(|e| e.to_string())?;
            let fast = count_affine_with(g, p, None, &limits).map_err(|e| e.to_string())?;
            ensure(full.zeros == fast.zeros, || format!("{} at p = {p}", g.to_text()))?;
            counts += 1;
        }
    }
    Ok(format!(
        "100 random triples, {memberships} Jacobian memberships, {counts} count comparisons"
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("psi three-way agreement on connected multigraphs with <= 6 edges", psi_three_way),
        ("banana closed form for n = 1..8", banana_closed_form),
        ("doubled-triangle multiple-edge family", doubled_triangle_family),
        ("deletion-contraction fixture and naive doubling discrepancy", deletion_contraction_fixture),
        ("condition I membership verdicts", condition_i_verdicts),
        ("CSM to C conversion and round trip", csm_conversion),
        ("Grothendieck doubling identity over F_2, F_3, F_5, F_7", grothendieck_star),
        ("triple recursion on banana and doubled-triangle families", triple_recursion),
        ("Euler characteristic identity on fixture edges", euler_identity),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
