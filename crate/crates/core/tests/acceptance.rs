//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! per-criterion lines always reach the output.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use foldlab::folding::FoldingContext;
use foldlab::momentgraph::{
    build_graph, build_tau_graph, choose_theta, choose_theta_folded, check_theta_preserved, DEFAULT_VERTEX_BOUND,
};
use foldlab::poly::Poly;
use foldlab::rootsys::{catalog_build, parse_theta, Family, FOLDED_FAMILIES};
use foldlab::structalg::{
    check_section, invariants_gen, iota_star_expr, GradedStructure, Section, SectionExpr, DEFAULT_UNKNOWN_BOUND,
};
use foldlab::verify::{build_orbits, condition_sweep, run_suite, surjectivity_witness, Suite, VerifyConfig};
use foldlab::{FoldError, Mode, QScalar};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ctx(f: Family) -> FoldingContext {
    FoldingContext::new(catalog_build(f).unwrap()).unwrap()
}

fn within(t: Instant, budget: Duration, what: &str) -> std::result::Result<(), String> {
    let e = t.elapsed();
    ensure!(e <= budget, "{what} took {e:.2?}, budget {budget:?}");
    Ok(())
}

/// (family, Δ_rat, 𝒯(Δ_rat) in the same order, Δ^𝒯)
const PARTITIONS: [(Family, &[&str], &[&str], &[&str]); 6] = [
    (Family::A2C(2), &["a1"], &["a3"], &["a2"]),
    (Family::A2C(3), &["a1", "a2"], &["a5", "a4"], &["a3"]),
    (Family::D2B(3), &["a3"], &["a4"], &["a1", "a2"]),
    (Family::A4H2, &["a3", "a8"], &["a5", "a4"], &[]),
    (Family::D6H3, &["a2", "a3", "a8"], &["a6", "a5", "a4"], &[]),
    (Family::E8H4, &["a1", "a2", "a3", "a8"], &["a7", "a6", "a5", "a4"], &[]),
];

fn catalog_validation() -> Outcome {
    let t = Instant::now();
    for (f, rat, img, inv) in PARTITIONS {
        let d = catalog_build(f).map_err(|e| format!("{f}: {e}"))?;
        let p = d.validate_folded_rep().map_err(|e| format!("{f}: {e}"))?;
        let name = |i: usize| d.names()[i].as_str();
        let mut got: Vec<(&str, &str)> = p.pairs.iter().map(|&(a, b)| (name(a), name(b))).collect();
        let mut want: Vec<(&str, &str)> = rat.iter().copied().zip(img.iter().copied()).collect();
        got.sort();
        want.sort();
        ensure!(got == want, "{f}: pairs {got:?}, expected {want:?}");
        let got_inv: Vec<&str> = p.invariant.iter().map(|&i| name(i)).collect();
        ensure!(got_inv == inv, "{f}: invariant roots {got_inv:?}, expected {inv:?}");
        let m = d.tau_matrix().ok_or(format!("{f}: no 𝒯-matrix"))?;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let e = &m[(i, j)];
                ensure!(e.is_base() && e.y().is_integer(), "{f}: 𝒯-matrix entry ({i},{j}) = {e} is not an integer");
            }
        }
    }
    within(t, Duration::from_secs(1), "catalog validation")?;
    Ok(format!("6 catalog foldings, partitions and integral 𝒯 ({:.2?})", t.elapsed()))
}

/// Reflection closure of the folded simple roots, computed from the Gram matrix.
fn closure_size(c: &FoldingContext) -> usize {
    let sys = c.target();
    let g = sys.gram();
    let n = sys.rank();
    let two = QScalar::from_i64(2);
    let unit = |i: usize| (0..n).map(|j| QScalar::from_i64((i == j) as i64)).collect::<Vec<_>>();
    let mut seen: HashSet<Vec<QScalar>> = (0..n).map(unit).collect();
    let mut frontier: Vec<Vec<QScalar>> = seen.iter().cloned().collect();
    while let Some(b) = frontier.pop() {
        for i in 0..n {
            let mut ip = QScalar::from_i64(0);
            for (j, x) in b.iter().enumerate() {
                ip = ip + x * &g[j][i];
            }
            let k = &(&two * &ip) / &g[i][i];
            let mut r = b.clone();
            r[i] = &r[i] - &k;
            if seen.insert(r.clone()) {
                frontier.push(r);
            }
        }
    }
    seen.len()
}

fn folded_root_systems() -> Outcome {
    let t = Instant::now();
    let expected = [
        (Family::A2C(2), 8),
        (Family::A2C(3), 18),
        (Family::D2B(3), 18),
        (Family::A4H2, 10),
        (Family::D6H3, 30),
        (Family::E8H4, 120),
    ];
    let mut sizes = Vec::new();
    for (f, n) in expected {
        let c = ctx(f);
        let closed = closure_size(&c);
        ensure!(closed == n, "{f}: reflection closure has {closed} roots, expected {n}");
        ensure!(c.phi_tau().len() == n, "{f}: Φ_τ has {} roots, expected {n}", c.phi_tau().len());
        sizes.push(n);
    }
    let c = ctx(Family::E8H4);
    ensure!(c.w_tau_order() == 14400, "|W_τ(H4)| = {}", c.w_tau_order());
    // second route: the regular orbit of W_τ is simply transitive
    let cfg = choose_theta_folded(&c, &[]).map_err(|e| e.to_string())?;
    let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    ensure!(tg.graph.num_vertices() == 14400, "regular H4 orbit has {} points", tg.graph.num_vertices());
    within(t, Duration::from_secs(30), "folded root systems")?;
    Ok(format!("|Φ_τ| = {sizes:?}, |W_τ(H4)| = 14400 by permutations and by regular orbit ({:.2?})", t.elapsed()))
}

fn orbit_sizes() -> Outcome {
    let t = Instant::now();
    let c = ctx(Family::E8H4);
    let theta = parse_theta(c.datum(), Family::E8H4, "a2,a3,a4,a5,a6,a8").map_err(|e| e.to_string())?;
    let cfg = choose_theta_folded(&c, &theta).map_err(|e| e.to_string())?;
    let src = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    let t_src = t.elapsed();
    let tg = build_tau_graph(&c, &cfg, Some(&src), DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    ensure!(src.num_vertices() == 30240, "source orbit has {} vertices", src.num_vertices());
    ensure!(tg.graph.num_vertices() == 120, "folded orbit has {} vertices", tg.graph.num_vertices());
    within(t, Duration::from_secs(120), "E8 orbit construction")?;
    Ok(format!(
        "e8h4 Θ=D6: 30240 source vertices ({} edges, {t_src:.2?}), 120 folded vertices",
        src.edges().len()
    ))
}

fn theorem_verification() -> Outcome {
    let t = Instant::now();
    let cfg = VerifyConfig { degree: 3, ..VerifyConfig::default() };
    let mut cases = 0;
    for f in FOLDED_FAMILIES {
        let r = run_suite(f, Suite::Theorem, &cfg).map_err(|e| format!("{f}: {e}"))?;
        for ch in &r.checks {
            ensure!(ch.passed(), "{f}: {} failed {}/{}: {:?}", ch.name, ch.failures, ch.cases, ch.details);
        }
        let thetas = r.checks.iter().filter(|c| c.name.contains("ι* of the generating sample")).count();
        ensure!(thetas >= 2, "{f}: only {thetas} Θ tested");
        cases += r.total_cases();
    }

    // the full sweep on the 120-vertex H4 orbit, counted explicitly
    let c = ctx(Family::E8H4);
    let theta = parse_theta(c.datum(), Family::E8H4, "default").map_err(|e| e.to_string())?;
    let orbits = build_orbits(&c, &theta, 1).map_err(|e| e.to_string())?;
    let inv = invariants_gen(c.source(), &theta, 1, Mode::Field, None).map_err(|e| e.to_string())?;
    let e = SectionExpr::Char(inv[0].clone()).mul(SectionExpr::Char(inv[0].clone()));
    let img = iota_star_expr(&c, &orbits.tau, &e, Mode::Field).map_err(|e| e.to_string())?;
    let (pairs, bad) = condition_sweep(&orbits.tau.graph, &img, Mode::Field).map_err(|e| e.to_string())?;
    ensure!(pairs == 120 * 60 && bad.is_empty(), "sweep covered {pairs} pairs with {} violations", bad.len());

    within(t, Duration::from_secs(300), "theorem verification")?;
    Ok(format!("degree ≤ 3, Θ ∈ {{∅, default}} on 6 foldings: {cases} check cases, 0 violations; H4 sweep 7200 pairs ({:.2?})", t.elapsed()))
}

fn borel_squares() -> Outcome {
    let t = Instant::now();
    let mut squares = 0;
    for f in [Family::A2C(2), Family::D2B(3), Family::A4H2] {
        let r = run_suite(f, Suite::Charm, &VerifyConfig::default()).map_err(|e| format!("{f}: {e}"))?;
        for ch in &r.checks {
            ensure!(ch.passed(), "{f}: {} failed {}/{}: {:?}", ch.name, ch.failures, ch.cases, ch.details);
            if ch.name.contains("ρ_τ") {
                squares += ch.cases;
            }
        }
    }
    ensure!(squares > 0, "no Borel squares were checked");
    Ok(format!("{squares} exact Borel squares on a2c2, d2b3, a4h2 ({:.2?})", t.elapsed()))
}

fn property_suites() -> Outcome {
    let t = Instant::now();
    let mut total = 0;
    let mut min_cases = usize::MAX;
    for f in FOLDED_FAMILIES {
        let r = run_suite(f, Suite::Props, &VerifyConfig::default()).map_err(|e| format!("{f}: {e}"))?;
        for ch in &r.checks {
            ensure!(ch.passed(), "{f}: {} failed {}/{}: {:?}", ch.name, ch.failures, ch.cases, ch.details);
            ensure!(ch.cases >= 500, "{f}: {} ran only {} cases", ch.name, ch.cases);
            min_cases = min_cases.min(ch.cases);
        }
        total += r.total_cases();
    }
    Ok(format!("{total} cases on 6 foldings, ≥ {min_cases} per property, seed 7 ({:.2?})", t.elapsed()))
}

fn augmented_dims(gs: &mut GradedStructure<'_>, top: u32) -> std::result::Result<Vec<usize>, String> {
    (0..=top).map(|d| gs.report(d).map(|r| r.dim_augmented).map_err(|e| e.to_string())).collect()
}

fn graded_dimensions() -> Outcome {
    let t = Instant::now();
    let plain = |n: usize| {
        let d = catalog_build(Family::A(n)).unwrap();
        let cfg = choose_theta(&d, &[]).unwrap();
        build_graph(&d, &cfg, DEFAULT_VERTEX_BOUND).unwrap()
    };
    let a1 = plain(1);
    let dims = augmented_dims(&mut GradedStructure::new(&a1, DEFAULT_UNKNOWN_BOUND), 1)?;
    ensure!(dims == [1, 1], "A1 augmented dims {dims:?}");
    let a2 = plain(2);
    let dims = augmented_dims(&mut GradedStructure::new(&a2, DEFAULT_UNKNOWN_BOUND), 3)?;
    ensure!(dims == [1, 2, 2, 1], "A2 augmented dims {dims:?}");

    let c = ctx(Family::A2C(2));
    let cfg = choose_theta_folded(&c, &[]).map_err(|e| e.to_string())?;
    let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    let dims = augmented_dims(&mut GradedStructure::new(&tg.graph, DEFAULT_UNKNOWN_BOUND), 4)?;
    ensure!(dims == [1, 2, 2, 2, 1], "folded C2 augmented dims {dims:?}");

    let mut witnesses = Vec::new();
    for spec in ["none", "default"] {
        let theta = parse_theta(c.datum(), Family::A2C(2), spec).map_err(|e| e.to_string())?;
        let cfg = choose_theta_folded(&c, &theta).map_err(|e| e.to_string())?;
        let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
        for d in 0..=2 {
            let (rank, dim) = surjectivity_witness(&c, &tg, &theta, d).map_err(|e| e.to_string())?;
            ensure!(rank == dim, "a2c2 Θ={spec}, degree {d}: image rank {rank} < dim {dim}");
            witnesses.push(format!("{rank}/{dim}"));
        }
    }
    within(t, Duration::from_secs(60), "graded dimensions")?;
    Ok(format!(
        "A1 (1,1), A2 (1,2,2,1), C2 (1,2,2,2,1); a2c2 surjectivity ranks {} ({:.2?})",
        witnesses.join(" "),
        t.elapsed()
    ))
}

fn negative_tests() -> Outcome {
    let c = ctx(Family::A2C(2));
    let cfg = choose_theta_folded(&c, &[]).map_err(|e| e.to_string())?;
    let src = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    let tg = build_tau_graph(&c, &cfg, Some(&src), DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
    let defects = tg.edge_defects(&c, &src).map_err(|e| e.to_string())?;
    ensure!(!defects.is_empty(), "every folded a2c2 edge has a matching source edge");

    let e8 = catalog_build(Family::E8H4).unwrap();
    let a2 = e8.index_of("a2").unwrap();
    match check_theta_preserved(&e8, &[a2]) {
        Err(FoldError::Validation(_)) => {}
        other => return Err(format!("Θ = {{a2}} on e8h4 was not rejected: {other:?}")),
    }
    let e8c = ctx(Family::E8H4);
    ensure!(choose_theta_folded(&e8c, &[a2]).is_err(), "choose_theta_folded accepted Θ = {{a2}}");

    let d = catalog_build(Family::A(1)).unwrap();
    let g = build_graph(&d, &choose_theta(&d, &[]).unwrap(), DEFAULT_VERTEX_BOUND).unwrap();
    let s = Section::new(g.side(), 1, vec![Poly::one(1), Poly::zero(1)]).unwrap();
    let rep = check_section(&g, &s, Mode::Field, None).map_err(|e| e.to_string())?;
    ensure!(!rep.is_valid(), "(1, 0) on A1 passed the GKM check");
    let v = &rep.violations[0];
    ensure!(v.edge == 0 && v.label == "a1", "violation reported at edge {} label {}", v.edge, v.label);
    Ok(format!(
        "{} unmatched folded edges on a2c2; e8h4 Θ={{a2}} rejected; (1,0) on A1 violates edge 0 (a1)",
        defects.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("catalog validation", catalog_validation),
        ("folded root systems", folded_root_systems),
        ("orbit sizes", orbit_sizes),
        ("theorem verification", theorem_verification),
        ("Borel squares", borel_squares),
        ("property suites", property_suites),
        ("graded dimensions", graded_dimensions),
        ("negative tests", negative_tests),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match r {
            Ok(msg) => println!("criterion {} {name}: PASS: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL: {msg}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
