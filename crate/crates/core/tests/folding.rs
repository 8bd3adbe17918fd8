use std::collections::HashSet;

use foldlab::folding::FoldingContext;
use foldlab::rootsys::{catalog_build, parse_theta, Family, FOLDED_FAMILIES};
use foldlab::QScalar;

fn ctx(f: Family) -> FoldingContext {
    FoldingContext::new(catalog_build(f).unwrap()).unwrap()
}

/// The Coxeter label m of a pair of simple roots, from `a_ij a_ji = 4cos²(π/m)`.
fn coxeter_label(a: &QScalar, b: &QScalar) -> u32 {
    let p = (a * b).to_f64();
    for m in 2..=12u32 {
        let c = (std::f64::consts::PI / m as f64).cos();
        if (4.0 * c * c - p).abs() < 1e-9 {
            return m;
        }
    }
    panic!("no Coxeter label for product {p}");
}

fn coxeter_edges(c: &FoldingContext) -> Vec<u32> {
    let a = c.target().cartan();
    let n = a.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = coxeter_label(&a[i][j], &a[j][i]);
            if m > 2 {
                out.push(m);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn folded_coxeter_types() {
    let expected: [(Family, Vec<u32>, bool); 6] = [
        (Family::A2C(2), vec![4], true),
        (Family::A2C(3), vec![3, 4], true),
        (Family::D2B(3), vec![3, 4], true),
        (Family::A4H2, vec![5], false),
        (Family::D6H3, vec![3, 5], false),
        (Family::E8H4, vec![3, 3, 5], false),
    ];
    for (f, edges, cryst) in expected {
        let c = ctx(f);
        assert_eq!(coxeter_edges(&c), edges, "{f}");
        assert_eq!(c.target().is_crystallographic(), cryst, "{f}");
        assert_eq!(c.target().rank(), edges.len() + 1, "{f}");
    }
}

#[test]
fn folded_roots_and_groups() {
    // |W| = product of the degrees of the basic invariants
    let expected = [
        (Family::A2C(2), 8, 2 * 4),
        (Family::A2C(3), 18, 2 * 4 * 6),
        (Family::D2B(3), 18, 2 * 4 * 6),
        (Family::A4H2, 10, 2 * 5),
        (Family::D6H3, 30, 2 * 6 * 10),
        (Family::E8H4, 120, 2 * 12 * 20 * 30),
    ];
    for (f, roots, order) in expected {
        let c = ctx(f);
        assert_eq!(c.phi_tau().len(), roots, "{f}");
        assert_eq!(c.phi_tau_positive().len() * 2, roots, "{f}");
        assert_eq!(c.w_tau_order(), order, "{f}");
    }
}

#[test]
fn folded_roots_are_closed_under_folded_reflections() {
    for f in [Family::A2C(3), Family::D6H3] {
        let c = ctx(f);
        let t = c.target();
        let all: HashSet<Vec<QScalar>> = c.phi_tau().iter().cloned().collect();
        for beta in c.phi_tau() {
            for i in 0..t.rank() {
                assert!(all.contains(&t.simple_reflect_root(beta, i)), "{f}");
            }
        }
    }
}

#[test]
fn every_source_root_folds_to_a_multiple_of_a_folded_root() {
    for f in FOLDED_FAMILIES {
        let c = ctx(f);
        let folded: Vec<Vec<QScalar>> = c.phi_tau().to_vec();
        for beta in c.source().positive_roots() {
            let img = c.fold_coords(beta);
            assert!(img.iter().any(|x| !x.is_zero()), "{f}");
            let hit = folded.iter().any(|g| {
                let k = g.iter().position(|x| !x.is_zero()).unwrap();
                match img[k].try_div(&g[k]) {
                    Ok(s) => !s.is_zero() && img.iter().zip(g).all(|(x, y)| *x == &s * y),
                    Err(_) => false,
                }
            });
            assert!(hit, "{f}: {beta:?}");
        }
    }
}

#[test]
fn lifted_reflections_are_involutions_fixing_the_folding() {
    for f in FOLDED_FAMILIES {
        let c = ctx(f);
        let n = c.source().rank();
        let slots = 2 * c.datum().space().n();
        for a in 0..c.target().rank() {
            for (r, dim) in [(c.lift_matrix_on_roots(a), n), (c.lift_reflection(c.sources()[a]).unwrap(), slots)] {
                let id = r.mul(&r).unwrap();
                for i in 0..dim {
                    for j in 0..dim {
                        assert_eq!(id[(i, j)], QScalar::from_i64((i == j) as i64), "{f}");
                    }
                }
            }
        }
        c.check_stabilization().unwrap();
        assert!(c.check_sign_coherence().unwrap() > 0);
    }
}

#[test]
fn theta_presets_parse() {
    let d = catalog_build(Family::E8H4).unwrap();
    let def = parse_theta(&d, Family::E8H4, "default").unwrap();
    assert_eq!(def.len(), 6);
    assert_eq!(parse_theta(&d, Family::E8H4, "none").unwrap(), Vec::<usize>::new());
    assert_eq!(parse_theta(&d, Family::E8H4, "a2,a6").unwrap(), vec![1, 5]);
    assert!(parse_theta(&d, Family::E8H4, "a9").is_err());
}
