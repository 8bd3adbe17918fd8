use foldlab::folding::FoldingContext;
use foldlab::formats::{self, GraphDoc};
use foldlab::momentgraph::{
    build_graph, build_tau_graph, choose_theta, choose_theta_folded, MomentGraph, DEFAULT_VERTEX_BOUND,
};
use foldlab::rootsys::{catalog_build, parse_theta, Family};
use foldlab::FoldError;

fn ctx(f: Family) -> FoldingContext {
    FoldingContext::new(catalog_build(f).unwrap()).unwrap()
}

fn theta(c: &FoldingContext, f: Family, spec: &str) -> Vec<usize> {
    parse_theta(c.datum(), f, spec).unwrap()
}

/// Vertex and edge counts from group orders: `|W/W_Θ|` vertices, each with
/// `|Φ⁺| - |Φ_Θ⁺|` neighbours.
fn assert_counts(g: &MomentGraph, group: u64, stab: u64, pos: usize, pos_theta: usize) {
    let n = (group / stab) as usize;
    assert_eq!(g.num_vertices(), n);
    assert_eq!(g.edges().len(), n * (pos - pos_theta) / 2);
    let max_rank = g.vertices().iter().map(|v| v.rank).max().unwrap();
    assert_eq!(max_rank as usize, pos - pos_theta);
}

#[test]
fn orbit_and_edge_counts() {
    // (family, Θ, |W|, |W_Θ|, |Φ⁺|, |Φ_Θ⁺|) on the source side
    let cases = [
        (Family::A2C(2), "none", 24, 1, 6, 0),
        (Family::A2C(2), "default", 24, 2, 6, 1),
        (Family::A2C(3), "default", 720, 4, 15, 2),
        (Family::D2B(3), "default", 192, 2, 12, 1),
        (Family::A4H2, "default", 120, 4, 10, 2),
        (Family::D6H3, "default", 23040, 4, 30, 2),
    ];
    for (f, spec, w, wt, pos, pt) in cases {
        let c = ctx(f);
        let th = theta(&c, f, spec);
        let cfg = choose_theta_folded(&c, &th).unwrap();
        let g = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).unwrap();
        assert_counts(&g, w, wt, pos, pt);
        g.check_structure().unwrap();
        let a = g.audit();
        assert_eq!(a.outgoing, a.incoming, "{f}");
    }
}

#[test]
fn folded_orbit_and_edge_counts() {
    // (family, Θ, |W_τ|, |W_τ,Θ̄|, |Φ_τ⁺|, |Φ_τ,Θ̄⁺|)
    let cases = [
        (Family::A2C(2), "none", 8, 1, 4, 0),
        (Family::A2C(2), "default", 8, 2, 4, 1),
        (Family::A2C(3), "default", 48, 2, 9, 1),
        (Family::D2B(3), "default", 48, 2, 9, 1),
        (Family::A4H2, "default", 10, 2, 5, 1),
        (Family::D6H3, "default", 120, 2, 15, 1),
        (Family::E8H4, "none", 14400, 1, 60, 0),
    ];
    for (f, spec, w, wt, pos, pt) in cases {
        let c = ctx(f);
        let cfg = choose_theta_folded(&c, &theta(&c, f, spec)).unwrap();
        let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).unwrap();
        assert_counts(&tg.graph, w, wt, pos, pt);
        tg.graph.check_structure().unwrap();
        assert_eq!(tg.iota_coords.len(), tg.graph.num_vertices());
        assert!(tg.iota_ids.is_none());
    }
}

#[test]
fn iota_is_injective_onto_source_vertices() {
    for f in [Family::A2C(3), Family::D2B(3), Family::A4H2] {
        let c = ctx(f);
        let cfg = choose_theta_folded(&c, &theta(&c, f, "default")).unwrap();
        let src = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).unwrap();
        let tg = build_tau_graph(&c, &cfg, Some(&src), DEFAULT_VERTEX_BOUND).unwrap();
        let ids = tg.iota_ids.as_ref().unwrap();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len(), "{f}");
        for (y, &v) in ids.iter().enumerate() {
            assert_eq!(src.vertices()[v as usize].coords, tg.iota_coords[y], "{f}");
        }
    }
}

#[test]
fn bruhat_rank_distribution() {
    // Poincaré polynomial of S4: 1 + 3q + 5q² + 6q³ + 5q⁴ + 3q⁵ + q⁶
    let d = catalog_build(Family::A(3)).unwrap();
    let g = build_graph(&d, &choose_theta(&d, &[]).unwrap(), DEFAULT_VERTEX_BOUND).unwrap();
    let mut by_rank = [0usize; 7];
    for v in g.vertices() {
        by_rank[v.rank as usize] += 1;
    }
    assert_eq!(by_rank, [1, 3, 5, 6, 5, 3, 1]);
    let top = g.vertices().iter().position(|v| v.rank == 6).unwrap();
    for v in 0..g.num_vertices() {
        assert!(g.bruhat_leq(0, v).unwrap());
        assert!(g.bruhat_leq(v, top).unwrap());
        if v != top {
            assert!(!g.bruhat_leq(top, v).unwrap());
        }
    }
    for e in g.edges() {
        let (a, b) = (e.src as usize, e.dst as usize);
        assert!(g.bruhat_leq(a, b).unwrap() ^ g.bruhat_leq(b, a).unwrap());
    }
}

#[test]
fn graphs_are_deterministic_and_round_trip() {
    let f = Family::D2B(3);
    let c = ctx(f);
    let alg = c.datum().space().alg();
    let cfg = choose_theta_folded(&c, &theta(&c, f, "default")).unwrap();
    let json = |g: &MomentGraph| formats::to_string(&GraphDoc::new(g, alg)).unwrap();
    let a = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).unwrap();
    let b = build_graph(c.datum(), &cfg, DEFAULT_VERTEX_BOUND).unwrap();
    assert_eq!(json(&a), json(&b));

    let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).unwrap();
    let text = json(&tg.graph);
    let doc: GraphDoc = formats::parse(&text).unwrap();
    let (back, alg2) = doc.to_graph(DEFAULT_VERTEX_BOUND).unwrap();
    assert_eq!(alg2, alg);
    assert_eq!(json(&back), text);

    let mut tampered = doc.clone();
    tampered.edges.pop();
    assert!(matches!(tampered.to_graph(DEFAULT_VERTEX_BOUND), Err(FoldError::Parse(_))));
}

#[test]
fn vertex_bound_is_a_resource_error() {
    let c = ctx(Family::D6H3);
    let cfg = choose_theta_folded(&c, &[]).unwrap();
    assert!(matches!(build_graph(c.datum(), &cfg, 1000), Err(FoldError::Resource(_))));
}

#[test]
fn dot_export_lists_every_vertex_and_edge() {
    let f = Family::A2C(2);
    let c = ctx(f);
    let cfg = choose_theta_folded(&c, &[]).unwrap();
    let tg = build_tau_graph(&c, &cfg, None, DEFAULT_VERTEX_BOUND).unwrap();
    let mut out = Vec::new();
    formats::write_dot(&tg.graph, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches(" -> ").count(), tg.graph.edges().len());
}
