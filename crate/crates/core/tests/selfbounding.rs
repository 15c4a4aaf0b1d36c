use dobrushin_core::models::graph::{edge_slots, EdgeGraph, GraphMotif};
use dobrushin_core::selfbounding::{
    negative_spin_count, negative_spin_witness, subgraph_scale, subgraph_witness, verify_sb, verify_star, Condition,
    Variant, WitnessedFunction,
};
use dobrushin_core::space::ProductSpace;

#[test]
fn negative_spin_count_has_unit_witness() {
    for n in 1..=5 {
        let space = ProductSpace::binary(n);
        let w = WitnessedFunction { g: negative_spin_count, alpha: negative_spin_witness, a: 1.0, b: 0.0, variant: Variant::Star };
        let r = verify_star(&w, &space).unwrap();
        assert!(r.holds && r.first_violation.is_none(), "{r:?}");
        // a smaller budget is too tight as soon as some spin is negative
        let tight = WitnessedFunction { a: 0.5, ..w };
        assert!(!verify_star(&tight, &space).unwrap().holds);
        // plain self-bounding through the infimum increments as well
        assert!(verify_sb(negative_spin_count, &space, 1.0, 0.0, false).unwrap().holds);
    }
}

fn scaled_count(n: usize, motif: &GraphMotif) -> impl Fn(&[usize]) -> f64 + Sync + '_ {
    move |x: &[usize]| {
        let g = EdgeGraph::from_indicators(n, x).unwrap();
        let alpha = subgraph_witness(&g, motif).unwrap();
        alpha.iter().sum::<f64>() / motif.edge_count() as f64
    }
}

#[test]
fn triangle_witness_passes_on_small_graphs() {
    let t = GraphMotif::triangle();
    for n in 3..=5 {
        let space = ProductSpace::binary(edge_slots(n));
        let scale = subgraph_scale(n, &t);
        let w = WitnessedFunction {
            g: |x: &[usize]| EdgeGraph::from_indicators(n, x).unwrap().triangle_count() as f64 / scale,
            alpha: |x: &[usize]| subgraph_witness(&EdgeGraph::from_indicators(n, x).unwrap(), &t).unwrap(),
            a: t.edge_count() as f64,
            b: 0.0,
            variant: Variant::Star,
        };
        let r = verify_star(&w, &space).unwrap();
        assert!(r.holds, "n={n}: {:?}", r.first_violation);
    }
}

#[test]
fn witness_sum_reproduces_the_count() {
    // Σα = e_S N_S / scale, checked against the independent triangle counter
    let t = GraphMotif::triangle();
    let n = 5;
    for x in ProductSpace::binary(edge_slots(n)).states() {
        let g = EdgeGraph::from_indicators(n, &x).unwrap();
        let direct = g.triangle_count() as f64 / subgraph_scale(n, &t);
        assert!((scaled_count(n, &t)(&x) - direct).abs() < 1e-12);
    }
}

#[test]
fn path_motif_witness_passes() {
    let p = GraphMotif::path(3).unwrap();
    let n = 4;
    let w = WitnessedFunction {
        g: scaled_count(n, &p),
        alpha: |x: &[usize]| subgraph_witness(&EdgeGraph::from_indicators(n, x).unwrap(), &p).unwrap(),
        a: p.edge_count() as f64,
        b: 0.0,
        variant: Variant::Star,
    };
    assert!(verify_star(&w, &ProductSpace::binary(edge_slots(n))).unwrap().holds);
}

#[test]
fn halved_witness_is_caught() {
    let t = GraphMotif::triangle();
    let n = 4;
    let w = WitnessedFunction {
        g: |x: &[usize]| EdgeGraph::from_indicators(n, x).unwrap().triangle_count() as f64 / subgraph_scale(n, &t),
        alpha: |x: &[usize]| {
            subgraph_witness(&EdgeGraph::from_indicators(n, x).unwrap(), &t).unwrap().iter().map(|a| a / 2.0).collect()
        },
        a: 3.0,
        b: 0.0,
        variant: Variant::Star,
    };
    let r = verify_star(&w, &ProductSpace::binary(edge_slots(n))).unwrap();
    assert!(!r.holds);
    assert_eq!(r.first_violation.unwrap().condition, Condition::Lipschitz);
    assert!(r.worst_pair.unwrap().margin < 0.0);
}

#[test]
fn weak_class_accepts_squared_budget() {
    // g = number of ones on {0,1}^n with α = indicator is weakly (1,0)
    let ones = |x: &[usize]| x.iter().sum::<usize>() as f64;
    let alpha = |x: &[usize]| x.iter().map(|&v| v as f64).collect::<Vec<_>>();
    let w = WitnessedFunction { g: ones, alpha, a: 1.0, b: 0.0, variant: Variant::Wstar };
    assert!(verify_star(&w, &ProductSpace::binary(4)).unwrap().holds);
    let doubled = WitnessedFunction {
        g: |x: &[usize]| 2.0 * ones(x),
        alpha: |x: &[usize]| x.iter().map(|&v| 2.0 * v as f64).collect::<Vec<_>>(),
        a: 1.0,
        b: 0.0,
        variant: Variant::Wstar,
    };
    let r = verify_star(&doubled, &ProductSpace::binary(4)).unwrap();
    assert!(!r.holds);
    assert_eq!(r.first_violation.unwrap().condition, Condition::SquaredBudget);
}

#[test]
fn oversized_space_is_refused() {
    let w = WitnessedFunction { g: negative_spin_count, alpha: negative_spin_witness, a: 1.0, b: 0.0, variant: Variant::Star };
    assert!(verify_star(&w, &ProductSpace::binary(20)).is_err());
}
