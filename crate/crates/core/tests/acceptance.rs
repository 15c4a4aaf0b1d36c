//! Acceptance campaign: one pass/fail line per criterion, exit code 1 if
//! any criterion fails. Run with `cargo test --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use dobrushin_core::bounds::{
    ac_residual, constant_composition_checks, convex_distance_rate, solve_ac, ApplicationBound,
    INDEPENDENT_CONVEX_RATE,
};
use dobrushin_core::convexdist::{
    convex_distance, convex_distance_oracle, dt_squared_lipschitz_check, exact_convex_expectation,
    ConvexDistanceInstance,
};
use dobrushin_core::dobrushin::{
    exact_matrix, inhomogeneity_exact, swr_lemma_check, ConditionalModel, SubsetLaw, TableModel,
};
use dobrushin_core::finite_dist::{build_coupling, coupling_components, coupling_joint, tv_distance, FiniteDistribution};
use dobrushin_core::geometry::{
    euclid, exact_tsp, mst, mst_invariant_check, tsp_lipschitz_slack, tsp_witness_check, CostFunction,
    ElevationCost, Euclidean, PointSet, ScaledEuclidean, Tour,
};
use dobrushin_core::harness::{coupling_statistics, run_experiment, ExperimentConfig, ExperimentReport};
use dobrushin_core::models::curie_weiss::{cw_exact_magnetization_law, CurieWeiss};
use dobrushin_core::models::ergm::EdgeTriangleErgm;
use dobrushin_core::models::graph::{edge_slots, EdgeGraph, GraphMotif};
use dobrushin_core::rng::stream_rng;
use dobrushin_core::selfbounding::{
    negative_spin_count, negative_spin_witness, subgraph_scale, subgraph_witness, verify_star, Variant,
    WitnessedFunction,
};
use dobrushin_core::space::ProductSpace;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn critical_constant() -> Outcome {
    let t = Instant::now();
    let ac = solve_ac();
    let elapsed = t.elapsed();
    let res = ac_residual(ac).abs();
    ensure(ac > 0.285 && ac < 0.286, format!("a_c = {ac} outside (0.285, 0.286)"))?;
    ensure(res < 1e-10, format!("residual {res:e}"))?;
    ensure(elapsed < Duration::from_millis(1), format!("root took {elapsed:?}"))?;
    Ok(format!("a_c = {ac:.12}, residual {res:.1e}, {elapsed:?}"))
}

fn constant_composition() -> Outcome {
    let r = constant_composition_checks();
    for c in &r.checks {
        ensure(c.pass, format!("{} failed: {} vs {}", c.name, c.lhs, c.rhs))?;
    }
    Ok(format!("{} relations hold", r.checks.len()))
}

fn interdependence_exactness() -> Outcome {
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in [3usize, 4, 5] {
        for beta in [0.2, 0.5, 0.9] {
            let a = exact_matrix(&CurieWeiss::new(n, beta, 0.0).map_err(err)?).map_err(err)?;
            let nf = n as f64;
            let entry = a.entries().iter().copied().fold(0.0, f64::max);
            ensure(entry <= beta / nf + 1e-12, format!("n={n} β={beta}: entry {entry} > β/n"))?;
            ensure(
                a.norm_1 <= beta * (1.0 - 1.0 / nf) + 1e-12,
                format!("n={n} β={beta}: ‖A‖₁ = {} > β(1-1/n)", a.norm_1),
            )?;
            worst = worst.max(a.norm_1 - beta * (1.0 - 1.0 / nf));
        }
    }
    let m = [
        FiniteDistribution::bernoulli(0.3).map_err(err)?,
        FiniteDistribution::new(vec![0.2, 0.5, 0.3]).map_err(err)?,
    ];
    let a = exact_matrix(&TableModel::independent(&m).map_err(err)?).map_err(err)?;
    ensure(a.entries().iter().all(|&v| v == 0.0), format!("independent pair gives {:?}", a.entries()))?;
    Ok(format!("max ‖A‖₁ - β(1-1/n) = {worst:.2e}; independent pair exactly zero"))
}

fn inhomogeneity() -> Outcome {
    let mut cases = 0;
    for big_n in 2..=12usize {
        for n in 1..big_n {
            let inh = inhomogeneity_exact(&SubsetLaw::uniform(big_n, n).map_err(err)?).map_err(err)?;
            let want = n as f64 / (big_n - n + 1) as f64;
            ensure(inh.r2 == 0.0, format!("N={big_n} n={n}: r₂ = {}", inh.r2))?;
            ensure((inh.rho - want).abs() < 1e-12, format!("N={big_n} n={n}: ρ = {} vs {want}", inh.rho))?;
            cases += 1;
        }
    }
    let mut lemma = 0;
    for big_n in 2..=8usize {
        for n in 1..big_n {
            let c = swr_lemma_check(&SubsetLaw::uniform(big_n, n).map_err(err)?).map_err(err)?;
            ensure(
                c.holds,
                format!("N={big_n} n={n}: ‖A‖₁ = {}, ‖A‖∞ = {}, ρ = {}", c.matrix.norm_1, c.matrix.norm_inf, c.inhomogeneity.rho),
            )?;
            lemma += 1;
        }
    }
    Ok(format!("{cases} (N, n) pairs exact; {lemma} matrix-norm checks"))
}

fn self_bounding() -> Outcome {
    let mut pairs = 0u64;
    for n in 1..=5 {
        let w = WitnessedFunction {
            g: negative_spin_count,
            alpha: negative_spin_witness,
            a: 1.0,
            b: 0.0,
            variant: Variant::Star,
        };
        let r = verify_star(&w, &ProductSpace::binary(n)).map_err(err)?;
        ensure(r.holds, format!("negative spin count fails at n={n}: {:?}", r.first_violation))?;
        pairs += r.checked_pairs;
    }
    let t = GraphMotif::triangle();
    for n in 3..=5 {
        let scale = subgraph_scale(n, &t);
        let w = WitnessedFunction {
            g: |x: &[usize]| EdgeGraph::from_indicators(n, x).unwrap().triangle_count() as f64 / scale,
            alpha: |x: &[usize]| subgraph_witness(&EdgeGraph::from_indicators(n, x).unwrap(), &t).unwrap(),
            a: t.edge_count() as f64,
            b: 0.0,
            variant: Variant::Star,
        };
        let r = verify_star(&w, &ProductSpace::binary(edge_slots(n))).map_err(err)?;
        ensure(r.holds, format!("triangle witness fails at n={n}: {:?}", r.first_violation))?;
        pairs += r.checked_pairs;
    }
    Ok(format!("{pairs} ordered pairs, zero violations"))
}

fn rational(weights: &[u32]) -> Vec<BigRational> {
    let total: u32 = weights.iter().sum();
    weights.iter().map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total))).collect()
}

fn coupling_correctness() -> Outcome {
    let mut rng = stream_rng(6, 0);
    let mut cases = 0;
    for _ in 0..600 {
        let k = rng.random_range(1..=6);
        let fw: Vec<u32> = (0..k).map(|_| rng.random_range(1..30)).collect();
        let mut gw: Vec<u32> = (0..k).map(|_| rng.random_range(0..30)).collect();
        if gw.iter().all(|&v| v == 0) {
            gw[0] = 1;
        }
        let (f, g) = (rational(&fw), rational(&gw));
        let tv = f.iter().zip(&g).fold(BigRational::zero(), |acc, (a, b)| if a > b { acc + (a - b) } else { acc });
        let extra = BigRational::new(BigInt::from(rng.random_range(0..=10)), BigInt::from(10));
        for q in [tv.clone(), &tv + (BigRational::one() - &tv) * &extra] {
            let joint = coupling_joint(&coupling_components(&f, &g, q.clone()).map_err(err)?);
            let mut off = BigRational::zero();
            for x in 0..k {
                let row = joint[x].iter().fold(BigRational::zero(), |a, v| a + v);
                let col = (0..k).fold(BigRational::zero(), |a, y| a + &joint[y][x]);
                ensure(row == f[x] && col == g[x], format!("marginal mismatch for {fw:?}, {gw:?}"))?;
                for y in 0..k {
                    if x != y {
                        off += &joint[x][y];
                    }
                }
            }
            ensure(off <= q, "off-diagonal mass exceeds q")?;
            if q == tv {
                ensure(off == tv, "q = TV does not give a maximal coupling")?;
            }
            cases += 1;
        }
        // the floating-point table agrees with the exact one
        let ff = FiniteDistribution::from_weights(&fw.iter().map(|&v| v as f64).collect::<Vec<_>>()).map_err(err)?;
        let gf = FiniteDistribution::from_weights(&gw.iter().map(|&v| v as f64).collect::<Vec<_>>()).map_err(err)?;
        let tvf = tv_distance(&ff, &gf).map_err(err)?;
        let table = build_coupling(&ff, &gf, tvf).map_err(err)?;
        ensure((table.off_diagonal_mass() - tv.to_f64().unwrap()).abs() < 1e-12, "float maximal coupling off")?;
    }
    Ok(format!("{cases} rational couplings exact"))
}

fn coupled_contraction() -> Outcome {
    let (n, beta) = (10usize, 0.5);
    let model = CurieWeiss::new(n, beta, 0.0).map_err(err)?;
    let matrix = exact_matrix(&model).map_err(err)?;
    let steps = [10usize, 50, 100];
    let stats = coupling_statistics(&model, &matrix, &steps, 10_000, 7).map_err(err)?;
    let norm1 = beta * (1.0 - 1.0 / n as f64);
    let mut detail = Vec::new();
    for (&k, &(mean, se, _)) in steps.iter().zip(&stats) {
        let envelope = n as f64 * (1.0 - (1.0 - norm1) / n as f64).powi(k as i32);
        ensure(mean <= envelope + 3.0 * se, format!("k={k}: mean {mean} > {envelope} + 3·{se}"))?;
        detail.push(format!("k={k}: {mean:.4} ≤ {envelope:.4}"));
    }
    Ok(detail.join("; "))
}

fn convex_distance_checks() -> Outcome {
    let mut rng = stream_rng(8, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(1..=6);
        let q = rng.random_range(2..=3);
        let mut point = || (0..n).map(|_| rng.random_range(0..q)).collect::<Vec<usize>>();
        let x = point();
        let set: Vec<Vec<usize>> = (0..k).map(|_| point()).collect();
        let inst = ConvexDistanceInstance::new(x, set).map_err(err)?;
        let diff = (convex_distance(&inst).map_err(err)?.value - convex_distance_oracle(&inst).map_err(err)?).abs();
        ensure(diff < 1e-8, format!("{inst:?}: solver and oracle differ by {diff}"))?;
        worst = worst.max(diff);
    }
    let space = ProductSpace::binary(4);
    let states: Vec<Vec<usize>> = space.states().collect();
    let sets: Vec<Vec<Vec<usize>>> =
        (1..=3).flat_map(|size| states.iter().cloned().combinations(size)).collect();
    let reports: Vec<_> = sets
        .par_iter()
        .map(|s| dt_squared_lipschitz_check(&space, s).map(|r| (s.clone(), r)))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut max_inc: f64 = 0.0;
    for (s, r) in &reports {
        ensure(r.holds(), format!("S = {s:?}: increment {} or witness {:?}", r.max_increment, r.witness.first_violation))?;
        max_inc = max_inc.max(r.max_increment);
    }
    Ok(format!("oracle gap {worst:.1e}; {} sets, max |Δ d_T²| = {max_inc:.6}", reports.len()))
}

fn convex_distance_inequality() -> Outcome {
    let n = 10;
    let space = ProductSpace::binary(n);
    let law: Vec<(Vec<usize>, f64)> = space.states().map(|x| (x, 1.0 / 1024.0)).collect();
    let states: Vec<Vec<usize>> = space.states().collect();
    let sets = [
        ("ball of radius 2", states.iter().filter(|x| x.iter().sum::<usize>() <= 2).cloned().collect::<Vec<_>>()),
        ("first coordinate zero", states.iter().filter(|x| x[0] == 0).cloned().collect()),
        ("two antipodes", vec![vec![0; n], vec![1; n]]),
    ];
    let mut detail = Vec::new();
    for (name, set) in &sets {
        for rate in [convex_distance_rate(0.0).map_err(err)?, INDEPENDENT_CONVEX_RATE] {
            let (e, mu) = exact_convex_expectation(&law, set, rate).map_err(err)?;
            ensure(e <= 1.0 / mu, format!("{name} at rate {rate}: {e} > {}", 1.0 / mu))?;
            detail.push(format!("{name}@{rate:.4}: {e:.3} ≤ {:.1}", 1.0 / mu));
        }
    }
    Ok(detail.join("; "))
}

fn curie_weiss_validity() -> Outcome {
    let thresholds: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
    let mut worst: f64 = f64::NEG_INFINITY;
    for beta in [0.3, 0.5, 0.8] {
        for h in [0.0, 0.5, 1.0] {
            for n in [50usize, 100] {
                let law = cw_exact_magnetization_law(n, beta, h).map_err(err)?;
                let up = ApplicationBound::CwUp { beta, h, n };
                let low = ApplicationBound::CwLow { beta, h, n };
                for &t in &thresholds {
                    let (pu, bu) = (law.upper_tail(t), up.eval(t).map_err(err)?);
                    let (pl, bl) = (law.lower_tail(t), low.eval(t).map_err(err)?);
                    ensure(pu <= bu, format!("β={beta} h={h} n={n} t={t}: upper {pu} > {bu}"))?;
                    ensure(pl <= bl, format!("β={beta} h={h} n={n} t={t}: lower {pl} > {bl}"))?;
                    worst = worst.max(pu - bu).max(pl - bl);
                }
            }
        }
    }
    Ok(format!("18 models × 20 thresholds, max (exact - bound) = {worst:.3e}"))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rpow(base: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * base)
}

fn rows_within_ci(r: &ExperimentReport) -> Result<(), String> {
    for row in &r.rows {
        let bound = row.bound.ok_or_else(|| format!("{} t={}: no bound", row.curve, row.t))?;
        ensure(
            row.ci_low <= bound,
            format!("{} t={}: frequency {} (CI low {}) > bound {bound}", row.curve, row.t, row.tested_freq, row.ci_low),
        )?;
    }
    Ok(())
}

fn ergm() -> Outcome {
    // exp(2β₁) = 3/2 and exp(6β₂/n) = 5/4 make every density ratio rational
    let mut checked = 0;
    for n in 2..=4usize {
        let (u, v) = (ratio(3, 2), ratio(5, 4));
        let model = EdgeTriangleErgm::new(n, 1.5f64.ln() / 2.0, 1.25f64.ln() * n as f64 / 6.0).map_err(err)?;
        let weight = |x: &[usize]| {
            let g = EdgeGraph::from_indicators(n, x).unwrap();
            rpow(&u, g.edge_count()) * rpow(&v, g.triangle_count())
        };
        for x in ProductSpace::binary(edge_slots(n)).states() {
            for slot in 0..edge_slots(n) {
                let (mut with, mut without) = (x.clone(), x.clone());
                with[slot] = 1;
                without[slot] = 0;
                let (w1, w0) = (weight(&with), weight(&without));
                let want = (&w1 / (&w1 + &w0)).to_f64().unwrap();
                let got = model.conditional(slot, &x).ok_or("zero-probability conditional")?.prob(1);
                ensure((got - want).abs() < 1e-14, format!("n={n} x={x:?} slot={slot}: {got} vs {want}"))?;
                checked += 1;
            }
        }
    }
    let cfg = ExperimentConfig::from_json(
        r#"{"kind":"ERGM","n":8,"beta1":-0.2,"beta2":0.05,"motif":{"shape":"triangle"},
            "thresholds":[0,1,2,3,4,5,6,8,10,12,15,20],"replicas":100000,"seed":11,
            "burn_in":2000,"thinning":28,"confidence":0.99}"#,
    )
    .map_err(err)?;
    let r = run_experiment(&cfg).map_err(err)?;
    let norm1 = *r.extras.get("norm1").ok_or("no certified ‖A‖₁")?;
    ensure(!r.hypothesis_violated && norm1 < 1.0, format!("‖A‖₁ = {norm1}: {:?}", r.warnings))?;
    rows_within_ci(&r)?;
    Ok(format!("{checked} conditionals exact; ‖A‖₁ = {norm1:.4}, worst freq - bound = {:.3}", r.worst_excess()))
}

fn brute_force_tour<L: CostFunction>(ps: &PointSet, l: &L) -> f64 {
    let n = ps.len();
    (1..n)
        .permutations(n - 1)
        .map(|rest| {
            let mut order = vec![0];
            order.extend(rest);
            Tour::new(ps, order, l).unwrap().cost
        })
        .fold(f64::INFINITY, f64::min)
}

fn brute_force_tree(ps: &PointSet) -> f64 {
    let n = ps.len();
    if n == 2 {
        return euclid(ps.get(0), ps.get(1));
    }
    let mut best = f64::INFINITY;
    for seq in (0..n - 2).map(|_| 0..n).multi_cartesian_product() {
        let mut degree = vec![1usize; n];
        for &v in &seq {
            degree[v] += 1;
        }
        let mut total = 0.0;
        for &v in &seq {
            let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
            total += euclid(ps.get(leaf), ps.get(v));
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
        total += euclid(ps.get(rest[0]), ps.get(rest[1]));
        best = best.min(total);
    }
    best
}

fn geometry_oracles() -> Outcome {
    let tsp_gap = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(12, k);
            let ps = PointSet::random(2 + (k as usize % 7), &mut rng);
            let got = exact_tsp(&ps, &Euclidean).map_err(err)?.cost;
            Ok((got - brute_force_tour(&ps, &Euclidean)).abs())
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(tsp_gap < 1e-9, format!("exact tour differs from brute force by {tsp_gap}"))?;
    let tree_gap = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(13, k);
            let ps = PointSet::random(2 + (k as usize % 6), &mut rng);
            Ok((mst(&ps).map_err(err)?.total_length - brute_force_tree(&ps)).abs())
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(tree_gap < 1e-9, format!("spanning tree differs from brute force by {tree_gap}"))?;
    let reports = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(14, k);
            let n = if k == 0 { 1000 } else { rng.random_range(2..=1000) };
            let ps = PointSet::random(n, &mut rng);
            Ok(mst_invariant_check(&mst(&ps).map_err(err)?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let mut worst = (0.0f64, 0usize, 0.0f64);
    for r in &reports {
        ensure(r.holds(), format!("invariant fails: {r:?}"))?;
        worst = (worst.0.max(r.sum_sq_edges), worst.1.max(r.max_degree), worst.2.max(r.sum_sq_alpha));
    }
    Ok(format!(
        "tour gap {tsp_gap:.1e}, tree gap {tree_gap:.1e}; max Σe² {:.3}, max degree {}, max Σα² {:.2}",
        worst.0, worst.1, worst.2
    ))
}

fn upper_ci_within_bound(r: &ExperimentReport) -> Result<(), String> {
    ensure(!r.hypothesis_violated, format!("{}: hypothesis violated: {:?}", r.kind, r.warnings))?;
    for row in &r.rows {
        let bound = row.bound.ok_or_else(|| format!("{} t={}: no bound", row.curve, row.t))?;
        ensure(row.ci_high <= bound, format!("{} t={}: CI high {} > bound {bound}", row.curve, row.t, row.ci_high))?;
    }
    Ok(())
}

fn geometric_campaigns() -> Outcome {
    let thresholds = "[0.05,0.1,0.2,0.4,0.8,1.6,3.2,10,40,60,80]";
    let mut detail = Vec::new();
    for kind in ["TSP", "STEINER"] {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"kind":"{kind}","points":{{"layout":"grid","cols":8,"rows":5}},"n":15,
                "thresholds":{thresholds},"replicas":10000,"seed":13}}"#
        ))
        .map_err(err)?;
        let r = run_experiment(&cfg).map_err(err)?;
        upper_ci_within_bound(&r)?;
        let nontrivial = r.rows.iter().filter(|row| row.bound.is_some_and(|b| b < 1.0)).count();
        detail.push(format!("{kind}: {} rows, {nontrivial} below 1, median {:.4}", r.rows.len(), r.centre));
    }
    Ok(detail.join("; "))
}

fn lipschitz_witnesses() -> Outcome {
    let costs: Vec<(String, Box<dyn CostFunction>)> = vec![
        ("euclidean".into(), Box::new(Euclidean)),
        ("scaled 1.5".into(), Box::new(ScaledEuclidean::new(1.5).map_err(err)?)),
        ("scaled 2".into(), Box::new(ScaledEuclidean::new(2.0).map_err(err)?)),
        ("elevation 1.5".into(), Box::new(ElevationCost::new(1.5).map_err(err)?)),
        ("elevation 2".into(), Box::new(ElevationCost::new(2.0).map_err(err)?)),
    ];
    let slacks = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(15, k);
            let n = rng.random_range(2..=9);
            let x = PointSet::random(n, &mut rng);
            let y_pts = x
                .points()
                .iter()
                .map(|&p| if rng.random_bool(0.4) { [rng.random(), rng.random()] } else { p })
                .collect();
            let y = PointSet::new(y_pts).map_err(err)?;
            let mut worst = f64::INFINITY;
            for (name, l) in &costs {
                let slack = tsp_lipschitz_slack(&x, &y, l.as_ref()).map_err(err)?;
                ensure(slack >= -1e-9, format!("{name}: Lipschitz slack {slack} on pair {k}"))?;
                let w = tsp_witness_check(&x, l.as_ref()).map_err(err)?;
                ensure(w.alpha_ok && w.square_sum_ok, format!("{name}: Σα² = {} > {}", w.sum_sq_alpha, w.alpha_bound))?;
                worst = worst.min(slack);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let min = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("1000 pairs × {} costs, min slack {min:.4}", costs.len()))
}

fn determinism() -> Outcome {
    let configs = [
        r#"{"kind":"CW","n":60,"beta":0.6,"h":0.3,"sampler":"glauber","thresholds":[0,0.1,0.2],"replicas":2000,"seed":21,"burn_in":300,"thinning":60}"#,
        r#"{"kind":"ERGM","n":6,"beta1":-0.2,"beta2":0.05,"thresholds":[0,1,2,4],"replicas":2000,"seed":21,"burn_in":500,"thinning":15}"#,
        r#"{"kind":"TSP","points":{"layout":"random","count":30},"n":9,"cost":{"kind":"elevation","c":1.5},"thresholds":[0,0.1,0.5],"replicas":1000,"seed":21}"#,
        r#"{"kind":"STEINER","points":{"layout":"grid","cols":8,"rows":5},"n":15,"thresholds":[0,0.1,0.5],"replicas":1000,"seed":21}"#,
        r#"{"kind":"SWR","universe":20,"n":6,"thresholds":[0,0.5,1],"replicas":3000,"seed":21}"#,
        r#"{"kind":"CONVEX","law":"uniform_swr","universe":8,"n":3,"set":"contains_element","element":1,"thresholds":[0,0.5,1],"replicas":1000,"seed":21}"#,
        r#"{"kind":"COUPLING","n":10,"beta":0.5,"thresholds":[0,10,50],"replicas":2000,"seed":21}"#,
    ];
    for c in configs {
        let cfg = ExperimentConfig::from_json(c).map_err(err)?;
        let mut outputs = Vec::new();
        for threads in [1, 4, 8] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
            let r = pool.install(|| run_experiment(&cfg)).map_err(err)?;
            outputs.push(r.to_csv_string().map_err(err)?);
        }
        ensure(
            outputs[0] == outputs[1] && outputs[0] == outputs[2],
            format!("{} CSV differs across thread counts", cfg.model.kind()),
        )?;
    }
    Ok(format!("{} experiments byte-identical at 1, 4, 8 threads", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 15] = [
        ("critical constant root", critical_constant, None),
        ("constant composition", constant_composition, None),
        ("interdependence matrix exactness", interdependence_exactness, Some(5)),
        ("sampling inhomogeneity", inhomogeneity, Some(30)),
        ("self-bounding verification", self_bounding, Some(60)),
        ("coupling correctness", coupling_correctness, Some(1)),
        ("coupled chain contraction", coupled_contraction, Some(60)),
        ("convex distance solver", convex_distance_checks, Some(120)),
        ("convex distance inequality", convex_distance_inequality, Some(60)),
        ("curie-weiss tail validity", curie_weiss_validity, Some(30)),
        ("ergm conditionals and subgraph tails", ergm, Some(600)),
        ("geometry oracles", geometry_oracles, Some(300)),
        ("tsp and steiner campaigns", geometric_campaigns, Some(900)),
        ("lipschitz witnesses", lipschitz_witnesses, Some(300)),
        ("determinism across threads", determinism, None),
    ];
    let mut failures = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(secs)) if elapsed > Duration::from_secs(*secs) => {
                Err(format!("took {:.1} s, limit {secs} s", elapsed.as_secs_f64()))
            }
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => {
                failures += 1;
                ("FAIL", e.clone())
            }
        };
        println!("[{tag}] {:>2} {name} ({:.2} s): {detail}", k + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
