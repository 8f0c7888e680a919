//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use common::*;
use kernsom::cli::{run, Cli};
use kernsom::communities::{find_perfect_communities, verify_community_spectral};
use kernsom::graph::{betweenness, WeightedGraph};
use kernsom::kernel::{diffusion_kernel, explicit_feature_map, kernel_distance_sq, prototype_distance_sq};
use kernsom::som::{
    kaski_lagus, q_modularity, quantization_error, train, GridTopology, Phase, SomConfig, SomInit, SomModel,
};
use kernsom::spectral::{laplacian, LaplacianMode};
use kernsom::{dot, synth, Error};
use nalgebra::DMatrix;
use ndarray::Array2;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn perfect_community_oracle() -> Outcome {
    let start = Instant::now();
    let probs = [0.2, 0.5, 0.8];
    let mut mismatches = 0;
    for seed in 0..200u64 {
        let mut r = rng(1000 + seed);
        let n = r.gen_range(1..=10);
        let g = random_graph(n, probs[seed as usize % 3], 1, &mut r);
        let found: BTreeSet<Vec<usize>> = find_perfect_communities(&g).into_iter().map(|c| c.members).collect();
        if found != brute_force_perfect(&g) {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    outcome(mismatches == 0 && within(t, Duration::from_secs(10)), format!("{mismatches} mismatches in 200 graphs, {t:.2?}"))
}

fn planted_recovery() -> Outcome {
    let start = Instant::now();
    let mut missing = 0;
    let mut worst_residual = 0.0f64;
    let mut worst_corollary = 0.0f64;
    let mut multiplicity_failures = 0;
    let mut max_n = 0;
    for seed in 0..50u64 {
        let mut r = rng(2000 + seed);
        let base_n = r.gen_range(6..=40);
        let p = synth::planted_communities(base_n, 0.3, 5, seed).expect("planted graph");
        let g = &p.graph;
        assert!(g.vertex_count() <= 200);
        max_n = max_n.max(g.vertex_count());
        let found = find_perfect_communities(g);
        let found_sets: BTreeSet<&Vec<usize>> = found.iter().map(|c| &c.members).collect();
        missing += p.planted.iter().filter(|c| !found_sets.contains(c)).count();
        let dec = laplacian(g, LaplacianMode::Unweighted).decompose().expect("decomposition");
        for c in &found {
            match verify_community_spectral(g, c, &dec, 1e-8) {
                Ok(rep) => {
                    worst_residual = worst_residual.max(rep.max_residual);
                    worst_corollary = worst_corollary.max(rep.corollary_max_deviation);
                    if !rep.multiplicity_ok {
                        multiplicity_failures += 1;
                    }
                }
                Err(_) => worst_residual = f64::INFINITY,
            }
        }
    }
    let t = start.elapsed();
    let pass = missing == 0
        && worst_residual <= 1e-8
        && worst_corollary <= 1e-8
        && multiplicity_failures == 0
        && within(t, Duration::from_secs(60));
    outcome(
        pass,
        format!(
            "{missing} planted classes missed, max residual {worst_residual:.1e}, max corollary deviation \
             {worst_corollary:.1e}, {multiplicity_failures} multiplicity failures, n <= {max_n}, {t:.2?}"
        ),
    )
}

/// Connected weighted graphs shared by the kernel criteria.
fn kernel_suite() -> Vec<WeightedGraph> {
    (0..50u64)
        .map(|seed| {
            let mut r = rng(3000 + seed);
            let n = r.gen_range(2..=100);
            let p = (2.5 * (n as f64).ln() / n as f64).clamp(0.05, 1.0);
            random_connected(n, p, 5, &mut r)
        })
        .collect()
}

fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn kernel_algebra(suite: &[WeightedGraph]) -> Outcome {
    let mut row = 0.0f64;
    let mut semigroup = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut identity = 0.0f64;
    for g in suite {
        let dec = laplacian(g, LaplacianMode::Weighted).decompose().expect("decomposition");
        let n = g.vertex_count();
        for beta in [0.01, 0.05, 0.5] {
            let k = diffusion_kernel(&dec, beta).unwrap();
            row = row.max(k.row_sum_deviation());
            let k2 = diffusion_kernel(&dec, 2.0 * beta).unwrap();
            semigroup = semigroup.max(max_abs(&(&k2.matrix - &k.matrix.dot(&k.matrix))));
            // independent eigensolver for the spectrum
            let m = DMatrix::from_fn(n, n, |i, j| k.matrix[[i, j]]);
            min_eig = min_eig.min(m.symmetric_eigenvalues().min());
        }
        let k0 = diffusion_kernel(&dec, 0.0).unwrap();
        identity = identity.max(max_abs(&(&k0.matrix - &Array2::<f64>::eye(n))));
    }
    let pass = row <= 1e-10 && semigroup <= 1e-8 && min_eig >= -1e-10 && identity <= 1e-12;
    outcome(
        pass,
        format!(
            "row sums {row:.1e}, |D^2b - (D^b)^2| {semigroup:.1e}, min eigenvalue {min_eig:.1e}, beta=0 {identity:.1e}"
        ),
    )
}

fn kernel_trick(suite: &[WeightedGraph]) -> Outcome {
    let mut worst = 0.0f64;
    let mut graphs = 0;
    let mut r = rng(4000);
    for g in suite.iter().filter(|g| g.vertex_count() <= 50) {
        graphs += 1;
        let n = g.vertex_count();
        let dec = laplacian(g, LaplacianMode::Weighted).decompose().unwrap();
        for beta in [0.01, 0.05, 0.5] {
            let k = diffusion_kernel(&dec, beta).unwrap();
            let fm = explicit_feature_map(&dec, beta);
            let mut random_gamma = || -> Vec<f64> {
                let raw: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / s).collect()
            };
            let a = random_gamma();
            let b = random_gamma();
            let pa = fm.combine(&a);
            let pb = fm.combine(&b);
            for i in 0..n {
                let xi = fm.coordinates.row(i);
                let d = kernel_distance_sq(&k, i, &a).unwrap();
                worst = worst.max((d - fm.distance_sq(xi, pa.view())).abs());
                let mut onehot = vec![0.0; n];
                onehot[(i + 1) % n] = 1.0;
                let d = kernel_distance_sq(&k, i, &onehot).unwrap();
                let target = fm.coordinates.row((i + 1) % n);
                worst = worst.max((d - fm.distance_sq(xi, target)).abs());
            }
            let d = prototype_distance_sq(&k, &a, &b).unwrap();
            worst = worst.max((d - fm.distance_sq(pa.view(), pb.view())).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.1e} over {graphs} graphs with n <= 50"))
}

fn bare_model(grid: GridTopology, gamma: Array2<f64>, assignment: Vec<usize>) -> SomModel {
    SomModel {
        config: SomConfig::new(grid, SomInit::KernelPca),
        beta: 0.5,
        labels: vec![],
        vertex_set_hash: String::new(),
        gamma,
        assignment,
        log: vec![],
        lineage: vec![],
    }
}

fn closed_forms() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let k2 = unit_graph(2, &[(0, 1)]);
    let dec = laplacian(&k2, LaplacianMode::Weighted).decompose().unwrap();
    let k = diffusion_kernel(&dec, 0.5).unwrap();
    let ok = (k.get(0, 0) - 0.683940).abs() <= 1e-6 && (k.get(0, 1) - 0.316060).abs() <= 1e-6;
    pass &= ok;
    notes.push(format!("K2 entries {:.6}/{:.6}", k.get(0, 0), k.get(0, 1)));

    let one = train(&k, &SomConfig::new(GridTopology::new(1, 1).unwrap(), SomInit::Random { seed: 0 })).unwrap();
    let e = quantization_error(&k, &one).unwrap();
    pass &= (e - (-1.0f64).exp()).abs() <= 1e-9;
    notes.push(format!("M=1 error {e:.9}"));

    let pair = bare_model(GridTopology::new(1, 2).unwrap(), Array2::eye(2), vec![0, 1]);
    let kl = kaski_lagus(&k, &pair).unwrap();
    pass &= (kl - (2.0 * (-1.0f64).exp()).sqrt()).abs() <= 1e-9;
    notes.push(format!("KL {kl:.9}"));

    let tri = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
    let split = [0, 0, 0, 1, 1, 1];
    let q1 = q_modularity(&unit_graph(6, &tri), &split, true).unwrap();
    pass &= q1 == 1.0;
    let mut bridged = tri.to_vec();
    bridged.push((2, 3));
    let bridged = unit_graph(6, &bridged);
    let q2 = q_modularity(&bridged, &split, true).unwrap();
    pass &= (q2 - 5.0 / 7.0).abs() <= 1e-12;
    let single = matches!(q_modularity(&bridged, &[0; 6], true), Err(Error::UndefinedModularity(_)));
    pass &= single;
    notes.push(format!("Q {q1} / {q2:.12}, single cluster error: {single}"));
    outcome(pass, notes.join(", "))
}

fn two_cliques(seed: u64) -> (WeightedGraph, usize) {
    let mut r = rng(6000 + seed);
    let a = r.gen_range(3..=12);
    let b = r.gen_range(3..=12);
    let mut e = Vec::new();
    for (lo, hi) in [(0, a), (a, a + b)] {
        for i in lo..hi {
            for j in (i + 1)..hi {
                e.push((i, j, r.gen_range(1..=4) as f64));
            }
        }
    }
    (WeightedGraph::from_index_edges(a + b, &e).unwrap(), a)
}

fn som_behaviour() -> Outcome {
    // determinism
    let mut identical = true;
    for seed in 0..5u64 {
        let g = synth::connected_erdos_renyi(40, 0.15, seed);
        let dec = laplacian(&g, LaplacianMode::Weighted).decompose().unwrap();
        let k = diffusion_kernel(&dec, 0.05).unwrap();
        for init in [SomInit::Random { seed }, SomInit::KernelPca] {
            let cfg = SomConfig::new(GridTopology::new(3, 3).unwrap(), init);
            let a = train(&k, &cfg).unwrap();
            let b = train(&k, &cfg).unwrap();
            let bits = |m: &SomModel| m.gamma.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            identical &= bits(&a) == bits(&b) && a.assignment == b.assignment && a.log == b.log;
        }
    }

    // final phase monotonicity
    let mut worst_increase = f64::NEG_INFINITY;
    let mut final_steps = 0;
    for seed in 0..20u64 {
        let g = synth::connected_erdos_renyi(30 + seed as usize, 0.2, 100 + seed);
        let dec = laplacian(&g, LaplacianMode::Weighted).decompose().unwrap();
        let k = diffusion_kernel(&dec, 0.05).unwrap();
        // a large final epsilon ends annealing early, so the hard phase has work to do
        for eps in [0.01, 0.3, 0.6, 0.9] {
            let mut cfg = SomConfig::new(GridTopology::new(3, 4).unwrap(), SomInit::Random { seed });
            cfg.final_epsilon = eps;
            let m = train(&k, &cfg).unwrap();
            let fin: Vec<f64> =
                m.log.iter().filter(|r| r.phase == Phase::Final).map(|r| r.quantization_error).collect();
            for w in fin.windows(2) {
                worst_increase = worst_increase.max(w[1] - w[0]);
                final_steps += 1;
            }
        }
    }
    let monotone = final_steps > 0 && worst_increase <= 1e-10;

    // block separation
    let mut separated = 0;
    for seed in 0..30u64 {
        let (g, a) = two_cliques(seed);
        let dec = laplacian(&g, LaplacianMode::Weighted).decompose().unwrap();
        let k = diffusion_kernel(&dec, 0.05).unwrap();
        let m = train(&k, &SomConfig::new(GridTopology::new(1, 2).unwrap(), SomInit::KernelPca)).unwrap();
        let left: BTreeSet<usize> = m.assignment[..a].iter().copied().collect();
        let right: BTreeSet<usize> = m.assignment[a..].iter().copied().collect();
        if left.len() == 1 && right.len() == 1 && left != right {
            separated += 1;
        }
    }
    let pass = identical && monotone && separated == 30;
    outcome(
        pass,
        format!(
            "bit-identical reruns: {identical}, max final-phase increase {worst_increase:.1e} over {final_steps} \
             steps, two-clique separation {separated}/30"
        ),
    )
}

fn betweenness_oracle() -> Outcome {
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let mut r = rng(7000 + seed);
        let n = r.gen_range(1..=8);
        let g = random_graph(n, r.gen_range(0.2..0.9), 3, &mut r);
        let fast = betweenness(&g);
        let slow = betweenness_by_enumeration(&g);
        if fast.iter().zip(&slow).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0)) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in 100 graphs"))
}

fn cli(args: &[&str]) -> Result<Vec<std::path::PathBuf>, Error> {
    let mut full = vec!["kernsom"];
    full.extend_from_slice(args);
    run(Cli::try_parse_from(full).expect("valid arguments"))
}

fn check_artifacts(files: &[std::path::PathBuf]) -> Result<usize, String> {
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let ext = f.extension().and_then(|e| e.to_str()).unwrap_or("");
        let parsed = match ext {
            "json" => serde_json::from_str::<serde_json::Value>(&text).map(|_| ()).map_err(|e| e.to_string()),
            "dot" => dot::parse(&text).map(|_| ()).map_err(|e| e.to_string()),
            "csv" => {
                let mut rdr = csv::Reader::from_reader(text.as_bytes());
                rdr.records().collect::<Result<Vec<_>, _>>().map(|_| ()).map_err(|e| e.to_string())
            }
            other => Err(format!("unexpected artifact type `{other}`")),
        };
        parsed.map_err(|e| format!("{}: {e}", f.display()))?;
    }
    Ok(files.len())
}

fn smoke(dir: &Path) -> Result<String, String> {
    let start = Instant::now();
    let g = synth::large_social_graph(2024).map_err(|e| e.to_string())?;
    let input = dir.join("graph.csv");
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).map_err(|e| e.to_string())?;
    std::fs::write(&input, buf).map_err(|e| e.to_string())?;
    let input = input.to_str().unwrap().to_string();
    let out = |name: &str| dir.join(name).to_str().unwrap().to_string();

    let mut written = 0;
    let mut step = |args: Vec<String>| -> Result<Vec<std::path::PathBuf>, String> {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let files = cli(&refs).map_err(|e| format!("{}: {e}", args[0]))?;
        written += check_artifacts(&files)?;
        Ok(files)
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    step(s(&["stats", "--input", &input, "--out", &out("stats")]))?;
    step(s(&["communities", "--input", &input, "--out", &out("communities")]))?;
    step(s(&["som", "--input", &input, "--out", &out("som"), "--beta", "0.05", "--grid", "7x7", "--init", "pca"]))?;
    let model = out("som/model.json");
    step(s(&["drilldown", "--input", &input, "--out", &out("drill"), "--model", &model, "--unit", "largest", "--grid", "3x3"]))?;
    step(s(&["export-overlay", "--communities", &out("communities/communities.json"), "--model", &model, "--out", &out("overlay")]))?;

    let quality: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("som/quality.json")).unwrap()).unwrap();
    let drill: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("drill/quality.json")).unwrap()).unwrap();
    let t = start.elapsed();
    if t > Duration::from_secs(300) {
        return Err(format!("took {t:.1?}"));
    }
    Ok(format!(
        "n={} m={} mean degree {:.2}; {} nonempty units, largest cluster {} drilled; {written} artifacts parsed, {t:.1?}",
        g.vertex_count(),
        g.edge_count(),
        2.0 * g.edge_count() as f64 / g.vertex_count() as f64,
        quality["nonempty_units"],
        drill["cluster_size"],
    ))
}

fn full_scale_smoke() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    match smoke(dir.path()) {
        Ok(d) => outcome(true, d),
        Err(e) => outcome(false, e),
    }
}

fn main() {
    // libtest-style arguments (filters, --nocapture) are accepted and ignored
    let suite = kernel_suite();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("perfect-community oracle equivalence", Box::new(perfect_community_oracle)),
        ("planted-community recovery and spectral verification", Box::new(planted_recovery)),
        ("diffusion-kernel algebra", Box::new(|| kernel_algebra(&suite))),
        ("kernel-trick oracle", Box::new(|| kernel_trick(&suite))),
        ("closed-form spot values", Box::new(closed_forms)),
        ("SOM behaviour", Box::new(som_behaviour)),
        ("betweenness oracle", Box::new(betweenness_oracle)),
        ("full-scale smoke test", Box::new(full_scale_smoke)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {}: {} ({})", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
