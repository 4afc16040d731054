use std::collections::HashMap;

use bdmst_core::embedding::{
    chimera_graph, embed_ising, find_embedding, ChainMode, EmbedOptions, Embedding,
    EmbeddedIsing, HardwareGraph, LogicalGraph,
};
use bdmst_core::instances::{catalog_instance, solve_bdmst_exact, BdmstSolution};
use bdmst_core::ising::{bits_from_spins, qubo_to_ising, spins_from_index, IsingModel};
use bdmst_core::qubo::{build_qubo, decode, MapperOptions};
use bdmst_core::samplers::{
    exhaustive_ground, low_energy_census, run_experiment, sample_gauge, simulated_annealing, CensusMethod,
    CensusWindow, ExperimentOptions, ReadTag, SaSchedule, Sampler, SimulatedAnnealing,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(n: usize, density: f64, rng: &mut ChaCha8Rng) -> IsingModel {
    let mut m = IsingModel::new(n);
    for h in m.h.iter_mut() {
        *h = rng.gen_range(-1.0..1.0);
    }
    for i in 0..n {
        for k in i + 1..n {
            if rng.gen::<f64>() < density {
                m.add_coupling(i, k, rng.gen_range(-1.0..1.0));
            }
        }
    }
    m
}

#[test]
fn sa_matches_exhaustive_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sched = SaSchedule {
        sweeps: 300,
        ..SaSchedule::default()
    };
    for t in 0..50 {
        let m = random_model(12, 0.35, &mut rng);
        let exact = exhaustive_ground(&m).unwrap();
        let rs = simulated_annealing(&m, &sched, 40, t).unwrap();
        let best = rs.min_energy().unwrap();
        assert!(
            (best - exact.energy).abs() < 1e-9,
            "model {t}: sa {best} vs exact {}",
            exact.energy
        );
        assert!(best >= exact.energy - 1e-9);
    }
}

#[test]
fn fixed_beta_sa_samples_the_gibbs_distribution() {
    let mut m = IsingModel::new(3);
    m.h = vec![0.3, -0.2, 0.1];
    m.add_coupling(0, 1, -0.5);
    m.add_coupling(1, 2, 0.4);
    m.add_coupling(0, 2, 0.25);
    let beta = 1.0;
    let sched = SaSchedule {
        sweeps: 20,
        beta_start: beta,
        beta_end: beta,
    };
    let reads = 100_000;
    let rs = simulated_annealing(&m, &sched, reads, 77).unwrap();
    let mut empirical: HashMap<Vec<i8>, f64> = HashMap::new();
    for r in &rs.reads {
        *empirical.entry(r.spins.clone()).or_default() += r.count as f64 / reads as f64;
    }
    let weights: Vec<f64> = (0..8)
        .map(|k| (-beta * m.energy(&spins_from_index(k, 3))).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let tv: f64 = (0..8)
        .map(|k| {
            let p = weights[k as usize] / z;
            let q = empirical.get(&spins_from_index(k, 3)).copied().unwrap_or(0.0);
            (p - q).abs()
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "total variation {tv}");
}

fn embedded_instance(graph: &str, weights: &str, delta: usize, j_ferro: f64) -> (EmbeddedIsing, u64) {
    let inst = catalog_instance(graph, weights, delta).unwrap();
    let qubo = build_qubo(&inst, &MapperOptions::default()).unwrap();
    let logical = qubo_to_ising(&qubo).scale_to_range(1.0).unwrap();
    let hw = chimera_graph(8, 8, 4).unwrap();
    let opts = EmbedOptions {
        attempts: 1,
        seed: 5,
        ..EmbedOptions::default()
    };
    let emb = find_embedding(&LogicalGraph::from_ising(&logical), &hw, &opts).unwrap();
    let e = embed_ising(&logical, &emb, &hw, j_ferro, ChainMode::SpanningTree).unwrap();
    let BdmstSolution::Optimal { cost, .. } = solve_bdmst_exact(&inst).unwrap() else {
        panic!("feasible instance expected");
    };
    (e, cost)
}

#[test]
fn embedded_path_instance_reaches_the_oracle_cost() {
    let inst = catalog_instance("m4ver1", "w2", 2).unwrap();
    let qubo = build_qubo(&inst, &MapperOptions::default()).unwrap();
    let (e, cost) = embedded_instance("m4ver1", "w2", 2, 1.2);
    let sampler = SimulatedAnnealing::default();
    let opts = ExperimentOptions::new(1, 1000, 9).identity();
    let rs = run_experiment(&e, &opts, &sampler).unwrap();
    assert_eq!(rs.total_reads(), 1000);
    let mut hits = 0;
    for r in &rs.reads {
        if r.tag != ReadTag::Logical {
            continue;
        }
        let d = decode(&qubo, &inst, &bits_from_spins(&r.spins)).unwrap();
        if d.is_valid() && d.cost() == Some(cost) {
            hits += r.count;
        }
    }
    assert!(hits >= 1, "no read reached cost {cost}");
}

#[test]
fn identity_gauge_experiment_equals_direct_sampling() {
    let (e, _) = embedded_instance("m4ver1", "w3", 2, 1.5);
    let sampler = SimulatedAnnealing {
        schedule: SaSchedule {
            sweeps: 50,
            ..SaSchedule::default()
        },
    };
    let opts = ExperimentOptions::new(1, 64, 3).identity();
    let rs = run_experiment(&e, &opts, &sampler).unwrap();
    let direct = sampler.sample(&e.ising, 64, opts.sampler_seed(0)).unwrap();
    let mut expected: HashMap<Vec<i8>, usize> = HashMap::new();
    for r in &direct.reads {
        let logical: Vec<i8> = e.chains.iter().map(|c| r.spins[c[0]]).collect();
        *expected.entry(logical).or_default() += r.count;
    }
    let mut got: HashMap<Vec<i8>, usize> = HashMap::new();
    for r in &rs.reads {
        *got.entry(r.spins.clone()).or_default() += r.count;
    }
    assert_eq!(got, expected);
}

#[test]
fn gauged_experiments_are_deterministic_and_complete() {
    let (e, _) = embedded_instance("m4ver1", "w3", 2, 1.5);
    let sampler = SimulatedAnnealing {
        schedule: SaSchedule {
            sweeps: 30,
            ..SaSchedule::default()
        },
    };
    let opts = ExperimentOptions::new(4, 25, 17);
    let a = run_experiment(&e, &opts, &sampler).unwrap();
    let b = run_experiment(&e, &opts, &sampler).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total_reads(), 100);
    assert_eq!(a.meta.gauge_seeds.len(), 4);
    for g in 0..4 {
        assert_eq!(a.for_gauge(g).map(|r| r.count).sum::<usize>(), 25);
        let alone = sample_gauge(&e, &opts, &sampler, g).unwrap();
        assert_eq!(alone.reads, a.for_gauge(g).cloned().collect::<Vec<_>>());
        assert_eq!(alone.meta.gauge_seeds, vec![a.meta.gauge_seeds[g]]);
    }
    // energies are those of the original-frame physical model
    for r in a.reads.iter().filter(|r| r.tag == ReadTag::Logical) {
        let phys = e.embed_spins(&r.spins);
        assert!((e.ising.energy(&phys) - r.energy).abs() < 1e-9);
    }
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.jsonl.gz");
    let p2 = dir.path().join("b.jsonl.gz");
    a.write_jsonl_gz(&p1).unwrap();
    b.write_jsonl_gz(&p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

fn triangle_on_square(j_ferro: f64) -> EmbeddedIsing {
    let hw = HardwareGraph::custom(vec![0, 1, 2, 3], vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let mut m = IsingModel::new(3);
    m.h = vec![0.2, 0.4, 0.6];
    m.add_coupling(0, 1, 1.0);
    m.add_coupling(0, 2, 1.0);
    m.add_coupling(1, 2, 1.0);
    let emb = Embedding::new(hw.family().clone(), vec![vec![0, 1], vec![2], vec![3]]);
    embed_ising(&m, &emb, &hw, j_ferro, ChainMode::SpanningTree).unwrap()
}

#[test]
fn census_orders_by_chain_strength() {
    let window = CensusWindow::FractionOfWidth(0.1);
    let weak = low_energy_census(&triangle_on_square(0.5), window, &CensusMethod::Exhaustive)
        .unwrap();
    let strong = low_energy_census(&triangle_on_square(2.0), window, &CensusMethod::Exhaustive)
        .unwrap();
    assert!(weak.fraction_broken > strong.fraction_broken);
    // a chain stronger than all incident couplings leaves the ground window aligned
    let huge = low_energy_census(
        &triangle_on_square(10.0),
        CensusWindow::Absolute(0.1),
        &CensusMethod::Exhaustive,
    )
    .unwrap();
    assert_eq!(huge.fraction_broken, 0.0);
}

#[test]
fn full_window_census_counts_misaligned_states() {
    let e = triangle_on_square(1.0);
    let c = low_energy_census(&e, CensusWindow::FractionOfWidth(1.0), &CensusMethod::Exhaustive)
        .unwrap();
    assert_eq!(c.states_in_window, 16);
    // 2^3 aligned states out of 2^4
    assert!((c.fraction_broken - (1.0 - 8.0 / 16.0)).abs() < 1e-12);
}

#[test]
fn sampled_census_stays_in_range() {
    let e = triangle_on_square(0.5);
    let c = low_energy_census(
        &e,
        CensusWindow::FractionOfWidth(0.1),
        &CensusMethod::Sampled {
            schedule: SaSchedule {
                sweeps: 50,
                ..SaSchedule::default()
            },
            num_reads: 200,
            seed: 1,
        },
    )
    .unwrap();
    assert!((0.0..=1.0).contains(&c.fraction_broken));
    assert!(c.states_in_window >= 1);
}
