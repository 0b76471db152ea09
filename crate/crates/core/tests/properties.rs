use nalgebra::DMatrix;
use proptest::prelude::*;

use sysbath::eigensolver::{lowest_eigenpairs, DavidsonOptions};
use sysbath::fcidump::{emit_fcidump, parse_fcidump, IntegralSet};
use sysbath::mixed::{rank_modes, MixedOptions, ProjectedOperator};
use sysbath::model::{enumerate_bath_modes, EnvModel, ModeKind, OrbitalPartition};
use sysbath::normal_modes::{diagonalize, CouplingMatrix};
use sysbath::oracle::fci_lowest;
use sysbath::pauli::PauliTermSum;
use sysbath::pipeline::{Pipeline, PipelineOptions};
use sysbath::screening::screening_sums;
use sysbath::subspace::{truncated_dim, ExcitationCount, TruncatedSubspace};
use sysbath::synthetic::{random_bath, random_integral_set, rng, synthetic_integrals, SyntheticSpec};

fn molecule(norb: usize, seed: u64, delta12: f64) -> (IntegralSet, Pipeline) {
    let set = synthetic_integrals(&SyntheticSpec {
        delta12,
        ..SyntheticSpec::new(norb, norb, seed)
    });
    let part = OrbitalPartition::default_for(&set).unwrap();
    let run = Pipeline::build(&set, &part, &PipelineOptions::default()).unwrap();
    (set, run)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn emit_then_parse_is_identity(norb in 1usize..7, seed in any::<u64>()) {
        let set = random_integral_set(norb, seed);
        let back = parse_fcidump(&emit_fcidump(&set)).unwrap();
        prop_assert_eq!(set.max_abs_diff(&back), Some(0.0));
        prop_assert_eq!(back.orbsym, set.orbsym);
    }

    #[test]
    fn all_eight_index_orders_agree(seed in any::<u64>(), idx in prop::array::uniform4(0usize..4)) {
        let set = random_integral_set(4, seed);
        let [p, q, r, s] = idx;
        let v = set.eri(p, q, r, s);
        for [a, b, c, d] in [[q, p, r, s], [p, q, s, r], [q, p, s, r], [r, s, p, q], [s, r, p, q], [r, s, q, p], [s, r, q, p]] {
            prop_assert_eq!(set.eri(a, b, c, d), v);
        }
    }

    #[test]
    fn mode_count_matches_partition(n_db in 0usize..6, n_empt in 0usize..6) {
        let norb = n_db + n_empt + 2;
        let set = synthetic_integrals(&SyntheticSpec::new(norb, 2 * n_db + 2, 1));
        let part = OrbitalPartition::with_frontier(norb, n_db, n_db + 1).unwrap();
        let sg = enumerate_bath_modes(&set, &part, EnvModel::Singlet, false).unwrap();
        let tr = enumerate_bath_modes(&set, &part, EnvModel::Triplet, false).unwrap();
        prop_assert_eq!(sg.len(), (n_db + 1) * (n_empt + 1) - 1);
        prop_assert_eq!(tr.len(), (n_db + 2) * (n_empt + 2) - 4);
    }

    #[test]
    fn paired_modes_have_bounded_mixing(norb in 4usize..9, seed in any::<u64>()) {
        let set = synthetic_integrals(&SyntheticSpec::new(norb, norb, seed));
        let part = OrbitalPartition::default_for(&set).unwrap();
        for model in [EnvModel::Singlet, EnvModel::Triplet] {
            for m in enumerate_bath_modes(&set, &part, model, false).unwrap().modes {
                prop_assert!(m.omega > 0.0);
                prop_assert!(m.r > 0.0 && m.r <= 1.0, "{}", m);
                prop_assert!(m.e_corr <= 0.0);
                if m.kind == ModeKind::EnvEnv {
                    prop_assert!(m.r >= std::f64::consts::FRAC_1_SQRT_2);
                }
            }
        }
    }

    #[test]
    fn explicit_plus_remainder_is_full(seed in any::<u64>(), n in 1usize..30, mask in prop::collection::vec(any::<bool>(), 30)) {
        let mut r = rng(seed);
        let bath = random_bath(n, 1.0, &mut r);
        let cm = CouplingMatrix::from_parts(bath.omega, bath.v).unwrap();
        let nm = diagonalize(&cm, &bath.lambda).unwrap();
        let full = screening_sums(&nm, |_| true);
        let a = screening_sums(&nm, |k| mask[k]);
        let b = screening_sums(&nm, |k| !mask[k]);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((a[i][j] + b[i][j] - full[i][j]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ranking_is_a_descending_sort(seed in any::<u64>(), n in 1usize..40) {
        let mut r = rng(seed);
        let bath = random_bath(n, 1.0, &mut r);
        let cm = CouplingMatrix::from_parts(bath.omega, bath.v).unwrap();
        let nm = diagonalize(&cm, &bath.lambda).unwrap();
        let rank = rank_modes(&nm);
        let mut oracle: Vec<(f64, usize)> = (0..n)
            .map(|k| {
                let g = nm.g[k];
                ((g[1] * g[1] + (g[0] - g[2]) * (g[0] - g[2])) / nm.big_omega[k], k)
            })
            .collect();
        oracle.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        prop_assert_eq!(rank.order, oracle.iter().map(|x| x.1).collect::<Vec<_>>());
    }

    #[test]
    fn subspace_ranks_invert(n in 1usize..20, k in 0usize..5, bath_only in any::<bool>()) {
        let k = k.min(n);
        let counting = if bath_only { ExcitationCount::BathOnly } else { ExcitationCount::AllQubits };
        let sub = TruncatedSubspace::new(n.max(2), k, counting).unwrap();
        let n = n.max(2);
        let expect: u128 = match counting {
            ExcitationCount::AllQubits => (0..=k).map(|i| binomial(n, i)).sum(),
            ExcitationCount::BathOnly => 4 * (0..=k.min(n - 2)).map(|i| binomial(n - 2, i)).sum::<u128>(),
        };
        prop_assert_eq!(sub.dim() as u128, expect);
        if counting == ExcitationCount::AllQubits {
            prop_assert_eq!(truncated_dim(n, k), expect);
        }
        for i in 0..sub.dim() {
            prop_assert_eq!(sub.index_of(sub.state(i)), Some(i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uniform_level_shift_leaves_gaps(seed in 0u64..1000, c in -0.5f64..0.5) {
        let (set, run) = molecule(6, seed, 0.4);
        let mut shifted = set.clone();
        for p in 0..set.norb() {
            shifted.set_t(p, p, set.t(p, p) + c);
        }
        let part = OrbitalPartition::default_for(&shifted).unwrap();
        let moved = Pipeline::build(&shifted, &part, &PipelineOptions::default()).unwrap();
        let (a, b) = (run.static_solve().unwrap(), moved.static_solve().unwrap());
        prop_assert!((a.triplet_gap - b.triplet_gap).abs() < 1e-10);
        prop_assert!((a.singlet_gap - b.singlet_gap).abs() < 1e-10);
    }

    #[test]
    fn fci_shifts_with_orbital_energies(seed in any::<u64>(), c in -1.0f64..1.0) {
        let set = synthetic_integrals(&SyntheticSpec::new(4, 4, seed));
        let mut shifted = set.clone();
        for p in 0..4 {
            shifted.set_t(p, p, set.t(p, p) + c);
        }
        let a = fci_lowest(&set, 3).unwrap();
        let b = fci_lowest(&shifted, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - x - 4.0 * c).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_energy_nests_in_excitation_limit(seed in 0u64..1000, nq in 1usize..7) {
        let (_, run) = molecule(5, seed, 0.3);
        let nq = nq.min(run.nm.dim());
        let h = run.pauli(nq).unwrap();
        let opts = DavidsonOptions { n_eigs: 1, ..DavidsonOptions::default() };
        let mut prev = f64::INFINITY;
        for k in 0..=nq + 2 {
            let sub = TruncatedSubspace::new(h.n_qubits, k, ExcitationCount::AllQubits).unwrap();
            let e = lowest_eigenpairs(&ProjectedOperator::new(&h, &sub).unwrap(), &opts).unwrap().values[0];
            prop_assert!(e <= prev + 1e-12, "k={} {} > {}", k, e, prev);
            prev = e;
        }
    }

    #[test]
    fn assembled_hamiltonian_is_symmetric(seed in 0u64..1000, nq in 0usize..6) {
        let (_, run) = molecule(6, seed, 0.2);
        let h = run.pauli(nq.min(run.nm.dim())).unwrap();
        let m: DMatrix<f64> = h.to_dense().unwrap();
        prop_assert!((&m - m.transpose()).amax() <= 1e-12);
        let back = PauliTermSum::from_json(&h.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn results_do_not_depend_on_thread_count(seed in 0u64..1000) {
        let (_, run) = molecule(6, seed, 0.4);
        let opts = MixedOptions { nq: 6.min(run.nm.dim()), max_excitations: 3, ..MixedOptions::default() };
        let solve = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run.mixed(&opts).unwrap().eigenvalues)
        };
        let (one, four) = (solve(1), solve(4));
        for (a, b) in one.iter().zip(&four) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
