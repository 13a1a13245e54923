//! Cross-solver contracts: enumeration vs branch and bound vs alternating,
//! all checked against brute-force oracles on small instances.

mod common;

use common::{partitioned_ls_enumeration, sse, subset_sum_k1_closed_form};
use ndarray::{arr1, arr2, Array1};
use partls::instances::{gen_random, gen_subset_sum, closed_form_value, SubsetSumInstance};
use partls::model::{
    objective, predict, predict_raw, renormalize, validate, Model, RawSolution,
    DEFAULT_FEASIBILITY_TOL,
};
use partls::solver::{augment_regularization, fit_alt, fit_bnb, fit_opt, lower_bound, GroupSign};
use partls::{Dataset, FitConfig, Partition};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn groups_of(partition: &Partition) -> Vec<Vec<usize>> {
    partition.groups().map(|g| g.to_vec()).collect()
}

#[test]
fn fit_opt_matches_subset_sum_closed_form() {
    let inst = SubsetSumInstance::new(vec![1, 2, 3], 1.0).unwrap();
    let (data, partition) = gen_subset_sum(&inst);
    let report = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
    assert!((report.objective - 7.0).abs() <= 1e-6, "objective {}", report.objective);

    // Cross-check with the sign-vector x active-set oracle.
    let oracle = partitioned_ls_enumeration(data.x(), data.y(), &groups_of(&partition));
    assert!((report.objective - oracle).abs() <= 1e-8);
}

#[test]
fn fit_opt_strict_on_unsolvable_single_value() {
    let inst = SubsetSumInstance::new(vec![2], 1.0).unwrap();
    let (data, partition) = gen_subset_sum(&inst);
    let report = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
    let closed_form = subset_sum_k1_closed_form(2.0, 1.0);
    assert!((closed_form - 8.0 / 3.0).abs() <= 1e-12);
    assert!((report.objective - closed_form).abs() <= 1e-6);
    assert!(report.objective > closed_form_value(&inst) + 0.5);
}

#[test]
fn fit_opt_matches_bruteforce_on_random_instances() {
    for seed in 0..15 {
        let features = 3 + (seed as usize) % 4; // up to 6
        let groups = 1 + (seed as usize) % 3;
        let (data, partition, _) = gen_random(12, features, groups, seed, 0.3).unwrap();
        let report = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let oracle = partitioned_ls_enumeration(data.x(), data.y(), &groups_of(&partition));
        assert!(
            (report.objective - oracle).abs() <= 1e-8 * (1.0 + oracle),
            "seed {seed}: {} vs oracle {oracle}",
            report.objective
        );
        assert!(validate(&report.model, &partition, DEFAULT_FEASIBILITY_TOL).unwrap().passed);
    }
}

#[test]
fn unsolvable_gap_confirmed_by_enumeration_oracle() {
    // Odd totals cannot split evenly, so the objective must sit strictly
    // above the closed-form value; the enumeration oracle confirms the gap.
    for values in [vec![1u64, 2], vec![2, 2, 1], vec![3, 1, 1]] {
        let inst = SubsetSumInstance::new(values.clone(), 1.0).unwrap();
        let (data, partition) = gen_subset_sum(&inst);
        let report = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let oracle = partitioned_ls_enumeration(data.x(), data.y(), &groups_of(&partition));
        assert!(
            (report.objective - oracle).abs() <= 1e-8 * (1.0 + oracle),
            "{values:?}: {} vs oracle {oracle}",
            report.objective
        );
        let gap = oracle - closed_form_value(&inst);
        assert!(gap > 1e-3, "{values:?}: oracle gap {gap} not strictly positive");
    }
}

#[test]
fn regularized_bnb_matches_regularized_opt() {
    for seed in 0..10 {
        let (data, partition, _) = gen_random(12, 6, 3, 700 + seed, 0.3).unwrap();
        let config = FitConfig { eta: 0.9, ..FitConfig::default() };
        let opt = fit_opt(&data, &partition, &config).unwrap();
        let bnb = fit_bnb(&data, &partition, &config).unwrap();
        assert!(
            (opt.objective - bnb.objective).abs() <= 1e-8 * (1.0 + opt.objective),
            "seed {seed}: {} vs {}",
            opt.objective,
            bnb.objective
        );
    }
}

#[test]
fn regularized_alt_never_beats_regularized_opt() {
    for seed in 0..5 {
        let (data, partition, _) = gen_random(15, 6, 2, 800 + seed, 0.2).unwrap();
        let config =
            FitConfig { eta: 0.5, restarts: 20, iterations: 15, ..FitConfig::default() };
        let opt = fit_opt(&data, &partition, &config).unwrap();
        let (alt, _) = fit_alt(&data, &partition, &config).unwrap();
        assert!(
            alt.objective >= opt.objective - 1e-9,
            "seed {seed}: alt {} below opt {}",
            alt.objective,
            opt.objective
        );
        assert!(validate(&alt.model, &partition, DEFAULT_FEASIBILITY_TOL).unwrap().passed);
    }
}

#[test]
fn fit_opt_with_regularization_matches_augmented_bruteforce() {
    for seed in 0..8 {
        let (data, partition, _) = gen_random(10, 5, 2, 100 + seed, 0.2).unwrap();
        let eta = 0.7;
        let config = FitConfig { eta, ..FitConfig::default() };
        let report = fit_opt(&data, &partition, &config).unwrap();
        let (xa, ya) =
            augment_regularization(data.x().view(), data.y().view(), &partition, eta).unwrap();
        let oracle = partitioned_ls_enumeration(&xa, &ya, &groups_of(&partition));
        assert!(
            (report.objective - oracle).abs() <= 1e-8 * (1.0 + oracle),
            "seed {seed}: {} vs oracle {oracle}",
            report.objective
        );
        // The reported objective matches the model recomputation.
        let recomputed = objective(&report.model, &partition, &data, eta).unwrap();
        assert!((report.objective - recomputed).abs() <= 1e-9 * (1.0 + recomputed));
    }
}

#[test]
fn fit_opt_sign_flip_symmetry() {
    let (data, partition, _) = gen_random(14, 6, 3, 7, 0.4).unwrap();
    let flipped = Dataset::new(data.x().clone(), data.y().mapv(|v| -v)).unwrap();
    let a = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
    let b = fit_opt(&flipped, &partition, &FitConfig::default()).unwrap();
    assert!((a.objective - b.objective).abs() <= 1e-9 * (1.0 + a.objective));
    for k in 0..partition.num_groups() {
        assert!((a.model.beta_hat[k] + b.model.beta_hat[k]).abs() <= 1e-9);
    }
    for m in 0..partition.num_features() {
        assert!((a.model.alpha_hat[m] - b.model.alpha_hat[m]).abs() <= 1e-9);
    }
}

#[test]
fn fit_opt_invariant_to_within_group_permutation() {
    let (data, partition, _) = gen_random(12, 6, 2, 21, 0.3).unwrap();
    let report = fit_opt(&data, &partition, &FitConfig::default()).unwrap();

    // Swap two features of the first group (columns and partition stay
    // consistent because membership is unchanged).
    let members = partition.group(0).to_vec();
    let (i, j) = (members[0], members[1]);
    let mut x = data.x().clone();
    let (ci, cj) = (x.column(i).to_owned(), x.column(j).to_owned());
    x.column_mut(i).assign(&cj);
    x.column_mut(j).assign(&ci);
    let permuted = Dataset::new(x, data.y().clone()).unwrap();
    let permuted_report = fit_opt(&permuted, &partition, &FitConfig::default()).unwrap();
    assert!(
        (report.objective - permuted_report.objective).abs()
            <= 1e-9 * (1.0 + report.objective.abs())
    );
}

#[test]
fn bnb_matches_opt_on_subset_sum() {
    for values in [vec![1, 2, 3], vec![3, 1, 1, 2, 2, 1], vec![2], vec![5, 5]] {
        let inst = SubsetSumInstance::new(values, 1.0).unwrap();
        let (data, partition) = gen_subset_sum(&inst);
        let opt = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let bnb = fit_bnb(&data, &partition, &FitConfig::default()).unwrap();
        assert!(
            (opt.objective - bnb.objective).abs() <= 1e-8 * (1.0 + opt.objective),
            "{} vs {}",
            opt.objective,
            bnb.objective
        );
        assert!(bnb.diagnostics.proven_optimal);
    }
}

#[test]
fn bnb_matches_opt_on_random_instances_with_node_bound() {
    for seed in 0..25 {
        let features = 4 + (seed as usize) % 7; // up to 10
        let groups = 1 + (seed as usize) % 4;
        let rows = 8 + (seed as usize) % 23;
        let (data, partition, _) =
            gen_random(rows, features, groups, 1000 + seed, 0.25).unwrap();
        let opt = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let bnb = fit_bnb(&data, &partition, &FitConfig::default()).unwrap();
        assert!(
            (opt.objective - bnb.objective).abs() <= 1e-8 * (1.0 + opt.objective),
            "seed {seed}: {} vs {}",
            opt.objective,
            bnb.objective
        );
        let k = partition.num_groups();
        assert!(bnb.diagnostics.nodes_visited < (1 << (k + 1)));
        let feas = validate(&bnb.model, &partition, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert!(feas.passed);
    }
}

#[test]
fn lower_bound_never_exceeds_optimum() {
    for seed in 0..10 {
        let (data, partition, _) = gen_random(12, 6, 3, 50 + seed, 0.3).unwrap();
        let opt = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let constraints = vec![GroupSign::Unconstrained; partition.num_groups()];
        let (lb, _) =
            lower_bound(data.x().view(), data.y().view(), &partition, &constraints, 1e-10)
                .unwrap();
        assert!(lb <= opt.objective + 1e-9 * (1.0 + opt.objective));

        // Bound validity at partially constrained nodes: the bound must not
        // exceed the best objective among sign vectors consistent with the
        // node.
        let mut constrained = constraints.clone();
        constrained[0] = GroupSign::NonNeg;
        let (lb_pos, _) =
            lower_bound(data.x().view(), data.y().view(), &partition, &constrained, 1e-10)
                .unwrap();
        let oracle = best_consistent_objective(&data, &partition, 0, true);
        assert!(lb_pos <= oracle + 1e-9 * (1.0 + oracle));
    }
}

/// Brute-force best objective over sign vectors where group `fixed_group`
/// has the given sign.
fn best_consistent_objective(
    data: &Dataset,
    partition: &Partition,
    fixed_group: usize,
    nonneg: bool,
) -> f64 {
    let groups = groups_of(partition);
    let k = groups.len();
    let mut best = f64::INFINITY;
    for mask in 0usize..(1 << k) {
        let fixed_bit = mask >> fixed_group & 1 == 1;
        if fixed_bit != nonneg {
            continue;
        }
        let mut signed = data.x().clone();
        for (g, members) in groups.iter().enumerate() {
            if mask >> g & 1 == 0 {
                for &m in members {
                    for i in 0..signed.nrows() {
                        signed[(i, m)] = -signed[(i, m)];
                    }
                }
            }
        }
        let (obj, _) = common::nnls_enumeration(&signed, data.y());
        best = best.min(obj);
    }
    best
}

#[test]
fn alt_never_beats_opt_and_reaches_it_on_easy_instances() {
    let mut failures = Vec::new();
    for seed in 0..20 {
        let features = 4 + (seed as usize) % 7;
        let groups = 1 + (seed as usize) % 3;
        let rows = 10 + (seed as usize) % 21;
        let (data, partition, _) = gen_random(rows, features, groups, 2000 + seed, 0.0).unwrap();
        let opt = fit_opt(&data, &partition, &FitConfig::default()).unwrap();
        let config = FitConfig { restarts: 100, iterations: 20, seed, ..FitConfig::default() };
        let (alt, trace) = fit_alt(&data, &partition, &config).unwrap();
        assert!(
            alt.objective >= opt.objective - 1e-9,
            "seed {seed}: alt {} below opt {}",
            alt.objective,
            opt.objective
        );
        // Noiseless instances are realizable, so some restart should reach
        // (near) zero.
        let best_restart =
            trace.restarts.iter().map(|r| r.final_objective).fold(f64::INFINITY, f64::min);
        if best_restart > 1e-6 {
            failures.push((seed, best_restart));
        }
    }
    assert!(failures.is_empty(), "restarts missed the optimum on {failures:?}");
}

#[test]
fn alt_trace_objectives_non_increasing() {
    let (data, partition, _) = gen_random(15, 8, 3, 77, 0.5).unwrap();
    let config = FitConfig { restarts: 10, iterations: 25, ..FitConfig::default() };
    let (_, trace) = fit_alt(&data, &partition, &config).unwrap();
    assert_eq!(trace.restarts.len(), 10);
    for restart in &trace.restarts {
        for pair in restart.objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9 * (1.0 + pair[0].abs()));
        }
    }
    assert_eq!(trace.cumulative_seconds.len(), 10);
    assert!(trace.cumulative_seconds.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn alt_exact_on_identity_instance() {
    let data = Dataset::new(arr2(&[[1.0, 0.0], [0.0, 1.0]]), arr1(&[1.0, 2.0])).unwrap();
    let partition = Partition::single_group(2);
    let config = FitConfig { iterations: 2, restarts: 1, ..FitConfig::default() };
    let (report, _) = fit_alt(&data, &partition, &config).unwrap();
    assert!(report.objective <= 1e-12);
}

#[test]
fn renormalization_preserves_predictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (data, partition, _) = gen_random(10, 7, 3, 9, 0.0).unwrap();
    for _ in 0..200 {
        let alpha = Array1::from_iter((0..7).map(|_| rng.gen_range(0.0..3.0)));
        let signs: Vec<i8> =
            (0..3).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let raw = RawSolution::new(alpha, signs).unwrap();
        let model = renormalize(&raw, &partition).unwrap();

        let direct = predict_raw(&raw, &partition, data.x().view());
        let via_model = predict(&model, &partition, data.x().view()).unwrap();
        let scale = 1.0 + direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in direct.iter().zip(via_model.iter()) {
            assert!((a - b).abs() <= 1e-9 * scale);
        }
        assert!(validate(&model, &partition, DEFAULT_FEASIBILITY_TOL).unwrap().passed);
    }
}

#[test]
fn prediction_scale_invariance() {
    let (data, partition, planted) = gen_random(8, 6, 2, 33, 0.0).unwrap();
    let baseline = predict(&planted, &partition, data.x().view()).unwrap();
    let c = 3.7;
    let mut alpha = planted.alpha_hat.clone();
    let mut beta = planted.beta_hat.clone();
    for &m in partition.group(0) {
        alpha[m] *= c;
    }
    beta[0] /= c;
    let scaled = Model { alpha_hat: alpha, beta_hat: beta };
    let scaled_pred = predict(&scaled, &partition, data.x().view()).unwrap();
    let scale = 1.0 + baseline.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in baseline.iter().zip(scaled_pred.iter()) {
        assert!((a - b).abs() <= 1e-9 * scale);
    }
}

#[test]
fn augmentation_residual_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (data, partition, _) = gen_random(9, 6, 3, 11, 0.0).unwrap();
    for _ in 0..50 {
        let rho = rng.gen_range(0.0..5.0);
        let alpha = Array1::from_iter((0..6).map(|_| rng.gen_range(0.0..2.0)));
        let signs: Vec<i8> =
            (0..3).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();

        let signed =
            partls::solver::signed_design(data.x().view(), &partition, &signs).unwrap();
        let plain = sse(&signed, &alpha, data.y());

        let (xa, ya) =
            augment_regularization(signed.view(), data.y().view(), &partition, rho).unwrap();
        let augmented = sse(&xa, &alpha, &ya);

        let group_norm: f64 = partition
            .groups()
            .map(|members| {
                let s: f64 = members.iter().map(|&m| alpha[m]).sum();
                s * s
            })
            .sum();
        let scale = 1.0 + plain.abs().max(augmented.abs());
        assert!(
            (augmented - plain - rho * group_norm).abs() <= 1e-9 * scale,
            "identity violated: {augmented} vs {plain} + {rho} * {group_norm}"
        );
    }
}

#[test]
fn intercept_only_instance_fits_mean() {
    // All-zero features: after the homogeneous extension the optimal fit
    // puts the target mean on the intercept group.
    let x = arr2(&[[0.0, 0.0], [0.0, 0.0]]);
    let y = arr1(&[4.0, 4.0]);
    let data = Dataset::new(x, y).unwrap();
    let partition = Partition::single_group(2);
    let (hdata, hpartition) = data.to_homogeneous(&partition).unwrap();
    let report = fit_opt(&hdata, &hpartition, &FitConfig::default()).unwrap();
    assert!(report.objective <= 1e-12);
    let intercept_group = hpartition.num_groups() - 1;
    assert!((report.model.beta_hat[intercept_group] - 4.0).abs() <= 1e-9);
}

#[test]
fn solvers_deterministic_across_repeats() {
    let (data, partition, _) = gen_random(12, 6, 3, 5, 0.2).unwrap();
    let config = FitConfig { restarts: 5, iterations: 10, seed: 3, ..FitConfig::default() };

    let (a1, t1) = fit_alt(&data, &partition, &config).unwrap();
    let (a2, t2) = fit_alt(&data, &partition, &config).unwrap();
    assert_eq!(a1.objective.to_bits(), a2.objective.to_bits());
    assert_eq!(a1.model, a2.model);
    for (r1, r2) in t1.restarts.iter().zip(t2.restarts.iter()) {
        assert_eq!(r1.objectives, r2.objectives);
    }

    let o1 = fit_opt(&data, &partition, &config).unwrap();
    let o2 = fit_opt(&data, &partition, &config).unwrap();
    assert_eq!(o1.objective.to_bits(), o2.objective.to_bits());
    assert_eq!(o1.model, o2.model);

    let b1 = fit_bnb(&data, &partition, &config).unwrap();
    let b2 = fit_bnb(&data, &partition, &config).unwrap();
    assert_eq!(b1.objective.to_bits(), b2.objective.to_bits());
    assert_eq!(b1.model, b2.model);
}

#[test]
fn opt_parallel_matches_sequential() {
    let (data, partition, _) = gen_random(16, 8, 4, 13, 0.3).unwrap();
    let seq = FitConfig::default();
    let par = FitConfig { threads: 4, ..FitConfig::default() };
    let a = fit_opt(&data, &partition, &seq).unwrap();
    let b = fit_opt(&data, &partition, &par).unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    assert_eq!(a.model, b.model);
}
