mod common;

use hdlrt::montecarlo::Scenario;
use hdlrt::oracle::martingale_trace;
use hdlrt::output::{rates_csv, z_csv};
use hdlrt::sampling::sample_entry_matrix;
use hdlrt::{
    power_curve, run, run_histogram, run_level, with_threads, BlockPartition, DistributionSpec,
    SimulationPlan,
};

fn s1_plan() -> SimulationPlan {
    SimulationPlan::block(100, Scenario::ThreeEqual.partition(60).unwrap())
}

#[test]
fn single_replication_has_zero_se() {
    let r = run_level(&s1_plan().with_reps(1)).unwrap();
    assert!(r.rejection_rate == 0.0 || r.rejection_rate == 1.0);
    assert_eq!(r.standard_error, 0.0);
}

#[test]
fn zero_delta_is_the_level_run() {
    let plan = s1_plan().with_reps(200).with_seed(3);
    assert_eq!(run(&plan, 0.0).unwrap(), run_level(&plan).unwrap());
    let curve = power_curve(&plan, &[0.0, 0.05]).unwrap();
    assert_eq!(curve[0], run_level(&plan).unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let plans = [
        s1_plan()
            .with_reps(300)
            .with_seed(11)
            .with_dist(DistributionSpec::T15),
        SimulationPlan::correlation(50, 20)
            .with_reps(300)
            .with_seed(12),
        SimulationPlan::eqcov(vec![40, 40, 40], 15)
            .with_reps(300)
            .with_seed(13)
            .with_dist(DistributionSpec::EXP1),
    ];
    for plan in &plans {
        let outputs: Vec<(String, String)> = [1, 2, 4]
            .iter()
            .map(|&t| {
                with_threads(t, || {
                    let curve = power_curve(plan, &[0.0, 0.03]).unwrap();
                    (rates_csv(&curve, plan.seed), z_csv(&curve[1]))
                })
                .unwrap()
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn split_replications_agree_with_single_run() {
    let plan = s1_plan();
    let whole = run_level(&plan.clone().with_reps(2000).with_seed(100)).unwrap();
    let a = run_level(&plan.clone().with_reps(1000).with_seed(200)).unwrap();
    let b = run_level(&plan.with_reps(1000).with_seed(201)).unwrap();
    let pooled = (a.rejections + b.rejections) as f64 / 2000.0;
    let p = (pooled + whole.rejection_rate) / 2.0;
    let se = (p * (1.0 - p) * (1.0 / 2000.0 + 1.0 / 2000.0)).sqrt();
    assert!((pooled - whole.rejection_rate).abs() <= 3.0 * se);
}

#[test]
fn scenario_partitions_are_valid() {
    for p in (2..=300).step_by(2) {
        if p >= 4 {
            let s2 = Scenario::SinglesPlusOne.partition(p).unwrap();
            assert_eq!(s2.p(), p);
            assert_eq!(s2.q(), p / 2);
            assert_eq!(*s2.sizes().last().unwrap(), p / 2 + 1);
        }
        if p % 3 == 0 {
            let s1 = Scenario::ThreeEqual.partition(p).unwrap();
            assert_eq!((s1.p(), s1.q()), (p, 3));
        }
    }
}

#[test]
fn histogram_holds_every_replication() {
    let plan = SimulationPlan::block(60, BlockPartition::uniform(10, 2).unwrap())
        .with_reps(500)
        .with_dist(DistributionSpec::EXP1);
    let (res, h) = run_histogram(&plan, 40).unwrap();
    assert_eq!(h.total(), 500);
    assert_eq!(h.counts.len(), 40);
    assert!(res.z.iter().all(|z| z.is_finite()));
}

#[test]
fn more_correlation_in_one_big_block_is_detected_sooner() {
    // mid-range delta: singles-plus-one at least as powerful as three equal blocks
    for delta in [0.04, 0.06] {
        let s1 = run(&s1_plan().with_reps(1000).with_seed(5), delta).unwrap();
        let plan2 = SimulationPlan::block(100, Scenario::SinglesPlusOne.partition(60).unwrap())
            .with_reps(1000)
            .with_seed(5);
        let s2 = run(&plan2, delta).unwrap();
        let p = (s1.rejection_rate + s2.rejection_rate) / 2.0;
        let se = (2.0 * p * (1.0 - p) / 1000.0).sqrt();
        assert!(
            s2.rejection_rate >= s1.rejection_rate - 3.0 * se,
            "delta={delta}"
        );
    }
}

#[test]
fn martingale_differences_are_centered() {
    let (n, reps) = (40, 2000);
    let part = BlockPartition::new(vec![3, 4, 5]).unwrap();
    let mut sums = vec![0.0; part.p() - 3];
    let mut squares = vec![0.0; part.p() - 3];
    for r in 0..reps {
        let data =
            sample_entry_matrix(n, part.p(), DistributionSpec::StandardNormal, 77, r).unwrap();
        let t = martingale_trace(&data, &part).unwrap();
        for (i, x) in t.x_terms.iter().enumerate() {
            sums[i] += x;
            squares[i] += x * x;
        }
    }
    for (s, sq) in sums.iter().zip(&squares) {
        let mean = s / reps as f64;
        let sd = (sq / reps as f64 - mean * mean).sqrt();
        assert!(mean.abs() <= 4.0 * sd / (reps as f64).sqrt(), "mean {mean}");
    }
}
