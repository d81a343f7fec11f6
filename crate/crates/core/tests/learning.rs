use loadseq::bandit::RewardNormalizer;
use loadseq::schedule::{solve_time_invariant, SystemConfig};
use loadseq::sim::{
    enumerate_sequences, run_experiment, run_seeds, windowed_makespan, Algorithm, ExperimentConfig,
    Learner, Mode,
};

fn reference() -> SystemConfig {
    let s = vec![1.0, 2.0, 9.0, 16.0];
    SystemConfig::new(s.clone(), s, 1.0, 4.0).unwrap()
}

#[test]
fn one_trial_gives_one_record_and_one_update() {
    let mut cfg = ExperimentConfig::new(reference());
    cfg.algorithm = Algorithm::TsExhaustive;
    cfg.trials = 1;
    let (recs, learner) = run_experiment(&cfg).unwrap();
    assert_eq!(recs.len(), 1);
    let Learner::Exhaustive { table } = learner else {
        panic!("wrong learner")
    };
    let extra: f64 = table
        .arms()
        .iter()
        .map(|a| a.params.alpha() + a.params.beta() - 2.0)
        .sum();
    assert_eq!(extra, 1.0);
}

#[test]
fn finishing_time_drops_over_training() {
    let mut cfg = ExperimentConfig::new(reference());
    cfg.algorithm = Algorithm::TsExhaustive;
    cfg.trials = 5000;
    let (recs, _) = run_experiment(&cfg).unwrap();
    assert!(windowed_makespan(&recs, 4901, 5000).unwrap() < windowed_makespan(&recs, 1, 100).unwrap());
}

#[test]
fn trained_recommendation_is_near_optimal() {
    // with the 80-unit single-processor bound every reward sits in
    // [0.04, 0.08] and 5000 trials cannot separate the top sequences; the
    // observed-max bound gives a usable signal
    let e = enumerate_sequences(&reference(), 8).unwrap();
    let runner_up = e.entries[1].makespan;
    for alg in [Algorithm::TsExhaustive, Algorithm::TsWeights] {
        let mut cfg = ExperimentConfig::new(reference());
        cfg.algorithm = alg;
        cfg.trials = 5000;
        cfg.normalizer = RewardNormalizer::AdaptiveMaxObserved;
        let runs = run_seeds(&cfg, &[0, 1, 2, 3, 4]).unwrap();
        let (mut top_two, mut exact) = (0, 0);
        for (_, learner) in &runs {
            let rec = learner.recommend();
            assert!(!rec.untrained);
            let t = solve_time_invariant(&reference(), &rec.sequence).unwrap().makespan;
            top_two += usize::from(t <= runner_up);
            exact += usize::from(rec.sequence == e.best().sequence);
        }
        // per-sequence arms always land in the top two; position/worker
        // means are a coarser summary and occasionally miss
        let need = if alg == Algorithm::TsExhaustive { 5 } else { 4 };
        assert!(top_two >= need, "{alg:?}: top-two recommendation in {top_two}/5 runs");
        assert!(exact >= 2, "{alg:?}: optimum recommended in {exact}/5 runs");
    }
}

#[test]
fn learners_beat_random_under_background_load() {
    let s: Vec<f64> = (1..=6).map(|i| 1.0 + i as f64).collect();
    let mut cfg = ExperimentConfig::new(SystemConfig::new(s.clone(), s, 1.0, 4.0).unwrap());
    cfg.mode = Mode::TimeVarying;
    cfg.trials = 1500;
    cfg.algorithm = Algorithm::RandomBaseline;
    let seeds = [0, 1, 2];
    let mean = |runs: &[(Vec<loadseq::sim::TrialRecord>, Learner)], from: usize| {
        runs.iter()
            .map(|(r, _)| windowed_makespan(r, from, r.len()).unwrap())
            .sum::<f64>()
            / runs.len() as f64
    };
    let random = mean(&run_seeds(&cfg, &seeds).unwrap(), 1);
    cfg.algorithm = Algorithm::TsWeights;
    let learned = mean(&run_seeds(&cfg, &seeds).unwrap(), 1201);
    assert!(learned < random, "learned {learned} vs random {random}");
}
