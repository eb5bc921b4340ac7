//! Exploratory margin probe for the mode comparison; run by hand:
//! cargo test -p adapta-core --test calibration -- --ignored --nocapture

use adapta_core::dtmc::Schedule;
use adapta_core::harness::{run, RunConfig, RunMode, Scenario};
use adapta_core::ingest::build_profile_models;
use adapta_core::model::{BmiClass, ProfileId, RiskRangeTable};
use adapta_core::stats::{compare_groups, ptcr, summarize};
use adapta_core::synth::generate_synthetic_dataset;

#[test]
#[ignore]
fn calibrate_directional_margins() {
    let table = RiskRangeTable::default_table();
    let data = generate_synthetic_dataset(7, 26, 720).unwrap();
    let (models, empty) = build_profile_models(&data, &table).unwrap();
    assert!(empty.is_empty());

    for scenario in Scenario::ALL {
        let profiles: Vec<ProfileId> = match scenario {
            Scenario::S2 => BmiClass::ALL.iter().map(|b| ProfileId::Bmi(*b)).collect(),
            _ => ProfileId::ALL.to_vec(),
        };
        let schedule = Schedule::uniform(&profiles, 3600).unwrap();
        let mut rates = [Vec::new(), Vec::new()];
        for (mi, mode) in [RunMode::Baseline, RunMode::Adaptive].into_iter().enumerate() {
            for rep in 0..5u64 {
                let mut config = RunConfig::new(scenario, mode, schedule.clone());
                config.patient_seed = 1 + rep;
                config.sut_seed = 1 + rep;
                config.faults.misclassify_prob = 0.05;
                let log = run(&config, &models).unwrap();
                let (p, t) = log.verdict_counts();
                rates[mi].push(ptcr(p, t).unwrap());
            }
        }
        let c = compare_groups(&rates[0], &rates[1]);
        println!("{scenario}: baseline {:?}", rates[0]);
        println!("{scenario}: adaptive {:?}", rates[1]);
        println!(
            "  mean b {:.2} / a {:.2}   U {:.1} A12 {:.3} p_n {:.6e} p_e {:?}",
            summarize(&rates[0]).unwrap().mean,
            summarize(&rates[1]).unwrap().mean,
            c.u,
            c.a12,
            c.p_normal,
            c.p_exact
        );
    }
}
