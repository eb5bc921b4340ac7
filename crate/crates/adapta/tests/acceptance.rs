//! Acceptance gate: nine checks covering the oracles, the statistics,
//! the simulation machinery and the command-line workflow, each with
//! its stated tolerance and runtime budget. One pass/fail line per
//! criterion.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use adapta_core::oracle::SensorRisk;
use adapta_core::rng::{domain, next_f64, seeded};
use adapta_core::{
    a12, build_profile_models, derive_counts, expected_default, expected_weighted,
    generate_synthetic_dataset, mann_whitney_u, normalize, p_exact, p_normal, ptcr, run,
    summarize, Band, ChangeEventKind, Dtmc, OutcomeLevel, ProfileId, ReadingValue, RiskLevel,
    RiskRangeTable, RiskVector, RunConfig, RunMode, Scenario, Schedule, SensorKind, WeightVector,
};

// Golden five-repetition pass rates per scenario.
const S1_BASELINE: [f64; 5] = [89.46, 84.17, 90.46, 89.75, 89.53];
const S1_ADAPTIVE: [f64; 5] = [73.30, 68.12, 69.35, 59.12, 77.30];
const S2_BASELINE: [f64; 5] = [92.22, 90.72, 89.68, 84.33, 90.92];
const S2_ADAPTIVE: [f64; 5] = [72.16, 82.57, 73.36, 66.13, 68.23];
const S3_BASELINE: [f64; 5] = [86.29, 89.77, 88.83, 86.85, 88.50];
const S3_ADAPTIVE: [f64; 5] = [56.76, 65.65, 61.98, 63.78, 59.04];

fn field_models() -> Vec<adapta_core::ProfileModel> {
    let data = generate_synthetic_dataset(11, 13, 60).unwrap();
    build_profile_models(&data, &RiskRangeTable::default_table()).unwrap().0
}

/// Count-based decision table, written independently of the oracle
/// module: two Highs dominate, then one High, then Mediums.
fn brute_force_default(levels: [RiskLevel; 6]) -> OutcomeLevel {
    let high = levels.iter().filter(|l| **l == RiskLevel::High).count();
    let medium = levels.iter().filter(|l| **l == RiskLevel::Medium).count();
    if high >= 2 {
        OutcomeLevel::VeryCritical
    } else if high == 1 {
        OutcomeLevel::Critical
    } else if medium >= 2 {
        OutcomeLevel::Moderate
    } else if medium == 1 {
        OutcomeLevel::Low
    } else {
        OutcomeLevel::VeryLow
    }
}

#[test]
fn criterion_1_default_oracle_conformance() {
    let started = Instant::now();

    // Exhaustive: all 729 all-active level assignments.
    let ladder = [RiskLevel::Low, RiskLevel::Medium, RiskLevel::High];
    for code in 0..729usize {
        let mut digits = code;
        let levels: [RiskLevel; 6] = std::array::from_fn(|_| {
            let level = ladder[digits % 3];
            digits /= 3;
            level
        });
        let got = expected_default(&RiskVector::all_active(levels)).unwrap();
        assert_eq!(got, brute_force_default(levels), "vector {code}: {levels:?}");
    }

    // Five spot checks straight from the decision table.
    use RiskLevel::{High, Low, Medium};
    let active = |levels: [RiskLevel; 6]| RiskVector::all_active(levels);
    assert_eq!(expected_default(&active([Low; 6])).unwrap(), OutcomeLevel::VeryLow);
    assert_eq!(
        expected_default(&active([Medium, Low, Low, Low, Low, Low])).unwrap(),
        OutcomeLevel::Low
    );
    assert_eq!(
        expected_default(&active([High, High, Low, Low, Low, Low])).unwrap(),
        OutcomeLevel::VeryCritical
    );
    let mut one_off = active([Low; 6]);
    one_off.0[5] = SensorRisk::Deactivated;
    assert_eq!(expected_default(&one_off).unwrap(), OutcomeLevel::VeryLow);
    assert_eq!(
        expected_default(&active([High, Medium, Medium, Low, Low, Low])).unwrap(),
        OutcomeLevel::Critical
    );

    assert!(started.elapsed() < Duration::from_secs(1), "took {:?}", started.elapsed());
}

#[test]
fn criterion_2_weighted_oracle_goldens() {
    use RiskLevel::{High, Low};

    let six_low = RiskVector::all_active([Low; 6]);
    let ecg_high = RiskVector::all_active([Low, High, Low, Low, Low, Low]);
    let ecg_weight = |w: f64| WeightVector([1.0, w, 1.0, 1.0, 1.0, 1.0]);

    // (vector, weights, hand-computed overall score, expected level)
    let cases = [
        (&six_low, WeightVector::UNIT, 30.0 / 6.0, OutcomeLevel::VeryLow),
        (&ecg_high, WeightVector::UNIT, 125.0 / 6.0, OutcomeLevel::Critical),
        (&ecg_high, ecg_weight(1.75), 200.0 / 6.0, OutcomeLevel::Critical),
        (&ecg_high, ecg_weight(2.0), 225.0 / 6.0, OutcomeLevel::VeryCritical),
    ];
    for (rv, weights, golden_score, want) in cases {
        // Recompute the score independently and hold it to 1e-9.
        let mut sum = 0.0;
        for (i, risk) in rv.0.iter().enumerate() {
            let SensorRisk::Active(level) = risk else { panic!("all active") };
            sum += weights.0[i]
                * match level {
                    RiskLevel::Low => 5.0,
                    RiskLevel::Medium => 20.0,
                    RiskLevel::High => 100.0,
                };
        }
        let score = sum / 6.0;
        assert!((score - golden_score).abs() < 1e-9, "score {score} vs {golden_score}");
        // Exact threshold arithmetic: <8, <11, <=20, <=36, above.
        let by_threshold = if score < 8.0 {
            OutcomeLevel::VeryLow
        } else if score < 11.0 {
            OutcomeLevel::Low
        } else if score <= 20.0 {
            OutcomeLevel::Moderate
        } else if score <= 36.0 {
            OutcomeLevel::Critical
        } else {
            OutcomeLevel::VeryCritical
        };
        assert_eq!(by_threshold, want);
        assert_eq!(expected_weighted(rv, &weights).unwrap(), want);
    }

    // The profile table raises both pressure channels along with the
    // ECG; on these vectors that lands in the same bands.
    use adapta_core::{weights_for, BmiClass};
    let overweight = weights_for(ProfileId::Bmi(BmiClass::Overweight));
    assert_eq!(expected_weighted(&ecg_high, &overweight).unwrap(), OutcomeLevel::Critical);
    let obesity3 = weights_for(ProfileId::Bmi(BmiClass::Obesity3));
    assert_eq!(expected_weighted(&ecg_high, &obesity3).unwrap(), OutcomeLevel::VeryCritical);
}

#[test]
fn criterion_3_reference_statistics_reproduce() {
    let pairs = [
        (S1_BASELINE, S1_ADAPTIVE),
        (S2_BASELINE, S2_ADAPTIVE),
        (S3_BASELINE, S3_ADAPTIVE),
    ];
    for (baseline, adaptive) in pairs {
        assert_eq!(mann_whitney_u(&baseline, &adaptive), 25.0);
        assert_eq!(a12(&baseline, &adaptive), 1.0);
        let p = p_normal(&baseline, &adaptive);
        assert!((p - 1.219e-2).abs() <= 1e-4, "p_normal {p}");
        let p = p_exact(&baseline, &adaptive).unwrap();
        assert!((p - 2.0 / 252.0).abs() <= 1e-12, "p_exact {p}");
    }
    let std = summarize(&S1_BASELINE).unwrap().std;
    assert!((std - 2.28).abs() <= 0.01, "S1 baseline std {std}");
}

#[test]
fn criterion_4_sut_agrees_with_oracle_when_fault_free() {
    let started = Instant::now();
    let models = field_models();
    let profiles = &ProfileId::ALL[..3];
    let schedule = Schedule::uniform(profiles, 3334).unwrap();

    let mut config = RunConfig::new(Scenario::S1, RunMode::Baseline, schedule);
    config.battery_rate = 0.0; // every sensor stays active
    config.faults.stale_hold = false;
    config.faults.misclassify_prob = 0.0;
    config.test_window = 1;
    config.pause = 0; // test every tick
    let log = run(&config, &models).unwrap();

    let (passes, total) = log.verdict_counts();
    assert_eq!(total, 3 * 3334);
    assert_eq!(passes, total);
    for entry in &log.entries {
        assert_eq!(entry.expected, Some(entry.bsn), "tick {}", entry.tick);
    }
    assert!(started.elapsed() < Duration::from_secs(5), "took {:?}", started.elapsed());
}

#[test]
fn criterion_5_adaptive_runs_beat_baselines_at_failure_finding() {
    let started = Instant::now();
    let data = generate_synthetic_dataset(7, 26, 720).unwrap();
    let (models, empty) =
        build_profile_models(&data, &RiskRangeTable::default_table()).unwrap();
    assert!(empty.is_empty());

    for scenario in Scenario::ALL {
        let profiles: &[ProfileId] = match scenario {
            Scenario::S2 => &ProfileId::BMI,
            _ => &ProfileId::ALL,
        };
        let schedule = Schedule::uniform(profiles, 3600).unwrap();
        let mut rates = [Vec::new(), Vec::new()];
        for (slot, mode) in [RunMode::Baseline, RunMode::Adaptive].into_iter().enumerate() {
            for rep in 1..=5u64 {
                let mut config = RunConfig::new(scenario, mode, schedule.clone());
                config.patient_seed = rep;
                config.sut_seed = rep;
                config.faults.misclassify_prob = 0.05;
                let log = run(&config, &models).unwrap();
                let (passes, total) = log.verdict_counts();
                rates[slot].push(ptcr(passes, total).unwrap());
            }
        }
        let baseline_mean = summarize(&rates[0]).unwrap().mean;
        let adaptive_mean = summarize(&rates[1]).unwrap().mean;
        assert!(
            adaptive_mean < baseline_mean,
            "{scenario}: adaptive {adaptive_mean:.2} !< baseline {baseline_mean:.2}"
        );
        let effect = a12(&rates[0], &rates[1]);
        assert!(effect >= 0.8, "{scenario}: A12 {effect}");
    }
    assert!(started.elapsed() < Duration::from_secs(300), "took {:?}", started.elapsed());
}

#[test]
fn criterion_6_chain_derivation_matches_the_hand_count() {
    let table = RiskRangeTable::default_table();
    let series = [36.5, 36.7, 39.0, 40.0, 37.0];
    let counts = derive_counts(&series, SensorKind::Term, &table).unwrap();

    // Five bands; the series walks Low, Low, Medium, Medium, Low where
    // Low sits at index 2 and the upper Medium band at index 3.
    let n = 5;
    assert_eq!(counts.bands.len(), n);
    let mut want = vec![0u64; n * n];
    want[2 * n + 2] = 1;
    want[2 * n + 3] = 1;
    want[3 * n + 3] = 1;
    want[3 * n + 2] = 1;
    assert_eq!(counts.counts, want);

    let chain = normalize(&counts);
    assert_eq!(chain.current, 2);
    let half_half = [0.0, 0.0, 0.5, 0.5, 0.0];
    assert_eq!(chain.row(2), half_half);
    assert_eq!(chain.row(3), half_half);
    for observed_nothing in [0, 1, 4] {
        assert_eq!(chain.row(observed_nothing), [0.2; 5]);
    }
}

#[test]
fn criterion_7_cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let adapta = env!("CARGO_BIN_EXE_adapta");
    let data = dir.path().join("data");
    let model = dir.path().join("model.txt");

    let check = |cmd: &mut Command| {
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    check(Command::new(adapta)
        .args(["gen-data", "--seed", "4", "--records", "13", "--samples", "30", "--out"])
        .arg(&data));
    check(Command::new(adapta).arg("derive").arg("--data").arg(&data).arg("--out").arg(&model));

    let run_into = |out_dir: &Path| {
        check(Command::new(adapta)
            .args([
                "run",
                "--scenario",
                "all",
                "--mode",
                "both",
                "--reps",
                "2",
                "--duration",
                "40",
                "--jobs",
                "2",
                "--model",
            ])
            .arg(&model)
            .arg("--out")
            .arg(out_dir));
    };
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    run_into(&first);
    run_into(&second);

    let listing = |dir: &Path| {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    let names = listing(&first);
    assert_eq!(names, listing(&second));
    assert_eq!(names.len(), 3 * 2 * 2 + 3, "12 run logs and 3 report files");
    for name in &names {
        let a = std::fs::read(first.join(name)).unwrap();
        let b = std::fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical invocations");
    }
}

#[test]
fn criterion_8_sampling_converges_to_the_matrix() {
    // Fair coin: two states, half-half rows.
    let bands = vec![
        Band { lo: 0.0, hi: 1.0, level: RiskLevel::Low },
        Band { lo: 1.0, hi: 2.0, level: RiskLevel::Medium },
    ];
    let mut coin = Dtmc::new(bands, vec![0.5; 4], 0).unwrap();
    let mut rng = seeded(8, domain::PATIENT);
    let steps = 100_000;
    let mut heads = 0u64;
    for _ in 0..steps {
        if coin.step(&mut rng) == 0 {
            heads += 1;
        }
    }
    let freq = heads as f64 / steps as f64;
    assert!((freq - 0.5).abs() <= 0.01, "head frequency {freq}");

    // Random dense five-state chain: per-row empirical L1 within 0.05.
    let table = RiskRangeTable::default_table();
    let mut rng = seeded(42, domain::SYNTH);
    let n = 5;
    let mut rows = vec![0.0; n * n];
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            let p = next_f64(&mut rng) + 1e-3;
            rows[i * n + j] = p;
            sum += p;
        }
        for j in 0..n {
            rows[i * n + j] /= sum;
        }
    }
    let mut chain = Dtmc::new(table.bands(SensorKind::Ecg).to_vec(), rows.clone(), 0).unwrap();
    let mut tally = vec![0u64; n * n];
    let mut state = chain.current;
    for _ in 0..steps {
        let next = chain.step(&mut rng);
        tally[state * n + next] += 1;
        state = next;
    }
    for i in 0..n {
        let visits: u64 = tally[i * n..(i + 1) * n].iter().sum();
        assert!(visits > 0, "row {i} never visited");
        let l1: f64 = (0..n)
            .map(|j| (tally[i * n + j] as f64 / visits as f64 - rows[i * n + j]).abs())
            .sum();
        assert!(l1 <= 0.05, "row {i} L1 {l1}");
    }
}

#[test]
fn criterion_9_s1_battery_events_drive_exclusion_windows() {
    let models = field_models();
    let schedule = Schedule::uniform(&ProfileId::ALL[..1], 500).unwrap();
    let mut config = RunConfig::new(Scenario::S1, RunMode::Adaptive, schedule);
    config.test_window = 1;
    config.pause = 0; // test every tick so the window check is airtight
    assert_eq!(config.battery_rate, 0.65);
    let log = run(&config, &models).unwrap();

    let mut deactivations = log.entries.iter().flat_map(|e| {
        e.events.iter().filter_map(move |k| match k {
            ChangeEventKind::SensorDeactivated(s) => Some((e.tick, *s)),
            _ => None,
        })
    });
    let (down_tick, sensor) = deactivations.next().expect("a sensor must drain");
    assert!(down_tick < 150, "first deactivation at {down_tick}");

    let up_tick = log
        .entries
        .iter()
        .flat_map(|e| e.events.iter().map(move |k| (e.tick, k)))
        .find_map(|(tick, k)| match k {
            ChangeEventKind::SensorActivated(s) if *s == sensor => Some(tick),
            _ => None,
        })
        .expect("the drained sensor must recharge");
    assert!(up_tick > down_tick);

    // Adaptation has no latency: the whole window, endpoints included
    // on the way down and excluded on the way up, is out of the oracle.
    for entry in &log.entries {
        if !entry.tested {
            continue;
        }
        let excluded = entry.logged[sensor.index()] == ReadingValue::Deactivated;
        let in_window = entry.tick >= down_tick && entry.tick < up_tick;
        if in_window {
            assert!(excluded, "tick {}: window reading not excluded", entry.tick);
        }
        if entry.tick < down_tick {
            assert!(!excluded, "tick {}: excluded before the event", entry.tick);
        }
    }
}
