//! Calibration harness: times desk-scale training and reports the
//! screening metrics and simulator percentiles the defaults must hit.

use std::time::Instant;

use trinet::data::{stratified_split, Condition, SplitRatios};
use trinet::metrics::{confusion, rates, roc_auc, select_threshold_max_ppv};
use trinet::nn::ModelConfig;
use trinet::sim::{simulate, SimConfig, SimMode};
use trinet::synth::{generate, GeneratorConfig};
use trinet::text::EmbeddingTable;
use trinet::train::{predict_batch, train, TrainConfig};

fn run_condition(condition: Condition, n: usize, epochs: usize, null_signal: bool) {
    let mut gconfig = GeneratorConfig::new(condition, n, 42);
    if null_signal {
        gconfig = gconfig.null_signal();
    }
    let t0 = Instant::now();
    let ds = generate(&gconfig).unwrap();
    let (train_ds, val_ds, test_ds) =
        stratified_split(&ds, SplitRatios::default(), 42).unwrap();
    println!(
        "[{condition}{}] generated {} records in {:?}; splits {}/{}/{}",
        if null_signal { " null" } else { "" },
        ds.len(),
        t0.elapsed(),
        train_ds.len(),
        val_ds.len(),
        test_ds.len()
    );

    let mconfig = ModelConfig::default();
    let tconfig = TrainConfig {
        epochs,
        seed: 42,
        ..TrainConfig::default()
    };
    let table = EmbeddingTable::empty(mconfig.embed_dim);
    let t1 = Instant::now();
    let out = train(&train_ds, &val_ds, &mconfig, &tconfig, &table).unwrap();
    let train_time = t1.elapsed();
    println!(
        "[{condition}] {} epochs in {:?} ({:?}/epoch), final train loss {:.4} val loss {:.4}",
        epochs,
        train_time,
        train_time / epochs as u32,
        out.curve.epochs.last().unwrap().train_loss,
        out.curve.epochs.last().unwrap().val_loss,
    );

    let val_probs = predict_batch(&val_ds, &out.params, &out.encoder, &mconfig).unwrap();
    let test_probs = predict_batch(&test_ds, &out.params, &out.encoder, &mconfig).unwrap();
    let val_labels = val_ds.labels();
    let test_labels = test_ds.labels();

    let auc = roc_auc(&test_probs, &test_labels).unwrap().auc;
    match select_threshold_max_ppv(&val_probs, &val_labels, 10, 0.05) {
        Ok(sel) => {
            let cm = confusion(&test_probs, &test_labels, sel.threshold).unwrap();
            let r = rates(&cm);
            println!(
                "[{condition}] threshold {:.4} (val ppv {:.3} tpr {:.3}) -> test ppv {:?} tpr {:?} auc {:.4}",
                sel.threshold, sel.ppv, sel.tpr, r.ppv, r.tpr, auc
            );
        }
        Err(e) => println!("[{condition}] threshold selection failed: {e}; test auc {auc:.4}"),
    }
}

fn sim_probe() {
    for condition in [Condition::Pneumonia, Condition::Uti] {
        let config = SimConfig::default_for(condition);
        let (result, _) = simulate(&config, SimMode::Baseline).unwrap();
        println!(
            "[sim {condition}] episodes {} baseline mean {:.2}h p90 {:.2}h tests {} unnecessary {}",
            result.episodes,
            result.mean_los_hours,
            result.p90_los_hours,
            result.tests_ordered,
            result.unnecessary_tests
        );
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("all");
    let n: usize = args
        .get(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    let epochs: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(30);

    match mode {
        "sim" => sim_probe(),
        "null" => run_condition(Condition::Uti, n, epochs, true),
        "pneumonia" => run_condition(Condition::Pneumonia, n, epochs, false),
        "uti" => run_condition(Condition::Uti, n, epochs, false),
        _ => {
            run_condition(Condition::Pneumonia, n, epochs, false);
            run_condition(Condition::Uti, n, epochs, false);
            sim_probe();
        }
    }
}
