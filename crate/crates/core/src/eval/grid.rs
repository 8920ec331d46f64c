use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetSplit;
use crate::error::{Result, TadError};
use crate::eval::evaluate::{metrics_from_predictions, score_set, MetricsReport};
use crate::eval::mode::NetType;
use crate::nets::spec::{GRID_LAYERS, GRID_NEURONS};
use crate::nets::{count_params, mean_grid_params, NetworkSpec, ParamSet};
use crate::rng::substream_seed;
use crate::training::train::{spread_indices, train, EpochLog, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub layers: Vec<usize>,
    pub neurons: Vec<usize>,
    /// Smoothing constant of FNN (smo).
    pub smoothing: f64,
    /// Parallel trainings; 0 uses all cores.
    pub jobs: usize,
    /// Scores at most this many evenly spaced test sequences.
    pub max_test_samples: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            layers: GRID_LAYERS.to_vec(),
            neurons: GRID_NEURONS.to_vec(),
            smoothing: 0.7,
            jobs: 1,
            max_test_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub net: NetType,
    pub layers: usize,
    pub neurons: usize,
    pub params_count: usize,
    pub val_mcc: f64,
    pub log: EpochLog,
    pub params: ParamSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedModel {
    pub net: NetType,
    /// Index into [`GridResult::entries`].
    pub entry: usize,
    pub test: MetricsReport,
    /// Mean parameter count over the full 36-configuration grid.
    pub mean_grid_params: usize,
    pub epoch_ms: f64,
    pub test_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Sorted by (type, L, N).
    pub entries: Vec<GridEntry>,
    /// One per requested type, in report order.
    pub selected: Vec<SelectedModel>,
}

impl GridResult {
    pub fn selected_for(&self, net: NetType) -> Option<&SelectedModel> {
        self.selected.iter().find(|s| s.net == net)
    }
}

pub fn net_spec(net: NetType, layers: usize, neurons: usize, m: usize) -> Result<NetworkSpec> {
    NetworkSpec::new(net.kind(), layers, neurons, net.input_mode(0.0).input_dim(m))
}

/// Best entry by validation MCC, ties broken by fewer parameters, then fewer
/// layers.
pub fn select_best<'a>(entries: impl IntoIterator<Item = (usize, &'a GridEntry)>) -> Option<usize> {
    entries
        .into_iter()
        .min_by(|(_, a), (_, b)| {
            b.val_mcc
                .total_cmp(&a.val_mcc)
                .then(a.params_count.cmp(&b.params_count))
                .then(a.layers.cmp(&b.layers))
        })
        .map(|(i, _)| i)
}

/// Trains every (type, L, N) configuration, selects per type on validation
/// MCC and evaluates the selected models on the test split.
pub fn grid_search(types: &[NetType], data: &DatasetSplit, cfg: &TrainConfig, grid: &GridConfig) -> Result<GridResult> {
    if grid.layers.is_empty() || grid.neurons.is_empty() || types.is_empty() {
        return Err(TadError::invalid("grid must contain at least one type, layer count and width"));
    }
    let m = data.train.m();
    let mut jobs = Vec::new();
    for &net in types {
        for &l in &grid.layers {
            for &n in &grid.neurons {
                jobs.push((net, l, n, net_spec(net, l, n, m)?));
            }
        }
    }
    let run = |&(net, l, n, spec): &(NetType, usize, usize, NetworkSpec)| -> Result<GridEntry> {
        let run_cfg = TrainConfig { seed: substream_seed(cfg.seed, &format!("{}-L{l}-N{n}", net.slug())), ..cfg.clone() };
        let out = train(&spec, net.input_mode(grid.smoothing), &data.train, &data.validation, &run_cfg)?;
        Ok(GridEntry {
            net,
            layers: l,
            neurons: n,
            params_count: count_params(&spec),
            val_mcc: out.best_val_mcc,
            log: out.log,
            params: out.params,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.jobs)
        .build()
        .map_err(|e| TadError::invalid(format!("cannot start worker pool: {e}")))?;
    let mut entries = pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    entries.sort_by_key(|e| (e.net, e.layers, e.neurons));

    let test_idx = spread_indices(data.test.len(), grid.max_test_samples);
    let test_labels: Vec<bool> = test_idx.iter().map(|&i| data.test.label(i)).collect();
    let mut selected = Vec::new();
    for &net in types {
        let idx = select_best(entries.iter().enumerate().filter(|(_, e)| e.net == net)).expect("type has entries");
        let e = &entries[idx];
        let spec = net_spec(net, e.layers, e.neurons, m)?;
        let start = Instant::now();
        let preds = score_set(&spec, &e.params, &data.test, net.input_mode(grid.smoothing), &test_idx)?;
        let test_ms = start.elapsed().as_secs_f64() * 1e3;
        let (acc, auc, mcc) = metrics_from_predictions(&test_labels, &preds);
        selected.push(SelectedModel {
            net,
            entry: idx,
            test: MetricsReport { acc, auc, mcc, params: e.params_count, neurons: e.neurons, layers: e.layers, rrt: None, rtt: None },
            mean_grid_params: mean_grid_params(net.kind(), spec.input_dim),
            epoch_ms: e.log.mean_epoch_ms(),
            test_ms,
        });
    }
    if let Some(base) = selected.iter().find(|s| s.net == NetType::FnnSmo).cloned() {
        for s in &mut selected {
            s.test.rrt = Some(s.epoch_ms / base.epoch_ms);
            s.test.rtt = Some(s.test_ms / base.test_ms);
        }
    }
    Ok(GridResult { entries, selected })
}
