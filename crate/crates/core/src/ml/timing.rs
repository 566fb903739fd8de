use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::TrainedModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub model: String,
    pub rows: usize,
    pub repetitions: usize,
    pub median_seconds: f64,
    /// 1 = fastest.
    pub rank: usize,
}

impl TimingRow {
    /// Fills in `rank` by ascending median time.
    pub fn rank_all(rows: &mut [TimingRow]) {
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| rows[a].median_seconds.total_cmp(&rows[b].median_seconds));
        for (r, i) in order.into_iter().enumerate() {
            rows[i].rank = r + 1;
        }
    }
}

/// Median wall-clock seconds to classify the whole batch.
pub fn benchmark_inference(model: &TrainedModel, batch: &[Vec<f64>], repetitions: usize) -> Result<f64> {
    if repetitions < 1 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    if batch.is_empty() {
        return Err(Error::EmptyInput("benchmark batch has no rows".into()));
    }
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        black_box(model.predict_batch(black_box(batch))?);
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    Ok(if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) })
}
