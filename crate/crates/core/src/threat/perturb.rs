use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::data::{LabeledSet, RSSI_FEATURE};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("noise sigma {sigma} must be finite and non-negative")))
    }
}

/// Adds `Normal(0, sigma)` to the RSSI column only.
pub fn evasion_perturb(data: &LabeledSet, sigma: f64, seed: u64) -> Result<LabeledSet> {
    check_sigma(sigma)?;
    let mut out = data.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let noise = Normal::new(0.0, sigma).expect("sigma checked");
    let mut rng = rng_from_seed(seed);
    for r in &mut out.rows {
        r[RSSI_FEATURE] += noise.sample(&mut rng);
    }
    Ok(out)
}

/// Adds independent `Normal(0, sigma)` to every feature of every row,
/// categorical codes included.
pub fn interference_perturb(data: &LabeledSet, sigma: f64, seed: u64) -> Result<LabeledSet> {
    check_sigma(sigma)?;
    let mut out = data.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let noise = Normal::new(0.0, sigma).expect("sigma checked");
    let mut rng = rng_from_seed(seed);
    for r in &mut out.rows {
        for v in r.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Shifts the RSSI column by `Uniform(-range, +range)`.
pub fn rssi_uniform_shift(data: &LabeledSet, range_db: f64, seed: u64) -> Result<LabeledSet> {
    check_sigma(range_db)?;
    let mut out = data.clone();
    if range_db == 0.0 {
        return Ok(out);
    }
    let shift = Uniform::new_inclusive(-range_db, range_db).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    for r in &mut out.rows {
        r[RSSI_FEATURE] += rng.sample(shift);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> LabeledSet {
        let rows = (0..n).map(|i| vec![1.0 + (i % 2) as f64, (i % 10) as f64, 2412.0, -60.0 - (i % 30) as f64, 5.0]).collect();
        let labels = (0..n).map(|i| (i % 2) as u8).collect();
        LabeledSet::new(rows, labels).unwrap()
    }

    fn mean_std(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, var.sqrt())
    }

    #[test]
    fn evasion_zero_is_identity() {
        let d = grid(50);
        assert_eq!(evasion_perturb(&d, 0.0, 1).unwrap(), d);
    }

    #[test]
    fn evasion_touches_only_rssi() {
        let d = grid(4825);
        let p = evasion_perturb(&d, 2.0, 9).unwrap();
        assert_eq!(p.labels, d.labels);
        let mut diffs = Vec::new();
        for (a, b) in d.rows.iter().zip(&p.rows) {
            for j in 0..5 {
                if j != RSSI_FEATURE {
                    assert_eq!(a[j].to_bits(), b[j].to_bits());
                }
            }
            diffs.push(b[RSSI_FEATURE] - a[RSSI_FEATURE]);
        }
        let (_, sd) = mean_std(&diffs);
        assert!((sd - 2.0).abs() < 0.1, "{sd}");
    }

    #[test]
    fn interference_statistics() {
        let d = grid(4825);
        let p = interference_perturb(&d, 2.0, 4).unwrap();
        assert_eq!(p.labels, d.labels);
        let diffs: Vec<f64> = d.rows.iter().zip(&p.rows).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x)).collect();
        assert_eq!(diffs.len(), 4825 * 5);
        let (m, sd) = mean_std(&diffs);
        assert!(m.abs() < 0.1 && (sd - 2.0).abs() < 0.1, "{m} {sd}");
    }

    #[test]
    fn uniform_shift_bounds() {
        let d = grid(1000);
        let p = rssi_uniform_shift(&d, 20.0, 2).unwrap();
        for (a, b) in d.rows.iter().zip(&p.rows) {
            assert!((b[RSSI_FEATURE] - a[RSSI_FEATURE]).abs() <= 20.0);
        }
        assert_eq!(rssi_uniform_shift(&d, 0.0, 2).unwrap(), d);
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(matches!(evasion_perturb(&grid(4), -1.0, 0), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic() {
        let d = grid(100);
        assert_eq!(interference_perturb(&d, 2.0, 5).unwrap(), interference_perturb(&d, 2.0, 5).unwrap());
    }
}
