//! Least-squares order fits on log-log error data.

use super::{HarnessError, SweepRecord};

/// A fitted convergence order `error ~ C * dt^slope`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderFit {
    /// Fitted slope on the `(ln dt, ln error)` cloud.
    pub slope: f64,
    /// Fitted `ln C`.
    pub intercept: f64,
    /// Points entering the fit.
    pub used: usize,
    /// Points dropped because the run blew up (infinite error).
    pub excluded_blowup: usize,
    /// Points dropped because the error sat at or below the noise floor.
    pub excluded_floor: usize,
}

impl OrderFit {
    /// Fitted error at a step size.
    pub fn predict(&self, dt: f64) -> f64 {
        (self.intercept + self.slope * dt.ln()).exp()
    }
}

/// Fits a convergence order to `(dt, error)` pairs.
///
/// Blown-up points (non-finite error) and points at or below `noise_floor`
/// are excluded: the first regime says nothing about the order and the
/// second is dominated by the reference accuracy, not the scheme. At least
/// two usable points must remain.
pub fn fit_order(pairs: &[(f64, f64)], noise_floor: f64) -> Result<OrderFit, HarnessError> {
    let mut excluded_blowup = 0;
    let mut excluded_floor = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(dt, error) in pairs {
        if !error.is_finite() {
            excluded_blowup += 1;
            continue;
        }
        if error <= noise_floor {
            excluded_floor += 1;
            continue;
        }
        xs.push(dt.ln());
        ys.push(error.ln());
    }
    let used = xs.len();
    if used < 2 {
        return Err(HarnessError::InsufficientData { usable: used });
    }
    let n = used as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(HarnessError::InsufficientData { usable: used });
    }
    let slope = sxy / sxx;
    Ok(OrderFit {
        slope,
        intercept: mean_y - slope * mean_x,
        used,
        excluded_blowup,
        excluded_floor,
    })
}

/// Fits an order to the records of one `eps` (bit-exact match on `eps`).
pub fn fit_records(
    records: &[SweepRecord],
    eps: f64,
    noise_floor: f64,
) -> Result<OrderFit, HarnessError> {
    let pairs: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.eps.to_bits() == eps.to_bits())
        .map(|r| (r.dt, r.error))
        .collect();
    fit_order(&pairs, noise_floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_an_exact_power_law() {
        let pairs: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let dt = 0.5_f64.powi(k);
                (dt, 3.0 * dt * dt)
            })
            .collect();
        let fit = fit_order(&pairs, 0.0).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0_f64.ln()).abs() < 1e-12);
        assert_eq!(fit.used, 6);
        assert!((fit.predict(0.1) - 0.03).abs() < 1e-12);
    }

    #[test]
    fn excludes_blowups_and_floor_points() {
        // First order everywhere except one blown-up point at large dt and
        // a plateau at small dt where the "reference" limits accuracy.
        let mut pairs = vec![(1.0, f64::INFINITY)];
        for k in 1..6 {
            let dt = 0.5_f64.powi(k);
            pairs.push((dt, 0.7 * dt));
        }
        pairs.push((1e-6, 1e-7)); // would flatten the fit if kept
        let fit = fit_order(&pairs, 1e-6).unwrap();
        assert_eq!(fit.excluded_blowup, 1);
        assert_eq!(fit.excluded_floor, 1);
        assert_eq!(fit.used, 5);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        assert!(fit_order(&[(0.1, 1e-3)], 0.0).is_err());
        assert!(fit_order(&[(0.1, f64::INFINITY), (0.05, f64::INFINITY)], 0.0).is_err());
        // identical dt values carry no slope information
        assert!(fit_order(&[(0.1, 1e-3), (0.1, 2e-3)], 0.0).is_err());
    }
}
