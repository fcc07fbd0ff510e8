use super::DspError;

/// Mean and population standard deviation (divides by `n`).
pub fn mean_and_std(x: &[f64]) -> Result<(f64, f64), DspError> {
    if x.is_empty() {
        return Err(DspError::EmptySignal);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

pub fn std_dev(x: &[f64]) -> Result<f64, DspError> {
    mean_and_std(x).map(|(_, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_has_zero_std() {
        assert_eq!(mean_and_std(&[5.0; 4]).unwrap(), (5.0, 0.0));
    }

    #[test]
    fn population_formula() {
        // hand computation: deviations -1.5, -0.5, 0.5, 1.5 -> squares sum 5, /4 = 1.25
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(m, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s, 1.25f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s, 1.118034, epsilon = 1e-6);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(mean_and_std(&[]), Err(DspError::EmptySignal));
    }

    proptest! {
        #[test]
        fn affine_map_scales_std(xs in prop::collection::vec(-100.0f64..100.0, 1..200)) {
            let s = std_dev(&xs).unwrap();
            let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 7.0).collect();
            // direct recomputation of the population formula
            let n = ys.len() as f64;
            let m = ys.iter().sum::<f64>() / n;
            let direct = (ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!((std_dev(&ys).unwrap() - direct).abs() <= 1e-9 * (1.0 + direct));
            prop_assert!((std_dev(&ys).unwrap() - 2.0 * s).abs() <= 1e-9 * (1.0 + s));
        }
    }
}
