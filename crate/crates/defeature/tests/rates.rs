use approx::assert_relative_eq;
use defeature::fit_rate;
use proptest::prelude::*;

#[test]
fn exact_power_laws() {
    let pts: Vec<(f64, f64)> = (0..5).map(|k| 0.5f64.powi(k)).map(|e| (e, 3.0 * e * e)).collect();
    assert_relative_eq!(fit_rate(&pts).unwrap(), 2.0, epsilon = 1e-12);
    let flat: Vec<(f64, f64)> = [1.0, 0.1, 0.01].iter().map(|&e| (e, 7.0)).collect();
    assert_relative_eq!(fit_rate(&flat).unwrap(), 0.0, epsilon = 1e-12);
    let grow: Vec<(f64, f64)> = [1e-2, 5e-3, 2.5e-3].iter().map(|&e: &f64| (e, e.powi(-3))).collect();
    assert_relative_eq!(fit_rate(&grow).unwrap(), -3.0, epsilon = 1e-12);
}

#[test]
fn invalid_inputs() {
    assert!(fit_rate(&[(1.0, 1.0)]).is_err());
    assert!(fit_rate(&[(1.0, 1.0), (0.5, 0.0)]).is_err());
    assert!(fit_rate(&[(1.0, 1.0), (-0.5, 1.0)]).is_err());
    assert!(fit_rate(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
}

proptest! {
    #[test]
    fn noisy_rate_is_recovered(c in 1e-3f64..1e3, noise in proptest::collection::vec(-1.0f64..1.0, 7)) {
        // ±0.2% multiplicative noise over a factor-64 range moves the slope by < 0.01.
        let pts: Vec<(f64, f64)> = noise.iter().enumerate().map(|(k, n)| {
            let e = 1e-2 / 2f64.powi(k as i32);
            (e, c * e.powf(1.5) * (1.0 + 2e-3 * n))
        }).collect();
        prop_assert!((fit_rate(&pts).unwrap() - 1.5).abs() < 0.01);
    }
}
