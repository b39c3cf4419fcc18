use std::f64::consts::PI;

use super::{ModelError, PmiParams};

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        (1..n / 2).map(f64::from).product()
    } else {
        // Γ(k + ½) = √π · ∏_{j=1..k} (j − ½)
        let k = (n - 1) / 2;
        PI.sqrt() * (1..=k).map(|j| f64::from(j) - 0.5).product::<f64>()
    }
}

/// Area of the unit `(n−1)`-sphere, `2π^{n/2} / Γ(n/2)`.
pub fn omega(n: u32) -> f64 {
    2.0 * PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

/// `r₊ = (4S/ω)^{1/(n−1)}`.
pub fn horizon_radius_from_entropy(entropy: f64, n: u32, omega: f64) -> Result<f64, ModelError> {
    if !(entropy > 0.0) {
        return Err(ModelError::NonPositiveEntropy(entropy));
    }
    Ok((4.0 * entropy / omega).powf(1.0 / f64::from(n - 1)))
}

/// `S = ω r₊^{n−1} / 4`.
pub fn entropy_from_horizon(radius: f64, n: u32, omega: f64) -> f64 {
    omega * radius.powi(n as i32 - 1) / 4.0
}

/// Mass in terms of horizon radius and physical charge, at the parameter value of `l`.
pub fn mass_from_horizon(radius: f64, charge: f64, params: &PmiParams) -> Result<f64, ModelError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ModelError::InvalidParameter(format!("horizon radius must be positive, got {radius}")));
    }
    if !(charge >= 0.0 && charge.is_finite()) {
        return Err(ModelError::InvalidParameter(format!("charge must be non-negative, got {charge}")));
    }
    let n = params.n as i32;
    let i = f64::from(params.i);
    let l = params.l;
    let q = params.charge_coefficient() * charge.powf(1.0 / i);
    let charge_power = f64::from(params.i + 1 - params.n) / i;
    let bracket = radius.powi(n - 2) + radius.powi(n) / (l * l)
        - params.charge_term_constant() * radius.powf(charge_power) * q.powi(params.i as i32 + 1);
    Ok(params.prefactor() * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((omega(2) - 2.0 * PI).abs() < 1e-14);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((omega(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn unit_radius() {
        for n in [3, 4, 6] {
            let w = omega(n);
            assert!((horizon_radius_from_entropy(w / 4.0, n, w).unwrap() - 1.0).abs() < 1e-15);
        }
        let w = omega(3);
        assert!((horizon_radius_from_entropy(w, 3, w).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_round_trip() {
        for n in [3, 4, 6] {
            let w = omega(n);
            for s in [0.01, 1.0, 37.5, 1e4] {
                let r = horizon_radius_from_entropy(s, n, w).unwrap();
                assert!((entropy_from_horizon(r, n, w) - s).abs() < 1e-12 * s);
            }
        }
    }

    #[test]
    fn rejects_non_positive_entropy() {
        assert_eq!(horizon_radius_from_entropy(0.0, 3, 1.0), Err(ModelError::NonPositiveEntropy(0.0)));
        assert!(horizon_radius_from_entropy(-1.0, 3, 1.0).is_err());
    }

    #[test]
    fn uncharged_limit_is_schwarzschild_ads() {
        let p = PmiParams::new(4, 4, 1.3, false).unwrap();
        for r in [0.5f64, 1.0, 3.0] {
            let want = 3.0 * p.omega() / (16.0 * PI) * (r * r + r.powi(4) / (1.3 * 1.3));
            assert!((mass_from_horizon(r, 0.0, &p).unwrap() - want).abs() < 1e-13 * want);
        }
    }

    #[test]
    fn mass_grows_at_large_radius() {
        let p = PmiParams::new(4, 4, 1.0, false).unwrap();
        let grid: Vec<f64> = (0..200).map(|k| 2.0 + 0.25 * f64::from(k)).collect();
        let masses: Vec<f64> = grid.iter().map(|&r| mass_from_horizon(r, 1.0, &p).unwrap()).collect();
        assert!(masses.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_radius() {
        let p = PmiParams::new(3, 1, 1.0, false).unwrap();
        assert!(mass_from_horizon(0.0, 1.0, &p).is_err());
    }
}
