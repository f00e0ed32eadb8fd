//! Hurwitz zeta and eta series of flat manifolds.

use crate::dirac::{default_sigma, z2k_asymmetry, HolonomyCharacter, SpectrumTable};
use crate::error::{Error, Result};
use crate::group::BieberbachGroup;
use crate::quadratic::Rat;
use crate::spin::SpinStructure;
use serde::Serialize;
use std::f64::consts::PI;

// B_2, B_4, ..., B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const SHIFT_TARGET: f64 = 20.0;

/// `ζ(s, a) = Σ_{j≥0} (j+a)^{-s}` for `a ∈ (0, 1]`, `s ≠ 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidArgument(format!("Hurwitz parameter {} outside (0, 1]", a)));
    }
    if s == 1.0 {
        return Err(Error::Pole);
    }
    if s == 0.0 {
        return Ok(0.5 - a);
    }
    let n = (SHIFT_TARGET - a).ceil().max(0.0) as usize;
    let mut head = 0.0;
    for j in (0..n).rev() {
        head += (j as f64 + a).powf(-s);
    }
    let x = n as f64 + a;
    let mut sum = head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2k-2) / (2k)! * x^{-s-2k+1}
    let mut coef = s / x.powf(s + 1.0);
    let mut fact = 2.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = k + 1;
        sum += b / fact * coef;
        let j = 2 * k;
        coef *= (s + j as f64 - 1.0) * (s + j as f64) / (x * x);
        fact *= ((j + 1) * (j + 2)) as f64;
    }
    Ok(sum)
}

/// `∂_s ζ(s, a)` at `s = 0`.
pub fn hurwitz_zeta_deriv0(a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidArgument(format!("Hurwitz parameter {} outside (0, 1]", a)));
    }
    Ok(statrs::function::gamma::ln_gamma(a) - 0.5 * (2.0 * PI).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaReport {
    #[serde(rename = "eta0", serialize_with = "ser_rat")]
    pub eta_at_0: Rat,
    #[serde(rename = "eta_prime0")]
    pub eta_prime_at_0: f64,
    pub samples: Vec<(f64, f64)>,
    #[serde(skip)]
    pub identically_zero: bool,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl EtaReport {
    pub fn zero(samples: &[f64]) -> Self {
        EtaReport { eta_at_0: Rat::from_integer(0), eta_prime_at_0: 0.0, samples: samples.iter().map(|&s| (s, 0.0)).collect(), identically_zero: true }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("eta serialization")
    }
}

fn quarter_difference(s: f64) -> Result<f64> {
    if s == 1.0 {
        return Ok(PI);
    }
    Ok(hurwitz_zeta(s, 0.25)? - hurwitz_zeta(s, 0.75)?)
}

/// Closed-form eta series of a Z_2^k manifold.
pub fn eta_z2k(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter, samples: &[f64]) -> Result<EtaReport> {
    g.z2_rank().ok_or(Error::NotZ2k)?;
    let sigma = default_sigma(g.dim());
    let Some(a) = z2k_asymmetry(g, eps, rho, sigma.as_ref())? else {
        return Ok(EtaReport::zero(samples));
    };
    let half = a.amplitude / 2.0;
    let eta0 = half.round();
    if (half - eta0).abs() > 1e-9 {
        return Err(Error::NonIntegral(format!("eta(0) = {}", half)));
    }
    let fnorm = a.f_norm();
    let gamma_q = statrs::function::gamma::ln_gamma(0.25);
    let eta_prime = eta0 * (4.0 * gamma_q + fnorm.ln() - 3.0 * (2.0 * PI).ln());
    let samples = samples
        .iter()
        .map(|&s| Ok((s, a.amplitude * (fnorm / (4.0 * PI)).powf(s) * quarter_difference(s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EtaReport { eta_at_0: Rat::from_integer(eta0 as i64), eta_prime_at_0: eta_prime, samples, identically_zero: false })
}

/// `Σ (d⁺ - d⁻)/(2πμ)^s` over the table, continued along the asymmetric
/// progression for `tail_terms` further terms.
pub fn eta_partial_sum(table: &SpectrumTable, s: f64, tail_terms: u64) -> Result<f64> {
    if s <= table.n as f64 {
        return Err(Error::InvalidArgument(format!("partial sums need s > {}", table.n)));
    }
    if !table.asymmetric {
        return Ok(0.0);
    }
    let a = table.asymmetry.as_ref().ok_or_else(|| Error::InvalidArgument("table has no asymmetry data".into()))?;
    let mut sum = 0.0;
    for e in &table.entries {
        if e.d_plus != e.d_minus {
            let mu = (e.four_mu_sq as f64).sqrt() / 2.0;
            sum += (e.d_plus as f64 - e.d_minus as f64) / (2.0 * PI * mu).powf(s);
        }
    }
    let mut j = 0u64;
    while 4.0 * a.progression(j).0.powi(2) <= table.max_key as f64 + 1e-9 {
        j += 1;
    }
    for jj in j..j + tail_terms {
        let (mu, d) = a.progression(jj);
        sum += d / (2.0 * PI * mu).powf(s);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::SignedPermMatrix;
    use crate::dirac::z2k_spectrum;
    use crate::group::{build_group, AffineGen};

    fn direct(s: f64, a: f64) -> f64 {
        let n = 2_000_000usize;
        let mut t = 0.0;
        for j in (0..n).rev() {
            t += (j as f64 + a).powf(-s);
        }
        let x = n as f64 + a;
        t + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
    }

    #[test]
    fn special_values() {
        assert_eq!(hurwitz_zeta(0.0, 0.25).unwrap(), 0.25);
        assert_eq!(hurwitz_zeta(0.0, 0.75).unwrap(), -0.25);
        assert!((hurwitz_zeta(2.0, 1.0).unwrap() - PI * PI / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((hurwitz_zeta(-1.0, 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(hurwitz_zeta(1.0, 0.5), Err(Error::Pole));
    }

    #[test]
    fn against_direct_summation() {
        for &(s, a) in &[(2.5, 0.3), (3.0, 0.01), (1.5, 0.9), (12.0, 0.25), (20.0, 0.75)] {
            let z = hurwitz_zeta(s, a).unwrap();
            assert!(((z - direct(s, a)) / z).abs() < 1e-12, "{} {}", s, a);
        }
    }

    #[test]
    fn derivative_at_zero_matches_difference_quotient() {
        for &a in &[0.25, 0.5, 0.75, 1.0] {
            let h = 1e-5;
            let q = (hurwitz_zeta(h, a).unwrap() - hurwitz_zeta(-h, a).unwrap()) / (2.0 * h);
            assert!((q - hurwitz_zeta_deriv0(a).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn quarter_difference_positive() {
        for i in 1..=200 {
            assert!(quarter_difference(i as f64 * 0.1).unwrap() > 0.0);
        }
    }

    fn remark35() -> BieberbachGroup {
        let b = SignedPermMatrix::diag(&[-1, -1, 1]);
        build_group(3, vec![AffineGen::from_parts(b, &[0, 0, 1], 2).unwrap()]).unwrap()
    }

    #[test]
    fn remark35_eta() {
        let g = remark35();
        let rho = HolonomyCharacter::trivial(&g);
        let p = SpinStructure::new(&g, vec![1, 1, -1], vec![1]).unwrap();
        let m = SpinStructure::new(&g, vec![1, 1, -1], vec![-1]).unwrap();
        let rp = eta_z2k(&g, &p, &rho, &[5.0, 8.0, 12.0]).unwrap();
        let rm = eta_z2k(&g, &m, &rho, &[5.0]).unwrap();
        assert_eq!(rp.eta_at_0, Rat::from_integer(1));
        assert_eq!(rm.eta_at_0, Rat::from_integer(-1));
        let h = 1e-5;
        let a = 2.0;
        let num = a * ((1.0 / (4.0 * PI)).powf(h) * quarter_difference(h).unwrap()
            - (1.0 / (4.0 * PI)).powf(-h) * quarter_difference(-h).unwrap())
            / (2.0 * h);
        assert!((num - rp.eta_prime_at_0).abs() < 1e-7);
        let tp = z2k_spectrum(&g, &p, &rho, 100).unwrap();
        let tm = z2k_spectrum(&g, &m, &rho, 100).unwrap();
        for &(s, v) in &rp.samples {
            let ps = eta_partial_sum(&tp, s, 10_000).unwrap();
            assert!((ps - v).abs() < 1e-8, "{} {} {}", s, ps, v);
            assert!((eta_partial_sum(&tm, s, 10_000).unwrap() + ps).abs() < 1e-15);
        }
        assert!(eta_partial_sum(&tp, 2.0, 10).is_err());
    }

    #[test]
    fn symmetric_is_zero() {
        let g = BieberbachGroup::torus(3).unwrap();
        let e = SpinStructure::new(&g, vec![1, 1, 1], vec![]).unwrap();
        let r = eta_z2k(&g, &e, &HolonomyCharacter::trivial(&g), &[5.0]).unwrap();
        assert!(r.identically_zero);
        assert_eq!(r.to_json(), r#"{"eta0":"0","eta_prime0":0.0,"samples":[[5.0,0.0]]}"#);
    }
}
