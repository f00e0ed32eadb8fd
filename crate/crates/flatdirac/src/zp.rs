//! The p-dimensional flat manifolds with cyclic holonomy Z_p, p ≡ 3 mod 4.

use crate::error::{Error, Result};
use crate::eta::hurwitz_zeta;
use crate::group::is_prime;
use crate::quadratic::Rat;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const F64_HARMONIC_LIMIT: u64 = 71;

fn check_prime(p: u64) -> Result<()> {
    if p % 4 != 3 || !is_prime(p) {
        return Err(Error::NotAdmissiblePrime(p));
    }
    Ok(())
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    r as u64
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(k: i64, p: u64) -> Result<i8> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{} is not an odd prime", p)));
    }
    let a = k.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

fn round_eta(x: f64, p: u64) -> Result<Rat> {
    let den = if p == 3 { 3 } else { 1 };
    let v = x * den as f64;
    let r = v.round();
    if (v - r).abs() > 1e-6 {
        return Err(Error::Precision(format!("eta residual {} at p = {}", (v - r).abs(), p)));
    }
    Ok(Rat::new(r as i64, den))
}

/// Raw `(η_{ε1}, η_{ε2})` before rounding.
pub fn zp_eta_raw(p: u64, chi: f64) -> Result<(f64, f64)> {
    check_prime(p)?;
    let pf = p as f64;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for k in 1..=(p - 1) / 2 {
        let l = legendre(k as i64, p)? as f64;
        let t = k as f64 * PI / pf;
        s1 += l / t.tan();
        let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
        s2 += sg * l / t.sin();
    }
    let c = -2.0 * chi / pf.sqrt();
    Ok((c * s1, c * s2))
}

/// Eta invariants of the two spin structures.
pub fn zp_eta(p: u64, chi: f64) -> Result<(Rat, Rat)> {
    let (a, b) = zp_eta_raw(p, chi)?;
    Ok((round_eta(a, p)?, round_eta(b, p)?))
}

/// Eta series of `(M_p, ε_h)`, `h ∈ {1, 2}`, with trivial twist.
pub fn zp_eta_series(p: u64, h: u8, s: f64) -> Result<f64> {
    zp_eta_series_twisted(p, h, s, 1.0)
}

pub fn zp_eta_series_twisted(p: u64, h: u8, s: f64, chi: f64) -> Result<f64> {
    check_prime(p)?;
    let pf = p as f64;
    let mut total = 0.0;
    for k in 1..p {
        let lk = legendre(k as i64, p)? as f64;
        let mut inner = 0.0;
        match h {
            1 => {
                for l in 1..p {
                    inner += (2.0 * PI * (l * k) as f64 / pf).sin() * hurwitz_zeta(s, l as f64 / pf)?;
                }
            }
            2 => {
                for l in 0..p {
                    let o = (2 * l + 1) as f64;
                    inner += (o * PI * k as f64 / pf).sin() * hurwitz_zeta(s, o / (2.0 * pf))?;
                }
            }
            _ => return Err(Error::InvalidSpinStructure(format!("h = {}", h))),
        }
        let sg = if h == 2 && k % 2 == 1 { -1.0 } else { 1.0 };
        total += sg * lk * inner;
    }
    Ok(-2.0 * chi / (pf.sqrt() * (2.0 * PI * pf).powf(s)) * total)
}

/// `d_0(ε_1)` in double precision.
pub fn zp_harmonic(p: u64) -> Result<u64> {
    check_prime(p)?;
    if p > F64_HARMONIC_LIMIT {
        return Err(Error::Precision(format!("p = {} exceeds the double-precision limit", p)));
    }
    let m = (p - 1) / 2;
    let r = (p - 3) / 4;
    let pf = p as f64;
    let mut s = 0.0;
    for k in 0..p {
        let sg = if ((r + 1) * k) % 2 == 0 { 1.0 } else { -1.0 };
        let prod: f64 = (1..=m).map(|j| ((j * k) as f64 * PI / pf).cos()).product();
        s += sg * prod;
    }
    let v = s * 2f64.powi(m as i32) / pf;
    let rv = v.round();
    if (v - rv).abs() > 1e-3 || rv < 0.0 {
        return Err(Error::Precision(format!("d0 residual {} at p = {}", (v - rv).abs(), p)));
    }
    Ok(rv as u64)
}

/// `d_0(ε_1)` exactly: the number of sign vectors with
/// `Σ ±j ≡ -(r+1)p mod 2p`, `1 ≤ j ≤ m`.
pub fn zp_harmonic_exact(p: u64) -> Result<BigUint> {
    check_prime(p)?;
    let m = (p - 1) / 2;
    let r = (p - 3) / 4;
    let md = (2 * p) as usize;
    let mut counts = vec![BigUint::zero(); md];
    counts[0] = BigUint::from(1u32);
    for j in 1..=m as usize {
        let mut next = vec![BigUint::zero(); md];
        for (res, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[(res + j) % md] += c;
            next[(res + md - j % md) % md] += c;
        }
        counts = next;
    }
    let target = (md - ((r + 1) * p) as usize % md) % md;
    Ok(counts[target].clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZpRow {
    pub r: u64,
    pub p: u64,
    #[serde(serialize_with = "ser_rat")]
    pub eta1: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub eta2: Rat,
    #[serde(serialize_with = "ser_big")]
    pub d0: Option<BigUint>,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_big<S: serde::Serializer>(r: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(v) => match v.to_u64() {
            Some(x) => s.serialize_u64(x),
            None => s.serialize_str(&v.to_string()),
        },
        None => s.serialize_none(),
    }
}

/// Rows for all admissible primes `≤ p_max`; `d_0` for `p ≤ 71`, or every
/// row when `extended`.
pub fn zp_table(p_max: u64, extended: bool) -> Result<Vec<ZpRow>> {
    let primes: Vec<u64> = (3..=p_max).filter(|&p| p % 4 == 3 && is_prime(p)).collect();
    primes
        .par_iter()
        .map(|&p| {
            let (eta1, eta2) = zp_eta(p, 1.0)?;
            let d0 = if extended || p <= F64_HARMONIC_LIMIT { Some(zp_harmonic_exact(p)?) } else { None };
            Ok(ZpRow { r: (p - 3) / 4, p, eta1, eta2, d0 })
        })
        .collect()
}

pub fn zp_table_markdown(rows: &[ZpRow]) -> String {
    let mut out = String::from("| r | p | eta_e1 | eta_e2 | d0_e1 |\n|---|---|---|---|---|\n");
    for row in rows {
        let d = row.d0.as_ref().map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("| {} | {} | {} | {} | {} |\n", row.r, row.p, row.eta1, row.eta2, d));
    }
    out
}

pub fn zp_table_csv(rows: &[ZpRow]) -> String {
    let mut out = String::from("r,p,eta_e1,eta_e2,d0_e1\n");
    for row in rows {
        let d = row.d0.as_ref().map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", row.r, row.p, row.eta1, row.eta2, d));
    }
    out
}

/// Published eta values `(p, η_{ε1}, η_{ε2})`; the entry for 3 is in thirds.
pub const PUBLISHED_ETA: [(u64, i64, i64); 51] = [
    (3, -2, 4),
    (7, -2, 0),
    (11, -2, 4),
    (19, -2, 4),
    (23, -6, 0),
    (31, -6, 0),
    (43, -2, 4),
    (47, -10, 0),
    (59, -6, 12),
    (67, -2, 4),
    (71, -14, 0),
    (79, -10, 0),
    (83, -6, 12),
    (103, -10, 0),
    (107, -6, 12),
    (127, -10, 0),
    (131, -10, 20),
    (139, -6, 12),
    (151, -14, 0),
    (163, -2, 4),
    (167, -22, 0),
    (179, -10, 20),
    (191, -26, 0),
    (199, -18, 0),
    (211, -6, 12),
    (223, -14, 0),
    (227, -10, 20),
    (239, -6, 12),
    (251, -30, 28),
    (263, -26, 0),
    (271, -22, 0),
    (283, -6, 12),
    (307, -6, 12),
    (311, -38, 0),
    (331, -6, 12),
    (347, -10, 20),
    (359, -38, 0),
    (367, -18, 0),
    (379, -6, 12),
    (383, -34, 0),
    (419, -18, 36),
    (431, -42, 0),
    (439, -30, 0),
    (443, -10, 20),
    (463, -14, 0),
    (467, -14, 28),
    (479, -50, 0),
    (487, -14, 0),
    (491, -18, 36),
    (499, -6, 12),
    (503, -42, 0),
];

pub const PUBLISHED_HARMONIC: [(u64, u64); 11] = [
    (3, 0),
    (7, 2),
    (11, 2),
    (19, 26),
    (23, 90),
    (31, 1058),
    (43, 48770),
    (47, 178482),
    (59, 9099506),
    (67, 128207978),
    (71, 483939978),
];

pub fn published_eta(p: u64) -> Option<(Rat, Rat)> {
    PUBLISHED_ETA.iter().find(|e| e.0 == p).map(|&(p, a, b)| {
        let d = if p == 3 { 3 } else { 1 };
        (Rat::new(a, d), Rat::new(b, d))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(1, 3).unwrap(), 1);
        assert_eq!(legendre(2, 3).unwrap(), -1);
        assert_eq!(legendre(0, 7).unwrap(), 0);
        assert!(legendre(1, 9).is_err());
        for p in [7u64, 11, 19, 23, 43] {
            for k in 1..p as i64 {
                assert_eq!(legendre(p as i64 - k, p).unwrap(), -legendre(k, p).unwrap());
                let sq = (1..p as i64).any(|x| (x * x - k).rem_euclid(p as i64) == 0);
                assert_eq!(legendre(k, p).unwrap() == 1, sq);
            }
        }
    }

    #[test]
    fn small_eta_values() {
        assert_eq!(zp_eta(3, 1.0).unwrap(), (Rat::new(-2, 3), Rat::new(4, 3)));
        assert_eq!(zp_eta(7, 1.0).unwrap(), (Rat::from_integer(-2), Rat::from_integer(0)));
        assert_eq!(zp_eta(503, 1.0).unwrap(), (Rat::from_integer(-42), Rat::from_integer(0)));
        assert_eq!(zp_eta(7, -1.0).unwrap().0, Rat::from_integer(2));
        assert_eq!(zp_eta(5, 1.0), Err(Error::NotAdmissiblePrime(5)));
    }

    #[test]
    fn k_and_p_minus_k_terms_agree() {
        for p in (3..=503u64).filter(|&p| p % 4 == 3 && is_prime(p)) {
            let pf = p as f64;
            for k in 1..p {
                let a = legendre(k as i64, p).unwrap() as f64 / (k as f64 * PI / pf).tan();
                let b = legendre((p - k) as i64, p).unwrap() as f64 / ((p - k) as f64 * PI / pf).tan();
                assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
                let sa = if k % 2 == 0 { 1.0 } else { -1.0 };
                let sb = if (p - k) % 2 == 0 { 1.0 } else { -1.0 };
                let c = sa * legendre(k as i64, p).unwrap() as f64 / (k as f64 * PI / pf).sin();
                let d = sb * legendre((p - k) as i64, p).unwrap() as f64 / ((p - k) as f64 * PI / pf).sin();
                assert!((c - d).abs() < 1e-9 * c.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sine_sum_identity() {
        for p in 2..=50u64 {
            for k in 1..p {
                let pf = p as f64;
                let s: f64 = (1..p).map(|l| l as f64 * (2.0 * PI * (l * k) as f64 / pf).sin()).sum();
                assert!((s + pf / 2.0 / (k as f64 * PI / pf).tan()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn series_at_zero_reproduces_invariants() {
        for p in (3..=100u64).filter(|&p| p % 4 == 3 && is_prime(p)) {
            let (a, b) = zp_eta_raw(p, 1.0).unwrap();
            assert!((zp_eta_series(p, 1, 0.0).unwrap() - a).abs() < 1e-8);
            assert!((zp_eta_series(p, 2, 0.0).unwrap() - b).abs() < 1e-8);
        }
        assert!((zp_eta_series(3, 1, 0.0).unwrap() + 2.0 / 3.0).abs() < 1e-9);
        assert!(zp_eta_series(7, 2, 0.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn series_matches_direct_sum() {
        let p = 11u64;
        let s = 12.0;
        let pf = p as f64;
        let mut total = 0.0;
        for k in 1..p {
            let inner: f64 = (1..2000).map(|j| (2.0 * PI * (j * k) as f64 / pf).sin() / (j as f64).powf(s)).sum();
            total += legendre(k as i64, p).unwrap() as f64 * inner;
        }
        let direct = -2.0 / pf.sqrt() * (2.0 * PI).powf(-s) * total;
        let v = zp_eta_series(p, 1, s).unwrap();
        assert!((v - direct).abs() < 1e-8 * direct.abs().max(1e-30));
    }

    #[test]
    fn harmonic_paths_agree() {
        for (p, d) in PUBLISHED_HARMONIC {
            assert_eq!(zp_harmonic(p).unwrap(), d);
            assert_eq!(zp_harmonic_exact(p).unwrap(), BigUint::from(d));
        }
        assert!(matches!(zp_harmonic(79), Err(Error::Precision(_))));
    }

    fn class_number(p: u64) -> i64 {
        let s: i64 = (1..p).map(|k| k as i64 * legendre(k as i64, p).unwrap() as i64).sum();
        -s / p as i64
    }

    #[test]
    fn eta_tracks_class_number() {
        for p in (7..=503u64).filter(|&p| p % 4 == 3 && is_prime(p)) {
            let h = class_number(p);
            let (a, b) = zp_eta(p, 1.0).unwrap();
            assert_eq!(a, Rat::from_integer(-2 * h), "p = {}", p);
            let e2 = if p % 8 == 7 { 0 } else { 4 * h };
            assert_eq!(b, Rat::from_integer(e2), "p = {}", p);
        }
    }

    #[test]
    fn table_shape() {
        assert!(zp_table(2, false).unwrap().is_empty());
        let t = zp_table(11, false).unwrap();
        assert_eq!(t.iter().map(|r| r.p).collect::<Vec<_>>(), vec![3, 7, 11]);
        assert_eq!((t[2].eta1, t[2].eta2), (Rat::from_integer(-2), Rat::from_integer(4)));
        assert_eq!(zp_table(503, false).unwrap().len(), 51);
        assert!(zp_table_csv(&t).starts_with("r,p,eta_e1,eta_e2,d0_e1\n0,3,-2/3,4/3,0\n"));
    }
}
