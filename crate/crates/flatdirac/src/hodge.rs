//! Hodge Laplacian on p-forms and Betti numbers.

use crate::clifford::SignedPermMatrix;
use crate::error::{Error, Result};
use crate::group::BieberbachGroup;
use crate::shells::theta_table;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

/// `K_p^n(x) = Σ_t (-1)^t C(x,t) C(n-x, p-t)`.
pub fn krawtchouk(p: usize, n: usize, x: usize) -> Result<BigInt> {
    if p > n || x > n {
        return Err(Error::InvalidArgument(format!("K_{}^{}({}) out of range", p, n, x)));
    }
    let mut s = BigInt::zero();
    for t in 0..=p.min(x) {
        if p - t > n - x {
            continue;
        }
        let term = binomial(BigInt::from(x), BigInt::from(t)) * binomial(BigInt::from(n - x), BigInt::from(p - t));
        if t % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    Ok(s)
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `tr Λ^p(B)` as the p-th elementary symmetric function of the eigenvalues,
/// read off `det(xI - B) = Π_cycles (x^L - s)`.
pub fn exterior_trace_general(b: &SignedPermMatrix, p: usize) -> i64 {
    let n = b.dim();
    if p > n {
        return 0;
    }
    // ascending coefficients
    let mut poly = vec![1i128];
    for c in b.cycles() {
        let mut f = vec![0i128; c.len() + 1];
        f[0] = -(c.sign_product as i128);
        f[c.len()] = 1;
        poly = poly_mul(&poly, &f);
    }
    let coeff = poly[n - p];
    let v = if p % 2 == 0 { coeff } else { -coeff };
    v as i64
}

fn pm_one_spectrum(b: &SignedPermMatrix) -> bool {
    b.cycles().iter().all(|c| c.len() == 1 || (c.len() == 2 && c.is_positive()))
}

/// `tr Λ^p(B)`; Krawtchouk values when every eigenvalue is ±1.
pub fn exterior_trace(b: &SignedPermMatrix, p: usize) -> Result<i64> {
    let n = b.dim();
    if p > n {
        return Err(Error::InvalidArgument(format!("p = {} exceeds n = {}", p, n)));
    }
    if pm_one_spectrum(b) {
        let k = krawtchouk(p, n, n - b.fixed_dim())?;
        return k.to_i64().ok_or_else(|| Error::Internal("trace overflow".into()));
    }
    Ok(exterior_trace_general(b, p))
}

fn average(terms: Complex<i64>, approx: Complex64, exact: bool, order: usize, what: &str) -> Result<u64> {
    if exact {
        let o = order as i64;
        if terms.im != 0 || terms.re % o != 0 || terms.re < 0 {
            return Err(Error::NonIntegral(format!("{} = {}/{}", what, terms, o)));
        }
        return Ok((terms.re / o) as u64);
    }
    let v = approx / order as f64;
    let r = v.re.round();
    if (v.re - r).abs() > 1e-9 || v.im.abs() > 1e-9 || r < 0.0 {
        return Err(Error::NonIntegral(format!("{} = {}", what, v)));
    }
    Ok(r as u64)
}

/// Multiplicities of `4π²μ²` on p-forms, keyed by `4μ²` (including 0).
pub fn pform_spectrum(g: &BieberbachGroup, p: usize, max_key: u64) -> Result<BTreeMap<u64, u64>> {
    let n = g.dim();
    let traces: Vec<i64> = g.cosets().iter().map(|c| exterior_trace(&c.matrix, p)).collect::<Result<_>>()?;
    let table = theta_table(g, &vec![1; n], max_key)?;
    let mut out = BTreeMap::new();
    for s in &table {
        let mut exact = Complex::new(0i64, 0);
        let mut approx = Complex64::new(0.0, 0.0);
        let mut all_exact = true;
        for (ci, t) in traces.iter().enumerate() {
            if *t == 0 {
                continue;
            }
            let e = &s.sums[ci];
            match e.exact {
                Some(z) => exact += z * *t,
                None => all_exact = false,
            }
            approx += e.value() * *t as f64;
        }
        let d = average(exact, approx, all_exact, g.order(), "p-form multiplicity")?;
        if d > 0 {
            out.insert(s.key, d);
        }
    }
    Ok(out)
}

/// `dim (Λ^p R^n)^F`.
pub fn betti(g: &BieberbachGroup, p: usize) -> Result<u64> {
    if p > g.dim() {
        return Ok(0);
    }
    let mut s = 0i64;
    for c in g.cosets() {
        s += exterior_trace(&c.matrix, p)?;
    }
    average(Complex::new(s, 0), Complex64::new(s as f64, 0.0), true, g.order(), "Betti number")
}

pub fn betti_vector(g: &BieberbachGroup) -> Result<Vec<u64>> {
    (0..=g.dim()).map(|p| betti(g, p)).collect()
}

pub fn pform_spectrum_csv(spec: &BTreeMap<u64, u64>) -> String {
    let mut out = String::from("four_mu_sq,multiplicity\n");
    for (k, d) in spec {
        out.push_str(&format!("{},{}\n", k, d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, AffineGen};
    use proptest::prelude::*;

    #[test]
    fn krawtchouk_values() {
        for n in 0..10 {
            for x in 0..=n {
                assert_eq!(krawtchouk(0, n, x).unwrap(), BigInt::from(1));
            }
        }
        for n in (2..=12).step_by(2) {
            for j in (1..=n).step_by(2) {
                assert_eq!(krawtchouk(n / 2, n, j).unwrap(), BigInt::zero());
            }
        }
        assert_eq!(krawtchouk(1, 4, 2).unwrap(), BigInt::zero());
        assert!(krawtchouk(5, 4, 0).is_err());
    }

    #[test]
    fn krawtchouk_reciprocity() {
        for n in 0..=12 {
            for k in 0..=n {
                for j in 0..=n {
                    assert_eq!(krawtchouk(k, n, j).unwrap().is_zero(), krawtchouk(j, n, k).unwrap().is_zero());
                }
            }
        }
    }

    fn arb_signed_perm(n: usize) -> impl Strategy<Value = SignedPermMatrix> {
        (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n))
            .prop_map(|(perm, signs)| SignedPermMatrix::new(perm, signs).unwrap())
    }

    proptest! {
        #[test]
        fn trace_paths_agree(b in (1usize..=8).prop_flat_map(arb_signed_perm), p in 0usize..=8) {
            prop_assume!(p <= b.dim());
            if pm_one_spectrum(&b) {
                let k = krawtchouk(p, b.dim(), b.dim() - b.fixed_dim()).unwrap();
                prop_assert_eq!(BigInt::from(exterior_trace_general(&b, p)), k);
            }
            if p == 1 {
                let tr: i64 = (0..b.dim()).filter(|&i| b.perm[i] == i).map(|i| b.signs[i] as i64).sum();
                prop_assert_eq!(exterior_trace(&b, 1).unwrap(), tr);
            }
            if p == b.dim() {
                prop_assert_eq!(exterior_trace(&b, p).unwrap(), b.det() as i64);
            }
        }
    }

    #[test]
    fn remark35_betti() {
        let b = SignedPermMatrix::diag(&[-1, -1, 1]);
        let g = build_group(3, vec![AffineGen::from_parts(b, &[0, 0, 1], 2).unwrap()]).unwrap();
        assert_eq!(betti_vector(&g).unwrap(), vec![1, 1, 1, 1]);
        let s0 = pform_spectrum(&g, 0, 8).unwrap();
        assert_eq!(s0.get(&0), Some(&1));
        let s1 = pform_spectrum(&g, 1, 8).unwrap();
        assert_eq!(s1.get(&0), Some(&1));
    }

    #[test]
    fn torus_forms() {
        let g = BieberbachGroup::torus(3).unwrap();
        let s = pform_spectrum(&g, 1, 4).unwrap();
        assert_eq!(s.get(&4), Some(&18));
        assert_eq!(betti_vector(&g).unwrap(), vec![1, 3, 3, 1]);
        assert_eq!(pform_spectrum_csv(&s), "four_mu_sq,multiplicity\n0,3\n4,18\n");
    }
}
