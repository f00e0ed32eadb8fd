//! Shells of the shifted dual lattice `Z^n + u_ε` and their B-fixed parts,
//! keyed by the integer `4μ²`.

use crate::error::{Error, Result};
use crate::group::BieberbachGroup;
use crate::quadratic::Rat;
use num_complex::{Complex, Complex64};
use num_traits::Zero;
use rayon::prelude::*;

/// Largest key accepted by the table builders.
pub const MAX_KEY_BUDGET: u64 = 40_000;

/// A sum of roots of unity, exact in Z[i] whenever every phase is a power
/// of i, always available as a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSum {
    pub exact: Option<Complex<i64>>,
    pub approx: Complex64,
}

impl Default for ExpSum {
    fn default() -> Self {
        Self::zero()
    }
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum { exact: Some(Complex::new(0, 0)), approx: Complex64::new(0.0, 0.0) }
    }

    pub fn from_int(k: i64) -> Self {
        ExpSum { exact: Some(Complex::new(k, 0)), approx: Complex64::new(k as f64, 0.0) }
    }

    /// `e^{-2πi x}`.
    pub fn phase(x: Rat) -> Self {
        let four = x * Rat::from_integer(4);
        let approx = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * rat_f64(x));
        if four.is_integer() {
            let e = match four.to_integer().rem_euclid(4) {
                0 => Complex::new(1, 0),
                1 => Complex::new(0, -1),
                2 => Complex::new(-1, 0),
                _ => Complex::new(0, 1),
            };
            ExpSum { exact: Some(e), approx: Complex64::new(e.re as f64, e.im as f64) }
        } else {
            ExpSum { exact: None, approx }
        }
    }

    pub fn add(&self, o: &ExpSum) -> ExpSum {
        ExpSum {
            exact: match (self.exact, o.exact) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            approx: self.approx + o.approx,
        }
    }

    pub fn mul(&self, o: &ExpSum) -> ExpSum {
        ExpSum {
            exact: match (self.exact, o.exact) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
            approx: self.approx * o.approx,
        }
    }

    pub fn scale(&self, k: i64) -> ExpSum {
        ExpSum { exact: self.exact.map(|a| a * k), approx: self.approx * k as f64 }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn value(&self) -> Complex64 {
        match self.exact {
            Some(e) => Complex64::new(e.re as f64, e.im as f64),
            None => self.approx,
        }
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Counts and per-coset exponential sums for one shell.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellCount {
    pub key: u64,
    pub count: u64,
    pub sums: Vec<ExpSum>,
}

/// Shift vector `u_ε`: ½ on coordinates where δ is -1.
pub fn shift_vector(delta: &[i8]) -> Vec<Rat> {
    delta.iter().map(|&d| if d < 0 { Rat::new(1, 2) } else { Rat::zero() }).collect()
}

fn check_delta(g: &BieberbachGroup, delta: &[i8]) -> Result<()> {
    if delta.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: delta.len() });
    }
    if delta.iter().any(|&d| d != 1 && d != -1) {
        return Err(Error::InvalidArgument("lattice character entries must be +1 or -1".into()));
    }
    Ok(())
}

/// One factor of the fixed sublattice: the coordinates on a cycle are
/// `(τ/2)·v` with τ of fixed parity.
#[derive(Clone, Debug)]
struct CycleFactor {
    indices: Vec<usize>,
    v: Vec<i64>,
    // None: only the zero vector on this cycle
    tau_parity: Option<i64>,
    // v·b restricted to the cycle
    vb: Rat,
}

fn cycle_factors(g: &BieberbachGroup, delta: &[i8], coset: usize) -> Option<Vec<CycleFactor>> {
    let rep = &g.cosets()[coset];
    let mut out = Vec::new();
    for c in rep.matrix.cycles() {
        let shifted: Vec<bool> = c.indices.iter().map(|&i| delta[i] < 0).collect();
        let all = shifted.iter().all(|&s| s);
        let none = shifted.iter().all(|&s| !s);
        if !all && !none {
            return None;
        }
        if !c.is_positive() {
            if all {
                return None;
            }
            out.push(CycleFactor { indices: c.indices.clone(), v: vec![0; c.len()], tau_parity: None, vb: Rat::zero() });
            continue;
        }
        let v = c.fixed_vector(&rep.matrix);
        let mut vb = Rat::zero();
        for (idx, &i) in c.indices.iter().enumerate() {
            vb += rep.translation[i] * Rat::from_integer(v[idx]);
        }
        out.push(CycleFactor { indices: c.indices.clone(), v, tau_parity: Some(if all { 1 } else { 0 }), vb });
    }
    Some(out)
}

type Series = Vec<(u64, ExpSum)>;

fn factor_series(f: &CycleFactor, max_key: u64) -> Series {
    let mut s = vec![(0u64, ExpSum::zero()); max_key as usize + 1];
    match f.tau_parity {
        None => s[0] = (1, ExpSum::from_int(1)),
        Some(par) => {
            let k = f.indices.len() as u64;
            let mut tau = par;
            while k * (tau * tau) as u64 <= max_key {
                let key = (k * (tau * tau) as u64) as usize;
                for t in if tau == 0 { vec![0] } else { vec![tau, -tau] } {
                    let ph = ExpSum::phase(Rat::new(t, 2) * f.vb);
                    let e = &mut s[key];
                    e.0 += 1;
                    e.1 = e.1.add(&ph);
                }
                tau += 2;
            }
        }
    }
    s
}

fn convolve(a: &Series, b: &Series, max_key: u64) -> Series {
    let mut out = vec![(0u64, ExpSum::zero()); max_key as usize + 1];
    for (i, (ca, sa)) in a.iter().enumerate() {
        if *ca == 0 {
            continue;
        }
        for (j, (cb, sb)) in b.iter().enumerate() {
            if i + j > max_key as usize {
                break;
            }
            if *cb == 0 {
                continue;
            }
            let e = &mut out[i + j];
            e.0 += ca * cb;
            e.1 = e.1.add(&sa.mul(sb));
        }
    }
    out
}

/// Generating series of the B-fixed part of `Λ*_ε` for one coset, indexed by
/// key: `(count, Σ e^{-2πi u·b})`.
pub fn coset_series(g: &BieberbachGroup, delta: &[i8], coset: usize, max_key: u64) -> Result<Series> {
    check_delta(g, delta)?;
    if max_key > MAX_KEY_BUDGET {
        return Err(Error::Budget(format!("max key {} exceeds {}", max_key, MAX_KEY_BUDGET)));
    }
    let Some(factors) = cycle_factors(g, delta, coset) else {
        return Ok(vec![(0, ExpSum::zero()); max_key as usize + 1]);
    };
    let mut acc: Series = vec![(0, ExpSum::zero()); max_key as usize + 1];
    acc[0] = (1, ExpSum::from_int(1));
    for f in &factors {
        acc = convolve(&acc, &factor_series(f, max_key), max_key);
    }
    Ok(acc)
}

/// All vectors of the B-fixed part of `Λ*_ε` with `4‖u‖² = key`.
pub fn fixed_shell_vectors(g: &BieberbachGroup, delta: &[i8], coset: usize, key: u64) -> Result<Vec<Vec<Rat>>> {
    check_delta(g, delta)?;
    let n = g.dim();
    let Some(factors) = cycle_factors(g, delta, coset) else {
        return Ok(vec![]);
    };
    let mut out = Vec::new();
    let mut cur = vec![Rat::zero(); n];
    fn rec(fs: &[CycleFactor], rem: u64, cur: &mut Vec<Rat>, out: &mut Vec<Vec<Rat>>) {
        let Some((f, rest)) = fs.split_first() else {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        };
        let Some(par) = f.tau_parity else {
            rec(rest, rem, cur, out);
            return;
        };
        let k = f.indices.len() as u64;
        let mut tau = par;
        while k * (tau * tau) as u64 <= rem {
            for t in if tau == 0 { vec![0] } else { vec![-tau, tau] } {
                for (idx, &i) in f.indices.iter().enumerate() {
                    cur[i] = Rat::new(t * f.v[idx], 2);
                }
                rec(rest, rem - k * (t * t) as u64, cur, out);
            }
            tau += 2;
        }
        for &i in &f.indices {
            cur[i] = Rat::zero();
        }
    }
    rec(&factors, key, &mut cur, &mut out);
    out.sort();
    Ok(out)
}

/// `(|(Λ*_{ε,μ})^B|, Σ_u sign(u) e^{-2πi u·b})` for the coset `coset`.
pub fn count_shifted_shell(
    g: &BieberbachGroup,
    delta: &[i8],
    coset: usize,
    key: u64,
    sign_fn: Option<&dyn Fn(&[Rat]) -> i32>,
) -> Result<(u64, ExpSum)> {
    match sign_fn {
        None => {
            let s = coset_series(g, delta, coset, key)?;
            Ok(s[key as usize])
        }
        Some(f) => {
            let b = &g.cosets()[coset].translation;
            let vs = fixed_shell_vectors(g, delta, coset, key)?;
            let mut sum = ExpSum::zero();
            for u in &vs {
                let ub: Rat = u.iter().zip(b).map(|(a, c)| *a * *c).sum();
                sum = sum.add(&ExpSum::phase(ub).scale(f(u) as i64));
            }
            Ok((vs.len() as u64, sum))
        }
    }
}

/// All nonempty shells with key ≤ `max_key`, with sums for every coset.
pub fn theta_table(g: &BieberbachGroup, delta: &[i8], max_key: u64) -> Result<Vec<ShellCount>> {
    check_delta(g, delta)?;
    if max_key > MAX_KEY_BUDGET {
        return Err(Error::Budget(format!("max key {} exceeds {}", max_key, MAX_KEY_BUDGET)));
    }
    let series: Vec<Series> =
        (0..g.order()).into_par_iter().map(|c| coset_series(g, delta, c, max_key)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for key in 0..=max_key as usize {
        let count = series[0][key].0;
        if count == 0 {
            continue;
        }
        out.push(ShellCount { key: key as u64, count, sums: series.iter().map(|s| s[key].1).collect() });
    }
    Ok(out)
}

/// Representation numbers of `Σ x_i²` by a direct loop (small n only).
pub fn brute_representations(n: usize, max_norm: i64) -> Vec<u64> {
    let r = (max_norm as f64).sqrt() as i64;
    let mut out = vec![0u64; max_norm as usize + 1];
    let mut x = vec![-r; n];
    loop {
        let s: i64 = x.iter().map(|a| a * a).sum();
        if s <= max_norm {
            out[s as usize] += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            x[i] += 1;
            if x[i] > r {
                x[i] = -r;
                i += 1;
            } else {
                break;
            }
        }
    }
}

impl ShellCount {
    pub fn is_zero_sum(&self, coset: usize) -> bool {
        self.sums[coset].value().norm() < 1e-9
    }
}
