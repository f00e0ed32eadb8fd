//! Explicit spin representation matrices and brute-force trace evaluation,
//! used as ground truth for the closed formulas.

use crate::clifford::{mu_project, spin_character, CharacterKind, CliffordElement, TorusAngles};
use crate::dirac::HolonomyCharacter;
use crate::error::{Error, Result};
use crate::group::BieberbachGroup;
use crate::quadratic::{QSqrt2, Rat};
use crate::shells::{fixed_shell_vectors, rat_f64};
use crate::spin::SpinStructure;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

pub const MAX_ORACLE_DIM: usize = 8;

type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn pauli() -> (CMat, CMat, CMat, CMat) {
    let i2 = CMat::identity(2, 2);
    let x = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let y = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
    let z = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    (i2, x, y, z)
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => c(1., 0.),
        1 => c(0., 1.),
        2 => c(-1., 0.),
        _ => c(0., -1.),
    }
}

/// Matrices `L(e_1), …, L(e_n)` of the complex spin representation.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub n: usize,
    pub m: usize,
    pub gens: Vec<CMat>,
    /// Chirality operator for even n; `S^±` are its ±1 eigenspaces.
    pub chirality: Option<CMat>,
}

fn even_gens(m: usize) -> Vec<CMat> {
    let (i2, x, y, z) = pauli();
    let mut out = Vec::with_capacity(2 * m);
    for j in 0..m {
        for p in [&x, &y] {
            let mut mat = CMat::identity(1, 1);
            for l in 0..m {
                let f = if l < j {
                    &z
                } else if l == j {
                    p
                } else {
                    &i2
                };
                mat = kron(&mat, f);
            }
            out.push(mat * c(0., 1.));
        }
    }
    out
}

fn product(mats: &[CMat], dim: usize) -> CMat {
    mats.iter().fold(CMat::identity(dim, dim), |acc, m| acc * m)
}

/// Builds the representation and checks the Clifford relations.
pub fn build_spin_rep(n: usize) -> Result<SpinRep> {
    if n == 0 || n > MAX_ORACLE_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    let m = n / 2;
    let dim = 1usize << m;
    let mut gens = even_gens(m);
    let omega_even = product(&gens, dim);
    let gamma = omega_even * i_pow(-(m as i64));
    let chirality = if n % 2 == 0 {
        Some(gamma)
    } else {
        gens.push(gamma * c(0., -1.));
        None
    };
    let rep = SpinRep { n, m, gens, chirality };
    rep.check_relations()?;
    Ok(rep)
}

impl SpinRep {
    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn check_relations(&self) -> Result<()> {
        let d = self.dim();
        let id = CMat::identity(d, d);
        for i in 0..self.n {
            let skew = &self.gens[i] + self.gens[i].adjoint();
            if skew.norm() > 1e-12 {
                return Err(Error::Internal(format!("L(e_{}) not skew-Hermitian", i + 1)));
            }
            for j in 0..self.n {
                let ac = &self.gens[i] * &self.gens[j] + &self.gens[j] * &self.gens[i];
                let expect = if i == j { &id * c(-2., 0.) } else { CMat::zeros(d, d) };
                if (ac - expect).norm() > 1e-12 {
                    return Err(Error::Internal(format!("anticommutation fails at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        if let Some(g) = &self.chirality {
            if (g * g - &id).norm() > 1e-12 {
                return Err(Error::Internal("chirality does not square to one".into()));
            }
        }
        Ok(())
    }

    pub fn monomial(&self, mask: u32) -> CMat {
        let d = self.dim();
        let mut out = CMat::identity(d, d);
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                out *= &self.gens[i];
            }
        }
        out
    }

    pub fn of_element(&self, g: &CliffordElement) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (&mask, coef) in g.terms() {
            out += self.monomial(mask) * c(coef.to_f64(), 0.);
        }
        out
    }

    pub fn of_vector(&self, u: &[f64]) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (i, &x) in u.iter().enumerate() {
            out += &self.gens[i] * c(x, 0.);
        }
        out
    }

    /// `L(x(t))` for a torus element, built from cos/sin directly.
    pub fn of_torus(&self, x: &TorusAngles) -> CMat {
        let d = self.dim();
        let mut out = CMat::identity(d, d);
        for (j, &t) in x.angles.iter().enumerate() {
            let f = CMat::identity(d, d) * c(t.cos(), 0.) + &self.gens[2 * j] * &self.gens[2 * j + 1] * c(t.sin(), 0.);
            out *= f;
        }
        out * c(x.sign as f64, 0.)
    }

    /// `tr L(g)|_{S_u^±}` with `S_u^+` the `-i‖u‖` eigenspace of `L(u)`.
    pub fn trace_on_su(&self, lg: &CMat, u: &[f64], plus: bool) -> Complex64 {
        let d = self.dim();
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = if plus { 1.0 } else { -1.0 };
        let p = (CMat::identity(d, d) + self.of_vector(u) * c(0., s / nu)) * c(0.5, 0.);
        (lg * p).trace()
    }

    /// Half-spin traces for even n.
    pub fn half_trace(&self, lg: &CMat, plus: bool) -> Result<Complex64> {
        let g = self.chirality.as_ref().ok_or_else(|| Error::InvalidArgument("half-spin traces need even n".into()))?;
        let d = self.dim();
        let s = if plus { 1.0 } else { -1.0 };
        let p = (CMat::identity(d, d) + g * c(s, 0.)) * c(0.5, 0.);
        Ok((lg * p).trace())
    }
}

fn rat_vec_f64(u: &[Rat]) -> Vec<f64> {
    u.iter().map(|&r| rat_f64(r)).collect()
}

fn round_multiplicity(z: Complex64, what: &str) -> Result<u64> {
    let r = z.re.round();
    if (z.re - r).abs() > 1e-6 || z.im.abs() > 1e-6 || r < 0.0 {
        return Err(Error::NonIntegral(format!("{}: {}", what, z)));
    }
    Ok(r as u64)
}

/// `(d⁺, d⁻)` at `key = 4μ² > 0` by averaging explicit traces over the cosets.
pub fn brute_multiplicity(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    key: u64,
) -> Result<(u64, u64)> {
    if key == 0 {
        return Err(Error::InvalidArgument("use brute_harmonic for μ = 0".into()));
    }
    let rep = build_spin_rep(g.dim())?;
    brute_multiplicity_with(&rep, g, eps, rho, key)
}

pub fn brute_multiplicity_with(
    rep: &SpinRep,
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    key: u64,
) -> Result<(u64, u64)> {
    let mut plus = c(0., 0.);
    let mut minus = c(0., 0.);
    for (ci, coset) in g.cosets().iter().enumerate() {
        let chi = rho.value(ci);
        if chi.norm() == 0.0 {
            continue;
        }
        let vs = fixed_shell_vectors(g, &eps.delta, ci, key)?;
        if vs.is_empty() {
            continue;
        }
        let lg = rep.of_element(eps.lift(ci));
        for u in &vs {
            let ub: f64 = u.iter().zip(&coset.translation).map(|(a, b)| rat_f64(*a * *b)).sum();
            let ph = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ub);
            let uf = rat_vec_f64(u);
            plus += chi * ph * rep.trace_on_su(&lg, &uf, true);
            minus += chi * ph * rep.trace_on_su(&lg, &uf, false);
        }
    }
    let f = g.order() as f64;
    Ok((round_multiplicity(plus / f, "d+")?, round_multiplicity(minus / f, "d-")?))
}

/// Harmonic spinors by direct trace averaging.
pub fn brute_harmonic(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter) -> Result<u64> {
    if !eps.is_trivial_type() {
        return Ok(0);
    }
    let rep = build_spin_rep(g.dim())?;
    let mut s = c(0., 0.);
    for ci in 0..g.order() {
        s += rho.value(ci) * rep.of_element(eps.lift(ci)).trace();
    }
    round_multiplicity(s / g.order() as f64, "d0")
}

/// Brute-force spectrum up to `max_key` (nonempty shells only).
pub fn brute_spectrum(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    max_key: u64,
) -> Result<Vec<(u64, u64, u64)>> {
    let rep = build_spin_rep(g.dim())?;
    let table = crate::shells::theta_table(g, &eps.delta, max_key)?;
    let mut out = Vec::new();
    for s in table.iter().filter(|s| s.key > 0) {
        let (p, m) = brute_multiplicity_with(&rep, g, eps, rho, s.key)?;
        out.push((s.key, p, m));
    }
    Ok(out)
}

/// `σ(u, x_γ)` by comparing `tr L(lift)|_{S_u^+}` with the half-spin
/// characters of `x_γ` in Spin(n-1).
pub fn sigma_sign(rep: &SpinRep, u: &[f64], x: &TorusAngles, lift: &CliffordElement) -> Result<i8> {
    let n = rep.n;
    if n % 2 == 0 {
        return Err(Error::InvalidArgument("σ is defined for odd n".into()));
    }
    if lift.dim() != n || u.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.len() });
    }
    let mu = mu_project(lift)?;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += mu.entries[i][j].to_f64() * u[j];
        }
        if (s - u[i]).abs() > 1e-9 {
            return Err(Error::InvalidArgument("u is not fixed by the lift".into()));
        }
    }
    let xs = TorusAngles { n: n - 1, angles: x.angles.clone(), sign: x.sign };
    let cp = spin_character(&xs, CharacterKind::Plus)?;
    let cm = spin_character(&xs, CharacterKind::Minus)?;
    if (cp - cm).norm() < 1e-9 {
        return Ok(1);
    }
    let t = rep.trace_on_su(&rep.of_element(lift), u, true);
    if (t - cp).norm() < 1e-9 {
        Ok(1)
    } else if (t - cm).norm() < 1e-9 {
        Ok(-1)
    } else {
        Err(Error::Degenerate(format!("trace {} matches neither {} nor {}", t, cp, cm)))
    }
}

/// Exact counterpart of `sigma_sign`: for odd n the restricted trace is
/// `2^{m-1}(a ± i^m top(g·u)/‖u‖)`, to be compared with `±i^m ∏ sin t_j`.
pub fn sigma_sign_exact(u: &[Rat], x: &TorusAngles, lift: &CliffordElement) -> Result<i8> {
    let n = lift.dim();
    if n % 2 == 0 {
        return Err(Error::InvalidArgument("σ is defined for odd n".into()));
    }
    let p: f64 = x.sign as f64 * x.angles.iter().map(|t| t.sin()).product::<f64>();
    if p.abs() < 1e-12 {
        return Ok(1);
    }
    let uc = CliffordElement::vector(&u.iter().map(|&r| QSqrt2::from_rat(r)).collect::<Vec<_>>());
    let top = lift.mul(&uc).top_coefficient().to_f64();
    let nu = u.iter().map(|&r| rat_f64(r * r)).sum::<f64>().sqrt();
    let t = top / nu;
    if (t.abs() - p.abs()).abs() > 1e-9 {
        return Err(Error::Degenerate(format!("|top| {} differs from |∏ sin| {}", t, p)));
    }
    Ok(if t * p > 0.0 { 1 } else { -1 })
}

/// Caches `SpinRep`s by dimension.
#[derive(Default)]
pub struct RepCache {
    reps: HashMap<usize, SpinRep>,
}

impl RepCache {
    pub fn get(&mut self, n: usize) -> Result<&SpinRep> {
        if !self.reps.contains_key(&n) {
            self.reps.insert(n, build_spin_rep(n)?);
        }
        Ok(&self.reps[&n])
    }
}

/// One disagreement between a closed formula and the brute-force traces.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Mismatch {
    pub path: &'static str,
    pub four_mu_sq: u64,
    pub formula: (u64, u64),
    pub brute: (u64, u64),
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CrossCheck {
    pub delta: Vec<i8>,
    pub sigma: Vec<i8>,
    pub character: &'static str,
    pub shells: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares every formula path that applies to `g` against the oracle.
pub fn cross_check(
    rep: &SpinRep,
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    character: &'static str,
    max_key: u64,
) -> Result<CrossCheck> {
    use crate::dirac::{general_spectrum, torus_spectrum, z2k_spectrum_with, ExactSigma, OracleSigma, SigmaProvider};
    let table = crate::shells::theta_table(g, &eps.delta, max_key)?;
    let brute: Vec<(u64, (u64, u64))> = table
        .iter()
        .filter(|s| s.key > 0)
        .map(|s| Ok((s.key, brute_multiplicity_with(rep, g, eps, rho, s.key)?)))
        .collect::<Result<_>>()?;
    let mut h = c(0., 0.);
    if eps.is_trivial_type() {
        for ci in 0..g.order() {
            h += rho.value(ci) * rep.of_element(eps.lift(ci)).trace();
        }
    }
    let harmonic = round_multiplicity(h / g.order() as f64, "d0")?;
    let oracle_sigma;
    let sigma: &dyn SigmaProvider = if g.dim() % 2 == 1 {
        oracle_sigma = OracleSigma::new(g.dim())?;
        &oracle_sigma
    } else {
        &ExactSigma
    };
    let mut paths = vec![("general", general_spectrum(g, eps, rho, max_key, sigma)?)];
    if g.order() == 1 {
        paths.push(("torus", torus_spectrum(g, eps, rho, max_key)?));
    }
    if g.z2_rank().is_some() {
        paths.push(("z2k", z2k_spectrum_with(g, eps, rho, max_key, sigma)?));
    }
    let mut mismatches = Vec::new();
    for (path, t) in &paths {
        if t.d0 != harmonic {
            mismatches.push(Mismatch { path, four_mu_sq: 0, formula: (t.d0, 0), brute: (harmonic, 0) });
        }
        for (key, b) in &brute {
            let f = t.get(*key).map(|e| (e.d_plus, e.d_minus)).unwrap_or((0, 0));
            if f != *b {
                mismatches.push(Mismatch { path, four_mu_sq: *key, formula: f, brute: *b });
            }
        }
        for e in &t.entries {
            if !brute.iter().any(|(k, _)| *k == e.four_mu_sq) && (e.d_plus, e.d_minus) != (0, 0) {
                mismatches.push(Mismatch { path, four_mu_sq: e.four_mu_sq, formula: (e.d_plus, e.d_minus), brute: (0, 0) });
            }
        }
    }
    Ok(CrossCheck {
        delta: eps.delta.clone(),
        sigma: eps.sigma.clone(),
        character,
        shells: brute.len(),
        mismatches,
    })
}

/// Cross-checks all spin structures of `g` against the trivial character and,
/// when one exists, a nontrivial linear character.
pub fn cross_check_group(g: &BieberbachGroup, max_key: u64) -> Result<Vec<CrossCheck>> {
    use rayon::prelude::*;
    let rep = build_spin_rep(g.dim())?;
    let mut chars = vec![("trivial", HolonomyCharacter::trivial(g))];
    if let Some(ch) = HolonomyCharacter::nontrivial_linear(g) {
        chars.push(("nontrivial", ch));
    }
    let structures = crate::spin::enumerate_spin_structures(g)?;
    let jobs: Vec<(&SpinStructure, &(&'static str, HolonomyCharacter))> =
        structures.iter().flat_map(|e| chars.iter().map(move |c| (e, c))).collect();
    jobs.par_iter().map(|(e, (name, ch))| cross_check(&rep, g, e, ch, name, max_key)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn relations_hold() {
        for n in 1..=8 {
            let r = build_spin_rep(n).unwrap();
            assert_eq!(r.dim(), 1 << (n / 2));
        }
    }

    #[test]
    fn volume_element_n3() {
        let r = build_spin_rep(3).unwrap();
        let v = r.monomial(0b111);
        assert!((v - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn torus_characters_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=8 {
            let r = build_spin_rep(n).unwrap();
            for _ in 0..20 {
                let angles: Vec<f64> = (0..n / 2).map(|_| rng.random_range(-3.0..3.0)).collect();
                let x = TorusAngles::new(n, angles, 1).unwrap();
                let l = r.of_torus(&x);
                let full = spin_character(&x, CharacterKind::Full).unwrap();
                assert!((l.trace() - full).norm() < 1e-10);
                if n % 2 == 0 {
                    let p = spin_character(&x, CharacterKind::Plus).unwrap();
                    assert!((r.half_trace(&l, true).unwrap() - p).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn exact_clifford_matches_torus_matrix() {
        let r = build_spin_rep(4).unwrap();
        let x = TorusAngles::new(4, vec![std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2], -1).unwrap();
        let a = r.of_torus(&x);
        let b = r.of_element(&x.to_clifford().unwrap());
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn sigma_antisymmetric_and_scale_invariant() {
        let r = build_spin_rep(3).unwrap();
        let g = CliffordElement::product_of_basis(3, &[1, 2]);
        let x = TorusAngles::g_h(2, 1);
        let s1 = sigma_sign(&r, &[0., 0., 0.5], &x, &g).unwrap();
        let s2 = sigma_sign(&r, &[0., 0., -0.5], &x, &g).unwrap();
        let s3 = sigma_sign(&r, &[0., 0., 3.5], &x, &g).unwrap();
        assert_eq!(s1, -s2);
        assert_eq!(s1, s3);
        let e = sigma_sign_exact(&[Rat::zero(), Rat::zero(), Rat::new(1, 2)], &x, &g).unwrap();
        assert_eq!(e, s1);
    }

    use num_traits::Zero;
}
