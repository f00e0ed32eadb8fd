//! Multiplicities of the eigenvalues `±2πμ` of the twisted Dirac operator.

use crate::clifford::{spin_character, spin_character_exact, CharacterKind, CliffordElement, SignedPermMatrix, TorusAngles};
use crate::error::{Error, Result};
use crate::group::BieberbachGroup;
use crate::oracle::{build_spin_rep, sigma_sign, sigma_sign_exact, SpinRep, MAX_ORACLE_DIM};
use crate::quadratic::Rat;
use crate::shells::{fixed_shell_vectors, theta_table, ExpSum, ShellCount};
use crate::spin::SpinStructure;
use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_KEY: u64 = 100;

/// Character of a representation of the holonomy group, one value per coset.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyCharacter {
    pub d_rho: u32,
    pub values: Vec<Complex64>,
}

#[derive(Deserialize)]
struct CharacterFile {
    #[serde(default)]
    dim: Option<u32>,
    #[serde(default)]
    values: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    generator_signs: Option<Vec<i8>>,
}

impl HolonomyCharacter {
    pub fn trivial(g: &BieberbachGroup) -> Self {
        HolonomyCharacter { d_rho: 1, values: vec![Complex64::new(1.0, 0.0); g.order()] }
    }

    pub fn new(g: &BieberbachGroup, d_rho: u32, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != g.order() {
            return Err(Error::InvalidCharacter(format!("{} values for {} cosets", values.len(), g.order())));
        }
        if (values[0] - Complex64::new(d_rho as f64, 0.0)).norm() > 1e-9 {
            return Err(Error::InvalidCharacter("value at the identity must equal the dimension".into()));
        }
        Ok(HolonomyCharacter { d_rho, values })
    }

    /// One-dimensional character from its values on the generators.
    pub fn from_generator_values(g: &BieberbachGroup, gens: &[Complex64]) -> Result<Self> {
        if gens.len() != g.num_generators() {
            return Err(Error::InvalidCharacter(format!("{} generator values for {} generators", gens.len(), g.num_generators())));
        }
        let mut values = vec![Complex64::new(1.0, 0.0); g.order()];
        for a in 1..g.order() {
            let (p, gi, _) = g.tree_edge(a).expect("tree edge");
            values[a] = values[p] * gens[gi];
        }
        for a in 0..g.order() {
            for (gi, v) in gens.iter().enumerate() {
                let (c, _) = g.mul_generator(a, gi);
                if (values[a] * v - values[c]).norm() > 1e-9 {
                    return Err(Error::InvalidCharacter("generator values do not define a homomorphism".into()));
                }
            }
        }
        Ok(HolonomyCharacter { d_rho: 1, values })
    }

    /// First nontrivial ±1-valued character, scanning generator sign patterns.
    pub fn nontrivial_linear(g: &BieberbachGroup) -> Option<Self> {
        let k = g.num_generators();
        for bits in 1u64..(1u64 << k.min(20)) {
            let gens: Vec<Complex64> =
                (0..k).map(|i| Complex64::new(if bits >> i & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect();
            if let Ok(ch) = Self::from_generator_values(g, &gens) {
                if ch.values.iter().any(|v| v.re < 0.0) {
                    return Some(ch);
                }
            }
        }
        None
    }

    pub fn from_json(g: &BieberbachGroup, s: &str) -> Result<Self> {
        let f: CharacterFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(signs) = f.generator_signs {
            let v: Vec<Complex64> = signs.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
            return Self::from_generator_values(g, &v);
        }
        let values = f.values.ok_or_else(|| Error::Parse("character needs values or generator_signs".into()))?;
        let values: Vec<Complex64> = values.iter().map(|[a, b]| Complex64::new(*a, *b)).collect();
        let d = f.dim.unwrap_or(values.first().map(|v| v.re.round() as u32).unwrap_or(1));
        Self::new(g, d, values)
    }

    pub fn value(&self, coset: usize) -> Complex64 {
        self.values[coset]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub four_mu_sq: u64,
    pub d_plus: u64,
    pub d_minus: u64,
}

/// Data describing the asymmetric part of a Z_2^k spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetryData {
    pub coset: usize,
    pub f: Vec<i64>,
    pub sigma: i8,
    pub r: u32,
    /// `d⁺ - d⁻` at `μ_0`; alternates in sign along `μ_j = (j+½)/‖f‖`.
    pub amplitude: f64,
}

impl AsymmetryData {
    pub fn f_norm(&self) -> f64 {
        (self.f.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt()
    }

    /// `(μ_j, d⁺ - d⁻)`.
    pub fn progression(&self, j: u64) -> (f64, f64) {
        let mu = (j as f64 + 0.5) / self.f_norm();
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        (mu, self.amplitude * s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub n: usize,
    pub entries: Vec<SpectrumEntry>,
    pub d0: u64,
    pub d0_pm: Option<(u64, u64)>,
    pub asymmetric: bool,
    pub asymmetry: Option<AsymmetryData>,
    pub max_key: u64,
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    entries: &'a [SpectrumEntry],
    d0: u64,
    asymmetric: bool,
}

impl SpectrumTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SpectrumJson { entries: &self.entries, d0: self.d0, asymmetric: self.asymmetric })
            .expect("spectrum serialization")
    }

    pub fn get(&self, key: u64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.four_mu_sq == key)
    }

    fn finish(mut self) -> Self {
        self.asymmetric = self.entries.iter().any(|e| e.d_plus != e.d_minus);
        self
    }
}

/// Source of the signs `σ(u, x_γ)`.
pub trait SigmaProvider: Sync {
    fn sigma(&self, u: &[Rat], x: &TorusAngles, lift: &CliffordElement) -> Result<i8>;
}

/// Clifford-algebra evaluation of `σ` (any n).
pub struct ExactSigma;

impl SigmaProvider for ExactSigma {
    fn sigma(&self, u: &[Rat], x: &TorusAngles, lift: &CliffordElement) -> Result<i8> {
        sigma_sign_exact(u, x, lift)
    }
}

/// Matrix-model evaluation of `σ` (n ≤ 8).
pub struct OracleSigma {
    rep: SpinRep,
}

impl OracleSigma {
    pub fn new(n: usize) -> Result<Self> {
        Ok(OracleSigma { rep: build_spin_rep(n)? })
    }
}

impl SigmaProvider for OracleSigma {
    fn sigma(&self, u: &[Rat], x: &TorusAngles, lift: &CliffordElement) -> Result<i8> {
        let uf: Vec<f64> = u.iter().map(|&r| crate::shells::rat_f64(r)).collect();
        sigma_sign(&self.rep, &uf, x, lift)
    }
}

pub fn default_sigma(n: usize) -> Box<dyn SigmaProvider> {
    if n <= MAX_ORACLE_DIM && n % 2 == 1 {
        if let Ok(o) = OracleSigma::new(n) {
            return Box::new(o);
        }
    }
    Box::new(ExactSigma)
}

/// A maximal-torus element of Spin(n-1) conjugate in Spin(n) to `lift`,
/// where `μ(lift) = b` fixes some nonzero vector.
pub fn torus_element(lift: &CliffordElement, b: &SignedPermMatrix) -> Result<TorusAngles> {
    let n = b.dim();
    if b.fixed_dim() == 0 {
        return Err(Error::UnsupportedHolonomy(format!("{} fixes no vector", b)));
    }
    let slots = (n - 1) / 2;
    let rot = b.rotation_angles()?;
    if rot.len() > slots {
        return Err(Error::Internal("too many rotation angles".into()));
    }
    let mut angles: Vec<f64> = rot.iter().map(|r| crate::shells::rat_f64(*r) * std::f64::consts::FRAC_PI_2).collect();
    angles.resize(slots, 0.0);
    let pc: f64 = angles.iter().map(|t| t.cos()).product();
    let a = lift.scalar_part().to_f64();
    let sign = if pc.abs() > 1e-9 {
        if (a.abs() - pc.abs()).abs() > 1e-9 {
            return Err(Error::Internal(format!("scalar part {} inconsistent with angles ({})", a, pc)));
        }
        if a * pc > 0.0 {
            1
        } else {
            -1
        }
    } else {
        1
    };
    Ok(TorusAngles { n: n - 1, angles, sign })
}

fn to_multiplicity(z: Complex64, what: &str) -> Result<u64> {
    let r = z.re.round();
    if (z.re - r).abs() > 1e-9 || z.im.abs() > 1e-9 || r < 0.0 {
        return Err(Error::NonIntegral(format!("{} = {}", what, z)));
    }
    Ok(r as u64)
}

fn exact_multiplicity(num: BigInt, den: BigInt, what: &str) -> Result<u64> {
    let q = BigRational::new(num, den);
    if !q.is_integer() || q.is_negative() {
        return Err(Error::NonIntegral(format!("{} = {}", what, q)));
    }
    q.to_integer().to_u64().ok_or_else(|| Error::NonIntegral(format!("{} overflows", what)))
}

fn m_of(n: usize) -> u32 {
    (n / 2) as u32
}

/// Flat torus: `d^± = 2^{m-1} d_ρ |Λ*_{ε,μ}|`.
pub fn torus_spectrum(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter, max_key: u64) -> Result<SpectrumTable> {
    if g.order() != 1 {
        return Err(Error::UnsupportedHolonomy("torus formula needs trivial holonomy".into()));
    }
    let m = m_of(g.dim());
    let table = theta_table(g, &eps.delta, max_key)?;
    let mut entries = Vec::new();
    for s in table.iter().filter(|s| s.key > 0) {
        let d = exact_multiplicity(BigInt::from(s.count) * BigInt::from(rho.d_rho) << m, BigInt::from(2), "torus d")?;
        entries.push(SpectrumEntry { four_mu_sq: s.key, d_plus: d, d_minus: d });
    }
    let d0 = if eps.is_trivial_type() { (1u64 << m) * rho.d_rho as u64 } else { 0 };
    let d0_pm = if g.dim() % 2 == 0 { Some((d0 / 2, d0 / 2)) } else { None };
    Ok(SpectrumTable { n: g.dim(), entries, d0, d0_pm, asymmetric: false, asymmetry: None, max_key }.finish())
}

/// Detects the single coset that can make a Z_2^k spectrum asymmetric.
pub fn z2k_asymmetry(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    sigma: &dyn SigmaProvider,
) -> Result<Option<AsymmetryData>> {
    let n = g.dim();
    let k = g.z2_rank().ok_or(Error::NotZ2k)?;
    if n % 4 != 3 {
        return Ok(None);
    }
    let m = m_of(n);
    let r = ((n - 3) / 4) as u32;
    for ci in g.f1() {
        let chi = rho.value(ci);
        if chi.norm() < 1e-12 {
            continue;
        }
        let b = &g.cosets()[ci];
        if !b.matrix.is_diagonal() {
            return Err(Error::Internal(format!("F_1 element {} is not diagonal", b.matrix)));
        }
        let i0 = (0..n).find(|&i| b.matrix.signs[i] > 0).expect("fixed coordinate");
        let ok = (0..n).all(|i| (eps.delta[i] < 0) == (i == i0));
        if !ok {
            continue;
        }
        let mut f = vec![0i64; n];
        f[i0] = 1;
        let c = Rat::from_integer(2) * b.translation[i0];
        let u: Vec<Rat> = f.iter().map(|&x| c * Rat::from_integer(x)).collect();
        let x = TorusAngles::g_h(n - 1, (n - 1) / 2);
        let s = sigma.sigma(&u, &x, eps.lift(ci))?;
        if chi.im.abs() > 1e-9 {
            return Err(Error::InvalidCharacter("character of an involution must be real".into()));
        }
        let sign_r = if r % 2 == 0 { 1.0 } else { -1.0 };
        let amplitude = sign_r * s as f64 * chi.re * 2f64.powi(m as i32 - k as i32 + 1);
        return Ok(Some(AsymmetryData { coset: ci, f, sigma: s, r, amplitude }));
    }
    Ok(None)
}

/// Z_2^k holonomy: symmetric part `2^{m-k-1} d_ρ |Λ*_{ε,μ}|` plus the
/// alternating correction on `μ_j = (j+½)/‖f‖` when asymmetric.
pub fn z2k_spectrum_with(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    max_key: u64,
    sigma: &dyn SigmaProvider,
) -> Result<SpectrumTable> {
    let k = g.z2_rank().ok_or(Error::NotZ2k)?;
    let m = m_of(g.dim());
    let asym = z2k_asymmetry(g, eps, rho, sigma)?;
    let table = theta_table(g, &eps.delta, max_key)?;
    let den = BigInt::one() << (k + 1);
    let mut entries = Vec::new();
    for s in table.iter().filter(|s| s.key > 0) {
        let sym = BigRational::new(BigInt::from(s.count) * BigInt::from(rho.d_rho) << m, den.clone());
        let mut corr = 0.0;
        if let Some(a) = &asym {
            let odd = (s.key as f64).sqrt().round() as u64;
            if odd * odd == s.key && odd % 2 == 1 {
                corr = a.progression((odd - 1) / 2).1 / 2.0;
            }
        }
        let sym_f = sym.to_f64().unwrap_or(f64::NAN);
        let p = to_multiplicity(Complex64::new(sym_f + corr, 0.0), "z2k d+")?;
        let mi = to_multiplicity(Complex64::new(sym_f - corr, 0.0), "z2k d-")?;
        if corr == 0.0 {
            exact_multiplicity(sym.numer().clone(), sym.denom().clone(), "z2k d")?;
        }
        entries.push(SpectrumEntry { four_mu_sq: s.key, d_plus: p, d_minus: mi });
    }
    let d0 = harmonic_spinors(g, eps, rho)?;
    let d0_pm = harmonic_split(g, eps, rho)?;
    Ok(SpectrumTable { n: g.dim(), entries, d0, d0_pm, asymmetric: false, asymmetry: asym, max_key }.finish())
}

pub fn z2k_spectrum(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter, max_key: u64) -> Result<SpectrumTable> {
    let s = default_sigma(g.dim());
    z2k_spectrum_with(g, eps, rho, max_key, s.as_ref())
}

struct CosetData {
    x: Option<TorusAngles>,
    in_f1: bool,
}

fn coset_data(g: &BieberbachGroup, eps: &SpinStructure) -> Result<Vec<CosetData>> {
    g.cosets()
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let x = if g.dim() >= 2 { Some(torus_element(eps.lift(ci), &c.matrix)?) } else { None };
            Ok(CosetData { x, in_f1: c.matrix.fixed_dim() == 1 })
        })
        .collect()
}

fn general_at_shell(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    shell: &ShellCount,
    data: &[CosetData],
    sigma: &dyn SigmaProvider,
) -> Result<(u64, u64)> {
    let n = g.dim();
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for (ci, d) in data.iter().enumerate() {
        let chi = rho.value(ci);
        if chi.norm() == 0.0 {
            continue;
        }
        let x = d.x.as_ref().ok_or(Error::UnsupportedDimension(n))?;
        if n % 2 == 0 {
            let e = shell.sums[ci].value();
            let ch = spin_character(x, CharacterKind::Full)?;
            plus += chi * e * ch;
            minus += chi * e * ch;
        } else if !d.in_f1 {
            let e = shell.sums[ci].value();
            plus += chi * e * spin_character(x, CharacterKind::Plus)?;
            minus += chi * e * spin_character(x, CharacterKind::Minus)?;
        } else {
            let cp = spin_character(x, CharacterKind::Plus)?;
            let cm = spin_character(x, CharacterKind::Minus)?;
            let b = &g.cosets()[ci].translation;
            for u in fixed_shell_vectors(g, &eps.delta, ci, shell.key)? {
                let ub: Rat = u.iter().zip(b).map(|(a, c)| *a * *c).sum();
                let ph = ExpSum::phase(ub).value();
                let s = sigma.sigma(&u, x, eps.lift(ci))?;
                let (p, m) = if s > 0 { (cp, cm) } else { (cm, cp) };
                plus += chi * ph * p;
                minus += chi * ph * m;
            }
        }
    }
    let f = g.order() as f64;
    Ok((to_multiplicity(plus / f, "d+")?, to_multiplicity(minus / f, "d-")?))
}

/// `(d⁺, d⁻)` at one shell from the general character formula.
pub fn general_multiplicity(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    key: u64,
    sigma: &dyn SigmaProvider,
) -> Result<(u64, u64)> {
    if key == 0 {
        return Err(Error::InvalidArgument("μ must be positive".into()));
    }
    let data = coset_data(g, eps)?;
    let table = theta_table(g, &eps.delta, key)?;
    match table.iter().find(|s| s.key == key) {
        None => Ok((0, 0)),
        Some(s) => general_at_shell(g, eps, rho, s, &data, sigma),
    }
}

pub fn general_spectrum(
    g: &BieberbachGroup,
    eps: &SpinStructure,
    rho: &HolonomyCharacter,
    max_key: u64,
    sigma: &dyn SigmaProvider,
) -> Result<SpectrumTable> {
    let data = coset_data(g, eps)?;
    let table = theta_table(g, &eps.delta, max_key)?;
    let shells: Vec<&ShellCount> = table.iter().filter(|s| s.key > 0).collect();
    let entries = shells
        .par_iter()
        .map(|s| {
            let (p, m) = general_at_shell(g, eps, rho, s, &data, sigma)?;
            Ok(SpectrumEntry { four_mu_sq: s.key, d_plus: p, d_minus: m })
        })
        .collect::<Result<Vec<_>>>()?;
    let d0 = harmonic_spinors(g, eps, rho)?;
    let d0_pm = harmonic_split(g, eps, rho)?;
    Ok(SpectrumTable { n: g.dim(), entries, d0, d0_pm, asymmetric: false, asymmetry: None, max_key }.finish())
}

/// `d_0 = (1/|F|) Σ χ_ρ(γ) χ_{L_n}(ε(γ))` for trivial type, else 0.
pub fn harmonic_spinors(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter) -> Result<u64> {
    if !eps.is_trivial_type() {
        return Ok(0);
    }
    let mut s = Complex64::new(0.0, 0.0);
    for ci in 0..g.order() {
        s += rho.value(ci) * spin_character_exact(eps.lift(ci), CharacterKind::Full)?;
    }
    to_multiplicity(s / g.order() as f64, "d0")
}

fn harmonic_split(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter) -> Result<Option<(u64, u64)>> {
    if g.dim() % 2 != 0 {
        return Ok(None);
    }
    if !eps.is_trivial_type() {
        return Ok(Some((0, 0)));
    }
    let mut p = Complex64::new(0.0, 0.0);
    let mut m = Complex64::new(0.0, 0.0);
    for ci in 0..g.order() {
        p += rho.value(ci) * spin_character_exact(eps.lift(ci), CharacterKind::Plus)?;
        m += rho.value(ci) * spin_character_exact(eps.lift(ci), CharacterKind::Minus)?;
    }
    let f = g.order() as f64;
    Ok(Some((to_multiplicity(p / f, "d0+")?, to_multiplicity(m / f, "d0-")?)))
}

/// Spinor Laplacian multiplicities `d⁺ + d⁻` per shell.
pub fn spinor_laplacian_spectrum(t: &SpectrumTable) -> Vec<(u64, u64)> {
    t.entries.iter().map(|e| (e.four_mu_sq, e.d_plus + e.d_minus)).collect()
}

/// Chooses the torus, Z_2^k or general path.
pub fn dirac_spectrum(g: &BieberbachGroup, eps: &SpinStructure, rho: &HolonomyCharacter, max_key: u64) -> Result<SpectrumTable> {
    if g.order() == 1 {
        return torus_spectrum(g, eps, rho, max_key);
    }
    let sigma = default_sigma(g.dim());
    if g.z2_rank().is_some() {
        return z2k_spectrum_with(g, eps, rho, max_key, sigma.as_ref());
    }
    general_spectrum(g, eps, rho, max_key, sigma.as_ref())
}
