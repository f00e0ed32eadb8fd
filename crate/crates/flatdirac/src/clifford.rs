//! Clifford algebra Cl(n) with e_i² = -1 over Q(√2), signed permutation
//! matrices, spin lifts and spin characters.

use crate::error::{Error, Result};
use crate::quadratic::{QSqrt2, Rat};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_DIM: usize = 16;

/// Orthogonal matrix permuting basis vectors up to sign: column `i` sends
/// `e_i` to `signs[i] * e_{perm[i]}` (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermMatrix {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

/// One cycle of the underlying permutation. `indices[j+1] = perm[indices[j]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub indices: Vec<usize>,
    pub sign_product: i8,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.sign_product > 0
    }

    /// Entries (±1) of the fixed vector supported on the cycle, aligned with
    /// `indices`; only meaningful for positive cycles.
    pub fn fixed_vector(&self, b: &SignedPermMatrix) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.indices.len());
        let mut cur = 1i64;
        for &i in &self.indices {
            v.push(cur);
            cur *= b.signs[i] as i64;
        }
        v
    }
}

impl SignedPermMatrix {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: signs.len() });
        }
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!("not a permutation: {:?}", perm)));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(SignedPermMatrix { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermMatrix { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn diag(signs: &[i8]) -> Self {
        SignedPermMatrix { perm: (0..signs.len()).collect(), signs: signs.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p == i) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p == i)
    }

    /// Product `self * other` (apply `other` first).
    pub fn mul(&self, other: &SignedPermMatrix) -> SignedPermMatrix {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] * self.signs[j];
        }
        SignedPermMatrix { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermMatrix {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermMatrix { perm, signs }
    }

    pub fn apply_rat(&self, x: &[Rat]) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); x.len()];
        for i in 0..x.len() {
            y[self.perm[i]] = x[i] * Rat::from_integer(self.signs[i] as i64);
        }
        y
    }

    pub fn apply_int(&self, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0; x.len()];
        for i in 0..x.len() {
            y[self.perm[i]] = x[i] * self.signs[i] as i64;
        }
        y
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for i in 0..x.len() {
            y[self.perm[i]] = x[i] * self.signs[i] as f64;
        }
        y
    }

    pub fn cycles(&self) -> Vec<Cycle> {
        let n = self.dim();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut indices = Vec::new();
            let mut sp = 1i8;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                indices.push(i);
                sp *= self.signs[i];
                i = self.perm[i];
            }
            out.push(Cycle { indices, sign_product: sp });
        }
        out
    }

    pub fn det(&self) -> i32 {
        let mut d: i32 = self.signs.iter().map(|&s| s as i32).product();
        for c in self.cycles() {
            if c.len() % 2 == 0 {
                d = -d;
            }
        }
        d
    }

    /// Dimension of the fixed space: one per cycle with positive sign product.
    pub fn fixed_dim(&self) -> usize {
        self.cycles().iter().filter(|c| c.is_positive()).count()
    }

    pub fn order(&self) -> usize {
        let mut o = 1usize;
        for c in self.cycles() {
            let k = if c.is_positive() { c.len() } else { 2 * c.len() };
            o = lcm(o, k);
        }
        o
    }

    /// Row-major dense integer matrix.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            m[self.perm[i]][i] = self.signs[i] as i64;
        }
        m
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Result<Self> {
        let n = m.len();
        let mut perm = vec![usize::MAX; n];
        let mut signs = vec![1i8; n];
        for j in 0..n {
            if m[j].len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m[j].len() });
            }
            for i in 0..n {
                let v = m[i][j];
                if v == 0 {
                    continue;
                }
                if (v != 1 && v != -1) || perm[j] != usize::MAX {
                    return Err(Error::InvalidArgument("not a signed permutation matrix".into()));
                }
                perm[j] = i;
                signs[j] = v as i8;
            }
            if perm[j] == usize::MAX {
                return Err(Error::InvalidArgument("singular matrix".into()));
            }
        }
        SignedPermMatrix::new(perm, signs)
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn direct_sum(&self, other: &SignedPermMatrix) -> SignedPermMatrix {
        let n = self.dim();
        let mut perm = self.perm.clone();
        perm.extend(other.perm.iter().map(|p| p + n));
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        SignedPermMatrix { perm, signs }
    }

    /// Rotation angles of the eigenvalue pairs `e^{±iθ}` as fractions of π
    /// in (0, 1]; eigenvalues -1 are paired into angle 1. Requires det +1.
    pub fn rotation_angles(&self) -> Result<Vec<Rat>> {
        let mut angles = Vec::new();
        let mut minus_ones = 0usize;
        for c in self.cycles() {
            let k = c.len() as i64;
            if c.is_positive() {
                for j in 1..k {
                    if 2 * j < k {
                        angles.push(Rat::new(2 * j, k));
                    } else if 2 * j == k {
                        minus_ones += 1;
                    }
                }
            } else {
                for j in 0..k {
                    if 2 * j + 1 < k {
                        angles.push(Rat::new(2 * j + 1, k));
                    } else if 2 * j + 1 == k {
                        minus_ones += 1;
                    }
                }
            }
        }
        if minus_ones % 2 != 0 {
            return Err(Error::NotOrientable);
        }
        for _ in 0..minus_ones / 2 {
            angles.push(Rat::one());
        }
        Ok(angles)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Display for SignedPermMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let s: Vec<String> = self.signs.iter().map(|s| s.to_string()).collect();
            return write!(f, "diag({})", s.join(","));
        }
        let parts: Vec<String> = (0..self.dim())
            .map(|i| {
                let sign = if self.signs[i] < 0 { "-" } else { "" };
                format!("e{}->{}e{}", i + 1, sign, self.perm[i] + 1)
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Sign of the product `e_A e_B` of two basis monomials given as bitmasks.
pub fn blade_sign(a: u32, b: u32) -> i32 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    let squares = (a & b).count_ones();
    if (swaps + squares) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Element of Cl(n) as a sparse map from monomial bitmask to coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordElement {
    n: usize,
    terms: BTreeMap<u32, QSqrt2>,
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        CliffordElement { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: QSqrt2) -> Self {
        Self::monomial(n, 0, c)
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, QSqrt2::one())
    }

    pub fn monomial(n: usize, mask: u32, c: QSqrt2) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mask, c);
        }
        CliffordElement { n, terms }
    }

    /// Basis vector `e_i`, 1-based.
    pub fn basis(n: usize, i: usize) -> Self {
        Self::monomial(n, 1 << (i - 1), QSqrt2::one())
    }

    /// Product `e_{i_1} ⋯ e_{i_k}` of 1-based indices in the given order.
    pub fn product_of_basis(n: usize, idx: &[usize]) -> Self {
        let mut g = Self::one(n);
        for &i in idx {
            g = g.mul(&Self::basis(n, i));
        }
        g
    }

    pub fn vector(coords: &[QSqrt2]) -> Self {
        let n = coords.len();
        let mut terms = BTreeMap::new();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(1u32 << i, *c);
            }
        }
        CliffordElement { n, terms }
    }

    /// `g_h = e_1 ⋯ e_{2h}`.
    pub fn g_h(n: usize, h: usize) -> Self {
        let idx: Vec<usize> = (1..=2 * h).collect();
        Self::product_of_basis(n, &idx)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &QSqrt2)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mask: u32) -> QSqrt2 {
        self.terms.get(&mask).copied().unwrap_or_default()
    }

    pub fn scalar_part(&self) -> QSqrt2 {
        self.coeff(0)
    }

    /// Coefficient of the volume monomial `e_1 ⋯ e_n`.
    pub fn top_coefficient(&self) -> QSqrt2 {
        self.coeff(((1u64 << self.n) - 1) as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    fn insert_add(terms: &mut BTreeMap<u32, QSqrt2>, mask: u32, c: QSqrt2) {
        let e = terms.entry(mask).or_default();
        *e += c;
        if e.is_zero() {
            terms.remove(&mask);
        }
    }

    pub fn try_mul(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(self.mul(other))
    }

    /// Product; panics on dimension mismatch (use `try_mul` for checked use).
    pub fn mul(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.n, other.n, "Clifford dimension mismatch");
        let mut terms = BTreeMap::new();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                let c = *ca * *cb;
                let c = if blade_sign(a, b) < 0 { -c } else { c };
                Self::insert_add(&mut terms, a ^ b, c);
            }
        }
        CliffordElement { n: self.n, terms }
    }

    pub fn add(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.n, other.n, "Clifford dimension mismatch");
        let mut terms = self.terms.clone();
        for (&m, c) in &other.terms {
            Self::insert_add(&mut terms, m, *c);
        }
        CliffordElement { n: self.n, terms }
    }

    pub fn neg(&self) -> CliffordElement {
        CliffordElement { n: self.n, terms: self.terms.iter().map(|(&m, c)| (m, -*c)).collect() }
    }

    pub fn sub(&self, other: &CliffordElement) -> CliffordElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: QSqrt2) -> CliffordElement {
        let mut terms = BTreeMap::new();
        for (&m, v) in &self.terms {
            let p = *v * c;
            if !p.is_zero() {
                terms.insert(m, p);
            }
        }
        CliffordElement { n: self.n, terms }
    }

    /// Reversion anti-automorphism: a grade-k monomial picks up (-1)^{k(k-1)/2}.
    pub fn reverse(&self) -> CliffordElement {
        let terms = self
            .terms
            .iter()
            .map(|(&m, c)| {
                let k = m.count_ones();
                if (k * (k.saturating_sub(1)) / 2) % 2 == 1 {
                    (m, -*c)
                } else {
                    (m, *c)
                }
            })
            .collect();
        CliffordElement { n: self.n, terms }
    }

    pub fn is_spin(&self) -> bool {
        self.is_even() && self.mul(&self.reverse()) == CliffordElement::one(self.n)
    }

    /// The vector part, if the element is purely of grade one.
    pub fn as_vector(&self) -> Option<Vec<QSqrt2>> {
        let mut v = vec![QSqrt2::zero(); self.n];
        for (&m, c) in &self.terms {
            if m.count_ones() != 1 {
                return None;
            }
            v[m.trailing_zeros() as usize] = *c;
        }
        Some(v)
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, c)| {
                if m == 0 {
                    return format!("{}", c);
                }
                let mon: String = (0..self.n).filter(|i| m >> i & 1 == 1).map(|i| format!("e{}", i + 1)).collect();
                if *c == QSqrt2::one() {
                    mon
                } else if *c == -QSqrt2::one() {
                    format!("-{}", mon)
                } else {
                    format!("({}){}", c, mon)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense square matrix over Q(√2); entry `[i][j]` is the i-th coordinate of
/// the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub entries: Vec<Vec<QSqrt2>>,
}

impl QMatrix {
    pub fn to_signed_perm(&self) -> Option<SignedPermMatrix> {
        let n = self.entries.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1i8; n];
        for j in 0..n {
            let mut found = false;
            for i in 0..n {
                let v = self.entries[i][j];
                if v.is_zero() {
                    continue;
                }
                if found {
                    return None;
                }
                if v == QSqrt2::one() {
                    signs[j] = 1;
                } else if v == -QSqrt2::one() {
                    signs[j] = -1;
                } else {
                    return None;
                }
                perm[j] = i;
                found = true;
            }
            if !found {
                return None;
            }
        }
        SignedPermMatrix::new(perm, signs).ok()
    }

    pub fn from_signed_perm(b: &SignedPermMatrix) -> QMatrix {
        let d = b.to_dense();
        QMatrix { entries: d.iter().map(|r| r.iter().map(|&v| QSqrt2::from_int(v)).collect()).collect() }
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        let n = self.entries.len();
        let mut e = vec![vec![QSqrt2::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = QSqrt2::zero();
                for k in 0..n {
                    s += self.entries[i][k] * o.entries[k][j];
                }
                e[i][j] = s;
            }
        }
        QMatrix { entries: e }
    }
}

/// The covering map μ(g): x ↦ g x g⁻¹, computed by conjugating each e_i.
pub fn mu_project(g: &CliffordElement) -> Result<QMatrix> {
    if !g.is_spin() {
        return Err(Error::NotInSpin(g.to_string()));
    }
    let n = g.dim();
    let ginv = g.reverse();
    let mut entries = vec![vec![QSqrt2::zero(); n]; n];
    for j in 0..n {
        let y = g.mul(&CliffordElement::basis(n, j + 1)).mul(&ginv);
        let v = y.as_vector().ok_or_else(|| Error::Internal("conjugate of a vector is not a vector".into()))?;
        for i in 0..n {
            entries[i][j] = v[i];
        }
    }
    Ok(QMatrix { entries })
}

/// Reflection vectors `v_1, …, v_k` with `B = R_{v_1} ⋯ R_{v_k}`, found by
/// reducing `B` to the identity coordinate by coordinate.
pub fn reflection_factorization(b: &SignedPermMatrix) -> Vec<Vec<QSqrt2>> {
    let n = b.dim();
    let mut m = b.clone();
    let mut vecs = Vec::new();
    for i in 0..n {
        let j = m.perm[i];
        let s = m.signs[i];
        if j == i {
            if s < 0 {
                let mut v = vec![QSqrt2::zero(); n];
                v[i] = QSqrt2::one();
                vecs.push(v);
                let mut signs = vec![1i8; n];
                signs[i] = -1;
                m = SignedPermMatrix::diag(&signs).mul(&m);
            }
            continue;
        }
        // w = (s e_j - e_i)/√2 swaps e_i and s e_j
        let mut w = vec![QSqrt2::zero(); n];
        w[j] = if s > 0 { QSqrt2::inv_sqrt2() } else { -QSqrt2::inv_sqrt2() };
        w[i] = -QSqrt2::inv_sqrt2();
        vecs.push(w);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut signs = vec![1i8; n];
        perm[i] = j;
        perm[j] = i;
        signs[i] = s;
        signs[j] = s;
        m = SignedPermMatrix { perm, signs }.mul(&m);
    }
    debug_assert!(m.is_identity());
    vecs
}

/// The distinguished lift u(B) ∈ Spin(n) of a rotation B.
pub fn lift_orthogonal(b: &SignedPermMatrix) -> Result<CliffordElement> {
    if b.det() != 1 {
        return Err(Error::NotOrientable);
    }
    let n = b.dim();
    let mut u = CliffordElement::one(n);
    for v in reflection_factorization(b) {
        u = u.mul(&CliffordElement::vector(&v));
    }
    Ok(u)
}

/// The element `±x(t_1, …, t_m)` of the maximal torus of Spin(n).
#[derive(Clone, Debug, PartialEq)]
pub struct TorusAngles {
    pub n: usize,
    pub angles: Vec<f64>,
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharacterKind {
    Full,
    Plus,
    Minus,
}

impl TorusAngles {
    pub fn new(n: usize, angles: Vec<f64>, sign: i8) -> Result<Self> {
        if angles.len() != n / 2 {
            return Err(Error::DimensionMismatch { expected: n / 2, got: angles.len() });
        }
        let tau = 2.0 * std::f64::consts::PI;
        let angles = angles.into_iter().map(|t| t.rem_euclid(tau)).collect();
        Ok(TorusAngles { n, angles, sign })
    }

    pub fn identity(n: usize) -> Self {
        TorusAngles { n, angles: vec![0.0; n / 2], sign: 1 }
    }

    /// `g_h` as a torus element: first `h` angles equal π/2.
    pub fn g_h(n: usize, h: usize) -> Self {
        let mut angles = vec![0.0; n / 2];
        for a in angles.iter_mut().take(h) {
            *a = std::f64::consts::FRAC_PI_2;
        }
        TorusAngles { n, angles, sign: 1 }
    }

    pub fn m(&self) -> usize {
        self.n / 2
    }

    /// Exact Clifford element when every angle is a multiple of π/4.
    pub fn to_clifford(&self) -> Option<CliffordElement> {
        let n = self.n;
        let mut g = CliffordElement::one(n);
        for (j, &t) in self.angles.iter().enumerate() {
            let q = t / std::f64::consts::FRAC_PI_4;
            let qi = q.round();
            if (q - qi).abs() > 1e-12 {
                return None;
            }
            let (c, s) = quarter_cos_sin(qi as i64);
            let mask = 0b11u32 << (2 * j);
            let mut f = CliffordElement::scalar(n, c);
            f = f.add(&CliffordElement::monomial(n, mask, s));
            g = g.mul(&f);
        }
        if self.sign < 0 {
            g = g.neg();
        }
        Some(g)
    }
}

fn quarter_cos_sin(q: i64) -> (QSqrt2, QSqrt2) {
    let r = QSqrt2::inv_sqrt2();
    let z = QSqrt2::zero();
    let o = QSqrt2::one();
    match q.rem_euclid(8) {
        0 => (o, z),
        1 => (r, r),
        2 => (z, o),
        3 => (-r, r),
        4 => (-o, z),
        5 => (-r, -r),
        6 => (z, -o),
        _ => (r, -r),
    }
}

fn i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Characters of the spin representations on a torus element.
pub fn spin_character(x: &TorusAngles, which: CharacterKind) -> Result<Complex64> {
    let m = x.m();
    let pc: f64 = x.angles.iter().map(|t| t.cos()).product();
    let ps: f64 = x.angles.iter().map(|t| t.sin()).product();
    let sign = x.sign as f64;
    match which {
        CharacterKind::Full => Ok(Complex64::new(sign * 2f64.powi(m as i32) * pc, 0.0)),
        CharacterKind::Plus | CharacterKind::Minus => {
            if x.n % 2 != 0 {
                return Err(Error::InvalidArgument("half-spin characters need even dimension".into()));
            }
            if m == 0 {
                return Err(Error::UnsupportedDimension(x.n));
            }
            let e = if which == CharacterKind::Plus { 1.0 } else { -1.0 };
            let v = (Complex64::new(pc, 0.0) + i_pow(m) * ps * e) * 2f64.powi(m as i32 - 1);
            Ok(v * sign)
        }
    }
}

/// Characters of an exact even Clifford element, read off from its scalar
/// and volume coefficients.
pub fn spin_character_exact(g: &CliffordElement, which: CharacterKind) -> Result<Complex64> {
    let n = g.dim();
    let m = n / 2;
    let a = g.scalar_part().to_f64();
    match which {
        CharacterKind::Full => Ok(Complex64::new(2f64.powi(m as i32) * a, 0.0)),
        CharacterKind::Plus | CharacterKind::Minus => {
            if n % 2 != 0 || m == 0 {
                return Err(Error::InvalidArgument("half-spin characters need even dimension".into()));
            }
            let w = g.top_coefficient().to_f64();
            let e = if which == CharacterKind::Plus { 1.0 } else { -1.0 };
            Ok((Complex64::new(a, 0.0) + i_pow(m) * w * e) * 2f64.powi(m as i32 - 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64) -> QSqrt2 {
        QSqrt2::from_int(a)
    }

    #[test]
    fn e1_squared_is_minus_one() {
        let e1 = CliffordElement::basis(3, 1);
        assert_eq!(e1.mul(&e1), CliffordElement::scalar(3, r(-1)));
    }

    #[test]
    fn unit_is_neutral() {
        let x = CliffordElement::product_of_basis(4, &[1, 3]).add(&CliffordElement::scalar(4, r(2)));
        assert_eq!(CliffordElement::one(4).mul(&x), x);
    }

    #[test]
    fn e12_e23() {
        let a = CliffordElement::product_of_basis(3, &[1, 2]);
        let b = CliffordElement::product_of_basis(3, &[2, 3]);
        assert_eq!(a.mul(&b), CliffordElement::product_of_basis(3, &[1, 3]).neg());
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = CliffordElement::one(2);
        let b = CliffordElement::one(3);
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn mu_of_one_is_identity() {
        let m = mu_project(&CliffordElement::one(4)).unwrap();
        assert_eq!(m.to_signed_perm().unwrap(), SignedPermMatrix::identity(4));
    }

    #[test]
    fn mu_of_e1e2() {
        let g = CliffordElement::product_of_basis(4, &[1, 2]);
        let m = mu_project(&g).unwrap().to_signed_perm().unwrap();
        assert_eq!(m, SignedPermMatrix::diag(&[-1, -1, 1, 1]));
    }

    #[test]
    fn mu_rejects_odd() {
        assert!(mu_project(&CliffordElement::basis(3, 1)).is_err());
    }

    #[test]
    fn mu_of_torus_element_doubles_angles() {
        // x(π/4) = (1 + e1e2)/√2 maps to rotation by π/2: e1 -> e2
        let x = TorusAngles::new(2, vec![std::f64::consts::FRAC_PI_4], 1).unwrap();
        let g = x.to_clifford().unwrap();
        let m = mu_project(&g).unwrap().to_signed_perm().unwrap();
        assert_eq!(m, SignedPermMatrix::new(vec![1, 0], vec![1, -1]).unwrap());
    }

    #[test]
    fn lift_identity_and_diag() {
        assert_eq!(lift_orthogonal(&SignedPermMatrix::identity(3)).unwrap(), CliffordElement::one(3));
        let b = SignedPermMatrix::diag(&[-1, -1, 1]);
        let u = lift_orthogonal(&b).unwrap();
        assert_eq!(u, CliffordElement::product_of_basis(3, &[1, 2]));
        assert_eq!(mu_project(&u).unwrap().to_signed_perm().unwrap(), b);
    }

    #[test]
    fn lift_of_j_block() {
        for b in [
            SignedPermMatrix::new(vec![1, 0, 2, 3], vec![1, 1, -1, 1]).unwrap(),
            SignedPermMatrix::new(vec![1, 0, 2, 3], vec![1, -1, -1, -1]).unwrap(),
        ] {
            assert_eq!(b.det(), 1);
            let u = lift_orthogonal(&b).unwrap();
            assert!(u.is_spin());
            assert_eq!(mu_project(&u).unwrap().to_signed_perm().unwrap(), b);
        }
        let odd = SignedPermMatrix::new(vec![1, 0, 2, 3], vec![1, 1, -1, -1]).unwrap();
        assert_eq!(odd.det(), -1);
    }

    #[test]
    fn lift_rejects_reflection() {
        assert_eq!(lift_orthogonal(&SignedPermMatrix::diag(&[-1, 1])), Err(Error::NotOrientable));
    }

    #[test]
    fn characters_of_identity_and_g_h() {
        let id = TorusAngles::identity(6);
        assert!((spin_character(&id, CharacterKind::Full).unwrap().re - 8.0).abs() < 1e-12);
        let gm = TorusAngles::g_h(4, 2);
        let p = spin_character(&gm, CharacterKind::Plus).unwrap();
        // 2^{m-1} i^m with m = 2
        assert!((p - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        let g1 = TorusAngles::g_h(6, 1);
        assert!(spin_character(&g1, CharacterKind::Full).unwrap().norm() < 1e-12);
    }

    #[test]
    fn exact_and_angle_characters_agree() {
        let x = TorusAngles::new(6, vec![std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4, 0.0], -1)
            .unwrap();
        let g = x.to_clifford().unwrap();
        for k in [CharacterKind::Full, CharacterKind::Plus, CharacterKind::Minus] {
            let a = spin_character(&x, k).unwrap();
            let b = spin_character_exact(&g, k).unwrap();
            assert!((a - b).norm() < 1e-12, "{:?}", k);
        }
    }

    #[test]
    fn rotation_angles_of_three_cycle() {
        let b = SignedPermMatrix::new(vec![1, 2, 0], vec![1, 1, 1]).unwrap();
        assert_eq!(b.rotation_angles().unwrap(), vec![Rat::new(2, 3)]);
        assert_eq!(b.fixed_dim(), 1);
        assert_eq!(b.order(), 3);
    }

    #[test]
    fn det_of_transposition_block() {
        let j = SignedPermMatrix::new(vec![1, 0], vec![1, 1]).unwrap();
        assert_eq!(j.det(), -1);
        assert_eq!(j.fixed_dim(), 1);
    }
}
