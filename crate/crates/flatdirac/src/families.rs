//! Example families and the built-in registry.

use crate::clifford::SignedPermMatrix;
use crate::error::{Error, Result};
use crate::group::{build_group, AffineGen, BieberbachGroup};
use crate::quadratic::Rat;
use num_integer::binomial;
use serde::Serialize;
use std::collections::BTreeMap;

pub const HW3_CLASSIC: &str = include_str!("../data/hw/hw3_classic.txt");
pub const HW5_CLASSIC: &str = include_str!("../data/hw/hw5_classic.txt");
pub const HW7_A: &str = include_str!("../data/hw/hw7_a.txt");
pub const HW7_B: &str = include_str!("../data/hw/hw7_b.txt");

/// `B_{j,h} = diag(J,…,J, -1,…,-1, 1,…,1)` with `j` swap blocks.
pub fn b_jh(n: usize, j: usize, h: usize) -> Result<SignedPermMatrix> {
    if 2 * j + h >= n || j + h == 0 {
        return Err(Error::InvalidArgument(format!("no M_(j,h) with n = {}, j = {}, h = {}", n, j, h)));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut signs = vec![1i8; n];
    for i in 0..j {
        perm.swap(2 * i, 2 * i + 1);
    }
    for s in signs.iter_mut().skip(2 * j).take(h) {
        *s = -1;
    }
    SignedPermMatrix::new(perm, signs)
}

/// `Γ_{j,h} = ⟨B_{j,h} L_{e_n/2}, Λ⟩`.
pub fn mjh(n: usize, j: usize, h: usize) -> Result<BieberbachGroup> {
    let b = b_jh(n, j, h)?;
    let mut t = vec![0i64; n];
    t[n - 1] = 1;
    build_group(n, vec![AffineGen::from_parts(b, &t, 2)?])
}

/// Index set `(j, h)` of the Z_2 family in dimension `n`.
pub fn z2_family_indices(n: usize, orientable_only: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for j in 0..=(n - 1) / 2 {
        for h in 0..n - 2 * j {
            if j + h == 0 || (orientable_only && (j + h) % 2 == 1) {
                continue;
            }
            out.push((j, h));
        }
    }
    out
}

pub fn z2_family(n: usize, orientable_only: bool) -> Result<Vec<((usize, usize), BieberbachGroup)>> {
    z2_family_indices(n, orientable_only).into_iter().map(|(j, h)| Ok(((j, h), mjh(n, j, h)?))).collect()
}

/// Closed forms for `M_{j,h}`.
pub mod mjh_closed {
    use super::*;
    use crate::hodge::krawtchouk;
    use num_traits::ToPrimitive;

    fn kr(p: usize, n: usize, x: usize) -> i64 {
        krawtchouk(p, n, x).ok().and_then(|v| v.to_i64()).unwrap_or(0)
    }

    pub fn l(n: usize, j: usize, h: usize) -> i64 {
        (n - 2 * j - h) as i64
    }

    /// `d_{p,1}`.
    pub fn d_p1(n: usize, j: usize, h: usize, p: usize) -> i64 {
        binomial(n as i64, p as i64) * n as i64 + kr(p, n, j + h) * (l(n, j, h) - 2)
    }

    /// `d_{p,√2}`.
    pub fn d_p2(n: usize, j: usize, h: usize, p: usize) -> i64 {
        let l = l(n, j, h);
        2 * binomial(n as i64, p as i64) * binomial(n as i64, 2) + kr(p, n, j + h) * (j as i64 + (l - 1) * (l - 4))
    }

    pub fn d01(n: usize, j: usize, h: usize) -> i64 {
        n as i64 + l(n, j, h) - 2
    }

    pub fn d02(n: usize, j: usize, h: usize) -> i64 {
        let l = l(n, j, h);
        (n * (n - 1)) as i64 + j as i64 + (l - 1) * (l - 4)
    }

    pub fn betti(n: usize, j: usize, h: usize, p: usize) -> i64 {
        if p == 0 {
            return 1;
        }
        let jl = j as i64 + l(n, j, h);
        (0..=p / 2).map(|i| binomial((j + h) as i64, 2 * i as i64) * binomial(jl, (p - 2 * i) as i64)).sum()
    }

    /// `2^{n-j}`.
    pub fn spin_count(n: usize, j: usize, h: usize) -> u64 {
        if (j + h) % 2 == 1 {
            return 0;
        }
        1u64 << (n - j)
    }
}

/// Rows of 0/1 flags, one row of length `n` per generator.
pub fn parse_hw_pattern(text: &str) -> Result<Vec<Vec<u8>>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<u8> = line
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(Error::Parse(format!("bad HW flag {:?}", t))),
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// HW group with `γ_i = B_i L_{b_i}`, `B_i` fixing `e_i` only.
pub fn hw_group(n: usize, pattern: &[Vec<u8>]) -> Result<BieberbachGroup> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidArgument(format!("HW groups need odd n ≥ 3, got {}", n)));
    }
    if pattern.len() != n - 1 || pattern.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("HW pattern must be {} rows of {} flags", n - 1, n)));
    }
    let gens = pattern
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let signs: Vec<i8> = (0..n).map(|k| if k == i { 1 } else { -1 }).collect();
            let t: Vec<i64> = row.iter().map(|&f| f as i64).collect();
            AffineGen::from_parts(SignedPermMatrix::diag(&signs), &t, 2)
        })
        .collect::<Result<Vec<_>>>()?;
    build_group(n, gens)
}

/// `dΓ = ⟨diag(B, B) L_{(b, b)}, Λ ⊕ Λ⟩`.
pub fn doubling(g: &BieberbachGroup) -> Result<BieberbachGroup> {
    let gens = g
        .generators()
        .iter()
        .map(|x| {
            let mut t: Vec<Rat> = x.translation.clone();
            t.extend(x.translation.iter().cloned());
            AffineGen::new(x.matrix.direct_sum(&x.matrix), t)
        })
        .collect::<Result<Vec<_>>>()?;
    build_group(2 * g.dim(), gens)
}

/// `c_{d,t}` keyed by `(d, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SunadaNumbers {
    pub counts: BTreeMap<(usize, usize), usize>,
}

impl SunadaNumbers {
    pub fn get(&self, d: usize, t: usize) -> usize {
        self.counts.get(&(d, t)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn sunada_numbers(g: &BieberbachGroup) -> Result<SunadaNumbers> {
    if !g.is_diagonal() {
        return Err(Error::UnsupportedHolonomy("Sunada numbers need diagonal holonomy".into()));
    }
    let half = Rat::new(1, 2);
    let mut counts = BTreeMap::new();
    for c in g.cosets() {
        let fixed: Vec<usize> = (0..g.dim()).filter(|&i| c.matrix.signs[i] > 0).collect();
        let t = fixed.iter().filter(|&&i| (c.translation[i] - half).fract() == Rat::from_integer(0)).count();
        *counts.entry((fixed.len(), t)).or_insert(0) += 1;
    }
    Ok(SunadaNumbers { counts })
}

fn diag_gen(signs: &[i8], halves: &[usize]) -> Result<AffineGen> {
    let n = signs.len();
    let mut t = vec![0i64; n];
    for &h in halves {
        t[h - 1] = 1;
    }
    AffineGen::from_parts(SignedPermMatrix::diag(signs), &t, 2)
}

fn table2_group(name: &str) -> Result<BieberbachGroup> {
    let (b1, b2, t1, t2, extra): (&[i8], &[i8], &[usize], &[usize], bool) = match name {
        "m1" => (&[-1, -1, 1, 1], &[1, -1, -1, 1], &[4], &[2, 4], false),
        "m1-prime" => (&[-1, -1, 1, 1], &[1, -1, -1, 1], &[3], &[1, 2], false),
        "m2" => (&[1, 1, 1, -1], &[1, 1, -1, 1], &[3], &[2, 4], false),
        "m2-prime" => (&[1, 1, 1, -1], &[1, 1, -1, 1], &[2], &[1, 2], false),
        "m2-tilde" => (&[1, 1, 1, -1], &[1, 1, -1, 1], &[3], &[2, 4], true),
        "m2-tilde-prime" => (&[1, 1, 1, -1], &[1, 1, -1, 1], &[2], &[1, 2], true),
        _ => return Err(Error::UnknownGroup(format!("table2:{}", name))),
    };
    let mut s1 = b1.to_vec();
    let mut s2 = b2.to_vec();
    if extra {
        s1.extend([-1, 1]);
        s2.extend([1, -1]);
    }
    let n = s1.len();
    build_group(n, vec![diag_gen(&s1, t1)?, diag_gen(&s2, t2)?])
}

fn example44(prime: bool) -> Result<BieberbachGroup> {
    if prime {
        build_group(
            7,
            vec![diag_gen(&[-1, -1, -1, -1, 1, 1, 1], &[7])?, diag_gen(&[1, 1, -1, -1, -1, -1, 1], &[2])?],
        )
    } else {
        build_group(
            7,
            vec![diag_gen(&[-1, -1, -1, -1, -1, -1, 1], &[7])?, diag_gen(&[-1, -1, 1, 1, 1, 1, 1], &[1, 3, 7])?],
        )
    }
}

pub fn remark35() -> Result<BieberbachGroup> {
    build_group(3, vec![diag_gen(&[-1, -1, 1], &[3])?])
}

fn hw_builtin(tag: &str) -> Result<BieberbachGroup> {
    let (n, text) = match tag {
        "3:classic" => (3, HW3_CLASSIC),
        "5:classic" => (5, HW5_CLASSIC),
        "7:a" => (7, HW7_A),
        "7:b" => (7, HW7_B),
        _ => return Err(Error::UnknownGroup(format!("hw:{}", tag))),
    };
    hw_group(n, &parse_hw_pattern(text)?)
}

/// Names accepted by [`lookup`].
pub const REGISTRY_NAMES: [&str; 14] = [
    "remark3.5",
    "example4.4:gamma",
    "example4.4:gamma-prime",
    "table2:m1",
    "table2:m1-prime",
    "table2:m2",
    "table2:m2-prime",
    "table2:m2-tilde",
    "table2:m2-tilde-prime",
    "hw:3:classic",
    "hw:5:classic",
    "hw:7:a",
    "hw:7:b",
    "double:hw:3:classic",
];

/// Resolves a registry name; also `torus:N`, `mjh:N:J:H` and `double:<name>`.
pub fn lookup(name: &str) -> Result<BieberbachGroup> {
    if let Some(rest) = name.strip_prefix("double:") {
        return doubling(&lookup(rest)?);
    }
    if let Some(rest) = name.strip_prefix("torus:") {
        let n: usize = rest.parse().map_err(|_| Error::UnknownGroup(name.into()))?;
        return BieberbachGroup::torus(n);
    }
    if let Some(rest) = name.strip_prefix("mjh:") {
        let v: Vec<usize> =
            rest.split(':').map(|x| x.parse().map_err(|_| Error::UnknownGroup(name.into()))).collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(Error::UnknownGroup(name.into()));
        }
        return mjh(v[0], v[1], v[2]);
    }
    if let Some(rest) = name.strip_prefix("table2:") {
        return table2_group(rest);
    }
    if let Some(rest) = name.strip_prefix("hw:") {
        return hw_builtin(rest);
    }
    match name {
        "remark3.5" => remark35(),
        "example4.4:gamma" => example44(false),
        "example4.4:gamma-prime" => example44(true),
        _ => Err(Error::UnknownGroup(name.into())),
    }
}

/// Every fixed-name registry entry.
pub fn builtin_examples() -> Result<Vec<(String, BieberbachGroup)>> {
    REGISTRY_NAMES.iter().map(|n| Ok((n.to_string(), lookup(n)?))).collect()
}

/// Fingerprint used to tell family members apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub betti: Vec<u64>,
    pub spin_structures: usize,
    pub sunada: Option<Vec<((usize, usize), usize)>>,
}

pub fn fingerprint(g: &BieberbachGroup) -> Result<Fingerprint> {
    Ok(Fingerprint {
        betti: crate::hodge::betti_vector(g)?,
        spin_structures: crate::spin::count_spin_structures(g)?,
        sunada: sunada_numbers(g).ok().map(|s| s.counts.into_iter().collect()),
    })
}

/// "distinguished" when fingerprints differ, else "inconclusive".
pub fn distinguish(a: &BieberbachGroup, b: &BieberbachGroup) -> Result<&'static str> {
    if a.dim() != b.dim() || a.order() != b.order() || fingerprint(a)? != fingerprint(b)? {
        Ok("distinguished")
    } else {
        Ok("inconclusive")
    }
}
