//! Bieberbach groups over the canonical lattice Z^n with signed-permutation
//! holonomy.

use crate::clifford::SignedPermMatrix;
use crate::error::{Error, Result};
use crate::quadratic::Rat;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

pub const MAX_POINT_GROUP: usize = 1 << 16;

/// Affine map `x ↦ B(x + b)`, written `B L_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineGen {
    pub matrix: SignedPermMatrix,
    pub translation: Vec<Rat>,
}

fn frac(r: Rat) -> Rat {
    r - r.floor()
}

impl AffineGen {
    pub fn new(matrix: SignedPermMatrix, translation: Vec<Rat>) -> Result<Self> {
        if translation.len() != matrix.dim() {
            return Err(Error::DimensionMismatch { expected: matrix.dim(), got: translation.len() });
        }
        Ok(AffineGen { matrix, translation })
    }

    /// Convenience constructor from integer numerators over a common denominator.
    pub fn from_parts(matrix: SignedPermMatrix, numer: &[i64], denom: i64) -> Result<Self> {
        Self::new(matrix, numer.iter().map(|&a| Rat::new(a, denom)).collect())
    }

    pub fn identity(n: usize) -> Self {
        AffineGen { matrix: SignedPermMatrix::identity(n), translation: vec![Rat::zero(); n] }
    }

    pub fn translation_by(lambda: &[i64]) -> Self {
        AffineGen {
            matrix: SignedPermMatrix::identity(lambda.len()),
            translation: lambda.iter().map(|&l| Rat::from_integer(l)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `(B L_b)(C L_c) = BC L_{C⁻¹b + c}`.
    pub fn mul(&self, o: &AffineGen) -> AffineGen {
        let cinv = o.matrix.inverse();
        let t = cinv.apply_rat(&self.translation);
        AffineGen {
            matrix: self.matrix.mul(&o.matrix),
            translation: t.iter().zip(&o.translation).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn inverse(&self) -> AffineGen {
        let t = self.matrix.apply_rat(&self.translation);
        AffineGen { matrix: self.matrix.inverse(), translation: t.iter().map(|x| -*x).collect() }
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        let y: Vec<Rat> = x.iter().zip(&self.translation).map(|(a, b)| *a + *b).collect();
        self.matrix.apply_rat(&y)
    }

    /// Translation reduced into [0, 1)^n.
    pub fn reduced(&self) -> AffineGen {
        AffineGen { matrix: self.matrix.clone(), translation: self.translation.iter().map(|&r| frac(r)).collect() }
    }

    /// Fixed-point test: `B(x+b) = x` is solvable iff `b + λ` is orthogonal
    /// to the fixed space for some lattice vector λ; per positive cycle with
    /// fixed vector v this reads `v·b ∈ Z`.
    pub fn has_fixed_point_mod_lattice(&self) -> bool {
        for c in self.matrix.cycles() {
            if !c.is_positive() {
                continue;
            }
            let v = c.fixed_vector(&self.matrix);
            let mut s = Rat::zero();
            for (idx, &i) in c.indices.iter().enumerate() {
                s += self.translation[i] * Rat::from_integer(v[idx]);
            }
            if !s.is_integer() {
                return false;
            }
        }
        true
    }

    /// Averaged translation `(1/q) Σ B^i b` for `q` the order of B.
    pub fn averaged_translation(&self) -> Vec<Rat> {
        let q = self.matrix.order();
        let n = self.dim();
        let mut acc = vec![Rat::zero(); n];
        let mut cur = self.translation.clone();
        for _ in 0..q {
            for i in 0..n {
                acc[i] += cur[i];
            }
            cur = self.matrix.apply_rat(&cur);
        }
        let qq = Rat::from_integer(q as i64);
        acc.iter().map(|a| *a / qq).collect()
    }
}

impl fmt::Display for AffineGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.translation.iter().map(|r| r.to_string()).collect();
        write!(f, "{} L({})", self.matrix, t.join(","))
    }
}

fn check_denominator(r: &Rat) -> Result<()> {
    let d = *r.denom();
    if d == 1 || d == 2 || d == 4 || is_prime(d as u64) {
        Ok(())
    } else {
        Err(Error::BadDenominator(d))
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// One element of the point group together with its chosen translation.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetSummary {
    pub element: AffineGen,
    pub n_b: usize,
    pub order: usize,
    pub in_f1: bool,
}

/// A validated Bieberbach group `⟨γ_1, …, γ_k, Z^n⟩`.
#[derive(Clone, Debug)]
pub struct BieberbachGroup {
    n: usize,
    generators: Vec<AffineGen>,
    cosets: Vec<AffineGen>,
    index: HashMap<SignedPermMatrix, usize>,
    // rep_parent · gen = rep_child · L_λ
    tree: Vec<Option<(usize, usize, Vec<i64>)>>,
}

fn integer_vec(v: &[Rat]) -> Option<Vec<i64>> {
    v.iter().map(|r| if r.is_integer() { Some(r.to_integer()) } else { None }).collect()
}

/// Validates the generators and builds the coset table by breadth-first
/// closure.
pub fn build_group(n: usize, gens: Vec<AffineGen>) -> Result<BieberbachGroup> {
    if n == 0 || n > crate::clifford::MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    for g in &gens {
        if g.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
        }
        for r in &g.translation {
            check_denominator(r)?;
        }
    }
    let id = AffineGen::identity(n);
    let mut cosets = vec![id.clone()];
    let mut index = HashMap::new();
    index.insert(id.matrix.clone(), 0usize);
    let mut tree = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let prod = cosets[i].mul(g);
            match index.get(&prod.matrix) {
                Some(&j) => {
                    let diff: Vec<Rat> = prod.translation.iter().zip(&cosets[j].translation).map(|(a, b)| *a - *b).collect();
                    if integer_vec(&diff).is_none() {
                        return Err(Error::LatticeMismatch(prod.to_string()));
                    }
                }
                None => {
                    if cosets.len() >= MAX_POINT_GROUP {
                        return Err(Error::InfinitePointGroup(MAX_POINT_GROUP));
                    }
                    let rep = prod.reduced();
                    let lambda: Vec<i64> = prod
                        .translation
                        .iter()
                        .zip(&rep.translation)
                        .map(|(a, b)| (*a - *b).to_integer())
                        .collect();
                    let j = cosets.len();
                    index.insert(rep.matrix.clone(), j);
                    cosets.push(rep);
                    tree.push(Some((i, gi, lambda)));
                    queue.push_back(j);
                }
            }
        }
    }
    for c in cosets.iter().skip(1) {
        if c.has_fixed_point_mod_lattice() {
            return Err(Error::Torsion(c.to_string()));
        }
    }
    Ok(BieberbachGroup { n, generators: gens, cosets, index, tree })
}

impl BieberbachGroup {
    pub fn torus(n: usize) -> Result<Self> {
        build_group(n, vec![])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[AffineGen] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Coset representatives with translations in [0,1)^n; index 0 is Id.
    pub fn cosets(&self) -> &[AffineGen] {
        &self.cosets
    }

    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    pub fn coset_of(&self, b: &SignedPermMatrix) -> Option<usize> {
        self.index.get(b).copied()
    }

    /// Breadth-first tree edge: `rep_parent · γ_gen = rep_i · L_λ`.
    pub fn tree_edge(&self, i: usize) -> Option<(usize, usize, &[i64])> {
        self.tree[i].as_ref().map(|(p, g, l)| (*p, *g, l.as_slice()))
    }

    /// `rep_i · rep_j = rep_k · L_λ`.
    pub fn mul_cosets(&self, i: usize, j: usize) -> (usize, Vec<i64>) {
        self.reduce(&self.cosets[i].mul(&self.cosets[j]))
    }

    /// `rep_i · γ_g = rep_k · L_λ`.
    pub fn mul_generator(&self, i: usize, g: usize) -> (usize, Vec<i64>) {
        self.reduce(&self.cosets[i].mul(&self.generators[g]))
    }

    /// Writes an element as `rep_k · L_λ`.
    pub fn reduce(&self, x: &AffineGen) -> (usize, Vec<i64>) {
        let k = self.index[&x.matrix];
        let lambda = x
            .translation
            .iter()
            .zip(&self.cosets[k].translation)
            .map(|(a, b)| {
                let d = *a - *b;
                debug_assert!(d.is_integer());
                d.to_integer()
            })
            .collect();
        (k, lambda)
    }

    pub fn is_orientable(&self) -> bool {
        self.cosets.iter().all(|c| c.matrix.det() == 1)
    }

    /// Returns `k` when the holonomy group is elementary abelian of order 2^k.
    pub fn z2_rank(&self) -> Option<usize> {
        let f = self.order();
        if !f.is_power_of_two() {
            return None;
        }
        let ok = self.cosets.iter().all(|c| c.matrix.mul(&c.matrix).is_identity());
        if ok {
            Some(f.trailing_zeros() as usize)
        } else {
            None
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.cosets.iter().all(|c| c.matrix.is_diagonal())
    }

    pub fn f1(&self) -> Vec<usize> {
        (0..self.order()).filter(|&i| self.cosets[i].matrix.fixed_dim() == 1).collect()
    }

    /// `dim Λ^B`; one per positive cycle.
    pub fn n_b(&self, i: usize) -> usize {
        self.cosets[i].matrix.fixed_dim()
    }

    pub fn exponent(&self) -> usize {
        self.cosets.iter().fold(1, |acc, c| acc.lcm(&c.matrix.order()))
    }

    /// Conjugate by the translation `L_c`: `L_c γ L_{-c}`.
    pub fn conjugate_by_translation(&self, c: &[Rat]) -> Result<BieberbachGroup> {
        let lc = AffineGen { matrix: SignedPermMatrix::identity(self.n), translation: c.to_vec() };
        let lci = lc.inverse();
        let gens = self.generators.iter().map(|g| lc.mul(g).mul(&lci)).collect();
        build_group(self.n, gens)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            n: self.n,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile {
                    perm: g.matrix.perm.iter().map(|p| p + 1).collect(),
                    signs: g.matrix.signs.clone(),
                    translation: g.translation.iter().map(|r| r.to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("group serialization")
    }

    pub fn from_json(s: &str) -> Result<BieberbachGroup> {
        let f: GroupFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        f.build()
    }
}

impl PartialEq for BieberbachGroup {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.generators == o.generators
    }
}

/// Serialized group description with 1-based permutations and rational
/// translations written as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub n: usize,
    pub generators: Vec<GeneratorFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
    pub translation: Vec<String>,
}

impl GroupFile {
    pub fn build(&self) -> Result<BieberbachGroup> {
        let mut gens = Vec::new();
        for g in &self.generators {
            if g.perm.iter().any(|&p| p == 0) {
                return Err(Error::Parse("permutation entries are 1-based".into()));
            }
            let m = SignedPermMatrix::new(g.perm.iter().map(|p| p - 1).collect(), g.signs.clone())?;
            let t = g
                .translation
                .iter()
                .map(|s| Rat::from_str(s.trim()).map_err(|e| Error::Parse(format!("{}: {}", s, e))))
                .collect::<Result<Vec<_>>>()?;
            gens.push(AffineGen::new(m, t)?);
        }
        build_group(self.n, gens)
    }
}

/// One row per point-group element.
pub fn point_group_summary(g: &BieberbachGroup) -> Vec<CosetSummary> {
    g.cosets()
        .iter()
        .map(|c| {
            let n_b = c.matrix.fixed_dim();
            CosetSummary { element: c.clone(), n_b, order: c.matrix.order(), in_f1: n_b == 1 }
        })
        .collect()
}

/// Whether the averaged translation has a nonzero component on the fixed
/// space modulo the projected lattice.
pub fn averaged_translation_nontrivial(c: &AffineGen) -> bool {
    let avg = c.averaged_translation();
    for cyc in c.matrix.cycles() {
        if !cyc.is_positive() {
            continue;
        }
        let v = cyc.fixed_vector(&c.matrix);
        let mut s = Rat::zero();
        for (idx, &i) in cyc.indices.iter().enumerate() {
            s += avg[i] * Rat::from_integer(v[idx]);
        }
        // projection onto Rv of the lattice is (1/k)Z v; avg·v/k in (1/k)Z iff avg·v ∈ Z
        if !s.is_integer() {
            return true;
        }
    }
    false
}
