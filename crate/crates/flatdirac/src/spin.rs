//! Spin structures `ε: Γ → Spin(n)` encoded by `(δ_1..δ_n; σ_1..σ_k)` with
//! `ε(L_{e_i}) = δ_i` and `ε(γ_i) = σ_i u(B_i)`.

use crate::clifford::{lift_orthogonal, CliffordElement};
use crate::error::{Error, Result};
use crate::group::{AffineGen, BieberbachGroup};
use crate::quadratic::Rat;
use serde::{Deserialize, Serialize};

/// Largest solution-space dimension that will be enumerated.
pub const MAX_FREE_BITS: usize = 24;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinStructure {
    pub delta: Vec<i8>,
    pub sigma: Vec<i8>,
    #[serde(skip)]
    lifts: Vec<CliffordElement>,
}

impl PartialEq for SpinStructure {
    fn eq(&self, o: &Self) -> bool {
        self.delta == o.delta && self.sigma == o.sigma
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureProps {
    pub trivial_type: bool,
    pub j_minus: usize,
    pub shift: Vec<Rat>,
}

/// Precomputed sign bookkeeping for a group: each coset representative
/// lifts to `±U_A`, the sign being a GF(2)-linear form in the unknown bits.
struct SignSystem {
    n: usize,
    k: usize,
    base: Vec<CliffordElement>,
    forms: Vec<u64>,
    equations: Vec<(u64, bool)>,
}

fn lattice_mask(lambda: &[i64]) -> u64 {
    lambda.iter().enumerate().filter(|(_, &l)| l.rem_euclid(2) == 1).fold(0u64, |m, (i, _)| m | 1 << i)
}

fn sign_between(p: &CliffordElement, target: &CliffordElement) -> Result<bool> {
    if p == target {
        Ok(false)
    } else if p.neg() == *target {
        Ok(true)
    } else {
        Err(Error::Internal(format!("lifts differ by more than a sign: {} vs {}", p, target)))
    }
}

impl SignSystem {
    fn build(g: &BieberbachGroup) -> Result<SignSystem> {
        let n = g.dim();
        let k = g.num_generators();
        if n + k > 64 {
            return Err(Error::Budget("more than 64 sign unknowns".into()));
        }
        let gen_lifts: Vec<CliffordElement> =
            g.generators().iter().map(|x| lift_orthogonal(&x.matrix)).collect::<Result<_>>()?;
        let f = g.order();
        let mut base = vec![CliffordElement::one(n); f];
        let mut forms = vec![0u64; f];
        for a in 1..f {
            let (p, gi, lambda) = g.tree_edge(a).expect("tree edge");
            base[a] = base[p].mul(&gen_lifts[gi]);
            forms[a] = forms[p] ^ (1u64 << (n + gi)) ^ lattice_mask(lambda);
        }
        let mut equations = Vec::new();
        for a in 0..f {
            for (gi, u) in gen_lifts.iter().enumerate() {
                let (c, lambda) = g.mul_generator(a, gi);
                let s = sign_between(&base[a].mul(u), &base[c])?;
                equations.push((forms[a] ^ (1u64 << (n + gi)) ^ forms[c] ^ lattice_mask(&lambda), s));
            }
            for c in 0..f {
                let (d, lambda) = g.mul_cosets(a, c);
                let s = sign_between(&base[a].mul(&base[c]), &base[d])?;
                equations.push((forms[a] ^ forms[c] ^ forms[d] ^ lattice_mask(&lambda), s));
            }
        }
        for x in g.generators() {
            for j in 0..n {
                let mut e = vec![0i64; n];
                e[j] = 1;
                let mut img = x.matrix.apply_int(&e);
                img[j] -= 1;
                equations.push((lattice_mask(&img), false));
            }
        }
        Ok(SignSystem { n, k, base, forms, equations })
    }

    fn satisfied(&self, x: u64) -> bool {
        self.equations.iter().all(|(m, r)| ((m & x).count_ones() % 2 == 1) == *r)
    }

    /// All solutions of the linear system.
    fn solve(&self) -> Result<Vec<u64>> {
        let nv = self.n + self.k;
        let mut rows: Vec<(u64, bool)> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for &(m0, r0) in &self.equations {
            let (mut m, mut r) = (m0, r0);
            for (row, &p) in rows.iter().zip(&pivots) {
                if m >> p & 1 == 1 {
                    m ^= row.0;
                    r ^= row.1;
                }
            }
            if m == 0 {
                if r {
                    return Ok(vec![]);
                }
                continue;
            }
            let p = m.trailing_zeros() as usize;
            for (row, _) in rows.iter_mut().zip(&pivots) {
                if row.0 >> p & 1 == 1 {
                    row.0 ^= m;
                    row.1 ^= r;
                }
            }
            rows.push((m, r));
            pivots.push(p);
        }
        let free: Vec<usize> = (0..nv).filter(|v| !pivots.contains(v)).collect();
        if free.len() > MAX_FREE_BITS {
            return Err(Error::Budget(format!("{} free sign bits", free.len())));
        }
        let mut sols = Vec::with_capacity(1 << free.len());
        for bits in 0u64..(1u64 << free.len()) {
            let mut x = 0u64;
            for (i, &v) in free.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    x |= 1 << v;
                }
            }
            for (row, &p) in rows.iter().zip(&pivots) {
                let rest = (row.0 & !(1u64 << p) & x).count_ones() % 2 == 1;
                if rest ^ row.1 {
                    x |= 1 << p;
                }
            }
            debug_assert!(self.satisfied(x));
            sols.push(x);
        }
        let key = |x: &u64| -> u64 { (0..nv).fold(0u64, |acc, v| acc << 1 | (x >> v & 1)) };
        sols.sort_by_key(key);
        Ok(sols)
    }

    fn structure(&self, x: u64) -> SpinStructure {
        let bit = |v: usize| if x >> v & 1 == 1 { -1i8 } else { 1 };
        let lifts = self
            .base
            .iter()
            .zip(&self.forms)
            .map(|(u, &f)| if (f & x).count_ones() % 2 == 1 { u.neg() } else { u.clone() })
            .collect();
        SpinStructure { delta: (0..self.n).map(bit).collect(), sigma: (self.n..self.n + self.k).map(bit).collect(), lifts }
    }

    fn encode(&self, delta: &[i8], sigma: &[i8]) -> Result<u64> {
        if delta.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: delta.len() });
        }
        if sigma.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: sigma.len() });
        }
        let mut x = 0u64;
        for (i, &d) in delta.iter().chain(sigma).enumerate() {
            match d {
                1 => {}
                -1 => x |= 1 << i,
                _ => return Err(Error::InvalidSpinStructure("entries must be +1 or -1".into())),
            }
        }
        Ok(x)
    }
}

/// All spin structures in lexicographic order (δ_1 first, +1 before -1,
/// σ nested inside). Non-orientable groups give an empty list.
pub fn enumerate_spin_structures(g: &BieberbachGroup) -> Result<Vec<SpinStructure>> {
    if !g.is_orientable() {
        return Ok(vec![]);
    }
    let sys = SignSystem::build(g)?;
    Ok(sys.solve()?.into_iter().map(|x| sys.structure(x)).collect())
}

pub fn count_spin_structures(g: &BieberbachGroup) -> Result<usize> {
    if !g.is_orientable() {
        return Ok(0);
    }
    Ok(SignSystem::build(g)?.solve()?.len())
}

impl SpinStructure {
    /// Validates `(δ; σ)` against the group relations.
    pub fn new(g: &BieberbachGroup, delta: Vec<i8>, sigma: Vec<i8>) -> Result<SpinStructure> {
        if !g.is_orientable() {
            return Err(Error::NotOrientable);
        }
        let sys = SignSystem::build(g)?;
        let x = sys.encode(&delta, &sigma)?;
        if !sys.satisfied(x) {
            return Err(Error::InvalidSpinStructure(format!("delta {:?} sigma {:?} violates a relation", delta, sigma)));
        }
        Ok(sys.structure(x))
    }

    pub fn from_json(g: &BieberbachGroup, s: &str) -> Result<SpinStructure> {
        let raw: SpinStructure = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        SpinStructure::new(g, raw.delta, raw.sigma)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spin structure serialization")
    }

    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    /// `ε` on the coset representative `rep_i`.
    pub fn lift(&self, coset: usize) -> &CliffordElement {
        &self.lifts[coset]
    }

    pub fn lifts(&self) -> &[CliffordElement] {
        &self.lifts
    }

    /// `δ(λ)` for a lattice vector.
    pub fn delta_of(&self, lambda: &[i64]) -> i8 {
        let odd = lambda.iter().zip(&self.delta).filter(|(l, d)| l.rem_euclid(2) == 1 && **d < 0).count();
        if odd % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `ε` on an arbitrary group element.
    pub fn eval(&self, g: &BieberbachGroup, x: &AffineGen) -> CliffordElement {
        let (k, lambda) = g.reduce(x);
        let l = &self.lifts[k];
        if self.delta_of(&lambda) < 0 {
            l.neg()
        } else {
            l.clone()
        }
    }

    pub fn is_trivial_type(&self) -> bool {
        self.delta.iter().all(|&d| d == 1)
    }

    pub fn j_minus(&self) -> Vec<usize> {
        (0..self.delta.len()).filter(|&i| self.delta[i] < 0).collect()
    }

    pub fn props(&self) -> StructureProps {
        StructureProps {
            trivial_type: self.is_trivial_type(),
            j_minus: self.j_minus().len(),
            shift: crate::shells::shift_vector(&self.delta),
        }
    }
}

pub fn structure_props(e: &SpinStructure) -> StructureProps {
    e.props()
}
