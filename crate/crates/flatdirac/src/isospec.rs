//! Pairwise spectral comparison, length spectra and the isospectrality table.

use crate::dirac::{dirac_spectrum, spinor_laplacian_spectrum, HolonomyCharacter, SpectrumTable};
use crate::error::{Error, Result};
use crate::families::{lookup, mjh};
use crate::group::{AffineGen, BieberbachGroup};
use crate::hodge::pform_spectrum;
use crate::quadratic::Rat;
use crate::spin::{enumerate_spin_structures, SpinStructure};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub const MAX_LENGTH_CLASSES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p")]
pub enum SpectrumKind {
    Dirac,
    SpinorLaplacian,
    Pform(usize),
    Functions,
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumKind::Dirac => write!(f, "dirac"),
            SpectrumKind::SpinorLaplacian => write!(f, "spinor_laplacian"),
            SpectrumKind::Pform(p) => write!(f, "pform({})", p),
            SpectrumKind::Functions => write!(f, "functions"),
        }
    }
}

/// A spin manifold with twist.
#[derive(Clone, Debug)]
pub struct Subject {
    pub group: BieberbachGroup,
    pub spin: Option<SpinStructure>,
    pub rho: HolonomyCharacter,
}

impl Subject {
    pub fn new(group: BieberbachGroup, spin: Option<SpinStructure>) -> Self {
        let rho = HolonomyCharacter::trivial(&group);
        Subject { group, spin, rho }
    }

    fn dirac(&self, max_key: u64) -> Result<SpectrumTable> {
        let eps = self.spin.as_ref().ok_or_else(|| Error::InvalidArgument("Dirac comparison needs a spin structure".into()))?;
        dirac_spectrum(&self.group, eps, &self.rho, max_key)
    }
}

/// Outcome of one comparison. `equal` verdicts hold up to `cap` only;
/// unequal verdicts carry the first divergent key.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: SpectrumKind,
    pub equal: bool,
    pub cap: u64,
    pub first_divergence: Option<Divergence>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub four_mu_sq: u64,
    pub left: String,
    pub right: String,
}

impl Verdict {
    pub fn label(&self) -> String {
        if self.equal {
            format!("equal up to 4mu^2 <= {}", self.cap)
        } else {
            let d = self.first_divergence.as_ref().expect("divergence");
            format!("differ at 4mu^2 = {}: {} vs {}", d.four_mu_sq, d.left, d.right)
        }
    }
}

fn first_difference<V: PartialEq + std::fmt::Debug>(a: &BTreeMap<u64, V>, b: &BTreeMap<u64, V>) -> Option<Divergence> {
    let keys: BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    for k in keys {
        let (x, y) = (a.get(&k), b.get(&k));
        if x != y {
            let show = |v: Option<&V>| v.map(|v| format!("{:?}", v)).unwrap_or_else(|| "absent".into());
            return Some(Divergence { four_mu_sq: k, left: show(x), right: show(y) });
        }
    }
    None
}

fn dirac_map(t: &SpectrumTable) -> BTreeMap<u64, (u64, u64)> {
    let mut m: BTreeMap<u64, (u64, u64)> = t.entries.iter().map(|e| (e.four_mu_sq, (e.d_plus, e.d_minus))).collect();
    if t.d0 > 0 {
        m.insert(0, (t.d0, 0));
    }
    m
}

fn laplacian_map(t: &SpectrumTable) -> BTreeMap<u64, u64> {
    let mut m: BTreeMap<u64, u64> = spinor_laplacian_spectrum(t).into_iter().collect();
    if t.d0 > 0 {
        m.insert(0, t.d0);
    }
    m
}

fn verdict(kind: SpectrumKind, cap: u64, d: Option<Divergence>) -> Verdict {
    Verdict { kind, equal: d.is_none(), cap, first_divergence: d }
}

/// Shell-by-shell comparison up to `max_key`.
pub fn compare_spectra(a: &Subject, b: &Subject, kinds: &[SpectrumKind], max_key: u64) -> Result<Vec<Verdict>> {
    if a.group.dim() != b.group.dim() {
        return Err(Error::DimensionMismatch { expected: a.group.dim(), got: b.group.dim() });
    }
    let need_dirac = kinds.iter().any(|k| matches!(k, SpectrumKind::Dirac | SpectrumKind::SpinorLaplacian));
    let (ta, tb) = if need_dirac { (Some(a.dirac(max_key)?), Some(b.dirac(max_key)?)) } else { (None, None) };
    kinds
        .iter()
        .map(|&k| {
            let d = match k {
                SpectrumKind::Dirac => first_difference(&dirac_map(ta.as_ref().unwrap()), &dirac_map(tb.as_ref().unwrap())),
                SpectrumKind::SpinorLaplacian => {
                    first_difference(&laplacian_map(ta.as_ref().unwrap()), &laplacian_map(tb.as_ref().unwrap()))
                }
                SpectrumKind::Pform(p) => {
                    first_difference(&pform_spectrum(&a.group, p, max_key)?, &pform_spectrum(&b.group, p, max_key)?)
                }
                SpectrumKind::Functions => {
                    first_difference(&pform_spectrum(&a.group, 0, max_key)?, &pform_spectrum(&b.group, 0, max_key)?)
                }
            };
            Ok(verdict(k, max_key, d))
        })
        .collect()
}

/// Squared lengths of closed geodesics up to a cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthSpectrum {
    pub cap: i64,
    /// Distinct squared lengths.
    #[serde(serialize_with = "ser_rats")]
    pub weak: Vec<Rat>,
    /// Number of conjugacy classes per squared length.
    #[serde(serialize_with = "ser_rat_map")]
    pub marked: BTreeMap<Rat, usize>,
    pub method: &'static str,
}

fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ser_rat_map<S: serde::Serializer>(m: &BTreeMap<Rat, usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|(k, v)| (k.to_string(), *v)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ClassKey {
    coset: usize,
    a: Vec<i64>,
    parity: Vec<u8>,
}

struct CosetCycles {
    positive: Vec<(Vec<usize>, Vec<i64>)>,
    negative: Vec<Vec<usize>>,
    offsets: Vec<Rat>,
}

fn coset_cycles(g: &BieberbachGroup, k: usize) -> CosetCycles {
    let c = &g.cosets()[k];
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for cyc in c.matrix.cycles() {
        if cyc.is_positive() {
            let v = cyc.fixed_vector(&c.matrix);
            positive.push((cyc.indices.clone(), v));
        } else {
            negative.push(cyc.indices.clone());
        }
    }
    let offsets = positive
        .iter()
        .map(|(idx, v)| idx.iter().zip(v).map(|(&i, &s)| c.translation[i] * Rat::from_integer(s)).sum())
        .collect();
    CosetCycles { positive, negative, offsets }
}

fn class_of(cc: &CosetCycles, coset: usize, lambda: &[i64]) -> ClassKey {
    let a = cc.positive.iter().map(|(idx, v)| idx.iter().zip(v).map(|(&i, &s)| s * lambda[i]).sum()).collect();
    let parity = cc.negative.iter().map(|idx| (idx.iter().map(|&i| lambda[i]).sum::<i64>().rem_euclid(2)) as u8).collect();
    ClassKey { coset, a, parity }
}

fn length_sq(cc: &CosetCycles, a: &[i64]) -> Rat {
    cc.positive
        .iter()
        .zip(a)
        .zip(&cc.offsets)
        .map(|(((idx, _), &ai), &w)| {
            let x = Rat::from_integer(ai) + w;
            x * x / Rat::from_integer(idx.len() as i64)
        })
        .sum()
}

fn enumerate_a(cc: &CosetCycles, cap: Rat, i: usize, acc: Rat, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) -> Result<()> {
    if i == cc.positive.len() {
        out.push(cur.clone());
        if out.len() > MAX_LENGTH_CLASSES {
            return Err(Error::Budget("length spectrum class budget exceeded".into()));
        }
        return Ok(());
    }
    let len = Rat::from_integer(cc.positive[i].0.len() as i64);
    let w = cc.offsets[i];
    let room = (cap - acc) * len;
    let r = (crate::shells::rat_f64(room)).sqrt().ceil() as i64 + 1;
    let c = (-crate::shells::rat_f64(w)).round() as i64;
    for ai in c - r..=c + r {
        let x = Rat::from_integer(ai) + w;
        let t = x * x / len;
        if acc + t <= cap {
            cur.push(ai);
            enumerate_a(cc, cap, i + 1, acc + t, cur, out)?;
            cur.pop();
        }
    }
    Ok(())
}

fn representative(cc: &CosetCycles, key: &ClassKey, n: usize) -> Vec<i64> {
    let mut lambda = vec![0i64; n];
    for ((idx, _), &a) in cc.positive.iter().zip(&key.a) {
        lambda[idx[0]] = a;
    }
    for (idx, &p) in cc.negative.iter().zip(&key.parity) {
        lambda[idx[0]] = p as i64;
    }
    lambda
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Weak and marked length spectra with squared length `≤ cap`.
pub fn length_spectrum(g: &BieberbachGroup, cap: i64) -> Result<LengthSpectrum> {
    if cap < 0 {
        return Err(Error::InvalidArgument("negative length cap".into()));
    }
    let n = g.dim();
    let capr = Rat::from_integer(cap);
    let cycles: Vec<CosetCycles> = (0..g.order()).map(|k| coset_cycles(g, k)).collect();
    let mut classes: Vec<(ClassKey, Rat)> = Vec::new();
    for (k, cc) in cycles.iter().enumerate() {
        let mut tuples = Vec::new();
        enumerate_a(cc, capr, 0, Rat::from_integer(0), &mut Vec::new(), &mut tuples)?;
        let np = cc.negative.len();
        for a in tuples {
            let l2 = length_sq(cc, &a);
            for bits in 0u64..(1u64 << np) {
                let parity: Vec<u8> = (0..np).map(|i| (bits >> i & 1) as u8).collect();
                if k == 0 && a.iter().all(|&x| x == 0) {
                    continue;
                }
                classes.push((ClassKey { coset: k, a: a.clone(), parity }, l2));
            }
        }
        if classes.len() > MAX_LENGTH_CLASSES {
            return Err(Error::Budget("length spectrum class budget exceeded".into()));
        }
    }
    let index: HashMap<&ClassKey, usize> = classes.iter().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let gens: Vec<(AffineGen, AffineGen)> = g.generators().iter().map(|x| (x.clone(), x.inverse())).collect();
    let images: Vec<Vec<usize>> = classes
        .par_iter()
        .map(|(key, l2)| {
            let cc = &cycles[key.coset];
            let lambda = representative(cc, key, n);
            let elem = g.cosets()[key.coset].mul(&AffineGen::translation_by(&lambda));
            gens.iter()
                .map(|(x, xi)| {
                    let conj = x.mul(&elem).mul(xi);
                    let (k2, l) = g.reduce(&conj);
                    let key2 = class_of(&cycles[k2], k2, &l);
                    let j = *index
                        .get(&key2)
                        .ok_or_else(|| Error::Internal(format!("conjugate of a class of length {} escaped the cap", l2)))?;
                    Ok(j)
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    for (i, imgs) in images.iter().enumerate() {
        for &j in imgs {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut marked: BTreeMap<Rat, usize> = BTreeMap::new();
    for i in 0..classes.len() {
        if find(&mut parent, i) == i {
            *marked.entry(classes[i].1).or_insert(0) += 1;
        }
    }
    let weak = marked.keys().copied().collect();
    Ok(LengthSpectrum { cap, weak, marked, method: "exact lattice-class invariants with orbit closure; complete up to cap" })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub verdict: String,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub example: &'static str,
    pub dim: usize,
    pub dirac: Cell,
    pub spinor_laplacian: Cell,
    pub pforms: Cell,
    pub marked_length: Cell,
    pub weak_length: Cell,
    pub expected: [&'static str; 5],
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Report {
    pub max_four_mu_sq: u64,
    pub length_cap: i64,
    pub rows: Vec<Table1Row>,
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "Yes"
    } else {
        "No"
    }
}

fn mixed(vs: &[bool]) -> &'static str {
    if vs.iter().all(|&v| v) {
        "Yes"
    } else if vs.iter().all(|&v| !v) {
        "No"
    } else {
        "Yes/No"
    }
}

fn spin_with_delta(g: &BieberbachGroup, delta: &[i8]) -> Result<SpinStructure> {
    enumerate_spin_structures(g)?
        .into_iter()
        .find(|e| e.delta == delta)
        .ok_or_else(|| Error::InvalidSpinStructure(format!("no spin structure with delta {:?}", delta)))
}

fn spin_with_delta_sigma(g: &BieberbachGroup, delta: &[i8]) -> Result<SpinStructure> {
    enumerate_spin_structures(g)?
        .into_iter()
        .find(|e| e.delta == delta && e.sigma.iter().all(|&s| s == 1))
        .map_or_else(|| spin_with_delta(g, delta), Ok)
}

fn pform_cell(a: &BieberbachGroup, b: &BieberbachGroup, cap: u64) -> Result<Cell> {
    let n = a.dim();
    let mut equal = Vec::new();
    let mut detail = Vec::new();
    for p in 0..=n {
        let sa = pform_spectrum(a, p, cap)?;
        let sb = pform_spectrum(b, p, cap)?;
        let d = first_difference(&sa, &sb);
        let v = verdict(SpectrumKind::Pform(p), cap, d);
        detail.push(format!("p = {}: {}", p, v.label()));
        equal.push(v.equal);
    }
    let verdict = if equal.iter().all(|&e| e) {
        "Yes".to_string()
    } else if equal.iter().enumerate().all(|(p, &e)| e == (p % 2 == 1)) {
        "Yes (p odd)".to_string()
    } else if equal.iter().all(|&e| !e) {
        "No".to_string()
    } else {
        let ps: Vec<String> = equal.iter().enumerate().filter(|(_, &e)| e).map(|(p, _)| p.to_string()).collect();
        format!("Partial (p in {{{}}})", ps.join(","))
    };
    Ok(Cell { verdict, detail })
}

fn length_cells(a: &BieberbachGroup, b: &BieberbachGroup, cap: i64) -> Result<(Cell, Cell)> {
    let la = length_spectrum(a, cap)?;
    let lb = length_spectrum(b, cap)?;
    let marked = la.marked == lb.marked;
    let weak = la.weak == lb.weak;
    let describe = |eq: bool, x: &dyn Fn(&LengthSpectrum) -> String| {
        if eq {
            format!("equal up to length^2 <= {}", cap)
        } else {
            format!("differ: {} vs {}", x(&la), x(&lb))
        }
    };
    let first_marked = |l: &LengthSpectrum| {
        let other = if std::ptr::eq(l, &la) { &lb } else { &la };
        l.marked
            .iter()
            .find(|(k, v)| other.marked.get(k) != Some(v))
            .map(|(k, v)| format!("{} classes at length^2 {}", v, k))
            .unwrap_or_else(|| "-".into())
    };
    let first_weak = |l: &LengthSpectrum| {
        let other = if std::ptr::eq(l, &la) { &lb } else { &la };
        l.weak.iter().find(|k| !other.weak.contains(k)).map(|k| format!("length^2 {}", k)).unwrap_or_else(|| "-".into())
    };
    Ok((
        Cell { verdict: yes_no(marked).into(), detail: vec![describe(marked, &first_marked)] },
        Cell { verdict: yes_no(weak).into(), detail: vec![describe(weak, &first_weak)] },
    ))
}

fn spin_cells(pairs: &[(Subject, Subject)], cap: u64) -> Result<(Cell, Cell)> {
    let mut d = Vec::new();
    let mut s = Vec::new();
    let mut dd = Vec::new();
    let mut sd = Vec::new();
    for (a, b) in pairs {
        let v = compare_spectra(a, b, &[SpectrumKind::Dirac, SpectrumKind::SpinorLaplacian], cap)?;
        let tag = format!(
            "delta {:?} vs {:?}",
            a.spin.as_ref().map(|e| e.delta.clone()).unwrap_or_default(),
            b.spin.as_ref().map(|e| e.delta.clone()).unwrap_or_default()
        );
        d.push(v[0].equal);
        s.push(v[1].equal);
        dd.push(format!("{}: {}", tag, v[0].label()));
        sd.push(format!("{}: {}", tag, v[1].label()));
    }
    Ok((Cell { verdict: mixed(&d).into(), detail: dd }, Cell { verdict: mixed(&s).into(), detail: sd }))
}

#[allow(clippy::too_many_arguments)]
fn row(
    example: &'static str,
    a: &BieberbachGroup,
    b: &BieberbachGroup,
    spin_pairs: &[(Subject, Subject)],
    length_pair: Option<(&BieberbachGroup, &BieberbachGroup)>,
    expected: [&'static str; 5],
    cap: u64,
    lcap: i64,
) -> Result<Table1Row> {
    let (dirac, spinor_laplacian) = spin_cells(spin_pairs, cap)?;
    let pforms = pform_cell(a, b, cap)?;
    let (la, lb) = length_pair.unwrap_or((a, b));
    let (marked_length, weak_length) = length_cells(la, lb, lcap)?;
    let got = [&dirac.verdict, &spinor_laplacian.verdict, &pforms.verdict, &marked_length.verdict, &weak_length.verdict];
    let matches = got.iter().zip(expected).all(|(g, e)| g.as_str() == e);
    Ok(Table1Row { example, dim: a.dim(), dirac, spinor_laplacian, pforms, marked_length, weak_length, expected, matches })
}

/// Reruns every comparison behind the isospectrality table.
pub fn table1_report(cap: u64, lcap: i64) -> Result<Table1Report> {
    let mut rows = Vec::new();

    let a = mjh(6, 0, 4)?;
    let b = mjh(6, 1, 3)?;
    let pair = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[1; 6])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[1; 6])?)),
    );
    rows.push(row("4.3 (i)", &a, &b, &[pair], None, ["Yes", "Yes", "No", "No", "No"], cap, lcap)?);

    let a = mjh(4, 0, 2)?;
    let b = mjh(4, 1, 1)?;
    let d = [1, 1, 1, -1];
    let pair = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &d)?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &d)?)),
    );
    rows.push(row("4.3 (iii)", &a, &b, &[pair], None, ["Yes", "Yes", "Yes (p odd)", "No", "No"], cap, lcap)?);

    let a = lookup("example4.4:gamma")?;
    let b = lookup("example4.4:gamma-prime")?;
    let pair = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[1, 1, 1, 1, 1, 1, -1])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[-1, 1, 1, 1, 1, 1, 1])?)),
    );
    rows.push(row("4.4 (i)", &a, &b, &[pair], None, ["No", "Yes", "No", "No", "No"], cap, lcap)?);

    let a = lookup("table2:m1")?;
    let b = lookup("table2:m1-prime")?;
    let same = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[-1, -1, -1, -1])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[-1, -1, -1, -1])?)),
    );
    let diff = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[1, -1, 1, -1])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[-1, -1, -1, 1])?)),
    );
    rows.push(row("4.5 (i)", &a, &b, &[same, diff], None, ["Yes/No", "Yes/No", "Yes", "Yes", "Yes"], cap, lcap)?);

    let a = lookup("table2:m2-tilde")?;
    let b = lookup("table2:m2-tilde-prime")?;
    let same = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[1, 1, -1, -1, 1, 1])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[1, -1, -1, 1, 1, 1])?)),
    );
    let diff = (
        Subject::new(a.clone(), Some(spin_with_delta_sigma(&a, &[1, 1, -1, -1, 1, 1])?)),
        Subject::new(b.clone(), Some(spin_with_delta_sigma(&b, &[1, -1, 1, 1, 1, 1])?)),
    );
    let la = lookup("table2:m2")?;
    let lb = lookup("table2:m2-prime")?;
    rows.push(row("4.5 (ii)", &a, &b, &[same, diff], Some((&la, &lb)), ["Yes/No", "Yes/No", "Yes", "No", "Yes"], cap, lcap)?);

    Ok(Table1Report { max_four_mu_sq: cap, length_cap: lcap, rows })
}

impl Table1Report {
    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "| D_rho | Delta_s | Delta_p | [L] | L | Ex. | dim | matches |\n|---|---|---|---|---|---|---|---|\n"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                r.dirac.verdict,
                r.spinor_laplacian.verdict,
                r.pforms.verdict,
                r.marked_length.verdict,
                r.weak_length.verdict,
                r.example,
                r.dim,
                yes_no(r.matches)
            ));
        }
        out.push_str(&format!(
            "\nYes verdicts are bounded checks: 4mu^2 <= {}, length^2 <= {}.\n",
            self.max_four_mu_sq, self.length_cap
        ));
        out
    }
}
