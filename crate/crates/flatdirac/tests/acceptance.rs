use flatdirac::clifford::{spin_character, CharacterKind, CliffordElement, TorusAngles};
use flatdirac::dirac::{dirac_spectrum, z2k_spectrum, HolonomyCharacter, SpectrumTable};
use flatdirac::eta::{eta_partial_sum, eta_z2k, hurwitz_zeta};
use flatdirac::families::{doubling, lookup, mjh, mjh_closed, sunada_numbers, z2_family_indices, REGISTRY_NAMES};
use flatdirac::hodge::pform_spectrum;
use flatdirac::isospec::{compare_spectra, length_spectrum, table1_report, SpectrumKind, Subject};
use flatdirac::oracle::{build_spin_rep, cross_check_group, sigma_sign, sigma_sign_exact};
use flatdirac::quadratic::Rat;
use flatdirac::spin::{count_spin_structures, enumerate_spin_structures, SpinStructure};
use flatdirac::zp::{zp_eta, zp_harmonic};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

const ETA_TABLE: [(u64, i64, i64); 51] = [
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

const HARMONIC: [(u64, u64); 11] = [
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

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("runtime {:.2} s exceeds {} s", elapsed.as_secs_f64(), limit))
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn c1_eta_table() -> Outcome {
    let t = Instant::now();
    let mut wrong = Vec::new();
    for &(p, a, b) in &ETA_TABLE {
        let d = if p == 3 { 3 } else { 1 };
        let want = (Rat::new(a, d), Rat::new(b, d));
        let got = zp_eta(p, 1.0).map_err(e)?;
        if got != want {
            wrong.push(format!("p = {}: computed ({}, {}), table ({}, {})", p, got.0, got.1, want.0, want.1));
        }
    }
    within(t.elapsed(), 5.0)?;
    ensure(wrong.is_empty(), || format!("{} of 51 rows differ: {}", wrong.len(), wrong.join("; ")))?;
    Ok("51 rows exact".into())
}

fn c2_harmonic() -> Outcome {
    let t = Instant::now();
    for &(p, d) in &HARMONIC {
        let got = zp_harmonic(p).map_err(e)?;
        ensure(got == d, || format!("p = {}: {} vs {}", p, got, d))?;
    }
    within(t.elapsed(), 1.0)?;
    Ok("11 values for p <= 71".into())
}

fn remark35_pair() -> Result<(flatdirac::group::BieberbachGroup, SpinStructure, SpinStructure), String> {
    let g = lookup("remark3.5").map_err(e)?;
    let p = SpinStructure::new(&g, vec![1, 1, -1], vec![1]).map_err(e)?;
    let m = SpinStructure::new(&g, vec![1, 1, -1], vec![-1]).map_err(e)?;
    Ok((g, p, m))
}

fn c3_remark35() -> Outcome {
    let (g, p, m) = remark35_pair()?;
    let rho = HolonomyCharacter::trivial(&g);
    let rp = eta_z2k(&g, &p, &rho, &[5.0]).map_err(e)?;
    let rm = eta_z2k(&g, &m, &rho, &[5.0]).map_err(e)?;
    ensure(rp.eta_at_0 == Rat::from_integer(1), || format!("eta(0) for plus = {}", rp.eta_at_0))?;
    ensure(rm.eta_at_0 == Rat::from_integer(-1), || format!("eta(0) for minus = {}", rm.eta_at_0))?;
    let table = z2k_spectrum(&g, &p, &rho, 10_000).map_err(e)?;
    let ps = eta_partial_sum(&table, 5.0, 0).map_err(e)?;
    let err = (ps - rp.samples[0].1).abs();
    ensure(err < 1e-8, || format!("partial sum at s = 5 off by {:e}", err))?;
    Ok(format!("eta(0) = +1 / -1, |partial - closed| = {:.1e} at s = 5", err))
}

fn c4_oracle() -> Outcome {
    let t = Instant::now();
    let mut checks = 0;
    let mut groups = 0;
    for name in REGISTRY_NAMES {
        let g = lookup(name).map_err(e)?;
        if g.dim() > 7 {
            continue;
        }
        groups += 1;
        for c in cross_check_group(&g, 40).map_err(e)? {
            checks += 1;
            if let Some(m) = c.mismatches.first() {
                return Err(format!(
                    "{} delta {:?} sigma {:?} {} character, {} path at 4mu^2 = {}: formula {:?}, oracle {:?}",
                    name, c.delta, c.sigma, c.character, m.path, m.four_mu_sq, m.formula, m.brute
                ));
            }
        }
    }
    within(t.elapsed(), 60.0)?;
    ensure(checks > 0, || "no structures checked".into())?;
    Ok(format!("{} groups, {} (structure, character) pairs, shells <= 40", groups, checks))
}

fn c5_mjh() -> Outcome {
    for n in 3..=10 {
        let mut seen = BTreeMap::new();
        for (j, h) in z2_family_indices(n, false) {
            let g = mjh(n, j, h).map_err(e)?;
            let s = pform_spectrum(&g, 0, 8).map_err(e)?;
            let d1 = *s.get(&4).unwrap_or(&0) as i64;
            let d2 = *s.get(&8).unwrap_or(&0) as i64;
            ensure(d1 == mjh_closed::d01(n, j, h) && d2 == mjh_closed::d02(n, j, h), || {
                format!("M_{{{},{}}} in n = {}: ({}, {}) vs closed form ({}, {})", j, h, n, d1, d2, mjh_closed::d01(n, j, h), mjh_closed::d02(n, j, h))
            })?;
            if let Some(prev) = seen.insert((d1, d2), (j, h)) {
                return Err(format!("n = {}: M_{:?} and M_{:?} share (d01, d02)", n, prev, (j, h)));
            }
        }
        if n % 2 == 0 {
            let t = n / 2;
            let members: Vec<_> = (0..=t).map(|j| (j, t - j)).filter(|&(j, h)| 2 * j + h < n).collect();
            for p in (1..=n).step_by(2) {
                let reference = pform_spectrum(&mjh(n, members[0].0, members[0].1).map_err(e)?, p, 100).map_err(e)?;
                for &(j, h) in &members[1..] {
                    let s = pform_spectrum(&mjh(n, j, h).map_err(e)?, p, 100).map_err(e)?;
                    ensure(s == reference, || format!("n = {}: M_{{{},{}}} not {}-isospectral to M_{:?}", n, j, h, p, members[0]))?;
                }
            }
        }
    }
    Ok("n = 3..10 closed forms, separation and odd-p isospectrality".into())
}

fn c6_example44() -> Outcome {
    let a = lookup("example4.4:gamma").map_err(e)?;
    let b = lookup("example4.4:gamma-prime").map_err(e)?;
    let find = |g: &flatdirac::group::BieberbachGroup, d: &[i8]| -> Result<SpinStructure, String> {
        enumerate_spin_structures(g)
            .map_err(e)?
            .into_iter()
            .find(|x| x.delta == d)
            .ok_or_else(|| format!("no structure with delta {:?}", d))
    };
    let sa = Subject::new(a.clone(), Some(find(&a, &[1, 1, 1, 1, 1, 1, -1])?));
    let sb = Subject::new(b.clone(), Some(find(&b, &[-1, 1, 1, 1, 1, 1, 1])?));
    let v = compare_spectra(&sa, &sb, &[SpectrumKind::Dirac, SpectrumKind::SpinorLaplacian], 100).map_err(e)?;
    ensure(v[1].equal, || format!("spinor Laplacian differs: {}", v[1].label()))?;
    ensure(!v[0].equal, || "Dirac spectra agree".into())?;
    let d = v[0].first_divergence.as_ref().unwrap();
    ensure(d.four_mu_sq == 1, || format!("first divergence at 4mu^2 = {}", d.four_mu_sq))?;
    let rho = HolonomyCharacter::trivial(&a);
    let ta = dirac_spectrum(&a, sa.spin.as_ref().unwrap(), &rho, 100).map_err(e)?;
    let tb = dirac_spectrum(&b, sb.spin.as_ref().unwrap(), &HolonomyCharacter::trivial(&b), 100).map_err(e)?;
    ensure(ta.asymmetric && !tb.asymmetric, || "expected asymmetric vs symmetric".into())?;
    Ok(format!("divergence at mu = 1/2: {} vs {}", d.left, d.right))
}

fn c7_table1() -> Outcome {
    let r = table1_report(100, 25).map_err(e)?;
    for row in &r.rows {
        ensure(row.matches, || {
            format!(
                "row {}: got [{}, {}, {}, {}, {}], expected {:?}",
                row.example,
                row.dirac.verdict,
                row.spinor_laplacian.verdict,
                row.pforms.verdict,
                row.marked_length.verdict,
                row.weak_length.verdict,
                row.expected
            )
        })?;
    }
    let a = length_spectrum(&lookup("table2:m2").map_err(e)?, 25).map_err(e)?;
    let b = length_spectrum(&lookup("table2:m2-prime").map_err(e)?, 25).map_err(e)?;
    ensure(a.weak == b.weak, || "M2 / M2' weak length spectra differ".into())?;
    ensure(a.marked != b.marked, || "M2 / M2' marked length spectra agree".into())?;
    Ok(format!("{} rows reproduced; M2 / M2' weak equal, marked differ", r.rows.len()))
}

fn spectrum_key(t: &SpectrumTable) -> (u64, Vec<(u64, u64, u64)>) {
    (t.d0, t.entries.iter().map(|x| (x.four_mu_sq, x.d_plus, x.d_minus)).collect())
}

fn c8_doubling() -> Outcome {
    let mut by_dim: BTreeMap<usize, (u64, Vec<(u64, u64, u64)>)> = BTreeMap::new();
    let mut doubled = 0;
    for name in REGISTRY_NAMES.iter().filter(|n| n.starts_with("hw:")) {
        let g = lookup(name).map_err(e)?;
        let n = g.dim();
        if n == 5 {
            let c = count_spin_structures(&g).map_err(e)?;
            ensure(c == 0, || format!("{} admits {} spin structures", name, c))?;
        }
        let d = doubling(&g).map_err(e)?;
        let sg = sunada_numbers(&g).map_err(e)?;
        let sd = sunada_numbers(&d).map_err(e)?;
        for (&(a, b), &c) in &sd.counts {
            if a % 2 == 1 || b % 2 == 1 {
                ensure(c == 0, || format!("{}: c_{{{},{}}} = {} in the double", name, a, b, c))?;
            } else {
                ensure(c == sg.get(a / 2, b / 2), || format!("{}: c_{{{},{}}} mismatch", name, a, b))?;
            }
        }
        ensure(sd.total() == sg.total(), || format!("{}: holonomy order changed", name))?;
        let trivial: Vec<SpinStructure> =
            enumerate_spin_structures(&d).map_err(e)?.into_iter().filter(|x| x.is_trivial_type()).collect();
        ensure(trivial.len() == 1 << (n - 1), || format!("{}: {} trivial-type structures", name, trivial.len()))?;
        let rho = HolonomyCharacter::trivial(&d);
        use rayon::prelude::*;
        let tables: Vec<_> = trivial
            .par_iter()
            .map(|eps| dirac_spectrum(&d, eps, &rho, 100).map(|t| spectrum_key(&t)))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for t in &tables {
            ensure(t.0 == 2, || format!("{}: d0 = {}", name, t.0))?;
            let first = by_dim.entry(n).or_insert_with(|| t.clone());
            ensure(first == t, || format!("{}: doubled spectra differ", name))?;
        }
        doubled += 1;
    }
    Ok(format!("{} HW groups doubled; spectra identical per dimension with d0 = 2", doubled))
}

fn c9_appendix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 2..=8 {
        let rep = build_spin_rep(n).map_err(e)?;
        rep.check_relations().map_err(e)?;
        for _ in 0..100 {
            let angles: Vec<f64> = (0..n / 2).map(|_| rng.random_range(-PI..PI)).collect();
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            let x = TorusAngles::new(n, angles, sign).map_err(e)?;
            let l = rep.of_torus(&x);
            let full = spin_character(&x, CharacterKind::Full).map_err(e)?;
            ensure((l.trace() - full).norm() < 1e-10, || format!("n = {}: full character off", n))?;
            if n % 2 == 0 {
                for (plus, kind) in [(true, CharacterKind::Plus), (false, CharacterKind::Minus)] {
                    let ch = spin_character(&x, kind).map_err(e)?;
                    let tr = rep.half_trace(&l, plus).map_err(e)?;
                    ensure((tr - ch).norm() < 1e-10, || format!("n = {}: half-spin character off", n))?;
                }
            }
        }
    }
    for m in 1..=4 {
        let n = 2 * m;
        let rep = build_spin_rep(n).map_err(e)?;
        let want = Complex64::new(0.0, 1.0).powi(m as i32) * 2f64.powi(m as i32 - 1);
        let g = CliffordElement::g_h(n, m);
        for (elem, s) in [(g.clone(), 1.0), (g.neg(), -1.0)] {
            let l = rep.of_element(&elem);
            let p = rep.half_trace(&l, true).map_err(e)?;
            let q = rep.half_trace(&l, false).map_err(e)?;
            ensure((p - want * s).norm() < 1e-10 && (q + want * s).norm() < 1e-10, || format!("m = {}: g_m half traces {} {}", m, p, q))?;
        }
        for h in 0..m {
            let l = rep.of_element(&CliffordElement::g_h(n, h));
            let p = rep.half_trace(&l, true).map_err(e)?;
            let q = rep.half_trace(&l, false).map_err(e)?;
            ensure((p - q).norm() < 1e-10, || format!("g_{} not self-conjugate in dimension {}", h, n))?;
        }
    }
    let steps = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];
    let mut tested = 0;
    while tested < 50 {
        let n = [3usize, 5, 7][rng.random_range(0..3)];
        let rep = build_spin_rep(n).map_err(e)?;
        let angles: Vec<f64> = (0..n / 2).map(|_| steps[rng.random_range(0..steps.len())] * PI / 4.0).collect();
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        let lift = TorusAngles::new(n, angles.clone(), sign).map_err(e)?.to_clifford().ok_or("angles not multiples of pi/4")?;
        let x = TorusAngles::new(n - 1, angles, sign).map_err(e)?;
        let plus = spin_character(&x, CharacterKind::Plus).map_err(e)?;
        let minus = spin_character(&x, CharacterKind::Minus).map_err(e)?;
        if (plus - minus).norm() < 1e-9 {
            continue;
        }
        let alpha = rng.random_range(1..=20) as i64;
        let mut u = vec![0.0; n];
        let mut ur = vec![Rat::from_integer(0); n];
        u[n - 1] = alpha as f64 / 2.0;
        ur[n - 1] = Rat::new(alpha, 2);
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        let negr: Vec<Rat> = ur.iter().map(|v| -*v).collect();
        let a = sigma_sign(&rep, &u, &x, &lift).map_err(e)?;
        let b = sigma_sign(&rep, &neg, &x, &lift).map_err(e)?;
        ensure(a == -b, || format!("sigma not antisymmetric in n = {}", n))?;
        let ae = sigma_sign_exact(&ur, &x, &lift).map_err(e)?;
        let be = sigma_sign_exact(&negr, &x, &lift).map_err(e)?;
        ensure(ae == a && be == b, || format!("exact and matrix sigma disagree in n = {}", n))?;
        tested += 1;
    }
    Ok("relations n <= 8, 700 character samples, g_m traces m <= 4, 50 sigma pairs".into())
}

fn c10_hurwitz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a: f64 = rng.random_range(0.001..=1.0);
        let z = hurwitz_zeta(0.0, a).map_err(e)?;
        ensure((z - (0.5 - a)).abs() < 1e-12, || format!("zeta(0, {}) = {}", a, z))?;
    }
    let mut direct = 0.0;
    let n = 10_000_000u64;
    for j in (1..=n).rev() {
        direct += 1.0 / (j as f64 * j as f64);
    }
    direct += 1.0 / n as f64 - 0.5 / (n as f64 * n as f64);
    let z2 = hurwitz_zeta(2.0, 1.0).map_err(e)?;
    ensure((z2 - direct).abs() < 1e-10, || format!("zeta(2, 1) = {} vs {}", z2, direct))?;
    let (g, p, _) = remark35_pair()?;
    let rho = HolonomyCharacter::trivial(&g);
    let table = z2k_spectrum(&g, &p, &rho, 10_000).map_err(e)?;
    let r = eta_z2k(&g, &p, &rho, &[5.0, 8.0, 12.0]).map_err(e)?;
    let mut worst: f64 = 0.0;
    for &(s, v) in &r.samples {
        let ps = eta_partial_sum(&table, s, 0).map_err(e)?;
        worst = worst.max((ps - v).abs());
    }
    ensure(worst < 1e-8, || format!("closed form vs partial sums off by {:e}", worst))?;
    Ok(format!("zeta(0, a) x20, zeta(2, 1), eta at s = 5, 8, 12 within {:.1e}", worst))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Z_p eta table", c1_eta_table),
        ("Z_p harmonic spinors", c2_harmonic),
        ("n = 3 eta invariants", c3_remark35),
        ("oracle equivalence", c4_oracle),
        ("M_{j,h} function spectra", c5_mjh),
        ("Dirac vs spinor Laplacian pair", c6_example44),
        ("isospectrality table", c7_table1),
        ("HW doubling", c8_doubling),
        ("Clifford and sigma suite", c9_appendix),
        ("Hurwitz zeta and eta series", c10_hurwitz),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS {:>2} {} [{:.2} s]: {}", i + 1, name, secs, msg),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} [{:.2} s]: {}", i + 1, name, secs, msg)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
