//! Command-line front end.

use crate::dirac::{dirac_spectrum, spinor_laplacian_spectrum, HolonomyCharacter, SpectrumTable};
use crate::error::{Error, Result};
use crate::eta::eta_z2k;
use crate::families::{fingerprint, lookup, mjh_closed, z2_family, REGISTRY_NAMES};
use crate::group::{point_group_summary, BieberbachGroup};
use crate::hodge::{betti_vector, pform_spectrum, pform_spectrum_csv};
use crate::isospec::{compare_spectra, length_spectrum, table1_report, SpectrumKind, Subject};
use crate::oracle::{cross_check_group, MAX_ORACLE_DIM};
use crate::spin::{enumerate_spin_structures, SpinStructure};
use crate::zp::{zp_table, zp_table_csv, zp_table_markdown};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

#[derive(Parser, Debug)]
#[command(name = "flatdirac", version, about = "Spectra of compact flat spin manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Md,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Registry name (e.g. `example4.4:gamma`, `mjh:7:1:2`, `torus:3`) or JSON file
    #[arg(long)]
    pub group: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct SpinArgs {
    /// `plus`, `minus`, an index into `spin-list`, a JSON object or a JSON file
    #[arg(long, default_value = "0")]
    pub spin: String,
    /// Character file (`{"generator_signs": [...]}` or `{"dim": d, "values": [[re, im], ...]}`)
    #[arg(long)]
    pub rho: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Holonomy, Betti numbers and spin structure count of a group
    Describe(GroupArgs),
    /// All spin structures of a group
    SpinList(GroupArgs),
    /// Twisted Dirac spectrum
    DiracSpec {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        s: SpinArgs,
        #[arg(long = "max-4mu2", default_value_t = 40)]
        max_key: u64,
    },
    /// Eta invariant and eta series samples (Z_2^k holonomy)
    Eta {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        s: SpinArgs,
        /// Points at which to evaluate the eta series
        #[arg(long = "s", value_delimiter = ',')]
        samples: Vec<f64>,
    },
    /// Hodge Laplacian spectrum on p-forms
    HodgeSpec {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long = "max-4mu2", default_value_t = 40)]
        max_key: u64,
    },
    /// Compare two manifolds spectrum by spectrum
    Compare {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        s: SpinArgs,
        #[arg(long)]
        group_b: String,
        #[arg(long, default_value = "0")]
        spin_b: String,
        #[arg(long)]
        rho_b: Option<String>,
        /// Comma-separated: dirac, spinor-laplacian, functions, pform:P, length
        #[arg(long, value_delimiter = ',', default_value = "dirac,spinor-laplacian,functions")]
        kinds: Vec<String>,
        #[arg(long = "max-4mu2", default_value_t = 100)]
        max_key: u64,
        #[arg(long, default_value_t = 25)]
        length_cap: i64,
    },
    /// Eta invariants and harmonic spinors of the Z_p manifolds
    ZpTable {
        #[arg(long, default_value_t = 503)]
        pmax: u64,
        /// Exact harmonic spinor counts for every row
        #[arg(long)]
        extended: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// The M_{j,h} family in dimension n, or the registry with fingerprints
    Families {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        orientable_only: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Cross-check closed formulas against the matrix model
    OracleCheck {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long = "max-4mu2", default_value_t = 40)]
        max_key: u64,
    },
    /// Recompute the isospectrality table
    Table1 {
        #[arg(long = "max-4mu2", default_value_t = 100)]
        max_key: u64,
        #[arg(long, default_value_t = 25)]
        length_cap: i64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn read_arg_or_file(s: &str) -> Result<String> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(s.to_string());
    }
    std::fs::read_to_string(s).map_err(|e| Error::Parse(format!("{}: {}", s, e)))
}

/// Resolves a registry name or JSON group file.
pub fn load_group(spec: &str) -> Result<BieberbachGroup> {
    if spec.trim_start().starts_with('{') || Path::new(spec).is_file() {
        return BieberbachGroup::from_json(&read_arg_or_file(spec)?);
    }
    lookup(spec)
}

/// Resolves `plus`, `minus`, an index or JSON into a spin structure.
pub fn load_spin(g: &BieberbachGroup, spec: &str) -> Result<SpinStructure> {
    let all = || enumerate_spin_structures(g);
    match spec {
        "plus" | "minus" => {
            let want = if spec == "plus" { 1.0 } else { -1.0 };
            let rho = HolonomyCharacter::trivial(g);
            for e in all()? {
                let r = eta_z2k(g, &e, &rho, &[])?;
                if crate::shells::rat_f64(r.eta_at_0) * want > 0.0 {
                    return Ok(e);
                }
            }
            Err(Error::InvalidSpinStructure(format!("no spin structure with eta of sign {}", spec)))
        }
        _ => {
            if let Ok(i) = spec.parse::<usize>() {
                let v = all()?;
                if v.is_empty() {
                    return Err(Error::InvalidSpinStructure("group admits no spin structure".into()));
                }
                return v.get(i).cloned().ok_or_else(|| {
                    Error::InvalidSpinStructure(format!("index {} out of range (0..{})", i, v.len()))
                });
            }
            SpinStructure::from_json(g, &read_arg_or_file(spec)?)
        }
    }
}

pub fn load_rho(g: &BieberbachGroup, spec: Option<&str>) -> Result<HolonomyCharacter> {
    match spec {
        None => Ok(HolonomyCharacter::trivial(g)),
        Some("nontrivial") => HolonomyCharacter::nontrivial_linear(g)
            .ok_or_else(|| Error::InvalidCharacter("no nontrivial linear character".into())),
        Some(s) => HolonomyCharacter::from_json(g, &read_arg_or_file(s)?),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn md_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    out
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",") + "\n";
    for r in rows {
        out.push_str(&(r.join(",") + "\n"));
    }
    out
}

fn tabular(format: Format, header: &[&str], rows: &[Vec<String>], json: Value) -> String {
    match format {
        Format::Json => pretty(&json),
        Format::Csv => csv_table(header, rows),
        Format::Md => md_table(header, rows),
    }
}

fn describe(g: &BieberbachGroup, format: Format) -> Result<String> {
    let betti = betti_vector(g)?;
    let spin = crate::spin::count_spin_structures(g)?;
    let summary = point_group_summary(g);
    let cosets: Vec<Value> = g
        .cosets()
        .iter()
        .zip(&summary)
        .map(|(c, s)| json!({"element": c.to_string(), "n_b": s.n_b, "det": c.matrix.det()}))
        .collect();
    let j = json!({
        "n": g.dim(),
        "holonomy_order": g.order(),
        "orientable": g.is_orientable(),
        "diagonal": g.is_diagonal(),
        "z2_rank": g.z2_rank(),
        "betti": betti,
        "spin_structures": spin,
        "cosets": cosets,
        "group": serde_json::from_str::<Value>(&g.to_json()).expect("group json"),
    });
    let rows = vec![
        vec!["n".into(), g.dim().to_string()],
        vec!["holonomy_order".into(), g.order().to_string()],
        vec!["orientable".into(), g.is_orientable().to_string()],
        vec!["diagonal".into(), g.is_diagonal().to_string()],
        vec!["z2_rank".into(), g.z2_rank().map(|k| k.to_string()).unwrap_or_else(|| "-".into())],
        vec!["betti".into(), format!("{:?}", betti).replace(',', "")],
        vec!["spin_structures".into(), spin.to_string()],
    ];
    Ok(tabular(format, &["field", "value"], &rows, j))
}

fn spin_list(g: &BieberbachGroup, format: Format) -> Result<String> {
    let all = enumerate_spin_structures(g)?;
    let fmt = |v: &[i8]| v.iter().map(|x| if *x > 0 { "+" } else { "-" }).collect::<String>();
    let rows: Vec<Vec<String>> = all
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![i.to_string(), fmt(&e.delta), fmt(&e.sigma), e.is_trivial_type().to_string(), e.j_minus().len().to_string()]
        })
        .collect();
    let j: Vec<Value> = all
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({"index": i, "delta": e.delta, "sigma": e.sigma, "trivial_type": e.is_trivial_type(), "j_minus": e.j_minus().len()})
        })
        .collect();
    Ok(tabular(format, &["index", "delta", "sigma", "trivial_type", "j_minus"], &rows, Value::Array(j)))
}

fn spectrum_out(t: &SpectrumTable, format: Format) -> String {
    let mut rows = Vec::new();
    if t.d0 > 0 {
        rows.push(vec!["0".into(), String::new(), String::new(), t.d0.to_string()]);
    }
    for (e, (_, l)) in t.entries.iter().zip(spinor_laplacian_spectrum(t)) {
        rows.push(vec![e.four_mu_sq.to_string(), e.d_plus.to_string(), e.d_minus.to_string(), l.to_string()]);
    }
    match format {
        Format::Json => t.to_json() + "\n",
        Format::Csv => csv_table(&["four_mu_sq", "d_plus", "d_minus", "laplacian"], &rows),
        Format::Md => {
            let mut s = md_table(&["4mu^2", "d+", "d-", "spinor Laplacian"], &rows);
            s.push_str(&format!("\nharmonic spinors: {}; asymmetric: {}\n", t.d0, t.asymmetric));
            s
        }
    }
}

fn parse_kind(s: &str) -> Result<Option<SpectrumKind>> {
    Ok(Some(match s {
        "dirac" => SpectrumKind::Dirac,
        "spinor-laplacian" => SpectrumKind::SpinorLaplacian,
        "functions" => SpectrumKind::Functions,
        "length" => return Ok(None),
        _ => {
            let p = s
                .strip_prefix("pform:")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown spectrum kind {}", s)))?;
            SpectrumKind::Pform(p)
        }
    }))
}

fn families(n: Option<usize>, orientable_only: bool, format: Format) -> Result<String> {
    match n {
        Some(n) => {
            let fam = z2_family(n, orientable_only)?;
            let mut rows = Vec::new();
            let mut js = Vec::new();
            for ((j, h), g) in &fam {
                let betti = betti_vector(g)?;
                let spin = crate::spin::count_spin_structures(g)?;
                let d01 = mjh_closed::d01(n, *j, *h);
                let d02 = mjh_closed::d02(n, *j, *h);
                rows.push(vec![
                    j.to_string(),
                    h.to_string(),
                    mjh_closed::l(n, *j, *h).to_string(),
                    format!("{:?}", betti).replace(',', ""),
                    d01.to_string(),
                    d02.to_string(),
                    spin.to_string(),
                ]);
                js.push(json!({"j": j, "h": h, "l": mjh_closed::l(n, *j, *h), "betti": betti, "d01": d01, "d02": d02, "spin_structures": spin}));
            }
            let mut pairs: Vec<(i64, i64)> = fam.iter().map(|((j, h), _)| (mjh_closed::d01(n, *j, *h), mjh_closed::d02(n, *j, *h))).collect();
            pairs.sort();
            let before = pairs.len();
            pairs.dedup();
            let j = json!({"n": n, "members": js, "separated_by_d01_d02": pairs.len() == before});
            Ok(tabular(format, &["j", "h", "l", "betti", "d01", "d02", "spin_structures"], &rows, j))
        }
        None => {
            let mut rows = Vec::new();
            let mut js = Vec::new();
            for name in REGISTRY_NAMES {
                let g = lookup(name)?;
                let f = fingerprint(&g)?;
                rows.push(vec![
                    name.to_string(),
                    g.dim().to_string(),
                    g.order().to_string(),
                    format!("{:?}", f.betti).replace(',', ""),
                    f.spin_structures.to_string(),
                ]);
                js.push(json!({"name": name, "n": g.dim(), "holonomy_order": g.order(), "fingerprint": f}));
            }
            Ok(tabular(format, &["name", "n", "holonomy_order", "betti", "spin_structures"], &rows, Value::Array(js)))
        }
    }
}

/// Runs one parsed command and returns its output.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Describe(a) => describe(&load_group(&a.group)?, a.format),
        Command::SpinList(a) => spin_list(&load_group(&a.group)?, a.format),
        Command::DiracSpec { g, s, max_key } => {
            let grp = load_group(&g.group)?;
            let eps = load_spin(&grp, &s.spin)?;
            let rho = load_rho(&grp, s.rho.as_deref())?;
            Ok(spectrum_out(&dirac_spectrum(&grp, &eps, &rho, *max_key)?, g.format))
        }
        Command::Eta { g, s, samples } => {
            let grp = load_group(&g.group)?;
            let eps = load_spin(&grp, &s.spin)?;
            let rho = load_rho(&grp, s.rho.as_deref())?;
            let r = eta_z2k(&grp, &eps, &rho, samples)?;
            let rows: Vec<Vec<String>> = std::iter::once(vec!["0".to_string(), r.eta_at_0.to_string()])
                .chain(r.samples.iter().map(|(s, v)| vec![s.to_string(), format!("{:.15e}", v)]))
                .collect();
            match g.format {
                Format::Json => Ok(r.to_json() + "\n"),
                f => Ok(tabular(f, &["s", "eta"], &rows, Value::Null)),
            }
        }
        Command::HodgeSpec { g, p, max_key } => {
            let grp = load_group(&g.group)?;
            let spec = pform_spectrum(&grp, *p, *max_key)?;
            let rows: Vec<Vec<String>> = spec.iter().map(|(k, d)| vec![k.to_string(), d.to_string()]).collect();
            match g.format {
                Format::Csv => Ok(pform_spectrum_csv(&spec)),
                f => {
                    let j = json!({"p": p, "betti": crate::hodge::betti(&grp, *p)?, "spectrum": spec.iter().map(|(k, d)| [*k, *d]).collect::<Vec<_>>()});
                    Ok(tabular(f, &["four_mu_sq", "multiplicity"], &rows, j))
                }
            }
        }
        Command::Compare { g, s, group_b, spin_b, rho_b, kinds, max_key, length_cap } => {
            let a = load_group(&g.group)?;
            let b = load_group(group_b)?;
            let parsed: Vec<Option<SpectrumKind>> = kinds.iter().map(|k| parse_kind(k)).collect::<Result<_>>()?;
            let needs_spin = parsed.iter().flatten().any(|k| matches!(k, SpectrumKind::Dirac | SpectrumKind::SpinorLaplacian));
            let (ea, eb) = if needs_spin { (Some(load_spin(&a, &s.spin)?), Some(load_spin(&b, spin_b)?)) } else { (None, None) };
            let mut sa = Subject::new(a.clone(), ea);
            sa.rho = load_rho(&a, s.rho.as_deref())?;
            let mut sb = Subject::new(b.clone(), eb);
            sb.rho = load_rho(&b, rho_b.as_deref())?;
            let spectral: Vec<SpectrumKind> = parsed.iter().flatten().copied().collect();
            let verdicts = compare_spectra(&sa, &sb, &spectral, *max_key)?;
            let mut rows: Vec<Vec<String>> =
                verdicts.iter().map(|v| vec![v.kind.to_string(), if v.equal { "Yes" } else { "No" }.into(), v.label()]).collect();
            let mut lengths = Value::Null;
            if parsed.iter().any(|k| k.is_none()) {
                let la = length_spectrum(&a, *length_cap)?;
                let lb = length_spectrum(&b, *length_cap)?;
                let weak = la.weak == lb.weak;
                let marked = la.marked == lb.marked;
                let yn = |x: bool| if x { "Yes" } else { "No" };
                rows.push(vec!["weak_length".into(), yn(weak).into(), format!("length^2 <= {}", length_cap)]);
                rows.push(vec!["marked_length".into(), yn(marked).into(), format!("length^2 <= {}", length_cap)]);
                lengths = json!({"cap": length_cap, "weak_equal": weak, "marked_equal": marked, "left": la, "right": lb});
            }
            let j = json!({"max_four_mu_sq": max_key, "verdicts": verdicts, "lengths": lengths});
            Ok(tabular(g.format, &["kind", "isospectral", "detail"], &rows, j))
        }
        Command::ZpTable { pmax, extended, format } => {
            let rows = zp_table(*pmax, *extended)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&rows).expect("json")),
                Format::Csv => zp_table_csv(&rows),
                Format::Md => zp_table_markdown(&rows),
            })
        }
        Command::Families { n, orientable_only, format } => families(*n, *orientable_only, *format),
        Command::OracleCheck { g, max_key } => {
            let grp = load_group(&g.group)?;
            if grp.dim() > MAX_ORACLE_DIM {
                return Err(Error::UnsupportedDimension(grp.dim()));
            }
            let checks = cross_check_group(&grp, *max_key)?;
            let bad: usize = checks.iter().map(|c| c.mismatches.len()).sum();
            let fmt = |v: &[i8]| v.iter().map(|x| if *x > 0 { "+" } else { "-" }).collect::<String>();
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![fmt(&c.delta), fmt(&c.sigma), c.character.into(), c.shells.to_string(), c.mismatches.len().to_string()])
                .collect();
            let j = json!({"max_four_mu_sq": max_key, "checks": checks, "mismatches": bad});
            let out = tabular(g.format, &["delta", "sigma", "character", "shells", "mismatches"], &rows, j);
            if bad > 0 {
                return Err(Error::Internal(format!("{} oracle mismatches\n{}", bad, out)));
            }
            Ok(out)
        }
        Command::Table1 { max_key, length_cap, format } => {
            let r = table1_report(*max_key, *length_cap)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&r).expect("json")),
                Format::Md => r.to_markdown(),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = r
                        .rows
                        .iter()
                        .map(|x| {
                            vec![
                                x.example.to_string(),
                                x.dim.to_string(),
                                x.dirac.verdict.clone(),
                                x.spinor_laplacian.verdict.clone(),
                                x.pforms.verdict.clone(),
                                x.marked_length.verdict.clone(),
                                x.weak_length.verdict.clone(),
                                x.matches.to_string(),
                            ]
                        })
                        .collect();
                    csv_table(&["example", "dim", "dirac", "spinor_laplacian", "pforms", "marked_length", "weak_length", "matches"], &rows)
                }
            })
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("FLATDIRAC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{}", text);
            } else {
                let _ = write!(err, "{}", text);
            }
            return code;
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(s) => {
            let _ = out.write_all(s.as_bytes());
            0
        }
        Err(e) => {
            let j = json!({"error": e.code(), "message": e.to_string()});
            let _ = writeln!(err, "{}", j);
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = run(std::iter::once("flatdirac").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn describe_torus() {
        let (c, o, _) = call(&["describe", "--group", "torus:3"]);
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&o).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["holonomy_order"], 1);
        assert_eq!(v["spin_structures"], 8);
        let g = BieberbachGroup::from_json(&v["group"].to_string()).unwrap();
        assert_eq!(g, BieberbachGroup::torus(3).unwrap());
    }

    #[test]
    fn eta_remark35() {
        let (c, o, _) = call(&["eta", "--group", "remark3.5", "--spin", "plus"]);
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&o).unwrap();
        assert_eq!(v["eta0"], "1");
        let (_, o, _) = call(&["eta", "--group", "remark3.5", "--spin", "minus"]);
        let v: Value = serde_json::from_str(&o).unwrap();
        assert_eq!(v["eta0"], "-1");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["describe", "--group", "torus:3", "--bogus"]).0, 2);
        let (c, _, e) = call(&["describe", "--group", "nosuch"]);
        assert_eq!(c, 1);
        let v: Value = serde_json::from_str(e.trim()).unwrap();
        assert_eq!(v["error"], "unknown_group");
    }

    #[test]
    fn spin_round_trip() {
        let g = lookup("example4.4:gamma").unwrap();
        for e in enumerate_spin_structures(&g).unwrap() {
            assert_eq!(load_spin(&g, &e.to_json()).unwrap(), e);
        }
        let (c, o, _) = call(&["spin-list", "--group", "example4.4:gamma"]);
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&o).unwrap();
        assert_eq!(v.as_array().unwrap().len(), enumerate_spin_structures(&g).unwrap().len());
    }

    #[test]
    fn deterministic_output() {
        let args = ["dirac-spec", "--group", "example4.4:gamma", "--spin", "3", "--format", "csv"];
        let a = call(&args);
        let b = call(&args);
        assert_eq!(a, b);
        assert!(a.1.starts_with("four_mu_sq,d_plus,d_minus,laplacian\n"));
    }

    #[test]
    fn zp_markdown() {
        let (c, o, _) = call(&["zp-table", "--pmax", "43", "--format", "md"]);
        assert_eq!(c, 0);
        assert!(o.contains("| 10 | 43 | -2 | 4 | 48770 |"));
    }
}
