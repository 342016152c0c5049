//! Command-line front end.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check failed,
//! 2 for usage errors and guard trips. Data goes to stdout or `--output`;
//! progress and run metadata go to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::delta::{
    check_structure_lemma, delta_eps_int, delta_eps_poly, delta_only_recursion_check,
    normalized_delta, poly_sqrt, scan_squares, DegreeProfile, DEFAULT_BIT_CAP,
};
use crate::density::{density_curve, IntegerMapSpec, DEFAULT_CHECKPOINTS};
use crate::dynamics::{
    commutes_with_rotation, conjugation_identity_suite, cyclotomic_orders, exceptional_conjugates,
    factorization_identity, parse_rational, verify_chebyshev_identity, verify_power_identity,
    IdentityCheck, RotationSign,
};
use crate::error::{Error, Result};
use crate::sieve::{
    certified_set, compare_reference_table, computed_certificates, coverage_check, coverage_rows,
    reference_certificates, SieveCertificate, REFERENCE_COVERAGE_BOUND,
};
use crate::subgroup::{
    build_branch_stabilizer, build_s_subgroup, centralizer, centralizer_level_report,
    close_under_group_ops, hausdorff_estimate, s_group_order, stab_branch_order, stab_s_index,
    BranchSpec, LogRatio,
};
use crate::tree::{aut_order, enumerate_aut, TreeAutomorphism, TreeShape, DEFAULT_ENUMERATION_LIMIT};

#[derive(Debug, Parser)]
#[command(name = "arboreal", version, about = "Exact checks for iterated preimage trees")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tree automorphism groups and their closed-form orders.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Centralizer of the group generated by portraits in FILE.
    Centralizer {
        #[arg(long)]
        generators: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Conjugation identities for x^2+kx at a given k.
    Conjugate {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
    /// Factorization, power, Chebyshev, rotation and cyclotomic checks.
    Identities {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// The (δ, ε) recursion.
    #[command(subcommand)]
    Delta(DeltaCmd),
    /// Congruence certificates for non-square δ.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Primes dividing an integer orbit.
    Density {
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        a0: i64,
        #[arg(long)]
        xmax: u64,
        /// Comma-separated bounds; defaults to powers of ten up to XMAX.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ShapeArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: usize,
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    /// |Aut|, |Stab|, |S| and the index, with enumeration when small.
    Orders(ShapeArgs),
    /// Every automorphism in portrait form.
    Enumerate(ShapeArgs),
    /// The stabilizer of the all-zeros branch.
    Stabilizer(ShapeArgs),
    /// The subgroup acting alike on subtrees m branch steps apart.
    Sgroup(ShapeArgs),
    /// [Stab : S].
    Index(ShapeArgs),
    /// log|S_n| / log|Stab_n| against the limit 1 - d^-m.
    Hausdorff {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 40)]
        nmax: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum DeltaCmd {
    /// Exact δₙ(k₀), εₙ(k₀).
    Int {
        #[arg(long, allow_hyphen_values = true)]
        k0: i64,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
        bit_cap: u64,
    },
    /// δₙ, εₙ as polynomials in k.
    Poly {
        #[arg(long)]
        nmax: usize,
    },
    /// Degree profiles, structure lemma and δ-only recursion.
    Profile {
        #[arg(long, default_value_t = 12)]
        nmax: usize,
    },
    /// Square root of the normalized δₙ.
    Sqrt {
        #[arg(long)]
        n: usize,
    },
    /// Integer squareness scan.
    Scan {
        #[arg(long, default_value_t = 2)]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 1)]
        kmin: i64,
        #[arg(long)]
        kmax: i64,
        #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
        bit_cap: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SieveCmd {
    /// Certified residues for one modulus.
    Certify {
        #[arg(long)]
        modulus: u64,
        /// Store the certificate as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Re-check a stored certificate.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Computed sets against the built-in reference rows.
    Table,
    /// Coverage of [1, B].
    Cover {
        #[arg(long)]
        bound: u64,
        /// Use fully computed sets instead of the reference rows.
        #[arg(long)]
        computed: bool,
        /// Certificate files to use instead of the built-in rows.
        #[arg(long)]
        certificates: Vec<PathBuf>,
        /// Keep searching for the first uncovered value up to this bound.
        #[arg(long)]
        search_limit: Option<u64>,
    },
}

/// A rendered result: one value per output format plus a pass flag.
struct Report {
    ok: bool,
    text: String,
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Text => Ok(self.text.clone().into_bytes()),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json value");
                s.push('\n');
                Ok(s.into_bytes())
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Parse(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                w.into_inner().map_err(|e| Error::Parse(e.to_string()))
            }
        }
    }
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("[arboreal] {}", msg.as_ref());
}

/// Parses `args` and runs one subcommand. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.global.jobs {
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = pool.install(|| dispatch(&cli.command));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let bytes = match report.render(cli.global.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if report.ok {
        0
    } else {
        eprintln!("check failed");
        1
    }
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Tree(t) => tree_cmd(t),
        Command::Centralizer { generators, level, limit } => centralizer_cmd(generators, *level, *limit),
        Command::Conjugate { k } => conjugate_cmd(k),
        Command::Identities { k, nmax } => identities_cmd(k, *nmax),
        Command::Delta(d) => delta_cmd(d),
        Command::Sieve(s) => sieve_cmd(s),
        Command::Density { map, a0, xmax, checkpoints } => density_cmd(map, *a0, *xmax, checkpoints),
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn tree_cmd(cmd: &TreeCmd) -> Result<Report> {
    match cmd {
        TreeCmd::Orders(a) => tree_orders(a),
        TreeCmd::Enumerate(a) => tree_enumerate(a),
        TreeCmd::Stabilizer(a) => tree_subgroup(a, false),
        TreeCmd::Sgroup(a) => tree_subgroup(a, true),
        TreeCmd::Index(a) => tree_index(a),
        TreeCmd::Hausdorff { d, m, nmax } => tree_hausdorff(*d, *m, *nmax),
    }
}

/// Counts from enumeration when `|Aut|` fits under the limit.
fn enumerated_orders(a: &ShapeArgs) -> Result<Option<(usize, usize, usize)>> {
    let shape = TreeShape::new(a.d, a.n)?;
    if aut_order(&shape) > a.limit.into() {
        return Ok(None);
    }
    progress(format!("enumerating {shape}"));
    let aut = enumerate_aut(shape, a.limit)?.len();
    let spec = BranchSpec::zeros(shape, a.m)?;
    let stab = build_branch_stabilizer(&spec, a.limit)?.order()?;
    let s = build_s_subgroup(&spec, a.limit)?.order()?;
    Ok(Some((aut, stab, s)))
}

fn tree_orders(a: &ShapeArgs) -> Result<Report> {
    let shape = TreeShape::new(a.d, a.n)?;
    let aut = aut_order(&shape);
    let stab = stab_branch_order(a.d, a.n);
    let s = s_group_order(a.d, a.n, a.m)?;
    let index = stab_s_index(a.d, a.n, a.m)?;
    let counted = enumerated_orders(a)?;
    let ok = counted.is_none_or(|(ea, es, esg)| {
        aut == ea.into() && stab == es.into() && s == esg.into() && &stab / &s == index
    });
    let mut text = format!(
        "{shape}, m={}\n|Aut| = {aut}\n|Stab| = {stab}\n|S| = {s}\n[Stab:S] = {index}\n",
        a.m
    );
    match counted {
        Some((ea, es, esg)) => writeln!(
            text,
            "enumerated: |Aut| = {ea}, |Stab| = {es}, |S| = {esg} ({})",
            if ok { "agree" } else { "DISAGREE" }
        )
        .unwrap(),
        None => writeln!(text, "enumeration skipped: |Aut| exceeds limit {}", a.limit).unwrap(),
    }
    let c = counted.map(|(x, y, z)| json!({"aut": x, "stab": y, "s": z}));
    Ok(Report {
        ok,
        json: json!({
            "d": a.d, "n": a.n, "m": a.m,
            "aut": aut.to_string(), "stab": stab.to_string(),
            "s": s.to_string(), "index": index.to_string(),
            "enumerated": c, "agree": ok,
        }),
        header: vec!["d", "n", "m", "aut", "stab", "s", "index", "enumerated", "agree"],
        rows: vec![vec![
            a.d.to_string(),
            a.n.to_string(),
            a.m.to_string(),
            aut.to_string(),
            stab.to_string(),
            s.to_string(),
            index.to_string(),
            counted.is_some().to_string(),
            ok.to_string(),
        ]],
        text,
    })
}

fn portrait_report(what: &str, shape: TreeShape, elements: &[TreeAutomorphism], expected: Option<String>) -> Report {
    let ok = expected
        .as_ref()
        .is_none_or(|e| *e == elements.len().to_string());
    let mut text = format!("{what} on {shape}: {} elements", elements.len());
    if let Some(e) = &expected {
        write!(text, " (closed form {e})").unwrap();
    }
    text.push('\n');
    for (i, g) in elements.iter().enumerate() {
        writeln!(text, "\n# {i}\n{}", g.to_portrait_text().trim_end()).unwrap();
    }
    Report {
        ok,
        json: json!({
            "group": what,
            "d": shape.arity(), "n": shape.height(),
            "order": elements.len(),
            "closed_form": expected,
            "elements": elements.iter().map(|g| g.to_portrait_text()).collect_vec(),
        }),
        header: vec!["index", "portrait"],
        rows: elements
            .iter()
            .enumerate()
            .map(|(i, g)| vec![i.to_string(), g.to_portrait_text().trim_end().replace('\n', ";")])
            .collect(),
        text,
    }
}

fn tree_enumerate(a: &ShapeArgs) -> Result<Report> {
    let shape = TreeShape::new(a.d, a.n)?;
    let all = enumerate_aut(shape, a.limit)?;
    Ok(portrait_report("Aut", shape, &all, Some(aut_order(&shape).to_string())))
}

fn tree_subgroup(a: &ShapeArgs, aligned: bool) -> Result<Report> {
    let shape = TreeShape::new(a.d, a.n)?;
    let spec = BranchSpec::zeros(shape, a.m)?;
    if aligned {
        let g = build_s_subgroup(&spec, a.limit)?;
        let closed = s_group_order(a.d, a.n, a.m)?.to_string();
        Ok(portrait_report("S", shape, g.elements().unwrap_or(&[]), Some(closed)))
    } else {
        let g = build_branch_stabilizer(&spec, a.limit)?;
        let closed = stab_branch_order(a.d, a.n).to_string();
        Ok(portrait_report("Stab", shape, g.elements().unwrap_or(&[]), Some(closed)))
    }
}

fn tree_index(a: &ShapeArgs) -> Result<Report> {
    let index = stab_s_index(a.d, a.n, a.m)?;
    let counted = enumerated_orders(a)?;
    let ok = counted.is_none_or(|(_, st, s)| st % s == 0 && BigInt::from(st / s) == index.clone().into());
    let text = format!(
        "[Stab:S] for d={}, n={}, m={}: {index}{}\n",
        a.d,
        a.n,
        a.m,
        match counted {
            Some((_, st, s)) => format!(" (enumerated {st}/{s})"),
            None => String::new(),
        }
    );
    Ok(Report {
        ok,
        json: json!({"d": a.d, "n": a.n, "m": a.m, "index": index.to_string(), "agree": ok}),
        header: vec!["d", "n", "m", "index", "agree"],
        rows: vec![vec![a.d.to_string(), a.n.to_string(), a.m.to_string(), index.to_string(), ok.to_string()]],
        text,
    })
}

fn tree_hausdorff(d: usize, m: usize, nmax: usize) -> Result<Report> {
    let est = hausdorff_estimate(d, m, 1..=nmax)?;
    let limit = est.limit.clone().expect("closed form");
    let mut text = format!("d={d}, m={m}, limit {limit}\n");
    let mut rows = Vec::new();
    for (n, r) in &est.ratios {
        let (exact, value) = match r {
            LogRatio::Exact(q) => (q.to_string(), r.to_f64()),
            LogRatio::Approximate(x) => (String::new(), *x),
        };
        writeln!(text, "n={n:>3}  {value:.12}  {exact}").unwrap();
        rows.push(vec![n.to_string(), exact, format!("{value:.15}")]);
    }
    Ok(Report {
        ok: true,
        json: json!({
            "d": d, "m": m, "limit": limit.to_string(),
            "ratios": rows.iter().map(|r| json!({"n": r[0], "exact": r[1], "value": r[2]})).collect_vec(),
        }),
        header: vec!["n", "exact", "value"],
        rows,
        text,
    })
}

fn parse_generators(text: &str) -> Result<Vec<TreeAutomorphism>> {
    let mut blocks = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.trim().is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            current.clear();
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.trim().is_empty() {
        blocks.push(current);
    }
    blocks.iter().map(|b| TreeAutomorphism::from_portrait_text(b)).collect()
}

fn centralizer_cmd(path: &PathBuf, level: usize, limit: usize) -> Result<Report> {
    let gens = parse_generators(&read_file(path)?)?;
    let Some(first) = gens.first() else {
        return Err(Error::Parse("no generators in file".into()));
    };
    let shape = first.shape();
    let h = close_under_group_ops(shape, gens, limit)?;
    progress(format!("|H| = {}, searching centralizer in Aut({shape})", h.order()?));
    let c = centralizer(&h, limit)?;
    let rep = centralizer_level_report(&h, &c, level)?;
    let bound: BigInt = rep.kernel_bound.parse().map_err(|_| Error::Parse("kernel bound".into()))?;
    let ok = BigInt::from(rep.kernel_order) <= bound && (!rep.free || BigInt::from(rep.kernel_order) == bound);
    let text = format!(
        "|H| = {}\n|C| = {}\nlevel {}: orbits {}\nm = {}, free = {}\nkernel order {} (bound {})\nHausdorff bound {}\n",
        h.order()?,
        c.order()?,
        rep.level,
        rep.orbits.iter().map(|o| format!("{{{}}}", o.join(","))).join(" "),
        rep.m,
        rep.free,
        rep.kernel_order,
        rep.kernel_bound,
        rep.bound
    );
    Ok(Report {
        ok,
        json: serde_json::to_value(&rep).expect("report"),
        header: vec!["level", "m", "free", "kernel_order", "kernel_bound", "bound"],
        rows: vec![vec![
            rep.level.to_string(),
            rep.m.to_string(),
            rep.free.to_string(),
            rep.kernel_order.to_string(),
            rep.kernel_bound.clone(),
            rep.bound.clone(),
        ]],
        text,
    })
}

fn identity_report(checks: Vec<IdentityCheck>) -> Report {
    let ok = checks.iter().all(|c| c.holds);
    let mut text = String::new();
    for c in &checks {
        writeln!(
            text,
            "{} {}: {} = {}",
            if c.holds { "ok  " } else { "FAIL" },
            c.name,
            c.lhs,
            c.rhs
        )
        .unwrap();
    }
    Report {
        ok,
        json: serde_json::to_value(&checks).expect("checks"),
        header: vec!["name", "lhs", "rhs", "holds"],
        rows: checks
            .iter()
            .map(|c| vec![c.name.clone(), c.lhs.clone(), c.rhs.clone(), c.holds.to_string()])
            .collect(),
        text,
    }
}

fn conjugate_cmd(k: &str) -> Result<Report> {
    let k = parse_rational(k)?;
    let mut checks = conjugation_identity_suite(&k);
    checks.extend(exceptional_conjugates());
    Ok(identity_report(checks))
}

fn flag(name: String, holds: bool) -> IdentityCheck {
    IdentityCheck { name, lhs: String::new(), rhs: String::new(), holds }
}

fn identities_cmd(k: &str, nmax: usize) -> Result<Report> {
    let kq = parse_rational(k)?;
    let mut checks = Vec::new();
    for n in 1..=nmax {
        checks.push(flag(format!("factorization n={n}"), factorization_identity(&kq, n)));
    }
    for n in 1..=10 {
        checks.push(flag(format!("power n={n}"), verify_power_identity(n)));
        checks.push(flag(format!("chebyshev n={n}"), verify_chebyshev_identity(n)));
    }
    for n in [2, 3, 4] {
        for (sign, label) in [(RotationSign::Plus, "+"), (RotationSign::Minus, "-")] {
            checks.push(flag(format!("rotation n={n} sign {label}"), commutes_with_rotation(n, sign)?));
        }
    }
    for (kk, expect) in [(-2i64, 1u32), (2, 1), (4, 2)] {
        for n in 2..=10usize {
            let got = cyclotomic_orders(kk, n)?;
            let want = num_bigint::BigUint::from(2u32).pow(n as u32 - expect);
            checks.push(IdentityCheck {
                name: format!("cyclotomic order k={kk} n={n}"),
                lhs: got.to_string(),
                rhs: want.to_string(),
                holds: got == want,
            });
        }
    }
    Ok(identity_report(checks))
}

fn delta_cmd(cmd: &DeltaCmd) -> Result<Report> {
    match cmd {
        DeltaCmd::Int { k0, nmax, bit_cap } => {
            let seq = delta_eps_int(&BigInt::from(*k0), *nmax, *bit_cap)?;
            let rows = seq
                .iter()
                .map(|p| vec![p.n.to_string(), p.delta.to_string(), p.eps.to_string()])
                .collect_vec();
            let text = rows.iter().map(|r| format!("n={} δ={} ε={}\n", r[0], r[1], r[2])).collect();
            Ok(Report {
                ok: true,
                json: json!(rows.iter().map(|r| json!({"n": r[0], "delta": r[1], "eps": r[2]})).collect_vec()),
                header: vec!["n", "delta", "eps"],
                rows,
                text,
            })
        }
        DeltaCmd::Poly { nmax } => {
            let polys = delta_eps_poly(*nmax)?;
            let rows = polys
                .iter()
                .enumerate()
                .map(|(i, (d, e))| vec![(i + 1).to_string(), d.to_string(), e.to_string()])
                .collect_vec();
            let text = rows.iter().map(|r| format!("δ_{} = {}\nε_{} = {}\n", r[0], r[1], r[0], r[2])).collect();
            Ok(Report {
                ok: true,
                json: json!(rows.iter().map(|r| json!({"n": r[0], "delta": r[1], "eps": r[2]})).collect_vec()),
                header: vec!["n", "delta", "eps"],
                rows,
                text,
            })
        }
        DeltaCmd::Profile { nmax } => delta_profile(*nmax),
        DeltaCmd::Sqrt { n } => {
            let polys = delta_eps_poly(*n)?;
            let f = normalized_delta(&polys[n - 1].0);
            let root = poly_sqrt(&f);
            let text = match &root {
                Some(g) => format!("δ_{n}/k^low = ({g})^2\n"),
                None => format!("δ_{n}/k^low is not a square in Z[k]\n"),
            };
            let r = root.as_ref().map(|g| g.to_string()).unwrap_or_default();
            Ok(Report {
                ok: true,
                json: json!({"n": n, "normalized": f.to_string(), "sqrt": root.map(|g| g.to_string())}),
                header: vec!["n", "normalized", "sqrt"],
                rows: vec![vec![n.to_string(), f.to_string(), r]],
                text,
            })
        }
        DeltaCmd::Scan { nmin, nmax, kmin, kmax, bit_cap } => {
            progress(format!("scanning n in [{nmin}, {nmax}], k0 in [{kmin}, {kmax}]"));
            let rows = scan_squares(*nmin..=*nmax, *kmin..=*kmax, *bit_cap)?;
            let hits = rows.iter().filter(|r| r.is_square).collect_vec();
            let mut text = format!("{} values tested\n", rows.len());
            if hits.is_empty() {
                text.push_str("no squares found\n");
            }
            for h in &hits {
                writeln!(text, "square: n={} k0={}", h.n, h.k0).unwrap();
            }
            Ok(Report {
                ok: hits.is_empty(),
                json: json!({"tested": rows.len(), "squares": hits}),
                header: vec!["n", "k0", "delta_bits", "is_square"],
                rows: rows
                    .iter()
                    .map(|r| vec![r.n.to_string(), r.k0.to_string(), r.delta_bits.to_string(), r.is_square.to_string()])
                    .collect(),
                text,
            })
        }
    }
}

fn delta_profile(nmax: usize) -> Result<Report> {
    let polys = delta_eps_poly(nmax)?;
    let mut ok = true;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (i, (d, e)) in polys.iter().enumerate() {
        let n = i + 1;
        let measured = DegreeProfile::measure(n, d, e);
        let closed = DegreeProfile::closed_form(n);
        let structure = check_structure_lemma(n, d);
        let recursion = if n >= 3 { Some(delta_only_recursion_check(&polys, n)?) } else { None };
        let row_ok = measured == closed && structure && recursion.unwrap_or(true);
        ok &= row_ok;
        writeln!(
            text,
            "n={n:>2}  deg δ={} low δ={} deg ε={} low ε={}  closed form {}  structure {}  δ-recursion {}",
            measured.deg_delta,
            measured.low_delta,
            measured.deg_eps,
            measured.low_eps,
            if measured == closed { "ok" } else { "MISMATCH" },
            if structure { "ok" } else { "FAIL" },
            match recursion {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "-",
            }
        )
        .unwrap();
        rows.push(vec![
            n.to_string(),
            measured.deg_delta.to_string(),
            measured.low_delta.to_string(),
            measured.deg_eps.to_string(),
            measured.low_eps.to_string(),
            (measured == closed).to_string(),
            structure.to_string(),
            recursion.map(|b| b.to_string()).unwrap_or_default(),
        ]);
        records.push(json!({
            "profile": measured,
            "matches_closed_form": measured == closed,
            "structure": structure,
            "delta_recursion": recursion,
        }));
    }
    Ok(Report {
        ok,
        json: json!(records),
        header: vec!["n", "deg_delta", "low_delta", "deg_eps", "low_eps", "closed_form", "structure", "delta_recursion"],
        rows,
        text,
    })
}

fn braces(v: &[u64]) -> String {
    format!("{{{}}}", v.iter().join(","))
}

fn sieve_cmd(cmd: &SieveCmd) -> Result<Report> {
    match cmd {
        SieveCmd::Certify { modulus, save } => {
            let cert = certified_set(*modulus)?;
            if let Some(path) = save {
                std::fs::write(path, cert.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
                progress(format!("certificate written to {}", path.display()));
            }
            Ok(certificate_report(&cert, true))
        }
        SieveCmd::Verify { certificate } => {
            let cert = SieveCertificate::from_json(&read_file(certificate)?)?;
            let ok = cert.verify()?;
            Ok(certificate_report(&cert, ok))
        }
        SieveCmd::Table => {
            let rows = compare_reference_table()?;
            let ok = rows.iter().all(|r| r.is_superset());
            let mut text = String::new();
            for r in &rows {
                write!(text, "m={:>3}  reference {}  computed {}", r.modulus, braces(&r.expected), braces(&r.computed)).unwrap();
                if !r.missing.is_empty() {
                    write!(
                        text,
                        "  MISSING {}{}",
                        braces(&r.missing),
                        if r.missing_preperiod_only { " (fail only in preperiod)" } else { "" }
                    )
                    .unwrap();
                }
                if !r.extra.is_empty() {
                    write!(text, "  extra {}", braces(&r.extra)).unwrap();
                }
                text.push('\n');
            }
            Ok(Report {
                ok,
                json: serde_json::to_value(&rows).expect("rows"),
                header: vec!["modulus", "reference", "computed", "missing", "extra", "preperiod_only"],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.modulus.to_string(),
                            r.expected.iter().join(" "),
                            r.computed.iter().join(" "),
                            r.missing.iter().join(" "),
                            r.extra.iter().join(" "),
                            r.missing_preperiod_only.to_string(),
                        ]
                    })
                    .collect(),
                text,
            })
        }
        SieveCmd::Cover { bound, computed, certificates, search_limit } => {
            let certs = if !certificates.is_empty() {
                certificates
                    .iter()
                    .map(|p| SieveCertificate::from_json(&read_file(p)?))
                    .collect::<Result<Vec<_>>>()?
            } else if *computed {
                computed_certificates()?
            } else {
                reference_certificates()
            };
            let limit = search_limit.unwrap_or((*bound).max(REFERENCE_COVERAGE_BOUND + 1));
            progress(format!("scanning [1, {bound}] against {} moduli", certs.len()));
            let rep = coverage_check(&certs, *bound, limit);
            let text = format!(
                "bound {}: {} uncovered{}\nfirst uncovered: {}\n",
                rep.bound,
                rep.uncovered.len(),
                if rep.uncovered.is_empty() {
                    String::new()
                } else {
                    format!(" ({}{})", rep.uncovered.iter().take(20).join(", "), if rep.uncovered.len() > 20 { ", …" } else { "" })
                },
                rep.first_uncovered
                    .map(|k| k.to_string())
                    .unwrap_or_else(|| format!("none up to {}", rep.search_limit))
            );
            let rows = coverage_rows(&certs, *bound)
                .into_iter()
                .map(|(k, hit)| match hit {
                    Some((m, r)) => vec![k.to_string(), "true".into(), m.to_string(), r.to_string()],
                    None => vec![k.to_string(), "false".into(), String::new(), String::new()],
                })
                .collect();
            Ok(Report {
                ok: rep.fully_covered(),
                json: serde_json::to_value(&rep).expect("report"),
                header: vec!["k0", "covered", "modulus", "residue"],
                rows,
                text,
            })
        }
    }
}

fn certificate_report(cert: &SieveCertificate, ok: bool) -> Report {
    Report {
        ok,
        text: format!(
            "m={}: {}{}\n",
            cert.modulus,
            braces(&cert.residues),
            if ok { "" } else { " (verification FAILED)" }
        ),
        json: serde_json::to_value(cert).expect("certificate"),
        header: vec!["modulus", "residue", "preperiod", "period"],
        rows: cert
            .residues
            .iter()
            .map(|r| {
                let p = cert.profiles.iter().find(|p| p.residue == *r);
                vec![
                    cert.modulus.to_string(),
                    r.to_string(),
                    p.map(|p| p.preperiod.to_string()).unwrap_or_default(),
                    p.map(|p| p.period.to_string()).unwrap_or_default(),
                ]
            })
            .collect(),
    }
}

fn density_cmd(map: &str, a0: i64, xmax: u64, checkpoints: &[u64]) -> Result<Report> {
    let spec = IntegerMapSpec::parse(map, a0)?;
    let mut cps: Vec<u64> = if checkpoints.is_empty() {
        DEFAULT_CHECKPOINTS.iter().copied().filter(|&x| x < xmax).collect()
    } else {
        checkpoints.iter().copied().filter(|&x| x <= xmax).collect()
    };
    cps.push(xmax);
    progress(format!("sieving primes up to {xmax}"));
    let rep = density_curve(&spec, &cps)?;
    let mut text = format!("φ = {map}, a0 = {a0}\n");
    for c in &rep.checkpoints {
        writeln!(
            text,
            "X={:>9}  π(X)={:>8}  members={:>6}  proportion={}/{} ≈ {:.6}",
            c.x,
            c.pi_x,
            c.members,
            c.proportion_num,
            c.proportion_den,
            c.proportion_num as f64 / c.proportion_den as f64
        )
        .unwrap();
    }
    text.push_str("finite counts only; they indicate a trend and prove no density\n");
    Ok(Report {
        ok: true,
        json: json!({"map": map, "a0": a0, "checkpoints": rep.checkpoints}),
        header: vec!["X", "pi_X", "members", "proportion_num", "proportion_den"],
        rows: rep
            .checkpoints
            .iter()
            .map(|c| {
                vec![
                    c.x.to_string(),
                    c.pi_x.to_string(),
                    c.members.to_string(),
                    c.proportion_num.to_string(),
                    c.proportion_den.to_string(),
                ]
            })
            .collect(),
        text,
    })
}
