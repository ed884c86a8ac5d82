//! Suite runner and table emitter behind the `qkwb` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use qkwb_core::dm::{
    self, check_lee_line, check_lee_single_variable, check_witten_totals, leading_part_check,
    string_identity_pt, PsiExponentVector,
};
use qkwb_core::potential::{self, classical_k_potential, cp2_potential, pt_potential};
use qkwb_core::qde::{
    check_denominators, check_specialization, scalar_solution, twisted_solution, verify_qde,
    verify_twisted_qde,
};
use qkwb_core::ring::ring_by_name;
use qkwb_core::wdvv::{self, check_classical_wdvv, check_s_matrix_pde, check_total_symmetry};
use qkwb_core::{sample_k_potential, CheckReport, Potential, Scalar, SeriesMatrix, Theory};

/// Desk-scale caps applied unless `--unbounded` is given.
pub const MAX_T_ORDER: usize = 12;
pub const MAX_DMAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Theorem,
    Corollaries,
    Dm,
    Qde,
    Cp2,
    All,
}

impl FromStr for Suite {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "theorem" => Suite::Theorem,
            "corollaries" => Suite::Corollaries,
            "dm" => Suite::Dm,
            "qde" => Suite::Qde,
            "cp2" => Suite::Cp2,
            "all" => Suite::All,
            _ => bail!("unknown suite {s:?} (expected theorem, corollaries, dm, qde, cp2 or all)"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "json" => Format::Json,
            "text" => Format::Text,
            "csv" => Format::Csv,
            _ => bail!("unknown format {s:?} (expected json, text or csv)"),
        })
    }
}

/// A built-in potential with its parameters, or a JSON file.
///
/// Textual forms: `pt:<order>`, `classical-k:<ring>:<order>`,
/// `cp2:<order>:<dmax>`, `sampled:<rank>:<order>[:<seed>]`, `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PotentialSource {
    Pt { order: usize },
    ClassicalK { ring: String, order: usize },
    Cp2 { order: usize, dmax: usize },
    Sampled { rank: usize, order: usize, seed: Option<u64> },
    File(PathBuf),
}

fn num<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| anyhow!("expected an integer for {what}, got {field:?}"))
}

impl FromStr for PotentialSource {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(PotentialSource::File(PathBuf::from(path)));
        }
        let parts: Vec<&str> = s.split(':').collect();
        Ok(match parts.as_slice() {
            ["pt", o] => PotentialSource::Pt { order: num(o, "order")? },
            ["classical-k", r, o] => PotentialSource::ClassicalK {
                ring: r.to_string(),
                order: num(o, "order")?,
            },
            ["cp2", o, d] => PotentialSource::Cp2 {
                order: num(o, "order")?,
                dmax: num(d, "dmax")?,
            },
            ["sampled", r, o] => PotentialSource::Sampled {
                rank: num(r, "rank")?,
                order: num(o, "order")?,
                seed: None,
            },
            ["sampled", r, o, sd] => PotentialSource::Sampled {
                rank: num(r, "rank")?,
                order: num(o, "order")?,
                seed: Some(num(sd, "seed")?),
            },
            _ => bail!("unrecognized potential source {s:?}"),
        })
    }
}

impl PotentialSource {
    fn orders(&self) -> (Option<usize>, Option<usize>) {
        match self {
            PotentialSource::Pt { order } | PotentialSource::ClassicalK { order, .. } => (Some(*order), None),
            PotentialSource::Cp2 { order, dmax } => (Some(*order), Some(*dmax)),
            PotentialSource::Sampled { order, .. } => (Some(*order), None),
            PotentialSource::File(_) => (None, None),
        }
    }

    /// Build or load the potential; `seed` is used when none is embedded.
    pub fn load(&self, seed: u64) -> Result<Potential> {
        Ok(match self {
            PotentialSource::Pt { order } => pt_potential(*order)?,
            PotentialSource::ClassicalK { ring, order } => classical_k_potential(&ring_by_name(ring)?, *order)?,
            PotentialSource::Cp2 { order, dmax } => cp2_potential(*order, *dmax)?,
            PotentialSource::Sampled { rank, order, seed: s } => sample_k_potential(*rank, *order, s.unwrap_or(seed))?,
            PotentialSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read potential file {}", path.display()))?;
                Potential::from_json(&text).with_context(|| format!("invalid potential file {}", path.display()))?
            }
        })
    }
}

/// Reject orders above the desk-scale caps.
pub fn check_bounds(t_order: Option<usize>, dmax: Option<usize>, unbounded: bool) -> Result<()> {
    if unbounded {
        return Ok(());
    }
    if let Some(t) = t_order.filter(|&t| t > MAX_T_ORDER) {
        bail!("t_order {t} exceeds the default cap {MAX_T_ORDER}; pass --unbounded to allow it");
    }
    if let Some(d) = dmax.filter(|&d| d > MAX_DMAX) {
        bail!("dmax {d} exceeds the default cap {MAX_DMAX}; pass --unbounded to allow it");
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub potential: Option<PotentialSource>,
    pub seed: u64,
    pub format: Format,
    pub unbounded: bool,
    pub timing: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            potential: None,
            seed: 0,
            format: Format::Json,
            unbounded: false,
            timing: false,
        }
    }
}

fn default_potential() -> PotentialSource {
    PotentialSource::ClassicalK {
        ring: "kcp2".into(),
        order: 5,
    }
}

fn theorem_reports(p: &Potential) -> Result<Vec<CheckReport>> {
    Ok(match p.theory() {
        Theory::KTheory => vec![check_total_symmetry(p)?],
        Theory::Cohomology => vec![check_classical_wdvv(p, p.ring().pairing())?],
    })
}

fn corollary_reports(p: &Potential) -> Result<Vec<CheckReport>> {
    if p.theory() == Theory::Cohomology {
        bail!("the corollaries suite applies to K-theoretic potentials only");
    }
    let mut out = wdvv::corollary_suite(p)?;
    out.push(wdvv::check_unit_translation(p)?);
    if p.rank() == 1 && p.truncation().n_q() == 0 {
        let s = SeriesMatrix::from_rows(vec![vec![dm::s_matrix_pt_symbolic(p.truncation().t_order)]])?;
        out.push(check_s_matrix_pde(p, &s)?);
    }
    Ok(out)
}

fn dm_reports() -> Result<Vec<CheckReport>> {
    let mut out = vec![check_lee_line(25)?, check_lee_single_variable(8, 12)?];
    for m in 4..=8 {
        for k in 0..=10 {
            out.push(string_identity_pt(m, k)?);
        }
    }
    out.push(check_witten_totals(10)?);
    for n in 4..=6 {
        out.push(leading_part_check(n)?);
    }
    let pt = pt_potential(8)?;
    let s = SeriesMatrix::from_rows(vec![vec![dm::s_matrix_pt_symbolic(8)]])?;
    out.push(check_s_matrix_pde(&pt, &s)?);
    Ok(out)
}

fn qde_reports() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in 0..=4 {
        let s = scalar_solution(n, 6);
        out.push(verify_qde(n, &s)?);
        out.push(check_denominators(n, &s)?);
    }
    for n in 0..=3 {
        out.push(verify_twisted_qde(n, &twisted_solution(n, 5))?);
        out.push(check_specialization(n, 5)?);
    }
    Ok(out)
}

fn cp2_reports() -> Result<Vec<CheckReport>> {
    let p = cp2_potential(14, 4)?;
    Ok(vec![check_classical_wdvv(&p, p.ring().pairing())?])
}

/// Run a suite; the flag is true iff every check passed.
pub fn run_suite(cfg: &SuiteConfig) -> Result<(bool, Vec<CheckReport>)> {
    let needs_potential = matches!(cfg.suite, Suite::Theorem | Suite::Corollaries | Suite::All);
    let potential = if needs_potential {
        let src = cfg.potential.clone().unwrap_or_else(default_potential);
        let (t, d) = src.orders();
        check_bounds(t, d, cfg.unbounded)?;
        Some(src.load(cfg.seed)?)
    } else {
        None
    };
    let mut reports = match cfg.suite {
        Suite::Theorem => theorem_reports(potential.as_ref().expect("loaded"))?,
        Suite::Corollaries => corollary_reports(potential.as_ref().expect("loaded"))?,
        Suite::Dm => dm_reports()?,
        Suite::Qde => qde_reports()?,
        Suite::Cp2 => cp2_reports()?,
        Suite::All => {
            let p = potential.as_ref().expect("loaded");
            let mut all = theorem_reports(p)?;
            if p.theory() == Theory::KTheory {
                all.extend(corollary_reports(p)?);
            }
            all.extend(dm_reports()?);
            all.extend(qde_reports()?);
            all.extend(cp2_reports()?);
            all
        }
    };
    if !cfg.timing {
        reports = reports.into_iter().map(CheckReport::without_timing).collect();
    }
    let ok = wdvv::all_pass(&reports);
    Ok((ok, reports))
}

/// Render reports: JSON lines, aligned text, or CSV with a header.
pub fn format_reports(reports: &[CheckReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            for r in reports {
                out.push_str(&r.to_json_line());
                out.push('\n');
            }
        }
        Format::Text => {
            for r in reports {
                let verdict = if r.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{verdict} {} through t^{} q{:?} witnesses={}",
                    r.check,
                    r.verified_through.t_order,
                    r.verified_through.q_caps,
                    r.witness_count()
                );
                for w in &r.witnesses {
                    let _ = writeln!(out, "  {:?}: {} != {}", w.indices, w.lhs, w.rhs);
                }
            }
        }
        Format::Csv => {
            out.push_str("check,pass,t_order,q_caps,witnesses,millis\n");
            for r in reports {
                let caps: Vec<String> = r.verified_through.q_caps.iter().map(ToString::to_string).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.check,
                    r.pass,
                    r.verified_through.t_order,
                    caps.join(";"),
                    r.witness_count(),
                    r.millis
                );
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Lee,
    Witten,
    Nd,
    Qde,
}

impl FromStr for TableKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lee" => TableKind::Lee,
            "witten" => TableKind::Witten,
            "nd" => TableKind::Nd,
            "qde" => TableKind::Qde,
            _ => bail!("unknown table kind {s:?} (expected lee, witten, nd or qde)"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableParams {
    /// Number of marked points for lee/witten, projective dimension for qde.
    pub n: usize,
    /// Largest exponent on the last point for lee.
    pub kmax: u32,
    /// Largest degree for nd/qde.
    pub dmax: usize,
}

/// Rows of a deterministic table; every exact value is a string.
pub fn table_rows(kind: TableKind, p: &TableParams) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let head = |cols: &[&str]| cols.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Ok(match kind {
        TableKind::Lee => {
            let rows = (0..=p.kmax)
                .map(|k| {
                    let v = PsiExponentVector::last_point(p.n, k)?;
                    Ok(vec![k.to_string(), dm::lee_euler(&v).to_text()])
                })
                .collect::<Result<_>>()?;
            (head(&["k", "chi"]), rows)
        }
        TableKind::Witten => {
            if p.n < 3 {
                bail!("witten table needs n >= 3");
            }
            let rows = dm::compositions((p.n - 3) as u32, p.n)
                .into_iter()
                .map(|m| {
                    let mi: Vec<i64> = m.iter().map(|&x| x as i64).collect();
                    let v = PsiExponentVector::new(&mi)?;
                    let label: Vec<String> = m.iter().map(ToString::to_string).collect();
                    Ok(vec![label.join(" "), dm::witten_integral(&v).to_text()])
                })
                .collect::<Result<_>>()?;
            (head(&["exponents", "integral"]), rows)
        }
        TableKind::Nd => {
            let nd = potential::kontsevich_nd(p.dmax)?;
            let rows = nd
                .iter()
                .enumerate()
                .map(|(i, v)| vec![(i + 1).to_string(), v.to_text()])
                .collect();
            (head(&["d", "N_d"]), rows)
        }
        TableKind::Qde => {
            let s = scalar_solution(p.n as u32, p.dmax);
            let rows = (0..=p.dmax)
                .map(|d| vec![d.to_string(), s.coeff(d)[0].to_string()])
                .collect();
            (head(&["d", "S_d"]), rows)
        }
    })
}

/// A table as CSV, or as JSON lines of objects keyed by the header.
pub fn emit_tables(kind: TableKind, params: &TableParams, format: Format) -> Result<String> {
    let (header, rows) = table_rows(kind, params)?;
    let mut out = String::new();
    match format {
        Format::Csv | Format::Text => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        Format::Json => {
            for r in rows {
                let obj: serde_json::Map<String, serde_json::Value> = header
                    .iter()
                    .cloned()
                    .zip(r.into_iter().map(serde_json::Value::String))
                    .collect();
                out.push_str(&serde_json::Value::Object(obj).to_string());
                out.push('\n');
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!(
            "classical-k:kcp2:5".parse::<PotentialSource>().unwrap(),
            PotentialSource::ClassicalK {
                ring: "kcp2".into(),
                order: 5
            }
        );
        assert_eq!(
            "sampled:2:5:7".parse::<PotentialSource>().unwrap(),
            PotentialSource::Sampled {
                rank: 2,
                order: 5,
                seed: Some(7)
            }
        );
        assert!("cp2:5".parse::<PotentialSource>().is_err());
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn bounds() {
        assert!(check_bounds(Some(13), None, false).is_err());
        assert!(check_bounds(Some(13), Some(9), true).is_ok());
        assert!(check_bounds(None, Some(9), false).is_err());
    }

    #[test]
    fn nd_table() {
        let p = TableParams { n: 0, kmax: 0, dmax: 5 };
        let csv = emit_tables(TableKind::Nd, &p, Format::Csv).unwrap();
        assert_eq!(csv, "d,N_d\n1,1\n2,1\n3,12\n4,620\n5,87304\n");
    }

    #[test]
    fn lee_table_is_k_plus_one() {
        let p = TableParams { n: 4, kmax: 10, dmax: 0 };
        let (_, rows) = table_rows(TableKind::Lee, &p).unwrap();
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row[1], (k + 1).to_string());
        }
    }

    #[test]
    fn witten_table_sums_to_25() {
        let p = TableParams { n: 5, kmax: 0, dmax: 0 };
        let (_, rows) = table_rows(TableKind::Witten, &p).unwrap();
        let total: i64 = rows.iter().map(|r| r[1].parse::<i64>().unwrap()).sum();
        assert_eq!(total, 25);
    }
}
