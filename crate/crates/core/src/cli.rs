//! Command-line front end. Exit codes: 0 pass, 1 verification failure,
//! 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::ball::{build_qmm, verify_qmm, Conventions, Mutation, QmmTable};
use crate::cohomology::{
    check_block_conditions, coboundary_primitive_roots, cocycle_basis, delta1, h2_report,
    invariant_cocycle_space, is_cocycle, TwoCochain,
};
use crate::error::Error;
use crate::lie::{AlgebraJson, LieAlgebra};
use crate::psd::{build_psd_unchecked, PsdSpec};
use crate::report::{digest, summarize, to_sorted_json, RunReport};
use crate::retract::{
    check_w_closure, commutator_defect, k_element, radial_reduce, residual, CandidateJson,
    KernelCandidate,
};
use crate::scalar::Scalar;
use crate::star::{CoefFn, NuSeries};
use crate::su1n::build_su1n;

/// Environment variable overriding the truncation order.
pub const TRUNCATION_ENV: &str = "BDQUANT_TRUNCATION";

/// Default truncation for retract operators.
pub const DEFAULT_TRUNCATION: usize = 6;

#[derive(Parser, Debug)]
#[command(
    name = "bdquant",
    version,
    about = "Exact checks for invariant star products on the unit ball"
)]
struct Cli {
    /// write the run report to this file
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// include wall-clock timing in reports (breaks byte-identity)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a Pyatetskii-Shapiro algebra from a spec file
    BuildPsd {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export su(1,N) in the adapted basis
    Su1nExport {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dim H² of an algebra file
    H2 { algebra: PathBuf },
    /// Run a verification suite: su1n, qmm, retract or cocycle
    Verify {
        suite: String,
        #[arg(long = "N", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "1")]
        alpha: Scalar,
        /// drop-nu2, shift:<label> or scale:<label>
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Evaluate D_X on a candidate kernel for X in k
    RetractResidual {
        #[arg(long = "X")]
        x: String,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long = "N", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "1")]
        alpha: Scalar,
    },
    /// Export the quantum moment map table
    QmmExport {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value = "1")]
        alpha: Scalar,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

fn error_outcome(e: Error) -> Outcome {
    let code = match e {
        Error::Jacobi(_) | Error::NotIntegrable(_) | Error::Calibration(_) => 1,
        _ => 2,
    };
    Outcome {
        code,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

/// Runs with the truncation override read from the environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(TRUNCATION_ENV).ok();
    run_with_truncation(args, env.as_deref())
}

pub fn run_with_truncation<I, T>(args: I, truncation: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let trunc = match truncation.map(str::trim).filter(|s| !s.is_empty()) {
        None => None,
        Some(s) => match s.parse::<usize>() {
            Ok(k) => Some(k),
            Err(_) => {
                return Outcome::usage(format!(
                    "{TRUNCATION_ENV} must be a non-negative integer, got {s:?}"
                ))
            }
        },
    };
    let start = Instant::now();
    let res = dispatch(&cli.cmd, trunc);
    match res {
        Err(e) => error_outcome(e),
        Ok((mut out, mut report)) => {
            if cli.timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            if let Some(p) = &cli.report {
                if let Err(e) = fs::write(p, report.to_json_string()) {
                    return error_outcome(e.into());
                }
            }
            if matches!(cli.cmd, Cmd::Verify { .. }) {
                out.stdout = report.to_json_string();
            }
            out
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<String, Error> {
    match out {
        Some(p) => {
            fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pass_fail(report: &RunReport, stdout: String) -> Outcome {
    Outcome {
        code: if report.ok { 0 } else { 1 },
        stdout,
        stderr: report
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("FAIL {}: {}\n", c.name, c.residual_summary))
            .collect(),
    }
}

fn dispatch(cmd: &Cmd, trunc: Option<usize>) -> Result<(Outcome, RunReport), Error> {
    match cmd {
        Cmd::BuildPsd { spec, out } => cmd_build_psd(spec, out),
        Cmd::Su1nExport { n, out } => {
            let model = build_su1n(*n)?;
            let mut report = RunReport::new(
                "su1n-export",
                digest(&[b"su1n-export", n.to_string().as_bytes()]),
            );
            for (name, ok) in model.check_invariants() {
                report.check(name, ok, if ok { "0" } else { "violated" });
            }
            let text = emit(out, to_sorted_json(&model.export()))?;
            Ok((pass_fail(&report, text), report))
        }
        Cmd::H2 { algebra } => cmd_h2(algebra),
        Cmd::Verify {
            suite,
            n,
            alpha,
            mutate,
        } => {
            let inputs = digest(&[
                b"verify",
                suite.as_bytes(),
                n.to_string().as_bytes(),
                alpha.to_string().as_bytes(),
                mutate.as_deref().unwrap_or("").as_bytes(),
                format!("{trunc:?}").as_bytes(),
            ]);
            if mutate.is_some() && suite != "qmm" {
                return Err(Error::Input(
                    "--mutate applies to the qmm suite only".into(),
                ));
            }
            let mut report = RunReport::new(&format!("verify {suite}"), inputs);
            match suite.as_str() {
                "su1n" => suite_su1n(*n, &mut report)?,
                "qmm" => suite_qmm(*n, alpha, mutate.as_deref(), trunc, &mut report)?,
                "retract" => suite_retract(*n, alpha, trunc, &mut report)?,
                "cocycle" => suite_cocycle(*n, &mut report)?,
                other => {
                    return Err(Error::Input(format!(
                        "unknown suite {other:?}; expected su1n, qmm, retract or cocycle"
                    )))
                }
            }
            Ok((pass_fail(&report, String::new()), report))
        }
        Cmd::RetractResidual {
            x,
            candidate,
            n,
            alpha,
        } => {
            let text = read(candidate)?;
            let cj: CandidateJson = serde_json::from_str(&text)?;
            let cand = KernelCandidate::from_json(&cj)?;
            let model = build_su1n(*n)?;
            if cand.value.nv() != 2 * (n - 1) && !cand.value.is_zero() {
                return Err(Error::Dimension {
                    expected: 2 * (n - 1),
                    got: cand.value.nv(),
                });
            }
            let xv = k_element(&model, x)?;
            let table = table_for(&model, alpha)?;
            let k = trunc.unwrap_or(DEFAULT_TRUNCATION);
            let res = residual(&model, &xv, &cand, &table, k)?;
            let mut report = RunReport::new(
                "retract-residual",
                digest(&[
                    b"retract-residual",
                    x.as_bytes(),
                    text.as_bytes(),
                    n.to_string().as_bytes(),
                    alpha.to_string().as_bytes(),
                    k.to_string().as_bytes(),
                ]),
            );
            report.check(format!("D_{x}"), res.is_zero(), summarize(&res));
            Ok((pass_fail(&report, to_sorted_json(&res.to_json())), report))
        }
        Cmd::QmmExport { n, alpha, out } => {
            let model = build_su1n(*n)?;
            let table = table_for(&model, alpha)?;
            let report = RunReport::new(
                "qmm-export",
                digest(&[
                    b"qmm-export",
                    n.to_string().as_bytes(),
                    alpha.to_string().as_bytes(),
                ]),
            );
            let text = emit(out, to_sorted_json(&table.to_json()))?;
            Ok((pass_fail(&report, text), report))
        }
    }
}

fn table_for(model: &crate::su1n::Su1nModel, alpha: &Scalar) -> Result<QmmTable, Error> {
    let nv = 2 * model.layout.n;
    build_qmm(
        model,
        &NuSeries::constant(nv, alpha.clone(), 2),
        &Conventions::standard(model.n_param),
    )
}

fn triple_labels(alg: &LieAlgebra, t: (usize, usize, usize)) -> String {
    let l = alg.labels();
    format!("({}, {}, {})", l[t.0], l[t.1], l[t.2])
}

fn cmd_build_psd(spec_path: &Path, out: &Option<PathBuf>) -> Result<(Outcome, RunReport), Error> {
    let text = read(spec_path)?;
    let spec: PsdSpec = serde_json::from_str(&text)?;
    let psd = build_psd_unchecked(&spec)?;
    let jac = psd.algebra.check_jacobi();
    let mut report = RunReport::new("build-psd", digest(&[b"build-psd", text.as_bytes()]));
    let summary = match jac.worst_triple {
        None => "0".to_string(),
        Some(t) => format!("violated on {}", triple_labels(&psd.algebra, t)),
    };
    report.check("jacobi", jac.ok, summary);
    let stdout = if jac.ok {
        emit(out, to_sorted_json(&psd.algebra.to_json()))?
    } else {
        String::new()
    };
    Ok((pass_fail(&report, stdout), report))
}

fn cmd_h2(path: &Path) -> Result<(Outcome, RunReport), Error> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let aj: AlgebraJson = match value.get("algebra") {
        Some(inner) => serde_json::from_value(inner.clone())?,
        None => serde_json::from_value(value)?,
    };
    let alg = LieAlgebra::from_json(&aj)?;
    let h2 = h2_report(&alg);
    let mut report = RunReport::new("h2", digest(&[b"h2", text.as_bytes()]));
    report.check("jacobi", true, "0");
    report.check(
        format!(
            "h2={} cocycles={} coboundaries={}",
            h2.h2, h2.cocycle_dim, h2.coboundary_dim
        ),
        true,
        "0",
    );
    Ok((pass_fail(&report, format!("{}\n", h2.h2)), report))
}

fn suite_su1n(n: usize, report: &mut RunReport) -> Result<(), Error> {
    let model = build_su1n(n)?;
    let m = n - 1;
    let want = [1, 2 * m, 1 + m * m, 2 * m, 1];
    let got = model.root_dims();
    report.check("root_dimensions", got == want, format!("{got:?}"));
    report.check(
        "dimension_total",
        got.iter().sum::<usize>() == (n + 1) * (n + 1) - 1,
        format!("{}", got.iter().sum::<usize>()),
    );
    let r1 = model.verify_root_relation();
    report.check("relation_x_sigma_x", r1.ok, r1.failures.join("; "));
    let lm = model.verify_m_orthocomplement();
    report.check("m_orthocomplement", lm.ok, lm.failures.join("; "));
    for (name, ok) in model.check_invariants() {
        report.check(name, ok, if ok { "0" } else { "violated" });
    }
    Ok(())
}

fn parse_mutation(spec: &str, table: &QmmTable) -> Result<Mutation, Error> {
    let index = |label: &str| {
        table
            .index_of(label)
            .ok_or_else(|| Error::Input(format!("unknown basis label {label:?}")))
    };
    match spec.split_once(':') {
        None if spec == "drop-nu2" => Ok(Mutation::DropNu2),
        Some(("shift", l)) => Ok(Mutation::NuShift {
            index: index(l)?,
            constant: Scalar::one(),
        }),
        Some(("scale", l)) => Ok(Mutation::Scale {
            index: index(l)?,
            factor: Scalar::from_int(2),
        }),
        _ => Err(Error::Input(format!(
            "unknown mutation {spec:?}; expected drop-nu2, shift:<label> or scale:<label>"
        ))),
    }
}

fn suite_qmm(
    n: usize,
    alpha: &Scalar,
    mutate: Option<&str>,
    trunc: Option<usize>,
    report: &mut RunReport,
) -> Result<(), Error> {
    let model = build_su1n(n)?;
    let mut table = table_for(&model, alpha)?;
    if let Some(m) = mutate {
        let mutation = parse_mutation(m, &table)?;
        table = table.mutate(&mutation)?;
    }
    let k = trunc.unwrap_or_else(|| table.natural_order());
    let r = verify_qmm(&table, k)?;
    for p in &r.pairs {
        report.check(
            format!("[{}, {}]", p.pair.0, p.pair.1),
            p.ok,
            summarize(&p.residual),
        );
    }
    let exact_note = if r.exact {
        "0"
    } else {
        "some brackets not terminated"
    };
    report.check(
        format!("terminated_at_order_{k}"),
        r.exact || trunc.is_some(),
        exact_note,
    );
    Ok(())
}

fn suite_retract(
    n: usize,
    alpha: &Scalar,
    trunc: Option<usize>,
    report: &mut RunReport,
) -> Result<(), Error> {
    let model = build_su1n(n)?;
    let w = check_w_closure(&model)?;
    report.check(
        "w_closure",
        w.ok,
        format!(
            "dim W {} generates {} of {}",
            w.dim_w, w.dim_generated, w.ambient
        ),
    );
    let table = table_for(&model, alpha)?;
    let k = trunc.unwrap_or(DEFAULT_TRUNCATION);
    let nv = 2 * (n - 1);
    let mut vsq = CoefFn::zero(nv);
    for i in 0..nv {
        vsq = vsq.add(&CoefFn::v(nv, i).pow(2));
    }
    let radial = KernelCandidate::new(
        NuSeries::from_fn(vsq.mul(&CoefFn::z(nv)).add(&CoefFn::exp_a(nv, 1)), k),
        true,
    )?;
    let rr = radial_reduce(&radial, &model)?;
    report.check(
        "radial_candidate_m_invariant",
        rr.is_m_invariant,
        rr.failing.join(", "),
    );
    let l = model.layout;
    for i in 0..l.m_dim {
        let label = model.algebra.labels()[l.m(i)].clone();
        let res = residual(&model, &model.unit(l.m(i)), &radial, &table, k)?;
        report.check(
            format!("radial_residual_{label}"),
            res.is_zero(),
            summarize(&res),
        );
    }
    let constant = KernelCandidate::new(NuSeries::constant(nv, Scalar::from_int(7), k), true)?;
    let kb = model.k_basis();
    for (label, x) in &kb {
        let res = residual(&model, x, &constant, &table, k)?;
        report.check(
            format!("annihilates_constants_{label}"),
            res.is_zero(),
            summarize(&res),
        );
    }
    let probe = NuSeries::from_fn(
        CoefFn::v(nv, 0)
            .mul(&CoefFn::z(nv))
            .mul(&CoefFn::exp_a(nv, 1)),
        k,
    );
    for a in 0..kb.len() {
        for b in a + 1..kb.len() {
            let d = commutator_defect(&model, &kb[a].1, &kb[b].1, &probe, &table, k)?;
            report.check(
                format!("commutator_{}_{}", kb[a].0, kb[b].0),
                d.is_zero(),
                summarize(&d),
            );
        }
    }
    Ok(())
}

fn suite_cocycle(n: usize, report: &mut RunReport) -> Result<(), Error> {
    let model = build_su1n(n)?;
    let inv = invariant_cocycle_space(&model);
    report.check(
        "invariant_cocycle_dim_1",
        inv.dim() == 1,
        format!("dim {}", inv.dim()),
    );
    let s = model.s_algebra();
    let sd = s.dim();
    for (i, v) in inv.basis().iter().enumerate() {
        let c = TwoCochain::from_pair_vector(sd, v);
        let a: Vec<_> = model
            .a_space
            .basis()
            .iter()
            .map(|x| x[..sd].to_vec())
            .collect();
        let ok = is_cocycle(&s, &c) && a.iter().all(|x| a.iter().all(|y| c.eval(x, y).is_zero()));
        let prim = coboundary_primitive_roots(&model, &c)?;
        let back = delta1(&s, &prim);
        report.check(
            format!("invariant_{i}_has_primitive"),
            ok && back == c,
            if back == c { "0" } else { "δα ≠ c" },
        );
    }
    for (i, c) in cocycle_basis(&s).into_iter().enumerate() {
        let prim = coboundary_primitive_roots(&model, &c)?;
        report.check(format!("root_primitive_{i}"), delta1(&s, &prim) == c, "0");
    }
    // block conditions against brute force on s viewed as a one-block algebra
    let psd = build_psd_unchecked(&PsdSpec::new(vec![n]))?;
    let d = psd.dim();
    let mut probes: Vec<TwoCochain> = cocycle_basis(&psd.algebra);
    for i in 0..d {
        for j in i + 1..d {
            let mut c = TwoCochain::zero(d);
            c.set(i, j, Scalar::one());
            probes.push(c);
        }
    }
    let mut disagree = 0;
    for c in &probes {
        let chc = check_block_conditions(&psd, c)?;
        if chc.is_cocycle != is_cocycle(&psd.algebra, c) {
            disagree += 1;
        }
    }
    report.check(
        "block_conditions_match_brute_force",
        disagree == 0,
        format!("{disagree} disagreements of {}", probes.len()),
    );
    Ok(())
}
