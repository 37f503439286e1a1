//! Command-line surface for the gTM/gpd computations: autocorrelation
//! tables, Wiener sums, distribution-function curves, kernel data,
//! cohomology/zeta reports, substitution words and the verification suite.
//!
//! Exit codes: 0 success, 1 consistency failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use gtm::autocorrelation::{eta_bruteforce, growth_bound_q, AutocorrTable};
use gtm::diffraction::{
    cantor_samples, f_fourier_grid, f_volterra, format_float, kernel_moments,
    kernel_sup_bound_check, volterra_floor, volterra_max_iterations, Kernel,
};
use gtm::substitution::{
    gtm_fixed_point_prefix, gtm_two_sided_window, substitute_gpd, substitute_gtm, GpdLetter,
    GtmLetter, Word,
};
use gtm::topology::{
    action_matrices, cohomology_case, cycle_counts, eigen_data, fixed_point_counts, h1_groups,
    paper_eigen_rows, spectrum, torsion_index_check, verify_intertwining, zeta_from_matrices,
    zeta_pd, zeta_solenoid, zeta_tm, MatrixKind, RationalFunction, System,
};
use gtm::verify::verify_all;
use gtm::{Error, Params};

#[derive(Parser)]
#[command(
    name = "gtm",
    version,
    about = "Generalised Thue-Morse sequences: autocorrelations, singular \
             continuous diffraction, hull cohomology and zeta functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Substitution parameter k ≥ 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Substitution parameter ℓ ≥ 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    l: u32,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params::new(self.k, self.l).expect("clap enforces k, l ≥ 1")
    }
}

#[derive(Args)]
struct OutputArg {
    /// Output file (standard output if omitted).
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Table of exact autocorrelation coefficients η(m).
    Eta {
        #[command(flatten)]
        params: ParamArgs,
        /// Largest index m in the table.
        #[arg(long, default_value_t = 32)]
        max_m: u64,
        /// If set, add brute-force oracle columns averaged over N terms.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        oracle_n: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Table of exact Wiener sums Σ(N) with the growth constant q.
    Wiener {
        #[command(flatten)]
        params: ParamArgs,
        /// Largest N in the table.
        #[arg(long, default_value_t = 64)]
        max_n: u64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Sampled diffraction distribution function F as a CSV curve.
    Distfn {
        /// Substitution parameter k ≥ 1 (required except for --method cantor).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
        /// Substitution parameter ℓ ≥ 1 (required except for --method cantor).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        l: Option<u32>,
        #[arg(long, value_enum, default_value_t = MethodArg::Volterra)]
        method: MethodArg,
        /// Number of grid intervals on [0, 1].
        #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(2..))]
        grid: u64,
        /// Volterra iteration count (default: maximal under the resolution floor).
        #[arg(long)]
        iters: Option<u32>,
        /// Fourier series truncation.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        terms: u32,
        #[command(flatten)]
        output: OutputArg,
    },
    /// The integration kernel ϑ as a CSV curve with moment and bound data.
    Kernel {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of grid intervals on [0, 1].
        #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(2..))]
        grid: u64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// JSON report: cohomology matrices, eigen data, H¹, zeta functions, counts.
    Topology {
        #[command(flatten)]
        params: ParamArgs,
        /// Largest n for the fixed-point/orbit count tables.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=30))]
        n_max: u32,
        #[command(flatten)]
        output: OutputArg,
    },
    /// JSON report: zeta functions and count tables only.
    Zeta {
        #[command(flatten)]
        params: ParamArgs,
        /// Largest n for the count tables.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=30))]
        n_max: u32,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Apply the substitution to a word, a fixed-point prefix, or a window.
    Substitute {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = AlphabetArg::Gtm)]
        alphabet: AlphabetArg,
        /// Start from this word (gtm: `1`/`-`, gpd: `a`/`b`; `|` marks the origin).
        #[arg(long, conflicts_with_all = ["prefix", "window"])]
        word: Option<String>,
        /// Start from the gTM fixed-point prefix of this length.
        #[arg(long, conflicts_with = "window", value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
        prefix: Option<u64>,
        /// Start from the two-sided palindromic window of this radius.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=500_000))]
        window: Option<u64>,
        /// Number of substitution steps to apply.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(0..=20))]
        steps: u32,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Run the full invariant suite for one parameter pair.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Volterra,
    Fourier,
    Cantor,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphabetArg {
    Gtm,
    Gpd,
}

/// A recoverable command failure carrying the process exit code.
struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        CmdError {
            code: 2,
            message: message.into(),
        }
    }

    fn consistency(message: impl Into<String>) -> Self {
        CmdError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => CmdError::consistency(e.to_string()),
            _ => CmdError::usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtm: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn writer(output: &OutputArg) -> io::Result<Box<dyn Write>> {
    Ok(match &output.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Eta {
            params,
            max_m,
            oracle_n,
            output,
        } => cmd_eta(params.params(), max_m, oracle_n, &output),
        Command::Wiener {
            params,
            max_n,
            output,
        } => cmd_wiener(params.params(), max_n, &output),
        Command::Distfn {
            k,
            l,
            method,
            grid,
            iters,
            terms,
            output,
        } => cmd_distfn(k, l, method, grid, iters, terms, &output),
        Command::Kernel {
            params,
            grid,
            output,
        } => cmd_kernel(params.params(), grid, &output),
        Command::Topology {
            params,
            n_max,
            output,
        } => cmd_topology(params.params(), n_max, &output),
        Command::Zeta {
            params,
            n_max,
            output,
        } => cmd_zeta(params.params(), n_max, &output),
        Command::Substitute {
            params,
            alphabet,
            word,
            prefix,
            window,
            steps,
            output,
        } => cmd_substitute(
            params.params(),
            alphabet,
            word.as_deref(),
            prefix,
            window,
            steps,
            &output,
        ),
        Command::Verify { params } => cmd_verify(params.params()),
    }
}

fn cmd_eta(
    p: Params,
    max_m: u64,
    oracle_n: Option<u64>,
    output: &OutputArg,
) -> Result<(), CmdError> {
    let table = AutocorrTable::new(p);
    let mut out = writer(output)?;
    writeln!(out, "# k={} l={} max_m={max_m}", p.k(), p.l())?;
    match oracle_n {
        Some(n) => writeln!(
            out,
            "# columns: m,numerator,denominator,eta,oracle(N={n}),abs_err"
        )?,
        None => writeln!(out, "# columns: m,numerator,denominator,eta")?,
    }
    for m in 0..=max_m {
        let exact = table.eta(m as i64);
        let float = exact.to_f64().expect("finite");
        write!(
            out,
            "{m},{},{},{}",
            exact.numer(),
            exact.denom(),
            format_float(float)
        )?;
        if let Some(n) = oracle_n {
            let oracle = eta_bruteforce(p, m, n);
            write!(
                out,
                ",{},{}",
                format_float(oracle),
                format_float((float - oracle).abs())
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_wiener(p: Params, max_n: u64, output: &OutputArg) -> Result<(), CmdError> {
    let table = AutocorrTable::new(p);
    let bound = growth_bound_q(p);
    let mut out = writer(output)?;
    writeln!(out, "# k={} l={} max_n={max_n}", p.k(), p.l())?;
    writeln!(
        out,
        "# q={}/{} classical={}",
        bound.q.numer(),
        bound.q.denom(),
        bound.classical
    )?;
    writeln!(out, "# columns: N,numerator,denominator,sigma")?;
    for (n, sum) in table.wiener_sums(max_n).iter().enumerate() {
        writeln!(
            out,
            "{n},{},{},{}",
            sum.numer(),
            sum.denom(),
            format_float(sum.to_f64().expect("finite"))
        )?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_distfn(
    k: Option<u32>,
    l: Option<u32>,
    method: MethodArg,
    grid: u64,
    iters: Option<u32>,
    terms: u32,
    output: &OutputArg,
) -> Result<(), CmdError> {
    let samples = match method {
        MethodArg::Cantor => cantor_samples(grid),
        MethodArg::Volterra | MethodArg::Fourier => {
            let (k, l) = match (k, l) {
                (Some(k), Some(l)) => (k, l),
                _ => {
                    return Err(CmdError::usage(
                        "--k and --l are required for this method",
                    ))
                }
            };
            let p = Params::new(k, l)?;
            match method {
                MethodArg::Volterra => {
                    let n = iters.unwrap_or_else(|| volterra_max_iterations(p, grid));
                    f_volterra(p, n, grid).map_err(|e| match e {
                        Error::ResolutionFloor { .. } => CmdError::usage(format!(
                            "{e}; the minimum admissible grid is {}",
                            volterra_floor(p, n)
                        )),
                        other => other.into(),
                    })?
                }
                MethodArg::Fourier => {
                    if u64::from(terms) >= grid {
                        return Err(CmdError::usage(format!(
                            "--terms {terms} must be smaller than --grid {grid}"
                        )));
                    }
                    f_fourier_grid(&AutocorrTable::new(p), grid, terms)
                }
                MethodArg::Cantor => unreachable!(),
            }
        }
    };
    let mut out = writer(output)?;
    samples.write_csv(&mut out)?;
    Ok(())
}

fn cmd_kernel(p: Params, grid: u64, output: &OutputArg) -> Result<(), CmdError> {
    let kern = Kernel::new(p);
    let (full, half) = kernel_moments(&kern, 1 << 14);
    let bound = kern.sup_bound();
    let mut out = writer(output)?;
    writeln!(out, "# k={} l={} grid={grid}", p.k(), p.l())?;
    writeln!(out, "# moment_full={}", format_float(full))?;
    writeln!(out, "# moment_half={}", format_float(half))?;
    writeln!(out, "# sup_bound={}/{}", bound.numer(), bound.denom())?;
    writeln!(
        out,
        "# sup_bound_check={}",
        kernel_sup_bound_check(&kern, 1 << 16)
    )?;
    writeln!(out, "# columns: x,theta")?;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        writeln!(out, "{},{}", format_float(x), format_float(kern.eval(x)))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RationalFunctionJson {
    num: Vec<i64>,
    den: Vec<i64>,
}

impl RationalFunctionJson {
    fn from(rf: &RationalFunction) -> Result<Self, CmdError> {
        let conv = |c: &[BigInt]| -> Result<Vec<i64>, CmdError> {
            c.iter()
                .map(|x| {
                    i64::try_from(x.clone())
                        .map_err(|_| CmdError::usage("zeta coefficient exceeds i64".to_string()))
                })
                .collect()
        };
        Ok(RationalFunctionJson {
            num: conv(&rf.num)?,
            den: conv(&rf.den)?,
        })
    }
}

#[derive(Serialize)]
struct EigenPairJson {
    eigenvalue: i64,
    vectors: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct ZetaReport {
    tm: RationalFunctionJson,
    tm_normalised: RationalFunctionJson,
    pd: RationalFunctionJson,
    pd_normalised: RationalFunctionJson,
    solenoid: RationalFunctionJson,
    a_tm: Vec<i64>,
    a_pd: Vec<i64>,
    a_sol: Vec<i64>,
    c_tm: Vec<i64>,
    c_pd: Vec<i64>,
    c_sol: Vec<i64>,
}

fn big_to_i64(x: &BigInt) -> Result<i64, CmdError> {
    i64::try_from(x.clone()).map_err(|_| CmdError::usage("count exceeds i64; reduce --n-max"))
}

fn zeta_report(p: Params, n_max: u32) -> Result<ZetaReport, CmdError> {
    let tm = zeta_tm(p);
    let pd = zeta_pd(p);
    let sol = zeta_solenoid(i64::from(p.length()))?;
    let counts = |which: System| -> Result<(Vec<i64>, Vec<i64>), CmdError> {
        let mut a = Vec::new();
        let mut c = Vec::new();
        for n in 1..=n_max {
            a.push(big_to_i64(&fixed_point_counts(p, which, n))?);
            c.push(big_to_i64(&cycle_counts(p, which, n)?)?);
        }
        Ok((a, c))
    };
    let (a_tm, c_tm) = counts(System::Tm)?;
    let (a_pd, c_pd) = counts(System::Pd)?;
    let (a_sol, c_sol) = counts(System::Sol)?;
    Ok(ZetaReport {
        tm_normalised: RationalFunctionJson::from(&tm.normalised())?,
        tm: RationalFunctionJson::from(&tm)?,
        pd_normalised: RationalFunctionJson::from(&pd.normalised())?,
        pd: RationalFunctionJson::from(&pd)?,
        solenoid: RationalFunctionJson::from(&sol)?,
        a_tm,
        a_pd,
        a_sol,
        c_tm,
        c_pd,
        c_sol,
    })
}

#[derive(Serialize)]
struct TopologyChecks {
    intertwining: bool,
    torsion_index: bool,
    spectra: bool,
    eigenvector_tables: bool,
    zeta_matches_closed_form: bool,
}

#[derive(Serialize)]
struct TopologyReport {
    k: u32,
    l: u32,
    case: gtm::topology::CaseTag,
    basis_tm: Vec<String>,
    basis_pd: Vec<String>,
    a_tm: Vec<Vec<i64>>,
    a_pd: Vec<Vec<i64>>,
    p_map: Vec<Vec<i64>>,
    checks: TopologyChecks,
    eigen_tm: Vec<EigenPairJson>,
    eigen_pd: Vec<EigenPairJson>,
    h1_tm: gtm::topology::GroupDescriptor,
    h1_pd: gtm::topology::GroupDescriptor,
    zeta: ZetaReport,
}

fn cmd_topology(p: Params, n_max: u32, output: &OutputArg) -> Result<(), CmdError> {
    let act = action_matrices(p);
    let (eigen_tm, eigen_pd) = eigen_data(&act, p)?;
    let to_json = |pairs: Vec<gtm::topology::EigenPair>| -> Result<Vec<EigenPairJson>, CmdError> {
        pairs
            .into_iter()
            .map(|pair| {
                let vectors = pair
                    .vectors
                    .iter()
                    .map(|v| v.iter().map(big_to_i64).collect())
                    .collect::<Result<Vec<Vec<i64>>, CmdError>>()?;
                Ok(EigenPairJson {
                    eigenvalue: pair.eigenvalue,
                    vectors,
                })
            })
            .collect()
    };
    let spectra_ok = {
        let mut want_pd = vec![i64::from(p.length()), -1];
        let mut want_tm = vec![i64::from(p.length()), -1, p.k_minus_l()];
        if cohomology_case(p) == gtm::topology::CaseTag::Mixed {
            want_pd.push(0);
            want_tm.extend([0, 0]);
        }
        want_pd.sort_unstable();
        want_tm.sort_unstable();
        spectrum(&act, p, MatrixKind::Pd)? == want_pd && spectrum(&act, p, MatrixKind::Tm)? == want_tm
    };
    let tables_ok = paper_eigen_rows(p).into_iter().all(|(kind, lambda, row)| {
        let a = match kind {
            MatrixKind::Tm => &act.a_tm,
            MatrixKind::Pd => &act.a_pd,
        };
        let v: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
        a.left_mul(&v) == v.iter().map(|x| x * BigInt::from(lambda)).collect::<Vec<_>>()
    });
    let checks = TopologyChecks {
        intertwining: verify_intertwining(&act),
        torsion_index: torsion_index_check(&act, p)?,
        spectra: spectra_ok,
        eigenvector_tables: tables_ok,
        zeta_matches_closed_form: zeta_from_matrices(&act, MatrixKind::Tm)
            .eq_normalised(&zeta_tm(p))
            && zeta_from_matrices(&act, MatrixKind::Pd).eq_normalised(&zeta_pd(p)),
    };
    let all_ok = checks.intertwining
        && checks.torsion_index
        && checks.spectra
        && checks.eigenvector_tables
        && checks.zeta_matches_closed_form;
    let (h1_tm, h1_pd) = h1_groups(p);
    let report = TopologyReport {
        k: p.k(),
        l: p.l(),
        case: cohomology_case(p),
        basis_tm: act.basis_tm.clone(),
        basis_pd: act.basis_pd.clone(),
        a_tm: act.a_tm.to_i64_rows(),
        a_pd: act.a_pd.to_i64_rows(),
        p_map: act.p_map.to_i64_rows(),
        checks,
        eigen_tm: to_json(eigen_tm)?,
        eigen_pd: to_json(eigen_pd)?,
        h1_tm,
        h1_pd,
        zeta: zeta_report(p, n_max)?,
    };
    let mut out = writer(output)?;
    serde_json::to_writer_pretty(&mut out, &report)
        .map_err(|e| CmdError::consistency(format!("JSON serialisation failed: {e}")))?;
    writeln!(out)?;
    if !all_ok {
        return Err(CmdError::consistency(
            "one or more topology consistency checks failed (see the checks object)",
        ));
    }
    Ok(())
}

fn cmd_zeta(p: Params, n_max: u32, output: &OutputArg) -> Result<(), CmdError> {
    let report = zeta_report(p, n_max)?;
    let mut out = writer(output)?;
    serde_json::to_writer_pretty(&mut out, &report)
        .map_err(|e| CmdError::consistency(format!("JSON serialisation failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}

fn cmd_substitute(
    p: Params,
    alphabet: AlphabetArg,
    word: Option<&str>,
    prefix: Option<u64>,
    window: Option<u64>,
    steps: u32,
    output: &OutputArg,
) -> Result<(), CmdError> {
    let mut out = writer(output)?;
    match alphabet {
        AlphabetArg::Gtm => {
            let mut w: Word<GtmLetter> = match (word, prefix, window) {
                (Some(s), None, None) => s.parse()?,
                (None, Some(n), None) => gtm_fixed_point_prefix(p, n as usize),
                (None, None, Some(r)) => gtm_two_sided_window(p, r as usize),
                (None, None, None) => Word::new(vec![GtmLetter::Plus]),
                _ => return Err(CmdError::usage("--word, --prefix and --window are mutually exclusive")),
            };
            writeln!(out, "{w}")?;
            for _ in 0..steps {
                w = substitute_gtm(p, &w);
                writeln!(out, "{w}")?;
            }
        }
        AlphabetArg::Gpd => {
            if prefix.is_some() || window.is_some() {
                return Err(CmdError::usage(
                    "--prefix and --window are defined for the gtm alphabet only",
                ));
            }
            let mut w: Word<GpdLetter> = match word {
                Some(s) => s.parse()?,
                None => Word::new(vec![GpdLetter::A]),
            };
            writeln!(out, "{w}")?;
            for _ in 0..steps {
                w = substitute_gpd(p, &w);
                writeln!(out, "{w}")?;
            }
        }
    }
    Ok(())
}

fn cmd_verify(p: Params) -> Result<(), CmdError> {
    let checks = verify_all(p);
    let mut first_failure = None;
    for c in &checks {
        println!(
            "{} {} — {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
        if !c.passed && first_failure.is_none() {
            first_failure = Some(c.name.clone());
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "verify ({}, {}): {}/{} checks passed",
        p.k(),
        p.l(),
        checks.len() - failed,
        checks.len()
    );
    match first_failure {
        Some(name) => Err(CmdError::consistency(format!(
            "invariant {name:?} failed ({failed} of {} checks)",
            checks.len()
        ))),
        None => Ok(()),
    }
}
