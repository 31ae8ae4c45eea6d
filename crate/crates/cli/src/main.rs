use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use horosphere::circulant::{check_sandwich, CirculantGraph};
use horosphere::experiments::{
    convergence_report, lattice_average, psi_samples, torus_character_average, torus_character_average_direct,
    ConvergenceConfig, ExperimentReport, LatticeTestFn, PsiRoute, PsiSample,
};
use horosphere::hecke::{hecke_average, hecke_orbit};
use horosphere::lattices::{
    covering_radius_bnb, covering_radius_l1, sublattice_from_residue, unimodular_from_residue, CountKind, Region,
    SublatticeBasis, DEFAULT_EPS, DEFAULT_MAX_CELLS,
};
use horosphere::numtheory::{
    count_rq, factorize, gamma0_index, kloosterman, ramanujan_sum, weil_report, ExpSumTable,
};
use horosphere::residues::{
    coset_and_unit, enumerate_cosets, enumerate_rq, horosphere_representative, parametrize_r, sample_rq,
};
use horosphere::{Error, IntMatrix, ResidueVector};

const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "horosphere", version, about = "Primitive rational points on horospheres, Hecke points, and circulant graph diameters")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the result to this file (atomically) instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; csv is only available for sample dumps
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for parallel evaluation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Include wall-clock runtime in experiment reports
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    All,
    Primitive,
}

impl From<Kind> for CountKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::All => CountKind::All,
            Kind::Primitive => CountKind::Primitive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Linf,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Diameter,
    CoveringRadius,
}

impl From<Route> for PsiRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Diameter => PsiRoute::Diameter,
            Route::CoveringRadius => PsiRoute::CoveringRadius,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// per-cell exact maximization over the quotient torus
    Exact,
    /// Lipschitz branch and bound on the fundamental box
    Bnb,
}

#[derive(Args)]
struct ModDim {
    /// Modulus q
    #[arg(long)]
    q: u64,
    /// Dimension d
    #[arg(long)]
    d: usize,
}

#[derive(Args)]
struct ResidueArgs {
    /// Modulus q
    #[arg(long)]
    q: u64,
    /// Dimension d (required when --a is omitted)
    #[arg(long)]
    d: Option<usize>,
    /// Residue vector a as a comma-separated list; sampled from R_q with --seed if omitted
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i128>>,
}

#[derive(Args)]
struct TestFnArgs {
    /// Which lattice vectors are counted
    #[arg(long, value_enum, default_value_t = Kind::Primitive)]
    kind: Kind,
    /// Norm of the centred ball
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    /// Radius of the centred ball
    #[arg(long, default_value_t = 1.2)]
    radius: f64,
}

impl TestFnArgs {
    fn build(&self) -> Result<LatticeTestFn, CliError> {
        let region = match self.norm {
            Norm::Linf => Region::LInf(self.radius),
            Norm::L2 => Region::L2(self.radius),
        };
        LatticeTestFn::new(self.kind.into(), region).map_err(|e| CliError::usage(format!("--radius: {e}")))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Number of d-tuples in (0, q]^d jointly coprime to q (the primitive rational points of denominator q)
    CountRq(ModDim),
    /// Lists R_q in lexicographic order
    EnumerateRq(ModDim),
    /// Kloosterman sum S(a, b; q) = sum over units u of e((a u^-1 + b u) / q); prints its real value
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        q: u64,
    },
    /// Ramanujan sum c_q(n) = mu(q/g) phi(q) / phi(q/g), g = gcd(n, q)
    Ramanujan {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        q: u64,
    },
    /// Weil bound |S(a,b;q)| <= sqrt(q) gcd(a,b,q)^(1/2) tau(q), for one pair or all pairs mod q
    WeilCheck {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true, requires = "b")]
        a: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        b: Option<i64>,
    },
    /// Right cosets of Gamma_0(q) in SL_d(Z), labelled by projective points mod q, with their count
    Cosets(ModDim),
    /// Splits r in R_q into a Gamma_0(q) coset representative gamma and a unit u with r = u (last row of gamma) mod q
    Parametrize(ResidueArgs),
    /// Integer matrix M in SL_(d+1)(Z) whose coset places q^-1 r on the expanding horosphere
    HorosphereRep(ResidueArgs),
    /// Hecke-point average of a lattice-point count over the orbit of diag(q,...,q,1), against its Haar mean
    HeckeTest {
        #[command(flatten)]
        md: ModDim,
        #[command(flatten)]
        f: TestFnArgs,
    },
    /// Hermite normal form of the kernel lattice {m : m . a = 0 mod q}, or of an explicit basis
    Sublattice {
        #[command(flatten)]
        r: OptResidueArgs,
        /// Rows of an integer basis, e.g. "5,0;3,1"
        #[arg(long, conflicts_with_all = ["q", "a"])]
        basis: Option<String>,
    },
    /// Certified l1 covering radius of the lattice q^(-1/d) {m : m . a = 0 mod q} or of an explicit basis
    CoveringRadius {
        #[command(flatten)]
        r: OptResidueArgs,
        /// Rows of an integer basis, e.g. "5,0;3,1"
        #[arg(long, conflicts_with_all = ["q", "a"])]
        basis: Option<String>,
        /// Scale applied to --basis
        #[arg(long, default_value_t = 1.0, requires = "basis")]
        scale: f64,
        /// Certification tolerance
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Cell budget for --method bnb
        #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
        max_cells: u64,
    },
    /// Diameter of the circulant graph C_q(a) and its rescaling diam / q^(1/d)
    Diam(ResidueArgs),
    /// Checks q^(1/d) rho - d/2 <= diam(C_q(a)) <= q^(1/d) rho, for one a or --n-samples random ones
    SandwichCheck {
        #[command(flatten)]
        r: ResidueArgs,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Number of random a in R_q to test (ignores --a)
        #[arg(long)]
        n_samples: Option<u64>,
    },
    /// Average of e(n . r / q) over r in R_q
    TorusAverage {
        #[arg(long)]
        q: u64,
        /// Frequency vector n, comma-separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        n: Vec<i64>,
        /// Sum directly over R_q instead of the closed form
        #[arg(long)]
        direct: bool,
    },
    /// Mean of a lattice-point count over the lattices q^(-1/d) {m : m . a = 0 mod q}, a in R_q
    LatticeAverage {
        #[command(flatten)]
        md: ModDim,
        #[command(flatten)]
        f: TestFnArgs,
        /// Number of sampled a; the average is exhaustive when this reaches #R_q
        #[arg(long, default_value_t = 2000)]
        n_samples: u64,
    },
    /// Empirical distribution of diam(C_q(a)) / q^(1/d) and of the covering radius over random a in R_q
    Distribution {
        #[command(flatten)]
        md: ModDim,
        #[command(flatten)]
        s: SampleArgs,
    },
    /// Empirical distributions across several moduli with Kolmogorov-Smirnov distances to the largest
    Convergence {
        #[arg(long)]
        d: usize,
        /// Ascending moduli, comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        q_list: Vec<u64>,
        #[command(flatten)]
        s: SampleArgs,
    },
}

#[derive(Args)]
struct OptResidueArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i128>>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    n_samples: u64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Which quantity the CCDF and KS distances use
    #[arg(long, value_enum, default_value_t = Route::Diameter)]
    route: Route,
    /// Spacing of the CCDF grid
    #[arg(long, default_value_t = 0.1)]
    ccdf_step: f64,
    /// Also write raw samples as one CSV file per modulus into this directory
    #[arg(long)]
    samples_dir: Option<PathBuf>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_cap_exceeded() { EXIT_CAP } else { EXIT_USAGE };
        CliError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 1, msg: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn residue(q: u64, d: Option<usize>, a: Option<&[i128]>, seed: u64) -> CliResult<ResidueVector> {
    match (a, d) {
        (Some(a), Some(d)) if a.len() != d => {
            Err(CliError::usage(format!("--a has {} entries but --d is {d}", a.len())))
        }
        (Some(a), _) => Ok(ResidueVector::new(q, a)?),
        (None, Some(d)) => Ok(sample_rq(q, d, seed)?),
        (None, None) => Err(CliError::usage("--d is required when --a is not given")),
    }
}

fn parse_basis(s: &str) -> CliResult<IntMatrix> {
    let rows = s
        .split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<i128>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::usage(format!("--basis: {e}")))?;
    let m = IntMatrix::from_rows(&rows).map_err(|e| CliError::usage(format!("--basis: {e}")))?;
    if !m.is_square() {
        return Err(CliError::usage("--basis must be square"));
    }
    Ok(m)
}

fn lattice_input(r: &OptResidueArgs, basis: Option<&str>, scale: f64, seed: u64, unimodular: bool) -> CliResult<SublatticeBasis> {
    if let Some(b) = basis {
        return Ok(SublatticeBasis::new(&parse_basis(b)?, scale)?);
    }
    let q = r.q.ok_or_else(|| CliError::usage("either --basis or --q is required"))?;
    let a = residue(q, r.d, r.a.as_deref(), seed)?;
    Ok(if unimodular { unimodular_from_residue(&a)? } else { sublattice_from_residue(&a)? })
}

fn check_eps(eps: f64) -> CliResult<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--eps must be positive, got {eps}")))
    }
}

fn samples_csv(samples: &[PsiSample], d: usize) -> String {
    let mut out = String::from("q");
    for i in 1..=d {
        out.push_str(&format!(",a{i}"));
    }
    out.push_str(",diam,rescaled,rho_lo,rho_hi\n");
    for s in samples {
        out.push_str(&s.q.to_string());
        for a in &s.a {
            out.push_str(&format!(",{a}"));
        }
        out.push_str(&format!(",{},{},{},{}\n", s.diam, s.rescaled, s.rho_lo, s.rho_hi));
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn report_output(
    mut report: ExperimentReport,
    d: usize,
    s: &SampleArgs,
    cli: &Cli,
) -> CliResult<String> {
    if cli.format == Format::Csv {
        let all: Vec<PsiSample> = report.samples.concat();
        return Ok(samples_csv(&all, d));
    }
    if let Some(dir) = &s.samples_dir {
        std::fs::create_dir_all(dir)?;
        for (res, samples) in report.results.iter_mut().zip(&report.samples) {
            let path = dir.join(format!("samples_q{}_d{d}_seed{}.csv", res.q, cli.seed));
            write_atomic(&path, &samples_csv(samples, d))?;
            res.samples_file = Some(path.display().to_string());
        }
    }
    if !cli.timing {
        report.runtime_seconds = None;
    }
    Ok(to_json(&report))
}

fn sample_config(d: usize, q_list: Vec<u64>, s: &SampleArgs) -> CliResult<ConvergenceConfig> {
    check_eps(s.eps)?;
    if !(s.ccdf_step > 0.0) {
        return Err(CliError::usage("--ccdf-step must be positive"));
    }
    if s.n_samples == 0 {
        return Err(CliError::usage("--n-samples must be at least 1"));
    }
    Ok(ConvergenceConfig { d, q_list, n_samples: s.n_samples, eps: s.eps, route: s.route.into(), ccdf_step: s.ccdf_step })
}

fn run(cli: &Cli) -> CliResult<String> {
    let csv_ok = matches!(cli.command, Command::EnumerateRq(_) | Command::Distribution { .. } | Command::Convergence { .. });
    if cli.format == Format::Csv && !csv_ok {
        return Err(CliError::usage("--format csv is only available for enumerate-rq, distribution and convergence"));
    }
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::CountRq(ModDim { q, d }) => count_rq(&factorize(*q)?, *d)?.to_string(),
        Command::EnumerateRq(ModDim { q, d }) => {
            let it = enumerate_rq(*q, *d)?;
            if cli.format == Format::Csv {
                let mut out: String = (1..=*d).map(|i| format!("a{i}")).collect::<Vec<_>>().join(",");
                out.push('\n');
                for r in it {
                    out.push_str(&r.coords().iter().map(u64::to_string).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            } else {
                let all: Vec<Vec<u64>> = it.map(|r| r.coords().to_vec()).collect();
                to_json(&json!({ "q": q, "d": d, "count": all.len(), "residues": all }))
            }
        }
        Command::Kloosterman { a, b, q } => {
            let s = kloosterman(*a, *b, *q)?;
            to_json(&s.re)
        }
        Command::Ramanujan { n, q } => ramanujan_sum(*n, &factorize(*q)?).to_string(),
        Command::WeilCheck { q, a, b } => {
            let fq = factorize(*q)?;
            match (a, b) {
                (Some(a), Some(b)) => to_json(&weil_report(kloosterman(*a, *b, *q)?, *a, *b, &fq)),
                _ => {
                    let table = ExpSumTable::new(*q)?;
                    let (mut violations, mut worst) = (0u64, 0.0f64);
                    for a in 0..*q as i64 {
                        for b in 0..*q as i64 {
                            let w = weil_report(table.kloosterman(a, b), a, b, &fq);
                            violations += u64::from(!w.holds);
                            worst = worst.max(w.lhs / w.rhs);
                        }
                    }
                    to_json(&json!({ "q": q, "checked": q * q, "violations": violations, "max_ratio": worst }))
                }
            }
        }
        Command::Cosets(ModDim { q, d }) => {
            let cosets: Vec<_> = enumerate_cosets(*q, *d)?.collect();
            let index = gamma0_index(&factorize(*q)?, *d)?;
            to_json(&json!({ "q": q, "d": d, "index": index, "count": cosets.len(), "cosets": cosets }))
        }
        Command::Parametrize(r) => {
            let a = residue(r.q, r.d, r.a.as_deref(), seed)?;
            let (coset, u) = coset_and_unit(&a);
            let back = parametrize_r(&coset.gamma, u as i128, r.q)?;
            to_json(&json!({ "r": a, "label": coset.label, "gamma": coset.gamma, "u": u, "roundtrip": back == a }))
        }
        Command::HorosphereRep(r) => {
            let a = residue(r.q, r.d, r.a.as_deref(), seed)?;
            let m = horosphere_representative(&a)?;
            to_json(&json!({ "r": a, "matrix": m, "det": m.det()? }))
        }
        Command::HeckeTest { md, f } => {
            let test = f.build()?;
            let index = hecke_orbit(md.q, md.d)?.len();
            let average = hecke_average(md.q, md.d, |l| test.eval(l))?;
            let reference = test.reference(md.d);
            to_json(&json!({
                "q": md.q, "d": md.d, "index": index, "average": average,
                "reference": reference, "abs_deviation": (average - reference).abs(),
            }))
        }
        Command::Sublattice { r, basis } => {
            let lat = lattice_input(r, basis.as_deref(), 1.0, seed, false)?;
            to_json(&json!({ "basis": lat.basis(), "index": lat.index(), "scale": lat.scale() }))
        }
        Command::CoveringRadius { r, basis, scale, eps, method, max_cells } => {
            check_eps(*eps)?;
            let lat = lattice_input(r, basis.as_deref(), *scale, seed, true)?;
            let res = match method {
                Method::Exact => covering_radius_l1(&lat, *eps)?,
                Method::Bnb => covering_radius_bnb(&lat, *eps, *max_cells)?,
            };
            to_json(&res)
        }
        Command::Diam(r) => {
            let a = residue(r.q, r.d, r.a.as_deref(), seed)?;
            let diam = CirculantGraph::from_residue(&a).diameter()?;
            let rescaled = diam as f64 / (r.q as f64).powf(1.0 / a.dim() as f64);
            to_json(&json!({ "q": r.q, "a": a.coords(), "diam": diam, "rescaled": rescaled }))
        }
        Command::SandwichCheck { r, eps, n_samples } => {
            check_eps(*eps)?;
            match n_samples {
                None => to_json(&check_sandwich(&residue(r.q, r.d, r.a.as_deref(), seed)?, *eps)?),
                Some(n) => {
                    let d = r.d.ok_or_else(|| CliError::usage("--d is required with --n-samples"))?;
                    let reports = psi_samples(r.q, d, *n, seed, *eps)?;
                    let bad: Vec<&PsiSample> = reports.iter().filter(|s| !s.sandwich_ok(*eps)).collect();
                    to_json(&json!({ "q": r.q, "d": d, "n": n, "violations": bad.len(), "failing": bad }))
                }
            }
        }
        Command::TorusAverage { q, n, direct } => {
            let v = if *direct { torus_character_average_direct(*q, n)? } else { torus_character_average(*q, n)? };
            to_json(&json!({ "q": q, "n": n, "re": v.re, "im": v.im, "abs": v.abs(), "abs_err": v.abs_err }))
        }
        Command::LatticeAverage { md, f, n_samples } => {
            let test = f.build()?;
            let avg = lattice_average(md.q, md.d, &test, *n_samples, seed)?;
            let dev = (avg.mean - avg.reference).abs();
            to_json(&json!({
                "q": avg.q, "d": avg.d, "n": avg.n, "exhaustive": avg.exhaustive, "mean": avg.mean,
                "reference": avg.reference, "abs_deviation": dev, "rel_deviation": dev / avg.reference,
            }))
        }
        Command::Distribution { md, s } => {
            let config = sample_config(md.d, vec![md.q], s)?;
            report_output(convergence_report(&config, seed)?, md.d, s, cli)?
        }
        Command::Convergence { d, q_list, s } => {
            if q_list.len() < 2 {
                return Err(CliError::usage("--q-list needs at least two moduli"));
            }
            let config = sample_config(*d, q_list.clone(), s)?;
            report_output(convergence_report(&config, seed)?, *d, s, cli)?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError { code: 1, msg: e.to_string() }),
        },
        None => run(&cli),
    };
    let result = result.and_then(|mut text| {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &cli.out {
            Some(path) => write_atomic(path, &text),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::from),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
