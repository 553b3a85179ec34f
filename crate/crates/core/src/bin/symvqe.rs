use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symvqe::dla::{generator_closure, torus_check, torus_check_on_support, DlaSummary, DEFAULT_TOL};
use symvqe::group::{builtin_group, GroupSpec, SubgroupSpec};
use symvqe::hamiltonian::{
    build_hamiltonian, build_prism_model, check_selection_rules, parse_fcidump, rotate_degenerate_shells, IntegralSet,
};
use symvqe::orbitals::{LabelSidecar, OrbitalBasis, DEFAULT_DEGENERACY_THRESHOLD};
use symvqe::pool::{
    deficit_report, deficit_tsv, filter_abelian, filter_equivariant, filter_integral, generate_uccsd, DeficitRow,
    ExcitationKind, Pool,
};
use symvqe::report::{tsv, write_report, RunManifest};
use symvqe::vqe::{plateau_diagnostic, PlateauRow, VqeConfig, VqeProblem, VqeResult};
use symvqe::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

#[derive(Parser)]
#[command(name = "symvqe", version, about = "Symmetry-filtered UCCSD pools, Lie closures and VQE diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pool sizes per filter and the per-channel deficit table.
    PoolReport(Common),
    /// Lie closure of a filtered pool and the torus check.
    Dla(DlaArgs),
    /// VQE from the reference determinant, with the FCI gap.
    Vqe(VqeArgs),
    /// Initialization gradients and selection-rule violations.
    Diagnose(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FilterArg {
    None,
    Abelian,
    Equivariant,
    Integral,
}

impl FilterArg {
    fn name(self) -> &'static str {
        match self {
            FilterArg::None => "none",
            FilterArg::Abelian => "abelian",
            FilterArg::Equivariant => "equivariant",
            FilterArg::Integral => "integral",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindsArg {
    All,
    Singles,
    Doubles,
}

#[derive(Args)]
struct Common {
    /// Integral file; requires --labels.
    #[arg(long, value_name = "PATH")]
    fcidump: Option<PathBuf>,
    /// Orbital label sidecar (JSON).
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
    /// Built-in triangular-prism Hubbard model instead of files.
    #[arg(long, value_name = "T1,T2,U")]
    prism: Option<String>,
    /// Built-in group name or a group JSON file.
    #[arg(long, default_value = "C3v")]
    group: String,
    /// Abelian subgroup; the group's default when omitted.
    #[arg(long)]
    subgroup: Option<String>,
    /// Pool filter; each command has its own default.
    #[arg(long, value_enum)]
    filter: Option<FilterArg>,
    /// Threshold for the integral filter.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// Rotate every two-component virtual shell by this angle (radians).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rotate: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DlaArgs {
    #[command(flatten)]
    common: Common,
    /// Closure size cap; 4^n_modes when omitted.
    #[arg(long)]
    max_dim: Option<usize>,
    /// Restrict the pool to one `OCC,VIR` shell pair (indices into the shell list).
    #[arg(long, value_name = "OCC,VIR")]
    channel: Option<String>,
    #[arg(long, value_enum, default_value_t = KindsArg::All)]
    kinds: KindsArg,
    /// Run the torus check on this particle-number sector of all modes instead of on
    /// the full Fock space of the modes the pool touches.
    #[arg(long)]
    sector: Option<usize>,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct VqeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-4)]
    grad_tol: f64,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptySector(_)
            | Error::TooManyModes { .. }
            | Error::NotOrthogonal(_)
            | Error::SeriesDivergence(_)
            | Error::ImaginaryEnergy(_)
            | Error::DimensionMismatch(_)
            | Error::SectorTooLarge { .. }
            | Error::Eigensolver(_)
            | Error::LineSearch { .. }
            | Error::Io(_) => EXIT_RUNTIME,
            _ => EXIT_VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_VALIDATION, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Everything a command needs about its input system.
struct System {
    ints: IntegralSet,
    basis: OrbitalBasis,
    group: GroupSpec,
    subgroup: SubgroupSpec,
}

impl System {
    fn pool(&self, filter: FilterArg, epsilon: f64) -> CliResult<Pool> {
        let full = generate_uccsd(&self.basis);
        Ok(match filter {
            FilterArg::None => full,
            FilterArg::Abelian => filter_abelian(&full, &self.basis, &self.subgroup)?,
            FilterArg::Equivariant => filter_equivariant(&full, &self.basis, &self.group)?,
            FilterArg::Integral => filter_integral(&full, &self.ints, epsilon)?,
        })
    }
}

fn read_input(path: &Path, manifest: &mut RunManifest) -> CliResult<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    manifest.add_input(path, &bytes);
    Ok(bytes)
}

fn parse_triple(text: &str) -> CliResult<(f64, f64, f64)> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| invalid(format!("--prism expects T1,T2,U: {e}")))?;
    match v.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(invalid("--prism expects exactly three comma-separated numbers")),
    }
}

fn load_group(name: &str, manifest: &mut RunManifest) -> CliResult<GroupSpec> {
    if name.ends_with(".json") {
        let bytes = read_input(Path::new(name), manifest)?;
        let text = String::from_utf8(bytes).map_err(|_| invalid(format!("{name} is not UTF-8")))?;
        Ok(GroupSpec::from_json_str(&text)?)
    } else {
        Ok(builtin_group(name)?)
    }
}

fn load_system(args: &Common, manifest: &mut RunManifest) -> CliResult<System> {
    let group = load_group(&args.group, manifest)?;
    let subgroup = match &args.subgroup {
        Some(name) => group.subgroup(name)?.clone(),
        None => group.default_subgroup()?.clone(),
    };
    manifest.set("group", group.name());
    manifest.set("subgroup", &subgroup.name);
    let (ints, basis) = match (&args.prism, &args.fcidump, &args.labels) {
        (Some(spec), None, None) => {
            if group.name() != "C3v" {
                return Err(invalid("the prism model is labelled by C3v"));
            }
            manifest.set("prism", spec);
            let (t1, t2, u) = parse_triple(spec)?;
            build_prism_model(t1, t2, u)?
        }
        (None, Some(fcidump), Some(labels)) => {
            let text = String::from_utf8(read_input(fcidump, manifest)?)
                .map_err(|_| invalid(format!("{} is not UTF-8", fcidump.display())))?;
            let ints = parse_fcidump(&text)?;
            if ints.ms2() != 0 {
                return Err(invalid("only closed-shell references (MS2 = 0) are supported"));
            }
            let sidecar: LabelSidecar = serde_json::from_slice(&read_input(labels, manifest)?)
                .map_err(|e| invalid(format!("label sidecar {}: {e}", labels.display())))?;
            if sidecar.energies.len() != ints.n_spatial() {
                return Err(invalid(format!(
                    "sidecar has {} orbitals, integrals have {}",
                    sidecar.energies.len(),
                    ints.n_spatial()
                )));
            }
            let basis = OrbitalBasis::from_sidecar(
                &sidecar,
                Some((&group, &subgroup)),
                ints.n_electrons(),
                DEFAULT_DEGENERACY_THRESHOLD,
            )?;
            let violations = check_selection_rules(&ints, &basis, &subgroup)?;
            if let Some(v) = violations.first() {
                return Err(invalid(format!(
                    "{} integrals violate the {} selection rules, first {:?} = {:e}",
                    violations.len(),
                    subgroup.name,
                    v.indices,
                    v.value
                )));
            }
            (ints, basis)
        }
        _ => return Err(invalid("give either --prism or both --fcidump and --labels")),
    };
    manifest.set("rotate", args.rotate);
    let mut ints = ints;
    if args.rotate != 0.0 {
        for shell in basis.shells() {
            if shell.dim() == 2 && !basis.is_occupied(shell.components[0]) {
                ints = rotate_degenerate_shells(&ints, shell, args.rotate)?;
            }
        }
    }
    Ok(System { ints, basis, group, subgroup })
}

fn filter_of(args: &Common, default: FilterArg, manifest: &mut RunManifest) -> FilterArg {
    let filter = args.filter.unwrap_or(default);
    manifest.set("filter", filter.name());
    if filter == FilterArg::Integral {
        manifest.set("epsilon", args.epsilon);
    }
    filter
}

#[derive(Serialize)]
struct ClassRow {
    index: usize,
    class: String,
    kind: ExcitationKind,
}

fn class_rows(pool: &Pool) -> Vec<ClassRow> {
    pool.classes()
        .iter()
        .enumerate()
        .map(|(index, c)| ClassRow { index, class: c.key.to_string(), kind: c.kind() })
        .collect()
}

#[derive(Serialize)]
struct PoolCount {
    filter: String,
    parameters: usize,
    singles: usize,
    doubles: usize,
}

#[derive(Serialize)]
struct PoolReport {
    n_spatial: usize,
    n_electrons: usize,
    counts: Vec<PoolCount>,
    filter: String,
    parameter_count: usize,
    deficits: Vec<DeficitRow>,
    classes: Vec<ClassRow>,
}

fn cmd_pool_report(args: &Common) -> CliResult<u8> {
    let mut manifest = RunManifest::new("pool-report");
    let sys = load_system(args, &mut manifest)?;
    let selected = filter_of(args, FilterArg::Abelian, &mut manifest);
    manifest.set("epsilon", args.epsilon);
    let full = sys.pool(FilterArg::None, args.epsilon)?;
    let mut counts = Vec::new();
    for f in [FilterArg::None, FilterArg::Abelian, FilterArg::Equivariant, FilterArg::Integral] {
        let p = sys.pool(f, args.epsilon)?;
        counts.push(PoolCount {
            filter: p.filter().to_string(),
            parameters: p.parameter_count(),
            singles: p.count(ExcitationKind::Single),
            doubles: p.count(ExcitationKind::Double),
        });
    }
    let pool = sys.pool(selected, args.epsilon)?;
    let deficits = deficit_report(&full, &pool, &sys.basis);
    let body = PoolReport {
        n_spatial: sys.basis.n_spatial(),
        n_electrons: sys.basis.n_electrons(),
        counts,
        filter: pool.filter().to_string(),
        parameter_count: pool.parameter_count(),
        deficits: deficits.clone(),
        classes: class_rows(&pool),
    };
    write_report(&args.out, "pool-report", &mut manifest, &body, Some(&deficit_tsv(&deficits)))?;
    println!("{}: {} parameters ({} unfiltered)", body.filter, body.parameter_count, full.parameter_count());
    Ok(0)
}

#[derive(Serialize)]
struct DlaReport {
    filter: String,
    generators: usize,
    closure: DlaSummary,
    torus_check: bool,
    torus_sector: Option<usize>,
    torus_samples: usize,
}

fn cmd_dla(args: &DlaArgs) -> CliResult<u8> {
    let c = &args.common;
    let mut manifest = RunManifest::new("dla");
    let sys = load_system(c, &mut manifest)?;
    let filter = filter_of(c, FilterArg::Abelian, &mut manifest);
    let mut pool = sys.pool(filter, c.epsilon)?;
    if let Some(channel) = &args.channel {
        let idx: Vec<usize> = channel
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| invalid(format!("--channel expects OCC,VIR: {e}")))?;
        let [occ, vir] = idx[..] else {
            return Err(invalid("--channel expects two shell indices"));
        };
        let kinds: &[ExcitationKind] = match args.kinds {
            KindsArg::All => &[ExcitationKind::Single, ExcitationKind::Double],
            KindsArg::Singles => &[ExcitationKind::Single],
            KindsArg::Doubles => &[ExcitationKind::Double],
        };
        if occ >= sys.basis.shells().len() || vir >= sys.basis.shells().len() {
            return Err(invalid(format!("shell index out of range (there are {})", sys.basis.shells().len())));
        }
        pool = pool.channel(&sys.basis, occ, vir, kinds);
        manifest.set("channel", channel);
        manifest.set("kinds", format!("{:?}", args.kinds).to_lowercase());
    }
    let n_modes = sys.basis.n_modes();
    let max_dim = args.max_dim.unwrap_or_else(|| 4usize.saturating_pow(n_modes as u32));
    let sector = args.sector;
    manifest.set("max_dim", max_dim);
    if let Some(n) = sector {
        manifest.set("sector", n);
    }
    manifest.set("samples", args.samples);
    manifest.set("seed", args.seed);
    let gens = pool.generators();
    let closure = generator_closure(&gens, DEFAULT_TOL, max_dim);
    let torus = match sector {
        Some(n) => torus_check(&gens, n_modes, args.samples, Some(n), args.seed)?,
        None => torus_check_on_support(&gens, args.samples, args.seed)?,
    };
    let body = DlaReport {
        filter: pool.filter().to_string(),
        generators: gens.len(),
        closure: closure.summary(),
        torus_check: torus,
        torus_sector: sector,
        torus_samples: args.samples,
    };
    let table = tsv(
        &["generators", "dimension", "is_abelian", "truncated", "torus_check"],
        &[vec![
            gens.len().to_string(),
            closure.dimension.to_string(),
            closure.is_abelian.to_string(),
            closure.truncated.to_string(),
            torus.to_string(),
        ]],
    );
    write_report(&c.out, "dla", &mut manifest, &body, Some(&table))?;
    println!("dimension {} abelian {} torus {}", closure.dimension, closure.is_abelian, torus);
    if closure.truncated {
        eprintln!("warning: closure truncated at --max-dim {max_dim}");
        return Ok(EXIT_TRUNCATED);
    }
    Ok(0)
}

#[derive(Serialize)]
struct VqeReport {
    filter: String,
    parameters: usize,
    config: VqeConfig,
    reference_energy: f64,
    fci_energy: Option<f64>,
    result: VqeResult,
}

fn cmd_vqe(args: &VqeArgs) -> CliResult<u8> {
    let c = &args.common;
    let mut manifest = RunManifest::new("vqe");
    let sys = load_system(c, &mut manifest)?;
    let filter = filter_of(c, FilterArg::Abelian, &mut manifest);
    let pool = sys.pool(filter, c.epsilon)?;
    let config = VqeConfig { max_iterations: args.max_iterations, grad_norm_tol: args.grad_tol, ..VqeConfig::default() };
    config.validate()?;
    manifest.set("max_iterations", args.max_iterations);
    manifest.set("grad_tol", args.grad_tol);
    let h = build_hamiltonian(&sys.ints);
    let problem = VqeProblem::new(&h, &sys.basis.occupied_spin_orbitals())?;
    let reference_energy = problem.reference_energy()?;
    let fci_energy = match problem.fci() {
        Ok(f) => Some(f.energy),
        Err(Error::SectorTooLarge { dim }) => {
            eprintln!("note: FCI skipped, sector dimension {dim}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let result = problem.run(&pool, &config, fci_energy)?;
    let rows: Vec<Vec<String>> = result
        .trace
        .iter()
        .map(|r| vec![r.iteration.to_string(), format!("{:.12}", r.energy), format!("{:.6e}", r.grad_norm)])
        .collect();
    let table = tsv(&["iteration", "energy", "grad_norm"], &rows);
    println!(
        "energy {:.10} converged {} iterations {} delta_fci_mha {}",
        result.energy,
        result.converged,
        result.iterations,
        result.delta_fci_mha.map_or("NA".into(), |d| format!("{d:.6}"))
    );
    let body = VqeReport {
        filter: pool.filter().to_string(),
        parameters: pool.parameter_count(),
        config,
        reference_energy,
        fci_energy,
        result,
    };
    write_report(&c.out, "vqe", &mut manifest, &body, Some(&table))?;
    Ok(0)
}

#[derive(Serialize)]
struct ViolationRow {
    indices: Vec<usize>,
    value: f64,
}

#[derive(Serialize)]
struct DiagnoseReport {
    filter: String,
    reference_filter: String,
    plateau_count: usize,
    cross_component_plateaus: usize,
    rows: Vec<PlateauRow>,
    selection_rule_violations: Vec<ViolationRow>,
}

fn cmd_diagnose(args: &Common) -> CliResult<u8> {
    let mut manifest = RunManifest::new("diagnose");
    let sys = load_system(args, &mut manifest)?;
    let filter = filter_of(args, FilterArg::Equivariant, &mut manifest);
    let pool = sys.pool(filter, args.epsilon)?;
    let abelian = sys.pool(FilterArg::Abelian, args.epsilon)?;
    let h = build_hamiltonian(&sys.ints);
    let problem = VqeProblem::new(&h, &sys.basis.occupied_spin_orbitals())?;
    let rows = plateau_diagnostic(&problem.hamiltonian, &pool, &problem.reference, Some(&abelian))?;
    let violations = check_selection_rules(&sys.ints, &sys.basis, &sys.subgroup)?;
    let table = tsv(
        &["index", "class", "kind", "gradient", "plateau", "in_abelian_pool"],
        &rows
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    r.class.clone(),
                    r.kind.to_string(),
                    format!("{:.6e}", r.gradient),
                    r.plateau.to_string(),
                    r.in_reference_pool.map_or("NA".into(), |b| b.to_string()),
                ]
            })
            .collect::<Vec<_>>(),
    );
    let body = DiagnoseReport {
        filter: pool.filter().to_string(),
        reference_filter: abelian.filter().to_string(),
        plateau_count: rows.iter().filter(|r| r.plateau).count(),
        cross_component_plateaus: rows.iter().filter(|r| r.plateau && r.in_reference_pool == Some(false)).count(),
        selection_rule_violations: violations
            .into_iter()
            .map(|v| ViolationRow { indices: v.indices, value: v.value })
            .collect(),
        rows,
    };
    println!(
        "{} generators, {} on the plateau ({} outside the Abelian pool), {} selection-rule violations",
        body.rows.len(),
        body.plateau_count,
        body.cross_component_plateaus,
        body.selection_rule_violations.len()
    );
    write_report(&args.out, "diagnose", &mut manifest, &body, Some(&table))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::PoolReport(a) => cmd_pool_report(a),
        Command::Dla(a) => cmd_dla(a),
        Command::Vqe(a) => cmd_vqe(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
