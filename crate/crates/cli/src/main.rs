use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use xmod_core::cohomology::{cohomology_group, ResolutionChoice};
use xmod_core::error::Error;
use xmod_core::extensions::{
    baer_act, center_extension, enumerate_extensions, is_extendible, obstruction, realize, AbstractKernel, KernelJson,
    SearchBudget, DEFAULT_AUT_BOUND,
};
use xmod_core::freexmod::{identity_class, identity_module, k_invariant, verify_identity, FreeCrossedModule};
use xmod_core::group::FiniteGroup;
use xmod_core::grouprings::QModule;
use xmod_core::presentations::{cayley_graph, todd_coxeter, Presentation, DEFAULT_MAX_COSETS};
use xmod_core::topology::{cover_complex, cover_homology, export_dot};
use xmod_core::xmod::{two_fold_extension, CrossedModuleJson, FiniteCrossedModule};

#[derive(Parser, Debug)]
#[command(name = "xmod", version, about = "Crossed modules, identities among relations and group cohomology")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (computations currently run on one thread).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,

    /// Seed for randomized choices (section choice in `class`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS, value_parser = positive)]
    max_cosets: usize,

    /// Largest automorphism group enumerated for kernels.
    #[arg(long, global = true, default_value_t = DEFAULT_AUT_BOUND, value_parser = positive)]
    aut_bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

/// A presentation given inline or read from a file.
#[derive(Args, Debug)]
struct PresentationInput {
    presentation: Option<String>,
    #[arg(long, conflicts_with = "presentation")]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FileInput {
    #[arg(long)]
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the finite group of a presentation.
    Group(PresentationInput),
    /// Cayley graph of the enumerated group.
    Cayley(PresentationInput),
    /// Module of identities among relations.
    Identities(PresentationInput),
    /// Check a product of conjugated relators, given as JSON
    /// `[[conjugator, relator, sign], ...]`.
    VerifyIdentity {
        #[command(flatten)]
        input: PresentationInput,
        #[arg(long)]
        element: String,
    },
    /// `H^n(Q, M)` for the group of a presentation.
    Cohomology {
        #[arg(long)]
        group: String,
        /// `trivial:` followed by summands `Z` or `Z/m` joined by `x`.
        #[arg(long, default_value = "trivial:Z")]
        module: String,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Resolution::Auto)]
        resolution: Resolution,
    },
    /// Check the crossed-module axioms for a JSON crossed module.
    XmodCheck(FileInput),
    /// Characteristic class of a crossed module file, or the k-invariant
    /// of a presentation restricted to each generator's cyclic subgroup.
    Class {
        #[arg(long, conflicts_with = "presentation")]
        file: Option<PathBuf>,
        #[arg(long)]
        presentation: Option<String>,
    },
    /// Obstruction class of an abstract kernel.
    KernelObstruct(FileInput),
    /// Construct an extension realizing an abstract kernel.
    Extend(FileInput),
    /// Act on the realized extension by a class of `H^2(Q, Z(N))`.
    Baer {
        #[arg(long)]
        file: PathBuf,
        /// Coordinates of the class, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        class: Vec<i64>,
    },
    /// All congruence classes of extensions of a kernel.
    Enumerate {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
        max_nodes: u64,
    },
    /// Homology of the universal cover of the presentation complex.
    CoverHomology(PresentationInput),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Resolution {
    Bar,
    Periodic,
    Auto,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Exit 1 for a failed computation or a negative answer, 2 for bad input.
#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotExtendible
            | Error::NotAnIdentity(_)
            | Error::CosetLimit(_)
            | Error::SizeBound(_)
            | Error::BudgetExceeded(_)
            | Error::NotACocycle
            | Error::InconsistentWitness(_) => Failure::Domain(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Successful output, plus whether the answer counts as a domain failure.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn json(v: Value) -> Self {
        Output { text: serde_json::to_string_pretty(&v).expect("serializable") + "\n", ok: true }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn presentation(input: &PresentationInput) -> Result<Presentation, Failure> {
    let text = match (&input.presentation, &input.file) {
        (Some(t), None) => t.clone(),
        (None, Some(f)) => read(f)?,
        _ => return Err(Failure::Input("give a presentation inline or with --file".into())),
    };
    Ok(Presentation::parse(text.trim())?)
}

fn kernel(cli: &Cli, path: &PathBuf) -> Result<AbstractKernel, Failure> {
    let j: KernelJson = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(AbstractKernel::from_json(&j, cli.aut_bound)?)
}

fn parse_module(q: &Arc<FiniteGroup>, spec: &str) -> Result<QModule, Failure> {
    let bad = || Failure::Input(format!("unsupported module `{spec}`"));
    let summands = spec.strip_prefix("trivial:").ok_or_else(bad)?;
    let factors = summands
        .split('x')
        .map(|s| match s.trim() {
            "Z" => Ok(0),
            t => t.strip_prefix("Z/").and_then(|m| m.parse::<u64>().ok()).filter(|&m| m >= 2).ok_or_else(bad),
        })
        .collect::<Result<Vec<u64>, Failure>>()?;
    Ok(QModule::trivial(q, factors)?)
}

fn ints(v: &[BigInt]) -> Vec<Value> {
    v.iter().map(|x| x.to_string().parse::<Value>().expect("integer")).collect()
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    if cli.format == Format::Dot && !matches!(cli.command, Command::Cayley(_)) {
        return Err(Failure::Input("--format dot is only available for `cayley`".into()));
    }
    let text = |s: String, v: Value| match cli.format {
        Format::Text => Output { text: s + "\n", ok: true },
        _ => Output::json(v),
    };
    Ok(match &cli.command {
        Command::Group(input) => {
            let p = presentation(input)?;
            let (q, wm) = todd_coxeter(&p, cli.max_cosets)?;
            text(
                format!("order {}", q.order()),
                json!({"schema_version": 1, "order": q.order(), "table": q.rows(), "generator_images": wm.images()}),
            )
        }
        Command::Cayley(input) => {
            let p = presentation(input)?;
            let (q, wm) = todd_coxeter(&p, cli.max_cosets)?;
            let g = cayley_graph(&q, &wm);
            match cli.format {
                Format::Dot => Output { text: export_dot(&g), ok: true },
                _ => {
                    let edges: Vec<Value> =
                        g.edges.iter().map(|e| json!([e.source, e.target, g.generator_names[e.generator]])).collect();
                    text(
                        format!("{} vertices, {} edges", g.vertices, g.edges.len()),
                        json!({"schema_version": 1, "vertices": g.vertices, "edges": edges}),
                    )
                }
            }
        }
        Command::Identities(input) => {
            let ctx = FreeCrossedModule::new(presentation(input)?, cli.max_cosets)?;
            let m = identity_module(&ctx)?;
            let j = m.to_json();
            text(format!("{}", m.structure()), serde_json::to_value(j).expect("serializable"))
        }
        Command::VerifyIdentity { input, element } => {
            let triples: Vec<(String, String, i64)> =
                serde_json::from_str(element).map_err(|e| Failure::Input(format!("element: {e}")))?;
            let ctx = FreeCrossedModule::new(presentation(input)?, cli.max_cosets)?;
            let e = ctx.element_from_triples(&triples)?;
            let identity = verify_identity(&e);
            let class = if identity { Some(identity_class(&e, &identity_module(&ctx)?)?) } else { None };
            let zero = class.as_ref().map(|c| c.iter().all(|x| x == &BigInt::from(0)));
            let mut out = text(
                match zero {
                    None => format!("not an identity: boundary {}", e.boundary()),
                    Some(true) => "identity, zero class".into(),
                    Some(false) => "identity, non-zero class".into(),
                },
                json!({
                    "schema_version": 1,
                    "identity": identity,
                    "boundary": e.boundary().to_string(),
                    "class": class.as_deref().map(ints),
                    "class_is_zero": zero,
                }),
            );
            out.ok = identity;
            out
        }
        Command::Cohomology { group, module, degree, resolution } => {
            let (q, _) = todd_coxeter(&Presentation::parse(group)?, cli.max_cosets)?;
            let m = parse_module(&Arc::new(q), module)?;
            let choice = match resolution {
                Resolution::Bar => ResolutionChoice::Bar,
                Resolution::Periodic => ResolutionChoice::Periodic,
                Resolution::Auto => ResolutionChoice::Auto,
            };
            let (_, h) = cohomology_group(&m, *degree, choice)?;
            text(format!("{}", h.structure), serde_json::to_value(h.to_json()).expect("serializable"))
        }
        Command::XmodCheck(FileInput { file }) => {
            let j: CrossedModuleJson = serde_json::from_str(&read(file)?).map_err(|e| Failure::Input(e.to_string()))?;
            let c = Arc::new(FiniteGroup::from_json(&j.c)?);
            let g = Arc::new(FiniteGroup::from_json(&j.g)?);
            let report = xmod_core::xmod::check_crossed_module(&c, &g, &j.boundary, &j.action);
            let mut out = text(
                if report.is_valid() { "valid".into() } else { format!("{} failures", report.failures.len()) },
                json!({"schema_version": 1, "valid": report.is_valid(), "failures": report.failures}),
            );
            out.ok = report.is_valid();
            out
        }
        Command::Class { file: Some(file), presentation: None } => {
            let j: CrossedModuleJson = serde_json::from_str(&read(file)?).map_err(|e| Failure::Input(e.to_string()))?;
            let cm = FiniteCrossedModule::from_json(&j)?;
            let class = two_fold_extension(&cm)?.characteristic_class_seeded(cli.seed)?;
            let (h, coords) = class.coordinates()?;
            let order = h.class_order(&coords);
            text(
                format!("class {:?} in {}", ints(&coords), h.structure),
                json!({
                    "schema_version": 1,
                    "cohomology": h.to_json(),
                    "coordinates": ints(&coords),
                    "order": order.map(|o| ints(&[o])[0].clone()),
                }),
            )
        }
        Command::Class { file: None, presentation: Some(p) } => {
            let ctx = FreeCrossedModule::new(Presentation::parse(p)?, cli.max_cosets)?;
            let k = k_invariant(&identity_module(&ctx)?)?;
            let q = ctx.group();
            let mut rows = Vec::new();
            let mut lines = Vec::new();
            for (name, &g) in ctx.presentation().alphabet().names().iter().zip(ctx.word_map().images()) {
                let (sub, emb) = q.subgroup(&q.generated_subgroup(&[g]))?;
                let zero = k.restrict(&Arc::new(sub), &emb).is_zero()?;
                lines.push(format!("<{name}>: {}", if zero { "zero" } else { "non-zero" }));
                rows.push(json!({"generator": name, "subgroup_order": emb.len(), "zero": zero}));
            }
            text(lines.join("\n"), json!({"schema_version": 1, "degree": 3, "restrictions": rows}))
        }
        Command::Class { .. } => return Err(Failure::Input("give exactly one of --file or --presentation".into())),
        Command::KernelObstruct(FileInput { file }) => {
            let k = kernel(cli, file)?;
            let class = obstruction(&k)?;
            let (h, coords) = class.coordinates()?;
            let zero = h.class_order(&coords).is_some_and(|o| o == BigInt::from(1));
            text(
                format!("{} in {}", if zero { "extendible" } else { "not extendible" }, h.structure),
                json!({
                    "schema_version": 1,
                    "extendible": zero,
                    "cohomology": h.to_json(),
                    "coordinates": ints(&coords),
                }),
            )
        }
        Command::Extend(FileInput { file }) => {
            let k = kernel(cli, file)?;
            let e = realize(&k)?;
            text(format!("extension of order {}", e.e.order()), serde_json::to_value(e.to_json()).expect("serializable"))
        }
        Command::Baer { file, class } => {
            let k = kernel(cli, file)?;
            if !is_extendible(&k)? {
                return Err(Failure::Domain(Error::NotExtendible.to_string()));
            }
            let base = realize(&k)?;
            let coords: Vec<BigInt> = class.iter().map(|&c| BigInt::from(c)).collect();
            let (z, center) = center_extension(&k, &coords)?;
            let e = baer_act(&base, &z, &center)?;
            text(format!("extension of order {}", e.e.order()), serde_json::to_value(e.to_json()).expect("serializable"))
        }
        Command::Enumerate { file, max_nodes } => {
            let k = kernel(cli, file)?;
            let budget = SearchBudget { max_nodes: *max_nodes, ..SearchBudget::default() };
            let classes = enumerate_extensions(&k, budget)?;
            let list: Vec<Value> = classes.iter().map(|e| serde_json::to_value(e.to_json()).expect("serializable")).collect();
            text(format!("{} classes", classes.len()), json!({"schema_version": 1, "count": classes.len(), "extensions": list}))
        }
        Command::CoverHomology(input) => {
            let p = presentation(input)?;
            let (_, wm) = todd_coxeter(&p, cli.max_cosets)?;
            let h = cover_homology(&cover_complex(&p, &wm));
            text(
                format!("H0 = {}, H1 = {}, H2 = {}, chi = {}", h.h0, h.h1, h.h2, h.chi),
                serde_json::to_value(h.to_json()).expect("serializable"),
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
