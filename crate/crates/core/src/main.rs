use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bvkr::basic::{basic_set_outer_approx, quasi_section_from_basic, BasicParams};
use bvkr::bratteli::{
    builtin_diagram, diagram_from_kr, finite_paths, telescope_diagram, to_dot, vershik_successor,
    DiagramJson, FinitePath, OrderedBratteliDiagram, Successor, BUILTIN_DIAGRAMS,
};
use bvkr::decisive::{
    check_closing, check_decisive, check_densely_aperiodic, check_quasi_section_empty_interior,
    cross_validate_closing_basic, Coding, PropertyVerdict, Verdict,
};
use bvkr::io::{
    builtin_system, load_system, read_json, to_json, write_atomic, BasicApproxJson,
    CompletenessJson, KrJson, KrReportJson, SectionsJson, BUILTIN_SYSTEMS,
};
use bvkr::pipeline::{run_pipeline, PipelineConfig};
use bvkr::shift::SystemSpec;
use bvkr::towers::{
    build_kr_refinement, telescope_kr, verify_kr, KRRefinement, QuasiSectionApprox,
};
use bvkr::{is_complete_section, ClopenSet, EdgeShift, Error};

#[derive(Parser)]
#[command(
    name = "bvkr",
    version,
    about = "Kakutani-Rohlin refinements, Bratteli-Vershik models and basic sets of edge shifts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a normalized system file.
    Gen(GenArgs),
    #[command(subcommand)]
    Section(SectionCmd),
    #[command(subcommand)]
    Kr(KrCmd),
    #[command(subcommand)]
    Bv(BvCmd),
    #[command(subcommand)]
    Check(CheckCmd),
    #[command(subcommand)]
    Basic(BasicCmd),
    /// Run every stage and write the artifacts into a directory.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of full-2, full-3, golden-mean, two-fixed-points.
    name: Option<String>,
    #[arg(long, conflicts_with = "name")]
    file: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SectionCmd {
    /// Decide whether a clopen set is a complete section.
    Check {
        #[arg(long)]
        system: String,
        #[arg(long)]
        set: String,
    },
}

#[derive(Args, Clone)]
struct SectionSource {
    /// Sections file `{"levels": [...]}`; basic-set sections otherwise.
    #[arg(long)]
    sections: Option<PathBuf>,
    #[arg(long)]
    shift_bound: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Subcommand)]
enum KrCmd {
    Build {
        #[arg(long)]
        system: String,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        src: SectionSource,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Verify {
        #[arg(long)]
        kr: PathBuf,
    },
    Telescope {
        #[arg(long)]
        kr: PathBuf,
        /// Levels to keep, starting with 0.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct DiagramSource {
    /// Diagram file, or a bundled diagram name.
    #[arg(long)]
    diagram: String,
    /// Depth for bundled diagrams.
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum BvCmd {
    /// Diagram of a refinement file.
    Build {
        #[arg(long)]
        kr: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List the paths from the root to a level.
    Paths {
        #[command(flatten)]
        src: DiagramSource,
        #[arg(long)]
        level: usize,
    },
    /// Iterate the successor map from a path given by edge indices.
    Vershik {
        #[command(flatten)]
        src: DiagramSource,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    Telescope {
        #[command(flatten)]
        src: DiagramSource,
        #[arg(long, value_delimiter = ',')]
        cuts: Vec<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Export {
        #[command(flatten)]
        src: DiagramSource,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    Closing {
        /// Refinement file; its towers are used to test constant tails.
        #[arg(long, conflicts_with = "diagram")]
        kr: Option<PathBuf>,
        #[arg(long)]
        diagram: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Defaults to the depth.
        #[arg(long)]
        period_bound: Option<usize>,
        #[arg(long)]
        strict: bool,
    },
    Decisive {
        #[command(flatten)]
        src: DiagramSource,
        #[arg(long)]
        continuous: bool,
        #[arg(long)]
        strict: bool,
    },
    Aperiodic {
        #[arg(long)]
        system: String,
        #[arg(long)]
        strict: bool,
    },
    Interior {
        #[arg(long)]
        system: String,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        src: SectionSource,
        #[arg(long)]
        strict: bool,
    },
    Cross {
        #[arg(long)]
        system: String,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        src: SectionSource,
        #[arg(long)]
        period_bound: Option<usize>,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
enum BasicCmd {
    /// The outer approximation at one depth.
    Approx {
        #[arg(long)]
        system: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        shift_bound: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    system: String,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    shift_bound: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    strict: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

type CliResult = Result<ExitCode, Failure>;

fn input(e: Error) -> Failure {
    Failure {
        code: 2,
        msg: e.to_string(),
    }
}

fn stage(name: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure {
        code: 3,
        msg: format!("stage {name}: {e}"),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text).map_err(input),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    to_json(v).map_err(input)
}

fn verdict_exit(strict: bool, verdicts: &[&PropertyVerdict]) -> ExitCode {
    if strict && verdicts.iter().any(|v| v.verdict == Verdict::Unknown) {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    }
}

fn load_diagram(src: &DiagramSource) -> Result<OrderedBratteliDiagram, Failure> {
    if BUILTIN_DIAGRAMS.contains(&src.diagram.as_str()) {
        if src.depth == 0 {
            return Err(input(Error::InvalidParams("depth must be positive".into())));
        }
        return builtin_diagram(&src.diagram, src.depth).map_err(input);
    }
    let j: DiagramJson = read_json(Path::new(&src.diagram)).map_err(input)?;
    OrderedBratteliDiagram::try_from(&j).map_err(input)
}

fn load_kr(path: &Path) -> Result<KRRefinement, Failure> {
    read_json::<KrJson>(path)
        .and_then(|j| j.parse())
        .map_err(input)
}

fn sections(
    shift: &Arc<EdgeShift>,
    depth: usize,
    src: &SectionSource,
) -> Result<QuasiSectionApprox, Failure> {
    if depth == 0 {
        return Err(input(Error::InvalidParams("depth must be positive".into())));
    }
    match &src.sections {
        Some(p) => {
            let j: SectionsJson = read_json(p).map_err(input)?;
            let qs = j.parse(shift).map_err(input)?;
            if qs.levels().len() < depth {
                return Err(input(Error::InvalidParams(format!(
                    "{} section levels given, {depth} needed",
                    qs.levels().len()
                ))));
            }
            Ok(qs)
        }
        None => {
            let cfg = PipelineConfig {
                depth,
                shift_bound: src.shift_bound,
                window: src.window,
            };
            cfg.validate().map_err(input)?;
            quasi_section_from_basic(shift, depth, &|n| cfg.params(n))
                .map(|(qs, _)| qs)
                .map_err(stage("basic"))
        }
    }
}

fn fmt_path(p: &FinitePath) -> String {
    p.edges
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Gen(a) => {
            let spec: SystemSpec = match (&a.name, &a.file) {
                (Some(n), None) => builtin_system(n).map_err(input)?,
                (None, Some(f)) => read_json(f).map_err(input)?,
                _ => {
                    return Err(input(Error::InvalidParams(format!(
                        "give a builtin name ({}) or --file",
                        BUILTIN_SYSTEMS.join(", ")
                    ))))
                }
            };
            let shift = EdgeShift::from_spec(&spec).map_err(input)?;
            emit(a.out.as_deref(), &json(&shift.to_spec())?)?;
        }
        Cmd::Section(SectionCmd::Check { system, set }) => {
            let shift = load_system(&system).map_err(input)?;
            let u = ClopenSet::parse(&shift, &set).map_err(input)?;
            let rep = is_complete_section(&u);
            print!("{}", json(&CompletenessJson::new(&u, &rep))?);
        }
        Cmd::Kr(KrCmd::Build {
            system,
            depth,
            src,
            out,
        }) => {
            let shift = load_system(&system).map_err(input)?;
            let qs = sections(&shift, depth, &src)?;
            let r = build_kr_refinement(&qs, depth).map_err(stage("kr"))?;
            emit(out.as_deref(), &json(&KrJson::from(&r))?)?;
        }
        Cmd::Kr(KrCmd::Verify { kr }) => {
            let r = load_kr(&kr)?;
            let rep = verify_kr(&r);
            print!("{}", json(&KrReportJson::from(&rep))?);
            if !rep.is_ok() {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Kr(KrCmd::Telescope { kr, levels, out }) => {
            let r = load_kr(&kr)?;
            let t = telescope_kr(&r, &levels).map_err(input)?;
            emit(out.as_deref(), &json(&KrJson::from(&t))?)?;
        }
        Cmd::Bv(BvCmd::Build { kr, out }) => {
            let r = load_kr(&kr)?;
            let (d, _) = diagram_from_kr(&r).map_err(stage("diagram"))?;
            emit(out.as_deref(), &json(&DiagramJson::from(&d))?)?;
        }
        Cmd::Bv(BvCmd::Paths { src, level }) => {
            let d = load_diagram(&src)?;
            if level > d.depth() {
                return Err(input(Error::InvalidParams(format!(
                    "level {level} exceeds depth {}",
                    d.depth()
                ))));
            }
            for p in finite_paths(&d, level) {
                println!("{} -> {}", fmt_path(&p), d.vertices(level)[d.range_of(&p)]);
            }
        }
        Cmd::Bv(BvCmd::Vershik { src, prefix, steps }) => {
            let d = load_diagram(&src)?;
            let mut p = FinitePath { edges: prefix };
            // validates the prefix before anything is printed
            let mut next = vershik_successor(&d, &p).map_err(input)?;
            println!("{}", fmt_path(&p));
            for _ in 0..steps {
                match next {
                    Successor::Next(q) => {
                        println!("{}", fmt_path(&q));
                        p = q;
                    }
                    Successor::MaximalAtDepth => {
                        println!(
                            "maximal at depth {}: the successor needs deeper levels",
                            p.depth()
                        );
                        break;
                    }
                }
                next = vershik_successor(&d, &p).map_err(input)?;
            }
        }
        Cmd::Bv(BvCmd::Telescope { src, cuts, out }) => {
            let d = load_diagram(&src)?;
            let t = telescope_diagram(&d, &cuts).map_err(input)?;
            emit(out.as_deref(), &json(&DiagramJson::from(&t))?)?;
        }
        Cmd::Bv(BvCmd::Export { src, format, out }) => {
            let d = load_diagram(&src)?;
            let text = match format {
                Format::Dot => to_dot(&d),
                Format::Json => json(&DiagramJson::from(&d))?,
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Check(c) => return run_check(c),
        Cmd::Basic(BasicCmd::Approx {
            system,
            depth,
            shift_bound,
            window,
            out,
        }) => {
            let shift = load_system(&system).map_err(input)?;
            if depth == 0 {
                return Err(input(Error::InvalidParams("depth must be positive".into())));
            }
            let d = BasicParams::default_for(depth);
            let params = BasicParams {
                shift_bound: shift_bound.unwrap_or(d.shift_bound),
                window: window.unwrap_or(d.window),
            };
            let a = basic_set_outer_approx(&shift, depth, params).map_err(input)?;
            emit(out.as_deref(), &json(&BasicApproxJson::from(&a))?)?;
        }
        Cmd::Pipeline(a) => {
            let shift = load_system(&a.system).map_err(input)?;
            let cfg = PipelineConfig {
                depth: a.depth,
                shift_bound: a.shift_bound,
                window: a.window,
            };
            cfg.validate().map_err(input)?;
            let out = run_pipeline(&shift, &cfg).map_err(|e| Failure {
                code: 3,
                msg: e.to_string(),
            })?;
            out.write(&a.out).map_err(input)?;
            for v in &out.verdicts {
                println!("{}: {} (depth {})", v.property, v.verdict, v.depth);
            }
            return Ok(verdict_exit(
                a.strict,
                &out.verdicts.iter().collect::<Vec<_>>(),
            ));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_check(c: CheckCmd) -> CliResult {
    let (text, strict, verdicts) = match c {
        CheckCmd::Closing {
            kr,
            diagram,
            depth,
            period_bound,
            strict,
        } => {
            let v = match (kr, diagram) {
                (Some(path), _) => {
                    let r = load_kr(&path)?;
                    let (d, _) = diagram_from_kr(&r).map_err(stage("diagram"))?;
                    let coding = Coding {
                        refinement: &r,
                        period_bound: period_bound.unwrap_or(depth),
                    };
                    check_closing(&d, Some(coding), depth)
                }
                (None, Some(diagram)) => {
                    let d = load_diagram(&DiagramSource { diagram, depth })?;
                    check_closing(&d, None, depth)
                }
                (None, None) => {
                    return Err(input(Error::InvalidParams("give --kr or --diagram".into())))
                }
            };
            (json(&v)?, strict, vec![v])
        }
        CheckCmd::Decisive {
            src,
            continuous,
            strict,
        } => {
            let v = check_decisive(&load_diagram(&src)?, continuous);
            (json(&v)?, strict, vec![v])
        }
        CheckCmd::Aperiodic { system, strict } => {
            let v = check_densely_aperiodic(&load_system(&system).map_err(input)?);
            (json(&v)?, strict, vec![v])
        }
        CheckCmd::Interior {
            system,
            depth,
            src,
            strict,
        } => {
            let shift = load_system(&system).map_err(input)?;
            let qs = sections(&shift, depth, &src)?;
            let v = check_quasi_section_empty_interior(&qs, depth);
            (json(&v)?, strict, vec![v])
        }
        CheckCmd::Cross {
            system,
            depth,
            src,
            period_bound,
            strict,
        } => {
            let shift = load_system(&system).map_err(input)?;
            let qs = sections(&shift, depth, &src)?;
            let r = build_kr_refinement(&qs, depth).map_err(stage("kr"))?;
            let (d, _) = diagram_from_kr(&r).map_err(stage("diagram"))?;
            let bound = period_bound.unwrap_or_else(|| {
                PipelineConfig {
                    depth,
                    shift_bound: src.shift_bound,
                    window: src.window,
                }
                .period_bound()
            });
            let x = cross_validate_closing_basic(&d, &r, &qs, depth, bound);
            (json(&x)?, strict, vec![x.closing, x.basic])
        }
    };
    print!("{text}");
    Ok(verdict_exit(strict, &verdicts.iter().collect::<Vec<_>>()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
