use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use perfbr_core::arith::TeichmullerDictionary;
use perfbr_core::characters::{
    check_action_coherence, choose_level, element_report, equivariant_report, EquivariantReport, Verdict,
};
use perfbr_core::complexes::integral_cohomology;
use perfbr_core::harness::{self, GeneratorParams, Grid, InstanceDocument, Mode, SelftestConfig};
use perfbr_core::prooftrace::{split_top_and_recurse, TraceConfig};
use perfbr_core::Error;

const EXIT_VERDICT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_EXTENSION: u8 = 3;

#[derive(Parser)]
#[command(name = "perfbr", version, about = "Brauer and ordinary characters of perfect complexes with group actions")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Largest cyclotomic level N for the Teichmüller dictionary.
    #[arg(long = "max-N", global = true, default_value_t = 240)]
    max_n: u64,
    /// Largest residue-field degree the proof trace will adjoin.
    #[arg(long, global = true, default_value_t = 2)]
    extension_degree_bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Default,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Decode an instance and check d∘d = 0 and the coherence of the action.
    Validate { file: PathBuf },
    /// Integral cohomology: free ranks and torsion exponents.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Brauer and ordinary virtual characters.
    Characters {
        file: PathBuf,
        #[arg(long)]
        element: Option<usize>,
    },
    /// Compare the two characters on every p-regular element.
    Verify { file: PathBuf },
    /// Run the split-and-recurse transcript for one element.
    Trace {
        file: PathBuf,
        #[arg(long)]
        element: usize,
    },
    /// Generate an instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Generate and verify a grid of instances.
    Selftest {
        #[arg(long, value_enum, default_value_t = GridArg::Default)]
        grid: GridArg,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NeedsExtension { .. } => EXIT_EXTENSION,
        Error::Decode { .. }
        | Error::InvalidParams(_)
        | Error::NotPrime(_)
        | Error::DenominatorNotInvertible(_)
        | Error::Shape(_)
        | Error::NotAComplex(_)
        | Error::NotAChainMap(_)
        | Error::NotAutomorphism(_)
        | Error::NotCoprime { .. }
        | Error::DictionaryTooSmall { .. } => EXIT_INPUT,
        _ => EXIT_VERDICT,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code_for(&e), message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn load(path: &PathBuf) -> Result<InstanceDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    Ok(harness::decode(&text)?)
}

fn emit(output: Output, value: &Value, text: impl FnOnce() -> String) {
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(value).expect("json")),
        Output::Text => print!("{}", text()),
    }
}

fn element_in_range(doc: &InstanceDocument, g: usize) -> Result<(), Failure> {
    let n = doc.action.group.order();
    if g >= n {
        return Err(fail(EXIT_INPUT, format!("element {g} out of range for a group of order {n}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let out = cli.output;
    match cli.command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            check_action_coherence(&doc.action).map_err(|e| fail(EXIT_INPUT, format!("incoherent action: {e}")))?;
            let l = doc.complex();
            let v = json!({
                "valid": true,
                "p": doc.p(),
                "degrees": [l.lo(), l.hi()],
                "ranks": l.ranks(),
                "group_order": doc.action.group.order(),
            });
            emit(out, &v, || format!("ok: p = {}, degrees {}..={}, ranks {:?}, |G| = {}\n", doc.p(), l.lo(), l.hi(), l.ranks(), doc.action.group.order()));
            Ok(0)
        }
        Command::Cohomology { file, degree } => {
            let doc = load(&file)?;
            let h = integral_cohomology(doc.complex());
            let rows: Vec<_> = h.degrees.iter().filter(|d| degree.is_none_or(|i| d.degree == i)).collect();
            let v: Vec<Value> = match degree {
                Some(i) if rows.is_empty() => vec![json!({ "degree": i, "free_rank": 0, "torsion": [] })],
                _ => rows.iter().map(|d| json!({ "degree": d.degree, "free_rank": d.free_rank, "torsion": d.torsion })).collect(),
            };
            let p = doc.p();
            emit(out, &Value::Array(v.clone()), || {
                v.iter()
                    .map(|d| {
                        let mut parts = Vec::new();
                        let r = d["free_rank"].as_u64().unwrap();
                        if r > 0 {
                            parts.push(format!("Z_({p})^{r}"));
                        }
                        for e in d["torsion"].as_array().unwrap() {
                            parts.push(format!("Z/{p}^{e}"));
                        }
                        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" ⊕ ") };
                        format!("H^{} = {body}\n", d["degree"])
                    })
                    .collect()
            });
            Ok(0)
        }
        Command::Characters { file, element } => {
            let doc = load(&file)?;
            let report = match element {
                Some(g) => {
                    element_in_range(&doc, g)?;
                    let level = choose_level(&doc.action, cli.max_n)?;
                    let dict = TeichmullerDictionary::build(doc.complex().ring(), level)?;
                    EquivariantReport { level, reports: vec![element_report(&doc.action, &dict, g)] }
                }
                None => equivariant_report(&doc.action, cli.max_n)?,
            };
            let v = serde_json::to_value(&report).expect("json");
            emit(out, &v, || report_text(&report));
            Ok(0)
        }
        Command::Verify { file } => {
            let doc = load(&file)?;
            let report = equivariant_report(&doc.action, cli.max_n)?;
            let v = serde_json::to_value(&report).expect("json");
            emit(out, &v, || report_text(&report));
            Ok(if report.all_equal() { 0 } else { EXIT_VERDICT })
        }
        Command::Trace { file, element } => {
            let doc = load(&file)?;
            element_in_range(&doc, element)?;
            let config = TraceConfig {
                max_level: cli.max_n,
                extension_degree_bound: cli.extension_degree_bound,
                strict_order: Some(doc.action.group.element_order(element)),
            };
            let t = split_top_and_recurse(doc.complex(), &doc.action.maps[element], config)?;
            let v = serde_json::to_value(&t).expect("json");
            emit(out, &v, || {
                let mut s = String::new();
                for st in &t.stages {
                    s.push_str(&format!(
                        "{:indent$}{:<10} [{}, {}] ranks {:?} N={}",
                        "",
                        serde_json::to_value(st.op).unwrap().as_str().unwrap(),
                        st.window[0],
                        st.window[1],
                        st.ranks,
                        st.level,
                        indent = 2 * st.depth
                    ));
                    if let (Some(br), Some(tr)) = (&st.br, &st.tr) {
                        s.push_str(&format!(" Br={br} Tr={tr}"));
                    }
                    if !st.consistent {
                        s.push_str(" INCONSISTENT");
                    }
                    if let Some(note) = &st.note {
                        s.push_str(&format!(" ({note})"));
                    }
                    s.push('\n');
                }
                if let Some(a) = &t.abort {
                    s.push_str(&format!("aborted: {}\n", a.reason));
                }
                if let Some(verdict) = t.verdict {
                    s.push_str(&format!("verdict: {verdict:?}\n"));
                }
                s
            });
            if t.needs_extension().is_some() {
                return Ok(EXIT_EXTENSION);
            }
            Ok(if t.completed() && t.verdict == Some(Verdict::Equal) && t.bookkeeping_holds() { 0 } else { EXIT_VERDICT })
        }
        Command::Gen { seed, p, n, mode, out: path } => {
            let mode = match mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::General => Mode::General,
            };
            let params = GeneratorParams::new(seed, p, n, mode);
            let doc = harness::generate_instance(&params)?;
            let text = harness::encode(&doc);
            match path {
                Some(path) => fs::write(&path, text + "\n").map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Selftest { grid } => {
            let grid = match grid {
                GridArg::Default => Grid::Default,
                GridArg::Full => Grid::Full,
            };
            let config = SelftestConfig { max_level: cli.max_n, extension_degree_bound: cli.extension_degree_bound, trace_all_elements: false };
            let summary = harness::run_selftest(&harness::grid_params(grid), &config)?;
            let v = json!({
                "instances": summary.instances,
                "strict_instances": summary.strict_instances,
                "torsion_instances": summary.torsion_instances,
                "torsion_fraction": summary.torsion_fraction,
                "equal_verdicts": summary.equal_verdicts,
                "traces_completed": summary.traces_completed,
                "failures": summary.failures,
                "passed": summary.passed(),
            });
            emit(out, &v, || {
                let mut s = format!(
                    "instances: {} ({} strict)\ntorsion: {} ({:.1}%)\nequal verdicts: {}\ntraces completed: {}\n",
                    summary.instances,
                    summary.strict_instances,
                    summary.torsion_instances,
                    100.0 * summary.torsion_fraction,
                    summary.equal_verdicts,
                    summary.traces_completed
                );
                for f in &summary.failures {
                    s.push_str(&format!("FAIL seed {} p={} n={} element {:?}: {}\n", f.seed, f.p, f.n, f.element, f.reason));
                }
                s.push_str(if summary.passed() { "selftest passed\n" } else { "selftest FAILED\n" });
                s
            });
            Ok(if summary.passed() { 0 } else { EXIT_VERDICT })
        }
    }
}

fn report_text(report: &EquivariantReport) -> String {
    let mut s = format!("N = {}\n", report.level);
    for r in &report.reports {
        let br = r.br.as_ref().map_or("undefined".to_string(), |b| b.to_string());
        let g = r.g.map_or("?".to_string(), |g| g.to_string());
        s.push_str(&format!("g = {g}: Br = {br}, Tr = {}, verdict {:?}", r.tr, r.verdict));
        if let Some(reason) = &r.reason {
            s.push_str(&format!(" ({reason})"));
        }
        s.push('\n');
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
