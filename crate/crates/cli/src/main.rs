use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jep_core::cographs::{cotree_of, decide_jep_cographs, decide_jep_general, Cograph};
use jep_core::dfa::{forb_string, format_word, parse_word, Dfa, Word};
use jep_core::oracle::{cross_validate, Mutation, Suite, TrialConfig};
use jep_core::string_jep::{
    badpair_automaton_string, decide_jep_string, default_semibad_bound, joint_by_product as string_product,
    StringPipeline,
};
use jep_core::tree_automata::{forb_tree, TreeAutomaton};
use jep_core::tree_jep::{
    decide_jep_tree, joint_by_product as tree_product, joint_witness, pow2_display, report_bounds, TreePipeline,
};
use jep_core::trees::{BinaryTree, GeneralTree, LabelSet};
use jep_core::verdict::{Certificate, Limits, PairMode, Verdict};
use jep_core::JepError;

#[derive(Parser)]
#[command(name = "jep", version, about = "Decide the joint embedding property of regular languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Print `key: value` lines only.
    #[arg(long, global = true)]
    machine: bool,
    /// Cap on enumerated walks and realizable walk pairs.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_walks: usize,
    /// Cap on reachable states, walk families and enumerated candidates.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_size: usize,
}

impl Common {
    fn limits(&self) -> Limits {
        Limits {
            max_walks: self.max_walks,
            max_states: self.max_size,
        }
    }
}

#[derive(Args)]
struct StringInput {
    /// DFA file.
    #[arg(long, conflicts_with = "forbid")]
    automaton: Option<PathBuf>,
    /// Comma-separated forbidden subsequences, e.g. "ab,ba".
    #[arg(long, requires = "alphabet")]
    forbid: Option<String>,
    /// Alphabet: one symbol per character, or whitespace-separated names.
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Args)]
struct TreeInput {
    /// Tree automaton file.
    #[arg(long, conflicts_with = "forbid")]
    automaton: Option<PathBuf>,
    /// Forbidden tree files.
    #[arg(long, num_args = 1.., requires = "labels")]
    forbid: Vec<PathBuf>,
    /// Whitespace-separated label names.
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// JEP of a regular string language under the subsequence order.
    Strings {
        #[command(flatten)]
        input: StringInput,
        /// Look for semibad pairs instead of bad pairs.
        #[arg(long)]
        semibad: bool,
        #[command(flatten)]
        common: Common,
    },
    /// JEP of a regular tree language under topological containment.
    Trees {
        #[command(flatten)]
        input: TreeInput,
        #[arg(long)]
        semibad: bool,
        #[command(flatten)]
        common: Common,
    },
    /// JEP of the unranked trees avoiding the given trees.
    GeneralTrees {
        /// Forbidden tree files.
        #[arg(long, num_args = 0..)]
        forbid: Vec<PathBuf>,
        #[arg(long)]
        labels: String,
        #[command(flatten)]
        common: Common,
    },
    /// JEP of the cographs avoiding the given induced subgraphs (P4 among them).
    Cographs {
        /// Forbidden graph files.
        #[arg(long, num_args = 1.., required = true)]
        forbid: Vec<PathBuf>,
        /// Directory to write the witness graphs to.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Do two strings or trees have a common extension in the language?
    CheckPair {
        /// A `.dfa` or tree automaton file.
        #[arg(long)]
        automaton: PathBuf,
        /// Words, or tree files (inline s-expressions also accepted).
        x: String,
        y: String,
        #[command(flatten)]
        common: Common,
    },
    /// A smallest common extension of two strings or trees in the language.
    JointWitness {
        #[arg(long)]
        automaton: PathBuf,
        x: String,
        y: String,
        #[command(flatten)]
        common: Common,
    },
    /// The automaton of all pairs `x#y` that are bad (strings only).
    BadpairsAutomaton {
        #[command(flatten)]
        input: StringInput,
        /// Length bound for minimal semibad pairs; defaults to 2^|W|.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        semibad: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Walk counts and the size bounds derived from them.
    Bounds {
        #[command(flatten)]
        input: StringOrTree,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the pipelines against brute-force references.
    OracleValidate {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to the suite's own trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Deliberately break a pipeline: `literal-n` or `leaf-only`.
        #[arg(long, value_parser = parse_mutation)]
        mutation: Option<Mutation>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct StringOrTree {
    /// A `.dfa` or tree automaton file.
    #[arg(long, conflicts_with = "forbid")]
    automaton: Option<PathBuf>,
    #[arg(long, requires = "alphabet")]
    forbid: Option<String>,
    #[arg(long)]
    alphabet: Option<String>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: JepError| e.to_string())
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    match s {
        "literal-n" => Ok(Mutation::LiteralNStep),
        "leaf-only" => Ok(Mutation::LeafOnlyProfile),
        _ => Err(format!("unknown mutation `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Core(Option<String>, JepError),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(_, JepError::SizeLimitExceeded { .. }) => 3,
            Failure::Core(_, JepError::Undecided(_)) => 4,
            _ => 2,
        }
    }
}

impl From<JepError> for Failure {
    fn from(e: JepError) -> Self {
        Failure::Core(None, e)
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(None, e) => write!(f, "{e}"),
            Failure::Core(Some(at), JepError::Parse { line, column, message }) => {
                write!(f, "{at}:{line}:{column}: {message}")
            }
            Failure::Core(Some(at), e) => write!(f, "{at}: {e}"),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn at<T>(path: &Path, r: jep_core::Result<T>) -> Res<T> {
    r.map_err(|e| Failure::Core(Some(path.display().to_string()), e))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn is_dfa_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "dfa")
}

/// Output sink: `key: value` lines in machine mode, prose otherwise.
struct Out {
    machine: bool,
}

impl Out {
    fn kv(&self, key: &str, value: impl Display) {
        println!("{key}: {value}");
    }

    fn say(&self, text: impl Display) {
        if !self.machine {
            println!("{text}");
        }
    }
}

fn alphabet_of(text: &str) -> Res<LabelSet> {
    let names: Vec<String> = if text.contains(char::is_whitespace) {
        text.split_whitespace().map(str::to_owned).collect()
    } else {
        text.chars().map(String::from).collect()
    };
    LabelSet::with_names(names).map_err(|e| Failure::Usage(format!("--alphabet: {e}")))
}

fn string_language(input: &StringInput) -> Res<Dfa> {
    string_language_of(input.automaton.as_deref(), input.forbid.as_deref(), input.alphabet.as_deref())
}

fn string_language_of(automaton: Option<&Path>, forbid: Option<&str>, alphabet: Option<&str>) -> Res<Dfa> {
    match (automaton, forbid) {
        (Some(p), _) => at(p, Dfa::parse_text(&read(p)?)),
        (None, Some(f)) => {
            let sigma = alphabet_of(alphabet.unwrap_or_default())?;
            let words: Vec<Word> = f
                .split(',')
                .map(|w| parse_word(&sigma, w))
                .collect::<jep_core::Result<_>>()
                .map_err(|e| Failure::Usage(format!("--forbid: {e}")))?;
            Ok(forb_string(&words, &sigma)?)
        }
        (None, None) => Err(Failure::Usage("give --automaton or --forbid".into())),
    }
}

fn tree_language(input: &TreeInput) -> Res<TreeAutomaton> {
    match (&input.automaton, input.forbid.is_empty()) {
        (Some(p), _) => at(p, TreeAutomaton::parse_text(&read(p)?)),
        (None, false) => {
            let labels = LabelSet::parse(input.labels.as_deref().unwrap_or_default())
                .map_err(|e| Failure::Usage(format!("--labels: {e}")))?;
            let trees = input
                .forbid
                .iter()
                .map(|p| at(p, BinaryTree::parse(&read(p)?, &labels)))
                .collect::<Res<Vec<_>>>()?;
            Ok(forb_tree(&trees, &labels)?)
        }
        (None, true) => Err(Failure::Usage("give --automaton or --forbid".into())),
    }
}

/// A tree given as a file path or inline.
fn tree_arg(arg: &str, labels: &LabelSet) -> Res<BinaryTree> {
    let p = Path::new(arg);
    if p.is_file() {
        at(p, BinaryTree::parse(&read(p)?, labels))
    } else {
        BinaryTree::parse(arg, labels).map_err(|e| Failure::Core(Some(format!("argument {arg:?}")), e))
    }
}

fn mode(semibad: bool) -> PairMode {
    if semibad {
        PairMode::Semibad
    } else {
        PairMode::Bad
    }
}

fn report_verdict<T>(out: &Out, v: &Verdict<T>, show: impl Fn(&T) -> String) -> u8 {
    match v {
        Verdict::Jep => {
            out.kv("verdict", "jep");
            out.say("The language has the joint embedding property.");
            0
        }
        Verdict::BadPair { x, y, certificate } => {
            out.kv("verdict", "bad-pair");
            out.kv("x", show(x));
            out.kv("y", show(y));
            out.kv("certificate", certificate);
            let Certificate::ProductEmpty { states_explored } = certificate;
            out.kv("certificate-states", states_explored);
            out.say("No member of the language contains both x and y.");
            1
        }
    }
}

fn run(cli: Cli) -> Res<u8> {
    match cli.command {
        Command::Strings { input, semibad, common } => {
            let out = Out { machine: common.machine };
            let m = string_language(&input)?;
            let v = decide_jep_string(&m, mode(semibad), &common.limits())?;
            Ok(report_verdict(&out, &v, |w| format_word(m.alphabet(), w)))
        }
        Command::Trees { input, semibad, common } => {
            let out = Out { machine: common.machine };
            let m = tree_language(&input)?;
            let v = decide_jep_tree(&m, mode(semibad), &common.limits())?;
            Ok(report_verdict(&out, &v, |t| t.to_sexpr(m.labels())))
        }
        Command::GeneralTrees { forbid, labels, common } => {
            let out = Out { machine: common.machine };
            let labels = LabelSet::parse(&labels).map_err(|e| Failure::Usage(format!("--labels: {e}")))?;
            let trees = forbid
                .iter()
                .map(|p| at(p, GeneralTree::parse(&read(p)?, &labels)))
                .collect::<Res<Vec<_>>>()?;
            let v = decide_jep_general(&trees, &labels, &common.limits())?;
            Ok(report_verdict(&out, &v, |t| t.to_sexpr(&labels)))
        }
        Command::Cographs { forbid, out: dir, common } => {
            let out = Out { machine: common.machine };
            let graphs = forbid
                .iter()
                .map(|p| at(p, Cograph::parse_text(&read(p)?)))
                .collect::<Res<Vec<_>>>()?;
            let v = decide_jep_cographs(&graphs, &common.limits())?;
            let code = report_verdict(&out, &v, |g| g.to_string());
            if let (Some(dir), Some(_)) = (&dir, v.pair()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            }
            if let Some((x, y)) = v.pair() {
                for (name, g) in [("x", x), ("y", y)] {
                    out.kv(&format!("{name}-cotree"), cotree_of(g)?);
                    if let Some(dir) = &dir {
                        let path = dir.join(format!("{name}.graph"));
                        std::fs::write(&path, g.to_text())
                            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                        out.kv(&format!("{name}-file"), path.display());
                    }
                }
            }
            Ok(code)
        }
        Command::CheckPair { automaton, x, y, common } => {
            let out = Out { machine: common.machine };
            let text = read(&automaton)?;
            let joint = if is_dfa_file(&automaton) {
                let m = at(&automaton, Dfa::parse_text(&text))?;
                let (x, y) = (word_arg(&m, &x)?, word_arg(&m, &y)?);
                let walks = StringPipeline::new(&m, common.max_walks)?.joint(&x, &y)?;
                let (product, states) = string_product(&m, &x, &y)?;
                agree(&out, walks, product, states)?
            } else {
                let m = at(&automaton, TreeAutomaton::parse_text(&text))?;
                let (x, y) = (tree_arg(&x, m.labels())?, tree_arg(&y, m.labels())?);
                let (product, states) = tree_product(&m, &x, &y)?;
                let walks = match TreePipeline::new(&m, &common.limits()) {
                    Ok(p) => Some(p.joint(&x, &y)?),
                    Err(JepError::SizeLimitExceeded { .. }) => None,
                    Err(e) => return Err(e.into()),
                };
                match walks {
                    Some(w) => agree(&out, w, product, states)?,
                    None => {
                        out.kv("joint", product);
                        out.kv("walk-route", "cap-exceeded");
                        out.kv("product-states", states);
                        product
                    }
                }
            };
            out.say(if joint {
                "Some member of the language contains both."
            } else {
                "No member of the language contains both."
            });
            Ok(if joint { 0 } else { 1 })
        }
        Command::JointWitness { automaton, x, y, common } => {
            let out = Out { machine: common.machine };
            let text = read(&automaton)?;
            let found = if is_dfa_file(&automaton) {
                let m = at(&automaton, Dfa::parse_text(&text))?;
                let (x, y) = (word_arg(&m, &x)?, word_arg(&m, &y)?);
                let p = m
                    .intersection(&jep_core::dfa::sup_string(&x, m.alphabet())?)?
                    .intersection(&jep_core::dfa::sup_string(&y, m.alphabet())?)?;
                p.empty_witness().map(|z| format_word(m.alphabet(), &z))
            } else {
                let m = at(&automaton, TreeAutomaton::parse_text(&text))?;
                let (x, y) = (tree_arg(&x, m.labels())?, tree_arg(&y, m.labels())?);
                joint_witness(&m, &x, &y)?.map(|z| z.to_sexpr(m.labels()))
            };
            match found {
                Some(z) => {
                    out.kv("witness", z);
                    Ok(0)
                }
                None => {
                    out.kv("witness", "none");
                    Ok(1)
                }
            }
        }
        Command::BadpairsAutomaton { input, bound, semibad, common } => {
            let m = string_language(&input)?;
            let limits = common.limits();
            let bound = match bound {
                Some(b) => b,
                None => default_semibad_bound(&StringPipeline::new(&m, limits.max_walks)?, &limits),
            };
            let a = badpair_automaton_string(&m, bound, mode(semibad), &limits)?;
            print!("{}", a.to_text());
            Ok(0)
        }
        Command::Bounds { input, common } => {
            let out = Out { machine: common.machine };
            let limits = common.limits();
            match &input.automaton {
                Some(p) if !is_dfa_file(p) => {
                    let m = at(p, TreeAutomaton::parse_text(&read(p)?))?;
                    let b = report_bounds(&m, &limits)?;
                    out.kv("walks", &b.walks);
                    out.kv("states", b.states);
                    out.kv("labels", b.labels);
                    match b.realizable_pairs {
                        Some(n) => out.kv("realizable-pairs", n),
                        None => out.kv("realizable-pairs", "cap-exceeded"),
                    }
                    out.kv("semibad-node-bound", b.semibad_display());
                    out.kv("realization-node-bound", pow2_display(&b.realization_exponent));
                }
                _ => {
                    let m = string_language_of(
                        input.automaton.as_deref(),
                        input.forbid.as_deref(),
                        input.alphabet.as_deref(),
                    )?;
                    let p = StringPipeline::new(&m, limits.max_walks)?;
                    out.kv("walks", p.walks().len());
                    out.kv("states", p.dfa().state_count());
                    out.kv("semibad-length-bound", format!("2^{}", p.walks().len()));
                }
            }
            Ok(0)
        }
        Command::OracleValidate {
            suite,
            seed,
            trials,
            mutation,
            common,
        } => {
            let base = TrialConfig::for_suite(suite);
            let cfg = TrialConfig {
                seed,
                trials: trials.unwrap_or(base.trials),
                mutation,
                limits: common.limits(),
                ..base
            };
            let r = cross_validate(suite, &cfg);
            print!("{r}");
            Ok(if r.is_clean() { 0 } else { 1 })
        }
    }
}

fn word_arg(m: &Dfa, text: &str) -> Res<Word> {
    parse_word(m.alphabet(), text).map_err(|e| Failure::Core(Some(format!("argument {text:?}")), e))
}

fn agree(out: &Out, walks: bool, product: bool, states: usize) -> Res<bool> {
    if walks != product {
        return Err(JepError::CertificateFailed(format!(
            "walk sets say joint={walks}, product emptiness says joint={product}"
        ))
        .into());
    }
    out.kv("joint", product);
    out.kv("walk-route", walks);
    out.kv("product-states", states);
    Ok(product)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, r| {
            let level = match r.level() {
                log::Level::Warn => "warning".to_owned(),
                l => l.as_str().to_lowercase(),
            };
            writeln!(buf, "{level}: {}", r.args())
        })
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
