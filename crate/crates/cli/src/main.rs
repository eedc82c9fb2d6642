use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mkfa_core::constructs as cx;
use mkfa_core::format::{
    parse_document, parse_mk_automaton, write_dfa, write_mk, write_nivat, Document,
};
use mkfa_core::harness::{run_probe, run_suite, SweepConfig, PROBES, SUITES};
use mkfa_core::langops::{parse_lang_expr, LangExpr, Resource};
use mkfa_core::mklogic::{
    automaton_to_rmso, mk_eval, parse_mk, rmso_to_automaton, rmso_violations,
};
use mkfa_core::{parse_truth, Alphabet, Error, TruthValue, Word};

#[derive(Parser)]
#[command(name = "mkfa", version, about = "MK-fuzzy automata: evaluate, construct, verify, probe")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Longest word enumerated by sweeps.
    #[arg(long, global = true, default_value_t = 5)]
    maxlen: usize,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Behavior of an automaton (or, with --expr, a language expression) on words.
    Eval {
        /// Automaton file, or an expression with --expr.
        input: String,
        words: Vec<String>,
        #[arg(long)]
        expr: bool,
        /// Comma-separated letters for `const`/`word` in expressions.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Run a construction and print the resulting file.
    Construct {
        op: String,
        args: Vec<String>,
        /// Comma-separated letters, for `constant`.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Compare constructions against their definitions.
    Verify { suite: String },
    /// Search for departures of a published construction from its definition.
    Probe {
        gap: String,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// MK-fuzzy MSO formulas.
    Logic {
        #[command(subcommand)]
        sub: LogicCommand,
    },
}

#[derive(Subcommand)]
enum LogicCommand {
    /// Print the parsed formula and its free variables. Reads stdin without an argument.
    Parse { formula: Option<String> },
    /// Value of a formula on words over the alphabet extended by its free variables.
    Eval {
        formula: String,
        words: Vec<String>,
        #[arg(long, default_value = "a,b")]
        alphabet: String,
    },
    /// Automaton of a restricted formula.
    Compile {
        formula: String,
        #[arg(long, default_value = "a,b")]
        alphabet: String,
    },
    /// Restricted sentence of an automaton.
    Decompile { file: String },
    /// Report restriction violations. Reads stdin without an argument.
    CheckRmso { formula: Option<String> },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Syntax { .. } | Error::TruthLiteral { .. } | Error::Io { .. } => 1,
        Error::ForeignLetter(_) => 3,
        _ => 2,
    }
}

fn read(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Io {
            path: "<stdin>".into(),
            message: e.to_string(),
        })?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        message: e.to_string(),
    })
}

fn formula_text(arg: Option<String>) -> Result<String, Error> {
    match arg {
        Some(t) => Ok(t),
        None => read("-"),
    }
}

fn alphabet(list: &str) -> Result<Alphabet, Error> {
    let letters: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Alphabet::from_letters(&letters)
}

fn word(al: &Alphabet, text: &str) -> Result<Word, Error> {
    if text == "ε" {
        return Ok(Vec::new());
    }
    al.parse_word(text)
}

fn load_mk(path: &str) -> Result<mkfa_core::mkauto::MkAutomaton, Error> {
    parse_mk_automaton(&read(path)?)
}

fn load_dfa(path: &str) -> Result<mkfa_core::fclassic::Dfa, Error> {
    match parse_document(&read(path)?)? {
        Document::Classical(n) => Ok(n.determinize()),
        _ => Err(Error::Parse { line: 2, message: "expected `kind classical`".into() }),
    }
}

fn load_hom(path: &str) -> Result<cx::StrictAlphabeticHom, Error> {
    match parse_document(&read(path)?)? {
        Document::Hom(h) => Ok(h),
        _ => Err(Error::Parse { line: 2, message: "expected `kind hom`".into() }),
    }
}

struct Out {
    format: Format,
    text: String,
}

impl Out {
    fn line(&mut self, text: impl AsRef<str>, record: serde_json::Value) {
        match self.format {
            Format::Text => {
                self.text.push_str(text.as_ref());
                if !text.as_ref().ends_with('\n') {
                    self.text.push('\n');
                }
            }
            Format::Records => {
                self.text.push_str(&record.to_string());
                self.text.push('\n');
            }
        }
    }

    fn value(&mut self, word: &str, k: &TruthValue) {
        let word = if word.is_empty() { "ε" } else { word };
        self.line(
            format!("{word}\t{k}\t≈ {}", k.to_decimal_string(6)),
            json!({"word": word, "value": k.to_string(), "decimal": k.to_decimal_string(6)}),
        );
    }
}

fn arity(op: &str, args: &[String], n: usize) -> Result<(), Error> {
    if args.len() != n {
        return Err(Error::Precondition(format!("construct {op} takes {n} argument(s)")));
    }
    Ok(())
}

fn construct(op: &str, args: &[String], alpha: Option<&str>, out: &mut Out) -> Result<(), Error> {
    let op = op.replace('_', "-");
    let mk = |text: String, out: &mut Out| out.line(&text, json!({"kind": "mk", "file": text}));
    match op.as_str() {
        "constant" => {
            arity(&op, args, 1)?;
            let al = alphabet(alpha.unwrap_or("a,b"))?;
            mk(write_mk(&cx::constant_automaton(&al, &parse_truth(&args[0])?)), out);
        }
        "char" => {
            arity(&op, args, 1)?;
            mk(write_mk(&cx::char_automaton(&load_dfa(&args[0])?)), out);
        }
        "disjunction" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::disjunction(&load_mk(&args[0])?, &load_mk(&args[1])?)?), out);
        }
        "conj-char" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::conj_char(&load_dfa(&args[0])?, &load_mk(&args[1])?)?), out);
        }
        "inv-hom" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::inv_hom(&load_mk(&args[1])?, &load_hom(&args[0])?)?), out);
        }
        "hom-image" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::hom_image(&load_mk(&args[1])?, &load_hom(&args[0])?)?), out);
        }
        "scalar-right" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::scalar_right(&load_mk(&args[0])?, &parse_truth(&args[1])?)?), out);
        }
        "scalar-right-normalized" => {
            arity(&op, args, 2)?;
            let a = load_mk(&args[0])?;
            mk(write_mk(&cx::scalar_right_normalized(&a, &parse_truth(&args[1])?)?), out);
        }
        "scalar-left" => {
            arity(&op, args, 2)?;
            let sl = cx::scalar_left(&parse_truth(&args[0])?, &load_mk(&args[1])?)?;
            if sl.is_discrepant() {
                eprintln!(
                    "warning: on words without a path the construction gives {} where the definition gives k ⊓ 𝟎",
                    sl.dead_value
                );
            }
            mk(write_mk(&sl.automaton), out);
        }
        "normalize" => {
            arity(&op, args, 1)?;
            mk(write_mk(&cx::normalize(&load_mk(&args[0])?)?), out);
        }
        "in-ter-one" => {
            arity(&op, args, 1)?;
            mk(write_mk(&cx::in_ter_one(&load_mk(&args[0])?)), out);
        }
        "cauchy" => {
            arity(&op, args, 2)?;
            mk(write_mk(&cx::cauchy(&load_mk(&args[0])?, &load_mk(&args[1])?)?), out);
        }
        "support" => {
            arity(&op, args, 1)?;
            let text = write_dfa(&cx::strong_support(&load_mk(&args[0])?)?);
            out.line(&text, json!({"kind": "classical", "file": text}));
        }
        "nivat-decompose" => {
            arity(&op, args, 1)?;
            let text = write_nivat(&cx::nivat_decompose(&load_mk(&args[0])?)?);
            out.line(&text, json!({"kind": "nivat", "file": text}));
        }
        "nivat-compose" => {
            arity(&op, args, 1)?;
            let Document::Nivat(n) = parse_document(&read(&args[0])?)? else {
                return Err(Error::Parse { line: 2, message: "expected `kind nivat`".into() });
            };
            mk(write_mk(&cx::nivat_compose(&n)?), out);
        }
        _ => {
            return Err(Error::Precondition(format!(
                "unknown construction `{op}`; known: constant, char, disjunction, conj-char, inv-hom, \
                 hom-image, scalar-right, scalar-right-normalized, scalar-left, normalize, in-ter-one, \
                 cauchy, support, nivat-decompose, nivat-compose"
            )))
        }
    }
    Ok(())
}

fn eval_expr(text: &str, alpha: Option<&str>) -> Result<LangExpr, Error> {
    let al = alpha.map(alphabet).transpose()?;
    let mut load = |path: &str| -> Result<Resource, Error> {
        Ok(match parse_document(&read(path)?)? {
            Document::Mk(a) => Resource::Automaton(a),
            Document::Classical(n) => Resource::Language(n.determinize()),
            Document::Hom(h) => Resource::Hom(h),
            Document::Nivat(_) => {
                return Err(Error::Precondition(format!("`{path}` is a Nivat file")))
            }
        })
    };
    parse_lang_expr(text, al.as_ref(), &mut load)
}

/// Returns whether every asserted check passed.
fn run(cli: Cli, out: &mut Out) -> Result<bool, Error> {
    let cfg = SweepConfig {
        seed: cli.seed,
        trials: cli.trials,
        maxlen: cli.maxlen,
        ..SweepConfig::default()
    };
    match cli.command {
        Command::Eval { input, words, expr, alphabet: alpha } => {
            if expr {
                let e = eval_expr(&input, alpha.as_deref())?;
                for w in &words {
                    out.value(w, &e.eval(&word(e.alphabet(), w)?)?);
                }
            } else {
                let a = load_mk(&input)?;
                for w in &words {
                    out.value(w, &a.behavior(&word(a.alphabet(), w)?)?);
                }
            }
        }
        Command::Construct { op, args, alphabet: alpha } => {
            construct(&op, &args, alpha.as_deref(), out)?;
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut ok = true;
            for name in names {
                let r = run_suite(name, &cfg)?;
                ok &= r.passed();
                out.line(r.to_string(), serde_json::to_value(&r).expect("serializable"));
            }
            return Ok(ok);
        }
        Command::Probe { gap, budget } => {
            let names: Vec<&str> = if gap == "all" { PROBES.to_vec() } else { vec![gap.as_str()] };
            for name in names {
                let o = run_probe(name, &cfg, budget)?;
                out.line(o.to_string(), serde_json::to_value(&o).expect("serializable"));
            }
        }
        Command::Logic { sub } => return logic(sub, out),
    }
    Ok(true)
}

fn logic(sub: LogicCommand, out: &mut Out) -> Result<bool, Error> {
    match sub {
        LogicCommand::Parse { formula } => {
            let f = parse_mk(formula_text(formula)?.trim())?;
            let free: Vec<String> = f.free_vars().iter().map(|v| v.to_string()).collect();
            out.line(
                format!("{f}\nfree: {}", if free.is_empty() { "-".to_string() } else { free.join(" ") }),
                json!({"formula": f.to_string(), "free": free}),
            );
        }
        LogicCommand::Eval { formula, words, alphabet: alpha } => {
            let f = parse_mk(&formula)?;
            let vars: Vec<_> = f.free_vars().into_iter().collect();
            let al = Alphabet::extended(&alphabet(&alpha)?, &vars)?;
            for w in &words {
                out.value(w, &mk_eval(&f, &al, &word(&al, w)?)?);
            }
        }
        LogicCommand::Compile { formula, alphabet: alpha } => {
            let f = parse_mk(&formula)?;
            let vars: Vec<_> = f.free_vars().into_iter().collect();
            let text = write_mk(&rmso_to_automaton(&f, &vars, &alphabet(&alpha)?)?);
            out.line(&text, json!({"kind": "mk", "file": text}));
        }
        LogicCommand::Decompile { file } => {
            let d = automaton_to_rmso(&load_mk(&file)?)?;
            out.line(d.sentence.to_string(), json!({"sentence": d.sentence.to_string()}));
        }
        LogicCommand::CheckRmso { formula } => {
            let f = parse_mk(formula_text(formula)?.trim())?;
            let v = rmso_violations(&f);
            if v.is_empty() {
                out.line("RMSO", json!({"rmso": true}));
            } else {
                let lines: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                out.line(format!("not RMSO\n{}", lines.join("\n")), json!({"rmso": false, "violations": lines}));
                return Err(Error::NotRestricted(lines));
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out { format: cli.format, text: String::new() };
    let result = run(cli, &mut out);
    print!("{}", out.text);
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
