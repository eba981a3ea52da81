//! The `syncword` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain negative (not
//! synchronizing, failed verification), 3 capacity exceeded.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::automaton::{builtin, builtin_word, parse_dfa, serialize_dfa, Dfa, Word};
use crate::enumeration::verify::{builtin_expectations, verify_automaton, AutomatonVerification, Status};
use crate::enumeration::{extremal_scan, verify_example_suite, ScanConfig};
use crate::error::Error;
use crate::series::{threshold_count, SeriesContext, SuffixValue};
use crate::sync::{
    is_irreducible, near_sync_suffixes, shortest_reset_word_with_limit, subset_limit_from_env,
    suffix_distinctness_check,
};
use crate::word_matrix::WordMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "syncword", version, about = "Shortest reset words, word matrices and series profiles of DFAs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV where the subcommand supports it.
    #[arg(long)]
    pub csv: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a shortest reset word.
    ResetWord {
        /// DFA file (text or JSON) or built-in name: cerny:<n>, kari, roman.
        input: String,
        /// State for the series profile (defaults to the reset target).
        #[arg(long)]
        q: Option<usize>,
        /// Print the matrix of the reset word.
        #[arg(long)]
        show_matrix: bool,
        /// Print the suffix profile of the reset word.
        #[arg(long)]
        profile: bool,
        /// Check irreducibility and the suffix structure of the word.
        #[arg(long)]
        check_lemmas: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Series values of every suffix of a word.
    Profile {
        input: String,
        #[arg(long)]
        q: Option<usize>,
        /// Word to profile (letters a, b, ...). Defaults to the built-in
        /// example word or a shortest reset word.
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the verification suite on an automaton, or on all built-ins with `suite`.
    Verify {
        input: String,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustively scan all automata with n states over k letters.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        strongly_connected: bool,
        /// Keep one automaton per relabeling class (default for n <= 5).
        #[arg(long, conflicts_with = "no_canonical")]
        canonical: bool,
        #[arg(long)]
        no_canonical: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Print built-in automata in the DFA text format.
    Examples {
        /// One of cerny:<n>, kari, roman; all three families when omitted.
        name: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

/// Result of a CLI invocation: exit code plus the text destined for stdout
/// and stderr.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Precondition(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::error(exit_code(&e), format!("error: {e}\n"))
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::error(EXIT_USAGE, text),
            }
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let (result, out) = match cli.command {
        Command::ResetWord {
            input,
            q,
            show_matrix,
            profile,
            check_lemmas,
            output,
        } => (reset_word(&input, q, show_matrix, profile, check_lemmas, &output), output.out),
        Command::Profile { input, q, word, output } => (profile_cmd(&input, q, word.as_deref(), &output), output.out),
        Command::Verify { input, output } => (verify_cmd(&input, &output), output.out),
        Command::Scan {
            n,
            k,
            workers,
            strongly_connected,
            canonical,
            no_canonical,
            output,
        } => {
            let mut cfg = ScanConfig::new(n, k);
            cfg.worker_count = workers;
            cfg.require_strongly_connected = strongly_connected;
            if canonical {
                cfg.canonicalize = true;
            }
            if no_canonical {
                cfg.canonicalize = false;
            }
            (scan_cmd(&cfg, &output), output.out)
        }
        Command::Examples { name, output } => (examples_cmd(name.as_deref()), output.out),
    };
    let mut outcome = match result {
        Ok(o) => o,
        Err(e) => return e.into(),
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, &outcome.stdout) {
            return Outcome::error(EXIT_USAGE, format!("error: cannot write {}: {e}\n", path.display()));
        }
        outcome.stdout.clear();
    }
    outcome
}

/// A built-in name or a path to a text or JSON DFA file.
pub fn load_input(input: &str) -> Result<Dfa, Error> {
    if let Some(dfa) = builtin(input) {
        return dfa;
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::invalid(format!("cannot read {input}: {e}")))?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| Error::parse(e.line(), e.to_string()))
    } else {
        parse_dfa(&text)
    }
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn profile_json(profile: &[SuffixValue], n: usize) -> serde_json::Value {
    let thresholds: Vec<_> = (1..n as i64)
        .map(|b| json!({ "bound": b, "count": threshold_count(profile, b) }))
        .collect();
    json!({ "values": profile, "thresholds": thresholds })
}

fn profile_text(profile: &[SuffixValue], n: usize, csv: bool) -> String {
    let mut s = String::new();
    if csv {
        s.push_str("suffix_length,value\n");
        for p in profile {
            let _ = writeln!(s, "{},{}", p.suffix_len, p.value);
        }
        s.push_str("\nbound,count\n");
        for b in 1..n as i64 {
            let _ = writeln!(s, "{b},{}", threshold_count(profile, b));
        }
    } else {
        s.push_str("suffix_length  value\n");
        for p in profile {
            let _ = writeln!(s, "{:>13}  {:>5}", p.suffix_len, p.value);
        }
        s.push_str("suffixes with (S,t) >= bound:\n");
        for b in 1..n as i64 {
            let _ = writeln!(s, "  >= {b}: {}", threshold_count(profile, b));
        }
    }
    s
}

fn reset_word(
    input: &str,
    q: Option<usize>,
    show_matrix: bool,
    profile: bool,
    check_lemmas: bool,
    output: &Output,
) -> Result<Outcome, Error> {
    let dfa = load_input(input)?;
    let limit = subset_limit_from_env()?;
    let Some(reset) = shortest_reset_word_with_limit(&dfa, limit)? else {
        let out = if output.json {
            format!("{}\n", json!({ "input": input, "synchronizing": false }))
        } else {
            "not synchronizing\n".to_string()
        };
        return Ok(Outcome {
            code: EXIT_NEGATIVE,
            stdout: out,
            stderr: String::new(),
        });
    };
    let m = WordMatrix::of_word(&dfa, &reset.word)?;
    let q = q.unwrap_or(reset.target);
    let ctx = SeriesContext::singleton(&dfa, q)?;
    let prof = if profile { Some(ctx.suffix_profile(&reset.word)?) } else { None };
    let lemmas = if check_lemmas {
        let ns = near_sync_suffixes(&dfa, &reset.word, reset.target)?;
        Some(vec![
            ("irreducible", is_irreducible(&dfa, &reset.word, reset.target)?),
            ("suffix_distinct", suffix_distinctness_check(&dfa, &reset.word, reset.target)?),
            ("near_sync_count", ns.within_bound),
            ("near_sync_rows", ns.distinct_rows),
            ("near_sync_extension", ns.extension.is_some()),
        ])
    } else {
        None
    };
    let all_ok = lemmas.as_ref().is_none_or(|l| l.iter().all(|(_, ok)| *ok));

    let stdout = if output.json {
        let mut v = json!({
            "input": input,
            "synchronizing": true,
            "n": dfa.n(),
            "k": dfa.k(),
            "word": reset.word.to_compact_string(),
            "length": reset.length,
            "target": reset.target,
            "expanded": reset.expanded,
        });
        if show_matrix {
            v["matrix"] = json!(m.dense());
        }
        if let Some(p) = &prof {
            v["profile"] = profile_json(p, dfa.n());
            v["q"] = json!(q);
        }
        if let Some(l) = &lemmas {
            v["lemmas"] = l.iter().map(|(k, ok)| (k.to_string(), json!(ok))).collect();
        }
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "automaton: {input} (n={}, k={})", dfa.n(), dfa.k());
        let _ = writeln!(s, "reset word: {}", reset.word);
        let _ = writeln!(s, "length: {}", reset.length);
        let _ = writeln!(s, "target: {}", reset.target);
        if show_matrix {
            let _ = write!(s, "matrix:\n{m}");
        }
        if let Some(p) = &prof {
            let _ = writeln!(s, "profile (q = {q}):");
            s.push_str(&profile_text(p, dfa.n(), output.csv));
        }
        if let Some(l) = &lemmas {
            for (k, ok) in l {
                let _ = writeln!(s, "{k}: {}", if *ok { "pass" } else { "FAIL" });
            }
        }
        s
    };
    Ok(Outcome {
        code: if all_ok { EXIT_OK } else { EXIT_NEGATIVE },
        stdout,
        stderr: String::new(),
    })
}

fn profile_cmd(input: &str, q: Option<usize>, word: Option<&str>, output: &Output) -> Result<Outcome, Error> {
    let dfa = load_input(input)?;
    let word: Word = match word {
        Some(w) => w.parse()?,
        None => match builtin_word(input) {
            Some(w) => w,
            None => match shortest_reset_word_with_limit(&dfa, subset_limit_from_env()?)? {
                Some(r) => r.word,
                None => return Ok(Outcome::error(EXIT_NEGATIVE, "not synchronizing\n")),
            },
        },
    };
    word.validate(dfa.k())?;
    let q = match q {
        Some(q) => q,
        None => match dfa.image(dfa.all_states(), &word)?.single() {
            Some(q) => q,
            None => {
                return Ok(Outcome::error(
                    EXIT_NEGATIVE,
                    format!("word {word} is not synchronizing; pass --q\n"),
                ))
            }
        },
    };
    let ctx = SeriesContext::singleton(&dfa, q)?;
    let profile = ctx.suffix_profile(&word)?;
    let stdout = if output.json {
        let mut v = profile_json(&profile, dfa.n());
        v["word"] = json!(word.to_compact_string());
        v["q"] = json!(q);
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
    } else if output.csv {
        profile_text(&profile, dfa.n(), true)
    } else {
        format!("word: {word}\nq: {q}\n{}", profile_text(&profile, dfa.n(), false))
    };
    Ok(ok(stdout))
}

fn render_verification(v: &AutomatonVerification, s: &mut String) {
    let _ = writeln!(s, "== {} (n={}, k={})", v.name, v.n, v.k);
    if let (Some(w), Some(len), Some(t)) = (&v.reset_word, v.reset_length, v.target) {
        let _ = writeln!(s, "shortest reset word: {w} (length {len}, target {t})");
    }
    for a in &v.assertions {
        let tag = match a.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Info => "info",
        };
        let _ = write!(s, "[{tag}] {:<26} {} ({} instances)", a.id, a.statement, a.instances);
        if let Some(d) = &a.detail {
            let _ = write!(s, "; {d}");
        }
        if let Some(c) = &a.counterexample {
            let _ = write!(s, "; counterexample: {c}");
        }
        s.push('\n');
    }
}

fn verify_cmd(input: &str, output: &Output) -> Result<Outcome, Error> {
    let runs = if input == "suite" {
        verify_example_suite()?.automata
    } else {
        let dfa = load_input(input)?;
        vec![verify_automaton(input, &dfa, &builtin_expectations(input))?]
    };
    let passed = runs.iter().all(AutomatonVerification::all_passed);
    let stdout = if output.json {
        let v = json!({ "passed": passed, "automata": runs });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
    } else {
        let mut s = String::new();
        for r in &runs {
            render_verification(r, &mut s);
        }
        let _ = writeln!(s, "{}", if passed { "all assertions passed" } else { "some assertions FAILED" });
        s
    };
    Ok(Outcome {
        code: if passed { EXIT_OK } else { EXIT_NEGATIVE },
        stdout,
        stderr: String::new(),
    })
}

fn scan_cmd(cfg: &ScanConfig, output: &Output) -> Result<Outcome, Error> {
    let report = extremal_scan(cfg)?;
    let stdout = if output.json || output.out.is_some() {
        format!("{}\n", report.to_json())
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "n={} k={} strongly_connected={} canonical={}",
            report.n, report.k, report.strongly_connected_only, report.canonical
        );
        let _ = writeln!(s, "enumerated: {}", report.total_enumerated);
        let _ = writeln!(s, "synchronizing: {}", report.synchronizing);
        s.push_str("histogram (length: count):\n");
        for (len, c) in &report.histogram {
            let _ = writeln!(s, "  {len}: {c}");
        }
        let max = report.max_length.map_or("-".to_string(), |m| m.to_string());
        let _ = writeln!(s, "max shortest reset length: {max} ((n-1)^2 = {})", report.cerny_bound);
        let _ = writeln!(s, "extremal witnesses: {}", report.extremal_witnesses.len());
        for w in &report.extremal_witnesses {
            let _ = writeln!(s, "  {w:?}");
        }
        let _ = writeln!(
            s,
            "violations of (n^3-n)/6 = {}: {}",
            report.upper_bound,
            report.bound_violations.len()
        );
        let _ = writeln!(s, "violations of (n-1)^2: {}", report.cerny_violations.len());
        s
    };
    let clean = report.bound_violations.is_empty() && report.cerny_violations.is_empty();
    Ok(Outcome {
        code: if clean { EXIT_OK } else { EXIT_NEGATIVE },
        stdout,
        stderr: String::new(),
    })
}

fn examples_cmd(name: Option<&str>) -> Result<Outcome, Error> {
    let names: Vec<String> = match name {
        Some(n) => vec![n.to_string()],
        None => vec!["cerny:4".into(), "kari".into(), "roman".into()],
    };
    let mut s = String::new();
    for name in names {
        let dfa = builtin(&name).ok_or_else(|| Error::invalid(format!("unknown built-in automaton {name:?}")))??;
        let _ = writeln!(s, "# {name}");
        if let Some(w) = builtin_word(&name) {
            let _ = writeln!(s, "# reset word: {w}");
        }
        s.push_str(&serialize_dfa(&dfa));
    }
    Ok(ok(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> Outcome {
        run_args(std::iter::once("syncword").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["bogus"]).code, EXIT_USAGE);
        assert_eq!(run_str(&["reset-word"]).code, EXIT_USAGE);
        assert_eq!(run_str(&["reset-word", "cerny:x"]).code, EXIT_USAGE);
        assert_eq!(run_str(&["reset-word", "/nonexistent/file"]).code, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn reset_word_text() {
        let o = run_str(&["reset-word", "cerny:4"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.stdout.contains("length: 9"), "{}", o.stdout);
    }

    #[test]
    fn capacity_exit_code() {
        let o = run_str(&["scan", "--n", "6", "--k", "2"]);
        assert_eq!(o.code, EXIT_CAPACITY);
    }

    #[test]
    fn examples_round_trip() {
        let o = run_str(&["examples", "kari"]);
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(parse_dfa(&o.stdout).unwrap(), crate::automaton::kari_automaton());
        assert_eq!(run_str(&["examples", "nope"]).code, EXIT_USAGE);
    }
}
