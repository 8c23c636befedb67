//! `smoothkit`: command-line access to the smoothkit library.
//!
//! Exit codes: 0 success, 2 domain error, 3 failed verification, 64 usage.

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use smoothkit::fractal::{self, EmitFormat, SupDomain};
use smoothkit::freq::{self, Pattern};
use smoothkit::recoding::{self, RecWord};
use smoothkit::sequences::{self, PointedWord13};
use smoothkit::typesub::{self, parse_bits, AlphabetParams, TypeSpec};
use smoothkit::verify::{self, VerifyConfig};
use smoothkit::word::{Closure, Letter, PointedWord, UNBOUNDED};
use smoothkit::{Error, Exec};

const EXIT_DOMAIN: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "smoothkit",
    version,
    about = "Smooth sequences over {1,3}: derivatives, recodings, types, frequencies"
)]
struct Cli {
    #[command(flatten)]
    opts: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Odd alphabet {α,β}, e.g. "1,3" or "{3,7}"
    #[arg(long, global = true, default_value = "1,3")]
    alphabet: String,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tolerance for fixed points and pattern frequencies
    #[arg(long, global = true, default_value_t = freq::DEFAULT_TOL)]
    tol: f64,
    /// Substitution depth for generated words
    #[arg(long, global = true, default_value_t = 13)]
    depth: usize,
    /// Rank of fractal enumerations
    #[arg(long, global = true, default_value_t = 8)]
    rank: usize,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Levels at which both window edges are known run boundaries ("inf" for unbounded)
    #[arg(long, global = true, default_value = "0")]
    closure: String,
    /// Run data-parallel work on one thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Successive run-length derivatives of a {1,3} window
    Derive {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Recode a {1,3} window over {A,B,C,D} (or expand back with --inverse)
    Recode {
        word: Option<String>,
        #[arg(long)]
        inverse: bool,
    },
    /// Induced derivatives of a recoded window
    Induced {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Elementary block decomposition of a recoded window
    Blocks { word: Option<String> },
    /// Types of the successive induced derivatives of a window
    Type {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Apply phi_{bits_0} ∘ … ∘ phi_{bits_{n-1}} to a recoded window
    Compose {
        #[arg(long)]
        bits: String,
        word: Option<String>,
    },
    /// The canonical word w_n of Y_τ
    Construct {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        n: usize,
    },
    /// Shift i with y = S^i phi(Δ^L y)
    Reconstruct {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Alignment counts Σ_y^L(n)
    Sigma {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long)]
        n: usize,
    },
    /// Generalised column sequence of a window
    Column {
        word: Option<String>,
        #[arg(long = "levels", default_value_t = 1)]
        levels: usize,
    },
    /// Rebuild a window from a generalised column sequence, e.g. "1,3R,3M,3L,1"
    Integrate { column: Option<String> },
    /// Extend a one-sided prefix to the left
    ExtendLeft {
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Letter and symbol frequencies of X_τ
    Freq {
        #[arg(long)]
        tau: String,
    },
    /// Frequency of a pattern over {1,3} or {A,B,C,D}
    PatternFreq {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        word: String,
    },
    /// Sliding-window frequency in a generated prefix
    Empirical {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        word: String,
    },
    /// ν(B^L) for L = 1..levels
    NuBl {
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Letter frequencies from the Perron eigenvector of a period
    Perron {
        #[arg(long)]
        period: String,
    },
    /// Rank-n cells approximating the frequency attractor
    Fractal,
    /// Bracket sup F (or sup F ∩ [0,1/2])
    Sup {
        #[arg(long, default_value = "half")]
        domain: String,
    },
    /// Sampled Lipschitz ratios of h0, h1 for an alphabet
    Probe {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run the invariant suite
    Verify,
}

enum Failure {
    Usage(String),
    Domain(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

struct Ctx {
    opts: Global,
    params: AlphabetParams,
    closure: Closure,
    exec: Exec,
    budget: u64,
}

impl Ctx {
    fn format(&self, default: Format) -> Format {
        self.opts.format.unwrap_or(default)
    }

    fn input(&self, arg: &Option<String>) -> Result<String, Failure> {
        match arg {
            Some(s) => Ok(s.clone()),
            None => {
                let mut s = String::new();
                io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
                if s.trim().is_empty() {
                    return Err(Failure::Usage(
                        "no input word given (argument or stdin)".into(),
                    ));
                }
                Ok(s)
            }
        }
    }

    fn word13(&self, arg: &Option<String>) -> Result<PointedWord13, Failure> {
        Ok(PointedWord13::parse_text(&self.input(arg)?)?.with_closure(self.closure))
    }

    /// A recoded window; digit input is recoded first.
    fn rec_word(&self, arg: &Option<String>) -> Result<RecWord, Failure> {
        let text = self.input(arg)?;
        if text.chars().any(|c| c.is_ascii_digit()) {
            let x = PointedWord13::parse_text(&text)?.with_closure(self.closure);
            Ok(recoding::rec(&x)?)
        } else {
            Ok(RecWord::parse_text(&text)?.with_closure(self.closure))
        }
    }

    fn tau(&self, s: &str) -> Result<TypeSpec, Failure> {
        Ok(s.parse::<TypeSpec>()?)
    }
}

fn word_out<S: Letter>(w: &PointedWord<S>, fmt: Format) -> Value {
    match fmt {
        Format::Json => serde_json::to_value(w.to_json()).expect("serialisable"),
        _ => Value::String(w.to_text()),
    }
}

fn render_list(items: Vec<Value>, fmt: Format) -> String {
    match fmt {
        Format::Json => pretty(&Value::Array(items)),
        _ => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => s,
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

fn text_object(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}

fn object_out(v: Value, fmt: Format) -> String {
    match fmt {
        Format::Text => text_object(&v),
        _ => pretty(&v),
    }
}

fn estimate_json(tau: &TypeSpec, word: &str, e: freq::Estimate) -> Value {
    json!({ "tau": tau.to_string(), "word": word, "value": e.value, "err": e.err })
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Outcome {
    match cmd {
        Command::Derive { word, levels } => {
            let x = ctx.word13(word)?;
            let fmt = ctx.format(Format::Text);
            let mut out = vec![word_out(&x, fmt)];
            let mut cur = x;
            for _ in 0..*levels {
                cur = sequences::derive_window(&cur)?;
                out.push(word_out(&cur, fmt));
            }
            Ok(render_list(out, fmt))
        }
        Command::Recode { word, inverse } => {
            let fmt = ctx.format(Format::Text);
            if *inverse {
                let y = RecWord::parse_text(&ctx.input(word)?)?.with_closure(ctx.closure);
                Ok(render_list(vec![word_out(&recoding::expand(&y), fmt)], fmt))
            } else {
                let y = recoding::rec(&ctx.word13(word)?)?;
                Ok(render_list(vec![word_out(&y, fmt)], fmt))
            }
        }
        Command::Induced { word, levels } => {
            let y = ctx.rec_word(word)?;
            let fmt = ctx.format(Format::Text);
            let mut out = vec![word_out(&y, fmt)];
            let mut cur = y;
            for _ in 0..*levels {
                cur = if ctx.params.is_one_three() {
                    recoding::induced_derive(&cur)?
                } else {
                    recoding::induced_derive_in(&cur, ctx.params)?
                };
                out.push(word_out(&cur, fmt));
            }
            Ok(render_list(out, fmt))
        }
        Command::Blocks { word } => {
            let y = ctx.rec_word(word)?;
            let dec = recoding::elementary_decompose(&y)?;
            match ctx.format(Format::Text) {
                Format::Json => Ok(pretty(&json!({
                    "blocks": dec.blocks.iter().map(|b| json!({"kind": b.kind.to_string(), "start": b.start})).collect::<Vec<_>>(),
                    "coverage": dec.coverage.map(|(a, b)| [a, b]),
                }))),
                _ => Ok(dec
                    .blocks
                    .iter()
                    .map(|b| format!("[{}]", b.kind))
                    .collect::<Vec<_>>()
                    .join("")),
            }
        }
        Command::Type { word, levels } => {
            let y = ctx.rec_word(word)?;
            let types = typesub::types_prefix(&y, *levels)?;
            let s = typesub::bits_to_string(&types);
            Ok(match ctx.format(Format::Text) {
                Format::Json => pretty(&json!({ "types": s })),
                _ => s,
            })
        }
        Command::Compose { bits, word } => {
            let b = parse_bits(bits)?;
            let seed = RecWord::parse_text(&ctx.input(word)?)?.with_closure(ctx.closure);
            let z = typesub::compose_phi(&b, &seed, ctx.params);
            let fmt = ctx.format(Format::Text);
            Ok(render_list(vec![word_out(&z, fmt)], fmt))
        }
        Command::Construct { tau, n } => {
            let t = ctx.tau(tau)?;
            let w = typesub::canonical_element(&t, *n)?;
            let fmt = ctx.format(Format::Text);
            Ok(render_list(vec![word_out(&w, fmt)], fmt))
        }
        Command::Reconstruct { word, levels } => {
            let y = ctx.rec_word(word)?;
            let i = typesub::reconstruct_shift(&y, *levels)?;
            Ok(match ctx.format(Format::Text) {
                Format::Json => pretty(&json!({ "levels": levels, "shift": i })),
                _ => i.to_string(),
            })
        }
        Command::Sigma { word, levels, n } => {
            let y = ctx.rec_word(word)?;
            let counts = recoding::AlignmentTower::new(&y, *levels)?.sigma_counts(*levels, *n)?;
            Ok(match ctx.format(Format::Text) {
                Format::Json => pretty(
                    &json!({ "levels": levels, "n": n, "sigma": counts[*n], "counts": counts }),
                ),
                _ => counts[*n].to_string(),
            })
        }
        Command::Column { word, levels } => {
            let x = ctx.word13(word)?;
            let col = sequences::column_extract(&x, *levels)?;
            Ok(match ctx.format(Format::Text) {
                Format::Json => pretty(&json!({ "column": sequences::format_column(&col) })),
                _ => sequences::format_column(&col),
            })
        }
        Command::Integrate { column } => {
            let col = sequences::parse_column(&ctx.input(column)?)?;
            let x = sequences::integrate(&col)?;
            let fmt = ctx.format(Format::Text);
            Ok(render_list(vec![word_out(&x, fmt)], fmt))
        }
        Command::ExtendLeft { word, levels } => {
            let x = PointedWord13::parse_text(&ctx.input(word)?)?.with_closure(ctx.closure);
            let w = sequences::extend_left(&x, *levels)?;
            let fmt = ctx.format(Format::Text);
            Ok(render_list(vec![word_out(&w, fmt)], fmt))
        }
        Command::Freq { tau } => {
            let t = ctx.tau(tau)?;
            let r = freq::freq_report(&t, ctx.opts.tol, ctx.params)?;
            let v = serde_json::to_value(&r).expect("serialisable");
            Ok(object_out(v, ctx.format(Format::Json)))
        }
        Command::PatternFreq { tau, word } => {
            let t = ctx.tau(tau)?;
            let w = Pattern::parse(word)?;
            let e = freq::pattern_freq(&t, &w, ctx.opts.tol, ctx.params)?;
            Ok(object_out(
                estimate_json(&t, word, e),
                ctx.format(Format::Json),
            ))
        }
        Command::Empirical { tau, word } => {
            let t = ctx.tau(tau)?;
            let w = Pattern::parse(word)?;
            let f = freq::empirical_freq(&t, &w, ctx.opts.depth)?;
            Ok(object_out(
                json!({ "tau": t.to_string(), "word": word, "depth": ctx.opts.depth, "value": f }),
                ctx.format(Format::Json),
            ))
        }
        Command::NuBl { tau, levels } => {
            let t = ctx.tau(tau)?;
            let mut rows = Vec::new();
            for l in 1..=*levels {
                let e = freq::nu_bl(&t, l, ctx.opts.tol, ctx.params)?;
                rows.push(json!({ "L": l, "value": e.value, "err": e.err }));
            }
            Ok(match ctx.format(Format::Json) {
                Format::Text => rows
                    .iter()
                    .map(|r| format!("{} {}", r["L"], r["value"]))
                    .collect::<Vec<_>>()
                    .join("\n"),
                _ => pretty(&json!({ "tau": t.to_string(), "nu_bl": rows })),
            })
        }
        Command::Perron { period } => {
            let p = parse_bits(period)?;
            let r = freq::perron_oracle(&p, ctx.params)?;
            Ok(object_out(
                serde_json::to_value(&r).expect("serialisable"),
                ctx.format(Format::Json),
            ))
        }
        Command::Fractal => {
            let cells = fractal::enumerate_cells(ctx.opts.rank, ctx.params, ctx.exec, ctx.budget)?;
            let fmt = match ctx.format(Format::Csv) {
                Format::Csv | Format::Text => EmitFormat::Csv,
                Format::Svg => EmitFormat::Svg,
                Format::Json => EmitFormat::Json,
            };
            let mut s = fractal::emit(&cells, ctx.params, fmt);
            if s.ends_with('\n') {
                s.pop();
            }
            Ok(s)
        }
        Command::Sup { domain } => {
            let d: SupDomain = domain.parse()?;
            let b = fractal::sup_estimate(ctx.opts.rank, d, ctx.params, ctx.exec, ctx.budget)?;
            Ok(object_out(
                json!({ "rank": b.rank, "domain": [0.0, b.domain_hi], "lower": b.lower, "upper": b.upper, "width": b.width() }),
                ctx.format(Format::Json),
            ))
        }
        Command::Probe { samples } => {
            if *samples == 0 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            let r = freq::contraction_probe(ctx.params, *samples, ctx.opts.seed, ctx.exec);
            Ok(object_out(
                serde_json::to_value(&r).expect("serialisable"),
                ctx.format(Format::Json),
            ))
        }
        Command::Verify => {
            let report = verify::run(VerifyConfig {
                seed: ctx.opts.seed,
                exec: ctx.exec,
                budget: ctx.budget,
            });
            let text = match ctx.format(Format::Text) {
                Format::Json => pretty(&serde_json::to_value(&report).expect("serialisable")),
                _ => report.to_text().trim_end().to_string(),
            };
            if report.passed {
                Ok(text)
            } else {
                Err(Failure::Verify(text))
            }
        }
    }
}

fn parse_closure(s: &str) -> Result<Closure, Failure> {
    match s.trim() {
        "inf" | "unbounded" => Ok(Closure::both(UNBOUNDED)),
        other => other.parse::<u32>().map(Closure::both).map_err(|_| {
            Failure::Usage(format!(
                "--closure expects a level count or \"inf\", got {other:?}"
            ))
        }),
    }
}

fn budget_from_env() -> Result<u64, Failure> {
    match std::env::var("SMOOTHKIT_BUDGET") {
        Ok(v) => v.trim().parse::<u64>().map_err(|_| {
            Failure::Usage(format!("SMOOTHKIT_BUDGET must be a cell count, got {v:?}"))
        }),
        Err(_) => Ok(fractal::DEFAULT_BUDGET),
    }
}

fn run(cli: Cli) -> Outcome {
    let params: AlphabetParams = cli.opts.alphabet.parse().map_err(|e: Error| match e {
        Error::InvalidParams(m) => Failure::Usage(m),
        other => Failure::Usage(other.to_string()),
    })?;
    if cli.opts.tol.is_nan() || cli.opts.tol <= 0.0 {
        return Err(Failure::Usage(format!(
            "--tol must be positive, got {}",
            cli.opts.tol
        )));
    }
    let ctx = Ctx {
        params,
        closure: parse_closure(&cli.opts.closure)?,
        exec: if cli.opts.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        },
        budget: budget_from_env()?,
        opts: cli.opts,
    };
    dispatch(&cli.command, &ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let stdout = io::stdout();
    match run(cli) {
        Ok(out) => {
            let mut h = stdout.lock();
            let _ = writeln!(h, "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Verify(report)) => {
            println!("{report}");
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
