use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mealy::families::{self, CensusConfig, EnumClass};
use mealy::finite::{self, FiniteConfig, FinitenessVerdict, Method};
use mealy::series::{self, GroupOrder, OrderLimits, OrderOutcome};
use mealy::{md_reduce, MealyMachine};

#[derive(Parser)]
#[command(name = "mealy", version, about = "Mealy automaton (semi)groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Input {
    /// Machine file (JSON), built-in name, or `-` for stdin.
    #[arg(long, default_value = "-")]
    machine: String,
    /// Adjoin the inverse machine first.
    #[arg(long)]
    group: bool,
}

#[derive(Args, Clone)]
struct Limits {
    /// Round (or level) limit.
    #[arg(long, default_value_t = series::DEFAULT_ROUND_LIMIT)]
    limit: usize,
    /// Element cap; with no cap only the state guard applies.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = series::DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Sphere sizes of the generated semigroup.
    Growth {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        radius: Option<usize>,
        #[command(flatten)]
        limits: Limits,
        #[arg(long, value_enum, default_value = "text")]
        out: Format,
    },
    /// Order of the generated semigroup.
    Order {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
        #[arg(long)]
        factored: bool,
        #[arg(long, value_enum, default_value = "text")]
        out: Format,
    },
    /// Finiteness test.
    Finite {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "product")]
        method: Method,
        #[command(flatten)]
        limits: Limits,
        #[arg(long, default_value_t = mealy::actions::DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
        #[arg(long)]
        factored: bool,
        /// Skip the order computation after a finite verdict.
        #[arg(long)]
        no_order: bool,
        #[arg(long, value_enum, default_value = "text")]
        out: Format,
    },
    /// md-reduction.
    Reduce {
        #[command(flatten)]
        input: Input,
    },
    Dual {
        #[command(flatten)]
        input: Input,
    },
    Inverse {
        #[command(flatten)]
        input: Input,
    },
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "text")]
        out: Format,
    },
    /// Image of an input word under a word of states.
    Apply {
        #[command(flatten)]
        input: Input,
        /// States, by name or index, separated by spaces or commas.
        #[arg(long, default_value = "")]
        states: String,
        /// Letters, by name or index, separated by spaces or commas.
        #[arg(long)]
        word: String,
    },
    /// Print a built-in machine as JSON.
    Family {
        #[arg(long)]
        name: String,
    },
    /// Machines up to relabeling, one JSON object per line.
    Enum {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "all")]
        class: EnumClass,
        /// Print only the number of machines.
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = families::DEFAULT_ENUM_BUDGET)]
        budget: u64,
    },
    /// Finiteness census as CSV.
    Census {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "inv_or_rev")]
        class: EnumClass,
        #[arg(long, default_value_t = 4000)]
        cap: usize,
        #[arg(long, default_value_t = series::DEFAULT_ROUND_LIMIT)]
        limit: usize,
        /// Power-machine state guard.
        #[arg(long, default_value_t = series::DEFAULT_STATE_CAP)]
        state_cap: usize,
        /// Largest quotient or level the faithful method may act on.
        #[arg(long, default_value_t = CensusConfig::default().degree_cap)]
        degree_cap: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV file to append to (resumes); stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        out: Format,
    },
    /// Free-semigroup candidate test for 2-state reversible machines.
    FreeCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4000)]
        cap: usize,
        #[arg(long, default_value_t = series::DEFAULT_ROUND_LIMIT)]
        limit: usize,
    },
}

enum Failure {
    Usage(String),
    Guard(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn load(input: &Input) -> Result<MealyMachine, Failure> {
    let m = if input.machine == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(usage)?;
        MealyMachine::from_json(&text).map_err(|e| usage(format!("stdin: {e}")))?
    } else if Path::new(&input.machine).is_file() {
        let text = std::fs::read_to_string(&input.machine).map_err(usage)?;
        MealyMachine::from_json(&text).map_err(|e| usage(format!("{}: {e}", input.machine)))?
    } else {
        families::builtin(&input.machine).map_err(usage)?
    };
    if input.group {
        m.with_inverse().map_err(usage)
    } else {
        Ok(m)
    }
}

fn show_order(order: &GroupOrder, factored: bool) -> String {
    if factored {
        order.factored()
    } else {
        order.to_string()
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable output")
}

fn resolve(tokens: &str, names: Option<&[String]>, bound: usize, what: &str) -> Result<Vec<usize>, Failure> {
    tokens
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if let Some(k) = names.and_then(|n| n.iter().position(|s| s == t)) {
                return Ok(k);
            }
            match t.parse::<usize>() {
                Ok(k) if k < bound => Ok(k),
                _ => Err(usage(format!("unknown {what} `{t}`"))),
            }
        })
        .collect()
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    let mut say = |line: String| writeln!(out, "{line}").map_err(usage);
    match cli.command {
        Command::Growth {
            input,
            radius,
            limits,
            out,
        } => {
            let m = load(&input)?;
            let bound = radius.or(Some(limits.limit));
            let s = series::growth(&m, bound, limits.state_cap).map_err(|e| Failure::Guard(e.to_string()))?;
            match out {
                Format::Json => say(json(&s))?,
                Format::Csv => {
                    say("radius,sphere".into())?;
                    for (n, v) in s.spheres.iter().enumerate() {
                        say(format!("{n},{v}"))?;
                    }
                }
                Format::Text => say(s.spheres.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))?,
            }
            if radius.is_none() && !s.complete {
                return Err(Failure::Guard(format!("series not complete after {} rounds", limits.limit)));
            }
            Ok(())
        }
        Command::Order {
            input,
            limits,
            factored,
            out,
        } => {
            let m = load(&input)?;
            let outcome = series::order_with(
                &m,
                OrderLimits {
                    rounds: limits.limit,
                    state_cap: limits.state_cap,
                    element_cap: limits.cap,
                },
            )
            .map_err(|e| Failure::Guard(e.to_string()))?;
            match outcome {
                OrderOutcome::Finite { order, rounds } => {
                    if out == Format::Json {
                        say(json(&serde_json::json!({ "order": order, "rounds": rounds })))
                    } else {
                        say(show_order(&order, factored))
                    }
                }
                OrderOutcome::Unknown(e) => {
                    say(if out == Format::Json { json(&e) } else { "unknown".into() })?;
                    Err(Failure::Guard(format!("order unknown: {}", json(&e))))
                }
            }
        }
        Command::Finite {
            input,
            method,
            limits,
            degree_cap,
            factored,
            no_order,
            out,
        } => {
            let m = load(&input)?;
            let config = FiniteConfig {
                limit: limits.limit,
                state_cap: limits.state_cap,
                degree_cap,
                element_cap: limits.cap,
                compute_order: !no_order,
                ..FiniteConfig::default()
            };
            let verdict = finite::is_finite(&m, method, config);
            if out == Format::Json {
                say(json(&verdict))?;
            } else {
                match &verdict {
                    FinitenessVerdict::Finite { witness, order } => {
                        say("finite".into())?;
                        if let Some(order) = order {
                            say(format!("order {}", show_order(order, factored)))?;
                        }
                        say(format!(
                            "witness {} {} round {}",
                            json(&witness.method).trim_matches('"'),
                            json(&witness.side).trim_matches('"'),
                            witness.round
                        ))?;
                    }
                    FinitenessVerdict::Unknown { exhausted } => {
                        say("unknown".into())?;
                        for (method, e) in exhausted {
                            eprintln!("{}: {}", json(method).trim_matches('"'), json(e));
                        }
                    }
                }
            }
            if verdict.is_finite() {
                Ok(())
            } else {
                Err(Failure::Guard("finiteness undecided within the limits".into()))
            }
        }
        Command::Reduce { input } => {
            let m = load(&input)?;
            say(md_reduce(&m).map_err(|e| Failure::Guard(e.to_string()))?.to_json())
        }
        Command::Dual { input } => say(load(&input)?.dual().to_json()),
        Command::Inverse { input } => say(load(&input)?.inverse().map_err(usage)?.to_json()),
        Command::Classify { input, out } => {
            let c = load(&input)?.classify();
            if out == Format::Json {
                say(json(&c))
            } else {
                say(format!("invertible {}", c.invertible))?;
                say(format!("reversible {}", c.reversible))?;
                say(format!("bireversible {}", c.bireversible))
            }
        }
        Command::Apply { input, states, word } => {
            let m = load(&input)?;
            let xs = resolve(&states, m.state_names(), m.n_states(), "state")?;
            let ws = resolve(&word, m.letter_names(), m.n_letters(), "letter")?;
            let image = m.apply(&xs, &ws).map_err(usage)?;
            let names = m.letter_names();
            say(image
                .iter()
                .map(|&i| names.map_or_else(|| i.to_string(), |n| n[i].clone()))
                .collect::<Vec<_>>()
                .join(" "))
        }
        Command::Family { name } => say(families::builtin(&name).map_err(usage)?.to_json()),
        Command::Enum {
            p,
            q,
            class,
            count,
            budget,
        } => {
            let machines = families::enumerate(p, q, class, budget).map_err(|e| match e {
                families::FamilyError::BudgetExceeded { .. } => Failure::Guard(e.to_string()),
                e => usage(e),
            })?;
            if count {
                say(machines.count().to_string())
            } else {
                for m in machines {
                    say(m.to_json())?;
                }
                Ok(())
            }
        }
        Command::Census {
            p,
            q,
            class,
            cap,
            limit,
            state_cap,
            degree_cap,
            jobs,
            output,
            out,
        } => {
            if out != Format::Csv {
                return Err(usage("census writes CSV only"));
            }
            let config = CensusConfig {
                element_cap: cap,
                round_limit: limit,
                state_cap,
                degree_cap,
            };
            let guard = |e: families::FamilyError| match e {
                families::FamilyError::BudgetExceeded { .. } => Failure::Guard(e.to_string()),
                e => usage(e),
            };
            let summary = match output {
                Some(path) => families::census_to_file(p, q, class, config, jobs, &path).map_err(guard)?,
                None => families::census(
                    p,
                    q,
                    class,
                    config,
                    &Default::default(),
                    true,
                    jobs,
                    io::stdout(),
                )
                .map_err(guard)?,
            };
            eprintln!(
                "machines {} skipped {} finite {} unknown {} errors {}",
                summary.machines, summary.skipped, summary.finite, summary.unknown, summary.errors
            );
            Ok(())
        }
        Command::FreeCheck { input, cap, limit } => {
            let m = load(&input)?;
            let config = CensusConfig {
                element_cap: cap,
                round_limit: limit,
                ..CensusConfig::default()
            };
            say(families::free_candidate_check(&m, &config).map_err(usage)?.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
