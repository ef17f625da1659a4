//! Command-line front end: text formats for patterns and words, one
//! subcommand per decider or generator, JSON on standard output.
//!
//! Exit codes: 0 for a completed run (the decision itself lives in the
//! JSON), 2 for parse errors, 3 for violated preconditions, 4 for exceeded
//! budgets or guards.

pub mod format;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use format::{parse_pattern_file, parse_word_literal, serialize_pattern, FileError};
use relpat::charset::{
    self, classify_incongruous_pair, decide_equiv, decide_inclusion_congruous, DecideOptions,
    Decision, LabeledSample, MethodChoice, PathHint, Verdict,
};
use relpat::classify::ForbiddenShape;
use relpat::member::{member, MembershipWitness, UnifyGuards};
use relpat::nf::normal_form;
use relpat::oracle::{OracleBudget, OracleConfig};
use relpat::pattern::{Alphabet, RelationalPattern, Var, Word};
use relpat::reversal::{
    anti_telltale, anti_telltale_source, morphism_search, properness_witness, signed_form,
};
use relpat::subst::{enumerate_single_group_lz, ContentMode, LengthBound};
use relpat::Error as LibError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "relpat", version, about = "relational pattern language toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print plain text instead of JSON.
    #[arg(long, global = true)]
    pub plain: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Sigma3,
    BinaryP23,
    Slice,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    S2,
    Seps1,
    Seps2,
    Sigma3Witness,
    P23Witness,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a pattern file and echo its structure.
    Parse { file: PathBuf },
    /// Decide membership of a word.
    Member {
        file: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        non_erasing: bool,
        #[arg(long, default_value_t = 12)]
        var_guard: usize,
        #[arg(long, default_value_t = 30)]
        word_guard: usize,
    },
    /// Enumerate single-group bounded-length substitutions for one group.
    Enumerate {
        file: PathBuf,
        /// Any variable of the group to enumerate.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        z: usize,
        #[arg(long)]
        non_erasing: bool,
        /// Draw this many seeded samples instead of exhausting the space.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1048576)]
        cap: u64,
        #[arg(long)]
        no_skeleton: bool,
    },
    /// Equal-length normal form.
    Normalize { file: PathBuf },
    /// Characteristic-sample words for a pattern.
    Charset {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1048576)]
        cap: u64,
    },
    /// Decide equivalence of two pattern languages.
    Equiv {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long)]
        non_erasing: bool,
        #[arg(long, default_value_t = 1048576)]
        cap: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        var_guard: usize,
        #[arg(long, default_value_t = 30)]
        word_guard: usize,
    },
    /// Decide inclusion for congruous binary P_2,3 patterns.
    Include {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 1048576)]
        cap: u64,
    },
    /// Structural classification of a pattern pair.
    Classify { file_a: PathBuf, file_b: PathBuf },
    /// Anti-telltale construction from a finite positive sample.
    AntiTelltale {
        /// Word literals over the alphabet.
        #[arg(required = true)]
        words: Vec<String>,
        /// Per-word decompositions, e.g. "(1,1,1);(2,1,2)".
        #[arg(long)]
        decompositions: Option<String>,
        #[arg(long, default_value_t = 4)]
        properness_bound: usize,
        /// Two alphabet symbols, e.g. "ab".
        #[arg(long, default_value = "ab")]
        alphabet: String,
    },
    /// Search for a reversal-obedient morphism from one terminal-free
    /// pattern onto another.
    Morphism {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 12)]
        var_guard: usize,
        #[arg(long, default_value_t = 30)]
        word_guard: usize,
    },
}

fn exit_code_for(err: &LibError) -> i32 {
    match err {
        LibError::BudgetExceeded { .. }
        | LibError::GroupTooLarge { .. }
        | LibError::InstanceTooLarge(_) => EXIT_BUDGET,
        LibError::PreconditionViolated(_)
        | LibError::WrongKind { .. }
        | LibError::NonBinaryAlphabet
        | LibError::AlphabetTooSmall { .. }
        | LibError::NotP23(_)
        | LibError::NotTerminalFree
        | LibError::NotAMember(_)
        | LibError::InvalidDecomposition
        | LibError::EmptyConstruction
        | LibError::NotReversalFriendly => EXIT_PRECONDITION,
        _ => 1,
    }
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn ok(value: Value, plain: Option<String>, want_plain: bool) -> Outcome {
    let stdout = if want_plain {
        plain.unwrap_or_else(|| value.to_string())
    } else {
        value.to_string()
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn fail(code: i32, message: String) -> Outcome {
    Outcome {
        code,
        stdout: String::new(),
        stderr: message,
    }
}

fn load(path: &PathBuf) -> Result<RelationalPattern, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    parse_pattern_file(&text).map_err(|e| fail(EXIT_PARSE, e.to_string()))
}

fn word_arg(alphabet: &Alphabet, text: &str) -> Result<Word, Outcome> {
    parse_word_literal(alphabet, text).map_err(|e: FileError| fail(EXIT_PARSE, e.to_string()))
}

fn lib(result: relpat::Result<Value>, plain: Option<String>, want_plain: bool) -> Outcome {
    match result {
        Ok(v) => ok(v, plain, want_plain),
        Err(e) => fail(exit_code_for(&e), e.to_string()),
    }
}

fn words_json(sample: &LabeledSample) -> Value {
    Value::Array(
        sample
            .positives()
            .map(|w| Value::String(w.to_string()))
            .collect(),
    )
}

fn witness_json(witness: &MembershipWitness) -> Value {
    match witness {
        MembershipWitness::Len {
            anchoring,
            coefficients,
        } => {
            json!({
                "anchoring": anchoring.positions,
                "gaps": anchoring.gaps,
                "coefficients": coefficients.coefficients,
            })
        }
        MembershipWitness::Unify { substitution } => {
            let map: BTreeMap<String, String> = substitution
                .iter()
                .map(|(v, w)| (v.name().to_string(), w.to_string()))
                .collect();
            json!({ "substitution": map })
        }
    }
}

fn verdict_json(v: &Verdict) -> Value {
    let mut out = json!({
        "decision": v.decision.to_string(),
        "method": v.method.to_string(),
        "bounded": v.bounded,
    });
    if let Some(w) = &v.witness {
        out["witness"] = Value::String(w.to_string());
    }
    out
}

fn pattern_json(rp: &RelationalPattern) -> Value {
    json!({
        "alphabet": rp.alphabet().symbols().iter().collect::<String>(),
        "relation": rp.kind().to_string(),
        "pattern": rp.pattern().to_string(),
        "pairs": rp
            .relation()
            .pairs()
            .map(|(x, y)| vec![x.name().to_string(), y.name().to_string()])
            .collect::<Vec<_>>(),
        "groups": rp
            .groups()
            .groups()
            .iter()
            .map(|g| g.members().iter().map(|v| v.name().to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn parse_decompositions(text: &str) -> Result<Vec<(usize, usize, usize)>, Outcome> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let inner = part
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| {
                fail(
                    EXIT_PARSE,
                    format!("decomposition {part:?} must look like (a,b,c)"),
                )
            })?;
        let nums: Vec<usize> = inner
            .split(',')
            .map(|n| n.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| fail(EXIT_PARSE, format!("bad decomposition {part:?}: {e}")))?;
        if nums.len() != 3 {
            return Err(fail(
                EXIT_PARSE,
                format!("decomposition {part:?} needs three components"),
            ));
        }
        out.push((nums[0], nums[1], nums[2]));
    }
    Ok(out)
}

pub fn run(cli: Cli) -> Outcome {
    let plain = cli.plain;
    match cli.command {
        Command::Parse { file } => {
            let rp = match load(&file) {
                Ok(rp) => rp,
                Err(out) => return out,
            };
            let text = serialize_pattern(&rp);
            ok(pattern_json(&rp), Some(text), plain)
        }
        Command::Member {
            file,
            word,
            non_erasing,
            var_guard,
            word_guard,
        } => {
            let rp = match load(&file) {
                Ok(rp) => rp,
                Err(out) => return out,
            };
            let w = match word_arg(rp.alphabet(), &word) {
                Ok(w) => w,
                Err(out) => return out,
            };
            let guards = UnifyGuards {
                max_vars: var_guard,
                max_word_len: word_guard,
            };
            lib(
                member(&w, &rp, !non_erasing, &guards).map(|found| match found {
                    Some(witness) => json!({
                        "member": true,
                        "witness": witness_json(&witness),
                    }),
                    None => json!({ "member": false }),
                }),
                None,
                plain,
            )
        }
        Command::Enumerate {
            file,
            group,
            z,
            non_erasing,
            sample,
            seed,
            cap,
            no_skeleton,
        } => {
            let rp = match load(&file) {
                Ok(rp) => rp,
                Err(out) => return out,
            };
            let Some(gid) = rp.groups().group_of(&Var::new(group.as_str())) else {
                return fail(
                    EXIT_PRECONDITION,
                    format!("variable {group:?} does not occur in the pattern"),
                );
            };
            let content = match sample {
                Some(count) => ContentMode::Sampled { count, seed },
                None => ContentMode::All,
            };
            let bound = LengthBound {
                z,
                erasing: !non_erasing,
            };
            lib(
                enumerate_single_group_lz(&rp, gid, bound, content, !no_skeleton, cap).map(
                    |items| {
                        let words: Vec<String> =
                            items.iter().map(|(_, w)| w.to_string()).collect();
                        json!({ "words": words, "generator": "lz" })
                    },
                ),
                None,
                plain,
            )
        }
        Command::Normalize { file } => {
            let rp = match load(&file) {
                Ok(rp) => rp,
                Err(out) => return out,
            };
            lib(
                normal_form(&rp).map(|nf| {
                    let removed: Vec<Value> = nf
                        .removed
                        .iter()
                        .map(|r| {
                            let combination: BTreeMap<String, u64> = r
                                .combination
                                .iter()
                                .map(|(v, c)| (v.name().to_string(), *c))
                                .collect();
                            json!({
                                "members": r.members.iter().map(|v| v.name().to_string()).collect::<Vec<_>>(),
                                "combination": combination,
                            })
                        })
                        .collect();
                    let mut out = pattern_json(&nf.pattern);
                    out["removed_groups"] = Value::Array(removed);
                    out
                }),
                None,
                plain,
            )
        }
        Command::Charset {
            file,
            mode,
            sample,
            seed,
            cap,
        } => {
            let rp = match load(&file) {
                Ok(rp) => rp,
                Err(out) => return out,
            };
            let content = match sample {
                Some(count) => ContentMode::Sampled { count, seed },
                None => ContentMode::All,
            };
            let (result, generator) = match mode {
                ModeArg::S2 => (charset::gen_s2_nonerasing(&rp, content, cap), "s2"),
                ModeArg::Seps1 => (charset::gen_seps(&rp, 1, content, true, cap), "seps1"),
                ModeArg::Seps2 => (charset::gen_seps(&rp, 2, content, true, cap), "seps2"),
                ModeArg::Sigma3Witness => (charset::witness_set_sigma3(&rp), "sigma3-witness"),
                ModeArg::P23Witness => {
                    (charset::witness_set_binary_congruous(&rp), "p23-witness")
                }
            };
            lib(
                result.map(|s| json!({ "words": words_json(&s), "generator": generator })),
                None,
                plain,
            )
        }
        Command::Equiv {
            file_a,
            file_b,
            method,
            max_len,
            non_erasing,
            cap,
            seed,
            var_guard,
            word_guard,
        } => {
            let (a, b) = match (load(&file_a), load(&file_b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(out), _) | (_, Err(out)) => return out,
            };
            let choice = match method {
                MethodArg::Auto => MethodChoice::Auto,
                MethodArg::Sigma3 => MethodChoice::Sigma3,
                MethodArg::BinaryP23 => MethodChoice::BinaryP23,
                MethodArg::Slice => MethodChoice::Slice,
            };
            let opts = DecideOptions {
                erasing: !non_erasing,
                slice_len: max_len,
                cap,
                sample_seed: seed,
                oracle: OracleConfig {
                    budget: OracleBudget::default(),
                    guards: UnifyGuards {
                        max_vars: var_guard,
                        max_word_len: word_guard,
                    },
                },
                ..DecideOptions::default()
            };
            lib(
                decide_equiv(&a, &b, choice, &opts).map(|v| verdict_json(&v)),
                None,
                plain,
            )
        }
        Command::Include { file_a, file_b, cap } => {
            let (a, b) = match (load(&file_a), load(&file_b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(out), _) | (_, Err(out)) => return out,
            };
            let opts = DecideOptions {
                cap,
                ..DecideOptions::default()
            };
            lib(
                decide_inclusion_congruous(&a, &b, &opts).map(|v| verdict_json(&v)),
                None,
                plain,
            )
        }
        Command::Classify { file_a, file_b } => {
            let (a, b) = match (load(&file_a), load(&file_b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(out), _) | (_, Err(out)) => return out,
            };
            let forbidden_json = |blocks: &[relpat::classify::ForbiddenBlock]| -> Value {
                Value::Array(
                    blocks
                        .iter()
                        .map(|f| {
                            json!({
                                "index": f.index,
                                "block": f.block.to_string(),
                                "shape": match f.shape {
                                    ForbiddenShape::RunThenSingle => "run-then-single",
                                    ForbiddenShape::SingleThenRun => "single-then-run",
                                },
                            })
                        })
                        .collect(),
                )
            };
            lib(
                classify_incongruous_pair(&a, &b).map(|report| {
                    let conj = |p: &Option<relpat::classify::TelltaleConjugatePair>| match p {
                        Some(pair) => json!({
                            "pi": pair.pi.to_string(),
                            "pi_prime": pair.pi_prime.to_string(),
                            "sigma": pair.sigma.to_string(),
                            "sigma_runs": pair.sigma_runs,
                            "sigma_bar_runs": pair.sigma_bar_runs,
                        }),
                        None => Value::Null,
                    };
                    json!({
                        "congruous": report.congruous,
                        "forbidden_in_a": forbidden_json(&report.forbidden_in_a),
                        "forbidden_in_b": forbidden_json(&report.forbidden_in_b),
                        "conjugates_a_b": conj(&report.conjugates_a_b),
                        "conjugates_b_a": conj(&report.conjugates_b_a),
                        "incongruous_test_applicable": report.incongruous_test_applicable,
                        "hint": match report.hint {
                            PathHint::CongruousTheorem => "congruous-theorem",
                            PathHint::IncongruousSampleTest => "incongruous-sample-test",
                            PathHint::SliceFallback => "slice-fallback",
                        },
                    })
                }),
                None,
                plain,
            )
        }
        Command::AntiTelltale {
            words,
            decompositions,
            properness_bound,
            alphabet,
        } => {
            let alphabet = match Alphabet::new(alphabet.chars()) {
                Ok(a) => a,
                Err(e) => return fail(EXIT_PARSE, e.to_string()),
            };
            let mut parsed_words = Vec::new();
            for w in &words {
                match word_arg(&alphabet, w) {
                    Ok(w) => parsed_words.push(w),
                    Err(out) => return out,
                }
            }
            let decos = match &decompositions {
                Some(text) => match parse_decompositions(text) {
                    Ok(d) => Some(d),
                    Err(out) => return out,
                },
                None => None,
            };
            lib(
                anti_telltale(&alphabet, &parsed_words, decos.as_deref()).and_then(|at| {
                    let witnesses: Vec<Value> = parsed_words
                        .iter()
                        .zip(&at.witnesses)
                        .map(|(w, subst)| {
                            let map: BTreeMap<String, String> = subst
                                .iter()
                                .filter(|(_, image)| !image.is_empty())
                                .map(|(v, image)| (v.name().to_string(), image.to_string()))
                                .collect();
                            json!({ "word": w.to_string(), "substitution": map })
                        })
                        .collect();
                    let morphism: BTreeMap<String, String> = at
                        .morphism
                        .images()
                        .map(|(base, image)| {
                            let shown = image
                                .iter()
                                .map(|sv| sv.to_string())
                                .collect::<Vec<_>>()
                                .join(" ");
                            (base.name().to_string(), shown)
                        })
                        .collect();
                    let source = anti_telltale_source(&alphabet);
                    let properness =
                        properness_witness(&source, &at.expanded.pattern, properness_bound)?;
                    let mut out = json!({
                        "pattern": at.expanded.pattern.pattern().to_string(),
                        "pairs": at.expanded.pattern
                            .relation()
                            .pairs()
                            .map(|(x, y)| vec![x.name().to_string(), y.name().to_string()])
                            .collect::<Vec<_>>(),
                        "witnesses": witnesses,
                        "morphism": morphism,
                    });
                    if let Some(w) = properness {
                        out["properness_witness"] = Value::String(w.to_string());
                    }
                    Ok(out)
                }),
                None,
                plain,
            )
        }
        Command::Morphism {
            source,
            target,
            var_guard,
            word_guard,
        } => {
            let (src, tgt) = match (load(&source), load(&target)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(out), _) | (_, Err(out)) => return out,
            };
            let guards = UnifyGuards {
                max_vars: var_guard,
                max_word_len: word_guard,
            };
            lib(
                (|| {
                    let src_signed = signed_form(&src)?;
                    let tgt_signed = signed_form(&tgt)?;
                    let found = morphism_search(&src_signed, &tgt_signed, &guards)?;
                    Ok(match found {
                        Some(m) => {
                            let images: BTreeMap<String, Vec<String>> = m
                                .images()
                                .map(|(base, image)| {
                                    (
                                        base.name().to_string(),
                                        image.iter().map(|sv| sv.to_string()).collect(),
                                    )
                                })
                                .collect();
                            json!({ "found": true, "images": images })
                        }
                        None => json!({ "found": false }),
                    })
                })(),
                None,
                plain,
            )
        }
    }
}

// Equivalence decisions never surface as process failures; a refuted pair
// still exits 0 with the decision in the JSON.
pub fn is_data_decision(d: Decision) -> bool {
    matches!(
        d,
        Decision::Equivalent | Decision::InclusionHolds | Decision::Refuted | Decision::Inapplicable
    )
}
