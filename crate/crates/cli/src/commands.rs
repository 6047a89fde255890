use std::path::Path;

use twoway_core::format::serialize_monoid;
use twoway_core::{
    behaviors, check_equiv, compose_right_seq_2w, compose_seq_2w, fo_la_to_sf_la, fot_to_fo_lookaround, fot_to_twoway,
    twoway_to_fot, Artifact, BehaviorProfile, Error, FoTransduction, NamedArtifact, Outcome, Result,
    SequentialTransducer, TransitionMonoid, TwoWayTransducer, Verdict,
};

use crate::report;
use crate::{Command, Stage};

/// What to print and whether the answer was positive.
pub struct Reply {
    pub text: String,
    pub positive: bool,
}

fn ok(text: String) -> Reply {
    Reply { text, positive: true }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<Artifact> {
    Ok(NamedArtifact::load(path)?.artifact)
}

fn expect_kind(path: &Path, want: &str, got: &Artifact) -> Error {
    Error::Io(format!("{}: expected a `{want}` artifact, found `{}`", path.display(), got.kind()))
}

fn twoway(path: &Path) -> Result<TwoWayTransducer> {
    match load(path)? {
        Artifact::TwoWay(t) => Ok(t),
        other => Err(expect_kind(path, "twoway", &other)),
    }
}

fn sequential(path: &Path) -> Result<SequentialTransducer> {
    match load(path)? {
        Artifact::Sequential(t) => Ok(t),
        other => Err(expect_kind(path, "sequential", &other)),
    }
}

fn fot(path: &Path) -> Result<FoTransduction> {
    match load(path)? {
        Artifact::Fot(t) => Ok(t),
        other => Err(expect_kind(path, "fot", &other)),
    }
}

/// Prints an artifact or writes it to `output`.
fn produce(artifact: Artifact, output: Option<&Path>, as_json: bool) -> Result<Reply> {
    let text = artifact.serialize();
    let states = match &artifact {
        Artifact::TwoWay(t) => Some(t.num_states()),
        Artifact::Sequential(t) => Some(t.num_states()),
        Artifact::SfLookAround(t) => Some(t.num_states()),
        Artifact::FoLookAround(t) => Some(t.num_states()),
        _ => None,
    };
    if let Some(path) = output {
        std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if as_json {
        let path = output.map(|p| p.display().to_string());
        return Ok(ok(json(&report::Produced { kind: artifact.kind(), states, path, text })));
    }
    Ok(ok(if output.is_some() { String::new() } else { text }))
}

fn pairs(t: &TwoWayTransducer, list: Vec<(u32, u32)>) -> Vec<[String; 2]> {
    list.into_iter().map(|(p, q)| [t.state_name(p).to_string(), t.state_name(q).to_string()]).collect()
}

fn behaviors_report(t: &TwoWayTransducer, input: String, p: &BehaviorProfile) -> report::Behaviors {
    report::Behaviors {
        input,
        ll: pairs(t, p.bh_ll()),
        lr: pairs(t, p.bh_lr()),
        rl: pairs(t, p.bh_rl()),
        rr: pairs(t, p.bh_rr()),
    }
}

fn class_name(m: &TransitionMonoid, e: usize) -> String {
    if e == m.identity() {
        "[ε]".into()
    } else {
        format!("[{}]", m.input().format_word(m.representative(e)))
    }
}

pub fn run(command: &Command, as_json: bool) -> Result<Reply> {
    match command {
        Command::Simulate { file, input, trace } => simulate(&load(file)?, input, *trace, as_json),
        Command::Behaviors { file, input } => {
            let t = twoway(file)?;
            let w = t.input().parse_word(input)?;
            let p = behaviors(&t, &w);
            if as_json {
                return Ok(ok(json(&behaviors_report(&t, t.input().format_word(&w), &p))));
            }
            Ok(ok(format!("{}\n", p.format(t.state_names()))))
        }
        Command::Monoid { file, classes, output } => monoid(&twoway(file)?, classes, output.as_deref(), as_json),
        Command::Aperiodic { file } => aperiodic(&load(file)?, as_json),
        Command::Compose { first, second, right, output } => {
            let a = sequential(first)?;
            let b = twoway(second)?.normalize();
            let c = if *right { compose_right_seq_2w(&a, &b)? } else { compose_seq_2w(&a, &b)?.trim() };
            produce(Artifact::TwoWay(c), output.as_deref(), as_json)
        }
        Command::ToFot { file, output } => produce(Artifact::Fot(twoway_to_fot(&twoway(file)?)?), output.as_deref(), as_json),
        Command::FromFot { file, stage, output } => {
            let t = fot(file)?;
            let artifact = match stage {
                Stage::Fola => Artifact::FoLookAround(fot_to_fo_lookaround(&t)?),
                Stage::Sfla => Artifact::SfLookAround(fo_la_to_sf_la(&fot_to_fo_lookaround(&t)?)?),
                Stage::Twoway => Artifact::TwoWay(fot_to_twoway(&t)?),
            };
            produce(artifact, output.as_deref(), as_json)
        }
        Command::Normalize { file, output } => produce(Artifact::TwoWay(twoway(file)?.normalize()), output.as_deref(), as_json),
        Command::Mirror { file, output } => produce(Artifact::TwoWay(twoway(file)?.mirror()), output.as_deref(), as_json),
        Command::CheckEquiv { left, right, max_len } => {
            let r = check_equiv(&load(left)?, &load(right)?, *max_len)?;
            let positive = r.is_equivalent();
            if !as_json {
                return Ok(Reply { text: format!("{}\n", r.summary()), positive });
            }
            let (verdict, word, l, rr) = match r.verdict {
                Verdict::Equivalent => (format!("equivalent-up-to-{}", r.max_len), None, None, None),
                Verdict::Counterexample { word, left, right } => ("counterexample".to_string(), Some(word), left, right),
            };
            let rep = report::Equivalence { verdict, max_len: r.max_len, words_tested: r.words_tested, word, left: l, right: rr };
            Ok(Reply { text: json(&rep), positive })
        }
        Command::EvalFormula { file, input, assignments } => eval_formula(file, input, assignments, as_json),
    }
}

fn simulate(artifact: &Artifact, input: &str, trace: bool, as_json: bool) -> Result<Reply> {
    let (alphabet, out_alphabet) = artifact.signature()?;
    let w = alphabet.parse_word(input)?;
    let shown = alphabet.format_word(&w);
    let (output, reason, steps, table) = match artifact {
        Artifact::TwoWay(t) => {
            let outcome = t.simulate(&w)?;
            let table = trace.then(|| t.trace_table(&w, outcome.run()));
            let steps = Some(outcome.run().configs.len().saturating_sub(1));
            match outcome {
                Outcome::Accepted { output, .. } => (Some(output), None, steps, table),
                Outcome::Undefined { reason, .. } => (None, Some(reason.as_str()), steps, table),
            }
        }
        other => {
            if trace {
                return Err(Error::Io(format!("--trace needs a two-way transducer, not `{}`", other.kind())));
            }
            let out = other.apply(&w)?;
            let reason = out.is_none().then_some("undefined");
            (out, reason, None, None)
        }
    };
    let output = output.map(|o| out_alphabet.format_word(&o));
    let positive = output.is_some();
    if as_json {
        return Ok(Reply { text: json(&report::Simulation { input: shown, defined: positive, output, reason, steps }), positive });
    }
    let mut text = table.unwrap_or_default();
    match (output, reason) {
        (Some(o), _) => text.push_str(&format!("{o}\n")),
        (None, Some("undefined")) | (None, None) => text.push_str("undefined\n"),
        (None, Some(r)) => text.push_str(&format!("undefined ({r})\n")),
    }
    Ok(Reply { text, positive })
}

fn monoid(t: &TwoWayTransducer, classes: &[String], output: Option<&Path>, as_json: bool) -> Result<Reply> {
    let m = TransitionMonoid::new(t);
    if let Some(path) = output {
        std::fs::write(path, serialize_monoid(&m)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let mut queries = Vec::new();
    for c in classes {
        let w = t.input().parse_word(c)?;
        queries.push(report::ClassQuery { word: t.input().format_word(&w), class: class_name(&m, m.class_of(&w)) });
    }
    if as_json {
        let elements = (0..m.len())
            .map(|e| {
                let p = m.power_data(e);
                let rep = t.input().format_word(m.representative(e));
                report::Element {
                    behaviors: behaviors_report(t, rep.clone(), m.profile(e)),
                    representative: rep,
                    idempotent: m.is_idempotent(e),
                    index: p.index,
                    period: p.period,
                }
            })
            .collect();
        return Ok(ok(json(&report::Monoid { size: m.len(), elements, classes: queries })));
    }
    let mut text = format!("{} elements\n{}", m.len(), m.format());
    for q in queries {
        text.push_str(&format!("{} in {}\n", if q.word.is_empty() { "ε" } else { &q.word }, q.class));
    }
    Ok(ok(text))
}

fn aperiodic(artifact: &Artifact, as_json: bool) -> Result<Reply> {
    let rep = match artifact {
        Artifact::TwoWay(t) => monoid_verdict(&TransitionMonoid::new(t)),
        Artifact::Monoid(m) => monoid_verdict(m),
        Artifact::Dfa(d) => {
            let cf = d.counter_free();
            report::Aperiodic { aperiodic: cf.aperiodic, elements: cf.monoid_size, index: cf.index, witness: None, period: None }
        }
        other => return Err(Error::Io(format!("`{}` artifacts have no transition monoid here", other.kind()))),
    };
    let positive = rep.aperiodic;
    if as_json {
        return Ok(Reply { text: json(&rep), positive });
    }
    let text = match (&rep.index, &rep.witness, &rep.period) {
        (Some(k), _, _) if rep.aperiodic => format!("aperiodic ({} elements, index {k})\n", rep.elements),
        (_, Some(w), Some(p)) => format!("not aperiodic ({} elements, witness {w} with period {p})\n", rep.elements),
        _ => format!("not aperiodic ({} elements)\n", rep.elements),
    };
    Ok(Reply { text, positive })
}

fn monoid_verdict(m: &TransitionMonoid) -> report::Aperiodic {
    let ap = m.is_aperiodic();
    report::Aperiodic {
        aperiodic: ap.aperiodic,
        elements: m.len(),
        index: ap.index,
        witness: ap.witness.map(|e| class_name(m, e)),
        period: ap.witness_period,
    }
}

fn eval_formula(file: &Path, input: &str, assignments: &[String], as_json: bool) -> Result<Reply> {
    let f = match load(file)? {
        Artifact::Formula(f) => f,
        other => return Err(expect_kind(file, "formula", &other)),
    };
    let w = f.alphabet.parse_word(input)?;
    let mut assign: Vec<(&str, usize)> = Vec::new();
    for a in assignments {
        let bad = || Error::Io(format!("bad assignment `{a}`; expected VAR=POSITION"));
        let (v, p) = a.split_once('=').ok_or_else(bad)?;
        assign.push((v.trim(), p.trim().parse().map_err(|_| bad())?));
    }
    if let Some(v) = f.vars.iter().find(|v| !assign.iter().any(|(a, _)| a == v)) {
        return Err(Error::UnboundVariable(v.clone()));
    }
    let value = twoway_core::eval(&f.formula, &w, &assign, &f.registry, f.context)?;
    if as_json {
        return Ok(Reply { text: json(&report::Truth { input: f.alphabet.format_word(&w), value }), positive: value });
    }
    Ok(Reply { text: format!("{value}\n"), positive: value })
}

