//! The encoded library: lists, types with integer, iteration, insertion
//! sort and map, with encoders and decoders between host values and terms.
//!
//! Two copies of the library are bundled. `stdlib.typed.slc` carries
//! ascriptions and type markers and is what the checker sees; `stdlib.slc`
//! is its marker-free image and is what the reduction engine runs.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::{alpha_eq, free_vars};
use crate::calculus::subst::fresh_name;
use crate::metrics::Certificate;
use crate::reduction::{normalize, NormalizeOptions, ReductionError, Trace};
use crate::syntax::{erase_markers, parse, to_engine, Definition, Name, SourceModule, Term};

pub const TYPED_SOURCE: &str = include_str!("../stdlib/stdlib.typed.slc");
pub const SOURCE: &str = include_str!("../stdlib/stdlib.slc");

/// The annotated library, ready for the type checker.
pub fn typed_stdlib() -> &'static SourceModule {
    static TYPED: OnceLock<SourceModule> = OnceLock::new();
    TYPED.get_or_init(|| parse(TYPED_SOURCE).expect("bundled typed stdlib parses"))
}

/// The bare library, ready for the reduction engine.
pub fn stdlib_env() -> &'static SourceModule {
    static BARE: OnceLock<SourceModule> = OnceLock::new();
    BARE.get_or_init(|| parse(SOURCE).expect("bundled stdlib parses"))
}

/// Drop ascriptions and erase markers in every definition.
pub fn bare_module(m: &SourceModule) -> SourceModule {
    SourceModule {
        defs: m
            .defs
            .iter()
            .map(|d| Definition { ascription: None, body: erase_markers(&d.body), ..d.clone() })
            .collect(),
    }
}

/// The three-letter alphabet the demos sort, ordered `C0 < C1 < C2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Alphabet3 {
    C0,
    C1,
    C2,
}

impl Alphabet3 {
    pub const ALL: [Alphabet3; 3] = [Alphabet3::C0, Alphabet3::C1, Alphabet3::C2];

    pub fn to_term(self) -> Term {
        match self {
            Alphabet3::C0 => Term::inl(Term::Unit),
            Alphabet3::C1 => Term::inr(Term::inl(Term::Unit)),
            Alphabet3::C2 => Term::inr(Term::inr(Term::Unit)),
        }
    }

    pub fn from_term(t: &Term) -> Option<Alphabet3> {
        match t {
            Term::Inl(u) if **u == Term::Unit => Some(Alphabet3::C0),
            Term::Inr(u) => match &**u {
                Term::Inl(v) if **v == Term::Unit => Some(Alphabet3::C1),
                Term::Inr(v) if **v == Term::Unit => Some(Alphabet3::C2),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn digit(self) -> u8 {
        self as u8
    }

    pub fn from_digit(d: u8) -> Option<Alphabet3> {
        Alphabet3::ALL.get(d as usize).copied()
    }

    /// Cyclic successor: c0 to c1, c1 to c2, c2 to c0.
    pub fn succ(self) -> Alphabet3 {
        Alphabet3::ALL[(self as usize + 1) % 3]
    }
}

impl fmt::Display for Alphabet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digit())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StdlibError {
    #[error("not a list value: {0}")]
    NotAListValue(String),
    #[error("not a counted value: {0}")]
    NotACountedValue(String),
    #[error("slack {slack} is smaller than the list length {len}")]
    SlackTooSmall { slack: u64, len: usize },
    #[error(transparent)]
    Reduction(#[from] Box<ReductionError>),
}

impl From<ReductionError> for StdlibError {
    fn from(e: ReductionError) -> Self {
        StdlibError::Reduction(Box::new(e))
    }
}

/// `\s.\x. let s be !s' in (s' (s' ... x))` with `n` occurrences of `s'`.
pub fn numeral(n: u64) -> Term {
    Term::abs("s", Term::abs("x", Term::let_bang(Term::var("s"), "s'", iterate("s'", n, Term::var("x")))))
}

fn iterate(f: &str, n: u64, base: Term) -> Term {
    (0..n).fold(base, |acc, _| Term::app(Term::var(f), acc))
}

/// `ε` and `cons` applied to the elements in order, in normal form:
/// `[c1, c0]` becomes `inr(<c1, inr(<c0, inl(())>)>)`.
pub fn encode_list(xs: &[Term]) -> Term {
    xs.iter()
        .rev()
        .fold(Term::inl(Term::Unit), |rest, x| Term::inr(Term::pair(x.clone(), rest)))
}

pub fn encode_symbols(xs: &[Alphabet3]) -> Term {
    encode_list(&xs.iter().map(|x| x.to_term()).collect::<Vec<_>>())
}

pub fn decode_list(t: &Term) -> Result<Vec<Term>, StdlibError> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Inl(u) if **u == Term::Unit => return Ok(out),
            Term::Inr(u) => match &**u {
                Term::Pair(a, rest) => {
                    out.push((**a).clone());
                    cur = rest;
                }
                _ => return Err(StdlibError::NotAListValue(crate::syntax::print(t))),
            },
            _ => return Err(StdlibError::NotAListValue(crate::syntax::print(t))),
        }
    }
}

pub fn decode_symbols(t: &Term) -> Result<Vec<Alphabet3>, StdlibError> {
    decode_list(t)?
        .iter()
        .map(|x| Alphabet3::from_term(x).ok_or_else(|| StdlibError::NotAListValue(crate::syntax::print(t))))
        .collect()
}

/// `n[a] = \s.\x. <a, let s be !s' in (s' ... x)>`.
pub fn encode_counted(n: u64, payload: Term) -> Term {
    let count = Term::let_bang(Term::var("s"), "s'", iterate("s'", n, Term::var("x")));
    let avoid = free_vars(&payload);
    let (s, x) = (Name::new("s"), Name::new("x"));
    if avoid.contains(&s) || avoid.contains(&x) {
        // Rename the binders away from the payload's free variables.
        let s2 = fresh_name(&s, &avoid);
        let x2 = fresh_name(&x, &avoid);
        let count = Term::let_bang(Term::var(s2.as_str()), "s'", iterate("s'", n, Term::var(x2.as_str())));
        return Term::abs(s2.as_str(), Term::abs(x2.as_str(), Term::pair(payload, count)));
    }
    Term::abs("s", Term::abs("x", Term::pair(payload, count)))
}

/// Apply `t` to `!c` and `z` for fresh `c` and `z`, normalize, and read
/// the shape `<a, (c (c ... z))>`. Returns the count and the payload.
pub fn decode_counted(t: &Term) -> Result<(u64, Term), StdlibError> {
    Ok(decode_counted_traced(t, &NormalizeOptions::default())?.0)
}

/// [`decode_counted`] that also returns the trace of the probe reduction.
pub fn decode_counted_traced(
    t: &Term,
    opts: &NormalizeOptions,
) -> Result<((u64, Term), Trace), StdlibError> {
    let avoid = free_vars(t);
    let c = fresh_name(&Name::new("c"), &avoid);
    let z = fresh_name(&Name::new("z"), &avoid);
    let probe = Term::apps(t.clone(), [Term::bang(Term::var(c.as_str())), Term::var(z.as_str())]);
    let trace = normalize(&probe, opts)?;
    let not_counted = || StdlibError::NotACountedValue(crate::syntax::print(t));
    let Term::Pair(a, r) = &trace.final_term else {
        return Err(not_counted());
    };
    let mut n = 0;
    let mut cur = &**r;
    loop {
        match cur {
            Term::Var(v) if *v == z => break,
            Term::App(f, arg) if matches!(&**f, Term::Var(v) if *v == c) => {
                n += 1;
                cur = arg;
            }
            _ => return Err(not_counted()),
        }
    }
    if free_vars(a).contains(&c) || free_vars(a).contains(&z) {
        return Err(not_counted());
    }
    let payload = (**a).clone();
    Ok(((n, payload), trace))
}

/// A bundled definition, inlined and erased, ready for the engine.
pub fn engine_def(name: &str) -> Option<Term> {
    stdlib_env().resolve(name).map(|t| to_engine(&t))
}

/// Resolve references to library definitions in `t` and erase markers.
pub fn link(t: &Term) -> Term {
    to_engine(&stdlib_env().inline_into(t))
}

/// The function mapped by the `map` demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFn {
    Id,
    Succ,
}

impl MapFn {
    pub fn apply(self, x: Alphabet3) -> Alphabet3 {
        match self {
            MapFn::Id => x,
            MapFn::Succ => x.succ(),
        }
    }

    /// The banged function term handed to `map`.
    pub fn term(self) -> Term {
        let body = match self {
            MapFn::Id => Term::var("y"),
            MapFn::Succ => Term::case(
                Term::var("y"),
                "u",
                Alphabet3::C1.to_term(),
                "v",
                Term::case(Term::var("v"), "w", Alphabet3::C2.to_term(), "w'", Alphabet3::C0.to_term()),
            ),
        };
        Term::bang(Term::abs("y", body))
    }
}

impl std::str::FromStr for MapFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "id" => Ok(MapFn::Id),
            "succ" => Ok(MapFn::Succ),
            other => Err(format!("unknown function `{other}` (expected id or succ)")),
        }
    }
}

/// Result of running a demo program.
#[derive(Debug, Clone)]
pub struct DemoRun {
    pub input: Vec<Alphabet3>,
    pub output: Vec<Alphabet3>,
    /// The integer carried by the result; equals the slack.
    pub counter: u64,
    /// The closed program term that was normalized (after probing).
    pub program: Term,
    pub trace: Trace,
}

impl DemoRun {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    pub fn certificate(&self) -> &Certificate {
        &self.trace.certificate
    }
}

fn counted_list(xs: &[Alphabet3], slack: u64) -> Result<Term, StdlibError> {
    if (slack as u128) < xs.len() as u128 {
        return Err(StdlibError::SlackTooSmall { slack, len: xs.len() });
    }
    Ok(encode_counted(slack, encode_symbols(xs)))
}

fn run(xs: &[Alphabet3], program: Term, opts: &NormalizeOptions) -> Result<DemoRun, StdlibError> {
    let ((counter, payload), trace) = decode_counted_traced(&program, opts)?;
    Ok(DemoRun {
        input: xs.to_vec(),
        output: decode_symbols(&payload)?,
        counter,
        program: trace.initial.clone(),
        trace,
    })
}

/// `sort !(n[l])`, normalized and decoded.
pub fn run_sort(xs: &[Alphabet3], slack: u64) -> Result<Vec<Alphabet3>, StdlibError> {
    Ok(run_sort_with(xs, slack, &NormalizeOptions::default())?.output)
}

pub fn run_sort_with(xs: &[Alphabet3], slack: u64, opts: &NormalizeOptions) -> Result<DemoRun, StdlibError> {
    let input = counted_list(xs, slack)?;
    let sort = engine_def("sort").expect("sort is bundled");
    run(xs, Term::app(sort, Term::bang(input)), opts)
}

/// `map !f (n[l])`, normalized and decoded. The result lists `f` of the
/// elements in reverse order.
pub fn run_map(f: MapFn, xs: &[Alphabet3], slack: u64) -> Result<Vec<Alphabet3>, StdlibError> {
    Ok(run_map_with(f, xs, slack, &NormalizeOptions::default())?.output)
}

pub fn run_map_with(
    f: MapFn,
    xs: &[Alphabet3],
    slack: u64,
    opts: &NormalizeOptions,
) -> Result<DemoRun, StdlibError> {
    let input = counted_list(xs, slack)?;
    let map = engine_def("map").expect("map is bundled");
    run(xs, Term::apps(map, [f.term(), input]), opts)
}

/// Whether `t` normalizes to a term alpha-equivalent to `expected`.
pub fn normalizes_to(t: &Term, expected: &Term) -> Result<bool, StdlibError> {
    let trace = normalize(t, &NormalizeOptions::default())?;
    Ok(alpha_eq(&trace.final_term, expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::analyze;
    use crate::syntax::{parse_formula, parse_term, print_module};
    use crate::types::{check_module, Outcome};
    use Alphabet3::*;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn norm(t: &Term) -> Term {
        normalize(t, &NormalizeOptions::default()).unwrap().final_term
    }

    #[test]
    fn bare_file_is_the_erasure_of_the_typed_file() {
        assert_eq!(stdlib_env().defs.len(), typed_stdlib().defs.len());
        for (a, b) in stdlib_env().defs.iter().zip(&bare_module(typed_stdlib()).defs) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.body, b.body, "definition {}", a.name);
            assert!(a.ascription.is_none());
        }
    }

    #[test]
    fn bare_file_matches_printer_output() {
        let printed = print_module(&bare_module(typed_stdlib()));
        let body: String = SOURCE.lines().filter(|l| !l.starts_with("--")).collect::<Vec<_>>().join("\n");
        assert_eq!(body.trim(), printed.trim());
    }

    #[test]
    fn every_ascription_typechecks() {
        let report = check_module(typed_stdlib());
        for (name, outcome) in &report.entries {
            assert!(matches!(outcome, Outcome::Typed(_)), "{name}: {outcome:?}");
        }
    }

    #[test]
    fn ascriptions_are_the_stated_formulas() {
        let la = "(mu X. 1 + (A * X))";
        let nl = format!("(forall a. !(a -o a) -o a -o ({la} * a))");
        let nl3 = "(forall a. !(a -o a) -o a -o ((mu X. 1 + ((1 + (1 + 1)) * X)) * a))";
        let lc = "(mu X. 1 + (C * X))";
        let expected = [
            ("tail", format!("{la} -o {la}")),
            ("extractd", "(forall a. !(a -o a) -o a -o (A * a)) -o A".to_string()),
            ("build", "(forall a. !(a -o a) -o a -o a) * A -o (forall a. !(a -o a) -o a -o (A * a))".into()),
            ("erase", format!("{nl} -o {nl}")),
            ("Iter", format!("forall a. !(a -o a) -o a -o {nl} -o ({la} * a)")),
            ("insert", format!("{nl3} -o (1 + (1 + 1)) -o {nl3}")),
            ("sort", format!("!{nl3} -o {nl3}")),
            ("It", format!("forall a. !(a -o a) -o ({la} -o a) -o {nl} -o a")),
            ("map", format!("!(A -o C) -o {nl} -o (forall a. !(a -o a) -o a -o ({lc} * a))")),
        ];
        for (name, f) in expected {
            let got = typed_stdlib().get(name).unwrap().ascription.clone().unwrap();
            assert!(got.alpha_eq(&parse_formula(&f).unwrap()), "{name}");
        }
    }

    #[test]
    fn every_definition_is_well_formed() {
        for d in &stdlib_env().defs {
            let t = engine_def(d.name.as_str()).unwrap();
            let info = analyze(&t).unwrap();
            assert!(info.is_well_formed, "{}: {:?}", d.name, info.failure_witness);
        }
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral(0), p(r"\s.\x. let s be !s' in x"));
        assert_eq!(numeral(2), p(r"\s.\x. let s be !s' in (s' (s' x))"));
        let applied = Term::apps(numeral(2), [p("!g"), p("z")]);
        let tr = normalize(&applied, &Default::default()).unwrap();
        assert_eq!(tr.final_term, p("(g (g z))"));
        assert_eq!(tr.len(), 3);
    }

    #[test]
    fn typed_two_is_numeral_two() {
        assert!(alpha_eq(&engine_def("two").unwrap(), &numeral(2)));
    }

    #[test]
    fn lists_round_trip() {
        assert_eq!(encode_symbols(&[]), p("inl(())"));
        assert_eq!(encode_symbols(&[C1, C0]), p("inr(<inr(inl(())), inr(<inl(()), inl(())>)>)"));
        for xs in [vec![], vec![C2], vec![C0, C1, C2, C2]] {
            assert_eq!(decode_symbols(&encode_symbols(&xs)).unwrap(), xs);
        }
        assert!(matches!(decode_list(&p(r"\x.x")), Err(StdlibError::NotAListValue(_))));
    }

    #[test]
    fn cons_builds_the_encoding() {
        let t = link(&p(&format!("(cons (cons eps {}) {})", crate::syntax::print(&C0.to_term()), crate::syntax::print(&C1.to_term()))));
        assert_eq!(norm(&t), encode_symbols(&[C1, C0]));
    }

    #[test]
    fn counted_values() {
        assert_eq!(encode_counted(0, p("inl(())")), p(r"\s.\x. <inl(()), let s be !s' in x>"));
        assert_eq!(decode_counted(&encode_counted(3, p("inl(())"))).unwrap(), (3, p("inl(())")));
        assert!(matches!(decode_counted(&numeral(2)), Err(StdlibError::NotACountedValue(_))));
        let captured = encode_counted(2, p("(s x)"));
        assert_eq!(decode_counted(&captured).unwrap(), (2, p("(s x)")));
    }

    #[test]
    fn head_and_tail() {
        let c1 = crate::syntax::print(&C1.to_term());
        let c2 = crate::syntax::print(&C2.to_term());
        assert_eq!(norm(&link(&p(&format!("(tail (cons eps {c1}))")))), encode_symbols(&[]));
        assert_eq!(norm(&link(&p(&format!("(head (cons eps {c2}))")))), C2.to_term());
        assert_eq!(norm(&link(&p("(head eps)"))), C0.to_term());
    }

    #[test]
    fn comp_orders_every_pair() {
        for a in Alphabet3::ALL {
            for b in Alphabet3::ALL {
                let t = Term::app(engine_def("comp").unwrap(), Term::pair(a.to_term(), b.to_term()));
                assert_eq!(norm(&t), Term::pair(a.min(b).to_term(), a.max(b).to_term()));
            }
        }
    }

    fn apply(def: &str, args: Vec<Term>) -> Term {
        Term::apps(engine_def(def).unwrap(), args)
    }

    #[test]
    fn integer_extraction() {
        let a = C2.to_term();
        for n in 0..4 {
            let v = encode_counted(n, a.clone());
            assert!(alpha_eq(&norm(&apply("extractint", vec![v.clone()])), &numeral(n)));
            assert_eq!(norm(&apply("extractd", vec![v])), a);
            let built = apply("build", vec![Term::pair(numeral(n), a.clone())]);
            assert_eq!(decode_counted(&built).unwrap(), (n, a.clone()));
        }
    }

    #[test]
    fn erase_and_reconstr() {
        let l = encode_symbols(&[C1]);
        let v = encode_counted(3, l.clone());
        assert_eq!(decode_counted(&apply("erase", vec![v.clone()])).unwrap(), (3, encode_symbols(&[])));
        assert_eq!(decode_counted(&apply("reconstr", vec![v])).unwrap(), (3, l));
    }

    #[test]
    fn primed_list_operations() {
        let v = encode_counted(3, encode_symbols(&[C2, C0]));
        assert_eq!(decode_counted(&apply("tail'", vec![v.clone()])).unwrap(), (3, encode_symbols(&[C0])));
        assert_eq!(norm(&apply("head'", vec![v.clone()])), C2.to_term());
        let consed = apply("cons'", vec![v, C1.to_term()]);
        assert_eq!(decode_counted(&consed).unwrap(), (3, encode_symbols(&[C1, C2, C0])));
    }

    #[test]
    fn nmap_absorb_out() {
        let v = encode_counted(2, C0.to_term());
        let succ = MapFn::Succ.term();
        let Term::Bang(f) = succ else { unreachable!() };
        assert_eq!(decode_counted(&apply("nmap", vec![(*f).clone(), v.clone()])).unwrap(), (2, C1.to_term()));
        let absorbed = apply("absorb", vec![Term::pair(v.clone(), C2.to_term())]);
        assert_eq!(decode_counted(&absorbed).unwrap(), (2, Term::pair(C0.to_term(), C2.to_term())));
        let fv = encode_counted(1, (*f).clone());
        assert_eq!(decode_counted(&apply("out", vec![fv, C2.to_term()])).unwrap(), (1, C0.to_term()));
    }

    #[test]
    fn iter_repeats_the_step() {
        let l = encode_symbols(&[C1, C0]);
        for n in 0..4 {
            let f = p(r"let y be !x in !F");
            let t = apply("Iter", vec![f, p("e"), encode_counted(n, l.clone())]);
            let inner = (0..n).fold(p("e"), |acc, _| Term::app(p("F"), acc));
            let expected = Term::pair(l.clone(), Term::let_bang(p("y"), "x", inner));
            assert!(alpha_eq(&norm(&t), &expected), "n = {n}: {}", crate::syntax::print(&norm(&t)));
        }
    }

    #[test]
    fn it_applies_the_step_to_the_instantiated_base() {
        let l = encode_symbols(&[C2]);
        for n in 0..3 {
            let t = apply("It", vec![p(r"let y be !x in !F"), p(r"\l0. (e l0)"), encode_counted(n, l.clone())]);
            let inner = (0..n).fold(Term::app(p("e"), l.clone()), |acc, _| Term::app(p("F"), acc));
            let expected = Term::let_bang(p("y"), "x", inner);
            assert!(alpha_eq(&norm(&t), &expected), "n = {n}: {}", crate::syntax::print(&norm(&t)));
        }
    }

    #[test]
    fn insert_places_the_element() {
        let v = encode_counted(3, encode_symbols(&[C0, C2]));
        let t = apply("insert", vec![v, C1.to_term()]);
        assert_eq!(decode_counted(&t).unwrap(), (3, encode_symbols(&[C0, C1, C2])));
    }

    #[test]
    fn sort_examples() {
        assert_eq!(run_sort(&[C2, C0, C1], 3).unwrap(), vec![C0, C1, C2]);
        assert_eq!(run_sort(&[], 0).unwrap(), vec![]);
        assert_eq!(run_sort(&[C1, C1, C0], 5).unwrap(), vec![C0, C1, C1]);
        assert!(matches!(run_sort(&[C1], 0), Err(StdlibError::SlackTooSmall { .. })));
    }

    #[test]
    fn sort_keeps_the_counter() {
        let run = run_sort_with(&[C1, C0], 4, &NormalizeOptions::default()).unwrap();
        assert_eq!(run.counter, 4);
        assert!(run.trace.within_bound());
    }

    #[test]
    fn map_examples() {
        assert_eq!(run_map(MapFn::Id, &[C0, C1], 2).unwrap(), vec![C1, C0]);
        assert_eq!(run_map(MapFn::Succ, &[], 0).unwrap(), vec![]);
        assert_eq!(run_map(MapFn::Succ, &[C0, C2], 2).unwrap(), vec![C0, C1]);
    }
}
