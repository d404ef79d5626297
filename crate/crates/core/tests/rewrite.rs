mod common;

use leibniz::number::Rational;
use leibniz::rewrite::{normalize, replace_at, NormalizeError, RuleRef};
use leibniz::syntax::render_term;
use leibniz::term::{Fixity, Term};
use leibniz::{Context, ErrorKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn context_from(src: &str, name: &str) -> Context {
    let doc = common::load_with(&[("t.lzd", src)], "t.lzd").unwrap();
    doc.context(name).unwrap().clone()
}

fn numbers() -> &'static Context {
    leibniz::builtins::context("numbers").unwrap()
}

fn replay(t: &Term, ctx: &Context, trace: &leibniz::rewrite::Trace) -> Term {
    let mut cur = t.clone();
    for step in &trace.steps {
        assert_eq!(cur.subterm(&step.path), Some(&step.before), "step {step}");
        cur = replace_at(&ctx.graph, &ctx.signature, &cur, &step.path, step.after.clone()).unwrap();
    }
    cur
}

#[test]
fn boolean_example_takes_two_innermost_steps() {
    let ctx = leibniz::builtins::context("boolean").unwrap();
    let t = ctx.parse_term("true ∧ (false ∨ true)").unwrap();
    let (nf, trace) = normalize(ctx, &t, 100).unwrap();
    assert_eq!(render_term(&nf), "true");
    assert_eq!(trace.to_string(), "1 rule 8: false ∨ true ⇒ true\nε rule 2: true ∧ true ⇒ true\n");
}

#[test]
fn literals_are_already_normal() {
    let t = numbers().parse_term("5").unwrap();
    let (nf, trace) = normalize(numbers(), &t, 100).unwrap();
    assert_eq!(nf, t);
    assert!(trace.is_empty());
}

#[test]
fn heron_step_evaluates_exactly() {
    let doc = leibniz::corpus::load("heron").unwrap();
    let ctx = doc.context("heron").unwrap();
    let (nf, trace) = normalize(ctx, &ctx.parse_term("heron-step(1, 2)").unwrap(), 100).unwrap();
    assert_eq!(render_term(&nf), "3/2");
    assert_eq!(trace.steps[0].rule, RuleRef::User(10), "the ten Boolean rules come first");
    assert!(trace.steps[1..].iter().all(|s| s.rule == RuleRef::Builtin));
}

#[test]
fn earlier_rules_win() {
    let src = "@context{c}{\n@use{builtins/numbers}\n@op{f(ℕ) : ℕ}\n@var{n : ℕ}\n@rule{f(0) ⇒ 10}\n@rule{f(n) ⇒ 20}\n}";
    let ctx = context_from(src, "c");
    let run = |s: &str| render_term(&normalize(&ctx, &ctx.parse_term(s).unwrap(), 10).unwrap().0);
    assert_eq!(run("f(0)"), "10");
    assert_eq!(run("f(3)"), "20");
}

#[test]
fn user_rules_take_precedence_over_builtins() {
    let src = "@context{c}{\n@use{builtins/numbers}\n@rule{1 + 1 ⇒ 3}\n}";
    let ctx = context_from(src, "c");
    let (nf, trace) = normalize(&ctx, &ctx.parse_term("1 + 1").unwrap(), 10).unwrap();
    assert_eq!(render_term(&nf), "3");
    assert_eq!(trace.steps[0].rule, RuleRef::User(10), "the ten Boolean rules come first");
}

#[test]
fn step_limit_stops_a_loop_with_exactly_limit_steps() {
    let src = "@context{c}{\n@sort{S}\n@op{a : S}\n@op{b : S}\n@rule{a ⇒ b}\n@rule{b ⇒ a}\n}";
    let ctx = context_from(src, "c");
    let t = ctx.parse_term("a").unwrap();
    match normalize(&ctx, &t, 7) {
        Err(NormalizeError::StepLimitExceeded { limit, partial }) => {
            assert_eq!(limit, 7);
            assert_eq!(partial.len(), 7);
            assert_eq!(render_term(&replay(&t, &ctx, &partial)), "b");
        }
        other => panic!("{other:?}"),
    }
    let e = normalize(&ctx, &t, 0).unwrap_err().into_error();
    assert_eq!(e.code(), "StepLimitExceeded");
}

#[test]
fn normalization_needs_ground_terms() {
    let src = "@context{c}{\n@use{builtins/numbers}\n@var{x : ℕ}\n}";
    let ctx = context_from(src, "c");
    let e = normalize(&ctx, &ctx.parse_term("x + 1").unwrap(), 10).unwrap_err().into_error();
    assert!(matches!(e.kind, ErrorKind::NotGround(_)));
}

#[test]
fn division_by_zero_is_left_alone() {
    let (nf, _) = normalize(numbers(), &numbers().parse_term("(1 + 1) ÷ (2 − 2)").unwrap(), 10).unwrap();
    assert_eq!(render_term(&nf), "2 ÷ 0");
}

#[test]
fn symbols_without_the_canonical_declaration_do_not_compute() {
    let src = "@context{c}{\n@sort{T}\n@op{T + T : T}\n@op{one : T}\n}";
    let ctx = context_from(src, "c");
    let (nf, trace) = normalize(&ctx, &ctx.parse_term("one + one").unwrap(), 10).unwrap();
    assert_eq!(render_term(&nf), "one + one");
    assert!(trace.is_empty());
}

fn random_arith(rng: &mut StdRng, depth: u32) -> (Term, Option<BigRational>) {
    let g = &numbers().graph;
    if depth == 0 || rng.gen_bool(0.3) {
        let (n, d) = (rng.gen_range(-20i64..=20), rng.gen_range(1i64..=6));
        let t = Term::rational(g, Rational::new(n, d).unwrap()).unwrap();
        return (t, Some(BigRational::new(BigInt::from(n), BigInt::from(d))));
    }
    let op = ["+", "−", "×", "÷"][rng.gen_range(0..4)];
    let (a, x) = random_arith(rng, depth - 1);
    let (b, y) = random_arith(rng, depth - 1);
    let t = Term::app(g, &numbers().signature, op, Fixity::Infix, vec![a, b]).unwrap();
    let v = match (x, y) {
        (Some(x), Some(y)) => match op {
            "+" => Some(x + y),
            "−" => Some(x - y),
            "×" => Some(x * y),
            _ if y.is_zero() => None,
            _ => Some(x / y),
        },
        _ => None,
    };
    (t, v)
}

#[test]
fn normal_forms_agree_with_direct_evaluation_and_replay_from_the_trace() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..500 {
        let (t, value) = random_arith(&mut rng, 5);
        let (nf, trace) = normalize(numbers(), &t, 10_000).unwrap();
        match value {
            Some(v) => {
                let got = nf.as_rational().unwrap_or_else(|| panic!("{} stuck", render_term(&nf)));
                assert_eq!(got.to_string().parse::<BigRational>().unwrap(), v);
            }
            None => assert!(nf.as_rational().is_none()),
        }
        assert_eq!(replay(&t, numbers(), &trace), nf);
        assert_eq!(normalize(numbers(), &t, 10_000).unwrap(), (nf, trace));
    }
}
