//! Acceptance suite: one PASS/FAIL line per criterion. Exits with a
//! failure status if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rug::Rational as Q;

use common::termgen::{generator_context, Gen};
use common::*;
use leibniz::context::{Asset, ContextRef};
use leibniz::document::{build_document, emit_xml, load_xml, render_html, Block, Item};
use leibniz::fp_derive::derive_fp;
use leibniz::number::{Fp64, Rational};
use leibniz::rewrite::{apply_substitution, normalize, Substitution};
use leibniz::syntax::{render_equation, render_term};
use leibniz::term::{Fixity, Term, BRACKET_OP, SUBSCRIPT_OP, SUPERSCRIPT_OP};
use leibniz::{corpus, Context, ErrorKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn to_q(r: &Rational) -> Q {
    Q::from((r.numer().clone(), r.denom().clone()))
}

fn rational_arg(t: &Term, i: usize) -> Result<Q, String> {
    t.args()
        .get(i)
        .and_then(Term::as_rational)
        .map(to_q)
        .ok_or_else(|| format!("argument {i} of {} is not a literal", render_term(t)))
}

fn criterion_1() -> Outcome {
    let doc = corpus::load("predator-prey").map_err(err)?;
    let functions = corpus::load("functions").map_err(err)?;
    let base = functions.context("derivatives-ℝ→ℝ").ok_or("missing derivatives-ℝ→ℝ")?;
    let ctx = doc.context("predator-prey").ok_or("missing predator-prey")?;
    let new_nullary: BTreeSet<&str> = ctx
        .signature
        .decls()
        .filter(|d| d.args.is_empty() && !base.signature.contains(d))
        .map(|d| d.name.as_str())
        .collect();
    let expected: BTreeSet<&str> = ["x", "y", "α", "β", "γ", "δ"].into();
    check(new_nullary == expected, format!("new nullary operators {new_nullary:?}"))?;
    let labels: Vec<&String> = ctx.assets.keys().collect();
    check(labels == ["pp1", "pp2"], format!("asset labels {labels:?}"))?;
    let mut rendered = Vec::new();
    for (label, text) in [
        ("pp1", "D(x) = (α × x) − ((β × x) × y)"),
        ("pp2", "D(y) = (δ × (x × y)) − (γ × y)"),
    ] {
        let expected = ctx.parse_equation(text).map_err(err)?;
        let Asset::Equation(eq) = ctx.lookup_asset(label).map_err(err)? else {
            return Err(format!("{label} is not an equation"));
        };
        check(*eq == expected, format!("{label} is {eq}, expected {text}"))?;
        rendered.push(render_equation(&eq.left, &eq.right));
    }
    Ok(format!("6 new nullary operators; pp1: {}; pp2: {}", rendered[0], rendered[1]))
}

fn criterion_2() -> Outcome {
    let doc = corpus::load("heron").map_err(err)?;
    let first = doc.computed_in("heron").next().ok_or("no @eval in heron")?;
    let value = first.normal_form.as_rational().ok_or("result is not a rational")?;
    let oracle = heron_oracle(&big("2"), &big("1"), 3);
    check(value.to_string() == "577/408", format!("engine gave {value}"))?;
    check(oracle[3] == big("577/408"), format!("oracle gave {}", oracle[3]))?;
    let residual = &oracle[3] * &oracle[3] - big("2");
    check(residual == big("1/166464"), format!("residual {residual}"))?;
    check(residual < big("1/10000"), "residual not below 10⁻⁴")?;
    let engine_residual = doc.computed_in("heron").nth(1).ok_or("missing residual @eval")?;
    check(
        render_term(&engine_residual.normal_form) == "1/166464",
        "engine residual differs",
    )?;
    Ok("3 iterations from 1 give 577/408 exactly; residual 1/166464 < 10⁻⁴".into())
}

fn criterion_3() -> Outcome {
    let doc = corpus::load("heron").map_err(err)?;
    let heron = doc.context("heron").ok_or("missing heron")?;
    let derived = derive_fp(heron, ContextRef::new("heron", "heron")).map_err(err)?.context;
    check(derived.name == "heron-fp64", format!("derived context is named {}", derived.name))?;
    let mut rng = StdRng::seed_from_u64(3_001);
    let dyadic = |rng: &mut StdRng| rng.gen_range(1u64..1 << 20) as f64 / f64::powi(2.0, rng.gen_range(0..12));
    let mut compared = 0;
    for _ in 0..100 {
        let (a, x0) = (dyadic(&mut rng), dyadic(&mut rng));
        let lit = |v: f64| Term::fp64(&derived.graph, Fp64::from_f64(v)).map_err(err);
        let mut t = lit(x0)?;
        for n in 1..=10 {
            t = Term::app(&derived.graph, &derived.signature, "heron-step", Fixity::Prefix, vec![t, lit(a)?])
                .map_err(err)?;
            let (nf, _) = normalize(&derived, &t, 100_000).map_err(err)?;
            let got = nf.as_fp64().ok_or("result is not a binary64 literal")?;
            let want = heron_binary64(a, x0, n);
            check(
                got.bits() == want.to_bits(),
                format!("a={a}, x0={x0}, n={n}: {:016x} vs {:016x}", got.bits(), want.to_bits()),
            )?;
            compared += 1;
        }
    }
    Ok(format!("{compared} derived normalizations bit-identical to direct binary64 (0 ulps)"))
}

fn small_positive(rng: &mut StdRng) -> Q {
    Q::from((rng.gen_range(1..=9), rng.gen_range(1..=9)))
}

fn run_euler(p: &PredatorPreyParams, h: &Q, t0: &Q, n: usize) -> Result<(Q, Q, Q), String> {
    let src = euler_run_source(p, h, t0);
    let doc = load_with(&[("run.lzd", &src)], "run.lzd").map_err(err)?;
    let ctx = doc.context("run").ok_or("missing run context")?;
    let t = ctx.parse_term(&format!("euler(initial, {n})")).map_err(err)?;
    let (nf, _) = normalize(ctx, &t, 1_000_000).map_err(err)?;
    check(nf.operator() == Some(("state", Fixity::Prefix)), format!("normal form {}", render_term(&nf)))?;
    Ok((rational_arg(&nf, 0)?, rational_arg(&nf, 1)?, rational_arg(&nf, 2)?))
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4_001);
    let mut max_n = 0;
    for case in 0..50 {
        let p = PredatorPreyParams {
            alpha: small_positive(&mut rng),
            beta: small_positive(&mut rng),
            gamma: small_positive(&mut rng),
            delta: small_positive(&mut rng),
            x0: small_positive(&mut rng),
            y0: small_positive(&mut rng),
        };
        let h = Q::from((1, rng.gen_range(1..=20)));
        let t0 = Q::from((rng.gen_range(-6..=6), 2));
        let n = if case == 0 { 20 } else { rng.gen_range(0..=20) };
        max_n = max_n.max(n);
        let got = run_euler(&p, &h, &t0, n)?;
        let want = euler_oracle(&p, &EulerConfig { h: h.clone(), n, t0: t0.clone() })
            .pop()
            .expect("oracle returns n+1 states");
        check(got == want, format!("case {case} (n={n}) differs from the oracle"))?;
    }
    let one = Q::from(1);
    let fixed = PredatorPreyParams {
        alpha: one.clone(),
        beta: one.clone(),
        gamma: one.clone(),
        delta: one.clone(),
        x0: one.clone(),
        y0: one.clone(),
    };
    for n in 0..=20 {
        let h = Q::from((3, 7));
        let (_, x, y) = run_euler(&fixed, &h, &Q::new(), n)?;
        check(x == 1 && y == 1, format!("fixed point drifted at n={n}"))?;
    }
    Ok(format!("50 random parameter sets (n ≤ {max_n}) equal the oracle exactly; fixed point constant for n = 0..20"))
}

fn criterion_5() -> Outcome {
    let doc = corpus::load("heron").map_err(err)?;
    let heron = doc.context("heron").ok_or("missing heron")?;

    let numbers = leibniz::builtins::context("numbers").ok_or("missing numbers")?;
    let cross = numbers.parse_term("true + 1");
    check(
        matches!(&cross, Err(e) if matches!(e.kind, ErrorKind::KindMismatch(_))),
        format!("true + 1 gave {cross:?}"),
    )?;

    let flagged = heron.parse_term("heron-step(0, 2)").map_err(err)?;
    check(flagged.is_flagged(), "heron-step(0, 2) is not flagged")?;

    // 1 ÷ z with z : ℚ is suspect until z is bound to a nonzero value
    let g = &numbers.graph;
    let z = Term::var(g, "z", "ℚ".into()).map_err(err)?;
    let one = Term::rational(g, Rational::from(1)).map_err(err)?;
    let div = Term::app(g, &numbers.signature, "÷", Fixity::Infix, vec![one, z]).map_err(err)?;
    check(div.is_flagged(), "1 ÷ z with z : ℚ should be flagged")?;
    let mut s = Substitution::new();
    s.bind("z", Term::rational(g, Rational::from(2)).map_err(err)?);
    let cleared = apply_substitution(g, &numbers.signature, &div, &s).map_err(err)?;
    check(!cleared.is_flagged(), "substituting 2 did not clear the flag")?;

    // and so does rewriting inside a flagged term
    let t = numbers.parse_term("1 ÷ (3 − 1)").map_err(err)?;
    check(t.is_flagged(), "1 ÷ (3 − 1) should be flagged")?;
    let (nf, trace) = normalize(numbers, &t, 100).map_err(err)?;
    check(!trace.steps[1].before.is_flagged(), "flag survived the inner rewrite")?;
    check(render_term(&nf) == "1/2", format!("normal form {}", render_term(&nf)))?;
    Ok("cross-kind rejected; within-kind mismatch flagged; flag cleared by substitution and by rewriting".into())
}

fn priority_result(first: &str, second: &str) -> Result<String, String> {
    let src = format!(
        "@context{{p}}{{\n@use{{builtins/numbers}}\n@op{{f(ℕ) : ℕ}}\n@var{{n : ℕ}}\n@rule{{{first}}}\n@rule{{{second}}}\n}}"
    );
    let doc = load_with(&[("p.lzd", &src)], "p.lzd").map_err(err)?;
    let ctx = doc.context("p").ok_or("missing p")?;
    let (nf, _) = normalize(ctx, &ctx.parse_term("f(0)").map_err(err)?, 100).map_err(err)?;
    Ok(render_term(&nf))
}

fn criterion_6() -> Outcome {
    let (r1, r2) = ("f(n) ⇒ 1", "f(0) ⇒ 2");
    let a = priority_result(r1, r2)?;
    let b = priority_result(r2, r1)?;
    check(a == "1" && b == "2", format!("got {a} and {b}"))?;
    Ok("overlapping rules: textual order [1, 2] gives 1, swapped gives 2".into())
}

fn criterion_7() -> Outcome {
    let src = "@context{s}{\n@use{builtins/numbers}\n@op{ℝ[ℝ] : ℝ}\n@op{ℝ_ℝ : ℝ}\n@op{ℝ^ℝ : ℝ}\n@var{a, b, c : ℝ}\n}";
    let doc = load_with(&[("s.lzd", src)], "s.lzd").map_err(err)?;
    let ctx = doc.context("s").ok_or("missing s")?;
    let chain = ctx.parse_term("a + b + c").map_err(err)?;
    check(chain == ctx.parse_term("(a + b) + c").map_err(err)?, "a + b + c is not (a + b) + c")?;
    match ctx.parse_term("a + b × c") {
        Err(e) if e.code() == "AmbiguityError" => {}
        other => return Err(format!("a + b × c gave {other:?}")),
    }
    for (text, op, fixity) in [
        ("a[b]", BRACKET_OP, Fixity::Bracket),
        ("a_b", SUBSCRIPT_OP, Fixity::Subscript),
        ("a^b", SUPERSCRIPT_OP, Fixity::Superscript),
    ] {
        let t = ctx.parse_term(text).map_err(err)?;
        check(t.operator() == Some((op, fixity)), format!("{text} parsed as {t:?}"))?;
    }
    Ok("left-associated chains, mixed operators rejected, [] _ ^ applications".into())
}

fn criterion_8() -> Outcome {
    let ctx = generator_context();
    let mut gen = Gen {
        ctx: &ctx,
        rng: StdRng::seed_from_u64(8_001),
    };
    for i in 0..1000 {
        let t = gen.v(5);
        let text = render_term(&t);
        let back = ctx.parse_term(&text).map_err(|e| format!("term {i} `{text}`: {e}"))?;
        check(back == t, format!("term {i} `{text}` did not round-trip"))?;
    }
    let mut docs = Vec::new();
    for (file, _) in corpus::FILES {
        let name = file.trim_end_matches(".lzd");
        docs.push(corpus::load(name).map_err(err)?);
    }
    let heron = docs.iter_mut().find(|d| d.name == "heron").ok_or("heron missing")?;
    let derived = derive_fp(heron.context("heron").unwrap(), ContextRef::new("heron", "heron")).map_err(err)?;
    heron.add_context(derived.context).map_err(err)?;
    for d in &docs {
        let loaded = load_xml(&emit_xml(d)).map_err(|e| format!("{}: {e}", d.name))?;
        check(&loaded == d, format!("{} changed in the XML round trip", d.name))?;
        check(emit_xml(&loaded) == emit_xml(d), format!("{} XML bytes changed", d.name))?;
    }
    for (file, _) in corpus::FILES {
        let name = file.trim_end_matches(".lzd");
        let (a, b) = (corpus::load(name).map_err(err)?, corpus::load(name).map_err(err)?);
        check(
            render_html(&a) == render_html(&b) && emit_xml(&a) == emit_xml(&b),
            format!("{name} builds differ"),
        )?;
    }
    Ok(format!(
        "1000 random terms round-trip; {} corpus documents round-trip through XML; builds deterministic",
        docs.len()
    ))
}

fn criterion_9() -> Outcome {
    let doc = corpus::load("predator-prey").map_err(err)?;
    let functions = corpus::load("functions").map_err(err)?;
    let imports: BTreeMap<String, _> = [("functions".to_string(), functions)].into();
    let ast = doc.source.clone().ok_or("no source")?;
    let original = doc.context("predator-prey").ok_or("missing context")?;
    let mut rng = StdRng::seed_from_u64(9_001);
    for i in 0..20 {
        let mut permuted = ast.clone();
        for block in &mut permuted.blocks {
            if let Block::Context(c) = block {
                let mut decls: Vec<Item> = c.body.iter().filter(|it| matches!(it, Item::Decl(_))).cloned().collect();
                decls.shuffle(&mut rng);
                c.body = decls;
            }
        }
        let rebuilt = build_document("predator-prey", &permuted, &imports).map_err(err)?;
        let ctx: &Context = rebuilt.context("predator-prey").ok_or("missing context")?;
        check(ctx == original, format!("permutation {i} gives a different context"))?;
    }
    Ok("20 random permutations of the declarations give equal contexts".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("predator-prey fidelity", criterion_1),
        ("Heron exact convergence", criterion_2),
        ("binary64 derivation bit-exactness", criterion_3),
        ("Euler oracle equivalence", criterion_4),
        ("sort-system behavior", criterion_5),
        ("rule priority", criterion_6),
        ("syntax rules", criterion_7),
        ("round trips", criterion_8),
        ("order-free elaboration", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
