//! Reference implementations used as test oracles. They compute directly
//! with big rationals and floats and share no code with the rewrite engine.

#![allow(dead_code)]

pub mod termgen;

use num_bigint::BigInt;
use num_rational::BigRational;
use rug::Rational as Q;

use leibniz::document::{Document, DocumentLoader};

#[derive(Debug, Clone)]
pub struct PredatorPreyParams {
    pub alpha: Q,
    pub beta: Q,
    pub gamma: Q,
    pub delta: Q,
    pub x0: Q,
    pub y0: Q,
}

#[derive(Debug, Clone)]
pub struct EulerConfig {
    pub h: Q,
    pub n: usize,
    pub t0: Q,
}

/// Exact Euler iteration of the predator-prey equations:
/// x' = x + h(αx − βxy), y' = y + h(−γy + δxy).
pub fn euler_oracle(p: &PredatorPreyParams, c: &EulerConfig) -> Vec<(Q, Q, Q)> {
    let (mut t, mut x, mut y) = (c.t0.clone(), p.x0.clone(), p.y0.clone());
    let mut out = vec![(t.clone(), x.clone(), y.clone())];
    for _ in 0..c.n {
        let xy = Q::from(&x * &y);
        let dx = Q::from(&p.alpha * &x) - Q::from(&p.beta * &xy);
        let dy = Q::from(&p.delta * &xy) - Q::from(&p.gamma * &y);
        x += Q::from(&c.h * &dx);
        y += Q::from(&c.h * &dy);
        t += &c.h;
        out.push((t.clone(), x.clone(), y.clone()));
    }
    out
}

/// Exact Heron iteration x' = (x + a/x) / 2; returns x0, ..., xn.
pub fn heron_oracle(a: &BigRational, x0: &BigRational, n: usize) -> Vec<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut xs = vec![x0.clone()];
    for _ in 0..n {
        let x = xs.last().unwrap();
        xs.push((x + a / x) / &two);
    }
    xs
}

/// The same iteration evaluated in IEEE binary64, operation by operation.
pub fn heron_binary64(a: f64, x0: f64, n: usize) -> f64 {
    let mut x = x0;
    for _ in 0..n {
        x = (x + a / x) / 2.0;
    }
    x
}

pub fn big(q: &str) -> BigRational {
    q.parse().expect("rational literal")
}

/// Loads a corpus document together with extra in-memory files.
pub fn load_with(extra: &[(&str, &str)], name: &str) -> leibniz::Result<Document> {
    let src = extra
        .iter()
        .fold(leibniz::corpus::source(), |s, (n, t)| s.with(n, *t));
    DocumentLoader::new(src).load(name)
}

/// A document running the corpus Euler method with the given values.
pub fn euler_run_source(p: &PredatorPreyParams, h: &Q, t0: &Q) -> String {
    format!(
        "@import{{euler = euler.lzd}}\n@context{{run}}{{\n@use{{euler/euler-method}}\n@op{{initial : State}}\n\
         @rule{{α ⇒ {}}}\n@rule{{β ⇒ {}}}\n@rule{{γ ⇒ {}}}\n@rule{{δ ⇒ {}}}\n@rule{{h ⇒ {}}}\n\
         @rule{{initial ⇒ state({}, {}, {})}}\n}}\n",
        p.alpha, p.beta, p.gamma, p.delta, h, t0, p.x0, p.y0
    )
}
