//! Random well-formed terms over a signature that exercises every fixity,
//! literal form and a word-named infix operator.

use rand::rngs::StdRng;
use rand::Rng;

use leibniz::number::{Fp64, Rational};
use leibniz::term::{Fixity, Term, BRACKET_OP, SUBSCRIPT_OP, SUPERSCRIPT_OP};
use leibniz::Context;

pub const GENERATOR_DOC: &str = "@context{gen}{
@use{builtins/numbers}
@use{builtins/fp64}
@sort{V}
@op{f(V, ℝ) : V}
@op{g(V) : V}
@op{k : V}
@op{V ⊕ V : V}
@op{V ⊗ V : V}
@op{V and V : V}
@op{V[ℝ] : ℝ}
@op{V_ℤ : V}
@op{V^ℚ : V}
@op{lift(FP64) : V}
@var{p, q : V}
@var{r, s : ℝ}
@var{z : FP64}
}";

pub fn generator_context() -> Context {
    let ast = leibniz::document::parse_document(GENERATOR_DOC).unwrap();
    let doc = leibniz::document::build_document("gen", &ast, &Default::default()).unwrap();
    doc.context("gen").unwrap().clone()
}

pub struct Gen<'a> {
    pub ctx: &'a Context,
    pub rng: StdRng,
}

impl Gen<'_> {
    fn app(&self, op: &str, fixity: Fixity, args: Vec<Term>) -> Term {
        Term::app(&self.ctx.graph, &self.ctx.signature, op, fixity, args).expect("kind-correct by construction")
    }

    fn var(&self, name: &str) -> Term {
        Term::var(&self.ctx.graph, name, self.ctx.variables[name].clone()).unwrap()
    }

    pub fn rational(&mut self) -> Term {
        let num: i64 = self.rng.gen_range(-50..=50);
        let den: i64 = if self.rng.gen_bool(0.5) { 1 } else { self.rng.gen_range(1..=12) };
        Term::rational(&self.ctx.graph, Rational::new(num, den).unwrap()).unwrap()
    }

    pub fn float(&mut self) -> Term {
        let x = match self.rng.gen_range(0..8) {
            0 => f64::INFINITY,
            1 => f64::NEG_INFINITY,
            2 => f64::NAN,
            3 => -0.0,
            4 => f64::from_bits(self.rng.gen_range(1..1u64 << 52)),
            _ => f64::from_bits(self.rng.gen()),
        };
        Term::fp64(&self.ctx.graph, Fp64::from_f64(x)).unwrap()
    }

    /// A term of kind `[V]`.
    pub fn v(&mut self, depth: u32) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if leaf {
            return match self.rng.gen_range(0..3) {
                0 => self.app("k", Fixity::Prefix, vec![]),
                1 => self.var("p"),
                _ => self.var("q"),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => {
                let args = vec![self.v(d), self.num(d)];
                self.app("f", Fixity::Prefix, args)
            }
            1 => {
                let args = vec![self.v(d)];
                self.app("g", Fixity::Prefix, args)
            }
            2..=4 => {
                let op = ["⊕", "⊗", "and"][self.rng.gen_range(0..3)];
                let args = vec![self.v(d), self.v(d)];
                self.app(op, Fixity::Infix, args)
            }
            5 => {
                let args = vec![self.v(d), self.num(d)];
                self.app(SUBSCRIPT_OP, Fixity::Subscript, args)
            }
            6 => {
                let args = vec![self.v(d), self.num(d)];
                self.app(SUPERSCRIPT_OP, Fixity::Superscript, args)
            }
            7 => {
                let args = vec![self.fp(d)];
                self.app("lift", Fixity::Prefix, args)
            }
            _ => {
                // left-nested chain of one operator
                let op = ["⊕", "⊗"][self.rng.gen_range(0..2)];
                let inner = vec![self.v(d), self.v(d)];
                let left = self.app(op, Fixity::Infix, inner);
                let args = vec![left, self.v(d)];
                self.app(op, Fixity::Infix, args)
            }
        }
    }

    /// A term of the number kind.
    pub fn num(&mut self, depth: u32) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..3) {
                0 => self.var("r"),
                1 => self.var("s"),
                _ => self.rational(),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => {
                let args = vec![self.v(d), self.num(d)];
                self.app(BRACKET_OP, Fixity::Bracket, args)
            }
            n => {
                let op = ["+", "−", "×", "÷"][n - 1];
                let args = vec![self.num(d), self.num(d)];
                self.app(op, Fixity::Infix, args)
            }
        }
    }

    /// A binary64 term.
    pub fn fp(&mut self, depth: u32) -> Term {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.3) { self.var("z") } else { self.float() };
        }
        let op = ["+", "−", "×", "÷"][self.rng.gen_range(0..4)];
        let args = vec![self.fp(depth - 1), self.fp(depth - 1)];
        self.app(op, Fixity::Infix, args)
    }
}
