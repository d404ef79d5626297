//! Builtin arithmetic against num-rational and a nearest-neighbour
//! rounding oracle.

use leibniz::builtins::{eval_fp64, eval_rational, round_to_fp64, EvalError, Value};
use leibniz::number::{Fp64, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ours(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn theirs(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_big(q: &Rational) -> BigRational {
    BigRational::new(q.numer().to_string().parse().unwrap(), q.denom().to_string().parse().unwrap())
}

#[test]
fn exact_operations_match_num_rational() {
    let mut rng = StdRng::seed_from_u64(11);
    let draw = |rng: &mut StdRng| {
        let n = rng.gen_range(-1_000_000_000i64..=1_000_000_000);
        let d = rng.gen_range(1i64..=1_000_000);
        (n, d)
    };
    for _ in 0..10_000 {
        let ((an, ad), (bn, bd)) = (draw(&mut rng), draw(&mut rng));
        let (a, b) = (ours(an, ad), ours(bn, bd));
        let (x, y) = (theirs(an, ad), theirs(bn, bd));
        let num = |op| match eval_rational(op, &a, &b) {
            Ok(Value::Number(q)) => to_big(&q),
            other => panic!("{op}: {other:?}"),
        };
        let cmp = |op| match eval_rational(op, &a, &b) {
            Ok(Value::Bool(v)) => v,
            other => panic!("{op}: {other:?}"),
        };
        assert_eq!(num("+"), &x + &y);
        assert_eq!(num("−"), &x - &y);
        assert_eq!(num("×"), &x * &y);
        if y.is_zero() {
            assert_eq!(eval_rational("÷", &a, &b), Err(EvalError::DivisionByZero));
        } else {
            assert_eq!(num("÷"), &x / &y);
        }
        assert_eq!(cmp("<"), x < y);
        assert_eq!(cmp(">"), x > y);
        assert_eq!(cmp("≤"), x <= y);
        assert_eq!(cmp("≥"), x >= y);
        assert_eq!(cmp("="), x == y);
    }
}

#[test]
fn zero_divisor_is_never_a_value() {
    assert_eq!(eval_rational("÷", &ours(0, 1), &ours(0, 1)), Err(EvalError::DivisionByZero));
    assert_eq!(eval_rational("mod", &ours(1, 1), &ours(1, 1)), Err(EvalError::Unsupported));
}

fn exact(bits: u64) -> BigRational {
    let f = f64::from_bits(bits);
    BigRational::from_float(f).unwrap()
}

fn next_up(bits: u64) -> u64 {
    bits + 1
}

/// The nearest positive finite binary64 by brute force over a neighbourhood
/// of the float estimate, ties to even mantissa.
fn nearest_oracle(q: &BigRational) -> u64 {
    let approx = {
        let n: f64 = q.numer().to_string().parse().unwrap();
        let d: f64 = q.denom().to_string().parse().unwrap();
        (n / d).to_bits()
    };
    let candidates: Vec<u64> = (approx.saturating_sub(4)..=approx + 4)
        .filter(|&b| f64::from_bits(b).is_finite())
        .collect();
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        let (dc, db) = ((exact(c) - q).abs(), (exact(best) - q).abs());
        if dc < db || (dc == db && c % 2 == 0) {
            best = c;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rounding_picks_the_nearest_binary64(n in 1i64..i64::MAX, d in 1i64..i64::MAX, neg in any::<bool>()) {
        let q = theirs(n, d);
        let want = nearest_oracle(&q);
        let got = round_to_fp64(&ours(n, d));
        let want = if neg { want | 1 << 63 } else { want };
        let got = if neg { round_to_fp64(&ours(-n, d)) } else { got };
        prop_assert_eq!(got.bits(), want);
    }

    #[test]
    fn binary64_values_are_fixed_points(bits in any::<u64>()) {
        let f = f64::from_bits(bits);
        prop_assume!(f.is_finite() && f != 0.0);
        let q = Rational::from_f64(f).unwrap();
        prop_assert_eq!(round_to_fp64(&q).bits(), bits);
    }

    #[test]
    fn rounding_is_monotone(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, d in 1i64..10_000_000) {
        let (x, y) = (round_to_fp64(&ours(a, d)).value(), round_to_fp64(&ours(b, d)).value());
        if a <= b {
            prop_assert!(x <= y);
        } else {
            prop_assert!(x >= y);
        }
    }
}

#[test]
fn ties_round_to_even() {
    // 2^53 + 1 is halfway between 2^53 and 2^53 + 2
    let q = Rational::new((1i64 << 53) + 1, 1).unwrap();
    assert_eq!(round_to_fp64(&q).value(), (1u64 << 53) as f64);
    let q = Rational::new((1i64 << 53) + 3, 1).unwrap();
    assert_eq!(round_to_fp64(&q).value(), ((1u64 << 53) + 4) as f64);
}

#[test]
fn extremes_round_to_subnormals_and_infinity() {
    let tiny = BigRational::new(BigInt::from(1), BigInt::from(2).pow(1075));
    let q = Rational::parse(&tiny.to_string()).unwrap();
    // exactly half the least subnormal: ties to even gives zero
    assert_eq!(round_to_fp64(&q).bits(), 0);
    let q = Rational::parse(&format!("3/{}", BigInt::from(2).pow(1076))).unwrap();
    assert_eq!(round_to_fp64(&q).bits(), 1);
    let huge = Rational::parse(&BigInt::from(2).pow(1024).to_string()).unwrap();
    assert_eq!(round_to_fp64(&huge).value(), f64::INFINITY);
    let max = Rational::from_f64(f64::MAX).unwrap();
    assert_eq!(round_to_fp64(&max).value(), f64::MAX);
    assert_eq!(next_up(0), 1);
}

#[test]
fn binary64_operations_follow_ieee() {
    let f = Fp64::from_f64;
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..10_000 {
        let (a, b) = (f64::from_bits(rng.gen()), f64::from_bits(rng.gen()));
        let num = |op| match eval_fp64(op, f(a), f(b)) {
            Ok(Value::Number(v)) => v,
            other => panic!("{other:?}"),
        };
        assert_eq!(num("+"), f(a + b));
        assert_eq!(num("−"), f(a - b));
        assert_eq!(num("×"), f(a * b));
        assert_eq!(num("÷"), f(a / b));
        assert_eq!(eval_fp64("<", f(a), f(b)), Ok(Value::Bool(a < b)));
        assert_eq!(eval_fp64("=", f(a), f(b)), Ok(Value::Bool(a == b)));
    }
    assert_eq!(eval_fp64("÷", f(1.0), f(0.0)), Ok(Value::Number(f(f64::INFINITY))));
}
