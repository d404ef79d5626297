//! Exact rationals, binary64 values, and correctly rounded conversion
//! between them.

use std::cmp::Ordering;
use std::fmt;

use rug::Integer;

/// Sort names of the builtin number lattice.
pub mod sorts {
    pub const NAT: &str = "ℕ";
    pub const NAT_NZ: &str = "ℕnz";
    pub const INT: &str = "ℤ";
    pub const INT_NZ: &str = "ℤnz";
    pub const RAT: &str = "ℚ";
    pub const RAT_NZ: &str = "ℚnz";
    pub const RAT_P: &str = "ℚp";
    pub const RAT_NN: &str = "ℚnn";
    pub const REAL: &str = "ℝ";
    pub const REAL_NZ: &str = "ℝnz";
    pub const REAL_P: &str = "ℝp";
    pub const REAL_NN: &str = "ℝnn";
    pub const FP64: &str = "FP64";
    pub const BOOLEAN: &str = "Boolean";

    pub const RATIONAL_FAMILY: [&str; 8] = [NAT, NAT_NZ, INT, INT_NZ, RAT, RAT_NZ, RAT_P, RAT_NN];
    pub const REAL_FAMILY: [&str; 4] = [REAL, REAL_NZ, REAL_P, REAL_NN];
}

/// An exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(rug::Rational);

impl Rational {
    pub fn from_integer(n: impl Into<Integer>) -> Self {
        Rational(rug::Rational::from(n.into()))
    }

    /// Returns `None` when `den` is zero.
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Option<Self> {
        let den = den.into();
        if den == 0 {
            return None;
        }
        Some(Rational(rug::Rational::from((num.into(), den))))
    }

    /// Parses `n`, `-n`, `n/d` or `-n/d` with decimal digits.
    pub fn parse(text: &str) -> Option<Self> {
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, d),
            None => (body, "1"),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(num) || !digits(den) {
            return None;
        }
        let mut num: Integer = num.parse().ok()?;
        if neg {
            num = -num;
        }
        Rational::new(num, den.parse::<Integer>().ok()?)
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp0()
    }

    pub fn add(&self, other: &Rational) -> Rational {
        Rational(rug::Rational::from(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        Rational(rug::Rational::from(&self.0 - &other.0))
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational(rug::Rational::from(&self.0 * &other.0))
    }

    /// `None` on division by zero.
    pub fn div(&self, other: &Rational) -> Option<Rational> {
        if other.is_zero() {
            None
        } else {
            Some(Rational(rug::Rational::from(&self.0 / &other.0)))
        }
    }

    pub fn neg(&self) -> Rational {
        Rational(rug::Rational::from(-&self.0))
    }

    /// Exact value of a finite binary64; `None` for infinities and NaN.
    pub fn from_f64(value: f64) -> Option<Rational> {
        rug::Rational::from_f64(value).map(Rational)
    }

    /// The most specific sort of the number lattice containing this value.
    pub fn literal_sort(&self) -> &'static str {
        match (self.signum(), self.is_integer()) {
            (Ordering::Equal, _) => sorts::NAT,
            (Ordering::Greater, true) => sorts::NAT_NZ,
            (Ordering::Less, true) => sorts::INT_NZ,
            (Ordering::Greater, false) => sorts::RAT_P,
            (Ordering::Less, false) => sorts::RAT_NZ,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// An IEEE 754 binary64 value compared by bit pattern. Every NaN is stored
/// as the single quiet NaN [`Fp64::CANONICAL_NAN`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp64(u64);

impl Fp64 {
    pub const CANONICAL_NAN: u64 = 0x7FF8_0000_0000_0000;

    pub fn from_f64(value: f64) -> Self {
        if value.is_nan() {
            Fp64(Self::CANONICAL_NAN)
        } else {
            Fp64(value.to_bits())
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        Fp64::from_f64(f64::from_bits(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from_bits(self.0)
    }

    /// Parses the literal forms produced by the `Display` impl.
    pub fn parse(text: &str) -> Option<Fp64> {
        match text {
            "∞" => return Some(Fp64::from_f64(f64::INFINITY)),
            "-∞" => return Some(Fp64::from_f64(f64::NEG_INFINITY)),
            "NaN" => return Some(Fp64::from_f64(f64::NAN)),
            _ => {}
        }
        let body = text.strip_prefix('-').unwrap_or(text);
        if !body.starts_with(|c: char| c.is_ascii_digit()) || !(body.contains('.') || body.contains(['e', 'E'])) {
            return None;
        }
        text.parse::<f64>().ok().map(Fp64::from_f64)
    }
}

impl fmt::Display for Fp64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        if v.is_nan() {
            f.write_str("NaN")
        } else if v.is_infinite() {
            f.write_str(if v > 0.0 { "∞" } else { "-∞" })
        } else {
            // shortest round-trip form; always contains `.` or `e`
            write!(f, "{v:?}")
        }
    }
}

impl fmt::Debug for Fp64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} ({:#018x})", self.0)
    }
}

const MANTISSA_BITS: u32 = 52;
const MIN_EXP: i64 = -1074; // exponent of the least subnormal
const MAX_EXP: i64 = 971; // exponent of the largest finite value's ulp

/// Rounds an exact rational to the nearest binary64, ties to even.
/// Magnitudes beyond the largest finite value round to ±∞; zero maps to +0.
pub fn round_to_fp64(q: &Rational) -> Fp64 {
    if q.is_zero() {
        return Fp64::from_f64(0.0);
    }
    let negative = q.signum() == Ordering::Less;
    let num = Integer::from(q.numer().abs_ref());
    let den = q.denom();

    // choose e so that num / (den·2^e) lies in [2^52, 2^53)
    let mut exp =
        num.significant_bits() as i64 - den.significant_bits() as i64 - MANTISSA_BITS as i64 - 1;
    let (mut mantissa, mut remainder, mut divisor) = scaled_division(&num, den, exp);
    if mantissa.significant_bits() > MANTISSA_BITS + 1 {
        exp += 1;
        (mantissa, remainder, divisor) = scaled_division(&num, den, exp);
    } else if mantissa.significant_bits() < MANTISSA_BITS + 1 {
        exp -= 1;
        (mantissa, remainder, divisor) = scaled_division(&num, den, exp);
    }
    if exp < MIN_EXP {
        exp = MIN_EXP;
        (mantissa, remainder, divisor) = scaled_division(&num, den, exp);
    }

    let twice = Integer::from(&remainder << 1);
    let round_up = match twice.cmp(&divisor) {
        Ordering::Greater => true,
        Ordering::Equal => mantissa.is_odd(),
        Ordering::Less => false,
    };
    if round_up {
        mantissa += 1;
        if mantissa.significant_bits() > MANTISSA_BITS + 1 {
            mantissa >>= 1;
            exp += 1;
        }
    }

    let magnitude = if exp > MAX_EXP {
        f64::INFINITY.to_bits()
    } else {
        let m = mantissa.to_u64().expect("mantissa fits in 53 bits");
        if m < 1 << MANTISSA_BITS {
            // subnormal: exp == MIN_EXP
            m
        } else {
            let biased = (exp + 1075) as u64;
            (m - (1 << MANTISSA_BITS)) | (biased << MANTISSA_BITS)
        }
    };
    let bits = if negative { magnitude | 1 << 63 } else { magnitude };
    Fp64::from_bits(bits)
}

// floor(num / (den·2^exp)) with remainder and the effective divisor
fn scaled_division(num: &Integer, den: &Integer, exp: i64) -> (Integer, Integer, Integer) {
    let (n, d) = if exp >= 0 {
        (num.clone(), Integer::from(den << exp as u32))
    } else {
        (Integer::from(num << (-exp) as u32), den.clone())
    };
    let (q, r) = n.div_rem_floor(d.clone());
    (q, r, d)
}

/// True when `round_to_fp64(q)` equals `q` exactly.
pub fn is_exact_fp64(q: &Rational) -> bool {
    let f = round_to_fp64(q).value();
    f.is_finite() && Rational::from_f64(f).as_ref() == Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn lowest_terms() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(2, 4).to_string(), "1/2");
        assert_eq!(r(3, -6).to_string(), "-1/2");
        assert_eq!(r(6, 3).to_string(), "2");
        assert!(Rational::new(1, 0).is_none());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Rational::parse("3/2"), Some(r(3, 2)));
        assert_eq!(Rational::parse("-7"), Some(r(-7, 1)));
        assert_eq!(Rational::parse("2/4"), Some(r(1, 2)));
        assert_eq!(Rational::parse("1/0"), None);
        assert_eq!(Rational::parse("1.5"), None);
        assert_eq!(Rational::parse("-"), None);
    }

    #[test]
    fn literal_sorts() {
        assert_eq!(r(0, 1).literal_sort(), "ℕ");
        assert_eq!(r(7, 1).literal_sort(), "ℕnz");
        assert_eq!(r(-3, 1).literal_sort(), "ℤnz");
        assert_eq!(r(3, 2).literal_sort(), "ℚp");
        assert_eq!(r(-1, 2).literal_sort(), "ℚnz");
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_to_fp64(&r(1, 2)).bits(), 0x3FE0_0000_0000_0000);
        assert_eq!(round_to_fp64(&r(1, 10)).bits(), 0x3FB9_9999_9999_999A);
        let huge = Rational::from_integer(Integer::from(Integer::u_pow_u(10, 400)));
        assert_eq!(round_to_fp64(&huge).value(), f64::INFINITY);
        assert_eq!(round_to_fp64(&huge.neg()).value(), f64::NEG_INFINITY);
        assert_eq!(round_to_fp64(&r(0, 1)).bits(), 0);
    }

    #[test]
    fn rounding_subnormals_and_boundaries() {
        let tiny = Rational::from_f64(f64::from_bits(1)).unwrap();
        assert_eq!(round_to_fp64(&tiny).bits(), 1);
        // half of the least subnormal is a tie with zero: rounds to even (0)
        let half_tiny = tiny.div(&r(2, 1)).unwrap();
        assert_eq!(round_to_fp64(&half_tiny).bits(), 0);
        // three halves of it ties between 1 and 2 ulps: rounds to 2
        let three_halves = half_tiny.mul(&r(3, 1));
        assert_eq!(round_to_fp64(&three_halves).bits(), 2);
        let max = Rational::from_f64(f64::MAX).unwrap();
        assert_eq!(round_to_fp64(&max).value(), f64::MAX);
        assert_eq!(round_to_fp64(&r(1, 3)).value(), 1.0 / 3.0);
    }

    #[test]
    fn fp64_display_and_parse() {
        for v in [0.5, 2.0, 0.1, -0.0, 1e300, 5e-324, f64::INFINITY, f64::NEG_INFINITY] {
            let fp = Fp64::from_f64(v);
            assert_eq!(Fp64::parse(&fp.to_string()), Some(fp), "{v}");
        }
        let nan = Fp64::from_f64(f64::NAN);
        assert_eq!(nan.to_string(), "NaN");
        assert_eq!(Fp64::parse("NaN"), Some(nan));
        assert_eq!(Fp64::from_bits(0x7FF0_0000_0000_0001), nan);
        assert_eq!(Fp64::parse("12"), None);
    }
}
