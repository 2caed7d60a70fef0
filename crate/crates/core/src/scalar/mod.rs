//! Exact coefficient fields: the rationals, the Gaussian rationals, and
//! prime fields (optionally with a square root of -1 adjoined).

mod linear;

pub use linear::{kernel_of, LinearError, LinearSystem, RowSpace, SolveOutcome, SolvePolicy, SparseVec};

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedFields(Field, Field),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("cannot parse scalar {0:?}: {1}")]
    Parse(String, String),
}

/// Coefficient field descriptor: characteristic 0 or a prime, optionally with
/// `i` adjoined (`i^2 = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    characteristic: u64,
    imaginary: bool,
}

impl Field {
    pub const RATIONALS: Field = Field {
        characteristic: 0,
        imaginary: false,
    };
    pub const GAUSSIAN: Field = Field {
        characteristic: 0,
        imaginary: true,
    };

    /// Characteristic 0 or prime `p`; `imaginary` adjoins a square root of -1.
    ///
    /// Over `F_p` the adjunction only yields a field when `p = 3 mod 4`, so
    /// other primes are rejected together with `p = 2`.
    pub fn new(characteristic: u64, imaginary: bool) -> Result<Field, ScalarError> {
        if characteristic != 0 {
            if !is_prime(characteristic) {
                return Err(ScalarError::InvalidField(format!(
                    "characteristic {characteristic} is not prime"
                )));
            }
            if characteristic > u32::MAX as u64 {
                return Err(ScalarError::InvalidField(format!(
                    "characteristic {characteristic} exceeds the supported range"
                )));
            }
            if imaginary && characteristic == 2 {
                return Err(ScalarError::InvalidField(
                    "cannot adjoin i in characteristic 2".into(),
                ));
            }
            if imaginary && characteristic % 4 != 3 {
                return Err(ScalarError::InvalidField(format!(
                    "-1 is already a square mod {characteristic}; F_p(i) is not a field"
                )));
            }
        }
        Ok(Field {
            characteristic,
            imaginary,
        })
    }

    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        Field::new(p, false)
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn has_imaginary_unit(&self) -> bool {
        self.imaginary
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    /// The adjoined square root of -1, if any.
    pub fn imaginary_unit(&self) -> Option<Scalar> {
        if !self.imaginary {
            return None;
        }
        Some(match self.characteristic {
            0 => Scalar::Gaussian(BigRational::zero(), BigRational::one()),
            p => Scalar::ModGaussian { re: 0, im: 1, p },
        })
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match (self.characteristic, self.imaginary) {
            (0, false) => Scalar::Rational(BigRational::from_integer(v.clone())),
            (0, true) => Scalar::Gaussian(BigRational::from_integer(v.clone()), BigRational::zero()),
            (p, false) => Scalar::Mod {
                v: reduce_bigint(v, p),
                p,
            },
            (p, true) => Scalar::ModGaussian {
                re: reduce_bigint(v, p),
                im: 0,
                p,
            },
        }
    }

    /// Embeds `re + im*i` (the imaginary part must vanish without `i`).
    pub fn from_rationals(&self, re: BigRational, im: BigRational) -> Result<Scalar, ScalarError> {
        if !self.imaginary && !im.is_zero() {
            return Err(ScalarError::Parse(
                format!("{re}+{im}i"),
                format!("field {self} has no imaginary unit"),
            ));
        }
        match self.characteristic {
            0 if self.imaginary => Ok(Scalar::Gaussian(re, im)),
            0 => Ok(Scalar::Rational(re)),
            p => {
                let conv = |q: &BigRational| -> Result<u64, ScalarError> {
                    let num = reduce_bigint(q.numer(), p);
                    let den = reduce_bigint(q.denom(), p);
                    if den == 0 {
                        return Err(ScalarError::DivisionByZero);
                    }
                    Ok(mul_mod(num, inv_mod(den, p), p))
                };
                let re = conv(&re)?;
                let im = conv(&im)?;
                Ok(if self.imaginary {
                    Scalar::ModGaussian { re, im, p }
                } else {
                    Scalar::Mod { v: re, p }
                })
            }
        }
    }

    /// Parses `"3"`, `"-1/2"`, `"3+2i"`, `"i"`, `"-i/2"` (a unicode minus is accepted).
    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        let (re, im) = parse_gaussian(text)?;
        self.from_rationals(re, im)
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.field() == *self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.characteristic, self.imaginary) {
            (0, false) => write!(f, "Q"),
            (0, true) => write!(f, "Q(i)"),
            (p, false) => write!(f, "F_{p}"),
            (p, true) => write!(f, "F_{p}(i)"),
        }
    }
}

impl FromStr for Field {
    type Err = ScalarError;

    /// `"0"`, `"5"`, `"0,i"`, `"7,i"`; `"Q"` and `"Q(i)"` are accepted too.
    fn from_str(s: &str) -> Result<Field, ScalarError> {
        let s = s.trim();
        match s {
            "Q" | "q" => return Ok(Field::RATIONALS),
            "Q(i)" | "q(i)" => return Ok(Field::GAUSSIAN),
            _ => {}
        }
        let (char_part, imag) = match s.split_once(',') {
            Some((c, rest)) if rest.trim() == "i" => (c.trim(), true),
            Some(_) => return Err(ScalarError::InvalidField(s.to_string())),
            None => (s, false),
        };
        let p: u64 = char_part
            .parse()
            .map_err(|_| ScalarError::InvalidField(s.to_string()))?;
        Field::new(p, imag)
    }
}

/// An exact field element in canonical form.
///
/// Rationals are kept in lowest terms with positive denominators and
/// residues lie in `[0, p)`, so structural equality is field equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian(BigRational, BigRational),
    Mod { v: u64, p: u64 },
    ModGaussian { re: u64, im: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::RATIONALS,
            Scalar::Gaussian(..) => Field::GAUSSIAN,
            Scalar::Mod { p, .. } => Field {
                characteristic: *p,
                imaginary: false,
            },
            Scalar::ModGaussian { p, .. } => Field {
                characteristic: *p,
                imaginary: true,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Gaussian(a, b) => a.is_zero() && b.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
            Scalar::ModGaussian { re, im, .. } => *re == 0 && *im == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Gaussian(a, b) => a.is_one() && b.is_zero(),
            Scalar::Mod { v, .. } => *v == 1,
            Scalar::ModGaussian { re, im, .. } => *re == 1 && *im == 0,
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        use Scalar::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Gaussian(a, b), Gaussian(c, d)) => Gaussian(a + c, b + d),
            (Mod { v: a, p }, Mod { v: b, p: q }) if p == q => Mod {
                v: add_mod(*a, *b, *p),
                p: *p,
            },
            (ModGaussian { re: a, im: b, p }, ModGaussian { re: c, im: d, p: q }) if p == q => {
                ModGaussian {
                    re: add_mod(*a, *c, *p),
                    im: add_mod(*b, *d, *p),
                    p: *p,
                }
            }
            _ => return Err(ScalarError::MixedFields(self.field(), other.field())),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        use Scalar::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Gaussian(a, b), Gaussian(c, d)) => Gaussian(a * c - b * d, a * d + b * c),
            (Mod { v: a, p }, Mod { v: b, p: q }) if p == q => Mod {
                v: mul_mod(*a, *b, *p),
                p: *p,
            },
            (ModGaussian { re: a, im: b, p }, ModGaussian { re: c, im: d, p: q }) if p == q => {
                let p = *p;
                ModGaussian {
                    re: sub_mod(mul_mod(*a, *c, p), mul_mod(*b, *d, p), p),
                    im: add_mod(mul_mod(*a, *d, p), mul_mod(*b, *c, p), p),
                    p,
                }
            }
            _ => return Err(ScalarError::MixedFields(self.field(), other.field())),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_add(&-other)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        use Scalar::*;
        Ok(match self {
            Rational(a) => Rational(a.recip()),
            Gaussian(a, b) => {
                let n = a * a + b * b;
                Gaussian(a / &n, -(b / &n))
            }
            Mod { v, p } => Mod {
                v: inv_mod(*v, *p),
                p: *p,
            },
            ModGaussian { re, im, p } => {
                let p = *p;
                let n = add_mod(mul_mod(*re, *re, p), mul_mod(*im, *im, p), p);
                let ni = inv_mod(n, p);
                ModGaussian {
                    re: mul_mod(*re, ni, p),
                    im: mul_mod(sub_mod(0, *im, p), ni, p),
                    p,
                }
            }
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_mul(&other.inv()?)
    }

    /// `-1` raised to `e` in this scalar's field.
    pub fn sign(&self, negative: bool) -> Scalar {
        if negative {
            -self
        } else {
            self.clone()
        }
    }

    /// Real and imaginary parts as rationals (characteristic 0 only).
    pub fn as_rationals(&self) -> Option<(BigRational, BigRational)> {
        match self {
            Scalar::Rational(q) => Some((q.clone(), BigRational::zero())),
            Scalar::Gaussian(a, b) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }

    /// Whether the printed form needs parentheses when used as a factor.
    fn is_compound(&self) -> bool {
        match self {
            Scalar::Gaussian(a, b) => !a.is_zero() && !b.is_zero(),
            Scalar::ModGaussian { re, im, .. } => *re != 0 && *im != 0,
            _ => false,
        }
    }

    /// Renders as a coefficient in front of a monomial: `None` for 1, `Some("-")` for -1.
    pub(crate) fn coefficient_prefix(&self) -> (bool, Option<String>) {
        let neg = -self;
        if self.is_one() {
            return (false, None);
        }
        if neg.is_one() {
            return (true, None);
        }
        if !self.is_compound() && self.looks_negative() {
            return (true, Some(neg.to_string()));
        }
        if self.is_compound() {
            (false, Some(format!("({self})")))
        } else {
            (false, Some(self.to_string()))
        }
    }

    fn looks_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Gaussian(a, b) => (a.is_negative() && b.is_zero()) || (a.is_zero() && b.is_negative()),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Gaussian(a, b) => fmt_complex(f, &a.to_string(), b, a.is_zero()),
            Scalar::Mod { v, .. } => write!(f, "{v}"),
            Scalar::ModGaussian { re, im, .. } => {
                if *im == 0 {
                    write!(f, "{re}")
                } else {
                    let im_str = if *im == 1 { String::new() } else { im.to_string() };
                    if *re == 0 {
                        write!(f, "{im_str}i")
                    } else {
                        write!(f, "{re}+{im_str}i")
                    }
                }
            }
        }
    }
}

fn fmt_complex(f: &mut fmt::Formatter<'_>, re: &str, im: &BigRational, re_zero: bool) -> fmt::Result {
    if im.is_zero() {
        return write!(f, "{re}");
    }
    let mag = im.abs();
    let mag_str = if mag.is_one() {
        String::new()
    } else if mag.is_integer() {
        mag.to_string()
    } else {
        // i/2 rather than 1/2i, which would read as 1/(2i)
        format!("{}", mag.numer())
    };
    let den = if mag.is_integer() {
        String::new()
    } else {
        format!("/{}", mag.denom())
    };
    let sign = if im.is_negative() { "-" } else { "+" };
    if re_zero {
        let lead = if im.is_negative() { "-" } else { "" };
        write!(f, "{lead}{mag_str}i{den}")
    } else {
        write!(f, "{re}{sign}{mag_str}i{den}")
    }
}

fn parse_gaussian(text: &str) -> Result<(BigRational, BigRational), ScalarError> {
    let err = |m: &str| ScalarError::Parse(text.to_string(), m.to_string());
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    let s = cleaned.trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Err(err("empty"));
    }
    // split into signed terms at +/- that are not leading
    let mut terms = Vec::new();
    let mut start = 0;
    for (idx, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && idx > start {
            terms.push(&s[start..idx]);
            start = idx;
        }
    }
    terms.push(&s[start..]);
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let (is_imag, body) = split_imaginary(body);
        let value = if body.is_empty() {
            BigRational::one()
        } else {
            parse_rational(&body).ok_or_else(|| err("expected a rational number"))?
        };
        let value = if neg { -value } else { value };
        if is_imag {
            im += value;
        } else {
            re += value;
        }
    }
    Ok((re, im))
}

/// Strips an imaginary marker: `2i`, `i`, `i/2`, `2i/3`, `2*i`.
fn split_imaginary(body: &str) -> (bool, String) {
    if let Some(pos) = body.find('i') {
        let mut s = String::with_capacity(body.len());
        s.push_str(body[..pos].trim_end_matches('*'));
        let rest = &body[pos + 1..];
        if !rest.is_empty() {
            if s.is_empty() {
                s.push('1');
            }
            s.push_str(rest);
        }
        (true, s)
    } else {
        (false, body.to_string())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

// Operators panic on mixed fields: every algebraic object carries a single
// field, so a mismatch is a programming error. Use the `try_*` methods at
// trust boundaries.

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar field mismatch")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        use Scalar::*;
        match self {
            Rational(a) => Rational(-a),
            Gaussian(a, b) => Gaussian(-a, -b),
            Mod { v, p } => Mod {
                v: sub_mod(0, *v, *p),
                p: *p,
            },
            ModGaussian { re, im, p } => ModGaussian {
                re: sub_mod(0, *re, *p),
                im: sub_mod(0, *im, *p),
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        use Scalar::*;
        match (self, rhs) {
            (Rational(a), Rational(b)) => *a += b,
            (Gaussian(a, b), Gaussian(c, d)) => {
                *a += c;
                *b += d;
            }
            (s, r) => *s = &*s + r,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        use Scalar::*;
        match (self, rhs) {
            (Rational(a), Rational(b)) => *a -= b,
            (Gaussian(a, b), Gaussian(c, d)) => {
                *a -= c;
                *b -= d;
            }
            (s, r) => *s = &*s - r,
        }
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((v % &m) + &m) % &m;
    r.to_u64().expect("residue fits in u64")
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sum_is_reduced() {
        let q = Field::RATIONALS;
        let s = &q.parse("1/2").unwrap() + &q.parse("1/3").unwrap();
        assert_eq!(s, q.parse("5/6").unwrap());
        assert_eq!(s.to_string(), "5/6");
    }

    #[test]
    fn inverse_mod_five() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.from_i64(3).inv().unwrap(), f5.from_i64(2));
        assert_eq!(f5.from_i64(-1), f5.from_i64(4));
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let f = Field::GAUSSIAN;
        let i = f.imaginary_unit().unwrap();
        assert_eq!(&i * &i, f.from_i64(-1));
        let f7 = Field::new(7, true).unwrap();
        let i7 = f7.imaginary_unit().unwrap();
        assert_eq!(&i7 * &i7, f7.from_i64(-1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Field::RATIONALS.zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(
            Field::prime(3).unwrap().from_i64(6).inv(),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::RATIONALS.one();
        let b = Field::prime(5).unwrap().one();
        assert!(matches!(a.try_add(&b), Err(ScalarError::MixedFields(..))));
        assert!(matches!(
            a.try_mul(&Field::GAUSSIAN.one()),
            Err(ScalarError::MixedFields(..))
        ));
    }

    #[test]
    fn field_descriptor_validation() {
        assert!(Field::new(4, false).is_err());
        assert!(Field::new(2, true).is_err());
        assert!(Field::new(5, true).is_err());
        assert!(Field::new(3, true).is_ok());
        assert_eq!("5".parse::<Field>().unwrap(), Field::prime(5).unwrap());
        assert_eq!("0,i".parse::<Field>().unwrap(), Field::GAUSSIAN);
    }

    #[test]
    fn gaussian_parse_and_display() {
        let f = Field::GAUSSIAN;
        for text in ["3+2i", "-i", "i", "1/2-3i", "−1/2", "2i/3", "0"] {
            let s = f.parse(text).unwrap();
            assert_eq!(f.parse(&s.to_string()).unwrap(), s, "{text}");
        }
        assert_eq!(f.parse("−1/2").unwrap().to_string(), "-1/2");
        assert_eq!(f.parse("3+2i").unwrap().to_string(), "3+2i");
        assert_eq!(f.parse("-i").unwrap().to_string(), "-i");
        let x = f.parse("1+i").unwrap();
        assert_eq!(&x * &x.inv().unwrap(), f.one());
    }

    #[test]
    fn rationals_reject_imaginary_input() {
        assert!(Field::RATIONALS.parse("1+i").is_err());
        assert_eq!(
            Field::prime(5).unwrap().parse("1/2").unwrap(),
            Field::prime(5).unwrap().from_i64(3)
        );
    }
}
