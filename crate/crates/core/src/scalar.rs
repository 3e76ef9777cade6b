//! The exact coefficient field.
//!
//! Every matrix element produced by the conjugation method is a rational
//! function of the model couplings: the numerator is a polynomial in all
//! couplings, while the denominator is a product of classical energy
//! differences and therefore contains no hopping amplitudes.  This module
//! implements that field exactly over arbitrary-precision rationals.
//!
//! Polynomials are kept in canonical expanded form (sorted monomials, no zero
//! coefficients).  Denominators are kept factored: a list of primitive,
//! hopping-free polynomial factors with multiplicities.  Factors enter only
//! through [`ScalarValue::div_classical`], i.e. one energy difference at a
//! time, so distinct stored factors are coprime and cancellation reduces to
//! exact polynomial division.  Equality is decided by cross-multiplication,
//! never by normal forms.
//!
//! The grading that drives order-by-order truncation is the total degree in
//! the designated hopping symbols; since denominators are hopping-free, the
//! grade of a value is read off its numerator alone.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Exponent vector, indexed like the owning [`SymbolSet`].
pub type Exps = Vec<u8>;

#[derive(Debug, Error)]
pub enum ScalarError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("denominator `{0}` contains a hopping amplitude")]
    HoppingDenominator(String),
    #[error("evaluation hit a vanishing denominator factor `{0}`")]
    EvalDenominatorZero(String),
    #[error("malformed rational literal `{0}`, expected `p` or `p/q`")]
    BadRational(String),
}

/// An ordered list of coupling symbols, with the hopping amplitudes marked.
///
/// All polynomials of a model share one `Arc<SymbolSet>`; mixing symbol sets
/// is a programming error and is caught by debug assertions.
#[derive(Debug, PartialEq, Eq)]
pub struct SymbolSet {
    names: Vec<String>,
    hopping: Vec<bool>,
}

pub type Symbols = Arc<SymbolSet>;

impl SymbolSet {
    /// `names` lists all couplings; `hopping` selects the graded ones.
    pub fn new(names: &[&str], hopping: &[&str]) -> Symbols {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let hop = names
            .iter()
            .map(|n| hopping.contains(&n.as_str()))
            .collect();
        Arc::new(SymbolSet {
            names,
            hopping: hop,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_hopping(&self, i: usize) -> bool {
        self.hopping[i]
    }

    fn hopping_degree_of(&self, exps: &Exps) -> u32 {
        exps.iter()
            .enumerate()
            .filter(|(i, _)| self.hopping[*i])
            .map(|(_, e)| u32::from(*e))
            .sum()
    }
}

/// A multivariate polynomial with exact rational coefficients, in canonical
/// expanded form.
#[derive(Debug, Clone)]
pub struct Poly {
    sym: Symbols,
    /// Monomial exponents -> nonzero coefficient, lexicographically sorted.
    terms: BTreeMap<Exps, BigRational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for Poly {}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl Poly {
    pub fn zero(sym: &Symbols) -> Poly {
        Poly {
            sym: sym.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sym: &Symbols, c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0u8; sym.len()], c);
        }
        Poly {
            sym: sym.clone(),
            terms,
        }
    }

    pub fn one(sym: &Symbols) -> Poly {
        Poly::constant(sym, BigRational::one())
    }

    pub fn symbol(sym: &Symbols, i: usize) -> Poly {
        let mut e = vec![0u8; sym.len()];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        Poly {
            sym: sym.clone(),
            terms,
        }
    }

    pub fn named(sym: &Symbols, name: &str) -> Poly {
        Poly::symbol(sym, sym.index_of(name).expect("unknown symbol"))
    }

    pub fn symbols(&self) -> &Symbols {
        &self.sym
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&vec![0u8; self.sym.len()])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn assert_compatible(&self, other: &Poly) {
        debug_assert!(
            Arc::ptr_eq(&self.sym, &other.sym) || self.sym == other.sym,
            "mixed symbol sets"
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.assert_compatible(other);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Poly {
            sym: self.sym.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            sym: self.sym.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.sym);
        }
        Poly {
            sym: self.sym.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.assert_compatible(other);
        let mut terms: BTreeMap<Exps, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly {
            sym: self.sym.clone(),
            terms,
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(&self.sym);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Largest total degree in the hopping symbols, `None` for zero.
    pub fn hopping_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| self.sym.hopping_degree_of(e))
            .max()
    }

    /// Smallest total degree in the hopping symbols, `None` for zero.
    pub fn min_hopping_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| self.sym.hopping_degree_of(e))
            .min()
    }

    pub fn is_hopping_free(&self) -> bool {
        self.hopping_degree().unwrap_or(0) == 0
    }

    /// Drops every monomial of hopping degree above `deg`.
    pub fn truncate_hopping(&self, deg: u32) -> Poly {
        Poly {
            sym: self.sym.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.sym.hopping_degree_of(e) <= deg)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only the monomials of hopping degree exactly `deg`.
    pub fn hopping_component(&self, deg: u32) -> Poly {
        Poly {
            sym: self.sym.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.sym.hopping_degree_of(e) == deg)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        assert_eq!(values.len(), self.sym.len(), "binding count mismatch");
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    m *= &values[i];
                }
            }
            acc += m;
        }
        acc
    }

    /// Exact polynomial division; `None` when `self` is not a multiple of
    /// `divisor`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = Poly::zero(&self.sym);
        let (lead_e, lead_c) = divisor
            .terms
            .iter()
            .next_back()
            .map(|(e, c)| (e.clone(), c.clone()))?;
        while !rem.is_zero() {
            let (re, rc) = rem
                .terms
                .iter()
                .next_back()
                .map(|(e, c)| (e.clone(), c.clone()))
                .unwrap();
            let mut qe = Exps::with_capacity(re.len());
            for (a, b) in re.iter().zip(&lead_e) {
                if a < b {
                    return None;
                }
                qe.push(a - b);
            }
            let qc = rc / &lead_c;
            let mut qterm = BTreeMap::new();
            qterm.insert(qe, qc);
            let qpoly = Poly {
                sym: self.sym.clone(),
                terms: qterm,
            };
            rem = rem.sub(&qpoly.mul(divisor));
            quo = quo.add(&qpoly);
        }
        Some(quo)
    }

    /// Writes `self = content * primitive` with the primitive part having
    /// coprime integer coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num::integer::gcd(num_gcd, scaled);
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        let lead = self.terms.iter().next_back().unwrap().1;
        if lead.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest monomial first reads like handwritten algebra.
        for (e, c) in self.terms.iter().rev() {
            let mut parts: Vec<String> = Vec::new();
            let abs = c.abs();
            if !abs.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(abs.to_string());
            }
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => parts.push(self.sym.name(i).to_string()),
                    _ => parts.push(format!("{}^{}", self.sym.name(i), p)),
                }
            }
            let body = parts.join("*");
            if first {
                if c.is_negative() {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// An element of the coefficient field: `num / prod_i den_i^m_i` with every
/// denominator factor primitive and hopping-free.
#[derive(Debug, Clone)]
pub struct ScalarValue {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl ScalarValue {
    pub fn from_poly(num: Poly) -> ScalarValue {
        ScalarValue {
            num,
            den: Vec::new(),
        }
    }

    pub fn zero(sym: &Symbols) -> ScalarValue {
        ScalarValue::from_poly(Poly::zero(sym))
    }

    pub fn one(sym: &Symbols) -> ScalarValue {
        ScalarValue::from_poly(Poly::one(sym))
    }

    pub fn constant(sym: &Symbols, c: BigRational) -> ScalarValue {
        ScalarValue::from_poly(Poly::constant(sym, c))
    }

    pub fn named(sym: &Symbols, name: &str) -> ScalarValue {
        ScalarValue::from_poly(Poly::named(sym, name))
    }

    pub fn symbols(&self) -> &Symbols {
        self.num.symbols()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the value is a polynomial (trivial denominator).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut new_den: Vec<(Poly, u32)> = Vec::with_capacity(self.den.len());
        for (f, mut m) in std::mem::take(&mut self.den) {
            while m > 0 {
                match self.num.exact_div(&f) {
                    Some(q) => {
                        self.num = q;
                        m -= 1;
                    }
                    None => break,
                }
            }
            if m > 0 {
                new_den.push((f, m));
            }
        }
        new_den.sort();
        self.den = new_den;
    }

    fn den_product(&self) -> Poly {
        let mut p = Poly::one(self.num.symbols());
        for (f, m) in &self.den {
            p = p.mul(&f.pow(*m));
        }
        p
    }

    pub fn add(&self, other: &ScalarValue) -> ScalarValue {
        // Least common denominator, factorwise.
        let mut lcm: Vec<(Poly, u32)> = self.den.clone();
        for (f, m) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*m),
                None => lcm.push((f.clone(), *m)),
            }
        }
        let cofactor = |own: &[(Poly, u32)]| {
            let mut p = Poly::one(self.num.symbols());
            for (f, m) in &lcm {
                let have = own
                    .iter()
                    .find(|(g, _)| g == f)
                    .map(|(_, k)| *k)
                    .unwrap_or(0);
                p = p.mul(&f.pow(m - have));
            }
            p
        };
        let num = self
            .num
            .mul(&cofactor(&self.den))
            .add(&other.num.mul(&cofactor(&other.den)));
        let mut out = ScalarValue { num, den: lcm };
        out.reduce();
        out
    }

    pub fn neg(&self) -> ScalarValue {
        ScalarValue {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &ScalarValue) -> ScalarValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ScalarValue) -> ScalarValue {
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k += m,
                None => den.push((f.clone(), *m)),
            }
        }
        let mut out = ScalarValue {
            num: self.num.mul(&other.num),
            den,
        };
        out.reduce();
        out
    }

    pub fn scale(&self, c: &BigRational) -> ScalarValue {
        let mut out = ScalarValue {
            num: self.num.scale(c),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> ScalarValue {
        self.mul(&ScalarValue::from_poly(p.clone()))
    }

    /// Divides by a classical (hopping-free) polynomial, the only division the
    /// field needs: denominators are built one energy difference at a time.
    pub fn div_classical(&self, p: &Poly) -> Result<ScalarValue, ScalarError> {
        if p.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if !p.is_hopping_free() {
            return Err(ScalarError::HoppingDenominator(p.to_string()));
        }
        let (content, prim) = p.primitive_part();
        let mut out = self.scale(&content.recip());
        if !prim.is_constant() {
            match out.den.iter_mut().find(|(g, _)| *g == prim) {
                Some((_, k)) => *k += 1,
                None => out.den.push((prim, 1)),
            }
        } else {
            // Primitive part of a constant is 1.
            debug_assert!(prim.constant_term().is_one());
        }
        out.reduce();
        Ok(out)
    }

    /// Equality by cross-multiplication.
    pub fn eq_value(&self, other: &ScalarValue) -> bool {
        self.num.mul(&other.den_product()) == other.num.mul(&self.den_product())
    }

    pub fn hopping_degree(&self) -> Option<u32> {
        self.num.hopping_degree()
    }

    pub fn min_hopping_degree(&self) -> Option<u32> {
        self.num.min_hopping_degree()
    }

    pub fn truncate_hopping(&self, deg: u32) -> ScalarValue {
        let mut out = ScalarValue {
            num: self.num.truncate_hopping(deg),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    /// Keeps the part of hopping degree exactly `deg`.
    pub fn hopping_component(&self, deg: u32) -> ScalarValue {
        let mut out = ScalarValue {
            num: self.num.hopping_component(deg),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    pub fn eval(&self, values: &[BigRational]) -> Result<BigRational, ScalarError> {
        let mut acc = self.num.eval(values);
        for (f, m) in &self.den {
            let v = f.eval(values);
            if v.is_zero() {
                return Err(ScalarError::EvalDenominatorZero(f.to_string()));
            }
            for _ in 0..*m {
                acc /= &v;
            }
        }
        Ok(acc)
    }

    pub fn to_f64(&self, values: &[BigRational]) -> Result<f64, ScalarError> {
        Ok(rational_to_f64(&self.eval(values)?))
    }
}

impl PartialEq for ScalarValue {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}
impl Eq for ScalarValue {}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let mut den = String::new();
        for (i, (p, m)) in self.den.iter().enumerate() {
            if i > 0 {
                den.push('*');
            }
            if *m == 1 {
                den.push_str(&format!("({p})"));
            } else {
                den.push_str(&format!("({p})^{m}"));
            }
        }
        write!(f, "({}) / {}", self.num, den)
    }
}

/// Parses `p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::BadRational(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(p, q))
    } else if let Some(rest) = s.strip_prefix("-") {
        // Allow plain integers, including negative ones.
        let p: BigInt = rest.trim().parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(-p))
    } else {
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(p))
    }
}

/// Renders an exact rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of leading 64-bit reductions; values in this
        // crate are far from overflow in practice.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn big_rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn big_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn syms() -> Symbols {
        SymbolSet::new(&["t", "s", "U", "h"], &["t", "s"])
    }

    fn classical() -> Symbols {
        syms()
    }

    #[test]
    fn poly_basics() {
        let sy = syms();
        let t = Poly::named(&sy, "t");
        let u = Poly::named(&sy, "U");
        let p = t.mul(&t).add(&u.scale(&big_int(3)));
        assert_eq!(p.to_string(), "t^2 + 3*U");
        assert_eq!(p.hopping_degree(), Some(2));
        assert_eq!(p.min_hopping_degree(), Some(0));
        assert_eq!(p.truncate_hopping(1).to_string(), "3*U");
        let vals = [big_int(2), big_int(0), big_int(5), big_int(0)];
        assert_eq!(p.eval(&vals), big_int(19));
    }

    #[test]
    fn exact_division_roundtrip() {
        let sy = syms();
        let u = Poly::named(&sy, "U");
        let h = Poly::named(&sy, "h");
        let a = u.mul(&u).add(&h.scale(&big_rational(-3, 2)));
        let b = u.add(&h).add(&Poly::one(&sy));
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(a.exact_div(&b).is_none());
    }

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let sy = syms();
        let u = Poly::named(&sy, "U");
        let h = Poly::named(&sy, "h");
        let p = u.scale(&big_rational(-2, 3)).add(&h.scale(&big_int(-2)));
        let (c, prim) = p.primitive_part();
        assert_eq!(prim.mul(&Poly::constant(&sy, c.clone())), p);
        // Leading (lexicographically largest) coefficient positive, integer
        // coefficients with gcd one.
        assert_eq!(prim.to_string(), "U + 3*h");
        assert_eq!(c, big_rational(-2, 3));
    }

    #[test]
    fn division_by_energy_difference_cancels() {
        let sy = syms();
        let t = ScalarValue::named(&sy, "t");
        let u = Poly::named(&sy, "U");
        let x = t.div_classical(&u).unwrap();
        let y = x.mul_poly(&u);
        assert!(y.eq_value(&t));
        assert!(y.is_polynomial());
    }

    #[test]
    fn hopping_denominator_rejected() {
        let sy = syms();
        let one = ScalarValue::one(&sy);
        let t = Poly::named(&sy, "t");
        assert!(matches!(
            one.div_classical(&t),
            Err(ScalarError::HoppingDenominator(_))
        ));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), big_rational(3, 4));
        assert_eq!(parse_rational("-3/4").unwrap(), big_rational(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), big_int(7));
        assert_eq!(parse_rational(" -7 ").unwrap(), big_int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(format_rational(&big_rational(-6, 4)), "-3/2");
        assert_eq!(format_rational(&big_int(5)), "5");
    }

    // Random small polynomials over the full symbol set.
    fn arb_poly(max_terms: usize, hopping_ok: bool) -> impl Strategy<Value = Poly> {
        let exp = if hopping_ok { 0..3u8 } else { 0..1u8 };
        let term = (
            proptest::collection::vec(exp, 4),
            -4i64..5i64,
            1i64..4i64,
        );
        proptest::collection::vec(term, 0..=max_terms).prop_map(|ts| {
            let sy = syms();
            let mut p = Poly::zero(&sy);
            for (mut e, n, d) in ts {
                if n == 0 {
                    continue;
                }
                // Keep classical-only polynomials classical.
                e[2] %= 3;
                e[3] %= 3;
                let mut terms = BTreeMap::new();
                terms.insert(e, big_rational(n, d));
                p = p.add(&Poly {
                    sym: sy.clone(),
                    terms,
                });
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        // (a/b) * (b/a) = 1 over classical polynomials.
        #[test]
        fn reciprocal_pairs_cancel(a in arb_poly(3, false), b in arb_poly(3, false)) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let sy = classical();
            let lhs = ScalarValue::from_poly(a.clone()).div_classical(&b).unwrap();
            let rhs = ScalarValue::from_poly(b).div_classical(&a).unwrap();
            prop_assert!(lhs.mul(&rhs).eq_value(&ScalarValue::one(&sy)));
        }

        // Degree truncation is linear and idempotent.
        #[test]
        fn truncation_commutes_with_addition(
            a in arb_poly(4, true),
            b in arb_poly(4, true),
            den in arb_poly(2, false),
            d in 0u32..5,
        ) {
            prop_assume!(!den.is_zero());
            let x = ScalarValue::from_poly(a).div_classical(&den).unwrap();
            let y = ScalarValue::from_poly(b).div_classical(&den).unwrap();
            let lhs = x.add(&y).truncate_hopping(d);
            let rhs = x.truncate_hopping(d).add(&y.truncate_hopping(d));
            prop_assert!(lhs.eq_value(&rhs));
            prop_assert!(lhs.truncate_hopping(d).eq_value(&lhs));
        }

        // Field laws on a mix of polynomial and fractional values.
        #[test]
        fn ring_laws(a in arb_poly(3, true), b in arb_poly(3, true), c in arb_poly(3, true)) {
            let (a, b, c) = (
                ScalarValue::from_poly(a),
                ScalarValue::from_poly(b),
                ScalarValue::from_poly(c),
            );
            prop_assert!(a.add(&b).eq_value(&b.add(&a)));
            prop_assert!(a.mul(&b).eq_value(&b.mul(&a)));
            prop_assert!(a.mul(&b.add(&c)).eq_value(&a.mul(&b).add(&a.mul(&c))));
            prop_assert!(a.add(&b).add(&c).eq_value(&a.add(&b.add(&c))));
        }

        // Evaluation is a ring homomorphism wherever denominators survive.
        #[test]
        fn eval_homomorphism(a in arb_poly(3, true), b in arb_poly(3, true)) {
            let vals = [big_int(2), big_rational(1, 3), big_int(7), big_rational(-1, 2)];
            let (x, y) = (ScalarValue::from_poly(a), ScalarValue::from_poly(b));
            let s = x.add(&y).eval(&vals).unwrap();
            prop_assert_eq!(s, x.eval(&vals).unwrap() + y.eval(&vals).unwrap());
            let p = x.mul(&y).eval(&vals).unwrap();
            prop_assert_eq!(p, x.eval(&vals).unwrap() * y.eval(&vals).unwrap());
        }
    }
}
