//! Exact symbolic algebra of polynomial differential functions.
//!
//! A differential polynomial is a polynomial in the jet variables
//! `u0, u1, u2, …` (the value of a function and its derivatives) with exact
//! rational coefficients. The independent variable never appears explicitly:
//! every formula handled here is autonomous. On this algebra we implement
//!
//! * the total derivative `D w = Σ_p (∂w/∂u_p) u_{p+1}`,
//! * the Euler operator `E w = Σ_ℓ (−1)^ℓ D^ℓ (∂w/∂u_ℓ)` (the variational
//!   derivative), whose kernel on constant-free polynomials is exactly the
//!   image of `D`,
//! * exact inversion of `D` by repeated integration by parts,
//! * the third-order Hamiltonian operator `𝒟 = D³ + 4 u0 D + 2 u1`,
//! * reconstruction of a density from its variational gradient by the
//!   homotopy formula `p = ∫₀¹ g[εu]·u0 dε`.
//!
//! Coefficients are arbitrary-precision rationals so that all identities
//! (`E∘D = 0`, the Lenard chain, …) hold exactly, not within a tolerance.
//! Floating point enters only in [`DiffPoly::evaluate`].

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::ParseError;

/// Exact coefficient type used throughout the symbolic layer.
pub type Rational = num_rational::BigRational;

/// Errors produced by the symbolic operators.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiffPolyError {
    /// The argument is not a total derivative: `E(w) ≠ 0`, or a nonzero
    /// constant term survives (constants have no autonomous primitive).
    #[error("not an exact differential: {0}")]
    NotExact(String),
    /// Homotopy reconstruction failed the a-posteriori check `E(p) = g`,
    /// i.e. `g` is not a variational gradient.
    #[error("not a variational gradient: {0}")]
    NotGradient(String),
    /// `evaluate` was given a jet shorter than the highest order present.
    #[error("jet too short: order {required} required, {supplied} values supplied")]
    JetTooShort { required: usize, supplied: usize },
}

/// A monomial `∏ u_j^{e_j}` in the jet variables, stored as a sparse map
/// from jet order to exponent. The empty map is the constant monomial `1`.
///
/// Invariant: all stored exponents are ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exponents: BTreeMap<usize, u32>,
}

impl Monomial {
    /// The constant monomial `1`.
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The single jet variable `u_j`.
    pub fn var(j: usize) -> Self {
        Monomial::one().with(j, 1)
    }

    /// Returns a copy with the exponent of `u_j` raised by `e`.
    pub fn with(&self, j: usize, e: u32) -> Self {
        let mut m = self.clone();
        if e > 0 {
            *m.exponents.entry(j).or_insert(0) += e;
        }
        m
    }

    /// Returns a copy with the exponent of `u_j` lowered by one.
    /// Panics if `u_j` does not appear.
    fn without_one(&self, j: usize) -> Self {
        let mut m = self.clone();
        let e = m.exponents.get_mut(&j).expect("variable not present");
        if *e == 1 {
            m.exponents.remove(&j);
        } else {
            *e -= 1;
        }
        m
    }

    /// Product of two monomials (exponents add).
    pub fn product(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (&j, &e) in &other.exponents {
            *m.exponents.entry(j).or_insert(0) += e;
        }
        m
    }

    /// Total degree `Σ e_j`.
    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    /// Highest jet order with a nonzero exponent, or `None` for the constant.
    pub fn max_order(&self) -> Option<usize> {
        self.exponents.keys().next_back().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Exponent of `u_j` (zero if absent).
    pub fn exponent(&self, j: usize) -> u32 {
        self.exponents.get(&j).copied().unwrap_or(0)
    }

    /// Iterator over `(jet order, exponent)` pairs in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exponents.iter().map(|(&j, &e)| (j, e))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order: total degree, then highest jet order,
    /// then the exponent vector read from the highest order down.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.max_order().cmp(&other.max_order()))
            .then_with(|| {
                let top = self.max_order().max(other.max_order()).unwrap_or(0);
                for j in (0..=top).rev() {
                    let c = self.exponent(j).cmp(&other.exponent(j));
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, e) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "u{j}")?;
            } else {
                write!(f, "u{j}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A differential polynomial: a finite sum `Σ c_m · m` over monomials with
/// nonzero exact rational coefficients. The representation is canonical —
/// two values are mathematically equal iff their term maps are identical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    /// The constant polynomial `r`.
    pub fn constant(r: Rational) -> Self {
        let mut p = DiffPoly::zero();
        if !r.is_zero() {
            p.terms.insert(Monomial::one(), r);
        }
        p
    }

    /// Convenience constructor for an integer constant.
    pub fn from_int(n: i64) -> Self {
        DiffPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// Convenience constructor for the rational constant `num/den`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        DiffPoly::constant(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The jet variable `u_j` as a polynomial.
    pub fn var(j: usize) -> Self {
        DiffPoly::term(Rational::one(), Monomial::var(j))
    }

    /// A single term `c · m`.
    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = DiffPoly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterator over `(monomial, coefficient)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// Highest jet order appearing, or `None` for a constant (or zero).
    pub fn max_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_order).max()
    }

    /// Total degree of the largest term (0 for constants; `None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Multiplication by an exact scalar.
    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return DiffPoly::zero();
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect();
        DiffPoly { terms }
    }

    /// Convenience scaling by an integer ratio.
    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Partial derivative `∂/∂u_j`.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(j);
            if e > 0 {
                out.insert(m.without_one(j), c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Total derivative `D w = Σ_p (∂w/∂u_p) · u_{p+1}`.
    pub fn total_derivative(&self) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (j, e) in m.iter() {
                let dm = m.without_one(j).with(j + 1, 1);
                out.insert(dm, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// `D^n w`.
    pub fn total_derivative_n(&self, n: usize) -> Self {
        let mut w = self.clone();
        for _ in 0..n {
            w = w.total_derivative();
        }
        w
    }

    /// Euler operator `E w = Σ_ℓ (−1)^ℓ D^ℓ (∂w/∂u_ℓ)`: the variational
    /// derivative of the density `w`. `E(Dv) = 0` for every `v`.
    pub fn euler_operator(&self) -> Self {
        let top = match self.max_order() {
            Some(t) => t,
            None => return DiffPoly::zero(),
        };
        let mut out = DiffPoly::zero();
        for ell in 0..=top {
            let mut t = self.partial(ell).total_derivative_n(ell);
            if ell % 2 == 1 {
                t = -&t;
            }
            out = &out + &t;
        }
        out
    }

    /// True iff `E(w) = 0`, i.e. `w` is a total derivative up to an additive
    /// constant.
    pub fn is_total_derivative(&self) -> bool {
        self.euler_operator().is_zero()
    }

    /// Exact inverse of the total derivative: returns the unique `p` with
    /// `D p = w` and zero constant term.
    ///
    /// Works by integration by parts on the highest jet variable: any exact
    /// `w` of order `m ≥ 1` is linear in `u_m`, `w = A·u_m + B` with `A`, `B`
    /// of order < `m`; subtracting `D(∫ A du_{m−1})` strictly lowers the
    /// order. A nonzero residue of order 0 (a polynomial in `u0` alone,
    /// constants included) means `w` was not exact.
    pub fn primitive(&self) -> Result<Self, DiffPolyError> {
        if !self.is_total_derivative() {
            return Err(DiffPolyError::NotExact(format!(
                "E(w) = {} is nonzero",
                self.euler_operator()
            )));
        }
        let mut w = self.clone();
        let mut out = DiffPoly::zero();
        while !w.is_zero() {
            let m = match w.max_order() {
                Some(m) if m >= 1 => m,
                _ => {
                    return Err(DiffPolyError::NotExact(format!(
                        "residue {w} of jet order 0 has no autonomous primitive"
                    )));
                }
            };
            // Coefficient of u_m; exactness guarantees linearity in u_m.
            let mut a = DiffPoly::zero();
            for (mono, c) in &w.terms {
                let e = mono.exponent(m);
                if e > 1 {
                    return Err(DiffPolyError::NotExact(format!(
                        "term {mono} is nonlinear in the top variable u{m}"
                    )));
                }
                if e == 1 {
                    a.insert(mono.without_one(m), c.clone());
                }
            }
            let piece = a.antiderivative_in(m - 1);
            w = &w - &piece.total_derivative();
            out = &out + &piece;
        }
        Ok(out)
    }

    /// Formal antiderivative with respect to the single variable `u_j`
    /// (power rule; no constant of integration).
    fn antiderivative_in(&self, j: usize) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(j) + 1;
            out.insert(m.with(j, 1), c / Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// The operator `𝒟 w = D³ w + 4 u0 · D w + 2 u1 · w`.
    pub fn apply_script_d(&self) -> Self {
        let d1 = self.total_derivative();
        let d3 = d1.total_derivative().total_derivative();
        let u0_term = (&DiffPoly::var(0) * &d1).scale_ratio(4, 1);
        let u1_term = (&DiffPoly::var(1) * self).scale_ratio(2, 1);
        &(&d3 + &u0_term) + &u1_term
    }

    /// Reconstructs a density from a variational gradient by the homotopy
    /// formula `p = ∫₀¹ g[εu]·u0 dε`: a monomial of total degree `d` in `g`
    /// is multiplied by `u0` and its coefficient divided by `d + 1`.
    ///
    /// The result always has zero constant term, so a density is recovered
    /// from its own gradient only modulo constants and total derivatives.
    /// The reconstruction is verified a posteriori; if `E(p) ≠ g` the input
    /// was not a gradient.
    pub fn potential_from_gradient(&self) -> Result<Self, DiffPolyError> {
        let mut p = DiffPoly::zero();
        for (m, c) in &self.terms {
            let d = m.degree() + 1;
            p.insert(m.with(0, 1), c / Rational::from_integer(BigInt::from(d)));
        }
        if p.euler_operator() != *self {
            return Err(DiffPolyError::NotGradient(format!(
                "E(homotopy({self})) differs from the input"
            )));
        }
        Ok(p)
    }

    /// True iff `a` and `b` define the same functional, i.e. `E(a − b) = 0`
    /// (densities are meaningful only up to total derivatives).
    pub fn equal_mod_d(&self, other: &Self) -> bool {
        (self - other).is_total_derivative()
    }

    /// Numeric evaluation on a jet `(u0, u1, …)`. Coefficients are converted
    /// to `f64` at this point and nowhere else.
    pub fn evaluate(&self, jet: &[f64]) -> Result<f64, DiffPolyError> {
        if let Some(m) = self.max_order() {
            if m >= jet.len() {
                return Err(DiffPolyError::JetTooShort {
                    required: m,
                    supplied: jet.len(),
                });
            }
        }
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().expect("rational out of f64 range");
            for (j, e) in m.iter() {
                t *= jet[j].powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Renders to the `3*u0^2 + u2` text form. `Display` uses this.
    pub fn to_text(&self) -> String {
        format!("{self}")
    }

    /// Parses the `3*u0^2 + u2` text form.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text)
    }
}

fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Largest term first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_constant() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        DiffPoly { terms }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.product(mb), ca * cb);
            }
        }
        out
    }
}

/// JSON form of one term: exact coefficient as a `"p/q"` string, exponents
/// as a map from jet order to exponent.
#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    exponents: BTreeMap<String, u32>,
}

impl Serialize for DiffPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| TermJson {
                coeff: format_rational(c),
                exponents: m.iter().map(|(j, e)| (j.to_string(), e)).collect(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let mut p = DiffPoly::zero();
        for t in terms {
            let c: Rational = t
                .coeff
                .parse()
                .map_err(|e| serde::de::Error::custom(format!("bad coefficient: {e}")))?;
            let mut m = Monomial::one();
            for (j, e) in t.exponents {
                let j: usize = j
                    .parse()
                    .map_err(|e| serde::de::Error::custom(format!("bad jet order: {e}")))?;
                m = m.with(j, e);
            }
            p.insert(m, c);
        }
        Ok(p)
    }
}
