use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::error::DiffPolyError;
use super::field::FieldId;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A named scalar parameter such as `nu11` or `b10`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSymbol(Arc<str>);

impl ParamSymbol {
    pub fn new(name: &str) -> Result<Self, DiffPolyError> {
        let mut chars = name.chars();
        let valid_start = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !valid_start || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(DiffPolyError::InvalidParameter(name.to_string()));
        }
        if FieldId::from_name(name).is_some() {
            return Err(DiffPolyError::InvalidParameter(name.to_string()));
        }
        Ok(ParamSymbol(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Set of parameter names accepted by a parsing session.
///
/// An open registry accepts every identifier that is not a field name.
#[derive(Clone, Debug, Default)]
pub struct ParamRegistry {
    names: Option<BTreeSet<ParamSymbol>>,
}

impl ParamRegistry {
    pub fn open() -> Self {
        ParamRegistry { names: None }
    }

    pub fn closed<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self, DiffPolyError> {
        let mut set = BTreeSet::new();
        for n in names {
            let sym = ParamSymbol::new(n)?;
            if !set.insert(sym) {
                return Err(DiffPolyError::InvalidParameter(format!("duplicate {n}")));
            }
        }
        Ok(ParamRegistry { names: Some(set) })
    }

    pub fn lookup(&self, name: &str) -> Option<ParamSymbol> {
        match &self.names {
            None => ParamSymbol::new(name).ok(),
            Some(set) => set.iter().find(|s| s.name() == name).cloned(),
        }
    }
}

/// Product of parameter powers, sorted by symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamMonomial(SmallVec<[(ParamSymbol, u32); 2]>);

impl ParamMonomial {
    pub fn one() -> Self {
        ParamMonomial(SmallVec::new())
    }

    pub fn var(p: ParamSymbol) -> Self {
        let mut v = SmallVec::new();
        v.push((p, 1));
        ParamMonomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(ParamSymbol, u32)] {
        &self.0
    }

    fn mul(&self, other: &ParamMonomial) -> ParamMonomial {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        ParamMonomial(out)
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in the symbolic parameters with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMonomial, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ParamMonomial::one(), c);
        }
        ParamPoly { terms }
    }

    pub fn var(p: ParamSymbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(ParamMonomial::var(p), Rational::one());
        ParamPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ParamMonomial, Rational)>) -> Self {
        let mut out = ParamPoly::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(ParamMonomial::degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<ParamSymbol> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(p, _)| p.clone()))
            .collect()
    }

    /// Leading coefficient in canonical order, used to normalise scalar content.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    pub fn add_term(&mut self, m: ParamMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ParamPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul_ref(&self, other: &ParamPoly) -> ParamPoly {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = ParamPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut out = ParamPoly::one();
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    /// Replace parameters by polynomials; parameters not in the map are kept.
    pub fn substitute(&self, map: &BTreeMap<ParamSymbol, ParamPoly>) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (m, c) in &self.terms {
            let mut term = ParamPoly::constant(c.clone());
            for (p, e) in &m.0 {
                let base = map.get(p).cloned().unwrap_or_else(|| ParamPoly::var(p.clone()));
                term = term.mul_ref(&base.pow(*e));
            }
            out.add_assign_ref(&term);
        }
        out
    }

    /// Constant term and per-symbol linear coefficients. Fails for degree ≥ 2.
    pub fn linear_parts(&self) -> Option<(Rational, BTreeMap<ParamSymbol, Rational>)> {
        let mut constant = Rational::zero();
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.terms {
            match m.0.as_slice() {
                [] => constant = c.clone(),
                [(p, 1)] => {
                    coeffs.insert(p.clone(), c.clone());
                }
                _ => return None,
            }
        }
        Some((constant, coeffs))
    }

    /// Numeric value given values for every parameter that occurs.
    pub fn evaluate(&self, values: &BTreeMap<ParamSymbol, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (p, e) in &m.0 {
                let v = values.get(p)?;
                for _ in 0..*e {
                    t *= v;
                }
            }
            acc += t;
        }
        Some(acc)
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.add_assign_ref(&-rhs);
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        self.mul_ref(rhs)
    }
}

pub(crate) fn write_rational_abs(f: &mut impl fmt::Write, c: &Rational) -> fmt::Result {
    let a = c.abs();
    if a.is_integer() {
        write!(f, "{}", a.numer())
    } else {
        write!(f, "{}/{}", a.numer(), a.denom())
    }
}

/// Writes `±coef*factors` summands with canonical sign handling.
pub(crate) fn write_signed_term(
    f: &mut impl fmt::Write,
    first: bool,
    c: &Rational,
    factors: &str,
) -> fmt::Result {
    let neg = c.is_negative();
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let a = c.abs();
    if factors.is_empty() {
        return write_rational_abs(f, &a);
    }
    if a.is_one() {
        f.write_str(factors)
    } else if a.is_integer() {
        write!(f, "{}*{}", a.numer(), factors)
    } else {
        write!(f, "({}/{})*{}", a.numer(), a.denom(), factors)
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        // Higher-degree monomials first reads more naturally; constants last.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| a.is_one().cmp(&b.is_one()).then(a.cmp(b)));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            write_signed_term(&mut s, i == 0, c, &m.to_string())?;
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> ParamPoly {
        ParamPoly::var(ParamSymbol::new(n).unwrap())
    }

    #[test]
    fn rejects_field_names_and_bad_identifiers() {
        assert!(ParamSymbol::new("m11").is_err());
        assert!(ParamSymbol::new("").is_err());
        assert!(ParamSymbol::new("1a").is_err());
        assert!(ParamSymbol::new("gamma10").is_ok());
    }

    #[test]
    fn closed_registry_rejects_duplicates() {
        assert!(ParamRegistry::closed(["a", "a"]).is_err());
        let r = ParamRegistry::closed(["a", "b"]).unwrap();
        assert!(r.lookup("a").is_some());
        assert!(r.lookup("c").is_none());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = &p("a") + &ParamPoly::one();
        let d = &a - &a;
        assert!(d.is_zero());
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn linear_parts_split_constant_and_coefficients() {
        let e = &(&p("a").scale(&int(2)) - &p("b")) + &ParamPoly::constant(rat(1, 2));
        let (c, m) = e.linear_parts().unwrap();
        assert_eq!(c, rat(1, 2));
        assert_eq!(m.len(), 2);
        assert!((&p("a") * &p("b")).linear_parts().is_none());
    }

    #[test]
    fn display_orders_constants_last() {
        let e = &(&p("nu01") - &p("nu10")) + &ParamPoly::constant(int(-3));
        assert_eq!(e.to_string(), "nu01 - nu10 - 3");
        assert_eq!(p("a").scale(&rat(1, 2)).to_string(), "(1/2)*a");
    }
}
