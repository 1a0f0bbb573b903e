use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::error::DiffPolyError;
use super::field::{FieldId, JetVar};
use super::param::{int, ParamPoly, ParamSymbol, Rational};

/// Product of jet-variable powers, sorted by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(JetVar, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial::power(v, 1)
    }

    pub fn power(v: JetVar, e: u32) -> Self {
        let mut s = SmallVec::new();
        if e > 0 {
            s.push((v, e));
        }
        Monomial(s)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: SmallVec<[(JetVar, u32); 4]> = SmallVec::new();
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let d = other.0[j].1;
                j += 1;
                if d > e {
                    return None;
                }
                if d < e {
                    out.push((v, e - d));
                }
            } else {
                out.push((v, e));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(v, e) in &self.0 {
            let f = other.exponent(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<JetVar, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            let slot = map.entry(v).or_insert(0);
            *slot = (*slot).max(e);
        }
        Monomial(map.into_iter().collect())
    }

    /// Product of the distinct variables (squarefree part).
    pub fn radical(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, _)| (v, 1)).collect())
    }

    /// Replace one power of `v` by one power of `w`.
    fn shift_var(&self, v: JetVar, w: JetVar) -> Monomial {
        let reduced = self.div(&Monomial::var(v)).expect("variable present");
        reduced.mul(&Monomial::var(w))
    }

    pub fn to_display(&self) -> String {
        let mut s = String::new();
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                s.push('*');
            }
            if *e == 1 {
                s.push_str(&v.to_string());
            } else {
                s.push_str(&format!("{v}^{e}"));
            }
        }
        s
    }
}

/// Polynomial in jet variables with parameter-polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, ParamPoly>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(ParamPoly::one())
    }

    pub fn constant(c: ParamPoly) -> Self {
        DiffPoly::term(Monomial::one(), c)
    }

    pub fn rational(c: Rational) -> Self {
        DiffPoly::constant(ParamPoly::constant(c))
    }

    pub fn var(v: JetVar) -> Self {
        DiffPoly::term(Monomial::var(v), ParamPoly::one())
    }

    pub fn field(f: FieldId) -> Self {
        DiffPoly::var(JetVar::new(f, 0))
    }

    pub fn monomial(m: Monomial) -> Self {
        DiffPoly::term(m, ParamPoly::one())
    }

    pub fn term(m: Monomial, c: ParamPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&ParamPoly> {
        self.terms.get(m)
    }

    /// The coefficient if the polynomial contains no jet variables.
    pub fn as_constant(&self) -> Option<ParamPoly> {
        match self.terms.len() {
            0 => Some(ParamPoly::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_single_term(&self) -> Option<(&Monomial, &ParamPoly)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &DiffPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &DiffPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub fn scale(&self, c: &ParamPoly) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        let mut out = DiffPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul_ref(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> DiffPoly {
        self.scale(&ParamPoly::constant(c.clone()))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> DiffPoly {
        if m.is_one() {
            return self.clone();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    /// Exact division by a monomial dividing every term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<DiffPoly> {
        if m.is_one() {
            return Some(self.clone());
        }
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(k.div(m)?, v.clone());
        }
        Some(DiffPoly { terms })
    }

    pub fn mul_ref(&self, other: &DiffPoly) -> DiffPoly {
        if self.is_zero() || other.is_zero() {
            return DiffPoly::zero();
        }
        if let Some((m, c)) = other.as_single_term() {
            return self.mul_monomial(m).scale(c);
        }
        if let Some((m, c)) = self.as_single_term() {
            return other.mul_monomial(m).scale(c);
        }
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        out
    }

    /// Greatest common monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| *v))
            .collect()
    }

    pub fn param_symbols(&self) -> BTreeSet<ParamSymbol> {
        self.terms.values().flat_map(|c| c.symbols()).collect()
    }

    /// Highest derivative order of any jet variable, or `None` for constants.
    pub fn max_order(&self) -> Option<u8> {
        self.vars().into_iter().map(|v| v.order).max()
    }

    /// Total x-derivative `D`.
    pub fn total_derivative(&self, max_order: u8) -> Result<DiffPoly, DiffPolyError> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for &(v, e) in m.factors() {
                let w = v.next(max_order).ok_or(DiffPolyError::JetOrderOverflow {
                    field: v.field,
                    order: v.order as u32 + 1,
                    max: max_order,
                })?;
                out.add_term(m.shift_var(v, w), c.scale(&int(e as i64)));
            }
        }
        Ok(out)
    }

    /// Partial derivative with respect to one jet variable.
    pub fn partial(&self, v: JetVar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let reduced = m.div(&Monomial::var(v)).expect("exponent checked");
                out.add_term(reduced, c.scale(&int(e as i64)));
            }
        }
        out
    }

    pub fn substitute_params(&self, map: &BTreeMap<ParamSymbol, ParamPoly>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.substitute(map));
        }
        out
    }

    /// Divide out the leading rational coefficient; returns (scalar, normalised).
    pub(crate) fn normalize_scalar(&self) -> (Rational, DiffPoly) {
        let lead = self
            .terms
            .values()
            .next()
            .and_then(|c| c.leading_coefficient().cloned())
            .unwrap_or_else(Rational::one);
        if lead.is_one() {
            return (lead, self.clone());
        }
        let inv = Rational::one() / &lead;
        (lead, self.scale_rational(&inv))
    }

    pub fn to_display(&self) -> String {
        use std::fmt::Write;
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let first = i == 0;
            let mono = m.to_display();
            if let Some(r) = c.as_constant() {
                super::param::write_signed_term(&mut s, first, &r, &mono).unwrap();
            } else if let Some((pm, pc)) = single_param_term(c) {
                let factors = match (pm.is_empty(), mono.is_empty()) {
                    (false, false) => format!("{pm}*{mono}"),
                    (false, true) => pm,
                    (true, _) => mono,
                };
                super::param::write_signed_term(&mut s, first, &pc, &factors).unwrap();
            } else {
                if !first {
                    s.push_str(" + ");
                }
                if mono.is_empty() {
                    write!(s, "({c})").unwrap();
                } else {
                    write!(s, "({c})*{mono}").unwrap();
                }
            }
        }
        s
    }
}

fn single_param_term(c: &ParamPoly) -> Option<(String, Rational)> {
    if c.len() != 1 {
        return None;
    }
    let (m, r) = c.terms().next()?;
    Some((m.to_string(), r.clone()))
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        self.mul_ref(rhs)
    }
}

impl Zero for DiffPoly {
    fn zero() -> Self {
        DiffPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::ops::Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self.add_assign_ref(&rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use FieldId::*;

    fn v(f: FieldId, k: u8) -> JetVar {
        JetVar::new(f, k)
    }

    #[test]
    fn monomial_division_and_gcd() {
        let a = Monomial::power(v(M11, 0), 3).mul(&Monomial::var(v(M01, 1)));
        let b = Monomial::power(v(M11, 0), 2);
        assert_eq!(a.div(&b).unwrap(), Monomial::var(v(M11, 0)).mul(&Monomial::var(v(M01, 1))));
        assert!(b.div(&a).is_none());
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn derivative_of_square() {
        let p = DiffPoly::field(P10).pow(2);
        let d = p.total_derivative(12).unwrap();
        let expect = DiffPoly::term(
            Monomial::var(v(P10, 0)).mul(&Monomial::var(v(P10, 1))),
            ParamPoly::constant(int(2)),
        );
        assert_eq!(d, expect);
    }

    #[test]
    fn derivative_overflow_is_reported() {
        let p = DiffPoly::var(v(P11, 12));
        assert!(matches!(
            p.total_derivative(12),
            Err(DiffPolyError::JetOrderOverflow { .. })
        ));
    }

    #[test]
    fn monomial_content_of_sum() {
        let a = DiffPoly::monomial(Monomial::power(v(M11, 0), 2).mul(&Monomial::var(v(P10, 0))));
        let b = DiffPoly::monomial(Monomial::var(v(M11, 0)));
        assert_eq!((&a + &b).monomial_content(), Monomial::var(v(M11, 0)));
    }
}
