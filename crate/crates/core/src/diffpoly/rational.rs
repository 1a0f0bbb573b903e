use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::error::DiffPolyError;
use super::field::{FieldId, JetVar, DEFAULT_MAX_ORDER};
use super::param::{ParamPoly, ParamSymbol, Rational};
use super::poly::{DiffPoly, Monomial};

/// Factored denominator: a jet monomial times powers of normalised polynomial factors.
///
/// Each factor has no monomial content and a leading rational coefficient of one,
/// so syntactically equal factors are detected by plain equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Denominator {
    mono: Monomial,
    factors: Vec<(DiffPoly, u32)>,
}

impl Denominator {
    pub fn one() -> Self {
        Denominator::default()
    }

    pub fn is_one(&self) -> bool {
        self.mono.is_one() && self.factors.is_empty()
    }

    pub fn monomial(&self) -> &Monomial {
        &self.mono
    }

    /// Non-monomial factors with their exponents.
    pub fn factors(&self) -> &[(DiffPoly, u32)] {
        &self.factors
    }

    pub fn is_monomial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Split a nonzero polynomial into `scalar * denominator`.
    fn from_poly(q: &DiffPoly) -> Result<(Rational, Denominator), DiffPolyError> {
        if q.is_zero() {
            return Err(DiffPolyError::DivisionByZeroExpr);
        }
        if let Some((m, c)) = q.as_single_term() {
            if let Some(r) = c.as_constant() {
                return Ok((
                    r,
                    Denominator {
                        mono: m.clone(),
                        factors: Vec::new(),
                    },
                ));
            }
        }
        let content = q.monomial_content();
        let reduced = q.div_monomial(&content).expect("content divides");
        let (scalar, normalized) = reduced.normalize_scalar();
        Ok((
            scalar,
            Denominator {
                mono: content,
                factors: vec![(normalized, 1)],
            },
        ))
    }

    fn pow(&self, k: u32) -> Denominator {
        let mono = Monomial::one().mul(&pow_mono(&self.mono, k));
        Denominator {
            mono,
            factors: self.factors.iter().map(|(f, e)| (f.clone(), e * k)).collect(),
        }
    }

    fn mul(&self, other: &Denominator) -> Denominator {
        let mut factors: BTreeMap<DiffPoly, u32> = self.factors.iter().cloned().collect();
        for (f, e) in &other.factors {
            *factors.entry(f.clone()).or_insert(0) += e;
        }
        Denominator {
            mono: self.mono.mul(&other.mono),
            factors: factors.into_iter().collect(),
        }
    }

    fn lcm(&self, other: &Denominator) -> Denominator {
        let mut factors: BTreeMap<DiffPoly, u32> = self.factors.iter().cloned().collect();
        for (f, e) in &other.factors {
            let slot = factors.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        Denominator {
            mono: self.mono.lcm(&other.mono),
            factors: factors.into_iter().collect(),
        }
    }

    /// `self / divisor` as a polynomial; `divisor` must divide `self`.
    fn cofactor(&self, divisor: &Denominator) -> DiffPoly {
        let mono = self.mono.div(&divisor.mono).expect("divisor monomial divides");
        let mut out = DiffPoly::monomial(mono);
        for (f, e) in &self.factors {
            let d = divisor
                .factors
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, k)| *k)
                .unwrap_or(0);
            if *e > d {
                out = out.mul_ref(&f.pow(e - d));
            }
        }
        out
    }

    pub fn expand(&self) -> DiffPoly {
        self.cofactor(&Denominator::one())
    }

    fn radical(&self) -> Denominator {
        Denominator {
            mono: self.mono.radical(),
            factors: self.factors.iter().map(|(f, _)| (f.clone(), 1)).collect(),
        }
    }

    fn without_mono(&self, m: &Monomial) -> Denominator {
        Denominator {
            mono: self.mono.div(m).expect("present"),
            factors: self.factors.clone(),
        }
    }

    fn without_factor(&self, idx: usize) -> Denominator {
        let mut factors = self.factors.clone();
        factors.remove(idx);
        Denominator {
            mono: self.mono.clone(),
            factors,
        }
    }

    fn vars(&self) -> BTreeSet<JetVar> {
        let mut out: BTreeSet<JetVar> = self.mono.factors().iter().map(|(v, _)| *v).collect();
        for (f, _) in &self.factors {
            out.extend(f.vars());
        }
        out
    }
}

fn pow_mono(m: &Monomial, k: u32) -> Monomial {
    let mut out = Monomial::one();
    for &(v, e) in m.factors() {
        out = out.mul(&Monomial::power(v, e * k));
    }
    out
}

/// Exact rational expression over the jet space: `numerator / denominator`.
///
/// Equality (`==`) is decided by cross-multiplication; use
/// [`RatExpr::is_identical`] for structural comparison of canonical forms.
#[derive(Clone, Debug)]
pub struct RatExpr {
    num: DiffPoly,
    den: Denominator,
}

impl RatExpr {
    fn from_parts(num: DiffPoly, den: Denominator) -> RatExpr {
        if num.is_zero() {
            return RatExpr::zero();
        }
        let g = num.monomial_content().gcd(&den.mono);
        if g.is_one() {
            return RatExpr { num, den };
        }
        RatExpr {
            num: num.div_monomial(&g).expect("gcd divides"),
            den: den.without_mono(&g),
        }
    }

    pub fn zero() -> RatExpr {
        RatExpr {
            num: DiffPoly::zero(),
            den: Denominator::one(),
        }
    }

    pub fn one() -> RatExpr {
        RatExpr::from(DiffPoly::one())
    }

    pub fn rational(c: Rational) -> RatExpr {
        RatExpr::from(DiffPoly::rational(c))
    }

    pub fn integer(n: i64) -> RatExpr {
        RatExpr::rational(super::param::int(n))
    }

    pub fn param(p: ParamSymbol) -> RatExpr {
        RatExpr::from(DiffPoly::constant(ParamPoly::var(p)))
    }

    pub fn param_poly(c: ParamPoly) -> RatExpr {
        RatExpr::from(DiffPoly::constant(c))
    }

    pub fn field(f: FieldId) -> RatExpr {
        RatExpr::from(DiffPoly::field(f))
    }

    pub fn jet(f: FieldId, order: u8) -> RatExpr {
        RatExpr::from(DiffPoly::var(JetVar::new(f, order)))
    }

    pub fn numerator(&self) -> &DiffPoly {
        &self.num
    }

    pub fn denominator(&self) -> &Denominator {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is a product of jet-variable powers only.
    pub fn has_monomial_denominator(&self) -> bool {
        self.den.is_monomial()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_identical(&self, other: &RatExpr) -> bool {
        self.num == other.num && self.den == other.den
    }

    /// Cross-multiplication equality `A·D − C·B ≡ 0`.
    pub fn equals(&self, other: &RatExpr) -> bool {
        if self.is_identical(other) {
            return true;
        }
        let lhs = self.num.mul_ref(&other.den.expand());
        let rhs = other.num.mul_ref(&self.den.expand());
        lhs == rhs
    }

    pub fn as_constant(&self) -> Option<ParamPoly> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut out = self.num.vars();
        out.extend(self.den.vars());
        out
    }

    pub fn fields(&self) -> BTreeSet<FieldId> {
        self.vars().into_iter().map(|v| v.field).collect()
    }

    pub fn param_symbols(&self) -> BTreeSet<ParamSymbol> {
        let mut out = self.num.param_symbols();
        for (f, _) in &self.den.factors {
            out.extend(f.param_symbols());
        }
        out
    }

    pub fn max_order(&self) -> Option<u8> {
        self.vars().into_iter().map(|v| v.order).max()
    }

    pub fn max_order_of(&self, field: FieldId) -> Option<u8> {
        self.vars()
            .into_iter()
            .filter(|v| v.field == field)
            .map(|v| v.order)
            .max()
    }

    pub fn scale(&self, c: &ParamPoly) -> RatExpr {
        RatExpr::from_parts(self.num.scale(c), self.den.clone())
    }

    pub fn scale_rational(&self, c: &Rational) -> RatExpr {
        RatExpr::from_parts(self.num.scale_rational(c), self.den.clone())
    }

    pub fn add_ref(&self, other: &RatExpr) -> RatExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatExpr::from_parts(&self.num + &other.num, self.den.clone());
        }
        let l = self.den.lcm(&other.den);
        let a = self.num.mul_ref(&l.cofactor(&self.den));
        let b = other.num.mul_ref(&l.cofactor(&other.den));
        RatExpr::from_parts(&a + &b, l)
    }

    pub fn sub_ref(&self, other: &RatExpr) -> RatExpr {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> RatExpr {
        RatExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul_ref(&self, other: &RatExpr) -> RatExpr {
        if self.is_zero() || other.is_zero() {
            return RatExpr::zero();
        }
        // Cancel whole factors that appear syntactically in the other numerator.
        let (mut an, mut aden) = (self.num.clone(), self.den.clone());
        let (mut bn, mut bden) = (other.num.clone(), other.den.clone());
        cancel_factor_against(&mut an, &mut bden);
        cancel_factor_against(&mut bn, &mut aden);
        RatExpr::from_parts(an.mul_ref(&bn), aden.mul(&bden))
    }

    pub fn recip(&self) -> Result<RatExpr, DiffPolyError> {
        self.pow(-1)
    }

    pub fn div_ref(&self, other: &RatExpr) -> Result<RatExpr, DiffPolyError> {
        Ok(self.mul_ref(&other.recip()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatExpr, DiffPolyError> {
        if e >= 0 {
            let k = e as u32;
            return Ok(RatExpr::from_parts(self.num.pow(k), self.den.pow(k)));
        }
        let k = e.unsigned_abs();
        let (scalar, den) = Denominator::from_poly(&self.num)?;
        let inv = (Rational::one() / scalar).pow(k as i32);
        let num = self.den.expand().pow(k).scale_rational(&inv);
        Ok(RatExpr::from_parts(num, den.pow(k)))
    }

    /// Sum with a single common-denominator pass.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a RatExpr>) -> RatExpr {
        let items: Vec<&RatExpr> = items.into_iter().filter(|e| !e.is_zero()).collect();
        match items.len() {
            0 => return RatExpr::zero(),
            1 => return items[0].clone(),
            _ => {}
        }
        let mut l = Denominator::one();
        for e in &items {
            l = l.lcm(&e.den);
        }
        let mut num = DiffPoly::zero();
        for e in &items {
            if e.den == l {
                num.add_assign_ref(&e.num);
            } else {
                num.add_assign_ref(&e.num.mul_ref(&l.cofactor(&e.den)));
            }
        }
        RatExpr::from_parts(num, l)
    }

    /// Apply a derivation given its action on polynomials and on single variables.
    pub(crate) fn derive_with(
        &self,
        dpoly: &dyn Fn(&DiffPoly) -> Result<DiffPoly, DiffPolyError>,
        dvar: &dyn Fn(JetVar) -> Result<DiffPoly, DiffPolyError>,
    ) -> Result<RatExpr, DiffPolyError> {
        if self.is_zero() {
            return Ok(RatExpr::zero());
        }
        let dn = dpoly(&self.num)?;
        if self.den.is_one() {
            return Ok(RatExpr::from(dn));
        }
        let rad = self.den.radical();
        let mut acc = dn.mul_ref(&rad.expand());
        let mut inner = DiffPoly::zero();
        for &(v, k) in self.den.mono.factors() {
            let dv = dvar(v)?;
            if dv.is_zero() {
                continue;
            }
            let rest = rad.without_mono(&Monomial::var(v)).expand();
            inner.add_assign_ref(&dv.mul_ref(&rest).scale_rational(&super::param::int(k as i64)));
        }
        for (idx, (f, e)) in self.den.factors.iter().enumerate() {
            let df = dpoly(f)?;
            if df.is_zero() {
                continue;
            }
            let rest = rad.without_factor(idx).expand();
            inner.add_assign_ref(&df.mul_ref(&rest).scale_rational(&super::param::int(*e as i64)));
        }
        acc.sub_assign_ref(&self.num.mul_ref(&inner));
        Ok(RatExpr::from_parts(acc, self.den.mul(&rad)))
    }

    /// Total x-derivative applied `times` times with the default order cap.
    pub fn total_x_derivative(&self, times: u32) -> Result<RatExpr, DiffPolyError> {
        self.total_x_derivative_capped(times, DEFAULT_MAX_ORDER)
    }

    pub fn total_x_derivative_capped(
        &self,
        times: u32,
        max_order: u8,
    ) -> Result<RatExpr, DiffPolyError> {
        let dpoly = |p: &DiffPoly| p.total_derivative(max_order);
        let dvar = |v: JetVar| {
            v.next(max_order)
                .map(DiffPoly::var)
                .ok_or(DiffPolyError::JetOrderOverflow {
                    field: v.field,
                    order: v.order as u32 + 1,
                    max: max_order,
                })
        };
        let mut out = self.clone();
        for _ in 0..times {
            out = out.derive_with(&dpoly, &dvar)?;
        }
        Ok(out)
    }

    /// Shorthand for one total x-derivative.
    pub fn dx(&self) -> Result<RatExpr, DiffPolyError> {
        self.total_x_derivative(1)
    }

    /// Partial derivative with respect to a jet variable.
    pub fn partial(&self, v: JetVar) -> RatExpr {
        if !self.vars().contains(&v) {
            return RatExpr::zero();
        }
        let dpoly = |p: &DiffPoly| Ok(p.partial(v));
        let dvar = |w: JetVar| {
            Ok(if w == v {
                DiffPoly::one()
            } else {
                DiffPoly::zero()
            })
        };
        self.derive_with(&dpoly, &dvar)
            .expect("partial derivative cannot fail")
    }

    pub fn substitute_params(
        &self,
        map: &BTreeMap<ParamSymbol, ParamPoly>,
    ) -> Result<RatExpr, DiffPolyError> {
        let num = RatExpr::from(self.num.substitute_params(map));
        if self.den.factors.is_empty() {
            return Ok(RatExpr::from_parts(num.num, self.den.clone()));
        }
        let mut den = RatExpr::from(DiffPoly::monomial(self.den.mono.clone()));
        for (f, e) in &self.den.factors {
            den = den.mul_ref(&RatExpr::from(f.substitute_params(map)).pow(*e as i32)?);
        }
        num.div_ref(&den)
    }

    /// Canonical text in the expression grammar.
    pub fn to_text(&self) -> String {
        let num = self.num.to_display();
        if self.den.is_one() {
            return num;
        }
        let mut s = if self.num.len() > 1 || num_needs_parens(&self.num) {
            format!("({num})")
        } else {
            num
        };
        for &(v, e) in self.den.mono.factors() {
            if e == 1 {
                s.push_str(&format!("/{v}"));
            } else {
                s.push_str(&format!("/{v}^{e}"));
            }
        }
        for (f, e) in &self.den.factors {
            if e == &1 {
                s.push_str(&format!("/({})", f.to_display()));
            } else {
                s.push_str(&format!("/({})^{e}", f.to_display()));
            }
        }
        s
    }
}

fn num_needs_parens(p: &DiffPoly) -> bool {
    p.as_single_term()
        .is_some_and(|(_, c)| c.as_constant().is_none() && c.len() > 1)
}

/// Remove denominator factors of `den` that equal the numerator `num` up to a scalar.
fn cancel_factor_against(num: &mut DiffPoly, den: &mut Denominator) {
    if den.factors.is_empty() || num.len() < 2 {
        return;
    }
    let content = num.monomial_content();
    let reduced = num.div_monomial(&content).expect("content divides");
    let (scalar, normalized) = reduced.normalize_scalar();
    if let Some(pos) = den.factors.iter().position(|(f, _)| *f == normalized) {
        *num = DiffPoly::monomial(content).scale_rational(&scalar);
        if den.factors[pos].1 == 1 {
            den.factors.remove(pos);
        } else {
            den.factors[pos].1 -= 1;
        }
    }
}

impl From<DiffPoly> for RatExpr {
    fn from(num: DiffPoly) -> RatExpr {
        RatExpr::from_parts(num, Denominator::one())
    }
}

impl PartialEq for RatExpr {
    fn eq(&self, other: &RatExpr) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        self.add_ref(rhs)
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self.sub_ref(rhs)
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        self.mul_ref(rhs)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        self.neg_ref()
    }
}

impl Add for RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: RatExpr) -> RatExpr {
        self.add_ref(&rhs)
    }
}

impl Sub for RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: RatExpr) -> RatExpr {
        self.sub_ref(&rhs)
    }
}

impl Mul for RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: RatExpr) -> RatExpr {
        self.mul_ref(&rhs)
    }
}

impl Neg for RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        self.neg_ref()
    }
}

/// Division panics on a zero divisor; use [`RatExpr::div_ref`] to handle it.
impl Div for &RatExpr {
    type Output = RatExpr;
    fn div(self, rhs: &RatExpr) -> RatExpr {
        self.div_ref(rhs).expect("division by zero expression")
    }
}

impl Div for RatExpr {
    type Output = RatExpr;
    fn div(self, rhs: RatExpr) -> RatExpr {
        &self / &rhs
    }
}

impl Zero for RatExpr {
    fn zero() -> Self {
        RatExpr::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatExpr {
    fn one() -> Self {
        RatExpr::one()
    }
}
