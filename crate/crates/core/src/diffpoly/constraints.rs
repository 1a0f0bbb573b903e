use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::error::DiffPolyError;
use super::param::{write_signed_term, ParamMonomial, ParamPoly, ParamSymbol, Rational};
use super::rational::RatExpr;

/// Distinct parameter coefficients of the cleared numerator of `e`, in
/// canonical monomial order.
///
/// `e` vanishes for all field values iff every returned polynomial is zero.
pub fn collect_parameter_constraints(e: &RatExpr) -> Vec<ParamPoly> {
    let mut out: Vec<ParamPoly> = Vec::new();
    for (_, c) in e.numerator().terms() {
        if !out.contains(c) {
            out.push(c.clone());
        }
    }
    out
}

/// `Σ coeff·param + constant = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<ParamSymbol, Rational>,
    pub constant: Rational,
}

impl LinearConstraint {
    pub fn from_poly(p: &ParamPoly) -> Result<LinearConstraint, DiffPolyError> {
        let (constant, coefficients) = p.linear_parts().ok_or_else(|| {
            DiffPolyError::NonlinearConstraint {
                constraint: p.to_string(),
                degree: p.total_degree(),
            }
        })?;
        Ok(LinearConstraint {
            coefficients,
            constant,
        })
    }

    pub fn to_poly(&self) -> ParamPoly {
        let mut p = ParamPoly::constant(self.constant.clone());
        for (s, c) in &self.coefficients {
            p.add_term(ParamMonomial::var(s.clone()), c.clone());
        }
        p
    }

    fn evaluate(&self, point: &BTreeMap<ParamSymbol, Rational>, homogeneous: bool) -> Rational {
        let mut acc = if homogeneous {
            Rational::zero()
        } else {
            self.constant.clone()
        };
        for (s, c) in &self.coefficients {
            if let Some(v) = point.get(s) {
                acc += c * v;
            }
        }
        acc
    }
}

/// Solution set of a linear system over a fixed, ordered list of parameters.
///
/// Stored in reduced row-echelon form: each row solves one pivot parameter in
/// terms of the free ones.
#[derive(Clone, Debug)]
pub struct AffineSpace {
    ambient: Vec<ParamSymbol>,
    /// (pivot, constraint row with pivot coefficient 1)
    rows: Vec<(ParamSymbol, LinearConstraint)>,
    free: Vec<ParamSymbol>,
    point: BTreeMap<ParamSymbol, Rational>,
    basis: Vec<BTreeMap<ParamSymbol, Rational>>,
}

/// Solve with the ambient parameters in sorted order.
pub fn solve_linear_constraints(cs: &[ParamPoly]) -> Result<AffineSpace, DiffPolyError> {
    solve_linear_constraints_in(cs, &[])
}

/// Solve over `ambient`, extended by any further symbols found in `cs`.
///
/// Pivots are chosen left to right, so parameters listed last are preferred as
/// free parameters.
pub fn solve_linear_constraints_in(
    cs: &[ParamPoly],
    ambient: &[ParamSymbol],
) -> Result<AffineSpace, DiffPolyError> {
    let mut rows = Vec::new();
    let mut extra: BTreeSet<ParamSymbol> = BTreeSet::new();
    for p in cs {
        if p.is_zero() {
            continue;
        }
        let row = LinearConstraint::from_poly(p)?;
        extra.extend(row.coefficients.keys().cloned());
        rows.push(row);
    }
    let mut cols: Vec<ParamSymbol> = extra
        .into_iter()
        .filter(|s| !ambient.contains(s))
        .collect();
    cols.extend(ambient.iter().cloned());

    let width = cols.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<Rational> = cols
                .iter()
                .map(|s| r.coefficients.get(s).cloned().unwrap_or_else(Rational::zero))
                .collect();
            v.push(r.constant.clone());
            v
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(sel) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for k in 0..=width {
                    let delta = &factor * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[width].is_zero()) {
        return Err(DiffPolyError::Inconsistent);
    }

    let solved: Vec<(ParamSymbol, LinearConstraint)> = pivots
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let coefficients = cols
                .iter()
                .enumerate()
                .filter(|(k, _)| !m[i][*k].is_zero())
                .map(|(k, s)| (s.clone(), m[i][k].clone()))
                .collect();
            (
                cols[c].clone(),
                LinearConstraint {
                    coefficients,
                    constant: m[i][width].clone(),
                },
            )
        })
        .collect();
    Ok(AffineSpace::from_rref(cols, solved, &pivots))
}

impl AffineSpace {
    fn from_rref(
        ambient: Vec<ParamSymbol>,
        rows: Vec<(ParamSymbol, LinearConstraint)>,
        pivots: &[usize],
    ) -> AffineSpace {
        let free: Vec<ParamSymbol> = ambient
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(_, s)| s.clone())
            .collect();
        let mut point: BTreeMap<ParamSymbol, Rational> =
            ambient.iter().map(|s| (s.clone(), Rational::zero())).collect();
        for (p, row) in &rows {
            point.insert(p.clone(), -row.constant.clone());
        }
        let basis = free
            .iter()
            .map(|f| {
                let mut v: BTreeMap<ParamSymbol, Rational> =
                    ambient.iter().map(|s| (s.clone(), Rational::zero())).collect();
                v.insert(f.clone(), Rational::one());
                for (p, row) in &rows {
                    if let Some(c) = row.coefficients.get(f) {
                        v.insert(p.clone(), -c.clone());
                    }
                }
                v
            })
            .collect();
        AffineSpace {
            ambient,
            rows,
            free,
            point,
            basis,
        }
    }

    /// The whole parameter space over `ambient`.
    pub fn full(ambient: &[ParamSymbol]) -> AffineSpace {
        AffineSpace::from_rref(ambient.to_vec(), Vec::new(), &[])
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> &[ParamSymbol] {
        &self.ambient
    }

    pub fn free_parameters(&self) -> &[ParamSymbol] {
        &self.free
    }

    pub fn point(&self) -> &BTreeMap<ParamSymbol, Rational> {
        &self.point
    }

    pub fn basis(&self) -> &[BTreeMap<ParamSymbol, Rational>] {
        &self.basis
    }

    /// Solved relations `pivot = affine expression in free parameters`.
    pub fn relations(&self) -> Vec<(ParamSymbol, ParamPoly)> {
        self.rows
            .iter()
            .map(|(p, row)| {
                let mut rhs = ParamPoly::constant(-row.constant.clone());
                for (s, c) in &row.coefficients {
                    if s != p {
                        rhs.add_term(ParamMonomial::var(s.clone()), -c.clone());
                    }
                }
                (p.clone(), rhs)
            })
            .collect()
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations()
            .into_iter()
            .map(|(p, rhs)| format!("{p} = {rhs}"))
            .collect()
    }

    /// Substitution map sending each pivot to its expression in free parameters.
    pub fn parametrization(&self) -> BTreeMap<ParamSymbol, ParamPoly> {
        self.relations().into_iter().collect()
    }

    pub fn contains_point(&self, point: &BTreeMap<ParamSymbol, Rational>) -> bool {
        self.rows
            .iter()
            .all(|(_, row)| row.evaluate(point, false).is_zero())
    }

    fn contains_direction(&self, dir: &BTreeMap<ParamSymbol, Rational>) -> bool {
        self.rows
            .iter()
            .all(|(_, row)| row.evaluate(dir, true).is_zero())
    }

    /// True iff the relation `p = 0` holds on the whole space.
    pub fn satisfies(&self, p: &ParamPoly) -> bool {
        p.substitute(&self.parametrization()).is_zero()
    }

    /// `other ⊆ self`, over the union of both ambient parameter lists.
    pub fn contains(&self, other: &AffineSpace) -> bool {
        let extend = |v: &BTreeMap<ParamSymbol, Rational>| {
            let mut v = v.clone();
            for s in &self.ambient {
                v.entry(s.clone()).or_insert_with(Rational::zero);
            }
            v
        };
        // A parameter of self unknown to other is unconstrained there.
        let unconstrained_extra = self
            .ambient
            .iter()
            .filter(|s| !other.ambient.contains(s))
            .all(|s| !self.rows.iter().any(|(_, r)| r.coefficients.contains_key(s)));
        unconstrained_extra
            && self.contains_point(&extend(&other.point))
            && other.basis.iter().all(|d| self.contains_direction(&extend(d)))
    }

    /// Same dimension and mutual containment.
    pub fn equals(&self, other: &AffineSpace) -> bool {
        self.dimension() == other.dimension() && self.contains(other) && other.contains(self)
    }
}

impl fmt::Display for AffineSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dimension {}", self.dimension())?;
        for r in self.relation_strings() {
            write!(f, "; {r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut first = true;
        for (p, c) in &self.coefficients {
            write_signed_term(&mut s, first, c, p.name())?;
            first = false;
        }
        if !self.constant.is_zero() || first {
            write_signed_term(&mut s, first, &self.constant, "")?;
        }
        write!(f, "{s} = 0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::field::FieldId;
    use crate::diffpoly::param::int;

    fn sym(n: &str) -> ParamSymbol {
        ParamSymbol::new(n).unwrap()
    }
    fn v(n: &str) -> ParamPoly {
        ParamPoly::var(sym(n))
    }
    fn c(n: i64) -> ParamPoly {
        ParamPoly::constant(int(n))
    }

    #[test]
    fn collects_distinct_coefficients_in_order() {
        let a = v("a");
        let b = v("b");
        let e = &RatExpr::field(FieldId::P10).scale(&(&a - &c(1)))
            + &(&RatExpr::field(FieldId::P10) * &RatExpr::field(FieldId::M10)).scale(&(&a + &b));
        assert_eq!(collect_parameter_constraints(&e), vec![&a - &c(1), &a + &b]);
        assert!(collect_parameter_constraints(&RatExpr::zero()).is_empty());
    }

    #[test]
    fn first_degree_shape() {
        let two = c(2);
        let cs = vec![
            &(&v("nu01") - &v("nu10")) - &(&two * &v("gamma10")),
            &(&v("nu01") + &v("nu10")) - &(&two * &v("nu11")),
            &(&two * &v("gamma11")) + &v("gamma10"),
            &v("gamma10") - &v("gamma01"),
        ];
        let order: Vec<_> = ["gamma11", "gamma10", "gamma01", "nu11", "nu01", "nu10"]
            .map(sym)
            .to_vec();
        let space = solve_linear_constraints_in(&cs, &order).unwrap();
        assert_eq!(space.dimension(), 2);
        assert_eq!(space.free_parameters(), &[sym("nu01"), sym("nu10")]);
        for p in &cs {
            assert!(space.satisfies(p));
        }
    }

    #[test]
    fn empty_system_is_full_space() {
        let order = vec![sym("b"), sym("c")];
        let space = solve_linear_constraints_in(&[], &order).unwrap();
        assert_eq!(space.dimension(), 2);
        assert!(space.equals(&AffineSpace::full(&order)));
    }

    #[test]
    fn conflicting_constraints_are_inconsistent() {
        let a = v("a");
        let r = solve_linear_constraints(&[a.clone(), &a - &c(1)]);
        assert!(matches!(r, Err(DiffPolyError::Inconsistent)));
    }

    #[test]
    fn nonlinear_constraint_is_reported() {
        let r = solve_linear_constraints(&[&v("a") * &v("b")]);
        assert!(matches!(
            r,
            Err(DiffPolyError::NonlinearConstraint { degree: 2, .. })
        ));
    }

    #[test]
    fn equality_is_independent_of_presentation() {
        let order = vec![sym("x"), sym("y"), sym("z")];
        let s1 = solve_linear_constraints_in(&[&v("x") - &v("y"), &v("y") - &v("z")], &order)
            .unwrap();
        let s2 = solve_linear_constraints_in(&[&v("x") - &v("z"), &v("z") - &v("y")], &order)
            .unwrap();
        assert!(s1.equals(&s2));
        let s3 = solve_linear_constraints_in(&[v("x")], &order).unwrap();
        assert!(!s1.equals(&s3));
        assert!(AffineSpace::full(&order).contains(&s1));
        assert!(!s1.contains(&AffineSpace::full(&order)));
    }

    #[test]
    fn affine_point_is_recorded() {
        let space = solve_linear_constraints(&[&v("a") - &c(3)]).unwrap();
        assert_eq!(space.point()[&sym("a")], int(3));
        assert_eq!(space.relation_strings(), vec!["a = 3".to_string()]);
    }
}
