use std::fmt;

/// Default cap on the spatial derivative order of a jet variable.
pub const DEFAULT_MAX_ORDER: u8 = 12;

/// The six dependent fields, in canonical order.
///
/// `P*` are the positive-root components `f⁺`, `M*` the negative-root
/// components `f⁻`; the suffix is the root label `i.j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldId {
    P11,
    P10,
    P01,
    M01,
    M10,
    M11,
}

impl FieldId {
    pub const ALL: [FieldId; 6] = [
        FieldId::P11,
        FieldId::P10,
        FieldId::P01,
        FieldId::M01,
        FieldId::M10,
        FieldId::M11,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldId::P11 => "p11",
            FieldId::P10 => "p10",
            FieldId::P01 => "p01",
            FieldId::M01 => "m01",
            FieldId::M10 => "m10",
            FieldId::M11 => "m11",
        }
    }

    pub fn from_name(name: &str) -> Option<FieldId> {
        FieldId::ALL.into_iter().find(|f| f.name() == name)
    }

    /// The field paired with this one by the Poisson structure (`p_ij ↔ m_ij`).
    pub fn conjugate(self) -> FieldId {
        match self {
            FieldId::P11 => FieldId::M11,
            FieldId::P10 => FieldId::M10,
            FieldId::P01 => FieldId::M01,
            FieldId::M01 => FieldId::P01,
            FieldId::M10 => FieldId::P10,
            FieldId::M11 => FieldId::P11,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, FieldId::P11 | FieldId::P10 | FieldId::P01)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A field or one of its spatial derivatives, treated as an independent symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub field: FieldId,
    pub order: u8,
}

impl JetVar {
    pub fn new(field: FieldId, order: u8) -> Self {
        JetVar { field, order }
    }

    /// The variable one spatial derivative higher, if it stays within `max_order`.
    pub fn next(self, max_order: u8) -> Option<JetVar> {
        (self.order < max_order).then(|| JetVar::new(self.field, self.order + 1))
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order <= 3 {
            write!(f, "{}", self.field)?;
            for _ in 0..self.order {
                f.write_str("'")?;
            }
            Ok(())
        } else {
            write!(f, "d({},{})", self.field, self.order)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_follows_field_then_derivative() {
        let a = JetVar::new(FieldId::P10, 3);
        let b = JetVar::new(FieldId::P01, 0);
        let c = JetVar::new(FieldId::P10, 1);
        let mut v = vec![b, a, c];
        v.sort();
        assert_eq!(v, vec![c, a, b]);
    }

    #[test]
    fn display_switches_to_d_notation_above_third_order() {
        assert_eq!(JetVar::new(FieldId::M01, 2).to_string(), "m01''");
        assert_eq!(JetVar::new(FieldId::M01, 4).to_string(), "d(m01,4)");
    }

    #[test]
    fn next_respects_cap() {
        assert!(JetVar::new(FieldId::P11, 12).next(12).is_none());
        assert_eq!(
            JetVar::new(FieldId::P11, 2).next(12),
            Some(JetVar::new(FieldId::P11, 3))
        );
    }
}
