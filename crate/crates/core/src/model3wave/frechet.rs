use super::error::ModelError;
use super::substitution::Substitution;
use super::system::EvolutionSystem;
use crate::diffpoly::{FieldId, FieldImages, JetVar, RatExpr};

/// Linearisation of a field map: entry `(i, j)` is `Σ_k coeff_k · D^k`.
#[derive(Clone, Debug)]
pub struct FrechetOperator {
    entries: Vec<Vec<Vec<(RatExpr, u8)>>>,
}

impl FrechetOperator {
    /// Linearise the six components of `images`.
    pub fn of_images(images: &FieldImages) -> Self {
        let entries = FieldId::ALL
            .iter()
            .map(|row| {
                let comp = &images[row];
                FieldId::ALL
                    .iter()
                    .map(|col| {
                        let Some(top) = comp.max_order_of(*col) else {
                            return Vec::new();
                        };
                        (0..=top)
                            .filter_map(|k| {
                                let c = comp.partial(JetVar::new(*col, k));
                                (!c.is_zero()).then_some((c, k))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FrechetOperator { entries }
    }

    pub fn of_substitution(s: &Substitution) -> Self {
        Self::of_images(s.images())
    }

    pub fn of_system(s: &EvolutionSystem) -> Self {
        Self::of_images(s.rhs_map())
    }

    pub fn entry(&self, row: FieldId, col: FieldId) -> &[(RatExpr, u8)] {
        &self.entries[row.index()][col.index()]
    }

    /// Apply to a vector of six expressions.
    pub fn apply(&self, v: &FieldImages) -> Result<FieldImages, ModelError> {
        let mut out = FieldImages::new();
        for row in FieldId::ALL {
            let mut parts = Vec::new();
            for col in FieldId::ALL {
                for (c, k) in self.entry(row, col) {
                    parts.push(c.mul_ref(&v[&col].total_x_derivative(*k as u32)?));
                }
            }
            out.insert(row, RatExpr::sum(&parts));
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        FieldId::ALL.iter().all(|r| {
            FieldId::ALL.iter().all(|c| {
                let e = self.entry(*r, *c);
                if r == c {
                    e.len() == 1 && e[0].1 == 0 && e[0].0.equals(&RatExpr::one())
                } else {
                    e.is_empty()
                }
            })
        })
    }
}
