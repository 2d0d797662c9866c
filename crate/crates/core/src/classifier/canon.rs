//! Isomorphism type of a countably generated ideal from a list of generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::shape::{product_sections, shape};
use crate::ground::{SetDescription as D, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CgCase {
    /// `T = ∅`
    IsoFin,
    /// `T` finite and nonempty: `Fin ⊕ P(ω)`.
    IsoFinPadded,
    /// `T` infinite: `Fin ⊗ {∅}`.
    IsoFinTimesEmpty,
}

/// Generators continuing past the listed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorTail {
    /// `(column n)` for every `n`, after the listed generators.
    Columns,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    /// `B_n = A_n ∖ ∪_{i<n} A_i`
    pub block: D,
    pub infinite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canonical {
    pub case: CgCase,
    pub partition: Vec<Cell>,
    /// Listed indices in `T`.
    pub t: Vec<usize>,
    /// The tail contributes infinitely many indices to `T`.
    pub tail_infinite: bool,
}

fn finiteness(space: &Space, d: &D) -> Result<bool> {
    shape(space, d)
        .map(|s| s.finite)
        .map_err(|e| Error::UndecidableFiniteness(format!("{d}: {e}")))
}

pub fn canonicalize_countably_generated(
    space: &Space,
    generators: &[D],
    tail: Option<GeneratorTail>,
) -> Result<Canonical> {
    let mut partition = Vec::with_capacity(generators.len());
    let mut covered = D::Empty;
    for (index, a) in generators.iter().enumerate() {
        let block = D::difference(a.clone(), covered.clone());
        let infinite = !finiteness(space, &block)?;
        partition.push(Cell {
            index,
            block,
            infinite,
        });
        covered = if covered == D::Empty {
            a.clone()
        } else {
            D::union(covered, a.clone())
        };
    }
    let t: Vec<usize> = partition.iter().filter(|c| c.infinite).map(|c| c.index).collect();
    let rest = D::complement(covered);
    let tail_infinite = match tail {
        None => {
            if finiteness(space, &rest)? {
                return Err(Error::InvalidArgument(
                    "the generators cover all but finitely many points; the ideal is not proper".into(),
                ));
            }
            false
        }
        Some(GeneratorTail::Columns) => {
            if !matches!(space, Space::Product(..)) {
                return Err(Error::SpaceMismatch(format!("{space} has no columns")));
            }
            let Space::Product(_, right) = space else { unreachable!() };
            let sections = product_sections(space, &rest)
                .map_err(|e| Error::UndecidableFiniteness(format!("{rest}: {e}")))?;
            let mut infinite = false;
            for g in &sections.generic {
                if !g.indices_shape.finite && !finiteness(right, &g.section)? {
                    infinite = true;
                }
            }
            if !infinite {
                return Err(Error::UndecidableFiniteness(
                    "the column tail leaves only finitely many infinite blocks; list them explicitly".into(),
                ));
            }
            true
        }
    };
    let case = if tail_infinite {
        CgCase::IsoFinTimesEmpty
    } else if t.is_empty() {
        CgCase::IsoFin
    } else {
        CgCase::IsoFinPadded
    };
    Ok(Canonical {
        case,
        partition,
        t,
        tail_infinite,
    })
}
