use crate::error::Result;
use crate::ground::{FiniteSet, Point, Space};
use crate::ideals::Tri;
use crate::submeasures::{mazur_partition_functions, range_mask};

use super::witness::WitnessMap;

/// `S_i^n` for `i ≤ n`.
pub fn mazur_partition(n: u64) -> Result<Vec<FiniteSet>> {
    mazur_partition_functions(n)
}

/// `(n, i)` for a function in `S_i^n`.
pub fn mazur_to_delta_point(code: u64) -> Option<(u64, u64)> {
    match Space::MazurSum.decode(code).ok()? {
        Point::Mazur { n, values } => {
            let missing = (!range_mask(&values)).trailing_zeros() as u64;
            Some((n, missing))
        }
        _ => None,
    }
}

/// `f[S_i^n] = {(n, i)}`, finite-to-one into Δ.
pub fn mazur_to_delta() -> WitnessMap {
    WitnessMap::new("mazur-to-delta", Space::MazurSum, Space::Delta, |c| {
        let (n, i) = mazur_to_delta_point(c)?;
        Space::Delta.encode(&Point::Tri(n, i)).ok()
    })
    .with_finite_to_one(Tri::Yes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submeasures::mazur_phi;

    #[test]
    fn first_section() {
        let parts = mazur_partition(1).unwrap();
        let decode = |c| Space::MazurSum.decode(c).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(decode(parts[0].codes()[0]), Point::Mazur { n: 1, values: vec![1] });
        assert_eq!(decode(parts[1].codes()[0]), Point::Mazur { n: 1, values: vec![0] });
        let all = parts[0].union(&parts[1]).unwrap();
        assert_eq!(mazur_phi(1, &all).unwrap(), crate::rational::ExtRational::from_int(2));
    }

    #[test]
    fn sizes_and_map() {
        assert_eq!(mazur_partition(2).unwrap()[0].len(), 9);
        let f = mazur_to_delta();
        for (i, part) in mazur_partition(2).unwrap().iter().enumerate() {
            for &c in part.codes() {
                assert_eq!(f.apply(c), Space::Delta.encode(&Point::Tri(2, i as u64)).ok());
            }
        }
    }
}
