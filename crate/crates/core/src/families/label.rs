use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::scalar::Real;
use crate::shape::{Branch, ShapeFunction, ShapeKind, PROPORTIONAL_REL_TOL};

/// Branch choice per pair in the order 12, 13, 23, written e.g. `LLH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyLabel(pub [Branch; 3]);

impl FamilyLabel {
    pub fn branches(&self) -> [Branch; 3] {
        self.0
    }

    fn permuted(&self, perm: [usize; 3]) -> FamilyLabel {
        FamilyLabel([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]]])
    }

    pub fn all_low(&self) -> bool {
        self.0.iter().all(|&b| b == Branch::Low)
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{}", b.letter())?;
        }
        Ok(())
    }
}

impl FromStr for FamilyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 3 {
            return Err(Error::invalid("family", format!("`{s}` is not a 3-letter label")));
        }
        let mut branches = [Branch::Low; 3];
        for (slot, c) in branches.iter_mut().zip(chars) {
            *slot = match c {
                'L' | 'l' => Branch::Low,
                'H' | 'h' => Branch::High,
                _ => {
                    return Err(Error::invalid(
                        "family",
                        format!("`{s}` contains `{c}`, expected L or H"),
                    ))
                }
            };
        }
        Ok(FamilyLabel(branches))
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Pair permutations (as index maps) under which the shape triple is
/// unchanged. Every permutation of pairs is induced by a relabelling of the
/// bodies, so these are exactly the symmetries of the solution set.
pub fn symmetry_group<T: Real>(shapes: &[ShapeFunction<T>; 3]) -> Vec<[usize; 3]> {
    let tol = T::tol(PROPORTIONAL_REL_TOL);
    PERMUTATIONS
        .iter()
        .copied()
        .filter(|perm| (0..3).all(|i| shapes[perm[i]].approx_eq(&shapes[i], tol)))
        .collect()
}

/// Lexicographically smallest label in the orbit of `label`.
pub fn canonical_label(label: FamilyLabel, group: &[[usize; 3]]) -> FamilyLabel {
    group
        .iter()
        .map(|&perm| label.permuted(perm))
        .min()
        .unwrap_or(label)
}

fn branch_options<T: Real>(shape: &ShapeFunction<T>) -> &'static [Branch] {
    match shape.kind() {
        ShapeKind::TwoBranch => &[Branch::Low, Branch::High],
        ShapeKind::Monotone => &[Branch::Low],
    }
}

/// Every branch combination, collapsed to one representative per orbit of
/// the symmetry group of identical shapes. Sorted ascending.
pub fn enumerate_families<T: Real>(shapes: &[ShapeFunction<T>; 3]) -> Vec<FamilyLabel> {
    let group = symmetry_group(shapes);
    let mut labels = Vec::new();
    for &b12 in branch_options(&shapes[0]) {
        for &b13 in branch_options(&shapes[1]) {
            for &b23 in branch_options(&shapes[2]) {
                labels.push(canonical_label(FamilyLabel([b12, b13, b23]), &group));
            }
        }
    }
    labels.sort();
    labels.dedup();
    labels
}

/// Number of the corresponding inertia curve in the classical listing of the
/// attractive–repulsive families: 1–4 for three identical shapes, 1–6 for two
/// identical shapes, 1–8 for three distinct ones. `None` when a shape is
/// monotone.
///
/// Identical shapes: `LLL`=1, `HHH`=2, `LHH`=3, `LLH`=4. Two identical shapes
/// (`a`, `b`) and an odd one `o`: the count of high roots among `a`, `b`
/// (0, 1, 2) gives 1, 2, 3 with `o` low and 4, 5, 6 with `o` high. Distinct
/// shapes: reading the branches of pairs (23, 13, 12), `LLL`=1, `LLH`=2,
/// `LHL`=3, `LHH`=4, `HLH`=5, `HHL`=6, `HHH`=7, `HLL`=8.
pub fn curve_number<T: Real>(label: FamilyLabel, shapes: &[ShapeFunction<T>; 3]) -> Option<u8> {
    if shapes.iter().any(|s| s.kind() != ShapeKind::TwoBranch) {
        return None;
    }
    let group = symmetry_group(shapes);
    let high = |b: Branch| (b == Branch::High) as u8;
    let b = label.0;
    match group.len() {
        6 => {
            let n_high: u8 = b.iter().map(|&x| high(x)).sum();
            Some(match n_high {
                0 => 1,
                3 => 2,
                2 => 3,
                _ => 4,
            })
        }
        2 => {
            let swap = group.iter().find(|p| **p != [0, 1, 2])?;
            let odd = (0..3).find(|&i| swap[i] == i)?;
            let n_high: u8 = (0..3).filter(|&i| i != odd).map(|i| high(b[i])).sum();
            Some(1 + n_high + 3 * high(b[odd]))
        }
        1 => {
            let key = (high(b[2]), high(b[1]), high(b[0]));
            Some(match key {
                (0, 0, 0) => 1,
                (0, 0, 1) => 2,
                (0, 1, 0) => 3,
                (0, 1, 1) => 4,
                (1, 0, 1) => 5,
                (1, 1, 0) => 6,
                (1, 1, 1) => 7,
                _ => 8,
            })
        }
        _ => None,
    }
}
