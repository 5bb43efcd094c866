//! Symmetries of the cube acting on corner and face slots.

use crate::hexmodel::HEX_FACES;

/// Face slot opposite to each face slot.
pub const OPPOSITE_FACE: [usize; 6] = [1, 0, 4, 5, 2, 3];

const CORNER_SIGNS: [[i8; 3]; 8] = [
    [-1, -1, -1],
    [1, -1, -1],
    [1, 1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
    [1, -1, 1],
    [1, 1, 1],
    [-1, 1, 1],
];

const AXIS_PERMUTATIONS: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
    ([1, 0, 2], -1),
];

/// Corner permutations of the 24 rotations, or of all 48 symmetries when
/// `with_reflections` is set. Entry `sigma[i]` is the slot corner `i` moves to.
/// The identity comes first.
pub fn cube_symmetries(with_reflections: bool) -> Vec<[usize; 8]> {
    let mut out = Vec::with_capacity(48);
    for (axes, perm_sign) in AXIS_PERMUTATIONS {
        for signs in 0..8u8 {
            let s = [0, 1, 2].map(|a| if signs & (1 << a) != 0 { -1i8 } else { 1 });
            let det = perm_sign * s[0] * s[1] * s[2];
            if det < 0 && !with_reflections {
                continue;
            }
            let sigma = std::array::from_fn(|c| {
                let p = CORNER_SIGNS[c];
                let image = [0, 1, 2].map(|a| s[a] * p[axes[a]]);
                CORNER_SIGNS.iter().position(|&q| q == image).unwrap()
            });
            out.push(sigma);
        }
    }
    out
}

/// Face permutation induced by a corner permutation.
pub fn face_permutation(sigma: &[usize; 8]) -> [usize; 6] {
    let key = |corners: [usize; 4]| {
        let mut k = corners;
        k.sort_unstable();
        k
    };
    std::array::from_fn(|f| {
        let image = key(HEX_FACES[f].map(|c| sigma[c]));
        (0..6).find(|&g| key(HEX_FACES[g]) == image).unwrap()
    })
}

/// Whether two distinct face slots share an edge.
pub fn faces_adjacent(f: usize, g: usize) -> bool {
    f != g && OPPOSITE_FACE[f] != g
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn group_orders() {
        let rot: HashSet<_> = cube_symmetries(false).into_iter().collect();
        let all: HashSet<_> = cube_symmetries(true).into_iter().collect();
        assert_eq!(rot.len(), 24);
        assert_eq!(all.len(), 48);
        assert_eq!(cube_symmetries(false)[0], [0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn rotations_preserve_face_orientation() {
        for sigma in cube_symmetries(false) {
            let fp = face_permutation(&sigma);
            for f in 0..6 {
                let image = HEX_FACES[f].map(|c| sigma[c]);
                let target = HEX_FACES[fp[f]];
                let rotated = (0..4).any(|r| (0..4).all(|i| image[i] == target[(i + r) % 4]));
                assert!(rotated, "rotation reverses face {f}");
            }
        }
    }

    #[test]
    fn opposite_faces_share_no_corner() {
        for f in 0..6 {
            let a: HashSet<_> = HEX_FACES[f].into_iter().collect();
            for (g, face) in HEX_FACES.iter().enumerate() {
                let shared = face.iter().filter(|c| a.contains(c)).count();
                let expected = if f == g { 4 } else if OPPOSITE_FACE[f] == g { 0 } else { 2 };
                assert_eq!(shared, expected);
            }
        }
    }
}
