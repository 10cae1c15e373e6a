use std::sync::OnceLock;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// The `C(n, k)` strictly increasing multi-indices of degree `k` in dimension
/// `n`, in lexicographic order. Index sets are stored as bitmasks
/// (bit `i` set means `dx^{i+1}` is present).
#[derive(Debug, Clone)]
pub struct MultiIndexBasis {
    dim: usize,
    degree: usize,
    masks: Vec<u16>,
    position: Vec<usize>,
}

static BASES: OnceLock<Vec<Vec<MultiIndexBasis>>> = OnceLock::new();

impl MultiIndexBasis {
    /// Shared basis for `(dim, degree)`. Panics if `dim > MAX_DIM` or
    /// `degree > dim`; callers validate dimensions first.
    pub fn get(dim: usize, degree: usize) -> &'static MultiIndexBasis {
        assert!(
            dim <= MAX_DIM && degree <= dim,
            "basis ({dim},{degree}) out of range"
        );
        let all = BASES.get_or_init(|| {
            (0..=MAX_DIM)
                .map(|n| (0..=n).map(|k| MultiIndexBasis::build(n, k)).collect())
                .collect()
        });
        &all[dim][degree]
    }

    fn build(dim: usize, degree: usize) -> Self {
        let mut masks = Vec::with_capacity(binomial(dim, degree));
        let mut current = Vec::with_capacity(degree);
        fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<u16>) {
            if left == 0 {
                out.push(cur.iter().fold(0u16, |m, &i| m | (1 << i)));
                return;
            }
            for i in start..=dim - left {
                cur.push(i);
                rec(i + 1, dim, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(0, dim, degree, &mut current, &mut masks);
        let mut position = vec![usize::MAX; 1 << dim];
        for (p, &m) in masks.iter().enumerate() {
            position[m as usize] = p;
        }
        MultiIndexBasis {
            dim,
            degree,
            masks,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn mask(&self, pos: usize) -> u16 {
        self.masks[pos]
    }

    pub fn masks(&self) -> &[u16] {
        &self.masks
    }

    /// Position of an index set, if it has this basis' degree.
    pub fn position(&self, mask: u16) -> Option<usize> {
        self.position
            .get(mask as usize)
            .copied()
            .filter(|&p| p != usize::MAX)
    }

    /// Zero-based indices of the multi-index at `pos`, increasing.
    pub fn indices(&self, pos: usize) -> Vec<usize> {
        mask_indices(self.masks[pos])
    }
}

pub(crate) fn mask_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation that sorts the concatenation `I ++ J` of two
/// disjoint increasing index sets.
pub(crate) fn merge_sign(left: u16, right: u16) -> f64 {
    debug_assert_eq!(left & right, 0);
    let mut inversions = 0u32;
    let mut r = right;
    while r != 0 {
        let y = r.trailing_zeros();
        let above = if y >= 15 {
            0
        } else {
            left & !((1u16 << (y + 1)) - 1)
        };
        inversions += above.count_ones();
        r &= r - 1;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        for n in 0..=MAX_DIM {
            for k in 0..=n {
                assert_eq!(MultiIndexBasis::get(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn lexicographic_order() {
        let b = MultiIndexBasis::get(4, 2);
        let lists: Vec<_> = (0..b.len()).map(|p| b.indices(p)).collect();
        assert_eq!(
            lists,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for w in lists.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn merge_sign_small_cases() {
        // dx^1 ^ dx^2 is sorted, dx^2 ^ dx^1 needs one swap
        assert_eq!(merge_sign(0b01, 0b10), 1.0);
        assert_eq!(merge_sign(0b10, 0b01), -1.0);
        // dx^{2,3} ^ dx^1 needs two swaps
        assert_eq!(merge_sign(0b110, 0b001), 1.0);
        assert_eq!(merge_sign(0b101, 0b010), -1.0);
    }
}
