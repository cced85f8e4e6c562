//! Lexicographic k-subsets of `{0, .., m-1}` as bitmasks.

use alloc::vec::Vec;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All k-subsets of `{0..m}` in lexicographic order of their sorted
/// element lists. Index `i` in the returned list is the flat coefficient
/// index of the subset.
pub fn subsets(m: usize, k: usize) -> Vec<u32> {
    assert!(m < 32, "ambient dimension too large");
    let mut out = Vec::with_capacity(binomial(m, k));
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u32, |acc, &i| acc | (1 << i)));
        // advance to the next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < m - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Flat lexicographic index of a subset given as a bitmask.
pub fn subset_index(m: usize, mask: u32) -> usize {
    // number of k-subsets lexicographically smaller
    let k = mask.count_ones() as usize;
    let mut index = 0;
    let mut prev: usize = 0;
    let mut remaining = k;
    for elem in bits(mask) {
        for skipped in prev..elem {
            index += binomial(m - skipped - 1, remaining - 1);
        }
        prev = elem + 1;
        remaining -= 1;
    }
    index
}

/// Elements of a bitmask in increasing order.
pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of the permutation that sorts the concatenation of the sorted
/// lists of `a` and `b` (assumed disjoint).
pub fn merge_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0u32;
    for i in bits(a) {
        inversions += (b & ((1u32 << i) - 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let s = subsets(4, 2);
        // {01, 02, 03, 12, 13, 23}
        assert_eq!(s, [0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        for (i, &mask) in s.iter().enumerate() {
            assert_eq!(subset_index(4, mask), i);
        }
    }

    #[test]
    fn index_round_trip() {
        for m in 0..9 {
            for k in 0..=m {
                let s = subsets(m, k);
                assert_eq!(s.len(), binomial(m, k));
                for (i, &mask) in s.iter().enumerate() {
                    assert_eq!(subset_index(m, mask), i);
                }
            }
        }
    }

    #[test]
    fn merge_signs() {
        assert_eq!(merge_sign(0b0011, 0b1100), 1);
        assert_eq!(merge_sign(0b1100, 0b0011), 1);
        assert_eq!(merge_sign(0b0010, 0b0001), -1);
        assert_eq!(merge_sign(0b0101, 0b1010), -1);
    }
}
