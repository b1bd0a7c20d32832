//! Small enumeration helpers shared by solvers and range enumerators.

use alloc::vec::Vec;

/// All subsets of `0..n` with at most `t` elements: by size, then lexicographic.
pub fn subsets_up_to(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=t.min(n) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            // advance to the next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&i| combo[i] < n - size + i) else {
                break;
            };
            combo[pos] += 1;
            for j in pos + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

/// Calls `f` on every vector of `parts` non-negative integers with sum at most
/// `max_sum`, in lexicographic order.
pub fn for_each_composition(parts: usize, max_sum: u64, mut f: impl FnMut(&[u64])) {
    fn go(buf: &mut Vec<u64>, parts: usize, left: u64, f: &mut impl FnMut(&[u64])) {
        if buf.len() == parts {
            f(buf);
            return;
        }
        for x in 0..=left {
            buf.push(x);
            go(buf, parts, left - x, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(parts);
    go(&mut buf, parts, max_sum, &mut f);
}

/// Number of vectors visited by [`for_each_composition`], i.e. `C(max_sum + parts, parts)`,
/// or `None` if it exceeds `u64`.
pub fn composition_count(parts: usize, max_sum: u64) -> Option<u64> {
    let mut acc: u128 = 1;
    for i in 1..=parts as u128 {
        acc = acc * (u128::from(max_sum) + i) / i;
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn subsets_are_ordered_by_size_then_lex() {
        assert_eq!(
            subsets_up_to(3, 2),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );
        assert_eq!(subsets_up_to(2, 5).len(), 4);
        assert_eq!(subsets_up_to(0, 1), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn compositions_match_count() {
        for parts in 0..4 {
            for max_sum in 0..7 {
                let mut seen = 0;
                let mut last: Option<Vec<u64>> = None;
                for_each_composition(parts, max_sum, |c| {
                    assert!(c.iter().sum::<u64>() <= max_sum);
                    if let Some(prev) = &last {
                        assert!(prev.as_slice() < c);
                    }
                    last = Some(c.to_vec());
                    seen += 1;
                });
                assert_eq!(Some(seen), composition_count(parts, max_sum));
            }
        }
        assert_eq!(composition_count(2, 2), Some(6));
    }
}
