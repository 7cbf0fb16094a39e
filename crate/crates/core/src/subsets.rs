//! Binomial coefficients and lexicographic k-subset enumeration/ranking.
//!
//! Subsets are sorted vectors of 0-based element indices. Lexicographic order
//! compares these vectors element-wise, so `[0, 1, 2] < [0, 1, 3] < [0, 2, 3]`.

/// `C(n, k)`, saturating at `u64::MAX` on overflow.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral at this point
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Iterator over all `k`-subsets of `{0, .., n-1}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still be advanced
        let pos = (0..k).rev().find(|&i| next[i] < self.n - k + i);
        self.current = pos.map(|i| {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            next
        });
        Some(out)
    }
}

pub fn subsets(n: usize, k: usize) -> Subsets {
    Subsets {
        n,
        current: (k <= n).then(|| (0..k).collect()),
    }
}

/// Lexicographic rank of a sorted `k`-subset of `{0, .., n-1}`, the inverse of
/// the position in [`subsets`].
pub fn rank(subset: &[usize], n: usize) -> u64 {
    let k = subset.len();
    let mut r = 0u64;
    let mut prev = 0usize;
    for (i, &x) in subset.iter().enumerate() {
        debug_assert!(x < n && (i == 0 || x >= prev));
        // count subsets sharing the prefix but with a smaller element here
        for y in prev..x {
            r += binomial(n - 1 - y, k - 1 - i);
        }
        prev = x + 1;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(mut r: u64, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for i in 0..k {
        let mut x = next;
        loop {
            let below = binomial(n - 1 - x, k - 1 - i);
            if r < below {
                break;
            }
            r -= below;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}
