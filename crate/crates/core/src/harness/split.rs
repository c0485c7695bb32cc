use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SplitMix64: add the golden-ratio increment, then two xor-shift-multiply
/// rounds. Small, fast and fully specified, so shuffles are reproducible
/// across platforms and library versions.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Integer in `0..n` by the high half of a 128-bit product.
    pub fn below(&mut self, n: usize) -> usize {
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }
}

/// Fisher–Yates permutation of `0..n`, swapping from the back.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        idx.swap(i, j);
    }
    idx
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_n: usize,
    pub val_n: usize,
    pub test_n: usize,
    pub seed: u64,
    /// Keep the class ratio of the whole set in each part.
    #[serde(default)]
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_n: usize, val_n: usize, test_n: usize, seed: u64) -> Self {
        SplitSpec {
            train_n,
            val_n,
            test_n,
            seed,
            stratified: false,
        }
    }

    pub fn total(&self) -> usize {
        self.train_n + self.val_n + self.test_n
    }
}

/// Row indices of each part, in shuffled order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffles with [`shuffled_indices`] and slices contiguously into
/// train, validation and test. Rows past the three counts are unused.
pub fn split_indices(labels: &[u8], spec: &SplitSpec) -> Result<SplitIndices> {
    let n = labels.len();
    if spec.total() > n {
        return Err(Error::validation(format!(
            "split {}/{}/{} needs {} rows, dataset has {n}",
            spec.train_n,
            spec.val_n,
            spec.test_n,
            spec.total()
        )));
    }
    let order = shuffled_indices(n, spec.seed);
    if !spec.stratified {
        let (train, rest) = order.split_at(spec.train_n);
        let (val, rest) = rest.split_at(spec.val_n);
        return Ok(SplitIndices {
            train: train.to_vec(),
            val: val.to_vec(),
            test: rest[..spec.test_n].to_vec(),
        });
    }
    stratify(labels, &order, spec)
}

fn stratify(labels: &[u8], order: &[usize], spec: &SplitSpec) -> Result<SplitIndices> {
    let (pos, neg): (Vec<usize>, Vec<usize>) = order.iter().partition(|&&i| labels[i] == 1);
    let sizes = [spec.train_n, spec.val_n, spec.test_n];
    let n = labels.len() as u128;
    // Largest-remainder apportionment of positives to each part.
    let mut quota: Vec<(usize, u128)> = sizes
        .iter()
        .map(|&s| {
            let exact = s as u128 * pos.len() as u128;
            ((exact / n) as usize, exact % n)
        })
        .collect();
    let want = (spec.total() as u128 * pos.len() as u128 + n / 2) / n;
    let mut extra = (want as usize).saturating_sub(quota.iter().map(|q| q.0).sum());
    let mut by_remainder: Vec<usize> = (0..3).collect();
    by_remainder.sort_by(|&a, &b| quota[b].1.cmp(&quota[a].1).then(a.cmp(&b)));
    for k in by_remainder {
        if extra > 0 && quota[k].0 < sizes[k] {
            quota[k].0 += 1;
            extra -= 1;
        }
    }
    let pos_total: usize = quota.iter().map(|q| q.0).sum();
    if pos_total > pos.len() || spec.total() - pos_total > neg.len() {
        return Err(Error::validation("stratified split does not fit the class counts"));
    }
    let rank: Vec<usize> = {
        let mut r = vec![0; labels.len()];
        for (k, &i) in order.iter().enumerate() {
            r[i] = k;
        }
        r
    };
    let (mut p, mut q) = (0, 0);
    let mut parts = Vec::with_capacity(3);
    for (k, &size) in sizes.iter().enumerate() {
        let take_pos = quota[k].0;
        let mut part: Vec<usize> = pos[p..p + take_pos]
            .iter()
            .chain(&neg[q..q + size - take_pos])
            .copied()
            .collect();
        p += take_pos;
        q += size - take_pos;
        part.sort_by_key(|&i| rank[i]);
        parts.push(part);
    }
    let test = parts.pop().expect("three parts");
    let val = parts.pop().expect("three parts");
    let train = parts.pop().expect("three parts");
    Ok(SplitIndices { train, val, test })
}

/// Applies [`split_indices`] to any row type.
pub fn split<T: Clone>(rows: &[T], labels: &[u8], spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    if rows.len() != labels.len() {
        return Err(Error::validation("rows and labels differ in length"));
    }
    let idx = split_indices(labels, spec)?;
    let pick = |ix: &[usize]| ix.iter().map(|&i| rows[i].clone()).collect();
    Ok((pick(&idx.train), pick(&idx.val), pick(&idx.test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 1234567, as published with the generator.
        let mut g = SplitMix64::new(1234567);
        assert_eq!(g.next_u64(), 6457827717110365317);
        assert_eq!(g.next_u64(), 3203168211198807973);
        assert_eq!(g.next_u64(), 9817491932198370423);
    }

    #[test]
    fn standard_sizes() {
        let labels: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        let s = split_indices(&labels, &SplitSpec::new(600, 200, 200, 7)).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (600, 200, 200));
        let all: BTreeSet<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
        assert_eq!(all.len(), 1000);
    }

    #[test]
    fn seeds_differ_and_repeat() {
        let labels = vec![0u8; 1000];
        let a = split_indices(&labels, &SplitSpec::new(600, 200, 200, 1)).unwrap();
        let b = split_indices(&labels, &SplitSpec::new(600, 200, 200, 1)).unwrap();
        let c = split_indices(&labels, &SplitSpec::new(600, 200, 200, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.test, c.test);
    }

    #[test]
    fn too_many_rows_requested() {
        assert!(split_indices(&[0, 1, 0], &SplitSpec::new(2, 1, 1, 0)).is_err());
    }

    #[test]
    fn stratified_keeps_ratio() {
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i < 30)).collect();
        let spec = SplitSpec {
            stratified: true,
            ..SplitSpec::new(60, 20, 20, 3)
        };
        let s = split_indices(&labels, &spec).unwrap();
        let pos = |ix: &[usize]| ix.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!((pos(&s.train), pos(&s.val), pos(&s.test)), (18, 6, 6));
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (60, 20, 20));
    }
}
