use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A permutation of `{0, .., k-1}` stored by its images.
///
/// Composition follows functions: `a.then_after(b)` is `i -> a(b(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm((0..k).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from 1-based images, the form used in files.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::invalid("permutation images are 1-based"));
        }
        Perm::from_images(images.iter().map(|i| i - 1).collect())
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn then_after(&self, other: &Perm) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    /// Block sum: `self` acts on the first block, `other` on the second.
    pub fn block_sum(&self, other: &Perm) -> Self {
        let k = self.len();
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&i| i + k));
        Perm(v)
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.swap(a, b);
        Perm(v)
    }

    /// Left action on a sequence: entry `i` of the result is entry `σ⁻¹(i)` of `p`.
    pub fn act_left<T: Clone>(&self, p: &[T]) -> Result<Vec<T>> {
        if p.len() != self.len() {
            return Err(Error::Arity {
                expected: self.len(),
                found: p.len(),
            });
        }
        let mut out: Vec<Option<T>> = vec![None; p.len()];
        for (j, x) in p.iter().enumerate() {
            out[self.0[j]] = Some(x.clone());
        }
        Ok(out.into_iter().map(|x| x.expect("bijection")).collect())
    }

    /// Right action on a sequence: entry `i` of the result is entry `τ(i)` of `p`.
    pub fn act_right<T: Clone>(&self, p: &[T]) -> Result<Vec<T>> {
        if p.len() != self.len() {
            return Err(Error::Arity {
                expected: self.len(),
                found: p.len(),
            });
        }
        Ok(self.0.iter().map(|&j| p[j].clone()).collect())
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.shuffle(rng);
        Perm(v)
    }

    /// All permutations of size `k` in lexicographic order of images.
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}
