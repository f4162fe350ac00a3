use std::fmt;

use crate::GroupError;

/// A bijection of `{0, …, n−1}`, shown 1-based in cycle notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n as u8).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut hit = vec![false; n];
        for &i in &images {
            if i >= n || hit[i] {
                return Err(GroupError::NotAPermutation(format!("{images:?}")));
            }
            hit[i] = true;
        }
        Ok(Perm { images: images.into_iter().map(|i| i as u8).collect() })
    }

    /// Swap of two 0-based points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Perm::identity(n);
        p.images.swap(a, b);
        p
    }

    /// Builds a permutation from 1-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                if x == 0 || x > n || used[x - 1] {
                    return Err(GroupError::NotAPermutation(format!("{cycles:?} on {n} points")));
                }
                used[x - 1] = true;
                images[x - 1] = c[(k + 1) % c.len()] - 1;
            }
        }
        Perm::from_images(images)
    }

    /// Parses cycle notation such as `(1 2)(3 5)`; `()` is the identity.
    pub fn parse(s: &str, n: usize) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse { input: s.to_string(), reason: reason.to_string() };
        let t = s.trim();
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let inner_end = rest.find(')').ok_or_else(|| err("unbalanced parenthesis"))?;
            let inner = rest[..inner_end].strip_prefix('(').ok_or_else(|| err("expected `(`"))?;
            let nums: Result<Vec<usize>, _> = inner
                .split([' ', ','])
                .filter(|w| !w.is_empty())
                .map(str::parse)
                .collect();
            let nums = nums.map_err(|_| err("cycle entries must be integers"))?;
            if !nums.is_empty() {
                cycles.push(nums);
            }
            rest = rest[inner_end + 1..].trim_start();
        }
        Perm::from_cycles(n, &cycles).map_err(|_| err("not a permutation of the given points"))
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degrees");
        Perm { images: other.images.iter().map(|&i| self.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// Disjoint cycles of length at least 2, 1-based, each starting at its
    /// least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x + 1);
                x = self.apply(x);
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable();
        CycleType(lens)
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().map(Vec::len).fold(1, lcm)
    }

    /// Relabels points: the result sends `f(i)` to `f(self(i))`.
    pub fn conjugate_by(&self, f: &Perm) -> Perm {
        f.compose(self).compose(&f.inverse())
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}

impl serde::Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Multiset of cycle lengths at least 2, in increasing order. `2+2` is a
/// product of two disjoint transpositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(pub Vec<usize>);

impl CycleType {
    pub fn parse(s: &str) -> Option<CycleType> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Some(CycleType(Vec::new()));
        }
        let mut v: Vec<usize> = s.split('+').map(|w| w.trim().parse().ok()).collect::<Option<_>>()?;
        if v.iter().any(|&k| k < 2) {
            return None;
        }
        v.sort_unstable();
        Some(CycleType(v))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl serde::Serialize for CycleType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
