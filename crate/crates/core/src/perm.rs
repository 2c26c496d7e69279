use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A permutation of `{0, …, n-1}` stored as its image list.
///
/// Products compose right to left: `(a * b)(i) = a(b(i))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(domain!("image list {:?} is not a bijection", images));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from disjoint cycles over 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree || touched[p] {
                    return Err(domain!("cycle point {} invalid or repeated", p));
                }
                touched[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Perm { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn pow(&self, exp: i64) -> Perm {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut acc = Perm::identity(self.degree());
        for _ in 0..exp.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &j)| *i == j).count()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Parses 1-based cycle notation such as `(12)(34)`, `(1 2 10)` or `()`.
    pub fn parse_cycles(degree: usize, s: &str) -> Result<Perm> {
        let s = s.trim();
        if s == "e" || s == "()" || s.is_empty() {
            return Ok(Perm::identity(degree));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::Parse(format!("stray text in {s:?}")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
            let body = &rest[open + 1..close];
            let points: Vec<usize> = if body.contains(|c: char| c.is_whitespace() || c == ',') {
                body.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse(format!("{e} in {s:?}")))?
            } else {
                body.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad point {c:?} in {s:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            if points.contains(&0) {
                return Err(Error::Parse(format!("points are 1-based in {s:?}")));
            }
            cycles.push(points.into_iter().map(|p| p - 1).collect());
            rest = &rest[close + 1..];
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Perm::from_cycles(degree, &refs)
    }
}

impl Mul for &Perm {
    type Output = Perm;
    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs)
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Perm::from_images(images)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.images
    }
}

/// 1-based cycle notation; points are separated by spaces once the degree
/// exceeds nine.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        let sep = if self.degree() > 9 { " " } else { "" };
        for c in cycles {
            let body: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", body.join(sep))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}
