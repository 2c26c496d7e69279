//! Coset enumeration (HLT strategy with coincidence processing).
//!
//! Column `2g` of the table holds `Hk·x_g`, column `2g+1` holds `Hk·x_g⁻¹`.
//! The finished table is standardized (cosets renumbered in order of first
//! appearance scanning rows and columns in order), so the output does not
//! depend on the enumeration history.

use crate::error::{domain, Error, Result};
use crate::perm::Perm;
use crate::word::{Presentation, Word};

pub const DEFAULT_MAX_COSETS: usize = 10_000;

const UNDEF: usize = usize::MAX;

/// Complete coset table of a subgroup of a finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    n_generators: usize,
    rows: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    /// `Hk·x_g^{±1}`.
    pub fn right(&self, coset: usize, generator: usize, exp_sign: i64) -> usize {
        self.rows[coset][col(generator, exp_sign)]
    }

    /// The coset `H·w` reached from `H` by reading the group element `w`.
    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.letters().fold(coset, |c, (g, s)| self.right(c, g, s))
    }

    /// Left action `x·(Hk) = Hk·x⁻¹` of each generator, as permutations.
    pub fn left_action(&self) -> Vec<Perm> {
        (0..self.n_generators)
            .map(|g| {
                let images = (0..self.len()).map(|k| self.right(k, g, -1)).collect();
                Perm::from_images(images).expect("complete coset table columns are bijections")
            })
            .collect()
    }
}

fn col(g: usize, sign: i64) -> usize {
    if sign > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn inv_col(c: usize) -> usize {
    c ^ 1
}

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    live: usize,
    max_live: usize,
    max_total: usize,
    queue: Vec<usize>,
}

impl Enumerator {
    fn new(n_generators: usize, max_cosets: usize) -> Self {
        let ncols = 2 * n_generators;
        Enumerator {
            ncols,
            table: vec![vec![UNDEF; ncols]],
            parent: vec![0],
            live: 1,
            max_live: max_cosets,
            max_total: max_cosets.saturating_mul(64).max(4096),
            queue: Vec::new(),
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.live >= self.max_live || self.table.len() >= self.max_total {
            return Err(Error::Resource(format!(
                "coset enumeration exceeded {} cosets (group possibly infinite)",
                self.max_live
            )));
        }
        let d = self.table.len();
        self.table.push(vec![UNDEF; self.ncols]);
        self.parent.push(d);
        self.live += 1;
        self.table[c][x] = d;
        self.table[d][inv_col(x)] = c;
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut k = c;
        while self.parent[k] != r {
            let next = self.parent[k];
            self.parent[k] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        self.live -= 1;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let gamma = self.queue[i];
            i += 1;
            for x in 0..self.ncols {
                let delta = self.table[gamma][x];
                if delta == UNDEF {
                    continue;
                }
                let xi = inv_col(x);
                if self.table[delta][xi] == gamma {
                    self.table[delta][xi] = UNDEF;
                }
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                if self.table[mu][x] != UNDEF {
                    let t = self.table[mu][x];
                    self.merge(nu, t);
                } else if self.table[nu][xi] != UNDEF {
                    let t = self.table[nu][xi];
                    self.merge(mu, t);
                } else {
                    self.table[mu][x] = nu;
                    self.table[nu][xi] = mu;
                }
            }
        }
        self.queue.clear();
    }

    fn scan_and_fill(&mut self, alpha: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() - 1;
        loop {
            while i <= j && self.table[f][w[i]] != UNDEF {
                f = self.table[f][w[i]];
                i += 1;
                if i > j {
                    break;
                }
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.table[b][inv_col(w[j])] != UNDEF {
                b = self.table[b][inv_col(w[j])];
                if j == i {
                    // backward scan met the forward one
                    self.coincidence(f, b);
                    return Ok(());
                }
                j -= 1;
            }
            if i == j {
                self.table[f][w[i]] = b;
                self.table[b][inv_col(w[i])] = f;
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

fn expand(w: &Word) -> Vec<usize> {
    w.letters().map(|(g, s)| col(g, s)).collect()
}

/// Enumerates the right cosets of `⟨subgroup⟩` in the group presented by `p`.
///
/// Fails with a resource error once more than `max_cosets` cosets are alive.
pub fn enumerate_cosets(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable> {
    p.check()?;
    let n = p.rank();
    if let Some(w) = subgroup.iter().find(|w| w.max_generator().is_some_and(|g| g >= n)) {
        return Err(domain!("subgroup word {:?} uses an undeclared generator", w));
    }
    let relators: Vec<Vec<usize>> = p.relations.iter().map(expand).filter(|r| !r.is_empty()).collect();
    let mut e = Enumerator::new(n, max_cosets.max(1));
    for h in subgroup {
        e.scan_and_fill(0, &expand(h))?;
    }
    let mut alpha = 0;
    while alpha < e.table.len() {
        for r in &relators {
            if !e.is_live(alpha) {
                break;
            }
            e.scan_and_fill(alpha, r)?;
        }
        if e.is_live(alpha) {
            for x in 0..e.ncols {
                if e.table[alpha][x] == UNDEF {
                    e.define(alpha, x)?;
                }
            }
        }
        alpha += 1;
    }
    Ok(standardize(&mut e, n))
}

fn standardize(e: &mut Enumerator, n_generators: usize) -> CosetTable {
    let mut order = vec![0usize];
    let mut label = vec![UNDEF; e.table.len()];
    label[0] = 0;
    let mut k = 0;
    while k < order.len() {
        let c = order[k];
        k += 1;
        for x in 0..e.ncols {
            let d = e.rep(e.table[c][x]);
            if label[d] == UNDEF {
                label[d] = order.len();
                order.push(d);
            }
        }
    }
    let rows = order
        .iter()
        .map(|&c| (0..e.ncols).map(|x| label[e.rep(e.table[c][x])]).collect())
        .collect();
    CosetTable { n_generators, rows }
}

/// Order of the group presented by `p`, if it has at most `max_cosets`
/// elements.
pub fn group_order(p: &Presentation, max_cosets: usize) -> Result<usize> {
    Ok(enumerate_cosets(p, &[], max_cosets)?.len())
}
