//! Finite abelian groups `Z_{d1} × … × Z_{dm}` and their order-two automorphisms.
//!
//! Elements are addressed by their index in lexicographic exponent order
//! (last factor fastest). Group operations go through precomputed tables.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("factor order must be at least 1, got {0}")]
    ZeroOrder(u32),
    #[error("group of order {0} exceeds the supported size")]
    TooLarge(u64),
    #[error("exponent vector has length {got}, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("action lists {got} generator images, expected {expected}")]
    ImageCount { got: usize, expected: usize },
    #[error("{0}")]
    Presentation(String),
}

pub const MAX_GROUP_ORDER: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub exps: Vec<u32>,
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    orders: Vec<u32>,
    size: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(factor_orders: Vec<u32>) -> Result<Self, GroupError> {
        if let Some(&z) = factor_orders.iter().find(|&&d| d == 0) {
            return Err(GroupError::ZeroOrder(z));
        }
        let size: u64 = factor_orders.iter().map(|&d| d as u64).product();
        if size > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge(size));
        }
        let size = size as usize;
        let mut g = FiniteAbelianGroup {
            orders: factor_orders,
            size,
            mul: vec![],
            inv: vec![],
        };
        let elems: Vec<Vec<u32>> = (0..size).map(|i| g.exps_of(i)).collect();
        g.mul = Vec::with_capacity(size * size);
        for a in &elems {
            for b in &elems {
                let c: Vec<u32> = a
                    .iter()
                    .zip(b)
                    .zip(&g.orders)
                    .map(|((x, y), d)| (x + y) % d)
                    .collect();
                g.mul.push(g.index_of_exps(&c));
            }
        }
        g.inv = elems
            .iter()
            .map(|a| {
                let c: Vec<u32> = a.iter().zip(&g.orders).map(|(x, d)| (d - x) % d).collect();
                g.index_of_exps(&c)
            })
            .collect();
        Ok(g)
    }

    pub fn factor_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.size
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders
            .iter()
            .fold(1u64, |a, &d| crate::scalar::lcm_u64(a, d as u64))
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    fn exps_of(&self, mut i: usize) -> Vec<u32> {
        let mut e = vec![0; self.orders.len()];
        for k in (0..self.orders.len()).rev() {
            let d = self.orders[k] as usize;
            e[k] = (i % d) as u32;
            i /= d;
        }
        e
    }

    fn index_of_exps(&self, e: &[u32]) -> usize {
        e.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + (x % d) as usize)
    }

    pub fn element(&self, i: usize) -> GroupElement {
        GroupElement { exps: self.exps_of(i) }
    }

    /// Index of an exponent vector; exponents are reduced modulo the factor orders.
    pub fn index(&self, g: &GroupElement) -> Result<usize, GroupError> {
        if g.exps.len() != self.orders.len() {
            return Err(GroupError::Arity {
                got: g.exps.len(),
                expected: self.orders.len(),
            });
        }
        Ok(self.index_of_exps(&g.exps))
    }

    /// The `k`-th standard generator.
    pub fn generator(&self, k: usize) -> usize {
        let mut e = vec![0; self.orders.len()];
        e[k] = 1;
        self.index_of_exps(&e)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        (0..e.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> u32 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn fmt_element(&self, a: usize) -> String {
        self.element(a).to_string()
    }
}

/// An automorphism candidate given by the images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub images: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionViolation {
    /// `d_k · image_k ≠ 0`, so the map is not well defined.
    NotHomomorphism { generator: usize },
    NotBijective { collision: (usize, usize) },
    NotInvolutive { element: usize },
    Trivial,
}

impl fmt::Display for ActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionViolation::NotHomomorphism { generator } => write!(
                f,
                "image of generator {} has order not dividing the generator's order",
                generator
            ),
            ActionViolation::NotBijective { collision } => write!(
                f,
                "elements {} and {} have the same image",
                collision.0, collision.1
            ),
            ActionViolation::NotInvolutive { element } => {
                write!(f, "applying the action twice moves element {}", element)
            }
            ActionViolation::Trivial => write!(f, "the action is the identity"),
        }
    }
}

impl Involution {
    pub fn new(images: Vec<GroupElement>) -> Self {
        Involution { images }
    }

    /// Image table `g ↦ g◁x` extended additively from the generator images.
    pub fn table(&self, group: &FiniteAbelianGroup) -> Result<Vec<usize>, GroupError> {
        if self.images.len() != group.rank() {
            return Err(GroupError::ImageCount {
                got: self.images.len(),
                expected: group.rank(),
            });
        }
        let imgs = self
            .images
            .iter()
            .map(|g| group.index(g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(group
            .elements()
            .map(|i| {
                let e = group.element(i);
                e.exps
                    .iter()
                    .zip(&imgs)
                    .fold(0, |acc, (&k, &img)| group.mul(acc, group.pow(img, k as i64)))
            })
            .collect())
    }

    /// Every way the candidate fails to be a non-trivial involutive automorphism.
    pub fn violations(&self, group: &FiniteAbelianGroup) -> Result<Vec<ActionViolation>, GroupError> {
        let table = self.table(group)?;
        let mut out = vec![];
        for (k, img) in self.images.iter().enumerate() {
            let i = group.index(img)?;
            if group.pow(i, group.factor_orders()[k] as i64) != 0 {
                out.push(ActionViolation::NotHomomorphism { generator: k });
            }
        }
        let mut first: HashMap<usize, usize> = HashMap::new();
        for g in group.elements() {
            if let Some(&h) = first.get(&table[g]) {
                out.push(ActionViolation::NotBijective { collision: (h, g) });
                break;
            }
            first.insert(table[g], g);
        }
        if let Some(g) = group.elements().find(|&g| table[table[g]] != g) {
            out.push(ActionViolation::NotInvolutive { element: g });
        }
        if group.elements().all(|g| table[g] == g) {
            out.push(ActionViolation::Trivial);
        }
        Ok(out)
    }
}

/// Fixed points `S` and moved points `T` of the action, each sorted.
pub fn split_fixed(action: &[usize]) -> (Vec<usize>, Vec<usize>) {
    (0..action.len()).partition(|&g| action[g] == g)
}

/// Why no element `b` with `t◁x = tb` on all of `T` (and `b² = 1`) exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftFailure {
    NoMovedPoints,
    NotUniform { t1: usize, t2: usize },
    NotInvolutive { b: usize },
}

impl fmt::Display for ShiftFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftFailure::NoMovedPoints => write!(f, "the action fixes every element"),
            ShiftFailure::NotUniform { t1, t2 } => write!(
                f,
                "moved points {} and {} are shifted by different elements",
                t1, t2
            ),
            ShiftFailure::NotInvolutive { b } => write!(f, "shift {} does not square to 1", b),
        }
    }
}

pub fn find_b(group: &FiniteAbelianGroup, action: &[usize]) -> Result<usize, ShiftFailure> {
    let (_, t) = split_fixed(action);
    let &t0 = t.first().ok_or(ShiftFailure::NoMovedPoints)?;
    let b = group.mul(group.inv(t0), action[t0]);
    if let Some(&t1) = t.iter().find(|&&t1| action[t1] != group.mul(t1, b)) {
        return Err(ShiftFailure::NotUniform { t1: t0, t2: t1 });
    }
    if group.mul(b, b) != 0 {
        return Err(ShiftFailure::NotInvolutive { b });
    }
    Ok(b)
}

/// `S = ⟨s_1⟩ × … × ⟨s_n⟩` with `|s_i| = k_i`, a chosen `a ∈ T`, and the
/// exponent vectors of `a²` and `b` in the `s_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub s_gens: Vec<usize>,
    pub orders: Vec<u32>,
    pub a: usize,
    pub m_exps: Vec<u32>,
    pub p_exps: Vec<u32>,
    dlog: Vec<Option<Vec<u32>>>,
}

impl Presentation {
    /// Exponents `(i_1..i_n)` with `0 <= i_k < k_k` writing `s` in the generators.
    pub fn dlog(&self, s: usize) -> Option<&[u32]> {
        self.dlog.get(s).and_then(|d| d.as_deref())
    }

    /// `Π s_k^{e_k}`.
    pub fn word(&self, group: &FiniteAbelianGroup, exps: &[u32]) -> usize {
        self.s_gens
            .iter()
            .zip(exps)
            .fold(0, |acc, (&s, &e)| group.mul(acc, group.pow(s, e as i64)))
    }

    pub fn rank(&self) -> usize {
        self.s_gens.len()
    }
}

/// Builds a presentation of `S`.
///
/// With `s_gens = None` the generators come from the Smith normal form of the
/// relation lattice; pinned generators are checked to give a direct
/// decomposition. `a` defaults to the first element of `T`.
pub fn derive_presentation(
    group: &FiniteAbelianGroup,
    s_set: &[usize],
    t_set: &[usize],
    b: usize,
    a: Option<usize>,
    s_gens: Option<&[usize]>,
) -> Result<Presentation, GroupError> {
    let a = match a {
        Some(a) if t_set.binary_search(&a).is_ok() => a,
        Some(a) => {
            return Err(GroupError::Presentation(format!(
                "chosen a = {} is fixed by the action",
                group.fmt_element(a)
            )))
        }
        None => *t_set
            .first()
            .ok_or_else(|| GroupError::Presentation("no moved points".into()))?,
    };
    let gens = match s_gens {
        Some(g) => g.to_vec(),
        None => smith_generators(group, s_set),
    };
    let orders: Vec<u32> = gens.iter().map(|&g| group.element_order(g)).collect();
    let mut dlog = vec![None; group.order()];
    let total: u64 = orders.iter().map(|&k| k as u64).product();
    if total != s_set.len() as u64 {
        return Err(GroupError::Presentation(format!(
            "generator orders multiply to {}, but |S| = {}",
            total,
            s_set.len()
        )));
    }
    let mut exps = vec![0u32; gens.len()];
    for _ in 0..total {
        let g = gens
            .iter()
            .zip(&exps)
            .fold(0, |acc, (&s, &e)| group.mul(acc, group.pow(s, e as i64)));
        if s_set.binary_search(&g).is_err() {
            return Err(GroupError::Presentation(format!(
                "generator word lands outside S at {}",
                group.fmt_element(g)
            )));
        }
        if dlog[g].is_some() {
            return Err(GroupError::Presentation(
                "generators do not give a direct decomposition of S".into(),
            ));
        }
        dlog[g] = Some(exps.clone());
        for k in (0..exps.len()).rev() {
            exps[k] += 1;
            if exps[k] < orders[k] {
                break;
            }
            exps[k] = 0;
        }
    }
    let a2 = group.mul(a, a);
    let m_exps = dlog[a2]
        .clone()
        .ok_or_else(|| GroupError::Presentation("a² is not in S".into()))?;
    let p_exps = dlog[b]
        .clone()
        .ok_or_else(|| GroupError::Presentation("b is not in S".into()))?;
    Ok(Presentation {
        s_gens: gens,
        orders,
        a,
        m_exps,
        p_exps,
        dlog,
    })
}

/// Invariant-factor generators of the subgroup `sub` (sorted element list).
pub fn smith_generators(group: &FiniteAbelianGroup, sub: &[usize]) -> Vec<usize> {
    // Greedy chain of generators; each new one contributes the relation
    // q·g_j = (word in earlier generators) for the least such q > 0.
    let mut gens: Vec<usize> = vec![];
    let mut coords: HashMap<usize, Vec<i64>> = HashMap::from([(0, vec![])]);
    let mut relations: Vec<Vec<i64>> = vec![];
    for &s in sub {
        if coords.contains_key(&s) {
            continue;
        }
        let j = gens.len();
        let mut q = 1i64;
        let mut x = s;
        while !coords.contains_key(&x) {
            x = group.mul(x, s);
            q += 1;
        }
        let mut rel: Vec<i64> = coords[&x].iter().map(|c| -c).collect();
        rel.resize(j, 0);
        rel.push(q);
        relations.push(rel);
        gens.push(s);
        let old: Vec<(usize, Vec<i64>)> = coords.drain().collect();
        for (e, c) in old {
            let mut y = e;
            for k in 0..q {
                let mut c2 = c.clone();
                c2.resize(j, 0);
                c2.push(k);
                coords.insert(y, c2);
                y = group.mul(y, s);
            }
        }
    }
    let r = gens.len();
    for rel in &mut relations {
        rel.resize(r, 0);
    }
    let (diag, vinv) = smith_normal_form(relations, r);
    let mut out = vec![];
    for (i, &d) in diag.iter().enumerate() {
        if d == 1 {
            continue;
        }
        let h = gens
            .iter()
            .zip(&vinv[i])
            .fold(0, |acc, (&g, &c)| {
                let k = group.element_order(g) as i64;
                group.mul(acc, group.pow(g, c.rem_euclid(k)))
            });
        out.push(h);
    }
    out
}

/// Diagonal of the Smith form of a square integer matrix together with
/// `V^{-1}`, where `U M V = D`.
fn smith_normal_form(mut m: Vec<Vec<i64>>, n: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    let mut vinv: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let rows = m.len();
    for t in 0..n.min(rows) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..n {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (pad_diag(&m, n), vinv);
            };
            m.swap(t, pi);
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                vinv.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let f = m[i][t] / p;
                if f != 0 {
                    for j in t..n {
                        m[i][j] -= f * m[t][j];
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..n {
                let f = m[t][j] / p;
                if f != 0 {
                    for i in t..rows {
                        m[i][j] -= f * m[i][t];
                    }
                    // column j += -f · column t  ⇒  row t of V^{-1} += f · row j
                    for c in 0..n {
                        vinv[t][c] += f * vinv[j][c];
                    }
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility of the rest of the block by the pivot.
            let bad = (t + 1..rows).find(|&i| (t + 1..n).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..n {
                        m[t][j] += m[i][j];
                    }
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    (pad_diag(&m, n), vinv)
}

fn pad_diag(m: &[Vec<i64>], n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| m.get(i).map_or(0, |r| r[i].abs()))
        .collect()
}
