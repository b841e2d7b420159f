//! Candidate universal R-matrices and their exact certification.
//!
//! An R-matrix on `H` comes in one of two shapes. The trivial shape is
//! `Σ w¹(g,h) e_g ⊗ e_h` over all of `G × G`. The non-trivial shape has
//! four blocks: `w¹` on `S×S` (`e_s ⊗ e_s`), `w²` on `S×T` (`e_s x ⊗ e_t`),
//! `w³` on `T×S` (`e_t ⊗ e_s x`) and `w⁴` on `T×T` (`e_t x ⊗ e_t x`).
//! Tables are indexed by position in the ascending `S` and `T` lists.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::cocycle::{ExtensionData, QtContext};
use crate::hopf::{key_of, BasisElement, Check, HopfAlgebra, Key, TensorElement, Witness};
use crate::scalar::{lcm_u64, Cyclotomic, RootOfUnity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RMatrixError {
    #[error("table {name} is {got:?}, expected {expected:?}")]
    Shape {
        name: &'static str,
        got: (usize, usize),
        expected: (usize, usize),
    },
    #[error("coefficient of {0} is not a root of unity")]
    NotRootOfUnity(String),
    #[error("support does not match either R-matrix shape: {0}")]
    Support(String),
}

/// A dense rectangular table of roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table {
    rows: usize,
    cols: usize,
    data: Vec<RootOfUnity>,
}

impl Table {
    pub fn filled(rows: usize, cols: usize, v: RootOfUnity) -> Self {
        Table {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> RootOfUnity) -> Self {
        Table {
            rows,
            cols,
            data: (0..rows * cols).map(|k| f(k / cols.max(1), k % cols.max(1))).collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<RootOfUnity>>) -> Result<Self, RMatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(RMatrixError::Shape {
                name: "row",
                got: (1, bad.len()),
                expected: (1, c),
            });
        }
        Ok(Table {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> RootOfUnity {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RootOfUnity) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<RootOfUnity>> {
        self.data.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn values(&self) -> &[RootOfUnity] {
        &self.data
    }

    pub fn value_order(&self) -> u64 {
        self.data.iter().fold(1, |a, v| lcm_u64(a, v.den()))
    }

    /// Entrywise product with `other^{-1}`.
    pub fn ratio(&self, other: &Table) -> Table {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Table {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a / *b).collect(),
        }
    }

    fn shape(&self, name: &'static str, expected: (usize, usize)) -> Result<(), RMatrixError> {
        if (self.rows, self.cols) == expected {
            Ok(())
        } else {
            Err(RMatrixError::Shape {
                name,
                got: (self.rows, self.cols),
                expected,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RMatrix {
    Trivial { w1: Table },
    NonTrivial { w1: Table, w2: Table, w3: Table, w4: Table },
}

impl RMatrix {
    pub fn is_trivial(&self) -> bool {
        matches!(self, RMatrix::Trivial { .. })
    }

    pub fn check_shape(&self, data: &ExtensionData) -> Result<(), RMatrixError> {
        let (n, s, t) = (data.group().order(), data.s_set().len(), data.t_set().len());
        match self {
            RMatrix::Trivial { w1 } => w1.shape("w1", (n, n)),
            RMatrix::NonTrivial { w1, w2, w3, w4 } => {
                w1.shape("w1", (s, s))?;
                w2.shape("w2", (s, t))?;
                w3.shape("w3", (t, s))?;
                w4.shape("w4", (t, t))
            }
        }
    }

    pub fn value_order(&self) -> u64 {
        self.tables().iter().fold(1, |a, t| lcm_u64(a, t.value_order()))
    }

    pub fn tables(&self) -> Vec<&Table> {
        match self {
            RMatrix::Trivial { w1 } => vec![w1],
            RMatrix::NonTrivial { w1, w2, w3, w4 } => vec![w1, w2, w3, w4],
        }
    }

    pub fn tables_mut(&mut self) -> Vec<&mut Table> {
        match self {
            RMatrix::Trivial { w1 } => vec![w1],
            RMatrix::NonTrivial { w1, w2, w3, w4 } => vec![w1, w2, w3, w4],
        }
    }

    /// Entrywise quotient of two R-matrices of the same shape.
    pub fn ratio(&self, other: &RMatrix) -> RMatrix {
        match (self, other) {
            (RMatrix::Trivial { w1 }, RMatrix::Trivial { w1: v1 }) => RMatrix::Trivial { w1: w1.ratio(v1) },
            (
                RMatrix::NonTrivial { w1, w2, w3, w4 },
                RMatrix::NonTrivial { w1: v1, w2: v2, w3: v3, w4: v4 },
            ) => RMatrix::NonTrivial {
                w1: w1.ratio(v1),
                w2: w2.ratio(v2),
                w3: w3.ratio(v3),
                w4: w4.ratio(v4),
            },
            _ => panic!("ratio of R-matrices of different shapes"),
        }
    }
}

/// Group-element view of a non-trivial R-matrix.
pub struct Blocks<'a> {
    data: &'a ExtensionData,
    w: [&'a Table; 4],
}

impl<'a> Blocks<'a> {
    pub fn new(data: &'a ExtensionData, r: &'a RMatrix) -> Option<Self> {
        match r {
            RMatrix::NonTrivial { w1, w2, w3, w4 } => Some(Blocks {
                data,
                w: [w1, w2, w3, w4],
            }),
            RMatrix::Trivial { .. } => None,
        }
    }

    pub fn w1(&self, s1: usize, s2: usize) -> RootOfUnity {
        self.w[0].get(self.data.position(s1), self.data.position(s2))
    }

    pub fn w2(&self, s: usize, t: usize) -> RootOfUnity {
        self.w[1].get(self.data.position(s), self.data.position(t))
    }

    pub fn w3(&self, t: usize, s: usize) -> RootOfUnity {
        self.w[2].get(self.data.position(t), self.data.position(s))
    }

    pub fn w4(&self, t1: usize, t2: usize) -> RootOfUnity {
        self.w[3].get(self.data.position(t1), self.data.position(t2))
    }
}

pub fn to_tensor(hopf: &HopfAlgebra, r: &RMatrix) -> TensorElement {
    let d = hopf.data();
    let mut t = TensorElement::zero(2);
    let mut put = |a: BasisElement, b: BasisElement, v: RootOfUnity| t.add_term(key_of(&[a, b]), hopf.scalar(v));
    match r {
        RMatrix::Trivial { w1 } => {
            for g in d.group().elements() {
                for h in d.group().elements() {
                    put(BasisElement::e(g), BasisElement::e(h), w1.get(g, h));
                }
            }
        }
        RMatrix::NonTrivial { w1, w2, w3, w4 } => {
            let (s, tt) = (d.s_set(), d.t_set());
            for (i, &a) in s.iter().enumerate() {
                for (j, &b) in s.iter().enumerate() {
                    put(BasisElement::e(a), BasisElement::e(b), w1.get(i, j));
                }
                for (j, &b) in tt.iter().enumerate() {
                    put(BasisElement::ex(a), BasisElement::e(b), w2.get(i, j));
                    put(BasisElement::e(b), BasisElement::ex(a), w3.get(j, i));
                }
            }
            for (i, &a) in tt.iter().enumerate() {
                for (j, &b) in tt.iter().enumerate() {
                    put(BasisElement::ex(a), BasisElement::ex(b), w4.get(i, j));
                }
            }
        }
    }
    t
}

/// Reads an R-matrix back from its tensor, requiring one of the two exact
/// supports and root-of-unity coefficients.
pub fn from_tensor(data: &ExtensionData, t: &TensorElement) -> Result<RMatrix, RMatrixError> {
    assert_eq!(t.arity(), 2, "R-matrix tensors have arity 2");
    let (n, s, tt) = (data.group().order(), data.s_set(), data.t_set());
    let root = |k: &Key, c: &Cyclotomic| {
        c.as_root_of_unity().ok_or_else(|| {
            RMatrixError::NotRootOfUnity(crate::hopf::fmt_basis(data, &t.basis_of(k)))
        })
    };
    let all_plain = t.terms().all(|(k, _)| k[0] % 2 == 0 && k[1] % 2 == 0);
    if all_plain {
        if t.len() != n * n {
            return Err(RMatrixError::Support(format!(
                "trivial shape needs all {} terms e_g⊗e_h, found {}",
                n * n,
                t.len()
            )));
        }
        let mut w1 = Table::filled(n, n, RootOfUnity::ONE);
        for (k, c) in t.terms() {
            w1.set((k[0] / 2) as usize, (k[1] / 2) as usize, root(k, c)?);
        }
        return Ok(RMatrix::Trivial { w1 });
    }
    let mut w = [
        Table::filled(s.len(), s.len(), RootOfUnity::ONE),
        Table::filled(s.len(), tt.len(), RootOfUnity::ONE),
        Table::filled(tt.len(), s.len(), RootOfUnity::ONE),
        Table::filled(tt.len(), tt.len(), RootOfUnity::ONE),
    ];
    let mut seen = [0usize; 4];
    for (k, c) in t.terms() {
        let (a, b) = (BasisElement::from_index(k[0]), BasisElement::from_index(k[1]));
        let (fa, fb) = (data.is_fixed(a.g), data.is_fixed(b.g));
        let block = match (a.x, fa, b.x, fb) {
            (false, true, false, true) => 0,
            (true, true, false, false) => 1,
            (false, false, true, true) => 2,
            (true, false, true, false) => 3,
            _ => {
                return Err(RMatrixError::Support(format!(
                    "unexpected term {}",
                    crate::hopf::fmt_basis(data, &[a, b])
                )))
            }
        };
        seen[block] += 1;
        w[block].set(data.position(a.g), data.position(b.g), root(k, c)?);
    }
    let want = [s.len() * s.len(), s.len() * tt.len(), tt.len() * s.len(), tt.len() * tt.len()];
    if seen != want {
        return Err(RMatrixError::Support(format!(
            "block sizes {:?}, expected full blocks {:?}",
            seen, want
        )));
    }
    let [w1, w2, w3, w4] = w;
    Ok(RMatrix::NonTrivial { w1, w2, w3, w4 })
}

/// `l(f) = (f ⊗ id)(R)`.
pub fn l_map(r: &TensorElement, f: &crate::hopf::DualElement) -> TensorElement {
    contract(r, f, 0)
}

/// `r(f) = (id ⊗ f)(R)`.
pub fn r_map(r: &TensorElement, f: &crate::hopf::DualElement) -> TensorElement {
    contract(r, f, 1)
}

fn contract(r: &TensorElement, f: &crate::hopf::DualElement, slot: usize) -> TensorElement {
    assert_eq!(r.arity(), 2, "contraction needs arity 2");
    let mut out = TensorElement::zero(1);
    for (k, c) in r.terms() {
        if let Some(v) = f.terms.get(&BasisElement::from_index(k[slot])) {
            out.add_term([k[1 - slot], 0, 0], c * v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VerifyMode {
    /// `Δ^op(h) R = R Δ(h)` on the algebra generators `e_g` and `x`.
    #[default]
    Generators,
    /// The same identity on every basis element.
    FullBasis,
}

#[derive(Clone, Debug)]
pub struct QtReport {
    pub checks: Vec<Check>,
    pub inverse: Option<TensorElement>,
    /// Whether `(S ⊗ id)(R)` equals the computed inverse.
    pub antipode_gives_inverse: Option<bool>,
}

impl QtReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn describe(&self, data: &ExtensionData) -> String {
        self.checks
            .iter()
            .map(|c| c.describe(data))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn verify_quasitriangular(data: &ExtensionData, r: &RMatrix) -> QtReport {
    verify_quasitriangular_with(data, r, VerifyMode::Generators)
}

pub fn verify_quasitriangular_with(data: &ExtensionData, r: &RMatrix, mode: VerifyMode) -> QtReport {
    r.check_shape(data).expect("R-matrix tables do not fit the data");
    let hopf = HopfAlgebra::new(data, r.value_order());
    verify_tensor(&hopf, &to_tensor(&hopf, r), mode)
}

/// Certifies an arbitrary arity-2 element as a universal R-matrix.
pub fn verify_tensor(hopf: &HopfAlgebra, r: &TensorElement, mode: VerifyMode) -> QtReport {
    let d = hopf.data();
    let mut checks = vec![];

    let mut inv_check = Check::new("R invertible");
    inv_check.instances = 1;
    let inverse = match invert(hopf, r) {
        Ok(x) => {
            let unit = hopf.unit(2);
            inv_check.compare(|| "R⁻¹R".into(), &hopf.multiply(&x, r), &unit);
            inv_check.instances = 1;
            Some(x)
        }
        Err(w) => {
            inv_check.failures = 1;
            inv_check.witness = Some(w);
            None
        }
    };
    checks.push(inv_check);

    let r12 = hopf.embed(r, (0, 1));
    let r13 = hopf.embed(r, (0, 2));
    let r23 = hopf.embed(r, (1, 2));
    let mut left = Check::new("(Δ⊗id)R = R13 R23");
    left.compare(|| "R".into(), &hopf.coproduct_slot(r, 0), &hopf.multiply(&r13, &r23));
    checks.push(left);
    let mut right = Check::new("(id⊗Δ)R = R13 R12");
    right.compare(|| "R".into(), &hopf.coproduct_slot(r, 1), &hopf.multiply(&r13, &r12));
    checks.push(right);

    let mut comm = Check::new("Δ^op(h) R = R Δ(h)");
    let mut probes: Vec<(String, TensorElement)> = vec![];
    match mode {
        VerifyMode::Generators => {
            for g in d.group().elements() {
                probes.push((format!("h = e{}", d.group().fmt_element(g)), hopf.basis(&[BasisElement::e(g)])));
            }
            probes.push(("h = x".into(), hopf.x()));
        }
        VerifyMode::FullBasis => {
            for i in 0..hopf.dim() as u32 {
                let b = BasisElement::from_index(i);
                probes.push((
                    format!("h = {}", crate::hopf::fmt_basis(d, &[b])),
                    hopf.basis(&[b]),
                ));
            }
        }
    }
    for (name, h) in probes {
        let lhs = hopf.multiply(&hopf.coproduct_op(&h), r);
        let rhs = hopf.multiply(r, &hopf.coproduct(&h));
        comm.compare(|| name, &lhs, &rhs);
    }
    checks.push(comm);

    let antipode_gives_inverse = inverse.as_ref().map(|x| &hopf.antipode_slot(r, 0) == x);
    QtReport {
        checks,
        inverse,
        antipode_gives_inverse,
    }
}

pub fn verify_qybe(data: &ExtensionData, r: &RMatrix) -> Check {
    let hopf = HopfAlgebra::new(data, r.value_order());
    qybe_tensor(&hopf, &to_tensor(&hopf, r))
}

/// `R12 R13 R23 = R23 R13 R12`.
pub fn qybe_tensor(hopf: &HopfAlgebra, r: &TensorElement) -> Check {
    let r12 = hopf.embed(r, (0, 1));
    let r13 = hopf.embed(r, (0, 2));
    let r23 = hopf.embed(r, (1, 2));
    let lhs = hopf.multiply(&hopf.multiply(&r12, &r13), &r23);
    let rhs = hopf.multiply(&hopf.multiply(&r23, &r13), &r12);
    let mut c = Check::new("R12 R13 R23 = R23 R13 R12");
    c.compare(|| "QYBE".into(), &lhs, &rhs);
    c
}

/// Solves `R·X = 1⊗1` through the sparse left-multiplication matrix of `R`,
/// split into connected blocks.
#[allow(clippy::result_large_err)]
fn invert(hopf: &HopfAlgebra, r: &TensorElement) -> Result<TensorElement, Witness> {
    let dim = hopf.dim() as u32;
    let nkeys = (dim * dim) as usize;
    let idx = |a: u32, b: u32| (a * dim + b) as usize;
    // Column c (input key) -> entries (row, value).
    let mut entries: Vec<(usize, usize, Cyclotomic)> = vec![];
    for (k, c) in r.terms() {
        let (a, b) = (BasisElement::from_index(k[0]), BasisElement::from_index(k[1]));
        for xa in [false, true] {
            let ua = BasisElement {
                g: if a.x { hopf.data().act(a.g) } else { a.g },
                x: xa,
            };
            let Some((pa, fa)) = hopf.mul_basis(a, ua) else { continue };
            for xb in [false, true] {
                let ub = BasisElement {
                    g: if b.x { hopf.data().act(b.g) } else { b.g },
                    x: xb,
                };
                let Some((pb, fb)) = hopf.mul_basis(b, ub) else { continue };
                entries.push((
                    idx(pa.index(), pb.index()),
                    idx(ua.index(), ub.index()),
                    c.mul_root(fa * fb),
                ));
            }
        }
    }
    // Union-find over rows [0, n) and columns [n, 2n).
    let mut parent: Vec<usize> = (0..2 * nkeys).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (row, col, _) in &entries {
        let (a, b) = (find(&mut parent, *row), find(&mut parent, nkeys + col));
        if a != b {
            parent[a] = b;
        }
    }
    let mut comps: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for node in 0..2 * nkeys {
        let root = find(&mut parent, node);
        let e = comps.entry(root).or_default();
        if node < nkeys {
            e.0.push(node);
        } else {
            e.1.push(node - nkeys);
        }
    }
    let mut by_comp: HashMap<usize, Vec<(usize, usize, Cyclotomic)>> = HashMap::new();
    for (row, col, v) in entries {
        by_comp.entry(find(&mut parent, row)).or_default().push((row, col, v));
    }
    let unit_at = |row: usize| {
        let (a, b) = (BasisElement::from_index(row as u32 / dim), BasisElement::from_index(row as u32 % dim));
        !a.x && !b.x
    };
    let singular = |row: Option<usize>, col: Option<usize>| {
        let key = row.or(col).unwrap_or(0) as u32;
        Witness {
            context: "left multiplication by R is singular on the block containing this key".into(),
            basis: vec![BasisElement::from_index(key / dim), BasisElement::from_index(key % dim)],
            lhs: Cyclotomic::zero(1),
            rhs: Cyclotomic::one(1),
        }
    };
    let mut out = TensorElement::zero(2);
    let order = hopf.order();
    let mut roots: Vec<usize> = comps.keys().copied().collect();
    roots.sort_unstable();
    for root in roots {
        let (rows, cols) = &comps[&root];
        if rows.len() != cols.len() {
            return Err(singular(rows.first().copied(), cols.first().copied()));
        }
        let rpos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let cpos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let m = rows.len();
        let mut mat = vec![vec![Cyclotomic::zero(order); m + 1]; m];
        for (row, col, v) in by_comp.remove(&root).unwrap_or_default() {
            let cell = &mut mat[rpos[&row]][cpos[&col]];
            *cell = &*cell + &v;
        }
        for (i, &row) in rows.iter().enumerate() {
            if unit_at(row) {
                mat[i][m] = Cyclotomic::one(order);
            }
        }
        let sol = solve_dense(mat).ok_or_else(|| singular(rows.first().copied(), None))?;
        for (j, v) in sol.into_iter().enumerate() {
            let col = cols[j] as u32;
            out.add_term([col / dim, col % dim, 0], v);
        }
    }
    Ok(out)
}

/// Gaussian elimination on an augmented `m × (m+1)` matrix.
fn solve_dense(mut a: Vec<Vec<Cyclotomic>>) -> Option<Vec<Cyclotomic>> {
    let m = a.len();
    for c in 0..m {
        let p = (c..m).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].inv()?;
        for j in c..=m {
            a[c][j] = &a[c][j] * &inv;
        }
        for r in 0..m {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in c..=m {
                    let v = &a[c][j] * &f;
                    a[r][j] = &a[r][j] - &v;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// `R_φ = (φ⊗φ)(flip R)` with `φ(e_g) = e_{g◁x}`, `φ(e_g x) = e_g x`.
pub fn phi_transform(data: &ExtensionData, r: &RMatrix) -> RMatrix {
    let act = |g: usize| data.act(g);
    match r {
        RMatrix::Trivial { w1 } => {
            let n = data.group().order();
            RMatrix::Trivial {
                w1: Table::from_fn(n, n, |g, h| w1.get(act(h), act(g))),
            }
        }
        RMatrix::NonTrivial { w1, w2, w3, w4 } => {
            let (s, t) = (data.s_set(), data.t_set());
            let tpos = |g: usize| data.position(act(t[g]));
            RMatrix::NonTrivial {
                w1: Table::from_fn(s.len(), s.len(), |i, j| w1.get(j, i)),
                w2: Table::from_fn(s.len(), t.len(), |i, j| w3.get(tpos(j), i)),
                w3: Table::from_fn(t.len(), s.len(), |i, j| w2.get(j, tpos(i))),
                w4: Table::from_fn(t.len(), t.len(), |i, j| w4.get(j, i)),
            }
        }
    }
}

pub fn is_phi_symmetric(data: &ExtensionData, r: &RMatrix) -> bool {
    &phi_transform(data, r) == r
}

/// The same transform applied term by term to a tensor.
pub fn phi_tensor(data: &ExtensionData, r: &TensorElement) -> TensorElement {
    let phi = |i: u32| {
        let b = BasisElement::from_index(i);
        if b.x {
            b
        } else {
            BasisElement::e(data.act(b.g))
        }
    };
    let mut out = TensorElement::zero(2);
    for (k, c) in r.terms() {
        out.add_term(key_of(&[phi(k[1]), phi(k[0])]), c.clone());
    }
    out
}

/// The `w⁴` block, which determines a non-trivial R-matrix.
pub fn extract_w4(r: &RMatrix) -> Option<Table> {
    match r {
        RMatrix::NonTrivial { w4, .. } => Some(w4.clone()),
        RMatrix::Trivial { .. } => None,
    }
}

/// Group-element view of a `T×T` table.
pub struct TFunction<'a> {
    data: &'a ExtensionData,
    w: &'a Table,
}

impl<'a> TFunction<'a> {
    pub fn new(data: &'a ExtensionData, w: &'a Table) -> Self {
        TFunction { data, w }
    }

    #[inline]
    pub fn at(&self, t1: usize, t2: usize) -> RootOfUnity {
        self.w.get(self.data.position(t1), self.data.position(t2))
    }

    /// `w²(s,t) = τ(s,t₀) w(st₀,t) / w(t₀,t)`.
    pub fn w2(&self, s: usize, t: usize, t0: usize) -> RootOfUnity {
        let st0 = self.data.group().mul(s, t0);
        self.data.tau(s, t0) * self.at(st0, t) / self.at(t0, t)
    }

    /// `w³(t,s) = τ(s,t₀) w(t◁x, st₀) / w(t◁x, t₀)`.
    pub fn w3(&self, t: usize, s: usize, t0: usize) -> RootOfUnity {
        let st0 = self.data.group().mul(s, t0);
        let tx = self.data.act(t);
        self.data.tau(s, t0) * self.at(tx, st0) / self.at(tx, t0)
    }

    /// `w¹(s₁,s₂) = w(s₁t₁,s₂t₂) w(t₁,t₂) / (w(s₁t₁,t₂) w(t₁,s₂t₂))`.
    pub fn w1(&self, s1: usize, s2: usize, t1: usize, t2: usize) -> RootOfUnity {
        let g = self.data.group();
        let (a, b) = (g.mul(s1, t1), g.mul(s2, t2));
        self.at(a, b) * self.at(t1, t2) / (self.at(a, t2) * self.at(t1, b))
    }
}

/// Builds the non-trivial R-matrix whose `w⁴` is `w`, using `t0` for the
/// `w²`/`w³` blocks and `(t1, t2)` for `w¹`. No conditions are checked.
pub fn assemble_from_w4(data: &ExtensionData, w: &Table, t0: usize, t1: usize, t2: usize) -> RMatrix {
    let f = TFunction::new(data, w);
    let (s, t) = (data.s_set(), data.t_set());
    RMatrix::NonTrivial {
        w1: Table::from_fn(s.len(), s.len(), |i, j| f.w1(s[i], s[j], t1, t2)),
        w2: Table::from_fn(s.len(), t.len(), |i, j| f.w2(s[i], t[j], t0)),
        w3: Table::from_fn(t.len(), s.len(), |i, j| f.w3(t[i], s[j], t0)),
        w4: w.clone(),
    }
}

/// Rebuilds the R-matrix of a quasitriangular function.
pub fn rebuild_from_w4(
    ctx: &QtContext,
    w: &Table,
    t0: usize,
    t1: usize,
    t2: usize,
) -> Result<RMatrix, Box<QtFunctionReport>> {
    let rep = is_qt_function(ctx, w);
    if !rep.definition_holds() {
        return Err(Box::new(rep));
    }
    Ok(assemble_from_w4(ctx.data(), w, t0, t1, t2))
}

#[derive(Clone, Debug)]
pub struct QtFunctionReport {
    /// Conditions (i)–(v) of the definition, each checked exhaustively.
    pub definition: Vec<Check>,
    /// `l_w` multiplicative and `r_w` anti-multiplicative on the span of the `X_g`.
    pub homomorphisms: Vec<Check>,
    /// The two closing conditions at the base point `t0`.
    pub closing: Vec<Check>,
}

impl QtFunctionReport {
    pub fn definition_holds(&self) -> bool {
        self.definition.iter().all(Check::passed)
    }

    /// Homomorphism conditions plus the two closing conditions.
    pub fn reduced_holds(&self) -> bool {
        self.homomorphisms.iter().chain(&self.closing).all(Check::passed)
    }

    /// Conditions (i)–(iv) against the homomorphism form.
    pub fn first_four_agree(&self) -> bool {
        self.definition[..4].iter().all(Check::passed) == self.homomorphisms.iter().all(Check::passed)
    }

    pub fn agree(&self) -> bool {
        self.definition_holds() == self.reduced_holds()
    }

    pub fn describe(&self, data: &ExtensionData) -> String {
        self.definition
            .iter()
            .chain(&self.homomorphisms)
            .chain(&self.closing)
            .map(|c| c.describe(data))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn is_qt_function(ctx: &QtContext, w: &Table) -> QtFunctionReport {
    is_qt_function_at(ctx, w, ctx.base_point())
}

pub fn is_qt_function_at(ctx: &QtContext, w: &Table, t0: usize) -> QtFunctionReport {
    let d = ctx.data();
    let g = d.group();
    let f = TFunction::new(d, w);
    let (s_set, t_set) = (d.s_set(), d.t_set());
    let order = lcm_u64(d.value_order(), w.value_order()) as u32;
    let el = |x: usize| g.fmt_element(x);
    // Scalar identity checks reuse Check through one-term tensors.
    let scalar_check = |c: &mut Check, ctx: String, l: RootOfUnity, r: RootOfUnity| {
        let lhs = TensorElement::basis(&[BasisElement::e(0)], l.to_cyclotomic_in(lcm_u64(order as u64, l.den()) as u32));
        let rhs = TensorElement::basis(&[BasisElement::e(0)], r.to_cyclotomic_in(lcm_u64(order as u64, r.den()) as u32));
        if l == r {
            c.instances += 1;
        } else {
            c.compare(|| ctx, &lhs, &rhs);
        }
    };

    let mut c1 = Check::new("(i) τ(s,t₁)w(st₁,t)/w(t₁,t) independent of t₁");
    let mut c2 = Check::new("(ii) τ(s,t₁)w(t,st₁)/w(t,t₁) independent of t₁");
    let base = t_set[0];
    for &s in s_set {
        for &t in t_set {
            let v1 = |t1: usize| d.tau(s, t1) * f.at(g.mul(s, t1), t) / f.at(t1, t);
            let v2 = |t1: usize| d.tau(s, t1) * f.at(t, g.mul(s, t1)) / f.at(t, t1);
            for &t1 in t_set {
                scalar_check(&mut c1, format!("s={}, t={}, t₁={}", el(s), el(t), el(t1)), v1(t1), v1(base));
                scalar_check(&mut c2, format!("s={}, t={}, t₁={}", el(s), el(t), el(t1)), v2(t1), v2(base));
            }
        }
    }
    let mut c3 = Check::new("(iii) w(t,t₁)w(t⁻¹,t₁◁x)σ(t₁) = τ(t,t⁻¹)");
    let mut c4 = Check::new("(iv) w(t₁,t)w(t₁◁x,t⁻¹)σ(t₁) = τ(t,t⁻¹)");
    let mut c5 = Check::new("(v) w(t₁◁x,t₂◁x) = τ(t₁◁x,t₂◁x)/τ(t₂,t₁)·w(t₁,t₂)");
    for &t in t_set {
        let ti = g.inv(t);
        for &t1 in t_set {
            let t1x = d.act(t1);
            scalar_check(&mut c3, format!("t={}, t₁={}", el(t), el(t1)), f.at(t, t1) * f.at(ti, t1x) * d.sigma(t1), d.tau(t, ti));
            scalar_check(&mut c4, format!("t={}, t₁={}", el(t), el(t1)), f.at(t1, t) * f.at(t1x, ti) * d.sigma(t1), d.tau(t, ti));
            let (a, b) = (t, t1);
            let (ax, bx) = (d.act(a), d.act(b));
            scalar_check(&mut c5, format!("t₁={}, t₂={}", el(a), el(b)), f.at(ax, bx), d.tau(ax, bx) / d.tau(b, a) * f.at(a, b));
        }
    }

    // l_w and r_w on the X_g, multiplied in H.
    let hopf = HopfAlgebra::new(d, w.value_order());
    let lw = |x: usize| {
        let mut out = TensorElement::zero(1);
        for &tp in t_set {
            if d.is_fixed(x) {
                out.add_term(key_of(&[BasisElement::e(tp)]), hopf.scalar(f.w2(x, tp, t0)));
            } else {
                out.add_term(key_of(&[BasisElement::ex(tp)]), hopf.scalar(f.at(x, tp)));
            }
        }
        out
    };
    let rw = |x: usize| {
        let mut out = TensorElement::zero(1);
        for &tp in t_set {
            if d.is_fixed(x) {
                out.add_term(key_of(&[BasisElement::e(tp)]), hopf.scalar(f.w3(tp, x, t0)));
            } else {
                out.add_term(key_of(&[BasisElement::ex(tp)]), hopf.scalar(f.at(tp, x)));
            }
        }
        out
    };
    let lws: Vec<TensorElement> = g.elements().map(lw).collect();
    let rws: Vec<TensorElement> = g.elements().map(rw).collect();
    let mut lhom = Check::new("l_w(X_g)l_w(X_h) = τ(g,h) l_w(X_gh)");
    let mut rhom = Check::new("r_w(X_g)r_w(X_h) = τ(h,g) r_w(X_hg)");
    for x in g.elements() {
        for y in g.elements() {
            let xy = g.mul(x, y);
            lhom.compare(
                || format!("g={}, h={}", el(x), el(y)),
                &hopf.multiply(&lws[x], &lws[y]),
                &lws[xy].scale(&hopf.scalar(d.tau(x, y))),
            );
            rhom.compare(
                || format!("g={}, h={}", el(x), el(y)),
                &hopf.multiply(&rws[x], &rws[y]),
                &rws[xy].scale(&hopf.scalar(d.tau(y, x))),
            );
        }
    }

    let b = ctx.shift();
    let mut p1 = Check::new("w¹(s,b) = w¹(b,s) = η(t₀,s)");
    for &s in s_set {
        let e = d.eta(t0, s);
        scalar_check(&mut p1, format!("s={}, w¹(s,b)", el(s)), f.w1(s, b, t0, t0), e);
        scalar_check(&mut p1, format!("s={}, w¹(b,s)", el(s)), f.w1(b, s, t0, t0), e);
    }
    let mut p2 = Check::new("w(t₀◁x,t₀◁x) = τ(t₀◁x,t₀◁x)/τ(t₀,t₀)·w(t₀,t₀)");
    let t0x = d.act(t0);
    scalar_check(&mut p2, format!("t₀={}", el(t0)), f.at(t0x, t0x), d.tau(t0x, t0x) / d.tau(t0, t0) * f.at(t0, t0));

    QtFunctionReport {
        definition: vec![c1, c2, c3, c4, c5],
        homomorphisms: vec![lhom, rhom],
        closing: vec![p1, p2],
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["w1", "w2", "w3", "w4"];
        let kind = if self.is_trivial() { "trivial" } else { "nontrivial" };
        writeln!(f, "{} R-matrix", kind)?;
        for (name, t) in names.iter().zip(self.tables()) {
            write!(f, "  {}:", name)?;
            for row in t.to_rows() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                write!(f, " [{}]", cells.join(" "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
