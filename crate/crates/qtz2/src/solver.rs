//! Enumeration of quasitriangular structures.
//!
//! Non-trivial structures are parametrized by tuples `(α, β, γ, δ)` read off
//! a presentation `S = ⟨s_1⟩ × … × ⟨s_n⟩`: `α_ij = w¹(s_i,s_j)`,
//! `β_i = w²(s_i,a)`, `γ_i = w³(a,s_i)`, `δ = w⁴(a,a)`. Special tuples carry
//! the `σ`, `τ` corrections of the twisted algebra; general tuples are the
//! same search with trivial cocycles and describe the untwisted algebra.
//! Trivial structures are bicharacters of `G` filtered through the verifier.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::cocycle::{ContextError, ExtensionData, PresentationChoice, QtContext};
use crate::hopf::HopfAlgebra;
use crate::rmatrix::{
    is_phi_symmetric, to_tensor, verify_quasitriangular, verify_tensor, RMatrix, Table, VerifyMode,
};
use crate::scalar::{lcm_u64, RootOfUnity};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid data: {0}")]
    Context(#[from] ContextError),
    #[error("{what}: search space of {needed} candidates exceeds the budget of {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u64,
    },
    #[error("tuple rejected: {0}")]
    Tuple(String),
    #[error("division closure failed: {0}")]
    DivisionClosure(String),
    #[error("enumerated R-matrix #{index} failed verification: {detail}")]
    Unverified { index: usize, detail: String },
}

/// Cap on the number of candidates any single search may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: 1 << 24,
        }
    }
}

impl Budget {
    fn admit(&self, what: &'static str, needed: u128) -> Result<(), SolverError> {
        if needed > self.max_candidates as u128 {
            Err(SolverError::Budget {
                what,
                needed,
                limit: self.max_candidates,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub budget: Budget,
    pub choice: PresentationChoice,
    /// Certify every returned R-matrix with the full verifier.
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TupleKind {
    General,
    Special,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionTuple {
    pub kind: TupleKind,
    pub alpha: Vec<Vec<RootOfUnity>>,
    pub beta: Vec<RootOfUnity>,
    pub gamma: Vec<RootOfUnity>,
    pub delta: RootOfUnity,
}

impl SolutionTuple {
    /// Checked constructor.
    pub fn new(
        ctx: &QtContext,
        kind: TupleKind,
        alpha: Vec<Vec<RootOfUnity>>,
        beta: Vec<RootOfUnity>,
        gamma: Vec<RootOfUnity>,
        delta: RootOfUnity,
    ) -> Result<Self, SolverError> {
        let t = SolutionTuple {
            kind,
            alpha,
            beta,
            gamma,
            delta,
        };
        let bad = tuple_violations(ctx, &t);
        if bad.is_empty() {
            Ok(t)
        } else {
            Err(SolverError::Tuple(bad.join("; ")))
        }
    }
}

/// Cocycle values as seen by one tuple kind: the general kind sees trivial ones.
struct Twist<'a> {
    ctx: &'a QtContext,
    special: bool,
}

impl<'a> Twist<'a> {
    fn new(ctx: &'a QtContext, kind: TupleKind) -> Self {
        Twist {
            ctx,
            special: kind == TupleKind::Special,
        }
    }

    fn sigma(&self, g: usize) -> RootOfUnity {
        if self.special {
            self.ctx.data().sigma(g)
        } else {
            RootOfUnity::ONE
        }
    }

    fn tau(&self, g: usize, h: usize) -> RootOfUnity {
        if self.special {
            self.ctx.data().tau(g, h)
        } else {
            RootOfUnity::ONE
        }
    }

    fn eta(&self, g: usize, h: usize) -> RootOfUnity {
        if self.special {
            self.ctx.data().eta(g, h)
        } else {
            RootOfUnity::ONE
        }
    }

    fn p(&self, exps: &[u32]) -> RootOfUnity {
        if self.special {
            self.ctx.p_of(exps)
        } else {
            RootOfUnity::ONE
        }
    }

    /// `P_{s_i^{k_i}}`.
    fn p_power(&self, i: usize) -> RootOfUnity {
        let pres = self.ctx.presentation();
        let mut e = vec![0; pres.rank()];
        e[i] = pres.orders[i];
        self.p(&e)
    }

    /// Bracketed constant of the `δ²` condition, with `τ(b,a)` or `τ(a,b)`.
    fn delta_bracket(&self, flipped: bool) -> RootOfUnity {
        let (a, b) = (self.ctx.base_point(), self.ctx.shift());
        let pres = self.ctx.presentation();
        let mixed = if flipped { self.tau(a, b) } else { self.tau(b, a) };
        self.tau(a, a) * mixed / (self.tau(b, b) * self.sigma(a) * self.p(&pres.m_exps) * self.p(&pres.p_exps))
    }
}

/// `Π_k v_k^{e_k}`.
fn vec_pow(v: &[RootOfUnity], e: &[u32]) -> RootOfUnity {
    v.iter().zip(e).map(|(x, &k)| x.pow(k as i64)).product()
}

/// `Π_{k,l} α_kl^{i_k j_l}`.
fn alpha_prod(alpha: &[Vec<RootOfUnity>], i: &[u32], j: &[u32]) -> RootOfUnity {
    let mut acc = RootOfUnity::ONE;
    for (k, row) in alpha.iter().enumerate() {
        if i[k] == 0 {
            continue;
        }
        for (l, v) in row.iter().enumerate() {
            acc = acc * v.pow((i[k] as i64) * (j[l] as i64));
        }
    }
    acc
}

fn row_word(alpha: &[Vec<RootOfUnity>], i: usize, e: &[u32]) -> RootOfUnity {
    vec_pow(&alpha[i], e)
}

fn col_word(alpha: &[Vec<RootOfUnity>], i: usize, e: &[u32]) -> RootOfUnity {
    alpha.iter().zip(e).map(|(row, &k)| row[i].pow(k as i64)).product()
}

fn gcd(a: u32, b: u32) -> u32 {
    num_integer::gcd(a, b)
}

/// Every condition the tuple fails, as readable strings.
pub fn tuple_violations(ctx: &QtContext, t: &SolutionTuple) -> Vec<String> {
    let pres = ctx.presentation();
    let n = pres.rank();
    let tw = Twist::new(ctx, t.kind);
    let (a, b) = (ctx.base_point(), ctx.shift());
    let (m, p) = (&pres.m_exps, &pres.p_exps);
    let mut bad = vec![];
    if t.alpha.len() != n || t.alpha.iter().any(|r| r.len() != n) || t.beta.len() != n || t.gamma.len() != n {
        return vec![format!("tuple shape does not match rank {}", n)];
    }
    for i in 0..n {
        for j in 0..n {
            let v = t.alpha[i][j];
            if !v.pow(pres.orders[i] as i64).is_one() || !v.pow(pres.orders[j] as i64).is_one() {
                bad.push(format!("(i) α[{}][{}] = {} has order not dividing k_{} and k_{}", i, j, v, i, j));
            }
        }
    }
    for i in 0..n {
        let s = pres.s_gens[i];
        let k = pres.orders[i] as i64;
        if t.beta[i].pow(k) != tw.p_power(i) {
            bad.push(format!("(ii) β[{}]^k ≠ P", i));
        }
        if t.beta[i].pow(2) * tw.sigma(s) != row_word(&t.alpha, i, m) {
            bad.push(format!("(ii) β[{}]²σ(s) ≠ α row word", i));
        }
        if t.gamma[i].pow(k) != tw.p_power(i) {
            bad.push(format!("(iii) γ[{}]^k ≠ P", i));
        }
        if t.gamma[i].pow(2) * tw.sigma(s) != col_word(&t.alpha, i, m) {
            bad.push(format!("(iii) γ[{}]²σ(s) ≠ α column word", i));
        }
    }
    let mp: Vec<u32> = m.iter().zip(p).map(|(x, y)| x + y).collect();
    let d2 = t.delta.pow(2);
    if d2 != tw.delta_bracket(false) * vec_pow(&t.beta, &mp) {
        bad.push("(iv) δ² ≠ bracket·β word".into());
    }
    if d2 != tw.delta_bracket(true) * vec_pow(&t.gamma, &mp) {
        bad.push("(v) δ² ≠ bracket·γ word".into());
    }
    for i in 0..n {
        let e = tw.eta(a, pres.s_gens[i]);
        if col_word(&t.alpha, i, p) != e || row_word(&t.alpha, i, p) != e {
            bad.push(format!("(vi) α words at b ≠ η(a,s_{})", i));
        }
    }
    if vec_pow(&t.beta, p) != vec_pow(&t.gamma, p) * tw.eta(a, b) {
        bad.push("(vi) β word at b ≠ γ word · η(a,b)".into());
    }
    bad
}

/// All `α` matrices with entries of order dividing `gcd(k_i,k_j)` that pass
/// the `α` part of the `b`-word condition, in lexicographic order.
fn alpha_candidates(ctx: &QtContext, kind: TupleKind, symmetric: bool, budget: &Budget) -> Result<Vec<Vec<Vec<RootOfUnity>>>, SolverError> {
    let pres = ctx.presentation();
    let n = pres.rank();
    let tw = Twist::new(ctx, kind);
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !symmetric || i <= j)
        .collect();
    let options: Vec<Vec<RootOfUnity>> = cells
        .iter()
        .map(|&(i, j)| RootOfUnity::all_of_order_dividing(gcd(pres.orders[i], pres.orders[j]) as u64))
        .collect();
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    budget.admit("α matrices", total)?;
    let p = &pres.p_exps;
    let etas: Vec<RootOfUnity> = pres.s_gens.iter().map(|&s| tw.eta(ctx.base_point(), s)).collect();
    let out = (0..total as u64)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut alpha = vec![vec![RootOfUnity::ONE; n]; n];
            for (c, &(i, j)) in cells.iter().enumerate().rev() {
                let len = options[c].len() as u64;
                alpha[i][j] = options[c][(idx % len) as usize];
                if symmetric {
                    alpha[j][i] = alpha[i][j];
                }
                idx /= len;
            }
            (0..n)
                .all(|i| col_word(&alpha, i, p) == etas[i] && row_word(&alpha, i, p) == etas[i])
                .then_some(alpha)
        })
        .collect();
    Ok(out)
}

fn product_of<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![vec![]], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

/// Per-index `β` (or `γ` when `transposed`) candidates for a fixed `α`.
fn side_candidates(ctx: &QtContext, tw: &Twist, alpha: &[Vec<RootOfUnity>], transposed: bool) -> Vec<Vec<RootOfUnity>> {
    let pres = ctx.presentation();
    (0..pres.rank())
        .map(|i| {
            let target = if transposed {
                col_word(alpha, i, &pres.m_exps)
            } else {
                row_word(alpha, i, &pres.m_exps)
            };
            let sig = tw.sigma(pres.s_gens[i]);
            tw.p_power(i)
                .nth_roots(pres.orders[i] as u64)
                .into_iter()
                .filter(|v| v.pow(2) * sig == target)
                .collect()
        })
        .collect()
}

fn enumerate_tuples(ctx: &QtContext, kind: TupleKind, budget: &Budget) -> Result<Vec<SolutionTuple>, SolverError> {
    let alphas = alpha_candidates(ctx, kind, false, budget)?;
    let pres = ctx.presentation();
    let tw = Twist::new(ctx, kind);
    let (m, p) = (&pres.m_exps, &pres.p_exps);
    let mp: Vec<u32> = m.iter().zip(p).map(|(x, y)| x + y).collect();
    let eta_ab = tw.eta(ctx.base_point(), ctx.shift());
    let (br_b, br_g) = (tw.delta_bracket(false), tw.delta_bracket(true));
    let mut total: u128 = 0;
    let mut per_alpha = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let betas = product_of(&side_candidates(ctx, &tw, &alpha, false));
        let gammas = product_of(&side_candidates(ctx, &tw, &alpha, true));
        total += (betas.len() * gammas.len()) as u128;
        per_alpha.push((alpha, betas, gammas));
    }
    budget.admit("(α, β, γ) combinations", total)?;
    let out = per_alpha
        .into_par_iter()
        .flat_map_iter(|(alpha, betas, gammas)| {
            let mut found = vec![];
            for beta in &betas {
                let bw = vec_pow(beta, p);
                let d2 = br_b * vec_pow(beta, &mp);
                for gamma in &gammas {
                    if bw != vec_pow(gamma, p) * eta_ab || d2 != br_g * vec_pow(gamma, &mp) {
                        continue;
                    }
                    for delta in d2.nth_roots(2) {
                        found.push(SolutionTuple {
                            kind,
                            alpha: alpha.clone(),
                            beta: beta.clone(),
                            gamma: gamma.clone(),
                            delta,
                        });
                    }
                }
            }
            found
        })
        .collect::<Vec<_>>();
    debug_assert!(out.iter().all(|t| tuple_violations(ctx, t).is_empty()));
    Ok(out)
}

/// All general tuples, in deterministic order.
pub fn enumerate_general_tuples(ctx: &QtContext, budget: &Budget) -> Result<Vec<SolutionTuple>, SolverError> {
    enumerate_tuples(ctx, TupleKind::General, budget)
}

/// All special tuples, in deterministic order; empty when none exist.
pub fn enumerate_special_tuples(ctx: &QtContext, budget: &Budget) -> Result<Vec<SolutionTuple>, SolverError> {
    enumerate_tuples(ctx, TupleKind::Special, budget)
}

/// Exponent vector of `t·a⁻¹` for `t ∈ T`.
fn t_exps(ctx: &QtContext, t: usize) -> Vec<u32> {
    let g = ctx.data().group();
    let s = g.mul(t, g.inv(ctx.base_point()));
    ctx.presentation().dlog(s).expect("tS = T").to_vec()
}

fn s_exps(ctx: &QtContext, s: usize) -> Vec<u32> {
    ctx.presentation().dlog(s).expect("element of S").to_vec()
}

/// `λ(i, j) = P_{s^i}⁻¹ P_{s^j}⁻¹ τ(s^i,a)⁻¹ τ(a,s^j)⁻¹`.
pub fn lambda(ctx: &QtContext, i: &[u32], j: &[u32]) -> RootOfUnity {
    let g = ctx.data().group();
    let pres = ctx.presentation();
    let (si, sj) = (pres.word(g, i), pres.word(g, j));
    let a = ctx.base_point();
    let d = ctx.data();
    (ctx.p_of(i) * ctx.p_of(j) * d.tau(si, a) * d.tau(a, sj)).inv()
}

/// Fills the four blocks from a tuple. General tuples use the untwisted
/// formulas, special tuples the `P`/`τ`-corrected ones.
pub fn tuple_to_rmatrix(ctx: &QtContext, t: &SolutionTuple) -> RMatrix {
    let d = ctx.data();
    let special = t.kind == TupleKind::Special;
    let (s_set, t_set) = (d.s_set(), d.t_set());
    let se: Vec<Vec<u32>> = s_set.iter().map(|&s| s_exps(ctx, s)).collect();
    let te: Vec<Vec<u32>> = t_set.iter().map(|&x| t_exps(ctx, x)).collect();
    let p_inv = |e: &[u32]| if special { ctx.p_of(e).inv() } else { RootOfUnity::ONE };
    let al = &t.alpha;
    let w1 = Table::from_fn(s_set.len(), s_set.len(), |x, y| alpha_prod(al, &se[x], &se[y]));
    let w2 = Table::from_fn(s_set.len(), t_set.len(), |x, y| {
        p_inv(&se[x]) * vec_pow(&t.beta, &se[x]) * alpha_prod(al, &se[x], &te[y])
    });
    let w3 = Table::from_fn(t_set.len(), s_set.len(), |x, y| {
        p_inv(&se[y]) * vec_pow(&t.gamma, &se[y]) * alpha_prod(al, &te[x], &se[y])
    });
    let w4 = Table::from_fn(t_set.len(), t_set.len(), |x, y| {
        let lam = if special { lambda(ctx, &te[x], &te[y]) } else { RootOfUnity::ONE };
        lam * vec_pow(&t.beta, &te[x]) * vec_pow(&t.gamma, &te[y]) * alpha_prod(al, &te[x], &te[y]) * t.delta
    });
    RMatrix::NonTrivial { w1, w2, w3, w4 }
}

pub fn tuple_to_rmatrix_general(ctx: &QtContext, t: &SolutionTuple) -> RMatrix {
    assert_eq!(t.kind, TupleKind::General);
    tuple_to_rmatrix(ctx, t)
}

pub fn tuple_to_rmatrix_special(ctx: &QtContext, t: &SolutionTuple) -> RMatrix {
    assert_eq!(t.kind, TupleKind::Special);
    tuple_to_rmatrix(ctx, t)
}

/// Reads `(α, β, γ, δ)` back at the defining arguments, unchecked.
pub fn read_tuple(ctx: &QtContext, kind: TupleKind, r: &RMatrix) -> Option<SolutionTuple> {
    let RMatrix::NonTrivial { w1, w2, w3, w4 } = r else { return None };
    let d = ctx.data();
    let gens = &ctx.presentation().s_gens;
    let pa = d.position(ctx.base_point());
    Some(SolutionTuple {
        kind,
        alpha: gens
            .iter()
            .map(|&x| gens.iter().map(|&y| w1.get(d.position(x), d.position(y))).collect())
            .collect(),
        beta: gens.iter().map(|&x| w2.get(d.position(x), pa)).collect(),
        gamma: gens.iter().map(|&x| w3.get(pa, d.position(x))).collect(),
        delta: w4.get(pa, pa),
    })
}

/// The same group and action with trivial cocycles, keeping the presentation.
pub fn untwisted_context(ctx: &QtContext) -> QtContext {
    let d = ctx.data();
    let plain = ExtensionData::untwisted(d.group().clone(), d.action().clone()).expect("action already validated");
    QtContext::with_choice(
        plain,
        PresentationChoice {
            a: Some(ctx.base_point()),
            s_gens: Some(ctx.presentation().s_gens.clone()),
        },
    )
    .expect("untwisted data keeps the same fixed set and shift")
}

/// Checks that every pairwise quotient of the given special solutions is the
/// R-matrix of a general tuple.
pub fn check_division_closure(ctx: &QtContext, rs: &[RMatrix]) -> Result<(), SolverError> {
    let pairs: Vec<(usize, usize)> = (0..rs.len()).flat_map(|i| (0..rs.len()).map(move |j| (i, j))).collect();
    pairs.par_iter().try_for_each(|&(i, j)| {
        let q = rs[i].ratio(&rs[j]);
        let t = read_tuple(ctx, TupleKind::General, &q).ok_or_else(|| SolverError::DivisionClosure("trivial shape".into()))?;
        let bad = tuple_violations(ctx, &t);
        if !bad.is_empty() {
            return Err(SolverError::DivisionClosure(format!("R{}/R{}: {}", i, j, bad.join("; "))));
        }
        if tuple_to_rmatrix(ctx, &t) != q {
            return Err(SolverError::DivisionClosure(format!(
                "R{}/R{} is not the general R-matrix of its own tuple",
                i, j
            )));
        }
        Ok(())
    })
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub rmatrices: Vec<RMatrix>,
    /// Why nothing was searched, when the necessary conditions fail.
    pub diagnostics: Vec<String>,
    /// Tuples found before duplicate elimination.
    pub tuples: usize,
}

fn context_or_gate(data: &ExtensionData, opts: &SolveOptions) -> Result<Result<QtContext, Vec<String>>, SolverError> {
    match QtContext::with_choice(data.clone(), opts.choice.clone()) {
        Ok(ctx) => Ok(Ok(ctx)),
        Err(ContextError::Necessary(rep)) => Ok(Err(rep.diagnostics())),
        Err(e) => Err(e.into()),
    }
}

fn dedupe(rs: Vec<RMatrix>) -> Vec<RMatrix> {
    rs.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

fn certify(data: &ExtensionData, rs: &[RMatrix]) -> Result<(), SolverError> {
    rs.par_iter().enumerate().try_for_each(|(index, r)| {
        let rep = verify_quasitriangular(data, r);
        if rep.passed() {
            Ok(())
        } else {
            Err(SolverError::Unverified {
                index,
                detail: rep.describe(data),
            })
        }
    })
}

/// Every non-trivial quasitriangular structure, from the special tuples.
pub fn enumerate_all_nontrivial(data: &ExtensionData, opts: &SolveOptions) -> Result<Enumeration, SolverError> {
    let ctx = match context_or_gate(data, opts)? {
        Ok(ctx) => ctx,
        Err(diagnostics) => {
            return Ok(Enumeration {
                diagnostics,
                ..Default::default()
            })
        }
    };
    let tuples = enumerate_special_tuples(&ctx, &opts.budget)?;
    let n = tuples.len();
    let rs = dedupe(tuples.par_iter().map(|t| tuple_to_rmatrix(&ctx, t)).collect());
    check_division_closure(&ctx, &rs)?;
    if opts.verify {
        certify(data, &rs)?;
    }
    Ok(Enumeration {
        rmatrices: rs,
        diagnostics: vec![],
        tuples: n,
    })
}

/// Non-trivial structures that are fixed by the `φ`-transform, built from
/// symmetric `α` with `γ_i = β_i η(a,s_i)`.
pub fn enumerate_phi_symmetric(data: &ExtensionData, opts: &SolveOptions) -> Result<Enumeration, SolverError> {
    let ctx = match context_or_gate(data, opts)? {
        Ok(ctx) => ctx,
        Err(diagnostics) => {
            return Ok(Enumeration {
                diagnostics,
                ..Default::default()
            })
        }
    };
    let tw = Twist::new(&ctx, TupleKind::Special);
    let pres = ctx.presentation();
    let alphas = alpha_candidates(&ctx, TupleKind::Special, true, &opts.budget)?;
    let etas: Vec<RootOfUnity> = pres.s_gens.iter().map(|&s| data.eta(ctx.base_point(), s)).collect();
    let mut tuples = vec![];
    for alpha in alphas {
        for beta in product_of(&side_candidates(&ctx, &tw, &alpha, false)) {
            let gamma: Vec<RootOfUnity> = beta.iter().zip(&etas).map(|(b, e)| *b * *e).collect();
            let mp: Vec<u32> = pres.m_exps.iter().zip(&pres.p_exps).map(|(x, y)| x + y).collect();
            let d2 = tw.delta_bracket(false) * vec_pow(&beta, &mp);
            for delta in d2.nth_roots(2) {
                let t = SolutionTuple {
                    kind: TupleKind::Special,
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    gamma: gamma.clone(),
                    delta,
                };
                if tuple_violations(&ctx, &t).is_empty() {
                    tuples.push(t);
                }
            }
        }
    }
    let n = tuples.len();
    let built: Vec<RMatrix> = tuples
        .par_iter()
        .map(|t| tuple_to_rmatrix(&ctx, t))
        .filter(|r| is_phi_symmetric(data, r) && verify_quasitriangular(data, r).passed())
        .collect();
    Ok(Enumeration {
        rmatrices: dedupe(built),
        diagnostics: vec![],
        tuples: n,
    })
}

/// Existence of a special solution decided through a bicharacter on `S` and a
/// pairing `(β, γ)`, without reference to `δ`.
pub fn special_exists_by_pairing(ctx: &QtContext, budget: &Budget) -> Result<bool, SolverError> {
    let pres = ctx.presentation();
    let d = ctx.data();
    let n = pres.rank();
    let (a, b) = (ctx.base_point(), ctx.shift());
    let g = d.group();
    let a2 = g.mul(a, a);
    let options: Vec<Vec<RootOfUnity>> = (0..n * n)
        .map(|c| RootOfUnity::all_of_order_dividing(gcd(pres.orders[c / n], pres.orders[c % n]) as u64))
        .collect();
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    budget.admit("bicharacters of S", total)?;
    let p_pow = |i: usize| {
        let mut e = vec![0; n];
        e[i] = pres.orders[i];
        ctx.p_of(&e)
    };
    let found = (0..total as u64).into_par_iter().any(|mut idx| {
        let mut alpha = vec![vec![RootOfUnity::ONE; n]; n];
        for c in (0..n * n).rev() {
            let len = options[c].len() as u64;
            alpha[c / n][c % n] = options[c][(idx % len) as usize];
            idx /= len;
        }
        // The bicharacter evaluated through discrete logs.
        let w1 = |x: usize, y: usize| alpha_prod(&alpha, &s_exps(ctx, x), &s_exps(ctx, y));
        let bichar_ok = (0..n).all(|i| {
            let s = pres.s_gens[i];
            w1(s, b) == d.eta(a, s) && w1(b, s) == d.eta(a, s)
        });
        if !bichar_ok {
            return false;
        }
        let side = |left: bool| -> Vec<Vec<RootOfUnity>> {
            (0..n)
                .map(|i| {
                    let s = pres.s_gens[i];
                    let target = if left { w1(s, a2) } else { w1(a2, s) };
                    p_pow(i)
                        .nth_roots(pres.orders[i] as u64)
                        .into_iter()
                        .filter(|v| v.pow(2) * d.sigma(s) == target)
                        .collect()
                })
                .collect()
        };
        let (betas, gammas) = (product_of(&side(true)), product_of(&side(false)));
        betas.iter().any(|beta| {
            gammas.iter().any(|gamma| {
                vec_pow(beta, &pres.p_exps) == vec_pow(gamma, &pres.p_exps) * d.eta(a, b)
                    && vec_pow(beta, &pres.m_exps) == vec_pow(gamma, &pres.m_exps)
            })
        })
    });
    Ok(found)
}

/// Every bicharacter `w¹` of `G` (values on pairs of standard generators)
/// whose trivial-shape R-matrix passes the verifier.
pub fn enumerate_trivial(data: &ExtensionData, opts: &SolveOptions) -> Result<Vec<RMatrix>, SolverError> {
    let g = data.group();
    let orders = g.factor_orders().to_vec();
    let r = orders.len();
    let options: Vec<Vec<RootOfUnity>> = (0..r * r)
        .map(|c| RootOfUnity::all_of_order_dividing(gcd(orders[c / r], orders[c % r]) as u64))
        .collect();
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    opts.budget.admit("bicharacters of G", total)?;
    let exps: Vec<Vec<u32>> = g.elements().map(|x| g.element(x).exps).collect();
    let hopf = HopfAlgebra::new(data, lcm_u64(g.exponent(), 1));
    let n = g.order();
    let found: Vec<RMatrix> = (0..total as u64)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut c = vec![vec![RootOfUnity::ONE; r]; r];
            for k in (0..r * r).rev() {
                let len = options[k].len() as u64;
                c[k / r][k % r] = options[k][(idx % len) as usize];
                idx /= len;
            }
            let w1 = Table::from_fn(n, n, |x, y| alpha_prod(&c, &exps[x], &exps[y]));
            let rm = RMatrix::Trivial { w1 };
            verify_tensor(&hopf, &to_tensor(&hopf, &rm), VerifyMode::Generators)
                .passed()
                .then_some(rm)
        })
        .collect();
    Ok(dedupe(found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::tests_support::kac_paljutkin;
    use crate::rmatrix::{extract_w4, is_qt_function, rebuild_from_w4, verify_qybe};

    fn kp_ctx() -> QtContext {
        QtContext::new(kac_paljutkin()).unwrap()
    }

    /// Brute force over α, β, γ in μ_N and δ in μ_2N against the condition list.
    fn brute_force_count(ctx: &QtContext, kind: TupleKind, n_amb: u64) -> usize {
        let n = ctx.presentation().rank();
        let pool = RootOfUnity::all_of_order_dividing(n_amb);
        let dpool = RootOfUnity::all_of_order_dividing(2 * n_amb);
        let alphas = product_of(&vec![pool.clone(); n * n]);
        let vecs = product_of(&vec![pool.clone(); n]);
        let mut count = 0;
        for flat in &alphas {
            let alpha: Vec<Vec<RootOfUnity>> = flat.chunks(n).map(<[_]>::to_vec).collect();
            for beta in &vecs {
                for gamma in &vecs {
                    for &delta in &dpool {
                        let t = SolutionTuple {
                            kind,
                            alpha: alpha.clone(),
                            beta: beta.clone(),
                            gamma: gamma.clone(),
                            delta,
                        };
                        if tuple_violations(ctx, &t).is_empty() {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn kp_special_tuples_match_brute_force_and_verify() {
        let ctx = kp_ctx();
        let tuples = enumerate_special_tuples(&ctx, &Budget::default()).unwrap();
        assert_eq!(tuples.len(), 4);
        assert_eq!(brute_force_count(&ctx, TupleKind::Special, 8), 4);
        for t in &tuples {
            let r = tuple_to_rmatrix_special(&ctx, t);
            let rep = verify_quasitriangular(ctx.data(), &r);
            assert!(rep.passed(), "{}", rep.describe(ctx.data()));
            assert!(verify_qybe(ctx.data(), &r).passed());
            assert_eq!(read_tuple(&ctx, TupleKind::Special, &r).as_ref(), Some(t));
            let w = extract_w4(&r).unwrap();
            assert!(is_qt_function(&ctx, &w).agree());
            assert_eq!(rebuild_from_w4(&ctx, &w, ctx.base_point(), ctx.base_point(), ctx.base_point()).unwrap(), r);
        }
    }

    #[test]
    fn general_tuples_include_all_ones_and_match_brute_force() {
        let ctx = kp_ctx();
        let plain = untwisted_context(&ctx);
        let tuples = enumerate_general_tuples(&plain, &Budget::default()).unwrap();
        let ones = SolutionTuple {
            kind: TupleKind::General,
            alpha: vec![vec![RootOfUnity::ONE]],
            beta: vec![RootOfUnity::ONE],
            gamma: vec![RootOfUnity::ONE],
            delta: RootOfUnity::ONE,
        };
        assert!(tuples.contains(&ones));
        assert_eq!(tuples.len(), brute_force_count(&plain, TupleKind::General, 8));
        for t in &tuples {
            assert!(verify_quasitriangular(plain.data(), &tuple_to_rmatrix_general(&plain, t)).passed());
        }
    }

    #[test]
    fn special_times_general_is_special() {
        let ctx = kp_ctx();
        let plain = untwisted_context(&ctx);
        let specials = enumerate_special_tuples(&ctx, &Budget::default()).unwrap();
        let generals = enumerate_general_tuples(&plain, &Budget::default()).unwrap();
        let r0 = tuple_to_rmatrix(&ctx, &specials[0]);
        for g in &generals {
            let rg = tuple_to_rmatrix(&plain, g);
            let inv = rg.ratio(&rg).ratio(&rg);
            let prod = r0.ratio(&inv);
            assert!(verify_quasitriangular(ctx.data(), &prod).passed());
        }
    }

    #[test]
    fn nontrivial_enumeration_kp() {
        let e = enumerate_all_nontrivial(
            &kac_paljutkin(),
            &SolveOptions {
                verify: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.rmatrices.len(), 4);
        let phi = enumerate_phi_symmetric(&kac_paljutkin(), &SolveOptions::default()).unwrap();
        assert_eq!(phi.rmatrices, e.rmatrices);
        assert!(special_exists_by_pairing(&kp_ctx(), &Budget::default()).unwrap());
    }

    #[test]
    fn identity_survives_exactly_when_tau_is_symmetric() {
        let d = kac_paljutkin();
        let one = RMatrix::Trivial {
            w1: Table::filled(4, 4, RootOfUnity::ONE),
        };
        // τ(b,a) = -1 while τ(a,b) = 1, so Δ is not cocommutative.
        assert!(!verify_quasitriangular(&d, &one).passed());
        let rs = enumerate_trivial(&d, &SolveOptions::default()).unwrap();
        eprintln!("kp trivial survivors: {}", rs.len());
        assert!(!rs.contains(&one));
        for r in &rs {
            assert!(verify_qybe(&d, r).passed());
        }
        let plain = untwisted_context(&kp_ctx());
        let rs = enumerate_trivial(plain.data(), &SolveOptions::default()).unwrap();
        assert!(rs.contains(&one));
        // Untwisted k^G # kZ₂ with G = Z₂²: only bicharacters compatible with the action survive.
        for r in &rs {
            assert!(verify_qybe(plain.data(), r).passed());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_trivial(
            &kac_paljutkin(),
            &SolveOptions {
                budget: Budget { max_candidates: 3 },
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, SolverError::Budget { .. }));
    }

    #[test]
    fn tuple_constructor_rejects_bad_word_relation() {
        let ctx = kp_ctx();
        let t = enumerate_special_tuples(&ctx, &Budget::default()).unwrap()[0].clone();
        let res = SolutionTuple::new(&ctx, t.kind, t.alpha.clone(), t.beta.clone(), vec![t.gamma[0] * RootOfUnity::i()], t.delta);
        assert!(res.is_err());
        assert!(SolutionTuple::new(&ctx, t.kind, t.alpha, t.beta, t.gamma, t.delta).is_ok());
    }
}
