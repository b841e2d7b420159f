//! The K(8n) and A(8n) families, the Kac–Paljutkin algebra, their closed-form
//! classifications, and restriction to `◁x`-stable subgroups.

use std::fmt;

use thiserror::Error;

use crate::cocycle::{validate, ContextError, DataError, ExtensionData, PresentationChoice, QtContext, ValidationReport};
use crate::group::{smith_generators, FiniteAbelianGroup, GroupElement, GroupError, Involution};
use crate::hopf::{BasisElement, Check, HopfAlgebra, TensorElement};
use crate::rmatrix::RMatrix;
use crate::scalar::RootOfUnity;
use crate::solver::{tuple_to_rmatrix, SolutionTuple, SolverError, TupleKind};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("n must be positive")]
    ZeroN,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("tables fail validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("data is not a member of the {0} family: {1}")]
    Mismatch(Family, String),
    #[error("unknown preset {0:?}; expected kac-paljutkin, K8n:n=<k>:untwisted|kp, or A8n:n=<k>:paper|untwisted")]
    Preset(String),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("subgroup is not closed under {0}")]
    NotSubgroup(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    K,
    A,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::K => write!(f, "K(8n)"),
            Family::A => write!(f, "A(8n)"),
        }
    }
}

/// A family member: the family group with arbitrary `σ`, `τ` tables in the
/// group's element order.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
    pub sigma: Vec<RootOfUnity>,
    pub tau: Vec<Vec<RootOfUnity>>,
}

/// `Z_{2n} × Z_2` with `a ↦ ab`, `b ↦ b`, or `Z_{4n}` with `a ↦ a^{2n+1}`.
pub fn family_group(family: Family, n: u32) -> Result<(FiniteAbelianGroup, Involution), FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroN);
    }
    let ge = |e: &[u32]| GroupElement { exps: e.to_vec() };
    Ok(match family {
        Family::K => (
            FiniteAbelianGroup::new(vec![2 * n, 2])?,
            Involution::new(vec![ge(&[1, 1]), ge(&[0, 1])]),
        ),
        Family::A => (
            FiniteAbelianGroup::new(vec![4 * n])?,
            Involution::new(vec![ge(&[2 * n + 1])]),
        ),
    })
}

pub fn make_family(spec: &FamilySpec) -> Result<ExtensionData, FamilyError> {
    let (g, act) = family_group(spec.family, spec.n)?;
    checked(ExtensionData::new(g, act, spec.sigma.clone(), spec.tau.clone())?)
}

fn checked(d: ExtensionData) -> Result<ExtensionData, FamilyError> {
    let rep = validate(&d);
    if rep.is_valid() {
        Ok(d)
    } else {
        Err(FamilyError::Invalid(rep))
    }
}

fn sign(e: i64) -> RootOfUnity {
    RootOfUnity::minus_one().pow(e)
}

/// K(8n) with `σ(a^i b^j) = (-1)^{(i-j)j}`, `τ(a^i b^j, a^k b^l) = (-1)^{j(k-l)}`;
/// at `n = 1` this is the Kac–Paljutkin algebra.
pub fn k_family_kp_tables(n: u32) -> Result<ExtensionData, FamilyError> {
    let (g, act) = family_group(Family::K, n)?;
    let plain = ExtensionData::untwisted(g.clone(), act)?;
    let e = |x: usize| {
        let v = g.element(x).exps;
        (v[0] as i64, v[1] as i64)
    };
    checked(plain.with_tables(
        |x| {
            let (i, j) = e(x);
            sign((i - j) * j)
        },
        |x, y| {
            let ((_, j), (k, l)) = (e(x), e(y));
            sign(j * (k - l))
        },
    ))
}

pub fn make_kac_paljutkin() -> ExtensionData {
    k_family_kp_tables(1).expect("Kac–Paljutkin tables are valid")
}

pub fn k_untwisted(n: u32) -> Result<ExtensionData, FamilyError> {
    let (g, act) = family_group(Family::K, n)?;
    checked(ExtensionData::untwisted(g, act)?)
}

/// A(8n) with `σ ≡ 1`, `τ(a^i, a^j) = (-1)^{ij}`.
pub fn a_sign_cocycle(n: u32) -> Result<ExtensionData, FamilyError> {
    let (g, act) = family_group(Family::A, n)?;
    let plain = ExtensionData::untwisted(g.clone(), act)?;
    let e = |x: usize| g.element(x).exps[0] as i64;
    checked(plain.with_tables(|_| RootOfUnity::ONE, |x, y| sign(e(x) * e(y))))
}

pub fn a_untwisted(n: u32) -> Result<ExtensionData, FamilyError> {
    let (g, act) = family_group(Family::A, n)?;
    checked(ExtensionData::untwisted(g, act)?)
}

/// Multiplies `τ` by the coboundary of `f` and `σ` by `1/(f(g) f(g◁x))`,
/// which keeps all compatibility identities. `f(1)` must be 1.
pub fn twist_by_coboundary(data: &ExtensionData, f: &[RootOfUnity]) -> Result<ExtensionData, FamilyError> {
    let g = data.group();
    assert_eq!(f.len(), g.order());
    assert!(f[g.identity()].is_one(), "f must be unital");
    checked(data.with_tables(
        |x| data.sigma(x) / (f[x] * f[data.act(x)]),
        |x, y| data.tau(x, y) * f[x] * f[y] / f[g.mul(x, y)],
    ))
}

/// Resolves `kac-paljutkin`, `K8n:n=<k>:untwisted`, `K8n:n=<k>:kp`,
/// `A8n:n=<k>:paper` and `A8n:n=<k>:untwisted`.
pub fn preset(name: &str) -> Result<ExtensionData, FamilyError> {
    if name == "kac-paljutkin" {
        return Ok(make_kac_paljutkin());
    }
    let bad = || FamilyError::Preset(name.to_string());
    let parts: Vec<&str> = name.split(':').collect();
    let [fam, n, tables] = parts[..] else { return Err(bad()) };
    let n: u32 = n.strip_prefix("n=").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
    match (fam, tables) {
        ("K8n", "untwisted") => k_untwisted(n),
        ("K8n", "kp") => k_family_kp_tables(n),
        ("A8n", "paper") => a_sign_cocycle(n),
        ("A8n", "untwisted") => a_untwisted(n),
        _ => Err(bad()),
    }
}

/// Family and `n` when the group and action are literally a family shape.
pub fn recognize(data: &ExtensionData) -> Option<(Family, u32)> {
    let orders = data.group().factor_orders();
    for fam in [Family::K, Family::A] {
        let n = match (fam, orders) {
            (Family::K, [m, 2]) if m % 2 == 0 => m / 2,
            (Family::A, [m]) if m % 4 == 0 => m / 4,
            _ => continue,
        };
        if let Ok((g, act)) = family_group(fam, n) {
            if &g == data.group() && &act == data.action() {
                return Some((fam, n));
            }
        }
    }
    None
}

fn require(data: &ExtensionData, fam: Family) -> Result<u32, FamilyError> {
    match recognize(data) {
        Some((f, n)) if f == fam => Ok(n),
        _ => Err(FamilyError::Mismatch(
            fam,
            format!(
                "group {:?} with generator images {:?}",
                data.group().factor_orders(),
                data.action().images.iter().map(|e| e.to_string()).collect::<Vec<_>>()
            ),
        )),
    }
}

/// Context with `a` the first generator and `S` generated by `a²` (and `b`
/// for the K family).
pub fn family_context(data: &ExtensionData, fam: Family) -> Result<QtContext, FamilyError> {
    require(data, fam)?;
    let g = data.group();
    let a = g.generator(0);
    let s_gens = match fam {
        Family::K => vec![g.mul(a, a), g.generator(1)],
        Family::A => vec![g.mul(a, a)],
    };
    Ok(QtContext::with_choice(
        data.clone(),
        PresentationChoice {
            a: Some(a),
            s_gens: Some(s_gens),
        },
    )?)
}

/// One classified structure: the closed-form parameters, the full tuple and
/// the R-matrix it builds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classified {
    /// `(β₁, β₂, δ)` for K, `(β, δ)` for A.
    pub params: Vec<RootOfUnity>,
    pub tuple: SolutionTuple,
    pub rmatrix: RMatrix,
}

/// All `(β₁, β₂, δ)` with `β₁^n = P_{s₁^n}`, `β₂² = P_{b²}`,
/// `δ² = τ(a,a)τ(b,a)/(τ(b,b)σ(a)) β₁β₂`, built into R-matrices.
pub fn classify_k(data: &ExtensionData) -> Result<Vec<Classified>, FamilyError> {
    let ctx = family_context(data, Family::K)?;
    let n = require(data, Family::K)?;
    let (a, b) = (ctx.base_point(), ctx.shift());
    let s1 = ctx.presentation().s_gens[0];
    let k1 = ctx.presentation().orders[0];
    debug_assert_eq!(k1, n);
    let d = ctx.data();
    let p1 = ctx.p_of(&[k1, 0]);
    let p2 = ctx.p_of(&[0, 2]);
    let bracket = d.tau(a, a) * d.tau(b, a) / (d.tau(b, b) * d.sigma(a));
    let mut out = vec![];
    for beta1 in p1.nth_roots(n as u64) {
        for beta2 in p2.nth_roots(2) {
            for delta in (bracket * beta1 * beta2).nth_roots(2) {
                let alpha = vec![
                    vec![beta1.pow(2) * d.sigma(s1), RootOfUnity::ONE],
                    vec![RootOfUnity::ONE, d.eta(a, b)],
                ];
                let gamma = vec![beta1 * d.eta(a, s1), beta2 * d.eta(a, b)];
                let tuple = SolutionTuple::new(&ctx, TupleKind::Special, alpha, vec![beta1, beta2], gamma, delta)?;
                let rmatrix = tuple_to_rmatrix(&ctx, &tuple);
                out.push(Classified {
                    params: vec![beta1, beta2, delta],
                    tuple,
                    rmatrix,
                });
            }
        }
    }
    Ok(out)
}

/// All `(β, δ)` with `β^{2n} = P_{s^{2n}}` and `δ² = τ(a,a)τ(b,a)/(τ(b,b)σ(a))
/// P_{s^n}^{-1} β^{1+n}`, built into R-matrices with `α = β²σ(s)`, `γ = β`.
pub fn classify_a(data: &ExtensionData) -> Result<Vec<Classified>, FamilyError> {
    classify_a_with_sign(data, -1)
}

/// `classify_a` with the exponent of `P_{s^n}` in the `δ²` constraint exposed.
pub fn classify_a_with_sign(data: &ExtensionData, p_sign: i64) -> Result<Vec<Classified>, FamilyError> {
    let ctx = family_context(data, Family::A)?;
    let n = require(data, Family::A)?;
    let (a, b) = (ctx.base_point(), ctx.shift());
    let s = ctx.presentation().s_gens[0];
    let d = ctx.data();
    let p_full = ctx.p_of(&[2 * n]);
    let p_half = ctx.p_of(&[n]);
    let bracket = d.tau(a, a) * d.tau(b, a) / (d.tau(b, b) * d.sigma(a));
    let mut out = vec![];
    for beta in p_full.nth_roots(2 * n as u64) {
        let target = bracket * p_half.pow(p_sign) * beta.pow(1 + n as i64);
        for delta in target.nth_roots(2) {
            let alpha = vec![vec![beta.pow(2) * d.sigma(s)]];
            let tuple = SolutionTuple::new(&ctx, TupleKind::Special, alpha, vec![beta], vec![beta], delta)?;
            let rmatrix = tuple_to_rmatrix(&ctx, &tuple);
            out.push(Classified {
                params: vec![beta, delta],
                tuple,
                rmatrix,
            });
        }
    }
    Ok(out)
}

/// Restriction of the data to a `◁x`-stable subgroup, in coordinates given by
/// the chosen generators, together with the inclusion of its elements.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub data: ExtensionData,
    /// Sub-element index to parent element index.
    pub embed: Vec<usize>,
    /// Parent element index to sub-element index, when inside.
    pub project: Vec<Option<usize>>,
}

/// Restriction along explicit generators, which must give a direct
/// decomposition of the subgroup they span.
pub fn restrict_along(data: &ExtensionData, gens: &[usize]) -> Result<Quotient, FamilyError> {
    let g = data.group();
    let orders: Vec<u32> = gens.iter().map(|&x| g.element_order(x)).collect();
    let sub_group = FiniteAbelianGroup::new(orders.clone())?;
    let span = g.span(gens);
    if span.len() != sub_group.order() {
        return Err(FamilyError::Group(GroupError::Presentation(
            "generators do not give a direct decomposition".into(),
        )));
    }
    if span.iter().any(|&x| span.binary_search(&data.act(x)).is_err()) {
        return Err(FamilyError::NotSubgroup("the action"));
    }
    let embed: Vec<usize> = sub_group
        .elements()
        .map(|y| {
            let e = sub_group.element(y).exps;
            gens.iter().zip(&e).fold(g.identity(), |acc, (&h, &k)| g.mul(acc, g.pow(h, k as i64)))
        })
        .collect();
    let mut project = vec![None; g.order()];
    for (y, &x) in embed.iter().enumerate() {
        project[x] = Some(y);
    }
    let images: Vec<GroupElement> = (0..gens.len())
        .map(|k| sub_group.element(project[data.act(embed[sub_group.generator(k)])].expect("stable")))
        .collect();
    let sigma = embed.iter().map(|&x| data.sigma(x)).collect();
    let tau = embed
        .iter()
        .map(|&x| embed.iter().map(|&y| data.tau(x, y)).collect())
        .collect();
    let sub = ExtensionData::new(sub_group, Involution::new(images), sigma, tau)?;
    Ok(Quotient {
        data: sub,
        embed,
        project,
    })
}

/// The Hopf surjection onto `k^H #_{σ,τ} kZ₂` for a stable subgroup `H`
/// given as a sorted element list.
pub fn quotient_map(data: &ExtensionData, sub: &[usize]) -> Result<Quotient, FamilyError> {
    let g = data.group();
    for &x in sub {
        for &y in sub {
            if sub.binary_search(&g.mul(x, y)).is_err() {
                return Err(FamilyError::NotSubgroup("multiplication"));
            }
        }
    }
    if sub.binary_search(&g.identity()).is_err() {
        return Err(FamilyError::NotSubgroup("the identity"));
    }
    restrict_along(data, &smith_generators(g, sub))
}

impl Quotient {
    /// `ψ(e_g) = e_g`, `ψ(e_g x) = e_g x` for `g ∈ H`, zero otherwise,
    /// applied slotwise.
    pub fn psi(&self, u: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(u.arity());
        'terms: for (k, c) in u.terms() {
            let mut key = [0u32; 3];
            for (slot, b) in u.basis_of(k).into_iter().enumerate() {
                let Some(y) = self.project[b.g] else { continue 'terms };
                key[slot] = BasisElement { g: y, x: b.x }.index();
            }
            out.add_term(key, c.clone());
        }
        out
    }

    /// Exhaustive check that `ψ` is a unital algebra map and a counital
    /// coalgebra map commuting with the antipodes.
    pub fn check_morphism(&self, parent: &ExtensionData) -> Vec<Check> {
        let big = HopfAlgebra::new(parent, 1);
        let small = HopfAlgebra::new(&self.data, 1);
        let basis: Vec<TensorElement> = (0..big.dim() as u32)
            .map(|i| big.basis(&[BasisElement::from_index(i)]))
            .collect();
        let mut mult = Check::new("ψ(uv) = ψ(u)ψ(v)");
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                mult.compare(
                    || format!("basis {} · basis {}", i, j),
                    &self.psi(&big.multiply(u, v)),
                    &small.multiply(&self.psi(u), &self.psi(v)),
                );
            }
        }
        let mut unit = Check::new("ψ(1) = 1");
        unit.compare(|| "unit".into(), &self.psi(&big.unit(1)), &small.unit(1));
        let mut comult = Check::new("(ψ⊗ψ)Δ = Δψ");
        let mut counit = Check::new("ε ψ = ε");
        let mut anti = Check::new("ψ S = S ψ");
        for (i, u) in basis.iter().enumerate() {
            comult.compare(|| format!("basis {}", i), &self.psi(&big.coproduct(u)), &small.coproduct(&self.psi(u)));
            let e1 = TensorElement::basis(&[BasisElement::e(0)], big.counit(u));
            let e2 = TensorElement::basis(&[BasisElement::e(0)], small.counit(&self.psi(u)));
            counit.compare(|| format!("basis {}", i), &e1, &e2);
            anti.compare(|| format!("basis {}", i), &self.psi(&big.antipode(u)), &small.antipode(&self.psi(u)));
        }
        vec![mult, unit, comult, counit, anti]
    }

    /// `(ψ⊗ψ)(R)` read back as an R-matrix of the quotient.
    pub fn push_forward(&self, parent: &ExtensionData, r: &RMatrix) -> Result<RMatrix, crate::rmatrix::RMatrixError> {
        let big = HopfAlgebra::new(parent, r.value_order());
        crate::rmatrix::from_tensor(&self.data, &self.psi(&crate::rmatrix::to_tensor(&big, r)))
    }
}

/// `H = ⟨a, b⟩` for the first `a ∈ T`: an A-shape quotient when `b ∈ ⟨a⟩`,
/// otherwise a K-shape one, in family coordinates.
pub fn find_quotient_family(data: &ExtensionData) -> Result<(Family, u32, Quotient), FamilyError> {
    let ctx = QtContext::new(data.clone())?;
    let g = data.group();
    let (a, b) = (ctx.base_point(), ctx.shift());
    let ord = g.element_order(a);
    let cyclic = g.span(&[a]);
    let (fam, n, q) = if cyclic.binary_search(&b).is_ok() {
        (Family::A, ord / 4, restrict_along(data, &[a])?)
    } else {
        (Family::K, ord / 2, restrict_along(data, &[a, b])?)
    };
    if recognize(&q.data) != Some((fam, n)) {
        return Err(FamilyError::Mismatch(fam, "restricted action is not in family shape".into()));
    }
    Ok((fam, n, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::tests_support::kac_paljutkin;
    use crate::rmatrix::{is_phi_symmetric, verify_quasitriangular, verify_qybe};
    use crate::solver::{enumerate_all_nontrivial, SolveOptions};
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn as_set(v: &[Classified]) -> BTreeSet<RMatrix> {
        v.iter().map(|c| c.rmatrix.clone()).collect()
    }

    #[test]
    fn kp_preset_matches_independent_tables() {
        assert_eq!(make_kac_paljutkin(), kac_paljutkin());
        assert!(HopfAlgebra::new(&make_kac_paljutkin(), 1).verify_hopf_axioms().passed());
    }

    #[test]
    fn presets_parse_and_validate() {
        for name in ["kac-paljutkin", "K8n:n=2:untwisted", "K8n:n=3:kp", "A8n:n=1:paper", "A8n:n=2:untwisted"] {
            assert!(preset(name).is_ok(), "{}", name);
        }
        for bad in ["K8n:n=0:untwisted", "B8n:n=1:paper", "K8n:2:paper", "A8n:n=x:paper"] {
            assert!(preset(bad).is_err(), "{}", bad);
        }
    }

    #[test]
    fn classify_kp() {
        let d = make_kac_paljutkin();
        let cl = classify_k(&d).unwrap();
        assert_eq!(cl.len(), 4);
        for c in &cl {
            assert!(c.params[0].is_one());
            assert!(c.params[1] == RootOfUnity::i() || c.params[1] == RootOfUnity::i().inv());
            assert_eq!(c.params[2].order(), 8);
            assert!(verify_quasitriangular(&d, &c.rmatrix).passed());
            assert!(verify_qybe(&d, &c.rmatrix).passed());
            assert!(is_phi_symmetric(&d, &c.rmatrix));
        }
        let solver = enumerate_all_nontrivial(&d, &SolveOptions::default()).unwrap();
        assert_eq!(as_set(&cl), solver.rmatrices.into_iter().collect());
    }

    #[test]
    fn classify_families_small_n() {
        for n in 1..=2 {
            for d in [k_untwisted(n).unwrap(), k_family_kp_tables(n).unwrap()] {
                let cl = classify_k(&d).unwrap();
                assert_eq!(cl.len(), 4 * n as usize);
                assert_eq!(as_set(&cl).len(), cl.len());
                for c in &cl {
                    assert!(verify_quasitriangular(&d, &c.rmatrix).passed());
                }
            }
            for d in [a_sign_cocycle(n).unwrap(), a_untwisted(n).unwrap()] {
                let cl = classify_a(&d).unwrap();
                assert_eq!(cl.len(), 4 * n as usize);
                for c in &cl {
                    assert!(verify_quasitriangular(&d, &c.rmatrix).passed());
                    assert!(is_phi_symmetric(&d, &c.rmatrix));
                }
                let ctx = family_context(&d, Family::A).unwrap();
                let solver = enumerate_all_nontrivial(
                    &d,
                    &SolveOptions {
                        choice: PresentationChoice {
                            a: Some(ctx.base_point()),
                            s_gens: Some(ctx.presentation().s_gens.clone()),
                        },
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(as_set(&cl), solver.rmatrices.into_iter().collect());
            }
        }
    }

    fn random_unital(g: &FiniteAbelianGroup, seed: u64) -> Vec<RootOfUnity> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        g.elements()
            .map(|x| {
                if x == g.identity() {
                    RootOfUnity::ONE
                } else {
                    RootOfUnity::new(rng.gen_range(0..8), 8)
                }
            })
            .collect()
    }

    /// On coboundary-twisted A data with `P_{s^n}² ≠ 1` only the `P_{s^n}^{-1}`
    /// form of the `δ²` constraint produces valid structures.
    #[test]
    fn a_family_delta_sign_on_twisted_data() {
        let mut seen_distinguishing = false;
        for n in 1..=2 {
            for seed in 0..6 {
                let base = a_sign_cocycle(n).unwrap();
                let d = twist_by_coboundary(&base, &random_unital(base.group(), seed)).unwrap();
                let ctx = family_context(&d, Family::A).unwrap();
                let cl = classify_a(&d).unwrap();
                assert_eq!(cl.len(), 4 * n as usize);
                for c in &cl {
                    assert!(verify_quasitriangular(&d, &c.rmatrix).passed());
                }
                let p_half = ctx.p_of(&[n]);
                if !p_half.pow(2).is_one() {
                    seen_distinguishing = true;
                    assert!(classify_a_with_sign(&d, 1).is_err());
                    // The same tuples with δ from the other sign fail the verifier.
                    let bracket = d.tau(ctx.base_point(), ctx.base_point()) * d.tau(ctx.shift(), ctx.base_point())
                        / (d.tau(ctx.shift(), ctx.shift()) * d.sigma(ctx.base_point()));
                    for c in &cl {
                        let beta = c.params[0];
                        for delta in (bracket * p_half * beta.pow(1 + n as i64)).nth_roots(2) {
                            let mut t = c.tuple.clone();
                            t.delta = delta;
                            let r = tuple_to_rmatrix(&ctx, &t);
                            assert!(!verify_quasitriangular(&d, &r).passed());
                        }
                    }
                }
            }
        }
        assert!(seen_distinguishing);
    }

    #[test]
    fn k_family_on_twisted_data() {
        let base = k_family_kp_tables(2).unwrap();
        let d = twist_by_coboundary(&base, &random_unital(base.group(), 7)).unwrap();
        let cl = classify_k(&d).unwrap();
        assert_eq!(cl.len(), 8);
        for c in &cl {
            assert!(verify_quasitriangular(&d, &c.rmatrix).passed());
        }
    }

    #[test]
    fn classify_rejects_wrong_family() {
        assert!(matches!(classify_a(&make_kac_paljutkin()), Err(FamilyError::Mismatch(..))));
        assert!(matches!(classify_k(&a_sign_cocycle(1).unwrap()), Err(FamilyError::Mismatch(..))));
    }

    #[test]
    fn quotients() {
        let d = k_untwisted(2).unwrap();
        let (fam, n, q) = find_quotient_family(&d).unwrap();
        assert_eq!((fam, n), (Family::K, 2));
        assert_eq!(q.embed.len(), d.group().order());
        let (fam, n, _) = find_quotient_family(&a_sign_cocycle(2).unwrap()).unwrap();
        assert_eq!((fam, n), (Family::A, 2));

        let all: Vec<usize> = d.group().elements().collect();
        let id = quotient_map(&d, &all).unwrap();
        assert!(id.check_morphism(&d).iter().all(Check::passed));
        assert_eq!(id.embed.len(), 8);
        // {1, a} is not closed; {1, b} is a stable subgroup.
        assert!(quotient_map(&d, &[0, 2]).is_err());
        let qb = quotient_map(&d, &[0, 1]).unwrap();
        assert!(qb.check_morphism(&d).iter().all(Check::passed));
    }

    #[test]
    fn quotient_of_larger_group_pushes_structures_forward() {
        // Z₄ × Z₂ × Z₂ with a ↦ ab, b and c fixed.
        let g = FiniteAbelianGroup::new(vec![4, 2, 2]).unwrap();
        let ge = |e: &[u32]| GroupElement { exps: e.to_vec() };
        let act = Involution::new(vec![ge(&[1, 1, 0]), ge(&[0, 1, 0]), ge(&[0, 0, 1])]);
        let d = ExtensionData::untwisted(g, act).unwrap();
        let (fam, n, q) = find_quotient_family(&d).unwrap();
        assert_eq!((fam, n), (Family::K, 2));
        assert!(q.check_morphism(&d).iter().all(Check::passed));
        let big = enumerate_all_nontrivial(&d, &SolveOptions::default()).unwrap();
        assert!(!big.rmatrices.is_empty());
        let small: BTreeSet<RMatrix> = as_set(&classify_k(&q.data).unwrap());
        for r in &big.rmatrices {
            let pushed = q.push_forward(&d, r).unwrap();
            assert!(verify_quasitriangular(&q.data, &pushed).passed());
            assert!(small.contains(&pushed));
        }
    }
}
