//! The extension datum `(G, ◁x, σ, τ)`: construction, validation and the
//! scalars derived from it (`η`, word constants `P`).

use std::fmt;

use thiserror::Error;

use crate::group::{
    derive_presentation, find_b, split_fixed, ActionViolation, FiniteAbelianGroup, GroupError,
    Involution, Presentation, ShiftFailure,
};
use crate::scalar::{lcm_u64, RootOfUnity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("sigma has {got} entries, expected {expected}")]
    SigmaLength { got: usize, expected: usize },
    #[error("tau must be a {expected}x{expected} table")]
    TauShape { expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    group: FiniteAbelianGroup,
    action: Involution,
    act: Vec<usize>,
    sigma: Vec<RootOfUnity>,
    tau: Vec<RootOfUnity>,
    s_set: Vec<usize>,
    t_set: Vec<usize>,
    pos: Vec<usize>,
}

impl ExtensionData {
    /// Tables are indexed by the group's element enumeration order.
    pub fn new(
        group: FiniteAbelianGroup,
        action: Involution,
        sigma: Vec<RootOfUnity>,
        tau: Vec<Vec<RootOfUnity>>,
    ) -> Result<Self, DataError> {
        let n = group.order();
        if sigma.len() != n {
            return Err(DataError::SigmaLength {
                got: sigma.len(),
                expected: n,
            });
        }
        if tau.len() != n || tau.iter().any(|r| r.len() != n) {
            return Err(DataError::TauShape { expected: n });
        }
        let act = action.table(&group)?;
        let (s_set, t_set) = split_fixed(&act);
        let mut pos = vec![0; n];
        for (i, &s) in s_set.iter().enumerate() {
            pos[s] = i;
        }
        for (i, &t) in t_set.iter().enumerate() {
            pos[t] = i;
        }
        Ok(ExtensionData {
            group,
            action,
            act,
            sigma,
            tau: tau.into_iter().flatten().collect(),
            s_set,
            t_set,
            pos,
        })
    }

    /// `σ ≡ 1`, `τ ≡ 1`.
    pub fn untwisted(group: FiniteAbelianGroup, action: Involution) -> Result<Self, DataError> {
        let n = group.order();
        Self::new(
            group,
            action,
            vec![RootOfUnity::ONE; n],
            vec![vec![RootOfUnity::ONE; n]; n],
        )
    }

    /// Same group and action with `σ` and `τ` built from closures.
    pub fn with_tables(
        &self,
        sigma: impl Fn(usize) -> RootOfUnity,
        tau: impl Fn(usize, usize) -> RootOfUnity,
    ) -> Self {
        let n = self.group.order();
        let mut out = self.clone();
        out.sigma = (0..n).map(&sigma).collect();
        out.tau = (0..n * n).map(|k| tau(k / n, k % n)).collect();
        out
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn action(&self) -> &Involution {
        &self.action
    }

    /// `g ◁ x`.
    #[inline]
    pub fn act(&self, g: usize) -> usize {
        self.act[g]
    }

    pub fn action_table(&self) -> &[usize] {
        &self.act
    }

    #[inline]
    pub fn sigma(&self, g: usize) -> RootOfUnity {
        self.sigma[g]
    }

    #[inline]
    pub fn tau(&self, g: usize, h: usize) -> RootOfUnity {
        self.tau[g * self.group.order() + h]
    }

    pub fn sigma_table(&self) -> &[RootOfUnity] {
        &self.sigma
    }

    pub fn tau_row(&self, g: usize) -> &[RootOfUnity] {
        let n = self.group.order();
        &self.tau[g * n..(g + 1) * n]
    }

    /// `η(g,h) = τ(g,h)/τ(h,g)`.
    pub fn eta(&self, g: usize, h: usize) -> RootOfUnity {
        self.tau(g, h) / self.tau(h, g)
    }

    /// Fixed points of the action, ascending.
    pub fn s_set(&self) -> &[usize] {
        &self.s_set
    }

    /// Moved points of the action, ascending.
    pub fn t_set(&self) -> &[usize] {
        &self.t_set
    }

    pub fn is_fixed(&self, g: usize) -> bool {
        self.act[g] == g
    }

    /// Position of `g` inside `S` or `T`, whichever contains it.
    #[inline]
    pub fn position(&self, g: usize) -> usize {
        self.pos[g]
    }

    /// Least common multiple of the orders of all `σ` and `τ` values.
    pub fn value_order(&self) -> u64 {
        self.sigma
            .iter()
            .chain(&self.tau)
            .fold(1, |acc, v| lcm_u64(acc, v.den()))
    }

    /// `P` for the word `g_1^{j_1} … g_n^{j_n}`, accumulated left to right
    /// through `X_g X_h = τ(g,h) X_{gh}`.
    pub fn p_constant(&self, word: &[(usize, u32)]) -> RootOfUnity {
        let mut acc = RootOfUnity::ONE;
        let mut cur = self.group.identity();
        for &(g, j) in word {
            for _ in 0..j {
                acc = acc * self.tau(cur, g);
                cur = self.group.mul(cur, g);
            }
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    Action,
    SigmaUnital,
    SigmaInvariant,
    TauUnital,
    TauCocycle,
    Compatibility,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Action => "action is a non-trivial involutive automorphism",
            Clause::SigmaUnital => "sigma(1) = 1",
            Clause::SigmaInvariant => "sigma(g<x) = sigma(g)",
            Clause::TauUnital => "tau(1,g) = tau(g,1) = 1",
            Clause::TauCocycle => "tau(g,h) tau(gh,k) = tau(h,k) tau(g,hk)",
            Clause::Compatibility => "sigma(gh)/(sigma(g)sigma(h)) = tau(g,h) tau(g<x,h<x)",
        };
        f.write_str(s)
    }
}

/// One failed identity: how many instances fail and the first of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub count: usize,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    fn record(&mut self, clause: Clause, failures: impl Iterator<Item = String>) {
        let mut count = 0;
        let mut witness = None;
        for w in failures {
            count += 1;
            witness.get_or_insert(w);
        }
        if let Some(witness) = witness {
            self.violations.push(Violation {
                clause,
                count,
                witness,
            });
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "data valid");
        }
        for v in &self.violations {
            writeln!(f, "FAIL {} ({} instances), e.g. {}", v.clause, v.count, v.witness)?;
        }
        Ok(())
    }
}

pub fn validate(data: &ExtensionData) -> ValidationReport {
    let g = &data.group;
    let name = |x: usize| g.fmt_element(x);
    let mut rep = ValidationReport::default();
    let action = data
        .action
        .violations(g)
        .expect("action table was built at construction");
    rep.record(
        Clause::Action,
        action.iter().map(|v| match v {
            ActionViolation::NotBijective { collision } => format!(
                "elements {} and {} have the same image",
                name(collision.0),
                name(collision.1)
            ),
            ActionViolation::NotInvolutive { element } => {
                format!("applying the action twice moves {}", name(*element))
            }
            other => other.to_string(),
        }),
    );
    rep.record(
        Clause::SigmaUnital,
        (!data.sigma(0).is_one())
            .then(|| format!("sigma(1) = {}", data.sigma(0)))
            .into_iter(),
    );
    rep.record(
        Clause::SigmaInvariant,
        g.elements()
            .filter(|&x| data.sigma(data.act(x)) != data.sigma(x))
            .map(|x| format!("g = {}", name(x))),
    );
    rep.record(
        Clause::TauUnital,
        g.elements()
            .filter(|&x| !data.tau(0, x).is_one() || !data.tau(x, 0).is_one())
            .map(|x| format!("(1,{}) or ({},1)", name(x), name(x))),
    );
    let n = g.order();
    rep.record(
        Clause::TauCocycle,
        (0..n * n * n)
            .map(|k| (k / (n * n), (k / n) % n, k % n))
            .filter(|&(a, b, c)| {
                data.tau(a, b) * data.tau(g.mul(a, b), c) != data.tau(b, c) * data.tau(a, g.mul(b, c))
            })
            .map(|(a, b, c)| format!("(g,h,k) = ({},{},{})", name(a), name(b), name(c))),
    );
    rep.record(
        Clause::Compatibility,
        (0..n * n)
            .map(|k| (k / n, k % n))
            .filter(|&(a, b)| {
                data.sigma(g.mul(a, b)) / (data.sigma(a) * data.sigma(b))
                    != data.tau(a, b) * data.tau(data.act(a), data.act(b))
            })
            .map(|(a, b)| format!("(g,h) = ({},{})", name(a), name(b))),
    );
    rep
}

/// The three necessary conditions for a non-trivial quasitriangular
/// structure: `|S| = |T|`, a uniform shift `b`, and `τ` symmetric on `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessaryReport {
    pub s_size: usize,
    pub t_size: usize,
    pub b: Result<usize, ShiftFailure>,
    pub tau_asymmetry: Option<(usize, usize)>,
}

impl NecessaryReport {
    pub fn sizes_match(&self) -> bool {
        self.s_size == self.t_size
    }

    pub fn holds(&self) -> bool {
        self.sizes_match() && self.b.is_ok() && self.tau_asymmetry.is_none()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = vec![];
        if !self.sizes_match() {
            out.push(format!(
                "(i) |S| = {} differs from |T| = {}",
                self.s_size, self.t_size
            ));
        }
        if let Err(e) = &self.b {
            out.push(format!("(ii) no shift element b: {}", e));
        }
        if let Some((s1, s2)) = self.tau_asymmetry {
            out.push(format!(
                "(iii) tau is not symmetric on S: eta({}, {}) != 1",
                s1, s2
            ));
        }
        out
    }
}

pub fn check_necessary(data: &ExtensionData) -> NecessaryReport {
    let s = data.s_set();
    let tau_asymmetry = s
        .iter()
        .flat_map(|&x| s.iter().map(move |&y| (x, y)))
        .find(|&(x, y)| !data.eta(x, y).is_one());
    NecessaryReport {
        s_size: s.len(),
        t_size: data.t_set().len(),
        b: find_b(data.group(), data.action_table()),
        tau_asymmetry,
    }
}

/// Optional pins for the presentation of `S`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PresentationChoice {
    pub a: Option<usize>,
    pub s_gens: Option<Vec<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("invalid data:\n{0}")]
    Invalid(ValidationReport),
    #[error("no non-trivial structure can exist: {}", .0.diagnostics().join("; "))]
    Necessary(NecessaryReport),
    #[error(transparent)]
    Presentation(#[from] GroupError),
}

/// Validated data satisfying the necessary conditions, with `b` and a
/// presentation of `S` fixed.
#[derive(Clone, Debug)]
pub struct QtContext {
    data: ExtensionData,
    b: usize,
    presentation: Presentation,
}

impl QtContext {
    pub fn new(data: ExtensionData) -> Result<Self, ContextError> {
        Self::with_choice(data, PresentationChoice::default())
    }

    pub fn with_choice(data: ExtensionData, choice: PresentationChoice) -> Result<Self, ContextError> {
        let rep = validate(&data);
        if !rep.is_valid() {
            return Err(ContextError::Invalid(rep));
        }
        let nec = check_necessary(&data);
        let b = match (&nec.b, nec.holds()) {
            (Ok(b), true) => *b,
            _ => return Err(ContextError::Necessary(nec)),
        };
        let presentation = derive_presentation(
            data.group(),
            data.s_set(),
            data.t_set(),
            b,
            choice.a,
            choice.s_gens.as_deref(),
        )?;
        Ok(QtContext {
            data,
            b,
            presentation,
        })
    }

    pub fn data(&self) -> &ExtensionData {
        &self.data
    }

    pub fn shift(&self) -> usize {
        self.b
    }

    pub fn base_point(&self) -> usize {
        self.presentation.a
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// `P_{s_1^{j_1} … s_n^{j_n}}`.
    pub fn p_of(&self, exps: &[u32]) -> RootOfUnity {
        let word: Vec<(usize, u32)> = self
            .presentation
            .s_gens
            .iter()
            .copied()
            .zip(exps.iter().copied())
            .collect();
        self.data.p_constant(&word)
    }

    /// `P` of the canonical word for `s ∈ S`.
    pub fn p_of_element(&self, s: usize) -> RootOfUnity {
        let e = self
            .presentation
            .dlog(s)
            .expect("element outside S has no canonical word")
            .to_vec();
        self.p_of(&e)
    }
}


#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::group::GroupElement;

    pub fn ge(e: &[u32]) -> GroupElement {
        GroupElement { exps: e.to_vec() }
    }

    pub fn sign(e: u32) -> RootOfUnity {
        RootOfUnity::minus_one().pow(e as i64)
    }

    /// Kac–Paljutkin tables written out independently of the families module.
    pub fn kac_paljutkin() -> ExtensionData {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let act = Involution::new(vec![ge(&[1, 1]), ge(&[0, 1])]);
        let e = |x: usize| g.element(x).exps;
        let sigma = g
            .elements()
            .map(|x| {
                let (i, j) = (e(x)[0] as i64, e(x)[1] as i64);
                sign((((i - j) * j).rem_euclid(2)) as u32)
            })
            .collect();
        let tau = g
            .elements()
            .map(|x| {
                g.elements()
                    .map(|y| {
                        let j = e(x)[1] as i64;
                        let (k, l) = (e(y)[0] as i64, e(y)[1] as i64);
                        sign(((j * (k - l)).rem_euclid(2)) as u32)
                    })
                    .collect()
            })
            .collect();
        ExtensionData::new(g, act, sigma, tau).unwrap()
    }
}
