//! Sparse exact arithmetic in `H = k^G #_{σ,τ} kZ₂` and its tensor powers.
//!
//! `H` has basis `e_g` and `e_g x`. Multiplication follows from
//! `e_g e_h = δ_{g,h} e_g`, `x e_g = e_{g◁x} x` and `x² = Σ σ(g) e_g`; the
//! coproduct of `x` is `Σ τ(g,h) e_g x ⊗ e_h x`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use crate::cocycle::ExtensionData;
use crate::scalar::{lcm_u64, Cyclotomic, RootOfUnity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub g: usize,
    pub x: bool,
}

impl BasisElement {
    pub fn e(g: usize) -> Self {
        BasisElement { g, x: false }
    }

    pub fn ex(g: usize) -> Self {
        BasisElement { g, x: true }
    }

    #[inline]
    pub fn index(self) -> u32 {
        (2 * self.g + self.x as usize) as u32
    }

    #[inline]
    pub fn from_index(i: u32) -> Self {
        BasisElement {
            g: (i / 2) as usize,
            x: i % 2 == 1,
        }
    }
}

/// Basis indices of a tensor term; slots beyond the arity are zero.
pub type Key = [u32; 3];

pub fn key_of(basis: &[BasisElement]) -> Key {
    let mut k = [0; 3];
    for (slot, b) in basis.iter().enumerate() {
        k[slot] = b.index();
    }
    k
}

/// A sparse element of `H^{⊗arity}` with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    arity: usize,
    terms: BTreeMap<Key, Cyclotomic>,
}

impl TensorElement {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=3).contains(&arity), "arity must be 1, 2 or 3");
        TensorElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(basis: &[BasisElement], coeff: Cyclotomic) -> Self {
        let mut t = Self::zero(basis.len());
        t.add_term(key_of(basis), coeff);
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn get(&self, key: &Key) -> Option<&Cyclotomic> {
        self.terms.get(key)
    }

    pub fn coeff(&self, basis: &[BasisElement]) -> Option<&Cyclotomic> {
        self.terms.get(&key_of(basis))
    }

    pub fn add_term(&mut self, key: Key, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Cyclotomic::from_int(-1, 1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = Self::zero(self.arity);
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// Swaps the two slots of an arity-2 element.
    pub fn flip(&self) -> Self {
        assert_eq!(self.arity, 2, "flip needs arity 2");
        TensorElement {
            arity: 2,
            terms: self.terms.iter().map(|(k, c)| ([k[1], k[0], 0], c.clone())).collect(),
        }
    }

    /// Decoded basis tuple of a key.
    pub fn basis_of(&self, key: &Key) -> Vec<BasisElement> {
        key[..self.arity].iter().map(|&i| BasisElement::from_index(i)).collect()
    }

    /// Number of keys where the two elements differ, and the first of them.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, Key, Cyclotomic, Cyclotomic)> {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let zero = Cyclotomic::zero(1);
        let mut count = 0;
        let mut first = None;
        let keys: std::collections::BTreeSet<&Key> = self.terms.keys().chain(other.terms.keys()).collect();
        for k in keys {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            if a != b {
                count += 1;
                first.get_or_insert_with(|| (*k, a.clone(), b.clone()));
            }
        }
        first.map(|(k, a, b)| (count, k, a, b))
    }
}

/// A mismatching coefficient in a checked identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub context: String,
    pub basis: Vec<BasisElement>,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            instances: 0,
            failures: 0,
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Records one instance comparing `lhs` and `rhs`.
    pub fn compare(&mut self, context: impl FnOnce() -> String, lhs: &TensorElement, rhs: &TensorElement) {
        self.instances += 1;
        if let Some((_, key, l, r)) = lhs.first_difference(rhs) {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(Witness {
                    context: context(),
                    basis: lhs.basis_of(&key),
                    lhs: l,
                    rhs: r,
                });
            }
        }
    }

    pub fn merge(&mut self, other: Check) {
        self.instances += other.instances;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

pub fn fmt_basis(data: &ExtensionData, basis: &[BasisElement]) -> String {
    basis
        .iter()
        .map(|b| {
            let g = data.group().fmt_element(b.g);
            if b.x {
                format!("e{}x", g)
            } else {
                format!("e{}", g)
            }
        })
        .collect::<Vec<_>>()
        .join(" ⊗ ")
}

impl Check {
    pub fn describe(&self, data: &ExtensionData) -> String {
        if self.passed() {
            return format!("ok   {} ({} instances)", self.name, self.instances);
        }
        let mut s = format!("FAIL {} ({} of {} instances)", self.name, self.failures, self.instances);
        if let Some(w) = &self.witness {
            s += &format!(
                "\n     at {}: coefficient of {} is {} vs {}",
                w.context,
                fmt_basis(data, &w.basis),
                w.lhs,
                w.rhs
            );
        }
        s
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "ok   {} ({} instances)", self.name, self.instances)
        } else {
            write!(f, "FAIL {} ({} of {} instances)", self.name, self.failures, self.instances)
        }
    }
}

/// The algebra `H` for fixed data, with coefficients in `Q(ζ_N)`.
pub struct HopfAlgebra<'a> {
    data: &'a ExtensionData,
    order: u32,
    coproducts: OnceLock<Vec<TensorElement>>,
    antipodes: OnceLock<Vec<TensorElement>>,
}

impl<'a> HopfAlgebra<'a> {
    /// `extra_order` is the order of any further roots of unity the caller
    /// will feed in (R-matrix entries); the field is large enough for both.
    pub fn new(data: &'a ExtensionData, extra_order: u64) -> Self {
        let order = lcm_u64(data.value_order(), extra_order).max(1) as u32;
        HopfAlgebra {
            data,
            order,
            coproducts: OnceLock::new(),
            antipodes: OnceLock::new(),
        }
    }

    pub fn data(&self) -> &'a ExtensionData {
        self.data
    }

    /// The cyclotomic order all coefficients live in.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        2 * self.data.group().order()
    }

    pub fn scalar(&self, r: RootOfUnity) -> Cyclotomic {
        r.to_cyclotomic_in(lcm_u64(self.order as u64, r.den()) as u32)
    }

    pub fn one_scalar(&self) -> Cyclotomic {
        Cyclotomic::one(self.order)
    }

    pub fn basis(&self, b: &[BasisElement]) -> TensorElement {
        TensorElement::basis(b, self.one_scalar())
    }

    /// Product of two basis elements: the resulting basis element and the
    /// `σ` factor, or `None` if it vanishes.
    #[inline]
    pub fn mul_basis(&self, u: BasisElement, v: BasisElement) -> Option<(BasisElement, RootOfUnity)> {
        let need = if u.x { self.data.act(u.g) } else { u.g };
        if v.g != need {
            return None;
        }
        let f = if u.x && v.x { self.data.sigma(u.g) } else { RootOfUnity::ONE };
        Some((BasisElement { g: u.g, x: u.x ^ v.x }, f))
    }

    /// `1^{⊗arity} = Σ e_{g_1} ⊗ … ⊗ e_{g_k}`.
    pub fn unit(&self, arity: usize) -> TensorElement {
        let n = self.data.group().order();
        let mut t = TensorElement::zero(arity);
        let total = n.pow(arity as u32);
        for mut k in 0..total {
            let mut key = [0u32; 3];
            for slot in (0..arity).rev() {
                key[slot] = BasisElement::e(k % n).index();
                k /= n;
            }
            t.add_term(key, self.one_scalar());
        }
        t
    }

    /// The generator `x = Σ e_g x`.
    pub fn x(&self) -> TensorElement {
        let mut t = TensorElement::zero(1);
        for g in self.data.group().elements() {
            t.add_term(key_of(&[BasisElement::ex(g)]), self.one_scalar());
        }
        t
    }

    pub fn multiply(&self, u: &TensorElement, v: &TensorElement) -> TensorElement {
        assert_eq!(u.arity, v.arity, "arity mismatch in multiply");
        let a = u.arity;
        // Index v by its tuple of group components.
        let mut by_g: HashMap<[u32; 3], Vec<(&Key, &Cyclotomic)>> = HashMap::new();
        for (k, c) in &v.terms {
            let mut g = [0u32; 3];
            for s in 0..a {
                g[s] = k[s] / 2;
            }
            by_g.entry(g).or_default().push((k, c));
        }
        let mut out = TensorElement::zero(a);
        for (ku, cu) in &u.terms {
            let mut need = [0u32; 3];
            for s in 0..a {
                let b = BasisElement::from_index(ku[s]);
                need[s] = if b.x { self.data.act(b.g) as u32 } else { b.g as u32 };
            }
            let Some(list) = by_g.get(&need) else { continue };
            for (kv, cv) in list {
                let mut key = [0u32; 3];
                let mut f = RootOfUnity::ONE;
                for s in 0..a {
                    let (b, fs) = self
                        .mul_basis(BasisElement::from_index(ku[s]), BasisElement::from_index(kv[s]))
                        .expect("group components were matched");
                    key[s] = b.index();
                    f = f * fs;
                }
                out.add_term(key, (cu * *cv).mul_root(f));
            }
        }
        out
    }

    fn coproduct_table(&self) -> &Vec<TensorElement> {
        self.coproducts.get_or_init(|| {
            let grp = self.data.group();
            let mut delta_x = TensorElement::zero(2);
            for g in grp.elements() {
                for h in grp.elements() {
                    delta_x.add_term(
                        key_of(&[BasisElement::ex(g), BasisElement::ex(h)]),
                        self.scalar(self.data.tau(g, h)),
                    );
                }
            }
            let mut table = Vec::with_capacity(self.dim());
            for g in grp.elements() {
                let mut de = TensorElement::zero(2);
                for h in grp.elements() {
                    let k = grp.mul(grp.inv(h), g);
                    de.add_term(key_of(&[BasisElement::e(h), BasisElement::e(k)]), self.one_scalar());
                }
                let dex = self.multiply(&de, &delta_x);
                table.push(de);
                table.push(dex);
            }
            table
        })
    }

    fn antipode_table(&self) -> &Vec<TensorElement> {
        self.antipodes.get_or_init(|| {
            let grp = self.data.group();
            let mut sx = TensorElement::zero(1);
            for g in grp.elements() {
                let c = (self.data.sigma(g) * self.data.tau(g, grp.inv(g))).inv();
                sx.add_term(key_of(&[BasisElement::ex(self.data.act(g))]), self.scalar(c));
            }
            let mut table = Vec::with_capacity(self.dim());
            for g in grp.elements() {
                let se = self.basis(&[BasisElement::e(grp.inv(g))]);
                // S is an anti-homomorphism: S(e_g x) = S(x) S(e_g).
                let sex = self.multiply(&sx, &se);
                table.push(se);
                table.push(sex);
            }
            table
        })
    }

    pub fn coproduct(&self, u: &TensorElement) -> TensorElement {
        assert_eq!(u.arity, 1, "coproduct needs arity 1");
        let table = self.coproduct_table();
        let mut out = TensorElement::zero(2);
        for (k, c) in &u.terms {
            for (k2, c2) in &table[k[0] as usize].terms {
                out.add_term(*k2, c * c2);
            }
        }
        out
    }

    pub fn coproduct_op(&self, u: &TensorElement) -> TensorElement {
        self.coproduct(u).flip()
    }

    /// `Δ` applied to one slot of an arity-2 element (`slot` 0 or 1).
    pub fn coproduct_slot(&self, u: &TensorElement, slot: usize) -> TensorElement {
        assert_eq!(u.arity, 2, "coproduct_slot needs arity 2");
        let table = self.coproduct_table();
        let mut out = TensorElement::zero(3);
        for (k, c) in &u.terms {
            for (k2, c2) in &table[k[slot] as usize].terms {
                let key = if slot == 0 {
                    [k2[0], k2[1], k[1]]
                } else {
                    [k[0], k2[0], k2[1]]
                };
                out.add_term(key, c * c2);
            }
        }
        out
    }

    pub fn counit(&self, u: &TensorElement) -> Cyclotomic {
        assert_eq!(u.arity, 1, "counit needs arity 1");
        u.terms
            .iter()
            .filter(|(k, _)| k[0] / 2 == 0)
            .fold(Cyclotomic::zero(self.order), |acc, (_, c)| &acc + c)
    }

    /// `ε` applied to one slot of an arity-2 element, leaving arity 1.
    pub fn counit_slot(&self, u: &TensorElement, slot: usize) -> TensorElement {
        assert_eq!(u.arity, 2, "counit_slot needs arity 2");
        let mut out = TensorElement::zero(1);
        for (k, c) in &u.terms {
            if k[slot] / 2 == 0 {
                out.add_term([k[1 - slot], 0, 0], c.clone());
            }
        }
        out
    }

    pub fn antipode(&self, u: &TensorElement) -> TensorElement {
        assert_eq!(u.arity, 1, "antipode needs arity 1");
        let table = self.antipode_table();
        let mut out = TensorElement::zero(1);
        for (k, c) in &u.terms {
            for (k2, c2) in &table[k[0] as usize].terms {
                out.add_term(*k2, c * c2);
            }
        }
        out
    }

    /// `S` applied to one slot of an arity-2 element.
    pub fn antipode_slot(&self, u: &TensorElement, slot: usize) -> TensorElement {
        assert_eq!(u.arity, 2, "antipode_slot needs arity 2");
        let table = self.antipode_table();
        let mut out = TensorElement::zero(2);
        for (k, c) in &u.terms {
            for (k2, c2) in &table[k[slot] as usize].terms {
                let mut key = *k;
                key[slot] = k2[0];
                out.add_term(key, c * c2);
            }
        }
        out
    }

    /// Multiplies the two slots of an arity-2 element together.
    pub fn multiply_slots(&self, u: &TensorElement) -> TensorElement {
        assert_eq!(u.arity, 2, "multiply_slots needs arity 2");
        let mut out = TensorElement::zero(1);
        for (k, c) in &u.terms {
            let (a, b) = (BasisElement::from_index(k[0]), BasisElement::from_index(k[1]));
            if let Some((p, f)) = self.mul_basis(a, b) {
                out.add_term([p.index(), 0, 0], c.mul_root(f));
            }
        }
        out
    }

    /// Places an arity-2 element into slots `(i, j)` of `H^{⊗3}` with the
    /// unit in the remaining slot; `(0,1)`, `(0,2)`, `(1,2)` give `R12`,
    /// `R13`, `R23`.
    pub fn embed(&self, u: &TensorElement, slots: (usize, usize)) -> TensorElement {
        assert_eq!(u.arity, 2, "embed needs arity 2");
        let (i, j) = slots;
        assert!(i < j && j < 3, "slots must be increasing and below 3");
        let free = 3 - i - j;
        let mut out = TensorElement::zero(3);
        for (k, c) in &u.terms {
            for g in self.data.group().elements() {
                let mut key = [0u32; 3];
                key[i] = k[0];
                key[j] = k[1];
                key[free] = BasisElement::e(g).index();
                out.add_term(key, c.clone());
            }
        }
        out
    }

    /// `u ⊗ v` for arity-1 inputs.
    pub fn tensor(&self, u: &TensorElement, v: &TensorElement) -> TensorElement {
        assert!(u.arity == 1 && v.arity == 1, "tensor needs arity 1 inputs");
        let mut out = TensorElement::zero(2);
        for (a, c) in &u.terms {
            for (b, d) in &v.terms {
                out.add_term([a[0], b[0], 0], c * d);
            }
        }
        out
    }

    fn all_basis(&self) -> Vec<BasisElement> {
        (0..self.dim() as u32).map(BasisElement::from_index).collect()
    }

    /// Exhaustive check of the Hopf algebra axioms on basis elements.
    pub fn verify_hopf_axioms(&self) -> HopfReport {
        let basis = self.all_basis();
        let d = self.data;
        let name = |b: &[BasisElement]| fmt_basis(d, b);
        let one = self.unit(1);
        let mut checks = vec![];

        let mut unit = Check::new("unit: 1·h = h·1 = h");
        for &b in &basis {
            let h = self.basis(&[b]);
            unit.compare(|| name(&[b]), &self.multiply(&one, &h), &h);
            unit.compare(|| name(&[b]), &self.multiply(&h, &one), &h);
        }
        checks.push(unit);

        let mut assoc = Check::new("associativity");
        for &a in &basis {
            for &b in &basis {
                let ab = self.mul_basis(a, b);
                for &c in &basis {
                    let bc = self.mul_basis(b, c);
                    let lhs = ab
                        .and_then(|(p, f)| self.mul_basis(p, c).map(|(q, f2)| (q, f * f2)));
                    let rhs = bc
                        .and_then(|(p, f)| self.mul_basis(a, p).map(|(q, f2)| (q, f * f2)));
                    let to_t = |x: Option<(BasisElement, RootOfUnity)>| match x {
                        Some((q, f)) => TensorElement::basis(&[q], self.scalar(f)),
                        None => TensorElement::zero(1),
                    };
                    assoc.compare(|| name(&[a, b, c]), &to_t(lhs), &to_t(rhs));
                }
            }
        }
        checks.push(assoc);

        let mut coassoc = Check::new("coassociativity");
        let mut counit = Check::new("counit");
        let mut antipode = Check::new("antipode");
        for &b in &basis {
            let h = self.basis(&[b]);
            let dh = self.coproduct(&h);
            coassoc.compare(|| name(&[b]), &self.coproduct_slot(&dh, 0), &self.coproduct_slot(&dh, 1));
            counit.compare(|| name(&[b]), &self.counit_slot(&dh, 0), &h);
            counit.compare(|| name(&[b]), &self.counit_slot(&dh, 1), &h);
            let eps = one.scale(&self.counit(&h));
            antipode.compare(|| format!("S(h1)h2, h = {}", name(&[b])), &self.multiply_slots(&self.antipode_slot(&dh, 0)), &eps);
            antipode.compare(|| format!("h1S(h2), h = {}", name(&[b])), &self.multiply_slots(&self.antipode_slot(&dh, 1)), &eps);
        }
        checks.push(coassoc);
        checks.push(counit);

        let mut bialg = Check::new("bialgebra: Δ(gh) = Δ(g)Δ(h), ε(gh) = ε(g)ε(h)");
        let unit2 = self.unit(2);
        bialg.compare(|| "Δ(1)".into(), &self.coproduct(&one), &unit2);
        for &a in &basis {
            let da = self.coproduct(&self.basis(&[a]));
            for &b in &basis {
                let hb = self.basis(&[b]);
                let ab = self.multiply(&self.basis(&[a]), &hb);
                let lhs = self.coproduct(&ab);
                let rhs = self.multiply(&da, &self.coproduct(&hb));
                bialg.compare(|| name(&[a, b]), &lhs, &rhs);
                let el = TensorElement::basis(&[BasisElement::e(0)], self.counit(&ab));
                let er = TensorElement::basis(
                    &[BasisElement::e(0)],
                    &self.counit(&self.basis(&[a])) * &self.counit(&hb),
                );
                bialg.compare(|| format!("ε at {}", name(&[a, b])), &el, &er);
            }
        }
        checks.push(bialg);
        checks.push(antipode);
        HopfReport { checks }
    }
}

#[derive(Clone, Debug)]
pub struct HopfReport {
    pub checks: Vec<Check>,
}

impl HopfReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn describe(&self, data: &ExtensionData) -> String {
        self.checks
            .iter()
            .map(|c| c.describe(data))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A linear functional on `H` in the dual basis: `E_g` pairs with `e_g`,
/// `X_g` with `e_g x`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DualElement {
    pub terms: BTreeMap<BasisElement, Cyclotomic>,
}

impl DualElement {
    pub fn basis(b: BasisElement, c: Cyclotomic) -> Self {
        let mut d = DualElement::default();
        d.add(b, c);
        d
    }

    pub fn add(&mut self, b: BasisElement, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&b) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(b, s);
        }
    }

    /// Evaluates on an arity-1 element.
    pub fn pair(&self, u: &TensorElement) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(1);
        for (k, c) in u.terms() {
            if let Some(f) = self.terms.get(&BasisElement::from_index(k[0])) {
                acc = &acc + &(f * c);
            }
        }
        acc
    }
}

impl<'a> HopfAlgebra<'a> {
    /// Product in `H*` from the closed form `E_g E_h = E_{gh}`,
    /// `E_g X_h = X_h E_g = 0`, `X_g X_h = τ(g,h) X_{gh}`.
    pub fn dual_multiply(&self, f1: &DualElement, f2: &DualElement) -> DualElement {
        let grp = self.data.group();
        let mut out = DualElement::default();
        for (a, c) in &f1.terms {
            for (b, d) in &f2.terms {
                if a.x != b.x {
                    continue;
                }
                let gh = grp.mul(a.g, b.g);
                let mut v = c * d;
                if a.x {
                    v = v.mul_root(self.data.tau(a.g, b.g));
                }
                out.add(BasisElement { g: gh, x: a.x }, v);
            }
        }
        out
    }

    /// Product in `H*` by convolution through `Δ`.
    pub fn convolve(&self, f1: &DualElement, f2: &DualElement) -> DualElement {
        let mut out = DualElement::default();
        for b in self.all_basis() {
            let dh = self.coproduct(&self.basis(&[b]));
            let mut v = Cyclotomic::zero(self.order);
            for (k, c) in dh.terms() {
                let (l, r) = (BasisElement::from_index(k[0]), BasisElement::from_index(k[1]));
                if let (Some(x), Some(y)) = (f1.terms.get(&l), f2.terms.get(&r)) {
                    v = &v + &(&(x * y) * c);
                }
            }
            out.add(b, v);
        }
        out
    }
}
