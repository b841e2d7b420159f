//! Exact scalars.
//!
//! Two types live here. [`RootOfUnity`] is a reduced fraction `num/den`
//! standing for `exp(2πi·num/den)`; every structure constant, cocycle value
//! and R-matrix table entry is one of these. [`Cyclotomic`] is a general
//! element of `Q(ζ_N)`, stored as a rational vector reduced modulo the
//! cyclotomic polynomial `Φ_N`, and is what the tensor engine computes with.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd_u64(a, b) * b
}

/// `exp(2πi·num/den)` with `0 <= num < den` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    /// Normalizes any integer numerator. Panics on `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        Self::from_i128(num as i128, den)
    }

    fn from_i128(num: i128, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let n = num.rem_euclid(d) as u64;
        let g = gcd_u64(n, den);
        RootOfUnity { num: n / g, den: den / g }
    }

    pub fn one() -> Self {
        Self::ONE
    }

    pub fn minus_one() -> Self {
        RootOfUnity { num: 1, den: 2 }
    }

    /// The primitive fourth root `i`.
    pub fn i() -> Self {
        RootOfUnity { num: 1, den: 4 }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// Multiplicative order, which is the reduced denominator.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    pub fn inv(self) -> Self {
        Self::from_i128(-(self.num as i128), self.den)
    }

    pub fn pow(self, e: i64) -> Self {
        let n = (self.num as i128) * (e as i128);
        Self::from_i128(n.rem_euclid(self.den as i128), self.den)
    }

    /// All `n` solutions of `z^n = self`, in increasing angle.
    pub fn nth_roots(self, n: u64) -> Vec<Self> {
        assert!(n > 0, "nth_roots with n = 0");
        let den = self.den * n;
        (0..n)
            .map(|j| Self::from_i128((self.num + j * self.den) as i128, den))
            .collect()
    }

    /// All roots of unity whose order divides `n`.
    pub fn all_of_order_dividing(n: u64) -> Vec<Self> {
        Self::ONE.nth_roots(n)
    }

    /// Embeds into `Q(ζ_order)`; `den` must divide `order`.
    pub fn to_cyclotomic_in(self, order: u32) -> Cyclotomic {
        assert!(
            (order as u64).is_multiple_of(self.den),
            "root of order {} does not live in Q(zeta_{})",
            self.den,
            order
        );
        let k = self.num * (order as u64 / self.den);
        Cyclotomic::zeta_power(k as i64, order)
    }

    pub fn to_cyclotomic(self) -> Cyclotomic {
        self.to_cyclotomic_in(self.den as u32)
    }

    pub fn to_complex(self) -> (f64, f64) {
        let t = std::f64::consts::TAU * self.num as f64 / self.den as f64;
        (t.cos(), t.sin())
    }
}

impl Default for RootOfUnity {
    fn default() -> Self {
        Self::ONE
    }
}

/// Ordered by angle in `[0, 1)`.
impl Ord for RootOfUnity {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        l.cmp(&r).then(self.den.cmp(&other.den))
    }
}

impl PartialOrd for RootOfUnity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;
    fn mul(self, o: RootOfUnity) -> RootOfUnity {
        let den = lcm_u64(self.den, o.den);
        let n = self.num as i128 * (den / self.den) as i128 + o.num as i128 * (den / o.den) as i128;
        Self::from_i128(n, den)
    }
}

impl Div for RootOfUnity {
    type Output = RootOfUnity;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: RootOfUnity) -> RootOfUnity {
        self * o.inv()
    }
}

impl std::iter::Product for RootOfUnity {
    fn product<I: Iterator<Item = RootOfUnity>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (n, d) => write!(f, "e({}/{})", n, d),
        }
    }
}

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    phi(n).as_ref().clone()
}

fn phi(n: u32) -> Arc<Vec<i64>> {
    assert!(n > 0, "cyclotomic polynomial of order 0");
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d a proper divisor of n.
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = divide_monic(&p, &phi(d));
        }
    }
    let p = Arc::new(p);
    phi_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quo = vec![0i64; num.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd];
        quo[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

pub fn euler_phi(n: u32) -> usize {
    phi(n).len() - 1
}

/// An element of `Q(ζ_N)` as `(Σ num_k ζ^k) / den` with `k < φ(N)`.
///
/// The numerator is reduced modulo `Φ_N` and the fraction is in lowest
/// terms with a positive denominator, so equal values at the same order
/// have identical representations.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        Cyclotomic {
            order,
            num: vec![BigInt::zero(); euler_phi(order)],
            den: BigInt::one(),
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(1, order)
    }

    pub fn from_int(v: i64, order: u32) -> Self {
        let mut c = Self::zero(order);
        c.num[0] = BigInt::from(v);
        c
    }

    pub fn from_rational(q: &Rational, order: u32) -> Self {
        let mut c = Self::zero(order);
        c.num[0] = q.numer().clone();
        c.den = q.denom().clone();
        c.normalize();
        c
    }

    /// `ζ_order^k`.
    pub fn zeta_power(k: i64, order: u32) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut raw = vec![BigInt::zero(); k + 1];
        raw[k] = BigInt::one();
        Self::from_raw(order, raw, BigInt::one())
    }

    /// Builds from rational coefficients of powers of `ζ_order`; the vector
    /// may be any length and is reduced.
    pub fn from_coeffs(order: u32, coeffs: &[Rational]) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let raw = coeffs
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        Self::from_raw(order, raw, den)
    }

    fn from_raw(order: u32, mut raw: Vec<BigInt>, den: BigInt) -> Self {
        let n = order as usize;
        // Fold exponents modulo N first, then divide by Φ_N.
        if raw.len() > n {
            for k in n..raw.len() {
                let c = std::mem::take(&mut raw[k]);
                raw[k % n] += c;
            }
            raw.truncate(n);
        }
        let p = phi(order);
        let deg = p.len() - 1;
        for k in (deg..raw.len()).rev() {
            if raw[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut raw[k]);
            for j in 0..deg {
                if p[j] != 0 {
                    raw[k - deg + j] -= &c * p[j];
                }
            }
        }
        raw.resize(deg, BigInt::zero());
        let mut out = Cyclotomic { order, num: raw, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Rational coefficients of `1, ζ, …, ζ^{φ(N)-1}`.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// Re-expresses the element in `Q(ζ_m)`; `order` must divide `m`.
    pub fn lift(&self, m: u32) -> Self {
        if m == self.order {
            return self.clone();
        }
        assert!(m.is_multiple_of(self.order), "cannot lift order {} to {}", self.order, m);
        let f = (m / self.order) as usize;
        let mut raw = vec![BigInt::zero(); (self.num.len().max(1) - 1) * f + 1];
        for (k, c) in self.num.iter().enumerate() {
            raw[k * f] = c.clone();
        }
        Self::from_raw(m, raw, self.den.clone())
    }

    fn aligned<'a>(a: &'a Self, b: &'a Self) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if a.order == b.order {
            (Cow::Borrowed(a), Cow::Borrowed(b))
        } else {
            let m = lcm_u64(a.order as u64, b.order as u64) as u32;
            (Cow::Owned(a.lift(m)), Cow::Owned(b.lift(m)))
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        out.normalize();
        out
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p: Vec<Rational> = phi(self.order)
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)))
            .collect();
        let a = trim(self.coeffs());
        // Extended Euclid: track s with s·a ≡ r (mod Φ).
        let (mut r0, mut r1) = (p, a);
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (vec![], vec![Rational::one()]);
        while !(r1.len() == 1) {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            debug_assert!(!r1.is_empty(), "Φ_N is irreducible, gcd must be a unit");
        }
        let c = r1[0].clone();
        let inv: Vec<Rational> = s1.iter().map(|x| x / &c).collect();
        Some(Self::from_coeffs(self.order, &inv))
    }

    /// Multiplies by a root of unity by shifting exponents, lifting first if
    /// the root does not live in this field.
    pub fn mul_root(&self, r: RootOfUnity) -> Self {
        if r.is_one() {
            return self.clone();
        }
        let m = lcm_u64(self.order as u64, r.den()) as u32;
        let me = self.lift(m);
        let k = (r.num() * (m as u64 / r.den())) as usize;
        let mut raw = vec![BigInt::zero(); k + me.num.len()];
        for (i, c) in me.num.iter().enumerate() {
            raw[i + k] = c.clone();
        }
        Self::from_raw(m, raw, me.den)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Recognizes `±ζ_N^k`, the only roots of unity in `Q(ζ_N)`.
    pub fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        if self.is_zero() {
            return None;
        }
        let m = lcm_u64(2, self.order as u64) as u32;
        let me = self.lift(m);
        if !me.den.is_one() {
            return None;
        }
        (0..m as i64)
            .find(|&k| Self::zeta_power(k, m) == me)
            .map(|k| RootOfUnity::new(k, m as u64))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let d = self.den.to_f64().unwrap_or(f64::NAN);
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN) / d;
            let t = std::f64::consts::TAU * k as f64 / self.order as f64;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(k).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclotomic::aligned(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclotomic {}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::aligned(self, o);
        let num = if a.den == b.den {
            a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect()
        } else {
            a.num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| x * &b.den + y * &a.den)
                .collect()
        };
        let den = if a.den == b.den { a.den.clone() } else { &a.den * &b.den };
        let mut out = Cyclotomic { order: a.order, num, den };
        out.normalize();
        out
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: &Cyclotomic) -> Cyclotomic {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::aligned(self, o);
        if a.is_zero() || b.is_zero() {
            return Cyclotomic::zero(a.order);
        }
        let mut raw = vec![BigInt::zero(); a.num.len() + b.num.len() - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Cyclotomic::from_raw(a.order, raw, &a.den * &b.den)
    }
}

impl<'a> Div<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Cyclotomic) -> Cyclotomic {
        self * &o.inv().expect("division by zero cyclotomic")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, o: Cyclotomic) -> Cyclotomic {
                (&self).$m(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_root_of_unity() {
            return write!(f, "{}", r);
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*z{}", c, self.order)?,
                _ => write!(f, "{}*z{}^{}", c, self.order, k)?,
            }
        }
        Ok(())
    }
}
