//! Exact arithmetic in GF(p^R) = F_p[x]/(m(x)).
//!
//! Elements are stored as their rank in the canonical total order: coefficient
//! vectors compared lexicographically with the constant term first. With that
//! encoding the rank doubles as the vertex index of every graph built over the
//! field, and "smallest" for the modulus and the primitive element means the
//! same thing as it does for elements.
//!
//! Multiplication goes through a full discrete-log table built once per field.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

/// Default upper bound on `q = p^R`.
pub const DEFAULT_MAX_Q: u64 = 1 << 20;

/// An element of a [`FieldSpec`], identified by its canonical rank.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Rank in the canonical order, which is also the vertex index.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub struct FieldSpec {
    p: u32,
    degree: u32,
    q: u32,
    /// Monic, `degree + 1` coefficients, constant term first.
    modulus: Vec<u32>,
    omega: FieldElement,
    one: FieldElement,
    /// `place[i]` is the weight of coefficient `i` in an element's rank.
    place: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("R", &self.degree)
            .field("modulus", &self.modulus)
            .field("omega", &self.coeffs(self.omega))
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus && self.omega == other.omega
    }
}

impl Eq for FieldSpec {}

/// Builds GF(p^R) with the canonical modulus and primitive element, bounded by
/// [`DEFAULT_MAX_Q`].
pub fn build_field(p: u64, degree: u32) -> Result<FieldSpec> {
    build_field_bounded(p, degree, DEFAULT_MAX_Q)
}

pub fn build_field_bounded(p: u64, degree: u32, max_q: u64) -> Result<FieldSpec> {
    let q = check_order(p, degree, max_q)?;
    let p32 = p as u32;
    let layout = Layout::new(p32, degree);

    let modulus = if degree == 1 {
        vec![0, 1]
    } else {
        // Monic polynomials of degree R share the ranking of elements once the
        // leading 1 is dropped, so the first irreducible rank is the smallest.
        (0..q as u32)
            .map(|rank| {
                let mut m = layout.decode(rank);
                m.push(1);
                m
            })
            .find(|m| m[0] != 0 && poly::is_irreducible(m, p32))
            .expect("an irreducible polynomial of every degree exists")
    };

    let factors = arith::prime_factors(q - 1);
    let omega = (1..q as u32)
        .find(|&rank| poly::is_primitive(&layout.decode(rank), &modulus, p32, q - 1, &factors))
        .expect("the multiplicative group of a finite field is cyclic");

    Ok(FieldSpec::assemble(layout, modulus, FieldElement(omega)))
}

/// Rebuilds a field from an explicit modulus and primitive element, checking
/// both.
pub fn field_from_parts(p: u64, degree: u32, modulus: &[u32], omega: &[u32]) -> Result<FieldSpec> {
    let q = check_order(p, degree, u64::from(u32::MAX))?;
    let p32 = p as u32;
    if modulus.len() != degree as usize + 1 || modulus[degree as usize] != 1 {
        return Err(Error::InvalidField(format!("modulus must be monic of degree {degree}")));
    }
    if modulus.iter().any(|&c| c >= p32) {
        return Err(Error::InvalidField("modulus coefficient out of range".into()));
    }
    if !poly::is_irreducible(modulus, p32) {
        return Err(Error::InvalidField("modulus is reducible".into()));
    }
    let layout = Layout::new(p32, degree);
    let omega_rank = layout.encode(omega)?;
    let factors = arith::prime_factors(q - 1);
    if !poly::is_primitive(&layout.decode(omega_rank), modulus, p32, q - 1, &factors) {
        return Err(Error::InvalidField("omega is not a primitive element".into()));
    }
    Ok(FieldSpec::assemble(layout, modulus.to_vec(), FieldElement(omega_rank)))
}

fn check_order(p: u64, degree: u32, max_q: u64) -> Result<u64> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if degree == 0 {
        return Err(Error::InvalidField("extension degree must be positive".into()));
    }
    let bound = max_q.min(u64::from(u32::MAX));
    match arith::checked_pow(p, degree) {
        Some(q) if q <= bound => Ok(q),
        Some(q) => Err(Error::BoundExceeded { value: q, bound }),
        None => Err(Error::BoundExceeded { value: u64::MAX, bound }),
    }
}

struct Layout {
    p: u32,
    degree: u32,
    place: Vec<u32>,
}

impl Layout {
    fn new(p: u32, degree: u32) -> Self {
        let place = (0..degree).map(|i| p.pow(degree - 1 - i)).collect();
        Layout { p, degree, place }
    }

    fn decode(&self, rank: u32) -> Vec<u32> {
        self.place.iter().map(|&w| (rank / w) % self.p).collect()
    }

    fn encode(&self, coeffs: &[u32]) -> Result<u32> {
        if coeffs.len() != self.degree as usize {
            return Err(Error::InvalidElement(format!("expected {} coefficients, got {}", self.degree, coeffs.len())));
        }
        let mut rank = 0;
        for (&c, &w) in coeffs.iter().zip(&self.place) {
            if c >= self.p {
                return Err(Error::InvalidElement(format!("coefficient {c} not reduced mod {}", self.p)));
            }
            rank += c * w;
        }
        Ok(rank)
    }
}

impl FieldSpec {
    fn assemble(layout: Layout, modulus: Vec<u32>, omega: FieldElement) -> FieldSpec {
        let Layout { p, degree, place } = layout;
        let q = p.pow(degree);
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; order];
        let mut log = vec![u32::MAX; q as usize];
        let layout = Layout { p, degree, place: place.clone() };
        let omega_coeffs = layout.decode(omega.0);
        let mut cur = vec![0u32; degree as usize];
        cur[0] = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            let rank = layout.encode(&cur).expect("reduced");
            *slot = rank;
            log[rank as usize] = i as u32;
            cur = poly::mul_mod(&cur, &omega_coeffs, &modulus, p);
        }
        let one = FieldElement(place[0]);
        FieldSpec { p, degree, q, modulus, omega, one, place, exp, log }
    }

    pub fn p(&self) -> u64 {
        u64::from(self.p)
    }

    /// The extension degree `R`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn q(&self) -> u64 {
        u64::from(self.q)
    }

    pub fn size(&self) -> usize {
        self.q as usize
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn omega(&self) -> FieldElement {
        self.omega
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        self.one
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn element(&self, index: usize) -> Result<FieldElement> {
        if index < self.size() {
            Ok(FieldElement(index as u32))
        } else {
            Err(Error::OutOfRange { index, len: self.size() })
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        Layout { p: self.p, degree: self.degree, place: self.place.clone() }.encode(coeffs).map(FieldElement)
    }

    /// Coefficient vector, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        self.place.iter().map(|&w| (a.0 / w) % self.p).collect()
    }

    /// Image of the integer `n` in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let r = n.rem_euclid(i64::from(self.p)) as u32;
        FieldElement(r * self.place[0])
    }

    /// The monomial `x^j`, for `j < R`.
    pub fn monomial(&self, j: u32) -> FieldElement {
        FieldElement(self.place[j as usize])
    }

    fn digitwise(&self, a: u32, b: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut w = 1;
        for _ in 0..self.degree {
            out += f(a % self.p, b % self.p) * w;
            a /= self.p;
            b /= self.p;
            w *= self.p;
        }
        out
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let p = self.p;
        FieldElement(self.digitwise(a.0, b.0, |x, y| (x + y) % p))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let p = self.p;
        FieldElement(self.digitwise(a.0, b.0, |x, y| (x + p - y) % p))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let order = self.q - 1;
        let e = (self.log[a.index()] as u64 + self.log[b.index()] as u64) % u64::from(order);
        FieldElement(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a.index()];
        Ok(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    /// `a^n`; negative exponents go through the inverse.
    pub fn pow(&self, a: FieldElement, n: i64) -> Result<FieldElement> {
        if a.is_zero() {
            return match n.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(FieldElement::ZERO),
                std::cmp::Ordering::Equal => Ok(self.one),
                std::cmp::Ordering::Less => Err(Error::DivisionByZero),
            };
        }
        let order = i128::from(self.q - 1);
        let e = (i128::from(self.log[a.index()]) * i128::from(n)).rem_euclid(order);
        Ok(FieldElement(self.exp[e as usize]))
    }

    /// `omega^i` for any integer `i`.
    pub fn omega_pow(&self, i: i64) -> FieldElement {
        let order = i64::from(self.q - 1);
        FieldElement(self.exp[i.rem_euclid(order) as usize])
    }

    /// The exponent `e` in `[0, q - 2]` with `omega^e = a`.
    pub fn discrete_log(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(u64::from(self.log[a.index()]))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, i64::from(self.p)).expect("non-negative exponent")
    }

    /// The subfield of order `p^a`, in canonical order.
    pub fn subfield_elements(&self, a: u32) -> Result<Vec<FieldElement>> {
        if a == 0 || !self.degree.is_multiple_of(a) {
            return Err(Error::NotADivisor { a, degree: self.degree });
        }
        let sub_order = self.p.pow(a) - 1;
        let step = ((self.q - 1) / sub_order) as i64;
        let mut out: Vec<FieldElement> = std::iter::once(FieldElement::ZERO)
            .chain((0..sub_order as i64).map(|j| self.omega_pow(j * step)))
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    p: u64,
    #[serde(rename = "R")]
    degree: u32,
    modulus: Vec<u32>,
    omega: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecJson {
            p: self.p(),
            degree: self.degree,
            modulus: self.modulus.clone(),
            omega: self.coeffs(self.omega),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FieldSpecJson::deserialize(deserializer)?;
        field_from_parts(raw.p, raw.degree, &raw.modulus, &raw.omega).map_err(serde::de::Error::custom)
    }
}

/// Dense polynomials over F_p, constant term first.
mod poly {
    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(x: u64, p: u64) -> u64 {
        let mut result = 1;
        let mut base = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    }

    /// Remainder of `a` modulo `m` (any nonzero `m`).
    fn rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
        trim(&mut a);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while a.len() > dm {
            let da = a.len() - 1;
            let factor = a[da] * lead_inv % p;
            let shift = da - dm;
            for (i, &c) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - factor * c % p) % p;
            }
            trim(&mut a);
        }
        a
    }

    fn gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
        let (mut a, mut b) = (a, b);
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn mul_mod_wide(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(prod, m, p)
    }

    fn pow_mod_wide(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = rem(vec![1], m, p);
        let mut b = rem(base.to_vec(), m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod_wide(&result, &b, m, p);
            }
            b = mul_mod_wide(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    fn widen(a: &[u32]) -> Vec<u64> {
        a.iter().map(|&c| u64::from(c)).collect()
    }

    /// Product of two reduced elements, returned as exactly `deg m` coefficients.
    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let r = m.len() - 1;
        let mut out: Vec<u32> =
            mul_mod_wide(&widen(a), &widen(b), &widen(m), u64::from(p)).into_iter().map(|c| c as u32).collect();
        out.resize(r, 0);
        out
    }

    /// Irreducibility of a monic `m` via gcd(x^(p^i) - x, m) = 1 for i < R and
    /// x^(p^R) = x mod m.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let r = m.len() - 1;
        if r <= 1 {
            return r == 1;
        }
        let p = u64::from(p);
        let m = widen(m);
        let x = vec![0, 1];
        let mut h = x.clone();
        for _ in 1..r {
            h = pow_mod_wide(&h, p, &m, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            if diff.is_empty() || gcd(m.clone(), diff, p).len() > 1 {
                return false;
            }
        }
        h = pow_mod_wide(&h, p, &m, p);
        h == x
    }

    /// Whether `a` has multiplicative order exactly `order` (= q - 1), given the
    /// distinct prime factors of `order`.
    pub fn is_primitive(a: &[u32], m: &[u32], p: u32, order: u64, factors: &[u64]) -> bool {
        let p = u64::from(p);
        let m = widen(m);
        let mut a = widen(a);
        trim(&mut a);
        if a.is_empty() {
            return false;
        }
        let one = vec![1u64];
        if pow_mod_wide(&a, order, &m, p) != one {
            return false;
        }
        factors.iter().all(|&t| pow_mod_wide(&a, order / t, &m, p) != one)
    }
}
