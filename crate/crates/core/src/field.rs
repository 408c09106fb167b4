//! Arithmetic in `F_p` and `F_{p^e}`.
//!
//! Elements are stored packed: the coefficient vector `(a_0, .., a_{e-1})`
//! of `a_0 + a_1 x + .. + a_{e-1} x^{e-1}` is encoded as the integer
//! `a_0 + a_1 p + .. + a_{e-1} p^{e-1}`. For prime fields this is just the
//! residue itself.

use crate::error::{Error, Result};

/// Default upper bound on the field order `q`.
pub const DEFAULT_FIELD_CAP: u64 = 2500;

/// An element of a finite field in packed coefficient form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

/// Operations shared by prime and extension fields.
pub trait FiniteField: Send + Sync {
    fn characteristic(&self) -> u32;

    fn degree(&self) -> u32;

    fn order(&self) -> u32;

    /// Reduces an arbitrary coefficient vector (low degree first) to an element.
    fn element(&self, coeffs: &[u64]) -> FieldElement;

    /// Coefficients `a_0..a_{e-1}`, each in `0..p`.
    fn coeffs(&self, a: FieldElement) -> Vec<u32>;

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement;

    fn neg(&self, a: FieldElement) -> FieldElement;

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement;

    fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == FieldElement::ZERO {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// All `y` with `y^2 = c`, ascending by packed index.
    fn sqrt_set(&self, c: FieldElement) -> &[FieldElement];

    /// The integer `M = sum c_i p^i` where every coefficient is first moved
    /// to its centered representative in `[-(p-1)/2, (p-1)/2]`.
    fn to_centered_int(&self, a: FieldElement) -> i64 {
        let p = self.characteristic() as i64;
        self.coeffs(a).iter().rev().fold(0i64, |acc, &c| {
            acc * p + center_coordinate(c, self.characteristic())
        })
    }

    fn elements(&self) -> std::iter::Map<std::ops::Range<u32>, fn(u32) -> FieldElement> {
        (0..self.order()).map(FieldElement::from_index as fn(u32) -> FieldElement)
    }
}

/// Maps a residue in `0..p` to the representative in `[-(p-1)/2, (p-1)/2]`.
pub fn center_coordinate(x: u32, p: u32) -> i64 {
    debug_assert!(x < p);
    if x <= (p - 1) / 2 {
        x as i64
    } else {
        x as i64 - p as i64
    }
}

pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut k = 3;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn sqrt_table<F: FiniteField + ?Sized>(field: &F) -> Vec<Vec<FieldElement>> {
    let mut table = vec![Vec::new(); field.order() as usize];
    for y in field.elements() {
        table[field.square(y).index() as usize].push(y);
    }
    table
}

/// The prime field `F_p`, `p` odd.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u32,
    roots: Vec<Vec<FieldElement>>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_cap(p, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, cap: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if p > cap {
            return Err(Error::FieldTooLarge { order: p, cap });
        }
        let mut field = PrimeField {
            p: p as u32,
            roots: Vec::new(),
        };
        field.roots = sqrt_table(&field);
        Ok(field)
    }

    /// The quadratic character: 0 at 0, 1 on nonzero squares, -1 otherwise.
    /// Evaluated with Euler's criterion `a^{(p-1)/2}`.
    pub fn quadratic_character(&self, a: FieldElement) -> i8 {
        quadratic_character(a.index() as i64, self.p as u64)
    }
}

/// Euler's criterion for an arbitrary integer `a` modulo the odd prime `p`.
pub fn quadratic_character(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

impl FiniteField for PrimeField {
    fn characteristic(&self) -> u32 {
        self.p
    }

    fn degree(&self) -> u32 {
        1
    }

    fn order(&self) -> u32 {
        self.p
    }

    fn element(&self, coeffs: &[u64]) -> FieldElement {
        let c = coeffs.first().copied().unwrap_or(0);
        FieldElement((c % self.p as u64) as u32)
    }

    fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        vec![a.0]
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.p { s - self.p } else { s })
    }

    fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    fn sqrt_set(&self, c: FieldElement) -> &[FieldElement] {
        &self.roots[c.0 as usize]
    }

    fn to_centered_int(&self, a: FieldElement) -> i64 {
        center_coordinate(a.0, self.p)
    }
}

/// `F_{p^e} = F_p[x] / (m(x))` with `m` monic irreducible of degree `e`,
/// in the polynomial basis `1, x, .., x^{e-1}`.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    p: u32,
    e: u32,
    /// Monic modulus, low degree first, length `e + 1`.
    modulus: Vec<u32>,
    order: u32,
    roots: Vec<Vec<FieldElement>>,
}

impl ExtensionField {
    /// Builds `F_{p^e}` over the smallest monic irreducible polynomial of
    /// degree `e`, where polynomials are ordered by their packed index
    /// `c_0 + c_1 p + .. + c_{e-1} p^{e-1}` (leading 1 omitted).
    pub fn build(p: u64, e: u32) -> Result<Self> {
        Self::build_with_cap(p, e, DEFAULT_FIELD_CAP)
    }

    pub fn build_with_cap(p: u64, e: u32, cap: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidParameter(
                "extension degree must be >= 1".into(),
            ));
        }
        let order = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if order > cap as u128 {
            return Err(Error::FieldTooLarge {
                order: order.min(u64::MAX as u128) as u64,
                cap,
            });
        }
        let p = p as u32;
        let modulus = (0..(order as u32))
            .map(|idx| {
                let mut m = digits(idx, p, e);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists");
        Self::with_modulus(p as u64, modulus)
    }

    /// Uses the given monic modulus (low degree first). Fails if it is not
    /// irreducible.
    pub fn with_modulus(p: u64, modulus: Vec<u32>) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let p = p as u32;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameter(
                "modulus must be monic of degree >= 1 with reduced coefficients".into(),
            ));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidParameter(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        let e = (modulus.len() - 1) as u32;
        let order = p.pow(e);
        let mut field = ExtensionField {
            p,
            e,
            modulus,
            order,
            roots: Vec::new(),
        };
        field.roots = sqrt_table(&field);
        Ok(field)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn pack(&self, coeffs: &[u32]) -> FieldElement {
        FieldElement(coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c))
    }
}

fn digits(mut idx: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

/// Remainder of `num` modulo the monic `den` over `F_p` (low degree first).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    let p64 = p as u64;
    while r.len() > dd {
        let lead = r.pop().unwrap() % p64;
        if lead == 0 {
            continue;
        }
        let shift = r.len() - dd;
        for (i, &c) in den[..dd].iter().enumerate() {
            // subtract lead * c * x^{shift+i}
            r[shift + i] = (r[shift + i] + p64 * p64 - lead * c as u64 % p64) % p64;
        }
    }
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

/// Exhaustive check: no monic factor of degree `1..=deg/2` divides `poly`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for k in 1..=deg / 2 {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut cand = digits(idx, p, k as u32);
            cand.push(1);
            if poly_rem(poly, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField for ExtensionField {
    fn characteristic(&self) -> u32 {
        self.p
    }

    fn degree(&self) -> u32 {
        self.e
    }

    fn order(&self) -> u32 {
        self.order
    }

    fn element(&self, coeffs: &[u64]) -> FieldElement {
        let as_u32: Vec<u32> = coeffs.iter().map(|&c| (c % self.p as u64) as u32).collect();
        let reduced = if as_u32.len() > self.e as usize {
            poly_rem(&as_u32, &self.modulus, self.p)
        } else {
            as_u32
        };
        self.pack(&reduced)
    }

    fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.p, self.e)
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(&u, &v)| (u + v) % self.p).collect();
        self.pack(&s)
    }

    fn neg(&self, a: FieldElement) -> FieldElement {
        let s: Vec<u32> = self
            .coeffs(a)
            .iter()
            .map(|&u| if u == 0 { 0 } else { self.p - u })
            .collect();
        self.pack(&s)
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * self.e as usize - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] += u as u64 * v as u64;
            }
        }
        self.element(&prod)
    }

    fn sqrt_set(&self, c: FieldElement) -> &[FieldElement] {
        &self.roots[c.0 as usize]
    }
}
