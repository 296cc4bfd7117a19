//! Two-level finite field towers `F_p ⊂ F_{q0} = GF(p^k) ⊂ F_q = GF(q0^m)`.
//!
//! Elements are stored by their integer encoding: the base-`p` positional
//! value of the `k·m` coordinates in the power basis, least significant
//! coordinate first. Coordinate `j·k + i` is the coefficient of `y^i · x^j`,
//! where `y` is a root of the base modulus and `x` a root of the extension
//! modulus. A consequence of this layout is that `F_{q0}` embeds into `F_q`
//! as the encodings `0..q0`, so one set of operations serves both levels.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Largest supported top field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

/// Towers up to this size get log/antilog (and Zech) tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// A field element, identified by its integer encoding within a tower.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(u32);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    pub const fn from_int(v: u32) -> Self {
        Element(v)
    }

    pub const fn to_int(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which level of the tower a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Base,
    Extension,
}

// ---------------------------------------------------------------------------
// Small polynomial helpers over a coefficient field, used only while
// searching for moduli.
// ---------------------------------------------------------------------------

trait Scalars {
    fn order(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
}

struct PrimeField {
    p: u32,
}

impl Scalars for PrimeField {
    fn order(&self) -> u32 {
        self.p
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: u32) -> u32 {
        // a^(p-2)
        let mut result = 1u64;
        let mut base = a as u64 % self.p as u64;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            e >>= 1;
        }
        result as u32
    }
}

/// Remainder of `num` modulo the monic polynomial `den` (constant term first).
fn poly_rem<S: Scalars>(s: &S, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = s.inv(den[dd]);
    while r.len() > dd {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = s.mul(top, lead_inv);
            let shift = r.len() - 1 - dd;
            for (i, &d) in den.iter().enumerate() {
                r[shift + i] = s.sub(r[shift + i], s.mul(c, d));
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// The monic polynomial of degree `deg` whose non-leading coefficients are
/// the base-`order` digits of `code` (constant term least significant).
fn monic_from_code(order: u32, deg: usize, mut code: u64) -> Vec<u32> {
    let mut c = Vec::with_capacity(deg + 1);
    for _ in 0..deg {
        c.push((code % order as u64) as u32);
        code /= order as u64;
    }
    c.push(1);
    c
}

fn is_irreducible<S: Scalars>(s: &S, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    let order = s.order() as u64;
    for d in 1..=deg / 2 {
        for code in 0..order.pow(d as u32) {
            let g = monic_from_code(s.order(), d, code);
            if poly_rem(s, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible<S: Scalars>(s: &S, deg: usize) -> Vec<u32> {
    let order = s.order() as u64;
    (0..order.pow(deg as u32))
        .map(|code| monic_from_code(s.order(), deg, code))
        .find(|f| is_irreducible(s, f))
        .expect("an irreducible polynomial exists in every degree")
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Decomposes `q` as `p^k`, if it is a prime power.
pub fn prime_power_decompose(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u32;
    while q % p != 0 {
        p += 1;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Smallest prime power that is at least `lower` (and at least 2).
pub fn smallest_prime_power_at_least(lower: u32) -> u32 {
    let mut q = lower.max(2);
    while prime_power_decompose(q).is_none() {
        q += 1;
    }
    q
}

// ---------------------------------------------------------------------------
// Base field F_{q0} = F_p[y]/(base_modulus)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct BaseField {
    p: u32,
    k: usize,
    q0: u32,
    modulus: Vec<u32>,
    mul_table: Option<Vec<u32>>,
}

impl BaseField {
    fn new(p: u32, k: usize, modulus: Vec<u32>) -> Self {
        let q0 = p.pow(k as u32);
        let mut field = BaseField { p, k, q0, modulus, mul_table: None };
        if q0 <= 256 {
            let mut t = vec![0u32; (q0 * q0) as usize];
            for a in 0..q0 {
                for b in 0..q0 {
                    t[(a * q0 + b) as usize] = field.mul_slow(a, b);
                }
            }
            field.mul_table = Some(t);
        }
        field
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.k)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let fp = PrimeField { p: self.p };
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; 2 * self.k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = fp.add(prod[i + j], fp.mul(x, y));
            }
        }
        let mut r = poly_rem(&fp, &prod, &self.modulus);
        r.resize(self.k, 0);
        self.from_digits(&r)
    }
}

impl Scalars for BaseField {
    fn order(&self) -> u32 {
        self.q0
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * w;
            a /= self.p;
            b /= self.p;
            w = w.wrapping_mul(self.p);
        }
        out
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.k {
            out += ((a % self.p + self.p - b % self.p) % self.p) * w;
            a /= self.p;
            b /= self.p;
            w = w.wrapping_mul(self.p);
        }
        out
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[(a * self.q0 + b) as usize],
            None => self.mul_slow(a, b),
        }
    }
    fn inv(&self, a: u32) -> u32 {
        // a^(q0-2) by square and multiply
        let mut result = 1u32;
        let mut base = a;
        let mut e = self.q0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }
}

#[derive(Clone, Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[i] = log(1 + γ^i)`, or `u32::MAX` when `1 + γ^i = 0`.
    zech: Vec<u32>,
}

/// A finite field tower `F_p ⊂ F_{q0} ⊂ F_{q0^m}` with fixed moduli and a
/// fixed primitive element.
///
/// Immutable after construction and `Sync`; all element operations are pure.
#[derive(Clone, Debug)]
pub struct FieldTower {
    base: BaseField,
    m: usize,
    q: u32,
    ext_modulus: Vec<u32>,
    generator: Element,
    tables: Option<Tables>,
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.base.p == other.base.p
            && self.base.k == other.base.k
            && self.m == other.m
            && self.base.modulus == other.base.modulus
            && self.ext_modulus == other.ext_modulus
            && self.generator == other.generator
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    /// Builds the canonical tower for `(p, k, m)`: lexicographically smallest
    /// monic irreducible moduli (constant coefficient least significant) and
    /// the smallest-encoded primitive element.
    pub fn new(p: u32, k: u32, m: u32) -> Result<Self, FieldError> {
        Self::check_shape(p, k, m)?;
        let base_modulus = smallest_irreducible(&PrimeField { p }, k as usize);
        let base = BaseField::new(p, k as usize, base_modulus);
        let ext_modulus = smallest_irreducible(&base, m as usize);
        Self::assemble(base, m as usize, ext_modulus, None)
    }

    /// Rebuilds a tower from explicit moduli and generator, validating every
    /// invariant.
    pub fn from_parts(
        p: u32,
        k: u32,
        m: u32,
        base_modulus: Vec<u32>,
        ext_modulus: Vec<u32>,
        generator: Element,
    ) -> Result<Self, FieldError> {
        Self::check_shape(p, k, m)?;
        let fp = PrimeField { p };
        if base_modulus.len() != k as usize + 1
            || base_modulus.last() != Some(&1)
            || base_modulus.iter().any(|&c| c >= p)
            || !is_irreducible(&fp, &base_modulus)
        {
            return Err(FieldError::InvalidModulus("base modulus".into()));
        }
        let base = BaseField::new(p, k as usize, base_modulus);
        if ext_modulus.len() != m as usize + 1
            || ext_modulus.last() != Some(&1)
            || ext_modulus.iter().any(|&c| c >= base.q0)
            || !is_irreducible(&base, &ext_modulus)
        {
            return Err(FieldError::InvalidModulus("extension modulus".into()));
        }
        Self::assemble(base, m as usize, ext_modulus, Some(generator))
    }

    fn check_shape(p: u32, k: u32, m: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 || m == 0 {
            return Err(FieldError::DegreeOverflow { p, k, m });
        }
        let size = (p as u128).checked_pow(k * m);
        match size {
            Some(s) if s <= MAX_FIELD_SIZE as u128 => Ok(()),
            _ => Err(FieldError::DegreeOverflow { p, k, m }),
        }
    }

    fn assemble(
        base: BaseField,
        m: usize,
        ext_modulus: Vec<u32>,
        generator: Option<Element>,
    ) -> Result<Self, FieldError> {
        let q = base.q0.pow(m as u32);
        let mut tower = FieldTower { base, m, q, ext_modulus, generator: Element::ONE, tables: None };
        let factors = prime_factors(q as u64 - 1);
        let is_primitive = |t: &FieldTower, x: Element| {
            !x.is_zero()
                && t.pow_slow(x, q as u64 - 1) == Element::ONE
                && factors.iter().all(|&f| t.pow_slow(x, (q as u64 - 1) / f) != Element::ONE)
        };
        let generator = match generator {
            Some(g) => {
                if g.0 >= q || !is_primitive(&tower, g) {
                    return Err(FieldError::InvalidGenerator);
                }
                g
            }
            None => (1..q)
                .map(Element)
                .find(|&x| is_primitive(&tower, x))
                .expect("the multiplicative group of a finite field is cyclic"),
        };
        tower.generator = generator;
        if q as u64 <= TABLE_LIMIT {
            tower.tables = Some(tower.build_tables());
        }
        Ok(tower)
    }

    fn build_tables(&self) -> Tables {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; self.q as usize];
        let mut x = Element::ONE;
        for i in 0..n {
            exp[i] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_slow(x, self.generator);
        }
        for i in n..exp.len() {
            exp[i] = exp[i - n];
        }
        let zech = (0..n)
            .map(|i| {
                let s = self.add_digits(Element::ONE, Element(exp[i]));
                if s.is_zero() {
                    u32::MAX
                } else {
                    log[s.0 as usize]
                }
            })
            .collect();
        Tables { exp, log, zech }
    }

    pub fn p(&self) -> u32 {
        self.base.p
    }

    pub fn k(&self) -> u32 {
        self.base.k as u32
    }

    pub fn m(&self) -> u32 {
        self.m as u32
    }

    /// Size of the base field `F_{q0}`.
    pub fn q0(&self) -> u32 {
        self.base.q0
    }

    /// Size of the top field `F_q`.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn base_modulus(&self) -> &[u32] {
        &self.base.modulus
    }

    /// Extension modulus coefficients as base-field encodings.
    pub fn ext_modulus(&self) -> &[u32] {
        &self.ext_modulus
    }

    /// The fixed primitive element `γ`.
    pub fn generator(&self) -> Element {
        self.generator
    }

    pub fn is_base(&self, x: Element) -> bool {
        x.0 < self.base.q0
    }

    pub fn contains(&self, x: Element) -> bool {
        x.0 < self.q
    }

    /// Every element of `F_q` in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.q).map(Element)
    }

    /// Every element of `F_{q0}` in encoding order.
    pub fn base_elements(&self) -> impl Iterator<Item = Element> {
        (0..self.base.q0).map(Element)
    }

    /// Reads an integer encoding, rejecting values outside `F_q`.
    pub fn element(&self, v: u32) -> Result<Element, FieldError> {
        if v < self.q {
            Ok(Element(v))
        } else {
            Err(FieldError::OutOfRange { value: v, q: self.q })
        }
    }

    // -- arithmetic -------------------------------------------------------

    fn add_digits(&self, a: Element, b: Element) -> Element {
        if self.base.p == 2 {
            return Element(a.0 ^ b.0);
        }
        let p = self.base.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut w = 1u32;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * w;
            x /= p;
            y /= p;
            w = w.wrapping_mul(p);
        }
        Element(out)
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.base.p == 2 {
            return Element(a.0 ^ b.0);
        }
        match &self.tables {
            Some(t) => {
                if a.is_zero() {
                    return b;
                }
                if b.is_zero() {
                    return a;
                }
                let n = self.q - 1;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[d as usize];
                if z == u32::MAX {
                    Element::ZERO
                } else {
                    Element(t.exp[(la + z) as usize])
                }
            }
            None => self.add_digits(a, b),
        }
    }

    pub fn neg(&self, a: Element) -> Element {
        if self.base.p == 2 || a.is_zero() {
            return a;
        }
        let p = self.base.p;
        let mut x = a.0;
        let mut out = 0u32;
        let mut w = 1u32;
        while x > 0 {
            out += ((p - x % p) % p) * w;
            x /= p;
            w = w.wrapping_mul(p);
        }
        Element(out)
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: Element, b: Element) -> Element {
        if a.is_zero() || b.is_zero() {
            return Element::ZERO;
        }
        let q0 = self.base.q0;
        let m = self.m;
        if m == 1 {
            return Element(self.base.mul(a.0, b.0));
        }
        let split = |mut v: u32| -> Vec<u32> {
            (0..m)
                .map(|_| {
                    let d = v % q0;
                    v /= q0;
                    d
                })
                .collect()
        };
        let da = split(a.0);
        let db = split(b.0);
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = self.base.add(prod[i + j], self.base.mul(x, y));
                }
            }
        }
        let mut r = poly_rem(&self.base, &prod, &self.ext_modulus);
        r.resize(m, 0);
        Element(r.iter().rev().fold(0, |acc, &x| acc * q0 + x))
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        match &self.tables {
            Some(t) => {
                if a.is_zero() || b.is_zero() {
                    Element::ZERO
                } else {
                    Element(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
                }
            }
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                Element(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
            }
            None => self.pow_slow(a, self.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow_slow(&self, a: Element, mut e: u64) -> Element {
        let mut result = Element::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_slow(result, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        result
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Element, e: u64) -> Element {
        if e == 0 {
            return Element::ONE;
        }
        if a.is_zero() {
            return Element::ZERO;
        }
        let n = self.q as u64 - 1;
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                Element(t.exp[((l * (e % n)) % n) as usize])
            }
            None => self.pow_slow(a, e % n),
        }
    }

    /// `γ^e` for any (possibly large) exponent.
    pub fn gen_pow(&self, e: u64) -> Element {
        match &self.tables {
            Some(t) => Element(t.exp[(e % (self.q as u64 - 1)) as usize]),
            None => self.pow(self.generator, e),
        }
    }

    /// `q0^i mod (q-1)`, the exponent of the `i`-th Frobenius power.
    fn frobenius_exponent(&self, i: u32) -> u64 {
        let n = self.q as u64 - 1;
        let mut e = 1 % n.max(1);
        for _ in 0..(i % self.m as u32) {
            e = e * self.base.q0 as u64 % n.max(1);
        }
        e
    }

    /// `x^(q0^i)`.
    pub fn frobenius(&self, x: Element, i: u32) -> Element {
        if x.is_zero() || i % self.m as u32 == 0 {
            return x;
        }
        let e = self.frobenius_exponent(i);
        if e == 0 {
            // only reachable when q = 2
            return x;
        }
        self.pow(x, e)
    }

    /// Discrete logarithm to base `γ`, in `[0, q-1)`.
    pub fn dlog(&self, x: Element) -> Result<u64, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroHasNoLog);
        }
        if let Some(t) = &self.tables {
            return Ok(t.log[x.0 as usize] as u64);
        }
        // baby-step giant-step
        let n = self.q as u64 - 1;
        let step = (n as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(step as usize);
        let mut cur = Element::ONE;
        for j in 0..step {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, self.generator);
        }
        let giant = self.inv(self.pow(self.generator, step))?;
        let mut y = x;
        for i in 0..=step {
            if let Some(&j) = baby.get(&y) {
                return Ok((i * step + j) % n);
            }
            y = self.mul(y, giant);
        }
        unreachable!("every nonzero element is a power of the generator")
    }

    // -- coordinates ------------------------------------------------------

    /// Coordinates of `x` over `F_{q0}` in the power basis `1, x, …, x^{m-1}`.
    pub fn flatten(&self, x: Element) -> Vec<Element> {
        let q0 = self.base.q0;
        let mut v = x.0;
        (0..self.m)
            .map(|_| {
                let d = v % q0;
                v /= q0;
                Element(d)
            })
            .collect()
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn lift(&self, coords: &[Element]) -> Result<Element, FieldError> {
        if coords.len() != self.m {
            return Err(FieldError::LengthMismatch { expected: self.m, got: coords.len() });
        }
        let q0 = self.base.q0;
        if let Some(c) = coords.iter().find(|c| c.0 >= q0) {
            return Err(FieldError::OutOfRange { value: c.0, q: q0 });
        }
        Ok(Element(coords.iter().rev().fold(0, |acc, c| acc * q0 + c.0)))
    }

    /// The `k` coordinates over `F_p` of a base-field element.
    pub fn base_digits(&self, x: Element) -> Vec<u32> {
        self.base.digits(x.0)
    }

    /// Whether `other` shares this tower's base field (same `p`, `k` and
    /// base modulus), so base-level encodings are interchangeable.
    pub fn same_base_field(&self, other: &FieldTower) -> bool {
        self.base.p == other.base.p && self.base.modulus == other.base.modulus
    }

    // -- interchange ------------------------------------------------------

    pub fn to_json_value(&self) -> TowerJson {
        TowerJson {
            p: self.base.p,
            k: self.base.k as u32,
            m: self.m as u32,
            base_modulus: self.base.modulus.clone(),
            ext_modulus: self.ext_modulus.iter().map(|&c| self.base.digits(c)).collect(),
            generator: self.flatten(self.generator).into_iter().map(|c| self.base.digits(c.0)).collect(),
        }
    }

    pub fn from_json_value(j: &TowerJson) -> Result<Self, FieldError> {
        Self::check_shape(j.p, j.k, j.m)?;
        let fold = |digits: &[u32]| -> Result<u32, FieldError> {
            if digits.len() != j.k as usize || digits.iter().any(|&d| d >= j.p) {
                return Err(FieldError::InvalidModulus("coefficient digits".into()));
            }
            Ok(digits.iter().rev().fold(0, |acc, &d| acc * j.p + d))
        };
        let ext = j.ext_modulus.iter().map(|d| fold(d)).collect::<Result<Vec<_>, _>>()?;
        let gen_coords = j.generator.iter().map(|d| fold(d)).collect::<Result<Vec<_>, _>>()?;
        if gen_coords.len() != j.m as usize {
            return Err(FieldError::InvalidGenerator);
        }
        let q0 = j.p.pow(j.k);
        let generator = Element(gen_coords.iter().rev().fold(0, |acc, &c| acc * q0 + c));
        Self::from_parts(j.p, j.k, j.m, j.base_modulus.clone(), ext, generator)
    }
}

/// JSON form of a tower. Coefficients are listed constant term first; each
/// base-field coefficient is a list of `k` digits in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub p: u32,
    pub k: u32,
    pub m: u32,
    pub base_modulus: Vec<u32>,
    pub ext_modulus: Vec<Vec<u32>>,
    pub generator: Vec<Vec<u32>>,
}

impl Serialize for FieldTower {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldTower {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TowerJson::deserialize(d)?;
        FieldTower::from_json_value(&j).map_err(serde::de::Error::custom)
    }
}
