//! Independent reference arithmetic and helpers shared by the integration
//! tests. Nothing here calls the library's arithmetic.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use skewcode::{Element, FieldTower};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Schoolbook polynomial arithmetic on the tower's digit encoding: an element
/// is an `m × k` array of residues mod `p`, multiplied as polynomials and
/// reduced by the two moduli.
pub struct NaiveTower {
    pub p: u32,
    pub k: usize,
    pub m: usize,
    base_mod: Vec<u32>,
    ext_mod: Vec<Vec<u32>>,
}

impl NaiveTower {
    pub fn new(t: &FieldTower) -> Self {
        let p = t.p();
        let k = t.k() as usize;
        let ext_mod = t.ext_modulus().iter().map(|&c| digits(c, p, k)).collect();
        NaiveTower { p, k, m: t.m() as usize, base_mod: t.base_modulus().to_vec(), ext_mod }
    }

    pub fn q0(&self) -> u32 {
        self.p.pow(self.k as u32)
    }

    pub fn q(&self) -> u32 {
        self.q0().pow(self.m as u32)
    }

    fn split(&self, x: Element) -> Vec<Vec<u32>> {
        let q0 = self.q0();
        let mut v = x.to_int();
        (0..self.m)
            .map(|_| {
                let c = v % q0;
                v /= q0;
                digits(c, self.p, self.k)
            })
            .collect()
    }

    fn join(&self, coeffs: &[Vec<u32>]) -> Element {
        let q0 = self.q0();
        let mut v = 0;
        for c in coeffs.iter().rev() {
            v = v * q0 + undigits(c, self.p);
        }
        Element::from_int(v)
    }

    fn base_add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    fn base_mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for d in (self.k..2 * self.k).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for (i, &mc) in self.base_mod.iter().enumerate() {
                let idx = d - self.k + i;
                prod[idx] = (prod[idx] + (p - c) * mc as u64) % p;
            }
        }
        prod[..self.k].iter().map(|&x| x as u32).collect()
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let (x, y) = (self.split(a), self.split(b));
        let s: Vec<Vec<u32>> = x.iter().zip(&y).map(|(u, v)| self.base_add(u, v)).collect();
        self.join(&s)
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        let (x, y) = (self.split(a), self.split(b));
        let zero = vec![0u32; self.k];
        let mut prod = vec![zero.clone(); 2 * self.m];
        for i in 0..self.m {
            for j in 0..self.m {
                let t = self.base_mul(&x[i], &y[j]);
                prod[i + j] = self.base_add(&prod[i + j], &t);
            }
        }
        for d in (self.m..2 * self.m).rev() {
            let c = prod[d].clone();
            if c.iter().all(|&v| v == 0) {
                continue;
            }
            for (i, mc) in self.ext_mod.iter().enumerate() {
                let idx = d - self.m + i;
                let t = self.base_mul(&c, mc);
                let neg: Vec<u32> = t.iter().map(|&v| (self.p - v) % self.p).collect();
                prod[idx] = self.base_add(&prod[idx], &neg);
            }
        }
        self.join(&prod[..self.m])
    }

    pub fn pow(&self, a: Element, e: u64) -> Element {
        let mut acc = Element::ONE;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Multiplicative order by repeated multiplication.
    pub fn order(&self, a: Element) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != Element::ONE {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

fn digits(mut v: u32, p: u32, k: usize) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

pub fn random_element(t: &FieldTower, rng: &mut impl Rng) -> Element {
    Element::from_int(rng.gen_range(0..t.q()))
}

pub fn random_nonzero(t: &FieldTower, rng: &mut impl Rng) -> Element {
    Element::from_int(rng.gen_range(1..t.q()))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rank by elimination with the reference arithmetic; entries are rows.
pub fn naive_rank(nt: &NaiveTower, rows: &[Vec<Element>]) -> usize {
    let mut m: Vec<Vec<Element>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, pr);
        // inverse by search
        let piv = m[rank][c];
        let inv = (1..nt.q()).map(Element::from_int).find(|&x| nt.mul(x, piv) == Element::ONE).unwrap();
        for r in 0..m.len() {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let f = nt.mul(m[r][c], inv);
            let minus_f = nt.mul(f, Element::from_int(nt.neg_one()));
            for j in 0..cols {
                let v = nt.mul(minus_f, m[rank][j]);
                m[r][j] = nt.add(m[r][j], v);
            }
        }
        rank += 1;
    }
    rank
}

impl NaiveTower {
    /// Encoding of `-1`: `p - 1` in the lowest digit.
    pub fn neg_one(&self) -> u32 {
        self.p - 1
    }
}
