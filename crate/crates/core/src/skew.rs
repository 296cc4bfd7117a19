//! The skew polynomial ring `K[t; σ]` over `K = F_{q0^m}` with the Frobenius
//! twist `σ(x) = x^{q0}` and zero derivation, so `t·a = σ(a)·t`.
//!
//! Coefficients are written on the left: `f = Σ f_i t^i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::SkewError;
use crate::field::{Element, FieldTower};

/// Largest field scanned exhaustively by [`root_structure`].
pub const MAX_ROOT_SCAN: u32 = 1 << 20;

#[derive(Clone)]
pub struct SkewPoly {
    tower: Arc<FieldTower>,
    /// Coefficient of `t^i` at index `i`; no trailing zeros.
    coeffs: Vec<Element>,
}

impl fmt::Debug for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SkewPoly").field(&self.coeffs).finish()
    }
}

impl PartialEq for SkewPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_tower(&self.tower, &other.tower)
    }
}

impl Eq for SkewPoly {}

fn same_tower(a: &Arc<FieldTower>, b: &Arc<FieldTower>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SkewPoly {
    pub fn new(tower: Arc<FieldTower>, mut coeffs: Vec<Element>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { tower, coeffs }
    }

    pub fn zero(tower: Arc<FieldTower>) -> Self {
        SkewPoly { tower, coeffs: Vec::new() }
    }

    pub fn constant(tower: Arc<FieldTower>, c: Element) -> Self {
        Self::new(tower, vec![c])
    }

    /// `t - a`.
    pub fn linear(tower: Arc<FieldTower>, a: Element) -> Self {
        let neg = tower.neg(a);
        Self::new(tower, vec![neg, Element::ONE])
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn check(&self, other: &SkewPoly) -> Result<(), SkewError> {
        if same_tower(&self.tower, &other.tower) {
            Ok(())
        } else {
            Err(SkewError::TowerMismatch)
        }
    }

    pub fn add(&self, other: &SkewPoly) -> Result<SkewPoly, SkewError> {
        self.check(other)?;
        let t = &self.tower;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or_default();
                let b = other.coeffs.get(i).copied().unwrap_or_default();
                t.add(a, b)
            })
            .collect();
        Ok(SkewPoly::new(self.tower.clone(), c))
    }

    pub fn neg(&self) -> SkewPoly {
        let c = self.coeffs.iter().map(|&a| self.tower.neg(a)).collect();
        SkewPoly::new(self.tower.clone(), c)
    }

    pub fn sub(&self, other: &SkewPoly) -> Result<SkewPoly, SkewError> {
        self.add(&other.neg())
    }

    /// Twisted product: `(a t^i)(b t^j) = a σ^i(b) t^{i+j}`.
    pub fn mul(&self, other: &SkewPoly) -> Result<SkewPoly, SkewError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(SkewPoly::zero(self.tower.clone()));
        }
        let t = &self.tower;
        let mut out = vec![Element::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = t.mul(a, t.frobenius(b, i as u32));
                out[i + j] = t.add(out[i + j], term);
            }
        }
        Ok(SkewPoly::new(self.tower.clone(), out))
    }

    /// Right Euclidean division: returns `(quotient, remainder)` with
    /// `self = quotient · divisor + remainder` and `deg remainder < deg divisor`.
    pub fn right_div(&self, divisor: &SkewPoly) -> Result<(SkewPoly, SkewPoly), SkewError> {
        self.check(divisor)?;
        let dg = divisor.degree().ok_or(SkewError::DivisionByZeroPolynomial)?;
        let t = &self.tower;
        let lead = divisor.coeffs[dg];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Element::ZERO; self.coeffs.len().saturating_sub(dg)];
        while rem.len() > dg {
            let top = *rem.last().unwrap();
            let e = rem.len() - 1 - dg;
            if !top.is_zero() {
                // c t^e · lead t^dg = c σ^e(lead) t^{e+dg}
                let c = t
                    .div(top, t.frobenius(lead, e as u32))
                    .expect("leading coefficient of a nonzero polynomial is nonzero");
                quot[e] = c;
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    let term = t.mul(c, t.frobenius(b, e as u32));
                    rem[e + j] = t.sub(rem[e + j], term);
                }
            }
            rem.pop();
        }
        Ok((SkewPoly::new(self.tower.clone(), quot), SkewPoly::new(self.tower.clone(), rem)))
    }

    /// `f(a) = Σ f_i N_i(a)`.
    pub fn evaluate(&self, a: Element) -> Element {
        let t = &self.tower;
        let mut acc = Element::ZERO;
        let mut n = Element::ONE;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                n = t.mul(t.frobenius(n, 1), a);
            }
            acc = t.add(acc, t.mul(c, n));
        }
        acc
    }

    /// Evaluation as the remainder of right division by `t - a`.
    pub fn evaluate_by_division(&self, a: Element) -> Element {
        let (_, r) = self
            .right_div(&SkewPoly::linear(self.tower.clone(), a))
            .expect("t - a is nonzero");
        r.coeffs.first().copied().unwrap_or_default()
    }
}

/// `N_i(a)`: `N_0 = 1`, `N_{i+1}(a) = σ(N_i(a))·a`, which equals
/// `a^{1 + q0 + … + q0^{i-1}}`.
pub fn power_function(tower: &FieldTower, i: usize, a: Element) -> Element {
    let mut n = Element::ONE;
    for _ in 0..i {
        n = tower.mul(tower.frobenius(n, 1), a);
    }
    n
}

/// `a^c = σ(c)·a·c^{-1} = c^{q0-1}·a`.
pub fn conjugate(tower: &FieldTower, a: Element, c: Element) -> Result<Element, SkewError> {
    if c.is_zero() {
        return Err(SkewError::ConjugateByZero);
    }
    let ci = tower.inv(c).map_err(|_| SkewError::ConjugateByZero)?;
    Ok(tower.mul(tower.mul(tower.frobenius(c, 1), a), ci))
}

/// Conjugacy class index: `-1` for `{0}`, otherwise `dlog(a) mod (q0 - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConjugacyClassId(pub i32);

impl ConjugacyClassId {
    pub const ZERO_CLASS: ConjugacyClassId = ConjugacyClassId(-1);
}

pub fn conjugacy_class(tower: &FieldTower, a: Element) -> ConjugacyClassId {
    match tower.dlog(a) {
        Err(_) => ConjugacyClassId::ZERO_CLASS,
        Ok(l) => ConjugacyClassId((l % (tower.q0() as u64 - 1)) as i32),
    }
}

/// `γ^ℓ` for class `ℓ ≥ 0`, and `0` for the zero class.
pub fn class_representative(tower: &FieldTower, id: ConjugacyClassId) -> Element {
    if id.0 < 0 {
        Element::ZERO
    } else {
        tower.gen_pow(id.0 as u64)
    }
}

/// `(f·g)(a)` through the product rule: `0` when `g(a) = 0`, otherwise
/// `f(a^{g(a)})·g(a)`.
pub fn product_eval(f: &SkewPoly, g: &SkewPoly, a: Element) -> Result<Element, SkewError> {
    f.check(g)?;
    let t = f.tower();
    let ga = g.evaluate(a);
    if ga.is_zero() {
        return Ok(Element::ZERO);
    }
    let conj = conjugate(t, a, ga)?;
    Ok(t.mul(f.evaluate(conj), ga))
}

/// `D_{f,a}(y) = (f·y)(a)`, which is `f(a^y)·y` for `y ≠ 0` and `F_{q0}`-linear in `y`.
pub fn skew_linear_operator(f: &SkewPoly, a: Element, y: Element) -> Element {
    let fy = f
        .mul(&SkewPoly::constant(f.tower().clone(), y))
        .expect("same tower");
    fy.evaluate(a)
}

/// Roots of `f` within one conjugacy class, parameterised by `y ↦ rep^y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRoots {
    pub class: ConjugacyClassId,
    pub representative: Element,
    /// Basis of `V = {y : f(rep^y) = 0} ∪ {0}` over the centralizer of `rep`.
    pub basis: Vec<Element>,
    /// The roots found in this class.
    pub roots: Vec<Element>,
}

impl ClassRoots {
    /// Dimension of `V` over the centralizer: `F_{q0}` for nonzero classes,
    /// the whole field for the zero class.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootStructure {
    pub degree: usize,
    pub classes: Vec<ClassRoots>,
}

impl RootStructure {
    pub fn total_dimension(&self) -> usize {
        self.classes.iter().map(ClassRoots::dimension).sum()
    }

    /// Checks that every class's root set is exactly the image of a
    /// centralizer-subspace: all nonzero vectors of the spanned space map to
    /// roots, and the number of roots matches the size of that space.
    pub fn check_subspaces(&self, f: &SkewPoly) -> bool {
        let t = f.tower();
        let q0 = t.q0() as u64;
        self.classes.iter().all(|cr| {
            if cr.class.0 < 0 {
                return cr.roots == vec![Element::ZERO] && f.evaluate(Element::ZERO).is_zero();
            }
            let span = span_over_base(t, &cr.basis);
            let all_map_to_roots = span.iter().filter(|y| !y.is_zero()).all(|&y| {
                let x = conjugate(t, cr.representative, y).expect("nonzero");
                f.evaluate(x).is_zero() && skew_linear_operator(f, cr.representative, y).is_zero()
            });
            // each root x = rep^y has exactly q0-1 preimages y (the F_{q0}^* multiples)
            let expected_roots = (q0.pow(cr.basis.len() as u32) - 1) / (q0 - 1);
            all_map_to_roots && cr.roots.len() as u64 == expected_roots
        })
    }
}

/// Every `F_{q0}`-linear combination of `basis`.
pub fn span_over_base(tower: &FieldTower, basis: &[Element]) -> Vec<Element> {
    let mut span = vec![Element::ZERO];
    for &b in basis {
        let mut next = Vec::with_capacity(span.len() * tower.q0() as usize);
        for &s in &span {
            for c in tower.base_elements() {
                next.push(tower.add(s, tower.mul(c, b)));
            }
        }
        span = next;
    }
    span
}

/// Scans all of `F_q` for roots of `f`, groups them by conjugacy class and
/// extracts an `F_{q0}`-basis of each class's root space. Panics never; the
/// bound `Σ dim ≤ deg f` is returned for the caller to assert.
pub fn root_structure(f: &SkewPoly) -> Result<RootStructure, SkewError> {
    let degree = f.degree().ok_or(SkewError::ZeroPolynomial)?;
    let t = f.tower();
    if t.q() > MAX_ROOT_SCAN {
        return Err(SkewError::FieldTooLarge(t.q()));
    }
    let mut by_class: BTreeMap<ConjugacyClassId, Vec<Element>> = BTreeMap::new();
    for x in t.elements() {
        if f.evaluate(x).is_zero() {
            by_class.entry(conjugacy_class(t, x)).or_default().push(x);
        }
    }
    let q0m1 = t.q0() as u64 - 1;
    let classes = by_class
        .into_iter()
        .map(|(class, roots)| {
            let representative = class_representative(t, class);
            let basis = if class.0 < 0 {
                vec![Element::ONE]
            } else {
                // rep^y = y^{q0-1}·rep, so y = γ^{(dlog x - dlog rep)/(q0-1)}
                let lr = t.dlog(representative).expect("nonzero");
                let n = t.q() as u64 - 1;
                let preimages: Vec<Element> = roots
                    .iter()
                    .map(|&x| {
                        let lx = t.dlog(x).expect("nonzero");
                        let e = (lx + n - lr) % n;
                        t.gen_pow(e / q0m1)
                    })
                    .collect();
                base_span_basis(t, &preimages)
            };
            ClassRoots { class, representative, basis, roots }
        })
        .collect();
    Ok(RootStructure { degree, classes })
}

/// Extracts an `F_{q0}`-basis (a subset of `vectors`, first-come) by
/// elimination on flattened coordinates.
pub fn base_span_basis(tower: &FieldTower, vectors: &[Element]) -> Vec<Element> {
    let m = tower.m() as usize;
    // rows in echelon form with their pivot positions
    let mut echelon: Vec<(usize, Vec<Element>)> = Vec::new();
    let mut basis = Vec::new();
    for &v in vectors {
        let mut row = tower.flatten(v);
        for (pivot, er) in &echelon {
            let c = row[*pivot];
            if !c.is_zero() {
                for j in 0..m {
                    row[j] = tower.sub(row[j], tower.mul(c, er[j]));
                }
            }
        }
        if let Some(pivot) = row.iter().position(|c| !c.is_zero()) {
            let inv = tower.inv(row[pivot]).expect("nonzero pivot");
            for c in row.iter_mut() {
                *c = tower.mul(*c, inv);
            }
            // keep earlier rows reduced at the new pivot
            for (_, er) in echelon.iter_mut() {
                let c = er[pivot];
                if !c.is_zero() {
                    for j in 0..m {
                        er[j] = tower.sub(er[j], tower.mul(c, row[j]));
                    }
                }
            }
            echelon.push((pivot, row));
            basis.push(v);
        }
    }
    basis
}
