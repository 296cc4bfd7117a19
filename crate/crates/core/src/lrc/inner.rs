//! Inner codes over `F_{q0}`: BCH parity-check matrices and projective
//! Reed–Solomon matrices with a prescribed MDS top block.

use crate::error::CodeError;
use crate::field::{Element, FieldTower, Level};
use crate::linalg::Matrix;

/// Smallest `ℓ ≥ 1` with `q0^ℓ ≥ r`.
pub fn ceil_log(q0: u32, r: usize) -> u32 {
    let mut l = 1u32;
    let mut size = q0 as u64;
    while size < r as u64 {
        size *= q0 as u64;
        l += 1;
    }
    l
}

/// Codimension `1 + ((d-2) - ⌊(d-2)/q0⌋)·⌈log_{q0} r⌉` of the BCH parity-check
/// matrix built by [`bch_parity_matrix`].
pub fn bch_codimension(r: usize, d: usize, q0: u32) -> usize {
    let e = d.saturating_sub(2);
    1 + (e - e / q0 as usize) * ceil_log(q0, r) as usize
}

/// Parity-check matrix over `F_{q0}` of a length-`r` code with distance at
/// least `d`: an all-ones row, then for each `j ∈ 1..=d-2` with `q0 ∤ j` the
/// `ℓ` coordinate rows of `(θ_1^j, …, θ_r^j)`, where `θ_i` are the first `r`
/// elements of `F_{q0^ℓ}`.
pub fn bch_parity_matrix(r: usize, d: usize, q0: u32) -> Result<Matrix, CodeError> {
    if d < 2 || r < 2 {
        return Err(CodeError::BadParams(format!("BCH code needs d >= 2 and r >= 2 (got d={d}, r={r})")));
    }
    let (p, k) = crate::field::prime_power_decompose(q0)
        .ok_or_else(|| CodeError::BadParams(format!("q0={q0} is not a prime power")))?;
    let l = ceil_log(q0, r);
    let big = FieldTower::new(p, k, l)?;
    let theta: Vec<Element> = (0..r as u32).map(Element::from_int).collect();
    let mut rows = vec![vec![Element::ONE; r]];
    for j in 1..=d - 2 {
        if j % q0 as usize == 0 {
            continue;
        }
        let powers: Vec<Vec<Element>> = theta.iter().map(|&th| big.flatten(big.pow(th, j as u64))).collect();
        for coord in 0..l as usize {
            rows.push(powers.iter().map(|v| v[coord]).collect());
        }
    }
    debug_assert_eq!(rows.len(), bch_codimension(r, d, q0));
    Ok(Matrix::from_rows(rows, Level::Base)?)
}

/// A point of the projective line over `F_{q0}`: `(x : 1)` or `∞ = (1 : 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Point {
    Affine(Element),
    Infinity,
}

/// A binary form `Σ c_i x^i y^{deg-i}`.
fn eval_form(t: &FieldTower, coeffs: &[Element], pt: Point) -> Element {
    let deg = coeffs.len() - 1;
    match pt {
        Point::Infinity => coeffs[deg],
        Point::Affine(x) => coeffs
            .iter()
            .rev()
            .fold(Element::ZERO, |acc, &c| t.add(t.mul(acc, x), c)),
    }
}

fn form_mul(t: &FieldTower, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out = vec![Element::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = t.add(out[i + j], t.mul(x, y));
        }
    }
    out
}

/// `(a + h) × (r + tail)` MDS matrix over `F_{q0}` whose top `a` rows are
/// MDS on the first `r` columns and vanish on the last `tail` columns.
///
/// Rows are evaluations of binary forms of degree `a + h - 1` at distinct
/// points of the projective line (affine points in encoding order, with `∞`
/// used only when `r + tail = q0 + 1`, placed last). The top rows are
/// `W·x^i·y^{a-1-i}`, where `W` is the product of the linear forms of the
/// tail points and the first form (in coefficient order) of the remaining
/// degree without zeros on the first `r` points; the bottom rows complete
/// them to a basis of all forms using monomials. Since the rows span all
/// forms, the matrix is a row transform of a doubly extended Reed–Solomon
/// parity-check matrix.
pub fn projective_mds(
    base: &FieldTower,
    a: usize,
    h: usize,
    r: usize,
    tail: usize,
) -> Result<Matrix, CodeError> {
    let q0 = base.q0() as usize;
    let n = r + tail;
    if n > q0 + 1 {
        return Err(CodeError::BadParams(format!("MDS length {n} exceeds q0 + 1 = {}", q0 + 1)));
    }
    if tail > h {
        return Err(CodeError::BadParams(format!("tail {tail} exceeds h = {h}")));
    }
    let rows = a + h;
    if rows == 0 {
        return Ok(Matrix::zeros(0, n, Level::Base));
    }
    let mut points: Vec<Point> = (0..n.min(q0) as u32).map(|v| Point::Affine(Element::from_int(v))).collect();
    if n == q0 + 1 {
        points.push(Point::Infinity);
    }
    let (head, tail_pts) = points.split_at(r);
    let deg = rows - 1;

    // W = Z · Q
    let mut z = vec![Element::ONE];
    for &pt in tail_pts {
        let lin = match pt {
            Point::Affine(x) => vec![base.neg(x), Element::ONE], // x - p·y
            Point::Infinity => vec![Element::ONE, Element::ZERO], // y
        };
        z = form_mul(base, &z, &lin);
    }
    let qdeg = h - tail;
    let q = find_form_without_zeros(base, qdeg, head).ok_or_else(|| {
        CodeError::BadParams(format!(
            "no degree-{qdeg} form avoids all {r} local points over F_{q0}; choose a larger q0"
        ))
    })?;
    let w = form_mul(base, &z, &q);

    let mut forms: Vec<Vec<Element>> = (0..a)
        .map(|i| {
            let mut mono = vec![Element::ZERO; a];
            mono[i] = Element::ONE;
            form_mul(base, &w, &mono)
        })
        .collect();
    // complete with monomials x^i y^{deg-i}
    for i in 0..=deg {
        if forms.len() == rows {
            break;
        }
        let mut mono = vec![Element::ZERO; deg + 1];
        mono[i] = Element::ONE;
        let mut candidate = forms.clone();
        candidate.push(mono.clone());
        let rank = Matrix::from_rows(candidate, Level::Base)?.rank(base);
        if rank == forms.len() + 1 {
            forms.push(mono);
        }
    }
    let entries = forms
        .iter()
        .map(|f| points.iter().map(|&pt| eval_form(base, f, pt)).collect())
        .collect();
    Ok(Matrix::from_rows(entries, Level::Base)?)
}

fn find_form_without_zeros(base: &FieldTower, deg: usize, avoid: &[Point]) -> Option<Vec<Element>> {
    let q0 = base.q0() as u64;
    let total = q0.checked_pow(deg as u32 + 1)?;
    (1..total).find_map(|mut code| {
        let coeffs: Vec<Element> = (0..=deg)
            .map(|_| {
                let c = Element::from_int((code % q0) as u32);
                code /= q0;
                c
            })
            .collect();
        avoid
            .iter()
            .all(|&pt| !eval_form(base, &coeffs, pt).is_zero())
            .then_some(coeffs)
    })
}

/// Rewrites a parity-check matrix `p` (over `F_{q0}`, `r + tail` columns) so
/// its first row is `r` ones followed by `tail` zeros, scaling columns as
/// needed, and the remaining rows complete it to a row basis. Returns `None`
/// when the row space has no vector supported exactly on the first `r`
/// columns.
pub fn with_weight_r_first_row(base: &FieldTower, p: &Matrix, r: usize) -> Option<Matrix> {
    let n = p.cols();
    let tail: Vec<usize> = (r..n).collect();
    // coefficient vectors x with (xP) zero on the tail
    let constraint = p.select_columns(&tail).transpose();
    let coeff_basis = if tail.is_empty() {
        (0..p.rows())
            .map(|i| {
                let mut v = vec![Element::ZERO; p.rows()];
                v[i] = Element::ONE;
                v
            })
            .collect()
    } else {
        constraint.nullspace(base)
    };
    let pt = p.transpose();
    let vectors: Vec<Vec<Element>> = coeff_basis
        .iter()
        .map(|x| pt.mul_vec(base, x).expect("dimensions agree"))
        .collect();
    let dim = vectors.len();
    let q0 = base.q0() as u64;
    let budget = 1u64 << 22;
    let total = q0.checked_pow(dim as u32).unwrap_or(u64::MAX).min(budget);
    let w = (1..total).find_map(|mut code| {
        let mut acc = vec![Element::ZERO; n];
        for v in &vectors {
            let c = Element::from_int((code % q0) as u32);
            code /= q0;
            if !c.is_zero() {
                for (slot, &e) in acc.iter_mut().zip(v) {
                    *slot = base.add(*slot, base.mul(c, e));
                }
            }
        }
        acc[..r].iter().all(|e| !e.is_zero()).then_some(acc)
    })?;
    // scale column j < r by 1/w_j
    let mut scaled = p.clone();
    for j in 0..r {
        let s = base.inv(w[j]).expect("nonzero");
        for i in 0..p.rows() {
            scaled.set(i, j, base.mul(p.get(i, j), s));
        }
    }
    let first: Vec<Element> = (0..n).map(|j| if j < r { Element::ONE } else { Element::ZERO }).collect();
    let mut rows = vec![first];
    for i in 0..scaled.rows() {
        let mut candidate = rows.clone();
        candidate.push(scaled.row(i).to_vec());
        if Matrix::from_rows(candidate.clone(), Level::Base).ok()?.rank(base) == rows.len() + 1 {
            rows = candidate;
        }
    }
    Matrix::from_rows(rows, Level::Base).ok()
}
