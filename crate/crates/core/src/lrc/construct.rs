use std::sync::Arc;

use crate::error::{CodeError, LinalgError};
use crate::field::{prime_power_decompose, Element, FieldTower, Level};
use crate::linalg::Matrix;
use crate::skew::power_function;

use super::inner::{bch_codimension, bch_parity_matrix, projective_mds, with_weight_r_first_row};
use super::{ConstructionInfo, Layout, LrcCode, LrcParams, Variant};

/// Places the blocks into
/// `[diag(A_1..A_g) 0; B_1 … B_g B_global]`, with zeros elsewhere.
pub fn assemble_parity_matrix(
    a_blocks: &[Matrix],
    b_blocks: &[Matrix],
    b_global: Option<&Matrix>,
) -> Result<Matrix, LinalgError> {
    let g = a_blocks.len();
    if g == 0 {
        return Err(LinalgError::DimensionMismatch("at least one local block is needed".into()));
    }
    let a = a_blocks[0].rows();
    let h = b_blocks.first().map_or_else(|| b_global.map_or(0, Matrix::rows), Matrix::rows);
    if !b_blocks.is_empty() && b_blocks.len() != g {
        return Err(LinalgError::DimensionMismatch(format!("{} B blocks for {g} groups", b_blocks.len())));
    }
    for (i, ab) in a_blocks.iter().enumerate() {
        if ab.rows() != a {
            return Err(LinalgError::DimensionMismatch(format!("A_{} has {} rows, expected {a}", i + 1, ab.rows())));
        }
        if let Some(bb) = b_blocks.get(i) {
            if bb.rows() != h || bb.cols() != ab.cols() {
                return Err(LinalgError::DimensionMismatch(format!(
                    "B_{} is {}x{}, expected {h}x{}",
                    i + 1,
                    bb.rows(),
                    bb.cols(),
                    ab.cols()
                )));
            }
        }
    }
    if let Some(bg) = b_global {
        if bg.rows() != h {
            return Err(LinalgError::DimensionMismatch(format!("B_global has {} rows, expected {h}", bg.rows())));
        }
    }
    let local_cols: usize = a_blocks.iter().map(Matrix::cols).sum();
    let n = local_cols + b_global.map_or(0, Matrix::cols);
    let mut out = Matrix::zeros(g * a + h, n, Level::Extension);
    let mut c0 = 0;
    for (i, ab) in a_blocks.iter().enumerate() {
        for r in 0..a {
            for c in 0..ab.cols() {
                out.set(i * a + r, c0 + c, ab.get(r, c));
            }
        }
        if let Some(bb) = b_blocks.get(i) {
            for r in 0..h {
                for c in 0..bb.cols() {
                    out.set(g * a + r, c0 + c, bb.get(r, c));
                }
            }
        }
        c0 += ab.cols();
    }
    if let Some(bg) = b_global {
        for r in 0..h {
            for c in 0..bg.cols() {
                out.set(g * a + r, c0 + c, bg.get(r, c));
            }
        }
    }
    Ok(out)
}

/// `h × len` band with entry `(j, i) = N_j(γ^ℓ)·σ^j(β_i)`.
fn band(tower: &FieldTower, class: u64, betas: &[Element], h: usize) -> Matrix {
    let rep = tower.gen_pow(class);
    let mut out = Matrix::zeros(h, betas.len(), Level::Extension);
    for j in 0..h {
        let nj = power_function(tower, j, rep);
        for (i, &b) in betas.iter().enumerate() {
            out.set(j, i, tower.mul(nj, tower.frobenius(b, j as u32)));
        }
    }
    out
}

/// Lifts each column of an `F_{q0}` matrix (top entry = first coordinate),
/// padding with zero coordinates up to `m`.
fn lift_columns(tower: &FieldTower, beta: &Matrix) -> Result<Vec<Element>, CodeError> {
    let m = tower.m() as usize;
    (0..beta.cols())
        .map(|c| {
            let mut coords = beta.column(c);
            coords.resize(m, Element::ZERO);
            Ok(tower.lift(&coords)?)
        })
        .collect()
}

fn unit_vector(tower: &FieldTower, i: usize) -> Result<Element, CodeError> {
    let mut coords = vec![Element::ZERO; tower.m() as usize];
    coords[i] = Element::ONE;
    Ok(tower.lift(&coords)?)
}

fn base_tower(q0: u32) -> Result<FieldTower, CodeError> {
    let (p, k) = prime_power_decompose(q0).ok_or_else(|| CodeError::BadParams(format!("q0={q0} is not a prime power")))?;
    Ok(FieldTower::new(p, k, 1)?)
}

fn tower(q0: u32, m: u32) -> Result<Arc<FieldTower>, CodeError> {
    let (p, k) = prime_power_decompose(q0).ok_or_else(|| CodeError::BadParams(format!("q0={q0} is not a prime power")))?;
    Ok(Arc::new(FieldTower::new(p, k, m.max(1))?))
}

/// Uses the requested `q0` after checking it against `bound`, or picks the
/// smallest prime power meeting it.
fn choose_q0(params: &LrcParams, bound: u32, bound_text: &str) -> Result<u32, CodeError> {
    let bound = bound.max(2);
    match params.q0 {
        Some(q0) => {
            if prime_power_decompose(q0).is_none() {
                return Err(CodeError::BadParams(format!("q0={q0} is not a prime power")));
            }
            if q0 < bound {
                return Err(CodeError::BadParams(format!("q0 must be ≥ {bound_text} = {bound} (got {q0})")));
            }
            Ok(q0)
        }
        None => {
            if bound > 1 << 24 {
                return Err(CodeError::NoSmallPrimePower(format!("q0 ≥ {bound_text} = {bound}")));
            }
            Ok(crate::field::smallest_prime_power_at_least(bound))
        }
    }
}

fn checked_pow(q0: u32, e: u32) -> u64 {
    (q0 as u64).saturating_pow(e)
}

/// Group count after validating `n`, `r`, `a`, `h_local` and the layout.
fn validate(params: &LrcParams) -> Result<usize, CodeError> {
    let LrcParams { n, r, h, a, .. } = *params;
    if r == 0 {
        return Err(CodeError::BadParams("r must be positive".into()));
    }
    if a >= r {
        return Err(CodeError::BadParams(format!("a must be < r (got a={a}, r={r})")));
    }
    if let Some(hl) = params.h_local {
        if hl > h {
            return Err(CodeError::BadParams(format!("h_local={hl} exceeds h={h}")));
        }
    }
    if params.variant.global_outside() {
        if params.h_local.is_some_and(|hl| hl != h) {
            return Err(CodeError::BadParams("h_local is only supported by the main and bch_a1 variants".into()));
        }
        if n < h || (n - h) % r != 0 || n == h {
            return Err(CodeError::BadParams(format!("n={n} must equal g·r + h with g ≥ 1 (r={r}, h={h})")));
        }
        if h > r - a {
            return Err(CodeError::PreconditionViolated(format!("h ≤ r − a is required (h={h}, r={r}, a={a})")));
        }
    } else if n == 0 || n % r != 0 {
        return Err(CodeError::BadParams(format!("r={r} must divide n={n} (n > 0)")));
    }
    let g = params.g();
    if let Some(hl) = params.h_local {
        if g * hl < h {
            return Err(CodeError::BadParams(format!(
                "no erasure pattern fits: g·h_local = {} is below h = {h}",
                g * hl
            )));
        }
    }
    Ok(g)
}

fn require_a1(params: &LrcParams) -> Result<(), CodeError> {
    if params.a != 1 {
        return Err(CodeError::BadParams(format!("variant {} requires a = 1 (got a={})", params.variant, params.a)));
    }
    Ok(())
}

/// Builds the code described by `params`, dispatching on its variant.
pub fn construct(params: &LrcParams) -> Result<LrcCode, CodeError> {
    match params.variant {
        Variant::Main => construct_main(params),
        Variant::MainImproved => construct_main_improved(params),
        Variant::BchA1 => construct_a1_bch(params),
        Variant::GlobalOutsideCase1 | Variant::GlobalOutsideCase2 => construct_global_outside(params),
        Variant::GlobalOutsideA1Case1 | Variant::GlobalOutsideA1Case2 => construct_global_outside_a1(params),
    }
}

fn finish(
    params: &LrcParams,
    tower: Arc<FieldTower>,
    a_blocks: Vec<Matrix>,
    b_blocks: Vec<Matrix>,
    b_global: Option<Matrix>,
    info: ConstructionInfo,
) -> Result<LrcCode, CodeError> {
    let h = assemble_parity_matrix(&a_blocks, &b_blocks, b_global.as_ref())?;
    let layout = Layout::new(a_blocks.len(), params.r, params.a, params.h, params.variant.global_outside());
    let code = LrcCode::from_parts(params.clone(), tower, h, layout, info);
    code.information_positions()?;
    Ok(code)
}

/// Vandermonde local checks `A = [α_i^j]` over the first `r` elements of
/// `F_{q0}`, and `β_i = (α_i^a, …, α_i^{a+m-1})` lifted into `F_{q0^m}`.
pub fn construct_main(params: &LrcParams) -> Result<LrcCode, CodeError> {
    let g = validate(params)?;
    let (r, a, h) = (params.r, params.a, params.h);
    let q0 = choose_q0(params, (g as u32 + 1).max(r as u32), "max{g+1, r}")?;
    let m_formula = params.effective_h_local().min(r - a) as u32;
    let t = tower(q0, m_formula)?;
    let m = t.m() as usize;
    let alphas: Vec<Element> = (0..r as u32).map(Element::from_int).collect();

    let a_block = Matrix::new(
        a,
        r,
        Level::Base,
        (0..a).flat_map(|i| alphas.iter().map(move |&x| (x, i))).map(|(x, i)| t.pow(x, i as u64)).collect(),
    )?;
    let betas: Vec<Element> = alphas
        .iter()
        .map(|&x| t.lift(&(0..m).map(|j| t.pow(x, (a + j) as u64)).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()?;
    let b_blocks = (1..=g).map(|l| band(&t, l as u64, &betas, h)).collect();
    let info = ConstructionInfo {
        q0,
        m: t.m(),
        formula_field_size: checked_pow(q0, m_formula.max(1)),
        formula: "q0^min{h, r-a}".into(),
        inner_codimension: None,
    };
    finish(params, t, vec![a_block; g], b_blocks, None, info)
}

/// Local checks with first column `e_1` and descending powers
/// `α_i^{m+a-1}, …, α_i^m` elsewhere; `β_1 = 0` and
/// `β_i = (α_i^{m-1}, …, α_i, 1)`. The `α_2, …, α_r` are taken from the
/// nonzero elements of `F_{q0}` first, then `0`.
pub fn construct_main_improved(params: &LrcParams) -> Result<LrcCode, CodeError> {
    let g = validate(params)?;
    let (r, a, h) = (params.r, params.a, params.h);
    let q0 = choose_q0(params, (g as u32 + 1).max(r as u32 - 1), "max{g+1, r-1}")?;
    let m_formula = params.effective_h_local().min(r - a) as u32;
    let t = tower(q0, m_formula)?;
    let m = t.m() as usize;
    let alphas: Vec<Element> = (1..q0).chain(std::iter::once(0)).take(r - 1).map(Element::from_int).collect();

    let mut a_block = Matrix::zeros(a, r, Level::Base);
    for i in 0..a {
        a_block.set(i, 0, if i == 0 { Element::ONE } else { Element::ZERO });
        for (j, &x) in alphas.iter().enumerate() {
            a_block.set(i, j + 1, t.pow(x, (m + a - 1 - i) as u64));
        }
    }
    let first = if a == 0 { unit_vector(&t, 0)? } else { Element::ZERO };
    let mut betas = vec![first];
    for &x in &alphas {
        let coords: Vec<Element> = (0..m).map(|j| t.pow(x, (m - 1 - j) as u64)).collect();
        betas.push(t.lift(&coords)?);
    }
    let b_blocks = (1..=g).map(|l| band(&t, l as u64, &betas, h)).collect();
    let info = ConstructionInfo {
        q0,
        m: t.m(),
        formula_field_size: checked_pow(q0, m_formula.max(1)),
        formula: "q0^min{h, r-a}".into(),
        inner_codimension: None,
    };
    finish(params, t, vec![a_block; g], b_blocks, None, info)
}

/// `a = 1`: all-ones local checks, `β_i` taken from the columns of a BCH
/// parity-check matrix of distance `min{h, r-1} + 2` without its all-ones
/// row, over `F_{q0^{s-1}}`.
pub fn construct_a1_bch(params: &LrcParams) -> Result<LrcCode, CodeError> {
    let g = validate(params)?;
    require_a1(params)?;
    let (r, h) = (params.r, params.h);
    let q0 = choose_q0(params, g as u32 + 1, "g+1")?;
    let d = params.effective_h_local().min(r - 1) + 2;
    let hin = bch_parity_matrix(r, d, q0)?;
    let s = hin.rows();
    let t = tower(q0, s as u32 - 1)?;
    let tilde = hin.block(1, s, 0, r);
    let betas = lift_columns(&t, &tilde)?;
    let a_block = Matrix::new(1, r, Level::Base, vec![Element::ONE; r])?;
    let b_blocks = (1..=g).map(|l| band(&t, l as u64, &betas, h)).collect();
    let info = ConstructionInfo {
        q0,
        m: t.m(),
        formula_field_size: checked_pow(q0, (bch_codimension(r, d, q0) as u32 - 1).max(1)),
        formula: "q0^(s-1)".into(),
        inner_codimension: Some(s),
    };
    finish(params, t, vec![a_block; g], b_blocks, None, info)
}

fn ceil_div(x: usize, y: usize) -> usize {
    x.div_ceil(y)
}

/// Global parities outside the groups, over `F_{q0^h}`.
///
/// Case 1 takes `A` and `β` from an `(a+h) × r` MDS matrix and gives
/// `B_global` its own conjugacy class `g+1` with `β̃_i = e_i`. Case 2 uses an
/// `(a+h) × (r+t)` MDS matrix with a zero top-right block, folds its `t`
/// extra columns into each group's class and appends the raw column `e_h`;
/// the first `h` of these columns form `B_global`.
pub fn construct_global_outside(params: &LrcParams) -> Result<LrcCode, CodeError> {
    let g = validate(params)?;
    let (r, a, h) = (params.r, params.a, params.h);
    let case2 = match params.variant {
        Variant::GlobalOutsideCase1 => false,
        Variant::GlobalOutsideCase2 => true,
        v => return Err(CodeError::BadParams(format!("{v} is not a global-outside variant"))),
    };
    let t_extra = if case2 { ceil_div(h.saturating_sub(1), g) } else { 0 };
    let first = if case2 {
        choose_q0(params, (g as u32 + 1).max((r + t_extra) as u32 - 1), "max{g+1, r+⌈(h-1)/g⌉-1}")?
    } else {
        choose_q0(params, (g as u32 + 2).max(r as u32 - 1), "max{g+2, r-1}")?
    };
    // At the bound the MDS matrix can be unrealisable (h = 1 with all q0 + 1
    // projective points in use); automatic selection then moves up.
    let mut q0 = first;
    let h0 = loop {
        match projective_mds(&base_tower(q0)?, a, h, r, t_extra) {
            Ok(m) => break m,
            Err(e) if params.q0.is_some() || q0 > 2 * first => return Err(e),
            Err(_) => q0 = crate::field::smallest_prime_power_at_least(q0 + 1),
        }
    };
    let t = tower(q0, h as u32)?;
    let a_block = h0.block(0, a, 0, r);
    let betas = lift_columns(&t, &h0.block(a, a + h, 0, r))?;
    let b_blocks: Vec<Matrix> = (1..=g).map(|l| band(&t, l as u64, &betas, h)).collect();

    let b_global = if case2 {
        let tildes = lift_columns(&t, &h0.block(a, a + h, r, r + t_extra))?;
        global_from_folded(&t, g, &tildes, h)
    } else {
        let tildes: Vec<Element> = (0..h).map(|i| unit_vector(&t, i)).collect::<Result<_, _>>()?;
        band(&t, g as u64 + 1, &tildes, h)
    };
    let info = ConstructionInfo {
        q0,
        m: t.m(),
        formula_field_size: checked_pow(q0, (h as u32).max(1)),
        formula: "q0^h".into(),
        inner_codimension: None,
    };
    finish(params, t, vec![a_block; g], b_blocks, Some(b_global), info)
}

/// `[B^1_global | … | B^g_global | e_h]` truncated to its first `h` columns.
fn global_from_folded(t: &FieldTower, g: usize, tildes: &[Element], h: usize) -> Matrix {
    let mut cols: Vec<Vec<Element>> = Vec::new();
    for l in 1..=g {
        let blk = band(t, l as u64, tildes, h);
        cols.extend((0..blk.cols()).map(|c| blk.column(c)));
    }
    if h > 0 {
        let mut e = vec![Element::ZERO; h];
        e[h - 1] = Element::ONE;
        cols.push(e);
    }
    let mut out = Matrix::zeros(h, h, Level::Extension);
    for (c, col) in cols.into_iter().take(h).enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

/// Global parities outside the groups with `a = 1`, over `F_{q0^{c-1}}`
/// where `c` is the codimension of a distance-`(h+2)` BCH inner code.
///
/// Case 1 uses the inner code of length `r` and the extra class `g+1`.
/// Case 2 uses length `r + t`, rewrites the parity-check matrix so its first
/// row is `r` ones followed by `t` zeros, and folds the tail columns into the
/// group classes.
pub fn construct_global_outside_a1(params: &LrcParams) -> Result<LrcCode, CodeError> {
    let g = validate(params)?;
    require_a1(params)?;
    let (r, h) = (params.r, params.h);
    let case2 = match params.variant {
        Variant::GlobalOutsideA1Case1 => false,
        Variant::GlobalOutsideA1Case2 => true,
        v => return Err(CodeError::BadParams(format!("{v} is not an a = 1 global-outside variant"))),
    };
    let t_extra = if case2 { ceil_div(h.saturating_sub(1), g) } else { 0 };
    let q0 = if case2 {
        choose_q0(params, g as u32 + 1, "g+1")?
    } else {
        choose_q0(params, g as u32 + 2, "g+2")?
    };
    let n0 = r + t_extra;
    let base = base_tower(q0)?;
    let h0 = if case2 {
        let raw = bch_parity_matrix(n0, h + 2, q0)?;
        with_weight_r_first_row(&base, &raw, r).ok_or_else(|| {
            CodeError::NoInnerCode(format!(
                "the BCH [{n0}, d ≥ {}] code over F_{q0} has no dual codeword of weight exactly {r}",
                h + 2
            ))
        })?
    } else {
        bch_parity_matrix(r, h + 2, q0)?
    };
    let c = h0.rows();
    if c < h + 1 {
        return Err(CodeError::NoInnerCode(format!("inner codimension {c} is below h + 1 = {}", h + 1)));
    }
    let t = tower(q0, c as u32 - 1)?;
    let betas = lift_columns(&t, &h0.block(1, c, 0, r))?;
    let a_block = Matrix::new(1, r, Level::Base, vec![Element::ONE; r])?;
    let b_blocks: Vec<Matrix> = (1..=g).map(|l| band(&t, l as u64, &betas, h)).collect();
    let b_global = if case2 {
        let tildes = lift_columns(&t, &h0.block(1, c, r, n0))?;
        global_from_folded(&t, g, &tildes, h)
    } else {
        let tildes: Vec<Element> = (0..h).map(|i| unit_vector(&t, i)).collect::<Result<_, _>>()?;
        band(&t, g as u64 + 1, &tildes, h)
    };
    let info = ConstructionInfo {
        q0,
        m: t.m(),
        formula_field_size: checked_pow(q0, (c as u32 - 1).max(1)),
        formula: "q0^(c-1)".into(),
        inner_codimension: Some(c),
    };
    finish(params, t, vec![a_block; g], b_blocks, Some(b_global), info)
}
