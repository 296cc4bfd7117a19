//! Dense matrices over either level of a [`FieldTower`], with exact Gaussian
//! elimination.
//!
//! Elimination always pivots on the first nonzero entry in column order, so
//! echelon forms and nullspace bases are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::LinalgError;
use crate::field::{Element, FieldTower, Level};
use crate::skew::power_function;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    level: Level,
    entries: Vec<Element>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, level: Level, entries: Vec<Element>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, level, entries })
    }

    pub fn zeros(rows: usize, cols: usize, level: Level) -> Self {
        Matrix { rows, cols, level, entries: vec![Element::ZERO; rows * cols] }
    }

    pub fn identity(n: usize, level: Level) -> Self {
        let mut m = Self::zeros(n, n, level);
        for i in 0..n {
            m.set(i, i, Element::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Element>>, level: Level) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, level, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Element {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Element) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Element] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Element> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.level);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Submatrix formed by the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            out.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        Matrix { rows: self.rows, cols: cols.len(), level: self.level, entries: out }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let entries = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Matrix { rows: rows.len(), cols: self.cols, level: self.level, entries }
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut entries = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for r in r0..r1 {
            entries.extend_from_slice(&self.row(r)[c0..c1]);
        }
        Matrix { rows: r1 - r0, cols: c1 - c0, level: self.level, entries }
    }

    pub fn mul(&self, tower: &FieldTower, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let level = if self.level == Level::Base && other.level == Level::Base {
            Level::Base
        } else {
            Level::Extension
        };
        let mut out = Matrix::zeros(self.rows, other.cols, level);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = tower.add(out.get(i, j), tower.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, tower: &FieldTower, v: &[Element]) -> Result<Vec<Element>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Element::ZERO, |acc, (&a, &b)| tower.add(acc, tower.mul(a, b)))
            })
            .collect())
    }

    /// Reduced row echelon form.
    pub fn rref(&self, tower: &FieldTower) -> Echelon {
        let mut m = self.clone();
        let pivots = eliminate(tower, &mut m.entries, m.rows, m.cols, true);
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self, tower: &FieldTower) -> usize {
        let mut e = self.entries.clone();
        eliminate(tower, &mut e, self.rows, self.cols, false).len()
    }

    /// Whether the columns are linearly independent.
    pub fn has_full_column_rank(&self, tower: &FieldTower) -> bool {
        self.cols <= self.rows && self.rank(tower) == self.cols
    }

    /// Basis of `{x : M x = 0}`, one vector per free column of the RREF.
    pub fn nullspace(&self, tower: &FieldTower) -> Vec<Vec<Element>> {
        let Echelon { matrix: r, pivots } = self.rref(tower);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Element::ZERO; self.cols];
                v[f] = Element::ONE;
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = tower.neg(r.get(i, f));
                }
                v
            })
            .collect()
    }

    /// Some `x` with `M x = b`; the free variables are set to zero.
    pub fn solve(&self, tower: &FieldTower, b: &[Element]) -> Result<Vec<Element>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        // eliminate on the augmented matrix [M | b]
        let w = self.cols + 1;
        let mut aug = Vec::with_capacity(self.rows * w);
        for r in 0..self.rows {
            aug.extend_from_slice(self.row(r));
            aug.push(b[r]);
        }
        let pivots = eliminate(tower, &mut aug, self.rows, w, true);
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::NoSolution);
        }
        let mut x = vec![Element::ZERO; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug[i * w + self.cols];
        }
        Ok(x)
    }

    /// Replaces each extension entry by its `m` base coordinates stacked
    /// vertically, giving an `(m·rows) × cols` base-level matrix. Row
    /// `i·m + j` holds coordinate `j` of row `i`.
    pub fn flatten(&self, tower: &FieldTower) -> Matrix {
        let m = tower.m() as usize;
        let mut out = Matrix::zeros(self.rows * m, self.cols, Level::Base);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (j, v) in tower.flatten(self.get(r, c)).into_iter().enumerate() {
                    out.set(r * m + j, c, v);
                }
            }
        }
        out
    }

    /// Rank over `F_{q0}` of an extension-level matrix, via [`flatten`](Self::flatten).
    pub fn base_rank(&self, tower: &FieldTower) -> usize {
        self.flatten(tower).rank(tower)
    }

    pub fn to_json_value(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            level: self.level,
            entries: self.entries.iter().map(|e| e.to_int()).collect(),
        }
    }

    pub fn from_json_value(j: &MatrixJson, tower: &FieldTower) -> Result<Matrix, LinalgError> {
        let limit = match j.level {
            Level::Base => tower.q0(),
            Level::Extension => tower.q(),
        };
        let entries = j
            .entries
            .iter()
            .map(|&v| {
                if v < limit {
                    Ok(Element::from_int(v))
                } else {
                    Err(LinalgError::Field(crate::FieldError::OutOfRange { value: v, q: limit }))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::new(j.rows, j.cols, j.level, entries)
    }
}

/// JSON form: `{"rows", "cols", "level", "entries": [int, …]}` with entries
/// row-major in the tower's integer encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub level: Level,
    pub entries: Vec<u32>,
}

/// In-place Gaussian elimination on a row-major buffer; returns the pivot
/// columns. With `reduce`, clears above pivots and normalises them to 1.
pub(crate) fn eliminate(
    tower: &FieldTower,
    a: &mut [Element],
    rows: usize,
    cols: usize,
    reduce: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(src) = (pr..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if src != pr {
            for j in c..cols {
                a.swap(src * cols + j, pr * cols + j);
            }
        }
        let inv = tower.inv(a[pr * cols + c]).expect("pivot is nonzero");
        if reduce {
            for j in c..cols {
                a[pr * cols + j] = tower.mul(a[pr * cols + j], inv);
            }
        }
        let start = if reduce { 0 } else { pr + 1 };
        for r in start..rows {
            if r == pr {
                continue;
            }
            let f = a[r * cols + c];
            if f.is_zero() {
                continue;
            }
            let f = if reduce { f } else { tower.mul(f, inv) };
            for j in c..cols {
                let v = a[pr * cols + j];
                if !v.is_zero() {
                    a[r * cols + j] = tower.sub(a[r * cols + j], tower.mul(f, v));
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    pivots
}

/// `d × n` skew Vandermonde matrix with `(i, j)` entry `N_i(points[j])`.
pub fn skew_vandermonde(tower: &FieldTower, d: usize, points: &[Element]) -> Matrix {
    let mut m = Matrix::zeros(d, points.len(), Level::Extension);
    for (j, &a) in points.iter().enumerate() {
        let mut n = Element::ONE;
        for i in 0..d {
            if i > 0 {
                n = tower.mul(tower.frobenius(n, 1), a);
            }
            m.set(i, j, n);
        }
    }
    debug_assert!(points.is_empty() || d == 0 || m.get(d - 1, 0) == power_function(tower, d - 1, points[0]));
    m
}

/// `n × n` Moore matrix with `(i, j)` entry `σ^i(points[j])`.
pub fn moore_matrix(tower: &FieldTower, points: &[Element]) -> Matrix {
    let n = points.len();
    let mut m = Matrix::zeros(n, n, Level::Extension);
    for (j, &c) in points.iter().enumerate() {
        for i in 0..n {
            m.set(i, j, tower.frobenius(c, i as u32));
        }
    }
    m
}
