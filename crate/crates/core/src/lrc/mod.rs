//! Local reconstruction codes: parameters, group layout, parity-check
//! matrices and encoding.
//!
//! A code with `g` local groups of size `r` has the parity-check matrix
//!
//! ```text
//! [ A_1  0   …  0   | 0        ]
//! [ 0    A_2 …  0   | 0        ]
//! [ …               |          ]
//! [ 0    0   …  A_g | 0        ]
//! [ B_1  B_2 …  B_g | B_global ]
//! ```
//!
//! where the `B_global` column block exists only for the global-outside
//! variants.

mod construct;
pub mod inner;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::field::{Element, FieldTower};
use crate::linalg::{Echelon, Matrix, MatrixJson};
use crate::FORMAT_VERSION;

pub use construct::{
    assemble_parity_matrix, construct, construct_a1_bch, construct_global_outside,
    construct_global_outside_a1, construct_main, construct_main_improved,
};
pub use inner::{bch_codimension, bch_parity_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Main,
    MainImproved,
    BchA1,
    GlobalOutsideCase1,
    GlobalOutsideCase2,
    GlobalOutsideA1Case1,
    GlobalOutsideA1Case2,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Main,
        Variant::MainImproved,
        Variant::BchA1,
        Variant::GlobalOutsideCase1,
        Variant::GlobalOutsideCase2,
        Variant::GlobalOutsideA1Case1,
        Variant::GlobalOutsideA1Case2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Main => "main",
            Variant::MainImproved => "main_improved",
            Variant::BchA1 => "bch_a1",
            Variant::GlobalOutsideCase1 => "global_outside_case1",
            Variant::GlobalOutsideCase2 => "global_outside_case2",
            Variant::GlobalOutsideA1Case1 => "global_outside_a1_case1",
            Variant::GlobalOutsideA1Case2 => "global_outside_a1_case2",
        }
    }

    /// Whether the global parities sit in their own column block.
    pub fn global_outside(self) -> bool {
        matches!(
            self,
            Variant::GlobalOutsideCase1
                | Variant::GlobalOutsideCase2
                | Variant::GlobalOutsideA1Case1
                | Variant::GlobalOutsideA1Case2
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| CodeError::BadParams(format!("unknown variant {s:?}")))
    }
}

/// Requested code parameters. `n` is the full code length; for the
/// global-outside variants it includes the `h` global parity columns, so
/// `n = g·r + h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrcParams {
    pub n: usize,
    pub r: usize,
    pub h: usize,
    pub a: usize,
    pub h_local: Option<usize>,
    pub variant: Variant,
    /// Base field size; chosen automatically when absent.
    pub q0: Option<u32>,
}

impl LrcParams {
    pub fn new(n: usize, r: usize, h: usize, a: usize, variant: Variant) -> Self {
        LrcParams { n, r, h, a, h_local: None, variant, q0: None }
    }

    pub fn with_q0(mut self, q0: u32) -> Self {
        self.q0 = Some(q0);
        self
    }

    pub fn with_h_local(mut self, h_local: usize) -> Self {
        self.h_local = Some(h_local);
        self
    }

    /// Number of local groups.
    pub fn g(&self) -> usize {
        if self.r == 0 {
            return 0;
        }
        if self.variant.global_outside() {
            self.n.saturating_sub(self.h) / self.r
        } else {
            self.n / self.r
        }
    }

    pub fn effective_h_local(&self) -> usize {
        self.h_local.unwrap_or(self.h)
    }
}

/// Column ranges of the local groups and of the optional global block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub groups: Vec<(usize, usize)>,
    pub global_cols: Option<(usize, usize)>,
    /// Local parities per group.
    pub a: usize,
    /// Global parities.
    pub h: usize,
}

impl Layout {
    pub fn new(g: usize, r: usize, a: usize, h: usize, global_outside: bool) -> Self {
        let groups = (0..g).map(|i| (i * r, (i + 1) * r)).collect();
        let global_cols = global_outside.then_some((g * r, g * r + h));
        Layout { groups, global_cols, a, h }
    }

    pub fn g(&self) -> usize {
        self.groups.len()
    }

    pub fn n(&self) -> usize {
        match self.global_cols {
            Some((_, e)) => e,
            None => self.groups.last().map_or(0, |&(_, e)| e),
        }
    }

    /// Number of parity-check rows, `g·a + h`.
    pub fn checks(&self) -> usize {
        self.g() * self.a + self.h
    }

    /// Group containing a column, or `None` for global-parity columns.
    pub fn group_of(&self, col: usize) -> Option<usize> {
        self.groups.iter().position(|&(s, e)| (s..e).contains(&col))
    }

    pub fn group_size(&self, i: usize) -> usize {
        let (s, e) = self.groups[i];
        e - s
    }

    pub fn local_rows(&self, i: usize) -> std::ops::Range<usize> {
        i * self.a..(i + 1) * self.a
    }

    pub fn global_rows(&self) -> std::ops::Range<usize> {
        let s = self.g() * self.a;
        s..s + self.h
    }
}

/// Facts about how a code was built, reported next to the code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionInfo {
    pub q0: u32,
    pub m: u32,
    /// Field size predicted by the construction's closed form.
    pub formula_field_size: u64,
    pub formula: String,
    /// Codimension of the inner code, for the BCH-based variants.
    pub inner_codimension: Option<usize>,
}

/// A constructed code: parity-check matrix plus group layout.
#[derive(Clone, Debug)]
pub struct LrcCode {
    params: LrcParams,
    tower: Arc<FieldTower>,
    h: Matrix,
    layout: Layout,
    info: ConstructionInfo,
    echelon: OnceLock<Echelon>,
}

impl PartialEq for LrcCode {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && *self.tower == *other.tower
            && self.h == other.h
            && self.layout == other.layout
            && self.info == other.info
    }
}

impl LrcCode {
    pub(crate) fn from_parts(
        params: LrcParams,
        tower: Arc<FieldTower>,
        h: Matrix,
        layout: Layout,
        info: ConstructionInfo,
    ) -> Self {
        LrcCode { params, tower, h, layout, info, echelon: OnceLock::new() }
    }

    pub fn params(&self) -> &LrcParams {
        &self.params
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.h
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn info(&self) -> &ConstructionInfo {
        &self.info
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    /// Message length `n - g·a - h`.
    pub fn dimension(&self) -> usize {
        self.n() - self.layout.checks()
    }

    /// The `a × r` local parity-check block of group `i`.
    pub fn local_block(&self, i: usize) -> Matrix {
        let (s, e) = self.layout.groups[i];
        let rows = self.layout.local_rows(i);
        self.h.block(rows.start, rows.end, s, e)
    }

    /// The `h × r` global band restricted to group `i`.
    pub fn band_block(&self, i: usize) -> Matrix {
        let (s, e) = self.layout.groups[i];
        let rows = self.layout.global_rows();
        self.h.block(rows.start, rows.end, s, e)
    }

    /// The `h × h` block over the global-parity columns, if any.
    pub fn global_block(&self) -> Option<Matrix> {
        let (s, e) = self.layout.global_cols?;
        let rows = self.layout.global_rows();
        Some(self.h.block(rows.start, rows.end, s, e))
    }

    /// Returns a copy of the code with one parity-check entry replaced.
    /// Used to build negative controls.
    pub fn with_entry(&self, row: usize, col: usize, value: Element) -> LrcCode {
        let mut h = self.h.clone();
        h.set(row, col, value);
        LrcCode::from_parts(self.params.clone(), self.tower.clone(), h, self.layout.clone(), self.info.clone())
    }

    fn echelon(&self) -> &Echelon {
        self.echelon.get_or_init(|| self.h.rref(&self.tower))
    }

    /// Information positions of the systematic encoder: the non-pivot
    /// columns of the reduced row echelon form of `H`.
    pub fn information_positions(&self) -> Result<Vec<usize>, CodeError> {
        let e = self.echelon();
        if e.pivots.len() != self.h.rows() {
            return Err(CodeError::RankDeficientH);
        }
        Ok((0..self.n()).filter(|c| !e.pivots.contains(c)).collect())
    }

    /// Systematic encoding: message symbols are placed on the information
    /// positions and the pivot positions are solved from `H·c = 0`.
    pub fn encode(&self, message: &[Element]) -> Result<Vec<Element>, CodeError> {
        let info = self.information_positions()?;
        if message.len() != info.len() {
            return Err(CodeError::MessageLength { expected: info.len(), got: message.len() });
        }
        let t = &self.tower;
        let e = self.echelon();
        let mut c = vec![Element::ZERO; self.n()];
        for (&pos, &v) in info.iter().zip(message) {
            c[pos] = v;
        }
        for (i, &p) in e.pivots.iter().enumerate() {
            let s = info
                .iter()
                .zip(message)
                .fold(Element::ZERO, |acc, (&f, &v)| t.add(acc, t.mul(e.matrix.get(i, f), v)));
            c[p] = t.neg(s);
        }
        Ok(c)
    }

    /// `H·c`.
    pub fn syndrome(&self, word: &[Element]) -> Result<Vec<Element>, CodeError> {
        Ok(self.h.mul_vec(&self.tower, word)?)
    }

    pub fn is_codeword(&self, word: &[Element]) -> bool {
        self.syndrome(word).is_ok_and(|s| s.iter().all(|e| e.is_zero()))
    }

    pub fn to_bundle(&self) -> CodeBundle {
        CodeBundle {
            format_version: FORMAT_VERSION,
            params: self.params.clone(),
            construction: self.info.clone(),
            tower: self.tower.to_json_value(),
            h: self.h.to_json_value(),
            layout: LayoutJson {
                groups: self.layout.groups.iter().map(|&(s, e)| [s, e]).collect(),
                global_cols: self.layout.global_cols.map(|(s, e)| [s, e]),
                a: self.layout.a,
                h: self.layout.h,
            },
        }
    }

    pub fn from_bundle(b: &CodeBundle) -> Result<Self, CodeError> {
        if b.format_version != FORMAT_VERSION {
            return Err(CodeError::BadParams(format!("unsupported format_version {}", b.format_version)));
        }
        let tower = Arc::new(FieldTower::from_json_value(&b.tower)?);
        let h = Matrix::from_json_value(&b.h, &tower)?;
        let layout = Layout {
            groups: b.layout.groups.iter().map(|&[s, e]| (s, e)).collect(),
            global_cols: b.layout.global_cols.map(|[s, e]| (s, e)),
            a: b.layout.a,
            h: b.layout.h,
        };
        let mut expected_start = 0;
        for &(s, e) in layout.groups.iter().chain(layout.global_cols.iter()) {
            if s != expected_start || e < s {
                return Err(CodeError::BadParams("layout ranges must be contiguous".into()));
            }
            expected_start = e;
        }
        if h.rows() != layout.checks() || h.cols() != layout.n() {
            return Err(CodeError::BadParams(format!(
                "H is {}x{} but the layout needs {}x{}",
                h.rows(),
                h.cols(),
                layout.checks(),
                layout.n()
            )));
        }
        Ok(LrcCode::from_parts(b.params.clone(), tower, h, layout, b.construction.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_bundle()).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CodeError> {
        let b: CodeBundle =
            serde_json::from_str(s).map_err(|e| CodeError::BadParams(format!("invalid code JSON: {e}")))?;
        Self::from_bundle(&b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutJson {
    pub groups: Vec<[usize; 2]>,
    pub global_cols: Option<[usize; 2]>,
    pub a: usize,
    pub h: usize,
}

/// On-disk code bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBundle {
    pub format_version: u32,
    pub params: LrcParams,
    pub construction: ConstructionInfo,
    pub tower: crate::field::TowerJson,
    #[serde(rename = "H")]
    pub h: MatrixJson,
    pub layout: LayoutJson,
}
