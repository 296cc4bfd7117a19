//! Maximum sum-rank distance codes: the generator
//! `M = [M_0 | … | M_{q0-2}]` whose block `M_ℓ` has `(j, i)` entry
//! `N_j(γ^ℓ)·σ^j(β_i)`, for an `F_{q0}`-basis `β_1, …, β_m` of `F_{q0^m}`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CodeError, FieldError};
use crate::field::{prime_power_decompose, Element, FieldTower, TowerJson};
use crate::linalg::{Matrix, MatrixJson};
use crate::skew::power_function;
use crate::FORMAT_VERSION;

/// Brute-force enumeration limit on `q^k`.
pub const BRUTE_FORCE_BUDGET: u64 = 1_000_000;

/// Consecutive, disjoint column ranges covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumRankPartition {
    parts: Vec<(usize, usize)>,
}

impl SumRankPartition {
    pub fn new(parts: Vec<(usize, usize)>) -> Result<Self, CodeError> {
        let mut next = 0;
        for &(s, e) in &parts {
            if s != next || e <= s {
                return Err(CodeError::BadParams(format!("partition part [{s}, {e}) does not continue at {next}")));
            }
            next = e;
        }
        Ok(SumRankPartition { parts })
    }

    /// `count` consecutive blocks of `size` columns.
    pub fn blocks(count: usize, size: usize) -> Self {
        SumRankPartition { parts: (0..count).map(|i| (i * size, (i + 1) * size)).collect() }
    }

    /// One part per coordinate, giving the Hamming metric.
    pub fn singletons(n: usize) -> Self {
        Self::blocks(n, 1)
    }

    pub fn parts(&self) -> &[(usize, usize)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.last().map_or(0, |&(_, e)| e)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// `F_{q0}`-rank of the `m × len` matrix of coordinates of `v`.
pub fn rank_over_base(tower: &FieldTower, v: &[Element]) -> usize {
    if v.is_empty() {
        return 0;
    }
    Matrix::from_rows(vec![v.to_vec()], crate::field::Level::Extension)
        .expect("single row")
        .base_rank(tower)
}

/// Sum over the parts of the `F_{q0}`-rank of each part.
pub fn sum_rank_weight(tower: &FieldTower, v: &[Element], partition: &SumRankPartition) -> Result<usize, FieldError> {
    if v.len() != partition.len() {
        return Err(FieldError::LengthMismatch { expected: partition.len(), got: v.len() });
    }
    Ok(partition.parts.iter().map(|&(s, e)| rank_over_base(tower, &v[s..e])).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MsrdCode {
    tower: Arc<FieldTower>,
    k: usize,
    generator: Matrix,
    partition: SumRankPartition,
}

impl MsrdCode {
    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn partition(&self) -> &SumRankPartition {
        &self.partition
    }

    /// `λ·M`.
    pub fn encode(&self, message: &[Element]) -> Result<Vec<Element>, CodeError> {
        if message.len() != self.k {
            return Err(CodeError::MessageLength { expected: self.k, got: message.len() });
        }
        Ok(self.generator.transpose().mul_vec(&self.tower, message)?)
    }

    pub fn to_json_value(&self) -> MsrdJson {
        MsrdJson {
            format_version: FORMAT_VERSION,
            q0: self.tower.q0(),
            m: self.tower.m(),
            k: self.k,
            n: self.n(),
            tower: self.tower.to_json_value(),
            generator: self.generator.to_json_value(),
            partition: self.partition.parts.iter().map(|&(s, e)| [s, e]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsrdJson {
    pub format_version: u32,
    pub q0: u32,
    pub m: u32,
    pub k: usize,
    pub n: usize,
    pub tower: TowerJson,
    pub generator: MatrixJson,
    pub partition: Vec<[usize; 2]>,
}

/// Builds the `k × (q0-1)·m` generator with `β` the power basis of the
/// extension modulus, partitioned into the `m`-column blocks.
pub fn construct_msrd(q0: u32, m: u32, k: usize) -> Result<MsrdCode, CodeError> {
    let (p, e) = prime_power_decompose(q0).ok_or_else(|| CodeError::BadParams(format!("q0={q0} is not a prime power")))?;
    if m == 0 {
        return Err(CodeError::BadParams("m must be positive".into()));
    }
    let tower = Arc::new(FieldTower::new(p, e, m)?);
    let mu = m as usize;
    let blocks = q0 as usize - 1;
    let n = blocks * mu;
    if k == 0 || k > n {
        return Err(CodeError::BadParams(format!("k must satisfy 1 ≤ k ≤ n = {n} (got {k})")));
    }
    let betas: Vec<Element> = (0..mu)
        .map(|i| {
            let mut coords = vec![Element::ZERO; mu];
            coords[i] = Element::ONE;
            tower.lift(&coords)
        })
        .collect::<Result<_, _>>()?;
    let mut generator = Matrix::zeros(k, n, crate::field::Level::Extension);
    for l in 0..blocks {
        let rep = tower.gen_pow(l as u64);
        for j in 0..k {
            let nj = power_function(&tower, j, rep);
            for (i, &b) in betas.iter().enumerate() {
                generator.set(j, l * mu + i, tower.mul(nj, tower.frobenius(b, j as u32)));
            }
        }
    }
    Ok(MsrdCode { tower, k, generator, partition: SumRankPartition::blocks(blocks, mu) })
}

/// Minimum sum-rank weight over all nonzero codewords, by enumerating every
/// message.
pub fn min_sum_rank_bruteforce(code: &MsrdCode) -> Result<usize, CodeError> {
    let q = code.tower.q() as u64;
    let count = (q as u128).pow(code.k as u32);
    if count > BRUTE_FORCE_BUDGET as u128 {
        return Err(CodeError::BudgetExceeded { count, budget: BRUTE_FORCE_BUDGET });
    }
    let gt = code.generator.transpose();
    let best = (1..count as u64)
        .into_par_iter()
        .map(|mut idx| {
            let msg: Vec<Element> = (0..code.k)
                .map(|_| {
                    let d = (idx % q) as u32;
                    idx /= q;
                    Element::from_int(d)
                })
                .collect();
            let c = gt.mul_vec(&code.tower, &msg).expect("dimensions agree");
            sum_rank_weight(&code.tower, &c, &code.partition).expect("length agrees")
        })
        .min()
        .unwrap_or(0);
    Ok(best)
}
