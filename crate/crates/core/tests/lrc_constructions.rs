mod common;

use common::{combinations, random_element, rng};
use skewcode::lrc::{bch_codimension, bch_parity_matrix, construct, LrcCode};
use skewcode::verify::{is_maximally_recoverable, local_mds_failures, VerifyOptions};
use skewcode::{CodeError, Element, FieldTower, Level, LrcParams, Matrix, Variant};

fn all_columns_independent(t: &FieldTower, m: &Matrix, k: usize) -> bool {
    combinations(m.cols(), k).iter().all(|c| m.select_columns(c).rank(t) == k)
}

fn base_of(code: &LrcCode) -> FieldTower {
    let t = code.tower();
    FieldTower::new(t.p(), t.k(), 1).unwrap()
}

fn sample_codes() -> Vec<LrcCode> {
    let mut out = Vec::new();
    for (n, r, h, a) in [(14, 7, 2, 1), (8, 4, 2, 1), (12, 4, 3, 2), (15, 5, 1, 0), (12, 6, 3, 1), (16, 16, 2, 3)] {
        out.push(construct(&LrcParams::new(n, r, h, a, Variant::Main)).unwrap());
    }
    for (n, r, h) in [(14, 7, 2), (12, 4, 3), (10, 5, 4)] {
        out.push(construct(&LrcParams::new(n, r, h, 1, Variant::BchA1)).unwrap());
    }
    for v in [
        Variant::GlobalOutsideCase1,
        Variant::GlobalOutsideCase2,
        Variant::GlobalOutsideA1Case1,
        Variant::GlobalOutsideA1Case2,
    ] {
        out.push(construct(&LrcParams::new(12, 5, 2, 1, v)).unwrap());
        out.push(construct(&LrcParams::new(15, 4, 3, 1, v)).unwrap());
    }
    out
}

#[test]
fn local_blocks_are_mds() {
    for code in sample_codes() {
        let base = base_of(&code);
        let a = code.layout().a;
        for i in 0..code.layout().g() {
            let blk = code.local_block(i);
            assert_eq!(blk.rows(), a);
            assert!(blk.entries().iter().all(|&e| base.contains(e)), "A entries lie in F_q0");
            assert!(all_columns_independent(&base, &blk, a), "{:?}", code.params());
        }
        assert!(local_mds_failures(&code).is_empty());
    }
}

#[test]
fn main_stacked_matrix_is_mds() {
    // [A; β] over F_q0 must have every a+m columns independent
    for (n, r, h, a) in [(14, 7, 2, 1), (8, 4, 2, 1), (12, 4, 3, 2), (15, 5, 3, 1), (12, 6, 3, 0)] {
        let code = construct(&LrcParams::new(n, r, h, a, Variant::Main)).unwrap();
        let t = code.tower();
        let m = t.m() as usize;
        let base = base_of(&code);
        let beta_row = code.band_block(0).select_rows(&[0]);
        let flat = beta_row.flatten(t);
        let a_blk = code.local_block(0);
        let mut rows: Vec<Vec<Element>> = (0..a).map(|i| a_blk.row(i).to_vec()).collect();
        rows.extend((0..m).map(|i| flat.row(i).to_vec()));
        let stacked = Matrix::from_rows(rows, Level::Base).unwrap();
        assert!(all_columns_independent(&base, &stacked, (a + m).min(r)), "({n},{r},{h},{a})");
    }
}

#[test]
fn band_entries_follow_the_norm_formula() {
    for code in sample_codes() {
        let t = code.tower();
        let q0 = t.q0() as u64;
        let h = code.layout().h;
        for l in 0..code.layout().g() {
            let b = code.band_block(l);
            let rep = t.pow(t.generator(), l as u64 + 1);
            for j in 0..h {
                let exp: u64 = (0..j as u32).map(|e| q0.pow(e)).sum();
                let coef = t.pow(rep, exp);
                for i in 0..b.cols() {
                    let beta = b.get(0, i);
                    assert_eq!(b.get(j, i), t.mul(coef, t.pow(beta, q0.pow(j as u32))));
                }
            }
        }
    }
}

#[test]
fn parity_check_is_block_sparse() {
    for code in sample_codes() {
        let h = code.parity_check();
        let lay = code.layout();
        assert_eq!(h.rows(), lay.g() * lay.a + lay.h);
        assert_eq!(h.cols(), code.n());
        for row in 0..h.rows() {
            for col in 0..h.cols() {
                if h.get(row, col).is_zero() {
                    continue;
                }
                let in_band = lay.global_rows().contains(&row);
                let in_local = lay.group_of(col).is_some_and(|g| lay.local_rows(g).contains(&row));
                assert!(in_band || in_local, "({row},{col})");
            }
        }
    }
}

#[test]
fn field_sizes_match_formulas() {
    let c = construct(&LrcParams::new(14, 7, 2, 1, Variant::Main)).unwrap();
    assert_eq!((c.info().q0, c.info().m, c.tower().q()), (7, 2, 49));
    let c = construct(&LrcParams::new(14, 7, 0, 1, Variant::Main)).unwrap();
    assert_eq!(c.tower().q(), 7);
    assert_eq!(c.parity_check().rows(), 2);
    let c = construct(&LrcParams::new(14, 7, 2, 1, Variant::BchA1)).unwrap();
    let s = bch_codimension(7, 4, 3);
    assert_eq!((c.info().q0, c.tower().q() as u64), (3, 3u64.pow(s as u32 - 1)));
    let c = construct(&LrcParams::new(21, 7, 3, 1, Variant::Main).with_h_local(1)).unwrap();
    assert_eq!(c.tower().q(), 7);
    let opts = VerifyOptions { h_local: Some(1), ..Default::default() };
    assert!(is_maximally_recoverable(&c, &opts).unwrap().certified());
    assert!(matches!(
        construct(&LrcParams::new(14, 7, 3, 1, Variant::Main).with_h_local(1)),
        Err(CodeError::BadParams(_))
    ));
    let c = construct(&LrcParams::new(12, 5, 2, 1, Variant::GlobalOutsideCase1)).unwrap();
    assert_eq!((c.info().q0, c.tower().q()), (4, 16));
    for code in sample_codes() {
        assert_eq!(code.tower().q() as u64, code.info().formula_field_size, "{:?}", code.params());
    }
}

#[test]
fn global_outside_shapes() {
    // h = 1: the global block is the single entry 1; with r = q0 + 1 no
    // suitable MDS matrix exists at q0 = 4, so the next prime power is used
    let c = construct(&LrcParams::new(11, 5, 1, 1, Variant::GlobalOutsideCase1)).unwrap();
    assert_eq!(c.info().q0, 5);
    assert!(construct(&LrcParams::new(11, 5, 1, 1, Variant::GlobalOutsideCase1).with_q0(4)).is_err());
    let bg = c.global_block().unwrap();
    assert_eq!((bg.rows(), bg.cols(), bg.get(0, 0)), (1, 1, Element::ONE));
    // case 2 with g = 3, h = 4: t = 1, global block built from three folded
    // columns plus e_h
    let c = construct(&LrcParams::new(19, 5, 4, 1, Variant::GlobalOutsideCase2)).unwrap();
    let bg = c.global_block().unwrap();
    assert_eq!((bg.rows(), bg.cols()), (4, 4));
    assert_eq!(bg.column(3), vec![Element::ZERO, Element::ZERO, Element::ZERO, Element::ONE]);
    assert!(bg.column(0)[0] == bg.column(1)[0] && bg.column(1)[0] == bg.column(2)[0]);
    assert_eq!(c.parity_check().cols(), 19);
    let rep = is_maximally_recoverable(&c, &VerifyOptions::default()).unwrap();
    assert!(rep.certified());
}

#[test]
fn a1_global_outside_inner_code() {
    let c = construct(&LrcParams::new(12, 5, 2, 1, Variant::GlobalOutsideA1Case1).with_q0(4)).unwrap();
    let cdim = c.info().inner_codimension.unwrap();
    assert!(cdim > 2);
    assert_eq!(c.tower().q(), 4u32.pow(cdim as u32 - 1));
    let base = FieldTower::new(2, 2, 1).unwrap();
    let h0 = bch_parity_matrix(5, 4, 4).unwrap();
    assert!(all_columns_independent(&base, &h0, 3));
}

#[test]
fn improved_variant_needs_nonzero_alphas() {
    // q0 = r - 1 forces α = 0, whose local column vanishes
    let c = construct(&LrcParams::new(10, 5, 2, 1, Variant::MainImproved)).unwrap();
    assert_eq!(c.info().q0, 4);
    assert!(!local_mds_failures(&c).is_empty());
    let c = construct(&LrcParams::new(10, 5, 2, 1, Variant::MainImproved).with_q0(5)).unwrap();
    assert!(is_maximally_recoverable(&c, &VerifyOptions::default()).unwrap().certified());
    for l in 0..2 {
        assert!(c.band_block(l).column(0).iter().all(|e| e.is_zero()));
    }
}

#[test]
fn encoding_properties() {
    let mut r = rng(9);
    for code in sample_codes() {
        let t = code.tower();
        let k = code.dimension();
        assert_eq!(code.encode(&vec![Element::ZERO; k]).unwrap(), vec![Element::ZERO; code.n()]);
        let info = code.information_positions().unwrap();
        for _ in 0..10 {
            let m1: Vec<Element> = (0..k).map(|_| random_element(t, &mut r)).collect();
            let m2: Vec<Element> = (0..k).map(|_| random_element(t, &mut r)).collect();
            let c1 = code.encode(&m1).unwrap();
            let c2 = code.encode(&m2).unwrap();
            assert!(code.is_codeword(&c1));
            for (&pos, &v) in info.iter().zip(&m1) {
                assert_eq!(c1[pos], v);
            }
            let sum: Vec<Element> = m1.iter().zip(&m2).map(|(&x, &y)| t.add(x, y)).collect();
            let csum: Vec<Element> = c1.iter().zip(&c2).map(|(&x, &y)| t.add(x, y)).collect();
            assert_eq!(code.encode(&sum).unwrap(), csum);
        }
        assert!(matches!(code.encode(&[]), Err(CodeError::MessageLength { .. })));
    }
}

#[test]
fn bundles_round_trip_and_are_versioned() {
    for code in sample_codes() {
        let s = code.to_json();
        assert_eq!(LrcCode::from_json(&s).unwrap(), code);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["format_version"], 1);
        for key in ["params", "tower", "H", "layout"] {
            assert!(v.get(key).is_some());
        }
        let bad = s.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        assert!(LrcCode::from_json(&bad).is_err());
    }
}

#[test]
fn parameter_errors() {
    let err = construct(&LrcParams::new(14, 7, 2, 1, Variant::Main).with_q0(5)).unwrap_err();
    assert!(err.to_string().contains("q0 must be ≥ max{g+1, r}"));
    assert!(matches!(construct(&LrcParams::new(13, 7, 2, 1, Variant::Main)), Err(CodeError::BadParams(_))));
    assert!(matches!(construct(&LrcParams::new(14, 7, 2, 7, Variant::Main)), Err(CodeError::BadParams(_))));
    assert!(matches!(construct(&LrcParams::new(14, 7, 2, 1, Variant::Main).with_h_local(3)), Err(CodeError::BadParams(_))));
    assert!(matches!(
        construct(&LrcParams::new(16, 5, 6, 1, Variant::GlobalOutsideCase2)),
        Err(CodeError::PreconditionViolated(_))
    ));
    assert!(matches!(construct(&LrcParams::new(14, 7, 2, 2, Variant::BchA1)), Err(CodeError::BadParams(_))));
    assert!(matches!(construct(&LrcParams::new(14, 7, 2, 1, Variant::Main).with_q0(9)), Ok(_)));
}
