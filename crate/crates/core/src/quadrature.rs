//! Adaptive Gauss–Kronrod (7/15) quadrature by interval bisection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, libm::fabs((kronrod - gauss) * half))
}

/// Integrates `f` over `[lo, hi]` until the summed error estimate falls
/// below `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4096;
    let (value, err) = kronrod15(&f, lo, hi);
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new();
    pieces.push((lo, hi, value, err));
    loop {
        let mut total_err = 0.0;
        let mut worst = 0;
        for (i, piece) in pieces.iter().enumerate() {
            total_err += piece.3;
            if piece.3 > pieces[worst].3 {
                worst = i;
            }
        }
        if total_err <= abs_tol {
            let mut sum = CompensatedSum::default();
            for piece in &pieces {
                sum.add(piece.2);
            }
            return Ok(sum.value());
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Precision("adaptive quadrature did not reach its tolerance"));
        }
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = kronrod15(&f, a, mid);
        let (v2, e2) = kronrod15(&f, mid, b);
        pieces.push((a, mid, v1, e1));
        pieces.push((mid, b, v2, e2));
    }
}
