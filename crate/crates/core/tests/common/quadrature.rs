// Adaptive Gauss–Kronrod (7/15) quadrature used as an independent oracle
// for densities and CDFs. Shared between unit tests (via #[path]) and the
// integration tests.

#![allow(dead_code)]

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

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to an absolute tolerance.
///
/// Globally adaptive: the interval with the largest error estimate is split
/// until the summed estimate meets `tol` or the subdivision budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    const MAX_INTERVALS: usize = 4000;
    // start from a uniform split so a narrow feature cannot hide between
    // the nodes of a single rule
    const INITIAL: usize = 16;
    let width = (b - a) / INITIAL as f64;
    let mut parts: Vec<(f64, f64, f64, f64)> = (0..INITIAL)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == INITIAL { b } else { lo + width };
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    let mut err_total: f64 = parts.iter().map(|p| p.3).sum();
    while err_total > tol && parts.len() < MAX_INTERVALS {
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, e) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            parts.push((lo, hi, gk15(&f, lo, hi).0, 0.0));
            err_total -= e;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        err_total = parts.iter().map(|p| p.3).sum();
    }
    parts.iter().map(|p| p.2).sum()
}

/// Integrates a density over its whole support.
///
/// `spread` lists `(mean, variance)` pairs of the pieces of the density; they
/// place breakpoints around each mode and set the truncation range. Positive
/// support is integrated in u = √x to tame x^{shape-1} singularities at 0.
pub fn integrate_support<F: Fn(f64) -> f64>(f: F, positive_support: bool, spread: &[(f64, f64)]) -> f64 {
    let mut breaks = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(m, v) in spread {
        let sd = v.sqrt();
        lo = lo.min(m - 40.0 * sd);
        hi = hi.max(m + 60.0 * sd);
        for k in -8..=8 {
            breaks.push(m + 0.75 * k as f64 * sd);
        }
        for t in [8.0, 10.0, 13.0, 17.0, 22.0, 30.0, 40.0] {
            breaks.push(m - t * sd);
            breaks.push(m + t * sd);
        }
    }
    if positive_support {
        let g = |u: f64| 2.0 * u * f(u * u);
        let mut pts: Vec<f64> = breaks.into_iter().filter(|&x| x > 0.0 && x < hi).map(f64::sqrt).collect();
        pts.push(0.0);
        pts.push(hi.sqrt());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.windows(2).map(|w| integrate(g, w[0], w[1], 1e-12)).sum()
    } else {
        let mut pts: Vec<f64> = breaks.into_iter().filter(|&x| x > lo && x < hi).collect();
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.windows(2).map(|w| integrate(&f, w[0], w[1], 1e-12)).sum()
    }
}
