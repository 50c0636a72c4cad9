//! Reference implementations used only by tests. None of them share code
//! with the library.

#![allow(dead_code, clippy::excessive_precision)]

use ndarray::{Array1, Array2};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod rule on `[a, b]` with its embedded 7-point Gauss
/// estimate.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, gauss * h)
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]` by recursive
/// bisection until the Kronrod and Gauss estimates agree to `rel_tol`
/// relative to a first coarse estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (k, g) = gauss_kronrod(f, a, b);
        if (k - g).abs() <= tol || depth == 0 {
            return k;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (coarse, _) = gauss_kronrod(f, a, b);
    rec(f, a, b, rel_tol * coarse.abs().max(f64::MIN_POSITIVE), 40)
}

/// Truncated standard normal CDF at `x` on `[a, b]` by quadrature of the
/// density rescaled by its value at the point of `[a, b]` nearest 0.
pub fn trunc_norm_cdf_quadrature(x: f64, a: f64, b: f64) -> f64 {
    let anchor = if a > 0.0 {
        a
    } else if b < 0.0 {
        b
    } else {
        0.0
    };
    let density = |t: f64| (-0.5 * (t - anchor) * (t + anchor)).exp();
    let total = integrate(&density, a, b, 1e-15);
    let part = integrate(&density, a, x, 1e-15);
    part / total
}

/// Upper-tail probability `P(Z ≥ x | a ≤ Z ≤ b)` for a standard normal by
/// quadrature. Infinite bounds are cut 40 standard deviations beyond the
/// finite points, where the remaining mass is far below rounding.
pub fn trunc_norm_sf_quadrature(x: f64, a: f64, b: f64) -> f64 {
    let b = if b.is_finite() { b } else { a.max(x).max(0.0) + 40.0 };
    let a = if a.is_finite() { a } else { b.min(x).min(0.0) - 40.0 };
    let anchor = if a > 0.0 {
        a
    } else if b < 0.0 {
        b
    } else {
        0.0
    };
    let density = |t: f64| (-0.5 * (t - anchor) * (t + anchor)).exp();
    integrate(&density, x, b, 1e-15) / integrate(&density, a, b, 1e-15)
}

/// Unbiased HSIC as the average of `k_ij (l_ij + l_qr − 2 l_iq)` over all
/// ordered 4-tuples of distinct indices.
pub fn hsic_quadruples(k: &Array2<f64>, l: &Array2<f64>) -> f64 {
    let b = k.nrows();
    let mut sum = 0.0;
    let mut count = 0u64;
    for i in 0..b {
        for j in 0..b {
            if j == i {
                continue;
            }
            for q in 0..b {
                if q == i || q == j {
                    continue;
                }
                for r in 0..b {
                    if r == i || r == j || r == q {
                        continue;
                    }
                    sum += k[[i, j]] * (l[[i, j]] + l[[q, r]] - 2.0 * l[[i, q]]);
                    count += 1;
                }
            }
        }
    }
    sum / count as f64
}

/// Indices of the `k` largest entries of `z`, then the rest.
pub fn top_k(z: &Array1<f64>, k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].partial_cmp(&z[a]).unwrap().then(a.cmp(&b)));
    let rest = order.split_off(k);
    (order, rest)
}

/// Truncation interval of the selected score `m` from the explicit
/// constraint matrix `A z ≤ 0` with rows `e_ℓ − e_s`: with
/// `c = Σ e_m / Σ_mm` and `r = z − c z_m`, each row bounds `z_m` at
/// `−(A r)_j / (A c)_j`.
pub fn polyhedral_interval(z: &Array1<f64>, sigma: &Array2<f64>, k: usize, m: usize) -> (f64, f64) {
    let (selected, unselected) = top_k(z, k);
    let d = z.len();
    let mut a = Array2::<f64>::zeros((selected.len() * unselected.len(), d));
    let mut row = 0;
    for &s in &selected {
        for &l in &unselected {
            a[[row, l]] = 1.0;
            a[[row, s]] = -1.0;
            row += 1;
        }
    }
    let c = sigma.column(m).mapv(|v| v / sigma[[m, m]]);
    let r = z - &c.mapv(|v| v * z[m]);
    let ac = a.dot(&c);
    let ar = a.dot(&r);
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for j in 0..ac.len() {
        let v = -ar[j] / ac[j];
        if ac[j] < 0.0 {
            lower = lower.max(v);
        } else if ac[j] > 0.0 {
            upper = upper.min(v);
        }
    }
    (lower, upper)
}

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic for `n` samples.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
