//! Shared numerical kernels: real-coefficient cubics with complex roots,
//! grid extrema with parabolic refinement, and numeric residues of rational
//! functions with simple poles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum pairwise pole separation below which residues are refused.
pub const DEGENERATE_POLE_THRESHOLD: f64 = 1e-9;

/// The three complex roots of a real cubic, ordered by ascending real part
/// (ties broken by imaginary part). Complex roots come in exact conjugate
/// pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    pub roots: [Complex64; 3],
}

impl CubicRoots {
    /// Roots with imaginary part below `tol` relative to their magnitude.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|r| r.im.abs() <= tol * (1.0 + r.re.abs()))
            .map(|r| r.re)
            .collect()
    }
}

fn poly_eval(c3: f64, c2: f64, c1: f64, c0: f64, x: Complex64) -> Complex64 {
    ((Complex64::new(c3, 0.0) * x + c2) * x + c1) * x + c0
}

fn poly_deriv(c3: f64, c2: f64, c1: f64, x: Complex64) -> Complex64 {
    (Complex64::new(3.0 * c3, 0.0) * x + 2.0 * c2) * x + c1
}

/// One or two Newton steps on the full cubic; keeps whichever iterate has the
/// smaller residual. Polishing the closed-form roots pins the residual down
/// near discriminant boundaries.
fn polish(c3: f64, c2: f64, c1: f64, c0: f64, mut x: Complex64) -> Complex64 {
    for _ in 0..3 {
        let f = poly_eval(c3, c2, c1, c0, x);
        let d = poly_deriv(c3, c2, c1, x);
        if d.norm() == 0.0 {
            break;
        }
        let next = x - f / d;
        if poly_eval(c3, c2, c1, c0, next).norm() < f.norm() {
            x = next;
        } else {
            break;
        }
    }
    x
}

fn polish_real(c3: f64, c2: f64, c1: f64, c0: f64, mut x: f64) -> f64 {
    let f = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let d = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    for _ in 0..3 {
        let fx = f(x);
        let dx = d(x);
        if dx == 0.0 {
            break;
        }
        let next = x - fx / dx;
        if f(next).abs() < fx.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Solves `c3 x^3 + c2 x^2 + c1 x + c0 = 0` for all three complex roots.
///
/// Closed form (trigonometric for three real roots, Cardano otherwise)
/// followed by Newton polishing. Conjugate pairs are constructed explicitly,
/// so `im(r) + im(conj r) == 0` exactly.
pub fn solve_cubic(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<CubicRoots> {
    if c3 == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;

    // Depressed form t^3 + p t + q with x = t - a/3.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;

    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);

    let mut roots: [Complex64; 3];
    if p == 0.0 && q == 0.0 {
        let r = Complex64::new(shift, 0.0);
        roots = [r, r, r];
    } else if disc > 0.0 {
        // One real root and a conjugate pair.
        let sq = disc.sqrt();
        // Pick the sign that avoids cancellation in -q/2 +- sq.
        let u = if q <= 0.0 {
            (-q / 2.0 + sq).cbrt()
        } else {
            (-q / 2.0 - sq).cbrt()
        };
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let t_real = u + v;
        let re_pair = -t_real / 2.0;
        let im_pair = (3.0f64.sqrt() / 2.0) * (u - v).abs();
        let x_real = polish_real(c3, c2, c1, c0, t_real + shift);
        let pair = polish(c3, c2, c1, c0, Complex64::new(re_pair + shift, im_pair));
        roots = [Complex64::new(x_real, 0.0), pair, pair.conj()];
    } else {
        // Three real roots (trigonometric form).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        let mut rs = [0.0f64; 3];
        for (k, r) in rs.iter_mut().enumerate() {
            let t = m * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            *r = polish_real(c3, c2, c1, c0, t + shift);
        }
        roots = [
            Complex64::new(rs[0], 0.0),
            Complex64::new(rs[1], 0.0),
            Complex64::new(rs[2], 0.0),
        ];
    }

    roots.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(CubicRoots { roots })
}

/// Whether a grid extremum is a dip or a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

/// Which extrema [`find_extrema`] should report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremaFilter {
    Minima,
    Maxima,
    Both,
}

/// A located grid extremum, optionally refined below the grid spacing by a
/// parabola through the three neighbouring samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    pub refined: bool,
    /// Grid index of the raw sample the extremum was found at.
    #[serde(skip)]
    pub index: usize,
}

/// Fits a parabola through (x0,y0),(x1,y1),(x2,y2) and returns its vertex,
/// or None when the points are collinear or the vertex escapes the bracket.
fn parabola_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> Option<(f64, f64)> {
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let a2 = (d2 - d1) / (x2 - x0);
    if a2 == 0.0 {
        return None;
    }
    let xv = 0.5 * (x0 + x1) - d1 / (2.0 * a2);
    if xv < x0 || xv > x2 {
        return None;
    }
    let yv = y0 + d1 * (xv - x0) + a2 * (xv - x0) * (xv - x1);
    Some((xv, yv))
}

/// Strict interior local extrema of `ys` over the strictly increasing grid
/// `xs`, refined by 3-point parabolic interpolation. Endpoints are never
/// reported.
pub fn find_extrema(xs: &[f64], ys: &[f64], filter: ExtremaFilter) -> Result<Vec<Extremum>> {
    if xs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.windows(2).all(|w| w[0] < w[1]), "abscissa must increase");

    let mut out = Vec::new();
    for i in 1..xs.len() - 1 {
        let kind = if ys[i] < ys[i - 1] && ys[i] < ys[i + 1] {
            ExtremumKind::Minimum
        } else if ys[i] > ys[i - 1] && ys[i] > ys[i + 1] {
            ExtremumKind::Maximum
        } else {
            continue;
        };
        let wanted = match filter {
            ExtremaFilter::Minima => kind == ExtremumKind::Minimum,
            ExtremaFilter::Maxima => kind == ExtremumKind::Maximum,
            ExtremaFilter::Both => true,
        };
        if !wanted {
            continue;
        }
        let fit = parabola_vertex(xs[i - 1], ys[i - 1], xs[i], ys[i], xs[i + 1], ys[i + 1]);
        let (x, value, refined) = match fit {
            Some((xv, yv)) => (xv, yv, true),
            None => (xs[i], ys[i], false),
        };
        out.push(Extremum {
            x,
            value,
            kind,
            refined,
            index: i,
        });
    }
    Ok(out)
}

/// Local maxima that rise above both flanking valleys by at least
/// `frac * global_max`. The valley on each side is the lowest sample between
/// the peak and the nearest strictly higher sample (or the series end).
pub fn prominent_maxima(xs: &[f64], ys: &[f64], frac: f64) -> Result<Vec<Extremum>> {
    let maxima = find_extrema(xs, ys, ExtremaFilter::Maxima)?;
    let global = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = frac * global;
    let mut out = Vec::new();
    for m in maxima {
        let i = m.index;
        let peak = ys[i];
        let mut left_valley = peak;
        for j in (0..i).rev() {
            left_valley = left_valley.min(ys[j]);
            if ys[j] > peak {
                break;
            }
        }
        let mut right_valley = peak;
        for &y in &ys[i + 1..] {
            right_valley = right_valley.min(y);
            if y > peak {
                break;
            }
        }
        if peak - left_valley >= threshold && peak - right_valley >= threshold {
            out.push(m);
        }
    }
    Ok(out)
}

/// Residues of `N(s) / prod_j (s - s_j)` at three pairwise distinct simple
/// poles: `A_i = N(s_i) / prod_{j != i} (s_i - s_j)`.
pub fn numeric_residues<F>(poles: &[Complex64; 3], numerator_at: F) -> Result<[Complex64; 3]>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut min_sep = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            min_sep = min_sep.min((poles[i] - poles[j]).norm());
        }
    }
    if min_sep <= DEGENERATE_POLE_THRESHOLD {
        return Err(Error::DegeneratePoles {
            min_sep,
            threshold: DEGENERATE_POLE_THRESHOLD,
        });
    }
    let mut res = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let mut denom = Complex64::new(1.0, 0.0);
        for j in 0..3 {
            if j != i {
                denom *= poles[i] - poles[j];
            }
        }
        res[i] = numerator_at(poles[i]) / denom;
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn residual(c3: f64, c2: f64, c1: f64, c0: f64, r: Complex64) -> f64 {
        poly_eval(c3, c2, c1, c0, r).norm()
    }

    fn residual_scale(c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
        1.0f64
            .max(c0.abs())
            .max(c1.abs())
            .max(c2.abs())
            .max(c3.abs())
    }

    #[test]
    fn triple_zero_root() {
        let r = solve_cubic(1.0, 0.0, 0.0, 0.0).unwrap();
        for root in r.roots {
            assert_eq!(root, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn factored_integer_roots() {
        let r = solve_cubic(1.0, -6.0, 11.0, -6.0).unwrap();
        let expect = [1.0, 2.0, 3.0];
        for (root, want) in r.roots.iter().zip(expect) {
            assert_relative_eq!(root.re, want, max_relative = 1e-12);
            assert_eq!(root.im, 0.0);
        }
    }

    #[test]
    fn damping_free_pole_cubic() {
        // x^3 - (g_em^2 + 2 g^2) x with g_em = 0.005, g = 0.125:
        // roots {-0.176847, 0, +0.176847}; scale fixed by
        // sqrt(0.005^2 + 2*0.125^2) = 0.17684739183827394.
        let k = 0.005f64.powi(2) + 2.0 * 0.125f64.powi(2);
        let r = solve_cubic(1.0, 0.0, -k, 0.0).unwrap();
        let s = 0.17684739183827394;
        assert_relative_eq!(r.roots[0].re, -s, max_relative = 1e-12);
        assert_relative_eq!(r.roots[1].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.roots[2].re, s, max_relative = 1e-12);
    }

    #[test]
    fn conjugate_pair_exact() {
        // x^3 - 1 = 0: one real root and a pair at exp(+-2 pi i / 3).
        let r = solve_cubic(1.0, 0.0, 0.0, -1.0).unwrap();
        let pair: Vec<_> = r.roots.iter().filter(|x| x.im != 0.0).collect();
        assert_eq!(pair.len(), 2);
        assert_eq!(pair[0].im + pair[1].im, 0.0);
        assert_eq!(pair[0].re, pair[1].re);
    }

    #[test]
    fn double_root_meets_residual_invariant() {
        // (x-1)^2 (x-2): the double root sits on the discriminant boundary,
        // where the closed form is least accurate and polishing matters.
        let r = solve_cubic(1.0, -4.0, 5.0, -2.0).unwrap();
        let scale = residual_scale(1.0, -4.0, 5.0, -2.0);
        for root in r.roots {
            assert!(
                residual(1.0, -4.0, 5.0, -2.0, root) <= 1e-10 * scale,
                "residual {:e} at {root}",
                residual(1.0, -4.0, 5.0, -2.0, root)
            );
        }
        // roots cluster at {1, 1, 2} up to the sqrt-conditioning of the pair
        assert!((r.roots[0].re - 1.0).abs() < 1e-7);
        assert!((r.roots[1].re - 1.0).abs() < 1e-7);
        assert!((r.roots[2].re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_leading_coefficient() {
        assert!(matches!(
            solve_cubic(0.0, 1.0, 1.0, 1.0),
            Err(Error::DegenerateLeadingCoefficient)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn random_cubics_meet_residual_invariant(
            mag in 0.5f64..10.0,
            sign in prop::bool::ANY,
            c2 in -10.0f64..10.0,
            c1 in -10.0f64..10.0,
            c0 in -10.0f64..10.0,
        ) {
            let c3 = if sign { mag } else { -mag };
            let r = solve_cubic(c3, c2, c1, c0).unwrap();
            let scale = residual_scale(c3, c2, c1, c0);
            for root in r.roots {
                prop_assert!(residual(c3, c2, c1, c0, root) <= 1e-10 * scale);
            }
            // Vieta sums
            let sum = r.roots[0] + r.roots[1] + r.roots[2];
            let prod = r.roots[0] * r.roots[1] * r.roots[2];
            let e2 = c2 / c3;
            let e0 = c0 / c3;
            prop_assert!((sum + e2).norm() <= 1e-9 * (1.0 + e2.abs()));
            prop_assert!((prod + e0).norm() <= 1e-9 * (1.0 + e0.abs()));
            // conjugate pairing
            let im_sum: f64 = r.roots.iter().map(|x| x.im).sum();
            prop_assert!(im_sum.abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_dip() {
        let xs = [-1.0, 0.0, 1.0];
        let ys = [3.0, 1.0, 3.0];
        let ex = find_extrema(&xs, &ys, ExtremaFilter::Minima).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].x, 0.0);
        assert_eq!(ex[0].kind, ExtremumKind::Minimum);
    }

    #[test]
    fn parabola_minimum_refined() {
        let n = 101;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x - 0.3) * (x - 0.3)).collect();
        let ex = find_extrema(&xs, &ys, ExtremaFilter::Minima).unwrap();
        assert_eq!(ex.len(), 1);
        assert!(ex[0].refined);
        assert!((ex[0].x - 0.3).abs() < 1e-6, "x = {}", ex[0].x);
    }

    #[test]
    fn too_few_points() {
        let xs = [0.0, 1.0];
        let ys = [1.0, 2.0];
        assert!(matches!(
            find_extrema(&xs, &ys, ExtremaFilter::Both),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn mirrored_series_mirrors_extrema() {
        let n = 201;
        let xs: Vec<f64> = (0..n)
            .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
            .collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (x - 0.37).powi(2) * ((x + 0.54).powi(2) + 0.1))
            .collect();
        let fwd = find_extrema(&xs, &ys, ExtremaFilter::Both).unwrap();
        let xs_m: Vec<f64> = xs.iter().rev().map(|x| -x).collect();
        let ys_m: Vec<f64> = ys.iter().rev().cloned().collect();
        let bwd = find_extrema(&xs_m, &ys_m, ExtremaFilter::Both).unwrap();
        assert_eq!(fwd.len(), bwd.len());
        for (f, b) in fwd.iter().zip(bwd.iter().rev()) {
            assert!((f.x + b.x).abs() < 1e-9, "{} vs {}", f.x, b.x);
            assert_eq!(f.kind, b.kind);
        }
    }

    #[test]
    fn residues_of_known_partial_fraction() {
        // 1 / (s (s-1) (s-2)) = (1/2)/s - 1/(s-1) + (1/2)/(s-2)
        let poles = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        let res = numeric_residues(&poles, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(res[0].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(res[1].re, -1.0, max_relative = 1e-14);
        assert_relative_eq!(res[2].re, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn residues_reconstruct_rational_function() {
        let poles = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(3.0, 0.0),
        ];
        let num = |s: Complex64| s;
        let res = numeric_residues(&poles, num).unwrap();
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 16) as f64 / (1u64 << 48) as f64) * 8.0 - 4.0
        };
        for _ in 0..5 {
            let s = Complex64::new(next(), next() + 5.0);
            let direct = num(s) / ((s - poles[0]) * (s - poles[1]) * (s - poles[2]));
            let recon: Complex64 = (0..3).map(|i| res[i] / (s - poles[i])).sum();
            assert!((direct - recon).norm() <= 1e-10 * direct.norm().max(1e-30));
        }
    }

    #[test]
    fn degenerate_poles_refused() {
        let poles = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1e-10, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!(matches!(
            numeric_residues(&poles, |_| Complex64::new(1.0, 0.0)),
            Err(Error::DegeneratePoles { .. })
        ));
    }

    #[test]
    fn prominence_filter_drops_ripple() {
        let xs: Vec<f64> = (0..1001).map(|i| i as f64 / 1000.0).collect();
        // One tall peak at 0.5, plus sub-threshold ripple.
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                let main = (-((x - 0.5) / 0.05).powi(2)).exp();
                let ripple = 1e-4 * (200.0 * x).sin();
                main + ripple
            })
            .collect();
        let peaks = prominent_maxima(&xs, &ys, 0.01).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].x - 0.5).abs() < 1e-3);
    }
}
