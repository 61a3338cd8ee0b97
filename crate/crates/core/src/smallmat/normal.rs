use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Φ(z), via the complementary error function (fdlibm rational approximations).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Upper tail 1 − Φ(z), without cancellation for large z.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

// Acklam's rational approximation to Φ⁻¹, relative error ~1.2e-9 before refinement.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn acklam_lower(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Φ⁻¹(p) for `p ∈ (0, ½]`, refined by Halley steps against [`std_normal_cdf`].
fn quantile_lower(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    for _ in 0..2 {
        let e = std_normal_cdf(x) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Φ⁻¹(p). Errors unless `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "normal quantile needs 0 < p < 1, got {p}"
        )));
    }
    Ok(if p > 0.5 {
        // 1 - p is exact for p in (1/2, 1)
        -quantile_lower(1.0 - p)
    } else {
        quantile_lower(p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integration of the density from 0 to z; independent of erfc.
    fn cdf_by_quadrature(z: f64) -> f64 {
        let n = 20_000;
        let h = z / n as f64;
        let mut s = std_normal_pdf(0.0) + std_normal_pdf(z);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * std_normal_pdf(i as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(0.6325) - 0.73654).abs() < 1e-4);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        for z in [-6.0, -3.3, -1.0, 0.25, 0.6325, 1.959964, 2.5, 5.0] {
            let oracle = cdf_by_quadrature(z);
            assert!((std_normal_cdf(z) - oracle).abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn sf_complements_cdf() {
        for z in [-4.0, -1.0, 0.0, 1.0, 4.0] {
            assert!((std_normal_sf(z) + std_normal_cdf(z) - 1.0).abs() < 1e-15);
        }
        assert!(std_normal_sf(10.0) > 0.0);
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let q = std_normal_quantile(std_normal_cdf(1.3)).unwrap();
        assert!((q - 1.3).abs() < 1e-9);
        // bisection on the cdf as oracle
        let (mut lo, mut hi) = (0.0_f64, 5.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if std_normal_cdf(mid) < 0.975 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q975 = std_normal_quantile(0.975).unwrap();
        assert!((q975 - lo).abs() < 1e-12);
        assert!((q975 - 1.95996).abs() < 1e-5);
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(std_normal_quantile(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn quantile_extreme_tails() {
        for p in [1e-300, 1e-100, 1e-20, 1e-10] {
            let z = std_normal_quantile(p).unwrap();
            assert!(((std_normal_cdf(z) - p) / p).abs() < 1e-12, "p = {p}");
        }
    }
}
