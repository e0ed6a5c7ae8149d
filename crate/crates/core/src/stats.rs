//! Normal quantiles and the Wilson score bound used by the significance gate.

use crate::error::ConfigError;

/// Standard normal quantile `Φ⁻¹(p)` for `p` in (0, 1).
///
/// Acklam's rational approximation followed by one Halley step against
/// `erfc`, which brings the error to near machine precision.
pub fn normal_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
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

    let x = if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(x * x / 2.0);
    x - u / (1.0 + x * u / 2.0)
}

/// Critical value for a confidence level `a`: the `(1 + a) / 2` quantile, so
/// that the returned bound is the lower end of the level-`a` interval.
pub fn critical_value(a: f64) -> Result<f64, ConfigError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(ConfigError::ConfidenceLevel(a));
    }
    Ok(normal_quantile((1.0 + a) / 2.0))
}

/// Wilson score lower bound for `k` successes out of `n` trials at
/// confidence level `a`. Zero when `n == 0`.
pub fn wilson_lower_bound(k: usize, n: usize, a: f64) -> Result<f64, ConfigError> {
    let z = critical_value(a)?;
    Ok(wilson_with_z(k, n, z))
}

pub(crate) fn wilson_with_z(k: usize, n: usize, z: f64) -> f64 {
    debug_assert!(k <= n);
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    let lb = (centre - spread) / (1.0 + z2 / n);
    lb.clamp(0.0, p)
}
