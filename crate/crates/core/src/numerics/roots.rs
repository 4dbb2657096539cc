use crate::error::NumericsError;

/// Bisection on a bracket `[lo, hi]` where `f` changes sign.
///
/// Stops when the bracket width falls below `rel_width · max(|lo|, |hi|)` or
/// `f` vanishes exactly. Returns the bracket midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_width: f64,
) -> Result<f64, NumericsError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() {
        return Err(NumericsError::NonFinite { at: lo });
    }
    if !fhi.is_finite() {
        return Err(NumericsError::NonFinite { at: hi });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_width * lo.abs().max(hi.abs()) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(NumericsError::NonFinite { at: mid });
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(NumericsError::NoSignChange { .. })
        ));
    }
}
