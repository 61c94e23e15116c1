use crate::{Error, Result, Scalar};

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

pub fn fit_line<T: Scalar>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    Error::check_dim(xs.len(), ys.len())?;
    if xs.len() < 2 {
        return Err(Error::InvalidInput(
            "line fit needs at least two points".into(),
        ));
    }
    let n = T::of(xs.len() as f64);
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let syy: T = ys.iter().map(|&y| (y - my) * (y - my)).sum();
    if sxx.is_zero() {
        return Err(Error::InvalidInput(
            "line fit needs distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let r_squared = if syy.is_zero() {
        T::one()
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Slope of `log(val)` against `log(k)`.
pub fn fit_loglog_rate<T: Scalar>(ks: &[usize], vals: &[T]) -> Result<T> {
    Error::check_dim(ks.len(), vals.len())?;
    if ks.len() < 3 {
        return Err(Error::InvalidInput(
            "rate fit needs at least three points".into(),
        ));
    }
    if ks.contains(&0) || vals.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::InvalidInput(
            "rate fit needs positive iterations and values".into(),
        ));
    }
    let lx: Vec<T> = ks.iter().map(|&k| T::of(k as f64).ln()).collect();
    let ly: Vec<T> = vals.iter().map(|v| v.ln()).collect();
    Ok(fit_line(&lx, &ly)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_rates() {
        let ks = [10, 20, 40, 80, 160];
        let sqrt: Vec<f64> = ks.iter().map(|&k| 3.0 / (k as f64).sqrt()).collect();
        assert!((fit_loglog_rate(&ks, &sqrt).unwrap() + 0.5).abs() < 1e-6);
        let flat = vec![2.5; 5];
        assert!(fit_loglog_rate::<f64>(&ks, &flat).unwrap().abs() < 1e-12);
        let inv: Vec<f64> = ks.iter().map(|&k| 7.0 / k as f64).collect();
        assert!((fit_loglog_rate(&ks, &inv).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit_loglog_rate(&[1, 2, 3], &[1.0, 0.0, 1.0]).is_err());
        assert!(fit_loglog_rate(&[1, 2], &[1.0, 1.0]).is_err());
        assert!(fit_loglog_rate(&[1, 2, 3], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn line_r_squared() {
        let f = fit_line::<f64>(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }
}
