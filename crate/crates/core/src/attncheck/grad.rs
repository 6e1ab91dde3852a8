use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Central-difference gradient of `f` at `params`.
pub fn numerical_gradient<F>(f: F, params: &[f64], epsilon: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let orig = x[i];
        x[i] = orig + epsilon;
        let plus = f(&x);
        x[i] = orig - epsilon;
        let minus = f(&x);
        x[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::Numeric(format!(
                "function value {} at parameter {i} perturbed by ±{epsilon}",
                if plus.is_finite() { minus } else { plus }
            )));
        }
        grad.push((plus - minus) / (2.0 * epsilon));
    }
    Ok(grad)
}

/// Largest relative disagreement between the central-difference gradient and `analytic`:
/// `max_i |num_i - an_i| / max(|num_i|, |an_i|, 1e-8)`.
pub fn grad_check<F>(f: F, analytic: &[f64], params: &[f64], epsilon: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if analytic.len() != params.len() {
        return Err(Error::dim("analytic gradient", params.len(), analytic.len()));
    }
    let value = f(params);
    if !value.is_finite() {
        return Err(Error::Numeric(format!("function value {value} at the check point")));
    }
    let numeric = numerical_gradient(&f, params, epsilon)?;
    Ok(numeric
        .iter()
        .zip(analytic)
        .map(|(n, a)| (n - a).abs() / n.abs().max(a.abs()).max(1e-8))
        .fold(0.0, f64::max))
}
