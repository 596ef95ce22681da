//! Right-hand sides `f` for `Δu + f(u) = 0`.

use std::fmt;
use std::sync::Arc;

use super::FemError;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Nonlinearity {
    /// `f(u) = μ u`.
    Linear(f64),
    /// `f(u) = |u|^{p−1} u`.
    Power(f64),
    /// `f(u) = a u (1 − u/b)`.
    Logistic(f64, f64),
    Custom {
        name: String,
        f: ScalarFn,
        fprime: ScalarFn,
    },
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Nonlinearity {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fprime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Nonlinearity::Custom {
            name: name.into(),
            f: Arc::new(f),
            fprime: Arc::new(fprime),
        }
    }

    /// The zero right-hand side.
    pub fn zero() -> Self {
        Nonlinearity::Linear(0.0)
    }

    pub fn name(&self) -> String {
        match self {
            Nonlinearity::Linear(mu) => format!("linear:{mu}"),
            Nonlinearity::Power(p) => format!("power:{p}"),
            Nonlinearity::Logistic(a, b) => format!("logistic:{a},{b}"),
            Nonlinearity::Custom { name, .. } => name.clone(),
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Linear(mu) => mu * u,
            Nonlinearity::Power(p) => u.abs().powf(p - 1.0) * u,
            Nonlinearity::Logistic(a, b) => a * u * (1.0 - u / b),
            Nonlinearity::Custom { f, .. } => f(u),
        }
    }

    pub fn fprime(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Linear(mu) => *mu,
            Nonlinearity::Power(p) => p * u.abs().powf(p - 1.0),
            Nonlinearity::Logistic(a, b) => a * (1.0 - 2.0 * u / b),
            Nonlinearity::Custom { fprime, .. } => fprime(u),
        }
    }

    /// Parses `linear:MU`, `power:P` or `logistic:A,B`.
    pub fn parse(s: &str) -> Result<Self, FemError> {
        let bad = || FemError::Param(format!("cannot parse nonlinearity `{s}`"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind.trim(), nums.as_slice()) {
            ("linear", [mu]) => Ok(Nonlinearity::Linear(*mu)),
            ("power", [p]) if *p >= 1.0 => Ok(Nonlinearity::Power(*p)),
            ("logistic", [a, b]) if *b != 0.0 => Ok(Nonlinearity::Logistic(*a, *b)),
            _ => Err(bad()),
        }
    }

    /// Largest relative mismatch between `f'` and a central difference of `f`
    /// over the sample points.
    pub fn derivative_mismatch(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .map(|&u| {
                let h = 1e-5 * (1.0 + u.abs());
                let fd = (self.f(u + h) - self.f(u - h)) / (2.0 * h);
                let d = self.fprime(u);
                (fd - d).abs() / (1.0 + d.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest difference quotient over consecutive sorted samples.
    pub fn lipschitz_estimate(&self, samples: &[f64]) -> f64 {
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s.windows(2)
            .map(|w| ((self.f(w[1]) - self.f(w[0])) / (w[1] - w[0])).abs())
            .fold(0.0, f64::max)
    }
}
