use serde::{Deserialize, Serialize};

/// Closed-form scalar functions of theta used for mixing probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarFn {
    /// `offset + slope * theta`
    Linear { offset: f64, slope: f64 },
    /// `cos^2(freq * theta + phase)`
    CosSquared { freq: f64, phase: f64 },
    /// `1 / (1 + exp(-rate * (theta - center)))`
    Logistic { rate: f64, center: f64 },
}

impl ScalarFn {
    pub fn identity() -> Self {
        ScalarFn::Linear { offset: 0.0, slope: 1.0 }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            ScalarFn::Linear { offset, slope } => offset + slope * theta,
            ScalarFn::CosSquared { freq, phase } => (freq * theta + phase).cos().powi(2),
            ScalarFn::Logistic { rate, center } => 1.0 / (1.0 + (-rate * (theta - center)).exp()),
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match *self {
            ScalarFn::Linear { slope, .. } => slope,
            ScalarFn::CosSquared { freq, phase } => -freq * (2.0 * (freq * theta + phase)).sin(),
            ScalarFn::Logistic { rate, .. } => {
                let p = self.value(theta);
                rate * p * (1.0 - p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_central_differences() {
        let fns = [
            ScalarFn::Linear { offset: 0.2, slope: -0.3 },
            ScalarFn::CosSquared { freq: 1.7, phase: 0.2 },
            ScalarFn::Logistic { rate: 2.5, center: 0.4 },
        ];
        let h = 1e-5;
        for f in fns {
            for &t in &[0.1, 0.37, 0.9] {
                let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
                assert!((fd - f.derivative(t)).abs() < 1e-8, "{f:?} at {t}");
            }
        }
    }

    #[test]
    fn tagged_json() {
        let f: ScalarFn = serde_json::from_str(r#"{"kind":"cos-squared","freq":1.0,"phase":0.0}"#).unwrap();
        assert_eq!(f, ScalarFn::CosSquared { freq: 1.0, phase: 0.0 });
    }
}
