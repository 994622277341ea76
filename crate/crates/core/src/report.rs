//! Residual bookkeeping shared by the recurrence and scheme checks.

use crate::xc::XComplex;
use serde::Serialize;

/// |sum of terms| over the largest |term|; zero when every term vanishes.
pub fn normalized(terms: &[XComplex]) -> f64 {
    let mut sum = XComplex::zero(terms.first().map(|t| t.prec()).unwrap_or(64));
    let mut scale = 0f64;
    for t in terms {
        sum += t;
        scale = scale.max(t.abs_f64());
    }
    if scale == 0.0 {
        return 0.0;
    }
    sum.abs_f64() / scale
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub n: usize,
    pub value: f64,
}

/// Normalized residuals of named identities at each N.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ResidualReport {
    pub items: Vec<Residual>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_terms(&mut self, name: &str, n: usize, terms: &[XComplex]) {
        self.push(name, n, normalized(terms));
    }

    pub fn push(&mut self, name: &str, n: usize, value: f64) {
        self.items.push(Residual { name: name.to_string(), n, value });
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.items.extend(other.items);
    }

    /// NaN counts as infinitely bad.
    pub fn max(&self) -> f64 {
        self.items.iter().map(|r| if r.value.is_nan() { f64::INFINITY } else { r.value }).fold(0.0, f64::max)
    }

    pub fn max_for(&self, name: &str) -> f64 {
        self.items.iter().filter(|r| r.name == name).map(|r| if r.value.is_nan() { f64::INFINITY } else { r.value }).fold(0.0, f64::max)
    }

    pub fn max_at(&self, n: usize) -> f64 {
        self.items.iter().filter(|r| r.n == n).map(|r| if r.value.is_nan() { f64::INFINITY } else { r.value }).fold(0.0, f64::max)
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.items.iter().map(|r| r.name.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn worst(&self) -> Option<&Residual> {
        self.items.iter().max_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Greater))
    }
}
