use std::fmt;

use num_complex::Complex64;

use crate::algebra::Coefficient;

/// `sum c_k exp(mu_k t)` with distinct rates, sorted by decreasing real rate.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly {
    terms: Vec<(Coefficient, Coefficient)>,
}

fn rate_cmp(a: &Coefficient, b: &Coefficient) -> std::cmp::Ordering {
    let (za, zb) = (a.to_complex(), b.to_complex());
    zb.re.total_cmp(&za.re).then(zb.im.total_cmp(&za.im)).then_with(|| a.to_string().cmp(&b.to_string()))
}

impl ExpPoly {
    /// Collects equal rates and drops zero coefficients.
    pub fn new<I: IntoIterator<Item = (Coefficient, Coefficient)>>(terms: I) -> Self {
        let mut out: Vec<(Coefficient, Coefficient)> = Vec::new();
        for (c, mu) in terms {
            match out.iter_mut().find(|(_, m)| *m == mu) {
                Some((acc, _)) => *acc += &c,
                None => out.push((c, mu)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        out.sort_by(|a, b| rate_cmp(&a.1, &b.1));
        ExpPoly { terms: out }
    }

    pub fn terms(&self) -> &[(Coefficient, Coefficient)] {
        &self.terms
    }

    pub fn rates(&self) -> Vec<Coefficient> {
        self.terms.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|(c, mu)| c.to_complex() * (mu.to_complex() * t).exp()).sum()
    }

    /// `sum |c_k exp(mu_k t)|`, the scale against which cancellation is judged.
    pub fn magnitude(&self, t: f64) -> f64 {
        self.terms.iter().map(|(c, mu)| (c.to_complex() * (mu.to_complex() * t).exp()).norm()).sum()
    }
}

fn exp_factor(mu: &Coefficient) -> String {
    if mu.is_one() {
        "exp(t)".into()
    } else if (-mu).is_one() {
        "exp(-t)".into()
    } else if mu.is_compound() {
        format!("exp(({mu})*t)")
    } else {
        format!("exp({mu}*t)")
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, mu)) in self.terms.iter().enumerate() {
            let neg = c.prints_negative();
            let mag = if neg { -c } else { c.clone() };
            let body = if mu.is_zero() {
                if mag.is_compound() { format!("({mag})") } else { mag.to_string() }
            } else if mag.is_one() {
                exp_factor(mu)
            } else if mag.is_compound() {
                format!("({mag})*{}", exp_factor(mu))
            } else {
                format!("{mag}*{}", exp_factor(mu))
            };
            match (k, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(&body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
