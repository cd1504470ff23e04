//! Truncated Taylor series ("jets") for exact derivatives.
//!
//! A `Jet` stores `f(x0 + h) = sum_k c[k] h^k` up to `order`. Derivatives are
//! `k! c[k]`. Arithmetic propagates the truncated series, so any closed-form
//! recipe built from these operations differentiates exactly up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_ORDER: usize = 9;
const N: usize = MAX_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; N],
    pub order: usize,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = [0.0; N];
        c[0] = v;
        Jet { c, order: order.min(MAX_ORDER) }
    }

    /// The identity function seeded at `x`.
    pub fn var(x: f64, order: usize) -> Jet {
        let mut j = Jet::constant(x, order);
        if j.order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn zero(order: usize) -> Jet {
        Jet::constant(0.0, order)
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative at the seed point.
    pub fn deriv(&self, k: usize) -> f64 {
        if k > self.order {
            return f64::NAN;
        }
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k] * f
    }

    pub fn scale(mut self, s: f64) -> Jet {
        for k in 0..=self.order {
            self.c[k] *= s;
        }
        self
    }

    pub fn add_const(mut self, s: f64) -> Jet {
        self.c[0] += s;
        self
    }

    pub fn exp(&self) -> Jet {
        let n = self.order;
        let mut g = Jet::zero(n);
        g.c[0] = self.c[0].exp();
        if g.c[0] == 0.0 {
            return g;
        }
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * g.c[k - j];
            }
            g.c[k] = s / k as f64;
        }
        g
    }

    pub fn ln(&self) -> Jet {
        let n = self.order;
        let mut g = Jet::zero(n);
        g.c[0] = self.c[0].ln();
        // f g' = f'  =>  k f0 g_k = k f_k - sum_{j=1}^{k-1} j g_j f_{k-j}
        for k in 1..=n {
            let mut s = k as f64 * self.c[k];
            for j in 1..k {
                s -= j as f64 * g.c[j] * self.c[k - j];
            }
            g.c[k] = s / (k as f64 * self.c[0]);
        }
        g
    }

    /// `self^p` for a real exponent; requires a positive value.
    pub fn powf(&self, p: f64) -> Jet {
        let n = self.order;
        let mut g = Jet::zero(n);
        g.c[0] = self.c[0].powf(p);
        // f g' = p f' g  =>  k f0 g_k = sum_{j=1}^k (p j - (k - j)) f_j g_{k-j}
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += (p * j as f64 - (k - j) as f64) * self.c[j] * g.c[k - j];
            }
            g.c[k] = s / (k as f64 * self.c[0]);
        }
        g
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order) / *self
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order;
        let mut s = Jet::zero(n);
        let mut c = Jet::zero(n);
        s.c[0] = self.c[0].sin();
        c.c[0] = self.c[0].cos();
        for k in 1..=n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                ds += w * c.c[k - j];
                dc -= w * s.c[k - j];
            }
            s.c[k] = ds / k as f64;
            c.c[k] = dc / k as f64;
        }
        (s, c)
    }

    fn min_order(&self, o: &Jet) -> usize {
        self.order.min(o.order)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let n = self.min_order(&o);
        let mut r = Jet::zero(n);
        for k in 0..=n {
            r.c[k] = self.c[k] + o.c[k];
        }
        r
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let n = self.min_order(&o);
        let mut r = Jet::zero(n);
        for k in 0..=n {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * o.c[k - j];
            }
            r.c[k] = s;
        }
        r
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let n = self.min_order(&o);
        let mut r = Jet::zero(n);
        for k in 0..=n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= o.c[j] * r.c[k - j];
            }
            r.c[k] = s / o.c[0];
        }
        r
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        self.add_const(s)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, s: f64) -> Jet {
        self.add_const(-s)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}
