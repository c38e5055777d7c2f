//! Forward-mode dual scalars over complex values, carrying both first
//! partials with respect to the two surface parameters.

use num_complex::Complex64;
use thiserror::Error;

pub type Complex = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sqrt at 0 has no derivative")]
    SqrtAtZero,
}

/// Value together with d/du1 and d/du2. The parameters are real, so every
/// elementary rule is the ordinary chain rule with complex coefficients;
/// conj propagates conjugated derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualScalar {
    pub value: Complex,
    pub du1: Complex,
    pub du2: Complex,
}

impl DualScalar {
    pub fn constant(value: Complex) -> Self {
        Self { value, du1: Complex::new(0.0, 0.0), du2: Complex::new(0.0, 0.0) }
    }

    pub fn var_u1(u1: f64) -> Self {
        Self {
            value: Complex::new(u1, 0.0),
            du1: Complex::new(1.0, 0.0),
            du2: Complex::new(0.0, 0.0),
        }
    }

    pub fn var_u2(u2: f64) -> Self {
        Self {
            value: Complex::new(u2, 0.0),
            du1: Complex::new(0.0, 0.0),
            du2: Complex::new(1.0, 0.0),
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, du1: self.du1 + o.du1, du2: self.du2 + o.du2 }
    }

    pub fn sub(self, o: Self) -> Self {
        Self { value: self.value - o.value, du1: self.du1 - o.du1, du2: self.du2 - o.du2 }
    }

    pub fn neg(self) -> Self {
        Self { value: -self.value, du1: -self.du1, du2: -self.du2 }
    }

    pub fn mul(self, o: Self) -> Self {
        Self {
            value: self.value * o.value,
            du1: self.value * o.du1 + self.du1 * o.value,
            du2: self.value * o.du2 + self.du2 * o.value,
        }
    }

    pub fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.value.norm_sqr() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let inv = 1.0 / o.value;
        let value = self.value * inv;
        Ok(Self {
            value,
            du1: (self.du1 - value * o.du1) * inv,
            du2: (self.du2 - value * o.du2) * inv,
        })
    }

    pub fn powi(self, k: u32) -> Self {
        // d(z^k) = k z^{k-1} dz
        if k == 0 {
            return Self::constant(Complex::new(1.0, 0.0));
        }
        let vk1 = self.value.powi(k as i32 - 1);
        let scale = Complex::new(k as f64, 0.0) * vk1;
        Self { value: vk1 * self.value, du1: scale * self.du1, du2: scale * self.du2 }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self { value: e, du1: e * self.du1, du2: e * self.du2 }
    }

    pub fn sin(self) -> Self {
        let c = self.value.cos();
        Self { value: self.value.sin(), du1: c * self.du1, du2: c * self.du2 }
    }

    pub fn cos(self) -> Self {
        let s = -self.value.sin();
        Self { value: self.value.cos(), du1: s * self.du1, du2: s * self.du2 }
    }

    pub fn sqrt(self) -> Result<Self, EvalError> {
        let r = self.value.sqrt();
        if r.norm_sqr() == 0.0 {
            if self.du1.norm_sqr() == 0.0 && self.du2.norm_sqr() == 0.0 {
                return Ok(Self::constant(r));
            }
            return Err(EvalError::SqrtAtZero);
        }
        let half_inv = 0.5 / r;
        Ok(Self { value: r, du1: half_inv * self.du1, du2: half_inv * self.du2 })
    }

    pub fn conj(self) -> Self {
        Self { value: self.value.conj(), du1: self.du1.conj(), du2: self.du2.conj() }
    }
}
