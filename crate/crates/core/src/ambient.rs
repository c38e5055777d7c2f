//! Complex-linear algebra of C^{n+1} and the contact structure of the unit
//! sphere inside it: Hermitian/real products, the Reeb field, projection
//! onto the contact distribution and the ambient complex structure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

pub type Complex = Complex64;

/// A point or tangent vector of C^{n+1}, stored as n+1 complex components.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector {
    components: Vec<Complex>,
}

impl AmbientVector {
    pub fn new(components: Vec<Complex>) -> Self {
        Self { components }
    }

    pub fn zeros(len: usize) -> Self {
        Self { components: vec![Complex::new(0.0, 0.0); len] }
    }

    /// Number of complex components (n+1).
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Complex] {
        &self.components
    }

    pub fn component(&self, k: usize) -> Complex {
        self.components[k]
    }

    /// Multiplication by i, applied componentwise.
    pub fn times_i(&self) -> Self {
        let i = Complex::new(0.0, 1.0);
        Self { components: self.components.iter().map(|c| i * c).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { components: self.components.iter().map(|c| c.conj()).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { components: self.components.iter().map(|c| c * s).collect() }
    }

    pub fn scaled_complex(&self, s: Complex) -> Self {
        Self { components: self.components.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self + s * other.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// A point of the unit sphere S^{2n+1} in C^{n+1}.
#[derive(Debug, Clone)]
pub struct SpherePoint {
    position: AmbientVector,
}

impl SpherePoint {
    /// Wraps a position vector, checking unit-sphere membership.
    pub fn new(position: AmbientVector) -> Result<Self> {
        let deviation = (position.norm_sq() - 1.0).abs();
        if deviation > tolerances::ON_SPHERE {
            return Err(Error::NotOnSphere { deviation });
        }
        Ok(Self { position })
    }

    pub fn position(&self) -> &AmbientVector {
        &self.position
    }
}

/// Hermitian product (z, w) = sum_j z^j conj(w^j).
pub fn hermitian_product(z: &AmbientVector, w: &AmbientVector) -> Result<Complex> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch { left: z.len(), right: w.len() });
    }
    Ok(z.components
        .iter()
        .zip(&w.components)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Real inner product <z, w> = Re (z, w).
pub fn real_inner(z: &AmbientVector, w: &AmbientVector) -> Result<f64> {
    Ok(hermitian_product(z, w)?.re)
}

/// Unchecked real inner product for vectors known to share a dimension.
pub(crate) fn rinner(z: &AmbientVector, w: &AmbientVector) -> f64 {
    z.components
        .iter()
        .zip(&w.components)
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum()
}

/// The Reeb field xi(z) = i z.
pub fn reeb(p: &SpherePoint) -> AmbientVector {
    p.position.times_i()
}

/// Projects an arbitrary ambient vector onto the contact distribution at p:
/// the component orthogonal to both the position and the Reeb direction.
pub fn project_contact(p: &SpherePoint, x: &AmbientVector) -> Result<AmbientVector> {
    let z = &p.position;
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch { left: z.len(), right: x.len() });
    }
    let xi = reeb(p);
    let out = x.axpy(-rinner(x, z), z);
    Ok(out.axpy(-rinner(&out, &xi), &xi))
}

/// The ambient complex structure: multiplication by i.
pub fn complex_structure(x: &AmbientVector) -> AmbientVector {
    x.times_i()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cv(parts: &[(f64, f64)]) -> AmbientVector {
        AmbientVector::new(parts.iter().map(|&(re, im)| Complex::new(re, im)).collect())
    }

    fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> AmbientVector {
        AmbientVector::new(
            (0..len)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn hermitian_product_basis_cases() {
        let e0 = cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let ie0 = cv(&[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(hermitian_product(&e0, &e0).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(hermitian_product(&ie0, &e0).unwrap(), Complex::new(0.0, 1.0));

        let c = 3.0f64.sqrt().recip();
        let v = cv(&[(c, 0.0), (c, 0.0), (c, 0.0)]);
        let p = hermitian_product(&v, &v).unwrap();
        assert!((p.re - 1.0).abs() < 1e-15 && p.im.abs() < 1e-15);
    }

    #[test]
    fn hermitian_product_dimension_mismatch() {
        let a = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        let b = cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            hermitian_product(&a, &b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn real_inner_cases() {
        let e0 = cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let ie0 = cv(&[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(real_inner(&ie0, &e0).unwrap(), 0.0);
        assert_eq!(real_inner(&e0, &e0).unwrap(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let z = random_vector(&mut rng, 3);
            assert!(real_inner(&z.times_i(), &z).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_conjugate_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = random_vector(&mut rng, 3);
            let w = random_vector(&mut rng, 3);
            let zw = hermitian_product(&z, &w).unwrap();
            let wz = hermitian_product(&w, &z).unwrap();
            assert!((zw - wz.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn reeb_is_unit_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = SpherePoint::new(random_vector(&mut rng, 3).normalized()).unwrap();
            let xi = reeb(&p);
            assert!((xi.norm() - 1.0).abs() < 1e-14);
            assert!(rinner(&xi, p.position()).abs() < 1e-14);
        }
        let p = SpherePoint::new(cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert_eq!(reeb(&p).component(0), Complex::new(0.0, 1.0));
    }

    #[test]
    fn project_contact_kills_radial_and_reeb_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = SpherePoint::new(random_vector(&mut rng, 3).normalized()).unwrap();
            let xi = reeb(&p);
            assert!(project_contact(&p, p.position()).unwrap().norm() < 1e-14);
            assert!(project_contact(&p, &xi).unwrap().norm() < 1e-14);

            let x = random_vector(&mut rng, 3);
            let y = project_contact(&p, &x).unwrap();
            assert!(rinner(&y, p.position()).abs() < 1e-12);
            assert!(rinner(&y, &xi).abs() < 1e-12);
            // idempotence
            let y2 = project_contact(&p, &y).unwrap();
            assert!(y2.sub(&y).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_vector(&mut rng, 3);
        let y = random_vector(&mut rng, 3);
        assert!(x.times_i().times_i().add(&x).norm() < 1e-15);
        let lhs = rinner(&x.times_i(), &y.times_i());
        assert!((lhs - rinner(&x, &y)).abs() < 1e-14);
        assert_eq!(
            complex_structure(&cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])).component(0),
            Complex::new(0.0, 1.0)
        );
    }

    #[test]
    fn sphere_point_rejects_off_sphere() {
        assert!(SpherePoint::new(cv(&[(1.1, 0.0), (0.0, 0.0), (0.0, 0.0)])).is_err());
    }
}
