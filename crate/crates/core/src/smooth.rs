//! Strongly convex data-fidelity terms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DenseMatrix, DenseVector, LinearMap};

/// The convex half `f` of a splitting `f + g`.
///
/// Implementors are `s`-strongly convex. Smooth terms also report the Lipschitz
/// constant of their gradient; non-smooth ones return `None` and cannot be used
/// by the solver variants that need `∇f`.
pub trait DataTerm: Send + Sync {
    fn dim(&self) -> usize;

    /// Value at `x`; `+∞` outside the term's domain.
    fn eval(&self, x: &DenseVector) -> Result<f64>;

    fn gradient(&self, _x: &DenseVector) -> Result<DenseVector> {
        Err(Error::NotSmooth { variant: "gradient" })
    }

    /// Lipschitz constant `σ` of `∇f`, if `f` is smooth.
    fn gradient_lipschitz(&self) -> Option<f64>;

    /// Strong convexity modulus `s`.
    fn strong_convexity(&self) -> f64;

    /// `J_{αf}(x)`.
    fn prox(&self, x: &DenseVector, alpha: f64) -> Result<DenseVector>;

    /// Prox of `f - (ρ/2)|·|²` with step `alpha`, i.e. `J_{β₂f}((β₂/α)x)` with
    /// `β₂ = α/(1-αρ)`.
    fn shifted_prox(&self, x: &DenseVector, alpha: f64, rho: f64) -> Result<DenseVector> {
        check_positive_step(alpha)?;
        if alpha * rho >= 1.0 {
            return Err(Error::StepTooLarge { alpha, rho });
        }
        let s = self.strong_convexity();
        if rho > s {
            return Err(Error::ShiftedTermNonconvex { rho, s });
        }
        let beta = alpha / (1.0 - alpha * rho);
        self.prox(&x.scaled(beta / alpha), beta)
    }
}

fn check_positive_step(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// `f(x) = ½|y - Hx|²` with `HᵀH` positive definite.
#[derive(Debug)]
pub struct QuadraticTerm {
    map: LinearMap,
    y: DenseVector,
    gram: DenseMatrix,
    hty: DenseVector,
    s: f64,
    sigma: f64,
    // (I + αHᵀH) factors keyed by the bit pattern of α
    factors: Mutex<HashMap<u64, Arc<Cholesky>>>,
}

impl QuadraticTerm {
    pub fn new(map: LinearMap, y: DenseVector) -> Result<Self> {
        y.check_len(map.range_dim())?;
        let (s, sigma) = map.gram_extremes()?;
        let gram = map.matrix().gram();
        let hty = map.adjoint_apply(&y)?;
        Ok(Self {
            map,
            y,
            gram,
            hty,
            s,
            sigma,
            factors: Mutex::new(HashMap::new()),
        })
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn observation(&self) -> &DenseVector {
        &self.y
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    fn factor(&self, alpha: f64) -> Result<Arc<Cholesky>> {
        let key = alpha.to_bits();
        let mut cache = self.factors.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = cache.get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(Cholesky::factor(&self.gram.shifted_identity(alpha))?);
        cache.insert(key, Arc::clone(&f));
        Ok(f)
    }
}

impl Clone for QuadraticTerm {
    fn clone(&self) -> Self {
        Self {
            map: self.map.clone(),
            y: self.y.clone(),
            gram: self.gram.clone(),
            hty: self.hty.clone(),
            s: self.s,
            sigma: self.sigma,
            factors: Mutex::new(HashMap::new()),
        }
    }
}

impl DataTerm for QuadraticTerm {
    fn dim(&self) -> usize {
        self.map.domain_dim()
    }

    fn eval(&self, x: &DenseVector) -> Result<f64> {
        let r = &self.map.apply(x)? - &self.y;
        Ok(0.5 * r.norm_sq())
    }

    /// `Hᵀ(Hx - y)`
    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        let r = &self.map.apply(x)? - &self.y;
        self.map.adjoint_apply(&r)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(self.sigma)
    }

    fn strong_convexity(&self) -> f64 {
        self.s
    }

    /// Solves `(I + αHᵀH) z = x + αHᵀy`.
    fn prox(&self, x: &DenseVector, alpha: f64) -> Result<DenseVector> {
        check_positive_step(alpha)?;
        x.check_len(self.dim())?;
        let rhs = x.lincomb(1.0, &self.hty, alpha);
        self.factor(alpha)?.solve(&rhs)
    }
}

/// Coordinate subspace `K = { x : x_i = 0 for i ∉ support }`.
pub type Support = [bool];

/// Orthogonal projection onto the coordinate subspace given by `support`.
pub fn projection_prox(support: &Support, z: &DenseVector) -> Result<DenseVector> {
    z.check_len(support.len())?;
    Ok(z.iter()
        .zip(support)
        .map(|(&v, &keep)| if keep { v } else { 0.0 })
        .collect())
}

/// `f(x) = ½|y - x|² + i_K(x)` for a coordinate subspace `K`.
///
/// Strongly convex with modulus 1 but not smooth, so only the shifted solver
/// variants accept it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceQuadraticTerm {
    y: DenseVector,
    support: Vec<bool>,
}

impl SubspaceQuadraticTerm {
    pub fn new(y: DenseVector, support: Vec<bool>) -> Result<Self> {
        y.check_len(support.len())?;
        Ok(Self { y, support })
    }

    /// Support given as a list of kept coordinate indices.
    pub fn from_indices(y: DenseVector, indices: &[usize]) -> Result<Self> {
        let mut support = vec![false; y.len()];
        for &i in indices {
            if i >= y.len() {
                return Err(Error::InvalidArgument(format!(
                    "support index {i} out of range for dimension {}",
                    y.len()
                )));
            }
            support[i] = true;
        }
        Self::new(y, support)
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn observation(&self) -> &DenseVector {
        &self.y
    }
}

impl DataTerm for SubspaceQuadraticTerm {
    fn dim(&self) -> usize {
        self.y.len()
    }

    fn eval(&self, x: &DenseVector) -> Result<f64> {
        x.check_len(self.dim())?;
        if x.iter().zip(&self.support).any(|(&v, &k)| !k && v != 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(0.5 * x.distance(&self.y).powi(2))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        None
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    /// `P_K((z + αy)/(1 + α))`
    fn prox(&self, z: &DenseVector, alpha: f64) -> Result<DenseVector> {
        check_positive_step(alpha)?;
        z.check_len(self.dim())?;
        let unconstrained = z.lincomb(1.0 / (1.0 + alpha), &self.y, alpha / (1.0 + alpha));
        projection_prox(&self.support, &unconstrained)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::convolution_matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector {
        DenseVector::from_fn(n, |_| rng.random_range(-2.0..2.0))
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> QuadraticTerm {
        let filter: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = convolution_matrix(&filter, 8).unwrap();
        let y = random_vector(rng, h.rows());
        QuadraticTerm::new(LinearMap::new(h), y).unwrap()
    }

    #[test]
    fn zero_residual_point() {
        let h = convolution_matrix(&[1.0, 0.5], 3).unwrap();
        let x = DenseVector::new(vec![1.0, -2.0, 0.5]);
        let y = h.matvec(&x).unwrap();
        let f = QuadraticTerm::new(LinearMap::new(h), y).unwrap();
        assert!(f.eval(&x).unwrap().abs() < 1e-28);
        assert!(f.gradient(&x).unwrap().norm() < 1e-14);
    }

    #[test]
    fn identity_operator_eval_and_gradient() {
        let f = QuadraticTerm::new(LinearMap::identity(3), DenseVector::zeros(3)).unwrap();
        let x = DenseVector::new(vec![1.0, 2.0, -2.0]);
        assert_eq!(f.eval(&x).unwrap(), 4.5);
        assert_eq!(f.gradient(&x).unwrap(), x);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_instance(&mut rng);
        let x = random_vector(&mut rng, f.dim());
        let g = f.gradient(&x).unwrap();
        let h = 1e-5;
        for i in 0..f.dim() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp.as_mut_slice()[i] += h;
            xm.as_mut_slice()[i] -= h;
            let fd = (f.eval(&xp).unwrap() - f.eval(&xm).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn prox_examples() {
        let f = QuadraticTerm::new(LinearMap::identity(3), DenseVector::zeros(3)).unwrap();
        let x = DenseVector::new(vec![3.0, -1.5, 0.25]);
        let z = f.prox(&x, 0.5).unwrap();
        assert!(z.distance(&x.scaled(1.0 / 1.5)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_instance(&mut rng);
        let x = random_vector(&mut rng, f.dim());
        assert!(f.prox(&x, 1e-12).unwrap().distance(&x) <= 1e-9);
    }

    #[test]
    fn prox_first_order_optimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = random_instance(&mut rng);
            let x = random_vector(&mut rng, f.dim());
            let alpha = rng.random_range(0.05..5.0);
            let z = f.prox(&x, alpha).unwrap();
            let lhs = z.lincomb(1.0, &f.gradient(&z).unwrap(), alpha);
            assert!(lhs.distance(&x) <= 1e-9 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn shifted_prox_examples() {
        // ρ → 0 reduces to the plain prox.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_instance(&mut rng);
        let x = random_vector(&mut rng, f.dim());
        let k2 = f.shifted_prox(&x, 0.7, 1e-12f64.min(f.s())).unwrap();
        assert!(k2.distance(&f.prox(&x, 0.7).unwrap()) <= 1e-9);

        // H = I, y = 0, ρ = 0.5, α = 1: argmin ½(z-x)² - ¼z² + ½z² = 2x/3.
        let f = QuadraticTerm::new(LinearMap::identity(2), DenseVector::zeros(2)).unwrap();
        let x = DenseVector::new(vec![3.0, -1.2]);
        let k2 = f.shifted_prox(&x, 1.0, 0.5).unwrap();
        assert!(k2.distance(&x.scaled(2.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn shifted_prox_optimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        while checked < 20 {
            let f = random_instance(&mut rng);
            let rho = rng.random_range(0.0..1.0) * f.s();
            let alpha = rng.random_range(0.01..0.99) / rho.max(0.5);
            let x = random_vector(&mut rng, f.dim());
            let z = f.shifted_prox(&x, alpha, rho).unwrap();
            let g = f.gradient(&z).unwrap();
            let lhs = z.lincomb(1.0, &g.lincomb(1.0, &z, -rho), alpha);
            assert!(lhs.distance(&x) <= 1e-9 * (1.0 + x.norm()));
            checked += 1;
        }
    }

    #[test]
    fn shifted_prox_line_search_oracle() {
        // K2(x) minimizes (1/2α)|z-x|² + f(z) - (ρ/2)|z|²; check along random directions.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_instance(&mut rng);
        let (alpha, rho) = (1.3, 0.6 * f.s());
        let x = random_vector(&mut rng, f.dim());
        let z = f.shifted_prox(&x, alpha, rho).unwrap();
        let obj =
            |v: &DenseVector| v.distance(&x).powi(2) / (2.0 * alpha) + f.eval(v).unwrap() - 0.5 * rho * v.norm_sq();
        let best = obj(&z);
        for _ in 0..50 {
            let d = random_vector(&mut rng, f.dim());
            for k in -20..=20 {
                let t = k as f64 * 0.05;
                assert!(best <= obj(&z.lincomb(1.0, &d, t)) + 1e-10);
            }
        }
    }

    #[test]
    fn shifted_prox_errors() {
        let f = QuadraticTerm::new(LinearMap::identity(2), DenseVector::zeros(2)).unwrap();
        let x = DenseVector::zeros(2);
        assert!(matches!(f.shifted_prox(&x, 2.0, 0.5), Err(Error::StepTooLarge { .. })));
        assert!(matches!(
            f.shifted_prox(&x, 0.1, 1.5),
            Err(Error::ShiftedTermNonconvex { .. })
        ));
    }

    #[test]
    fn prox_is_contractive() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = random_instance(&mut rng);
        let alpha = 0.9;
        let bound = 1.0 / (1.0 + alpha * f.s());
        for _ in 0..1000 {
            let a = random_vector(&mut rng, f.dim());
            let b = random_vector(&mut rng, f.dim());
            let d = f.prox(&a, alpha).unwrap().distance(&f.prox(&b, alpha).unwrap());
            assert!(d <= (bound + 1e-9) * a.distance(&b));
        }
    }

    #[test]
    fn reflection_lipschitz_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let f = random_instance(&mut rng);
        let (s, sigma) = (f.s(), f.sigma());
        for &alpha in &[0.1, 1.0 / (s * sigma).sqrt(), 3.0] {
            let bound =
                ((1.0 - alpha * sigma).abs() / (1.0 + alpha * sigma)).max((1.0 - alpha * s).abs() / (1.0 + alpha * s));
            let u = |v: &DenseVector| {
                let p = f.prox(v, alpha).unwrap();
                p.lincomb(2.0, v, -1.0)
            };
            for _ in 0..1000 {
                let a = random_vector(&mut rng, f.dim());
                let b = random_vector(&mut rng, f.dim());
                assert!(u(&a).distance(&u(&b)) <= bound * a.distance(&b) + 1e-9);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let z = DenseVector::new(vec![3.0, 4.0]);
        assert_eq!(projection_prox(&[true, true], &z).unwrap(), z);
        assert_eq!(projection_prox(&[false, false], &z).unwrap(), DenseVector::zeros(2));
        assert_eq!(projection_prox(&[true, false], &z).unwrap().as_slice(), &[3.0, 0.0]);
        assert!(projection_prox(&[true], &z).is_err());
    }

    #[test]
    fn reflected_projection_is_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let support: Vec<bool> = (0..10).map(|i| i % 3 == 0).collect();
        let refl = |v: &DenseVector| projection_prox(&support, v).unwrap().lincomb(2.0, v, -1.0);
        for _ in 0..200 {
            let a = random_vector(&mut rng, 10);
            let b = random_vector(&mut rng, 10);
            assert!((refl(&a).distance(&refl(&b)) - a.distance(&b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn subspace_prox_examples() {
        let z = DenseVector::new(vec![2.0, -3.0, 1.0]);
        let full = SubspaceQuadraticTerm::new(DenseVector::zeros(3), vec![true; 3]).unwrap();
        assert!(full.prox(&z, 0.5).unwrap().distance(&z.scaled(1.0 / 1.5)) < 1e-15);
        let empty = SubspaceQuadraticTerm::new(DenseVector::zeros(3), vec![false; 3]).unwrap();
        assert_eq!(empty.prox(&z, 0.5).unwrap(), DenseVector::zeros(3));
    }

    #[test]
    fn subspace_prox_matches_coordinate_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 12;
        let y = random_vector(&mut rng, n);
        let f = SubspaceQuadraticTerm::from_indices(y.clone(), &(0..n / 2).collect::<Vec<_>>()).unwrap();
        let z = random_vector(&mut rng, n);
        let alpha = 0.7;
        let p = f.prox(&z, alpha).unwrap();
        for i in 0..n {
            // d/dx [(x - z)²/(2α) + (y - x)²/2] = 0
            let expected = if i < n / 2 {
                (z[i] / alpha + y[i]) / (1.0 / alpha + 1.0)
            } else {
                0.0
            };
            assert!((p[i] - expected).abs() < 1e-14);
        }
        assert!(f.eval(&p).unwrap().is_finite());
        assert_eq!(f.eval(&z).unwrap(), f64::INFINITY);
        assert!(f.gradient(&z).is_err());
    }
}
