//! |x||∇f| in log-polar form: r²|∇f|² = |Lf|² + |∇_ω f|².

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

use crate::deriv::DerivativeScheme;
use crate::error::{Error, Result};
use crate::field::{apply_l, ScalarField};
use crate::norms::{lp_integral_rn, RadialWeight};

/// Samples of |x||∇f| as a real field on the same grid and sphere.
pub fn scaled_gradient(f: &ScalarField, scheme: DerivativeScheme) -> Result<ScalarField> {
    let lf = apply_l(f, scheme)?;
    let n = f.grid().count();
    let nodes = f.sphere().len();
    let mut mag: Vec<f64> = lf.values().iter().map(|z| z.norm()).collect();
    if !f.is_radial() {
        if f.sphere().is_radial_only() {
            return Err(Error::NonRadialData);
        }
        let mut ring = vec![Complex64::new(0.0, 0.0); nodes];
        let mut out = vec![0.0; nodes];
        for i in 0..n {
            for (j, r) in ring.iter_mut().enumerate() {
                *r = f.value(i, j);
            }
            f.sphere().angular_gradient_sq(&ring, &mut out);
            for (j, o) in out.iter().enumerate() {
                let k = j * n + i;
                mag[k] = mag[k].hypot(o.sqrt());
            }
        }
    }
    let values = mag.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    ScalarField::from_values(*f.grid(), f.sphere().clone(), values, f.is_radial())
}

/// ∫|∇f|^p dx = ∫(|x||∇f|)^p |x|^{-p} dx.
pub fn gradient_lp_integral(f: &ScalarField, p: f64, scheme: DerivativeScheme) -> Result<f64> {
    lp_integral_rn(&scaled_gradient(f, scheme)?, p, RadialWeight::InversePower)
}

/// The field |x| f.
pub fn times_radius(f: &ScalarField) -> ScalarField {
    f.times_radial(|s| s.exp())
}
