use super::map::DAMap;
use super::torus::TorusPoint;
use crate::anosov::{frame_for_k, inverse_matrix_for_k, matrix_for_k, EigenFrame, IntMatrix3, Spectrum};
use crate::error::Result;
use crate::linalg::Mat3;
use crate::scalar::Real;

/// A torus diffeomorphism whose derivative is expressed in the eigenbasis B_k.
pub trait TorusMap<S: Real>: Sync {
    fn forward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>>;
    fn backward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>>;
    /// Image of p and the derivative at p in B-coordinates.
    fn step(&self, p: &TorusPoint<S>) -> Result<(TorusPoint<S>, Mat3<S>)>;
    fn derivative(&self, p: &TorusPoint<S>) -> Result<Mat3<S>> {
        Ok(self.step(p)?.1)
    }
    fn frame(&self) -> &EigenFrame<S>;
    fn spectrum(&self) -> &Spectrum<S>;
    /// Constant expansion factor of the (1,1) cocycle entry.
    fn unstable_factor(&self) -> S;
}

/// The automorphism A_k itself.
#[derive(Clone, Debug)]
pub struct LinearAnosov<S> {
    pub spectrum: Spectrum<S>,
    pub frame: EigenFrame<S>,
    a: IntMatrix3,
    a_inv: IntMatrix3,
    diag: Mat3<S>,
}

impl<S: Real> LinearAnosov<S> {
    pub fn new(k: u32) -> Result<Self> {
        let (spectrum, frame) = frame_for_k::<S>(k)?;
        let diag = Mat3::diag(spectrum.lambda_u, spectrum.lambda_c, spectrum.lambda_s);
        Ok(LinearAnosov {
            a: matrix_for_k(k)?,
            a_inv: inverse_matrix_for_k(k)?,
            spectrum,
            frame,
            diag,
        })
    }
}

impl<S: Real> TorusMap<S> for LinearAnosov<S> {
    fn forward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        Ok(TorusPoint::project(self.a.mul_vec(p.coords())))
    }

    fn backward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        Ok(TorusPoint::project(self.a_inv.mul_vec(p.coords())))
    }

    fn step(&self, p: &TorusPoint<S>) -> Result<(TorusPoint<S>, Mat3<S>)> {
        Ok((self.forward(p)?, self.diag))
    }

    fn frame(&self) -> &EigenFrame<S> {
        &self.frame
    }

    fn spectrum(&self) -> &Spectrum<S> {
        &self.spectrum
    }

    fn unstable_factor(&self) -> S {
        self.spectrum.lambda_u
    }
}

impl<S: Real> TorusMap<S> for DAMap<S> {
    fn forward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        self.eval_f(p)
    }

    fn backward(&self, p: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        self.eval_f_inverse(p)
    }

    fn step(&self, p: &TorusPoint<S>) -> Result<(TorusPoint<S>, Mat3<S>)> {
        let (q, jac) = self.step_with_jacobian(p)?;
        Ok((q, self.derivative_from(&jac)))
    }

    fn frame(&self) -> &EigenFrame<S> {
        &self.params.frame
    }

    fn spectrum(&self) -> &Spectrum<S> {
        &self.params.spectrum
    }

    fn unstable_factor(&self) -> S {
        self.params.spectrum.lambda_u.powi(2)
    }
}
