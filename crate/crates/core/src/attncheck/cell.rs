use super::tensor::{add_assign, random_vec, sigmoid, Matrix};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Parameters of a gated recurrent cell with input size `d_in` and state size `d_h`.
///
/// One step from state `h` on input `x`:
///
/// ```text
/// r  = sigmoid(W_r x + U_r h + b_r)          reset gate
/// u  = sigmoid(W_u x + U_u h + b_u)          update gate
/// h~ = tanh(W_c x + U_c (r * h) + b_c)       candidate
/// h' = u * h + (1 - u) * h~
/// ```
///
/// `*` is the elementwise product. With all parameters zero and `h = 0`
/// the state stays at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentCellParams {
    pub w_reset: Matrix,
    pub u_reset: Matrix,
    pub b_reset: Vec<f64>,
    pub w_update: Matrix,
    pub u_update: Matrix,
    pub b_update: Vec<f64>,
    pub w_cand: Matrix,
    pub u_cand: Matrix,
    pub b_cand: Vec<f64>,
}

impl RecurrentCellParams {
    pub fn zeros(d_in: usize, d_h: usize) -> Self {
        RecurrentCellParams {
            w_reset: Matrix::zeros(d_h, d_in),
            u_reset: Matrix::zeros(d_h, d_h),
            b_reset: vec![0.0; d_h],
            w_update: Matrix::zeros(d_h, d_in),
            u_update: Matrix::zeros(d_h, d_h),
            b_update: vec![0.0; d_h],
            w_cand: Matrix::zeros(d_h, d_in),
            u_cand: Matrix::zeros(d_h, d_h),
            b_cand: vec![0.0; d_h],
        }
    }

    /// Draws every entry uniformly from `[-0.1, 0.1)`, in field declaration order.
    pub fn random(d_in: usize, d_h: usize, rng: &mut SeededRng) -> Self {
        const S: f64 = super::INIT_SCALE;
        RecurrentCellParams {
            w_reset: Matrix::random(d_h, d_in, rng, S),
            u_reset: Matrix::random(d_h, d_h, rng, S),
            b_reset: random_vec(d_h, rng, S),
            w_update: Matrix::random(d_h, d_in, rng, S),
            u_update: Matrix::random(d_h, d_h, rng, S),
            b_update: random_vec(d_h, rng, S),
            w_cand: Matrix::random(d_h, d_in, rng, S),
            u_cand: Matrix::random(d_h, d_h, rng, S),
            b_cand: random_vec(d_h, rng, S),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_reset.cols()
    }

    pub fn state_dim(&self) -> usize {
        self.w_reset.rows()
    }

    fn check_shapes(&self) -> Result<()> {
        let (d_h, d_in) = (self.state_dim(), self.input_dim());
        let wanted = [
            (&self.w_update, (d_h, d_in)),
            (&self.w_cand, (d_h, d_in)),
            (&self.u_reset, (d_h, d_h)),
            (&self.u_update, (d_h, d_h)),
            (&self.u_cand, (d_h, d_h)),
        ];
        for (m, shape) in wanted {
            if m.shape() != shape {
                return Err(Error::dim("recurrent cell weights", format!("{shape:?}"), format!("{:?}", m.shape())));
            }
        }
        for b in [&self.b_reset, &self.b_update, &self.b_cand] {
            if b.len() != d_h {
                return Err(Error::dim("recurrent cell bias", d_h, b.len()));
            }
        }
        Ok(())
    }

    pub fn step(&self, x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        self.check_shapes()?;
        if x.len() != self.input_dim() {
            return Err(Error::dim("recurrent cell input", self.input_dim(), x.len()));
        }
        if h.len() != self.state_dim() {
            return Err(Error::dim("recurrent cell state", self.state_dim(), h.len()));
        }
        let gate = |w: &Matrix, u: &Matrix, b: &[f64], state: &[f64]| -> Result<Vec<f64>> {
            let mut a = w.matvec(x)?;
            add_assign(&mut a, &u.matvec(state)?);
            add_assign(&mut a, b);
            Ok(a)
        };
        let reset: Vec<f64> = gate(&self.w_reset, &self.u_reset, &self.b_reset, h)?
            .into_iter()
            .map(sigmoid)
            .collect();
        let update: Vec<f64> = gate(&self.w_update, &self.u_update, &self.b_update, h)?
            .into_iter()
            .map(sigmoid)
            .collect();
        let gated: Vec<f64> = reset.iter().zip(h).map(|(r, h)| r * h).collect();
        let cand = gate(&self.w_cand, &self.u_cand, &self.b_cand, &gated)?;
        Ok(h.iter()
            .zip(&update)
            .zip(&cand)
            .map(|((h, u), c)| u * h + (1.0 - u) * c.tanh())
            .collect())
    }
}
