//! Time propagation `v(t) = e^{tL} v(0)` for linear generators.
//!
//! Two integrators are available: an adaptive Dormand–Prince 5(4) scheme
//! (the default for [`propagate`]) and a truncated Taylor series with
//! substepping, which keeps the error near machine precision and is used for
//! long spin-chain runs. The dense exponential [`crate::linalg::expm`] serves
//! as the oracle for both in the tests.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{OtocError, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};

/// A linear map applied to flat complex vectors.
pub trait LinearGenerator: Sync {
    fn dim(&self) -> usize;

    /// `out = L x`; `out` is fully overwritten.
    fn apply(&self, x: &[C64], out: &mut [C64]);
}

impl LinearGenerator for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let n = self.nrows();
        out.iter_mut().for_each(|o| *o = ZERO);
        // column-major storage: accumulate column by column
        for (c, &xc) in x.iter().enumerate() {
            if xc == ZERO {
                continue;
            }
            let col = &self.as_slice()[c * n..(c + 1) * n];
            for (o, &m) in out.iter_mut().zip(col) {
                *o += m * xc;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Adaptive explicit Runge–Kutta (Dormand–Prince 5(4)).
    DormandPrince { rtol: f64, atol: f64, max_steps: usize },
    /// Taylor series of the exponential, truncated once terms fall below `tol`
    /// relative to the partial sum.
    Taylor { tol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::DormandPrince { rtol: 1e-9, atol: 1e-12, max_steps: 1_000_000 }
    }
}

impl Integrator {
    pub fn taylor() -> Self {
        Integrator::Taylor { tol: 1e-15 }
    }
}

/// `e^{tL} v` for a dense generator matrix with the default integrator.
pub fn propagate(l: &CMatrix, v: &CVector, t: f64) -> Result<CVector> {
    propagate_with(l, v, t, Integrator::default())
}

pub fn propagate_with(l: &CMatrix, v: &CVector, t: f64, integrator: Integrator) -> Result<CVector> {
    if l.nrows() != l.ncols() || l.nrows() != v.len() {
        return Err(OtocError::DimensionMismatch(format!(
            "generator {}x{} with vector of length {}",
            l.nrows(),
            l.ncols(),
            v.len()
        )));
    }
    let mut evo = Evolution::new(l, v.as_slice().to_vec(), integrator)?;
    evo.advance_to(t)?;
    Ok(CVector::from_vec(evo.into_state()))
}

/// Crude spectral-norm estimate by power iteration on `L†L`-free products.
pub fn norm_estimate<G: LinearGenerator + ?Sized>(gen: &G, iterations: usize) -> f64 {
    let n = gen.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let mut x: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let mut y = vec![ZERO; n];
    let mut est = 0.0f64;
    for _ in 0..iterations {
        let nx = l2(&x);
        if nx == 0.0 {
            return est;
        }
        x.iter_mut().for_each(|z| *z /= nx);
        gen.apply(&x, &mut y);
        est = est.max(l2(&y));
        std::mem::swap(&mut x, &mut y);
    }
    est
}

fn l2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Stateful forward propagation, reusable across a grid of output times.
pub struct Evolution<'g, G: LinearGenerator + ?Sized> {
    gen: &'g G,
    state: Vec<C64>,
    t: f64,
    integrator: Integrator,
    step: f64,
    norm: f64,
    steps_taken: usize,
    k: [Vec<C64>; 7],
    scratch: Vec<C64>,
    trial: Vec<C64>,
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl<'g, G: LinearGenerator + ?Sized> Evolution<'g, G> {
    pub fn new(gen: &'g G, state: Vec<C64>, integrator: Integrator) -> Result<Self> {
        let n = gen.dim();
        if state.len() != n {
            return Err(OtocError::DimensionMismatch(format!(
                "state of length {} for generator of dimension {n}",
                state.len()
            )));
        }
        let norm = norm_estimate(gen, 30) * 1.25;
        let step = if norm > 0.0 { 0.5 / norm } else { 1.0 };
        Ok(Self {
            gen,
            state,
            t: 0.0,
            integrator,
            step,
            norm,
            steps_taken: 0,
            k: std::array::from_fn(|_| vec![ZERO; n]),
            scratch: vec![ZERO; n],
            trial: vec![ZERO; n],
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[C64] {
        &self.state
    }

    pub fn into_state(self) -> Vec<C64> {
        self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if !(t_target.is_finite()) || t_target < self.t {
            return Err(OtocError::InvalidArgument(format!(
                "cannot propagate from t = {} to t = {t_target}",
                self.t
            )));
        }
        if t_target == self.t || self.norm == 0.0 {
            self.t = t_target;
            return Ok(());
        }
        match self.integrator {
            Integrator::DormandPrince { rtol, atol, max_steps } => {
                self.dormand_prince(t_target, rtol, atol, max_steps)
            }
            Integrator::Taylor { tol } => self.taylor(t_target, tol),
        }
    }

    fn dormand_prince(&mut self, t_target: f64, rtol: f64, atol: f64, max_steps: usize) -> Result<()> {
        let n = self.state.len();
        // FSAL: k[0] holds f(y) at the current point
        self.gen.apply(&self.state, &mut self.k[0]);
        let mut local_steps = 0usize;
        while self.t < t_target {
            if local_steps >= max_steps {
                return Err(OtocError::NonConvergence {
                    t: self.t,
                    reason: format!("exceeded {max_steps} steps"),
                });
            }
            let remaining = t_target - self.t;
            let last = self.step >= remaining;
            let h = if last { remaining } else { self.step };
            if h < 1e-14 * t_target.max(1.0) {
                return Err(OtocError::NonConvergence {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:.3e})"),
                });
            }
            let y = &self.state;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let s = &mut self.scratch;

            for i in 0..n {
                s[i] = y[i] + k1[i] * (h * A21);
            }
            self.gen.apply(s, k2);
            for i in 0..n {
                s[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
            }
            self.gen.apply(s, k3);
            for i in 0..n {
                s[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            self.gen.apply(s, k4);
            for i in 0..n {
                s[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            self.gen.apply(s, k5);
            for i in 0..n {
                s[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            self.gen.apply(s, k6);
            let ynew = &mut self.trial;
            for i in 0..n {
                ynew[i] = y[i]
                    + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * h;
            }
            self.gen.apply(ynew, k7);
            // max-norm error control; the RMS norm lets global error drift past rtol
            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * h;
                let scale = atol + rtol * y[i].norm().max(ynew[i].norm());
                err = err.max(e.norm() / scale);
            }

            local_steps += 1;
            if err <= 1.0 {
                self.t = if last { t_target } else { self.t + h };
                std::mem::swap(&mut self.state, &mut self.trial);
                self.k.swap(0, 6);
                self.steps_taken += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.step = h * factor;
                } else {
                    // keep the controller's step for the next interval
                    self.step = self.step.max(h * factor.min(1.0));
                }
            } else {
                self.step = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(())
    }

    fn taylor(&mut self, t_target: f64, tol: f64) -> Result<()> {
        const THETA: f64 = 4.0;
        const MAX_TERMS: usize = 80;
        let n = self.state.len();
        let total = t_target - self.t;
        let mut substeps = ((self.norm * total) / THETA).ceil().max(1.0) as usize;
        let mut attempts = 0;
        'outer: loop {
            let h = total / substeps as f64;
            let start = self.state.clone();
            for _ in 0..substeps {
                // term_k = (hL)^k / k! y, summed until negligible twice in a row
                self.scratch.copy_from_slice(&self.state);
                let mut small = 0;
                let mut converged = false;
                for k in 1..=MAX_TERMS {
                    self.gen.apply(&self.scratch, &mut self.trial);
                    let f = h / k as f64;
                    let mut tn = 0.0;
                    for i in 0..n {
                        let v = self.trial[i] * f;
                        self.scratch[i] = v;
                        self.state[i] += v;
                        tn += v.norm_sqr();
                    }
                    if tn.sqrt() <= tol * l2(&self.state) {
                        small += 1;
                        if small == 2 {
                            converged = true;
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
                if !converged {
                    attempts += 1;
                    if attempts > 8 {
                        return Err(OtocError::NonConvergence {
                            t: self.t,
                            reason: "Taylor series did not converge".into(),
                        });
                    }
                    self.state = start;
                    substeps *= 2;
                    continue 'outer;
                }
                self.steps_taken += 1;
            }
            break;
        }
        self.t = t_target;
        Ok(())
    }
}
