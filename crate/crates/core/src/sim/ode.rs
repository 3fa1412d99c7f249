use super::{guard, TimeGrid, Trajectory, DEFAULT_BLOW_UP_BOUND};
use crate::error::{Error, Result};
use crate::model::KineticModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Abort once any `|x^k|` exceeds this.
    pub blow_up_bound: f64,
    /// Integrate only the drift of a stochastic model.
    pub ignore_diffusion: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            blow_up_bound: DEFAULT_BLOW_UP_BOUND,
            ignore_diffusion: false,
        }
    }
}

struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

fn rk4_step(model: &KineticModel, x: &mut [f64], t: f64, h: f64, s: &mut Rk4Scratch) -> Result<()> {
    let half = 0.5 * h;
    model.drift_into(x, t, &mut s.k1)?;
    for i in 0..x.len() {
        s.tmp[i] = x[i] + half * s.k1[i];
    }
    model.drift_into(&s.tmp, t + half, &mut s.k2)?;
    for i in 0..x.len() {
        s.tmp[i] = x[i] + half * s.k2[i];
    }
    model.drift_into(&s.tmp, t + half, &mut s.k3)?;
    for i in 0..x.len() {
        s.tmp[i] = x[i] + h * s.k3[i];
    }
    model.drift_into(&s.tmp, t + h, &mut s.k4)?;
    for i in 0..x.len() {
        x[i] += h / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
    Ok(())
}

/// Classical fourth-order Runge–Kutta with step `(t_{l+1} - t_l) / substeps`
/// inside each observation interval. Starts from the model's initial values at `t_1`.
pub fn integrate_rk4(model: &KineticModel, grid: &TimeGrid, opts: &IntegrateOptions) -> Result<Trajectory> {
    if model.is_stochastic() && !opts.ignore_diffusion {
        return Err(Error::invalid(
            "model has diffusion terms; use simulate_sde or set ignore_diffusion",
        ));
    }
    let d = model.dim();
    let mut x = model.require_initial()?;
    let names = model.names();
    let pts = grid.points();
    guard(&x, names, opts.blow_up_bound, pts[0])?;
    let mut scratch = Rk4Scratch {
        k1: vec![0.0; d],
        k2: vec![0.0; d],
        k3: vec![0.0; d],
        k4: vec![0.0; d],
        tmp: vec![0.0; d],
    };
    let mut values = Vec::with_capacity(pts.len());
    values.push(x.clone());
    let mut warned = false;
    let m = grid.substeps();
    for w in pts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = (t1 - t0) / m as f64;
        for j in 0..m {
            let t = t0 + j as f64 * h;
            rk4_step(model, &mut x, t, h, &mut scratch)?;
            guard(&x, names, opts.blow_up_bound, t + h)?;
        }
        if !warned && x.iter().any(|&v| v < -1e-9) {
            log::warn!("negative concentration at t = {t1}");
            warned = true;
        }
        values.push(x.clone());
    }
    Ok(Trajectory {
        grid: grid.clone(),
        values,
    })
}
