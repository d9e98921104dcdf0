use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use super::{CMode, ChebPlan, GammaTransform, SpectralCoeffs1D, SsfftPlan};
use crate::contour::{Block, GammaQuadrature};
use crate::{Error, Result, I};

/// Fast 1D transform pair for one contour.
#[derive(Debug)]
pub struct Plan1D {
    pub quad: GammaQuadrature,
    m: usize,
    e1: SsfftPlan,
    e3: SsfftPlan,
    /// `e^{Hx_j}`
    grow: Vec<f64>,
    /// `e^{-Hx_j}`
    decay: Vec<f64>,
    /// Node indices summed directly, with `e^{∓iζ_k x_j}` rows.
    direct: Vec<usize>,
    direct_fwd: Vec<Complex64>,
    direct_inv: Vec<Complex64>,
    cheb: Option<ChebPlan>,
    fwd_calls: AtomicUsize,
    inv_calls: AtomicUsize,
}

impl Plan1D {
    pub fn new(quad: &GammaQuadrature) -> Result<Self> {
        Self::with_mode(quad, CMode::Auto)
    }

    pub fn with_mode(quad: &GammaQuadrature, mode: CMode) -> Result<Self> {
        let m = quad.config.m;
        let ne = quad.config.ne;
        let (hh, h, kappa) = (quad.height, quad.spacing, quad.kappa as f64);
        let nu = 2 * (ne + 2 * quad.kappa - 1);
        let e3 = SsfftPlan::new(m, ne, nu, hh + kappa * h)?;
        let e1 = SsfftPlan::new(m, ne, nu, -(hh + kappa * h + (ne - 1) as f64 * h))?;
        let grid = quad.grid();
        let grow = grid.iter().map(|x| (hh * x).exp()).collect();
        let decay = grid.iter().map(|x| (-hh * x).exp()).collect();

        let c_range = quad.range(Block::C);
        let cheb = match mode {
            CMode::Direct => None,
            _ if c_range.is_empty() => None,
            CMode::Chebyshev => Some(ChebPlan::new(&grid, hh, quad.block_tau(Block::C), quad.config.eps)?),
            CMode::Auto => {
                let nc_min = (2.0 * hh).ceil() as usize + 8;
                if c_range.len() <= 4 * nc_min {
                    None
                } else {
                    let plan = ChebPlan::new(&grid, hh, quad.block_tau(Block::C), quad.config.eps)?;
                    (c_range.len() > 4 * plan.nc).then_some(plan)
                }
            }
        };
        let mut direct: Vec<usize> = quad.range(Block::A1).collect();
        if cheb.is_none() {
            direct.extend(c_range);
        }
        direct.extend(quad.range(Block::A3));
        let mut direct_fwd = Vec::with_capacity(direct.len() * m);
        let mut direct_inv = Vec::with_capacity(direct.len() * m);
        for &k in &direct {
            let z = quad.nodes[k];
            for x in &grid {
                direct_fwd.push((-I * z * x).exp());
                direct_inv.push((I * z * x).exp());
            }
        }
        Ok(Plan1D {
            quad: quad.clone(),
            m,
            e1,
            e3,
            grow,
            decay,
            direct,
            direct_fwd,
            direct_inv,
            cheb,
            fwd_calls: AtomicUsize::new(0),
            inv_calls: AtomicUsize::new(0),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.quad.len()
    }

    /// Whether the C block goes through the Chebyshev tables.
    pub fn uses_chebyshev(&self) -> bool {
        self.cheb.is_some()
    }

    pub fn cheb(&self) -> Option<&ChebPlan> {
        self.cheb.as_ref()
    }

    pub fn forward(&self, f: &[Complex64]) -> Result<SpectralCoeffs1D> {
        let mut out = SpectralCoeffs1D::zeros(&self.quad);
        self.forward_into(f, &mut out.data)?;
        Ok(out)
    }

    pub fn inverse(&self, c: &SpectralCoeffs1D) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.m];
        self.inverse_into(&c.data, &mut out)?;
        Ok(out)
    }

    /// Transforms `count` contiguous length-`M` rows into `count` length-`N` rows.
    pub fn forward_many(&self, f: &[Complex64], out: &mut [Complex64], count: usize) -> Result<()> {
        let (m, n) = (self.m, self.n());
        if f.len() != m * count {
            return Err(Error::shape(m * count, f.len()));
        }
        if out.len() != n * count {
            return Err(Error::shape(n * count, out.len()));
        }
        self.fwd_calls.fetch_add(count, Ordering::Relaxed);
        let r3 = self.quad.range(Block::E3);
        let r1 = self.quad.range(Block::E1);
        self.e3.forward_many(f, Some(&self.decay), count, out, n, r3.start, false);
        self.e1.forward_many(f, Some(&self.grow), count, out, n, r1.start, false);
        let rc = self.quad.range(Block::C);
        for r in 0..count {
            let row = &f[r * m..(r + 1) * m];
            let dst = &mut out[r * n..(r + 1) * n];
            for (i, &k) in self.direct.iter().enumerate() {
                let t = &self.direct_fwd[i * m..(i + 1) * m];
                dst[k] = t.iter().zip(row).map(|(a, b)| a * b).sum();
            }
            if let Some(c) = &self.cheb {
                c.forward(row, &mut dst[rc.clone()]);
            }
        }
        Ok(())
    }

    /// Transforms `count` contiguous length-`N` rows into `count` length-`M` rows.
    pub fn inverse_many(&self, c: &[Complex64], out: &mut [Complex64], count: usize) -> Result<()> {
        let (m, n) = (self.m, self.n());
        if c.len() != n * count {
            return Err(Error::shape(n * count, c.len()));
        }
        if out.len() != m * count {
            return Err(Error::shape(m * count, out.len()));
        }
        self.inv_calls.fetch_add(count, Ordering::Relaxed);
        let r3 = self.quad.range(Block::E3);
        let r1 = self.quad.range(Block::E1);
        self.e3.inverse_many(c, n, r3.start, Some(&self.grow), count, out, false);
        self.e1.inverse_many(c, n, r1.start, Some(&self.decay), count, out, true);
        let rc = self.quad.range(Block::C);
        for r in 0..count {
            let src = &c[r * n..(r + 1) * n];
            let dst = &mut out[r * m..(r + 1) * m];
            for (i, &k) in self.direct.iter().enumerate() {
                let t = &self.direct_inv[i * m..(i + 1) * m];
                let v = src[k];
                for (o, e) in dst.iter_mut().zip(t) {
                    *o += e * v;
                }
            }
            if let Some(ch) = &self.cheb {
                ch.inverse_add(&src[rc.clone()], dst);
            }
        }
        Ok(())
    }
}

impl GammaTransform for Plan1D {
    fn dim(&self) -> usize {
        1
    }

    fn quadratures(&self) -> Vec<&GammaQuadrature> {
        vec![&self.quad]
    }

    fn grid_len(&self) -> usize {
        self.m
    }

    fn coeff_len(&self) -> usize {
        self.n()
    }

    fn forward_into(&self, f: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.forward_many(f, out, 1)
    }

    fn inverse_into(&self, c: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.inverse_many(c, out, 1)
    }

    fn counts(&self) -> (usize, usize) {
        (self.fwd_calls.load(Ordering::Relaxed), self.inv_calls.load(Ordering::Relaxed))
    }
}
