use std::sync::Arc;

use crate::linear::propagator_with;
use crate::spectral::{Grid, SpectralField, C64};
use crate::systems::{Layout, System, SystemKind};

type M3 = [[f64; 3]; 3];
type M2 = [[f64; 2]; 2];

/// Per-mode linear operators, stored once per distinct `|k|²` and applied to
/// a packed state through the longitudinal/transverse split of each mode.
///
/// The 3×3 block acts on `(φ, a, ψ)` with `φ = i ξ̂·u`, `ψ = i ξ̂·v`; the
/// 2×2 block acts on the transverse parts `(u − ξ̂ ξ̂·u, v − ξ̂ ξ̂·v)`. The
/// zero mode is treated as transverse.
#[derive(Clone, Debug)]
pub struct ModeTable {
    grid: Arc<Grid>,
    kind: SystemKind,
    layout: Layout,
    class_of_k2: Vec<u32>,
    a: Vec<M3>,
    b: Vec<M2>,
    /// factor applied to the transported density
    rho: f64,
}

const NO_CLASS: u32 = u32::MAX;

impl ModeTable {
    /// Builds a table from a map `|ξ| ↦ (3×3 block, 2×2 block)`.
    pub fn build(sys: &System, f: impl Fn(f64) -> (M3, M2)) -> Self {
        let g = sys.grid.clone();
        let max_k2 = (0..g.len()).map(|i| g.k2(i)).max().unwrap_or(0) as usize;
        let mut class_of_k2 = vec![NO_CLASS; max_k2 + 1];
        let mut a = Vec::new();
        let mut b = Vec::new();
        for idx in 0..g.len() {
            let k2 = g.k2(idx) as usize;
            if class_of_k2[k2] == NO_CLASS {
                class_of_k2[k2] = a.len() as u32;
                let (ma, mb) = f((k2 as f64).sqrt() * g.dxi());
                a.push(ma);
                b.push(mb);
            }
        }
        ModeTable { grid: g, kind: sys.kind, layout: sys.layout(), class_of_k2, a, b, rho: 1.0 }
    }

    /// `e^{dt L}` per mode.
    pub fn propagators(sys: &System, dt: f64) -> Self {
        let k = sys.linear_coeffs();
        Self::build(sys, |xi| {
            let p = propagator_with(xi, &k, dt);
            (p.a, p.b)
        })
    }

    /// `(c I − dt L)^{-1}` per mode.
    pub fn resolvents(sys: &System, c: f64, dt: f64) -> Self {
        let k = sys.linear_coeffs();
        let mut t = Self::build(sys, |xi| {
            let sa = crate::linear::compressible_symbol(xi, &k);
            let sb = crate::linear::incompressible_symbol(xi, &k);
            let mut ma = [[0.0; 3]; 3];
            let mut mb = [[0.0; 2]; 2];
            for i in 0..3 {
                for j in 0..3 {
                    ma[i][j] = if i == j { c } else { 0.0 } - dt * sa[i][j];
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    mb[i][j] = if i == j { c } else { 0.0 } - dt * sb[i][j];
                }
            }
            (inverse3(&ma), inverse2(&mb))
        });
        t.rho = 1.0 / c;
        t
    }

    pub fn num_classes(&self) -> usize {
        self.a.len()
    }

    /// Blocks used at mode `idx`.
    pub fn entry(&self, idx: usize) -> (&M3, &M2) {
        let c = self.class_of_k2[self.grid.k2(idx) as usize] as usize;
        (&self.a[c], &self.b[c])
    }

    /// Applies the table to a packed state. The transported density has no
    /// linear part and is only rescaled.
    pub fn apply(&self, x: &SpectralField) -> SpectralField {
        let mut out = x.clone();
        self.apply_in_place(&mut out);
        out
    }

    pub fn apply_in_place(&self, x: &mut SpectralField) {
        let g = self.grid.clone();
        let d = g.dim();
        let n = g.len();
        let lay = self.layout;
        let data = x.data_mut();
        if self.rho != 1.0 {
            data[..n].iter_mut().for_each(|z| *z *= self.rho);
        }
        let i_unit = C64::new(0.0, 1.0);
        for idx in 0..n {
            let k2 = g.k2(idx);
            let (ea, eb) = self.entry(idx);
            let mut e = [0.0; 3];
            if k2 > 0 {
                let norm = (k2 as f64).sqrt() * g.dxi();
                for (ax, ev) in e.iter_mut().enumerate().take(d) {
                    *ev = g.xi(idx, ax) / norm;
                }
            }
            let get = |data: &[C64], c: usize| data[c * n + idx];
            let mut v = [C64::new(0.0, 0.0); 3];
            for i in 0..d {
                v[i] = get(data, lay.v + i);
            }
            let dv: C64 = (0..d).map(|i| v[i] * e[i]).sum();
            let psi = i_unit * dv;
            let mut vt = [C64::new(0.0, 0.0); 3];
            for i in 0..d {
                vt[i] = v[i] - dv * e[i];
            }
            match self.kind {
                SystemKind::Tns => {
                    for i in 0..d {
                        data[(lay.v + i) * n + idx] = v[i] * eb[1][1];
                    }
                }
                SystemKind::Df | SystemKind::DfScaled => {
                    let ai = lay.a.unwrap();
                    let a = get(data, ai);
                    let a1 = a * ea[1][1] + psi * ea[1][2];
                    let psi1 = a * ea[2][1] + psi * ea[2][2];
                    data[ai * n + idx] = a1;
                    for i in 0..d {
                        data[(lay.v + i) * n + idx] = vt[i] * eb[1][1] - i_unit * psi1 * e[i];
                    }
                }
                SystemKind::EulerNs | SystemKind::EulerNsScaled => {
                    let ui = lay.u.unwrap();
                    let ai = lay.a.unwrap();
                    let a = get(data, ai);
                    let mut u = [C64::new(0.0, 0.0); 3];
                    for i in 0..d {
                        u[i] = get(data, ui + i);
                    }
                    let du: C64 = (0..d).map(|i| u[i] * e[i]).sum();
                    let phi = i_unit * du;
                    let y = [phi, a, psi];
                    let mut y1 = [C64::new(0.0, 0.0); 3];
                    for (r, out) in y1.iter_mut().enumerate() {
                        *out = y[0] * ea[r][0] + y[1] * ea[r][1] + y[2] * ea[r][2];
                    }
                    data[ai * n + idx] = y1[1];
                    for i in 0..d {
                        let ut = u[i] - du * e[i];
                        let ut1 = ut * eb[0][0] + vt[i] * eb[0][1];
                        let vt1 = ut * eb[1][0] + vt[i] * eb[1][1];
                        data[(ui + i) * n + idx] = ut1 - i_unit * y1[0] * e[i];
                        data[(lay.v + i) * n + idx] = vt1 - i_unit * y1[2] * e[i];
                    }
                }
            }
        }
    }
}

fn inverse2(m: &M2) -> M2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn inverse3(m: &M3) -> M3 {
    let c = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = c(j, i) / det;
        }
    }
    out
}
