//! Marker-and-cell (MAC) finite differences for Stokes flow on `[-1, 1]²`.
//!
//! With `N` cells per side and `h = 2/N`, the `u` unknowns sit on interior
//! vertical faces and the `v` unknowns on interior horizontal faces, so
//! `n = 2N(N-1)`. There is one pressure per cell, giving `N²` rows of `B`
//! before the leading rows are dropped.
//!
//! `A` is `1/h²` times the 5-point Laplacian for each velocity component.
//! Tangential wall values enter through ghost points, which puts 5 (or 6
//! in a corner) on the diagonal. `B` is minus the divergence scaled by
//! `1/h`, so `Bᵀ` is the pressure gradient.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, SparseMatrix};
use crate::saddle::SaddlePointSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    /// Unit tangential velocity on the top wall, including its corners.
    LidDriven,
    /// Parabolic `u = 1 - y²` at the left and right walls.
    Channel,
    /// `u = 20xy³`, `v = 5x⁴ - 5y⁴` on the whole boundary.
    Colliding,
}

impl Flow {
    pub const ALL: [Flow; 3] = [Flow::LidDriven, Flow::Channel, Flow::Colliding];

    pub fn name(self) -> &'static str {
        match self {
            Flow::LidDriven => "lid",
            Flow::Channel => "channel",
            Flow::Colliding => "colliding",
        }
    }

    /// Boundary velocity `(u, v)` at a wall point.
    pub fn boundary_velocity(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Flow::LidDriven => {
                if y >= 1.0 {
                    (1.0, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }
            Flow::Channel => {
                if x <= -1.0 || x >= 1.0 {
                    (1.0 - y * y, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }
            Flow::Colliding => (20.0 * x * y.powi(3), 5.0 * x.powi(4) - 5.0 * y.powi(4)),
        }
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lid" | "lid-driven" | "liddriven" | "cavity" => Ok(Flow::LidDriven),
            "channel" | "poiseuille" => Ok(Flow::Channel),
            "colliding" => Ok(Flow::Colliding),
            other => Err(Error::InvalidConfig(format!(
                "unknown problem '{other}' (expected lid, channel or colliding)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StokesSpec {
    pub cells_per_side: usize,
    pub flow: Flow,
    pub drop_rows: usize,
}

impl StokesSpec {
    pub fn new(cells_per_side: usize, flow: Flow) -> Self {
        Self {
            cells_per_side,
            flow,
            drop_rows: 1,
        }
    }

    pub fn with_drop_rows(mut self, drop_rows: usize) -> Self {
        self.drop_rows = drop_rows;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells_per_side < 4 {
            return Err(Error::InvalidConfig(format!(
                "need at least 4 cells per side, got {}",
                self.cells_per_side
            )));
        }
        if self.drop_rows > 2 {
            return Err(Error::InvalidConfig(format!(
                "drop_rows must be 0, 1 or 2, got {}",
                self.drop_rows
            )));
        }
        Ok(())
    }

    /// Velocity unknowns, `2N(N-1)`.
    pub fn n(&self) -> usize {
        2 * self.cells_per_side * (self.cells_per_side - 1)
    }

    /// Pressure unknowns after dropping rows.
    pub fn m(&self) -> usize {
        self.cells_per_side * self.cells_per_side - self.drop_rows
    }

    /// `"MAC lid N=16"`.
    pub fn label(&self) -> String {
        format!("MAC {} N={}", self.flow, self.cells_per_side)
    }
}

/// Builds and validates the MAC system. The right-hand side carries the
/// boundary data of the chosen flow.
pub fn generate_stokes(spec: &StokesSpec) -> Result<SaddlePointSystem> {
    let sys = assemble_stokes(spec)?;
    if cholesky(&sys.b.gram()).is_err() {
        return Err(Error::RankRepairFailed {
            drop_rows: spec.drop_rows,
        });
    }
    sys.validate().into_result()?;
    Ok(sys)
}

/// The MAC blocks without the rank check, so `drop_rows = 0` can be
/// inspected.
pub fn assemble_stokes(spec: &StokesSpec) -> Result<SaddlePointSystem> {
    spec.validate()?;
    let nc = spec.cells_per_side;
    let h = 2.0 / nc as f64;
    let inv_h2 = 1.0 / (h * h);
    let inv_h = 1.0 / h;
    let flow = spec.flow;

    // u(i, j): face x = -1 + i h, i in 1..N, cell row j in 0..N
    // v(i, j): face y = -1 + j h, j in 1..N, cell column i in 0..N
    let nu = (nc - 1) * nc;
    let u_idx = |i: usize, j: usize| j * (nc - 1) + (i - 1);
    let v_idx = |i: usize, j: usize| nu + (j - 1) * nc + i;
    let p_idx = |i: usize, j: usize| j * nc + i;
    let xf = |i: usize| -1.0 + i as f64 * h;
    let xc = |i: usize| -1.0 + (i as f64 + 0.5) * h;

    let n = 2 * nu;
    let mut a_trip = Vec::with_capacity(5 * n);
    let mut f = vec![0.0; n];

    for j in 0..nc {
        for i in 1..nc {
            let row = u_idx(i, j);
            let mut diag = 4.0;
            // x-neighbours: interior faces or walls carrying the normal velocity
            for (ni, wall_x) in [(i - 1, -1.0), (i + 1, 1.0)] {
                if ni == 0 || ni == nc {
                    f[row] += inv_h2 * flow.boundary_velocity(wall_x, xc(j)).0;
                } else {
                    a_trip.push((row, u_idx(ni, j), -inv_h2));
                }
            }
            // y-neighbours: ghost points across the bottom and top walls
            if j == 0 {
                diag += 1.0;
                f[row] += 2.0 * inv_h2 * flow.boundary_velocity(xf(i), -1.0).0;
            } else {
                a_trip.push((row, u_idx(i, j - 1), -inv_h2));
            }
            if j == nc - 1 {
                diag += 1.0;
                f[row] += 2.0 * inv_h2 * flow.boundary_velocity(xf(i), 1.0).0;
            } else {
                a_trip.push((row, u_idx(i, j + 1), -inv_h2));
            }
            a_trip.push((row, row, diag * inv_h2));
        }
    }

    for j in 1..nc {
        for i in 0..nc {
            let row = v_idx(i, j);
            let mut diag = 4.0;
            for (nj, wall_y) in [(j - 1, -1.0), (j + 1, 1.0)] {
                if nj == 0 || nj == nc {
                    f[row] += inv_h2 * flow.boundary_velocity(xc(i), wall_y).1;
                } else {
                    a_trip.push((row, v_idx(i, nj), -inv_h2));
                }
            }
            if i == 0 {
                diag += 1.0;
                f[row] += 2.0 * inv_h2 * flow.boundary_velocity(-1.0, xf(j)).1;
            } else {
                a_trip.push((row, v_idx(i - 1, j), -inv_h2));
            }
            if i == nc - 1 {
                diag += 1.0;
                f[row] += 2.0 * inv_h2 * flow.boundary_velocity(1.0, xf(j)).1;
            } else {
                a_trip.push((row, v_idx(i + 1, j), -inv_h2));
            }
            a_trip.push((row, row, diag * inv_h2));
        }
    }

    // B = -div / h; g collects the wall fluxes so that -B x = g
    let mp = nc * nc;
    let mut b_trip = Vec::with_capacity(4 * mp);
    let mut g = vec![0.0; mp];
    for j in 0..nc {
        for i in 0..nc {
            let row = p_idx(i, j);
            if i + 1 < nc {
                b_trip.push((row, u_idx(i + 1, j), -inv_h));
            } else {
                g[row] -= inv_h * flow.boundary_velocity(1.0, xc(j)).0;
            }
            if i > 0 {
                b_trip.push((row, u_idx(i, j), inv_h));
            } else {
                g[row] += inv_h * flow.boundary_velocity(-1.0, xc(j)).0;
            }
            if j + 1 < nc {
                b_trip.push((row, v_idx(i, j + 1), -inv_h));
            } else {
                g[row] -= inv_h * flow.boundary_velocity(xc(i), 1.0).1;
            }
            if j > 0 {
                b_trip.push((row, v_idx(i, j), inv_h));
            } else {
                g[row] += inv_h * flow.boundary_velocity(xc(i), -1.0).1;
            }
        }
    }

    let a = SparseMatrix::from_triplets(n, n, &a_trip)?;
    let b = SparseMatrix::from_triplets(mp, n, &b_trip)?.drop_leading_rows(spec.drop_rows)?;
    let mut sys = SaddlePointSystem::new(a, b, spec.label());
    sys.f = f;
    sys.g = g.split_off(spec.drop_rows);
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigs;

    #[test]
    fn sizes() {
        let sys = generate_stokes(&StokesSpec::new(4, Flow::LidDriven)).unwrap();
        assert_eq!((sys.n(), sys.m()), (24, 15));
        let spec = StokesSpec::new(16, Flow::Channel);
        assert_eq!((spec.n(), spec.m()), (480, 255));
        let sys = generate_stokes(&spec).unwrap();
        assert_eq!((sys.n(), sys.m()), (480, 255));
    }

    #[test]
    fn laplacian_structure() {
        for flow in Flow::ALL {
            let sys = generate_stokes(&StokesSpec::new(8, flow)).unwrap();
            let d = sys.a.to_dense();
            assert_eq!(d.relative_asymmetry(), 0.0);
            for i in 0..sys.n() {
                assert!(d[(i, i)] > 0.0);
                assert!(d.row(i).iter().sum::<f64>() >= 0.0);
            }
        }
    }

    #[test]
    fn gradient_annihilates_constants() {
        let sys = assemble_stokes(&StokesSpec::new(6, Flow::LidDriven).with_drop_rows(0)).unwrap();
        let bt1 = sys.b.spmv_t(&vec![1.0; sys.m()]).unwrap();
        assert!(bt1.iter().all(|v| v.abs() < 1e-12));
        let eig = sym_eigs(&sys.b.gram().to_dense()).unwrap();
        assert!(eig[0] < 1e-10);
        assert!(matches!(
            generate_stokes(&StokesSpec::new(6, Flow::LidDriven).with_drop_rows(0)),
            Err(Error::RankRepairFailed { drop_rows: 0 })
        ));
    }

    #[test]
    fn one_dropped_row_restores_rank() {
        let sys = generate_stokes(&StokesSpec::new(8, Flow::Colliding)).unwrap();
        let eig = sym_eigs(&sys.b.gram().to_dense()).unwrap();
        assert!(eig[0] >= 1e-10);
        assert!(sys.m() < sys.n());
    }

    #[test]
    fn lid_data_only_on_top_row() {
        let spec = StokesSpec::new(4, Flow::LidDriven);
        let sys = generate_stokes(&spec).unwrap();
        let inv_h2 = 4.0;
        for (k, fk) in sys.f.iter().enumerate() {
            let top_u = k < 12 && k / 3 == 3;
            let expected = if top_u { 2.0 * inv_h2 } else { 0.0 };
            assert_eq!(*fk, expected, "entry {k}");
        }
        assert!(sys.g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn channel_flux_balances() {
        // inflow equals outflow, so the wall fluxes sum to zero over all cells
        let sys = assemble_stokes(&StokesSpec::new(8, Flow::Channel).with_drop_rows(0)).unwrap();
        assert!(sys.g.iter().sum::<f64>().abs() < 1e-12);
        assert!(sys.g.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn bad_specs() {
        assert!(StokesSpec::new(2, Flow::Channel).validate().is_err());
        assert!(StokesSpec::new(8, Flow::Channel)
            .with_drop_rows(3)
            .validate()
            .is_err());
        assert_eq!("lid".parse::<Flow>().unwrap(), Flow::LidDriven);
        assert!("duct".parse::<Flow>().is_err());
    }
}
