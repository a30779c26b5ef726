//! C3v point-group action on orbitals and determinant spaces, and irrep
//! assignment of many-body states.
//!
//! Convention: the sigma_v mirror plane contains the e_x axis, so under
//! sigma_v e_x -> e_x and e_y -> -e_y, while A2 orbitals change sign.

use nalgebra::DMatrix;

use crate::determinant::DeterminantSpace;
use crate::error::{Error, Result};
use crate::integrals::OrbSym;

/// C3v character table over the classes {E, 2C3, 3sigma_v}.
pub const CHARACTER_TABLE: [(IrrepLabel, [f64; 3]); 3] = [
    (IrrepLabel::A1, [1.0, 1.0, 1.0]),
    (IrrepLabel::A2, [1.0, 1.0, -1.0]),
    (IrrepLabel::E, [2.0, -1.0, 0.0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum IrrepLabel {
    A1,
    A2,
    E,
}

impl std::fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IrrepLabel::A1 => write!(f, "A1"),
            IrrepLabel::A2 => write!(f, "A2"),
            IrrepLabel::E => write!(f, "E"),
        }
    }
}

/// Orbital-space orthogonal matrices for the two C3v generators.
#[derive(Debug, Clone)]
pub struct PointGroupRep {
    pub c3: DMatrix<f64>,
    pub sigma_v: DMatrix<f64>,
}

/// Builds the orbital representation from the declared irrep labels:
/// identity blocks on A1/A2 under C3, 2x2 rotation blocks on each (e_x, e_y)
/// pair, and sigma_v with e_x -> e_x, e_y -> -e_y, A2 -> -A2.
pub fn orbital_rep(orbsym: &[OrbSym]) -> Result<PointGroupRep> {
    let n = orbsym.len();
    let mut c3 = DMatrix::identity(n, n);
    let mut sigma_v = DMatrix::identity(n, n);
    let theta = 2.0 * std::f64::consts::PI / 3.0;
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    for (i, sym) in orbsym.iter().enumerate() {
        match *sym {
            OrbSym::A1 => {}
            OrbSym::A2 => {
                sigma_v[(i, i)] = -1.0;
            }
            OrbSym::Ex { partner } => {
                let y = partner;
                if y >= n || orbsym[y] != (OrbSym::Ey { partner: i }) {
                    return Err(Error::DanglingPartner { orb: i });
                }
                // Column i transforms like e_x, column y like e_y.
                c3[(i, i)] = cos_t;
                c3[(y, i)] = sin_t;
                c3[(i, y)] = -sin_t;
                c3[(y, y)] = cos_t;
                sigma_v[(i, i)] = 1.0;
                sigma_v[(y, y)] = -1.0;
            }
            OrbSym::Ey { partner } => {
                // Handled from the Ex side; just validate mutuality.
                if partner >= n || orbsym[partner] != (OrbSym::Ex { partner: i }) {
                    return Err(Error::DanglingPartner { orb: i });
                }
            }
        }
    }
    Ok(PointGroupRep { c3, sigma_v })
}

impl PointGroupRep {
    /// All six group elements: E, C3, C3^2, sigma_1, sigma_2, sigma_3.
    pub fn elements(&self) -> Vec<DMatrix<f64>> {
        let n = self.c3.nrows();
        let e = DMatrix::identity(n, n);
        let c3 = self.c3.clone();
        let c3_2 = &c3 * &c3;
        let s1 = self.sigma_v.clone();
        let s2 = &c3 * &s1;
        let s3 = &c3_2 * &s1;
        vec![e, c3, c3_2, s1, s2, s3]
    }
}

fn subdeterminant(u: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => u[(rows[0], cols[0])],
        2 => {
            u[(rows[0], cols[0])] * u[(rows[1], cols[1])]
                - u[(rows[0], cols[1])] * u[(rows[1], cols[0])]
        }
        _ => {
            let k = rows.len();
            let m = DMatrix::from_fn(k, k, |i, j| u[(rows[i], cols[j])]);
            m.determinant()
        }
    }
}

/// Applies the many-body operator induced by the orbital orthogonal matrix
/// `u` to a CI vector: `<D'| U |D> = det(u[occ', occ])` per spin channel.
pub fn determinant_rep_apply(
    u: &DMatrix<f64>,
    space: &DeterminantSpace,
    vector: &[f64],
) -> Result<Vec<f64>> {
    let n = space.n_orb;
    let drift = (u.transpose() * u - DMatrix::identity(n, n)).norm();
    if drift > 1e-10 {
        return Err(Error::NonOrthogonal(drift));
    }
    if vector.len() != space.len() {
        return Err(Error::DimensionMismatch(
            "vector length != space size".into(),
        ));
    }
    let occ_up: Vec<Vec<usize>> = space.dets.iter().map(|d| d.occupied_up()).collect();
    let occ_dn: Vec<Vec<usize>> = space.dets.iter().map(|d| d.occupied_down()).collect();
    let mut out = vec![0.0; space.len()];
    for (j, &c) in vector.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let amp_up = subdeterminant(u, &occ_up[i], &occ_up[j]);
            if amp_up == 0.0 {
                continue;
            }
            let amp_dn = subdeterminant(u, &occ_dn[i], &occ_dn[j]);
            *slot += amp_up * amp_dn * c;
        }
    }
    Ok(out)
}

/// Assigns the C3v irrep of a degenerate cluster of states by measuring
/// class characters chi(g) = sum_i <Psi_i| U(g) |Psi_i>.
pub fn assign_irrep(
    states: &[&[f64]],
    space: &DeterminantSpace,
    rep: &PointGroupRep,
) -> Result<IrrepLabel> {
    if states.is_empty() || states.len() > 2 {
        return Err(Error::ClusterTooLarge(states.len()));
    }
    let chi_e = states.len() as f64;
    let mut chi_c3 = 0.0;
    let mut chi_sv = 0.0;
    for v in states {
        let c3v = determinant_rep_apply(&rep.c3, space, v)?;
        let svv = determinant_rep_apply(&rep.sigma_v, space, v)?;
        chi_c3 += dot(v, &c3v);
        chi_sv += dot(v, &svv);
    }
    for (label, chars) in CHARACTER_TABLE {
        if (chi_e - chars[0]).abs() < 1e-6
            && (chi_c3 - chars[1]).abs() < 1e-6
            && (chi_sv - chars[2]).abs() < 1e-6
        {
            return Ok(label);
        }
    }
    Err(Error::NoIrrepMatch {
        chi_e,
        chi_c3,
        chi_sv,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
