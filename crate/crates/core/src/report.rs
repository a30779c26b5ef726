//! Structured, serializable results shared by the library surface and
//! the command-line front end: spectrum tables, configuration-character
//! tables, and fine-structure (SOC/SSC) level reports.

use serde::Serialize;

use crate::ci::{compute_spectrum, config_weights, SpinFreeState};
use crate::coupling::{
    build_lz, build_soc, build_ssc, lz_eigenvalues, state_interaction, sz_squared, zfs_extract,
    CoupledState, MultipletBasis, SscMode,
};
use crate::determinant::{enumerate, Determinant};
use crate::error::{Error, Result};
use crate::integrals::{ActiveSpaceIntegrals, CouplingData};
use crate::symmetry::IrrepLabel;

/// Spectroscopic term label such as "3A2" or "1E".
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TermLabel {
    pub multiplicity: u32,
    pub irrep: IrrepLabel,
}

impl std::fmt::Display for TermLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.multiplicity, self.irrep)
    }
}

/// One spin-free level (degenerate cluster) of the spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumLevel {
    pub label: TermLabel,
    /// Excitation energy relative to the ground state (eV).
    pub excitation_ev: f64,
    /// Absolute CI energy (eV).
    pub energy_ev: f64,
    /// Spatial degeneracy (1 for A1/A2, 2 for E).
    pub degeneracy: usize,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub levels: Vec<SpectrumLevel>,
}

/// Clusters an energy-sorted state list into degenerate levels and
/// attaches term labels.
pub fn spectrum_report(states: &[SpinFreeState]) -> Result<SpectrumReport> {
    let e0 = states
        .first()
        .map(|s| s.energy)
        .ok_or_else(|| Error::DimensionMismatch("empty spectrum".into()))?;
    let mut levels: Vec<SpectrumLevel> = Vec::new();
    for state in states {
        let irrep = state
            .irrep
            .ok_or_else(|| Error::DimensionMismatch("state missing irrep label".into()))?;
        let multiplicity = (2.0 * state.s + 1.0).round() as u32;
        let label = TermLabel {
            multiplicity,
            irrep,
        };
        if let Some(last) = levels.last_mut() {
            if (state.energy - last.energy_ev).abs() < 1e-7 && last.label == label {
                last.degeneracy += 1;
                continue;
            }
        }
        levels.push(SpectrumLevel {
            label,
            excitation_ev: state.energy - e0,
            energy_ev: state.energy,
            degeneracy: 1,
            s: state.s,
        });
    }
    Ok(SpectrumReport { levels })
}

/// One configuration row of a character table: spatial occupation
/// rendered as `[2][2][1][1][0][0]` plus its percentage weight.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigurationRow {
    pub occupation: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterReport {
    pub state: String,
    pub excitation_ev: f64,
    pub rows: Vec<ConfigurationRow>,
}

fn occupation_string(det: &Determinant, n_orb: usize) -> String {
    (0..n_orb)
        .map(|p| {
            let n = (det.up >> p & 1) + (det.down >> p & 1);
            format!("[{n}]")
        })
        .collect()
}

/// Groups determinant weights by spatial occupation pattern and keeps
/// patterns at or above `threshold`.
pub fn character_report(
    state: &SpinFreeState,
    n_orb: usize,
    label: &str,
    excitation_ev: f64,
    threshold: f64,
) -> Result<CharacterReport> {
    let space = enumerate(n_orb, state.sector.0, state.sector.1)?;
    let mut by_occ: std::collections::BTreeMap<Vec<u8>, f64> = std::collections::BTreeMap::new();
    for (det, w) in config_weights(&space, &state.vector, 0.0) {
        let occ: Vec<u8> = (0..n_orb)
            .map(|p| ((det.up >> p & 1) + (det.down >> p & 1)) as u8)
            .collect();
        *by_occ.entry(occ).or_insert(0.0) += w;
    }
    let mut rows: Vec<ConfigurationRow> = by_occ
        .into_iter()
        .filter(|&(_, w)| w >= threshold)
        .map(|(occ, weight)| {
            let det = Determinant::from_occupied(
                &occ.iter()
                    .enumerate()
                    .filter(|&(_, &n)| n >= 1)
                    .map(|(p, _)| p)
                    .collect::<Vec<_>>(),
                &occ.iter()
                    .enumerate()
                    .filter(|&(_, &n)| n == 2)
                    .map(|(p, _)| p)
                    .collect::<Vec<_>>(),
            );
            ConfigurationRow {
                occupation: occupation_string(&det, n_orb),
                weight,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then(a.occupation.cmp(&b.occupation))
    });
    Ok(CharacterReport {
        state: label.to_string(),
        excitation_ev,
        rows,
    })
}

/// One fine-structure level within a manifold.
#[derive(Debug, Clone, Serialize)]
pub struct FineLevel {
    /// Global state label index (1-based across the whole multiplet set,
    /// ordered by spin-free energy then level energy).
    pub psi: Vec<usize>,
    pub degeneracy: usize,
    /// SOC-only energy relative to the manifold's lowest SOC level (GHz).
    pub soc_ghz: Option<f64>,
    /// SSC shift on top of SOC (GHz).
    pub ssc_ghz: Option<f64>,
    /// Combined energy relative to the same reference (GHz).
    pub total_ghz: f64,
    /// <L_z> of the level members (signed values).
    pub lz: Vec<f64>,
}

/// Fine structure of one spin-free manifold (e.g. the ground 3A2 or the
/// first 3E).
#[derive(Debug, Clone, Serialize)]
pub struct ManifoldReport {
    pub label: TermLabel,
    pub excitation_ev: f64,
    pub levels: Vec<FineLevel>,
    /// Zero-field-splitting parameters for triplet manifolds with
    /// negligible inter-manifold mixing.
    pub d_ghz: Option<f64>,
    pub e_ghz: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZfsReport {
    pub manifolds: Vec<ManifoldReport>,
    pub soc_included: bool,
    pub ssc_included: bool,
}

/// Everything the ZFS pipeline produces, including raw coupled states
/// for downstream analysis.
pub struct FineStructure {
    pub basis: MultipletBasis,
    pub spectrum: Vec<SpinFreeState>,
    /// Coupled states with H0 + selected couplings.
    pub states: Vec<CoupledState>,
    /// SOC-only coupled states (same basis) when SOC is enabled.
    pub soc_only: Option<Vec<CoupledState>>,
    pub report: ZfsReport,
}

/// Assigns each coupled state to the spin-free root holding the largest
/// share of its composition.
fn dominant_root(basis: &MultipletBasis, state: &CoupledState) -> usize {
    let mut by_root: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for &(member, w) in &state.composition {
        *by_root.entry(basis.members[member].root).or_insert(0.0) += w;
    }
    by_root
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(root, _)| root)
        .unwrap_or(0)
}

/// Runs the complete fine-structure pipeline: spin-free spectrum,
/// multiplet expansion, SOC/SSC state interaction, and per-manifold
/// level tables.
pub fn fine_structure(
    ints: &ActiveSpaceIntegrals,
    coupling: &CouplingData,
    n_triplet: usize,
    n_singlet: usize,
    tol: f64,
    include_soc: bool,
    include_ssc: bool,
    ssc_mode: SscMode,
) -> Result<FineStructure> {
    let spectrum = compute_spectrum(ints, n_triplet, n_singlet, tol)?;
    let basis = MultipletBasis::from_states(ints.n_orb, &spectrum.states)?;
    let soc = if include_soc {
        Some(build_soc(&basis, coupling)?)
    } else {
        None
    };
    let ssc = if include_ssc {
        Some(build_ssc(&basis, coupling)?)
    } else {
        None
    };
    let states = state_interaction(&basis, soc.as_ref(), ssc.as_ref(), ssc_mode)?;
    let soc_only = if include_soc && include_ssc {
        Some(state_interaction(&basis, soc.as_ref(), None, ssc_mode)?)
    } else if include_soc {
        Some(states.clone())
    } else {
        None
    };

    // Group coupled states into manifolds by dominant spin-free root
    // cluster (roots sharing one spin-free level).
    let root_level: Vec<usize> = {
        // Map each root to its degenerate spin-free level index.
        let mut levels = Vec::new();
        let mut level = 0usize;
        for (i, st) in spectrum.states.iter().enumerate() {
            if i > 0
                && ((st.energy - spectrum.states[i - 1].energy).abs() > 1e-7
                    || st.s != spectrum.states[i - 1].s)
            {
                level += 1;
            }
            levels.push(level);
        }
        levels
    };
    let n_levels = root_level.last().map(|&l| l + 1).unwrap_or(0);

    let assign = |set: &[CoupledState]| -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); n_levels];
        for (i, st) in set.iter().enumerate() {
            groups[root_level[dominant_root(&basis, st)]].push(i);
        }
        groups
    };
    let groups = assign(&states);
    let soc_groups = soc_only.as_ref().map(|s| assign(s));
    let lz_matrix = build_lz(&basis, coupling)?;

    let mut manifolds = Vec::new();
    let mut psi_counter = 1usize;
    for (level_idx, group) in groups.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let root0 = root_level.iter().position(|&l| l == level_idx).unwrap();
        let proto = &spectrum.states[root0];
        let label = TermLabel {
            multiplicity: (2.0 * proto.s + 1.0).round() as u32,
            irrep: proto
                .irrep
                .ok_or_else(|| Error::DimensionMismatch("state missing irrep label".into()))?,
        };
        // Reference: lowest SOC-included energy of this manifold.
        let reference = if let (Some(soc_states), Some(sg)) = (&soc_only, &soc_groups) {
            sg[level_idx]
                .iter()
                .map(|&i| soc_states[i].energy)
                .fold(f64::INFINITY, f64::min)
        } else {
            group
                .iter()
                .map(|&i| states[i].energy)
                .fold(f64::INFINITY, f64::min)
        };
        let soc_levels: Option<Vec<f64>> = soc_groups.as_ref().map(|sg| {
            let mut v: Vec<f64> = sg[level_idx]
                .iter()
                .map(|&i| soc_only.as_ref().unwrap()[i].energy - reference)
                .collect();
            v.sort_by(f64::total_cmp);
            v
        });

        // Cluster the combined levels into degenerate groups.
        let mut fine_levels: Vec<FineLevel> = Vec::new();
        let mut members: Vec<(f64, usize)> = group
            .iter()
            .map(|&i| (states[i].energy - reference, i))
            .collect();
        members.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut k = 0;
        let mut flat_index = 0usize;
        while k < members.len() {
            let mut end = k + 1;
            while end < members.len() && members[end].0 - members[end - 1].0 < 1e-3 {
                end += 1;
            }
            let total = members[k..end].iter().map(|m| m.0).sum::<f64>() / (end - k) as f64;
            // Diagonalize L_z within the degenerate level so the
            // reported values are not at the mercy of the arbitrary
            // rotation the eigensolver picked.
            let level_states: Vec<&CoupledState> =
                members[k..end].iter().map(|&(_, i)| &states[i]).collect();
            let lz = lz_eigenvalues(&lz_matrix, &level_states);
            let soc_ghz = soc_levels.as_ref().and_then(|sl| {
                // Match by flat position when SOC and combined levels
                // keep the same count; SSC shift is the difference.
                if sl.len() == members.len() {
                    let vals = &sl[flat_index..flat_index + (end - k)];
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                } else {
                    None
                }
            });
            let ssc_ghz = if include_ssc {
                soc_ghz.map(|s| total - s)
            } else {
                None
            };
            fine_levels.push(FineLevel {
                psi: (psi_counter + flat_index..psi_counter + flat_index + (end - k)).collect(),
                degeneracy: end - k,
                soc_ghz: if include_soc { soc_ghz } else { None },
                ssc_ghz,
                total_ghz: total,
                lz,
            });
            flat_index += end - k;
            k = end;
        }
        psi_counter += members.len();

        // ZFS parameters for the ground manifold (when it is a clean triplet).
        let (d_ghz, e_ghz) =
            if manifolds.is_empty() && (proto.s - 1.0).abs() < 1e-6 && members.len() == 3 {
                let lv: Vec<(f64, f64)> = members
                    .iter()
                    .map(|&(e, i)| (e, sz_squared(&basis, &states[i])))
                    .collect();
                match zfs_extract(&[lv[0], lv[1], lv[2]]) {
                    Ok(p) => (Some(p.d), Some(p.e)),
                    Err(_) => (None, None),
                }
            } else {
                (None, None)
            };

        manifolds.push(ManifoldReport {
            label,
            excitation_ev: proto.energy - spectrum.states[0].energy,
            levels: fine_levels,
            d_ghz,
            e_ghz,
        });
    }

    Ok(FineStructure {
        basis,
        spectrum: spectrum.states,
        states,
        soc_only,
        report: ZfsReport {
            manifolds,
            soc_included: include_soc,
            ssc_included: include_ssc,
        },
    })
}
