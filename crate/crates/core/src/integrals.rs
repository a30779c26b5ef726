//! Active-space integral and coupling-data file formats.
//!
//! The AFI format is line-oriented and FCIDUMP-compatible: a `&AFI` header
//! followed by one `<value> <p> <q> <r> <s>` entry per line with 1-based
//! indices. `(p,q,0,0)` encodes the one-electron integral `h_pq`,
//! `(0,0,0,0)` the core energy, and four nonzero indices a two-electron
//! integral `(pq|rs)` in chemist notation with 8-fold permutational
//! symmetry applied on storage.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// 1 eV in GHz (CODATA value of e/h, scaled).
pub const EV_TO_GHZ: f64 = 2.417_989_242e5;

/// Per-orbital irrep label. E-pair members carry the 0-based index of
/// their partner orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbSym {
    A1,
    A2,
    /// x-like member of an E pair; `partner` is the y-like member.
    Ex {
        partner: usize,
    },
    /// y-like member of an E pair; `partner` is the x-like member.
    Ey {
        partner: usize,
    },
}

impl OrbSym {
    pub fn is_e(&self) -> bool {
        matches!(self, OrbSym::Ex { .. } | OrbSym::Ey { .. })
    }
}

/// One- and two-electron integrals over a set of spatial active orbitals,
/// together with per-orbital irrep labels and a scalar core energy.
/// All energies are in eV.
#[derive(Debug, Clone)]
pub struct ActiveSpaceIntegrals {
    pub n_orb: usize,
    pub n_elec: usize,
    pub orbsym: Vec<OrbSym>,
    pub e_core: f64,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl ActiveSpaceIntegrals {
    pub fn new(n_orb: usize, n_elec: usize, orbsym: Vec<OrbSym>) -> Result<Self> {
        if n_elec > 2 * n_orb {
            return Err(Error::TooManyElectrons { n_elec, n_orb });
        }
        assert_eq!(orbsym.len(), n_orb, "orbsym length must equal n_orb");
        for (i, sym) in orbsym.iter().enumerate() {
            match *sym {
                OrbSym::Ex { partner } => {
                    if partner >= n_orb || orbsym[partner] != (OrbSym::Ey { partner: i }) {
                        return Err(Error::DanglingPartner { orb: i });
                    }
                }
                OrbSym::Ey { partner } => {
                    if partner >= n_orb || orbsym[partner] != (OrbSym::Ex { partner: i }) {
                        return Err(Error::DanglingPartner { orb: i });
                    }
                }
                _ => {}
            }
        }
        Ok(Self {
            n_orb,
            n_elec,
            orbsym,
            e_core: 0.0,
            h: vec![0.0; n_orb * n_orb],
            g: vec![0.0; n_orb.pow(4)],
        })
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_orb + q]
    }

    /// Sets `h_pq = h_qp = v`.
    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        self.h[p * self.n_orb + q] = v;
        self.h[q * self.n_orb + p] = v;
    }

    /// Chemist-notation two-electron integral `(pq|rs)`.
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orb;
        self.g[((p * n + q) * n + r) * n + s]
    }

    /// Sets `(pq|rs)` and all seven permutation-equivalent entries.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orb;
        for (a, b, c, d) in g_permutations(p, q, r, s) {
            self.g[((a * n + b) * n + c) * n + d] = v;
        }
    }

    /// Iterates nonzero one-electron entries on canonical representatives (p >= q).
    pub fn h_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_orb).flat_map(move |p| {
            (0..=p).filter_map(move |q| {
                let v = self.h(p, q);
                (v != 0.0).then_some((p, q, v))
            })
        })
    }

    /// Iterates nonzero two-electron entries on canonical representatives.
    pub fn g_entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        let n = self.n_orb;
        (0..n).flat_map(move |p| {
            (0..n).flat_map(move |q| {
                (0..n).flat_map(move |r| {
                    (0..n).filter_map(move |s| {
                        if (p, q, r, s) != g_canonical(p, q, r, s) {
                            return None;
                        }
                        let v = self.g(p, q, r, s);
                        (v != 0.0).then_some((p, q, r, s, v))
                    })
                })
            })
        })
    }
}

/// All eight index permutations equivalent to `(pq|rs)` for real orbitals.
fn g_permutations(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

/// Canonical (minimal) representative of the permutation class of `(pq|rs)`.
fn g_canonical(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    *g_permutations(p, q, r, s).iter().min().unwrap()
}

fn fmt_value(v: f64) -> String {
    // 17 significant digits: exact binary64 round trip.
    format!("{v:.16e}")
}

fn orbsym_token(sym: &OrbSym) -> String {
    match *sym {
        OrbSym::A1 => "A1".to_string(),
        OrbSym::A2 => "A2".to_string(),
        OrbSym::Ex { partner } => format!("Ex:{}", partner + 1),
        OrbSym::Ey { partner } => format!("Ey:{}", partner + 1),
    }
}

fn parse_orbsym_token(tok: &str, line: usize) -> Result<OrbSym> {
    let malformed = |msg: String| Error::Malformed { line, msg };
    match tok {
        "A1" => Ok(OrbSym::A1),
        "A2" => Ok(OrbSym::A2),
        _ => {
            let (kind, partner) = tok
                .split_once(':')
                .ok_or_else(|| malformed(format!("bad ORBSYM token '{tok}'")))?;
            let idx: usize = partner
                .parse()
                .map_err(|_| malformed(format!("bad partner index '{partner}'")))?;
            if idx == 0 {
                return Err(malformed("partner index must be 1-based".into()));
            }
            match kind {
                "Ex" => Ok(OrbSym::Ex { partner: idx - 1 }),
                "Ey" => Ok(OrbSym::Ey { partner: idx - 1 }),
                _ => Err(malformed(format!("bad ORBSYM token '{tok}'"))),
            }
        }
    }
}

fn check_duplicate(
    seen: &mut BTreeMap<(usize, usize, usize, usize), f64>,
    key: (usize, usize, usize, usize),
    v: f64,
    line: usize,
) -> Result<()> {
    if let Some(&prev) = seen.get(&key) {
        let scale = prev.abs().max(v.abs()).max(1e-300);
        if (prev - v).abs() / scale > 1e-12 {
            return Err(Error::ConflictingDuplicate {
                line,
                a: prev,
                b: v,
            });
        }
    } else {
        seen.insert(key, v);
    }
    Ok(())
}

/// Parses an AFI byte stream into `ActiveSpaceIntegrals`.
pub fn parse_afi(text: &str) -> Result<ActiveSpaceIntegrals> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hdr_line, header) = lines
        .next()
        .ok_or_else(|| Error::MissingHeader("&AFI".into()))?;
    let header = header
        .strip_prefix("&AFI")
        .ok_or_else(|| Error::MissingHeader("&AFI".into()))?;
    let header = header.trim_end_matches('/').trim();

    let mut norb = None;
    let mut nelec = None;
    let mut orbsym = None;
    for field in header.split_whitespace() {
        let (key, val) = field.split_once('=').ok_or_else(|| Error::Malformed {
            line: hdr_line,
            msg: format!("bad header field '{field}'"),
        })?;
        match key {
            "NORB" => {
                norb = Some(val.parse::<usize>().map_err(|_| Error::Malformed {
                    line: hdr_line,
                    msg: format!("bad NORB '{val}'"),
                })?)
            }
            "NELEC" => {
                nelec = Some(val.parse::<usize>().map_err(|_| Error::Malformed {
                    line: hdr_line,
                    msg: format!("bad NELEC '{val}'"),
                })?)
            }
            "ORBSYM" => {
                orbsym = Some(
                    val.split(',')
                        .map(|t| parse_orbsym_token(t.trim(), hdr_line))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => {
                return Err(Error::Malformed {
                    line: hdr_line,
                    msg: format!("unknown header field '{key}'"),
                })
            }
        }
    }
    let n_orb = norb.ok_or_else(|| Error::MissingHeader("NORB".into()))?;
    let n_elec = nelec.ok_or_else(|| Error::MissingHeader("NELEC".into()))?;
    let orbsym = orbsym.ok_or_else(|| Error::MissingHeader("ORBSYM".into()))?;
    if orbsym.len() != n_orb {
        return Err(Error::Malformed {
            line: hdr_line,
            msg: format!("ORBSYM lists {} labels for NORB={}", orbsym.len(), n_orb),
        });
    }
    let mut out = ActiveSpaceIntegrals::new(n_orb, n_elec, orbsym)?;

    let mut seen_h = BTreeMap::new();
    let mut seen_g = BTreeMap::new();
    let mut seen_core: Option<f64> = None;
    for (line, text) in lines {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(Error::Malformed {
                line,
                msg: format!("expected 5 fields, found {}", toks.len()),
            });
        }
        let v: f64 = toks[0].parse().map_err(|_| Error::Malformed {
            line,
            msg: format!("bad value '{}'", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            *slot = tok.parse().map_err(|_| Error::Malformed {
                line,
                msg: format!("bad index '{tok}'"),
            })?;
        }
        for &i in &idx {
            if i > n_orb {
                return Err(Error::IndexOutOfRange {
                    line,
                    index: i,
                    norb: n_orb,
                });
            }
        }
        match idx {
            [0, 0, 0, 0] => {
                if let Some(prev) = seen_core {
                    check_duplicate(
                        &mut BTreeMap::from([((0, 0, 0, 0), prev)]),
                        (0, 0, 0, 0),
                        v,
                        line,
                    )?;
                } else {
                    seen_core = Some(v);
                    out.e_core = v;
                }
            }
            [p, q, 0, 0] if p > 0 && q > 0 => {
                let key = (p.max(q) - 1, p.min(q) - 1, 0, 0);
                check_duplicate(&mut seen_h, key, v, line)?;
                out.set_h(p - 1, q - 1, v);
            }
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                let key = g_canonical(p - 1, q - 1, r - 1, s - 1);
                check_duplicate(&mut seen_g, key, v, line)?;
                out.set_g(p - 1, q - 1, r - 1, s - 1, v);
            }
            _ => {
                return Err(Error::Malformed {
                    line,
                    msg: "mixed zero and nonzero indices".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Serializes integrals to the canonical AFI form: one entry per
/// permutation class, sorted, values at full binary64 precision.
pub fn write_afi(ints: &ActiveSpaceIntegrals) -> String {
    let mut out = String::new();
    let syms: Vec<String> = ints.orbsym.iter().map(orbsym_token).collect();
    writeln!(
        out,
        "&AFI NORB={} NELEC={} ORBSYM={} /",
        ints.n_orb,
        ints.n_elec,
        syms.join(",")
    )
    .unwrap();
    let mut entries: Vec<((usize, usize, usize, usize), f64)> = Vec::new();
    for (p, q, v) in ints.h_entries() {
        entries.push(((p + 1, q + 1, 0, 0), v));
    }
    for (p, q, r, s, v) in ints.g_entries() {
        entries.push(((p + 1, q + 1, r + 1, s + 1), v));
    }
    entries.sort_by_key(|&(k, _)| k);
    for ((p, q, r, s), v) in entries {
        writeln!(out, "{} {p} {q} {r} {s}", fmt_value(v)).unwrap();
    }
    if ints.e_core != 0.0 {
        writeln!(out, "{} 0 0 0 0", fmt_value(ints.e_core)).unwrap();
    }
    out
}

/// Effective orbital angular momentum and spin-spin coupling data.
///
/// `lambda[a]` holds the real antisymmetric matrix with
/// `<p| l_a |q> = i * lambda[a][(p,q)]`; `xi` is the effective SOC strength
/// in GHz. The SSC tensor maps an orbital quartet `(p,q,r,s)` to a real
/// symmetric traceless 3x3 spatial tensor in GHz.
#[derive(Debug, Clone)]
pub struct CouplingData {
    pub n_orb: usize,
    /// Effective SOC strength xi (GHz).
    pub xi: f64,
    /// Lambda^x, Lambda^y, Lambda^z (dimensionless, exactly antisymmetric).
    pub lambda: [DMatrix<f64>; 3],
    /// Quartet (p,q,r,s) -> symmetric traceless 3x3 tensor D^{ab} (GHz).
    pub ssc_tensor: BTreeMap<(usize, usize, usize, usize), [[f64; 3]; 3]>,
}

impl CouplingData {
    pub fn empty(n_orb: usize) -> Self {
        Self {
            n_orb,
            xi: 0.0,
            lambda: std::array::from_fn(|_| DMatrix::zeros(n_orb, n_orb)),
            ssc_tensor: BTreeMap::new(),
        }
    }

    /// Sets `lambda[axis][(p,q)] = v` and the antisymmetric counterpart.
    pub fn set_lambda(&mut self, axis: usize, p: usize, q: usize, v: f64) {
        self.lambda[axis][(p, q)] = v;
        self.lambda[axis][(q, p)] = -v;
    }
}

fn axis_index(tok: &str, line: usize) -> Result<usize> {
    match tok {
        "X" => Ok(0),
        "Y" => Ok(1),
        "Z" => Ok(2),
        _ => Err(Error::UnknownAxis {
            line,
            axis: tok.to_string(),
        }),
    }
}

const AXIS_NAMES: [&str; 3] = ["X", "Y", "Z"];

/// Parses a coupling-data byte stream.
pub fn parse_coupling(text: &str) -> Result<CouplingData> {
    struct LambdaEntry {
        axis: usize,
        p: usize,
        q: usize,
        v: f64,
        line: usize,
    }
    let mut xi = None;
    let mut norb_decl = None;
    let mut lambda_entries: Vec<LambdaEntry> = Vec::new();
    let mut ssc: BTreeMap<(usize, usize, usize, usize), [[Option<f64>; 3]; 3]> = BTreeMap::new();
    let mut max_index = 0usize;

    for (line, raw) in text.lines().enumerate() {
        let line = line + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(val) = text.strip_prefix("XI=") {
            xi = Some(val.trim().parse::<f64>().map_err(|_| Error::Malformed {
                line,
                msg: format!("bad XI value '{val}'"),
            })?);
            continue;
        }
        if let Some(val) = text.strip_prefix("NORB=") {
            norb_decl = Some(val.trim().parse::<usize>().map_err(|_| Error::Malformed {
                line,
                msg: format!("bad NORB value '{val}'"),
            })?);
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        match toks[0] {
            "LAMBDA" => {
                if toks.len() != 5 {
                    return Err(Error::Malformed {
                        line,
                        msg: "LAMBDA expects: LAMBDA <X|Y|Z> <p> <q> <value>".into(),
                    });
                }
                let axis = axis_index(toks[1], line)?;
                let p: usize = toks[2].parse().map_err(|_| Error::Malformed {
                    line,
                    msg: format!("bad index '{}'", toks[2]),
                })?;
                let q: usize = toks[3].parse().map_err(|_| Error::Malformed {
                    line,
                    msg: format!("bad index '{}'", toks[3]),
                })?;
                let v: f64 = toks[4].parse().map_err(|_| Error::Malformed {
                    line,
                    msg: format!("bad value '{}'", toks[4]),
                })?;
                if p == 0 || q == 0 {
                    return Err(Error::IndexOutOfRange {
                        line,
                        index: 0,
                        norb: 0,
                    });
                }
                if p == q && v != 0.0 {
                    return Err(Error::SymmetryViolation {
                        line,
                        msg: "nonzero diagonal Lambda entry breaks antisymmetry".into(),
                    });
                }
                max_index = max_index.max(p).max(q);
                lambda_entries.push(LambdaEntry {
                    axis,
                    p: p - 1,
                    q: q - 1,
                    v,
                    line,
                });
            }
            "SSC" => {
                if toks.len() != 8 {
                    return Err(Error::Malformed {
                        line,
                        msg: "SSC expects: SSC <p> <q> <r> <s> <axis1> <axis2> <value>".into(),
                    });
                }
                let mut idx = [0usize; 4];
                for (slot, tok) in idx.iter_mut().zip(&toks[1..5]) {
                    *slot = tok.parse().map_err(|_| Error::Malformed {
                        line,
                        msg: format!("bad index '{tok}'"),
                    })?;
                    if *slot == 0 {
                        return Err(Error::IndexOutOfRange {
                            line,
                            index: 0,
                            norb: 0,
                        });
                    }
                    max_index = max_index.max(*slot);
                }
                let a = axis_index(toks[5], line)?;
                let b = axis_index(toks[6], line)?;
                let v: f64 = toks[7].parse().map_err(|_| Error::Malformed {
                    line,
                    msg: format!("bad value '{}'", toks[7]),
                })?;
                let block = ssc
                    .entry((idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1))
                    .or_insert([[None; 3]; 3]);
                for (i, j) in [(a, b), (b, a)] {
                    if let Some(prev) = block[i][j] {
                        if (prev - v).abs() > 1e-12 * prev.abs().max(v.abs()).max(1e-300) {
                            return Err(Error::ConflictingDuplicate {
                                line,
                                a: prev,
                                b: v,
                            });
                        }
                    }
                    block[i][j] = Some(v);
                }
            }
            other => {
                return Err(Error::Malformed {
                    line,
                    msg: format!("unknown record '{other}'"),
                })
            }
        }
    }

    let n_orb = norb_decl.unwrap_or(max_index);
    if max_index > n_orb {
        return Err(Error::IndexOutOfRange {
            line: 0,
            index: max_index,
            norb: n_orb,
        });
    }
    let mut out = CouplingData::empty(n_orb);
    out.xi = xi.ok_or_else(|| Error::MissingHeader("XI".into()))?;
    for e in lambda_entries {
        let prev = out.lambda[e.axis][(e.p, e.q)];
        if prev != 0.0 && (prev - e.v).abs() > 1e-12 * prev.abs().max(e.v.abs()) {
            return Err(Error::ConflictingDuplicate {
                line: e.line,
                a: prev,
                b: e.v,
            });
        }
        out.set_lambda(e.axis, e.p, e.q, e.v);
    }
    for (key, block) in ssc {
        let mut tensor = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                tensor[i][j] = block[i][j].unwrap_or(0.0);
            }
        }
        let trace: f64 = (0..3).map(|i| tensor[i][i]).sum();
        let scale = tensor
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        if trace.abs() > 1e-10 * scale.max(1.0) {
            let (p, q, r, s) = key;
            return Err(Error::TraceViolation {
                p: p + 1,
                q: q + 1,
                r: r + 1,
                s: s + 1,
                trace,
            });
        }
        out.ssc_tensor.insert(key, tensor);
    }
    Ok(out)
}

/// Serializes coupling data; `parse_coupling(write_coupling(x))` reproduces
/// `x` exactly.
pub fn write_coupling(c: &CouplingData) -> String {
    let mut out = String::new();
    writeln!(out, "NORB={}", c.n_orb).unwrap();
    writeln!(out, "XI={}", fmt_value(c.xi)).unwrap();
    for (axis, name) in AXIS_NAMES.iter().enumerate() {
        for p in 0..c.n_orb {
            for q in (p + 1)..c.n_orb {
                let v = c.lambda[axis][(p, q)];
                if v != 0.0 {
                    writeln!(out, "LAMBDA {name} {} {} {}", p + 1, q + 1, fmt_value(v)).unwrap();
                }
            }
        }
    }
    for (&(p, q, r, s), tensor) in &c.ssc_tensor {
        for a in 0..3 {
            for b in a..3 {
                let v = tensor[a][b];
                if v != 0.0 {
                    writeln!(
                        out,
                        "SSC {} {} {} {} {} {} {}",
                        p + 1,
                        q + 1,
                        r + 1,
                        s + 1,
                        AXIS_NAMES[a],
                        AXIS_NAMES[b],
                        fmt_value(v)
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}

/// A single symmetry violation found by [`validate_symmetry`].
#[derive(Debug, Clone)]
pub struct SymmetryViolation {
    /// "h" or "g", plus which generator was applied.
    pub kind: &'static str,
    pub generator: &'static str,
    pub indices: Vec<usize>,
    pub delta: f64,
}

/// Report produced by [`validate_symmetry`].
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub tol: f64,
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `h` and `g` commute with the orbital representation of the
/// C3 and sigma_v generators built from the declared irrep labels.
pub fn validate_symmetry(ints: &ActiveSpaceIntegrals, tol: f64) -> Result<SymmetryReport> {
    let rep = crate::symmetry::orbital_rep(&ints.orbsym)?;
    let n = ints.n_orb;
    let mut violations = Vec::new();
    for (gen_name, u) in [("C3", &rep.c3), ("sigma_v", &rep.sigma_v)] {
        // h' = U^T h U
        for p in 0..n {
            for q in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += u[(a, p)] * ints.h(a, b) * u[(b, q)];
                    }
                }
                let delta = acc - ints.h(p, q);
                if delta.abs() > tol {
                    violations.push(SymmetryViolation {
                        kind: "h",
                        generator: gen_name,
                        indices: vec![p, q],
                        delta,
                    });
                }
            }
        }
        // g' = (U x U x U x U) g via four single-index contractions.
        let mut cur: Vec<f64> = (0..n.pow(4))
            .map(|i| {
                let s = i % n;
                let r = (i / n) % n;
                let q = (i / (n * n)) % n;
                let p = i / (n * n * n);
                ints.g(p, q, r, s)
            })
            .collect();
        for pos in 0..4 {
            let mut next = vec![0.0; n.pow(4)];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut idx = [i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n];
                let target = idx[pos];
                let mut acc = 0.0;
                for a in 0..n {
                    idx[pos] = a;
                    let j = ((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3];
                    acc += u[(a, target)] * cur[j];
                }
                *slot = acc;
            }
            cur = next;
        }
        for (i, &v) in cur.iter().enumerate() {
            let idx = [i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n];
            let delta = v - ints.g(idx[0], idx[1], idx[2], idx[3]);
            if delta.abs() > tol {
                violations.push(SymmetryViolation {
                    kind: "g",
                    generator: gen_name,
                    indices: idx.to_vec(),
                    delta,
                });
            }
        }
    }
    Ok(SymmetryReport { tol, violations })
}
