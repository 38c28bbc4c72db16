//! Divisors on the torus: zero/pole systems with multiplicities subject to
//! the order and lattice-congruence constraints, plus the eight nuclear
//! configurations.
//!
//! Points are stored as lattice coordinates in `[0,1)^2`, which keeps mod-`Λ`
//! arithmetic near-exact; complex representatives are derived.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// One divisor point: lattice coordinates and a positive multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorPoint {
    pub t1: f64,
    pub t2: f64,
    pub multiplicity: u32,
}

impl DivisorPoint {
    pub fn new(t1: f64, t2: f64, multiplicity: u32) -> Self {
        DivisorPoint {
            t1: t1.rem_euclid(1.0),
            t2: t2.rem_euclid(1.0),
            multiplicity,
        }
    }
}

/// A balanced zero/pole system of order `r >= 2` with its congruence witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    lattice: Lattice,
    zeros: Vec<DivisorPoint>,
    poles: Vec<DivisorPoint>,
    /// Integer coordinates of `sum(zeros) - sum(poles)` in the lattice basis.
    lambda0: (i64, i64),
}

/// Planar representatives after Abel normalization: the designated zero copy
/// is translated by `-lambda0`, making the sums equal exactly in the plane.
#[derive(Debug, Clone)]
pub struct NormalizedDivisor {
    /// Multiplicity-expanded zero representatives.
    pub zero_reps: Vec<Complex64>,
    /// Multiplicity-expanded pole representatives.
    pub pole_reps: Vec<Complex64>,
    pub lambda0: (i64, i64),
}

const CONGRUENCE_TOL: f64 = 1e-9;

impl Divisor {
    pub fn new(
        lattice: Lattice,
        zeros: Vec<DivisorPoint>,
        poles: Vec<DivisorPoint>,
    ) -> Result<Self> {
        if zeros.is_empty() || poles.is_empty() {
            return Err(Error::InvalidDivisor("zeros and poles required".into()));
        }
        let zsum: u32 = zeros.iter().map(|p| p.multiplicity).sum();
        let psum: u32 = poles.iter().map(|p| p.multiplicity).sum();
        if zsum != psum {
            return Err(Error::InvalidDivisor(format!(
                "total zero multiplicity {zsum} != total pole multiplicity {psum}"
            )));
        }
        if zsum < 2 {
            return Err(Error::InvalidDivisor("order must be at least 2".into()));
        }
        if zeros
            .iter()
            .chain(poles.iter())
            .any(|p| p.multiplicity == 0)
        {
            return Err(Error::InvalidDivisor("zero multiplicity".into()));
        }
        let mut zeros = zeros;
        let mut poles = poles;
        for p in zeros.iter_mut().chain(poles.iter_mut()) {
            p.t1 = p.t1.rem_euclid(1.0);
            p.t2 = p.t2.rem_euclid(1.0);
        }
        for z in &zeros {
            for p in &poles {
                let d1 = (z.t1 - p.t1).rem_euclid(1.0).min((p.t1 - z.t1).rem_euclid(1.0));
                let d2 = (z.t2 - p.t2).rem_euclid(1.0).min((p.t2 - z.t2).rem_euclid(1.0));
                if d1 < 1e-12 && d2 < 1e-12 {
                    return Err(Error::InvalidDivisor(format!(
                        "zero at ({}, {}) coincides with a pole",
                        z.t1, z.t2
                    )));
                }
            }
        }
        // congruence: the coordinate sums must differ by integers
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for z in &zeros {
            s1 += z.t1 * z.multiplicity as f64;
            s2 += z.t2 * z.multiplicity as f64;
        }
        for p in &poles {
            s1 -= p.t1 * p.multiplicity as f64;
            s2 -= p.t2 * p.multiplicity as f64;
        }
        let l1 = s1.round();
        let l2 = s2.round();
        if (s1 - l1).abs() > CONGRUENCE_TOL || (s2 - l2).abs() > CONGRUENCE_TOL {
            return Err(Error::InvalidDivisor(format!(
                "zero/pole sums differ by a non-lattice vector: residual ({:.3e}, {:.3e})",
                s1 - l1,
                s2 - l2
            )));
        }
        // deterministic order: lexicographic by coordinates
        let key = |p: &DivisorPoint| (p.t1, p.t2);
        zeros.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        poles.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        Ok(Divisor {
            lattice,
            zeros,
            poles,
            lambda0: (l1 as i64, l2 as i64),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn zeros(&self) -> &[DivisorPoint] {
        &self.zeros
    }

    pub fn poles(&self) -> &[DivisorPoint] {
        &self.poles
    }

    /// Order r: total pole multiplicity.
    pub fn order(&self) -> u32 {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }

    /// Integer coordinates of the congruence witness.
    pub fn lambda0(&self) -> (i64, i64) {
        self.lambda0
    }

    pub fn zero_points(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .map(|p| self.lattice.from_coords(p.t1, p.t2))
            .collect()
    }

    pub fn pole_points(&self) -> Vec<Complex64> {
        self.poles
            .iter()
            .map(|p| self.lattice.from_coords(p.t1, p.t2))
            .collect()
    }

    /// The swapped divisor (zeros and poles exchanged).
    pub fn inverted(&self) -> Divisor {
        Divisor {
            lattice: self.lattice,
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
            lambda0: (-self.lambda0.0, -self.lambda0.1),
        }
    }

    /// Translate one copy of the lexicographically smallest zero by
    /// `-lambda0`, making the planar sums match exactly. The torus divisor is
    /// unchanged.
    pub fn abel_normalize(&self) -> NormalizedDivisor {
        let mut zero_reps = Vec::new();
        for (i, z) in self.zeros.iter().enumerate() {
            let rep = self.lattice.from_coords(z.t1, z.t2);
            let copies = z.multiplicity as usize;
            // zeros are sorted, so index 0 is the designated one
            let start = if i == 0 {
                zero_reps.push(rep - self.lattice.point(self.lambda0.0, self.lambda0.1));
                1
            } else {
                0
            };
            for _ in start..copies {
                zero_reps.push(rep);
            }
        }
        let mut pole_reps = Vec::new();
        for p in &self.poles {
            let rep = self.lattice.from_coords(p.t1, p.t2);
            for _ in 0..p.multiplicity {
                pole_reps.push(rep);
            }
        }
        NormalizedDivisor {
            zero_reps,
            pole_reps,
            lambda0: self.lambda0,
        }
    }

    /// Serialize in the divisor text format with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w1 = self.lattice.omega1();
        let w2 = self.lattice.omega2();
        out.push_str(&format!(
            "lattice = {:.16e},{:.16e} ; {:.16e},{:.16e}\n",
            w1.re, w1.im, w2.re, w2.im
        ));
        for z in &self.zeros {
            out.push_str(&format!(
                "zero = {:.16e},{:.16e} x {}\n",
                z.t1, z.t2, z.multiplicity
            ));
        }
        for p in &self.poles {
            out.push_str(&format!(
                "pole = {:.16e},{:.16e} x {}\n",
                p.t1, p.t2, p.multiplicity
            ));
        }
        out
    }

    /// Parse the divisor text format. Whitespace-tolerant; `#` comments.
    pub fn from_text(text: &str) -> Result<Divisor> {
        let mut lattice = None;
        let mut zeros = Vec::new();
        let mut poles = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key = value, got: {line}")))?;
            match key.trim() {
                "lattice" => {
                    let (a, b) = value
                        .split_once(';')
                        .ok_or_else(|| Error::Parse("lattice needs two periods".into()))?;
                    lattice = Some(Lattice::new(parse_complex(a)?, parse_complex(b)?)?);
                }
                "zero" | "pole" => {
                    let (coords, mult) = value
                        .split_once('x')
                        .ok_or_else(|| Error::Parse(format!("missing multiplicity: {line}")))?;
                    let c = parse_complex(coords)?;
                    let m: u32 = mult
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad multiplicity: {mult}")))?;
                    let p = DivisorPoint::new(c.re, c.im, m);
                    if key.trim() == "zero" {
                        zeros.push(p);
                    } else {
                        poles.push(p);
                    }
                }
                other => return Err(Error::Parse(format!("unknown key {other}"))),
            }
        }
        let lattice = lattice.ok_or_else(|| Error::Parse("missing lattice line".into()))?;
        Divisor::new(lattice, zeros, poles)
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected re,im got {s}")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number {re}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number {im}")))?;
    Ok(Complex64::new(re, im))
}

/// Class of a nuclear configuration: pole representative on a cell side or on
/// a diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuclearClass {
    /// `b` on a side of the period cell; never realizes a nuclear flow.
    Side,
    /// `b` on a diagonal, off the boundary.
    Diagonal,
}

/// A candidate nuclear configuration.
#[derive(Debug, Clone)]
pub struct NuclearConfig {
    pub divisor: Divisor,
    pub class: NuclearClass,
    /// The lattice element `r * b` defining the configuration.
    pub lambda: (i64, i64),
}

/// The eight a-priori nuclear configurations of order `r`: a zero of order
/// `r` at the origin and a pole of order `r` at `lambda/r` for `lambda`
/// ranging over the eight shortest lattice classes.
pub fn nuclear_configurations(lattice: Lattice, r: u32) -> Result<Vec<NuclearConfig>> {
    if r < 2 {
        return Err(Error::InvalidDivisor("order must be at least 2".into()));
    }
    let lambdas: [(i64, i64); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (-1, -1),
        (1, -1),
        (-1, 1),
    ];
    let mut out = Vec::with_capacity(8);
    for (l1, l2) in lambdas {
        let class = if l1 == 0 || l2 == 0 {
            NuclearClass::Side
        } else {
            NuclearClass::Diagonal
        };
        let b = DivisorPoint::new(l1 as f64 / r as f64, l2 as f64 / r as f64, r);
        let zero = DivisorPoint::new(0.0, 0.0, r);
        let divisor = Divisor::new(lattice, vec![zero], vec![b])?;
        out.push(NuclearConfig {
            divisor,
            class,
            lambda: (l1, l2),
        });
    }
    Ok(out)
}
