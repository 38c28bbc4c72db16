//! Period lattices, Gauss basis reduction, and unimodular transforms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A rank-2 lattice spanned by a positively oriented period pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
}

/// Integer basis change with determinant +1. Rows express the old basis in
/// the new one: `omega_old_1 = p1*omega_new_1 + q1*omega_new_2` and
/// `omega_old_2 = p2*omega_new_1 + q2*omega_new_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnimodularMatrix {
    pub p1: i64,
    pub q1: i64,
    pub p2: i64,
    pub q2: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: UnimodularMatrix = UnimodularMatrix {
        p1: 1,
        q1: 0,
        p2: 0,
        q2: 1,
    };

    pub fn det(&self) -> i64 {
        self.p1 * self.q2 - self.p2 * self.q1
    }

    /// Image of a homology class expressed in the old basis.
    pub fn map_class(&self, class: (i64, i64)) -> (i64, i64) {
        (
            class.0 * self.p1 + class.1 * self.p2,
            class.0 * self.q1 + class.1 * self.q2,
        )
    }
}

impl Lattice {
    /// Requires `Im(omega2/omega1) > 0`.
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        let orient = (omega2 * omega1.conj()).im;
        if !orient.is_finite() || orient <= 0.0 || omega1.norm() == 0.0 {
            return Err(Error::DegenerateLattice);
        }
        Ok(Lattice { omega1, omega2 })
    }

    pub fn square() -> Self {
        Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap()
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn tau(&self) -> Complex64 {
        self.omega2 / self.omega1
    }

    /// Area of the fundamental parallelogram.
    pub fn covolume(&self) -> f64 {
        (self.omega2 * self.omega1.conj()).im.abs()
    }

    /// The lattice point `m*omega1 + n*omega2`.
    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    /// Coordinates of `z` in the basis, solving `z = t1*omega1 + t2*omega2`.
    pub fn coords(&self, z: Complex64) -> (f64, f64) {
        // det = Im(omega2 * conj(omega1)) > 0 by the orientation invariant
        let det = (self.omega2 * self.omega1.conj()).im;
        (
            -(z * self.omega2.conj()).im / det,
            (z * self.omega1.conj()).im / det,
        )
    }

    pub fn from_coords(&self, t1: f64, t2: f64) -> Complex64 {
        self.omega1 * t1 + self.omega2 * t2
    }

    /// Representative of `z` in the half-open fundamental cell
    /// `{t1*omega1 + t2*omega2 : 0 <= t_i < 1}`, and the lattice coordinates
    /// of the subtracted point.
    pub fn reduce_to_cell(&self, z: Complex64) -> (Complex64, (i64, i64)) {
        let (t1, t2) = self.coords(z);
        let m = t1.floor();
        let n = t2.floor();
        (z - self.point(m as i64, n as i64), (m as i64, n as i64))
    }

    /// Representative of `z` nearest to zero obtainable by coordinate
    /// rounding plus a local neighbor search, and the subtracted point.
    pub fn reduce_near_zero(&self, z: Complex64) -> (Complex64, (i64, i64)) {
        let (t1, t2) = self.coords(z);
        let m0 = t1.round() as i64;
        let n0 = t2.round() as i64;
        let mut best = (z - self.point(m0, n0), (m0, n0));
        for dm in -1..=1 {
            for dn in -1..=1 {
                let (m, n) = (m0 + dm, n0 + dn);
                let cand = z - self.point(m, n);
                if cand.norm_sqr() < best.0.norm_sqr() {
                    best = (cand, (m, n));
                }
            }
        }
        best
    }

    /// Distance between torus points.
    pub fn torus_distance(&self, a: Complex64, b: Complex64) -> f64 {
        self.reduce_near_zero(a - b).0.norm()
    }

    /// Shortest nonzero vector norm.
    pub fn min_norm(&self) -> f64 {
        let (r, _) = reduce_periods(self);
        r.omega1.norm()
    }

    /// True when the basis is already reduced: |omega1| minimal among all
    /// periods and |omega2| minimal among periods with positive orientation.
    pub fn is_reduced(&self) -> bool {
        let (r, _) = reduce_periods(self);
        (r.omega1 - self.omega1).norm() < 1e-12 * self.omega1.norm()
            && (r.omega2 - self.omega2).norm() < 1e-12 * self.omega2.norm()
    }
}

/// Gauss lattice reduction. Returns a basis of the same lattice with
/// `|omega1|` minimal in the lattice and `|omega2|` minimal among periods of
/// positive orientation, together with the determinant +1 matrix expressing
/// the old basis in the new one.
pub fn reduce_periods(lat: &Lattice) -> (Lattice, UnimodularMatrix) {
    let mut w1 = lat.omega1;
    let mut w2 = lat.omega2;
    // u tracks (w1, w2)^T = U (old1, old2)^T, det U = +1 throughout.
    let mut u = [[1i64, 0i64], [0i64, 1i64]];

    // order so |w1| <= |w2|, with the det-+1 rotation (w1, w2) <- (w2, -w1)
    if w1.norm_sqr() > w2.norm_sqr() {
        (w1, w2) = (w2, -w1);
        u = [[u[1][0], u[1][1]], [-u[0][0], -u[0][1]]];
    }
    for _ in 0..128 {
        // shift w2 by the nearest multiple of w1
        let r = ((w2 * w1.conj()).re / w1.norm_sqr()).round();
        if r != 0.0 {
            w2 -= w1 * r;
            let k = r as i64;
            u[1][0] -= k * u[0][0];
            u[1][1] -= k * u[0][1];
        }
        if w2.norm_sqr() >= w1.norm_sqr() {
            break;
        }
        (w1, w2) = (w2, -w1);
        u = [[u[1][0], u[1][1]], [-u[0][0], -u[0][1]]];
    }
    // sign normalization: make Re(w1) > 0, or Re = 0 and Im > 0 (negating
    // both basis vectors keeps det = +1 and the lattice unchanged)
    if w1.re < -1e-14 * w1.norm() || (w1.re.abs() <= 1e-14 * w1.norm() && w1.im < 0.0) {
        w1 = -w1;
        w2 = -w2;
        for row in &mut u {
            row[0] = -row[0];
            row[1] = -row[1];
        }
    }
    // M = U^{-1} expresses old in terms of new; det U = 1 so the inverse is
    // the adjugate.
    let m = UnimodularMatrix {
        p1: u[1][1],
        q1: -u[0][1],
        p2: -u[1][0],
        q2: u[0][0],
    };
    debug_assert_eq!(m.det(), 1);
    let reduced = Lattice::new(w1, w2).expect("reduction preserves orientation");
    (reduced, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_degenerate_pairs() {
        assert!(Lattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
        assert!(Lattice::new(c(1.0, 0.0), c(0.0, -1.0)).is_err());
    }

    #[test]
    fn square_lattice_already_reduced() {
        let lat = Lattice::square();
        let (r, m) = reduce_periods(&lat);
        assert_eq!(m, UnimodularMatrix::IDENTITY);
        assert!((r.omega1() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r.omega2() - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn scaled_square_already_reduced() {
        let lat = Lattice::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        let (r, m) = reduce_periods(&lat);
        assert_eq!(m, UnimodularMatrix::IDENTITY);
        assert_eq!(r, lat);
    }

    #[test]
    fn gauss_reduction_example() {
        let lat = Lattice::new(c(3.0, 1.0), c(2.0, 1.0)).unwrap();
        let (r, m) = reduce_periods(&lat);
        assert!((r.omega1() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r.omega2() - c(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(m.det(), 1);
        // rows reconstruct the old basis from the new
        let o1 = r.omega1() * m.p1 as f64 + r.omega2() * m.q1 as f64;
        let o2 = r.omega1() * m.p2 as f64 + r.omega2() * m.q2 as f64;
        assert!((o1 - lat.omega1()).norm() < 1e-12);
        assert!((o2 - lat.omega2()).norm() < 1e-12);
        assert_eq!((m.p1, m.q1, m.p2, m.q2), (3, 1, 2, 1));
    }

    #[test]
    fn reduction_idempotent() {
        let lat = Lattice::new(c(3.0, 1.0), c(2.0, 1.0)).unwrap();
        let (r, _) = reduce_periods(&lat);
        let (r2, m2) = reduce_periods(&r);
        assert_eq!(m2, UnimodularMatrix::IDENTITY);
        assert_eq!(r, r2);
    }

    #[test]
    fn coords_roundtrip() {
        let lat = Lattice::new(c(1.5, 0.25), c(-0.3, 2.0)).unwrap();
        let z = c(0.37, -1.2);
        let (t1, t2) = lat.coords(z);
        assert!((lat.from_coords(t1, t2) - z).norm() < 1e-12);
    }

    #[test]
    fn near_zero_reduction_bounds() {
        let lat = Lattice::square();
        let (z0, (m, n)) = lat.reduce_near_zero(c(5.3, -2.8));
        assert!((z0 + lat.point(m, n) - c(5.3, -2.8)).norm() < 1e-12);
        assert!(z0.norm() <= 0.5 * 2.0f64.sqrt() + 1e-12);
    }
}
