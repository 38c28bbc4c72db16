//! The desingularized Newton vector field of an elliptic function, its damped
//! variant, and equilibrium classification.
//!
//! The desingularized field is `-(1+|f|^4)^{-1} conj(f') f`, computed in the
//! overflow-free form `-conj(f'/f) / (2 cosh(2 ln|f|))`, which extends
//! continuously by zero across zeros and poles. The damped variant multiplies
//! in the positive periodic factors `Psi_p` at every divisor point of
//! multiplicity two or more, which turns those equilibria hyperbolic without
//! changing the phase portrait.

use num_complex::Complex64;

use crate::elliptic::EllipticFunction;
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Which vector field to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Desingularized,
    /// Additional `Psi` damping at multiple zeros/poles.
    Damped,
}

/// The flow's vector field.
#[derive(Debug, Clone)]
pub struct FlowField {
    function: EllipticFunction,
    kind: FieldKind,
    /// Divisor points of multiplicity >= 2 with their multiplicities, used by
    /// the damped kind.
    psi_centers: Vec<(Complex64, u32)>,
    /// Reduced lattice for damping-sum reduction.
    reduced: Lattice,
    /// Nonzero lattice points within the damping truncation radius.
    psi_disk: Vec<Complex64>,
    psi_radius: f64,
}

/// Radius below which a point is snapped onto an equilibrium of the field.
pub const EQUILIBRIUM_SNAP: f64 = 1e-13;

impl FlowField {
    pub fn new(function: EllipticFunction, kind: FieldKind) -> Self {
        let mut psi_centers = Vec::new();
        let lat = *function.lattice();
        for p in function.divisor().zeros().iter().chain(function.divisor().poles()) {
            if p.multiplicity >= 2 {
                psi_centers.push((lat.from_coords(p.t1, p.t2), p.multiplicity));
            }
        }
        let (reduced, _) = crate::lattice::reduce_periods(&lat);
        let rho = 0.5 * (reduced.omega1().norm() + reduced.omega2().norm());
        let psi_radius = 12.0 * rho;
        let psi_disk = if kind == FieldKind::Damped && !psi_centers.is_empty() {
            crate::weierstrass::disk_points(&reduced, psi_radius)
        } else {
            Vec::new()
        };
        FlowField {
            function,
            kind,
            psi_centers,
            reduced,
            psi_disk,
            psi_radius,
        }
    }

    /// Cached damping factor: truncated lattice sum plus the integral tail.
    fn psi_cached(&self, center: Complex64, mult: u32, z: Complex64) -> f64 {
        let s = (4 * mult - 4) as i32;
        let (u, _) = self.reduced.reduce_near_zero(z - center);
        let mut acc = u.norm().powi(-s);
        for &w in &self.psi_disk {
            acc += (u - w).norm().powi(-s);
        }
        acc += 2.0 * std::f64::consts::PI * self.psi_radius.powi(2 - s)
            / (self.reduced.covolume() * (s - 2) as f64);
        acc.sqrt()
    }

    pub fn function(&self) -> &EllipticFunction {
        &self.function
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn lattice(&self) -> &Lattice {
        self.function.lattice()
    }

    /// The field for `1/f`, which is the negated field for `f`.
    pub fn reciprocal(&self) -> FlowField {
        FlowField::new(self.function.reciprocal(), self.kind)
    }

    /// Velocity at `z`. Total: returns exactly zero on the divisor.
    pub fn velocity(&self, z: Complex64) -> Complex64 {
        if self.function.divisor_distance(z) < EQUILIBRIUM_SNAP {
            return Complex64::new(0.0, 0.0);
        }
        let data = self.function.log_data(z);
        // -(1+|f|^4)^{-1} conj(f') f = -conj(f'/f) / (|f|^{-2} + |f|^2)
        let denom = 2.0 * (2.0 * data.log_abs).cosh();
        let mut v = -data.log_deriv.conj() / denom;
        if self.kind == FieldKind::Damped {
            for &(c, m) in &self.psi_centers {
                v *= self.psi_cached(c, m, z);
            }
        }
        v
    }
}

/// `Psi_a(z) = sqrt( sum_w |z - a - w|^{-(4r-4)} )`, a positive doubly
/// periodic damping factor with a pole of order `2r-2` at `a`.
///
/// The sum runs over coordinate rings of the reduced lattice and is completed
/// by the integral approximation of the remainder; rings grow until the
/// uncompleted tail estimate falls below 1e-10 relative. The argument is
/// reduced into the central cell first, so double periodicity is exact.
pub fn psi(lat: &Lattice, a: Complex64, r: u32, z: Complex64) -> Result<f64> {
    if r < 2 {
        return Err(Error::UnsupportedConfiguration(
            "damping factors need multiplicity at least 2".into(),
        ));
    }
    let (lat, _) = crate::lattice::reduce_periods(lat);
    let s = (4 * r - 4) as i32;
    let (d0, _) = lat.reduce_near_zero(z - a);
    if d0.norm() == 0.0 {
        return Err(Error::PsiDivergence);
    }
    let mut acc = d0.norm().powi(-s);
    // minimal distance from the origin to the ring at coordinate radius k
    let height = lat.covolume() / lat.omega1().norm().max(lat.omega2().norm());
    let rel_tol = 1e-10;
    let tail_at = |radius: f64| -> f64 {
        2.0 * std::f64::consts::PI / lat.covolume() * radius.powi(2 - s) / (s - 2) as f64
    };
    for k in 1..=600 {
        let mut ring = 0.0;
        for m in -k..=k {
            for n in [-k, k] {
                ring += (d0 - lat.point(m, n)).norm().powi(-s);
            }
        }
        for n in (-k + 1)..=(k - 1) {
            for m in [-k, k] {
                ring += (d0 - lat.point(m, n)).norm().powi(-s);
            }
        }
        acc += ring;
        let ring_radius = (k as f64 + 0.5) * height;
        let tail = tail_at(ring_radius);
        // after completing with the integral remainder, the leftover is the
        // discreteness residual of the tail, of order tail * (spacing/R)^2
        let residual = tail * (height / ring_radius).powi(2);
        if residual < rel_tol * acc {
            return Ok((acc + tail).sqrt());
        }
    }
    Err(Error::NonConvergence {
        residual: f64::NAN,
        unresolved: vec![z],
    })
}

/// Kinds of flow equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// A zero of f: a stable node.
    Attractor,
    /// A pole of f: an unstable node.
    Repellor,
    /// A critical point of f.
    Saddle,
}

/// Eigen-axes of a simple (hyperbolic, orthogonal) saddle.
#[derive(Debug, Clone, Copy)]
pub struct SaddleAxes {
    /// Unit vector along the unstable direction.
    pub unstable: Complex64,
    /// Unit vector along the stable direction.
    pub stable: Complex64,
    /// Positive expansion rate |lambda|.
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub location: Complex64,
    pub kind: EquilibriumKind,
    pub multiplicity: u32,
    pub simple: bool,
    pub axes: Option<SaddleAxes>,
}

/// A flow: the field together with its classified equilibria.
#[derive(Debug, Clone)]
pub struct Flow {
    field: FlowField,
    equilibria: Vec<Equilibrium>,
}

impl Flow {
    /// Classify all equilibria: attractors at zeros, repellors at poles,
    /// saddles at critical points, with eigen-axes at simple saddles.
    pub fn analyze(field: FlowField) -> Result<Flow> {
        let lat = *field.lattice();
        let f = field.function().clone();
        let mut equilibria = Vec::new();
        for p in f.divisor().zeros() {
            equilibria.push(Equilibrium {
                location: lat.from_coords(p.t1, p.t2),
                kind: EquilibriumKind::Attractor,
                multiplicity: p.multiplicity,
                simple: p.multiplicity == 1,
                axes: None,
            });
        }
        for p in f.divisor().poles() {
            equilibria.push(Equilibrium {
                location: lat.from_coords(p.t1, p.t2),
                kind: EquilibriumKind::Repellor,
                multiplicity: p.multiplicity,
                simple: p.multiplicity == 1,
                axes: None,
            });
        }
        for c in f.critical_points()? {
            let simple = c.multiplicity == 1;
            let axes = if simple {
                Some(saddle_axes(&field, c.location)?)
            } else {
                None
            };
            equilibria.push(Equilibrium {
                location: c.location,
                kind: EquilibriumKind::Saddle,
                multiplicity: c.multiplicity,
                simple,
                axes,
            });
        }
        Ok(Flow { field, equilibria })
    }

    pub fn field(&self) -> &FlowField {
        &self.field
    }

    pub fn equilibria(&self) -> &[Equilibrium] {
        &self.equilibria
    }

    pub fn saddles(&self) -> impl Iterator<Item = (usize, &Equilibrium)> {
        self.equilibria
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EquilibriumKind::Saddle)
    }

    pub fn attractors(&self) -> impl Iterator<Item = (usize, &Equilibrium)> {
        self.equilibria
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EquilibriumKind::Attractor)
    }

    pub fn repellors(&self) -> impl Iterator<Item = (usize, &Equilibrium)> {
        self.equilibria
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EquilibriumKind::Repellor)
    }

    /// Index of the equilibrium within `radius` of `z`, if any.
    pub fn equilibrium_near(&self, z: Complex64, radius: f64) -> Option<usize> {
        let lat = self.field.lattice();
        self.equilibria
            .iter()
            .position(|e| lat.torus_distance(e.location, z) < radius)
    }
}

/// Linearization of the field at a simple saddle by central differences.
fn saddle_axes(field: &FlowField, at: Complex64) -> Result<SaddleAxes> {
    let h = 1e-6;
    let vx = (field.velocity(at + Complex64::new(h, 0.0))
        - field.velocity(at - Complex64::new(h, 0.0)))
        / (2.0 * h);
    let vy = (field.velocity(at + Complex64::new(0.0, h))
        - field.velocity(at - Complex64::new(0.0, h)))
        / (2.0 * h);
    // real 2x2 Jacobian [[a, b], [c, d]]
    let (a, c) = (vx.re, vx.im);
    let (b, d) = (vy.re, vy.im);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if det >= 0.0 || disc <= 0.0 {
        return Err(Error::NonSimpleSaddle(at));
    }
    let sq = disc.sqrt();
    let l_plus = 0.5 * (tr + sq);
    let l_minus = 0.5 * (tr - sq);
    let eigvec = |l: f64| -> Complex64 {
        // (A - l I) u = 0: rows (a-l, b) and (c, d-l)
        let u = if b.abs() + (a - l).abs() > c.abs() + (d - l).abs() {
            Complex64::new(b, l - a)
        } else {
            Complex64::new(l - d, c)
        };
        u / u.norm()
    };
    Ok(SaddleAxes {
        unstable: eigvec(l_plus),
        stable: eigvec(l_minus),
        rate: l_plus.min(-l_minus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::nuclear_configurations;
    use crate::elliptic::wp_function;

    fn nuclear_flow(r: u32, kind: FieldKind) -> FlowField {
        let cfg = nuclear_configurations(Lattice::square(), r).unwrap();
        let diag = cfg.into_iter().find(|c| c.lambda == (1, 1)).unwrap();
        let f = EllipticFunction::from_divisor(diag.divisor).unwrap();
        FlowField::new(f, kind)
    }

    #[test]
    fn velocity_vanishes_at_equilibria() {
        let field = nuclear_flow(2, FieldKind::Desingularized);
        assert_eq!(
            field.velocity(Complex64::new(0.0, 0.0)),
            Complex64::new(0.0, 0.0)
        );
        // critical point of the nuclear r=2 function has zero velocity too
        let flow = Flow::analyze(field).unwrap();
        for (_, s) in flow.saddles() {
            let v = flow.field().velocity(s.location);
            assert!(v.norm() < 1e-9, "saddle velocity {v}");
        }
    }

    #[test]
    fn duality_identity_exact() {
        let field = nuclear_flow(2, FieldKind::Desingularized);
        let recip = field.reciprocal();
        let mut x = 0.217f64;
        for _ in 0..20 {
            x = (x * 929.0).fract();
            let z = Complex64::new(x, (x * 7.0).fract());
            if field.function().divisor_distance(z) < 1e-3 {
                continue;
            }
            let a = field.velocity(z);
            let b = recip.velocity(z);
            assert!(
                (a + b).norm() < 1e-15 * (a.norm() + 1.0),
                "duality defect at {z}: {} vs {}",
                a,
                b
            );
        }
    }

    #[test]
    fn velocity_direction_matches_newton_direction() {
        let field = nuclear_flow(2, FieldKind::Desingularized);
        let f = field.function();
        let mut x = 0.37f64;
        for _ in 0..10 {
            x = (x * 701.0).fract();
            let z = Complex64::new(0.1 + 0.8 * x, 0.1 + 0.8 * (1.0 - x));
            if f.divisor_distance(z) < 5e-2 {
                continue;
            }
            let v = field.velocity(z);
            let newton = -f.eval(z).unwrap() / f.eval_deriv(z).unwrap();
            let dot = v * newton.conj();
            // v is a positive real multiple of -f/f'
            assert!(dot.re > 0.0);
            assert!(dot.im.abs() < 1e-9 * dot.re);
        }
    }

    #[test]
    fn psi_periodic_positive_with_pole_asymptotics() {
        let lat = Lattice::square();
        let a = Complex64::new(0.25, 0.25);
        let z = Complex64::new(0.7, 0.1);
        let p = psi(&lat, a, 2, z).unwrap();
        assert!(p > 0.0);
        let p1 = psi(&lat, a, 2, z + lat.omega1()).unwrap();
        assert!((p - p1).abs() < 1e-10 * p);
        // near the center, psi ~ |z-a|^{-2} for r = 2
        for eps in [1e-2, 1e-3] {
            let v = psi(&lat, a, 2, a + Complex64::new(eps, 0.0)).unwrap();
            let ratio = v * eps * eps;
            assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio} at {eps}");
        }
        assert!(matches!(psi(&lat, a, 2, a), Err(Error::PsiDivergence)));
    }

    #[test]
    fn nuclear_r2_classification() {
        // wp on the square lattice: double zero at (1+i)/2, double pole at 0,
        // saddles at the real and imaginary half-periods
        let f = wp_function(Lattice::square()).unwrap();
        let flow = Flow::analyze(FlowField::new(f, FieldKind::Damped)).unwrap();
        assert_eq!(flow.attractors().count(), 1);
        assert_eq!(flow.repellors().count(), 1);
        let saddles: Vec<_> = flow.saddles().collect();
        assert_eq!(saddles.len(), 2);
        let lat = Lattice::square();
        for (_, s) in &saddles {
            assert!(s.simple);
            let near_half = lat.torus_distance(s.location, Complex64::new(0.5, 0.0)) < 1e-6
                || lat.torus_distance(s.location, Complex64::new(0.0, 0.5)) < 1e-6;
            assert!(near_half, "saddle at {}", s.location);
            let axes = s.axes.as_ref().unwrap();
            let dot = (axes.unstable * axes.stable.conj()).re.abs();
            assert!(dot < 1e-4, "axes not orthogonal: {dot}");
        }
    }

    #[test]
    fn damped_field_hyperbolic_at_multiple_zero() {
        // linearization of the damped field at the double zero has eigenvalue
        // real parts bounded away from zero
        let field = nuclear_flow(2, FieldKind::Damped);
        let at = Complex64::new(0.0, 0.0);
        let h = 1e-6;
        let vx = (field.velocity(at + Complex64::new(h, 0.0))
            - field.velocity(at - Complex64::new(h, 0.0)))
            / (2.0 * h);
        let vy = (field.velocity(at + Complex64::new(0.0, h))
            - field.velocity(at - Complex64::new(0.0, h)))
            / (2.0 * h);
        let tr = vx.re + vy.im;
        let det = vx.re * vy.im - vy.re * vx.im;
        // attracting hyperbolic node: negative trace, positive determinant
        assert!(tr < -1e-3, "trace {tr}");
        assert!(det > 1e-6, "det {det}");
        // the two eigenvalue real parts have equal modulus (radial node)
        let disc = tr * tr - 4.0 * det;
        if disc > 0.0 {
            assert!(disc.sqrt() < 0.2 * tr.abs(), "eigenvalue split {disc}");
        }

        // the undamped field is degenerate there by comparison
        let plain = nuclear_flow(2, FieldKind::Desingularized);
        let vx = (plain.velocity(at + Complex64::new(h, 0.0))
            - plain.velocity(at - Complex64::new(h, 0.0)))
            / (2.0 * h);
        assert!(vx.norm() < 1e-6);
    }
}
