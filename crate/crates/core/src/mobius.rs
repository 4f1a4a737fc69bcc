//! 2×2 real matrices acting on the upper half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// A point of ∂H² = ℝ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Real(f64),
    Infinity,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_row_major(e: [f64; 4]) -> Self {
        Mat2::new(e[0], e[1], e[2], e[3])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    pub fn scale(&self, k: f64) -> Mat2 {
        Mat2 {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply_boundary(&self, x: Boundary) -> Boundary {
        match x {
            Boundary::Infinity => {
                if self.c == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Real(self.a / self.c)
                }
            }
            Boundary::Real(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Real((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Attracting fixed point of a loxodromic matrix.
    pub fn attracting_fixed_point(&self) -> Boundary {
        let tr = self.trace();
        if self.c == 0.0 {
            if (self.a / self.d).abs() > 1.0 {
                return Boundary::Infinity;
            }
            return Boundary::Real(self.b / (self.d - self.a));
        }
        let disc = (tr * tr - 4.0 * self.det()).max(0.0).sqrt();
        let r1 = (self.a - self.d + disc) / (2.0 * self.c);
        let r2 = (self.a - self.d - disc) / (2.0 * self.c);
        if (self.c * r1 + self.d).abs() >= (self.c * r2 + self.d).abs() {
            Boundary::Real(r1)
        } else {
            Boundary::Real(r2)
        }
    }

    /// Hyperbolic translation length 2·arccosh(|tr|/2); zero for non-loxodromics.
    pub fn translation_length(&self) -> f64 {
        let t = self.trace().abs() / 2.0;
        if t <= 1.0 {
            0.0
        } else {
            2.0 * t.acosh()
        }
    }
}

/// Hyperbolic distance between i and M·i for a determinant-one matrix,
/// given `log_scale` with the true matrix equal to e^{log_scale}·M.
pub fn orbit_distance(m: &Mat2, log_scale: f64) -> f64 {
    let f = m.frobenius_sq();
    let ln_half = f.ln() + 2.0 * log_scale - std::f64::consts::LN_2;
    if ln_half < 30.0 {
        ln_half.exp().max(1.0).acosh()
    } else {
        // arccosh(y) = ln(2y) - 1/(4y²) - …
        ln_half + std::f64::consts::LN_2 - 0.25 * (-2.0 * ln_half).exp()
    }
}

/// Product of matrices with periodic renormalization; returns (M, log scale).
pub fn product<'a>(ms: impl IntoIterator<Item = &'a Mat2>) -> (Mat2, f64) {
    let mut acc = Mat2::IDENTITY;
    let mut log_scale = 0.0;
    for m in ms {
        acc = acc.mul(m);
        let big = acc.max_abs();
        if big > 1e100 {
            acc = acc.scale(1.0 / big);
            log_scale += big.ln();
        }
    }
    (acc, log_scale)
}

/// Poisson kernel P(z, ξ) of the upper half-plane.
pub fn poisson(z: Complex64, xi: Boundary) -> f64 {
    match xi {
        Boundary::Infinity => z.im,
        Boundary::Real(x) => z.im / ((z.re - x).powi(2) + z.im * z.im),
    }
}

/// `lim d(i, p) − d(M·i, p)` as p → ξ along any path.
pub fn busemann_gain(m: &Mat2, xi: Boundary) -> f64 {
    let z = m.apply(Complex64::new(0.0, 1.0));
    (poisson(z, xi) / poisson(Complex64::new(0.0, 1.0), xi)).ln()
}

/// A disc in the Riemann sphere symmetric about the real axis: either
/// `|z − center| < radius` or, when `outside`, `|z − center| > radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: f64,
    pub radius: f64,
    #[serde(default)]
    pub outside: bool,
}

impl Disc {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = (z - self.center).norm();
        if self.outside {
            r > self.radius
        } else {
            r < self.radius
        }
    }

    fn disjoint(&self, o: &Disc) -> bool {
        let gap = (self.center - o.center).abs();
        match (self.outside, o.outside) {
            (false, false) => gap > self.radius + o.radius,
            (true, true) => false,
            (false, true) => gap + self.radius < o.radius,
            (true, false) => gap + o.radius < self.radius,
        }
    }
}

/// Ping-pong data for one generator: it maps the complement of `repel`
/// onto `attract`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscPair {
    pub repel: Disc,
    pub attract: Disc,
}

/// Numerical ping-pong check for a Schottky family.
pub fn check_ping_pong(gens: &[Mat2], pairs: &[DiscPair]) -> Result<()> {
    if gens.len() != pairs.len() {
        return input("one disc pair per generator is required");
    }
    let discs: Vec<&Disc> = pairs.iter().flat_map(|p| [&p.repel, &p.attract]).collect();
    for (i, d) in discs.iter().enumerate() {
        if d.radius <= 0.0 || !d.radius.is_finite() {
            return input("disc radii must be positive");
        }
        for e in &discs[i + 1..] {
            if !d.disjoint(e) {
                return input("ping-pong discs are not pairwise disjoint");
            }
        }
    }
    for (k, (g, p)) in gens.iter().zip(pairs).enumerate() {
        if (g.det() - 1.0).abs() > 1e-9 {
            return input(format!("generator {k} does not have determinant 1"));
        }
        if g.trace().abs() <= 2.0 {
            return input(format!("generator {k} is not loxodromic"));
        }
        // The boundary circle of `repel` must land on the boundary of `attract`,
        // and a point outside `repel` must land inside `attract`.
        for j in 1..64 {
            let th = std::f64::consts::PI * j as f64 / 64.0;
            let z = Complex64::new(p.repel.center, 0.0) + Complex64::from_polar(p.repel.radius, th);
            let w = g.apply(z);
            let off = ((w - p.attract.center).norm() - p.attract.radius).abs();
            if off > 1e-7 * (1.0 + p.attract.radius) {
                return input(format!(
                    "generator {k} does not map the repelling circle onto the attracting one"
                ));
            }
        }
        let probe = if p.repel.outside {
            Complex64::new(p.repel.center, 0.5 * p.repel.radius)
        } else {
            Complex64::new(p.repel.center, p.repel.radius * 2.0 + 1.0)
        };
        if !p.attract.contains(g.apply(probe)) {
            return input(format!(
                "generator {k} maps the outside of its repelling disc the wrong way"
            ));
        }
    }
    Ok(())
}
