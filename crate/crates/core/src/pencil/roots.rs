//! Roots of the characteristic polynomial
//! `C1 b^6 - (C2 + l C3) b^4 + (C4 + l C5) b^2 - l C6`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::material::PencilCoefficients;

const DEGENERATE_REL: f64 = 1e-8;
const DEGENERATE_ZERO: f64 = 1e-12;

/// Characteristic roots at one value of the spectral parameter.
///
/// `beta[j]` is the principal square root of `gamma[j]` (non-negative real
/// part) and `beta[j + 3] = -beta[j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoots {
    pub beta: [Complex64; 6],
    pub gamma: [Complex64; 3],
    pub degenerate: bool,
}

fn horner(p: &[f64; 4], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(p[0], 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &c in &p[1..] {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn polish(p: &[f64; 4], mut z: Complex64) -> Complex64 {
    let (mut v, _) = horner(p, z);
    for _ in 0..4 {
        let (_, d) = horner(p, z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - v / d;
        let (nv, _) = horner(p, next);
        if nv.norm() < v.norm() {
            z = next;
            v = nv;
        } else {
            break;
        }
    }
    z
}

/// Roots of `a z^2 + b z + c` without cancellation.
fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// Roots of the real cubic `a z^3 + b z^2 + c z + d` (`a != 0`), returned with
/// exact conjugate symmetry: one root is real, the other two are real or an
/// exact conjugate pair.
pub fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let p = [a, b, c, d];
    let zero = Complex64::new(0.0, 0.0);
    let mut roots = if d == 0.0 {
        let [r1, r2] = quadratic(a.into(), b.into(), c.into());
        [zero, r1, r2]
    } else {
        let (bn, cn, dn) = (b / a, c / a, d / a);
        let pp = cn - bn * bn / 3.0;
        let qq = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;
        let disc = Complex64::new(qq * qq / 4.0 + pp * pp * pp / 27.0, 0.0).sqrt();
        let h = Complex64::new(-qq / 2.0, 0.0);
        let u3 = if (h + disc).norm() >= (h - disc).norm() {
            h + disc
        } else {
            h - disc
        };
        let u = u3.powf(1.0 / 3.0);
        let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let mut cands = [zero; 3];
        let mut uk = u;
        for cand in &mut cands {
            let y = if uk.norm() == 0.0 {
                zero
            } else {
                uk - pp / (uk * 3.0)
            };
            *cand = y - bn / 3.0;
            uk *= omega;
        }
        let big = cands
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or(zero);
        let r = polish(&p, big);
        // Backward deflation keeps the small roots accurate.
        let f = -Complex64::new(d, 0.0) / r;
        let e = (f - c) / r;
        let [r1, r2] = quadratic(a.into(), e, f);
        [r, r1, r2]
    };
    for z in roots.iter_mut() {
        *z = polish(&p, *z);
    }
    enforce_conjugate_structure(roots)
}

fn enforce_conjugate_structure(mut r: [Complex64; 3]) -> [Complex64; 3] {
    let real_idx = (0..3)
        .min_by(|&i, &j| {
            let ri = r[i].im.abs() / (r[i].norm() + f64::MIN_POSITIVE);
            let rj = r[j].im.abs() / (r[j].norm() + f64::MIN_POSITIVE);
            ri.total_cmp(&rj)
        })
        .unwrap_or(0);
    r[real_idx].im = 0.0;
    let others: Vec<usize> = (0..3).filter(|&i| i != real_idx).collect();
    let (i, j) = (others[0], others[1]);
    let im_sum = r[i].im.abs() + r[j].im.abs();
    if im_sum <= 1e-14 * (r[i].norm() + r[j].norm()) {
        r[i].im = 0.0;
        r[j].im = 0.0;
    } else {
        let re = 0.5 * (r[i].re + r[j].re);
        let im = 0.5 * im_sum;
        r[i] = Complex64::new(re, im);
        r[j] = Complex64::new(re, -im);
    }
    // Canonical order: descending real part, then positive imaginary first.
    r.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    r
}

/// Principal square root with exact handling of real arguments.
fn principal_sqrt(g: Complex64) -> Complex64 {
    if g.im == 0.0 {
        if g.re >= 0.0 {
            Complex64::new(g.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-g.re).sqrt())
        }
    } else {
        g.sqrt()
    }
}

/// Characteristic roots at `lambda`. With `strict`, clustered roots are an error.
pub fn characteristic_roots(
    lambda: f64,
    coeffs: &PencilCoefficients,
    strict: bool,
) -> Result<CharRoots> {
    let c = coeffs;
    let gamma = solve_cubic(
        c.c1,
        -(c.c2 + lambda * c.c3),
        c.c4 + lambda * c.c5,
        -lambda * c.c6,
    );
    let gmax = gamma.iter().fold(0.0f64, |m, g| m.max(g.norm()));
    let mut degenerate = gamma
        .iter()
        .any(|g| g.norm() < DEGENERATE_ZERO * gmax.max(1.0));
    for i in 0..3 {
        for j in i + 1..3 {
            let scale = gamma[i].norm().max(gamma[j].norm());
            if (gamma[i] - gamma[j]).norm() < DEGENERATE_REL * scale {
                degenerate = true;
            }
        }
    }
    if strict && degenerate {
        return Err(Error::DegenerateBasis { lambda });
    }
    let mut beta = [Complex64::new(0.0, 0.0); 6];
    for j in 0..3 {
        beta[j] = principal_sqrt(gamma[j]);
        beta[j + 3] = -beta[j];
    }
    Ok(CharRoots {
        beta,
        gamma,
        degenerate,
    })
}

impl CharRoots {
    /// `|P(beta)| / sum |coef| |beta|^k` for each root.
    pub fn relative_residuals(&self, lambda: f64, coeffs: &PencilCoefficients) -> [f64; 6] {
        let c = coeffs;
        let p = [
            c.c1,
            -(c.c2 + lambda * c.c3),
            c.c4 + lambda * c.c5,
            -lambda * c.c6,
        ];
        let mut out = [0.0; 6];
        for (o, b) in out.iter_mut().zip(self.beta.iter()) {
            let g = b * b;
            let (v, _) = horner(&p, g);
            let n = g.norm();
            let scale = p[0].abs() * n.powi(3) + p[1].abs() * n * n + p[2].abs() * n + p[3].abs();
            *o = if scale == 0.0 { 0.0 } else { v.norm() / scale };
        }
        out
    }
}
