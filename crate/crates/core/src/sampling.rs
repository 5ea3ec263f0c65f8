//! Seeded, splittable random streams and the samplers used by the sampled
//! checks. Every sample index gets its own ChaCha stream, so results do not
//! depend on how work is partitioned across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{DomainSpec, DomainTag, GroupElement, Point};

/// Independent stream number `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn angle<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..TAU)
}

/// `a ~ U(-2, 2)`, `φ ~ U(0, 2π)`.
pub fn cyl_element<R: Rng>(rng: &mut R) -> GroupElement {
    GroupElement::cyl(rng.gen_range(-2.0..2.0), angle(rng))
}

/// Matrix exponential of a 2×2 matrix, closed form.
pub fn expm2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let b = [[m[0][0] - half_trace, m[0][1]], [m[1][0], m[1][1] - half_trace]];
    // b² = δ I with δ = -det(b)
    let delta = -(b[0][0] * b[1][1] - b[0][1] * b[1][0]);
    let (c, s) = if delta > 0.0 {
        let q = delta.sqrt();
        (q.cosh(), q.sinh() / q)
    } else if delta < 0.0 {
        let q = (-delta).sqrt();
        (q.cos(), q.sin() / q)
    } else {
        (1.0, 1.0)
    };
    let e = half_trace.exp();
    [
        [e * (c + s * b[0][0]), e * s * b[0][1]],
        [e * s * b[1][0], e * (c + s * b[1][1])],
    ]
}

/// A positive-determinant matrix `exp(A)` with `A_ij ~ U(-1, 1)`.
pub fn gl2_plus_element<R: Rng>(rng: &mut R) -> GroupElement {
    let mut a = [[0.0; 2]; 2];
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    GroupElement::Mat2(expm2(a))
}

/// Random group element of the variant acting on `d`.
pub fn group_element<R: Rng>(d: &DomainSpec, rng: &mut R) -> GroupElement {
    match d.tag() {
        DomainTag::GL2Plane => gl2_plus_element(rng),
        _ => cyl_element(rng),
    }
}

/// Random chart point: log-uniform radius over two decades around 1 (or
/// inside the disk for bounded charts), uniform angle.
pub fn point<R: Rng>(d: &DomainSpec, rng: &mut R) -> Point {
    match d.tag() {
        DomainTag::Cylinder => Point::new(rng.gen_range(-10f64.ln()..10f64.ln()), angle(rng)),
        DomainTag::GL2Plane => {
            let r = log_uniform(rng, 0.1, 10.0);
            let t = angle(rng);
            Point::new(r * t.cos(), r * t.sin())
        }
        _ => match d.radius() {
            Some(r_max) => Point::new(r_max * log_uniform(rng, 0.05, 0.95), angle(rng)),
            None => Point::new(log_uniform(rng, 0.1, 10.0), angle(rng)),
        },
    }
}
