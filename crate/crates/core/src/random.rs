//! Seeded random samples for property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hopf::HopfElement;
use crate::ktau::KElement;
use crate::scalar::{q2, Q};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for random `K_T` elements.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub pole_radius: i64,
    pub max_order: u32,
    pub max_degree: u32,
    pub max_poles: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            pole_radius: 4,
            max_order: 3,
            max_degree: 3,
            max_poles: 3,
        }
    }
}

impl Shape {
    pub fn holomorphic(self) -> Self {
        Self { max_poles: 0, ..self }
    }

    pub fn singular(self) -> Self {
        Self { max_degree: 0, ..self }
    }
}

/// A small nonzero-ish rational, mostly integers.
pub fn scalar<R: Rng>(rng: &mut R) -> Q {
    let num = rng.gen_range(-4..=4);
    let den = if rng.gen_bool(0.25) { rng.gen_range(1..=3) } else { 1 };
    q2(num, den)
}

pub fn kelement<R: Rng>(rng: &mut R, shape: Shape) -> KElement {
    let include_poly = shape.max_poles == 0 || shape.max_degree > 0;
    let poly = if include_poly && (shape.max_poles == 0 || rng.gen_bool(0.7)) {
        let deg = rng.gen_range(0..=shape.max_degree) as usize;
        (0..=deg).map(|_| scalar(rng)).collect()
    } else {
        Vec::new()
    };
    let poles: Vec<((i64, u32), Q)> = (0..rng.gen_range(0..=shape.max_poles))
        .map(|_| {
            let n = rng.gen_range(-shape.pole_radius..=shape.pole_radius);
            let m = rng.gen_range(1..=shape.max_order.max(1));
            ((n, m), scalar(rng))
        })
        .collect();
    let f = KElement::from_parts(poly, poles);
    if shape.max_degree == 0 && shape.max_poles > 0 {
        f.sing()
    } else {
        f
    }
}

/// Random element of `H_T` (no `Dtau`).
pub fn group_element<R: Rng>(rng: &mut R, radius: i64) -> HopfElement {
    let n = rng.gen_range(1..=3);
    HopfElement::from_terms((0..n).map(|_| ((rng.gen_range(-radius..=radius), 0), scalar(rng))))
}

/// Random element of `H_T` possibly involving `Dtau`.
pub fn hopf_element<R: Rng>(rng: &mut R, radius: i64, max_order: u32) -> HopfElement {
    let n = rng.gen_range(1..=3);
    HopfElement::from_terms((0..n).map(|_| {
        (
            (rng.gen_range(-radius..=radius), rng.gen_range(0..=max_order)),
            scalar(rng),
        )
    }))
}
