#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sasaki_herm_core::sasakian::SasakianPointModel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the ball of radius `r` in `R^n`.
pub fn ball_point(rng: &mut impl Rng, n: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= r * r {
            return v;
        }
    }
}

/// Factors a sample can be drawn from.
#[derive(Debug, Clone, Copy)]
pub enum FactorKind {
    Round,
    SpaceForm(f64),
    Deformed(f64),
}

impl FactorKind {
    pub fn build(self, n: usize) -> SasakianPointModel {
        match self {
            FactorKind::Round => SasakianPointModel::round_sphere(n).unwrap(),
            FactorKind::SpaceForm(c) => SasakianPointModel::space_form(n, c).unwrap(),
            FactorKind::Deformed(alpha) => SasakianPointModel::round_sphere(n).unwrap().d_homothetic_deform(alpha).unwrap(),
        }
    }
}
