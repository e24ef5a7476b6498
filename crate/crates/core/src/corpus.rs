//! Reproducible toy ciphers for tests and experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FieldSpec, FpSpace, SpanBuilder, VSpace};
use crate::cipher::{MixingLayer, RoundSpec, SBox, TbCipherSpec};
use crate::error::{Error, Result};
use crate::mixing_analysis::is_proper_mixing_layer;

const MAX_TRIES: usize = 10_000;

/// A uniformly random permutation of the brick fixing 0.
pub fn random_brick<R: Rng>(rng: &mut R, space: FpSpace) -> SBox {
    let mut rest: Vec<u32> = (1..space.size() as u32).collect();
    rest.shuffle(rng);
    let mut table = vec![0];
    table.extend(rest);
    SBox::new(space, table).expect("shuffled table is a bijection")
}

/// The additive brick sending unit vector `k` to `images[k]`.
pub fn linear_brick(space: FpSpace, images: &[usize]) -> Result<SBox> {
    if images.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: images.len() });
    }
    SBox::from_fn(space, |x| {
        space.digits(x).iter().zip(images).fold(0, |acc, (&c, &y)| space.add(acc, space.scale(c, y)))
    })
}

pub fn random_linear_brick<R: Rng>(rng: &mut R, space: FpSpace) -> SBox {
    loop {
        let images: Vec<usize> = (0..space.dim()).map(|_| rng.gen_range(0..space.size())).collect();
        let mut span = SpanBuilder::new(space);
        images.iter().for_each(|&y| {
            span.insert(y);
        });
        if span.rank() == space.dim() {
            return linear_brick(space, &images).expect("images match the dimension");
        }
    }
}

/// Inversion on `F_{p^{m_p}}` in every brick.
pub fn inversion_bricks(space: &VSpace) -> Result<Vec<SBox>> {
    let s = inversion_brick_over_prime(space.p(), space.m_p())?;
    Ok(vec![s; space.n()])
}

/// Inversion on `F_{p^{m_p}}` (first irreducible found) used as a brick of
/// an `F_p`-space with `m_p` coordinates.
pub fn inversion_brick_over_prime(p: u32, m_p: usize) -> Result<SBox> {
    let field = first_irreducible(p, m_p)?;
    SBox::field_inversion(&field)
}

/// The irreducible monic polynomial of degree `f` whose coefficient vector is
/// smallest in little-endian counting.
pub fn first_irreducible(p: u32, f: usize) -> Result<FieldSpec> {
    if f == 1 {
        return FieldSpec::prime(p);
    }
    let total = (p as u64).pow(f as u32);
    for idx in 0..total {
        let mut poly = crate::algebra::field::digits(idx, p, f);
        poly.push(1);
        if let Ok(spec) = FieldSpec::new(p, poly) {
            return Ok(spec);
        }
    }
    Err(Error::InvalidField(format!("no irreducible polynomial of degree {f} over F_{p}")))
}

pub fn random_layer<R: Rng>(rng: &mut R, space: &VSpace) -> Result<MixingLayer> {
    let q = space.field().order();
    for _ in 0..MAX_TRIES {
        let rows: Vec<Vec<u64>> =
            (0..space.d()).map(|_| (0..space.d()).map(|_| rng.gen_range(0..q)).collect()).collect();
        if let Ok(layer) = MixingLayer::from_indices(space, &rows) {
            return Ok(layer);
        }
    }
    Err(Error::BudgetExceeded("no invertible matrix found".into()))
}

pub fn random_proper_layer<R: Rng>(rng: &mut R, space: &VSpace) -> Result<MixingLayer> {
    for _ in 0..MAX_TRIES {
        let layer = random_layer(rng, space)?;
        if is_proper_mixing_layer(&layer, space)?.proper {
            return Ok(layer);
        }
    }
    Err(Error::BudgetExceeded("no proper mixing layer found".into()))
}

/// `(v₁, v₂) ↦ (v₁ + v₂, v₁)` for two bricks.
pub fn feistel_layer(space: &VSpace) -> Result<MixingLayer> {
    if space.n() != 2 {
        return Err(Error::InvalidParameter(format!("Feistel layer needs 2 bricks, got {}", space.n())));
    }
    let (d, m) = (space.d(), space.m());
    let rows: Vec<Vec<u64>> = (0..d)
        .map(|i| (0..d).map(|j| u64::from((j < m && (i == j || i == j + m)) || (j >= m && i + m == j))).collect())
        .collect();
    MixingLayer::from_indices(space, &rows)
}

/// One random permutation of `V` per round; every column is surjective.
pub fn random_key_schedule<R: Rng>(rng: &mut R, size: usize, rounds: usize) -> Vec<Vec<usize>> {
    let columns: Vec<Vec<usize>> = (0..rounds)
        .map(|_| {
            let mut c: Vec<usize> = (0..size).collect();
            c.shuffle(rng);
            c
        })
        .collect();
    (0..size).map(|k| columns.iter().map(|c| c[k]).collect()).collect()
}

/// A seeded cipher with random 0-fixing bricks and random proper layers.
pub fn random_cipher(seed: u64, field: FieldSpec, m: usize, n: usize, rounds: usize) -> Result<TbCipherSpec> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("at least one round is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = VSpace::new(field, m, n)?;
    let mut specs = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let bricks = (0..n).map(|_| random_brick(&mut rng, *space.brick_space())).collect();
        let layer = random_proper_layer(&mut rng, &space)?;
        specs.push(RoundSpec::new(&space, bricks, layer, true)?);
    }
    let keys = random_key_schedule(&mut rng, space.size(), rounds);
    TbCipherSpec::new(space, specs, Some(keys))
}

/// Single-round cipher with the given bricks and layer and key `k ↦ k`.
pub fn one_round_cipher(space: VSpace, bricks: Vec<SBox>, layer: MixingLayer) -> Result<TbCipherSpec> {
    let round = RoundSpec::new(&space, bricks, layer, true)?;
    let keys = (0..space.size()).map(|k| vec![k]).collect();
    TbCipherSpec::new(space, vec![round], Some(keys))
}
