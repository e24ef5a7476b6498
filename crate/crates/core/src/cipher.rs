//! Translation-based ciphers: bricklayer S-boxes, linear mixing layers and
//! round-key translations, and the generators of the groups they produce.

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, FieldSpec, FpSpace, SpanBuilder, VSpace, Vector};
use crate::error::{Error, Result};
use crate::group_engine::Permutation;
use crate::mixing_analysis::is_proper_mixing_layer;

/// A permutation of one brick `F_p^{m_p}`, as a table over point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SBox {
    space: FpSpace,
    table: Vec<u32>,
}

impl SBox {
    /// Any bijection of the brick. Bricks of a cipher round must also fix 0;
    /// that is checked by [`RoundSpec::new`].
    pub fn new(space: FpSpace, table: Vec<u32>) -> Result<Self> {
        if table.len() != space.size() {
            return Err(Error::DimensionMismatch { expected: space.size(), got: table.len() });
        }
        Permutation::from_table(table.clone())?;
        Ok(SBox { space, table })
    }

    pub fn from_fn(space: FpSpace, f: impl Fn(usize) -> usize) -> Result<Self> {
        let table = (0..space.size()).map(|x| f(x) as u32).collect();
        Self::new(space, table)
    }

    pub fn identity(space: FpSpace) -> Self {
        SBox { space, table: (0..space.size() as u32).collect() }
    }

    /// `x ↦ x^{-1}` (and `0 ↦ 0`) on `F_q`, with `F_q` identified with
    /// `F_p^f` through the power basis.
    pub fn field_inversion(field: &FieldSpec) -> Result<Self> {
        let space = FpSpace::new(field.p(), field.degree())?;
        Self::from_fn(space, |x| {
            let a = field.element(x as u64);
            field.inv(&a).map_or(0, |b| field.index_of(&b) as usize)
        })
    }

    pub fn space(&self) -> &FpSpace {
        &self.space
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x] as usize
    }

    pub fn fixes_zero(&self) -> bool {
        self.table[0] == 0
    }

    pub fn inverse(&self) -> SBox {
        let mut inv = vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        SBox { space: self.space, table: inv }
    }
}

/// An invertible `F_q`-linear map of `V`, acting on row vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingLayer {
    matrix: Vec<Vec<FieldElement>>,
    /// Images of the `F_p` unit vectors, as points.
    basis_images: Vec<usize>,
    points: FpSpace,
}

impl MixingLayer {
    pub fn new(space: &VSpace, matrix: Vec<Vec<FieldElement>>) -> Result<Self> {
        let d = space.d();
        let field = space.field();
        if matrix.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.len() });
        }
        for row in &matrix {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            if let Some(bad) = row.iter().find(|a| !field.is_valid(a)) {
                return Err(Error::InvalidParameter(format!("{bad:?} is not an element of {field}")));
            }
        }
        let f = field.degree();
        let mut basis_images = Vec::with_capacity(space.e());
        for k in 0..space.e() {
            let (i, s) = (k / f, k % f);
            let xs = field.element((field.p() as u64).pow(s as u32));
            let entries = (0..d).map(|j| field.mul(&xs, &matrix[i][j])).collect();
            basis_images.push(space.encode(&Vector { entries })?);
        }
        let mut span = SpanBuilder::new(*space.points());
        for &y in &basis_images {
            span.insert(y);
        }
        if span.rank() != space.e() {
            return Err(Error::InvalidCipher("mixing layer matrix is singular".into()));
        }
        Ok(MixingLayer { matrix, basis_images, points: *space.points() })
    }

    /// Entries given as field-element indices, row-major.
    pub fn from_indices(space: &VSpace, rows: &[Vec<u64>]) -> Result<Self> {
        let q = space.field().order();
        let matrix = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| {
                        if c >= q {
                            Err(Error::InvalidParameter(format!("entry {c} is not below q = {q}")))
                        } else {
                            Ok(space.field().element(c))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, matrix)
    }

    pub fn identity(space: &VSpace) -> Self {
        let d = space.d();
        let field = space.field();
        let matrix =
            (0..d).map(|i| (0..d).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
        Self::new(space, matrix).expect("identity is invertible")
    }

    /// Exchanges brick `i` with brick `perm[i]`: brick `i` of the input lands
    /// in brick `perm[i]` of the output.
    pub fn brick_permutation(space: &VSpace, perm: &[usize]) -> Result<Self> {
        let (d, m) = (space.d(), space.m());
        let field = space.field();
        let mut matrix = vec![vec![field.zero(); d]; d];
        if perm.len() != space.n() {
            return Err(Error::DimensionMismatch { expected: space.n(), got: perm.len() });
        }
        for (i, &j) in perm.iter().enumerate() {
            if j >= space.n() {
                return Err(Error::InvalidParameter(format!("brick index {j} out of range")));
            }
            for t in 0..m {
                matrix[i * m + t][j * m + t] = field.one();
            }
        }
        Self::new(space, matrix)
    }

    pub fn matrix(&self) -> &[Vec<FieldElement>] {
        &self.matrix
    }

    pub fn matrix_indices(&self, field: &FieldSpec) -> Vec<Vec<u64>> {
        self.matrix.iter().map(|row| row.iter().map(|a| field.index_of(a)).collect()).collect()
    }

    pub fn basis_images(&self) -> &[usize] {
        &self.basis_images
    }

    /// `x ↦ xλ` on points.
    pub fn apply(&self, x: usize) -> usize {
        let s = &self.points;
        let p = s.p() as usize;
        let (mut x, mut out, mut k) = (x, 0usize, 0usize);
        while x > 0 {
            let c = (x % p) as u32;
            if c != 0 {
                out = s.add(out, s.scale(c, self.basis_images[k]));
            }
            x /= p;
            k += 1;
        }
        out
    }

    /// `vλ` computed with field arithmetic on the entries.
    pub fn apply_vector(&self, field: &FieldSpec, v: &Vector) -> Vector {
        let d = self.matrix.len();
        let entries = (0..d)
            .map(|j| {
                v.entries
                    .iter()
                    .zip(&self.matrix)
                    .fold(field.zero(), |acc, (vi, row)| field.add(&acc, &field.mul(vi, &row[j])))
            })
            .collect();
        Vector { entries }
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_table_unchecked(additive_table(&self.points, &self.basis_images))
    }
}

/// Table of the additive map sending unit vector `k` to `images[k]`.
fn additive_table(s: &FpSpace, images: &[usize]) -> Vec<u32> {
    let p = s.p() as usize;
    let mut table = vec![0u32; s.size()];
    for x in 1..s.size() {
        // lowest nonzero digit position j: table[x] = table[x - p^j] + images[j]
        let (mut rest, mut j, mut place) = (x, 0usize, 1usize);
        while rest % p == 0 {
            rest /= p;
            j += 1;
            place *= p;
        }
        table[x] = s.add(table[x - place] as usize, images[j]) as u32;
    }
    table
}

/// One round: bricks `γ_h`, layer `λ_h`, and whether its key schedule
/// column is claimed surjective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSpec {
    pub bricks: Vec<SBox>,
    pub layer: MixingLayer,
    pub proper: bool,
}

impl RoundSpec {
    pub fn new(space: &VSpace, bricks: Vec<SBox>, layer: MixingLayer, proper: bool) -> Result<Self> {
        if bricks.len() != space.n() {
            return Err(Error::DimensionMismatch { expected: space.n(), got: bricks.len() });
        }
        for (i, b) in bricks.iter().enumerate() {
            if b.space() != space.brick_space() {
                return Err(Error::DimensionMismatch { expected: space.brick_space().size(), got: b.space().size() });
            }
            if !b.fixes_zero() {
                return Err(Error::InvalidCipher(format!("brick {} does not fix 0", i + 1)));
            }
        }
        Ok(RoundSpec { bricks, layer, proper })
    }
}

pub fn bricklayer_point(space: &VSpace, bricks: &[SBox], x: usize) -> usize {
    let size = space.brick_space().size();
    let (mut rest, mut out, mut place) = (x, 0usize, 1usize);
    for b in bricks {
        out += b.apply(rest % size) * place;
        rest /= size;
        place *= size;
    }
    out
}

/// `vγ = v_1γ_1 + ... + v_nγ_n`.
pub fn apply_bricklayer(space: &VSpace, bricks: &[SBox], v: &Vector) -> Result<Vector> {
    if bricks.len() != space.n() {
        return Err(Error::DimensionMismatch { expected: space.n(), got: bricks.len() });
    }
    if let Some(b) = bricks.iter().find(|b| b.space() != space.brick_space()) {
        return Err(Error::DimensionMismatch { expected: space.brick_space().size(), got: b.space().size() });
    }
    let x = space.encode(v)?;
    Ok(space.decode(bricklayer_point(space, bricks, x)))
}

/// `ρ = γλ` as a permutation of `V`.
pub fn gamma_lambda(space: &VSpace, round: &RoundSpec) -> Permutation {
    let lam = additive_table(space.points(), round.layer.basis_images());
    let table = (0..space.size()).map(|x| lam[bricklayer_point(space, &round.bricks, x)]).collect();
    Permutation::from_table_unchecked(table)
}

/// `v ↦ vγλ + k`.
pub fn round_function(space: &VSpace, round: &RoundSpec, key: usize) -> Permutation {
    let pts = space.points();
    let table = gamma_lambda(space, round).into_table().into_iter().map(|y| pts.add(y as usize, key) as u32).collect();
    Permutation::from_table_unchecked(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorScope {
    /// `Γ_h` for the given zero-based round.
    Round(usize),
    /// `Γ_∞`, all rounds together.
    AllRounds,
}

/// A translation-based cipher over a toy message space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TbCipherSpec {
    pub space: VSpace,
    pub rounds: Vec<RoundSpec>,
    /// `key_schedule[k][h]` is the round-`h` key under master key `k`.
    pub key_schedule: Option<Vec<Vec<usize>>>,
}

impl TbCipherSpec {
    /// Requires at least one round flagged proper. With a key table, each
    /// flagged round's column must hit every vector. Properness of the
    /// layers themselves is reported by the analysis rather than enforced here.
    pub fn new(space: VSpace, rounds: Vec<RoundSpec>, key_schedule: Option<Vec<Vec<usize>>>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::InvalidCipher("a cipher needs at least one round".into()));
        }
        if !rounds.iter().any(|r| r.proper) {
            return Err(Error::InvalidCipher(
                "no proper round: some round must have every vector of V occur as its round key".into(),
            ));
        }
        if let Some(table) = &key_schedule {
            if table.is_empty() {
                return Err(Error::InvalidCipher("key schedule table is empty".into()));
            }
            for row in table {
                if row.len() != rounds.len() {
                    return Err(Error::DimensionMismatch { expected: rounds.len(), got: row.len() });
                }
                if let Some(&k) = row.iter().find(|&&k| k >= space.size()) {
                    return Err(Error::InvalidCipher(format!("round key {k} is not a point of V")));
                }
            }
            for (h, r) in rounds.iter().enumerate() {
                if !r.proper {
                    continue;
                }
                let mut hit = vec![false; space.size()];
                table.iter().for_each(|row| hit[row[h]] = true);
                if hit.iter().any(|&x| !x) {
                    return Err(Error::RoundNotProper { round: h + 1 });
                }
            }
        }
        Ok(TbCipherSpec { space, rounds, key_schedule })
    }

    /// The round used for `Γ_h`: the first flagged round whose layer is a
    /// proper mixing layer, otherwise the first flagged round.
    pub fn proper_round(&self) -> usize {
        let flagged = || self.rounds.iter().enumerate().filter(|(_, r)| r.proper);
        flagged()
            .find(|(_, r)| is_proper_mixing_layer(&r.layer, &self.space).is_ok_and(|m| m.proper))
            .or_else(|| flagged().next())
            .map(|(h, _)| h)
            .expect("construction guarantees a flagged round")
    }

    /// Both halves of the tb definition's second condition hold for some round.
    pub fn has_proper_round(&self) -> bool {
        self.rounds.iter().any(|r| r.proper && is_proper_mixing_layer(&r.layer, &self.space).is_ok_and(|m| m.proper))
    }

    pub fn key_count(&self) -> usize {
        self.key_schedule.as_ref().map_or(0, Vec::len)
    }

    pub fn encrypt_point(&self, key: usize, x: usize) -> Result<usize> {
        let row = self.key_row(key)?;
        let mut y = x;
        for (r, &k) in self.rounds.iter().zip(row) {
            let z = bricklayer_point(&self.space, &r.bricks, y);
            y = self.space.points().add(r.layer.apply(z), k);
        }
        Ok(y)
    }

    pub fn encrypt(&self, key: usize, v: &Vector) -> Result<Vector> {
        let x = self.space.encode(v)?;
        Ok(self.space.decode(self.encrypt_point(key, x)?))
    }

    /// Inverse of [`encrypt_point`](Self::encrypt_point), by inverting round tables.
    pub fn decrypt_point(&self, key: usize, y: usize) -> Result<usize> {
        let row = self.key_row(key)?;
        let mut x = y;
        for (h, r) in self.rounds.iter().enumerate().rev() {
            let inv = round_function(&self.space, r, row[h]).inverse();
            x = inv.image(x);
        }
        Ok(x)
    }

    fn key_row(&self, key: usize) -> Result<&[usize]> {
        self.key_schedule.as_ref().and_then(|t| t.get(key)).map(Vec::as_slice).ok_or(Error::UnknownKey(key))
    }

    /// Full permutation of `τ_k`.
    pub fn encryption_permutation(&self, key: usize) -> Result<Permutation> {
        let row = self.key_row(key)?;
        let mut acc = Permutation::identity(self.space.size());
        for (r, &k) in self.rounds.iter().zip(row) {
            acc = acc.then(&round_function(&self.space, r, k));
        }
        Ok(acc)
    }
}

/// Unit translations `σ_{b_1}, ..., σ_{b_e}`; they generate `T(V)`.
pub fn basis_translations(space: &FpSpace) -> Vec<Permutation> {
    (0..space.dim()).map(|k| Permutation::translation(space, space.basis_point(k))).collect()
}

/// `{ρ_h} ∪ unit translations` for one round, or every `ρ_h` plus the
/// translations once for all rounds.
pub fn group_generators(cipher: &TbCipherSpec, scope: GeneratorScope) -> Result<Vec<Permutation>> {
    let space = &cipher.space;
    let mut gens = match scope {
        GeneratorScope::Round(h) => {
            let round = cipher
                .rounds
                .get(h)
                .ok_or_else(|| Error::InvalidParameter(format!("round {} does not exist", h + 1)))?;
            if !round.proper {
                return Err(Error::RoundNotProper { round: h + 1 });
            }
            vec![gamma_lambda(space, round)]
        }
        GeneratorScope::AllRounds => cipher.rounds.iter().map(|r| gamma_lambda(space, r)).collect(),
    };
    gens.extend(basis_translations(space.points()));
    Ok(gens)
}

/// JSON form of a cipher. Brick tables and round keys use the point
/// encoding of [`VSpace`]; layer entries are field-element indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CipherDocument {
    pub field: String,
    pub m: usize,
    pub n: usize,
    pub rounds: Vec<RoundDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_schedule: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundDocument {
    pub bricks: Vec<Vec<u32>>,
    pub layer: Vec<Vec<u64>>,
    pub proper: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subgroups: Option<u64>,
}

impl CipherDocument {
    pub fn from_cipher(c: &TbCipherSpec) -> Self {
        let field = c.space.field();
        CipherDocument {
            field: field.to_string(),
            m: c.space.m(),
            n: c.space.n(),
            rounds: c
                .rounds
                .iter()
                .map(|r| RoundDocument {
                    bricks: r.bricks.iter().map(|b| b.table().to_vec()).collect(),
                    layer: r.layer.matrix_indices(field),
                    proper: r.proper,
                })
                .collect(),
            key_schedule: c.key_schedule.clone(),
            budget: None,
        }
    }

    pub fn to_cipher(&self) -> Result<TbCipherSpec> {
        let field: FieldSpec = self.field.parse()?;
        let space = VSpace::new(field, self.m, self.n)?;
        let rounds = self
            .rounds
            .iter()
            .enumerate()
            .map(|(h, r)| {
                let bricks = r
                    .bricks
                    .iter()
                    .map(|t| SBox::new(*space.brick_space(), t.clone()))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::InvalidCipher(format!("round {}: {e}", h + 1)))?;
                let layer = MixingLayer::from_indices(&space, &r.layer)
                    .map_err(|e| Error::InvalidCipher(format!("round {} layer: {e}", h + 1)))?;
                RoundSpec::new(&space, bricks, layer, r.proper)
                    .map_err(|e| Error::InvalidCipher(format!("round {}: {e}", h + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        TbCipherSpec::new(space, rounds, self.key_schedule.clone())
    }
}
