//! Analysis pipelines and their JSON reports.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{EnumBudget, FpSpace, SubgroupBasis};
use crate::cipher::{group_generators, GeneratorScope, SBox, TbCipherSpec};
use crate::error::{Error, Result};
use crate::group_engine::{
    bsgs_with_limit, classify_alt_sym, is_primitive, is_transitive, verify_block_coset_form, AltSymClass, BlockSystem,
    GroupBsgs, Permutation, DEFAULT_MAX_DEGREE,
};
use crate::mixing_analysis::{default_witness_budget, find_imprimitivity_witness_with_budget, is_proper_mixing_layer};
use crate::sbox_analysis::{
    check_anti_invariance_with_budget, check_coset_condition, check_weak_uniformity, AntiInvarianceReport, CosetReport,
    UniformityReport,
};

/// Violations listed in full up to this many; the count is always exact.
pub const MAX_LISTED_VIOLATIONS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Largest permutation degree handed to Schreier–Sims.
    pub max_degree: usize,
    /// Limits for the imprimitivity-witness scan over subgroups of `V`.
    pub witness: EnumBudget,
    /// Limits for anti-invariance scans inside a brick.
    pub brick_subgroups: EnumBudget,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_degree: DEFAULT_MAX_DEGREE,
            witness: default_witness_budget(),
            brick_subgroups: EnumBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct UniformityJson {
    pub delta: u64,
    pub min_image: usize,
    pub passes: bool,
    pub witness: usize,
}

impl From<&UniformityReport> for UniformityJson {
    fn from(r: &UniformityReport) -> Self {
        UniformityJson { delta: r.delta, min_image: r.min_image_size, passes: r.passes, witness: r.witness_a }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ViolationJson {
    /// Basis of `U` as points.
    pub u: Vec<usize>,
    /// Basis of `f(U)` as points.
    pub w: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AntiInvarianceJson {
    pub r: usize,
    pub passes: bool,
    pub violation_count: usize,
    pub violations: Vec<ViolationJson>,
    pub truncated: bool,
}

impl From<&AntiInvarianceReport> for AntiInvarianceJson {
    fn from(r: &AntiInvarianceReport) -> Self {
        AntiInvarianceJson {
            r: r.r,
            passes: r.passes,
            violation_count: r.violations.len(),
            violations: r
                .violations
                .iter()
                .take(MAX_LISTED_VIOLATIONS)
                .map(|(u, w)| ViolationJson { u: u.row_points(), w: w.row_points() })
                .collect(),
            truncated: r.violations.len() > MAX_LISTED_VIOLATIONS,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CosetJson {
    pub passes: bool,
    pub witness: Option<usize>,
}

impl From<&CosetReport> for CosetJson {
    fn from(r: &CosetReport) -> Self {
        CosetJson { passes: r.passes, witness: r.witness_a }
    }
}

/// The three brick criteria at one `r`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SBoxReport {
    pub fixes_zero: bool,
    pub weak_uniformity: UniformityJson,
    pub anti_invariance: AntiInvarianceJson,
    pub coset_condition: CosetJson,
}

/// Standalone brick analysis.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SBoxAnalysis {
    pub p: u32,
    pub m_p: usize,
    pub r: usize,
    /// Whether `1 ≤ r < m_p/2`.
    pub r_in_range: bool,
    #[serde(flatten)]
    pub report: SBoxReport,
    /// Weakly `p^r`-uniform, strongly `r`-anti-invariant, and `r` in range.
    pub primitivity_conditions: bool,
    pub coset_condition_holds: bool,
    pub passes: bool,
    pub warnings: Vec<String>,
}

fn r_in_range(r: usize, m_p: usize) -> bool {
    r >= 1 && 2 * r < m_p
}

fn p_pow(p: u32, r: usize) -> Result<u64> {
    (p as u64).checked_pow(r as u32).ok_or_else(|| Error::InvalidParameter(format!("p^r overflows for r = {r}")))
}

/// Memoised brick criteria, keyed by table and `r`.
struct BrickChecks<'a> {
    budget: &'a EnumBudget,
    weak: HashMap<(Vec<u32>, u64), UniformityReport>,
    anti: HashMap<(Vec<u32>, usize), AntiInvarianceReport>,
}

impl<'a> BrickChecks<'a> {
    fn new(budget: &'a EnumBudget) -> Self {
        BrickChecks { budget, weak: HashMap::new(), anti: HashMap::new() }
    }

    fn weak(&mut self, f: &SBox, delta: u64) -> Result<UniformityReport> {
        let key = (f.table().to_vec(), delta);
        if let Some(r) = self.weak.get(&key) {
            return Ok(r.clone());
        }
        let rep = check_weak_uniformity(f, delta)?;
        self.weak.insert(key, rep.clone());
        Ok(rep)
    }

    fn anti(&mut self, f: &SBox, r: usize) -> Result<AntiInvarianceReport> {
        let key = (f.table().to_vec(), r);
        if let Some(rep) = self.anti.get(&key) {
            return Ok(rep.clone());
        }
        let rep = check_anti_invariance_with_budget(f, r, self.budget)?;
        self.anti.insert(key, rep.clone());
        Ok(rep)
    }

    fn primitivity_conditions(&mut self, f: &SBox, r: usize) -> Result<bool> {
        let p = f.space().p();
        Ok(self.weak(f, p_pow(p, r)?)?.passes && self.anti(f, r)?.passes)
    }

    /// Largest `r` with `1 ≤ r < m_p/2` at which every brick satisfies both
    /// primitivity conditions.
    fn search_r(&mut self, bricks: &[&SBox]) -> Result<Option<usize>> {
        let m_p = bricks[0].space().dim();
        for r in (1..m_p).rev().filter(|&r| r_in_range(r, m_p)) {
            let mut all = true;
            for f in bricks {
                if !self.primitivity_conditions(f, r)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }
}

fn check_r(r: usize, m_p: usize) -> Result<()> {
    if r < 1 || r >= m_p {
        return Err(Error::InvalidParameter(format!("need 1 <= r < m_p = {m_p}, got r = {r}")));
    }
    Ok(())
}

/// Runs the uniformity, anti-invariance and coset checks on one brick.
///
/// Without `r`, the largest `r` in `1 ≤ r < m_p/2` satisfying both
/// primitivity conditions is chosen (or 1 if none does). `δ` defaults to `p^r`.
pub fn analyze_sbox(f: &SBox, delta: Option<u64>, r: Option<usize>, budget: &EnumBudget) -> Result<SBoxAnalysis> {
    let s = f.space();
    let m_p = s.dim();
    if m_p < 2 {
        return Err(Error::InvalidParameter("brick criteria need F_p-dimension at least 2".into()));
    }
    let mut checks = BrickChecks::new(budget);
    let mut warnings = Vec::new();
    if !f.fixes_zero() {
        warnings.push(format!("table does not fix 0 (0 -> {}); it cannot be a brick of a tb cipher", f.apply(0)));
    }
    let r = match r {
        Some(r) => {
            check_r(r, m_p)?;
            r
        }
        None => checks.search_r(&[f])?.unwrap_or(1),
    };
    if !r_in_range(r, m_p) {
        warnings.push(format!("r = {r} is outside 1 <= r < m_p/2 = {m_p}/2"));
    }
    let delta = match delta {
        Some(d) => d,
        None => p_pow(s.p(), r)?,
    };
    let weak = checks.weak(f, delta)?;
    let anti = checks.anti(f, r)?;
    let coset = check_coset_condition(f);
    let primitivity_conditions = r_in_range(r, m_p) && checks.primitivity_conditions(f, r)?;
    if delta != p_pow(s.p(), r)? {
        warnings.push(format!("delta = {delta} differs from p^r; the primitivity conditions use p^r"));
    }
    let report = SBoxReport {
        fixes_zero: f.fixes_zero(),
        weak_uniformity: (&weak).into(),
        anti_invariance: (&anti).into(),
        coset_condition: (&coset).into(),
    };
    let passes = weak.passes && anti.passes && coset.passes;
    Ok(SBoxAnalysis {
        p: s.p(),
        m_p,
        r,
        r_in_range: r_in_range(r, m_p),
        report,
        primitivity_conditions,
        coset_condition_holds: coset.passes,
        passes,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BlockJson {
    pub block_size: usize,
    pub block_count: usize,
    pub cell_of_zero: Vec<usize>,
    /// Basis (as points) of the subgroup whose cosets are the blocks.
    pub as_subgroup: Option<Vec<usize>>,
    pub coset_form: Option<bool>,
}

impl BlockJson {
    fn new(b: &BlockSystem, space: Option<&FpSpace>) -> Self {
        BlockJson {
            block_size: b.block_size,
            block_count: b.blocks.len(),
            cell_of_zero: b.cell_of(0).to_vec(),
            as_subgroup: b.as_subgroup.as_ref().map(SubgroupBasis::row_points),
            coset_form: space.map(|s| verify_block_coset_form(b, s)),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GroupReport {
    pub degree: usize,
    pub generators: usize,
    /// Decimal.
    pub order: String,
    pub transitive: bool,
    pub primitive: bool,
    pub blocks: Option<BlockJson>,
    pub class: AltSymClass,
}

/// Order, transitivity, primitivity and Alt/Sym class of `⟨gens⟩`. With a
/// space, a found block system is also checked to consist of cosets.
pub fn group_report(
    gens: &[Permutation],
    space: Option<&FpSpace>,
    max_degree: usize,
) -> Result<(GroupReport, GroupBsgs)> {
    let g = bsgs_with_limit(gens, max_degree)?;
    let transitive = is_transitive(&g);
    let (primitive, blocks) = if transitive {
        let prim = is_primitive(gens, space)?;
        (prim.primitive, prim.blocks.map(|b| BlockJson::new(&b, space)))
    } else {
        (false, None)
    };
    let report = GroupReport {
        degree: g.degree(),
        generators: gens.len(),
        order: g.order().to_string(),
        transitive,
        primitive,
        blocks,
        class: classify_alt_sym(&g),
    };
    Ok((report, g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    TheoremMainSatisfied,
    PrimitiveOnly,
    Imprimitive,
    HypothesesFail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotEvaluated,
}

impl From<bool> for Status {
    fn from(b: bool) -> Self {
        if b {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SpaceJson {
    pub field: String,
    pub p: u32,
    pub f: usize,
    pub m: usize,
    pub n: usize,
    pub e: usize,
    pub m_p: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BrickReport {
    pub brick: usize,
    #[serde(flatten)]
    pub report: SBoxReport,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LayerJson {
    pub round: usize,
    pub proper_layer: bool,
    pub invariant_subset: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ImprimitivityJson {
    pub found: bool,
    #[serde(rename = "W_basis")]
    pub w_basis: Vec<usize>,
    pub dim: usize,
    pub verified: bool,
    /// Whether the cosets of `W` are permuted by `ρ` and every translation.
    pub blocks_invariant: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CipherGroups {
    pub gamma_h: GroupReport,
    pub gamma_infinity: GroupReport,
    /// Whether the witness search and the block scan agree on `Γ_h`.
    pub witness_agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AnalysisReport {
    pub cipher_id: String,
    pub space: SpaceJson,
    pub rounds: usize,
    /// One-based index of the round used for `Γ_h` and the brick checks.
    pub proper_round: usize,
    pub r: usize,
    pub sbox_reports: Vec<BrickReport>,
    pub layer_report: Vec<LayerJson>,
    pub imprimitivity: Option<ImprimitivityJson>,
    pub group_report: Option<CipherGroups>,
    pub hypotheses: Vec<Hypothesis>,
    pub omissions: Vec<String>,
    pub skipped: Vec<String>,
    pub verdict: Verdict,
}

impl AnalysisReport {
    /// 0 when every evaluated hypothesis and conclusion holds, 1 otherwise,
    /// 2 when part of the analysis was omitted for budget reasons.
    pub fn exit_code(&self) -> i32 {
        if !self.omissions.is_empty() {
            2
        } else if self.hypotheses.iter().any(|h| h.status == Status::Fail) {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub r: Option<usize>,
    pub skip_group: bool,
}

fn is_budget_error(e: &Error) -> bool {
    matches!(e, Error::BudgetExceeded(_) | Error::EnumerationTooLarge { .. })
}

/// The full pipeline on one cipher: layer and brick criteria on the proper
/// round, the witness search, `Γ_h` and `Γ_∞`, and the verdict.
pub fn verify_cipher(
    cipher: &TbCipherSpec,
    id: &str,
    opts: VerifyOptions,
    budgets: &Budgets,
) -> Result<AnalysisReport> {
    let space = &cipher.space;
    let m_p = space.m_p();
    let h = cipher.proper_round();
    let round = &cipher.rounds[h];
    let mut omissions = Vec::new();
    let mut skipped = Vec::new();

    let layer_report = cipher
        .rounds
        .iter()
        .enumerate()
        .filter(|(_, r)| r.proper)
        .map(|(i, r)| {
            let rep = is_proper_mixing_layer(&r.layer, space)?;
            Ok(LayerJson { round: i + 1, proper_layer: rep.proper, invariant_subset: rep.invariant_subset })
        })
        .collect::<Result<Vec<_>>>()?;
    let layer_proper = layer_report.iter().find(|l| l.round == h + 1).is_some_and(|l| l.proper_layer);

    // brick criteria
    let mut checks = BrickChecks::new(&budgets.brick_subgroups);
    let bricks: Vec<&SBox> = round.bricks.iter().collect();
    let brick_dim_ok = m_p >= 2;
    let (r, r_found) = match opts.r {
        Some(r) => {
            check_r(r, m_p)?;
            (r, true)
        }
        None if brick_dim_ok => match checks.search_r(&bricks)? {
            Some(r) => (r, true),
            None => (1, false),
        },
        None => (1, false),
    };
    let mut sbox_reports = Vec::new();
    let (mut weak_all, mut anti_all, mut coset_all) = (true, true, true);
    if brick_dim_ok {
        let delta = p_pow(space.p(), r)?;
        for (i, f) in bricks.iter().enumerate() {
            let weak = checks.weak(f, delta)?;
            let anti = checks.anti(f, r)?;
            let coset = check_coset_condition(f);
            weak_all &= weak.passes;
            anti_all &= anti.passes;
            coset_all &= coset.passes;
            sbox_reports.push(BrickReport {
                brick: i + 1,
                report: SBoxReport {
                    fixes_zero: f.fixes_zero(),
                    weak_uniformity: (&weak).into(),
                    anti_invariance: (&anti).into(),
                    coset_condition: (&coset).into(),
                },
            });
        }
    } else {
        coset_all = bricks.iter().all(|f| check_coset_condition(f).passes);
    }
    let range_ok = r_in_range(r, m_p);
    let sbox_ok = brick_dim_ok && range_ok && weak_all && anti_all;

    // Γ_h via subgroups of V
    let mut imprimitivity = None;
    match find_imprimitivity_witness_with_budget(&round.bricks, &round.layer, space, &budgets.witness) {
        Ok(found) => {
            let gens = group_generators(cipher, GeneratorScope::Round(h))?;
            imprimitivity = Some(match found {
                Some(w) => ImprimitivityJson {
                    found: true,
                    w_basis: w.w.row_points(),
                    dim: w.w.dim(),
                    verified: w.verified,
                    blocks_invariant: w.blocks().is_invariant_under(&gens),
                },
                None => {
                    ImprimitivityJson { found: false, w_basis: vec![], dim: 0, verified: true, blocks_invariant: false }
                }
            });
        }
        Err(e) if is_budget_error(&e) => omissions.push(format!("imprimitivity witness search: {e}")),
        Err(e) => return Err(e),
    }

    // Γ_h and Γ_∞ via permutation groups
    let mut group_report_out = None;
    if opts.skip_group {
        skipped.push("group computation (--skip-group)".into());
    } else {
        let gh = group_generators(cipher, GeneratorScope::Round(h))?;
        let ginf = group_generators(cipher, GeneratorScope::AllRounds)?;
        match group_report(&gh, Some(space.points()), budgets.max_degree)
            .and_then(|(a, _)| Ok((a, group_report(&ginf, Some(space.points()), budgets.max_degree)?.0)))
        {
            Ok((gamma_h, gamma_infinity)) => {
                let witness_agrees = imprimitivity.as_ref().map(|w| w.found != gamma_h.primitive);
                group_report_out = Some(CipherGroups { gamma_h, gamma_infinity, witness_agrees });
            }
            Err(e) if is_budget_error(&e) => omissions.push(format!("group computation: {e}")),
            Err(e) => return Err(e),
        }
    }

    // conclusions
    let primitive: Option<bool> = match (&group_report_out, &imprimitivity) {
        (Some(g), _) => Some(g.gamma_h.primitive),
        (None, Some(w)) => Some(!w.found),
        (None, None) => None,
    };
    let alt_sym = group_report_out.as_ref().map(|g| g.gamma_infinity.class != AltSymClass::ProperSubgroup);

    let verdict = if primitive == Some(false) {
        if !sbox_ok || layer_proper {
            Verdict::Imprimitive
        } else {
            Verdict::HypothesesFail
        }
    } else if !sbox_ok || !layer_proper {
        Verdict::HypothesesFail
    } else if primitive == Some(true) && alt_sym == Some(true) && coset_all {
        Verdict::TheoremMainSatisfied
    } else {
        Verdict::PrimitiveOnly
    };

    let keys_detail = if cipher.key_schedule.is_some() {
        format!("round {} key column covers V", h + 1)
    } else {
        format!("round {} flagged proper; no key table to check", h + 1)
    };
    let opt_status = |x: Option<bool>| x.map_or(Status::NotEvaluated, Status::from);
    let brick_status = |ok: bool| if brick_dim_ok { Status::from(ok) } else { Status::NotEvaluated };
    let hypotheses = vec![
        Hypothesis { name: "round_keys_surjective", status: Status::Pass, detail: keys_detail },
        Hypothesis {
            name: "proper_mixing_layer",
            status: layer_proper.into(),
            detail: format!("layer of round {}", h + 1),
        },
        Hypothesis {
            name: "r_in_range",
            status: (brick_dim_ok && range_ok).into(),
            detail: format!(
                "r = {r}, m_p = {m_p}{}",
                if opts.r.is_none() && !r_found { " (no r in range satisfies both brick conditions)" } else { "" }
            ),
        },
        Hypothesis {
            name: "weak_uniformity",
            status: brick_status(weak_all),
            detail: format!("every brick weakly p^r = {}-uniform", (space.p() as u64).saturating_pow(r as u32)),
        },
        Hypothesis {
            name: "anti_invariance",
            status: brick_status(anti_all),
            detail: format!("every brick strongly {r}-anti-invariant"),
        },
        Hypothesis {
            name: "coset_condition",
            status: coset_all.into(),
            detail: "no difference image of a brick is a coset".into(),
        },
        Hypothesis {
            name: "gamma_h_primitive",
            status: opt_status(primitive),
            detail: format!("group generated by round {} with all translations", h + 1),
        },
        Hypothesis {
            name: "gamma_infinity_alt_sym",
            status: opt_status(alt_sym),
            detail: "group generated by all rounds is Alt(V) or Sym(V)".into(),
        },
    ];

    let field = space.field();
    Ok(AnalysisReport {
        cipher_id: id.to_string(),
        space: SpaceJson {
            field: field.to_string(),
            p: field.p(),
            f: field.degree(),
            m: space.m(),
            n: space.n(),
            e: space.e(),
            m_p,
            points: space.size(),
        },
        rounds: cipher.rounds.len(),
        proper_round: h + 1,
        r,
        sbox_reports,
        layer_report,
        imprimitivity,
        group_report: group_report_out,
        hypotheses,
        omissions,
        skipped,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FieldSpec, VSpace};
    use crate::cipher::MixingLayer;
    use crate::corpus::one_round_cipher;

    fn identity_cipher() -> TbCipherSpec {
        let v = VSpace::new(FieldSpec::prime(2).unwrap(), 2, 2).unwrap();
        let bricks = vec![SBox::identity(*v.brick_space()); 2];
        let layer = MixingLayer::identity(&v);
        one_round_cipher(v, bricks, layer).unwrap()
    }

    #[test]
    fn identity_cipher_is_imprimitive() {
        let rep = verify_cipher(&identity_cipher(), "id", VerifyOptions::default(), &Budgets::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Imprimitive);
        let w = rep.imprimitivity.as_ref().unwrap();
        assert!(w.found && w.verified && w.blocks_invariant);
        let g = rep.group_report.as_ref().unwrap();
        assert_eq!(g.gamma_h.order, "16");
        assert!(!g.gamma_h.primitive);
        assert_eq!(g.gamma_h.blocks.as_ref().unwrap().coset_form, Some(true));
        assert_eq!(g.witness_agrees, Some(true));
        assert_eq!(rep.exit_code(), 1);
    }

    #[test]
    fn skip_group_caps_verdict() {
        let rep =
            verify_cipher(&identity_cipher(), "id", VerifyOptions { r: None, skip_group: true }, &Budgets::default())
                .unwrap();
        assert!(rep.group_report.is_none());
        // the witness search alone still shows imprimitivity
        assert_eq!(rep.verdict, Verdict::Imprimitive);
        assert_eq!(rep.skipped.len(), 1);
    }

    #[test]
    fn witness_budget_is_an_omission() {
        let budgets = Budgets { witness: EnumBudget { max_points: 8, max_subgroups: 10 }, ..Budgets::default() };
        let rep = verify_cipher(&identity_cipher(), "id", VerifyOptions::default(), &budgets).unwrap();
        assert!(rep.imprimitivity.is_none());
        assert_eq!(rep.exit_code(), 2);
        assert_eq!(rep.verdict, Verdict::Imprimitive);
    }

    #[test]
    fn analyze_identity_sbox() {
        let f = SBox::identity(FpSpace::new(2, 3).unwrap());
        let a = analyze_sbox(&f, Some(2), Some(1), &EnumBudget::default()).unwrap();
        assert!(!a.passes);
        assert!(!a.primitivity_conditions);
        assert!(a.warnings.is_empty());
        assert!(analyze_sbox(&f, None, Some(3), &EnumBudget::default()).is_err());
    }
}
