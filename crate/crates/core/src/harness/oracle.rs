//! Independent reference implementations used to validate the fast paths.
//!
//! Nothing here reuses the precomputed derivatives or the fixpoint engine:
//! weak closure is recomputed by relaxation, divergence by path unrolling,
//! and every simulation clause is compiled literally from its
//! `==>`-challenge definition into "R meets this pair set" obligations.

use crate::error::{Error, Result};
use crate::model::{EncodingInstance, ReductionSystem, Side};
use crate::predicate::{Constraint, Predicate};
use crate::rel::{Carrier, Rel};
use crate::relations::SimKind;
use crate::witness::{plan_lemma, Condition, LemmaArgs, LemmaId};

/// Largest carrier the enumerating oracles accept (16 pairs).
pub const ENUMERATION_LIMIT: usize = 4;

/// Reflexive-transitive closure of the raw step list, by relaxation.
pub fn weak_closure(sys: &ReductionSystem) -> Vec<Vec<bool>> {
    let n = sys.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    let steps: Vec<(usize, usize)> = sys.steps().collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for &(a, b) in &steps {
                if reach[i][a] && !reach[i][b] {
                    reach[i][b] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// A path of `n` steps from `i` must revisit a state, so on finite systems
/// divergence is the existence of such a path.
pub fn divergent_by_unrolling(sys: &ReductionSystem, i: usize) -> bool {
    let n = sys.len();
    let mut frontier = vec![false; n];
    frontier[i] = true;
    for _ in 0..n {
        let mut next = vec![false; n];
        for (a, b) in sys.steps() {
            if frontier[a] {
                next[b] = true;
            }
        }
        if !next.iter().any(|&x| x) {
            return false;
        }
        frontier = next;
    }
    true
}

/// Predicate evaluation from first principles.
pub fn holds(sys: &ReductionSystem, closure: &[Vec<bool>], i: usize, pred: &Predicate) -> bool {
    let reaches = |f: &dyn Fn(usize) -> bool| (0..sys.len()).any(|j| closure[i][j] && f(j));
    match pred {
        Predicate::HasBarb(a) => sys.barbs_at(i).contains(a),
        Predicate::ReachesBarb(a) => reaches(&|j| sys.barbs_at(j).contains(a)),
        Predicate::HasSuccess => sys.success_at(i),
        Predicate::ReachesSuccess => reaches(&|j| sys.success_at(j)),
        Predicate::Divergent => divergent_by_unrolling(sys, i),
    }
}

/// Obligations of one pair: for every clause, `R` must contain at least one
/// of the listed pairs.
type Clauses = Vec<Vec<(usize, usize)>>;

/// The literal clauses of `kind` at every pair, indexed `p * n + q`.
pub fn compile_clauses(kind: SimKind, sys: &ReductionSystem) -> Vec<Clauses> {
    let n = sys.len();
    let weak = weak_closure(sys);
    let mut strong = vec![vec![false; n]; n];
    for (a, b) in sys.steps() {
        strong[a][b] = true;
    }
    let derivs = |rel: &Vec<Vec<bool>>, x: usize| -> Vec<usize> { (0..n).filter(|&y| rel[x][y]).collect() };
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let mut clauses: Clauses = Vec::new();
            match kind {
                SimKind::StrongBisim => {
                    for p1 in derivs(&strong, p) {
                        clauses.push(derivs(&strong, q).into_iter().map(|q1| (p1, q1)).collect());
                    }
                    for q1 in derivs(&strong, q) {
                        clauses.push(derivs(&strong, p).into_iter().map(|p1| (p1, q1)).collect());
                    }
                }
                SimKind::WeakBisim => {
                    for p1 in derivs(&weak, p) {
                        clauses.push(derivs(&weak, q).into_iter().map(|q1| (p1, q1)).collect());
                    }
                    for q1 in derivs(&weak, q) {
                        clauses.push(derivs(&weak, p).into_iter().map(|p1| (p1, q1)).collect());
                    }
                }
                SimKind::CoupledSim => {
                    for p1 in derivs(&weak, p) {
                        clauses.push(derivs(&weak, q).into_iter().map(|q1| (p1, q1)).collect());
                        clauses.push(derivs(&weak, q).into_iter().map(|q1| (q1, p1)).collect());
                    }
                }
                SimKind::CorrespondenceSim => {
                    for p1 in derivs(&weak, p) {
                        clauses.push(derivs(&weak, q).into_iter().map(|q1| (p1, q1)).collect());
                    }
                    for q1 in derivs(&weak, q) {
                        let mut answers = Vec::new();
                        for p2 in derivs(&weak, p) {
                            for q2 in derivs(&weak, q1) {
                                answers.push((p2, q2));
                            }
                        }
                        clauses.push(answers);
                    }
                }
            }
            out.push(clauses);
        }
    }
    out
}

/// Literal `==>`-challenge check of `kind` on `rel`.
pub fn literal_is_simulation(kind: SimKind, sys: &ReductionSystem, rel: &Rel) -> bool {
    let n = sys.len();
    let clauses = compile_clauses(kind, sys);
    rel.pairs().all(|(p, q)| clauses[p * n + q].iter().all(|clause| clause.iter().any(|&(a, b)| rel.contains(a, b))))
}

fn bit(n: usize, a: usize, b: usize) -> u32 {
    1 << (a * n + b)
}

fn mask_of(n: usize, pairs: &[(usize, usize)]) -> u32 {
    pairs.iter().fold(0, |m, &(a, b)| m | bit(n, a, b))
}

fn rel_of_mask(carrier: Carrier, n: usize, m: u32) -> Rel {
    let mut r = Rel::empty(carrier, n);
    for a in 0..n {
        for b in 0..n {
            if m & bit(n, a, b) != 0 {
                r.insert(a, b);
            }
        }
    }
    r
}

fn mask_of_rel(rel: &Rel) -> u32 {
    let n = rel.size();
    rel.pairs().fold(0, |m, (a, b)| m | bit(n, a, b))
}

/// Per-pair clause masks, ready for bit tests.
struct MaskClauses {
    n: usize,
    clauses: Vec<Vec<u32>>,
}

impl MaskClauses {
    fn new(kind: SimKind, sys: &ReductionSystem) -> Self {
        let n = sys.len();
        let clauses =
            compile_clauses(kind, sys).into_iter().map(|cs| cs.iter().map(|c| mask_of(n, c)).collect()).collect();
        MaskClauses { n, clauses }
    }

    fn satisfied(&self, m: u32) -> bool {
        (0..self.n * self.n).filter(|&k| m & (1 << k) != 0).all(|k| self.clauses[k].iter().all(|&c| m & c != 0))
    }
}

/// Pairs allowed by per-pair constraints.
fn admitted_mask(sys: &ReductionSystem, constraints: &[Constraint]) -> u32 {
    let n = sys.len();
    let closure = weak_closure(sys);
    let alphabet = sys.barb_alphabet();
    let mut m = 0;
    for a in 0..n {
        for b in 0..n {
            let ok = constraints.iter().all(|c| {
                c.selector
                    .expand(&alphabet)
                    .iter()
                    .all(|p| c.mode.admits(holds(sys, &closure, a, p), holds(sys, &closure, b, p)))
            });
            if ok {
                m |= bit(n, a, b);
            }
        }
    }
    m
}

/// Calls `f` on every subset of `free`, including the empty one.
fn for_each_submask(free: u32, mut f: impl FnMut(u32) -> bool) -> bool {
    let mut sub = free;
    loop {
        if f(sub) {
            return true;
        }
        if sub == 0 {
            return false;
        }
        sub = (sub - 1) & free;
    }
}

/// The union of every relation of `kind` satisfying `constraints`, found by
/// enumerating all relations over `sys`.
pub fn brute_force_greatest(kind: SimKind, sys: &ReductionSystem, constraints: &[Constraint]) -> Result<Rel> {
    let n = sys.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { states: n, limit: ENUMERATION_LIMIT });
    }
    let clauses = MaskClauses::new(kind, sys);
    let allowed = admitted_mask(sys, constraints);
    let mut union = 0u32;
    for_each_submask(allowed, |m| {
        if m & !union != 0 && clauses.satisfied(m) {
            union |= m;
        }
        false
    });
    Ok(rel_of_mask(Carrier::Combined, n, union))
}

fn transitive_mask(n: usize, m: u32) -> bool {
    (0..n).all(|a| {
        (0..n).all(|b| m & bit(n, a, b) == 0 || (0..n).all(|c| m & bit(n, b, c) == 0 || m & bit(n, a, c) != 0))
    })
}

fn reflexive_mask(n: usize, m: u32) -> bool {
    (0..n).all(|a| m & bit(n, a, a) != 0)
}

fn sym_mask(n: usize, m: u32) -> u32 {
    let mut s = m;
    for a in 0..n {
        for b in 0..n {
            if m & bit(n, a, b) != 0 {
                s |= bit(n, b, a);
            }
        }
    }
    s
}

/// Whether some relation over the combined domain satisfies every
/// right-hand-side condition of `lemma`, by enumeration. FA-RESTRICT is
/// universal in its relation, so there the supplied one is checked.
pub fn brute_force_exists_rhs(lemma: LemmaId, enc: &EncodingInstance, args: &LemmaArgs) -> Result<bool> {
    let c = enc.combined();
    let sys = c.system();
    let n = sys.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { states: n, limit: ENUMERATION_LIMIT });
    }
    let plan = plan_lemma(lemma, enc, args)?;
    let full: u32 = if n == 0 { 0 } else { (1u32 << (n * n)) - 1 };
    let mut required = 0u32;
    let mut forbidden = 0u32;
    let mut sims: Vec<MaskClauses> = Vec::new();
    let mut transitive = false;
    let mut sym_preorder = false;
    // (side pairs mask, expected mask on those pairs), compared after symmetrizing
    let mut sym_blocks: Vec<(u32, u32)> = Vec::new();
    let side_block = |side: Side| -> u32 {
        let range = match side {
            Side::Source => c.source_indices(),
            Side::Target => c.target_indices(),
        };
        let mut m = 0;
        for a in range.clone() {
            for b in range.clone() {
                m |= bit(n, a, b);
            }
        }
        m
    };
    for cond in &plan.rhs {
        match cond {
            Condition::ContainsEncoding | Condition::ContainsBoth => {
                for s in c.source_indices() {
                    let t = enc.translate_combined(s);
                    required |= bit(n, s, t);
                    if matches!(cond, Condition::ContainsBoth) {
                        required |= bit(n, t, s);
                    }
                }
            }
            Condition::RestrictsTo(side, rel) => {
                let block = side_block(*side);
                let expected = mask_of_rel(&c.lift(rel));
                required |= expected;
                forbidden |= block & !expected;
            }
            Condition::SymRestrictsTo(side, rel) => {
                sym_blocks.push((side_block(*side), mask_of_rel(&c.lift(rel))));
            }
            Condition::TranslationBound(rt) => {
                let rt = c.lift(rt);
                for s in c.source_indices() {
                    for t in c.target_indices() {
                        if !rt.contains(enc.translate_combined(s), t) {
                            forbidden |= bit(n, s, t);
                        }
                    }
                }
            }
            Condition::Transitive => transitive = true,
            Condition::Preorder => {
                transitive = true;
                for a in 0..n {
                    required |= bit(n, a, a);
                }
            }
            Condition::SymPreorder => sym_preorder = true,
            Condition::Simulation(kind) => sims.push(MaskClauses::new(*kind, sys)),
            Condition::Respects(con) => forbidden |= full & !admitted_mask(sys, std::slice::from_ref(con)),
            Condition::Agreement(rt) => {
                let rt = c.lift(rt);
                for s1 in c.source_indices() {
                    for s2 in c.source_indices() {
                        let (t1, t2) = (enc.translate_combined(s1), enc.translate_combined(s2));
                        if rt.contains(t1, t2) {
                            required |= bit(n, t1, t2);
                        } else {
                            forbidden |= bit(n, t1, t2);
                        }
                    }
                }
            }
            Condition::Fixed(_, v) => {
                if !v.holds() {
                    return Ok(false);
                }
            }
        }
    }
    if plan.witness.is_none() {
        // only fixed conditions
        return Ok(true);
    }
    if required & forbidden != 0 {
        return Ok(false);
    }
    let satisfies = |m: u32| {
        m & required == required
            && m & forbidden == 0
            && (!transitive || transitive_mask(n, m))
            && (!sym_preorder || {
                let s = sym_mask(n, m);
                reflexive_mask(n, s) && transitive_mask(n, s)
            })
            && sym_blocks.iter().all(|&(block, expected)| sym_mask(n, m) & block == expected)
            && sims.iter().all(|s| s.satisfied(m))
    };
    if lemma == LemmaId::FaRestrict {
        // R is given, not sought: the lemma quantifies over every transitive R
        let given = plan.witness.as_ref().expect("FA-RESTRICT carries R");
        return Ok(satisfies(mask_of_rel(given)));
    }
    let free = full & !required & !forbidden;
    Ok(for_each_submask(free, |sub| satisfies(required | sub)))
}

/// Checks FA-RESTRICT for every transitive relation over the combined
/// domain that contains both orientations of the encoding: `RS` is the
/// source restriction iff the relation agrees with `RT` on translations.
/// Returns the first relation violating the bi-implication, if any.
pub fn brute_force_restrict_lemma(enc: &EncodingInstance, rs: &Rel, rt: &Rel) -> Result<Option<Rel>> {
    let c = enc.combined();
    let n = c.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { states: n, limit: ENUMERATION_LIMIT });
    }
    let full: u32 = if n == 0 { 0 } else { (1u32 << (n * n)) - 1 };
    let mut both = 0u32;
    for s in c.source_indices() {
        let t = enc.translate_combined(s);
        both |= bit(n, s, t) | bit(n, t, s);
    }
    let mut source_block = 0u32;
    for a in c.source_indices() {
        for b in c.source_indices() {
            source_block |= bit(n, a, b);
        }
    }
    let rs_mask = mask_of_rel(&c.lift(rs));
    let rt = c.lift(rt);
    let mut found = None;
    for_each_submask(full & !both, |sub| {
        let m = both | sub;
        if !transitive_mask(n, m) {
            return false;
        }
        let lhs = m & source_block == rs_mask;
        let rhs = c.source_indices().all(|s1| {
            c.source_indices().all(|s2| {
                let (t1, t2) = (enc.translate_combined(s1), enc.translate_combined(s2));
                rt.contains(t1, t2) == (m & bit(n, t1, t2) != 0)
            })
        });
        if lhs != rhs {
            found = Some(rel_of_mask(Carrier::Combined, n, m));
            return true;
        }
        false
    });
    Ok(found)
}
