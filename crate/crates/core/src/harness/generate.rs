//! Seeded random instances for falsification.
//!
//! Every instance is a pure function of `(seed, index)`: the RNG is ChaCha8
//! keyed by the seed with the index as its stream, so instances can be
//! produced in any order or in parallel.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::document::Bundle;
use crate::error::{Error, Result};
use crate::model::{validate_instance, InstanceSpec, ReductionSystem, SystemSpec};
use crate::predicate::Constraint;
use crate::rel::{Carrier, ClosureOp, Rel};
use crate::relations::{expand_constraints, is_simulation, pair_admitted, simulation_interior, SimKind};

/// Rounds of close-drop-shrink before a candidate is rejected.
pub const REPAIR_ROUNDS: usize = 16;

/// Closure applied to freshly drawn relation candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosurePolicy {
    /// Pairs as drawn.
    Literal,
    Preorder,
    Equivalence,
    /// One of the above, drawn per relation.
    Mixed,
}

impl ClosurePolicy {
    fn ops(self, rng: &mut impl Rng) -> &'static [ClosureOp] {
        const PRE: &[ClosureOp] = &[ClosureOp::Refl, ClosureOp::Trans];
        const EQ: &[ClosureOp] = &[ClosureOp::Refl, ClosureOp::Sym, ClosureOp::Trans];
        match self {
            ClosurePolicy::Literal => &[],
            ClosurePolicy::Preorder => PRE,
            ClosurePolicy::Equivalence => EQ,
            ClosurePolicy::Mixed => [&[][..], PRE, EQ][rng.gen_range(0..3)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_src: usize,
    pub max_tgt: usize,
    pub step_density: f64,
    pub barbs: Vec<String>,
    /// Chance that a state carries a given barb.
    pub barb_prob: f64,
    pub success_prob: f64,
    /// Chance that a pair seeds a relation candidate.
    pub rel_density: f64,
    pub closure: ClosurePolicy,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_src: 4,
            max_tgt: 5,
            step_density: 0.3,
            barbs: vec!["a".into(), "b".into(), "c".into()],
            barb_prob: 0.25,
            success_prob: 0.2,
            rel_density: 0.2,
            closure: ClosurePolicy::Mixed,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_src == 0 || self.max_tgt == 0 {
            return Err(Error::Usage("state bounds must be positive".into()));
        }
        for (name, p) in [
            ("step density", self.step_density),
            ("barb probability", self.barb_prob),
            ("success probability", self.success_prob),
            ("relation density", self.rel_density),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Usage(format!("{name} must lie in [0,1], got {p}")));
            }
        }
        Ok(())
    }

    /// The RNG for instance `index`, offset by `salt` so callers can draw
    /// independent parameter streams for the same instance.
    pub fn rng(&self, index: u64, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.set_stream(index);
        rng
    }
}

/// How the target side of an instance was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Independent target system and random mapping.
    Random,
    /// Target copies the source, some steps split by an intermediate state.
    Derived,
    /// Random target no larger than the source, every target state hit.
    Surjective,
}

/// An instance with its `RS` and `RT` candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub index: u64,
    pub shape: Shape,
    pub bundle: Bundle,
}

struct Draft {
    states: Vec<String>,
    steps: Vec<(usize, usize)>,
    barbs: Vec<Vec<String>>,
    success: Vec<bool>,
}

impl Draft {
    fn new(prefix: &str, n: usize) -> Self {
        Draft {
            states: (0..n).map(|i| format!("{prefix}{i}")).collect(),
            steps: Vec::new(),
            barbs: vec![Vec::new(); n],
            success: vec![false; n],
        }
    }

    fn add_state(&mut self, prefix: &str) -> usize {
        let i = self.states.len();
        self.states.push(format!("{prefix}{i}"));
        self.barbs.push(Vec::new());
        self.success.push(false);
        i
    }

    fn random_steps(&mut self, rng: &mut impl Rng, density: f64) {
        let n = self.states.len();
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(density) {
                    self.steps.push((a, b));
                }
            }
        }
    }

    fn random_observables(&mut self, rng: &mut impl Rng, config: &GenConfig) {
        for i in 0..self.states.len() {
            for barb in &config.barbs {
                if rng.gen_bool(config.barb_prob) {
                    self.barbs[i].push(barb.clone());
                }
            }
            self.success[i] = rng.gen_bool(config.success_prob);
        }
    }

    fn spec(&self) -> SystemSpec {
        let name = |i: usize| self.states[i].clone();
        let mut steps: Vec<_> = self.steps.iter().map(|&(a, b)| (name(a), name(b))).collect();
        steps.sort();
        steps.dedup();
        SystemSpec {
            states: self.states.clone(),
            steps,
            barbs: self
                .barbs
                .iter()
                .enumerate()
                .filter(|(_, bs)| !bs.is_empty())
                .map(|(i, bs)| (name(i), bs.clone()))
                .collect(),
            success: (0..self.states.len()).filter(|&i| self.success[i]).map(name).collect(),
        }
    }
}

fn random_relation(rng: &mut impl Rng, carrier: Carrier, n: usize, density: f64) -> Rel {
    let mut r = Rel::empty(carrier, n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
        }
    }
    r
}

/// `{(S1,S2) | ([S1],[S2]) in RT}`.
pub fn pullback(mapping: &[usize], rt: &Rel) -> Rel {
    let n = mapping.len();
    let mut rs = Rel::empty(Carrier::Source, n);
    for a in 0..n {
        for b in 0..n {
            if rt.contains(mapping[a], mapping[b]) {
                rs.insert(a, b);
            }
        }
    }
    rs
}

/// Instance `index` of the stream defined by `config`.
pub fn generate(config: &GenConfig, index: u64) -> Generated {
    let rng = &mut config.rng(index, 0);
    let n_src = rng.gen_range(1..=config.max_src);
    let mut source = Draft::new("s", n_src);
    source.random_steps(rng, config.step_density);
    source.random_observables(rng, config);

    let mut shape = [Shape::Random, Shape::Derived, Shape::Surjective][rng.gen_range(0..3)];
    if shape == Shape::Derived && n_src > config.max_tgt {
        shape = Shape::Random;
    }
    let (target, mapping) = match shape {
        Shape::Derived => {
            let mut t = Draft::new("t", n_src);
            t.barbs = source.barbs.clone();
            t.success = source.success.clone();
            for &(a, b) in &source.steps {
                if t.states.len() < config.max_tgt && rng.gen_bool(0.3) {
                    let m = t.add_state("t");
                    if rng.gen_bool(0.5) {
                        t.barbs[m] = t.barbs[a].clone();
                        t.success[m] = t.success[a];
                    }
                    t.steps.push((a, m));
                    t.steps.push((m, b));
                } else {
                    t.steps.push((a, b));
                }
            }
            // occasional noise so the criteria do not hold by construction
            let n = t.states.len();
            for a in 0..n {
                for b in 0..n {
                    if rng.gen_bool(config.step_density * 0.1) {
                        t.steps.push((a, b));
                    }
                }
                if rng.gen_bool(config.barb_prob * 0.2) && !config.barbs.is_empty() {
                    let barb = config.barbs.choose(rng).expect("non-empty").clone();
                    if !t.barbs[a].contains(&barb) {
                        t.barbs[a].push(barb);
                    }
                }
            }
            (t, (0..n_src).collect::<Vec<_>>())
        }
        Shape::Random | Shape::Surjective => {
            let n_tgt = match shape {
                Shape::Surjective => rng.gen_range(1..=n_src.min(config.max_tgt)),
                _ => rng.gen_range(1..=config.max_tgt),
            };
            let mut t = Draft::new("t", n_tgt);
            t.random_steps(rng, config.step_density);
            t.random_observables(rng, config);
            let mapping: Vec<usize> = if shape == Shape::Surjective {
                let mut m: Vec<usize> = (0..n_src).map(|i| i % n_tgt).collect();
                m.shuffle(rng);
                m
            } else {
                (0..n_src).map(|_| rng.gen_range(0..n_tgt)).collect()
            };
            (t, mapping)
        }
    };

    let spec = InstanceSpec {
        source: source.spec(),
        target: target.spec(),
        encoding: mapping
            .iter()
            .enumerate()
            .map(|(s, &t)| (source.states[s].clone(), target.states[t].clone()))
            .collect::<BTreeMap<_, _>>(),
    };
    let instance = validate_instance(&spec).expect("generated instances are valid");

    let n_tgt = instance.target().len();
    let rt = random_relation(rng, Carrier::Target, n_tgt, config.rel_density).closed_under(config.closure.ops(rng));
    let rs = if rng.gen_bool(0.4) {
        pullback(instance.mapping(), &rt)
    } else {
        random_relation(rng, Carrier::Source, n_src, config.rel_density).closed_under(config.closure.ops(rng))
    };
    let mut bundle = Bundle::new(instance);
    bundle.relations.insert("RS".into(), rs);
    bundle.relations.insert("RT".into(), rt);
    Generated { index, shape, bundle }
}

/// Repairs `candidate` toward a relation that is closed under `ops`, lies
/// within the pairs `constraints` admit and is a simulation of `kind` over
/// `sys`. Each round closes, drops inadmissible pairs and shrinks to the
/// simulation interior. `None` after [`REPAIR_ROUNDS`] rounds.
pub fn repair(
    candidate: &Rel,
    ops: &[ClosureOp],
    kind: SimKind,
    sys: &ReductionSystem,
    constraints: &[Constraint],
) -> Option<Rel> {
    let carrier = candidate.carrier();
    let preds = expand_constraints(sys, constraints);
    let mut r = candidate.clone();
    for _ in 0..REPAIR_ROUNDS {
        r = r.closed_under(ops);
        let closed = r.clone();
        for (p, q) in closed.pairs() {
            if !pair_admitted(sys, &preds, p, q) {
                r.remove(p, q);
            }
        }
        r = simulation_interior(kind, sys, &r).with_carrier(carrier);
        if r.closed_under(ops) == r && is_simulation(kind, sys, &r).holds() {
            return Some(r);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed_and_index() {
        let c = GenConfig::with_seed(1);
        assert_eq!(generate(&c, 0), generate(&c, 0));
        assert_ne!(generate(&c, 0).bundle, generate(&GenConfig::with_seed(2), 0).bundle);
        assert_ne!(generate(&c, 0).bundle, generate(&c, 1).bundle);
    }

    #[test]
    fn respects_bounds() {
        let c = GenConfig::with_seed(3);
        for i in 0..200 {
            let g = generate(&c, i);
            assert!(g.bundle.instance.source().len() <= c.max_src);
            assert!(g.bundle.instance.target().len() <= c.max_tgt);
        }
    }

    #[test]
    fn zero_densities_give_step_free_instances() {
        let c = GenConfig {
            step_density: 0.0,
            barb_prob: 0.0,
            success_prob: 0.0,
            rel_density: 0.0,
            ..GenConfig::with_seed(5)
        };
        for i in 0..50 {
            let g = generate(&c, i);
            assert_eq!(g.bundle.instance.combined().system().step_count(), 0);
        }
    }

    #[test]
    fn repair_yields_preorder_simulations() {
        let c = GenConfig::with_seed(9);
        let pre = [ClosureOp::Refl, ClosureOp::Trans];
        for i in 0..100 {
            let g = generate(&c, i);
            let tgt = g.bundle.instance.target();
            let full = Rel::full(Carrier::Target, tgt.len());
            let r = repair(&full, &pre, SimKind::WeakBisim, tgt, &[]).expect("full relation repairs");
            assert!(r.is_preorder());
            assert!(is_simulation(SimKind::WeakBisim, tgt, &r).holds());
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(GenConfig { max_src: 0, ..Default::default() }.validate().is_err());
        assert!(GenConfig { step_density: 1.5, ..Default::default() }.validate().is_err());
        assert!(GenConfig::default().validate().is_ok());
    }
}
