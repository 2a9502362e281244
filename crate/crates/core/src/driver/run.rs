use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::config::{Mode, PipelineConfig};
use super::report::{BoundednessRecord, Record, RoundRecord, RunReport, WitnessDigest};
use super::schedule::{Schedule, Triple};
use crate::cocycle::{delta, dist, is_incremental, is_inner, stabilization_entries, ApproxRound, CocycleApproximant, StepFunction};
use crate::error::{Error, Result};
use crate::evc::{
    check_evc, essential_value_certificate, ring, skew_ladder_all, validate_witness, witness_from,
    EvcBudget, EvcWitness, LabelledCocycle, Verdict,
};
use crate::group::{conjugate_closure, Group, DEFAULT_CLASS_BUDGET};
use crate::ledger::{Check, Rel};
use crate::lemma::{construct_step, increment_changes, increments, StepInput, StepOutput};
use crate::odometer::{CylinderSet, GammaAction, Generator, ProductMeasure};
use crate::rational::{fmt_q, one, q, q_int, zero, Q};

/// Everything the recursion needs, resolved from a config.
pub struct Setup<G: Group> {
    pub mu: ProductMeasure,
    pub action: GammaAction,
    /// The scheduled increments `H`.
    pub h: Vec<G::Elem>,
    /// `H^•`, sorted, without the identity.
    pub closure: Vec<G::Elem>,
    pub norm_sup: Option<Q>,
    pub sets: Vec<CylinderSet>,
    pub schedule: Schedule,
}

impl<G: Group> Setup<G> {
    pub fn new(group: &G, config: &PipelineConfig) -> Result<Self> {
        let mu = config.measure.build()?;
        let action = config.action.build()?;
        let h = config
            .group
            .generators
            .iter()
            .map(|s| group.parse(s))
            .collect::<Result<Vec<_>>>()?;
        if h.iter().any(|x| group.is_identity(x)) {
            return Err(Error::Config("H must not contain the identity".into()));
        }
        let mut with_inverses = h.clone();
        with_inverses.extend(h.iter().map(|x| group.inv(x)));
        let cl = conjugate_closure(group, &with_inverses, DEFAULT_CLASS_BUDGET)?;
        let closure: Vec<G::Elem> = cl.elements.into_iter().filter(|x| !group.is_identity(x)).collect();
        let sets = scheduled_sets(config.run.ring_depth);
        let schedule = Schedule::new(sets.len(), h.len(), config.run.neighborhoods.max(1));
        Ok(Setup {
            mu,
            action,
            h,
            closure,
            norm_sup: cl.norm_sup,
            sets,
            schedule,
        })
    }
}

/// `X` first, then the other non-empty unions of depth-`d` cylinders.
pub fn scheduled_sets(d: u32) -> Vec<CylinderSet> {
    let mut out = vec![CylinderSet::full(0)];
    out.extend(ring(d).into_iter().filter(|s| s.count() < 1 << s.depth));
    out
}

fn set_label(s: &CylinderSet) -> String {
    if s.count() == 1 << s.depth {
        return "X".into();
    }
    s.words().iter().map(|w| w.to_string()).collect::<Vec<_>>().join("+")
}

/// State after the last completed round; enough to continue the recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Round that failed or would run next.
    pub next_round: usize,
    pub level: u32,
    #[serde(with = "crate::rational::serde_q")]
    pub eps: Q,
    /// Smallest reserve of the stored witnesses, if any.
    #[serde(default, with = "opt_q")]
    pub reserve: Option<Q>,
    /// `(word, value)` table of the current function.
    pub f: Vec<(String, String)>,
    pub depth: u32,
    /// Value sets `F_j` per introduced generator, infinite mode only.
    pub value_sets: Vec<Vec<String>>,
    /// Records of the completed rounds, re-emitted by the resumed run.
    #[serde(default)]
    pub rounds: Vec<RoundRecord>,
}

mod opt_q {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{fmt_q, parse_q, Q};

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&fmt_q(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|t| parse_q(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Result of a pipeline: the approximating sequence, its report, and a
/// checkpoint when a round aborted.
pub struct RunOutcome<E> {
    pub approximant: CocycleApproximant<E>,
    pub report: RunReport,
    pub checkpoint: Option<Checkpoint>,
    pub error: Option<Error>,
}

impl<E> RunOutcome<E> {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }
}

struct Stored<E> {
    round: usize,
    z: CylinderSet,
    g: E,
    k: usize,
    delta: Q,
    witness: EvcWitness,
}

fn digest<G: Group>(group: &G, f: &StepFunction<G::Elem>) -> String {
    let mut h = DefaultHasher::new();
    f.depth.hash(&mut h);
    for v in f.values() {
        group.format(v).hash(&mut h);
    }
    for x in 0..1u64 << f.depth {
        f.index_at(x).hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

fn value_labels<G: Group>(group: &G, vals: impl IntoIterator<Item = G::Elem>) -> Vec<String> {
    let set: BTreeSet<G::Elem> = vals.into_iter().collect();
    set.iter().map(|v| group.format(v)).collect()
}

/// `K = F F⁻¹`.
fn difference_set<G: Group>(group: &G, f: &[G::Elem]) -> BTreeSet<G::Elem> {
    let mut k = BTreeSet::new();
    for a in f {
        for b in f {
            k.insert(group.mul(a, &group.inv(b)));
        }
    }
    k
}

struct Recursion<'a, G: Group> {
    group: &'a G,
    config: &'a PipelineConfig,
    setup: &'a Setup<G>,
    infinite: bool,
    approx: CocycleApproximant<G::Elem>,
    level: u32,
    stored: Vec<Stored<G::Elem>>,
    reserve: Option<Q>,
    /// `F_j` for every introduced generator `σ_j`.
    value_sets: Vec<Vec<G::Elem>>,
    /// Rounds completed before a resume; their witnesses are not kept.
    prior: Vec<RoundRecord>,
    report: RunReport,
}

impl<'a, G: Group> Recursion<'a, G> {
    fn gens(&self, round: usize) -> &'a [Generator] {
        if self.infinite {
            self.setup.action.first(round)
        } else {
            &self.setup.action.generators
        }
    }

    fn introduce(&mut self, round: usize) {
        while self.infinite && self.value_sets.len() < round.min(self.setup.action.len()) {
            self.value_sets.push(self.approx.last().f.values().to_vec());
        }
    }

    /// `K_j` for generator `j`, empty in finite mode.
    fn k_set(&self, j: usize) -> BTreeSet<G::Elem> {
        self.value_sets
            .get(j)
            .map(|f| difference_set(self.group, f))
            .unwrap_or_default()
    }

    fn h_set(&self) -> Vec<G::Elem> {
        let mut all: BTreeSet<G::Elem> = self.setup.closure.iter().cloned().collect();
        for j in 0..self.value_sets.len() {
            all.extend(self.k_set(j));
        }
        all.into_iter().filter(|x| !self.group.is_identity(x)).collect()
    }

    fn allowed(&self, j: usize) -> BTreeSet<G::Elem> {
        let mut a: BTreeSet<G::Elem> = self.setup.closure.iter().cloned().collect();
        a.insert(self.group.identity());
        a.extend(self.k_set(j));
        a
    }

    fn round(&mut self, round: usize, triple: Triple) -> Result<()> {
        let group = self.group;
        let setup = self.setup;
        let mu = &setup.mu;
        self.introduce(round);
        let gens = self.gens(round);
        let h_set = self.h_set();
        let z = &setup.sets[triple.a];
        let g = &setup.h[triple.g];
        let k = triple.u + 1;
        let prev = self.approx.last().clone();
        let mut eps = &prev.eps * q(63, 128);
        if let Some(r) = &self.reserve {
            eps = eps.min(r / q(2, 1));
        }
        let input = StepInput {
            group,
            mu,
            gens,
            f: &prev.f,
            n: self.level,
            h_set: &h_set,
            z,
            g,
            k,
            eps,
            max_depth: self.config.run.max_depth,
        };
        let out = construct_step(&input)?;
        let witness = witness_from(mu, z, out.z00.clone(), out.theta.clone(), &out.delta)?;
        let mut checks = out.checks.clone();
        checks.extend(self.round_conditions(&input, &out, &prev, &witness)?);
        let all_gens = &setup.action.generators;
        let old = increments(group, mu, &prev.f, all_gens, out.depth)?;
        let new = increments(group, mu, &out.f_tilde, all_gens, out.depth)?;
        let (changes, _) = increment_changes(mu, &old, &new)?;

        self.report.push(Record::Round(RoundRecord {
            round,
            triple,
            a: set_label(z),
            g: group.format(g),
            k,
            level: self.level,
            generators: gens.len(),
            eps: out.eps.clone(),
            eps_prime: out.eps_prime.clone(),
            m: out.m,
            depth: out.depth,
            h: group.format(&out.h),
            lambda: out.lambda,
            delta: out.delta.clone(),
            values: value_labels(group, out.f_tilde.values().iter().cloned()),
            changes: changes.clone(),
            digest: digest(group, &out.f_tilde),
            witness: WitnessDigest {
                depth: witness.depth,
                b_measure: out.z00.measure(mu)?,
                measure_slack: witness.measure_slack.clone(),
                derivative_slack: witness.derivative_slack.clone(),
                reserve: witness.reserve.clone(),
            },
            checks,
        }));
        self.reserve = Some(match self.reserve.take() {
            Some(r) => r.min(witness.reserve.clone()),
            None => witness.reserve.clone(),
        });
        self.stored.push(Stored {
            round,
            z: z.clone(),
            g: g.clone(),
            k,
            delta: out.delta.clone(),
            witness,
        });
        self.level = out.m;
        self.approx.push(
            ApproxRound {
                f: out.f_tilde,
                eps: out.eps,
                k: out.m,
            },
            changes,
        );
        Ok(())
    }

    /// The per-round conditions for the new function, re-derived here from
    /// the function alone.
    fn round_conditions(
        &self,
        input: &StepInput<'_, G>,
        out: &StepOutput<G::Elem>,
        prev: &ApproxRound<G::Elem>,
        witness: &EvcWitness,
    ) -> Result<Vec<Check>> {
        let (group, mu, gens) = (self.group, input.mu, input.gens);
        let f = &out.f_tilde;
        let w = out.depth;
        let eps = &out.eps;
        let mut c = Vec::new();
        c.push(Check::new(
            "finite-valued",
            q_int(f.values().len() as i64),
            Rel::Le,
            q_int(1 << w.min(40)),
        ));
        c.push(Check::flag("round-inner", is_inner(group, mu, f, gens, out.m, w)?.pass));
        let h_set = self.h_set();
        let hv = group.inv(&out.h);
        let inc = is_incremental(
            group,
            mu,
            f,
            gens,
            |v| h_set.contains(v) || *v == out.h || *v == hv,
            w,
            &one(),
        )?;
        c.push(Check::flag("round-incremental", inc.pass));
        if self.infinite {
            for (j, gen) in gens.iter().enumerate() {
                let allowed = self.allowed(j);
                let inc = delta(group, f, &gen.map, w, mu, &one())?;
                let ok = inc.values.iter().all(|v| allowed.contains(v));
                c.push(Check::flag(format!("generator-increments-{}", j + 1), ok));
            }
        }
        let old = increments(group, mu, &prev.f, gens, w)?;
        let new = increments(group, mu, f, gens, w)?;
        let (_, agree) = increment_changes(mu, &old, &new)?;
        c.push(Check::new("round-agreement", agree.measure(mu)?, Rel::Gt, one() - eps));
        let d = dist(group, mu, &old, &new, gens.len() as u32)?;
        c.push(Check::new("round-distance", d.value, Rel::Lt, eps.clone()));
        let (g, k) = (input.g, input.k);
        let alpha = LabelledCocycle {
            labels: f,
            in_target: |y: &G::Elem, x: &G::Elem| group.in_translate(k, g, &group.mul(y, &group.inv(x))),
        };
        let evc = validate_witness(mu, &alpha, input.z, &out.delta, witness);
        c.push(Check::flag("round-evc", evc.is_ok()));
        c.push(Check::new("delta", out.delta.clone(), Rel::Eq, q(1, 3 * out.lambda as i64)));
        c.push(Check::new("eps-halving", eps * q(2, 1), Rel::Lt, prev.eps.clone()));
        if let Some(r) = &self.reserve {
            c.push(Check::new("eps-reserve", eps * q(2, 1), Rel::Le, r.clone()));
        }
        c.push(Check::new("k-increasing", q_int(out.m as i64), Rel::Gt, q_int(prev.k as i64)));
        Ok(c)
    }

    fn checkpoint(&self, next_round: usize) -> Result<Checkpoint> {
        let last = self.approx.last();
        let mut buf = Vec::new();
        last.f.write_csv(self.group, &mut buf)?;
        let mut rd = csv::Reader::from_reader(&buf[..]);
        let f = rd
            .records()
            .map(|r| r.map(|r| (r[0].to_string(), r[1].to_string())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Checkpoint {
            next_round,
            level: self.level,
            eps: last.eps.clone(),
            reserve: self.reserve.clone(),
            f,
            depth: last.f.depth,
            value_sets: self
                .value_sets
                .iter()
                .map(|s| s.iter().map(|v| self.group.format(v)).collect())
                .collect(),
            rounds: self.report.rounds().cloned().collect(),
        })
    }

    fn finish(&mut self) -> Result<()> {
        let group = self.group;
        let mu = &self.setup.mu;
        let last = self.approx.last().clone();
        let fnl = &last.f;

        // stabilization ledger and ε bookkeeping, across a resume if any
        let mut eps: Vec<Q> = Vec::new();
        let mut changes: Vec<Vec<Q>> = Vec::new();
        if !self.prior.is_empty() {
            eps.push(self.config.eps()?);
            eps.extend(self.prior.iter().map(|r| r.eps.clone()));
            changes.extend(self.prior.iter().map(|r| r.changes.clone()));
        }
        let skip = if self.prior.is_empty() { 0 } else { 1 };
        eps.extend(self.approx.rounds.iter().skip(skip).map(|r| r.eps.clone()));
        changes.extend(self.approx.changes.iter().cloned());
        let mut checks = Vec::new();
        for (n, w) in eps.windows(2).enumerate() {
            checks.push(Check::new(format!("eps-halving-{}", n + 1), &w[1] * q(2, 1), Rel::Lt, w[0].clone()));
        }
        let total: Q = eps.iter().cloned().sum();
        checks.push(Check::new("eps-sum", total, Rel::Lt, &eps[0] * q(2, 1)));
        let entries = stabilization_entries(&eps, &changes);
        for e in &entries {
            // in infinite mode σ_j is only controlled from round j on
            if !self.infinite || e.generator < e.round {
                checks.push(Check::new(
                    format!("stabilization-{}-{}", e.round, e.generator + 1),
                    e.changed_after.clone(),
                    Rel::Le,
                    e.bound.clone(),
                ));
            }
        }
        self.report.push(Record::Stabilization { entries, eps, checks });

        // boundedness on every defined piece
        let gens = &self.setup.action.generators;
        let controlled = if self.infinite { self.value_sets.len() } else { gens.len() };
        for (j, gen) in gens.iter().enumerate().take(controlled) {
            let allowed = self.allowed(j);
            let inc = delta(group, fnl, &gen.map, fnl.depth, mu, &one())?;
            // only values actually taken on a defined piece
            let observed: BTreeSet<G::Elem> = (0..1u64 << fnl.depth).filter_map(|x| inc.at(x).cloned()).collect();
            let mut bc = vec![Check::flag(
                format!("bounded-{}", gen.name),
                observed.iter().all(|v| allowed.contains(v)),
            )];
            // c(σ) is the largest norm actually taken, checked against sup ‖H^•‖
            let observed_norms: Option<Vec<Q>> = observed.iter().map(|v| group.norm(v)).collect();
            let norm_bound = match (observed_norms, &self.setup.norm_sup) {
                (Some(o), Some(sup)) => {
                    let c = o.into_iter().max().unwrap_or_else(zero);
                    if !self.infinite {
                        bc.push(Check::new(format!("norm-bound-{}", gen.name), c.clone(), Rel::Le, sup.clone()));
                    }
                    Some(fmt_q(&c))
                }
                _ => None,
            };
            self.report.push(Record::Boundedness(BoundednessRecord {
                generator: gen.name.clone(),
                allowed: value_labels(group, allowed),
                observed: value_labels(group, observed),
                undefined_measure: inc.remainder().measure(mu)?,
                norm_bound,
                checks: bc,
            }));
        }

        // rounds from before a resume are searched afresh
        for r in &self.prior {
            let (z, g, k) = (&self.setup.sets[r.triple.a], &self.setup.h[r.triple.g], r.k);
            let alpha = LabelledCocycle {
                labels: fnl,
                in_target: |y: &G::Elem, x: &G::Elem| group.in_translate(k, g, &group.mul(y, &group.inv(x))),
            };
            let (source, ok) = match check_evc(mu, &alpha, z, &r.delta, fnl.depth) {
                Ok(w) => ("fresh", validate_witness(mu, &alpha, z, &r.delta, &w).is_ok()),
                Err(Error::SearchExhausted(_)) => ("failed", false),
                Err(e) => return Err(e),
            };
            self.report.push(Record::FinalEvc {
                round: r.round,
                source: source.into(),
                checks: vec![Check::flag(format!("final-evc-{}", r.round), ok)],
            });
        }

        // stored witnesses against the terminal function
        for s in &self.stored {
            let (g, k) = (&s.g, s.k);
            let alpha = LabelledCocycle {
                labels: fnl,
                in_target: |y: &G::Elem, x: &G::Elem| group.in_translate(k, g, &group.mul(y, &group.inv(x))),
            };
            let d = s.witness.depth.max(fnl.depth);
            let theta = s.witness.theta.refine(d);
            let b = s.witness.b.refine(d);
            let kept = CylinderSet::from_fn(d, |x| {
                b.contains(x) && group.in_translate(k, g, &group.mul(fnl.at(theta.apply(x)), &group.inv(fnl.at(x))))
            });
            let source = if kept == b { "stored" } else { "pruned" };
            let pruned = witness_from(mu, &s.z, kept, theta, &s.delta)?;
            let (source, ok) = if validate_witness(mu, &alpha, &s.z, &s.delta, &pruned).is_ok() {
                (source, true)
            } else {
                match check_evc(mu, &alpha, &s.z, &s.delta, d) {
                    Ok(w) => ("fresh", validate_witness(mu, &alpha, &s.z, &s.delta, &w).is_ok()),
                    Err(Error::SearchExhausted(_)) => ("failed", false),
                    Err(e) => return Err(e),
                }
            };
            self.report.push(Record::FinalEvc {
                round: s.round,
                source: source.into(),
                checks: vec![Check::flag(format!("final-evc-{}", s.round), ok)],
            });
        }

        // essential values of the terminal cocycle
        let budget = EvcBudget {
            ring_depth: self.config.run.report_ring_depth,
            neighborhoods: self.config.run.neighborhoods.max(1),
            search_depth: fnl.depth.max(self.config.run.report_ring_depth),
        };
        for g in &self.setup.h {
            let r = essential_value_certificate(group, mu, fnl, g, budget)?;
            let verdict = match &r.verdict {
                Verdict::Certified => "certified".to_string(),
                Verdict::Inconclusive { a, k } => format!("inconclusive at A={a} U={k}"),
            };
            self.report.push(Record::EssentialValue {
                g: r.g.clone(),
                verdict,
                lines: r.lines(),
            });
        }

        // skew-product ladder against the constant control
        if group.order().is_some() {
            let res = self.config.run.resolution;
            let depth = fnl.depth.max(res);
            let ladder = skew_ladder_all(group, fnl, res, depth)?;
            let trivial = StepFunction::constant(0, group.identity());
            let control = skew_ladder_all(group, &trivial, res, depth)?;
            let order = group.order().unwrap_or(0);
            let checks = vec![
                Check::flag("ladder-monotone", ladder.windows(2).all(|w| w[1].components <= w[0].components)),
                Check::flag("control-order", control.iter().all(|r| r.components == order)),
            ];
            self.report.push(Record::Connectivity { ladder, control, checks });
        }
        Ok(())
    }
}

fn header<G: Group>(group: &G, config: &PipelineConfig, setup: &Setup<G>, rounds: usize) -> Result<Record> {
    Ok(Record::Header {
        name: config.name.clone(),
        group: group.name(),
        action: setup.action.presentation(),
        measure: serde_json::to_string(&config.measure)?,
        mode: match config.run.mode {
            Mode::Finite => "finite".into(),
            Mode::Infinite => "infinite".into(),
        },
        rounds,
        eps: config.eps()?,
        max_depth: config.run.max_depth,
        schedule: setup.schedule.prefix(rounds),
    })
}

fn recursion<G: Group>(group: &G, config: &PipelineConfig, resume: Option<Checkpoint>) -> Result<RunOutcome<G::Elem>> {
    let setup = Setup::new(group, config)?;
    let rounds = config.run.rounds;
    let mut report = RunReport::default();
    report.push(header(group, config, &setup, rounds)?);
    let infinite = config.run.mode == Mode::Infinite;
    let (start, f, eps, level, reserve, value_sets, prior) = match resume {
        None => (1, StepFunction::constant(0, group.identity()), config.eps()?, 1, None, vec![], vec![]),
        Some(c) => {
            let mut csv_text = String::from("word,element\n");
            for (w, v) in &c.f {
                csv_text.push_str(&format!("{w},\"{v}\"\n"));
            }
            let f = StepFunction::read_csv(group, csv_text.as_bytes())?;
            let vs = c
                .value_sets
                .iter()
                .map(|s| s.iter().map(|v| group.parse(v)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            (c.next_round, f, c.eps, c.level, c.reserve, vs, c.rounds)
        }
    };
    let mut rec = Recursion {
        group,
        config,
        setup: &setup,
        infinite,
        approx: CocycleApproximant::new(f, eps, level),
        level,
        stored: Vec::new(),
        reserve,
        value_sets,
        prior: prior.clone(),
        report,
    };
    for r in prior {
        rec.report.push(Record::Round(r));
    }
    let schedule = setup.schedule.prefix(rounds);
    let mut error = None;
    let mut checkpoint = None;
    for (i, t) in schedule.iter().enumerate().skip(start - 1) {
        if let Err(e) = rec.round(i + 1, *t) {
            checkpoint = Some(rec.checkpoint(i + 1)?);
            error = Some(e);
            break;
        }
    }
    if error.is_none() {
        rec.finish()?;
    }
    let done = rec.approx.rounds.len() - 1;
    rec.report.push(Record::Summary {
        rounds_completed: done,
        terminal_depth: rec.approx.last().f.depth,
        status: if error.is_none() { "complete".into() } else { "aborted".into() },
        error: error.as_ref().map(|e| format!("{}: {e}", e.kind())),
    });
    Ok(RunOutcome {
        approximant: rec.approx,
        report: rec.report,
        checkpoint,
        error,
    })
}

/// The recursion for a finitely generated action: `rounds` steps over the
/// schedule, starting from `f_1 ≡ 1`.
pub fn run_theorem_02i<G: Group>(group: &G, config: &PipelineConfig) -> Result<RunOutcome<G::Elem>> {
    if config.run.mode != Mode::Finite {
        return Err(Error::Config("run needs run.mode = \"finite\"".into()));
    }
    recursion(group, config, None)
}

/// The recursion over a generator stream: round `n` sees the first `n`
/// generators and tracks `K_j = F_j F_j⁻¹`.
pub fn run_theorem_02ii<G: Group>(group: &G, config: &PipelineConfig) -> Result<RunOutcome<G::Elem>> {
    if config.run.mode != Mode::Infinite {
        return Err(Error::Config("run-infinite needs run.mode = \"infinite\"".into()));
    }
    recursion(group, config, None)
}

/// Continues an aborted run from its checkpoint.
pub fn resume<G: Group>(group: &G, config: &PipelineConfig, checkpoint: Checkpoint) -> Result<RunOutcome<G::Elem>> {
    recursion(group, config, Some(checkpoint))
}

/// Finite-mode run whose report certifies `α_σ ∈ {1} ∪ H^•` for every `σ`.
pub fn bounded_cocycle_pipeline<G: Group>(group: &G, config: &PipelineConfig) -> Result<RunOutcome<G::Elem>> {
    run_theorem_02i(group, config)
}

/// Finite-mode run over a normed group; the boundedness records carry
/// `c(σ)` with `‖α_σ‖ ≤ c(σ)`.
pub fn norm_bounded_pipeline<G: Group>(group: &G, config: &PipelineConfig) -> Result<RunOutcome<G::Elem>> {
    let setup = Setup::new(group, config)?;
    if setup.norm_sup.is_none() {
        return Err(Error::Config(format!("{} carries no norm", group.name())));
    }
    run_theorem_02i(group, config)
}

/// One step from `f ≡ 1` at level 1 with the first scheduled triple.
pub fn single_step<G: Group>(group: &G, config: &PipelineConfig) -> Result<(StepOutput<G::Elem>, RunReport)> {
    let setup = Setup::new(group, config)?;
    let f = StepFunction::constant(0, group.identity());
    let h_set = setup.closure.clone();
    let input = StepInput {
        group,
        mu: &setup.mu,
        gens: &setup.action.generators,
        f: &f,
        n: 1,
        h_set: &h_set,
        z: &setup.sets[0],
        g: &setup.h[0],
        k: 1,
        eps: config.eps()?,
        max_depth: config.run.max_depth,
    };
    let out = construct_step(&input)?;
    let mut report = RunReport::default();
    report.push(header(group, config, &setup, 1)?);
    let witness = witness_from(&setup.mu, input.z, out.z00.clone(), out.theta.clone(), &out.delta)?;
    report.push(Record::Round(RoundRecord {
        round: 1,
        triple: Triple { a: 0, g: 0, u: 0 },
        a: set_label(input.z),
        g: group.format(input.g),
        k: 1,
        level: 1,
        generators: input.gens.len(),
        eps: out.eps.clone(),
        eps_prime: out.eps_prime.clone(),
        m: out.m,
        depth: out.depth,
        h: group.format(&out.h),
        lambda: out.lambda,
        delta: out.delta.clone(),
        values: value_labels(group, out.f_tilde.values().iter().cloned()),
        changes: out.changes.clone(),
        digest: digest(group, &out.f_tilde),
        witness: WitnessDigest {
            depth: witness.depth,
            b_measure: out.z00.measure(&setup.mu)?,
            measure_slack: witness.measure_slack,
            derivative_slack: witness.derivative_slack,
            reserve: witness.reserve,
        },
        checks: out.checks.clone(),
    }));
    Ok((out, report))
}


/// Which front-end to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Run,
    RunInfinite,
    Bounded,
    NormBounded,
}

/// Group-independent part of a [`RunOutcome`].
pub struct Finished {
    pub report: RunReport,
    pub checkpoint: Option<Checkpoint>,
    pub error: Option<Error>,
    /// Terminal function as `(word, element)` rows.
    pub terminal: Vec<(String, String)>,
}

fn erase<G: Group>(group: &G, out: RunOutcome<G::Elem>) -> Finished {
    let f = &out.approximant.last().f;
    let terminal = (0..1u64 << f.depth)
        .map(|x| (crate::odometer::Word::new(x, f.depth).to_string(), group.format(f.at(x))))
        .collect();
    Finished {
        report: out.report,
        checkpoint: out.checkpoint,
        error: out.error,
        terminal,
    }
}

/// Builds the configured group and runs the chosen front-end on it.
pub fn execute(config: &PipelineConfig, pipeline: Pipeline) -> Result<Finished> {
    let group = config.group.build()?;
    crate::with_group!(&group, g => {
        let out = match pipeline {
            Pipeline::Run => run_theorem_02i(g, config)?,
            Pipeline::RunInfinite => run_theorem_02ii(g, config)?,
            Pipeline::Bounded => bounded_cocycle_pipeline(g, config)?,
            Pipeline::NormBounded => norm_bounded_pipeline(g, config)?,
        };
        Ok(erase(g, out))
    })
}

/// Continues from a checkpoint with the configured group.
pub fn execute_resume(config: &PipelineConfig, checkpoint: Checkpoint) -> Result<Finished> {
    let group = config.group.build()?;
    crate::with_group!(&group, g => Ok(erase(g, resume(g, config, checkpoint)?)))
}
