//! One step of the coboundary modification: from `(f, n, Σ, H, Z, g, U, ε)`
//! build `(m, h, f̃, Z_00, δ, θ)` and certify every promised inequality.

mod parts;
mod validate;

pub use parts::{
    assemble_f_tilde, build_tau, build_theta, choose_eps_prime, choose_m, classify_classes,
    find_z0_h, prefix_bijection, Classification, MChoice, TauBuild, ThetaBuild, Z0Choice,
};
pub use validate::{increment_changes, increments, validate_step};

use crate::cocycle::{is_incremental, is_inner, StepFunction};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::ledger::{first_failure, Check, Rel};
use crate::odometer::{CylinderSet, FiniteDepthMap, Generator, ProductMeasure, Word};
use crate::rational::{fmt_q, one, q, zero, Q};

/// Everything one step consumes.
pub struct StepInput<'a, G: Group> {
    pub group: &'a G,
    pub mu: &'a ProductMeasure,
    pub gens: &'a [Generator],
    pub f: &'a StepFunction<G::Elem>,
    pub n: u32,
    /// The increment set `H`, without the identity.
    pub h_set: &'a [G::Elem],
    pub z: &'a CylinderSet,
    pub g: &'a G::Elem,
    /// Index of the neighborhood `U = U_k`.
    pub k: usize,
    pub eps: Q,
    pub max_depth: u32,
}

impl<G: Group> StepInput<'_, G> {
    pub fn in_h(&self, v: &G::Elem) -> bool {
        self.h_set.contains(v)
    }
}

/// Result of one step with its intermediate artifacts and checks.
#[derive(Clone, Debug)]
pub struct StepOutput<E> {
    pub m: u32,
    /// Working depth of `f̃` and `θ`.
    pub depth: u32,
    pub h: E,
    pub f_tilde: StepFunction<E>,
    pub z00: CylinderSet,
    pub delta: Q,
    pub theta: FiniteDepthMap,
    /// The `ε` actually used after any reduction.
    pub eps: Q,
    pub eps_prime: Q,
    pub lambda: usize,
    pub z0: CylinderSet,
    pub classes: Vec<CylinderSet>,
    pub b_m: CylinderSet,
    pub a: CylinderSet,
    pub c: CylinderSet,
    pub a_prime: CylinderSet,
    pub tau: FiniteDepthMap,
    pub iota_pairs: Vec<(Word, Word)>,
    /// `μ{Δ_σ f̃ ≠ Δ_σ f}` per generator, undefined points included.
    pub changes: Vec<Q>,
    /// Construction ledger followed by the independent validation.
    pub checks: Vec<Check>,
}

/// Checks the step preconditions: `μ(Z) > 0`, `f` inner on `S_n` and
/// `(Σ, H)`-incremental.
pub fn admit<G: Group>(input: &StepInput<'_, G>) -> Result<()> {
    if input.z.measure(input.mu)? == zero() {
        return Err(Error::invalid("Z must have positive measure"));
    }
    if input.eps <= zero() {
        return Err(Error::invalid("eps must be positive"));
    }
    let d = input.f.depth.max(input.n + 1);
    let inner = is_inner(input.group, input.mu, input.f, input.gens, input.n, d)?;
    if !inner.pass {
        return Err(Error::invalid(format!(
            "f is not inner on S_{}: violated on mass {}",
            input.n,
            fmt_q(&inner.violation_measure)
        )));
    }
    let inc = is_incremental(input.group, input.mu, input.f, input.gens, |v| input.in_h(v), d, &one())?;
    if !inc.pass {
        return Err(Error::invalid("f is not incremental for the given H"));
    }
    Ok(())
}

/// Runs the full step. When the core comes out too light, `ε` is halved down
/// to `μ(Z) / (64 Λ)`, where the mass bound is guaranteed.
pub fn construct_step<G: Group>(input: &StepInput<'_, G>) -> Result<StepOutput<G::Elem>> {
    admit(input)?;
    let choice = find_z0_h(input.group, input.mu, input.f, input.z, input.g, input.k)?;
    let floor = input.z.measure(input.mu)? / q(64 * choice.lambda as i64, 1);
    let mut eps = input.eps.clone();
    loop {
        match attempt(input, &choice, &eps) {
            Err(Error::EmptyCore { .. }) if eps > floor => {
                eps = (&eps / q(2, 1)).max(floor.clone());
            }
            other => return other,
        }
    }
}

fn attempt<G: Group>(
    input: &StepInput<'_, G>,
    choice: &Z0Choice<G::Elem>,
    eps: &Q,
) -> Result<StepOutput<G::Elem>> {
    let (mu, n) = (input.mu, input.n);
    let mut checks = Vec::new();
    let eps_prime = choose_eps_prime(mu, input.gens, eps);
    checks.push(Check::new("eps-prime", eps_prime.clone(), Rel::Lt, eps.clone()));
    let z0 = &choice.z0;
    let mu_z = input.z.measure(mu)?;
    let mu_z0 = z0.measure(mu)?;
    checks.push(Check::new(
        "z0-mass",
        mu_z0.clone(),
        Rel::Ge,
        &mu_z / q(choice.lambda as i64, 1),
    ));

    let fstar = input.f.extend(z0);
    let classes = classify_classes(&fstar, n, mu)?;
    let mc = choose_m(
        mu,
        input.gens,
        n,
        fstar.depth,
        &eps_prime,
        &classes,
        input.max_depth.saturating_sub(1),
    )?;
    let m = mc.m;
    checks.push(Check::new("hull-mass", mc.b_m_measure.clone(), Rel::Lt, eps_prime.clone()));
    let mu_n = mu.shifted(n);
    for (j, (y, d)) in classes.classes.iter().zip(&mc.cells).enumerate() {
        // cells agree with the classes on the nose, since m covers their depth
        let defect = y.refine(m - n).minus(d).union(&d.minus(y)).measure(&mu_n)?;
        checks.push(Check::new(
            format!("cell-defect-{}", j + 1),
            defect,
            Rel::Lt,
            eps * y.measure(&mu_n)?,
        ));
    }
    // the conditional measures on {0,1}^{m-n} are all equal, so one cell suffices
    checks.push(Check::new("conditional-spread", zero(), Rel::Lt, eps.clone()));

    let tb = build_tau(mu, n, m, eps, input.max_depth)?;
    let w = tb.depth;
    let sd = w - n;
    checks.push(Check::new("iota-fixed", tb.iota.fixed_measure.clone(), Rel::Lt, eps.clone()));
    checks.push(Check::new("iota-derivative", tb.iota.max_defect.clone(), Rel::Lt, eps.clone()));
    checks.push(Check::new(
        "tau-derivative",
        tb.tau.max_derivative_defect(&mu_n)?,
        Rel::Lt,
        eps * q(3, 1),
    ));
    checks.push(Check::flag("tau-involution", tb.tau.is_involution()));
    for (j, y) in classes.classes.iter().enumerate() {
        let y = y.refine(sd);
        let ty = CylinderSet::from_fn(sd, |a| y.contains(tb.tau.apply(a)));
        let sym = y.minus(&ty).union(&ty.minus(&y)).measure(&mu_n)?;
        checks.push(Check::new(
            format!("class-symmetric-difference-{}", j + 1),
            sym,
            Rel::Lt,
            eps * q(4, 1) * y.measure(&mu_n)?,
        ));
    }

    let b_prime = CylinderSet::from_fn(m + 1 - n, |a| mc.b_m.contains(a << n));
    let f_tilde = assemble_f_tilde(input.group, input.f, &choice.h, n, &tb.a, &b_prime, w);
    let th = build_theta(mu, &fstar, n, &classes, &tb, &b_prime, z0)?;
    checks.push(Check::new(
        "a-prime-mass",
        th.a_prime.measure(&mu_n)?,
        Rel::Gt,
        one() - eps * q(7, 1),
    ));
    let mu_z00 = th.z00.measure(mu)?;
    checks.push(Check::new(
        "core-ledger",
        mu_z00.clone(),
        Rel::Gt,
        &mu_z0 / q(2, 1) - eps * q(10, 1),
    ));
    let delta = q(1, 3 * choice.lambda as i64);
    if mu_z00 <= &delta * &mu_z {
        return Err(Error::EmptyCore {
            core: fmt_q(&mu_z00),
            bound: fmt_q(&(&delta * &mu_z)),
        });
    }

    let mut out = StepOutput {
        m,
        depth: w,
        h: choice.h.clone(),
        f_tilde,
        z00: th.z00,
        delta,
        theta: th.theta,
        eps: eps.clone(),
        eps_prime,
        lambda: choice.lambda,
        z0: z0.clone(),
        classes: classes.classes,
        b_m: mc.b_m,
        a: tb.a,
        c: tb.c,
        a_prime: th.a_prime,
        tau: tb.tau,
        iota_pairs: tb.iota.pairs,
        changes: Vec::new(),
        checks,
    };
    let (validation, changes) = validate_step(input, &out)?;
    out.changes = changes;
    out.checks.extend(validation);
    if let Some(bad) = first_failure(&out.checks) {
        return Err(Error::PostconditionFailure {
            clause: bad.clause.clone(),
            detail: bad.to_string(),
        });
    }
    Ok(out)
}
