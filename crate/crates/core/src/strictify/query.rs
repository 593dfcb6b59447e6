//! Checked evaluation of strict identity-type operations and their
//! stability probes.

use super::{ElimParams, StrictIdStructure, StrictifyError, WeakIdentity};
use crate::syntax::{check_term, check_type, Item, Subst, Telescope, Term, Type, TypeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictOp {
    /// `Idˢ(A, x, index)`.
    Id { index: Term },
    /// `reflˢ(A, x)`.
    Refl,
    /// `Jˢ(A, x, P, d)` at the generic index and path, over `Γ.(y : A).(p : Idˢ(A, x, y))`.
    J { motive: Type, base: Term },
    /// `Jβˢ(A, x, P, d)`.
    JBeta { motive: Type, base: Term },
}

impl StrictOp {
    pub fn name(&self) -> &'static str {
        match self {
            StrictOp::Id { .. } => "id",
            StrictOp::Refl => "refl",
            StrictOp::J { .. } => "j",
            StrictOp::JBeta { .. } => "jbeta",
        }
    }
}

/// One strict operation applied over `context` to the point `point : ty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictQuery {
    pub context: Telescope,
    pub ty: Type,
    pub point: Term,
    pub op: StrictOp,
}

impl StrictQuery {
    /// The same query restricted along `sigma : lambda → context`.
    pub fn restrict(&self, lambda: &Telescope, sigma: &Subst) -> StrictQuery {
        let op = match &self.op {
            StrictOp::Id { index } => StrictOp::Id { index: index.subst(sigma) },
            StrictOp::Refl => StrictOp::Refl,
            StrictOp::J { motive, base } => {
                StrictOp::J { motive: motive.subst(&sigma.lift(2)), base: base.subst(sigma) }
            }
            StrictOp::JBeta { motive, base } => {
                StrictOp::JBeta { motive: motive.subst(&sigma.lift(2)), base: base.subst(sigma) }
            }
        };
        StrictQuery { context: lambda.clone(), ty: self.ty.subst(sigma), point: self.point.subst(sigma), op }
    }

    /// Entries the output's context adds to `context`.
    pub fn extension_len(&self) -> usize {
        if matches!(self.op, StrictOp::J { .. }) {
            2
        } else {
            0
        }
    }
}

/// A checked query result. `output` lives over `ambient`, which is the
/// query context extended by the motive arity for `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub ambient: Telescope,
    pub output: Item,
    /// The type the output was checked against, for terms.
    pub ty: Option<Type>,
}

/// Outcome of one stability probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOutcome {
    /// Strictify after restricting.
    pub restricted: QueryResult,
    /// Restriction of the original output.
    pub transported: Item,
}

impl ProbeOutcome {
    pub fn stable(&self) -> bool {
        self.restricted.output == self.transported
    }
}

fn ill(what: &'static str) -> impl Fn(TypeError) -> StrictifyError {
    move |source| StrictifyError::IllTyped { what, source }
}

impl<W: WeakIdentity> StrictIdStructure<W> {
    fn elim_params(&mut self, q: &StrictQuery, motive: &Type, base: &Term) -> Result<(Telescope, ElimParams), StrictifyError> {
        let arity = self.motive_arity(&q.context, &q.ty, &q.point)?;
        let ext = q.context.concat(&arity);
        check_type(self.signature(), &ext, motive).map_err(ill("motive"))?;
        let refl = self.strict_refl(&q.context, &q.ty, &q.point)?;
        let at_refl = Subst::identity(q.context.len()).extended(q.point.clone()).extended(refl);
        check_term(self.signature(), &q.context, base, &motive.subst(&at_refl)).map_err(ill("base"))?;
        Ok((ext, ElimParams { ty: q.ty.clone(), point: q.point.clone(), motive: motive.clone(), base: base.clone() }))
    }

    /// Evaluates `q` and checks the output against the type its operation
    /// prescribes.
    pub fn run(&mut self, q: &StrictQuery) -> Result<QueryResult, StrictifyError> {
        let n = q.context.len();
        check_type(self.signature(), &q.context, &q.ty).map_err(ill("type"))?;
        check_term(self.signature(), &q.context, &q.point, &q.ty).map_err(ill("point"))?;
        let result = match &q.op {
            StrictOp::Id { index } => {
                check_term(self.signature(), &q.context, index, &q.ty).map_err(ill("index"))?;
                let out = self.strict_id(&q.context, &q.ty, &q.point, index)?;
                check_type(self.signature(), &q.context, &out).map_err(ill("output"))?;
                QueryResult { ambient: q.context.clone(), output: Item::Type(out), ty: None }
            }
            StrictOp::Refl => {
                let out = self.strict_refl(&q.context, &q.ty, &q.point)?;
                let ty = self.strict_id(&q.context, &q.ty, &q.point, &q.point)?;
                QueryResult { ambient: q.context.clone(), output: Item::Term(out), ty: Some(ty) }
            }
            StrictOp::J { motive, base } => {
                let (ext, params) = self.elim_params(q, motive, base)?;
                let open = params.subst(&Subst::weakening(n, 2));
                let out = self.strict_j(&ext, &open, &Term::Var(1), &Term::Var(0))?;
                QueryResult { ambient: ext, output: Item::Term(out), ty: Some(motive.clone()) }
            }
            StrictOp::JBeta { motive, base } => {
                let (_, params) = self.elim_params(q, motive, base)?;
                let out = self.strict_jbeta(&q.context, &params)?;
                let refl = self.strict_refl(&q.context, &q.ty, &q.point)?;
                let at_refl = Subst::identity(n).extended(q.point.clone()).extended(refl.clone());
                let j = self.strict_j(&q.context, &params, &q.point, &refl)?;
                let ty = self.strict_id(&q.context, &motive.subst(&at_refl), &j, base)?;
                QueryResult { ambient: q.context.clone(), output: Item::Term(out), ty: Some(ty) }
            }
        };
        if let (Item::Term(t), Some(ty)) = (&result.output, &result.ty) {
            check_term(self.signature(), &result.ambient, t, ty).map_err(ill("output"))?;
        }
        Ok(result)
    }

    /// Compares strictifying `q` restricted along `sigma : lambda → Γ` with
    /// restricting the output of `q`.
    pub fn probe(&mut self, q: &StrictQuery, lambda: &Telescope, sigma: &Subst) -> Result<ProbeOutcome, StrictifyError> {
        let original = self.run(q)?;
        let restricted = self.run(&q.restrict(lambda, sigma))?;
        let transported = original.output.subst(&sigma.lift(q.extension_len()));
        Ok(ProbeOutcome { restricted, transported })
    }
}
