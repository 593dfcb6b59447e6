use proptest::prelude::*;

use gatforge_core::generalize::{mgg, mgg_natural_check};
use gatforge_core::random::Generator;
use gatforge_core::signature::{parse_signature, validate_signature, Signature};
use gatforge_core::strictify::{StrictIdStructure, StrictOp, StrictQuery};
use gatforge_core::syntax::{
    check_subst, check_term, check_type, infer_term, read_term, strengthen, Item, Names, Printer, Scope, Subst,
    Telescope, Term,
};
use gatforge_core::unify::{mgu, MguResult};

fn setup(seed: u64) -> (Generator, Signature) {
    let mut g = Generator::new(seed);
    let sig = g.signature();
    (g, sig)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn substitution_is_functorial(seed in any::<u64>(), len in 0usize..4) {
        let (mut g, sig) = setup(seed);
        let gamma = g.telescope(&sig, &Telescope::empty(), len);
        let Some((ty, t)) = g.typed_term(&sig, &gamma) else { return Ok(()) };
        let Some((lambda, sigma)) = g.probe(&sig, &gamma, 3) else { return Ok(()) };
        let Some((theta, tau)) = g.probe(&sig, &lambda, 3) else { return Ok(()) };
        prop_assert_eq!(t.subst(&Subst::identity(gamma.len())), t.clone());
        prop_assert_eq!(t.subst(&sigma).subst(&tau), t.subst(&sigma.compose(&tau)));
        prop_assert!(check_term(&sig, &lambda, &t.subst(&sigma), &ty.subst(&sigma)).is_ok());
        prop_assert!(check_subst(&sig, &theta, &sigma.compose(&tau), &gamma).is_ok());
    }

    #[test]
    fn strengthening_undoes_weakening(seed in any::<u64>(), by in 1usize..4) {
        let (mut g, sig) = setup(seed);
        let gamma = g.telescope(&sig, &Telescope::empty(), 2);
        let item = Item::Type(g.ty(&sig, &gamma, 3));
        prop_assert_eq!(strengthen(&item.shift(by), by), Ok(item));
        prop_assert!(strengthen(&Item::Term(Term::Var(by - 1)), by).is_err());
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>(), len in 0usize..4) {
        let (mut g, sig) = setup(seed);
        let gamma = g.telescope(&sig, &Telescope::empty(), len);
        let Some((_, t)) = g.typed_term(&sig, &gamma) else { return Ok(()) };
        let names = Names::canonical(gamma.len());
        let printed = Printer::new(&sig).term(&names, &t);
        let scope = Scope::from_names(names.as_slice().iter().cloned());
        prop_assert_eq!(read_term(&sig, &scope, &printed), Ok(t));
        let rendered: Vec<String> = sig.ids().map(|d| sig.render_declaration(d)).collect();
        let reparsed = parse_signature(&rendered.join("\n")).unwrap();
        prop_assert!(validate_signature(&reparsed).is_ok());
        prop_assert_eq!(reparsed.len(), sig.len());
    }

    #[test]
    fn unifiers_are_sound_and_shorten(seed in any::<u64>()) {
        let (mut g, sig) = setup(seed);
        let Some(p) = g.unify_problem(&sig) else { return Ok(()) };
        if let MguResult::Mgu { omega, rho } = mgu(&sig, &p) {
            let lift = rho.lift(p.rigid.len());
            prop_assert_eq!(p.lhs.subst(&lift), p.rhs.subst(&lift));
            prop_assert!(check_subst(&sig, &omega, &rho, &p.flexible).is_ok());
            prop_assert!(rho.is_identity() || omega.len() < p.flexible.len());
        }
    }

    #[test]
    fn generalizations_factor_and_are_natural(seed in any::<u64>()) {
        let (mut g, sig) = setup(seed);
        let Some(p) = g.gen_problem(&sig) else { return Ok(()) };
        let r = mgg(&sig, &p);
        prop_assert!(r.factors(&p));
        prop_assert!(check_subst(&sig, &p.gamma, &r.factor, &r.gamma0).is_ok());
        if let Some((lambda, sigma)) = g.probe(&sig, &p.gamma, 3) {
            prop_assert!(mgg_natural_check(&sig, &p, &lambda, &sigma));
        }
    }

    #[test]
    fn strict_identity_is_stable(seed in any::<u64>(), len in 0usize..3, refl in any::<bool>()) {
        let (mut g, sig) = setup(seed);
        let context = g.telescope(&sig, &Telescope::empty(), len);
        let Some((ty, point)) = g.typed_term(&sig, &context) else { return Ok(()) };
        let op = if refl {
            StrictOp::Refl
        } else {
            match g.term(&sig, &context, &ty, 2) {
                Some(index) => StrictOp::Id { index },
                None => return Ok(()),
            }
        };
        let q = StrictQuery { context, ty, point, op };
        let mut st = StrictIdStructure::free(&sig);
        let Some((lambda, sigma)) = g.probe(&sig, &q.context, 3) else { return Ok(()) };
        let o = st.probe(&q, &lambda, &sigma).unwrap();
        prop_assert!(o.stable());
        match (&o.restricted.output, &o.restricted.ty) {
            (Item::Type(t), None) => prop_assert!(check_type(st.signature(), &lambda, t).is_ok()),
            (Item::Term(t), Some(a)) => {
                prop_assert!(check_term(st.signature(), &lambda, t, a).is_ok());
                let inferred = infer_term(st.signature(), &lambda, t);
                prop_assert_eq!(inferred.as_ref(), Ok(a));
            }
            other => prop_assert!(false, "unexpected output {:?}", other),
        }
    }
}
