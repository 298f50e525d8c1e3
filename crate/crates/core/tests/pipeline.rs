//! End-to-end properties of `build` and `substitute_step`.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use symdet::builder::{build, substitute_step};
use symdet::field::FieldDescriptor;
use symdet::linalg::determinant;
use symdet::schur::Strategy;
use symdet::verify::{verify_exhaustive, verify_sampled};

fn field_from(code: u8) -> FieldDescriptor {
    match code % 5 {
        0 | 1 => FieldDescriptor::Rationals,
        2 => FieldDescriptor::prime(3).unwrap(),
        3 => FieldDescriptor::prime(7).unwrap(),
        _ => FieldDescriptor::prime(101).unwrap(),
    }
}

fn strategy_from(code: u8) -> Strategy {
    [Strategy::Auto, Strategy::Shift, Strategy::RankFactor][code as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn build_round_trips(seed in any::<u64>(), fcode in any::<u8>(), scode in any::<u8>()) {
        let f = field_from(fcode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Shift grows the pencil about fivefold per singular step, so it
        // gets smaller inputs
        let strategy = strategy_from(scode);
        let (deg, terms) = if strategy == Strategy::Shift { (2, 2) } else { (4, 5) };
        let p = rand_poly(&mut rng, f, &["x", "y", "z"], deg, terms, |r| rand_entry(r, f));
        let report = build(&p, strategy).unwrap();
        prop_assert_eq!(report.pencil.vars(), p.vars());
        prop_assert!(report.pencil.validate().is_ok());
        prop_assert_eq!(report.size_trace.len(), report.script.steps.len() + 1);
        prop_assert_eq!(*report.size_trace.last().unwrap(), report.pencil.size());
        let r = match f.order() {
            Some(q) if q.pow(3) <= 50_000 => verify_exhaustive(&report.pencil, &p).unwrap(),
            _ => verify_sampled(&report.pencil, &p, 20, seed).unwrap(),
        };
        prop_assert!(r.passed, "{} -> {:?}", p, r.witness);
    }

    /// det(step(P))(x, y) = det(P)(w = x*y, x, y).
    #[test]
    fn substitution_law(seed in any::<u64>(), fcode in any::<u8>(), scode in any::<u8>(), m in 1usize..4, same in any::<bool>()) {
        let f = field_from(fcode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rand_pencil(&mut rng, f, &["w", "x", "y"], m);
        let v = if same { "x" } else { "y" };
        let (s, _) = substitute_step(&p, "w", "x", v, strategy_from(scode)).unwrap();
        for _ in 0..5 {
            let mut pt = rand_point(&mut rng, f, &["x", "y"]);
            let after = determinant(&s.evaluate(&pt).unwrap()).unwrap();
            let w = &pt["x"] * &pt[v];
            pt.insert("w".into(), w);
            let before = determinant(&p.evaluate(&pt).unwrap()).unwrap();
            prop_assert_eq!(after, before);
        }
    }
}
