use num_traits::Zero;
use proptest::prelude::*;
use scl_core::arcs::build_arcs;
use scl_core::chain::{
    homology_class, normalize_chain, parse_chain, parse_group_spec, tighten, Chain, CyclicWord, GroupSpec, Syllable,
    Term,
};
use scl_core::cone::{build_cone_system, disk_box, extremal_rays, ConeSystem};
use scl_core::lp::{maximize_with, LinearProgram, PivotRule, Relation};
use scl_core::rational::{int, Rational};
use scl_core::sails::{enumerate_disk_vectors, klein_value, KleinModel};
use scl_core::surgery::{apply_surgery, SurgeryMap};
use std::sync::OnceLock;

fn spec() -> GroupSpec {
    parse_group_spec("Z^2(a,c) * Z(b) * Z(d)").unwrap()
}

fn syllable() -> impl Strategy<Value = Syllable> {
    prop_oneof![
        (-2i64..=2, -2i64..=2).prop_map(|(x, y)| Syllable::new(0, vec![x, y])),
        (-3i64..=3).prop_map(|x| Syllable::new(1, vec![x])),
        (-3i64..=3).prop_map(|x| Syllable::new(2, vec![x])),
    ]
}

fn word() -> impl Strategy<Value = CyclicWord> {
    prop::collection::vec(syllable(), 1..7).prop_filter_map("trivial word", |s| tighten(&s))
}

fn chain() -> impl Strategy<Value = Chain> {
    let coefficient = prop_oneof![-3i64..=-1, 1i64..=3];
    prop::collection::vec((coefficient, 1i64..=3, word()), 1..4).prop_map(|terms| {
        Chain::new(
            terms
                .into_iter()
                .map(|(n, d, w)| Term { coefficient: Rational::new(n.into(), d.into()), word: w })
                .collect(),
        )
    })
}

/// Normalized chains agree term by term up to rotation.
fn same_chain(x: &Chain, y: &Chain) -> bool {
    let key = |c: &Chain| {
        let mut k: Vec<(Vec<Syllable>, Rational)> =
            normalize_chain(c).terms.iter().map(|t| (t.word.rotation_key(), t.coefficient.clone())).collect();
        k.sort();
        k
    };
    key(x) == key(y)
}

proptest! {
    #[test]
    fn tighten_is_idempotent(w in word()) {
        prop_assert_eq!(tighten(w.syllables()), Some(w.clone()));
    }

    #[test]
    fn render_then_parse_is_identity(c in chain()) {
        let g = spec();
        let back = parse_chain(&c.render(&g), &g).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn homology_is_linear(x in chain(), y in chain(), n in -3i64..=3) {
        let g = spec();
        let (hx, hy) = (homology_class(&x, &g), homology_class(&y, &g));
        let h = homology_class(&x.plus(&y.scaled(&int(n))), &g);
        for f in 0..g.num_factors() {
            for k in 0..g.rank(f) {
                prop_assert_eq!(&h.per_factor[f][k], &(&hx.per_factor[f][k] + &hy.per_factor[f][k] * int(n)));
            }
        }
    }

    #[test]
    fn normalize_preserves_homology(c in chain()) {
        let g = spec();
        let n = normalize_chain(&c);
        prop_assert_eq!(homology_class(&n, &g), homology_class(&c, &g));
        prop_assert!(n.terms.iter().all(|t| t.coefficient > Rational::zero()));
        prop_assert_eq!(normalize_chain(&n), n);
    }

    #[test]
    fn surgery_commutes_with_normalize(c in chain(), p in 1i64..4, q in -2i64..=2) {
        let g = spec();
        let map = SurgeryMap::new(
            g.clone(),
            g.clone(),
            vec![vec![vec![1, q], vec![0, p]], vec![vec![p]], vec![vec![1]]],
        )
        .unwrap();
        let direct = apply_surgery(&c, &map).unwrap();
        let via = apply_surgery(&normalize_chain(&c), &map).unwrap();
        prop_assert!(same_chain(&direct.chain, &via.chain));
        prop_assert_eq!(direct.is_boundary, via.is_boundary);
    }
}

struct KappaFixture {
    cone: ConeSystem,
    model: KleinModel,
    rays: Vec<Vec<Rational>>,
}

fn fixture() -> &'static KappaFixture {
    static F: OnceLock<KappaFixture> = OnceLock::new();
    F.get_or_init(|| {
        let g = parse_group_spec("Z(a) * Z(b)").unwrap();
        let arcs = build_arcs(&parse_chain("a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1", &g).unwrap(), &g).unwrap();
        let cone = build_cone_system(&arcs, 0);
        let rays = extremal_rays(&cone);
        let model = enumerate_disk_vectors(&cone, &disk_box(&cone, &rays));
        let rays = rays.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
        KappaFixture { cone, model, rays }
    })
}

fn cone_point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..=6, 1i64..=4), 4).prop_map(|ws| {
        let f = fixture();
        let mut v = vec![Rational::zero(); f.cone.dim()];
        for ((n, d), ray) in ws.iter().zip(&f.rays) {
            let t = Rational::new((*n).into(), (*d).into());
            for (x, r) in v.iter_mut().zip(ray) {
                *x += &t * r;
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kappa_is_homogeneous(v in cone_point(), k in 1i64..=4) {
        let f = fixture();
        let scaled: Vec<Rational> = v.iter().map(|x| x * int(k)).collect();
        let lhs = klein_value(&f.model, &f.cone, &scaled).unwrap();
        prop_assert_eq!(lhs, klein_value(&f.model, &f.cone, &v).unwrap() * int(k));
    }

    #[test]
    fn kappa_is_superadditive(u in cone_point(), v in cone_point()) {
        let f = fixture();
        let sum: Vec<Rational> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let whole = klein_value(&f.model, &f.cone, &sum).unwrap();
        let parts = klein_value(&f.model, &f.cone, &u).unwrap() + klein_value(&f.model, &f.cone, &v).unwrap();
        prop_assert!(whole >= parts);
    }

    #[test]
    fn pivot_rules_agree(
        c in prop::collection::vec(-4i64..=6, 4),
        a in prop::collection::vec(prop::collection::vec(-3i64..=4, 4), 3),
        b in prop::collection::vec(0i64..=9, 3),
    ) {
        let mut lp = LinearProgram::new();
        let xs: Vec<usize> = c.iter().enumerate().map(|(j, &cj)| lp.add_var(format!("x{j}"), int(cj))).collect();
        for (row, &rhs) in a.iter().zip(&b) {
            lp.add_row(xs.iter().zip(row).map(|(&x, &v)| (x, int(v))).collect(), Relation::Le, int(rhs));
        }
        lp.add_row(xs.iter().map(|&x| (x, int(1))).collect(), Relation::Le, int(10));
        let bland = maximize_with(&lp, PivotRule::Bland);
        let dantzig = maximize_with(&lp, PivotRule::Dantzig);
        prop_assert_eq!(&bland.objective, &dantzig.objective);
        let again = maximize_with(&lp, PivotRule::Dantzig);
        prop_assert_eq!(again.assignment, dantzig.assignment);
        prop_assert_eq!(again.pivots, dantzig.pivots);
    }
}
