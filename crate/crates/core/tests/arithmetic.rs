mod common;

use fermat_closure::parse::parse_poly;
use fermat_closure::system::{membership, syzygy_dimension};
use fermat_closure::{NormalHomogPoly, RingContext};
use proptest::prelude::*;

use common::{from_lib, ideal_vectors, member, mul, rank, reduce, Poly};

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn monomial_text(a: u64, b: u64, c: u64) -> String {
    format!("x^{a}*y^{b}*z^{c}")
}

/// A homogeneous polynomial of degree `n` with up to four terms.
fn poly_strategy(n: u64) -> impl Strategy<Value = Vec<(u64, u64, u64)>> {
    proptest::collection::vec((0..=n, 0..=n, 1u64..50), 1..4).prop_map(move |terms| {
        terms
            .into_iter()
            .map(|(a, b, c)| {
                let a = a.min(n);
                let b = b.min(n - a);
                (a, b, c)
            })
            .collect()
    })
}

fn build(terms: &[(u64, u64, u64)], n: u64, ctx: &RingContext) -> (NormalHomogPoly, Poly) {
    let text = terms
        .iter()
        .map(|&(a, b, c)| format!("{c}*{}", monomial_text(a, b, n - a - b)))
        .collect::<Vec<_>>()
        .join(" + ");
    let p = ctx.p().get() as u64;
    let d = ctx.d() as u64;
    let mut raw = Poly::new();
    for &(a, b, c) in terms {
        let e = raw.entry((a, b, n - a - b)).or_insert(0);
        *e = (*e + c) % p;
    }
    raw.retain(|_, c| *c != 0);
    (parse_poly(&text, ctx).unwrap(), reduce(&raw, d, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_match_naive_reduction(
        d in 3u32..8,
        pi in 0usize..5,
        n1 in 0u64..9,
        n2 in 0u64..9,
        seed in any::<u64>(),
    ) {
        let p = PRIMES[pi];
        prop_assume!(d as u64 % p != 0);
        let ctx = RingContext::with(d, p).unwrap();
        let mut rng = seed;
        let mut next = |bound: u64| { rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (rng >> 33) % bound };
        let t1: Vec<_> = (0..3).map(|_| { let a = next(n1 + 1); (a, next(n1 - a + 1), 1 + next(40)) }).collect();
        let t2: Vec<_> = (0..3).map(|_| { let a = next(n2 + 1); (a, next(n2 - a + 1), 1 + next(40)) }).collect();
        let (f, nf) = build(&t1, n1, &ctx);
        let (g, ng) = build(&t2, n2, &ctx);
        prop_assert_eq!(from_lib(&f), nf.clone());
        prop_assert_eq!(from_lib(&ctx.multiply(&f, &g)), mul(&nf, &ng, d as u64, p));
        let sum = ctx.add(&ctx.multiply(&f, &g), &ctx.multiply(&g, &f));
        prop_assert_eq!(from_lib(&sum), from_lib(&ctx.scale(&ctx.multiply(&f, &g), 2)));
    }

    #[test]
    fn frobenius_is_additive_power(
        d in 3u32..6,
        pi in 0usize..4,
        n in 1u64..5,
        terms in poly_strategy(4),
    ) {
        let p = PRIMES[pi];
        prop_assume!(d as u64 % p != 0);
        let ctx = RingContext::with(d, p).unwrap();
        let terms: Vec<_> = terms.into_iter().filter(|&(a, b, _)| a + b <= n).collect();
        prop_assume!(!terms.is_empty());
        let (f, naive) = build(&terms, n, &ctx);
        let fp = ctx.frobenius(&f, p).unwrap();
        let mut pow = Poly::from([((0, 0, 0), 1)]);
        for _ in 0..p {
            pow = mul(&pow, &naive, d as u64, p);
        }
        prop_assert_eq!(from_lib(&fp), pow.clone());
        prop_assert_eq!(from_lib(&ctx.pow(&f, p)), pow);
    }

    #[test]
    fn membership_matches_dense_elimination(
        d in 3u32..6,
        pi in 0usize..4,
        gens in proptest::collection::vec((0u64..4, 0u64..4, 0u64..4), 1..4),
        target in (0u64..6, 0u64..6, 0u64..6),
        twist in 0u64..3,
    ) {
        let p = PRIMES[pi];
        prop_assume!(d as u64 % p != 0);
        let ctx = RingContext::with(d, p).unwrap();
        let lib_gens: Vec<_> = gens.iter().map(|&(a, b, c)| ctx.monomial(a, b, c)).collect();
        let naive_gens: Vec<Poly> = lib_gens.iter().map(from_lib).collect();
        let degrees: Vec<u64> = gens.iter().map(|&(a, b, c)| a + b + c).collect();
        let (a, b, c) = target;
        // a binomial target mixes strands
        let text = format!("{} + 3*{}", monomial_text(a, b, c), monomial_text(a + c, b, 0));
        let f = parse_poly(&text, &ctx).unwrap();
        let n = a + b + c;
        let expected = member(&from_lib(&f), n, &naive_gens, &degrees, d as u64, p);
        for compress in [false, true] {
            let result = membership(&f, &lib_gens, &ctx, compress).unwrap();
            prop_assert_eq!(result.is_in(), expected);
            prop_assert!(result.verify(&f, &lib_gens, &ctx));
        }

        let m = degrees.iter().copied().max().unwrap() + twist;
        let (_, vecs) = ideal_vectors(&naive_gens, &degrees, m, d as u64, p);
        let naive_syz = vecs.len() - rank(vecs, p);
        prop_assert_eq!(syzygy_dimension(&lib_gens, m, &ctx).unwrap(), naive_syz);
    }
}

#[test]
fn graded_piece_dimensions() {
    for d in 3..9u32 {
        let ctx = RingContext::with(d, 11).unwrap();
        for n in 0..20u64 {
            let naive = common::basis(n, d as u64).len() as u64;
            assert_eq!(ctx.dim_graded_piece(n), naive, "d={d} n={n}");
            assert_eq!(ctx.basis(n).len() as u64, naive);
            if n >= d as u64 {
                assert_eq!(naive, d as u64 * n + d as u64 - (d as u64 * (d as u64 - 1)) / 2);
            }
        }
    }
}

#[test]
fn fermat_relation_holds() {
    for p in [2u64, 3, 7, 11] {
        let ctx = RingContext::with(5, p).unwrap();
        let f = parse_poly("x5 + y5 - z5", &ctx).unwrap();
        assert!(f.is_zero(), "p={p}");
    }
}
