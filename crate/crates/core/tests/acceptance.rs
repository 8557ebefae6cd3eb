//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the terminal.
//! A criterion that cannot hold on this data is reported as FAIL, and the
//! run then checks the obstruction responsible for it; the process exits
//! non-zero only when a criterion fails for any other reason.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use zetagcd::ff::{extension, field_make};
use zetagcd::groups::*;
use zetagcd::pencil::{classify_hypersurface, ClassifyMode, PencilDesc};
use zetagcd::pipeline::{descend_from_candidates, estimate_success};
use zetagcd::poly::{bareiss_det, is_weil, power_map, IntPoly, ModPoly, PolyError, WeilPoly};
use zetagcd::torsion::{
    cell_bound, cohomology_torsion, fixtures, milnor_bound, torsion_free_prime, torsion_of_coker, IntMatrix, TowerValue,
};
use zetagcd::variety::{count_points, curve_numerator, fermat, poly_from_ints, ProjVariety};

enum Verdict {
    Pass(String),
    /// The criterion fails; the string names the obstruction, which the
    /// check has verified.
    Obstructed(String),
    Fail(String),
}

type Check = fn() -> Verdict;

fn main() {
    let criteria: [(&str, Duration, Check); 9] = [
        ("zeta fixtures", Duration::from_secs(30), zeta_fixtures),
        ("pencil exactness", Duration::from_secs(120), pencil_exactness),
        ("gcd success on the Fermat surface", Duration::from_secs(300), gcd_success),
        ("descent round trip", Duration::from_secs(60), descent_round_trip),
        ("SL2(F_127) census", Duration::from_secs(600), symplectic_census),
        ("orthogonal trend", Duration::from_secs(300), orthogonal_trend),
        ("transvection closures", Duration::from_secs(300), closures),
        ("equidistribution", Duration::from_secs(1800), equidistribution),
        ("torsion suite", Duration::from_secs(120), torsion_suite),
    ];
    // numeric arguments select criteria; flags passed by cargo are ignored
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexplained = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let verdict = check();
        let wall = start.elapsed();
        let late = if wall > *budget { format!("; over the {budget:?} budget") } else { String::new() };
        let (tag, detail) = match verdict {
            Verdict::Pass(d) if late.is_empty() => ("PASS", d),
            Verdict::Pass(d) => {
                unexplained += 1;
                ("FAIL", d)
            }
            Verdict::Obstructed(d) => ("FAIL", format!("{d} (obstruction verified)")),
            Verdict::Fail(d) => {
                unexplained += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{tag}] ({name}, {:.1}s{late}): {detail}", i + 1, wall.as_secs_f64());
    }
    if unexplained > 0 {
        eprintln!("{unexplained} criteria failed without a documented obstruction");
        std::process::exit(1);
    }
}

fn zeta_fixtures() -> Verdict {
    let f2 = field_make(2, 1, 0).unwrap();
    let curve = ProjVariety::hypersurface(f2, fermat(3, 3)).unwrap();
    let n = curve_numerator(&curve, 1).unwrap();
    if n.poly != IntPoly::from_i64(&[1, 0, 2]) {
        return Verdict::Fail(format!("Fermat cubic over F_2 gave {:?}", n.poly));
    }
    let mut r = common::rng(1);
    let mut checked = 0;
    for p in [3u64, 5] {
        let field = field_make(p, 1, 0).unwrap();
        let mut found = 0;
        while found < 50 {
            let c = random_plane_cubic(&field, &mut r);
            let smooth = classify_hypersurface(&c, ClassifyMode::Algebraic).unwrap();
            if !smooth.class.is_smooth() {
                continue;
            }
            found += 1;
            let f = curve_numerator(&c, 1).unwrap();
            // P = 1 + a T + q T^2: alpha + beta = -a, alpha^2 + beta^2 = a^2 - 2q
            let (a, q) = (f.poly.coeff(1), BigInt::from(p));
            let predicted = &q * &q + 1 - (&a * &a - 2 * &q);
            let direct = BigInt::from(count_points(&c, 2).unwrap());
            if predicted != direct {
                return Verdict::Fail(format!("N_2 predicted {predicted}, counted {direct} over F_{p}"));
            }
            if &a * &a > 4 * &q {
                return Verdict::Fail(format!("trace {a} violates the Hasse bound over F_{p}"));
            }
            checked += 1;
        }
    }
    Verdict::Pass(format!("1 + 2T^2 over F_2; {checked} smooth cubics over F_3 and F_5 match N_2 and the Hasse bound"))
}

fn random_plane_cubic(field: &zetagcd::ff::FieldRef, r: &mut rand_chacha::ChaCha8Rng) -> ProjVariety {
    let p = field.p() as i64;
    let mut exps = Vec::new();
    for a in 0..=3u32 {
        for b in 0..=3 - a {
            exps.push([a, b, 3 - a - b]);
        }
    }
    let terms: Vec<(&[u32], i64)> = exps.iter().map(|e| (&e[..], r.gen_range(0..p))).collect();
    ProjVariety::hypersurface(field.clone(), poly_from_ints(field, 3, &terms)).unwrap()
}

fn pencil_exactness() -> Verdict {
    let x = ProjVariety::hypersurface(field_make(5, 1, 0).unwrap(), fermat(4, 3)).unwrap();
    let (p, rejected) = match PencilDesc::random_lefschetz(x, 0, 6, ClassifyMode::Algebraic, 64) {
        Ok(v) => v,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let scan = p.scan.as_ref().unwrap();
    let bound = 3u64.pow(4).min(3 * 2 * 2);
    let nodal = p.z.iter().all(|e| e.nodal_verified());
    let detail = format!(
        "fibres over F_(5^k), k <= {}, classified; {} closed points, #Z = {} <= {bound}, {rejected} pencils redrawn",
        scan.k_scan, scan.closed_points, scan.geometric
    );
    if scan.lefschetz && nodal && scan.geometric <= bound {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn fermat_f2_pencil() -> PencilDesc {
    common::fermat_pencil(2, 0, 4)
}

fn gcd_success() -> Verdict {
    let p = fermat_f2_pencil();
    let q = p.over(12).unwrap().desc().clone();
    let e = estimate_success(&p, &q, 50, 3, Some(&IntPoly::one())).unwrap();
    let detail = format!("{}/{} trials succeed, fraction {:.3}", e.successes, e.trials, e.fraction);
    if e.fraction >= 2.0 / 3.0 {
        return Verdict::Pass(detail);
    }
    // every smooth fibre is supersingular with one of two numerators, and a
    // trial succeeds exactly when its two fibres differ
    let classes = [IntPoly::from_i64(&[1, -128, 4096]), IntPoly::from_i64(&[1, 64, 4096])];
    let lefschetz = p.scan.as_ref().is_some_and(|s| s.lefschetz);
    let supersingular = e.records.iter().all(|r| classes.contains(&r.f1.poly) && classes.contains(&r.f2.poly));
    let collisions = e.records.iter().all(|r| r.success == Some(r.f1.poly != r.f2.poly));
    if !lefschetz && supersingular && collisions {
        Verdict::Obstructed(format!("{detail}; pencil not Lefschetz and all fibres supersingular, numerators 1 - 128T + QT^2 or 1 + 64T + QT^2"))
    } else {
        Verdict::Fail(detail)
    }
}

fn descent_round_trip() -> Verdict {
    let mut r = common::rng(7);
    let (mut exact, mut ambiguous, mut other) = (0, 0, Vec::new());
    for _ in 0..100 {
        let f = common::random_weil(&mut r);
        if f.degree() > 8 || !is_weil(&f.poly, &BigInt::from(f.q), 1e-9).passed {
            return Verdict::Fail(format!("generator produced an invalid polynomial {:?}", f.poly));
        }
        let g1 = power_map(&f, 2).unwrap();
        let g2 = power_map(&f, 3).unwrap();
        match descend_from_candidates(&g1.poly, 2, &g2.poly, 3, f.q, 1) {
            Ok(b) if b.poly == f.poly => exact += 1,
            Err(PolyError::AmbiguousMatching(_)) => ambiguous += 1,
            res => other.push(format!("{:?} -> {res:?}", f.poly)),
        }
    }
    let mut r2 = common::rng(8);
    let q2_exact = (0..100)
        .filter(|_| {
            let f = common::random_weil_q2(&mut r2);
            let g1 = power_map(&f, 2).unwrap();
            let g2 = power_map(&f, 3).unwrap();
            descend_from_candidates(&g1.poly, 2, &g2.poly, 3, 2, 1).is_ok_and(|b| b.poly == f.poly)
        })
        .count();
    let detail = format!("{exact}/100 recovered exactly, {ambiguous} ambiguous; q = 2 products {q2_exact}/100");
    if !other.is_empty() {
        return Verdict::Fail(format!("{detail}; wrong answers: {other:?}"));
    }
    if exact == 100 {
        return Verdict::Pass(detail);
    }
    // a pair with equal images at r = 2 and r = 3 cannot be told apart
    let a = WeilPoly::new(IntPoly::from_i64(&[1, -3, 3]), 3, 1).unwrap();
    let b = WeilPoly::new(IntPoly::from_i64(&[1, 3, 3]), 3, 1).unwrap();
    let twins = [2, 3].iter().all(|&k| power_map(&a, k).unwrap() == power_map(&b, k).unwrap());
    if twins && q2_exact == 100 {
        Verdict::Obstructed(format!("{detail}; 1 - 3T + 3T^2 and 1 + 3T + 3T^2 share both power maps"))
    } else {
        Verdict::Fail(detail)
    }
}

fn legendre(a: u64, ell: u64) -> i64 {
    let a = a % ell;
    if a == 0 {
        return 0;
    }
    if BigUint::from(a).modpow(&BigUint::from((ell - 1) / 2), &BigUint::from(ell)).is_one() {
        1
    } else {
        -1
    }
}

/// Elements of `SL2(F_l)` with trace `t`.
fn sl2_trace_count(t: u64, ell: u64) -> u64 {
    let disc = (t * t + 4 * ell - 4) % ell;
    ((ell * ell) as i64 + ell as i64 * legendre(disc, ell)) as u64
}

fn symplectic_census() -> Verdict {
    let ell = 127;
    let spec = GroupSpec::new(Family::Sp, 2, ell).unwrap();
    let census = CharpolyCensus::build(&spec, 1, Sampling::default()).unwrap();
    if !census.exact || census.total != ell * ell * ell - ell {
        return Verdict::Fail(format!("census of {} elements, exact {}", census.total, census.exact));
    }
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let m = sample_group(&spec, 1, seed).unwrap();
        let f = charpoly_reversed(&m);
        let c = census.coprime_fraction(&f, CharpolyView::Full).unwrap();
        let t = (ell - f.coeffs[1]) % ell;
        let expect = if t == 2 || t == ell - 2 { ell * ell } else { sl2_trace_count(t, ell) };
        if c.numerator != expect {
            return Verdict::Fail(format!("trace {t}: census {} elements, trace count {expect}", c.numerator));
        }
        worst = worst.max(c.value());
    }
    let small = GroupSpec::new(Family::Sp, 2, 3).unwrap();
    let f = ModPoly::from_i64(3, &[1, -2, 1]);
    let c = coprime_fraction(&small, 1, &f, Sampling::default()).unwrap();
    let detail = format!("{} elements; worst of 20 fractions {worst:.5}; (1 - T)^2 at l = 3 gives {}/{}", census.total, c.numerator, c.denominator);
    if worst <= 0.25 && (c.numerator, c.denominator) == (9, 24) && c.exact {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn orthogonal_trend() -> Verdict {
    let ells = [5u64, 7, 11, 13];
    let (mut repeated, mut common_factor) = (Vec::new(), Vec::new());
    for &ell in &ells {
        let spec = GroupSpec::new(Family::O, 3, ell).unwrap();
        let census = CharpolyCensus::build(&spec, 1, Sampling::default()).unwrap();
        repeated.push((ell, 1.0 - census.distinct_root_fraction().value()));
        let worst = census
            .polys()
            .filter(|(f, _)| f.is_squarefree().unwrap())
            .map(|(f, _)| census.coprime_fraction(&f, CharpolyView::Reduced).unwrap().value())
            .fold(0.0, f64::max);
        common_factor.push((ell, worst));
    }
    let decreasing = |v: &[(u64, f64)]| v.windows(2).all(|w| w[1].1 < w[0].1);
    let (fit_r, env_r) = fit_inverse_ell(&repeated);
    let (fit_c, env_c) = fit_inverse_ell(&common_factor);
    let show = |v: &[(u64, f64)]| v.iter().map(|(l, y)| format!("{l}:{y:.4}")).collect::<Vec<_>>().join(" ");
    let detail = format!(
        "repeated roots {} (C fit {fit_r:.3}, envelope {env_r:.3}); common factor {} (C fit {fit_c:.3}, envelope {env_c:.3})",
        show(&repeated),
        show(&common_factor)
    );
    let bounded = |v: &[(u64, f64)], c: f64| v.iter().all(|&(l, y)| y <= c / l as f64 + 1e-12);
    if decreasing(&repeated) && decreasing(&common_factor) && bounded(&repeated, env_r) && bounded(&common_factor, env_c) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

/// `l^(r^2) prod (l^(2i) - 1)`.
fn sp_order(r: u32, ell: u64) -> u64 {
    ell.pow(r * r) * (1..=r).map(|i| ell.pow(2 * i) - 1).product::<u64>()
}

fn nonzero_vectors(s: usize, ell: u64) -> Vec<Vec<u64>> {
    (1..ell.pow(s as u32))
        .map(|mut n| {
            (0..s)
                .map(|_| {
                    let d = n % ell;
                    n /= ell;
                    d
                })
                .collect()
        })
        .collect()
}

fn closures() -> Verdict {
    let mut sizes = Vec::new();
    for (s, ell) in [(2usize, 3u64), (2, 5), (4, 3)] {
        let spec = GroupSpec::new(Family::Sp, s, ell).unwrap();
        let gens: Vec<MatModL> = nonzero_vectors(s, ell).iter().map(|v| transvection(v, 1, &spec).unwrap()).collect();
        let closure = subgroup_closure(&gens, ell, s, 1 << 20).unwrap();
        let expect = sp_order(s as u32 / 2, ell);
        if closure.len() as u64 != expect || group_order(&spec) != BigUint::from(expect) {
            return Verdict::Fail(format!("Sp({s}, F_{ell}): closure {}, expected {expect}", closure.len()));
        }
        sizes.push(format!("Sp({s},F_{ell}) = {}", closure.len()));
    }
    let mut r = common::rng(11);
    let mut seen = BTreeMap::new();
    for (s, ell) in [(3usize, 5u64), (3, 7), (4, 5)] {
        let spec = GroupSpec::new(Family::O, s, ell).unwrap();
        let anisotropic: Vec<Vec<u64>> = nonzero_vectors(s, ell).into_iter().filter(|v| bilinear(&spec.form, v, v) != 0).collect();
        for trial in 0..40 {
            let k = r.gen_range(1..=3);
            let gens: Vec<MatModL> = (0..k)
                .map(|_| {
                    // single reflections or products of two
                    let a = reflection(anisotropic.choose(&mut r).unwrap(), &spec).unwrap();
                    if r.gen_bool(0.5) {
                        a
                    } else {
                        a.mul(&reflection(anisotropic.choose(&mut r).unwrap(), &spec).unwrap())
                    }
                })
                .collect();
            let class = classify_orth_subgroup(&gens, &spec).unwrap();
            let g = sample_group(&spec, 1, trial).unwrap();
            let gi = g.inverse().unwrap();
            let conj: Vec<MatModL> = gens.iter().map(|m| g.mul(m).mul(&gi)).collect();
            let again = classify_orth_subgroup(&conj, &spec).unwrap();
            if class != again {
                return Verdict::Fail(format!("O({s}, F_{ell}): {class:?} becomes {again:?} after conjugation"));
            }
            *seen.entry(format!("{class:?}")).or_insert(0) += 1;
        }
    }
    let detail = format!("{}; orthogonal classes {seen:?} stable under conjugation", sizes.join(", "));
    if seen.len() == 3 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; not every class occurred"))
    }
}

fn equidistribution() -> Verdict {
    let p = fermat_f2_pencil();
    let q = extension(p.base(), 20, 0).unwrap().target;
    let rep = match equidistribution_check(&p, 3, &q, &[0], 2000, 5) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let detail = format!(
        "empirical {:.4}, exact coset fraction {:.4}, difference {:.4} against Katz term {:.3e} + 3 sigma {:.4}",
        rep.empirical, rep.exact_fraction, rep.difference, rep.katz.value, rep.sigma3
    );
    if rep.within {
        return Verdict::Pass(detail);
    }
    // the pencil is not Lefschetz and every fibre is supersingular with
    // trace 2048 or -1024, both 2 mod 3
    let lefschetz = p.scan.as_ref().is_some_and(|s| s.lefschetz);
    let degenerate = rep.traces.iter().all(|t| *t == 2048 || *t == -1024);
    if !lefschetz && degenerate && rep.hits == 0 {
        Verdict::Obstructed(format!("{detail}; all traces are 2048 or -1024"))
    } else {
        Verdict::Fail(detail)
    }
}

/// Product of the invariant factors: the gcd of the `r x r` minors, `r`
/// the rank.
fn torsion_by_minors(m: &[Vec<i64>]) -> BigUint {
    let (rows, cols) = (m.len(), m[0].len());
    let subsets = |n: usize, k: usize| -> Vec<Vec<usize>> {
        (0u32..1 << n).filter(|b| b.count_ones() as usize == k).map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect()).collect()
    };
    for k in (1..=rows.min(cols)).rev() {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor = rs.iter().map(|&i| cs.iter().map(|&j| BigInt::from(m[i][j])).collect()).collect();
                g = g.gcd(&bareiss_det(minor));
            }
        }
        if !g.is_zero() {
            return g.magnitude().clone();
        }
    }
    BigUint::one()
}

fn torsion_suite() -> Verdict {
    let h2 = |k: &zetagcd::torsion::CellComplex| cohomology_torsion(k, 2).unwrap().torsion;
    let fixtures_ok = h2(&fixtures::real_projective_plane()) == vec![BigUint::from(2u32)]
        && h2(&fixtures::klein_bottle()) == vec![BigUint::from(2u32)]
        && h2(&fixtures::moore_space(3)) == vec![BigUint::from(3u32)]
        && cohomology_torsion(&fixtures::real_projective_plane(), 1).unwrap().torsion.is_empty();
    if !fixtures_ok {
        return Verdict::Fail("fixture torsion differs".into());
    }
    let mut r = common::rng(9);
    let mut largest = BigUint::one();
    for _ in 0..3000 {
        let (rows, cols) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| r.gen_range(-1..=1)).collect()).collect();
        let refs: Vec<&[i64]> = m.iter().map(|v| &v[..]).collect();
        let t = torsion_of_coker(&IntMatrix::from_i64(&refs));
        let bound: BigUint = (1..=rows.min(cols) as u64).product::<u64>().into();
        if t.order != torsion_by_minors(&m) || t.order > bound {
            return Verdict::Fail(format!("{m:?}: order {} (minors {}, bound {bound})", t.order, torsion_by_minors(&m)));
        }
        largest = largest.max(t.order);
    }
    if cell_bound(1, 1, 1) != TowerValue::int(512u32) || milnor_bound(3, 3) != BigUint::from(703125u32) {
        return Verdict::Fail("bound evaluators differ".into());
    }
    let prime = torsion_free_prime(None, 2, 4);
    let k = prime.k.unwrap();
    let k2 = TowerValue::mul(k.clone(), k);
    let chain = k2.le(&prime.ell_bound.unwrap()) == Some(true) && prime.chain.iter().all(|s| s.holds == Some(true));
    let detail = format!("fixtures exact; 3000 sign matrices within min(m!, n!) (largest torsion {largest}); cell_bound(1,1,1) = 512, milnor_bound(3,3) = 703125, k^2 <= d^(2^(4N^2)) at (2, 4)");
    if chain {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; chain check failed"))
    }
}
