#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zetagcd::ff::field_make;
use zetagcd::pencil::{ClassifyMode, PencilDesc};
use zetagcd::poly::{IntPoly, WeilPoly};
use zetagcd::variety::{fermat, ProjVariety};

/// Scanned pencil on the Fermat cubic surface over `F_p`.
pub fn fermat_pencil(p: u64, seed: u64, k_scan: u32) -> PencilDesc {
    let x = ProjVariety::hypersurface(field_make(p, 1, 0).unwrap(), fermat(4, 3)).unwrap();
    let mut pencil = PencilDesc::random(x, seed).unwrap();
    // a non-Lefschetz verdict still stores the scan
    let _ = pencil.scan_nodal_locus(k_scan, ClassifyMode::Algebraic);
    pencil
}

/// Product of 1 to 4 distinct factors `1 - a T + q T^2` with `a^2 < 4q`:
/// a Weil polynomial of weight 1 with distinct, non-real inverse roots.
pub fn random_weil(rng: &mut ChaCha8Rng) -> WeilPoly {
    const QS: [u128; 8] = [2, 3, 4, 5, 7, 9, 11, 13];
    let q = QS[rng.gen_range(0..QS.len())];
    let amax = ((4 * q - 1) as f64).sqrt() as i64;
    let k = rng.gen_range(1..=4usize);
    let mut used = Vec::new();
    while used.len() < k.min(2 * amax as usize + 1) {
        let a = rng.gen_range(-amax..=amax);
        if !used.contains(&a) {
            used.push(a);
        }
    }
    let mut f = IntPoly::one();
    for a in used {
        f = f.mul(&IntPoly::from_i64(&[1, -a, q as i64]));
    }
    WeilPoly::new(f, q, 1).unwrap()
}

/// `prod (1 - a_i T + 2 T^2)` over 1 to 4 distinct `a_i` in `[-2, 2]`.
pub fn random_weil_q2(rng: &mut ChaCha8Rng) -> WeilPoly {
    let k = rng.gen_range(1..=4usize);
    let mut used = Vec::new();
    while used.len() < k {
        let a = rng.gen_range(-2..=2i64);
        if !used.contains(&a) {
            used.push(a);
        }
    }
    let f = used.iter().fold(IntPoly::one(), |f, &a| f.mul(&IntPoly::from_i64(&[1, -a, 2])));
    WeilPoly::new(f, 2, 1).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
