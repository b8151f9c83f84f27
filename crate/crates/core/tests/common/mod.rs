#![allow(dead_code)]

use ppants::class::{canonical_class, is_primitive, CurveClass};
use ppants::word::{Letter, ReflectionWord};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `N_δ(L)` for `L = 2..=17` (rows) and `δ = −1..=11` (columns).
pub const REFERENCE_CENSUS: [[u64; 13]; 16] = [
    [3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [9, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [21, 6, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [39, 18, 36, 9, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [63, 38, 126, 54, 27, 18, 9, 0, 0, 0, 0, 0, 0],
    [93, 66, 276, 156, 216, 150, 135, 51, 21, 6, 0, 0, 0],
    [129, 102, 486, 318, 666, 528, 672, 438, 375, 180, 78, 72, 36],
    [171, 146, 756, 540, 1386, 1218, 2070, 1648, 1995, 1269, 1088, 948, 660],
    [219, 198, 1086, 822, 2376, 2226, 4560, 4044, 5970, 4632, 5532, 4890, 4596],
    [273, 258, 1476, 1164, 3636, 3552, 8160, 7764, 13302, 11571, 16608, 15342, 18081],
    [333, 326, 1926, 1566, 5166, 5196, 12870, 12818, 24414, 22806, 36779, 35838, 49428],
    [399, 402, 2436, 2028, 6966, 7158, 18690, 19206, 39336, 38574, 67836, 68925, 105708],
    [471, 486, 3006, 2550, 9036, 9438, 25620, 26928, 58068, 58890, 110454, 115806, 191337],
    [549, 578, 3636, 3132, 11376, 12036, 33660, 35984, 80610, 83754, 164678, 176844, 309132],
    [633, 678, 4326, 3774, 13986, 14952, 42810, 46374, 106962, 113166, 230508, 252060, 460080],
    [723, 786, 5076, 4476, 16866, 18186, 53070, 58098, 137124, 147126, 307944, 341454, 644244],
];

pub fn reference(delta: i64, length: usize) -> u64 {
    REFERENCE_CENSUS[length - 2][(delta + 1) as usize]
}

/// A uniformly chosen cyclically reduced xyz word of length `2·length`.
pub fn random_cyclic_word(rng: &mut ChaCha8Rng, length: usize) -> ReflectionWord {
    loop {
        let mut letters = vec![Letter::from_index(rng.gen_range(0..3))];
        while letters.len() < 2 * length {
            let prev = *letters.last().unwrap();
            let step = rng.gen_range(1..3);
            letters.push(Letter::from_index((prev.index() + step) % 3));
        }
        if letters[0] != letters[letters.len() - 1] {
            return ReflectionWord::new(letters);
        }
    }
}

/// A random primitive class with `2 ≤ L ≤ lmax`.
pub fn random_class(rng: &mut ChaCha8Rng, lmax: usize) -> CurveClass {
    loop {
        let length = rng.gen_range(2..=lmax);
        let w = random_cyclic_word(rng, length);
        if is_primitive(&w) {
            return canonical_class(&w).expect("cyclically reduced");
        }
    }
}

pub fn random_classes(seed: u64, count: usize, lmax: usize) -> Vec<CurveClass> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_class(&mut rng, lmax)).collect()
}
