//! Schur polynomial evaluation and the dented-axis hexagon identity.
//!
//! A strictly increasing set of dent positions along a lattice line encodes
//! a partition; tiling counts of trapezoids and axis-dented hexagons turn
//! into Schur polynomial values at all-ones arguments.
//!
//! - [`lambda_of_set`]: the partition carried by a dent set;
//! - [`schur_principal`]: `s_lambda(1, ..., 1)` by the dent-difference
//!   product, exact and integer;
//! - [`schur_at_points`]: `s_lambda` at arbitrary rational points by
//!   summing over semistandard tableaux;
//! - [`verify_schur_identity`]: the subset-sum identity for hexagons dented
//!   in two blocks along the horizontal axis, all three sides of it;
//! - [`explore_ratio`]: the same subset sum against its dent-set baseline
//!   at explicit evaluation points, for open-ended experiments.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{build_region, split_axis_blocks, Orientation, RegionParams};
use crate::oracle::count_tilings;
use crate::poly::RawFrac;

/// Why a Schur computation refused its inputs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchurError {
    /// Partition parts must be weakly decreasing and nonnegative.
    #[error("not a partition: parts must be weakly decreasing and nonnegative")]
    BadPartition,
    /// Dent sets must be strictly increasing positive integers.
    #[error("dent set must be strictly increasing positive integers")]
    BadSet,
    /// A scalar parameter is negative.
    #[error("negative {name}: {value}")]
    Negative { name: &'static str, value: i64 },
    /// The up and down dent sets share a position.
    #[error("up and down dent sets overlap at position {0}")]
    OverlappingSets(i64),
    /// The dents do not form two end blocks around the middle window.
    #[error("dent positions do not form two end blocks around a gap of {gap}")]
    BadGeometry { gap: i64 },
    /// Fewer middle positions than the subset width asks for.
    #[error("subset width {width} exceeds the middle window {window}")]
    WindowTooSmall { width: i64, window: i64 },
    /// The denominator product vanished at the supplied points.
    #[error("denominator vanished at the supplied points")]
    ZeroDenominator,
    /// Not enough evaluation points for the requested variable counts.
    #[error("need {needed} evaluation points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    /// The baseline variable count is too small for the down set.
    #[error("variable count {n} too small: |up| = {u} exceeds n + |down| = {nd}")]
    BadVariableCount { n: usize, u: usize, nd: usize },
}

fn check_set(set: &[i64]) -> Result<(), SchurError> {
    if set.first().is_some_and(|&x| x < 1) {
        return Err(SchurError::BadSet);
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SchurError::BadSet);
    }
    Ok(())
}

fn check_partition(lambda: &[i64]) -> Result<(), SchurError> {
    if lambda.iter().any(|&p| p < 0) || lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(SchurError::BadPartition);
    }
    Ok(())
}

fn nonzero_parts(lambda: &[i64]) -> &[i64] {
    let keep = lambda.iter().take_while(|&&p| p > 0).count();
    &lambda[..keep]
}

/// The partition read off a strictly increasing set of positive dent
/// positions `x1 < ... < xn`: parts `xn - n + 1, ..., x2 - 1, x1`. All
/// parts come out positive.
pub fn lambda_of_set(set: &[i64]) -> Result<Vec<i64>, SchurError> {
    check_set(set)?;
    let n = set.len();
    Ok((0..n).map(|j| set[n - 1 - j] - (n - 1 - j) as i64).collect())
}

/// `s_lambda(1, ..., 1)` with `n` ones: the number of semistandard tableaux
/// of shape `lambda` with entries at most `n`. Computed by the
/// dent-difference product; zero when `lambda` has more than `n` parts.
pub fn schur_principal(lambda: &[i64], n: usize) -> Result<BigInt, SchurError> {
    check_partition(lambda)?;
    let lam = nonzero_parts(lambda);
    if lam.len() > n {
        return Ok(BigInt::zero());
    }
    let part = |i: usize| -> i64 {
        if i < lam.len() {
            lam[i]
        } else {
            0
        }
    };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in (i + 1)..n {
            let li = part(i) + (n - i) as i64;
            let lj = part(j) + (n - j) as i64;
            num *= li - lj;
            den *= (j - i) as i64;
        }
    }
    debug_assert!((&num % &den).is_zero(), "dent-difference product is always integral");
    Ok(num / den)
}

/// `s_lambda(x1, ..., xn)` with `n = xs.len()`, as an exact rational:
/// the sum over all semistandard tableaux of shape `lambda` with entries at
/// most `n` of the product of the `xs` indexed by the entries.
pub fn schur_at_points(lambda: &[i64], xs: &[BigRational]) -> Result<BigRational, SchurError> {
    check_partition(lambda)?;
    let lam = nonzero_parts(lambda);
    let n = xs.len();
    if lam.len() > n {
        return Ok(BigRational::zero());
    }
    if lam.is_empty() {
        return Ok(BigRational::one());
    }
    // Row-major fill: each entry is at least its left neighbor, strictly
    // greater than the entry above, and at most n.
    let mut grid: Vec<Vec<usize>> = lam.iter().map(|&w| vec![0; w as usize]).collect();
    let mut total = BigRational::zero();
    fn fill(
        grid: &mut Vec<Vec<usize>>,
        lam: &[i64],
        xs: &[BigRational],
        r: usize,
        c: usize,
        running: BigRational,
        total: &mut BigRational,
    ) {
        if r == lam.len() {
            *total += running;
            return;
        }
        let (nr, nc) = if c + 1 < lam[r] as usize { (r, c + 1) } else { (r + 1, 0) };
        let min_left = if c > 0 { grid[r][c - 1] } else { 1 };
        let min_above = if r > 0 { grid[r - 1][c] + 1 } else { 1 };
        let lo = min_left.max(min_above);
        for e in lo..=xs.len() {
            grid[r][c] = e;
            let next = running.clone() * &xs[e - 1];
            fill(grid, lam, xs, nr, nc, next, total);
        }
    }
    fill(&mut grid, lam, xs, 0, 0, BigRational::one(), &mut total);
    Ok(total)
}

// ---------------------------------------------------------------------------
// The dented-axis identity
// ---------------------------------------------------------------------------

/// Visit every `k`-element subset of `items` in lexicographic order.
fn for_each_combination(items: &[i64], k: usize, f: &mut dyn FnMut(&[i64])) {
    fn step(items: &[i64], k: usize, start: usize, acc: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        let still_needed = k - acc.len();
        for i in start..=items.len().saturating_sub(still_needed) {
            acc.push(items[i]);
            step(items, k, i + 1, acc, f);
            acc.pop();
        }
    }
    if k <= items.len() {
        step(items, k, 0, &mut Vec::new(), f);
    }
}

fn merged_union(a: &[i64], b: &[i64]) -> Result<Vec<i64>, SchurError> {
    let mut all: Vec<i64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_unstable();
    for w in all.windows(2) {
        if w[0] == w[1] {
            return Err(SchurError::OverlappingSets(w[0]));
        }
    }
    Ok(all)
}

/// The three sides of the dented-axis identity at one geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisIdentity {
    /// Subset sum of products of principal Schur values.
    pub lhs: BigInt,
    /// Hyperfactorial prefactor times the two baseline Schur values.
    pub rhs: BigRational,
    /// Tiling count of the dented hexagon itself.
    pub region_count: BigInt,
}

impl AxisIdentity {
    pub fn holds(&self) -> bool {
        self.rhs == BigRational::from(self.lhs.clone()) && self.lhs == self.region_count
    }
}

/// Check the subset-sum identity for the hexagon dented along its axis in
/// two end blocks: `up` and `down` are the positions (left to right) of the
/// up- and down-pointing dents, which together must fill a left block
/// `1..=a` and a right block starting `y + z` past it. Returns the subset
/// sum, the product form, and the region's tiling count; the caller
/// compares them.
pub fn verify_schur_identity(
    up: &[i64],
    down: &[i64],
    y: i64,
    z: i64,
) -> Result<AxisIdentity, SchurError> {
    if y < 0 {
        return Err(SchurError::Negative { name: "y", value: y });
    }
    if z < 0 {
        return Err(SchurError::Negative { name: "z", value: z });
    }
    check_set(up)?;
    check_set(down)?;
    let all = merged_union(up, down)?;
    let (a, b) =
        split_axis_blocks(&all, y + z).map_err(|_| SchurError::BadGeometry { gap: y + z })?;
    let u = up.len();
    let d = down.len();

    // Subset sum over the middle window.
    let middle: Vec<i64> = (a + 1..=a + y + z).collect();
    let mut lhs = BigInt::zero();
    let mut failure: Option<SchurError> = None;
    for_each_combination(&middle, y as usize, &mut |s| {
        if failure.is_some() {
            return;
        }
        let run = || -> Result<BigInt, SchurError> {
            let up_s = merged_union(up, s)?;
            let down_s = merged_union(down, s)?;
            let first = schur_principal(&lambda_of_set(&up_s)?, y as usize + u)?;
            let second = schur_principal(&lambda_of_set(&down_s)?, y as usize + d)?;
            Ok(first * second)
        };
        match run() {
            Ok(term) => lhs += term,
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    // Product form: hyperfactorial prefactor times the baseline values.
    let h = |n: i64| RawFrac::from_int(crate::formulas::hyperfactorial(n));
    let mut rhs = RawFrac::one();
    rhs.mul_assign(&h(y));
    rhs.mul_assign(&h(z));
    rhs.mul_assign(&h(a + b + 2 * y + z));
    rhs.div_assign(&h(y + z));
    rhs.div_assign(&h(a + b + 2 * y));
    rhs.mul_assign(&h(a + b + y));
    rhs.div_assign(&h(a + b + y + z));
    rhs.mul_assign(&h(a + y));
    rhs.mul_assign(&h(b + y));
    rhs.div_assign(&h(a));
    rhs.div_assign(&h(b));
    rhs.mul_assign(&h(d as i64));
    rhs.mul_assign(&h(u as i64));
    rhs.div_assign(&h(d as i64 + y));
    rhs.div_assign(&h(u as i64 + y));
    rhs.mul_assign(&RawFrac::from_int(schur_principal(&lambda_of_set(up)?, u)?));
    rhs.mul_assign(&RawFrac::from_int(schur_principal(&lambda_of_set(down)?, d)?));

    // The region itself.
    let mut removed: Vec<(i64, Orientation)> =
        up.iter().map(|&p| (p, Orientation::Up)).collect();
    removed.extend(down.iter().map(|&p| (p, Orientation::Down)));
    let region = build_region(&RegionParams::F { y, z, removed })
        .map_err(|_| SchurError::BadGeometry { gap: y + z })?;
    let region_count = BigInt::from(count_tilings(&region));

    Ok(AxisIdentity { lhs, rhs: rhs.into_rational(), region_count })
}

/// Evaluate the subset-sum ratio at explicit points. The ground set `t`
/// lists the dent-position alphabet in increasing order; `up` and `down`
/// partition its first `a` and last `b` elements; the subset variable runs
/// over `width`-element subsets of the remaining middle elements. The
/// numerator evaluates the union Schur values in `width + n` and
/// `width + n + |down| - |up|` variables, the denominator the baseline
/// values in `n` and `n + |down| - |up|` variables; taking `n = |up|` and
/// `t = 1..=len` recovers the dented-axis identity's two sides.
pub fn explore_ratio(
    t: &[i64],
    up: &[i64],
    down: &[i64],
    width: i64,
    n: usize,
    xs: &[BigRational],
) -> Result<BigRational, SchurError> {
    if width < 0 {
        return Err(SchurError::Negative { name: "width", value: width });
    }
    check_set(t)?;
    check_set(up)?;
    check_set(down)?;
    let union = merged_union(up, down)?;
    if union.iter().any(|p| !t.contains(p)) {
        return Err(SchurError::BadGeometry { gap: 0 });
    }
    // The union must cover a prefix and a suffix of the ground set.
    let mut a = 0usize;
    while a < t.len() && union.contains(&t[a]) {
        a += 1;
    }
    let mut b = 0usize;
    while b < t.len() - a && union.contains(&t[t.len() - 1 - b]) {
        b += 1;
    }
    if a + b != union.len() {
        return Err(SchurError::BadGeometry { gap: (t.len() - a - b) as i64 });
    }
    let middle = &t[a..t.len() - b];
    if (width as usize) > middle.len() {
        return Err(SchurError::WindowTooSmall {
            width,
            window: middle.len() as i64,
        });
    }
    let u = up.len();
    let d = down.len();
    if n + d < u {
        return Err(SchurError::BadVariableCount { n, u, nd: n + d });
    }
    let nd = n + d - u;
    let w = width as usize;
    let needed = (w + n).max(w + nd);
    if xs.len() < needed {
        return Err(SchurError::NotEnoughPoints { needed, got: xs.len() });
    }

    let den = schur_at_points(&lambda_of_set(up)?, &xs[..n])?
        * schur_at_points(&lambda_of_set(down)?, &xs[..nd])?;
    if den.is_zero() {
        return Err(SchurError::ZeroDenominator);
    }
    let mut num = BigRational::zero();
    let mut failure: Option<SchurError> = None;
    for_each_combination(middle, w, &mut |s| {
        if failure.is_some() {
            return;
        }
        let run = || -> Result<BigRational, SchurError> {
            let up_s = merged_union(up, s)?;
            let down_s = merged_union(down, s)?;
            let first = schur_at_points(&lambda_of_set(&up_s)?, &xs[..w + n])?;
            let second = schur_at_points(&lambda_of_set(&down_s)?, &xs[..w + nd])?;
            Ok(first * second)
        };
        match run() {
            Ok(term) => num += term,
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ones(n: usize) -> Vec<BigRational> {
        vec![BigRational::one(); n]
    }

    #[test]
    fn lambda_of_set_frozen() {
        assert_eq!(lambda_of_set(&[1, 2]).unwrap(), vec![1, 1]);
        assert_eq!(lambda_of_set(&[1, 3]).unwrap(), vec![2, 1]);
        assert_eq!(lambda_of_set(&[2]).unwrap(), vec![2]);
        assert_eq!(lambda_of_set(&[]).unwrap(), Vec::<i64>::new());
        assert_eq!(lambda_of_set(&[2, 2]), Err(SchurError::BadSet));
        assert_eq!(lambda_of_set(&[3, 1]), Err(SchurError::BadSet));
        assert_eq!(lambda_of_set(&[0, 1]), Err(SchurError::BadSet));
    }

    #[test]
    fn principal_frozen_values() {
        assert_eq!(schur_principal(&[1], 2).unwrap(), BigInt::from(2));
        assert_eq!(schur_principal(&[], 5).unwrap(), BigInt::one());
        assert_eq!(schur_principal(&[2, 1], 3).unwrap(), BigInt::from(8));
        assert_eq!(schur_principal(&[1, 1, 1], 2).unwrap(), BigInt::zero());
        assert_eq!(schur_principal(&[3, 1, 2], 3), Err(SchurError::BadPartition));
        assert_eq!(schur_principal(&[2, -1], 3), Err(SchurError::BadPartition));
    }

    #[test]
    fn principal_matches_tableau_sum_at_ones() {
        // every partition with at most 4 parts and size at most 8
        let mut parts: Vec<Vec<i64>> = vec![vec![]];
        fn extend(prefix: Vec<i64>, remaining: i64, out: &mut Vec<Vec<i64>>) {
            let cap = prefix.last().copied().unwrap_or(8);
            for next in 1..=cap.min(remaining) {
                let mut p = prefix.clone();
                p.push(next);
                out.push(p.clone());
                if p.len() < 4 {
                    extend(p, remaining - next, out);
                }
            }
        }
        extend(vec![], 8, &mut parts);
        for lam in &parts {
            for n in 1..=4usize {
                let product = schur_principal(lam, n).unwrap();
                let tableaux = schur_at_points(lam, &ones(n)).unwrap();
                assert_eq!(
                    BigRational::from(product.clone()),
                    tableaux,
                    "lambda {lam:?}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn tableau_sum_frozen_values() {
        // s_(1) is x1 + x2
        let v = schur_at_points(&[1], &[rat(2, 1), rat(1, 3)]).unwrap();
        assert_eq!(v, rat(7, 3));
        // s_(1,1) is x1 x2
        let v = schur_at_points(&[1, 1], &[rat(1, 1), rat(2, 1)]).unwrap();
        assert_eq!(v, rat(2, 1));
        // empty partition evaluates to 1 even with no points
        let v = schur_at_points(&[], &[]).unwrap();
        assert_eq!(v, BigRational::one());
    }

    #[test]
    fn trapezoid_counts_are_principal_values() {
        // dent-difference product equals the tiling count of the trapezoid
        let cases: Vec<(i64, i64, Vec<i64>)> = vec![
            (2, 2, vec![1, 3]),
            (2, 2, vec![2, 4]),
            (3, 2, vec![1, 5]),
            (3, 3, vec![2, 3, 6]),
        ];
        for (m, n, dents) in cases {
            let region = build_region(&RegionParams::Trapezoid {
                m,
                n,
                dents: dents.clone(),
            })
            .unwrap();
            let count = BigInt::from(count_tilings(&region));
            let lam = lambda_of_set(&dents).unwrap();
            let value = schur_principal(&lam, n as usize).unwrap();
            assert_eq!(count, value, "T({m},{n}) dents {dents:?}");
        }
    }

    #[test]
    fn axis_identity_minimal_cases() {
        // one up dent on the left, one down dent on the right
        let check = verify_schur_identity(&[1], &[4], 1, 1).unwrap();
        assert!(check.holds(), "minimal mixed case: {check:?}");
        // width zero: single subset, prefactor collapses to 1
        let check = verify_schur_identity(&[1], &[2], 0, 0).unwrap();
        assert!(check.holds(), "contiguous case: {check:?}");
        // z = 0 forces the subset to be the whole window
        let check = verify_schur_identity(&[1], &[4], 2, 0).unwrap();
        assert!(check.holds(), "forced window: {check:?}");
        // mixed orientations inside both blocks
        let check = verify_schur_identity(&[1, 5], &[2, 6], 1, 1).unwrap();
        assert!(check.holds(), "mixed blocks: {check:?}");
    }

    #[test]
    fn axis_identity_rejects_bad_geometry() {
        assert_eq!(
            verify_schur_identity(&[1], &[1], 1, 1),
            Err(SchurError::OverlappingSets(1))
        );
        // positions 1 and 3 with an axis gap of 3 leave a hole, not a block
        assert!(matches!(
            verify_schur_identity(&[1], &[3], 1, 2),
            Err(SchurError::BadGeometry { .. })
        ));
        assert_eq!(
            verify_schur_identity(&[1], &[4], -1, 2),
            Err(SchurError::Negative { name: "y", value: -1 })
        );
    }

    #[test]
    fn ratio_at_ones_is_the_identity_prefactor() {
        // ground set 1..6, up {1,5}, down {2,6}: a = b = 2, middle {3,4}
        let t: Vec<i64> = (1..=6).collect();
        let value = explore_ratio(&t, &[1, 5], &[2, 6], 1, 2, &ones(8)).unwrap();
        let check = verify_schur_identity(&[1, 5], &[2, 6], 1, 1).unwrap();
        let base = schur_principal(&lambda_of_set(&[1, 5]).unwrap(), 2).unwrap()
            * schur_principal(&lambda_of_set(&[2, 6]).unwrap(), 2).unwrap();
        assert_eq!(value * BigRational::from(base), check.rhs);
    }

    #[test]
    fn ratio_degenerate_and_error_cases() {
        let t: Vec<i64> = (1..=4).collect();
        // width zero: numerator equals denominator
        let v = explore_ratio(&t, &[1], &[4], 0, 1, &ones(4)).unwrap();
        assert_eq!(v, BigRational::one());
        // all-zero points kill the baseline values
        let zeros = vec![BigRational::zero(); 4];
        assert_eq!(
            explore_ratio(&t, &[1], &[4], 1, 1, &zeros),
            Err(SchurError::ZeroDenominator)
        );
        // not enough points
        assert_eq!(
            explore_ratio(&t, &[1], &[4], 2, 1, &ones(2)),
            Err(SchurError::NotEnoughPoints { needed: 3, got: 2 })
        );
    }

    #[test]
    fn ratio_at_geometric_points_is_emitted_exactly() {
        // the explorer only reports values; it asserts no structure beyond
        // exactness, so freeze what the geometric-progression points give
        let t: Vec<i64> = (1..=4).collect();
        let xs: Vec<BigRational> = (0..4)
            .map(|i| {
                let mut p = BigRational::one();
                for _ in 0..i {
                    p *= rat(2, 1);
                }
                p
            })
            .collect();
        let v = explore_ratio(&t, &[1], &[4], 1, 1, &xs).unwrap();
        assert_eq!(v, rat(72, 1));
        let at_ones = explore_ratio(&t, &[1], &[4], 1, 1, &ones(4)).unwrap();
        assert_eq!(at_ones, rat(4, 1));

        // a longer axis with interleaved removals
        let t: Vec<i64> = (1..=6).collect();
        let up = [1i64, 5];
        let down = [2i64, 6];
        assert_eq!(
            explore_ratio(&t, &up, &down, 1, 2, &ones(8)).unwrap(),
            rat(6, 1)
        );
        for (q, expect) in [(2, 4480i64), (3, 284310)] {
            let xs: Vec<BigRational> = (0..8)
                .map(|i| {
                    let mut p = BigRational::one();
                    for _ in 0..i {
                        p *= rat(q, 1);
                    }
                    p
                })
                .collect();
            let v = explore_ratio(&t, &up, &down, 1, 2, &xs).unwrap();
            assert_eq!(v, rat(expect, 1), "geometric points with ratio {q}");
        }
    }
}
