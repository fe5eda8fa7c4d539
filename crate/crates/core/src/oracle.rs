//! Exact counting oracles built directly on region geometry:
//!
//! - a transfer-matrix sweep over rows with a bitmask frontier, running in
//!   `u128` first and falling back to big integers on overflow,
//! - an exhaustive backtracking enumerator used for cross-checks, censuses,
//!   and first-tiling extraction,
//! - Kuo condensation checking on arbitrary mark quadruples.
//!
//! The sweep processes rows bottom to top. Crossing a lattice line, the state
//! records which columns carry the lower halves of vertical lozenges; inside a
//! row, a left-to-right scan over the key order resolves every triangle into
//! a right-tilting pair, a left-tilting pair, or a vertical half. The number
//! of state bits per line is fixed by the region (the imbalance telescopes),
//! so dead branches can only drop states, never grow them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{
    boundary_cycles, remove_forced_lozenges, Lozenge, Region, Tiling, TriCoord, WeightScheme,
};
use crate::poly::QPolynomial;

// ---------------------------------------------------------------------------
// DP weights
// ---------------------------------------------------------------------------

/// Value type threaded through the row sweep. `add_shifted` performs
/// `self += src * q^exp` and reports `false` on overflow, which makes the
/// caller rerun the sweep with a wider type.
trait DpWeight: Clone {
    fn wzero() -> Self;
    fn wone() -> Self;
    fn add_shifted(&mut self, src: &Self, exp: i64) -> bool;
}

impl DpWeight for u128 {
    fn wzero() -> Self {
        0
    }
    fn wone() -> Self {
        1
    }
    fn add_shifted(&mut self, src: &Self, exp: i64) -> bool {
        debug_assert_eq!(exp, 0, "unweighted sweep saw a nonzero exponent");
        match self.checked_add(*src) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
}

impl DpWeight for BigUint {
    fn wzero() -> Self {
        BigUint::zero()
    }
    fn wone() -> Self {
        BigUint::one()
    }
    fn add_shifted(&mut self, src: &Self, exp: i64) -> bool {
        debug_assert_eq!(exp, 0, "unweighted sweep saw a nonzero exponent");
        *self += src;
        true
    }
}

/// Dense polynomial with `u128` coefficients; index = exponent. Covers every
/// region whose weights stay within 128 bits and whose exponents are
/// nonnegative, which is all of them in practice.
#[derive(Clone)]
struct DensePoly(Vec<u128>);

impl DpWeight for DensePoly {
    fn wzero() -> Self {
        DensePoly(Vec::new())
    }
    fn wone() -> Self {
        DensePoly(vec![1])
    }
    fn add_shifted(&mut self, src: &Self, exp: i64) -> bool {
        if src.0.is_empty() {
            return true;
        }
        if exp < 0 {
            return false;
        }
        let off = exp as usize;
        let need = off + src.0.len();
        if self.0.len() < need {
            self.0.resize(need, 0);
        }
        for (i, &c) in src.0.iter().enumerate() {
            match self.0[off + i].checked_add(c) {
                Some(v) => self.0[off + i] = v,
                None => return false,
            }
        }
        true
    }
}

impl DensePoly {
    fn into_qpoly(self) -> QPolynomial {
        let mut p = QPolynomial::zero();
        for (e, c) in self.0.into_iter().enumerate() {
            if c != 0 {
                p.add_term(e as i64, &BigInt::from(c));
            }
        }
        p
    }
}

/// Sparse polynomial with big coefficients: the total fallback.
#[derive(Clone)]
struct MapPoly(BTreeMap<i64, BigUint>);

impl DpWeight for MapPoly {
    fn wzero() -> Self {
        MapPoly(BTreeMap::new())
    }
    fn wone() -> Self {
        let mut m = BTreeMap::new();
        m.insert(0, BigUint::one());
        MapPoly(m)
    }
    fn add_shifted(&mut self, src: &Self, exp: i64) -> bool {
        for (e, c) in &src.0 {
            let entry = self.0.entry(e + exp).or_insert_with(<BigUint as num_traits::Zero>::zero);
            *entry += c;
        }
        true
    }
}

impl MapPoly {
    fn into_qpoly(self) -> QPolynomial {
        let mut p = QPolynomial::zero();
        for (e, c) in self.0 {
            p.add_term(e, &BigInt::from(c));
        }
        p
    }
}

// ---------------------------------------------------------------------------
// Row sweep
// ---------------------------------------------------------------------------

struct RowItem {
    key: i64,
    up: bool,
    /// For up-triangles: state bit of the line below this row.
    below_bit: Option<u32>,
    /// For down-triangles: state bit of the line above this row.
    above_bit: Option<u32>,
}

struct RowPlan {
    /// Height exponent of in-row lozenges: row + 1 - baseline.
    h: i64,
    items: Vec<RowItem>,
}

fn build_plans(region: &Region) -> Vec<RowPlan> {
    let rows = region.rows();
    let (rmin, rmax) = match region.row_range() {
        Some(r) => r,
        None => return Vec::new(),
    };
    let empty = Vec::new();
    let mut plans = Vec::new();
    for r in rmin..=rmax {
        let cur = rows.get(&r).unwrap_or(&empty);
        let prev = if r > rmin { rows.get(&(r - 1)).unwrap_or(&empty) } else { &empty };
        let next = rows.get(&(r + 1)).unwrap_or(&empty);
        let prev_downs: BTreeSet<i64> = prev.iter().filter(|t| !t.up).map(|t| t.col).collect();
        let next_ups: BTreeSet<i64> = next.iter().filter(|t| t.up).map(|t| t.col).collect();
        let below: Vec<i64> = cur
            .iter()
            .filter(|t| t.up && prev_downs.contains(&t.col))
            .map(|t| t.col)
            .collect();
        let above: Vec<i64> = cur
            .iter()
            .filter(|t| !t.up && next_ups.contains(&t.col))
            .map(|t| t.col)
            .collect();
        assert!(
            below.len() <= 64 && above.len() <= 64,
            "frontier width exceeds 64 columns; region too wide for the sweep"
        );
        let bidx: HashMap<i64, u32> =
            below.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let aidx: HashMap<i64, u32> =
            above.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let items = cur
            .iter()
            .map(|t| RowItem {
                key: t.key(),
                up: t.up,
                below_bit: if t.up { bidx.get(&t.col).copied() } else { None },
                above_bit: if !t.up { aidx.get(&t.col).copied() } else { None },
            })
            .collect();
        plans.push(RowPlan { h: r + 1 - region.baseline_row, items });
    }
    plans
}

/// Resolve one row against the incoming line state `bmask`, accumulating
/// outgoing states into `out`. Returns `false` only on arithmetic overflow.
#[allow(clippy::too_many_arguments)]
fn emit<W: DpWeight>(
    items: &[RowItem],
    i: usize,
    bmask: u64,
    pending: Option<i64>,
    amask: u64,
    nr: u32,
    nl: u32,
    h: i64,
    scheme: WeightScheme,
    val: &W,
    out: &mut HashMap<u64, W>,
) -> bool {
    if i == items.len() {
        if pending.is_some() {
            return true; // dead branch: an unmatched half remains
        }
        let exp = match scheme {
            WeightScheme::Unweighted => 0,
            WeightScheme::Wt1 => h * nr as i64,
            WeightScheme::Wt2 => h * nl as i64,
        };
        let entry = out.entry(amask).or_insert_with(W::wzero);
        return entry.add_shifted(val, exp);
    }
    let it = &items[i];
    if it.up {
        if let Some(bit) = it.below_bit {
            if bmask & (1 << bit) != 0 {
                // Taken from below by a vertical lozenge. A pending
                // down-triangle can no longer find its partner.
                if pending.is_some() {
                    return true;
                }
                return emit(items, i + 1, bmask, None, amask, nr, nl, h, scheme, val, out);
            }
        }
        match pending {
            Some(k) if it.key == k + 1 => {
                // down-then-up: left-tilting lozenge
                emit(items, i + 1, bmask, None, amask, nr, nl + 1, h, scheme, val, out)
            }
            Some(_) => true,
            None => emit(items, i + 1, bmask, Some(it.key), amask, nr, nl, h, scheme, val, out),
        }
    } else {
        match pending {
            Some(k) if it.key == k + 1 => {
                // up-then-down: right-tilting lozenge
                emit(items, i + 1, bmask, None, amask, nr + 1, nl, h, scheme, val, out)
            }
            Some(_) => true,
            None => {
                if let Some(bit) = it.above_bit {
                    // Hand this down-triangle to the row above (vertical).
                    if !emit(
                        items,
                        i + 1,
                        bmask,
                        None,
                        amask | (1 << bit),
                        nr,
                        nl,
                        h,
                        scheme,
                        val,
                        out,
                    ) {
                        return false;
                    }
                }
                emit(items, i + 1, bmask, Some(it.key), amask, nr, nl, h, scheme, val, out)
            }
        }
    }
}

/// Run the sweep; `None` means overflow in `W`.
fn run_dp<W: DpWeight>(region: &Region, scheme: WeightScheme) -> Option<W> {
    if region.is_empty() {
        return Some(W::wone());
    }
    let plans = build_plans(region);
    let mut states: HashMap<u64, W> = HashMap::new();
    states.insert(0, W::wone());
    for plan in &plans {
        let mut next: HashMap<u64, W> = HashMap::new();
        for (bmask, val) in &states {
            if !emit(
                &plan.items,
                0,
                *bmask,
                None,
                0,
                0,
                0,
                plan.h,
                scheme,
                val,
                &mut next,
            ) {
                return None;
            }
        }
        if next.is_empty() {
            return Some(W::wzero());
        }
        states = next;
    }
    debug_assert!(states.len() == 1 && states.contains_key(&0));
    Some(states.remove(&0).unwrap_or_else(W::wzero))
}

// ---------------------------------------------------------------------------
// Public counting API
// ---------------------------------------------------------------------------

/// Number of lozenge tilings of the region, exactly.
pub fn count_tilings(region: &Region) -> BigUint {
    let (reduced, _) = remove_forced_lozenges(region, WeightScheme::Unweighted);
    match run_dp::<u128>(&reduced, WeightScheme::Unweighted) {
        Some(v) => BigUint::from(v),
        None => run_dp::<BigUint>(&reduced, WeightScheme::Unweighted)
            .expect("big-integer sweep cannot overflow"),
    }
}

/// Tiling generating function of the region under the given weight scheme:
/// the sum of `q^(total height exponent)` over all tilings. With
/// `WeightScheme::Unweighted` this is the constant `count_tilings`.
pub fn weighted_count(region: &Region, scheme: WeightScheme) -> QPolynomial {
    let (reduced, forced) = remove_forced_lozenges(region, scheme);
    let inner = match run_dp::<DensePoly>(&reduced, scheme) {
        Some(p) => p.into_qpoly(),
        None => run_dp::<MapPoly>(&reduced, scheme)
            .expect("sparse big-integer sweep cannot overflow")
            .into_qpoly(),
    };
    inner.mul(&forced)
}

/// Crude upper bound on the degree of `weighted_count`: the sum over rows of
/// the largest conceivable in-row exponent. Useful as a sanity cap; the exact
/// degree comes from the polynomial itself.
pub fn weighted_degree_bound(region: &Region, scheme: WeightScheme) -> i64 {
    if matches!(scheme, WeightScheme::Unweighted) {
        return 0;
    }
    let mut bound = 0;
    for t in region.triangles() {
        if t.up {
            let h = t.row + 1 - region.baseline_row;
            if h > 0 {
                bound += h;
            }
        }
    }
    bound
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("region has {count} tilings, more than the cap {cap}")]
    TooManyTilings { count: BigUint, cap: u64 },
}

/// Visit every tiling in a fixed deterministic order. The callback returns
/// `false` to stop early; `for_each_tiling` returns `false` if stopped.
///
/// Scan order is by (row, in-row key). When the first uncovered triangle is
/// up-pointing, all partners but its right neighbour precede it, so the only
/// choice points are down-pointing triangles, which try their left-tilting
/// pairing before the vertical one.
pub fn for_each_tiling(region: &Region, f: &mut dyn FnMut(&[Lozenge]) -> bool) -> bool {
    let tris: Vec<TriCoord> = {
        let mut v: Vec<TriCoord> = region.triangles().copied().collect();
        v.sort_by_key(|t| (t.row, t.key()));
        v
    };
    let index: HashMap<TriCoord, usize> =
        tris.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut covered = vec![false; tris.len()];
    let mut stack: Vec<Lozenge> = Vec::new();

    fn rec(
        tris: &[TriCoord],
        index: &HashMap<TriCoord, usize>,
        covered: &mut [bool],
        stack: &mut Vec<Lozenge>,
        mut pos: usize,
        f: &mut dyn FnMut(&[Lozenge]) -> bool,
    ) -> bool {
        while pos < tris.len() && covered[pos] {
            pos += 1;
        }
        if pos == tris.len() {
            return f(stack);
        }
        let t = tris[pos];
        let candidates: &[TriCoord] = &if t.up {
            [TriCoord::down_tri(t.row, t.col)]
        } else {
            [TriCoord::up_tri(t.row, t.col + 1)]
        };
        let try_partner = |p: TriCoord,
                               covered: &mut [bool],
                               stack: &mut Vec<Lozenge>,
                               f: &mut dyn FnMut(&[Lozenge]) -> bool|
         -> bool {
            let pi = match index.get(&p) {
                Some(&pi) if !covered[pi] => pi,
                _ => return true,
            };
            covered[pos] = true;
            covered[pi] = true;
            stack.push(Lozenge::from_pair(t, p).expect("edge-adjacent pair"));
            let keep_going = rec(tris, index, covered, stack, pos + 1, f);
            stack.pop();
            covered[pos] = false;
            covered[pi] = false;
            keep_going
        };
        for &p in candidates {
            if !try_partner(p, covered, stack, f) {
                return false;
            }
        }
        if !t.up {
            // vertical pairing with the row above
            if !try_partner(TriCoord::up_tri(t.row + 1, t.col), covered, stack, f) {
                return false;
            }
        }
        true
    }

    rec(&tris, &index, &mut covered, &mut stack, 0, f)
}

/// All tilings of the region, failing when the exact count exceeds `cap`
/// (default 1_000_000 in the CLI). Each tiling is sorted by anchor.
pub fn enumerate_tilings(region: &Region, cap: u64) -> Result<Vec<Tiling>, OracleError> {
    let count = count_tilings(region);
    if count > BigUint::from(cap) {
        return Err(OracleError::TooManyTilings { count, cap });
    }
    let mut out = Vec::new();
    for_each_tiling(region, &mut |loz| {
        let mut t = loz.to_vec();
        t.sort_unstable();
        out.push(t);
        true
    });
    Ok(out)
}

/// The first tiling in enumeration order, if the region is tileable.
pub fn extract_first_tiling(region: &Region) -> Option<Tiling> {
    let mut found: Option<Tiling> = None;
    for_each_tiling(region, &mut |loz| {
        let mut t = loz.to_vec();
        t.sort_unstable();
        found = Some(t);
        false
    });
    found
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub right: usize,
    pub left: usize,
    pub vertical: usize,
}

pub fn orientation_census(tiling: &[Lozenge]) -> Census {
    use crate::lattice::LozengeKind::*;
    let mut c = Census { right: 0, left: 0, vertical: 0 };
    for l in tiling {
        match l.kind {
            Right => c.right += 1,
            Left => c.left += 1,
            Vertical => c.vertical += 1,
        }
    }
    c
}

/// Total height exponent of a tiling under a scheme (the exponent its `q`
/// monomial would carry in `weighted_count`).
pub fn tiling_weight_exponent(tiling: &[Lozenge], scheme: WeightScheme, baseline_row: i64) -> i64 {
    tiling.iter().map(|l| l.weight_exponent(scheme, baseline_row)).sum()
}

// ---------------------------------------------------------------------------
// Kuo condensation
// ---------------------------------------------------------------------------

/// The three condensation identities, on four marked boundary triangles
/// u, v, w, s (in this cyclic order along a common boundary face):
///
/// - `Alternating`: classes U/D/U/D around the face, balanced region;
///   M(G) M(G-uvws) = M(G-uv) M(G-ws) + M(G-us) M(G-vw).
/// - `Paired`: classes U/U/D/D, balanced region;
///   M(G-us) M(G-vw) = M(G) M(G-uvws) + M(G-uw) M(G-vs).
/// - `Unbalanced`: classes U/U/U/D with one extra up-triangle (or the mirror
///   with downs in the majority);
///   M(G-v) M(G-uws) = M(G-u) M(G-vws) + M(G-w) M(G-uvs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KuoVariant {
    Alternating,
    Paired,
    Unbalanced,
}

#[derive(Debug, Error)]
pub enum KuoError {
    #[error("marked triangle {0:?} is not in the region")]
    NotInRegion(TriCoord),
    #[error("marked triangles must be pairwise distinct")]
    DuplicateMark,
    #[error("mark orientations do not fit the {0:?} pattern")]
    WrongClasses(KuoVariant),
    #[error("region must be balanced for this variant, got {ups} up / {downs} down")]
    NotBalanced { ups: usize, downs: usize },
    #[error("unbalanced variant needs a majority class exceeding the minority by exactly one ({ups} up / {downs} down)")]
    BadImbalance { ups: usize, downs: usize },
    #[error("marks do not all lie on one boundary face")]
    NotOnCommonFace,
    #[error("marks are not in cyclic order along their boundary face")]
    NotCyclic,
}

#[derive(Clone, Debug, Serialize)]
pub struct KuoReport {
    pub variant: KuoVariant,
    pub lhs: QPolynomial,
    pub rhs: QPolynomial,
    pub pass: bool,
}

/// Check one Kuo condensation identity on the region with the four marks.
/// `scheme` selects the weight; the unweighted statement is the constant
/// case. Mark order may traverse the face in either direction.
pub fn kuo_check(
    region: &Region,
    marks: &[TriCoord; 4],
    variant: KuoVariant,
    scheme: WeightScheme,
) -> Result<KuoReport, KuoError> {
    for m in marks {
        if !region.contains(m) {
            return Err(KuoError::NotInRegion(*m));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if marks[i] == marks[j] {
                return Err(KuoError::DuplicateMark);
            }
        }
    }
    let [u, v, w, s] = *marks;
    let (ups, downs) = region.orientation_counts();
    match variant {
        KuoVariant::Alternating => {
            if !(u.up == w.up && v.up == s.up && u.up != v.up) {
                return Err(KuoError::WrongClasses(variant));
            }
            if ups != downs {
                return Err(KuoError::NotBalanced { ups, downs });
            }
        }
        KuoVariant::Paired => {
            if !(u.up == v.up && w.up == s.up && u.up != w.up) {
                return Err(KuoError::WrongClasses(variant));
            }
            if ups != downs {
                return Err(KuoError::NotBalanced { ups, downs });
            }
        }
        KuoVariant::Unbalanced => {
            if !(u.up == v.up && v.up == w.up && s.up != u.up) {
                return Err(KuoError::WrongClasses(variant));
            }
            let (major, minor) = if u.up { (ups, downs) } else { (downs, ups) };
            if major != minor + 1 {
                return Err(KuoError::BadImbalance { ups, downs });
            }
        }
    }
    // All four marks must lie on one boundary face, in cyclic order up to
    // rotation and reflection (each identity is invariant under both).
    let cycles = boundary_cycles(region);
    let mut on_face = false;
    for cycle in &cycles {
        let pos = |t: &TriCoord| cycle.triangles.iter().position(|x| x == t);
        let (pu, pv, pw, ps) = match (pos(&u), pos(&v), pos(&w), pos(&s)) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => continue,
        };
        on_face = true;
        let n = cycle.triangles.len();
        let off = |p: usize| (p + n - pu) % n;
        let (ov, ow, os) = (off(pv), off(pw), off(ps));
        if (ov < ow && ow < os) || (os < ow && ow < ov) {
            return evaluate_kuo(region, marks, variant, scheme);
        }
    }
    if on_face {
        Err(KuoError::NotCyclic)
    } else {
        Err(KuoError::NotOnCommonFace)
    }
}

fn evaluate_kuo(
    region: &Region,
    marks: &[TriCoord; 4],
    variant: KuoVariant,
    scheme: WeightScheme,
) -> Result<KuoReport, KuoError> {
    let [u, v, w, s] = *marks;
    let m = |removed: &[TriCoord]| -> QPolynomial {
        let sub = region.without(removed).expect("marks are in the region");
        weighted_count(&sub, scheme)
    };
    let (lhs, rhs) = match variant {
        KuoVariant::Alternating => (
            m(&[]).mul(&m(&[u, v, w, s])),
            m(&[u, v]).mul(&m(&[w, s])).add(&m(&[u, s]).mul(&m(&[v, w]))),
        ),
        KuoVariant::Paired => (
            m(&[u, s]).mul(&m(&[v, w])),
            m(&[]).mul(&m(&[u, v, w, s])).add(&m(&[u, w]).mul(&m(&[v, s]))),
        ),
        KuoVariant::Unbalanced => (
            m(&[v]).mul(&m(&[u, w, s])),
            m(&[u]).mul(&m(&[v, w, s])).add(&m(&[w]).mul(&m(&[u, v, s]))),
        ),
    };
    let pass = lhs == rhs;
    Ok(KuoReport { variant, lhs, rhs, pass })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
