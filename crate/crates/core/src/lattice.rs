//! Triangular-lattice regions: coordinates, builders for every region family,
//! forced-lozenge reduction, region splitting, and the boundary walk.
//!
//! Coordinate conventions used throughout the crate:
//!
//! - Lattice vertices carry skew coordinates `(p, q)`; the Cartesian position
//!   is `x = p + q/2`, `y = q * sqrt(3)/2`, so `q` increases upward.
//! - The up-pointing triangle `U(r, c)` has vertices `(c, r)`, `(c+1, r)`,
//!   `(c, r+1)`; the down-pointing triangle `D(r, c)` has vertices `(c, r+1)`,
//!   `(c+1, r+1)`, `(c+1, r)`. Both live in row `r` (between lattice lines
//!   `q = r` and `q = r + 1`).
//! - `U(r, c)` is edge-adjacent to `D(r, c-1)` on its left, `D(r, c)` on its
//!   right, and `D(r-1, c)` below.
//! - A lozenge is a pair of edge-adjacent triangles: `U(r,c) + D(r,c)` tilts
//!   right, `U(r,c) + D(r,c-1)` tilts left, `U(r,c) + D(r-1,c)` is vertical.
//! - Within a row, triangles are ordered by the key `2c` for `U(r, c)` and
//!   `2c + 1` for `D(r, c)`; key-consecutive triangles are edge-adjacent.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

// ---------------------------------------------------------------------------
// Basic types
// ---------------------------------------------------------------------------

/// One unit triangle of the lattice.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct TriCoord {
    pub row: i64,
    pub col: i64,
    pub up: bool,
}

impl TriCoord {
    pub fn up_tri(row: i64, col: i64) -> Self {
        TriCoord { row, col, up: true }
    }

    pub fn down_tri(row: i64, col: i64) -> Self {
        TriCoord { row, col, up: false }
    }

    /// In-row scan key; key-consecutive triangles share an edge.
    pub fn key(&self) -> i64 {
        2 * self.col + if self.up { 0 } else { 1 }
    }

    /// The three edge-neighbours (not all need exist in a given region).
    pub fn neighbours(&self) -> [TriCoord; 3] {
        if self.up {
            [
                TriCoord::down_tri(self.row, self.col - 1),
                TriCoord::down_tri(self.row, self.col),
                TriCoord::down_tri(self.row - 1, self.col),
            ]
        } else {
            [
                TriCoord::up_tri(self.row, self.col),
                TriCoord::up_tri(self.row, self.col + 1),
                TriCoord::up_tri(self.row + 1, self.col),
            ]
        }
    }

    /// Vertices in counterclockwise order (interior on the left of each edge).
    pub fn vertices(&self) -> [(i64, i64); 3] {
        let (r, c) = (self.row, self.col);
        if self.up {
            [(c, r), (c + 1, r), (c, r + 1)]
        } else {
            [(c + 1, r), (c + 1, r + 1), (c, r + 1)]
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// The three lozenge directions. `Right` and `Left` describe the tilt of the
/// long axis; `Vertical` lozenges stand on a horizontal lattice line.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LozengeKind {
    Right,
    Left,
    Vertical,
}

/// A lozenge, anchored at its up-pointing triangle `U(row, col)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Lozenge {
    pub row: i64,
    pub col: i64,
    pub kind: LozengeKind,
}

impl Lozenge {
    pub fn up_triangle(&self) -> TriCoord {
        TriCoord::up_tri(self.row, self.col)
    }

    pub fn down_triangle(&self) -> TriCoord {
        match self.kind {
            LozengeKind::Right => TriCoord::down_tri(self.row, self.col),
            LozengeKind::Left => TriCoord::down_tri(self.row, self.col - 1),
            LozengeKind::Vertical => TriCoord::down_tri(self.row - 1, self.col),
        }
    }

    /// Pair two edge-adjacent triangles into a lozenge.
    pub fn from_pair(a: TriCoord, b: TriCoord) -> Option<Lozenge> {
        let (u, d) = match (a.up, b.up) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => return None,
        };
        let kind = if d.row == u.row && d.col == u.col {
            LozengeKind::Right
        } else if d.row == u.row && d.col == u.col - 1 {
            LozengeKind::Left
        } else if d.row == u.row - 1 && d.col == u.col {
            LozengeKind::Vertical
        } else {
            return None;
        };
        Some(Lozenge { row: u.row, col: u.col, kind })
    }

    /// Height-weight exponent of this lozenge under the given scheme: a
    /// right-tilting lozenge in row `r` weighs `q^(r + 1 - baseline)` under
    /// `Wt1`, a left-tilting one the same under `Wt2`; everything else is 1.
    pub fn weight_exponent(&self, scheme: WeightScheme, baseline_row: i64) -> i64 {
        let counted = match (scheme, self.kind) {
            (WeightScheme::Wt1, LozengeKind::Right) => true,
            (WeightScheme::Wt2, LozengeKind::Left) => true,
            _ => false,
        };
        if counted {
            self.row + 1 - baseline_row
        } else {
            0
        }
    }
}

pub type Tiling = Vec<Lozenge>;

/// Which lozenges carry the height weight `q^h`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Every lozenge weighs 1.
    Unweighted,
    /// Right-tilting lozenges weigh `q^h`.
    Wt1,
    /// Left-tilting lozenges weigh `q^h`.
    Wt2,
}

// ---------------------------------------------------------------------------
// Region parameters
// ---------------------------------------------------------------------------

/// Parameter record for every supported region family. The JSON encoding is
/// tagged by `family`, e.g.
/// `{"family":"P","x":1,"y":0,"z":2,"t":1,"a":[2,1],"b":[1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum RegionParams {
    /// Hexagon with a two-sided fern intrusion; western vertex of the fern
    /// axis sits `x` rows above the west corner level, both ferns start with
    /// an up-lobe.
    P {
        x: i64,
        y: i64,
        z: i64,
        t: i64,
        #[serde(default)]
        a: Vec<i64>,
        #[serde(default)]
        b: Vec<i64>,
    },
    /// Like `P`, but the right fern starts with a down-lobe.
    Q {
        x: i64,
        y: i64,
        z: i64,
        t: i64,
        #[serde(default)]
        a: Vec<i64>,
        #[serde(default)]
        b: Vec<i64>,
    },
    /// Hexagon with a single fern attached to the western corner side.
    R {
        x: i64,
        y: i64,
        z: i64,
        t: i64,
        #[serde(default)]
        a: Vec<i64>,
    },
    /// Symmetric hexagon with ferns touching both the western and eastern
    /// corners; lobes `a0` and `b0` sit at the corners, `a0` pointing down.
    /// `variant` 1 has `b0` pointing down, variant 2 up.
    D {
        variant: u8,
        y: i64,
        z: i64,
        a: Vec<i64>,
        b: Vec<i64>,
    },
    /// Hexagon with unit triangles removed along its horizontal symmetry
    /// axis: a left block and a right block separated by `y + z` untouched
    /// unit segments. `removed` lists (position, orientation) pairs with
    /// 1-based positions counted from the western corner.
    F {
        y: i64,
        z: i64,
        removed: Vec<(i64, Orientation)>,
    },
    /// Plain hexagon with side lengths `a, b, c, a, b, c` clockwise from the
    /// northwest side.
    Hex { a: i64, b: i64, c: i64 },
    /// Dented semihexagon determined by alternating blocks along its base,
    /// the first block removed.
    Semihex { blocks: Vec<i64> },
    /// Trapezoid of top side `m` and slanted height `n` with `n` up-pointing
    /// dents removed from the bottom (1-based positions).
    Trapezoid { m: i64, n: i64, dents: Vec<i64> },
    /// Explicit triangle list.
    Raw {
        triangles: Vec<TriCoord>,
        baseline_row: i64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RegionFamily {
    P,
    Q,
    R,
    D,
    F,
    Hex,
    Semihex,
    Trapezoid,
    Raw,
}

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("parameter {name} must be nonnegative, got {value}")]
    NegativeParameter { name: &'static str, value: i64 },
    #[error("variant must be 1 or 2, got {0}")]
    BadVariant(u8),
    #[error("fern lobes do not fit inside the hexagon (lobe triangle {0:?} falls outside)")]
    FernOverflow(TriCoord),
    #[error("dent positions must be distinct, increasing, and inside 1..={max}: {positions:?}")]
    BadDents { max: i64, positions: Vec<i64> },
    #[error("expected exactly {expected} dent positions, got {got}")]
    WrongDentCount { expected: i64, got: usize },
    #[error(
        "removed positions must form a left block and a right block separated by exactly {gap} untouched segments: {positions:?}"
    )]
    BadRemovedBlocks { gap: i64, positions: Vec<i64> },
    #[error("removed position {0} is repeated or out of range")]
    BadRemovedPosition(i64),
    #[error("D-region lobe lists must both be nonempty (lobes may have size 0)")]
    EmptyFern,
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

/// A finite set of unit triangles plus bookkeeping: the family and parameters
/// it was built from and the lattice line its height weights are measured
/// against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    triangles: BTreeSet<TriCoord>,
    pub family: RegionFamily,
    pub params: Option<RegionParams>,
    pub baseline_row: i64,
}

impl Region {
    pub fn from_triangles<I: IntoIterator<Item = TriCoord>>(
        triangles: I,
        family: RegionFamily,
        params: Option<RegionParams>,
        baseline_row: i64,
    ) -> Self {
        Region {
            triangles: triangles.into_iter().collect(),
            family,
            params,
            baseline_row,
        }
    }

    pub fn triangles(&self) -> impl Iterator<Item = &TriCoord> {
        self.triangles.iter()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn contains(&self, t: &TriCoord) -> bool {
        self.triangles.contains(t)
    }

    /// (up-pointing count, down-pointing count).
    pub fn orientation_counts(&self) -> (usize, usize) {
        let ups = self.triangles.iter().filter(|t| t.up).count();
        (ups, self.triangles.len() - ups)
    }

    pub fn is_balanced(&self) -> bool {
        let (u, d) = self.orientation_counts();
        u == d
    }

    pub fn row_range(&self) -> Option<(i64, i64)> {
        let lo = self.triangles.iter().map(|t| t.row).min()?;
        let hi = self.triangles.iter().map(|t| t.row).max()?;
        Some((lo, hi))
    }

    /// The region with the given triangles removed. Keeps the originating
    /// family, parameters, and baseline.
    pub fn without(&self, remove: &[TriCoord]) -> Result<Region, RegionError> {
        let mut triangles = self.triangles.clone();
        for t in remove {
            if !triangles.remove(t) {
                return Err(RegionError::FernOverflow(*t));
            }
        }
        Ok(Region {
            triangles,
            family: self.family,
            params: self.params.clone(),
            baseline_row: self.baseline_row,
        })
    }

    /// Triangles of one row, keyed and sorted for the in-row scan.
    pub(crate) fn rows(&self) -> BTreeMap<i64, Vec<TriCoord>> {
        let mut rows: BTreeMap<i64, Vec<TriCoord>> = BTreeMap::new();
        for t in &self.triangles {
            rows.entry(t.row).or_default().push(*t);
        }
        for list in rows.values_mut() {
            list.sort_by_key(|t| t.key());
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// Hexagon core
// ---------------------------------------------------------------------------

/// Fill the hexagon with side lengths `s[0..6]`, read clockwise from the
/// northwest side, with its south corner at the lattice origin. Sides may be
/// zero (the hexagon degenerates gracefully). Requires the closure conditions
/// `s1 + s2 = s4 + s5` and `s2 + s3 = s5 + s6`.
fn hexagon_triangles(s: [i64; 6]) -> BTreeSet<TriCoord> {
    debug_assert!(s.iter().all(|&x| x >= 0), "negative hexagon side: {s:?}");
    debug_assert!(
        s[0] + s[1] == s[3] + s[4] && s[1] + s[2] == s[4] + s[5],
        "hexagon sides do not close up: {s:?}"
    );
    let (s1, s4, s5, s6) = (s[0], s[3], s[4], s[5]);
    let mut set = BTreeSet::new();
    for r in 0..(s1 + s6) {
        let (cl_u, cl_d) = if r < s6 { (-r, -r - 1) } else { (-s6, -s6) };
        let (cr_u, cr_d) = if r < s4 {
            (s5 - 1, s5 - 1)
        } else {
            (s4 + s5 - r - 1, s4 + s5 - r - 2)
        };
        for c in cl_u..=cr_u {
            set.insert(TriCoord::up_tri(r, c));
        }
        for c in cl_d..=cr_d {
            set.insert(TriCoord::down_tri(r, c));
        }
    }
    set
}

/// Leftmost interior column at height `h` of the hexagon (the `p`-coordinate
/// of its western boundary on the line `q = h`).
fn hex_left_p(s: [i64; 6], h: i64) -> i64 {
    if h <= s[5] {
        -h
    } else {
        -s[5]
    }
}

/// Rightmost interior column at height `h` (the `p`-coordinate of the eastern
/// boundary on the line `q = h`).
fn hex_right_p(s: [i64; 6], h: i64) -> i64 {
    if h <= s[3] {
        s[4]
    } else {
        s[3] + s[4] - h
    }
}

/// Triangles of one fern lobe: an equilateral triangle of side `size` whose
/// horizontal edge lies on the line `q = h`, spanning columns
/// `p0..p0 + size`, pointing up or down.
fn lobe_triangles(p0: i64, h: i64, size: i64, orient: Orientation) -> Vec<TriCoord> {
    let mut out = Vec::new();
    match orient {
        Orientation::Up => {
            for rr in 0..size {
                for c in p0..p0 + size - rr {
                    out.push(TriCoord::up_tri(h + rr, c));
                }
                for c in p0..p0 + size - 1 - rr {
                    out.push(TriCoord::down_tri(h + rr, c));
                }
            }
        }
        Orientation::Down => {
            for rr in 0..size {
                for c in p0 + rr..p0 + size {
                    out.push(TriCoord::down_tri(h - 1 - rr, c));
                }
                for c in p0 + rr + 1..p0 + size {
                    out.push(TriCoord::up_tri(h - 1 - rr, c));
                }
            }
        }
    }
    out
}

fn remove_lobe(
    set: &mut BTreeSet<TriCoord>,
    p0: i64,
    h: i64,
    size: i64,
    orient: Orientation,
) -> Result<(), RegionError> {
    for t in lobe_triangles(p0, h, size, orient) {
        if !set.remove(&t) {
            return Err(RegionError::FernOverflow(t));
        }
    }
    Ok(())
}

/// Remove a fern growing rightward from column `start` on the axis line
/// `q = h`. `orient(i)` gives the orientation of the 0-indexed `i`-th lobe.
fn remove_fern_rightward(
    set: &mut BTreeSet<TriCoord>,
    start: i64,
    h: i64,
    lobes: &[i64],
    orient: impl Fn(usize) -> Orientation,
) -> Result<(), RegionError> {
    let mut p = start;
    for (i, &len) in lobes.iter().enumerate() {
        remove_lobe(set, p, h, len, orient(i))?;
        p += len;
    }
    Ok(())
}

/// Remove a fern growing leftward from column `start`; lobe `i` occupies the
/// `len` columns immediately left of the previous one.
fn remove_fern_leftward(
    set: &mut BTreeSet<TriCoord>,
    start: i64,
    h: i64,
    lobes: &[i64],
    orient: impl Fn(usize) -> Orientation,
) -> Result<(), RegionError> {
    let mut p = start;
    for (i, &len) in lobes.iter().enumerate() {
        remove_lobe(set, p - len, h, len, orient(i))?;
        p -= len;
    }
    Ok(())
}

fn check_nonneg(name: &'static str, value: i64) -> Result<(), RegionError> {
    if value < 0 {
        Err(RegionError::NegativeParameter { name, value })
    } else {
        Ok(())
    }
}

fn check_list_nonneg(name: &'static str, list: &[i64]) -> Result<(), RegionError> {
    for &v in list {
        check_nonneg(name, v)?;
    }
    Ok(())
}

/// Sums of the odd-position entries (1-based: a1 + a3 + ...), the
/// even-position entries, and everything.
pub(crate) fn odd_even_sums(list: &[i64]) -> (i64, i64, i64) {
    let odd: i64 = list.iter().step_by(2).sum();
    let even: i64 = list.iter().skip(1).step_by(2).sum();
    (odd, even, odd + even)
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Build the region described by `params`. The result is positioned with the
/// south corner of its bounding hexagon at the origin, and its baseline row
/// set to 0 (`Raw` regions keep their stated baseline).
pub fn build_region(params: &RegionParams) -> Result<Region, RegionError> {
    match params {
        RegionParams::P { x, y, z, t, a, b } => {
            build_two_fern(*x, *y, *z, *t, a, b, false, params)
        }
        RegionParams::Q { x, y, z, t, a, b } => {
            build_two_fern(*x, *y, *z, *t, a, b, true, params)
        }
        RegionParams::R { x, y, z, t, a } => build_single_fern(*x, *y, *z, *t, a, params),
        RegionParams::D { variant, y, z, a, b } => {
            build_double_corner(*variant, *y, *z, a, b, params)
        }
        RegionParams::F { y, z, removed } => build_axis_dented(*y, *z, removed, params),
        RegionParams::Hex { a, b, c } => {
            check_nonneg("a", *a)?;
            check_nonneg("b", *b)?;
            check_nonneg("c", *c)?;
            let set = hexagon_triangles([*a, *b, *c, *a, *b, *c]);
            Ok(Region::from_triangles(set, RegionFamily::Hex, Some(params.clone()), 0))
        }
        RegionParams::Semihex { blocks } => build_semihex(blocks, params),
        RegionParams::Trapezoid { m, n, dents } => build_trapezoid(*m, *n, dents, params),
        RegionParams::Raw { triangles, baseline_row } => Ok(Region::from_triangles(
            triangles.iter().copied(),
            RegionFamily::Raw,
            Some(params.clone()),
            *baseline_row,
        )),
    }
}

fn build_two_fern(
    x: i64,
    y: i64,
    z: i64,
    t: i64,
    a: &[i64],
    b: &[i64],
    right_starts_down: bool,
    params: &RegionParams,
) -> Result<Region, RegionError> {
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    check_nonneg("z", z)?;
    check_nonneg("t", t)?;
    check_list_nonneg("a", a)?;
    check_list_nonneg("b", b)?;
    let (oa, ea, _) = odd_even_sums(a);
    let (ob, eb, _) = odd_even_sums(b);
    let sides = if !right_starts_down {
        [
            x + y + oa + ob,
            z + ea + eb,
            y + t + oa + ob,
            x + y + ea + eb,
            z + oa + ob,
            y + t + ea + eb,
        ]
    } else {
        [
            x + y + t + oa + eb,
            z + ea + ob,
            y + oa + eb,
            x + y + t + ea + ob,
            z + oa + eb,
            y + ea + ob,
        ]
    };
    let mut set = hexagon_triangles(sides);
    let h = sides[5] + x;
    let up_down = |i: usize| if i % 2 == 0 { Orientation::Up } else { Orientation::Down };
    let down_up = |i: usize| if i % 2 == 0 { Orientation::Down } else { Orientation::Up };
    remove_fern_rightward(&mut set, hex_left_p(sides, h), h, a, up_down)?;
    // The right fern is listed outside-in: its first lobe touches the eastern
    // boundary.
    if right_starts_down {
        remove_fern_leftward(&mut set, hex_right_p(sides, h), h, b, down_up)?;
    } else {
        remove_fern_leftward(&mut set, hex_right_p(sides, h), h, b, up_down)?;
    }
    let family = if right_starts_down { RegionFamily::Q } else { RegionFamily::P };
    Ok(Region::from_triangles(set, family, Some(params.clone()), 0))
}

fn build_single_fern(
    x: i64,
    y: i64,
    z: i64,
    t: i64,
    a: &[i64],
    params: &RegionParams,
) -> Result<Region, RegionError> {
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    check_nonneg("z", z)?;
    check_nonneg("t", t)?;
    check_list_nonneg("a", a)?;
    let (oa, ea, _) = odd_even_sums(a);
    let sides = [x + y + oa, z + ea, t + oa, x + y + ea, z + oa, t + ea];
    let mut set = hexagon_triangles(sides);
    let h = sides[5] + x;
    let up_down = |i: usize| if i % 2 == 0 { Orientation::Up } else { Orientation::Down };
    remove_fern_rightward(&mut set, hex_left_p(sides, h), h, a, up_down)?;
    Ok(Region::from_triangles(set, RegionFamily::R, Some(params.clone()), 0))
}

fn build_double_corner(
    variant: u8,
    y: i64,
    z: i64,
    a: &[i64],
    b: &[i64],
    params: &RegionParams,
) -> Result<Region, RegionError> {
    if variant != 1 && variant != 2 {
        return Err(RegionError::BadVariant(variant));
    }
    check_nonneg("y", y)?;
    check_nonneg("z", z)?;
    check_list_nonneg("a", a)?;
    check_list_nonneg("b", b)?;
    if a.is_empty() || b.is_empty() {
        return Err(RegionError::EmptyFern);
    }
    // Lobes are 0-indexed here: a0 points down. "up sum" / "down sum" follow
    // the lobe orientations of each variant.
    let da: i64 = a.iter().step_by(2).sum();
    let ua: i64 = a.iter().skip(1).step_by(2).sum();
    let (ub, db) = if variant == 1 {
        (b.iter().skip(1).step_by(2).sum::<i64>(), b.iter().step_by(2).sum::<i64>())
    } else {
        (b.iter().step_by(2).sum::<i64>(), b.iter().skip(1).step_by(2).sum::<i64>())
    };
    let sides = [
        y + ua + ub,
        z + da + db,
        y + ua + ub,
        y + da + db,
        z + ua + ub,
        y + da + db,
    ];
    let mut set = hexagon_triangles(sides);
    let h = sides[5];
    let down_up = |i: usize| if i % 2 == 0 { Orientation::Down } else { Orientation::Up };
    let up_down = |i: usize| if i % 2 == 0 { Orientation::Up } else { Orientation::Down };
    remove_fern_rightward(&mut set, hex_left_p(sides, h), h, a, down_up)?;
    if variant == 1 {
        remove_fern_leftward(&mut set, hex_right_p(sides, h), h, b, down_up)?;
    } else {
        remove_fern_leftward(&mut set, hex_right_p(sides, h), h, b, up_down)?;
    }
    Ok(Region::from_triangles(set, RegionFamily::D, Some(params.clone()), 0))
}

/// Decompose sorted axis positions into (left block length, right block
/// length), requiring the two blocks to be separated by exactly `gap`
/// untouched segments.
pub(crate) fn split_axis_blocks(positions: &[i64], gap: i64) -> Result<(i64, i64), RegionError> {
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(RegionError::BadRemovedPosition(w[0]));
        }
    }
    if sorted.iter().any(|&p| p < 1) {
        return Err(RegionError::BadRemovedPosition(*sorted.iter().min().unwrap()));
    }
    // Left block: the maximal prefix 1, 2, ..., a.
    let mut a = 0i64;
    for &p in &sorted {
        if p == a + 1 {
            a += 1;
        } else {
            break;
        }
    }
    let rest = &sorted[a as usize..];
    let b = rest.len() as i64;
    for (i, &p) in rest.iter().enumerate() {
        if p != a + gap + 1 + i as i64 {
            return Err(RegionError::BadRemovedBlocks { gap, positions: positions.to_vec() });
        }
    }
    Ok((a, b))
}

fn build_axis_dented(
    y: i64,
    z: i64,
    removed: &[(i64, Orientation)],
    params: &RegionParams,
) -> Result<Region, RegionError> {
    check_nonneg("y", y)?;
    check_nonneg("z", z)?;
    let positions: Vec<i64> = removed.iter().map(|&(p, _)| p).collect();
    let (a, b) = split_axis_blocks(&positions, y + z)?;
    let u = removed.iter().filter(|&&(_, o)| o == Orientation::Up).count() as i64;
    let d = a + b - u;
    let sides = [y + u, z + d, y + u, y + d, z + u, y + d];
    let mut set = hexagon_triangles(sides);
    let h = sides[5];
    let west = hex_left_p(sides, h);
    for &(pos, orient) in removed {
        let p = west + pos - 1;
        let t = match orient {
            Orientation::Up => TriCoord::up_tri(h, p),
            Orientation::Down => TriCoord::down_tri(h - 1, p),
        };
        if !set.remove(&t) {
            return Err(RegionError::BadRemovedPosition(pos));
        }
    }
    Ok(Region::from_triangles(set, RegionFamily::F, Some(params.clone()), 0))
}

fn build_trapezoid(
    m: i64,
    n: i64,
    dents: &[i64],
    params: &RegionParams,
) -> Result<Region, RegionError> {
    check_nonneg("m", m)?;
    check_nonneg("n", n)?;
    if dents.len() as i64 != n {
        return Err(RegionError::WrongDentCount { expected: n, got: dents.len() });
    }
    let sorted_ok = dents.windows(2).all(|w| w[0] < w[1]);
    if !sorted_ok || dents.iter().any(|&d| d < 1 || d > m + n) {
        return Err(RegionError::BadDents { max: m + n, positions: dents.to_vec() });
    }
    // The trapezoid is the degenerate hexagon (n, m, n, 0, m+n, 0): rows
    // r = 0..n, with row r holding ups at columns 0..m+n-r and downs at
    // columns 0..m+n-r-1. Dent x removes the up-triangle U(0, x-1).
    let mut set = hexagon_triangles([n, m, n, 0, m + n, 0]);
    for &x in dents {
        let t = TriCoord::up_tri(0, x - 1);
        if !set.remove(&t) {
            return Err(RegionError::BadDents { max: m + n, positions: dents.to_vec() });
        }
    }
    Ok(Region::from_triangles(set, RegionFamily::Trapezoid, Some(params.clone()), 0))
}

fn build_semihex(blocks: &[i64], params: &RegionParams) -> Result<Region, RegionError> {
    check_list_nonneg("blocks", blocks)?;
    // Odd-position blocks (1-based) are removed from the base, even-position
    // blocks stay. The enclosing trapezoid has slant height n = removed total
    // and top side m = kept total.
    let (removed_total, kept_total, total) = odd_even_sums(blocks);
    let mut dents = Vec::new();
    let mut pos = 1i64;
    for (i, &len) in blocks.iter().enumerate() {
        if i % 2 == 0 {
            for k in 0..len {
                dents.push(pos + k);
            }
        }
        pos += len;
    }
    debug_assert_eq!(pos - 1, total);
    let mut region = build_trapezoid(kept_total, removed_total, &dents, params)?;
    region.family = RegionFamily::Semihex;
    Ok(region)
}

// ---------------------------------------------------------------------------
// Forced lozenges
// ---------------------------------------------------------------------------

/// Repeatedly remove lozenges that are forced: whenever a triangle has exactly
/// one available partner, that lozenge is part of every tiling. Returns the
/// reduced region together with the product of the removed lozenges' weights
/// (a monomial). Triangles left with *no* partner stay in place; they simply
/// make every count of the reduced region zero, which is the right answer for
/// the original region too.
pub fn remove_forced_lozenges(region: &Region, scheme: WeightScheme) -> (Region, crate::poly::QPolynomial) {
    let mut set: BTreeSet<TriCoord> = region.triangles().copied().collect();
    let mut exponent = 0i64;
    loop {
        let mut forced: Option<(TriCoord, TriCoord)> = None;
        for t in &set {
            let partners: Vec<TriCoord> = t
                .neighbours()
                .iter()
                .copied()
                .filter(|n| set.contains(n))
                .collect();
            if partners.len() == 1 {
                forced = Some((*t, partners[0]));
                break;
            }
        }
        match forced {
            Some((t, p)) => {
                let loz = Lozenge::from_pair(t, p).expect("forced pair is edge-adjacent");
                exponent += loz.weight_exponent(scheme, region.baseline_row);
                set.remove(&t);
                set.remove(&p);
            }
            None => break,
        }
    }
    let reduced = Region {
        triangles: set,
        family: region.family,
        params: region.params.clone(),
        baseline_row: region.baseline_row,
    };
    let weight = crate::poly::QPolynomial::monomial(exponent, num_bigint::BigInt::from(1));
    (reduced, weight)
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum SplitError {
    #[error(
        "balancing condition fails at line {line}: the part above has {ups} up-pointing and {downs} down-pointing triangles"
    )]
    Unbalanced { line: i64, ups: usize, downs: usize },
}

/// Split a region along the horizontal lattice line `q = line` into (upper,
/// lower) parts. A horizontal line always satisfies the separating condition
/// (the only adjacencies across it are vertical-lozenge adjacencies, and the
/// upper side of each is the up-pointing triangle); the split is therefore
/// valid exactly when the upper part is balanced, which forces the count to
/// factor. Refuses otherwise.
pub fn split_region(region: &Region, line: i64) -> Result<(Region, Region), SplitError> {
    let mut upper = BTreeSet::new();
    let mut lower = BTreeSet::new();
    for t in region.triangles() {
        if t.row >= line {
            upper.insert(*t);
        } else {
            lower.insert(*t);
        }
    }
    let ups = upper.iter().filter(|t| t.up).count();
    let downs = upper.len() - ups;
    if ups != downs {
        return Err(SplitError::Unbalanced { line, ups, downs });
    }
    let make = |set: BTreeSet<TriCoord>| Region {
        triangles: set,
        family: region.family,
        params: region.params.clone(),
        baseline_row: region.baseline_row,
    };
    Ok((make(upper), make(lower)))
}

// ---------------------------------------------------------------------------
// Boundary walk
// ---------------------------------------------------------------------------

/// One closed boundary cycle: the vertex loop and the region triangles whose
/// edges it traverses, in cyclic first-visit order.
#[derive(Clone, Debug)]
pub struct BoundaryCycle {
    pub vertices: Vec<(i64, i64)>,
    pub triangles: Vec<TriCoord>,
}

impl BoundaryCycle {
    /// Twice the signed Cartesian area (positive means counterclockwise).
    /// Used to tell the outer boundary (largest magnitude) from hole cycles.
    pub fn signed_area2(&self) -> f64 {
        let cart = |&(p, q): &(i64, i64)| {
            (p as f64 + q as f64 / 2.0, q as f64 * 3f64.sqrt() / 2.0)
        };
        let mut acc = 0.0;
        for i in 0..self.vertices.len() {
            let (x1, y1) = cart(&self.vertices[i]);
            let (x2, y2) = cart(&self.vertices[(i + 1) % self.vertices.len()]);
            acc += x1 * y2 - x2 * y1;
        }
        acc
    }
}

const DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn dir_index(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    DIRS.iter().position(|&x| x == d).expect("unit lattice edge")
}

/// Walk the boundary of the region into closed cycles.
///
/// Each triangle contributes its three counterclockwise edges; an edge is a
/// boundary edge when no other triangle of the region contributes its
/// reverse. Every walk traces the boundary of one connected component of the
/// complement (one face): an incoming edge carries its face on the right,
/// hugging the counterclockwise side of the reversed direction, so the walk
/// continues along the boundary edge found first counterclockwise from that
/// reversal. Where the boundary pinches through a single lattice vertex, the
/// sectors on either side stay with their own faces: a hole touching the
/// outer boundary at a vertex yields two walks, while two triangles meeting
/// only at a vertex share one face and yield one walk through the pinch.
pub fn boundary_cycles(region: &Region) -> Vec<BoundaryCycle> {
    // Directed edge -> triangle on its left.
    let mut left: BTreeMap<((i64, i64), (i64, i64)), TriCoord> = BTreeMap::new();
    for t in region.triangles() {
        let v = t.vertices();
        for i in 0..3 {
            left.insert((v[i], v[(i + 1) % 3]), *t);
        }
    }
    let boundary: BTreeMap<((i64, i64), (i64, i64)), TriCoord> = left
        .iter()
        .filter(|((a, b), _)| !left.contains_key(&(*b, *a)))
        .map(|(k, v)| (*k, *v))
        .collect();
    // Outgoing boundary edges per vertex, by direction.
    let mut outgoing: BTreeMap<(i64, i64), [bool; 6]> = BTreeMap::new();
    for &(a, b) in boundary.keys() {
        outgoing.entry(a).or_insert([false; 6])[dir_index(a, b)] = true;
    }
    let mut visited: BTreeSet<((i64, i64), (i64, i64))> = BTreeSet::new();
    let mut cycles = Vec::new();
    for (&start_edge, _) in &boundary {
        if visited.contains(&start_edge) {
            continue;
        }
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        let mut seen_tris = BTreeSet::new();
        let mut edge = start_edge;
        loop {
            visited.insert(edge);
            verts.push(edge.0);
            let t = boundary[&edge];
            if seen_tris.insert(t) {
                tris.push(t);
            }
            let (a, b) = edge;
            let incoming = dir_index(a, b);
            let outs = &outgoing[&b];
            let mut next_dir = None;
            for k in 0..6 {
                let o = (incoming + 3 + k) % 6;
                if outs[o] {
                    next_dir = Some(o);
                    break;
                }
            }
            let o = next_dir.expect("boundary walk continues");
            let c = (b.0 + DIRS[o].0, b.1 + DIRS[o].1);
            edge = (b, c);
            if edge == start_edge {
                break;
            }
        }
        cycles.push(BoundaryCycle { vertices: verts, triangles: tris });
    }
    cycles
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
