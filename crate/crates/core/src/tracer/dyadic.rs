use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::setalg::{slope_decomposition, FSet};

/// Lines through the origin whose intersection with `A x A` has size in
/// `[2^j, 2^{j+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub j: u32,
    pub lines: u64,
    pub points: u64,
    /// `Σ |line ∩ A x A|^2` over the class.
    pub contribution: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicSelection {
    pub j: u32,
    /// Number of lines in the selected class.
    pub lines: u64,
    /// Class floor `2^j`.
    pub floor: u64,
    /// `lines * floor^2`.
    pub mass: u64,
    pub energy: u64,
    /// `floor(log2 |A|) + 1`.
    pub class_count: u32,
    pub class_table: Vec<ClassRow>,
    pub checks: PigeonholeChecks,
}

/// Exact comparisons between the selected class and `E(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PigeonholeChecks {
    /// `M >= E(A)/(floor(log2|A|)+1)`. Not a theorem: the selected class is
    /// only guaranteed to carry that share of `Σ fiber^2`, and fibers can be
    /// up to twice the floor.
    pub mass_vs_energy: bool,
    /// `4M > E(A)/(floor(log2|A|)+1)`, which always holds.
    pub scaled_mass_vs_energy: bool,
    /// `N >= M/|A|^2`.
    pub floor_vs_mass: bool,
    /// `L >= M/|A|^2`.
    pub lines_vs_mass: bool,
}

impl PigeonholeChecks {
    /// The three provable checks.
    pub fn provable(&self) -> bool {
        self.scaled_mass_vs_energy && self.floor_vs_mass && self.lines_vs_mass
    }
}

/// The points of `A x A` on the selected lines, with their slopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    /// `(abscissa, ordinate)` pairs, sorted.
    pub points: Vec<(Elem, Elem)>,
    /// Slopes of the selected lines.
    pub slopes: FSet,
    /// Slope to the abscissae of the points on that line.
    pub fibers: BTreeMap<Elem, FSet>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ordinates over the abscissa `x`.
    pub fn column(&self, x: Elem) -> FSet {
        let f = self.slopes.field();
        FSet::from_elems(f, self.points.iter().filter(|p| p.0 == x).map(|p| p.1))
    }

    /// Abscissae under the ordinate `y`.
    pub fn row(&self, y: Elem) -> FSet {
        let f = self.slopes.field();
        FSet::from_elems(f, self.points.iter().filter(|p| p.1 == y).map(|p| p.0))
    }

    /// Reflection through `y = x`.
    pub fn transpose(&self) -> PointSet {
        let f = self.slopes.field();
        let mut points: Vec<(Elem, Elem)> = self.points.iter().map(|&(x, y)| (y, x)).collect();
        points.sort_unstable();
        let mut fibers: BTreeMap<Elem, FSet> = BTreeMap::new();
        for &(x, y) in &points {
            let slope = f.div(y, x).expect("points avoid zero");
            fibers.entry(slope).or_insert_with(|| FSet::empty(f)).insert(x);
        }
        PointSet {
            points,
            slopes: FSet::from_elems(f, fibers.keys().copied()),
            fibers,
        }
    }
}

fn log2_floor(v: u64) -> u32 {
    63 - v.leading_zeros()
}

pub fn dyadic_select(a: &FSet) -> Result<(DyadicSelection, PointSet)> {
    if a.len() < 2 {
        return Err(Error::TooSmall(format!("dyadic selection needs |A| >= 2, got {}", a.len())));
    }
    let decomposition = slope_decomposition(a)?;
    let energy = decomposition.energy();
    let class_count = log2_floor(a.len() as u64) + 1;
    let mut rows: BTreeMap<u32, ClassRow> = BTreeMap::new();
    for fiber in decomposition.slopes.values() {
        let size = fiber.len() as u64;
        let j = log2_floor(size);
        let row = rows.entry(j).or_insert(ClassRow { j, lines: 0, points: 0, contribution: 0 });
        row.lines += 1;
        row.points += size;
        row.contribution += size * size;
    }
    // largest contribution, smallest j on ties
    let chosen = rows
        .values()
        .fold(None::<&ClassRow>, |best, r| match best {
            Some(b) if b.contribution >= r.contribution => Some(b),
            _ => Some(r),
        })
        .expect("A x A is nonempty")
        .clone();
    let floor = 1u64 << chosen.j;
    let lines = chosen.lines;
    let mass = lines * floor * floor;
    let size = a.len() as u64;
    let sq = size * size;
    let checks = PigeonholeChecks {
        mass_vs_energy: mass * class_count as u64 >= energy,
        scaled_mass_vs_energy: 4 * mass * class_count as u64 > energy,
        floor_vs_mass: floor * sq >= mass,
        lines_vs_mass: lines * sq >= mass,
    };
    let f = a.field();
    let mut fibers = BTreeMap::new();
    let mut points = Vec::new();
    for (&slope, fiber) in &decomposition.slopes {
        if log2_floor(fiber.len() as u64) == chosen.j {
            points.extend(fiber.iter().map(|x| (x, f.mul(slope, x))));
            fibers.insert(slope, fiber.clone());
        }
    }
    points.sort_unstable();
    let selection = DyadicSelection {
        j: chosen.j,
        lines,
        floor,
        mass,
        energy,
        class_count,
        class_table: rows.into_values().collect(),
        checks,
    };
    let point_set = PointSet {
        points,
        slopes: FSet::from_elems(f, fibers.keys().copied()),
        fibers,
    };
    Ok((selection, point_set))
}
