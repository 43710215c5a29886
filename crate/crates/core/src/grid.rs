//! Uniform doubly periodic mesh of the unit square.
//!
//! Cells are addressed by `(i, j)` with `i` the column (x) and `j` the row
//! (y). All index arithmetic wraps. Storage order throughout the crate is
//! row-major: `k = j * nx + i`.

use crate::error::{Error, Result};

/// Smallest admissible cell count per direction. Below this the
/// neighbourhoods used by the limiters would overlap themselves under wrap.
pub const MIN_CELLS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl CellIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl From<(usize, usize)> for CellIndex {
    fn from((i, j): (usize, usize)) -> Self {
        Self { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Normal along +x; lies between `owner` and its +x neighbour.
    Vertical,
    /// Normal along +y; lies between `owner` and its +y neighbour.
    Horizontal,
}

/// A face, identified by the cell on its low side. Every face of the
/// periodic mesh has exactly one id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceId {
    pub orientation: Orientation,
    pub owner: CellIndex,
}

/// The mesh vertex at the upper-right corner `(x_{i+1/2}, y_{j+1/2})` of
/// cell `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexId {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborhoodKind {
    /// `N(K) ∪ {K}`: the 5-cell plus stencil.
    FaceInclusive,
    /// `N²(K) ∪ N(K)`: the 13-cell diamond of Manhattan radius 2.
    FaceSquared,
    /// `VN(K)`: the 3x3 block of vertex-sharing cells.
    Vertex,
}

impl Grid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::GridTooSmall { nx, ny });
        }
        Ok(Self {
            nx,
            ny,
            dx: 1.0 / nx as f64,
            dy: 1.0 / ny as f64,
        })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        self.dy
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Row-major linear index of a cell.
    #[inline]
    pub fn index(&self, c: CellIndex) -> usize {
        c.j * self.nx + c.i
    }

    #[inline]
    pub fn cell(&self, k: usize) -> CellIndex {
        CellIndex::new(k % self.nx, k / self.nx)
    }

    /// Cell reached from `c` by the signed offset `(di, dj)`, with wrap.
    #[inline]
    pub fn offset(&self, c: CellIndex, di: isize, dj: isize) -> CellIndex {
        let nx = self.nx as isize;
        let ny = self.ny as isize;
        CellIndex::new(
            (c.i as isize + di).rem_euclid(nx) as usize,
            (c.j as isize + dj).rem_euclid(ny) as usize,
        )
    }

    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.nx as f64
    }

    #[inline]
    pub fn y_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.ny as f64
    }

    /// x coordinate of the face on the +x side of column `i`.
    #[inline]
    pub fn x_face(&self, i: usize) -> f64 {
        (i as f64 + 1.0) / self.nx as f64
    }

    /// y coordinate of the face on the +y side of row `j`.
    #[inline]
    pub fn y_face(&self, j: usize) -> f64 {
        (j as f64 + 1.0) / self.ny as f64
    }

    /// Face neighbours in the fixed order `[+x, -x, +y, -y]`.
    pub fn face_neighbors(&self, c: CellIndex) -> [CellIndex; 4] {
        [
            self.offset(c, 1, 0),
            self.offset(c, -1, 0),
            self.offset(c, 0, 1),
            self.offset(c, 0, -1),
        ]
    }

    /// Deduplicated neighbourhood of `c`, sorted row-major.
    pub fn neighborhood(&self, c: CellIndex, kind: NeighborhoodKind) -> Vec<CellIndex> {
        let mut cells = Vec::with_capacity(13);
        match kind {
            NeighborhoodKind::FaceInclusive => {
                cells.push(c);
                cells.extend(self.face_neighbors(c));
            }
            NeighborhoodKind::FaceSquared => {
                for dj in -2isize..=2 {
                    let reach = 2 - dj.abs();
                    for di in -reach..=reach {
                        cells.push(self.offset(c, di, dj));
                    }
                }
            }
            NeighborhoodKind::Vertex => {
                for dj in -1..=1 {
                    for di in -1..=1 {
                        cells.push(self.offset(c, di, dj));
                    }
                }
            }
        }
        sort_row_major(&mut cells);
        cells
    }

    /// The two cells separated by a face: `(owner, neighbour)`.
    pub fn face_cells(&self, f: FaceId) -> (CellIndex, CellIndex) {
        let other = match f.orientation {
            Orientation::Vertical => self.offset(f.owner, 1, 0),
            Orientation::Horizontal => self.offset(f.owner, 0, 1),
        };
        (f.owner, other)
    }

    /// `N(K) ∪ N(L)` for the face between `K` and `L`; 8 cells on a quad mesh.
    pub fn face_union_neighborhood(&self, f: FaceId) -> Vec<CellIndex> {
        let (k, l) = self.face_cells(f);
        let mut cells: Vec<CellIndex> = self
            .face_neighbors(k)
            .into_iter()
            .chain(self.face_neighbors(l))
            .collect();
        sort_row_major(&mut cells);
        cells
    }

    /// The four cells sharing a vertex, sorted row-major.
    pub fn vertex_cells(&self, v: VertexId) -> Vec<CellIndex> {
        let base = CellIndex::new(v.i, v.j);
        let mut cells = vec![
            base,
            self.offset(base, 1, 0),
            self.offset(base, 0, 1),
            self.offset(base, 1, 1),
        ];
        sort_row_major(&mut cells);
        cells
    }

    /// The four vertices of cell `c` in the order
    /// `[(+x,+y), (-x,+y), (+x,-y), (-x,-y)]`.
    pub fn cell_vertices(&self, c: CellIndex) -> [VertexId; 4] {
        let w = self.offset(c, -1, 0);
        let s = self.offset(c, 0, -1);
        let sw = self.offset(c, -1, -1);
        [
            VertexId { i: c.i, j: c.j },
            VertexId { i: w.i, j: w.j },
            VertexId { i: s.i, j: s.j },
            VertexId { i: sw.i, j: sw.j },
        ]
    }
}

/// Linear indices of a cell and its eight surrounding cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stencil {
    pub k: usize,
    pub e: usize,
    pub w: usize,
    pub n: usize,
    pub s: usize,
    pub ne: usize,
    pub nw: usize,
    pub se: usize,
    pub sw: usize,
}

impl Grid {
    #[inline]
    pub fn stencil(&self, i: usize, j: usize) -> Stencil {
        let (nx, ny) = (self.nx, self.ny);
        let ie = if i + 1 == nx { 0 } else { i + 1 };
        let iw = if i == 0 { nx - 1 } else { i - 1 };
        let rn = if j + 1 == ny { 0 } else { j + 1 } * nx;
        let rs = if j == 0 { ny - 1 } else { j - 1 } * nx;
        let r = j * nx;
        Stencil {
            k: r + i,
            e: r + ie,
            w: r + iw,
            n: rn + i,
            s: rs + i,
            ne: rn + ie,
            nw: rn + iw,
            se: rs + ie,
            sw: rs + iw,
        }
    }
}

impl Grid {
    /// Row `j` of a row-major array over this grid.
    #[inline]
    pub fn row<'a>(&self, a: &'a [f64], j: usize) -> &'a [f64] {
        &a[j * self.nx..][..self.nx]
    }

    /// Rows `j − 1`, `j` and `j + 1` of `a`, wrapped.
    #[inline]
    pub fn rows3<'a>(&self, a: &'a [f64], j: usize) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let ny = self.ny;
        (
            self.row(a, (j + ny - 1) % ny),
            self.row(a, j),
            self.row(a, (j + 1) % ny),
        )
    }
}

/// The east neighbour of every entry of a periodic row.
#[inline]
pub fn east_of(row: &[f64]) -> impl Iterator<Item = f64> + '_ {
    row[1..].iter().chain(&row[..1]).copied()
}

/// The west neighbour of every entry of a periodic row.
#[inline]
pub fn west_of(row: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let n = row.len();
    row[n - 1..].iter().chain(&row[..n - 1]).copied()
}

fn sort_row_major(cells: &mut Vec<CellIndex>) {
    cells.sort_by_key(|c| (c.j, c.i));
    cells.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn c(i: usize, j: usize) -> CellIndex {
        CellIndex::new(i, j)
    }

    fn set(cells: &[CellIndex]) -> BTreeSet<(usize, usize)> {
        cells.iter().map(|c| (c.i, c.j)).collect()
    }

    #[test]
    fn rejects_small_grids() {
        assert_eq!(Grid::new(4, 7), Err(Error::GridTooSmall { nx: 4, ny: 7 }));
        assert!(Grid::new(5, 5).is_ok());
    }

    #[test]
    fn spacing_covers_unit_square() {
        for n in [5, 7, 100, 128, 333] {
            let g = Grid::new(n, n + 3).unwrap();
            assert!((g.dx() * n as f64 - 1.0).abs() < 1e-15);
            assert!((g.dy() * (n + 3) as f64 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn face_neighbors_interior_and_wrapped() {
        let g = Grid::square(5).unwrap();
        assert_eq!(g.face_neighbors(c(2, 2)), [c(3, 2), c(1, 2), c(2, 3), c(2, 1)]);
        assert_eq!(g.face_neighbors(c(0, 0)), [c(1, 0), c(4, 0), c(0, 1), c(0, 4)]);
        assert_eq!(g.face_neighbors(c(4, 4)), [c(0, 4), c(3, 4), c(4, 0), c(4, 3)]);
    }

    #[test]
    fn neighborhood_examples() {
        let g = Grid::square(7).unwrap();
        let nk = g.neighborhood(c(2, 2), NeighborhoodKind::FaceInclusive);
        assert_eq!(set(&nk), set(&[c(2, 2), c(3, 2), c(1, 2), c(2, 3), c(2, 1)]));
        let vn = g.neighborhood(c(2, 2), NeighborhoodKind::Vertex);
        let expect: Vec<_> = (1..=3).flat_map(|j| (1..=3).map(move |i| c(i, j))).collect();
        assert_eq!(set(&vn), set(&expect));
    }

    /// Brute force: compose N over N and union, compared with the diamond.
    #[test]
    fn squared_neighborhood_is_composed_face_stencil() {
        let g = Grid::square(7).unwrap();
        for k in 0..g.num_cells() {
            let kc = g.cell(k);
            let mut composed = BTreeSet::new();
            for l in g.face_neighbors(kc) {
                composed.insert((l.i, l.j));
                for m in g.face_neighbors(l) {
                    composed.insert((m.i, m.j));
                }
            }
            let diamond = g.neighborhood(kc, NeighborhoodKind::FaceSquared);
            assert_eq!(set(&diamond), composed);
            assert_eq!(diamond.len(), 13);
        }
    }

    #[test]
    fn face_union_examples() {
        let g = Grid::square(7).unwrap();
        let f = FaceId {
            orientation: Orientation::Vertical,
            owner: c(2, 2),
        };
        assert_eq!(
            set(&g.face_union_neighborhood(f)),
            set(&[c(2, 2), c(3, 2), c(1, 2), c(4, 2), c(2, 1), c(2, 3), c(3, 1), c(3, 3)])
        );
        let f = FaceId {
            orientation: Orientation::Horizontal,
            owner: c(2, 2),
        };
        assert_eq!(
            set(&g.face_union_neighborhood(f)),
            set(&[c(2, 2), c(2, 3), c(2, 1), c(2, 4), c(1, 2), c(3, 2), c(1, 3), c(3, 3)])
        );
        let f = FaceId {
            orientation: Orientation::Vertical,
            owner: c(0, 0),
        };
        assert_eq!(
            set(&g.face_union_neighborhood(f)),
            set(&[c(0, 0), c(1, 0), c(6, 0), c(2, 0), c(0, 6), c(0, 1), c(1, 6), c(1, 1)])
        );
    }

    #[test]
    fn face_union_matches_brute_force_everywhere() {
        let g = Grid::square(6).unwrap();
        for k in 0..g.num_cells() {
            for orientation in [Orientation::Vertical, Orientation::Horizontal] {
                let f = FaceId {
                    orientation,
                    owner: g.cell(k),
                };
                let (a, b) = g.face_cells(f);
                let brute: BTreeSet<_> = g
                    .face_neighbors(a)
                    .iter()
                    .chain(g.face_neighbors(b).iter())
                    .map(|c| (c.i, c.j))
                    .collect();
                let got = g.face_union_neighborhood(f);
                assert_eq!(set(&got), brute);
                assert_eq!(got.len(), 8);
            }
        }
    }

    #[test]
    fn symmetry_and_containment() {
        let g = Grid::new(5, 6).unwrap();
        for k in 0..g.num_cells() {
            let kc = g.cell(k);
            for l in g.face_neighbors(kc) {
                assert!(g.face_neighbors(l).contains(&kc));
            }
            let nk = set(&g.neighborhood(kc, NeighborhoodKind::FaceInclusive));
            let vn = set(&g.neighborhood(kc, NeighborhoodKind::Vertex));
            let n2 = set(&g.neighborhood(kc, NeighborhoodKind::FaceSquared));
            assert_eq!((nk.len(), vn.len(), n2.len()), (5, 9, 13));
            assert!(nk.is_subset(&vn));
            assert!(vn.is_subset(&n2));
        }
    }

    #[test]
    fn vertex_neighbourhood_union_is_vn() {
        let g = Grid::square(5).unwrap();
        for k in 0..g.num_cells() {
            let kc = g.cell(k);
            let mut union = BTreeSet::new();
            for v in g.cell_vertices(kc) {
                let cells = g.vertex_cells(v);
                assert!(cells.contains(&kc));
                union.extend(cells.iter().map(|c| (c.i, c.j)));
            }
            assert_eq!(union, set(&g.neighborhood(kc, NeighborhoodKind::Vertex)));
        }
    }

    #[test]
    fn neighborhoods_are_row_major_sorted() {
        let g = Grid::square(8).unwrap();
        let n = g.neighborhood(c(0, 0), NeighborhoodKind::FaceSquared);
        let keys: Vec<_> = n.iter().map(|c| (c.j, c.i)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
