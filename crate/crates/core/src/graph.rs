//! Undirected co-authorship graphs and the collaboration statistics table.
//!
//! Authors are vertices; an edge exists iff the pair co-authored at least
//! one admitted paper in scope. Authors of single-author papers stay in the
//! vertex set with degree 0 (singletons). Each edge carries the first year
//! the pair co-authored and how many papers they share.

use std::collections::HashMap;

use crate::corpus::PublicationRecord;
use crate::ids::AuthorId;

/// Frozen adjacency-list graph. Vertices are sorted by [`AuthorId`], so a
/// fixed record multiset always freezes into the same structure.
#[derive(Debug, Clone)]
pub struct CoauthorshipGraph {
    pub label: String,
    vertices: Vec<AuthorId>,
    index: HashMap<AuthorId, u32>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    /// Parallel to `neighbors`: first co-authorship year of the pair.
    nbr_first_year: Vec<i32>,
    /// Parallel to `neighbors`: papers the pair co-authored.
    nbr_paper_count: Vec<u32>,
    vertex_first_year: Vec<i32>,
    vertex_last_year: Vec<i32>,
    edge_count: usize,
}

/// Mean local Watts-Strogatz coefficient over vertices of degree >= 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clustering {
    pub value: f64,
    /// Vertices with degree >= 2 that entered the mean.
    pub eligible_vertices: usize,
}

impl Clustering {
    /// True when no vertex had degree >= 2 and the 0.0 value is a
    /// convention, not a measurement.
    pub fn is_degenerate(&self) -> bool {
        self.eligible_vertices == 0
    }
}

impl CoauthorshipGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> &[AuthorId] {
        &self.vertices
    }

    pub fn contains(&self, author: AuthorId) -> bool {
        self.index.contains_key(&author)
    }

    /// Degree (distinct co-authors) of `author`, or `None` when the author
    /// is not a vertex of this graph.
    pub fn degree(&self, author: AuthorId) -> Option<usize> {
        self.index.get(&author).map(|&v| self.degree_at(v as usize))
    }

    fn degree_at(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    fn neighbors_at(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn neighbors(&self, author: AuthorId) -> impl Iterator<Item = AuthorId> + '_ {
        let range = self.index.get(&author).map(|&v| {
            let v = v as usize;
            self.offsets[v] as usize..self.offsets[v + 1] as usize
        });
        range
            .into_iter()
            .flatten()
            .map(move |i| self.vertices[self.neighbors[i] as usize])
    }

    /// Neighbors of `author` together with the first co-authorship year of
    /// each pair. Backbone of the pure-newcomer test.
    pub fn neighbors_with_first_year(
        &self,
        author: AuthorId,
    ) -> impl Iterator<Item = (AuthorId, i32)> + '_ {
        let range = self.index.get(&author).map(|&v| {
            let v = v as usize;
            self.offsets[v] as usize..self.offsets[v + 1] as usize
        });
        range.into_iter().flatten().map(move |i| {
            (
                self.vertices[self.neighbors[i] as usize],
                self.nbr_first_year[i],
            )
        })
    }

    pub fn has_edge(&self, a: AuthorId, b: AuthorId) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&va), Some(&vb)) => self.neighbors_at(va as usize).binary_search(&vb).is_ok(),
            _ => false,
        }
    }

    pub fn edge_first_year(&self, a: AuthorId, b: AuthorId) -> Option<i32> {
        let &va = self.index.get(&a)?;
        let &vb = self.index.get(&b)?;
        let row = self.neighbors_at(va as usize);
        let pos = row.binary_search(&vb).ok()?;
        Some(self.nbr_first_year[self.offsets[va as usize] as usize + pos])
    }

    pub fn edge_paper_count(&self, a: AuthorId, b: AuthorId) -> Option<u32> {
        let &va = self.index.get(&a)?;
        let &vb = self.index.get(&b)?;
        let row = self.neighbors_at(va as usize);
        let pos = row.binary_search(&vb).ok()?;
        Some(self.nbr_paper_count[self.offsets[va as usize] as usize + pos])
    }

    /// First publication year of `author` within this graph's scope.
    pub fn first_year(&self, author: AuthorId) -> Option<i32> {
        self.index
            .get(&author)
            .map(|&v| self.vertex_first_year[v as usize])
    }

    pub fn last_year(&self, author: AuthorId) -> Option<i32> {
        self.index
            .get(&author)
            .map(|&v| self.vertex_last_year[v as usize])
    }

    /// All edges as (a, b, first_year, paper_count), a < b, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (AuthorId, AuthorId, i32, u32)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            let start = self.offsets[v] as usize;
            self.neighbors_at(v)
                .iter()
                .enumerate()
                .filter(move |(_, &u)| (v as u32) < u)
                .map(move |(i, &u)| {
                    (
                        self.vertices[v],
                        self.vertices[u as usize],
                        self.nbr_first_year[start + i],
                        self.nbr_paper_count[start + i],
                    )
                })
        })
    }

    /// Degree-0 vertices: authors who only published alone in scope.
    pub fn singleton_count(&self) -> usize {
        (0..self.vertex_count())
            .filter(|&v| self.degree_at(v) == 0)
            .count()
    }

    /// Triangles through the vertex, by sorted-adjacency intersection.
    fn triangles_at(&self, v: usize) -> u64 {
        let row = self.neighbors_at(v);
        let mut count = 0u64;
        for &u in row {
            let other = self.neighbors_at(u as usize);
            count += sorted_intersection_count(row, other);
        }
        // Each triangle edge pair counted from both endpoints.
        count / 2
    }

    /// Mean local clustering coefficient over vertices with degree >= 2.
    ///
    /// Local coefficient: `2 * triangles(v) / (deg(v) * (deg(v) - 1))`.
    /// The per-vertex values are sorted before summing so the result does
    /// not depend on vertex numbering.
    pub fn clustering_coefficient(&self) -> Clustering {
        let mut locals: Vec<f64> = (0..self.vertex_count())
            .filter(|&v| self.degree_at(v) >= 2)
            .map(|v| {
                let d = self.degree_at(v) as f64;
                let t = self.triangles_at(v) as f64;
                2.0 * t / (d * (d - 1.0))
            })
            .collect();
        if locals.is_empty() {
            return Clustering {
                value: 0.0,
                eligible_vertices: 0,
            };
        }
        locals.sort_by(f64::total_cmp);
        let sum: f64 = locals.iter().sum();
        Clustering {
            value: sum / locals.len() as f64,
            eligible_vertices: locals.len(),
        }
    }

    /// Sum of degrees over the given authors, counting only authors that
    /// are vertices here. Returns (sum, vertices counted).
    fn degree_sum_over(&self, authors: &[AuthorId]) -> (u64, usize) {
        let mut sum = 0u64;
        let mut present = 0usize;
        for &a in authors {
            if let Some(d) = self.degree(a) {
                sum += d as u64;
                present += 1;
            }
        }
        (sum, present)
    }
}

/// Accumulates papers into an edge/vertex multiset, then freezes.
/// Insertion order does not matter: permuting the record stream yields an
/// identical graph.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    label: String,
    vertex_years: HashMap<AuthorId, (i32, i32)>,
    edges: HashMap<(AuthorId, AuthorId), (i32, u32)>,
}

impl GraphBuilder {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn add_paper(&mut self, record: &PublicationRecord) {
        self.add_authors(&record.authors, record.year);
    }

    pub fn add_authors(&mut self, authors: &[AuthorId], year: i32) {
        // Records guarantee distinct authors, but a duplicated id must not
        // double-count the pair.
        let mut deduped;
        let authors = if authors.len() > 1 {
            deduped = authors.to_vec();
            deduped.sort_unstable();
            deduped.dedup();
            &deduped[..]
        } else {
            authors
        };
        for &a in authors {
            self.vertex_years
                .entry(a)
                .and_modify(|(fy, ly)| {
                    *fy = (*fy).min(year);
                    *ly = (*ly).max(year);
                })
                .or_insert((year, year));
        }
        for (i, &a) in authors.iter().enumerate() {
            for &b in &authors[i + 1..] {
                if a == b {
                    continue; // no self-loops
                }
                let key = if a < b { (a, b) } else { (b, a) };
                self.edges
                    .entry(key)
                    .and_modify(|(fy, n)| {
                        *fy = (*fy).min(year);
                        *n += 1;
                    })
                    .or_insert((year, 1));
            }
        }
    }

    pub fn build(self) -> CoauthorshipGraph {
        let mut vertices: Vec<AuthorId> = self.vertex_years.keys().copied().collect();
        vertices.sort_unstable();
        let index: HashMap<AuthorId, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();

        let n = vertices.len();
        let mut degree = vec![0u32; n];
        for &(a, b) in self.edges.keys() {
            degree[index[&a] as usize] += 1;
            degree[index[&b] as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let total = offsets[n] as usize;
        let mut neighbors = vec![0u32; total];
        let mut nbr_first_year = vec![0i32; total];
        let mut nbr_paper_count = vec![0u32; total];
        let mut cursor: Vec<u32> = offsets[..n].to_vec();
        let mut place = |v: u32, u: u32, fy: i32, cnt: u32, cursor: &mut Vec<u32>| {
            let at = cursor[v as usize] as usize;
            neighbors[at] = u;
            nbr_first_year[at] = fy;
            nbr_paper_count[at] = cnt;
            cursor[v as usize] += 1;
        };
        for (&(a, b), &(fy, cnt)) in &self.edges {
            let va = index[&a];
            let vb = index[&b];
            place(va, vb, fy, cnt, &mut cursor);
            place(vb, va, fy, cnt, &mut cursor);
        }
        let _ = place;
        // Sort each adjacency row (with its parallel metadata) for binary
        // search and intersection counting.
        for v in 0..n {
            let range = offsets[v] as usize..offsets[v + 1] as usize;
            let mut row: Vec<(u32, i32, u32)> = range
                .clone()
                .map(|i| (neighbors[i], nbr_first_year[i], nbr_paper_count[i]))
                .collect();
            row.sort_unstable_by_key(|&(u, _, _)| u);
            for (slot, (u, fy, cnt)) in range.zip(row) {
                neighbors[slot] = u;
                nbr_first_year[slot] = fy;
                nbr_paper_count[slot] = cnt;
            }
        }

        let mut vertex_first_year = vec![0i32; n];
        let mut vertex_last_year = vec![0i32; n];
        for (a, &(fy, ly)) in &self.vertex_years {
            let v = index[a] as usize;
            vertex_first_year[v] = fy;
            vertex_last_year[v] = ly;
        }

        CoauthorshipGraph {
            label: self.label,
            vertices,
            index,
            offsets,
            neighbors,
            nbr_first_year,
            nbr_paper_count,
            vertex_first_year,
            vertex_last_year,
            edge_count: self.edges.len(),
        }
    }
}

/// Builds the graph for a record stream. Records must already be scoped by
/// the caller (set membership, area, ...).
pub fn build_graph<'a>(
    records: impl IntoIterator<Item = &'a PublicationRecord>,
    label: impl Into<String>,
) -> CoauthorshipGraph {
    let mut builder = GraphBuilder::new(label);
    for record in records {
        builder.add_paper(record);
    }
    builder.build()
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> u64 {
    let mut i = 0;
    let mut j = 0;
    let mut count = 0u64;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// One row of the collaboration-trends table.
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborationRow {
    pub area_abbrev: String,
    pub vertex_count: usize,
    pub first_year: i32,
    pub final_year: i32,
    pub authors_per_paper_first_year: f64,
    pub authors_per_paper_final_year: f64,
    pub coauthors_in_area_first_year: f64,
    pub coauthors_in_area_avg: f64,
    pub coauthors_in_set: f64,
    pub coauthors_in_cs: f64,
    /// Percentage in [0, 100].
    pub singleton_pct: f64,
    pub clustering_coefficient: f64,
    pub clustering_degenerate: bool,
    /// Set when the area has fewer than two years of data, which collapses
    /// the first-year and final-year columns.
    pub single_year: bool,
}

/// Fills one collaboration row for an area.
///
/// `area_records` must be exactly the records behind `area_graph`; the
/// three graphs share the author-identity space with area ⊆ set ⊆ CS.
/// Co-author counts at the wider scopes are means over the *area's*
/// authors, which keeps the three columns nested.
pub fn collaboration_row(
    area_abbrev: &str,
    area_records: &[&PublicationRecord],
    area_graph: &CoauthorshipGraph,
    set_graph: &CoauthorshipGraph,
    cs_graph: &CoauthorshipGraph,
) -> CollaborationRow {
    let first_year = area_records.iter().map(|r| r.year).min().unwrap_or(0);
    let final_year = area_records.iter().map(|r| r.year).max().unwrap_or(0);
    let single_year = first_year == final_year;

    let mean_authors = |year: i32| -> f64 {
        let mut papers = 0u64;
        let mut authors = 0u64;
        for r in area_records.iter().filter(|r| r.year == year) {
            papers += 1;
            authors += r.authors.len() as u64;
        }
        if papers == 0 {
            0.0
        } else {
            authors as f64 / papers as f64
        }
    };

    // Degree average on the sub-graph induced by first-year papers only.
    let first_year_graph = build_graph(
        area_records
            .iter()
            .copied()
            .filter(|r| r.year == first_year),
        format!("{area_abbrev}:first-year"),
    );
    let coauthors_first = mean_degree(&first_year_graph);

    let vertices = area_graph.vertices();
    let (set_sum, _) = set_graph.degree_sum_over(vertices);
    let (cs_sum, _) = cs_graph.degree_sum_over(vertices);
    let n = vertices.len();
    let mean_over_area = |sum: u64| if n == 0 { 0.0 } else { sum as f64 / n as f64 };

    let clustering = area_graph.clustering_coefficient();
    CollaborationRow {
        area_abbrev: area_abbrev.to_string(),
        vertex_count: n,
        first_year,
        final_year,
        authors_per_paper_first_year: mean_authors(first_year),
        authors_per_paper_final_year: mean_authors(final_year),
        coauthors_in_area_first_year: coauthors_first,
        coauthors_in_area_avg: mean_degree(area_graph),
        coauthors_in_set: mean_over_area(set_sum),
        coauthors_in_cs: mean_over_area(cs_sum),
        singleton_pct: if n == 0 {
            0.0
        } else {
            100.0 * area_graph.singleton_count() as f64 / n as f64
        },
        clustering_coefficient: clustering.value,
        clustering_degenerate: clustering.is_degenerate(),
        single_year,
    }
}

fn mean_degree(graph: &CoauthorshipGraph) -> f64 {
    let n = graph.vertex_count();
    if n == 0 {
        return 0.0;
    }
    // Sum of degrees is twice the edge count; exact in integers.
    (2 * graph.edge_count()) as f64 / n as f64
}
