//! Close-by-One enumeration of formal concepts with extent/intent size bounds.
//!
//! Extents only shrink as intents grow, so any branch whose extent falls
//! below the bound is cut together with all of its descendants.

use super::FormalContext;

/// A concept in index space: sorted object and attribute indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawConcept {
    pub extent: Vec<u32>,
    pub intent: Vec<u32>,
}

struct Search<'a> {
    ctx: &'a FormalContext,
    min_extent: usize,
    min_intent: usize,
    counts: Vec<u32>,
    touched: Vec<u32>,
    out: Vec<RawConcept>,
}

/// Every concept with `|extent| >= min_extent` and `|intent| >= min_intent`,
/// each exactly once, in discovery order. `min_extent` must be at least 1.
pub fn close_by_one(ctx: &FormalContext, min_extent: usize, min_intent: usize) -> Vec<RawConcept> {
    assert!(min_extent >= 1, "the empty extent is never enumerated");
    let objects = ctx.objects().len();
    if objects < min_extent {
        return Vec::new();
    }
    let mut search = Search {
        ctx,
        min_extent,
        min_intent,
        counts: vec![0; ctx.attributes().len()],
        touched: Vec::new(),
        out: Vec::new(),
    };
    let extent: Vec<u32> = (0..objects as u32).collect();
    let (intent, candidates) = search.close(&extent);
    if intent.len() >= min_intent {
        search.out.push(RawConcept {
            extent: extent.clone(),
            intent: intent.clone(),
        });
    }
    search.descend(&extent, &intent, &candidates, None);
    search.out
}

impl Search<'_> {
    /// Returns the intent of `extent` and the attributes outside it that are
    /// shared by at least `min_extent` of its objects.
    fn close(&mut self, extent: &[u32]) -> (Vec<u32>, Vec<u32>) {
        for &o in extent {
            for &a in self.ctx.row(o as usize) {
                let slot = &mut self.counts[a as usize];
                if *slot == 0 {
                    self.touched.push(a);
                }
                *slot += 1;
            }
        }
        let mut intent = Vec::new();
        let mut candidates = Vec::new();
        let full = extent.len() as u32;
        for &a in &self.touched {
            let c = self.counts[a as usize];
            if c == full {
                intent.push(a);
            } else if c as usize >= self.min_extent {
                candidates.push(a);
            }
            self.counts[a as usize] = 0;
        }
        self.touched.clear();
        intent.sort_unstable();
        candidates.sort_unstable();
        (intent, candidates)
    }

    fn descend(&mut self, extent: &[u32], intent: &[u32], candidates: &[u32], last: Option<u32>) {
        let start = match last {
            Some(l) => candidates.partition_point(|&a| a <= l),
            None => 0,
        };
        for &j in &candidates[start..] {
            let next_extent = intersect(extent, self.ctx.column(j as usize));
            if next_extent.len() < self.min_extent {
                continue;
            }
            let (next_intent, next_candidates) = self.close(&next_extent);
            // canonical iff closing adds no attribute below j
            let below_old = intent.partition_point(|&a| a < j);
            let below_new = next_intent.partition_point(|&a| a < j);
            if below_old != below_new {
                continue;
            }
            if next_intent.len() >= self.min_intent {
                self.out.push(RawConcept {
                    extent: next_extent.clone(),
                    intent: next_intent.clone(),
                });
            }
            self.descend(&next_extent, &next_intent, &next_candidates, Some(j));
        }
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
