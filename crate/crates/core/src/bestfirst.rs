//! Best-first enumeration of the smallest subset sums and pairwise sums.
//!
//! Both iterators yield sums in nondecreasing order and visit every candidate
//! exactly once. Ties pop in insertion order, so output is deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

struct Entry<T> {
    key: f64,
    seq: u64,
    item: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    // Reversed: BinaryHeap is a max-heap and we want the smallest key first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct MinQueue<T> {
    heap: BinaryHeap<Entry<T>>,
    seq: u64,
}

impl<T> MinQueue<T> {
    fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            seq: 0,
        }
    }

    fn push(&mut self, key: f64, item: T) {
        self.heap.push(Entry {
            key,
            seq: self.seq,
            item,
        });
        self.seq += 1;
    }

    fn pop(&mut self) -> Option<(f64, T)> {
        self.heap.pop().map(|e| (e.key, e.item))
    }
}

/// A subset in the enumeration tree: its largest index, its sum, the sum of
/// its other members, and the matching tallies of the integer tags.
#[derive(Clone, Copy)]
struct SubsetNode {
    last: usize,
    sum: f64,
    prefix_sum: f64,
    tag: i64,
    prefix_tag: i64,
}

/// Subsets of `costs` (which must be sorted ascending and nonnegative) in
/// order of increasing sum, starting with the empty set.
///
/// Each item is `(sum, tag_total)`, where `tag_total` adds the `tags` of the
/// chosen members. Every subset sum is accumulated left to right in index
/// order, so it equals the plain sequential sum over its members bit for bit.
pub struct SubsetSums<'a> {
    costs: &'a [f64],
    tags: &'a [i64],
    queue: MinQueue<SubsetNode>,
    started: bool,
}

impl<'a> SubsetSums<'a> {
    pub fn new(costs: &'a [f64], tags: &'a [i64]) -> Self {
        assert_eq!(costs.len(), tags.len());
        debug_assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(costs.iter().all(|&c| c >= 0.0));
        Self {
            costs,
            tags,
            queue: MinQueue::new(),
            started: false,
        }
    }
}

impl Iterator for SubsetSums<'_> {
    type Item = (f64, i64);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            if !self.costs.is_empty() {
                self.queue.push(
                    self.costs[0],
                    SubsetNode {
                        last: 0,
                        sum: self.costs[0],
                        prefix_sum: 0.0,
                        tag: self.tags[0],
                        prefix_tag: 0,
                    },
                );
            }
            return Some((0.0, 0));
        }
        let (_, node) = self.queue.pop()?;
        let next = node.last + 1;
        if next < self.costs.len() {
            // extend: append `next`
            let extended = SubsetNode {
                last: next,
                sum: node.sum + self.costs[next],
                prefix_sum: node.sum,
                tag: node.tag + self.tags[next],
                prefix_tag: node.tag,
            };
            self.queue.push(extended.sum, extended);
            // shift: replace `last` by `next`
            let shifted = SubsetNode {
                last: next,
                sum: node.prefix_sum + self.costs[next],
                prefix_sum: node.prefix_sum,
                tag: node.prefix_tag + self.tags[next],
                prefix_tag: node.prefix_tag,
            };
            self.queue.push(shifted.sum, shifted);
        }
        Some((node.sum, node.tag))
    }
}

/// Index pairs `(i, j)` ordered by `a[i] + b[j]`, for ascending `a` and `b`.
pub struct PairSums<'a> {
    a: &'a [f64],
    b: &'a [f64],
    queue: MinQueue<(usize, usize)>,
}

impl<'a> PairSums<'a> {
    pub fn new(a: &'a [f64], b: &'a [f64]) -> Self {
        debug_assert!(a.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(b.windows(2).all(|w| w[0] <= w[1]));
        let mut queue = MinQueue::new();
        if !a.is_empty() && !b.is_empty() {
            queue.push(a[0] + b[0], (0, 0));
        }
        Self { a, b, queue }
    }
}

impl Iterator for PairSums<'_> {
    type Item = (f64, usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        let (sum, (i, j)) = self.queue.pop()?;
        if j == 0 && i + 1 < self.a.len() {
            self.queue.push(self.a[i + 1] + self.b[0], (i + 1, 0));
        }
        if j + 1 < self.b.len() {
            self.queue.push(self.a[i] + self.b[j + 1], (i, j + 1));
        }
        Some((sum, i, j))
    }
}
