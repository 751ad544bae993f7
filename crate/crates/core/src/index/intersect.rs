//! Sorted postings intersection.

/// Length ratio at which the short list is galloped through the long one
/// instead of merging.
const GALLOP_RATIO: usize = 16;

/// Size of the intersection of two strictly ascending lists.
pub fn intersection_count(a: &[u32], b: &[u32]) -> usize {
    let mut n = 0;
    visit(a, b, |_| n += 1);
    n
}

/// Intersection of two strictly ascending lists, ascending.
pub fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    visit(a, b, |x| out.push(x));
    out
}

fn visit(a: &[u32], b: &[u32], emit: impl FnMut(u32)) {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return;
    }
    if long.len() / short.len() >= GALLOP_RATIO {
        gallop(short, long, emit)
    } else {
        merge(short, long, emit)
    }
}

fn merge(a: &[u32], b: &[u32], mut emit: impl FnMut(u32)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                emit(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// For each element of `short`, exponential probe forward in `long` from the
/// last match position, then binary search inside the bracket.
fn gallop(short: &[u32], long: &[u32], mut emit: impl FnMut(u32)) {
    let mut base = 0;
    for &x in short {
        let rest = &long[base..];
        if rest.is_empty() {
            break;
        }
        let mut hi = 1;
        while hi < rest.len() && rest[hi - 1] < x {
            hi *= 2;
        }
        let lo = hi / 2;
        let hi = hi.min(rest.len());
        match rest[lo..hi].binary_search(&x) {
            Ok(pos) => {
                emit(x);
                base += lo + pos + 1;
            }
            Err(pos) => base += lo + pos,
        }
    }
}
