//! Optimal objective for two long jobs released at 0 plus one homogeneous
//! block of small jobs, in closed form.

use num_traits::Num;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairUnit {
    First,
    Second,
    Block,
}

/// `length` of work released at `release`, weight per unit length `ratio`,
/// cut into pieces of length `piece` (zero for a continuous block).
#[derive(Clone, Debug, PartialEq)]
pub struct Block<T> {
    pub release: T,
    pub ratio: T,
    pub length: T,
    pub piece: T,
}

fn max<T: PartialOrd + Clone>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Completion of `work` released at 0, run in the gaps of `busy`.
fn fill<T: Num + Clone + PartialOrd>(busy: &[(T, T)], work: &T) -> T {
    let mut t = T::zero();
    let mut need = work.clone();
    for (a, b) in busy {
        if *b <= t {
            continue;
        }
        if *a > t {
            let gap = a.clone() - t.clone();
            if need <= gap {
                return t + need;
            }
            need = need - gap;
        }
        t = b.clone();
    }
    t + need
}

/// Objective of the priority schedule that ranks the three units by `order`.
pub fn pair_objective<T: Num + Clone + PartialOrd>(
    p1: &T,
    w1: &T,
    p2: &T,
    w2: &T,
    block: &Block<T>,
    order: [PairUnit; 3],
) -> T {
    let two = T::one() + T::one();
    let mut busy: Vec<(T, T)> = Vec::new();
    let mut total = T::zero();
    for unit in order {
        match unit {
            PairUnit::First | PairUnit::Second => {
                let (p, w) = if unit == PairUnit::First { (p1, w1) } else { (p2, w2) };
                let c = fill(&busy, p);
                total = total + w.clone() * c.clone();
                let mut next = vec![(T::zero(), c.clone())];
                next.extend(busy.iter().filter(|(a, _)| *a >= c).cloned());
                busy = next;
            }
            PairUnit::Block => {
                if block.length.is_zero() {
                    continue;
                }
                // Anything ahead of the block is a long job, busy from 0 without gaps.
                let ahead = busy.last().map(|(_, e)| e.clone()).unwrap_or_else(T::zero);
                let start = max(&block.release, &ahead);
                let mean = start.clone() + (block.length.clone() + block.piece.clone()) / two.clone();
                total = total + block.ratio.clone() * block.length.clone() * mean;
                busy.push((start.clone(), start + block.length.clone()));
            }
        }
    }
    total
}

/// Minimum of [`pair_objective`] over all six orders.
pub fn closed_pair_optimal<T: Num + Clone + PartialOrd>(p1: &T, w1: &T, p2: &T, w2: &T, block: &Block<T>) -> T {
    use PairUnit::*;
    let orders = [
        [First, Second, Block],
        [First, Block, Second],
        [Second, First, Block],
        [Second, Block, First],
        [Block, First, Second],
        [Block, Second, First],
    ];
    orders
        .iter()
        .map(|o| pair_objective(p1, w1, p2, w2, block, *o))
        .reduce(|a, b| if b < a { b } else { a })
        .expect("six orders")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty(release: f64) -> Block<f64> {
        Block { release, ratio: 1.0, length: 0.0, piece: 0.0 }
    }

    #[test]
    fn empty_block_is_wspt() {
        let (p1, p2) = (1.0, 2.3364);
        let v = closed_pair_optimal(&p1, &p1, &p2, &p2, &empty(1.0));
        assert!((v - (p1 * p1 + p2 * (p1 + p2))).abs() < 1e-12);
    }

    #[test]
    fn first_then_block_then_second() {
        // J1 [0,1], block [1,1+l], J2 after.
        let (p1, p2, l): (f64, f64, f64) = (1.0, 2.0, 3.0);
        let rho = p2 / (p2 - p1);
        let b = Block { release: 1.0, ratio: rho, length: l, piece: 0.0 };
        let v = pair_objective(&p1, &p1, &p2, &p2, &b, [PairUnit::First, PairUnit::Block, PairUnit::Second]);
        let expect = p1 * p1 + rho * l * (p1 + l / 2.0) + p2 * (p1 + l + p2);
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn second_preempted_by_block() {
        // J2 ranks below the block but above J1: it runs [0,1], yields to the block, resumes.
        let (p1, p2, l): (f64, f64, f64) = (1.0, 2.0, 1.0);
        let b = Block { release: 1.0, ratio: 5.0, length: l, piece: 0.5 };
        let v = pair_objective(&p1, &p1, &p2, &p2, &b, [PairUnit::Block, PairUnit::Second, PairUnit::First]);
        let block = 5.0 * l * (1.0 + (l + 0.5) / 2.0);
        let expect = block + p2 * 3.0 + p1 * 4.0;
        assert!((v - expect).abs() < 1e-12);
    }
}
