use serde::Serialize;

use crate::error::{Error, Result};

/// Interior, boundary and exterior of an interval `A` on the chain `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionSplit {
    pub n: usize,
    /// Sites of `A`, ascending.
    pub region: Vec<usize>,
    pub ell: usize,
    /// `∂A`: sites of `A` with a neighbour outside `A`.
    pub boundary: Vec<usize>,
    /// `I_A(ℓ)`.
    pub interior: Vec<usize>,
    /// `B_A(ℓ)`.
    pub bulk: Vec<usize>,
    /// `E_A(ℓ)`.
    pub exterior: Vec<usize>,
    /// `A ∩ B_A(ℓ)`.
    pub b_int: Vec<usize>,
    /// `(V \ A) ∩ B_A(ℓ)`.
    pub b_ext: Vec<usize>,
}

/// `∂Y` for any site set on the chain `0..n`.
pub fn boundary_of(set: &[usize], n: usize) -> Vec<usize> {
    set.iter()
        .copied()
        .filter(|&x| {
            let left = x > 0 && !set.contains(&(x - 1));
            let right = x + 1 < n && !set.contains(&(x + 1));
            left || right
        })
        .collect()
}

fn dist_to(x: usize, set: &[usize]) -> Option<usize> {
    set.iter().map(|&y| x.abs_diff(y)).min()
}

/// Sites within distance `r` of `∂A`, i.e. `B(A; r)`.
pub fn neighbourhood(boundary: &[usize], n: usize, r: usize) -> Vec<usize> {
    (0..n).filter(|&x| dist_to(x, boundary).is_some_and(|d| d <= r)).collect()
}

/// Builds the split of the chain `0..n` around the interval `start..=end`.
pub fn region_split(n: usize, start: usize, end: usize, ell: usize) -> Result<RegionSplit> {
    if start > end || end >= n {
        return Err(Error::InvalidRegion(format!("interval [{start}, {end}] on a chain of {n} sites")));
    }
    if ell == 0 {
        return Err(Error::InvalidParameter("boundary width ell must be at least 1".into()));
    }
    let region: Vec<usize> = (start..=end).collect();
    let boundary = boundary_of(&region, n);
    let far = |x: usize| dist_to(x, &boundary).is_none_or(|d| d > ell);
    let interior: Vec<usize> = region.iter().copied().filter(|&x| far(x)).collect();
    let bulk = neighbourhood(&boundary, n, ell);
    let exterior: Vec<usize> = (0..n).filter(|x| !region.contains(x) && far(*x)).collect();
    let b_int = bulk.iter().copied().filter(|x| region.contains(x)).collect();
    let b_ext = bulk.iter().copied().filter(|x| !region.contains(x)).collect();
    Ok(RegionSplit { n, region, ell, boundary, interior, bulk, exterior, b_int, b_ext })
}

impl RegionSplit {
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|x| !self.region.contains(x)).collect()
    }

    /// `B(A; r)`.
    pub fn ball(&self, r: usize) -> Vec<usize> {
        neighbourhood(&self.boundary, self.n, r)
    }

    /// Disjoint-union check `V = I ∪ B ∪ E`.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![0u8; self.n];
        for &x in self.interior.iter().chain(&self.bulk).chain(&self.exterior) {
            seen[x] += 1;
        }
        seen.iter().all(|&c| c == 1)
    }
}
