use std::collections::BTreeMap;

use super::ClusterError;

/// Mean silhouette over all points, Euclidean distance.
///
/// Members of singleton clusters score 0, as does any point whose
/// intra- and nearest inter-cluster mean distances are both 0.
pub fn silhouette_mean(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, ClusterError> {
    if points.len() != labels.len() {
        return Err(ClusterError::DimensionMismatch);
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        let next = index.len();
        index.entry(l).or_insert(next);
    }
    if index.len() < 2 {
        return Err(ClusterError::DegenerateClustering);
    }
    let dense: Vec<usize> = labels.iter().map(|l| index[l]).collect();
    let k = index.len();
    let mut sizes = vec![0usize; k];
    dense.iter().for_each(|&l| sizes[l] += 1);

    let n = points.len();
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[dense[j]] += super::kmeans::sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let own = dense[i];
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}
