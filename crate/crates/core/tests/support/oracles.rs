//! Brute-force reference implementations of the scoring functions. They are
//! written for clarity, not speed, and share no code with the library.

#![allow(dead_code)]

/// Mean over the union of classes of 2PR/(P+R), with 0 when P+R = 0.
pub fn f1_macro(y: &[usize], p: &[usize]) -> f64 {
    let mut classes: Vec<usize> = y.iter().chain(p.iter()).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let mut sum = 0.0;
    for c in &classes {
        let predicted = p.iter().filter(|v| *v == c).count() as f64;
        let actual = y.iter().filter(|v| *v == c).count() as f64;
        let hits = y.iter().zip(p).filter(|(a, b)| *a == c && *b == c).count() as f64;
        let precision = if predicted > 0.0 { hits / predicted } else { 0.0 };
        let recall = if actual > 0.0 { hits / actual } else { 0.0 };
        if precision + recall > 0.0 {
            sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    sum / classes.len() as f64
}

/// Fraction of (positive, negative) pairs ordered correctly, ties half.
pub fn auc(y: &[bool], s: &[f64]) -> f64 {
    let mut favorable = 0.0;
    let mut pairs = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] && !y[j] {
                pairs += 1.0;
                if s[i] > s[j] {
                    favorable += 1.0;
                } else if s[i] == s[j] {
                    favorable += 0.5;
                }
            }
        }
    }
    favorable / pairs
}

pub fn rmse(y: &[f64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        acc += (y[i] - p[i]).powi(2);
    }
    (acc / y.len() as f64).sqrt()
}

pub fn mae(y: &[f64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        acc += (y[i] - p[i]).abs();
    }
    acc / y.len() as f64
}

pub fn one_minus_rae(y: &[f64], p: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut err = 0.0;
    let mut base = 0.0;
    for i in 0..y.len() {
        err += (y[i] - p[i]).abs();
        base += (y[i] - mean).abs();
    }
    1.0 - err / base
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Mean of (b - a) / max(a, b), singletons scoring 0.
pub fn silhouette(x: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for i in 0..n {
        let same: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == labels[i]).collect();
        if same.is_empty() {
            continue;
        }
        let a = same.iter().map(|&j| dist(&x[i], &x[j])).sum::<f64>() / same.len() as f64;
        let mut others: Vec<usize> = labels.iter().copied().filter(|&l| l != labels[i]).collect();
        others.sort_unstable();
        others.dedup();
        let mut b = f64::INFINITY;
        for c in others {
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == c).collect();
            let d = members.iter().map(|&j| dist(&x[i], &x[j])).sum::<f64>() / members.len() as f64;
            b = b.min(d);
        }
        let m = if a > b { a } else { b };
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / n as f64
}
