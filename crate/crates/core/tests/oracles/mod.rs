//! Independent reference implementations used to check the library.
//!
//! These favour obviousness over speed: brute-force enumeration, direct
//! formulas, and different numerical methods from the ones under test.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use podium::media::FrameSequence;
use podium::moderation::{ScoredComment, Sentiment};

/// Movement per frame pair, pixel by pixel over (row, column).
pub fn movement(frames: &FrameSequence, tau: u8) -> Vec<f64> {
    let (w, h) = (frames.width(), frames.height());
    let mut out = Vec::new();
    for k in 0..frames.len() - 1 {
        let (a, b) = (&frames.frames()[k], &frames.frames()[k + 1]);
        let mut total: i64 = 0;
        for y in 0..h {
            for x in 0..w {
                let d = (a[y * w + x] as i64 - b[y * w + x] as i64).abs();
                if d > tau as i64 {
                    total += d - tau as i64;
                }
            }
        }
        out.push(100.0 * total as f64 / (255.0 * (w * h) as f64));
    }
    out
}

/// Lowercase after stripping leading and trailing non-alphanumerics.
pub fn normalize(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let mut lo = 0;
    let mut hi = chars.len();
    while lo < hi && !chars[lo].is_alphanumeric() {
        lo += 1;
    }
    while hi > lo && !chars[hi - 1].is_alphanumeric() {
        hi -= 1;
    }
    chars[lo..hi].iter().collect::<String>().to_lowercase()
}

/// (distinct, total) over non-empty normalized words.
pub fn unique_counts(words: &[&str]) -> (usize, usize) {
    let forms: Vec<String> = words.iter().map(|w| normalize(w)).filter(|w| !w.is_empty()).collect();
    let set: HashSet<&String> = forms.iter().collect();
    (set.len(), forms.len())
}

/// Multiset counts minus stopwords, by count descending then word.
pub fn frequencies(words: &[&str], stopwords: &HashSet<String>, top_n: usize) -> Vec<(String, usize)> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for w in words {
        let f = normalize(w);
        if !f.is_empty() && !stopwords.contains(&f) {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    let mut v: Vec<(String, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(top_n);
    v
}

/// Every (token position, lexicon entry) where the entry's words equal the
/// normalized tokens starting there; longer entries first at one position.
pub fn filler_matches(words: &[&str], lexicon: &[String]) -> Vec<(usize, String)> {
    let forms: Vec<String> = words.iter().map(|w| normalize(w)).collect();
    let mut hits = Vec::new();
    for entry in lexicon {
        let parts: Vec<&str> = entry.split(' ').collect();
        if parts.len() > forms.len() {
            continue;
        }
        for start in 0..=forms.len() - parts.len() {
            if parts.iter().enumerate().all(|(k, p)| forms[start + k] == *p) {
                hits.push((start, parts.len(), entry.clone()));
            }
        }
    }
    hits.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    hits.into_iter().map(|(s, _, e)| (s, e)).collect()
}

/// Least squares with a trailing intercept via the normal equations
/// `X'X b = X'y`, solved by Gauss-Jordan elimination with partial pivoting.
pub fn normal_equations(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let d = rows[0].len() + 1;
    let aug = |r: &Vec<f64>, j: usize| if j + 1 == d { 1.0 } else { r[j] };
    let mut m = vec![vec![0.0; d + 1]; d];
    for (r, &t) in rows.iter().zip(y) {
        for i in 0..d {
            for j in 0..d {
                m[i][j] += aug(r, i) * aug(r, j);
            }
            m[i][d] += aug(r, i) * t;
        }
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        for v in &mut m[col] {
            *v /= p;
        }
        for row in 0..d {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in 0..=d {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    m.iter().map(|r| r[d]).collect()
}

/// Ordinal Krippendorff alpha by enumerating every ordered pair of pairable
/// values. `units[u]` holds the values given to unit `u`.
pub fn alpha_pairwise(units: &[Vec<u8>]) -> Option<f64> {
    let pairable: Vec<&Vec<u8>> = units.iter().filter(|u| u.len() >= 2).collect();
    let all: Vec<u8> = pairable.iter().flat_map(|u| u.iter().copied()).collect();
    let n = all.len() as f64;
    if all.is_empty() {
        return None;
    }
    let freq = |v: u8| all.iter().filter(|&&x| x == v).count() as f64;
    let delta = |a: u8, b: u8| -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let between: f64 = (lo..=hi).map(freq).sum();
        let d = between - (freq(lo) + freq(hi)) / 2.0;
        d * d
    };
    let mut observed = 0.0;
    for u in &pairable {
        let m = u.len() as f64;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j {
                    observed += delta(u[i], u[j]) / (m - 1.0);
                }
            }
        }
    }
    observed /= n;
    let mut expected = 0.0;
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i != j {
                expected += delta(all[i], all[j]);
            }
        }
    }
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return Some(1.0);
    }
    Some(1.0 - observed / expected)
}

/// ln Gamma by upward recurrence into the Stirling series.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 10.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Two-tailed Student-t p-value by integrating the density over [0, |t|].
pub fn t_p_value_quadrature(t: f64, df: f64) -> f64 {
    let ln_c = ln_gamma_stirling((df + 1.0) / 2.0)
        - ln_gamma_stirling(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    let c = ln_c.exp();
    let density = move |x: f64| c * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let inner = adaptive_simpson(&density, 0.0, t.abs(), 1e-13);
    1.0 - 2.0 * inner
}

pub fn cohens_d_direct(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let ss = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    };
    let pooled = ((ss(a) + ss(b)) / (a.len() + b.len() - 2) as f64).sqrt();
    (mean(a) - mean(b)) / pooled
}

pub fn cliffs_delta_pairs(a: &[f64], b: &[f64]) -> f64 {
    let mut net = 0i64;
    for x in a {
        for y in b {
            match x.partial_cmp(y).unwrap() {
                Ordering::Greater => net += 1,
                Ordering::Less => net -= 1,
                Ordering::Equal => {}
            }
        }
    }
    net as f64 / (a.len() * b.len()) as f64
}

/// Key-tuple sort: helpfulness descending, positive first, oldest first, id.
pub fn rank_order(comments: &[ScoredComment]) -> Vec<String> {
    let mut keyed: Vec<(f64, u8, i64, String)> = comments
        .iter()
        .map(|s| {
            let h = if s.helpfulness.is_nan() { f64::NEG_INFINITY } else { s.helpfulness };
            let sentiment = match s.sentiment {
                Sentiment::Positive => 0,
                Sentiment::Negative => 1,
            };
            (-h, sentiment, s.comment.created_at, s.comment.id.clone())
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });
    keyed.into_iter().map(|k| k.3).collect()
}
