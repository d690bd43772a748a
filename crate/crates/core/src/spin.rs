//! Truncated local Euler factor of the degree-eight spin representation,
//! used for display only.

use num_traits::{One, Zero};

use crate::padic::Q;

/// `prod_{S subset {1,2,3}} (1 - a0 prod_{i in S} a_i q)^-1` through `q^rmax`.
pub fn spin_euler_factor(satake: &[Q; 4], rmax: usize) -> Vec<Q> {
    let mut series = vec![Q::zero(); rmax + 1];
    series[0] = Q::one();
    for mask in 0u8..8 {
        let mut root = satake[0].clone();
        for i in 0..3 {
            if mask & (1 << i) != 0 {
                root *= &satake[i + 1];
            }
        }
        // multiply by the geometric series in root * q
        for k in 1..=rmax {
            let prev = series[k - 1].clone();
            series[k] += &root * prev;
        }
    }
    series
}

/// The eight roots `a0 prod_{i in S} a_i`.
pub fn spin_roots(satake: &[Q; 4]) -> Vec<Q> {
    (0u8..8)
        .map(|mask| (0..3).filter(|i| mask & (1 << i) != 0).fold(satake[0].clone(), |acc, i| acc * &satake[i + 1]))
        .collect()
}

pub fn render(series: &[Q]) -> String {
    let mut parts = Vec::new();
    for (k, c) in series.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        parts.push(match k {
            0 => c.to_string(),
            1 => format!("{c}*q"),
            _ => format!("{c}*q^{k}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::q_int;

    fn binom(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn trivial_parameters() {
        let s = spin_euler_factor(&[q_int(1), q_int(1), q_int(1), q_int(1)], 6);
        for (k, c) in s.iter().enumerate() {
            assert_eq!(*c, q_int(binom(k as i64 + 7, 7)));
        }
    }

    #[test]
    fn scaled_leading_parameter() {
        let s = spin_euler_factor(&[q_int(2), q_int(1), q_int(1), q_int(1)], 5);
        for (k, c) in s.iter().enumerate() {
            assert_eq!(*c, q_int(binom(k as i64 + 7, 7) * 2i64.pow(k as u32)));
        }
    }

    #[test]
    fn inverse_has_degree_eight() {
        let sat = [q_int(2), q_int(3), q_int(5), q_int(7)];
        let s = spin_euler_factor(&sat, 12);
        // prod (1 - root q) times the series is 1 through q^12
        let mut poly = vec![Q::one()];
        for r in spin_roots(&sat) {
            let mut next = vec![Q::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= &r * c;
            }
            poly = next;
        }
        assert_eq!(poly.len() - 1, 8);
        for k in 0..=12 {
            let v: Q = (0..=k.min(8)).map(|i| &poly[i] * &s[k - i]).sum();
            assert_eq!(v, if k == 0 { Q::one() } else { Q::zero() });
        }
    }
}
