use std::cmp::Ordering;

/// A candidate edge's weight together with its drawn selection bits, most
/// significant (first drawn) bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateTag {
    pub weight: u64,
    pub bits: Vec<bool>,
}

impl CandidateTag {
    /// `value` rendered as `width` bits, most significant first.
    pub fn from_int(weight: u64, value: u64, width: usize) -> Self {
        let bits = (0..width)
            .rev()
            .map(|i| i < 64 && (value >> i) & 1 == 1)
            .collect();
        CandidateTag { weight, bits }
    }

    /// The bits as an integer; saturates beyond 64 bits.
    pub fn bits_value(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| {
            acc.saturating_mul(2).saturating_add(b as u64)
        })
    }
}

/// The selection order: lighter first, then larger bit string first.
///
/// `Less` means `a` comes before `b`. Bit strings of unequal length compare
/// as integers.
pub fn prec_compare(a: &CandidateTag, b: &CandidateTag) -> Ordering {
    a.weight
        .cmp(&b.weight)
        .then_with(|| compare_bits(&b.bits, &a.bits))
}

fn compare_bits(x: &[bool], y: &[bool]) -> Ordering {
    let strip = |s: &[bool]| -> usize { s.iter().position(|&b| b).unwrap_or(s.len()) };
    let (x, y) = (&x[strip(x)..], &y[strip(y)..]);
    x.len().cmp(&y.len()).then_with(|| x.cmp(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tag(w: u64, b: u64) -> CandidateTag {
        CandidateTag::from_int(w, b, 8)
    }

    #[test]
    fn examples() {
        assert_eq!(prec_compare(&tag(2, 5), &tag(2, 3)), Ordering::Less);
        assert_eq!(prec_compare(&tag(1, 0), &tag(9, 255)), Ordering::Less);
        assert_eq!(prec_compare(&tag(4, 7), &tag(4, 7)), Ordering::Equal);
        assert_eq!(tag(3, 200).bits_value(), 200);
    }

    proptest! {
        #[test]
        fn strict_total_order_on_distinct_tags(
            a in (1u64..6, 0u64..16), b in (1u64..6, 0u64..16), c in (1u64..6, 0u64..16)
        ) {
            let (a, b, c) = (tag(a.0, a.1), tag(b.0, b.1), tag(c.0, c.1));
            prop_assert_eq!(prec_compare(&a, &b), prec_compare(&b, &a).reverse());
            prop_assert_eq!(prec_compare(&a, &b) == Ordering::Equal, a == b);
            if prec_compare(&a, &b) == Ordering::Less && prec_compare(&b, &c) == Ordering::Less {
                prop_assert_eq!(prec_compare(&a, &c), Ordering::Less);
            }
        }

        #[test]
        fn padding_does_not_change_order(w in 1u64..4, x in 0u64..64, y in 0u64..64) {
            let short = prec_compare(&CandidateTag::from_int(w, x, 6), &CandidateTag::from_int(w, y, 6));
            let long = prec_compare(&CandidateTag::from_int(w, x, 6), &CandidateTag::from_int(w, y, 9));
            prop_assert_eq!(short, long);
        }
    }
}
