#pragma once

#include <cstdint>
#include <vector>

#include "l2sc/errors.hpp"

namespace l2sc {

using Labels = std::vector<int>;

// Cross-tabulation of two labelings over the same n samples. Label values
// are densified, so arbitrary nonnegative ids are fine.
struct Contingency {
  std::vector<std::vector<std::int64_t>> counts;  // [pred class][true class]
  std::vector<std::int64_t> pred_sizes;
  std::vector<std::int64_t> true_sizes;
  std::int64_t n = 0;
};

Contingency build_contingency(const Labels& pred, const Labels& truth);

/// Fraction of samples landing in their cluster's majority class.
double purity(const Labels& pred, const Labels& truth);

/// Normalized mutual information I(pred; truth) / sqrt(H(pred) H(truth)),
/// natural log. Labelings identical up to permutation score exactly 1.0;
/// otherwise a zero entropy on either side scores 0.
double nmi(const Labels& pred, const Labels& truth);

/// Fraction of sample pairs on which the two labelings agree
/// (together-together or apart-apart).
double rand_index(const Labels& pred, const Labels& truth);

}  // namespace l2sc
