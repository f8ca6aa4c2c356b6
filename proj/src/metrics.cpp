#include "l2sc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "l2sc/errors.hpp"

namespace l2sc {

namespace {

std::vector<int> densify(const Labels& raw, size_t* num_classes) {
  std::unordered_map<int, int> id;
  std::vector<int> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0) throw InvalidInput("metrics: negative label");
    auto [it, _] = id.try_emplace(raw[i], static_cast<int>(id.size()));
    out[i] = it->second;
  }
  *num_classes = id.size();
  return out;
}

std::int64_t pairs2(std::int64_t m) { return m * (m - 1) / 2; }

}  // namespace

Contingency build_contingency(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw InvalidInput("metrics: labelings must be nonempty and equal-length");
  size_t np = 0, nt = 0;
  std::vector<int> p = densify(pred, &np);
  std::vector<int> t = densify(truth, &nt);

  Contingency c;
  c.n = static_cast<std::int64_t>(pred.size());
  c.counts.assign(np, std::vector<std::int64_t>(nt, 0));
  c.pred_sizes.assign(np, 0);
  c.true_sizes.assign(nt, 0);
  for (size_t i = 0; i < p.size(); ++i) {
    ++c.counts[p[i]][t[i]];
    ++c.pred_sizes[p[i]];
    ++c.true_sizes[t[i]];
  }
  return c;
}

double purity(const Labels& pred, const Labels& truth) {
  Contingency c = build_contingency(pred, truth);
  std::int64_t hit = 0;
  for (const auto& row : c.counts)
    hit += *std::max_element(row.begin(), row.end());
  return static_cast<double>(hit) / static_cast<double>(c.n);
}

double nmi(const Labels& pred, const Labels& truth) {
  Contingency c = build_contingency(pred, truth);

  // Identical up to a relabeling means every cluster maps onto exactly one
  // class and vice versa; score that 1.0 outright so the identity case is
  // exact rather than 1 - epsilon.
  bool bijective = c.counts.size() == c.true_sizes.size();
  if (bijective) {
    std::vector<bool> used(c.true_sizes.size(), false);
    for (const auto& row : c.counts) {
      int nonzero = -1;
      for (size_t j = 0; j < row.size(); ++j)
        if (row[j] > 0) {
          if (nonzero >= 0 || used[j]) {
            nonzero = -2;
            break;
          }
          nonzero = static_cast<int>(j);
        }
      if (nonzero < 0) {
        bijective = false;
        break;
      }
      used[nonzero] = true;
    }
    if (bijective) return 1.0;
  }

  const double n = static_cast<double>(c.n);
  double hp = 0.0, ht = 0.0, mi = 0.0;
  for (std::int64_t a : c.pred_sizes)
    if (a > 0) hp -= (a / n) * std::log(a / n);
  for (std::int64_t b : c.true_sizes)
    if (b > 0) ht -= (b / n) * std::log(b / n);
  if (hp == 0.0 || ht == 0.0) return 0.0;

  for (size_t i = 0; i < c.counts.size(); ++i)
    for (size_t j = 0; j < c.counts[i].size(); ++j) {
      std::int64_t nij = c.counts[i][j];
      if (nij > 0)
        mi += (nij / n) *
              std::log((n * static_cast<double>(nij)) /
                       (static_cast<double>(c.pred_sizes[i]) *
                        static_cast<double>(c.true_sizes[j])));
    }
  double v = mi / std::sqrt(hp * ht);
  return std::clamp(v, 0.0, 1.0);
}

double rand_index(const Labels& pred, const Labels& truth) {
  Contingency c = build_contingency(pred, truth);
  if (c.n < 2) throw InvalidInput("rand_index: need at least 2 samples");

  // Pair counts stay in exact integer arithmetic until the final division.
  std::int64_t same_both = 0, same_pred = 0, same_true = 0;
  for (const auto& row : c.counts)
    for (std::int64_t nij : row) same_both += pairs2(nij);
  for (std::int64_t a : c.pred_sizes) same_pred += pairs2(a);
  for (std::int64_t b : c.true_sizes) same_true += pairs2(b);

  std::int64_t total = pairs2(c.n);
  std::int64_t disagreements = same_pred + same_true - 2 * same_both;
  return static_cast<double>(total - disagreements) /
         static_cast<double>(total);
}

}  // namespace l2sc
