#include "matchwelfare/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace matchwelfare {

std::string to_string(Normalization norm) {
  switch (norm) {
    case Normalization::UnitRange: return "unit-range";
    case Normalization::UnitSum: return "unit-sum";
    case Normalization::ZeroOne: return "zero-one";
  }
  throw std::invalid_argument("unknown normalization");
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "unit-range") return Normalization::UnitRange;
  if (s == "unit-sum") return Normalization::UnitSum;
  if (s == "zero-one") return Normalization::ZeroOne;
  throw std::invalid_argument("unknown normalization: " + s);
}

bool ValuationProfile::row_has_ties(int agent) const {
  std::vector<double> row = values.at(agent);
  std::sort(row.begin(), row.end());
  for (int j = 0; j + 1 < n; ++j) {
    if (row[j] == row[j + 1]) return true;
  }
  return false;
}

bool ValuationProfile::has_ties() const {
  for (int i = 0; i < n; ++i) {
    if (row_has_ties(i)) return true;
  }
  return false;
}

ValuationProfile make_profile(int n, std::vector<std::vector<double>> values,
                              Normalization normalization, bool ties_flagged) {
  if (n < 1) throw std::invalid_argument("profile needs n >= 1");
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("profile needs exactly n rows");
  }
  for (const auto& row : values) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("every row needs exactly n values");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("values must be finite");
    }
  }
  ValuationProfile p;
  p.n = n;
  p.values = std::move(values);
  p.normalization = normalization;
  p.ties_flagged = ties_flagged;
  return p;
}

ValuationProfile make_profile(std::vector<std::vector<double>> values,
                              Normalization normalization, bool ties_flagged) {
  const int n = static_cast<int>(values.size());
  return make_profile(n, std::move(values), normalization, ties_flagged);
}

std::vector<Violation> validate_profile(const ValuationProfile& p) {
  std::vector<Violation> out;
  for (int i = 0; i < p.n; ++i) {
    const auto& row = p.values[i];
    const double mx = *std::max_element(row.begin(), row.end());
    const double mn = *std::min_element(row.begin(), row.end());
    switch (p.normalization) {
      case Normalization::UnitRange:
        if (std::abs(mx - 1.0) > kTauNorm) out.push_back({i + 1, "max != 1", std::abs(mx - 1.0)});
        // A 1x1 profile cannot have both max 1 and min 0.
        if (p.n > 1 && std::abs(mn) > kTauNorm) out.push_back({i + 1, "min != 0", std::abs(mn)});
        break;
      case Normalization::UnitSum: {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (std::abs(sum - 1.0) > kTauNorm) out.push_back({i + 1, "sum != 1", std::abs(sum - 1.0)});
        if (mn < -kTauNorm) out.push_back({i + 1, "negative entry", -mn});
        break;
      }
      case Normalization::ZeroOne: {
        if (std::abs(mx - 1.0) > kTauNorm) out.push_back({i + 1, "max != 1", std::abs(mx - 1.0)});
        double worst = 0.0;
        for (double v : row) {
          if (v < 0.0) worst = std::max(worst, -v);
          if (v > 1.0) worst = std::max(worst, v - 1.0);
        }
        if (worst > kTauNorm) out.push_back({i + 1, "entry outside [0,1]", worst});
        break;
      }
    }
    if (!p.ties_flagged && p.row_has_ties(i)) out.push_back({i + 1, "ties", 0.0});
  }
  return out;
}

bool is_permutation(const std::vector<int>& assignment, int n) {
  if (static_cast<int>(assignment.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int j : assignment) {
    if (j < 0 || j >= n || seen[j]) return false;
    seen[j] = 1;
  }
  return true;
}

double social_welfare(const ValuationProfile& p, const Matching& m) {
  if (!is_permutation(m.assignment, p.n)) {
    throw std::invalid_argument("matching is not a permutation of the items");
  }
  double w = 0.0;
  for (int i = 0; i < p.n; ++i) w += p.values[i][m.assignment[i]];
  return w;
}

std::vector<int> preference_order(const ValuationProfile& p, int agent) {
  if (agent < 0 || agent >= p.n) throw std::invalid_argument("agent index out of range");
  if (p.row_has_ties(agent)) {
    throw refusal_error("row has tied values; apply break_ties first");
  }
  std::vector<int> order(p.n);
  std::iota(order.begin(), order.end(), 0);
  const auto& row = p.values[agent];
  std::sort(order.begin(), order.end(), [&](int a, int b) { return row[a] > row[b]; });
  return order;
}

bool is_doubly_stochastic(const AssignmentDistribution& d, double tol) {
  if (static_cast<int>(d.probs.size()) != d.n) return false;
  std::vector<double> col(d.n, 0.0);
  for (int i = 0; i < d.n; ++i) {
    if (static_cast<int>(d.probs[i].size()) != d.n) return false;
    double row_sum = 0.0;
    for (int j = 0; j < d.n; ++j) {
      const double v = d.probs[i][j];
      if (v < -tol || v > 1.0 + tol) return false;
      row_sum += v;
      col[j] += v;
    }
    if (std::abs(row_sum - 1.0) > tol) return false;
  }
  for (int j = 0; j < d.n; ++j) {
    if (std::abs(col[j] - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace matchwelfare
