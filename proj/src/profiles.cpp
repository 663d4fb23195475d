#include "matchwelfare/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "matchwelfare/matching.hpp"
#include "matchwelfare/rng.hpp"

namespace matchwelfare {

namespace {

int isqrt_floor(int n) {
  int s = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  while ((s + 1) * (s + 1) <= n) ++s;
  while (s * s > n) --s;
  return s;
}

int lemma6_default_k(int n, int k) { return k == 0 ? isqrt_floor(n) - 1 : k; }

void check_lemma6_params(int n, int k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (k > n - 2) throw std::invalid_argument("k must be <= n-2");
  const double nd = n;
  const double band_min = 2.0 / k - (k + 1.0) / nd;
  const double tail_max = (nd - k - 2.0) / (nd * nd);
  if (!(band_min > tail_max)) {
    throw refusal_error("middle band collides with the tail for this (n, k); increase n or lower k");
  }
}

}  // namespace

ValuationProfile gen_lemma5(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int s = isqrt_floor(n);
  const double nd = n;
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < n; ++i0) {
    auto& row = values[i0];
    if (i0 < s) {
      for (int j0 = 0; j0 <= i0; ++j0) row[j0] = 1.0 - j0 / nd;
      for (int j0 = i0 + 1; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (nd * nd);
    } else {
      row[0] = 1.0;
      for (int j0 = 1; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (nd * nd);
    }
  }
  return make_profile(n, std::move(values), Normalization::UnitRange);
}

ValuationProfile gen_lemma6(int n, int k) {
  k = lemma6_default_k(n, k);
  check_lemma6_params(n, k);
  const double nd = n;
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < n; ++i0) {
    auto& row = values[i0];
    const int top0 = (i0 <= k) ? i0 : 0;  // item i for the first k+1 agents, item 1 after
    row[top0] = 1.0;
    for (int j0 = 0; j0 <= k; ++j0) {
      if (j0 == top0) continue;
      row[j0] = 2.0 / k - (j0 + 1.0) / nd;
    }
    for (int j0 = k + 1; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (nd * nd);
  }
  return make_profile(n, std::move(values), Normalization::UnitRange);
}

ValuationProfile gen_lemma6_misreport(int n, int k, int agent) {
  k = lemma6_default_k(n, k);
  ValuationProfile p = gen_lemma6(n, k);
  if (agent < 2 || agent > k + 1) {
    throw std::invalid_argument("misreporting agent must satisfy 2 <= agent <= k+1 (1-indexed)");
  }
  p.values[agent - 1] = p.values[k + 1];  // copy of row k+2
  return p;
}

ValuationProfile gen_lemma8(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int s = isqrt_floor(n);
  if (s * s != n) throw refusal_error("n must be a perfect square");
  const double nd = n;
  const double n2 = nd * nd;
  const double n5 = n2 * n2 * nd;
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < s; ++i0) {
    for (int l = 0; l < s; ++l) {
      auto& row = values[i0 + l * s];
      if (l == 0) {
        for (int j0 = 0; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (10.0 * n5);
      } else {
        for (int j0 = 0; j0 < s; ++j0) row[j0] = 1.0 / s - (j0 + 1.0) / (10.0 * n2);
        for (int j0 = s; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (10.0 * n5);
      }
      double others = 0.0;
      for (int j0 = 0; j0 < n; ++j0) {
        if (j0 != i0) others += row[j0];
      }
      row[i0] = 1.0 - others;
    }
  }
  return make_profile(n, std::move(values), Normalization::UnitSum);
}

ValuationProfile gen_lemma9(int n, int k) {
  k = lemma6_default_k(n, k);
  check_lemma6_params(n, k);
  const double nd = n;
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < n; ++i0) {
    auto& row = values[i0];
    const int top0 = (i0 <= k) ? i0 : 0;
    for (int j0 = 0; j0 <= k; ++j0) {
      if (j0 == top0) continue;
      row[j0] = 2.0 / (10.0 * k) - (j0 + 1.0) / (10.0 * nd);
    }
    for (int j0 = k + 1; j0 < n; ++j0) row[j0] = (nd - 1.0 - j0) / (10.0 * nd * nd);
    double others = 0.0;
    for (int j0 = 0; j0 < n; ++j0) {
      if (j0 != top0) others += row[j0];
    }
    row[top0] = 1.0 - others;
  }
  return make_profile(n, std::move(values), Normalization::UnitSum);
}

ValuationProfile gen_n3_rp_worst(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("n3 worst case needs 0 < eps < 1/2");
  std::vector<std::vector<double>> values = {
      {1.0, 1.0 - eps, 0.0}, {1.0, eps, 0.0}, {1.0, eps, 0.0}};
  return make_profile(3, std::move(values), Normalization::UnitRange);
}

ValuationProfile gen_quasicombinatorial(int n, double eps, int k, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("quasi-combinatorial family needs 1 <= k <= n");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("needs 0 < eps < 1/2");
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < n; ++i0) {
    auto& row = values[i0];
    const int high = (i0 < k) ? i0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    for (;;) {  // redraw the whole row on (vanishingly rare) exact collisions
      for (int j0 = 0; j0 < n; ++j0) {
        if (j0 == high) {
          row[j0] = 1.0;
          continue;
        }
        double v;
        do {
          v = rng.uniform01() * eps;
        } while (v == 0.0);
        row[j0] = v;
      }
      if (n > 1) {
        int arg_min = (high == 0) ? 1 : 0;
        for (int j0 = 0; j0 < n; ++j0) {
          if (j0 != high && row[j0] < row[arg_min]) arg_min = j0;
        }
        row[arg_min] = 0.0;
      }
      std::vector<double> sorted = row;
      std::sort(sorted.begin(), sorted.end());
      bool dup = false;
      for (int j0 = 0; j0 + 1 < n; ++j0) {
        if (sorted[j0] == sorted[j0 + 1]) dup = true;
      }
      if (!dup) break;
    }
  }
  return make_profile(n, std::move(values), Normalization::UnitRange);
}

bool is_quasicombinatorial(const ValuationProfile& p, double eps) {
  for (const auto& row : p.values) {
    for (double v : row) {
      const bool low = v >= 0.0 && v < eps;
      const bool high = v > 1.0 - eps && v <= 1.0;
      if (!low && !high) return false;
    }
  }
  return true;
}

ValuationProfile random_profile(int n, Normalization norm, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> values(n, std::vector<double>(n));
  for (int i0 = 0; i0 < n; ++i0) {
    auto& row = values[i0];
    for (;;) {
      for (int j0 = 0; j0 < n; ++j0) {
        double v;
        do {
          v = rng.uniform01();
        } while (v == 0.0);
        row[j0] = v;
      }
      switch (norm) {
        case Normalization::UnitRange: {
          const double mx = *std::max_element(row.begin(), row.end());
          const double mn = *std::min_element(row.begin(), row.end());
          if (n == 1) {
            row[0] = 1.0;
          } else {
            if (mx == mn) continue;
            for (double& v : row) v = (v - mn) / (mx - mn);
          }
          break;
        }
        case Normalization::UnitSum: {
          double sum = 0.0;
          for (double v : row) sum += v;
          for (double& v : row) v /= sum;
          break;
        }
        case Normalization::ZeroOne: {
          const double mx = *std::max_element(row.begin(), row.end());
          for (double& v : row) v /= mx;
          break;
        }
      }
      std::vector<double> sorted = row;
      std::sort(sorted.begin(), sorted.end());
      bool dup = false;
      for (int j0 = 0; j0 + 1 < n; ++j0) {
        if (sorted[j0] == sorted[j0 + 1]) dup = true;
      }
      if (!dup) break;
    }
  }
  return make_profile(n, std::move(values), norm);
}

ReduceResult quasicombinatorial_reduce(const ValuationProfile& p, double eps,
                                       const Mechanism& evaluator) {
  if (!(evaluator.ordinal && evaluator.anonymous && evaluator.neutral)) {
    throw refusal_error("reduction requires an ordinal, anonymous, neutral evaluator");
  }
  if (!evaluator.eval_exact) throw refusal_error("reduction requires exact evaluation");
  if (p.normalization != Normalization::UnitRange) {
    throw std::invalid_argument("reduction is defined for unit-range profiles");
  }
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("needs 0 < eps < 1/2");

  const Matching mu_star = optimal_matching(p).matching;
  const auto ratio_of = [&](const ValuationProfile& q) {
    const double denom = social_welfare(q, mu_star);
    if (!(denom > 0.0)) throw validation_error("reference matching lost positive welfare");
    return evaluator.eval_exact(q).expected_welfare / denom;
  };

  ValuationProfile cur = p;
  ReduceResult out;
  out.ratio_trajectory.push_back(ratio_of(cur));

  std::size_t middle_total = 0;
  for (const auto& row : cur.values) {
    for (double v : row) {
      if (v >= eps && v <= 1.0 - eps) ++middle_total;
    }
  }

  for (std::size_t step = 0; step <= middle_total + 1; ++step) {
    int target_row = -1;
    for (int i = 0; i < cur.n && target_row < 0; ++i) {
      for (double v : cur.values[i]) {
        if (v >= eps && v <= 1.0 - eps) {
          target_row = i;
          break;
        }
      }
    }
    if (target_row < 0) {
      out.profile = std::move(cur);
      return out;
    }
    if (step == middle_total + 1) break;  // should have terminated by now

    const auto& row = cur.values[target_row];
    double lbar = 0.0, rbar = 1.0, lo = 2.0, hi = -1.0;
    for (double v : row) {
      if (v < eps) lbar = std::max(lbar, v);
      if (v > 1.0 - eps) rbar = std::min(rbar, v);
      if (v >= eps && v <= 1.0 - eps) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    const double x_down = (lbar + eps) / 2.0 - lo;
    const double x_up = (rbar + 1.0 - eps) / 2.0 - hi;

    const auto shifted = [&](double x) {
      ValuationProfile q = cur;
      for (double& v : q.values[target_row]) {
        if (v >= eps && v <= 1.0 - eps) v += x;
      }
      return q;
    };
    ValuationProfile q_down = shifted(x_down);
    ValuationProfile q_up = shifted(x_up);
    const double g_down = ratio_of(q_down);
    const double g_up = ratio_of(q_up);

    const double g_prev = out.ratio_trajectory.back();
    const double g_next = std::min(g_down, g_up);
    if (g_next > g_prev + kTauReduce) {
      throw std::logic_error("reduction step increased the welfare ratio");
    }
    cur = (g_down <= g_up) ? std::move(q_down) : std::move(q_up);
    out.ratio_trajectory.push_back(g_next);
  }
  throw std::logic_error("reduction failed to terminate within its step budget");
}

ValuationProfile break_ties(const ValuationProfile& p, const std::vector<int>& priority,
                            double delta) {
  if (!is_permutation(priority, p.n)) {
    throw std::invalid_argument("priority must be a permutation of the items");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n; ++i) {
    std::vector<double> sorted = p.values[i];
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j + 1 < p.n; ++j) {
      const double gap = sorted[j + 1] - sorted[j];
      if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
  }
  if (delta > min_gap / 2.0) {
    throw std::invalid_argument("delta too large; tie-breaking would reorder non-tied values");
  }

  std::vector<int> priority_rank(p.n);
  for (int r = 0; r < p.n; ++r) priority_rank[priority[r]] = r;

  ValuationProfile out = p;
  for (int i = 0; i < p.n; ++i) {
    std::map<double, std::vector<int>> groups;
    for (int j = 0; j < p.n; ++j) groups[p.values[i][j]].push_back(j);
    for (auto& [value, items] : groups) {
      if (items.size() < 2) continue;
      std::sort(items.begin(), items.end(),
                [&](int a, int b) { return priority_rank[a] < priority_rank[b]; });
      const int g = static_cast<int>(items.size());
      for (int q = 0; q < g; ++q) {
        out.values[i][items[q]] = value + (g - 1 - q) * delta / p.n;
      }
    }
  }
  out.ties_flagged = false;
  return out;
}

ValuationProfile unitsum_to_unitrange_embed(const ValuationProfile& p) {
  if (p.normalization != Normalization::UnitSum) {
    throw std::invalid_argument("embed expects a unit-sum profile");
  }
  const int n = p.n;
  const double n5 = std::pow(static_cast<double>(n), 5.0);
  std::vector<std::vector<double>> values(n + 1, std::vector<double>(n + 1));
  for (int i = 0; i < n; ++i) {
    auto row = p.values[i];
    int arg_min = 0;
    for (int j = 1; j < n; ++j) {
      if (row[j] < row[arg_min]) arg_min = j;
    }
    row[arg_min] = 0.0;
    for (int j = 0; j < n; ++j) values[i][j] = row[j];
    values[i][n] = 1.0;
  }
  for (int j = 0; j < n; ++j) values[n][j] = j / n5;
  values[n][n] = 1.0;
  ValuationProfile out = make_profile(n + 1, std::move(values), Normalization::UnitRange);
  out.ties_flagged = out.has_ties();
  return out;
}

ValuationProfile zeroone_to_unitrange(const ValuationProfile& p) {
  if (p.normalization != Normalization::ZeroOne) {
    throw std::invalid_argument("expects a zero-one profile");
  }
  ValuationProfile out = p;
  for (int i = 0; i < p.n; ++i) {
    auto& row = out.values[i];
    int arg_min = 0;
    for (int j = 1; j < p.n; ++j) {
      if (row[j] < row[arg_min]) arg_min = j;
    }
    row[arg_min] = 0.0;
  }
  out.normalization = Normalization::UnitRange;
  return out;
}

Mechanism anonymize(const Mechanism& base) {
  if (!base.eval_exact) throw std::invalid_argument("anonymize needs a base exact evaluation");
  Mechanism m;
  m.name = "anonymized(" + base.name + ")";
  m.ordinal = base.ordinal;
  m.anonymous = true;
  m.neutral = base.neutral;

  const auto relabeled_probs = [](const Mechanism& b, const ValuationProfile& p,
                                  const std::vector<int>& pi) {
    ValuationProfile q = p;
    for (int i = 0; i < p.n; ++i) q.values[pi[i]] = p.values[i];
    const MechanismResult r = b.eval_exact(q);
    if (!r.distribution) throw std::logic_error("anonymize needs base distributions");
    std::vector<double> probs(static_cast<std::size_t>(p.n) * p.n);
    for (int i = 0; i < p.n; ++i) {
      for (int j = 0; j < p.n; ++j) probs[static_cast<std::size_t>(i) * p.n + j] = r.distribution->probs[pi[i]][j];
    }
    return probs;
  };

  m.eval_exact = [base, relabeled_probs](const ValuationProfile& p) {
    if (p.n > 6) {
      throw refusal_error("exact anonymization averages n! relabelings; refusing n > 6, "
                          "use the Monte-Carlo mode");
    }
    std::vector<int> pi(p.n);
    std::iota(pi.begin(), pi.end(), 0);
    std::vector<double> acc(static_cast<std::size_t>(p.n) * p.n, 0.0);
    std::uint64_t count = 0;
    do {
      const auto probs = relabeled_probs(base, p, pi);
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += probs[t];
      ++count;
    } while (std::next_permutation(pi.begin(), pi.end()));
    for (double& v : acc) v /= static_cast<double>(count);

    MechanismResult res;
    res.mechanism = "anonymized(" + base.name + ")";
    res.per_agent_utility.assign(p.n, 0.0);
    double ew = 0.0;
    for (int i = 0; i < p.n; ++i) {
      double util = 0.0;
      for (int j = 0; j < p.n; ++j) util += acc[static_cast<std::size_t>(i) * p.n + j] * p.values[i][j];
      res.per_agent_utility[i] = util;
      ew += util;
    }
    res.expected_welfare = ew;
    AssignmentDistribution d;
    d.n = p.n;
    d.probs.assign(p.n, std::vector<double>(p.n));
    for (int i = 0; i < p.n; ++i) {
      for (int j = 0; j < p.n; ++j) d.probs[i][j] = acc[static_cast<std::size_t>(i) * p.n + j];
    }
    res.distribution = std::move(d);
    res.method.kind = EvalMethod::Kind::Exact;
    res.method.algorithm = "anonymize-average";
    return res;
  };

  m.eval_mc = [base, relabeled_probs](const ValuationProfile& p, std::uint64_t samples,
                                      std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("needs samples >= 1");
    SplitMix64 rng(seed);
    std::vector<int> pi(p.n);
    std::iota(pi.begin(), pi.end(), 0);
    std::vector<double> acc(static_cast<std::size_t>(p.n) * p.n, 0.0);
    for (std::uint64_t s = 0; s < samples; ++s) {
      shuffle(pi, rng);
      const auto probs = relabeled_probs(base, p, pi);
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += probs[t];
    }
    for (double& v : acc) v /= static_cast<double>(samples);

    MechanismResult res;
    res.mechanism = "anonymized(" + base.name + ")";
    res.per_agent_utility.assign(p.n, 0.0);
    double ew = 0.0;
    for (int i = 0; i < p.n; ++i) {
      double util = 0.0;
      for (int j = 0; j < p.n; ++j) util += acc[static_cast<std::size_t>(i) * p.n + j] * p.values[i][j];
      res.per_agent_utility[i] = util;
      ew += util;
    }
    res.expected_welfare = ew;
    AssignmentDistribution d;
    d.n = p.n;
    d.probs.assign(p.n, std::vector<double>(p.n));
    for (int i = 0; i < p.n; ++i) {
      for (int j = 0; j < p.n; ++j) d.probs[i][j] = acc[static_cast<std::size_t>(i) * p.n + j];
    }
    res.distribution = std::move(d);
    res.method.kind = EvalMethod::Kind::MonteCarlo;
    res.method.algorithm = "anonymize-sampled";
    res.method.samples = samples;
    res.method.seed = seed;
    res.method.ci_radius =
        p.n * std::sqrt(std::log(200.0) / (2.0 * static_cast<double>(samples)));
    res.method.rng = kRngName;
    return res;
  };
  return m;
}

ValuationProfile generate(const GeneratorSpec& spec) {
  if (spec.family == "lemma5") return gen_lemma5(spec.n);
  if (spec.family == "lemma6") return gen_lemma6(spec.n, spec.k);
  if (spec.family == "lemma8") return gen_lemma8(spec.n);
  if (spec.family == "lemma9") return gen_lemma9(spec.n, spec.k);
  if (spec.family == "n3worst") return gen_n3_rp_worst(spec.eps);
  if (spec.family == "quasirandom") {
    return gen_quasicombinatorial(spec.n, spec.eps, spec.k, spec.seed);
  }
  throw std::invalid_argument("unknown profile family: " + spec.family);
}

}  // namespace matchwelfare
