#include "matchwelfare/mechanisms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "matchwelfare/matching.hpp"
#include "matchwelfare/rng.hpp"

namespace matchwelfare {

namespace {

// Approximate per-entry footprint of the level hash maps (node + bucket).
constexpr std::uint64_t kBytesPerState = 56;

void require_strict(const ValuationProfile& p, const char* who) {
  if (p.has_ties()) {
    throw refusal_error(std::string(who) + " requires strict preferences; apply break_ties first");
  }
}

std::vector<std::vector<int>> all_preference_orders(const ValuationProfile& p) {
  std::vector<std::vector<int>> pref(p.n);
  for (int i = 0; i < p.n; ++i) pref[i] = preference_order(p, i);
  return pref;
}

MechanismResult finish_from_probs(const ValuationProfile& p, std::string name,
                                  std::vector<double> flat_probs, EvalMethod method,
                                  int distribution_max = 512) {
  const int n = p.n;
  MechanismResult res;
  res.mechanism = std::move(name);
  res.per_agent_utility.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double util = 0.0;
    for (int j = 0; j < n; ++j) util += flat_probs[i * n + j] * p.values[i][j];
    res.per_agent_utility[i] = util;
  }
  double ew = 0.0;
  for (int i = 0; i < n; ++i) ew += res.per_agent_utility[i];
  res.expected_welfare = ew;
  if (n <= distribution_max) {
    AssignmentDistribution d;
    d.n = n;
    d.probs.assign(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d.probs[i][j] = flat_probs[i * n + j];
    }
    res.distribution = std::move(d);
  }
  res.method = std::move(method);
  return res;
}

}  // namespace

MechanismResult rp_exact(const ValuationProfile& p) { return rp_exact(p, RpExactOptions{}); }

MechanismResult rp_exact(const ValuationProfile& p, const RpExactOptions& opts) {
  const int n = p.n;
  require_strict(p, "rp_exact");
  if (n > 32) {
    throw refusal_error("rp_exact state keys hold at most 32 agents; use rp_montecarlo");
  }
  if (opts.size_guard && n > kNExactMax) {
    throw refusal_error("rp_exact refuses n > 12 by default (state space up to 4^n); "
                        "use rp_montecarlo, or disable the size guard for structured profiles");
  }
  const auto pref = all_preference_orders(p);

  // Reach probabilities over states (remaining agents, remaining items),
  // processed level by level: all states at level m have exactly m of each.
  using Level = std::unordered_map<std::uint64_t, double>;
  const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
  Level current;
  current.reserve(4);
  current.emplace((static_cast<std::uint64_t>(full) << 32) | full, 1.0);

  std::vector<double> probs(static_cast<std::size_t>(n) * n, 0.0);
  const std::uint64_t budget_states = opts.state_budget_bytes / kBytesPerState;

  for (int m = n; m >= 1; --m) {
    Level next;
    if (m > 1) next.reserve(current.size() * 2);
    const double inv_m = 1.0 / m;
    for (const auto& [key, reach] : current) {
      const std::uint32_t amask = static_cast<std::uint32_t>(key >> 32);
      const std::uint32_t imask = static_cast<std::uint32_t>(key);
      const double share = reach * inv_m;
      std::uint32_t rest = amask;
      while (rest != 0) {
        const int a = std::countr_zero(rest);
        rest &= rest - 1;
        int top = -1;
        for (int cand : pref[a]) {
          if ((imask >> cand) & 1u) {
            top = cand;
            break;
          }
        }
        probs[static_cast<std::size_t>(a) * n + top] += share;
        if (m > 1) {
          const std::uint64_t child =
              (static_cast<std::uint64_t>(amask & ~(1u << a)) << 32) | (imask & ~(1u << top));
          next[child] += share;
          if (current.size() + next.size() > budget_states) {
            throw budget_error("rp_exact state budget (2 GB) exceeded; use rp_montecarlo");
          }
        }
      }
    }
    current = std::move(next);
  }

  EvalMethod method;
  method.kind = EvalMethod::Kind::Exact;
  method.algorithm = "rp-state-recursion";
  return finish_from_probs(p, "rp", std::move(probs), std::move(method));
}

MechanismResult rp_montecarlo(const ValuationProfile& p, std::uint64_t samples,
                              std::uint64_t seed) {
  const int n = p.n;
  require_strict(p, "rp_montecarlo");
  if (samples == 0) throw std::invalid_argument("rp_montecarlo needs samples >= 1");
  const auto pref = all_preference_orders(p);

  std::vector<double> counts(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::uint64_t> taken((n + 63) / 64);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);

  for (std::uint64_t s = 0; s < samples; ++s) {
    shuffle(order, rng);
    std::fill(taken.begin(), taken.end(), 0);
    for (int pos = 0; pos < n; ++pos) {
      const int a = order[pos];
      for (int cand : pref[a]) {
        if (!((taken[cand >> 6] >> (cand & 63)) & 1u)) {
          taken[cand >> 6] |= std::uint64_t{1} << (cand & 63);
          counts[static_cast<std::size_t>(a) * n + cand] += 1.0;
          break;
        }
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(samples);
  for (double& c : counts) c *= inv;

  EvalMethod method;
  method.kind = EvalMethod::Kind::MonteCarlo;
  method.algorithm = "rp-sampled-orders";
  method.samples = samples;
  method.seed = seed;
  method.ci_radius =
      n * std::sqrt(std::log(200.0) / (2.0 * static_cast<double>(samples)));
  method.rng = kRngName;
  return finish_from_probs(p, "rp", std::move(counts), std::move(method));
}

MechanismResult rp_ordered_fastpath(const ValuationProfile& p) {
  const int n = p.n;
  const std::vector<int> ord = preference_order(p, 0);
  for (int i = 0; i < n; ++i) {
    const auto& row = p.values[i];
    for (int t = 1; t < n; ++t) {
      if (!(row[ord[t - 1]] > row[ord[t]])) {
        throw refusal_error("rp_ordered_fastpath requires a common strict item order across all rows");
      }
    }
  }
  // With identical rankings every dictator order is equivalent to a uniform
  // random one-to-one assignment, so each agent holds every item w.p. 1/n.
  MechanismResult res;
  res.mechanism = "rp";
  res.per_agent_utility.assign(n, 0.0);
  const double inv = 1.0 / n;
  double ew = 0.0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += p.values[i][j];
    res.per_agent_utility[i] = sum * inv;
    ew += res.per_agent_utility[i];
  }
  res.expected_welfare = ew;
  if (n <= 512) {
    AssignmentDistribution d;
    d.n = n;
    d.probs.assign(n, std::vector<double>(n, inv));
    res.distribution = std::move(d);
  }
  res.method.kind = EvalMethod::Kind::Exact;
  res.method.algorithm = "rp-ordered-fastpath";
  return res;
}

Matching serial_dictatorship(const ValuationProfile& p, const std::vector<int>& order) {
  require_strict(p, "serial_dictatorship");
  if (!is_permutation(order, p.n)) {
    throw std::invalid_argument("dictator order must be a permutation of the agents");
  }
  std::vector<char> taken(p.n, 0);
  Matching m;
  m.assignment.assign(p.n, -1);
  for (int a : order) {
    const auto& row = p.values[a];
    int best = -1;
    for (int j = 0; j < p.n; ++j) {
      if (!taken[j] && (best == -1 || row[j] > row[best])) best = j;
    }
    taken[best] = 1;
    m.assignment[a] = best;
  }
  return m;
}

std::vector<Matching> rp_support(const ValuationProfile& p) {
  if (p.n > 8) throw refusal_error("rp_support enumerates n! orders; refusing n > 8");
  require_strict(p, "rp_support");
  std::vector<int> order(p.n);
  std::iota(order.begin(), order.end(), 0);
  std::set<std::vector<int>> seen;
  do {
    seen.insert(serial_dictatorship(p, order).assignment);
  } while (std::next_permutation(order.begin(), order.end()));
  std::vector<Matching> out;
  out.reserve(seen.size());
  for (const auto& a : seen) out.push_back(Matching{a});
  return out;
}

MechanismResult uniform_mechanism(const ValuationProfile& p) {
  const int n = p.n;
  std::vector<double> probs(static_cast<std::size_t>(n) * n, 1.0 / n);
  EvalMethod method;
  method.kind = EvalMethod::Kind::Exact;
  method.algorithm = "uniform-closed-form";
  return finish_from_probs(p, "uniform", std::move(probs), std::move(method));
}

std::array<double, 3> cubic_lottery(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("cubic_lottery needs alpha in [0,1]");
  }
  const double a2 = alpha * alpha;
  const double a3 = a2 * alpha;
  return {(6.0 - 2.0 * a3) / 8.0, (1.0 + 3.0 * a2) / 8.0, (1.0 - 3.0 * a2 + 2.0 * a3) / 8.0};
}

MechanismResult hybrid_mechanism_exact(const ValuationProfile& p) {
  if (p.n != 3) throw refusal_error("hybrid requires n=3");
  require_strict(p, "hybrid_mechanism_exact");
  if (p.normalization != Normalization::UnitRange) {
    throw refusal_error("hybrid requires n=3 unit-range profiles");
  }
  std::array<std::vector<int>, 3> pref;
  std::array<double, 3> alpha;
  for (int i = 0; i < 3; ++i) {
    pref[i] = preference_order(p, i);
    alpha[i] = p.values[i][pref[i][1]];
  }

  std::vector<double> probs(9, 0.0);
  std::array<int, 3> sigma = {0, 1, 2};
  do {
    const int a0 = sigma[0], a1 = sigma[1], a2 = sigma[2];
    const auto lottery = cubic_lottery(alpha[a0]);
    for (int o = 0; o < 3; ++o) {
      const double w = lottery[o] / 6.0;
      if (w == 0.0) continue;
      const int j0 = pref[a0][o];
      // a1 takes its preferred item of the two others, a2 the leftover.
      int j1 = -1, j2 = -1;
      for (int j : pref[a1]) {
        if (j != j0) {
          j1 = j;
          break;
        }
      }
      j2 = 3 - j0 - j1;
      probs[a0 * 3 + j0] += w;
      probs[a1 * 3 + j1] += w;
      probs[a2 * 3 + j2] += w;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  EvalMethod method;
  method.kind = EvalMethod::Kind::Exact;
  method.algorithm = "hybrid-enumeration";
  return finish_from_probs(p, "hm", std::move(probs), std::move(method));
}

Mechanism make_rp() {
  Mechanism m;
  m.name = "rp";
  m.ordinal = m.anonymous = m.neutral = true;
  m.eval_exact = [](const ValuationProfile& p) { return rp_exact(p); };
  m.eval_mc = [](const ValuationProfile& p, std::uint64_t samples, std::uint64_t seed) {
    return rp_montecarlo(p, samples, seed);
  };
  m.support = [](const ValuationProfile& p) { return rp_support(p); };
  return m;
}

Mechanism make_uniform() {
  Mechanism m;
  m.name = "uniform";
  m.ordinal = m.anonymous = m.neutral = true;
  m.eval_exact = [](const ValuationProfile& p) { return uniform_mechanism(p); };
  m.support = [](const ValuationProfile& p) {
    if (p.n > 8) throw refusal_error("uniform support enumerates n! matchings; refusing n > 8");
    std::vector<int> a(p.n);
    std::iota(a.begin(), a.end(), 0);
    std::vector<Matching> out;
    do {
      out.push_back(Matching{a});
    } while (std::next_permutation(a.begin(), a.end()));
    return out;
  };
  return m;
}

Mechanism make_hybrid() {
  Mechanism m;
  m.name = "hm";
  m.ordinal = false;
  m.anonymous = m.neutral = true;
  m.eval_exact = [](const ValuationProfile& p) { return hybrid_mechanism_exact(p); };
  m.support = [](const ValuationProfile& p) {
    if (p.n != 3) throw refusal_error("hybrid requires n=3");
    require_strict(p, "hybrid support");
    std::array<std::vector<int>, 3> pref;
    for (int i = 0; i < 3; ++i) pref[i] = preference_order(p, i);
    std::set<std::vector<int>> seen;
    std::array<int, 3> sigma = {0, 1, 2};
    do {
      const int a0 = sigma[0], a1 = sigma[1], a2 = sigma[2];
      const auto lottery = cubic_lottery(p.values[a0][pref[a0][1]]);
      for (int o = 0; o < 3; ++o) {
        if (lottery[o] == 0.0) continue;
        const int j0 = pref[a0][o];
        int j1 = -1;
        for (int j : pref[a1]) {
          if (j != j0) {
            j1 = j;
            break;
          }
        }
        std::vector<int> a(3);
        a[a0] = j0;
        a[a1] = j1;
        a[a2] = 3 - j0 - j1;
        seen.insert(a);
      }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    std::vector<Matching> out;
    for (const auto& a : seen) out.push_back(Matching{a});
    return out;
  };
  return m;
}

Mechanism make_fixed_dictatorship(std::vector<int> order) {
  Mechanism m;
  m.name = "fixed-dictatorship";
  m.ordinal = true;
  m.anonymous = false;
  m.neutral = true;
  m.eval_exact = [order](const ValuationProfile& p) {
    const Matching match = serial_dictatorship(p, order);
    std::vector<double> probs(static_cast<std::size_t>(p.n) * p.n, 0.0);
    for (int i = 0; i < p.n; ++i) probs[static_cast<std::size_t>(i) * p.n + match.assignment[i]] = 1.0;
    EvalMethod method;
    method.kind = EvalMethod::Kind::Exact;
    method.algorithm = "serial-dictatorship";
    return finish_from_probs(p, "fixed-dictatorship", std::move(probs), std::move(method));
  };
  m.support = [order](const ValuationProfile& p) {
    return std::vector<Matching>{serial_dictatorship(p, order)};
  };
  return m;
}

Mechanism make_optimal_mechanism() {
  Mechanism m;
  m.name = "opt";
  m.ordinal = m.anonymous = m.neutral = false;
  m.eval_exact = [](const ValuationProfile& p) {
    const OptResult opt = optimal_matching(p);
    std::vector<double> probs(static_cast<std::size_t>(p.n) * p.n, 0.0);
    for (int i = 0; i < p.n; ++i) {
      probs[static_cast<std::size_t>(i) * p.n + opt.matching.assignment[i]] = 1.0;
    }
    EvalMethod method;
    method.kind = EvalMethod::Kind::Exact;
    method.algorithm = "hungarian-lex";
    return finish_from_probs(p, "opt", std::move(probs), std::move(method));
  };
  m.support = [](const ValuationProfile& p) {
    return std::vector<Matching>{optimal_matching(p).matching};
  };
  return m;
}

}  // namespace matchwelfare
