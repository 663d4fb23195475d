#include "matchwelfare/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace matchwelfare {

namespace {

// Shortest-augmenting-path Hungarian algorithm on cost = -value, 1-indexed
// with a sentinel column 0.  Returns the matched row for every column plus
// the dual potentials, which certify optimality (value[i][j] <= u[i] + v[j]
// with equality on matched edges, up to rounding).
struct HungarianOut {
  std::vector<int> row_of_col;  // 1-indexed
  std::vector<double> u, v;
};

HungarianOut hungarian_min(const std::vector<std::vector<double>>& a, int n) {
  const double kInf = std::numeric_limits<double>::infinity();
  HungarianOut out;
  out.u.assign(n + 1, 0.0);
  out.v.assign(n + 1, 0.0);
  out.row_of_col.assign(n + 1, 0);
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    out.row_of_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = out.row_of_col[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - out.u[i0] - out.v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          out.u[out.row_of_col[j]] += delta;
          out.v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (out.row_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      out.row_of_col[j0] = out.row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return out;
}

// Lexicographic refinement.  Every maximum-welfare matching uses only edges
// that are tight for the optimal duals (complementary slackness), so the
// lex-smallest optimal assignment is the lex-smallest perfect matching of the
// tight subgraph.  Fix agents in index order; give each the smallest tight
// item for which the rest of the graph still has a perfect matching, checked
// with one augmenting-path search per attempt.
struct LexState {
  const std::vector<std::vector<int>>& tight;
  std::vector<int> match_agent, match_item;
  std::vector<char> fixed_agent, fixed_item;

  bool augment(int a, std::vector<char>& vis_item) {
    for (int j : tight[a]) {
      if (fixed_item[j] || vis_item[j]) continue;
      vis_item[j] = 1;
      const int holder = match_item[j];
      if (holder == -1 || (!fixed_agent[holder] && augment(holder, vis_item))) {
        match_item[j] = a;
        match_agent[a] = j;
        return true;
      }
    }
    return false;
  }

  bool try_give(int i, int j, int n) {
    if (match_agent[i] == j) {
      fixed_agent[i] = fixed_item[j] = 1;
      return true;
    }
    const int c = match_agent[i];
    const int d = match_item[j];
    match_agent[i] = j;
    match_item[j] = i;
    match_item[c] = -1;
    match_agent[d] = -1;
    fixed_agent[i] = fixed_item[j] = 1;
    std::vector<char> vis(n, 0);
    if (augment(d, vis)) return true;
    fixed_agent[i] = fixed_item[j] = 0;
    match_agent[i] = c;
    match_item[c] = i;
    match_agent[d] = j;
    match_item[j] = d;
    return false;
  }
};

}  // namespace

OptResult optimal_matching(const ValuationProfile& p) {
  const int n = p.n;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cost[i][j] = -p.values[i][j];
      scale = std::max(scale, std::abs(p.values[i][j]));
    }
  }
  const HungarianOut h = hungarian_min(cost, n);

  const double tight_tol =
      64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) * scale;
  std::vector<std::vector<int>> tight(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(cost[i][j] - h.u[i + 1] - h.v[j + 1]) <= tight_tol) {
        tight[i].push_back(j);  // ascending by construction
      }
    }
  }

  LexState st{tight, std::vector<int>(n, -1), std::vector<int>(n, -1),
              std::vector<char>(n, 0), std::vector<char>(n, 0)};
  for (int j = 1; j <= n; ++j) {
    st.match_item[j - 1] = h.row_of_col[j] - 1;
    st.match_agent[h.row_of_col[j] - 1] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int j : tight[i]) {
      if (st.fixed_item[j]) continue;
      if (st.try_give(i, j, n)) {
        placed = true;
        break;
      }
    }
    if (!placed) throw std::logic_error("tight subgraph lost its perfect matching");
  }

  OptResult res;
  res.matching.assignment = st.match_agent;
  res.welfare = social_welfare(p, res.matching);
  return res;
}

OptResult optimal_matching_bruteforce(const ValuationProfile& p) {
  if (p.n > 10) {
    throw refusal_error("brute force enumerates n! matchings; refusing n > 10, use optimal_matching");
  }
  std::vector<int> perm(p.n);
  std::iota(perm.begin(), perm.end(), 0);
  OptResult best;
  best.welfare = -std::numeric_limits<double>::infinity();
  do {
    Matching m{perm};
    const double w = social_welfare(p, m);
    if (w > best.welfare) {  // strict: first permutation in lex order wins ties
      best.welfare = w;
      best.matching = m;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace matchwelfare
