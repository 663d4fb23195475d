#include "matchwelfare/n3lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

namespace matchwelfare::n3 {

namespace {

using Order = std::array<int, 3>;
using Triple = std::array<Order, 3>;

const std::array<Order, 6>& six_orders() {
  static const std::array<Order, 6> orders = {
      Order{0, 1, 2}, Order{0, 2, 1}, Order{1, 0, 2},
      Order{1, 2, 0}, Order{2, 0, 1}, Order{2, 1, 0}};
  return orders;
}

int order_index(const Order& o) {
  const auto& all = six_orders();
  for (int t = 0; t < 6; ++t) {
    if (all[t] == o) return t;
  }
  throw std::logic_error("not an order");
}

int triple_key(const Triple& t) {
  return order_index(t[0]) * 36 + order_index(t[1]) * 6 + order_index(t[2]);
}

Triple triple_from_key(int key) {
  const auto& all = six_orders();
  return Triple{all[key / 36], all[(key / 6) % 6], all[key % 6]};
}

// Minimum key over item relabelings (applied to every order elementwise) and
// agent relabelings (permuting the rows).
int canonical_key(const Triple& t) {
  const auto& all = six_orders();
  int best = 6 * 6 * 6;
  for (const Order& sigma : all) {
    Triple relabeled;
    for (int a = 0; a < 3; ++a) {
      for (int pos = 0; pos < 3; ++pos) relabeled[a][pos] = sigma[t[a][pos]];
    }
    for (const Order& tau : all) {
      best = std::min(best, triple_key(Triple{relabeled[tau[0]], relabeled[tau[1]],
                                              relabeled[tau[2]]}));
    }
  }
  return best;
}

struct Evaluator {
  Triple orders;
  N3Mechanism mech;
  double rp_probs[3][3] = {};

  explicit Evaluator(const Triple& t, N3Mechanism m) : orders(t), mech(m) {
    if (mech == N3Mechanism::RP) {
      for (const Order& tau : six_orders()) {
        bool taken[3] = {false, false, false};
        for (int a : tau) {
          for (int item : orders[a]) {
            if (!taken[item]) {
              taken[item] = true;
              rp_probs[a][item] += 1.0 / 6.0;
              break;
            }
          }
        }
      }
    }
  }

  double val(int a, int item, const std::array<double, 3>& alpha) const {
    if (orders[a][0] == item) return 1.0;
    if (orders[a][1] == item) return alpha[a];
    return 0.0;
  }

  double wopt(const std::array<double, 3>& alpha) const {
    double best = 0.0;
    for (const Order& assign : six_orders()) {
      const double w = val(0, assign[0], alpha) + val(1, assign[1], alpha) + val(2, assign[2], alpha);
      best = std::max(best, w);
    }
    return best;
  }

  double ew(const std::array<double, 3>& alpha) const {
    switch (mech) {
      case N3Mechanism::Uniform:
        return (3.0 + alpha[0] + alpha[1] + alpha[2]) / 3.0;
      case N3Mechanism::RP: {
        double w = 0.0;
        for (int a = 0; a < 3; ++a) {
          w += rp_probs[a][orders[a][0]] + rp_probs[a][orders[a][1]] * alpha[a];
        }
        return w;
      }
      case N3Mechanism::HM: {
        double w = 0.0;
        for (const Order& sigma : six_orders()) {
          const int a0 = sigma[0], a1 = sigma[1], a2 = sigma[2];
          const double x = alpha[a0];
          const double x2 = x * x, x3 = x2 * x;
          const double lot[3] = {(6.0 - 2.0 * x3) / 8.0, (1.0 + 3.0 * x2) / 8.0,
                                 (1.0 - 3.0 * x2 + 2.0 * x3) / 8.0};
          for (int o = 0; o < 3; ++o) {
            const int j0 = orders[a0][o];
            int j1 = -1;
            for (int item : orders[a1]) {
              if (item != j0) {
                j1 = item;
                break;
              }
            }
            const int j2 = 3 - j0 - j1;
            const double outcome =
                (o == 0 ? 1.0 : o == 1 ? x : 0.0) + val(a1, j1, alpha) + val(a2, j2, alpha);
            w += lot[o] / 6.0 * outcome;
          }
        }
        return w;
      }
    }
    throw std::logic_error("unknown mechanism");
  }

  double ratio(const std::array<double, 3>& alpha) const { return ew(alpha) / wopt(alpha); }
};

constexpr double kLo = kDeltaB;
constexpr double kHi = 1.0 - kDeltaB;

double golden_section(const Evaluator& ev, std::array<double, 3> alpha, int c, double a,
                      double b, double* out_x) {
  constexpr double invphi = 0.6180339887498949;
  while (b - a > 1e-13) {
    const double c1 = b - invphi * (b - a);
    const double c2 = a + invphi * (b - a);
    alpha[c] = c1;
    const double f1 = ev.ratio(alpha);
    alpha[c] = c2;
    const double f2 = ev.ratio(alpha);
    if (f1 < f2) {
      b = c2;
    } else {
      a = c1;
    }
  }
  const double x = 0.5 * (a + b);
  alpha[c] = x;
  *out_x = x;
  return ev.ratio(alpha);
}

}  // namespace

const char* to_string(N3Mechanism mech) {
  switch (mech) {
    case N3Mechanism::RP: return "rp";
    case N3Mechanism::HM: return "hm";
    case N3Mechanism::Uniform: return "uniform";
  }
  throw std::logic_error("unknown mechanism");
}

N3Mechanism n3_mechanism_from_string(const std::string& s) {
  if (s == "rp") return N3Mechanism::RP;
  if (s == "hm") return N3Mechanism::HM;
  if (s == "uniform") return N3Mechanism::Uniform;
  throw std::invalid_argument("unknown n3 mechanism: " + s);
}

std::vector<OrdinalClassN3> enumerate_classes() {
  std::map<int, int> orbit_count;  // canonical key -> orbit size
  for (int key = 0; key < 216; ++key) {
    orbit_count[canonical_key(triple_from_key(key))] += 1;
  }
  std::vector<OrdinalClassN3> out;
  int index = 0;
  for (const auto& [key, count] : orbit_count) {
    OrdinalClassN3 cls;
    cls.orders = triple_from_key(key);
    cls.index = index++;
    cls.orbit_size = count;
    out.push_back(cls);
  }
  return out;
}

ValuationProfile profile_at(const OrdinalClassN3& cls, const std::array<double, 3>& alpha) {
  std::vector<std::vector<double>> values(3, std::vector<double>(3));
  for (int a = 0; a < 3; ++a) {
    values[a][cls.orders[a][0]] = 1.0;
    values[a][cls.orders[a][1]] = alpha[a];
    values[a][cls.orders[a][2]] = 0.0;
  }
  return make_profile(3, std::move(values), Normalization::UnitRange);
}

double ratio_at(const OrdinalClassN3& cls, N3Mechanism mech, const std::array<double, 3>& alpha) {
  return Evaluator(cls.orders, mech).ratio(alpha);
}

MinimizeResult minimize_ratio(const OrdinalClassN3& cls, N3Mechanism mech, double grid_step,
                              int refine_rounds) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::invalid_argument("grid step must lie in (0, 0.5]");
  }
  if (refine_rounds < 0) throw std::invalid_argument("refine rounds must be >= 0");
  const Evaluator ev(cls.orders, mech);

  const int T = static_cast<int>(std::floor((1.0 - 2.0 * kDeltaB) / grid_step + 1e-12));
  struct Point {
    double value;
    std::array<double, 3> alpha;
  };
  std::vector<Point> best3;
  const auto offer = [&](double value, const std::array<double, 3>& alpha) {
    best3.push_back({value, alpha});
    std::sort(best3.begin(), best3.end(),
              [](const Point& x, const Point& y) { return x.value < y.value; });
    if (best3.size() > 3) best3.pop_back();
  };
  std::array<double, 3> alpha;
  for (int t0 = 0; t0 <= T; ++t0) {
    alpha[0] = kLo + t0 * grid_step;
    for (int t1 = 0; t1 <= T; ++t1) {
      alpha[1] = kLo + t1 * grid_step;
      for (int t2 = 0; t2 <= T; ++t2) {
        alpha[2] = kLo + t2 * grid_step;
        offer(ev.ratio(alpha), alpha);
      }
    }
  }

  std::array<double, 3> best_alpha = best3.front().alpha;
  double best_val = best3.front().value;

  for (const Point& start : best3) {
    std::array<double, 3> cur = start.alpha;
    double cur_val = start.value;
    for (int round = 0; round < refine_rounds; ++round) {
      bool improved = false;
      for (int c = 0; c < 3; ++c) {
        // Mini-grid over the slice (endpoints included), then a golden-section
        // polish around the best cell; slice minima can sit on the boundary.
        constexpr int kCells = 32;
        const double width = (kHi - kLo) / kCells;
        double slice_best_x = cur[c];
        double slice_best_v = cur_val;
        std::array<double, 3> probe = cur;
        for (int t = 0; t <= kCells; ++t) {
          const double x = (t == kCells) ? kHi : kLo + t * width;
          probe[c] = x;
          const double v = ev.ratio(probe);
          if (v < slice_best_v) {
            slice_best_v = v;
            slice_best_x = x;
          }
        }
        double gx = slice_best_x;
        const double ga = std::max(kLo, slice_best_x - width);
        const double gb = std::min(kHi, slice_best_x + width);
        const double gv = golden_section(ev, cur, c, ga, gb, &gx);
        if (gv < slice_best_v) {
          slice_best_v = gv;
          slice_best_x = gx;
        }
        if (slice_best_v < cur_val) {
          cur_val = slice_best_v;
          cur[c] = slice_best_x;
          improved = true;
        }
      }
      if (!improved) break;
    }
    // Snap near-boundary coordinates onto the margin when that does not hurt.
    for (int c = 0; c < 3; ++c) {
      for (double edge : {kLo, kHi}) {
        if (cur[c] != edge && std::abs(cur[c] - edge) < 1e-9) {
          std::array<double, 3> snapped = cur;
          snapped[c] = edge;
          const double v = ev.ratio(snapped);
          if (v <= cur_val + 1e-15) {
            cur = snapped;
            cur_val = v;
          }
        }
      }
    }
    if (cur_val < best_val) {
      best_val = cur_val;
      best_alpha = cur;
    }
  }

  MinimizeResult res;
  res.argmin = best_alpha;
  res.ratio = best_val;
  for (double x : best_alpha) {
    if (x == kLo || x == kHi) res.at_margin = true;
  }
  if (res.at_margin) {
    // Linear Richardson step: the margin-restricted minimum behaves like
    // r(delta) = r0 + c*delta near the boundary.
    const auto remapped = [&](double delta) {
      std::array<double, 3> a = best_alpha;
      for (double& x : a) {
        if (x == kLo) x = delta;
        if (x == kHi) x = 1.0 - delta;
      }
      return a;
    };
    const double r5 = ev.ratio(remapped(1e-5));
    res.ratio_extrapolated = best_val + (best_val - r5) / 9.0;
  } else {
    res.ratio_extrapolated = best_val;
  }
  return res;
}

std::vector<SurfaceRow> ratio_surface(const OrdinalClassN3& cls, N3Mechanism mech,
                                      double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::invalid_argument("grid step must lie in (0, 0.5]");
  }
  const Evaluator ev(cls.orders, mech);
  const int T = static_cast<int>(std::floor((1.0 - 2.0 * kDeltaB) / grid_step + 1e-12));
  std::vector<SurfaceRow> rows;
  rows.reserve(static_cast<std::size_t>(T + 1) * (T + 1) * (T + 1));
  std::array<double, 3> alpha;
  for (int t0 = 0; t0 <= T; ++t0) {
    alpha[0] = kLo + t0 * grid_step;
    for (int t1 = 0; t1 <= T; ++t1) {
      alpha[1] = kLo + t1 * grid_step;
      for (int t2 = 0; t2 <= T; ++t2) {
        alpha[2] = kLo + t2 * grid_step;
        rows.push_back({alpha, ev.ratio(alpha)});
      }
    }
  }
  return rows;
}

int worker_count() {
  if (const char* env = std::getenv("MATCHWELFARE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

SweepResult sweep_all_classes(N3Mechanism mech, double grid_step, int refine_rounds) {
  SweepResult sweep;
  sweep.classes = enumerate_classes();
  sweep.per_class.resize(sweep.classes.size());

  const int workers = std::min<int>(worker_count(), static_cast<int>(sweep.classes.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sweep.classes.size(); ++i) {
      sweep.per_class[i] = minimize_ratio(sweep.classes[i], mech, grid_step, refine_rounds);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= sweep.classes.size()) return;
          sweep.per_class[i] = minimize_ratio(sweep.classes[i], mech, grid_step, refine_rounds);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  sweep.global_class = 0;
  sweep.global_min = sweep.per_class[0].ratio_extrapolated;
  sweep.global_argmin = sweep.per_class[0].argmin;
  for (std::size_t i = 1; i < sweep.per_class.size(); ++i) {
    if (sweep.per_class[i].ratio_extrapolated < sweep.global_min) {
      sweep.global_min = sweep.per_class[i].ratio_extrapolated;
      sweep.global_class = static_cast<int>(i);
      sweep.global_argmin = sweep.per_class[i].argmin;
    }
  }
  return sweep;
}

}  // namespace matchwelfare::n3
