#pragma once

// Brute-force reference implementations. Nothing here calls into the engine's
// numerical kernels; only plain data types cross the boundary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// O(n^2) maximization dominance filter.
inline bool dominates(const Vec& u, const Vec& v) {
  bool strict = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < v[i]) return false;
    if (u[i] > v[i]) strict = true;
  }
  return strict;
}

inline std::vector<std::size_t> pairwise_filter(const std::vector<Vec>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dom = false;
    for (std::size_t j = 0; j < pts.size() && !dom; ++j) dom = j != i && dominates(pts[j], pts[i]);
    if (!dom) out.push_back(i);
  }
  return out;
}

// Bell numbers from the Bell triangle.
inline std::vector<unsigned long long> bell_numbers(std::size_t n_max) {
  std::vector<unsigned long long> bell{1};
  std::vector<unsigned long long> row{1};
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::vector<unsigned long long> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;  // bell[n] = B_n
}

// All set partitions of {0..n-1} as lists of member lists, by recursive insertion.
inline std::vector<std::vector<std::vector<std::size_t>>> partitions(std::size_t n) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::vector<std::size_t>> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(a);
      rec(a + 1);
      cur[b].pop_back();
    }
    cur.push_back({a});
    rec(a + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

// E1 by its power series in long double; adequate for chi up to ~30.
inline double e1_series(double chi) {
  const long double x = chi;
  long double sum = 0.0L;
  long double term = 1.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -x / k;
    const long double add = -term / k;
    sum += add;
    if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(-0.57721566490153286060651209L - std::log(x) + sum);
}

// Theis head change at (x, y, t) for piecewise-constant well rates, written
// directly from the superposition formula. rates[k][n] in m^3/s.
struct TheisWell {
  double x;
  double y;
};

inline double theis_head(const std::vector<TheisWell>& wells, const std::vector<Vec>& rates, double dt, double S,
                         double T, double x, double y, double t, double r_self) {
  double h = 0.0;
  for (std::size_t k = 0; k < wells.size(); ++k) {
    double r = std::hypot(x - wells[k].x, y - wells[k].y);
    if (r == 0.0) r = r_self;
    for (std::size_t n = 0; n < rates[k].size(); ++n) {
      const double start = static_cast<double>(n) * dt;
      if (t <= start) continue;
      const double dq = rates[k][n] - (n == 0 ? 0.0 : rates[k][n - 1]);
      const double chi = r * r * S / (4.0 * T * (t - start));
      h += dq / (4.0 * M_PI * T) * e1_series(chi);
    }
  }
  return h;
}

// maximize c.x s.t. A x <= b, lo <= x <= hi, by enumerating every vertex
// (n of the constraints active) for n <= 3.
struct LpOracleResult {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();
  Vec x;
};

inline LpOracleResult lp_vertex_enumeration(const Vec& c, const std::vector<Vec>& A, const Vec& b, const Vec& lo,
                                            const Vec& hi) {
  const std::size_t n = c.size();
  if (n > 3) throw std::invalid_argument("vertex oracle supports at most 3 variables");
  std::vector<Vec> rows = A;
  Vec rhs = b;
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(hi[j]);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(-lo[j]);
  }
  LpOracleResult best;
  const std::size_t m = rows.size();
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == n) {
      // Gaussian elimination with partial pivoting in long double.
      std::vector<std::vector<long double>> M(n, std::vector<long double>(n + 1));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) M[i][j] = rows[pick[i]][j];
        M[i][n] = rhs[pick[i]];
      }
      for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        for (std::size_t i = col + 1; i < n; ++i)
          if (std::fabs(M[i][col]) > std::fabs(M[p][col])) p = i;
        if (std::fabs(M[p][col]) < 1e-12L) return;
        std::swap(M[p], M[col]);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == col) continue;
          const long double f = M[i][col] / M[col][col];
          for (std::size_t j = col; j <= n; ++j) M[i][j] -= f * M[col][j];
        }
      }
      Vec x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(M[i][n] / M[i][i]);
      for (std::size_t i = 0; i < m; ++i) {
        double ax = 0.0;
        for (std::size_t j = 0; j < n; ++j) ax += rows[i][j] * x[j];
        if (ax > rhs[i] + 1e-9 * (1.0 + std::fabs(rhs[i]))) return;
      }
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
      if (!best.feasible || v > best.value) best = {true, v, x};
      return;
    }
    for (std::size_t i = from; i < m; ++i) {
      pick[depth] = i;
      rec(depth + 1, i + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Full-grid front of a tiny problem: evaluate(x) returns the objective vector
// or nullopt when x is infeasible.
struct GridFrontError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::vector<Vec> grid_front(const Vec& lo, const Vec& hi, std::size_t resolution,
                                   const std::function<std::optional<Vec>(const Vec&)>& evaluate) {
  const std::size_t n = lo.size();
  if (n > 3) throw GridFrontError("TooManyVariables: grid oracle supports at most 3 variables");
  std::vector<Vec> objs;
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    Vec x(n);
    for (std::size_t j = 0; j < n; ++j)
      x[j] = lo[j] + (hi[j] - lo[j]) * static_cast<double>(idx[j]) / static_cast<double>(resolution);
    if (auto f = evaluate(x)) objs.push_back(*f);
    std::size_t j = 0;
    while (j < n && ++idx[j] > resolution) idx[j++] = 0;
    if (j == n) break;
  }
  std::vector<Vec> front;
  for (auto i : pairwise_filter(objs)) front.push_back(objs[i]);
  return front;
}

}  // namespace oracle
