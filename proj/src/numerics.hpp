#pragma once

// Shared numerical machinery: adaptive Gauss-Kronrod quadrature for
// complex-valued integrands and small least-squares helpers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "errors.hpp"

namespace lightcone::numerics {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double four_pi_sq = 4.0 * pi * pi;

using cplx = std::complex<double>;

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Odd-indexed abscissae are the embedded Gauss nodes.
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
inline constexpr double k15_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
inline constexpr double g7_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

}  // namespace detail

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;       // absolute estimate
  std::size_t panels = 0;   // panels in the final subdivision
};

// One G7/K15 evaluation over [a, b]; error from the Gauss-Kronrod difference.
template <class F>
QuadResult gauss_kronrod(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  cplx k15 = detail::k15_weights[7] * f(mid);
  cplx g7 = detail::g7_weights[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * detail::gk_nodes[i];
    const cplx sum = f(mid - dx) + f(mid + dx);
    k15 += detail::k15_weights[i] * sum;
    if (i % 2 == 1) g7 += detail::g7_weights[i / 2] * sum;
  }
  k15 *= half;
  g7 *= half;
  return {k15, std::abs(k15 - g7), 1};
}

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_panels = 1u << 15;
  int initial_splits = 1;                 // uniform pre-subdivision of each segment
  std::vector<double> breakpoints;        // interior split points (e.g. oscillation periods)
};

// Adaptive subdivision: keep bisecting the worst panel until the summed
// Kronrod error estimate meets max(abs_tol, rel_tol * |integral|).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt) {
  require(b >= a, Errc::invalid_argument, "integration bounds reversed");
  require(opt.initial_splits >= 1, Errc::invalid_argument, "initial_splits must be >= 1");
  if (a == b) return {cplx{0.0, 0.0}, 0.0, 0};

  struct Panel {
    double a, b, error;
    cplx value;
    bool operator<(const Panel& o) const { return error < o.error; }
  };

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : opt.breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<Panel> panels;
  cplx total{0.0, 0.0};
  double total_err = 0.0;
  auto push = [&](double lo, double hi) {
    QuadResult r = gauss_kronrod(f, lo, hi);
    panels.push({lo, hi, r.error, r.value});
    total += r.value;
    total_err += r.error;
  };
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s], hi = edges[s + 1];
    const double step = (hi - lo) / opt.initial_splits;
    for (int j = 0; j < opt.initial_splits; ++j)
      push(lo + j * step, j + 1 == opt.initial_splits ? hi : lo + (j + 1) * step);
  }

  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (total_err > target()) {
    if (panels.size() >= opt.max_panels)
      raise(Errc::convergence_failure, "quadrature error estimate exceeds requested tolerance");
    Panel worst = panels.top();
    panels.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      raise(Errc::convergence_failure, "quadrature panel width reached machine precision");
    push(worst.a, mid);
    push(mid, worst.b);
  }
  return {total, total_err, panels.size()};
}

// Interior multiples of `period` between a and b, for pre-splitting
// oscillatory integrands at their natural scale.
inline std::vector<double> period_breakpoints(double a, double b, double period) {
  std::vector<double> out;
  if (!(period > 0.0)) return out;
  for (double x = a + period; x < b; x += period) out.push_back(x);
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), Errc::length_mismatch, "fit inputs differ in length");
  require(x.size() >= 2, Errc::invalid_argument, "fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, Errc::invalid_argument, "fit abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// Power-law fit: slope of log y against log x.  Demands positive data.
inline LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  require(x.size() == y.size(), Errc::length_mismatch, "fit inputs differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, Errc::domain_error, "log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

}  // namespace lightcone::numerics
