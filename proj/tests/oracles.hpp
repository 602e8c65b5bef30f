#pragma once

// Reference computations written without Eigen or the library's numerics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

/// Rank by Gaussian elimination with complete pivoting; a pivot counts as
/// zero when it is below tol times the largest entry of the input.
inline std::size_t rank(std::vector<CVec> rows, double tol = 1e-9) {
  if (rows.empty()) return 0;
  const std::size_t r = rows.size();
  const std::size_t c = rows.front().size();
  double scale = 0.0;
  for (const auto& row : rows) {
    for (const cd& v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return 0;
  std::size_t rank = 0;
  std::vector<bool> used_col(c, false);
  for (std::size_t step = 0; step < std::min(r, c); ++step) {
    std::size_t pr = 0;
    std::size_t pc = 0;
    double best = -1.0;
    for (std::size_t i = step; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        if (!used_col[j] && std::abs(rows[i][j]) > best) {
          best = std::abs(rows[i][j]);
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= tol * scale) break;
    std::swap(rows[step], rows[pr]);
    used_col[pc] = true;
    for (std::size_t i = step + 1; i < r; ++i) {
      const cd f = rows[i][pc] / rows[step][pc];
      for (std::size_t j = 0; j < c; ++j) rows[i][j] -= f * rows[step][j];
    }
    ++rank;
  }
  return rank;
}

/// Eigenvalues (ascending) of the Hermitian matrix [[a, b], [conj(b), d]].
inline std::pair<double, double> hermitian2_eigenvalues(double a, cd b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  return {mean - radius, mean + radius};
}

inline cd dot(const CVec& x, const CVec& y) {
  cd s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::conj(y[i]);
  return s;
}

inline double norm2(const CVec& x) { return std::real(dot(x, x)); }

/// sqrt(|x|^2 + |y|^2 - 2|<x, y>|), clamped at 0. Loses half the digits
/// near zero.
inline double bures_formula(const CVec& x, const CVec& y) {
  return std::sqrt(std::max(0.0, norm2(x) + norm2(y) - 2.0 * std::abs(dot(x, y))));
}

/// |x - w y| with w the phase of <x, y>; accurate near zero.
inline double bures(const CVec& x, const CVec& y) {
  const cd ip = dot(x, y);
  const cd w = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cd{1.0};
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] - w * y[i]);
  return std::sqrt(s);
}

inline double envelope(const CVec& a, const CVec& b, double theta) {
  const cd w = std::polar(1.0, theta);
  double g = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) g = std::max(g, std::abs(a[j] - w * b[j]));
  return g;
}

/// min over theta of max_j |a_j - e^{i theta} b_j|. Each squared term is
/// c_j - 2 r_j cos(theta + psi_j), so the minimum of the upper envelope sits
/// at a minimiser of one term or at a crossing of two terms; every such point
/// is evaluated.
inline double minimax(const CVec& a, const CVec& b) {
  const std::size_t m = a.size();
  std::vector<double> c(m), r(m), psi(m);
  for (std::size_t j = 0; j < m; ++j) {
    c[j] = std::norm(a[j]) + std::norm(b[j]);
    r[j] = std::abs(a[j]) * std::abs(b[j]);
    psi[j] = std::arg(b[j]) - std::arg(a[j]);
  }
  std::vector<double> candidates{0.0};
  for (std::size_t j = 0; j < m; ++j) candidates.push_back(-psi[j]);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      // P cos t + Q sin t = R
      const double p = 2.0 * (r[j] * std::cos(psi[j]) - r[k] * std::cos(psi[k]));
      const double q = -2.0 * (r[j] * std::sin(psi[j]) - r[k] * std::sin(psi[k]));
      const double rhs = c[j] - c[k];
      const double rho = std::hypot(p, q);
      if (rho < 1e-300 || std::abs(rhs) > rho) continue;
      const double base = std::atan2(q, p);
      const double spread = std::acos(std::clamp(rhs / rho, -1.0, 1.0));
      candidates.push_back(base + spread);
      candidates.push_back(base - spread);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (double t : candidates) best = std::min(best, envelope(a, b, t));
  return best;
}

/// Sum_{k=1}^{terms} 1/k^2 plus the integral tail estimate 1/terms.
inline double basel_partial(std::size_t terms) {
  double s = 0.0;
  for (std::size_t k = terms; k >= 1; --k) s += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  return s + 1.0 / static_cast<double>(terms) - 0.5 / (static_cast<double>(terms) * static_cast<double>(terms));
}

}  // namespace oracle
