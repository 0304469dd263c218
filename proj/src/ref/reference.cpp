#include "corrkit/ref.hpp"

#include <cmath>
#include <stdexcept>

namespace corrkit::ref {

namespace {

Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n, 0.0)); }

// Gauss-Jordan inverse with partial pivoting; also returns the determinant.
Matrix invert(const Matrix& m, double* det) {
  const std::size_t n = m.size();
  Matrix a = m;
  Matrix inv = zeros(n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  double d = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    if (std::fabs(a[pivot][col]) < 1e-300)
      throw std::runtime_error("ref::invert: singular matrix");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(inv[pivot], inv[col]);
      d = -d;
    }
    d *= a[col][col];
    const double scale = 1.0 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] *= scale;
      inv[col][j] *= scale;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const double factor = a[row][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[row][j] -= factor * a[col][j];
        inv[row][j] -= factor * inv[col][j];
      }
    }
  }
  if (det) *det = d;
  return inv;
}

}  // namespace

std::vector<double> garch_filter(const std::vector<double>& y, double omega,
                                 double alpha, double beta, double h0) {
  std::vector<double> h(y.size());
  if (h0 <= 0.0) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    h0 = var / static_cast<double>(y.size());
  }
  h[0] = h0;
  for (std::size_t t = 1; t < y.size(); ++t)
    h[t] = omega + alpha * y[t - 1] * y[t - 1] + beta * h[t - 1];
  return h;
}

std::vector<Matrix> corr_filter(const Panel& eps, double a, double b,
                                double phi_a, const Matrix& r_bar) {
  const std::size_t t_obs = eps.size();
  const std::size_t n = r_bar.size();
  std::vector<Matrix> r_path(t_obs, zeros(n));
  Matrix q = r_bar;
  Matrix r_prev = r_bar;
  for (std::size_t t = 0; t < t_obs; ++t) {
    if (t > 0) {
      Matrix q_next = zeros(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double outer = std::sqrt(q[i][i]) * eps[t - 1][i] *
                               std::sqrt(q[j][j]) * eps[t - 1][j];
          double gated = outer;
          if (phi_a >= 0.0)
            gated *= std::exp(phi_a * (r_prev[i][j] - 1.0));
          q_next[i][j] = (1.0 - a - b) * r_bar[i][j] + a * gated + b * q[i][j];
        }
      }
      q = q_next;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        r_path[t][i][j] = q[i][j] / (std::sqrt(q[i][i]) * std::sqrt(q[j][j]));
    r_prev = r_path[t];
  }
  return r_path;
}

double corr_loglik(const Panel& eps, const std::vector<Matrix>& r_path) {
  const std::size_t t_obs = eps.size();
  const std::size_t n = r_path.front().size();
  const double log_2pi = std::log(8.0 * std::atan(1.0));
  double total = 0.0;
  for (std::size_t t = 0; t < t_obs; ++t) {
    double det = 0.0;
    Matrix inv = invert(r_path[t], &det);
    if (!(det > 0.0))
      throw std::runtime_error("ref::corr_loglik: non-positive determinant");
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        quad += eps[t][i] * inv[i][j] * eps[t][j];
    total += -0.5 * (static_cast<double>(n) * log_2pi + std::log(det) + quad);
  }
  return total;
}

std::vector<double> rolling_correlation(const Panel& eps, int i, int j,
                                        int window) {
  const int t_obs = static_cast<int>(eps.size());
  std::vector<double> out;
  for (int end = window - 1; end < t_obs; ++end) {
    double mx = 0.0, my = 0.0;
    for (int t = end - window + 1; t <= end; ++t) {
      mx += eps[t][i];
      my += eps[t][j];
    }
    mx /= window;
    my /= window;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int t = end - window + 1; t <= end; ++t) {
      sxy += (eps[t][i] - mx) * (eps[t][j] - my);
      sxx += (eps[t][i] - mx) * (eps[t][i] - mx);
      syy += (eps[t][j] - my) * (eps[t][j] - my);
    }
    out.push_back(sxy / std::sqrt(sxx * syy));
  }
  return out;
}

}  // namespace corrkit::ref
