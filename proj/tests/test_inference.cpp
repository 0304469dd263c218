#include <cmath>

#include "corrkit/inference.hpp"
#include "corrkit/ref.hpp"
#include "corrkit/simulate.hpp"
#include "corrkit/stats.hpp"
#include "doctest.h"

using namespace corrkit;

namespace {

DegarchPanel gaussian_panel(int t_obs, int n, std::uint64_t seed) {
  DegarchPanel p;
  Rng rng(seed);
  p.residuals.resize(t_obs, n);
  for (int t = 0; t < t_obs; ++t)
    for (int j = 0; j < n; ++j) p.residuals(t, j) = rng.normal();
  Date d{2015, 3, 1};
  for (int t = 0; t < t_obs; ++t) {
    p.dates.push_back(d);
    ++d.day;
    if (d.day > 28) { d.day = 1; ++d.month; }
    if (d.month > 12) { d.month = 1; ++d.year; }
  }
  for (int j = 0; j < n; ++j) p.names.push_back("s" + std::to_string(j));
  p.used_garch.assign(n, true);
  return p;
}

}  // namespace

TEST_CASE("lr test arithmetic and 10% criticals") {
  LrResult r1 = lr_test(-409.454, -406.795, 2);
  CHECK(r1.statistic == doctest::Approx(5.318).epsilon(1e-3));
  CHECK(r1.critical_value_10pct == doctest::Approx(4.605).epsilon(1e-3));
  CHECK(r1.reject);
  LrResult r2 = lr_test(-406.795, -406.725, 1);
  CHECK(r2.statistic == doctest::Approx(0.140).epsilon(1e-2));
  CHECK(r2.critical_value_10pct == doctest::Approx(2.706).epsilon(1e-3));
  CHECK_FALSE(r2.reject);
  // clamp: a numerically lower unrestricted fit never yields a negative stat
  CHECK(lr_test(-100.0, -100.5, 1).statistic == 0.0);
}

TEST_CASE("per-observation aic") {
  CHECK(aic(-411.807, 0, 166) == doctest::Approx(4.962).epsilon(1e-3));
  CHECK(aic(-411.807, 2, 166) == doctest::Approx(4.986).epsilon(1e-3));
  CHECK(aic(-411.807, 3, 166) == doctest::Approx(4.998).epsilon(1e-3));
  CHECK(aic(-100.0, 0, 100) == doctest::Approx(2.0));
}

TEST_CASE("robust se matches the closed form for the gaussian mean") {
  // loglik for the mean of iid N(mu, sigma2): sandwich SE is the
  // usual sd/sqrt(T) up to the MLE/sample-variance convention
  Rng rng(5);
  const int t_obs = 4000;
  Eigen::VectorXd y(t_obs);
  for (int t = 0; t < t_obs; ++t) y(t) = 2.0 + 0.7 * rng.normal();
  PerObsLoglik per = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd out(t_obs);
    for (int t = 0; t < t_obs; ++t) {
      double e = y(t) - th(0);
      out(t) = -0.5 * e * e;
    }
    return out;
  };
  optim::Objective total = [&](const Eigen::VectorXd& th) {
    return per(th).sum();
  };
  Eigen::VectorXd theta(1);
  theta << y.mean();
  Eigen::MatrixXd scores = per_obs_scores(per, theta);
  Eigen::VectorXd se = robust_se(total, theta, scores);
  double sd = std::sqrt((y.array() - y.mean()).square().sum() / t_obs);
  CHECK(se(0) == doctest::Approx(sd / std::sqrt(t_obs)).epsilon(1e-3));
}

TEST_CASE("robust se with a pinned coordinate") {
  PerObsLoglik per = [](const Eigen::VectorXd& th) {
    Eigen::VectorXd out(50);
    for (int t = 0; t < 50; ++t)
      out(t) = -0.5 * (th(0) * th(0) + (th(1) - 0.01 * t) * (th(1) - 0.01 * t));
    return out;
  };
  optim::Objective total = [&](const Eigen::VectorXd& th) {
    return per(th).sum();
  };
  Eigen::VectorXd theta(2);
  theta << 0.0, 0.245;
  Eigen::MatrixXd scores = per_obs_scores(per, theta);
  Eigen::VectorXd se = robust_se(total, theta, scores, {0});
  CHECK(se(0) == 0.0);
  CHECK(se(1) > 0.0);
  CHECK(std::isfinite(se(1)));
}

TEST_CASE("per-obs scores of a linear function are exact") {
  PerObsLoglik per = [](const Eigen::VectorXd& th) {
    Eigen::VectorXd out(3);
    out << 2.0 * th(0), -th(0), 0.5 * th(0);
    return out;
  };
  Eigen::VectorXd theta(1);
  theta << 1.3;
  Eigen::MatrixXd s = per_obs_scores(per, theta);
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(s(1, 0) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(s(2, 0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("rolling correlation matches the serial reference") {
  DegarchPanel p = gaussian_panel(90, 3, 31);
  RollingPath roll = rolling_correlation(p, 5);
  REQUIRE(roll.pairs.size() == 3);
  REQUIRE(roll.values.rows() == 90 - 5 + 1);
  REQUIRE(static_cast<int>(roll.dates.size()) == roll.values.rows());
  CHECK(roll.dates.front() == p.dates[4]);
  CHECK(roll.dates.back() == p.dates.back());
  ref::Panel panel(90, std::vector<double>(3));
  for (int t = 0; t < 90; ++t)
    for (int j = 0; j < 3; ++j) panel[t][j] = p.residuals(t, j);
  for (size_t k = 0; k < roll.pairs.size(); ++k) {
    auto [i, j] = roll.pairs[k];
    std::vector<double> expect = ref::rolling_correlation(panel, i, j, 5);
    REQUIRE(static_cast<int>(expect.size()) == roll.values.rows());
    for (int w = 0; w < roll.values.rows(); ++w)
      CHECK(roll.values(w, k) == doctest::Approx(expect[w]).epsilon(1e-9));
  }
}

TEST_CASE("rolling correlation flags zero-variance windows with nan") {
  DegarchPanel p = gaussian_panel(20, 2, 32);
  for (int t = 3; t < 8; ++t) p.residuals(t, 0) = 1.0;  // flat stretch
  RollingPath roll = rolling_correlation(p, 5);
  CHECK(std::isnan(roll.values(3, 0)));  // window [3, 8)
  CHECK(std::isfinite(roll.values(10, 0)));
}
