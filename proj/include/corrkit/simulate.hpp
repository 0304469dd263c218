#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "corrkit/correlation.hpp"
#include "corrkit/garch.hpp"

namespace corrkit {

// mt19937_64 with an explicit inverse-CDF normal transform, so streams are
// bit-identical across platforms (std::normal_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform();  // in (0, 1)
  double normal();

 private:
  std::mt19937_64 gen_;
};

enum class SimKind { GarchUnivariate, Ccc, Dcc, Nlarc };

struct SimSpec {
  SimKind kind = SimKind::Dcc;
  int n = 2;
  int length = 1000;
  int burn_in = 500;
  GarchParams garch;            // for GarchUnivariate / per-column variance layer
  NlarcParams corr;             // (a, b) for DCC; phi_a used for NLARC only
  Eigen::MatrixXd r_bar;        // unconditional correlation target
  bool garch_layer = false;     // wrap each column in a GARCH variance path
  std::uint64_t seed = 1;
};

struct CorrPanelSim {
  Eigen::MatrixXd eps;       // T x N correlated innovations (post burn-in)
  Eigen::MatrixXd eps_full;  // (burn_in + T) x N, from the Q_1 = R_bar start
  Eigen::MatrixXd y;  // equal to eps, or GARCH-scaled when garch_layer set
  std::vector<Eigen::MatrixXd> r_path;  // R_t used during generation (kept part)
};

Eigen::VectorXd simulate_garch(const SimSpec& spec);

CorrPanelSim simulate_corr_panel(const SimSpec& spec);

struct RecoveryRow {
  std::string name;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double coverage2se = 0.0;  // share of replications with truth in +-2 SE
  double coverage3se = 0.0;
};

struct RecoveryReport {
  std::vector<RecoveryRow> rows;
  int replications = 0;
  int failures = 0;
  double lr_dcc_vs_ccc_reject_rate = 0.0;  // 10% level, dof 2
};

// Simulate/estimate loop: per replication, draw a panel from the spec's DGP,
// run the two-step estimator, and record estimates, SEs and LR outcomes.
// Replication r uses seed spec.seed + r.
RecoveryReport recovery_experiment(const SimSpec& spec, int replications);

}  // namespace corrkit
