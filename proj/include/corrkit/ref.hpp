#pragma once

// Naive serial re-implementations of the recursions, written with plain
// loops and no shared code with the main library. The tests use these as
// independent oracles; the benchmark uses them as a serial baseline.

#include <vector>

namespace corrkit::ref {

using Matrix = std::vector<std::vector<double>>;  // row-major, square
using Panel = std::vector<std::vector<double>>;   // T rows of N values

std::vector<double> garch_filter(const std::vector<double>& y, double omega,
                                 double alpha, double beta, double h0);

// Returns the R_t sequence. phi_a < 0 means "no gate" (plain DCC).
std::vector<Matrix> corr_filter(const Panel& eps, double a, double b,
                                double phi_a, const Matrix& r_bar);

double corr_loglik(const Panel& eps, const std::vector<Matrix>& r_path);

// Pearson correlation of columns i and j over every length-`window` slice.
std::vector<double> rolling_correlation(const Panel& eps, int i, int j,
                                        int window);

}  // namespace corrkit::ref
