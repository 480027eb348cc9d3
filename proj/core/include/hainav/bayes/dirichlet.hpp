#pragma once

#include <array>

#include "hainav/grid/types.hpp"

namespace hainav::bayes {

// Symmetric prior per tile class. Small so a single observation already
// dominates a cell's predictive.
inline constexpr double kAlpha = 0.1;

// Observation counts per tile group; the Dirichlet parameter for class k is
// counts[k] + kAlpha.
using Counts = std::array<double, grid::kGroupCount>;

double digamma(double x);

// Posterior predictive (n_k + alpha) / (N + C*alpha).
std::array<double, grid::kGroupCount> predictive(const Counts& n);
double predictive_of(const Counts& n, grid::TileGroup k);
double uniform_predictive();  // 1 / C, the never-observed-cell value

// KL(Dir(after observing k) || Dir(before)).
double increment_kl(const Counts& n, grid::TileGroup k);

// Expected increment_kl under the posterior predictive, in closed form; this
// is the mutual information between the next draw and the cell's parameters.
// Non-negative, and it vanishes as counts grow.
double expected_info_gain(const Counts& n);
double prior_info_gain();  // expected_info_gain of an empty cell

// Generic KL between two Dirichlet posteriors given by counts.
double kl_dirichlet(const Counts& a, const Counts& b);

// E_q[ln theta_k] under the posterior for n; accuracy term of the
// free-energy diagnostic.
double expected_log_prob(const Counts& n, grid::TileGroup k);

}  // namespace hainav::bayes
