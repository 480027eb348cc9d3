#pragma once

// Reference implementations used only by tests. These deliberately take a
// different route than the library (series digamma instead of boost, generic
// KL instead of the incremental shortcut, exhaustive search instead of the
// planner's closed forms) so they can catch algebra mistakes.

#include <cmath>

#include "hainav/bayes/dirichlet.hpp"

namespace oracle {

// Digamma via upward recurrence plus the asymptotic Bernoulli series.
inline double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  const double series =
      f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132)))));
  return r + std::log(x) - 0.5 / x - series;
}

// Generic Dirichlet KL with the test-local digamma; parameters are
// counts + alpha like the library's.
inline double kl_dirichlet(const hainav::bayes::Counts& a, const hainav::bayes::Counts& b) {
  constexpr int C = hainav::grid::kGroupCount;
  constexpr double al = hainav::bayes::kAlpha;
  double sa = C * al, sb = C * al;
  for (int k = 0; k < C; ++k) {
    sa += a[k];
    sb += b[k];
  }
  double kl = std::lgamma(sa) - std::lgamma(sb);
  for (int k = 0; k < C; ++k) {
    const double pa = a[k] + al;
    const double pb = b[k] + al;
    kl += std::lgamma(pb) - std::lgamma(pa) + (pa - pb) * (digamma(pa) - digamma(sa));
  }
  return kl;
}

// Expected information gain by enumerating every outcome of the next draw.
inline double enumerated_info_gain(const hainav::bayes::Counts& n) {
  constexpr int C = hainav::grid::kGroupCount;
  constexpr double al = hainav::bayes::kAlpha;
  double total = C * al;
  for (double v : n) total += v;
  double gain = 0.0;
  for (int k = 0; k < C; ++k) {
    hainav::bayes::Counts after = n;
    after[k] += 1.0;
    gain += ((n[k] + al) / total) * kl_dirichlet(after, n);
  }
  return gain;
}

}  // namespace oracle
