#include "hainav/bayes/dirichlet.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

namespace hainav::bayes {

namespace {

constexpr int C = grid::kGroupCount;

double total(const Counts& n) {
  double s = C * kAlpha;
  for (double v : n) s += v;
  return s;
}

}  // namespace

double digamma(double x) { return boost::math::digamma(x); }

std::array<double, grid::kGroupCount> predictive(const Counts& n) {
  std::array<double, C> p{};
  const double s = total(n);
  for (int k = 0; k < C; ++k) p[k] = (n[k] + kAlpha) / s;
  return p;
}

double predictive_of(const Counts& n, grid::TileGroup k) {
  return (n[static_cast<int>(k)] + kAlpha) / total(n);
}

double uniform_predictive() { return 1.0 / C; }

double increment_kl(const Counts& n, grid::TileGroup k) {
  const double b = n[static_cast<int>(k)] + kAlpha;
  const double s = total(n);
  return std::log(s) - std::log(b) + digamma(b + 1.0) - digamma(s + 1.0);
}

double expected_info_gain(const Counts& n) {
  const double s = total(n);
  double acc = 0.0;
  for (int k = 0; k < C; ++k) {
    const double b = n[k] + kAlpha;
    acc += (b / s) * (digamma(b + 1.0) - std::log(b));
  }
  return acc - (digamma(s + 1.0) - std::log(s));
}

double prior_info_gain() {
  static const double v = expected_info_gain(Counts{});
  return v;
}

double kl_dirichlet(const Counts& a, const Counts& b) {
  double sa = C * kAlpha, sb = C * kAlpha;
  for (int k = 0; k < C; ++k) {
    sa += a[k];
    sb += b[k];
  }
  double kl = std::lgamma(sa) - std::lgamma(sb);
  const double psi_sa = digamma(sa);
  for (int k = 0; k < C; ++k) {
    const double pa = a[k] + kAlpha;
    const double pb = b[k] + kAlpha;
    kl += std::lgamma(pb) - std::lgamma(pa) + (pa - pb) * (digamma(pa) - psi_sa);
  }
  return kl;
}

double expected_log_prob(const Counts& n, grid::TileGroup k) {
  return digamma(n[static_cast<int>(k)] + kAlpha) - digamma(total(n));
}

}  // namespace hainav::bayes
