#include <doctest.h>

#include <cmath>

#include "hainav/bayes/dirichlet.hpp"
#include "hainav/grid/rng.hpp"
#include "oracles.hpp"

using namespace hainav;
using bayes::Counts;
using grid::TileGroup;

namespace {

Counts random_counts(grid::Rng& rng, int max_per_class = 12) {
  Counts n{};
  for (auto& v : n) v = rng.below_int(max_per_class);
  return n;
}

}  // namespace

TEST_CASE("posterior predictive arithmetic") {
  Counts n{};
  CHECK(bayes::predictive_of(n, TileGroup::Wall) == doctest::Approx(1.0 / 8).epsilon(1e-12));

  n[static_cast<int>(TileGroup::Wall)] = 5;  // 5 wall sightings, nothing else
  CHECK(bayes::predictive_of(n, TileGroup::Wall) ==
        doctest::Approx(5.1 / 5.8).epsilon(1e-12));

  Counts m{};
  m[static_cast<int>(TileGroup::FloorRed)] = 10;
  CHECK(bayes::predictive_of(m, TileGroup::FloorRed) ==
        doctest::Approx(10.1 / 10.8).epsilon(1e-12));
  CHECK(bayes::predictive_of(m, TileGroup::FloorRed) >= 0.93);

  const auto p = bayes::predictive(m);
  double sum = 0.0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("library digamma agrees with series and finite differences") {
  for (double x : {0.1, 0.35, 0.8, 1.0, 2.5, 5.8, 10.1, 100.0}) {
    CHECK(bayes::digamma(x) == doctest::Approx(oracle::digamma(x)).epsilon(1e-9));
  }
  // central difference of lgamma, trustworthy away from the poles
  for (double x : {2.0, 3.7, 8.0, 25.0}) {
    const double h = 1e-6;
    const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2 * h);
    CHECK(bayes::digamma(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("incremental KL equals the generic Dirichlet KL") {
  grid::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Counts n = random_counts(rng);
    const int k = rng.below_int(8);
    Counts after = n;
    after[k] += 1.0;
    const double reference = oracle::kl_dirichlet(after, n);
    CHECK(bayes::increment_kl(n, static_cast<TileGroup>(k)) ==
          doctest::Approx(reference).epsilon(1e-9));
    CHECK(bayes::kl_dirichlet(after, n) == doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("closed-form info gain matches outcome enumeration") {
  grid::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Counts n = random_counts(rng);
    CHECK(bayes::expected_info_gain(n) ==
          doctest::Approx(oracle::enumerated_info_gain(n)).epsilon(1e-9));
  }
}

TEST_CASE("info gain is non-negative and vanishes with evidence") {
  grid::Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    CHECK(bayes::expected_info_gain(random_counts(rng)) >= 0.0);
  }
  Counts saturated;
  saturated.fill(1e6);
  CHECK(bayes::expected_info_gain(saturated) < 1e-6);

  // a single dominant class still carries a sliver of prior mass on the rest
  Counts lopsided{};
  lopsided[2] = 1e6;
  const double g = bayes::expected_info_gain(lopsided);
  CHECK(g == doctest::Approx(oracle::enumerated_info_gain(lopsided)).epsilon(1e-9));
  CHECK(g < 2e-6);

  CHECK(bayes::prior_info_gain() > 1.0);  // unseen cells are maximally interesting
}

TEST_CASE("expected log prob follows the digamma recurrence") {
  Counts n{};
  n[3] = 4;
  // psi(x+1) = psi(x) + 1/x lets the oracle walk down from the prior
  const double b = 4 + bayes::kAlpha;
  const double s = 4 + 8 * bayes::kAlpha;
  CHECK(bayes::expected_log_prob(n, static_cast<TileGroup>(3)) ==
        doctest::Approx(oracle::digamma(b) - oracle::digamma(s)).epsilon(1e-9));
  CHECK(bayes::expected_log_prob(n, static_cast<TileGroup>(3)) < 0.0);
}
