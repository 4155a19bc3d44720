#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dan/rng.hpp"

#include <cmath>
#include <set>

using namespace dan;

TEST_CASE("sigmoid fixed points") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sigmoid(100.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sigmoid(-100.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("sigmoid symmetry over a wide range") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.next_unit() - 0.5) * 100.0;  // [-50, 50]
    CHECK(sigmoid(-x) == doctest::Approx(1.0 - sigmoid(x)).epsilon(1e-15));
  }
}

TEST_CASE("sigmoid saturates without overflow") {
  CHECK(sigmoid(1e6) == 1.0);
  CHECK(sigmoid(-1e6) == 0.0);
  CHECK(std::isfinite(sigmoid(700.0)));
  CHECK(std::isfinite(sigmoid(-700.0)));
}

TEST_CASE("equal seeds give bit-identical sequences") {
  Rng a(123456789), b(123456789);
  for (int i = 0; i < 10000; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("pinned draws for the reference generator") {
  // Frozen first outputs of the seed-0 stream; a change here means the
  // generator (and every seeded experiment) changed behavior.
  Rng rng(0);
  CHECK(rng.next_u64() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next_u64() == 0x06C45D188009454Full);
}

TEST_CASE("split streams are stable and independent") {
  Rng parent(77);
  Rng child_before = parent.split(3);
  parent.next_u64();
  Rng child_after = parent.split(3);
  CHECK(child_before.next_u64() == child_after.next_u64());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) {
    firsts.insert(Rng(77).split(s).next_u64());
  }
  CHECK(firsts.size() == 64);
}

TEST_CASE("bernoulli edge probabilities") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
  CHECK_THROWS_AS(rng.bernoulli(-0.1), std::domain_error);
  CHECK_THROWS_AS(rng.bernoulli(1.1), std::domain_error);
  CHECK_THROWS_AS(rng.bernoulli(std::nan("")), std::domain_error);
}

TEST_CASE("bernoulli empirical mean within the binomial 3-sigma band") {
  Rng rng(2024);
  const int n = 1'000'000;
  const double p = 0.3;
  long hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(p) ? 1 : 0;
  const double mean = static_cast<double>(hits) / n;
  // 3 * sqrt(p (1-p) / N) = 0.001375
  CHECK(mean > 0.2985);
  CHECK(mean < 0.3015);
}

TEST_CASE("gaussian moments") {
  Rng rng(6);
  CHECK(rng.gaussian(3.25, 0.0) == 3.25);
  CHECK_THROWS_AS(rng.gaussian(0.0, -1.0), std::domain_error);

  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.gaussian(0.0, 1.0);
  CHECK(std::abs(sum / n) < 0.003);

  double sum2 = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian(5.0, 4.0);
    sum2 += x;
    sq += x * x;
  }
  const double mean = sum2 / n;
  const double variance = sq / n - mean * mean;
  CHECK(variance > 3.98);
  CHECK(variance < 4.02);
}

TEST_CASE("sample matrices draw in column-major order") {
  Rng a(11), b(11);
  const Matrix probs = Matrix::Constant(3, 2, 0.5);
  const Matrix m = sample_bernoulli(a, probs);
  for (Index j = 0; j < 2; ++j) {
    for (Index i = 0; i < 3; ++i) {
      CHECK(m(i, j) == (b.bernoulli(0.5) ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("shuffled_indices is a permutation and is seed-stable") {
  Rng a(9), b(9);
  const auto p = shuffled_indices(a, 100);
  const auto q = shuffled_indices(b, 100);
  CHECK(p == q);
  std::set<std::int32_t> seen(p.begin(), p.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 99);
}
