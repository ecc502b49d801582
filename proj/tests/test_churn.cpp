#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cccnet/churn.hpp"

using namespace cccnet;

namespace {

ChurnConfig small_config(uint64_t seed) {
  ChurnConfig cfg;
  cfg.n = 500;
  cfg.horizon = 10.0 * 500;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("config resolution fills derived fields") {
  ChurnConfig cfg;
  cfg.n = 10000;
  cfg.lambda = 2.0;
  cfg.horizon = 1;
  cfg.resolve();
  CHECK(cfg.mean_session == doctest::Approx(5000.0));
  CHECK(cfg.dim == 6);
  CHECK(cfg.sample_interval == doctest::Approx(100.0));
}

TEST_CASE("config rejects contradictions") {
  ChurnConfig cfg;
  CHECK_THROWS_AS(cfg.resolve(), ConfigError);  // n missing
  cfg.n = 1000;
  cfg.lambda = 0;
  CHECK_THROWS_AS(cfg.resolve(), ConfigError);
  cfg.lambda = 1;
  cfg.horizon = -5;
  CHECK_THROWS_AS(cfg.resolve(), ConfigError);
  cfg.horizon = 100;
  cfg.rate_change_time = 50;  // n_prime missing
  CHECK_THROWS_AS(cfg.resolve(), ConfigError);
}

TEST_CASE("session sampler hits the mean for each distribution") {
  Rng rng(17);
  for (SessionDist d :
       {SessionDist::Weibull, SessionDist::Lognormal, SessionDist::Exponential}) {
    double sum = 0;
    const int n = 300000;
    for (int i = 0; i < n; ++i)
      sum += sample_session(d, d == SessionDist::Lognormal ? 1.0 : 0.59, 80.0,
                            rng);
    CHECK(sum / n == doctest::Approx(80.0).epsilon(0.03));
  }
}

TEST_CASE("zero horizon finishes immediately") {
  ChurnConfig cfg;
  cfg.n = 500;
  cfg.horizon = 0;
  Engine eng(cfg);
  CHECK(eng.finished());
  eng.run();
  CHECK(eng.samples().empty());
  CHECK(eng.overlay().empty());
}

TEST_CASE("runs are deterministic per seed") {
  Engine a(small_config(42));
  Engine b(small_config(42));
  a.run();
  b.run();
  CHECK(a.metrics_csv() == b.metrics_csv());
  CHECK(a.overlay().size() == b.overlay().size());
  CHECK(a.stats().arrivals == b.stats().arrivals);

  Engine c(small_config(43));
  c.run();
  CHECK(a.metrics_csv() != c.metrics_csv());
}

TEST_CASE("steady run stabilizes near the expected size") {
  Engine eng(small_config(7));
  eng.run();
  REQUIRE(!eng.samples().empty());
  const auto& last = eng.samples().back();
  CHECK(last.live_peers > 350);
  CHECK(last.live_peers < 650);
  CHECK(last.coverage == doctest::Approx(1.0));
  CHECK(!last.pre_stable);
  CHECK(eng.samples().front().pre_stable);
  CHECK(eng.stats().arrivals > eng.stats().departures);
}

TEST_CASE("self-check mode passes on a healthy run") {
  ChurnConfig cfg = small_config(9);
  cfg.validate = true;
  cfg.data_inserts_per_sample = 3;
  cfg.data_searches_per_sample = 5;
  Engine eng(cfg);
  CHECK_NOTHROW(eng.run());
  CHECK(eng.stats().data_inserts > 0);
  CHECK(eng.stats().data_searches > 0);
  CHECK(eng.stats().data_search_successes > 0);
}

TEST_CASE("per-cycle mode batches arrivals but reaches the same regime") {
  ChurnConfig cfg = small_config(11);
  cfg.per_cycle = true;
  Engine eng(cfg);
  eng.run();
  const auto& last = eng.samples().back();
  CHECK(last.live_peers > 350);
  CHECK(last.live_peers < 650);
  CHECK(eng.stats().arrivals > 4000);
}

TEST_CASE("run_until is incremental") {
  Engine eng(small_config(13));
  eng.run_until(1000);
  const uint64_t early = eng.stats().arrivals;
  CHECK(eng.now() <= 1000);
  eng.run_until(2000);
  CHECK(eng.stats().arrivals > early);
}

TEST_CASE("rate change decays toward the new size") {
  ChurnConfig cfg;
  cfg.n = 600;
  cfg.lambda = 1.0;
  cfg.dist = SessionDist::Exponential;
  cfg.horizon = 8000;
  cfg.seed = 23;
  cfg.rate_change_time = 4000;
  cfg.n_prime = 200;
  Engine eng(cfg);
  eng.run();
  const auto& last = eng.samples().back();
  // 4000 time units after the change is ~6.7 mean sessions of decay.
  CHECK(last.live_peers < 350);
  CHECK(last.live_peers > 100);
}

TEST_CASE("tree builds once coverage completes and repairs under churn") {
  Engine eng(small_config(29));
  eng.run();
  CHECK(eng.tree().built());
  CHECK(eng.tree().builds() >= 1);
  const auto check = eng.tree().validate(eng.overlay());
  CHECK(check.ok());
  CHECK(eng.samples().back().tree_repair_messages > 0);
}

TEST_CASE("departed peers free their metadata") {
  Engine eng(small_config(31));
  eng.run();
  CHECK(eng.overlay().peers().size() == eng.overlay().size());
}

TEST_CASE("forced joins remain rare after warm-up") {
  Engine eng(small_config(37));
  eng.run();
  // Holes are a warm-up artifact; the retry-then-register fallback should be
  // a vanishing fraction of all arrivals.
  CHECK(double(eng.stats().forced_joins) < 0.2 * double(eng.stats().arrivals));
}
