#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "mintmc/baselines.hpp"
#include "mintmc/core.hpp"
#include "mintmc/diagnostics.hpp"
#include "mintmc/mintee.hpp"
#include "mintmc/models.hpp"

using namespace mintmc;

TEST_CASE("build_ladder reproduces the appendix schedule at n = 1e5") {
  const LadderConfig ladder =
      build_ladder(100000, 7, 1000, 1.4, 0.995, 10.0, 0.0);
  // Batch sizes within +-1 of the published table (rounding-mode slack).
  const std::vector<long long> m_ref = {100000, 5378, 3841, 2743,
                                        1959,   1400, 1000};
  REQUIRE(ladder.m.size() == 7);
  for (std::size_t k = 0; k < 7; ++k)
    CHECK(std::llabs(static_cast<long long>(ladder.m[k]) - m_ref[k]) <= 1);
  // Temperatures within 1% of the published column.
  const std::vector<double> t_ref = {1.00,  19.41, 27.13, 37.93,
                                     53.02, 74.06, 103.51};
  for (std::size_t k = 0; k < 7; ++k)
    CHECK(ladder.T[k] == doctest::Approx(t_ref[k]).epsilon(0.01));
  // Energy spacing: H_{k+1} - H_k = c * T_k exactly as built.
  for (std::size_t k = 0; k + 1 < 7; ++k)
    CHECK(ladder.H[k + 1] - ladder.H[k] ==
          doctest::Approx(10.0 * ladder.T[k]).epsilon(1e-12));
  CHECK(ladder.H[0] == 0.0);
}

TEST_CASE("ladder validation") {
  SUBCASE("K = 1 degenerates to a single exact chain") {
    const LadderConfig ladder = build_ladder(500, 1, 500, 1.4, 0.9, 10.0, -5.0);
    REQUIRE(ladder.m.size() == 1);
    CHECK(ladder.m[0] == 500);
    CHECK(ladder.T[0] == 1.0);
    CHECK(ladder.H[0] == -5.0);
  }
  SUBCASE("cost condition m_min gamma^(K-1) <= n") {
    CHECK_THROWS_WITH_AS(build_ladder(1000, 5, 600, 1.4, 0.9, 10.0, 0.0),
                         doctest::Contains("cost condition"), Error);
  }
  SUBCASE("alpha bounds") {
    CHECK_THROWS_AS(build_ladder(1000, 3, 100, 1.4, 1.0, 10.0, 0.0), Error);
    CHECK_THROWS_AS(build_ladder(1000, 3, 100, 1.4, 0.0, 10.0, 0.0), Error);
  }
  SUBCASE("gamma must exceed 1") {
    CHECK_THROWS_AS(build_ladder(1000, 3, 100, 1.0, 0.9, 10.0, 0.0), Error);
  }
}

TEST_CASE("ring_index: half-open intervals with a catch-all bottom and top") {
  const std::vector<double> H = {0.0, 10.0, 25.0, 45.0};
  CHECK(ring_index(0.0, H) == 0);          // boundary inclusive
  CHECK(ring_index(-100.0, H) == 0);       // below H_0 maps to 0
  CHECK(ring_index(45.0 - 1e-9, H) == 2);  // just under a boundary
  CHECK(ring_index(45.0, H) == 3);         // boundary goes up
  CHECK(ring_index(1e12, H) == 3);         // H_K = +infinity

  // Binary search agrees with a linear scan on random values.
  RngStream rng(3, 3);
  for (int trial = 0; trial < 10000; ++trial) {
    const double h = -20.0 + 80.0 * rng.next_double();
    std::size_t linear = 0;
    for (std::size_t j = 0; j < H.size(); ++j)
      if (h >= H[j]) linear = j;
    CHECK(ring_index(h, H) == linear);
  }
}

TEST_CASE("truncated log density") {
  CHECK(truncated_log_density(3.0, 5.0, 2.0) == -2.5);   // flat region
  CHECK(truncated_log_density(12.0, 5.0, 2.0) == -6.0);  // active region
  CHECK(truncated_log_density(7.0, kNoTruncation, 1.0) == -7.0);
}

TEST_CASE("energy estimate matches hand arithmetic and the exact energy") {
  TiedMeansMixture model;
  SUBCASE("full batch gives the exact energy") {
    const Dataset data = generate_data(model, {0.0, 1.0}, 200, 4);
    EvalCounters evals;
    RngStream rng(1, 1);
    const MiniBatch full = sample_batch(200, 200, rng);
    const ParameterVector theta = {0.2, 0.9};
    const double h = energy_estimate(model, data, theta, full, evals);
    const double mu = full_mean_loglik(model, data, theta, evals);
    CHECK(h == -(200.0 * mu + model.log_prior(theta)));
  }
  SUBCASE("n = 4 toy dataset against hand-computed values") {
    Dataset data({-1.0, 0.0, 1.0, 2.0}, 1);
    EvalCounters evals;
    const ParameterVector theta = {0.0, 1.0};
    const MiniBatch full = MiniBatch::regenerate(9, 4, 4);
    const double h = energy_estimate(model, data, theta, full, evals);
    auto density = [](double x, double mean) {
      return std::exp(-(x - mean) * (x - mean) / 4.0) /
             std::sqrt(4.0 * std::acos(-1.0));
    };
    double sum_l = 0.0;
    for (const double x : {-1.0, 0.0, 1.0, 2.0})
      sum_l += std::log(0.5 * density(x, 0.0) + 0.5 * density(x, 1.0));
    const double two_pi = 2.0 * std::acos(-1.0);
    const double log_prior = -0.5 * std::log(two_pi * 10.0) -
                             0.0 / 20.0 -
                             0.5 * std::log(two_pi * 1.0) - 1.0 / 2.0;
    CHECK(h == doctest::Approx(-(sum_l + log_prior)).epsilon(1e-12));
  }
  SUBCASE("refinement preserves the energy lineage") {
    const Dataset data = generate_data(model, {0.0, 1.0}, 300, 6);
    EvalCounters evals;
    RngStream rng(2, 2);
    const ParameterVector theta = {0.1, 1.1};
    const MiniBatch batch = sample_batch(300, 60, rng);
    const double mu = mu_hat(model, data, batch, theta, evals);
    const MiniBatch ext = extend_batch(batch, 150);
    const double refined =
        refine_mu_hat(model, data, mu, batch, ext, theta, evals);
    const double h_refined =
        -(300.0 * refined + model.log_prior(theta));
    const double h_scratch = energy_estimate(model, data, theta, ext, evals);
    CHECK(h_refined == doctest::Approx(h_scratch).epsilon(1e-10));
  }
}

namespace {

// l(x; theta) = theta[0] / n_points: pins the energy to -theta[0] exactly
// (uniform prior), independent of which batch is drawn.
class EnergyDialModel : public Model {
 public:
  explicit EnergyDialModel(double n_points) : n_(n_points) {}
  std::size_t dim() const override { return 1; }
  std::size_t observation_width() const override { return 1; }
  std::string name() const override { return "energy_dial"; }
  double log_lik(std::span<const double>,
                 const ParameterVector& theta) const override {
    return theta[0] / n_;
  }

 private:
  double n_;
};

LadderConfig tiny_two_chain_ladder() {
  LadderConfig ladder;
  ladder.chains = 2;
  ladder.gamma = 2.0;
  ladder.alpha = 0.9;
  ladder.c = 3.0;
  ladder.m = {4, 2};
  ladder.lambda = {1.0, 0.9};
  ladder.T = {1.0, 2.0};
  ladder.H = {5.0, 8.0};
  ladder.p_ee = 0.5;
  ladder.proposal = ProposalKind::kRandomWalk;
  return ladder;
}

}  // namespace

TEST_CASE("EE jump arithmetic on a dialed-energy model") {
  // h(current) = 12, h(candidate) = 10, both above the truncations,
  // T_k = 1, T_{k+1} = 2: log ratio = (12 - 10)(1/1 - 1/2) = 1 > 0, so the
  // jump is always accepted.
  const std::size_t n = 4;
  EnergyDialModel model(static_cast<double>(n));
  Dataset data({0.0, 0.0, 0.0, 0.0}, 1);
  LadderConfig ladder = tiny_two_chain_ladder();

  EnergyRings upper(2, 1, false);
  const ParameterVector candidate = {-10.0};  // h = 10
  // Level of h=10 in H={5,8}: index 1.
  upper.append(1, candidate, 10.0, /*batch_seed=*/77, {}, ladder.H);

  ChainState state;
  state.theta = {-12.0};  // h = 12 -> level 1 as well
  state.mu_value = -12.0 / 4.0;
  state.log_prior = 0.0;
  state.batch_seed = 5;

  ChainStreams streams(123, 0);
  EvalCounters evals;
  const EeJumpResult result =
      ee_jump(state, upper, 0, ladder, model, data, streams, evals);
  CHECK(!result.ring_empty);
  CHECK(result.accepted);
  CHECK(state.theta == candidate);
  // Refinement touched m_k - m_{k+1} = 2 points.
  CHECK(evals.loglik == 2);
  // Refined estimate equals the dialed energy exactly.
  CHECK(energy_value(n, state.mu_value, state.log_prior) ==
        doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("EE jump falls back when the matching ring is empty") {
  const std::size_t n = 4;
  EnergyDialModel model(static_cast<double>(n));
  Dataset data({0.0, 0.0, 0.0, 0.0}, 1);
  LadderConfig ladder = tiny_two_chain_ladder();
  EnergyRings upper(2, 1, false);
  // Entry lives at level 0; the current state's level is 1.
  upper.append(0, {-3.0}, 3.0, 11, {}, ladder.H);

  ChainState state;
  state.theta = {-12.0};
  state.mu_value = -3.0;
  state.log_prior = 0.0;
  ChainStreams streams(9, 0);
  EvalCounters evals;
  const EeJumpResult result =
      ee_jump(state, upper, 0, ladder, model, data, streams, evals);
  CHECK(result.ring_empty);
  CHECK(evals.loglik == 0);
  CHECK(state.theta == ParameterVector{-12.0});
}

TEST_CASE("equal temperatures accept every jump") {
  const std::size_t n = 4;
  EnergyDialModel model(static_cast<double>(n));
  Dataset data({0.0, 0.0, 0.0, 0.0}, 1);
  LadderConfig ladder = tiny_two_chain_ladder();
  ladder.T = {2.0, 2.0};  // hand-built: the ratio cancels identically

  EnergyRings upper(2, 1, false);
  upper.append(1, {-30.0}, 30.0, 4, {}, ladder.H);  // much worse energy
  ChainState state;
  state.theta = {-9.0};
  state.mu_value = -9.0 / 4.0;
  state.log_prior = 0.0;
  ChainStreams streams(31, 0);
  EvalCounters evals;
  for (int trial = 0; trial < 20; ++trial) {
    ChainState s = state;
    const EeJumpResult result =
        ee_jump(s, upper, 0, ladder, model, data, streams, evals);
    CHECK(result.accepted);
  }
}

TEST_CASE("rings validate levels on append and stay append-only") {
  const std::vector<double> H = {0.0, 10.0};
  EnergyRings rings(2, 1, false);
  rings.append(0, {1.0}, 5.0, 1, {}, H);
  CHECK_THROWS_AS(rings.append(0, {1.0}, 15.0, 1, {}, H), Error);
  CHECK(rings.size(0) == 1);
  rings.append(1, {2.0}, 12.0, 2, {}, H);
  CHECK(rings.size(1) == 1);
  const EnergyRings::Entry e = rings.get(1, 0);
  CHECK(e.h_hat == 12.0);
  CHECK(e.batch_seed == 2);
  CHECK(e.theta == ParameterVector{2.0});
}

TEST_CASE("MINTEE with K = 1 reproduces plain MH exactly") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 50, 17);

  LadderConfig ladder = build_ladder(50, 1, 50, 1.4, 0.9, 10.0, -1e15);
  ladder.burn_in = 100;
  ladder.samples = 400;
  ladder.proposal = ProposalKind::kRandomWalk;
  ladder.initial_step_scale = 0.45;  // eps_0 = scale * sqrt(1)
  ladder.accept_low = 0.0;           // adaptation can never trigger
  ladder.accept_high = 1.0;
  const MinteeRun mintee =
      run_mintee(model, data, ladder, {{0.0}}, 91, false);

  MhConfig mh;
  mh.temperature = 1.0;
  mh.burn_in = 100;
  mh.samples = 400;
  mh.step = 0.45;
  const SampleRun plain = run_mh(model, data, mh, {0.0}, 91);

  REQUIRE(mintee.chains.size() == 1);
  const SampleRun& chain0 = mintee.chains[0].run;
  REQUIRE(chain0.flat.size() == plain.flat.size());
  CHECK(std::memcmp(chain0.flat.data(), plain.flat.data(),
                    plain.flat.size() * sizeof(double)) == 0);
  CHECK(chain0.accepted == plain.accepted);
}

TEST_CASE("staged schedule: steps, ring growth, burn-in gating") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 60, 23);
  LadderConfig ladder = build_ladder(60, 3, 15, 1.4, 0.9, 10.0, -200.0);
  ladder.burn_in = 50;
  ladder.samples = 150;
  ladder.p_ee = 0.2;
  ladder.proposal = ProposalKind::kLangevin;
  ladder.initial_step_scale = 0.05;
  const std::size_t block = 200;

  const MinteeRun run =
      run_mintee(model, data, ladder, {{0.0}, {0.0}, {0.0}}, 7, false);
  REQUIRE(run.chains.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& chain = run.chains[k];
    const std::size_t steps =
        chain.mh_steps + chain.jumps_attempted + chain.jump_fallbacks;
    CHECK(steps == (k + 1) * block);
    // Samples and ring entries start after the chain's own burn-in.
    CHECK(chain.run.count() == (k + 1) * block - ladder.burn_in);
    std::uint64_t ring_total = 0;
    for (const auto c : chain.ring_counts) ring_total += c;
    CHECK(ring_total == chain.run.count());
    // The hottest chain has no upper neighbor to jump to.
    if (k == 2) CHECK(chain.jumps_attempted == 0);
  }
  // Chain 0's quota snapshot covers its first B+N steps: full-batch MH steps
  // cost n each, accepted-jump refinements only m_0 - m_1.
  const std::size_t m1 = ladder.m[1];
  CHECK(run.chains[0].evals_at_quota.loglik <= 60ull * (1 + 200));
  CHECK(run.chains[0].evals_at_quota.loglik >= (60ull - m1) * 200);
  CHECK(run.chains[0].evals_at_quota.loglik <= run.chains[0].evals.loglik);
}

TEST_CASE("parallel mode keeps the schedule invariants") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 60, 23);
  LadderConfig ladder = build_ladder(60, 3, 15, 1.4, 0.9, 10.0, -200.0);
  ladder.burn_in = 40;
  ladder.samples = 120;
  ladder.p_ee = 0.2;
  ladder.proposal = ProposalKind::kLangevin;
  ladder.initial_step_scale = 0.05;

  const MinteeRun run =
      run_mintee(model, data, ladder, {{0.0}, {0.0}, {0.0}}, 7, true);
  REQUIRE(run.chains.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& chain = run.chains[k];
    const std::size_t steps =
        chain.mh_steps + chain.jumps_attempted + chain.jump_fallbacks;
    CHECK(steps == (k + 1) * 160);
    CHECK(chain.run.count() == (k + 1) * 160 - ladder.burn_in);
  }
}

TEST_CASE("pilot energy search finds the basin floor") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 50, 17);
  EvalCounters evals;
  ParameterVector argmin;
  const double h_min =
      pilot_minimum_energy(model, data, {3.0}, 200, evals, &argmin);
  // Grid scan oracle for the true minimum.
  double best = 1e300;
  EvalCounters scratch;
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + 4.0 * i / 400.0;
    best = std::min(best, -log_posterior_tempered(model, data, {x}, 1.0,
                                                  scratch));
  }
  CHECK(h_min == doctest::Approx(best).epsilon(1e-4));
  CHECK(std::abs(argmin[0]) < 2.0);
}

TEST_CASE("mintee run validates its inputs") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 50, 17);
  LadderConfig ladder = build_ladder(50, 2, 20, 1.4, 0.9, 10.0, -100.0);
  ladder.burn_in = 10;
  ladder.samples = 20;
  SUBCASE("one init per chain") {
    CHECK_THROWS_AS(run_mintee(model, data, ladder, {{0.0}}, 1, false),
                    Error);
  }
  SUBCASE("chain 0 must be full batch") {
    ladder.m[0] = 49;
    CHECK_THROWS_AS(
        run_mintee(model, data, ladder, {{0.0}, {0.0}}, 1, false), Error);
  }
}

TEST_CASE("chain 0 of a K=3 ladder samples the exact posterior (grid KS)") {
  SymmetricMixture model(1);
  const Dataset data = generate_data(model, {0.4}, 50, 17);
  EvalCounters pe;
  ParameterVector argmin;
  const double pilot =
      pilot_minimum_energy(model, data, {0.0}, 200, pe, &argmin);
  LadderConfig ladder = build_ladder(50, 3, 20, 1.4, 0.9, 10.0, pilot - 5.0);
  ladder.burn_in = 2000;
  ladder.samples = 100000;
  ladder.p_ee = 0.1;
  ladder.proposal = ProposalKind::kLangevin;
  ladder.initial_step_scale = 0.3;
  const MinteeRun run =
      run_mintee(model, data, ladder, {argmin, argmin, argmin}, 7, false);

  GridDensity grid;
  EvalCounters sc;
  for (int i = 0; i <= 3000; ++i) {
    const double x = -1.5 + 3.5 * i / 3000.0;
    grid.theta.push_back(x);
    grid.log_density.push_back(
        log_posterior_tempered(model, data, {x}, 1.0, sc));
  }
  const auto& chain0 = run.chains[0].run;
  std::vector<double> ones(chain0.count());
  for (std::size_t i = 0; i < chain0.count(); ++i)
    ones[i] = chain0.sample(i)[0];
  CHECK(ks_against_grid(ones, grid) < 0.05);
  // Jumps really happened, so the exactness is tested with exchange moves on.
  CHECK(run.chains[0].jumps_accepted > 100);
}
