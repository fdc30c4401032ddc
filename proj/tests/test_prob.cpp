#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uprop/errors.hpp"
#include "uprop/prob.hpp"

using namespace uprop;
using namespace uprop::prob;

TEST(DistVector, FlatLayoutIsLocationsThenScales) {
  const DistVector d({1.0, 2.0, 3.0}, {0.1, 0.2, 0.3});
  EXPECT_EQ(d.flatten(), (std::vector<double>{1, 2, 3, 0.1, 0.2, 0.3}));
  EXPECT_EQ(DistVector::from_flat(d.flatten()), d);
  EXPECT_THROW(DistVector::from_flat(std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(DistVector, FiveDimsGiveTenInputs) {
  EXPECT_EQ(DistVector(5).flatten().size(), 10u);
}

TEST(DistVector, ObservedHasZeroScaleAndNegativeScaleRejected) {
  const auto o = DistVector::observed(std::vector<double>{4.0, -1.0});
  EXPECT_EQ(o.sigma, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(DistVector({0.0}, {-0.1}), DomainError);
  EXPECT_THROW(DistVector({0.0, 1.0}, {0.1}), ShapeError);
}

TEST(SigmaSquash, WorkedValues) {
  EXPECT_NEAR(squash_sigma(0.0, SigmaSquash{0.0}), 0.693147, 1e-6);
  EXPECT_NEAR(squash_sigma(-40.0, SigmaSquash{1e-3}), 1e-3, 1e-9);
  EXPECT_TRUE(std::isfinite(squash_sigma(800.0, SigmaSquash{})));
  EXPECT_NEAR(squash_sigma(800.0, SigmaSquash{}), 800.001, 1e-9);
}

TEST(SigmaSquash, StrictlyMonotone) {
  const SigmaSquash s;
  double prev = s(-30.0);
  for (double raw = -29.5; raw <= 30.0; raw += 0.5) {
    const double cur = s(raw);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(Nll, WorkedValues) {
  const DistVector b({0.0}, {1.0});
  EXPECT_NEAR(nll(b, std::vector<double>{0.0}), 0.918939, 5e-7);
  EXPECT_NEAR(nll(b, std::vector<double>{2.0}), 2.918939, 5e-7);
}

TEST(Nll, SumsOverDimensions) {
  const DistVector two({0.5, -1.0}, {0.7, 2.0});
  const double joint = nll(two, std::vector<double>{1.0, 3.0});
  EXPECT_DOUBLE_EQ(joint, nll_term(0.5, 0.7, 1.0) + nll_term(-1.0, 2.0, 3.0));
}

TEST(Nll, ZeroScaleIsDomainError) {
  EXPECT_THROW(nll(DistVector({0.0}, {0.0}), std::vector<double>{0.0}), DomainError);
}

TEST(Nll, MatchesCdfOracleOnRandomCases) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mu(-3.0, 3.0), sigma(0.2, 3.0), z(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double m = mu(rng), s = sigma(rng), x = m + s * z(rng);
    EXPECT_NEAR(nll(DistVector({m}, {s}), std::vector<double>{x}),
                test_support::nll_from_cdf(m, s, x), 1e-6);
  }
}

TEST(Kl, WorkedValuesAndAsymmetry) {
  const DistVector p({0.0}, {1.0}), q({1.0}, {2.0});
  EXPECT_NEAR(kl(p, q), 0.443147, 5e-7);
  EXPECT_NEAR(kl(p, q), test_support::kl_by_integration(0, 1, 1, 2), 1e-6);
  const double reverse = kl(q, p);
  EXPECT_NEAR(reverse, -std::log(2.0) + 2.0, 1e-12);
  EXPECT_NEAR(reverse, test_support::kl_by_integration(1, 2, 0, 1), 1e-6);
  EXPECT_GT(std::abs(reverse - kl(p, q)), 0.5);
  EXPECT_EQ(kl(p, p), 0.0);
}

TEST(Kl, MatchesIntegrationOnRandomCases) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> mu(-2.0, 2.0), sigma(0.3, 2.5);
  for (int i = 0; i < 100; ++i) {
    const double mp = mu(rng), sp = sigma(rng), mq = mu(rng), sq = sigma(rng);
    EXPECT_NEAR(kl(DistVector({mp}, {sp}), DistVector({mq}, {sq})),
                test_support::kl_by_integration(mp, sp, mq, sq), 1e-6);
  }
}

TEST(Kl, NonnegativeAndAdditive) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mu(-2.0, 2.0), sigma(0.1, 3.0);
  for (int i = 0; i < 200; ++i) {
    const DistVector p({mu(rng), mu(rng)}, {sigma(rng), sigma(rng)});
    const DistVector q({mu(rng), mu(rng)}, {sigma(rng), sigma(rng)});
    EXPECT_GE(kl(p, q), 0.0);
    const double split = kl(DistVector({p.mu[0]}, {p.sigma[0]}), DistVector({q.mu[0]}, {q.sigma[0]})) +
                         kl(DistVector({p.mu[1]}, {p.sigma[1]}), DistVector({q.mu[1]}, {q.sigma[1]}));
    EXPECT_NEAR(kl(p, q), split, 1e-12);
  }
  EXPECT_THROW(kl(DistVector({0.0}, {0.0}), DistVector({0.0}, {1.0})), DomainError);
}

TEST(Interval95, StandardNormalAndFloor) {
  const auto [lo, hi] = interval95(DistVector({0.0}, {1.0}));
  EXPECT_NEAR(lo[0], -1.95996, 5e-6);
  EXPECT_NEAR(hi[0], 1.95996, 5e-6);
  const auto [l2, h2] = interval95(DistVector({5.0}, {1e-3}));
  EXPECT_NEAR(h2[0] - l2[0], 2 * 1.959964 * 1e-3, 1e-9);
  EXPECT_LT(l2[0], 5.0);
  EXPECT_GT(h2[0], 5.0);
}
