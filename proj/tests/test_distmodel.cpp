#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mep/distmodel.hpp"

using mep::DistributionModel;
using mep::GpdParams;

namespace {

// Lognormal mean excess from the partial-expectation formula.
double lognormal_me_oracle(double mu, double sigma, double u) {
  const double z = (std::log(u) - mu) / sigma;
  const double upper = std::exp(mu + 0.5 * sigma * sigma) * 0.5 * std::erfc((z - sigma) / std::sqrt(2.0));
  const double tail = 0.5 * std::erfc(z / std::sqrt(2.0));
  return upper / tail - u;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const mep::Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(GpdCdf, Examples) {
  EXPECT_EQ(mep::gpd_cdf({0.0, 1.0}, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(mep::gpd_cdf({1.0, 1.0}, 1.0), 0.5);
  EXPECT_EQ(mep::gpd_cdf({-0.5, 1.0}, 2.0), 1.0);
}

TEST(GpdCdf, Errors) {
  EXPECT_THROW(mep::gpd_cdf({0.5, 1.0}, -0.1), mep::DomainError);
  EXPECT_THROW(mep::gpd_cdf({-0.5, 1.0}, 2.5), mep::DomainError);
  EXPECT_THROW(mep::gpd_cdf({0.5, 0.0}, 1.0), mep::ParameterError);
  EXPECT_THROW(mep::gpd_cdf({0.5, -1.0}, 1.0), mep::ParameterError);
}

TEST(GpdQuantile, Examples) {
  EXPECT_NEAR(mep::gpd_quantile({0.0, 1.0}, 1.0 - std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_NEAR(mep::gpd_quantile({1.0, 1.0}, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(mep::gpd_quantile({-1.0, 1.0}, 0.25), 0.25, 1e-15);
  EXPECT_THROW(mep::gpd_quantile({0.0, 1.0}, 0.0), mep::DomainError);
  EXPECT_THROW(mep::gpd_quantile({0.0, 1.0}, 1.0), mep::DomainError);
}

TEST(GpdCdf, RoundTripOverParameterGrid) {
  for (double xi : {-1.0, -0.5, 0.0, 0.5, 1.0})
    for (double beta : {0.5, 1.0, 10.0})
      for (int i = 1; i < 1000; ++i) {
        const double u = i / 1000.0;
        const GpdParams p{xi, beta};
        EXPECT_NEAR(mep::gpd_cdf(p, mep::gpd_quantile(p, u)), u, 1e-12) << "xi=" << xi << " beta=" << beta;
      }
}

TEST(GpdCdf, ContinuousAcrossTheExponentialSwitch) {
  for (double x : {0.1, 1.0, 5.0}) {
    const double at0 = mep::gpd_cdf({0.0, 1.0}, x);
    EXPECT_NEAR(mep::gpd_cdf({5e-9, 1.0}, x), at0, 1e-7);
    EXPECT_NEAR(mep::gpd_cdf({2e-8, 1.0}, x), at0, 1e-7);
    EXPECT_NEAR(mep::gpd_cdf({-2e-8, 1.0}, x), at0, 1e-7);
  }
}

TEST(MeClosedForm, Examples) {
  EXPECT_EQ(mep::me_closed_form({0.0, 2.0}, 7.0), 2.0);
  EXPECT_DOUBLE_EQ(mep::me_closed_form({0.5, 1.0}, 2.0), 4.0);
  EXPECT_EQ(mep::me_closed_form({-0.5, 1.0}, 2.0), 0.0);
}

TEST(MeClosedForm, Errors) {
  EXPECT_THROW(mep::me_closed_form({1.0, 1.0}, 1.0), mep::MomentError);
  EXPECT_THROW(mep::me_closed_form({2.0, 1.0}, 1.0), mep::MomentError);
  EXPECT_THROW(mep::me_closed_form({-0.5, 1.0}, 3.0), mep::DomainError);
  EXPECT_THROW(mep::me_closed_form({0.5, 1.0}, -1.0), mep::DomainError);
}

TEST(MeClosedForm, AffineWithSlopeXiOverOneMinusXi) {
  for (double xi : {-0.9, -0.5, 0.0, 0.25, 0.5, 0.9}) {
    const GpdParams p{xi, 1.5};
    const double top = std::isfinite(p.right_endpoint()) ? p.right_endpoint() : 100.0;
    const double h = top / 64.0;
    const double slope = xi / (1.0 - xi);
    for (int i = 0; i < 64; ++i) {
      const double diff = mep::me_closed_form(p, (i + 1) * h) - mep::me_closed_form(p, i * h);
      EXPECT_NEAR(diff / h, slope, 1e-12 * std::max(1.0, std::abs(slope)) * 64);
    }
  }
}

TEST(MeClosedForm, VanishesExactlyAtEndpoint) {
  for (double xi : {-2.0, -0.9, -0.5, -0.1})
    for (double beta : {0.3, 1.0, 7.0}) {
      const GpdParams p{xi, beta};
      EXPECT_EQ(mep::me_closed_form(p, p.right_endpoint()), 0.0);
    }
}

TEST(MeNumeric, Examples) {
  EXPECT_NEAR(mep::me_numeric(DistributionModel::exponential(1.0), 3.0), 1.0, 1e-10);
  EXPECT_NEAR(mep::me_numeric(DistributionModel::pareto(2.0), 2.0), 2.0, 1e-9);
  EXPECT_NEAR(mep::me_numeric(DistributionModel::gpd(0.25, 1.0), 1.0), 5.0 / 3.0, 1e-9);
}

TEST(MeNumeric, Errors) {
  EXPECT_THROW(mep::me_numeric(DistributionModel::gpd(1.0, 1.0), 1.0), mep::MomentError);
  EXPECT_THROW(mep::me_numeric(DistributionModel::pareto(0.8), 2.0), mep::MomentError);
  EXPECT_THROW(mep::me_numeric(DistributionModel::uniform(), 1.0), mep::DomainError);
  EXPECT_THROW(mep::me_numeric(DistributionModel::gpd(-0.5, 1.0), 2.0), mep::DomainError);
}

TEST(MeNumeric, BelowLeftEndpointAddsTheGap) {
  // E[X - u | X > u] for Pareto below its support is E[X] - u = alpha/(alpha-1) - u.
  EXPECT_NEAR(mep::me_numeric(DistributionModel::pareto(3.0), 0.25), 1.5 - 0.25, 1e-9);
}

TEST(MeNumeric, MatchesLognormalPartialExpectation) {
  const auto d = DistributionModel::lognormal(0.0, 1.0);
  for (double u : {0.5, 1.0, 3.0, 10.0, 100.0, 1000.0})
    EXPECT_NEAR(mep::me_numeric(d, u) / lognormal_me_oracle(0.0, 1.0, u), 1.0, 1e-8) << "u=" << u;
}

TEST(MeNumeric, MatchesGpdClosedFormOnThresholdGrid) {
  for (double xi : {-0.9, -0.5, 0.0, 0.25, 0.5, 0.9}) {
    const auto d = DistributionModel::gpd(xi, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double u = d.quantile(0.01 + 0.97 * i / 49.0);
      const double exact = mep::me_closed_form({xi, 1.0}, u);
      EXPECT_LE(std::abs(mep::me_numeric(d, u) - exact), 1e-8 * exact) << "xi=" << xi << " u=" << u;
    }
  }
}

TEST(Model, QuantileIsLeftContinuousInverse) {
  const std::vector<DistributionModel> models = {
      DistributionModel::gpd(0.5, 1.0),   DistributionModel::gpd(-0.5, 2.0), DistributionModel::gpd(0.0, 1.0),
      DistributionModel::pareto(3.0),     DistributionModel::uniform(),     DistributionModel::beta_tail(2.0),
      DistributionModel::exponential(2.0), DistributionModel::lognormal(0.0, 1.0)};
  for (const auto& d : models)
    for (int i = 1; i < 200; ++i) {
      const double u = i / 200.0;
      const double x = d.quantile(u);
      EXPECT_GE(d.cdf(x), u - 1e-12) << d.spec() << " u=" << u;
      const double delta = 1e-6 * std::max(1.0, std::abs(x));
      EXPECT_LT(d.cdf(x - delta), u) << d.spec() << " u=" << u;
      EXPECT_LE(x, d.right_endpoint());
      EXPECT_DOUBLE_EQ(d.tail(x) + d.cdf(x), 1.0);
    }
}

TEST(Model, UpperQuantileAgreesWithQuantile) {
  for (const auto& d : {DistributionModel::pareto(2.0), DistributionModel::lognormal(0.0, 1.0),
                        DistributionModel::beta_tail(3.0), DistributionModel::gpd(0.3, 2.0)})
    for (double p : {0.5, 0.1, 0.01})
      EXPECT_NEAR(d.upper_quantile(p), d.quantile(1.0 - p), 1e-12 * std::max(1.0, d.quantile(1.0 - p)));
}

TEST(Model, RegimesAndShapes) {
  EXPECT_EQ(DistributionModel::pareto(4.0).regime(), mep::Regime::Frechet);
  EXPECT_DOUBLE_EQ(*DistributionModel::pareto(4.0).true_xi(), 0.25);
  EXPECT_EQ(DistributionModel::uniform().regime(), mep::Regime::Weibull);
  EXPECT_DOUBLE_EQ(*DistributionModel::beta_tail(2.0).true_xi(), -0.5);
  EXPECT_EQ(DistributionModel::exponential().regime(), mep::Regime::Gumbel);
  EXPECT_EQ(DistributionModel::lognormal().regime(), mep::Regime::Gumbel);
}

TEST(ParseModelSpec, AcceptsCanonicalForms) {
  const auto d = mep::parse_model_spec("gpd:xi=0.5,beta=1");
  EXPECT_EQ(d.spec(), "gpd:xi=0.5,beta=1");
  EXPECT_EQ(mep::parse_model_spec("gpd:xi=0.5").spec(), "gpd:xi=0.5,beta=1");
  EXPECT_EQ(mep::parse_model_spec(" pareto : alpha = 3 ").spec(), "pareto:alpha=3");
  EXPECT_EQ(mep::parse_model_spec("uniform").spec(), "uniform:a=0,b=1");
  EXPECT_EQ(mep::parse_model_spec("exp").spec(), "exp:mean=1");
  EXPECT_EQ(mep::parse_model_spec("lognormal:sigma=2").spec(), "lognormal:mu=0,sigma=2");
  EXPECT_EQ(mep::parse_model_spec("betatail:p=2").spec(), "betatail:p=2");
}

TEST(ParseModelSpec, ErrorsNameTheField) {
  EXPECT_NE(error_text([] { mep::parse_model_spec("gpd:beta=1"); }).find("'xi'"), std::string::npos);
  EXPECT_NE(error_text([] { mep::parse_model_spec("gpd:xi=abc"); }).find("'xi'"), std::string::npos);
  EXPECT_NE(error_text([] { mep::parse_model_spec("gpd:xi=1,gamma=2"); }).find("'gamma'"), std::string::npos);
  EXPECT_NE(error_text([] { mep::parse_model_spec("cauchy:x=1"); }).find("'name'"), std::string::npos);
  EXPECT_THROW(mep::parse_model_spec("gpd:xi=0.5,beta=-1"), mep::ParameterError);
  EXPECT_THROW(mep::parse_model_spec("pareto:alpha=0"), mep::ParameterError);
}

TEST(Sample, SingleDrawIsQuantileOfFirstUniform) {
  const auto d = DistributionModel::gpd(0.5, 1.0);
  const auto s = mep::sample(d, 1, 11);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.max(), d.quantile(mep::stream_uniform({11, 0, 0}, 0)));
}

TEST(Sample, UniformMeanWithinCltBound) {
  const auto s = mep::sample(DistributionModel::uniform(), 10000, 2024);
  double sum = 0.0;
  for (double v : s.values()) sum += v;
  EXPECT_NEAR(sum / 1e4, 0.5, 4.0 / std::sqrt(12.0 * 1e4));
}

TEST(Sample, Deterministic) {
  const auto d = DistributionModel::lognormal();
  const auto a = mep::sample(d, 5000, 99);
  const auto b = mep::sample(d, 5000, 99);
  ASSERT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
  const auto c = mep::sample(d, 5000, 100);
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin(), c.values().end()));
}

TEST(Sample, SortedDescendingAndSameMultisetAsDraws) {
  const auto d = DistributionModel::exponential();
  const mep::StreamKey key{5, 2, 1};
  auto raw = mep::draw(d, 3000, key);
  const auto s = mep::sample(d, 3000, key);
  const auto v = s.values();
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end(), std::greater<>()));
  std::sort(raw.begin(), raw.end(), std::greater<>());
  EXPECT_TRUE(std::equal(raw.begin(), raw.end(), v.begin(), v.end()));
}

TEST(SortedSample, RejectsUnsortedDescendingInput) {
  EXPECT_THROW(mep::SortedSample::from_descending({1.0, 2.0}), mep::Error);
  const auto s = mep::SortedSample::from_descending({3.0, 2.0, 2.0, 1.0});
  EXPECT_EQ(s.order_stat(2), 2.0);
  EXPECT_EQ(s.count_above(2.0), 1u);
  EXPECT_EQ(s.count_above(0.0), 4u);
}
