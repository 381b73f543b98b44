#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using slim::Params;
using slim::Variant;
using testing_support::all_variants;
using testing_support::random_graph;
using testing_support::random_params;

std::string describe(const Variant& v) {
  return slim::to_string(v) + " sign " + std::to_string(v.expressive_negative_sign);
}

TEST(Loss, MatchesReferenceDoubleLoop) {
  for (const auto& v : all_variants()) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const std::size_t n = 8 + 4 * seed;
      const auto g = random_graph(n, 0.3, seed, v.directed());
      const auto p = random_params(v, 3, static_cast<Eigen::Index>(n), 100 + seed);
      const double got = slim::full_loss(p, g, {0.7, 1.0}).value;
      const double want = testing_support::ref_negative_log_posterior(p, g, 0.7);
      EXPECT_NEAR(got, want, 1e-10 * std::abs(want)) << describe(v);
    }
  }
}

TEST(Loss, BlockCoversOnlyItsDyads) {
  const Variant v{slim::ModelKind::sldm, slim::Direction::undirected};
  const auto g = random_graph(12, 0.4, 8);
  const auto p = random_params(v, 2, 12, 9);
  const std::vector<slim::NodeId> block{1, 4, 5, 9};
  const auto r = slim::negative_log_posterior(p, g, block, {0.0, 1.0});
  EXPECT_EQ(r.dyads, 6u);
  const auto sub = slim::induced_subgraph(g, block);
  Params q = Params::zeros(v, 2, 4);
  for (Eigen::Index a = 0; a < 4; ++a) {
    q.Z.col(a) = p.Z.col(block[a]);
    q.gamma(a) = p.gamma(block[a]);
    q.delta(a) = p.delta(block[a]);
  }
  EXPECT_NEAR(r.value, slim::full_loss(q, sub, {0.0, 1.0}).value, 1e-12);
  EXPECT_THROW(slim::negative_log_posterior(p, g, std::vector<slim::NodeId>{4, 1}), slim::UsageError);
  EXPECT_THROW(slim::negative_log_posterior(p, g, std::vector<slim::NodeId>{4, 4}), slim::UsageError);
}

TEST(Loss, DataScaleMultipliesLikelihoodOnly) {
  const Variant v{slim::ModelKind::slim, slim::Direction::undirected};
  const auto g = random_graph(10, 0.3, 4);
  const auto p = random_params(v, 3, 10, 5);
  const auto a = slim::full_loss(p, g, {1.0, 1.0});
  const auto b = slim::full_loss(p, g, {1.0, 4.0});
  EXPECT_NEAR(b.data_term, 4.0 * a.data_term, 1e-9);
  EXPECT_NEAR(b.regularizer, a.regularizer, 1e-12);
}

TEST(Loss, RejectsMismatchedGraph) {
  const auto g = random_graph(10, 0.3, 4);
  const auto p = random_params({slim::ModelKind::sldm, slim::Direction::directed}, 2, 10, 5);
  EXPECT_THROW(slim::full_loss(p, g), slim::UsageError);
  const auto q = random_params({slim::ModelKind::sldm, slim::Direction::undirected}, 2, 9, 5);
  EXPECT_THROW(slim::full_loss(q, g), slim::DataError);
}

/// Largest componentwise relative deviation between the analytic gradient and
/// central differences with step h.
double gradient_error(const Params& p, const slim::SignedGraph& g, double h, const slim::LossConfig& cfg) {
  Params grad;
  const auto nodes = slim::all_nodes(g.n_nodes());
  slim::loss_and_gradient(p, g, nodes, cfg, grad);
  Params probe = p;
  auto probe_t = probe.tensors();
  const auto grad_t = grad.tensors();
  double worst = 0.0;
  for (std::size_t t = 0; t < probe_t.size(); ++t) {
    for (std::size_t e = 0; e < probe_t[t].data.size(); ++e) {
      const double orig = probe_t[t].data[e];
      probe_t[t].data[e] = orig + h;
      const double up = slim::negative_log_posterior(probe, g, nodes, cfg).value;
      probe_t[t].data[e] = orig - h;
      const double down = slim::negative_log_posterior(probe, g, nodes, cfg).value;
      probe_t[t].data[e] = orig;
      const double fd = (up - down) / (2.0 * h);
      const double an = grad_t[t].data[e];
      const double err = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-3});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

TEST(Gradient, MatchesCentralDifferencesForEveryVariant) {
  for (const auto& v : all_variants()) {
    for (std::uint64_t seed : {1, 2}) {
      const auto g = random_graph(10, 0.35, 40 + seed, v.directed());
      const auto p = random_params(v, 3, 10, 70 + seed);
      EXPECT_LE(gradient_error(p, g, 1e-5, {1.0, 1.0}), 1e-4) << describe(v) << " seed " << seed;
    }
  }
}

TEST(Gradient, RescaledBlockAndNoPrior) {
  const Variant v{slim::ModelKind::slim, slim::Direction::directed};
  const auto g = random_graph(10, 0.35, 3, true);
  const auto p = random_params(v, 4, 10, 3);
  EXPECT_LE(gradient_error(p, g, 1e-5, {0.0, 2.5}), 1e-4);
}

TEST(DyadLoss, DerivativesAndPushPull) {
  slim::SplitMix64 rng(17);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    slim::DyadRates r;
    r.log_pos = 2.0 * slim::standard_normal(rng);
    r.log_neg = 2.0 * slim::standard_normal(rng);
    r.pos = std::exp(r.log_pos);
    r.neg = std::exp(r.log_neg);
    const auto y = static_cast<slim::Weight>(slim::uniform_index(rng, 9)) - 4;
    const auto l = slim::skellam_dyad_loss(y, r);
    // Large Bessel arguments exceed the truncated series; those dyads are
    // flagged rather than evaluated exactly.
    if (!l.converged) continue;
    EXPECT_NEAR(l.value, testing_support::ref_skellam_nll(y, r.pos, r.neg), 1e-10 * std::max(1.0, std::abs(l.value)));
    const double h = 1e-6;
    auto at = [&](double lp, double ln) {
      slim::DyadRates s;
      s.log_pos = lp;
      s.log_neg = ln;
      s.pos = std::exp(lp);
      s.neg = std::exp(ln);
      return slim::skellam_dyad_loss(y, s).value;
    };
    const double fd_pos = (at(r.log_pos + h, r.log_neg) - at(r.log_pos - h, r.log_neg)) / (2 * h);
    const double fd_neg = (at(r.log_pos, r.log_neg + h) - at(r.log_pos, r.log_neg - h)) / (2 * h);
    EXPECT_NEAR(l.d_log_pos, fd_pos, 1e-6 * std::max(1.0, std::abs(fd_pos)));
    EXPECT_NEAR(l.d_log_neg, fd_neg, 1e-6 * std::max(1.0, std::abs(fd_neg)));
    // A shared distance d enters as -d and +d: dl/dd = lambda_neg - lambda_pos + y.
    const double dd = l.d_log_neg - l.d_log_pos;
    EXPECT_NEAR(dd, r.neg - r.pos + static_cast<double>(y), 1e-9 * std::max(1.0, std::abs(dd)));
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(DyadLoss, FlagsTruncatedSeries) {
  slim::DyadRates r;
  r.log_pos = r.log_neg = std::log(150.0);
  r.pos = r.neg = 150.0;
  EXPECT_FALSE(slim::skellam_dyad_loss(0, r).converged);
}

TEST(DyadLoss, PositiveLinksPullNegativeLinksPush) {
  // With balanced rates the distance derivative has the sign of y: minimizing
  // the loss shrinks the distance of positive dyads and grows that of negative ones.
  slim::DyadRates r;
  r.log_pos = r.log_neg = 0.3;
  r.pos = r.neg = std::exp(0.3);
  for (slim::Weight y : {1, 2, 5}) {
    EXPECT_GT(slim::skellam_dyad_loss(y, r).d_log_neg - slim::skellam_dyad_loss(y, r).d_log_pos, 0.0);
    EXPECT_LT(slim::skellam_dyad_loss(-y, r).d_log_neg - slim::skellam_dyad_loss(-y, r).d_log_pos, 0.0);
  }
}

TEST(Rates, ZeroDistanceZeroEffects) {
  const Variant v{slim::ModelKind::sldm, slim::Direction::undirected};
  const Params p = Params::zeros(v, 2, 3);
  const std::vector<slim::Dyad> d{{0, 1}};
  const auto r = slim::rates_sldm(p, d);
  EXPECT_DOUBLE_EQ(r[0].pos, 1.0);
  EXPECT_DOUBLE_EQ(r[0].neg, 1.0);
}

TEST(Rates, ClampedAtFloor) {
  const Variant v{slim::ModelKind::sldm, slim::Direction::undirected};
  Params p = Params::zeros(v, 2, 2);
  p.gamma.setConstant(-100.0);
  const auto r = slim::dyad_rates(slim::make_geometry(p), 0, 1);
  EXPECT_TRUE(r.pos_clamped);
  EXPECT_EQ(r.pos, slim::kRateFloor);
  EXPECT_TRUE(std::isfinite(r.log_pos));
}

TEST(Rates, VariantChecks) {
  const auto p = random_params({slim::ModelKind::slim, slim::Direction::undirected}, 2, 4, 1);
  const std::vector<slim::Dyad> d{{0, 1}};
  EXPECT_THROW(slim::rates_sldm(p, d), slim::UsageError);
  EXPECT_NO_THROW(slim::rates_slim(p, d));
  EXPECT_THROW(slim::rates_directed(p, d), slim::UsageError);
}

TEST(Simplex, MixturesAndGatesStayOnSimplex) {
  const auto p = random_params({slim::ModelKind::slim, slim::Direction::expressive}, 4, 30, 2, 3.0);
  const auto view = slim::archetype_view(p);
  for (Eigen::Index c = 0; c < view.mixtures.cols(); ++c) {
    EXPECT_NEAR(view.mixtures.col(c).sum(), 1.0, 1e-12);
    EXPECT_GE(view.mixtures.col(c).minCoeff(), 0.0);
  }
  for (Eigen::Index d = 0; d < view.C.cols(); ++d) {
    EXPECT_NEAR(view.C.col(d).sum(), 1.0, 1e-12);
    EXPECT_GE(view.C.col(d).minCoeff(), 0.0);
  }
  EXPECT_TRUE(view.embedding.isApprox(view.A * view.mixtures));
}

TEST(Simplex, SoftmaxIsShiftInvariant) {
  Eigen::MatrixXd l(3, 2);
  l << 1, 700, 2, 701, 3, 702;
  const auto z = slim::mixture_weights(l);
  EXPECT_TRUE(z.col(0).isApprox(z.col(1), 1e-12));
  EXPECT_TRUE(z.allFinite());
}

TEST(Params, ValidateCatchesShapeAndNonFinite) {
  auto p = random_params({slim::ModelKind::sldm, slim::Direction::directed}, 2, 5, 1);
  EXPECT_NO_THROW(p.validate());
  p.W.resize(2, 4);
  EXPECT_THROW(p.validate(), slim::DataError);
  auto q = random_params({slim::ModelKind::sldm, slim::Direction::undirected}, 2, 5, 1);
  q.gamma(0) = std::nan("");
  EXPECT_THROW(q.validate(), slim::NumericError);
}

TEST(Params, TensorNamesPerVariant) {
  auto names = [](const Params& p) {
    std::string s;
    for (const auto& t : p.tensors()) s += std::string(t.name) + " ";
    return s;
  };
  EXPECT_EQ(names(Params::zeros({slim::ModelKind::sldm, slim::Direction::undirected}, 2, 3)), "Z gamma delta ");
  EXPECT_EQ(names(Params::zeros({slim::ModelKind::slim, slim::Direction::expressive}, 2, 3)),
            "R Z_logits W_logits U_logits G beta gamma delta epsilon ");
}

}  // namespace
