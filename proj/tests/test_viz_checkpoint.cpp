#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

TEST(Pca, PreservesDistancesOfPlanarPoints) {
  // Points on a tilted plane in 3-D: the 2-D projection is an isometry.
  slim::SplitMix64 rng(6);
  const Eigen::Vector3d u = Eigen::Vector3d(1, 2, 2).normalized();
  const Eigen::Vector3d v = u.cross(Eigen::Vector3d(0, 0, 1)).normalized();
  Eigen::MatrixXd pts(3, 40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    pts.col(i) = 3.0 * slim::standard_normal(rng) * u + slim::standard_normal(rng) * v + Eigen::Vector3d(5, -1, 2);
  }
  const auto lay = slim::pca_project(pts);
  for (Eigen::Index a = 0; a < 40; ++a) {
    for (Eigen::Index b = a + 1; b < 40; ++b) {
      EXPECT_NEAR((lay.node_xy.row(a) - lay.node_xy.row(b)).norm(), (pts.col(a) - pts.col(b)).norm(), 1e-9);
    }
  }
  EXPECT_NEAR(lay.explained_variance.sum(), 1.0, 1e-12);
  EXPECT_GT(lay.explained_variance(0), lay.explained_variance(1));
  EXPECT_NEAR(lay.node_xy.col(0).mean(), 0.0, 1e-12);
}

TEST(Pca, SignConventionAndArchetypes) {
  slim::SplitMix64 rng(1);
  Eigen::MatrixXd pts(4, 30);
  for (auto& x : pts.reshaped()) x = slim::standard_normal(rng);
  const Eigen::MatrixXd arch = pts.leftCols(3);
  const auto a = slim::pca_project(pts, arch);
  const auto b = slim::pca_project(-pts, Eigen::MatrixXd(-arch));
  // Directions are canonical, so mirrored input gives the mirrored layout.
  EXPECT_TRUE(a.node_xy.isApprox(-b.node_xy, 1e-9));
  EXPECT_TRUE(a.archetype_xy.isApprox(a.node_xy.topRows(3), 1e-9));
}

TEST(Pca, DegenerateInputs) {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(3, 5, 2.0);
  const auto lay = slim::pca_project(same);
  EXPECT_TRUE(lay.node_xy.isZero(1e-12));
  EXPECT_THROW(slim::pca_project(Eigen::MatrixXd::Zero(1, 5)), slim::UsageError);
}

TEST(Circular, AnchorsAndConvexCombinations) {
  Eigen::MatrixXd z(4, 3);
  z << 1, 0.5, 0.25, 0, 0.5, 0.25, 0, 0, 0.25, 0, 0, 0.25;
  const auto lay = slim::circular_layout(z);
  EXPECT_NEAR(lay.node_xy(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(lay.node_xy(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(lay.node_xy(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(lay.node_xy(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(lay.node_xy.row(2).norm(), 0.0, 1e-15);
  EXPECT_NEAR(lay.archetype_xy(2, 0), -1.0, 1e-15);
}

TEST(Circular, NodesStayInsideTheUnitDisk) {
  const auto p = testing_support::random_params({slim::ModelKind::slim, slim::Direction::undirected}, 5, 50, 3, 2.0);
  const auto lay = slim::layout_from_params(p, slim::LayoutMode::circular);
  EXPECT_EQ(lay.node_xy.rows(), 50);
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_LE(lay.node_xy.row(i).norm(), 1.0 + 1e-12);
}

TEST(Layout, ModeChecks) {
  const auto sldm = testing_support::random_params({slim::ModelKind::sldm, slim::Direction::undirected}, 3, 10, 3);
  EXPECT_THROW(slim::layout_from_params(sldm, slim::LayoutMode::circular), slim::UsageError);
  EXPECT_EQ(slim::layout_from_params(sldm, slim::LayoutMode::pca).node_xy.rows(), 10);
  const auto dir = testing_support::random_params({slim::ModelKind::slim, slim::Direction::directed}, 3, 10, 3);
  const auto lay = slim::layout_from_params(dir, slim::LayoutMode::pca);
  EXPECT_EQ(lay.node_xy.rows(), 10);
  EXPECT_EQ(lay.archetype_xy.rows(), 3);
  EXPECT_THROW(slim::parse_layout_mode("tsne"), slim::UsageError);
}

TEST(Overlay, FiltersBySign) {
  const slim::SignedGraph g(4, {{0, 1, 2}, {1, 2, -1}, {2, 3, 1}}, false);
  EXPECT_EQ(slim::edge_overlay(g).size(), 3u);
  EXPECT_EQ(slim::edge_overlay(g, slim::SignFilter::positive).size(), 2u);
  const auto neg = slim::edge_overlay(g, slim::SignFilter::negative);
  ASSERT_EQ(neg.size(), 1u);
  EXPECT_EQ(neg[0].sign, -1);
  EXPECT_THROW(slim::parse_sign_filter("neg"), slim::UsageError);
}

TEST(Layout, JsonAndCsvShapes) {
  auto lay = slim::circular_layout(Eigen::MatrixXd::Constant(3, 2, 1.0 / 3.0));
  lay.edges = {{0, 1, -1}};
  const auto j = slim::to_json(lay, {"a", "b"});
  EXPECT_EQ(j["mode"], "circular");
  EXPECT_EQ(j["nodes"][1]["id"], "b");
  EXPECT_EQ(j["archetypes"].size(), 3u);
  EXPECT_EQ(j["edges"][0]["sign"], -1);
  std::ostringstream nodes, edges;
  slim::write_nodes_csv(nodes, lay);
  slim::write_edges_csv(edges, lay);
  EXPECT_EQ(nodes.str().substr(0, nodes.str().find('\n')), "id,x,y");
  EXPECT_EQ(edges.str(), "i,j,sign\n0,1,-1\n");
}

TEST(Checkpoint, RoundTripIsExactForEveryVariant) {
  for (const auto& v : testing_support::all_variants()) {
    slim::Checkpoint c;
    c.params = testing_support::random_params(v, 3, 7, 11);
    c.seed = 42;
    c.config = {{"lr", 0.05}};
    c.labels = {"a", "b", "c", "d", "e", "f", "g"};
    std::stringstream s;
    slim::save_checkpoint(s, c);
    const auto back = slim::load_checkpoint(s);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.labels, c.labels);
    EXPECT_EQ(back.config, c.config);
    EXPECT_EQ(back.params.variant, v);
    const auto a = c.params.tensors();
    const auto b = back.params.tensors();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
      EXPECT_TRUE(std::equal(a[t].data.begin(), a[t].data.end(), b[t].data.begin(), b[t].data.end()));
    }
  }
}

TEST(Checkpoint, SchemaViolationsNameTheField) {
  slim::Checkpoint c;
  c.params = testing_support::random_params({slim::ModelKind::slim, slim::Direction::undirected}, 2, 4, 1);
  const auto good = slim::to_json(c);
  auto expect_error = [](const nlohmann::json& j, const std::string& needle) {
    try {
      slim::checkpoint_from_json(j);
      ADD_FAILURE() << "accepted: " << needle;
    } catch (const slim::DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto j = good;
  j.erase("k");
  expect_error(j, "'k'");
  j = good;
  j["version"] = 9;
  expect_error(j, "version");
  j = good;
  j["tensors"]["R"]["rows"] = 3;
  expect_error(j, "'R'");
  j = good;
  j["tensors"]["Z_logits"]["data"].erase(0);
  expect_error(j, "'Z_logits'");
  j = good;
  j["tensors"]["W"] = good["tensors"]["R"];
  expect_error(j, "unexpected");
  j = good;
  j["variant"]["model"] = "lsm";
  expect_error(j, "lsm");
  j = good;
  j["tensors"]["gamma"]["data"] = "oops";
  expect_error(j, "'data'");
  std::istringstream broken("{\"format\": ");
  EXPECT_THROW(slim::load_checkpoint(broken), slim::DataError);
}

}  // namespace
