// Link-prediction benchmark on an edge-list file:
//
//   link_prediction graph.txt [sldm|slim] [k] [iters]
//
// Holds out 20% of the edges, fits on the rest, and prints AUC-ROC / AUC-PR
// for sign prediction (p@n) and for positive / negative links against
// non-links (p@z, n@z).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "slim/slim.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s graph.txt [sldm|slim] [k] [iters]\n", argv[0]);
    return 1;
  }
  try {
    const auto graph = slim::largest_connected_component(slim::read_graph_file(argv[1], false));
    slim::BenchmarkConfig cfg;
    cfg.train.variant.model = slim::parse_model_kind(argc > 2 ? argv[2] : "sldm");
    cfg.train.k = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 8;
    cfg.train.iters = argc > 4 ? std::strtoul(argv[4], nullptr, 10) : 5000;
    const auto stats = slim::degree_stats(graph);
    std::printf("%zu nodes, %zu positive, %zu negative\n", stats.n_nodes, stats.n_pos, stats.n_neg);
    const auto result = slim::run_benchmark(graph, cfg, 42, [&](const slim::TraceRow& row) {
      if ((row.iteration + 1) % 500 == 0) std::printf("  iter %zu  block loss %.2f\n", row.iteration + 1, row.block_loss);
    });
    slim::print_summary(std::cout, result.report);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  return 0;
}
