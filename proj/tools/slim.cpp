// slim: command-line front end for ingesting signed networks, fitting latent
// distance / archetypal models, generating synthetic graphs, running the
// link-prediction benchmark and exporting layouts.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slim/slim.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Flag files are JSON objects; keys are long flag names, nested objects
/// address subcommands, e.g. {"fit": {"k": 8, "lr": 0.05}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("settings file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("settings file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static json dump(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& r = opt->results();
        j[name] = r.size() == 1 ? json(r.front()) : json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      json s = dump(sub, default_also);
      if (!s.empty()) j[sub->get_name()] = s;
    }
    return j;
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        walk(value, next, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct CommonOptions {
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::string manifest;
};

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->envname("SLIM_SEED")->capture_default_str();
  cmd->add_flag("--deterministic,!--no-deterministic", c.deterministic,
                "Reproducible single-threaded execution (always the case; recorded in the manifest)")
      ->envname("SLIM_DETERMINISTIC")
      ->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Run manifest path (default: <output>.manifest.json)");
}

std::string manifest_path(const CommonOptions& c, const std::string& primary_output) {
  return c.manifest.empty() ? primary_output + ".manifest.json" : c.manifest;
}

struct ModelOptions {
  std::string model = "sldm";
  std::string variant = "undirected";
  double expressive_sign = -1.0;
  slim::TrainConfig train;
  std::size_t sample_size = 0;  // 0 = default
  std::string init = "spectral";
  std::string trace;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model family")
        ->check(CLI::IsMember({"sldm", "slim"}))
        ->envname("SLIM_MODEL")
        ->capture_default_str();
    cmd->add_option("--variant", variant, "Edge direction handling")
        ->check(CLI::IsMember({"undirected", "directed", "expressive"}))
        ->envname("SLIM_VARIANT")
        ->capture_default_str();
    cmd->add_option("--expressive-sign", expressive_sign,
                    "Sign of the distance inside the negative rate of the expressive variant")
        ->check(CLI::IsMember({-1.0, 1.0}))
        ->capture_default_str();
    cmd->add_option("--k", train.k, "Latent dimension / number of archetypes")
        ->check(CLI::PositiveNumber)
        ->envname("SLIM_K")
        ->capture_default_str();
    cmd->add_option("--lr", train.lr, "Adam learning rate")
        ->check(CLI::PositiveNumber)
        ->envname("SLIM_LR")
        ->capture_default_str();
    cmd->add_option("--iters", train.iters, "Optimization steps")
        ->check(CLI::NonNegativeNumber)
        ->envname("SLIM_ITERS")
        ->capture_default_str();
    cmd->add_option("--sample-size", sample_size, "Nodes drawn per block (default min(3000, N))")
        ->check(CLI::NonNegativeNumber)
        ->envname("SLIM_SAMPLE_SIZE");
    cmd->add_option("--rho", train.rho, "Prior precision")
        ->check(CLI::NonNegativeNumber)
        ->envname("SLIM_RHO")
        ->capture_default_str();
    cmd->add_option("--init", init, "Initialization")
        ->check(CLI::IsMember({"spectral", "random"}))
        ->capture_default_str();
    cmd->add_flag("--rescale-block", train.rescale_block, "Scale the block likelihood by (N/|S|)^2");
    cmd->add_option("--full-loss-every", train.full_loss_every,
                    "Record the full-graph loss every this many steps (0 = never)")
        ->capture_default_str();
    cmd->add_option("--trace", trace, "Loss trace CSV output");
  }

  slim::TrainConfig resolve(const CommonOptions& common) const {
    slim::TrainConfig cfg = train;
    cfg.variant.model = slim::parse_model_kind(model);
    cfg.variant.direction = slim::parse_direction(variant);
    cfg.variant.expressive_negative_sign = expressive_sign;
    if (sample_size > 0) cfg.sample_size = sample_size;
    cfg.init = init == "random" ? slim::InitMethod::random : slim::InitMethod::spectral;
    cfg.seed = common.seed;
    cfg.deterministic = common.deterministic;
    return cfg;
  }
};

json to_json(const slim::TrainConfig& c) {
  json j = {{"model", slim::to_string(c.variant.model)},
            {"variant", slim::to_string(c.variant.direction)},
            {"expressive_sign", c.variant.expressive_negative_sign},
            {"k", c.k},
            {"lr", c.lr},
            {"iters", c.iters},
            {"rho", c.rho},
            {"seed", c.seed},
            {"init", c.init == slim::InitMethod::random ? "random" : "spectral"},
            {"rescale_block", c.rescale_block},
            {"full_loss_every", c.full_loss_every},
            {"deterministic", c.deterministic}};
  j["sample_size"] = c.sample_size ? json(*c.sample_size) : json(nullptr);
  return j;
}

slim::DensityConvention parse_density(const std::string& s) {
  return s == "ordered-pairs" ? slim::DensityConvention::ordered_pairs : slim::DensityConvention::per_mode;
}

std::string stats_line(const slim::NetworkStats& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(density, %%pos, %%neg) = (%.4f, %.1f, %.1f)  nodes %zu  positive %zu  negative %zu",
                s.density, s.pct_pos, s.pct_neg, s.n_nodes, s.n_pos, s.n_neg);
  return buf;
}

json to_json(const slim::NetworkStats& s) {
  return {{"nodes", s.n_nodes}, {"positive", s.n_pos}, {"negative", s.n_neg},
          {"density", s.density}, {"pct_pos", s.pct_pos}, {"pct_neg", s.pct_neg}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw slim::DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_trace(const std::string& path, const std::vector<slim::TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw slim::DataError("cannot write " + path);
  slim::write_trace_csv(out, trace);
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, output, stats, density = "per-mode";
  bool directed = false, aggregate = false, lcc = false;
};

int run_ingest(const IngestArgs& a, const CommonOptions& common) {
  slim::RunManifest m;
  m.command = "ingest";
  m.seed = common.seed;
  m.deterministic = common.deterministic;
  m.add_input(a.input);
  auto records = slim::parse_edge_list(slim::read_file(a.input));
  if (a.aggregate) records = slim::aggregate_temporal(records);
  slim::SignedGraph g;
  try {
    g = slim::SignedGraph::from_records(records, a.directed);
  } catch (const slim::DataError& e) {
    throw slim::DataError(std::string(e.what()) + (a.aggregate ? "" : " (repeated pairs need --aggregate)"));
  }
  if (a.lcc) g = slim::largest_connected_component(g);
  slim::write_graph_file(a.output, g);
  const auto stats = slim::degree_stats(g, parse_density(a.density));
  std::cout << stats_line(stats) << '\n';
  m.outputs.push_back(a.output);
  if (!a.stats.empty()) {
    write_json(a.stats, to_json(stats));
    m.outputs.push_back(a.stats);
  }
  m.config = {{"directed", a.directed}, {"aggregate", a.aggregate}, {"lcc", a.lcc}, {"density", a.density}};
  m.write(manifest_path(common, a.output));
  return kOk;
}

struct FitArgs {
  std::string graph, output;
  ModelOptions model;
};

int run_fit(const FitArgs& a, const CommonOptions& common) {
  const slim::TrainConfig cfg = a.model.resolve(common);
  slim::RunManifest m;
  m.command = "fit";
  m.seed = common.seed;
  m.deterministic = common.deterministic;
  m.config = to_json(cfg);
  m.add_input(a.graph);
  const auto g = slim::read_graph_file(a.graph, cfg.variant.directed());
  const auto result = slim::fit(g, cfg, slim::init_params(g, cfg));
  if (result.unconverged_bessel > 0) {
    std::cerr << "warning: " << result.unconverged_bessel << " Bessel series evaluations hit the term limit\n";
  }
  slim::Checkpoint ck{result.params, to_json(cfg), cfg.seed,
                      std::vector<std::string>(g.labels().begin(), g.labels().end())};
  slim::save_checkpoint(a.output, ck);
  m.outputs.push_back(a.output);
  if (!a.model.trace.empty()) {
    write_trace(a.model.trace, result.trace);
    m.outputs.push_back(a.model.trace);
  }
  if (!result.trace.empty()) std::cout << "final block loss " << result.trace.back().block_loss << '\n';
  m.write(manifest_path(common, a.output));
  return kOk;
}

struct GenerateArgs {
  std::string recipe, checkpoint, output, truth, method = "auto", density = "per-mode";
  bool seed_given = false;
};

slim::SamplingMethod parse_method(const std::string& s) {
  if (s == "exact") return slim::SamplingMethod::exact;
  if (s == "thinning") return slim::SamplingMethod::thinning;
  return slim::SamplingMethod::automatic;
}

int run_generate(const GenerateArgs& a, const CommonOptions& common) {
  slim::RunManifest m;
  m.command = "generate";
  m.deterministic = common.deterministic;
  const auto method = parse_method(a.method);
  slim::SignedGraph g;
  std::vector<std::string> outputs{a.output};
  if (!a.recipe.empty()) {
    m.add_input(a.recipe);
    json j;
    try {
      j = json::parse(slim::read_file(a.recipe));
    } catch (const json::exception& e) {
      throw slim::DataError(a.recipe + ": " + e.what());
    }
    auto recipe = slim::recipe_from_json(j);
    if (a.seed_given) recipe.config.seed = common.seed;
    const auto cfg = slim::resolve_recipe(recipe);
    auto net = slim::sample_network(cfg, method);
    g = std::move(net.graph);
    const std::string truth = a.truth.empty() ? a.output + ".truth.json" : a.truth;
    write_json(truth, slim::to_json(net.truth, cfg));
    outputs.push_back(truth);
    m.seed = cfg.seed;
    m.config = {{"recipe", slim::to_json(cfg)}, {"method", a.method}};
  } else {
    m.add_input(a.checkpoint);
    const auto ck = slim::load_checkpoint(a.checkpoint);
    g = slim::regenerate_from_params(ck.params, common.seed, method);
    if (!ck.labels.empty()) {
      std::vector<slim::Edge> edges(g.edges().begin(), g.edges().end());
      g = slim::SignedGraph(g.n_nodes(), std::move(edges), g.directed(), ck.labels);
    }
    m.seed = common.seed;
    m.config = {{"from_checkpoint", a.checkpoint}, {"method", a.method}};
  }
  slim::write_graph_file(a.output, g);
  std::cout << stats_line(slim::degree_stats(g, parse_density(a.density))) << '\n';
  m.outputs = outputs;
  m.write(manifest_path(common, a.output));
  return kOk;
}

struct EvalArgs {
  std::string graph, report;
  double holdout = 0.2;
  std::string checkpoint;
  ModelOptions model;
};

int run_eval(const EvalArgs& a, const CommonOptions& common) {
  if (!(a.holdout > 0.0 && a.holdout < 1.0)) {
    throw slim::UsageError("--holdout must lie in (0, 1); a zero holdout leaves an empty test set");
  }
  slim::BenchmarkConfig cfg{a.model.resolve(common), a.holdout};
  slim::RunManifest m;
  m.command = "eval";
  m.seed = common.seed;
  m.deterministic = common.deterministic;
  m.config = to_json(cfg.train);
  m.config["holdout"] = a.holdout;
  m.add_input(a.graph);
  const auto g = slim::read_graph_file(a.graph, cfg.train.variant.directed());
  const auto result = slim::run_benchmark(g, cfg, common.seed);
  slim::print_summary(std::cout, result.report);
  const std::string json_path = a.report + ".json";
  const std::string csv_path = a.report + ".csv";
  write_json(json_path, slim::to_json(result.report));
  {
    std::ofstream out(csv_path);
    if (!out) throw slim::DataError("cannot write " + csv_path);
    slim::write_report_csv(out, result.report);
  }
  m.outputs = {json_path, csv_path};
  if (!a.checkpoint.empty()) {
    slim::save_checkpoint(a.checkpoint, {result.fit.params, to_json(cfg.train), cfg.train.seed, {}});
    m.outputs.push_back(a.checkpoint);
  }
  if (!a.model.trace.empty()) {
    write_trace(a.model.trace, result.fit.trace);
    m.outputs.push_back(a.model.trace);
  }
  m.write(manifest_path(common, json_path));
  return kOk;
}

struct ExportArgs {
  std::string checkpoint, graph, output, mode = "pca", edges = "all";
};

int run_export(const ExportArgs& a, const CommonOptions& common) {
  slim::RunManifest m;
  m.command = "export-viz";
  m.seed = common.seed;
  m.deterministic = common.deterministic;
  m.config = {{"mode", a.mode}, {"edges", a.edges}};
  m.add_input(a.checkpoint);
  const auto ck = slim::load_checkpoint(a.checkpoint);
  auto layout = slim::layout_from_params(ck.params, slim::parse_layout_mode(a.mode));
  if (!a.graph.empty()) {
    m.add_input(a.graph);
    const auto g = slim::read_graph_file(a.graph, ck.params.variant.directed());
    if (static_cast<Eigen::Index>(g.n_nodes()) != ck.params.n()) {
      throw slim::DataError("graph has " + std::to_string(g.n_nodes()) + " nodes but the checkpoint has " +
                            std::to_string(ck.params.n()));
    }
    if (!ck.labels.empty() && !std::equal(ck.labels.begin(), ck.labels.end(), g.labels().begin())) {
      throw slim::DataError("graph node identifiers do not match the checkpoint");
    }
    layout.edges = slim::edge_overlay(g, slim::parse_sign_filter(a.edges));
  }
  const std::string json_path = a.output + ".json";
  write_json(json_path, slim::to_json(layout, ck.labels));
  const std::vector<std::pair<std::string, int>> csvs = {
      {a.output + "_nodes.csv", 0}, {a.output + "_archetypes.csv", 1}, {a.output + "_edges.csv", 2}};
  for (const auto& [path, which] : csvs) {
    std::ofstream out(path);
    if (!out) throw slim::DataError("cannot write " + path);
    if (which == 0) slim::write_nodes_csv(out, layout, ck.labels);
    if (which == 1) slim::write_archetypes_csv(out, layout);
    if (which == 2) slim::write_edges_csv(out, layout);
    m.outputs.push_back(path);
  }
  m.outputs.insert(m.outputs.begin(), json_path);
  m.write(manifest_path(common, json_path));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signed network embedding with Skellam latent distance and archetypal models"};
  app.set_version_flag("--version", slim::kVersion);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--settings", "", "JSON file with flag values, grouped by subcommand");
  app.require_subcommand(1);

  CommonOptions common;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Normalize a raw edge list and report network statistics");
  c_ingest->add_option("input", ingest.input, "Edge list: source target weight [timestamp]")->required();
  c_ingest->add_option("-o,--output", ingest.output, "Normalized edge list")->required();
  c_ingest->add_flag("--directed,!--undirected", ingest.directed, "Keep edge direction (default undirected)");
  c_ingest->add_flag("--aggregate", ingest.aggregate, "Sum the weights of repeated pairs");
  c_ingest->add_flag("--lcc", ingest.lcc, "Keep only the largest connected component");
  c_ingest->add_option("--stats", ingest.stats, "Write NetworkStats JSON here");
  c_ingest->add_option("--density", ingest.density, "Density denominator")
      ->check(CLI::IsMember({"per-mode", "ordered-pairs"}))
      ->capture_default_str();
  add_common(c_ingest, common);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a model by block-stochastic MAP estimation");
  c_fit->add_option("graph", fit.graph, "Normalized edge list")->required();
  c_fit->add_option("-o,--output", fit.output, "Checkpoint JSON")->required();
  fit.model.add(c_fit);
  add_common(c_fit, common);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Sample a synthetic signed network");
  auto* g_recipe = c_gen->add_option("--config", gen.recipe, "Generative recipe JSON");
  auto* g_ckpt = c_gen->add_option("--from-checkpoint", gen.checkpoint, "Regenerate from fitted parameters");
  g_recipe->excludes(g_ckpt);
  c_gen->add_option("-o,--output", gen.output, "Generated edge list")->required();
  c_gen->add_option("--truth", gen.truth, "Ground-truth sidecar (default <output>.truth.json)");
  c_gen->add_option("--method", gen.method, "Dyad sampler")
      ->check(CLI::IsMember({"auto", "exact", "thinning"}))
      ->capture_default_str();
  c_gen->add_option("--density", gen.density, "Density denominator for the stats line")
      ->check(CLI::IsMember({"per-mode", "ordered-pairs"}))
      ->capture_default_str();
  add_common(c_gen, common);

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Link-prediction benchmark (p@n, p@z, n@z)");
  c_eval->add_option("graph", ev.graph, "Normalized edge list (connected)")->required();
  c_eval->add_option("--holdout", ev.holdout, "Fraction of edges held out")->capture_default_str();
  c_eval->add_option("-o,--report", ev.report, "Report prefix (writes .json and .csv)")->required();
  c_eval->add_option("--checkpoint", ev.checkpoint, "Also save the residual-graph fit");
  ev.model.add(c_eval);
  add_common(c_eval, common);

  ExportArgs ex;
  auto* c_ex = app.add_subcommand("export-viz", "Export PCA or circular layouts of a fitted model");
  c_ex->add_option("checkpoint", ex.checkpoint, "Checkpoint JSON")->required();
  c_ex->add_option("--mode", ex.mode, "Layout")->check(CLI::IsMember({"pca", "circular"}))->capture_default_str();
  c_ex->add_option("--graph", ex.graph, "Edge list for the signed edge overlay");
  c_ex->add_option("--edges", ex.edges, "Edges to overlay")
      ->check(CLI::IsMember({"all", "positive", "negative"}))
      ->capture_default_str();
  c_ex->add_option("-o,--output", ex.output, "Output prefix")->required();
  add_common(c_ex, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_ingest) return run_ingest(ingest, common);
    if (*c_fit) return run_fit(fit, common);
    if (*c_gen) {
      if (gen.recipe.empty() == gen.checkpoint.empty()) {
        throw slim::UsageError("generate needs exactly one of --config or --from-checkpoint");
      }
      gen.seed_given = c_gen->get_option("--seed")->count() > 0 || std::getenv("SLIM_SEED") != nullptr;
      return run_generate(gen, common);
    }
    if (*c_eval) return run_eval(ev, common);
    if (*c_ex) return run_export(ex, common);
  } catch (const slim::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const slim::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const slim::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
