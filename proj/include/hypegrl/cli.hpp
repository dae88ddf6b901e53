#pragma once

// The hypegrl command line. Lives in a header so tests can drive it in
// process. Exit codes: 0 success, 1 I/O or data error, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypegrl/config.hpp"
#include "hypegrl/evalkit.hpp"
#include "hypegrl/io.hpp"
#include "hypegrl/pipeline.hpp"
#include "hypegrl/synthgen.hpp"

namespace hypegrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Mean and sample standard deviation.
inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

// "51.6 ± 1.8" from fractions, in percent with `decimals` places.
inline std::string format_pm(const std::vector<double>& fractions, int decimals) {
  const auto [m, sd] = mean_sd(fractions);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f \xC2\xB1 %.*f", decimals, 100.0 * m, decimals, 100.0 * sd);
  return buf;
}

namespace detail {

inline std::string base_name(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  // generate
  std::string kind;
  std::string out;
  std::string labels_out;
  std::string truth_out;
  std::string depths_out;
  std::optional<int> branching;
  std::optional<int> depth;

  // embed / eval
  std::string method;
  std::string graph;
  std::string labels;
  std::optional<int> dim;
  std::optional<double> q;
  std::optional<int> trials;
  std::vector<int> k;

  // convert / export-polar
  std::string in;
  std::string to;
  std::string depths;

  // stats
  std::optional<std::uint64_t> budget;
};

inline RunConfig effective_config(const Options& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.dim) c.dim = *o.dim;
  if (o.branching) c.tree.branching = *o.branching;
  if (o.depth) c.tree.depth = *o.depth;
  if (o.q) c.eval_lp.q = *o.q;
  if (o.trials) c.eval_lp.trials = c.eval_nc.trials = *o.trials;
  if (!o.k.empty()) c.eval_nc.k = o.k;
  if (o.budget) c.quadruple_budget = *o.budget;
  c.gaussian.seed = c.seed;
  c.validate();
  return c;
}

inline Method require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ConfigError("unknown method '" + name + "'; valid methods: " + std::string(kMethodList));
  return *m;
}

inline int cmd_generate(const Options& o) {
  const RunConfig c = effective_config(o);
  const std::string digest = c.digest();
  if (o.kind == "tree") {
    const BalancedTree t = balanced_tree(c.tree.branching, c.tree.depth);
    io::write_edge_list(o.out, t.graph, digest);
    if (!o.depths_out.empty()) io::write_depths(o.depths_out, t.graph, t.depth, digest);
    std::cout << "generated tree: " << t.graph.num_nodes() << " nodes, " << t.graph.num_edges() << " edges\n";
    return kExitOk;
  }
  if (o.kind == "gaussian") {
    const GaussianGraph gg = gaussian_hyperbolic_graph(c.gaussian);
    const Graph& g = gg.labeled.graph;
    io::write_edge_list(o.out, g, digest);
    if (!o.labels_out.empty()) io::write_labels(o.labels_out, g, gg.labeled.labels, digest);
    if (!o.truth_out.empty()) io::write_embedding_file(o.truth_out, gg.truth, g.names(), digest);
    std::cout << "generated gaussian: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges, "
              << c.gaussian.n_classes << " classes\n";
    return kExitOk;
  }
  throw ConfigError("unknown generator kind '" + o.kind + "'; valid kinds: tree, gaussian");
}

inline int cmd_embed(const Options& o) {
  const Method method = require_method(o.method);
  const RunConfig c = effective_config(o);
  const auto load = load_edge_list(o.graph);
  const EmbedResult r = embed_graph(load.graph, method, c, c.seed);
  if (r.euclidean) io::write_embedding_file(o.out, r.spectral, load.graph.names(), c.digest());
  else io::write_embedding_file(o.out, r.hyperbolic, load.graph.names(), c.digest());
  // Wall-clock time goes to stderr so that the regular outputs stay reproducible.
  std::fprintf(stderr, "embed: %s took %.3f s\n", std::string(to_string(method)).c_str(), r.seconds);
  std::cout << "embedded " << load.graph.num_nodes() << " nodes with " << to_string(method) << " (model="
            << (r.euclidean ? std::string("euclidean-signed") : std::string(to_string(r.hyperbolic.model)))
            << ", dim=" << c.dim << ")\n";
  return kExitOk;
}

inline int cmd_convert(const Options& o) {
  const auto target = parse_model(o.to);
  if (!target) throw ConfigError("unknown target model '" + o.to + "'; valid models: lorentz, poincare, native");
  const io::EmbeddingFile f = io::read_embedding(o.in);
  if (f.euclidean_signed) throw ConfigError(o.in + ": euclidean-signed embeddings are not hyperbolic");
  const Embedding out = convert(f.hyperbolic, *target);
  io::write_embedding_file(o.out, out, f.names, f.digest);
  std::cout << "converted " << out.size() << " rows from " << to_string(f.hyperbolic.model) << " to "
            << to_string(*target) << "\n";
  return kExitOk;
}

// Writes JSON lines to --out when given, otherwise to stdout.
class RecordSink {
 public:
  explicit RecordSink(const std::string& path) : path_(path) {
    if (!path_.empty()) file_ = io::open_output(path_);
  }
  void put(const nlohmann::ordered_json& j) { (path_.empty() ? std::cout : file_) << j.dump() << '\n'; }
  void close() {
    if (!path_.empty()) io::finish(file_, path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

inline int cmd_eval_lp(const Options& o) {
  const Method method = require_method(o.method);
  const RunConfig c = effective_config(o);
  const std::string digest = c.digest();
  const auto load = load_edge_list(o.graph);
  const Graph& g = load.graph;
  RecordSink sink(o.out);
  std::vector<double> f1s;
  double hits = 0.0;
  double removed = 0.0;
  for (int t = 0; t < c.eval_lp.trials; ++t) {
    // Both the edge split and the embedding are re-seeded per trial.
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(t);
    const LinkSplit split = split_edges(g, c.eval_lp.q, seed);
    if (split.removed.empty()) {
      // Nothing to predict; the record is kept so trial numbering stays intact.
      log::warn("eval-lp: trial ", t, " removed no edges and is left out of the summary");
      nlohmann::ordered_json j;
      j["method"] = to_string(method);
      j["dataset"] = base_name(o.graph);
      j["seed"] = seed;
      j["trial"] = t;
      j["q"] = c.eval_lp.q;
      j["n_retained"] = split.retained.size();
      j["n_removed"] = 0;
      j["n_non_edges"] = split.non_edges.size();
      j["f1"] = nullptr;
      j["config"] = digest;
      sink.put(j);
      continue;
    }
    const Graph train = split.training_graph();
    const EmbedResult r = embed_graph(train, method, c, seed);
    const RankedPairs ranked =
        r.euclidean ? rank_candidates_by_score(r.spectral, split) : rank_candidates_by_distance(r.hyperbolic, split);
    const LPReport rep = evaluate_link_prediction(ranked, split);
    f1s.push_back(rep.f1);
    hits += static_cast<double>(rep.lift_hits);
    removed += static_cast<double>(rep.lift_denominator);
    nlohmann::ordered_json j;
    j["method"] = to_string(method);
    j["dataset"] = base_name(o.graph);
    j["seed"] = seed;
    j["trial"] = t;
    j["q"] = c.eval_lp.q;
    j["n_retained"] = split.retained.size();
    j["n_removed"] = split.removed.size();
    j["n_non_edges"] = split.non_edges.size();
    j["f1"] = rep.f1;
    j["lift_hits"] = rep.lift_hits;
    j["lift_denominator"] = rep.lift_denominator;
    j["decile_size"] = rep.decile_size;
    j["config"] = digest;
    sink.put(j);
    std::fprintf(stderr, "eval-lp: trial %d embedding took %.3f s\n", t, r.seconds);
  }
  sink.close();
  if (f1s.empty()) throw DataError("eval-lp: no trial removed any edge; raise the trial count or lower q");
  const double n = static_cast<double>(f1s.size());
  std::cout << to_string(method) << " on " << base_name(o.graph) << ": F1 (%) " << format_pm(f1s, 1)
            << ", lift " << std::llround(hits / n) << "/" << std::llround(removed / n) << " (mean over "
            << f1s.size() << " of " << c.eval_lp.trials << " trials)\n";
  return kExitOk;
}

inline int cmd_eval_nc(const Options& o) {
  const Method method = require_method(o.method);
  if (method == Method::rdpg) throw ConfigError("eval-nc needs a hyperbolic method");
  const RunConfig c = effective_config(o);
  const std::string digest = c.digest();
  const auto load = load_edge_list(o.graph);
  const LabeledGraph lg = load_labels(o.labels, load.graph);
  const EmbedResult r = embed_graph(lg.graph, method, c, c.seed);
  std::fprintf(stderr, "eval-nc: embedding took %.3f s\n", r.seconds);
  RecordSink sink(o.out);
  std::map<int, std::vector<double>> per_k;
  for (int t = 0; t < c.eval_nc.trials; ++t) {
    const std::uint64_t split_seed = c.seed + static_cast<std::uint64_t>(t);
    const StratifiedSplit sp = stratified_split(lg.labels, c.eval_nc.train_fraction, split_seed);
    std::vector<int> train_labels, truth;
    for (NodeId i : sp.train) train_labels.push_back(lg.labels[i]);
    for (NodeId i : sp.test) truth.push_back(lg.labels[i]);
    for (int k : c.eval_nc.k) {
      if (static_cast<std::size_t>(k) > sp.train.size()) throw ConfigError("eval-nc: k exceeds the training set size");
      const auto pred = hyperbolic_knn_classify(r.hyperbolic, sp.train, train_labels, sp.test, k);
      NCReport rep = macro_f1(pred, truth);
      rep.k = k;
      rep.split_seed = split_seed;
      per_k[k].push_back(rep.macro_f1);
      nlohmann::ordered_json j;
      j["method"] = to_string(method);
      j["dataset"] = base_name(o.graph);
      j["seed"] = c.seed;
      j["split_seed"] = split_seed;
      j["trial"] = t;
      j["k"] = k;
      j["train_fraction"] = c.eval_nc.train_fraction;
      j["macro_f1"] = rep.macro_f1;
      nlohmann::ordered_json pc = nlohmann::ordered_json::object();
      for (std::size_t a = 0; a < rep.classes.size(); ++a) pc[lg.class_names.at(rep.classes[a])] = rep.per_class_f1[a];
      j["per_class_f1"] = pc;
      if (rep.binary_f1 >= 0.0) j["binary_f1"] = rep.binary_f1;
      j["config"] = digest;
      sink.put(j);
    }
  }
  sink.close();
  for (int k : c.eval_nc.k) {
    std::cout << to_string(method) << " on " << base_name(o.graph) << ": KNN (k=" << k << ") macro F1 (%) "
              << format_pm(per_k[k], 2) << " over " << c.eval_nc.trials << " trials\n";
  }
  return kExitOk;
}

inline int cmd_stats(const Options& o) {
  const RunConfig c = effective_config(o);
  const auto load = load_edge_list(o.graph);
  Graph g = load.graph;
  std::ostringstream report;
  if (!is_connected(g)) {
    const Component lcc = largest_connected_component(g);
    report << "note: graph is disconnected; statistics below are for the largest component ("
           << lcc.graph.num_nodes() << " of " << g.num_nodes() << " nodes)\n";
    g = lcc.graph;
  }
  report << "nodes=" << g.num_nodes() << " edges=" << g.num_edges() << " diameter=" << diameter(g);
  if (g.num_nodes() >= 4) {
    const Hyperbolicity h = gromov_delta_mean(g, c.quadruple_budget, c.seed);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", h.delta_mean);
    report << " delta_mean=" << buf << " (" << (h.exhaustive ? "exhaustive" : "sampled") << ", " << h.quadruples
           << " quadruples)";
  } else {
    report << " delta_mean=n/a (fewer than 4 nodes)";
  }
  report << '\n';
  std::cout << report.str();
  if (!o.out.empty()) {
    auto out = io::open_output(o.out);
    io::write_digest(out, c.digest());
    out << report.str();
    io::finish(out, o.out);
  }
  return kExitOk;
}

inline int cmd_export_polar(const Options& o) {
  const RunConfig c = effective_config(o);
  const io::EmbeddingFile f = io::read_embedding(o.in);
  if (f.euclidean_signed) throw ConfigError(o.in + ": euclidean-signed embeddings have no polar form");
  if (f.hyperbolic.dim != 2) throw ConfigError(o.in + ": polar export needs a 2-dimensional embedding");
  const Embedding nat = convert(f.hyperbolic, Model::native);
  std::map<std::string, int> depth;
  if (!o.depths.empty())
    for (const auto& [node, d] : io::read_depths(o.depths)) depth[node] = d;
  auto out = io::open_output(o.out);
  io::write_digest(out, f.digest.empty() ? c.digest() : f.digest);
  out << "node_id,r,theta" << (o.depths.empty() ? "" : ",depth") << '\n';
  for (Eigen::Index i = 0; i < nat.size(); ++i) {
    out << f.names[i] << ',' << io::format_real(nat.coords(i, 0)) << ',' << io::format_real(nat.coords(i, 1));
    if (!o.depths.empty()) {
      const auto it = depth.find(f.names[i]);
      if (it == depth.end()) throw DataError(o.depths + ": no depth for node '" + f.names[i] + "'");
      out << ',' << it->second;
    }
    out << '\n';
  }
  io::finish(out, o.out);
  std::cout << "exported " << nat.size() << " rows\n";
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  detail::Options o;
  CLI::App app{"hypegrl: hyperbolic graph embeddings and their evaluation"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--config", o.config_path, "JSON run configuration");
  app.add_option("--seed", o.seed, "global seed (overrides the config)");
  app.add_option("--threads", o.threads, "worker thread cap; 1 gives bit-reproducible runs");

  auto* gen = app.add_subcommand("generate", "write a synthetic graph");
  gen->add_option("kind", o.kind, "tree or gaussian")->required();
  gen->add_option("--out", o.out, "edge list path")->required();
  gen->add_option("--labels", o.labels_out, "label CSV path (gaussian)");
  gen->add_option("--truth", o.truth_out, "ground-truth embedding path (gaussian)");
  gen->add_option("--depths", o.depths_out, "depth CSV path (tree)");
  gen->add_option("--branching", o.branching, "tree branching factor");
  gen->add_option("--depth", o.depth, "tree depth");

  auto* emb = app.add_subcommand("embed", "embed a graph");
  emb->add_option("method", o.method, std::string(kMethodList))->required();
  emb->add_option("--graph", o.graph, "edge list")->required();
  emb->add_option("--out", o.out, "embedding path")->required();
  emb->add_option("--dim", o.dim, "embedding dimension n");

  auto* conv = app.add_subcommand("convert", "convert an embedding between models");
  conv->add_option("--in", o.in, "embedding path")->required();
  conv->add_option("--to", o.to, "lorentz, poincare or native")->required();
  conv->add_option("--out", o.out, "output path")->required();

  auto* lp = app.add_subcommand("eval-lp", "link prediction by edge removal");
  lp->add_option("method", o.method, std::string(kMethodList))->required();
  lp->add_option("--graph", o.graph, "edge list")->required();
  lp->add_option("--q", o.q, "edge retention probability");
  lp->add_option("--trials", o.trials, "number of trials");
  lp->add_option("--dim", o.dim, "embedding dimension n");
  lp->add_option("--out", o.out, "JSON-lines report path (default stdout)");

  auto* nc = app.add_subcommand("eval-nc", "kNN node classification");
  nc->add_option("method", o.method, std::string(kMethodList))->required();
  nc->add_option("--graph", o.graph, "edge list")->required();
  nc->add_option("--labels", o.labels, "label CSV")->required();
  nc->add_option("--k", o.k, "neighbour counts")->delimiter(',');
  nc->add_option("--trials", o.trials, "number of trials");
  nc->add_option("--dim", o.dim, "embedding dimension n");
  nc->add_option("--out", o.out, "JSON-lines report path (default stdout)");

  auto* st = app.add_subcommand("stats", "size, diameter and mean Gromov hyperbolicity");
  st->add_option("--graph", o.graph, "edge list")->required();
  st->add_option("--budget", o.budget, "quadruple budget before sampling");
  st->add_option("--out", o.out, "also write the report here");

  auto* pol = app.add_subcommand("export-polar", "polar coordinates of a 2-dimensional embedding");
  pol->add_option("--embedding", o.in, "embedding path")->required();
  pol->add_option("--depths", o.depths, "optional node,depth CSV");
  pol->add_option("--out", o.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (o.threads > 0) set_num_threads(o.threads);
    if (gen->parsed()) return detail::cmd_generate(o);
    if (emb->parsed()) return detail::cmd_embed(o);
    if (conv->parsed()) return detail::cmd_convert(o);
    if (lp->parsed()) return detail::cmd_eval_lp(o);
    if (nc->parsed()) return detail::cmd_eval_nc(o);
    if (st->parsed()) return detail::cmd_stats(o);
    if (pol->parsed()) return detail::cmd_export_polar(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace hypegrl::cli
