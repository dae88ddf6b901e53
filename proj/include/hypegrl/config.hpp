#pragma once

// Run configuration: a JSON object with one section per module plus a global
// seed. Unknown keys are rejected and every value is validated before any
// work starts. The digest (FNV-1a of the canonical dump of the effective
// configuration) is stamped into every output file.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypegrl/gradembed.hpp"
#include "hypegrl/hydra.hpp"
#include "hypegrl/synthgen.hpp"

namespace hypegrl {

struct TreeConfig {
  int branching = 2;
  int depth = 4;
};

struct LinkPredictionConfig {
  double q = 0.9;
  int trials = 10;
};

struct NodeClassificationConfig {
  std::vector<int> k = {5, 10};
  int trials = 5;
  double train_fraction = 0.8;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int dim = 2;
  TreeConfig tree;
  GaussianGraphConfig gaussian;
  HydraPlusConfig hydra_plus;
  TrainConfig poincare = TrainConfig::poincare_defaults();
  FermiDiracParams fermi_dirac;
  TrainConfig lorentz = TrainConfig::lorentz_defaults();
  TrainConfig pmaps = TrainConfig::poincare_maps_defaults();
  PoincareMapsParams pmaps_params;
  LinkPredictionConfig eval_lp;
  NodeClassificationConfig eval_nc;
  std::uint64_t quadruple_budget = kDefaultQuadrupleBudget;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  std::string digest() const;
};

namespace detail {

using json = nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: '" + name_ + "' must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    used_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config: '" + name_ + "." + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    used_.push_back(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : j_.items()) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw ConfigError("config: unknown key '" + (name_.empty() ? k : name_ + "." + k) + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::vector<std::string> used_;
};

inline void read_train(const json& j, const std::string& name, TrainConfig& c,
                       const std::function<void(Section&)>& extra = {}) {
  Section s(j, name);
  s.read("epochs", c.epochs);
  s.read("learning_rate", c.learning_rate);
  s.read("burn_in_epochs", c.burn_in_epochs);
  s.read("burn_in_factor", c.burn_in_factor);
  s.read("n_negatives", c.n_negatives);
  s.read("batch_size", c.batch_size);
  std::string sampling = c.sampling == NegativeSampling::uniform ? "uniform" : "degree";
  s.read("negative_sampling", sampling);
  if (sampling == "uniform") c.sampling = NegativeSampling::uniform;
  else if (sampling == "degree") c.sampling = NegativeSampling::degree;
  else throw ConfigError("config: '" + name + ".negative_sampling' must be uniform or degree");
  if (extra) extra(s);
  s.reject_unknown();
}

inline nlohmann::ordered_json train_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"burn_in_epochs", c.burn_in_epochs},
          {"burn_in_factor", c.burn_in_factor},
          {"n_negatives", c.n_negatives},
          {"batch_size", c.batch_size},
          {"negative_sampling", c.sampling == NegativeSampling::uniform ? "uniform" : "degree"}};
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

inline void RunConfig::validate() const {
  if (dim < 1) throw ConfigError("config: dim must be >= 1");
  if (tree.branching < 1) throw ConfigError("config: tree.branching must be >= 1");
  if (tree.depth < 0) throw ConfigError("config: tree.depth must be >= 0");
  gaussian.validate();
  hydra_plus.validate();
  poincare.validate();
  fermi_dirac.validate();
  lorentz.validate();
  pmaps.validate();
  pmaps_params.validate();
  if (!(eval_lp.q >= 0.0 && eval_lp.q <= 1.0)) throw ConfigError("config: eval_lp.q must lie in [0, 1]");
  if (eval_lp.trials < 1) throw ConfigError("config: eval_lp.trials must be >= 1");
  if (eval_nc.k.empty()) throw ConfigError("config: eval_nc.k must not be empty");
  for (int k : eval_nc.k)
    if (k < 1) throw ConfigError("config: eval_nc.k entries must be >= 1");
  if (eval_nc.trials < 1) throw ConfigError("config: eval_nc.trials must be >= 1");
  if (!(eval_nc.train_fraction > 0.0 && eval_nc.train_fraction < 1.0))
    throw ConfigError("config: eval_nc.train_fraction must lie in (0, 1)");
  if (quadruple_budget < 1) throw ConfigError("config: stats.quadruple_budget must be >= 1");
}

// Section seeds are not configurable on their own: every seeded stage derives
// its stream from the global seed.
inline nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["dim"] = dim;
  j["tree"] = {{"branching", tree.branching}, {"depth", tree.depth}};
  j["gaussian"] = {{"n_nodes", gaussian.n_nodes},
                   {"n_classes", gaussian.n_classes},
                   {"k_neighbors", gaussian.k_neighbors},
                   {"dim", gaussian.dim},
                   {"mean_radius_max", gaussian.mean_radius_max},
                   {"class_scale", gaussian.class_scale}};
  j["hydra_plus"] = {{"max_iters", hydra_plus.max_iters},
                     {"learning_rate", hydra_plus.learning_rate},
                     {"rel_tol", hydra_plus.rel_tol}};
  j["poincare"] = detail::train_json(poincare);
  j["poincare"]["radius"] = fermi_dirac.radius;
  j["poincare"]["temperature"] = fermi_dirac.temperature;
  j["lorentz"] = detail::train_json(lorentz);
  j["pmaps"] = detail::train_json(pmaps);
  j["pmaps"]["sigma"] = pmaps_params.sigma;
  j["pmaps"]["gamma"] = pmaps_params.gamma;
  j["eval_lp"] = {{"q", eval_lp.q}, {"trials", eval_lp.trials}};
  j["eval_nc"] = {{"k", eval_nc.k}, {"trials", eval_nc.trials}, {"train_fraction", eval_nc.train_fraction}};
  j["stats"] = {{"quadruple_budget", quadruple_budget}};
  return j;
}

inline std::string RunConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(to_json().dump())));
  return buf;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::Section;
  RunConfig c;
  Section top(j, "");
  top.read("seed", c.seed);
  top.read("dim", c.dim);
  if (const auto* s = top.child("tree")) {
    Section t(*s, "tree");
    t.read("branching", c.tree.branching);
    t.read("depth", c.tree.depth);
    t.reject_unknown();
  }
  if (const auto* s = top.child("gaussian")) {
    Section t(*s, "gaussian");
    t.read("n_nodes", c.gaussian.n_nodes);
    t.read("n_classes", c.gaussian.n_classes);
    t.read("k_neighbors", c.gaussian.k_neighbors);
    t.read("dim", c.gaussian.dim);
    t.read("mean_radius_max", c.gaussian.mean_radius_max);
    t.read("class_scale", c.gaussian.class_scale);
    t.reject_unknown();
  }
  if (const auto* s = top.child("hydra_plus")) {
    Section t(*s, "hydra_plus");
    t.read("max_iters", c.hydra_plus.max_iters);
    t.read("learning_rate", c.hydra_plus.learning_rate);
    t.read("rel_tol", c.hydra_plus.rel_tol);
    t.reject_unknown();
  }
  if (const auto* s = top.child("poincare")) {
    detail::read_train(*s, "poincare", c.poincare, [&](Section& t) {
      t.read("radius", c.fermi_dirac.radius);
      t.read("temperature", c.fermi_dirac.temperature);
    });
  }
  if (const auto* s = top.child("lorentz")) detail::read_train(*s, "lorentz", c.lorentz);
  if (const auto* s = top.child("pmaps")) {
    detail::read_train(*s, "pmaps", c.pmaps, [&](Section& t) {
      t.read("sigma", c.pmaps_params.sigma);
      t.read("gamma", c.pmaps_params.gamma);
    });
  }
  if (const auto* s = top.child("eval_lp")) {
    Section t(*s, "eval_lp");
    t.read("q", c.eval_lp.q);
    t.read("trials", c.eval_lp.trials);
    t.reject_unknown();
  }
  if (const auto* s = top.child("eval_nc")) {
    Section t(*s, "eval_nc");
    if (const auto* k = t.child("k")) {
      if (!k->is_array()) throw ConfigError("config: 'eval_nc.k' must be an array of integers");
      c.eval_nc.k.clear();
      for (const auto& v : *k) {
        if (!v.is_number_integer()) throw ConfigError("config: 'eval_nc.k' must be an array of integers");
        c.eval_nc.k.push_back(v.get<int>());
      }
    }
    t.read("trials", c.eval_nc.trials);
    t.read("train_fraction", c.eval_nc.train_fraction);
    t.reject_unknown();
  }
  if (const auto* s = top.child("stats")) {
    Section t(*s, "stats");
    t.read("quadruple_budget", c.quadruple_budget);
    t.reject_unknown();
  }
  top.reject_unknown();
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace hypegrl
