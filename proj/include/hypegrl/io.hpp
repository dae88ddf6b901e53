#pragma once

// Text formats: embedding files, edge lists, label and depth CSVs, polar CSV
// and JSON-lines records. Every writer takes a config digest that is written
// as a leading "# config=<digest>" comment; readers skip '#' lines.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hypegrl/embedding.hpp"
#include "hypegrl/graph.hpp"
#include "hypegrl/rdpg.hpp"

namespace hypegrl::io {

// Shortest text that round-trips a double exactly.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

inline void write_digest(std::ostream& out, const std::string& digest) {
  if (!digest.empty()) out << "# config=" << digest << '\n';
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError("write failed: " + path);
}

inline std::vector<std::string> node_names(const std::vector<std::string>& names, std::size_t n) {
  if (!names.empty()) {
    if (names.size() != n) throw DataError("node name count does not match row count");
    return names;
  }
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

// Either a hyperbolic embedding or the signed Euclidean baseline.
struct EmbeddingFile {
  bool euclidean_signed = false;
  Embedding hyperbolic;
  SpectralEmbedding spectral;
  std::vector<std::string> names;
  std::string digest;

  Eigen::Index size() const { return euclidean_signed ? spectral.size() : hyperbolic.size(); }
};

inline void write_embedding(std::ostream& out, const Embedding& e, const std::vector<std::string>& names,
                            const std::string& digest) {
  const auto ids = node_names(names, static_cast<std::size_t>(e.size()));
  write_digest(out, digest);
  out << "model=" << to_string(e.model) << " dim=" << e.dim << " curvature=-1\n";
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    out << ids[i];
    for (Eigen::Index k = 0; k < e.coords.cols(); ++k) out << ' ' << format_real(e.coords(i, k));
    out << '\n';
  }
}

inline void write_embedding(std::ostream& out, const SpectralEmbedding& e, const std::vector<std::string>& names,
                            const std::string& digest) {
  const auto ids = node_names(names, static_cast<std::size_t>(e.size()));
  write_digest(out, digest);
  out << "model=euclidean-signed dim=" << e.dim() << " signs=";
  for (std::size_t k = 0; k < e.signs.size(); ++k) out << (k ? "," : "") << (e.signs[k] < 0 ? "-1" : "+1");
  out << '\n';
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    out << ids[i];
    for (Eigen::Index k = 0; k < e.coords.cols(); ++k) out << ' ' << format_real(e.coords(i, k));
    out << '\n';
  }
}

template <class E>
void write_embedding_file(const std::string& path, const E& e, const std::vector<std::string>& names,
                          const std::string& digest) {
  auto out = open_output(path);
  write_embedding(out, e, names, digest);
  finish(out, path);
}

namespace detail {

inline std::string header_value(const std::vector<std::string>& tokens, const std::string& key,
                                const std::string& where) {
  for (const auto& t : tokens)
    if (t.rfind(key + "=", 0) == 0) return t.substr(key.size() + 1);
  throw DataError(where + ": header is missing '" + key + "='");
}

inline double parse_real(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw DataError(where + ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> whitespace_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace detail

// Parses and validates an embedding file; every row must satisfy the tagged
// model's invariants.
inline EmbeddingFile read_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  EmbeddingFile f;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  Eigen::Index dim = 0;
  Eigen::Index width = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const auto pos = line.find("config=");
      if (pos != std::string::npos && f.digest.empty()) f.digest = detail::whitespace_tokens(line.substr(pos + 7)).at(0);
      continue;
    }
    const auto tokens = detail::whitespace_tokens(line);
    if (!have_header) {
      const std::string model = detail::header_value(tokens, "model", where);
      const std::string dim_s = detail::header_value(tokens, "dim", where);
      try {
        dim = std::stol(dim_s);
      } catch (const std::exception&) {
        throw DataError(where + ": bad dim '" + dim_s + "'");
      }
      if (dim < 1) throw DataError(where + ": dim must be >= 1");
      if (model == "euclidean-signed") {
        f.euclidean_signed = true;
        width = dim;
        std::stringstream ss(detail::header_value(tokens, "signs", where));
        for (std::string s; std::getline(ss, s, ',');) {
          if (s == "+1" || s == "1") f.spectral.signs.push_back(1);
          else if (s == "-1") f.spectral.signs.push_back(-1);
          else throw DataError(where + ": bad sign '" + s + "'");
        }
        if (static_cast<Eigen::Index>(f.spectral.signs.size()) != dim) throw DataError(where + ": sign count != dim");
      } else {
        const auto m = parse_model(model);
        if (!m) throw DataError(where + ": unknown model '" + model + "'");
        if (detail::header_value(tokens, "curvature", where) != "-1")
          throw DataError(where + ": only curvature -1 is supported");
        f.hyperbolic.model = *m;
        f.hyperbolic.dim = dim;
        width = row_width(*m, dim);
      }
      have_header = true;
      continue;
    }
    if (static_cast<Eigen::Index>(tokens.size()) != width + 1) {
      throw DataError(where + ": expected node id and " + std::to_string(width) + " coordinates");
    }
    f.names.push_back(tokens[0]);
    std::vector<double> row;
    for (std::size_t k = 1; k < tokens.size(); ++k) row.push_back(detail::parse_real(tokens[k], where));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(path + ": missing embedding header");
  Matrix coords(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index k = 0; k < width; ++k) coords(static_cast<Eigen::Index>(i), k) = rows[i][k];
  if (!coords.allFinite()) throw DataError(path + ": non-finite coordinate");
  if (f.euclidean_signed) {
    f.spectral.coords = std::move(coords);
  } else {
    f.hyperbolic.coords = std::move(coords);
    if (const auto bad = first_invalid_row(f.hyperbolic)) {
      throw DataError(path + ": row for node '" + f.names[*bad] + "' violates the " +
                      std::string(to_string(f.hyperbolic.model)) + " model invariants");
    }
  }
  return f;
}

inline void write_edge_list(const std::string& path, const Graph& g, const std::string& digest) {
  auto out = open_output(path);
  write_digest(out, digest);
  for (const Edge& e : g.edges()) out << g.name(e.u) << ' ' << g.name(e.v) << '\n';
  finish(out, path);
}

inline void write_labels(const std::string& path, const Graph& g, const std::vector<int>& labels,
                         const std::string& digest) {
  auto out = open_output(path);
  write_digest(out, digest);
  out << "node,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << g.name(static_cast<NodeId>(i)) << ',' << labels[i] << '\n';
  finish(out, path);
}

inline void write_depths(const std::string& path, const Graph& g, const std::vector<int>& depth,
                         const std::string& digest) {
  auto out = open_output(path);
  write_digest(out, digest);
  out << "node,depth\n";
  for (std::size_t i = 0; i < depth.size(); ++i) out << g.name(static_cast<NodeId>(i)) << ',' << depth[i] << '\n';
  finish(out, path);
}

// "node,depth" CSV keyed by node token.
inline std::vector<std::pair<std::string, int>> read_depths(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open depth file: " + path);
  std::vector<std::pair<std::string, int>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = hypegrl::detail::split_tokens(line);
    if (tokens.size() != 2) throw DataError(path + ":" + std::to_string(line_no) + ": expected node,depth");
    if (tokens[0] == "node") continue;
    long long d = 0;
    if (!hypegrl::detail::parse_int(tokens[1], d) || d < 0)
      throw DataError(path + ":" + std::to_string(line_no) + ": bad depth '" + tokens[1] + "'");
    out.emplace_back(tokens[0], static_cast<int>(d));
  }
  return out;
}

}  // namespace hypegrl::io
