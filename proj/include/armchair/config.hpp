#ifndef ARMCHAIR_CONFIG_HPP
#define ARMCHAIR_CONFIG_HPP

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "armchair/error.hpp"
#include "armchair/potential.hpp"
#include "armchair/spectrum.hpp"

namespace armchair {

/// A malformed configuration; field() names the offending "section.key".
class invalid_config : public invalid_input {
 public:
  invalid_config(std::string field, const std::string& message)
      : invalid_input(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class OutputFormat { json, csv, text };

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::text: return "text";
  }
  return "text";
}

inline std::optional<OutputFormat> output_format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "text") return OutputFormat::text;
  return std::nullopt;
}

struct RunConfig {
  PeriodicPotential potential;
  int N = 4;
  std::optional<std::vector<int>> k_list;  // empty optional: every k
  SpectrumOptions options;
  OutputFormat format = OutputFormat::text;
  int scan_points = 2001;
  std::optional<double> lambda_min;  // scan start; defaults below the spectrum

  /// Requested fibers, each reduced to its representative min(k, N - k),
  /// without duplicates and in increasing order.
  std::vector<int> fibers() const {
    std::set<int> ks;
    if (k_list) {
      for (int k : *k_list) ks.insert(std::min(k, N - k));
    } else {
      for (int k = 0; k <= N / 2; ++k) ks.insert(k);
    }
    return {ks.begin(), ks.end()};
  }
};

namespace detail {

using nlohmann::json;

// A value is a JSON literal; anything that does not parse is a bare string.
inline json config_value(const std::string& raw) {
  const json j = json::parse(raw, nullptr, false);
  return j.is_discarded() ? json(raw) : j;
}

inline double config_real(const json& j, const std::string& field) {
  if (!j.is_number()) throw invalid_config(field, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw invalid_config(field, "expected a finite number");
  return x;
}

inline int config_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw invalid_config(field, "expected an integer");
  return j.get<int>();
}

inline double config_positive(const json& j, const std::string& field) {
  const double x = config_real(j, field);
  if (!(x > 0.0)) throw invalid_config(field, "must be positive");
  return x;
}

inline std::vector<std::pair<double, double>> config_pairs(const json& j, const std::string& field) {
  if (!j.is_array()) throw invalid_config(field, "expected a list of [x, y] pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw invalid_config(field, "expected a list of [x, y] pairs");
    out.emplace_back(config_real(p[0], field), config_real(p[1], field));
  }
  return out;
}

}  // namespace detail

/// Parses the INI-style run configuration.
///
/// Sections and keys (values are JSON literals; strings may be bare words):
///   [potential]  segments = [[t, v], ...] | samples = [v, ...];  deltas = [[a, w], ...]
///   [tube]       N = 4;  k = all | [k, ...]
///   [range]      lambda_max = 100 | n_max = 6
///   [tolerances] tol_root = 1e-12;  tol_edge = 1e-9;  tol_tang = 1e-9
///   [output]     format = text | json | csv;  scan_points = 2001;  lambda_min = -5
/// Every section is optional; unknown sections or keys are rejected.
inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw invalid_config("file", "line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::map<std::string, std::set<std::string>> known{
      {"potential", {"segments", "deltas", "samples"}},
      {"tube", {"N", "k"}},
      {"range", {"lambda_max", "n_max"}},
      {"tolerances", {"tol_root", "tol_edge", "tol_tang"}},
      {"output", {"format", "scan_points", "lambda_min"}}};

  std::map<std::string, nlohmann::json> values;
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw invalid_config(section, "unknown section");
    if (!body.data().empty()) throw invalid_config(section, "key outside a section");
    for (const auto& [key, leaf] : body) {
      const std::string field = section + "." + key;
      if (!it->second.count(key)) throw invalid_config(field, "unknown key");
      values[field] = detail::config_value(leaf.data());
    }
  }
  auto get = [&](const std::string& f) -> const nlohmann::json* {
    const auto it = values.find(f);
    return it == values.end() ? nullptr : &it->second;
  };

  RunConfig cfg;

  const auto* segments = get("potential.segments");
  const auto* samples = get("potential.samples");
  if (segments && samples) throw invalid_config("potential.samples", "give either segments or samples, not both");
  std::vector<Delta> deltas;
  if (const auto* d = get("potential.deltas"))
    for (auto [a, w] : detail::config_pairs(*d, "potential.deltas")) deltas.push_back({a, w});
  try {
    if (samples) {
      if (!samples->is_array() || samples->empty())
        throw invalid_config("potential.samples", "expected a nonempty list of numbers");
      std::vector<double> xs;
      for (const auto& x : *samples) xs.push_back(detail::config_real(x, "potential.samples"));
      const auto base = from_samples(xs);
      cfg.potential = PeriodicPotential(base.segments(), deltas);
    } else {
      std::vector<Segment> segs{{0.0, 0.0}};
      if (segments) {
        segs.clear();
        for (auto [t, v] : detail::config_pairs(*segments, "potential.segments")) segs.push_back({t, v});
      }
      cfg.potential = PeriodicPotential(segs, deltas);
    }
  } catch (const invalid_config&) {
    throw;
  } catch (const invalid_input& e) {
    std::string field = "potential.segments";
    if (samples) field = "potential.samples";
    if (std::string(e.what()).find("delta") != std::string::npos) field = "potential.deltas";
    throw invalid_config(field, e.what());
  }

  if (const auto* n = get("tube.N")) {
    cfg.N = detail::config_int(*n, "tube.N");
    if (cfg.N < 1) throw invalid_config("tube.N", "must be >= 1");
  }
  if (const auto* k = get("tube.k")) {
    if (k->is_string()) {
      if (k->get<std::string>() != "all") throw invalid_config("tube.k", "expected 'all' or a list of integers");
    } else if (k->is_array() && !k->empty()) {
      std::vector<int> ks;
      for (const auto& x : *k) {
        const int v = detail::config_int(x, "tube.k");
        if (v < 0 || v >= cfg.N) throw invalid_config("tube.k", "entries must lie in 0..N-1");
        ks.push_back(v);
      }
      cfg.k_list = std::move(ks);
    } else {
      throw invalid_config("tube.k", "expected 'all' or a nonempty list of integers");
    }
  }

  const auto* lmax = get("range.lambda_max");
  const auto* nmax = get("range.n_max");
  if (lmax && nmax) throw invalid_config("range.n_max", "give either lambda_max or n_max, not both");
  if (lmax) cfg.options.lambda_max = detail::config_positive(*lmax, "range.lambda_max");
  if (nmax) {
    cfg.options.n_max = detail::config_int(*nmax, "range.n_max");
    if (cfg.options.n_max < 1) throw invalid_config("range.n_max", "must be >= 1");
  }

  if (const auto* t = get("tolerances.tol_root")) cfg.options.tol_root = detail::config_positive(*t, "tolerances.tol_root");
  if (const auto* t = get("tolerances.tol_edge")) cfg.options.tol_edge = detail::config_positive(*t, "tolerances.tol_edge");
  if (const auto* t = get("tolerances.tol_tang")) cfg.options.tol_tang = detail::config_positive(*t, "tolerances.tol_tang");

  if (const auto* f = get("output.format")) {
    const auto fmt = f->is_string() ? output_format_from_string(f->get<std::string>()) : std::nullopt;
    if (!fmt) throw invalid_config("output.format", "expected json, csv or text");
    cfg.format = *fmt;
  }
  if (const auto* s = get("output.scan_points")) {
    cfg.scan_points = detail::config_int(*s, "output.scan_points");
    if (cfg.scan_points < 2) throw invalid_config("output.scan_points", "must be >= 2");
  }
  if (const auto* l = get("output.lambda_min")) cfg.lambda_min = detail::config_real(*l, "output.lambda_min");
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace armchair

#endif  // ARMCHAIR_CONFIG_HPP
