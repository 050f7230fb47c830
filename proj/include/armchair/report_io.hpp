#ifndef ARMCHAIR_REPORT_IO_HPP
#define ARMCHAIR_REPORT_IO_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "armchair/error.hpp"
#include "armchair/invariants.hpp"
#include "armchair/labels.hpp"
#include "armchair/spectrum.hpp"

namespace armchair::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Decimal text with 12 significant digits; infinities spelled "-inf" / "inf".
inline std::string format_number(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// JSON value of x rounded to 12 significant digits.
inline json number(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  if (std::isnan(x)) throw invalid_input("report: NaN is not representable");
  return std::strtod(format_number(x).c_str(), nullptr);
}

inline double read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw invalid_input("report: bad number '" + s + "'");
  }
  return j.get<double>();
}

inline json pair(double lo, double hi) { return json::array({number(lo), number(hi)}); }

// ---- to JSON ---------------------------------------------------------------

inline json to_json(const LabeledEigenvalue& e) {
  json j{{"value", number(e.value)}, {"kind", std::string(to_string(e.kind))}};
  if (e.nu) j["nu"] = e.nu;
  j["n"] = e.n;
  if (e.sign) j["sign"] = e.sign < 0 ? "-" : "+";
  if (e.k >= 0) j["k"] = e.k;
  return j;
}

inline json to_json(const BandEdge& e) { return {{"value", number(e.value)}, {"source", std::string(to_string(e.source))}}; }

inline json to_json(const Band& b) {
  json j{{"nu", b.nu}, {"n", b.n}, {"k", b.k}, {"interval", pair(b.lo.value, b.hi.value)},
         {"lo_source", std::string(to_string(b.lo.source))}, {"hi_source", std::string(to_string(b.hi.source))}};
  if (b.warning) j["warning"] = true;
  return j;
}

inline json to_json(const Gap& g) {
  json j;
  j["k"] = g.k < 0 ? json("full") : json(g.k);
  j["n"] = g.n;
  j["interval"] = pair(g.lo.value, g.hi.value);
  j["lo_source"] = std::string(to_string(g.lo.source));
  j["hi_source"] = std::string(to_string(g.hi.source));
  j["classification"] = std::string(to_string(g.kind));
  return j;
}

inline json to_json(const FiberReport& f) {
  json j{{"N", f.N}, {"k", f.k}};
  const TubeAngle a = f.angle();
  j["s"] = number(a.s());
  j["c"] = number(a.c());
  json per = json::array();
  for (const auto& p : f.periodic_layers)
    per.push_back({{"n", p.n},
                   {"lambda2_plus_prev", number(p.lam2_plus_prev)},
                   {"lambda1_plus_prev", number(p.lam1_plus_prev)},
                   {"lambda1_minus_next", number(p.lam1_minus_next)},
                   {"lambda2_minus_next", number(p.lam2_minus_next)}});
  j["periodic_layers"] = per;
  json res = json::array();
  for (const auto& r : f.resonance_layers) {
    json zs = json::array();
    for (double z : r.zeros) zs.push_back(number(z));
    res.push_back({{"n", r.n}, {"zeros", zs}});
  }
  j["resonance_layers"] = res;
  for (const char* key : {"periodic", "resonances"}) {
    json xs = json::array();
    for (const auto& e : std::string(key) == "periodic" ? f.periodic : f.resonances) xs.push_back(to_json(e));
    j[key] = xs;
  }
  json bands = json::array();
  for (const auto& b : f.bands) bands.push_back(to_json(b));
  j["bands"] = bands;
  json mult = json::array();
  for (const auto& m : f.multiplicity) mult.push_back({{"interval", pair(m.lo, m.hi)}, {"multiplicity", m.multiplicity}});
  j["multiplicity"] = mult;
  json gaps = json::array();
  for (const auto& g : f.gaps) gaps.push_back(to_json(g));
  j["gaps"] = gaps;
  j["warnings"] = f.warnings;
  return j;
}

inline json to_json(const HillBandEdges& h) {
  json gaps = json::array();
  for (const auto& g : h.gaps)
    gaps.push_back({{"n", g.n}, {"interval", pair(g.minus, g.plus)}, {"degenerate", g.degenerate}});
  return {{"lambda0_plus", number(h.lambda0_plus)}, {"gaps", gaps}};
}

inline json to_json(const SpectrumOptions& o) {
  json j;
  if (o.n_max > 0)
    j["n_max"] = o.n_max;
  else
    j["lambda_max"] = number(o.lambda_max);
  j["tol_root"] = number(o.tol_root);
  j["tol_edge"] = number(o.tol_edge);
  j["tol_tang"] = number(o.tol_tang);
  j["step"] = number(o.step);
  return j;
}

inline json eigen_list(const std::vector<LabeledEigenvalue>& xs) {
  json out = json::array();
  for (const auto& e : xs) out.push_back(to_json(e));
  return out;
}

inline json to_json(const SpectrumReport& r) {
  json j;
  j["schema"] = schema_version;
  j["N"] = r.N;
  j["options"] = to_json(r.options);
  j["layers"] = r.layers;
  j["even"] = r.even;
  j["odd_n_intersection"] = r.odd_n_intersection;
  j["hill"] = to_json(r.hill);
  j["dirichlet"] = eigen_list(r.dirichlet);
  j["lyapunov_zeros"] = eigen_list(r.lyapunov_zeros);
  j["antiperiodic"] = eigen_list(r.antiperiodic);
  json kappa = json::array();
  for (const auto& k : r.kappa) kappa.push_back(pair(k.lo, k.hi));
  j["kappa"] = kappa;
  json fibers = json::array();
  for (const auto& f : r.fibers) fibers.push_back(to_json(f));
  j["fibers"] = fibers;
  json gaps = json::array();
  for (const auto& g : r.gaps) gaps.push_back(to_json(g));
  j["gaps"] = gaps;
  json asym = json::array();
  for (const auto& a : r.asymptotics)
    asym.push_back({{"n", a.n},
                    {"computed", pair(a.computed_lo, a.computed_hi)},
                    {"predicted", pair(a.predicted_lo, a.predicted_hi)}});
  j["asymptotics"] = asym;
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

// ---- from JSON -------------------------------------------------------------

inline LabeledEigenvalue eigen_from_json(const json& j) {
  LabeledEigenvalue e;
  e.value = read_number(j.at("value"));
  e.kind = eigen_kind_from_string(j.at("kind").get<std::string>());
  e.nu = j.value("nu", 0);
  e.n = j.at("n").get<int>();
  if (j.contains("sign")) e.sign = j["sign"].get<std::string>() == "-" ? -1 : +1;
  e.k = j.value("k", -1);
  return e;
}

inline std::vector<LabeledEigenvalue> eigen_list_from_json(const json& j) {
  std::vector<LabeledEigenvalue> out;
  for (const auto& e : j) out.push_back(eigen_from_json(e));
  return out;
}

inline Band band_from_json(const json& j) {
  Band b{};
  b.nu = j.at("nu").get<int>();
  b.n = j.at("n").get<int>();
  b.k = j.at("k").get<int>();
  b.lo = {read_number(j.at("interval")[0]), eigen_kind_from_string(j.at("lo_source").get<std::string>())};
  b.hi = {read_number(j.at("interval")[1]), eigen_kind_from_string(j.at("hi_source").get<std::string>())};
  b.warning = j.value("warning", false);
  return b;
}

inline Gap gap_from_json(const json& j) {
  Gap g{};
  g.k = j.at("k").is_string() ? -1 : j.at("k").get<int>();
  g.n = j.at("n").get<int>();
  g.lo = {read_number(j.at("interval")[0]), eigen_kind_from_string(j.at("lo_source").get<std::string>())};
  g.hi = {read_number(j.at("interval")[1]), eigen_kind_from_string(j.at("hi_source").get<std::string>())};
  g.kind = gap_kind_from_string(j.at("classification").get<std::string>());
  return g;
}

inline FiberReport fiber_from_json(const json& j) {
  FiberReport f;
  f.N = j.at("N").get<int>();
  f.k = j.at("k").get<int>();
  for (const auto& p : j.at("periodic_layers"))
    f.periodic_layers.push_back({p.at("n").get<int>(), read_number(p.at("lambda2_plus_prev")),
                                 read_number(p.at("lambda1_plus_prev")), read_number(p.at("lambda1_minus_next")),
                                 read_number(p.at("lambda2_minus_next"))});
  for (const auto& r : j.at("resonance_layers")) {
    ResonanceLayer layer{r.at("n").get<int>(), {}};
    for (const auto& z : r.at("zeros")) layer.zeros.push_back(read_number(z));
    f.resonance_layers.push_back(std::move(layer));
  }
  f.periodic = eigen_list_from_json(j.at("periodic"));
  f.resonances = eigen_list_from_json(j.at("resonances"));
  for (const auto& b : j.at("bands")) f.bands.push_back(band_from_json(b));
  for (const auto& m : j.at("multiplicity"))
    f.multiplicity.push_back(
        {read_number(m.at("interval")[0]), read_number(m.at("interval")[1]), m.at("multiplicity").get<int>()});
  for (const auto& g : j.at("gaps")) f.gaps.push_back(gap_from_json(g));
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

inline SpectrumReport report_from_json(const json& j) {
  if (j.at("schema").get<int>() != schema_version) throw invalid_input("report: unsupported schema version");
  SpectrumReport r;
  r.N = j.at("N").get<int>();
  const auto& o = j.at("options");
  if (o.contains("n_max")) {
    r.options.n_max = o["n_max"].get<int>();
  } else {
    r.options.lambda_max = read_number(o.at("lambda_max"));
  }
  r.options.tol_root = read_number(o.at("tol_root"));
  r.options.tol_edge = read_number(o.at("tol_edge"));
  r.options.tol_tang = read_number(o.at("tol_tang"));
  r.options.step = read_number(o.at("step"));
  r.layers = j.at("layers").get<int>();
  r.even = j.at("even").get<bool>();
  r.odd_n_intersection = j.at("odd_n_intersection").get<bool>();
  r.hill.lambda0_plus = read_number(j.at("hill").at("lambda0_plus"));
  for (const auto& g : j.at("hill").at("gaps"))
    r.hill.gaps.push_back({g.at("n").get<int>(), read_number(g.at("interval")[0]), read_number(g.at("interval")[1]),
                           g.at("degenerate").get<bool>()});
  r.dirichlet = eigen_list_from_json(j.at("dirichlet"));
  r.lyapunov_zeros = eigen_list_from_json(j.at("lyapunov_zeros"));
  r.antiperiodic = eigen_list_from_json(j.at("antiperiodic"));
  for (const auto& k : j.at("kappa")) r.kappa.push_back({read_number(k[0]), read_number(k[1])});
  for (const auto& f : j.at("fibers")) r.fibers.push_back(fiber_from_json(f));
  for (const auto& g : j.at("gaps")) r.gaps.push_back(gap_from_json(g));
  for (const auto& a : j.at("asymptotics"))
    r.asymptotics.push_back({a.at("n").get<int>(), read_number(a.at("computed")[0]), read_number(a.at("computed")[1]),
                             read_number(a.at("predicted")[0]), read_number(a.at("predicted")[1])});
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
  return r;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- text and CSV ----------------------------------------------------------

inline std::string interval_text(double lo, double hi) {
  return "[" + format_number(lo) + ", " + format_number(hi) + "]";
}

inline std::string sign_text(int s) { return s < 0 ? "-" : s > 0 ? "+" : ""; }

inline void write_fiber_text(std::ostream& os, const FiberReport& f) {
  const TubeAngle a = f.angle();
  os << "fiber k = " << f.k << " (N = " << f.N << ", s = " << format_number(a.s()) << ", c = " << format_number(a.c())
     << ")\n";
  os << "  periodic eigenvalues\n";
  for (const auto& e : f.periodic)
    os << "    lambda_{" << e.nu << "," << e.n << "}^" << sign_text(e.sign) << " = " << format_number(e.value) << "\n";
  os << "  resonances\n";
  for (const auto& e : f.resonances)
    os << "    r_{" << e.n << "}" << (e.sign ? "^" + sign_text(e.sign) : "") << " = " << format_number(e.value) << "\n";
  os << "  bands\n";
  for (const auto& b : f.bands)
    os << "    S_{" << b.nu << "," << b.n << "} = " << interval_text(b.lo.value, b.hi.value) << "  ("
       << to_string(b.lo.source) << ", " << to_string(b.hi.source) << ")" << (b.warning ? "  warning" : "") << "\n";
  os << "  multiplicity\n";
  for (const auto& m : f.multiplicity) os << "    " << interval_text(m.lo, m.hi) << "  " << m.multiplicity << "\n";
  os << "  gaps\n";
  for (const auto& g : f.gaps)
    os << "    G_{" << f.k << "," << g.n << "} = (" << format_number(g.lo.value) << ", " << format_number(g.hi.value)
       << ")  " << to_string(g.kind) << "\n";
  for (const auto& w : f.warnings) os << "  warning: " << w << "\n";
}

inline void write_report_text(std::ostream& os, const SpectrumReport& r) {
  os << "armchair spectrum report (schema " << schema_version << ")\n";
  os << "N = " << r.N << ", layers = " << r.layers << ", even potential: " << (r.even ? "yes" : "no") << "\n";
  if (r.odd_n_intersection) os << "odd N: G_{4n-3}, G_{4n-1} obtained by intersection only\n";
  os << "Hill spectrum bottom lambda_0^+ = " << format_number(r.hill.lambda0_plus) << "\n";
  os << "flat bands (Dirichlet eigenvalues):";
  for (const auto& e : r.dirichlet) os << " " << format_number(e.value);
  os << "\nzeros of F:";
  for (const auto& e : r.lyapunov_zeros) os << " " << format_number(e.value);
  os << "\nantiperiodic eigenvalues\n";
  for (const auto& e : r.antiperiodic)
    os << "  lambda_{" << e.nu << "," << e.n << "}^" << sign_text(e.sign) << " = " << format_number(e.value) << "\n";
  for (const auto& f : r.fibers) write_fiber_text(os, f);
  os << "gaps of the full operator\n";
  for (const auto& g : r.gaps)
    os << "  G_" << g.n << " = (" << format_number(g.lo.value) << ", " << format_number(g.hi.value) << ")  "
       << to_string(g.kind) << "\n";
  os << "asymptotics of E_{2,2n}^{0,-+}\n";
  for (const auto& a : r.asymptotics)
    os << "  n = " << a.n << "  computed " << interval_text(a.computed_lo, a.computed_hi) << "  predicted "
       << interval_text(a.predicted_lo, a.predicted_hi) << "\n";
  for (const auto& c : r.checks)
    os << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
}

/// CSV tables; each is preceded by a "# name" line when written to one stream.
struct CsvTable {
  std::string name;
  std::string header;
  std::vector<std::string> rows;
};

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ",";
    s += c;
  }
  return s;
}

inline std::vector<CsvTable> fiber_tables(const std::vector<FiberReport>& fibers) {
  CsvTable eig{"eigenvalues", "k,kind,nu,n,sign,lambda", {}};
  CsvTable bands{"bands", "k,nu,n,lo,hi,lo_source,hi_source,warning", {}};
  CsvTable mult{"multiplicity", "k,lo,hi,multiplicity", {}};
  CsvTable gaps{"gaps", "k,n,lo,hi,lo_source,hi_source,classification", {}};
  for (const auto& f : fibers) {
    const auto k = std::to_string(f.k);
    for (const auto* list : {&f.periodic, &f.resonances})
      for (const auto& e : *list)
        eig.rows.push_back(csv_row({k, std::string(to_string(e.kind)), std::to_string(e.nu), std::to_string(e.n),
                                    sign_text(e.sign), format_number(e.value)}));
    for (const auto& b : f.bands)
      bands.rows.push_back(csv_row({k, std::to_string(b.nu), std::to_string(b.n), format_number(b.lo.value),
                                    format_number(b.hi.value), std::string(to_string(b.lo.source)),
                                    std::string(to_string(b.hi.source)), b.warning ? "1" : "0"}));
    for (const auto& m : f.multiplicity)
      mult.rows.push_back(csv_row({k, format_number(m.lo), format_number(m.hi), std::to_string(m.multiplicity)}));
    for (const auto& g : f.gaps)
      gaps.rows.push_back(csv_row({k, std::to_string(g.n), format_number(g.lo.value), format_number(g.hi.value),
                                   std::string(to_string(g.lo.source)), std::string(to_string(g.hi.source)),
                                   std::string(to_string(g.kind))}));
  }
  return {eig, bands, mult, gaps};
}

inline std::vector<CsvTable> report_tables(const SpectrumReport& r) {
  auto tables = fiber_tables(r.fibers);
  CsvTable full{"full_gaps", "n,lo,hi,lo_source,hi_source,classification", {}};
  for (const auto& g : r.gaps)
    full.rows.push_back(csv_row({std::to_string(g.n), format_number(g.lo.value), format_number(g.hi.value),
                                 std::string(to_string(g.lo.source)), std::string(to_string(g.hi.source)),
                                 std::string(to_string(g.kind))}));
  CsvTable flat{"flat_bands", "n,lambda", {}};
  for (const auto& e : r.dirichlet) flat.rows.push_back(csv_row({std::to_string(e.n), format_number(e.value)}));
  CsvTable asym{"asymptotics", "n,computed_lo,computed_hi,predicted_lo,predicted_hi", {}};
  for (const auto& a : r.asymptotics)
    asym.rows.push_back(csv_row({std::to_string(a.n), format_number(a.computed_lo), format_number(a.computed_hi),
                                 format_number(a.predicted_lo), format_number(a.predicted_hi)}));
  tables.push_back(full);
  tables.push_back(flat);
  tables.push_back(asym);
  return tables;
}

inline std::string table_text(const CsvTable& t) {
  std::string s = t.header + "\n";
  for (const auto& r : t.rows) s += r + "\n";
  return s;
}

}  // namespace armchair::io

#endif  // ARMCHAIR_REPORT_IO_HPP
