#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "armchair/armchair.hpp"
#include "armchair/config.hpp"
#include "armchair/invariants.hpp"
#include "armchair/report_io.hpp"

namespace {

using namespace armchair;
namespace fs = std::filesystem;

enum Exit { ok = 0, check_failed = 1, config_error = 2, numeric_error = 3 };

/// Destination for emitted tables: stdout, or one file per table in a directory.
class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw invalid_config("--out", "cannot create directory '" + dir_ + "'");
    }
  }

  void emit(const std::string& name, const std::string& ext, const std::string& body) {
    if (dir_.empty()) {
      if (ext == "csv") std::cout << "# " << name << "\n";
      std::cout << body;
      return;
    }
    const fs::path path = fs::path(dir_) / (name + "." + ext);
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) throw invalid_config("--out", "cannot write '" + path.string() + "'");
  }

  void tables(const std::vector<io::CsvTable>& ts) {
    for (const auto& t : ts) emit(t.name, "csv", io::table_text(t));
  }

 private:
  std::string dir_;
};

double upper_limit(const SpectralSkeleton& sk) {
  if (sk.options().n_max <= 0) return sk.options().lambda_max;
  return sk.anchors().at(static_cast<std::size_t>(sk.layers() - 1)).mu;
}

double lower_limit(const RunConfig& cfg, const SpectralSkeleton& sk) {
  return cfg.lambda_min ? *cfg.lambda_min : sk.floor();
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return xs;
}

int run_hill(const RunConfig& cfg, Sink& out) {
  const SpectralSkeleton sk(cfg.potential, cfg.options);
  const double hi = upper_limit(sk);
  HillOptions ho;
  ho.tol_root = cfg.options.tol_root;
  ho.tol_tang = cfg.options.tol_tang;
  ho.step = cfg.options.step;
  const auto edges = hill_band_edges(cfg.potential, hi, ho);
  const auto mu = dirichlet_spectrum(cfg.potential, hi, ho);
  const auto eta = lyapunov_zeros(cfg.potential, hi, ho);

  io::CsvTable et{"hill_edges", "n,minus,plus,degenerate", {}};
  et.rows.push_back(io::csv_row({"0", "-inf", io::format_number(edges.lambda0_plus), "0"}));
  for (const auto& g : edges.gaps)
    et.rows.push_back(io::csv_row({std::to_string(g.n), io::format_number(g.minus), io::format_number(g.plus),
                                   g.degenerate ? "1" : "0"}));
  io::CsvTable dt{"dirichlet", "n,lambda", {}};
  for (const auto& e : mu) dt.rows.push_back(io::csv_row({std::to_string(e.n), io::format_number(e.value)}));
  io::CsvTable zt{"lyapunov_zeros", "n,lambda", {}};
  for (const auto& e : eta) zt.rows.push_back(io::csv_row({std::to_string(e.n), io::format_number(e.value)}));
  io::CsvTable st{"hill_scan", "lambda,F,Fminus", {}};
  for (double l : uniform_grid(lower_limit(cfg, sk), hi, cfg.scan_points)) {
    const auto m = monodromy(cfg.potential, l);
    st.rows.push_back(io::csv_row({io::format_number(l), io::format_number(m.F), io::format_number(m.Fminus)}));
  }

  switch (cfg.format) {
    case OutputFormat::csv: out.tables({et, dt, zt, st}); break;
    case OutputFormat::json: {
      io::json j;
      j["schema"] = io::schema_version;
      j["hill"] = io::to_json(edges);
      j["dirichlet"] = io::eigen_list(mu);
      j["lyapunov_zeros"] = io::eigen_list(eta);
      out.emit("hill", "json", io::dump(j));
      break;
    }
    case OutputFormat::text: {
      std::ostringstream os;
      os << "Hill spectrum bottom lambda_0^+ = " << io::format_number(edges.lambda0_plus) << "\n";
      for (const auto& g : edges.gaps)
        os << "gap " << g.n << ": (" << io::format_number(g.minus) << ", " << io::format_number(g.plus) << ")"
           << (g.degenerate ? "  closed" : "") << "\n";
      for (const auto& e : mu) os << "mu_" << e.n << " = " << io::format_number(e.value) << "\n";
      for (const auto& e : eta) os << "eta_" << e.n << " = " << io::format_number(e.value) << "\n";
      out.emit("hill", "txt", os.str());
      break;
    }
  }
  return ok;
}

int run_bands(const RunConfig& cfg, Sink& out) {
  const SpectralSkeleton sk(cfg.potential, cfg.options);
  std::vector<int> ks;
  if (cfg.k_list) {
    ks = *cfg.k_list;
  } else {
    for (int k = 0; k < cfg.N; ++k) ks.push_back(k);
  }
  const auto fibers = analyze_fibers(sk, cfg.N, ks);
  switch (cfg.format) {
    case OutputFormat::csv: out.tables(io::fiber_tables(fibers)); break;
    case OutputFormat::json: {
      io::json j;
      j["schema"] = io::schema_version;
      j["N"] = cfg.N;
      j["fibers"] = io::json::array();
      for (const auto& f : fibers) j["fibers"].push_back(io::to_json(f));
      out.emit("bands", "json", io::dump(j));
      break;
    }
    case OutputFormat::text: {
      std::ostringstream os;
      for (const auto& f : fibers) io::write_fiber_text(os, f);
      out.emit("bands", "txt", os.str());
      break;
    }
  }
  return ok;
}

int run_spectrum(const RunConfig& cfg, Sink& out) {
  const auto rep = full_spectrum(cfg.potential, cfg.N, cfg.options);
  switch (cfg.format) {
    case OutputFormat::csv: out.tables(io::report_tables(rep)); break;
    case OutputFormat::json: out.emit("spectrum", "json", io::dump(io::to_json(rep))); break;
    case OutputFormat::text: {
      std::ostringstream os;
      io::write_report_text(os, rep);
      out.emit("spectrum", "txt", os.str());
      break;
    }
  }
  return ok;
}

int run_scan(const RunConfig& cfg, Sink& out) {
  const SpectralSkeleton sk(cfg.potential, cfg.options);
  const auto ks = cfg.fibers();
  std::string header = "lambda,F,Fminus";
  for (int k : ks)
    for (const char* col : {"xi", "rho", "g1", "g2", "h1", "h2", "u", "v", "in1", "in2"})
      header += "," + std::string(col) + "_" + std::to_string(k);
  io::CsvTable scan{"scan", header, {}};
  for (double l : uniform_grid(lower_limit(cfg, sk), upper_limit(sk), cfg.scan_points)) {
    const auto m = monodromy(cfg.potential, l);
    std::string row = io::format_number(l) + "," + io::format_number(m.F) + "," + io::format_number(m.Fminus);
    for (int k : ks) {
      const auto d = evaluate(m, TubeAngle(cfg.N, k));
      const auto& r = *d.real;
      const auto in = membership(d, cfg.options.tol_edge);
      for (double x : {d.xi, d.rho, r.g1, r.g2, r.h1, r.h2, r.u, r.v}) row += "," + io::format_number(x);
      row += in.in_sigma1 ? ",1" : ",0";
      row += in.in_sigma2 ? ",1" : ",0";
    }
    scan.rows.push_back(std::move(row));
  }
  io::CsvTable edges{"edges", "k,nu,n,side,lambda,source", {}};
  for (const auto& f : analyze_fibers(sk, cfg.N, ks))
    for (const auto& b : f.bands)
      for (const auto& [side, e] : {std::pair{"lo", b.lo}, std::pair{"hi", b.hi}})
        edges.rows.push_back(io::csv_row({std::to_string(f.k), std::to_string(b.nu), std::to_string(b.n), side,
                                          io::format_number(e.value), std::string(to_string(e.source))}));

  if (cfg.format == OutputFormat::json) {
    io::json j;
    j["schema"] = io::schema_version;
    for (const auto* t : {&scan, &edges}) {
      io::json cols = io::json::array();
      std::stringstream hs(t->header);
      for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
      io::json rows = io::json::array();
      for (const auto& r : t->rows) {
        io::json row = io::json::array();
        std::stringstream rs(r);
        for (std::string c; std::getline(rs, c, ',');) row.push_back(c);
        rows.push_back(row);
      }
      j[t->name] = {{"columns", cols}, {"rows", rows}};
    }
    out.emit("scan", "json", io::dump(j));
  } else {
    out.tables({scan, edges});
  }
  return ok;
}

int run_check(const RunConfig& cfg, Sink& out) {
  const SpectralSkeleton sk(cfg.potential, cfg.options);
  const auto rep = full_spectrum(cfg.potential, cfg.N, cfg.options);
  const auto results = check_all(sk, rep);
  bool all = true;
  std::ostringstream os;
  io::CsvTable t{"checks", "invariant,passed,checked,violations,first_violation", {}};
  for (const auto& r : results) {
    all = all && r.passed();
    os << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.checked << " checked";
    if (!r.passed()) os << ", " << r.violations << " violations; first: " << r.first_violation;
    os << ")\n";
    t.rows.push_back(io::csv_row({r.name, r.passed() ? "1" : "0", std::to_string(r.checked),
                                  std::to_string(r.violations), "\"" + r.first_violation + "\""}));
  }
  switch (cfg.format) {
    case OutputFormat::csv: out.tables({t}); break;
    case OutputFormat::json: {
      io::json j;
      j["schema"] = io::schema_version;
      j["checks"] = io::json::array();
      for (const auto& r : results)
        j["checks"].push_back({{"name", r.name},
                               {"passed", r.passed()},
                               {"checked", r.checked},
                               {"violations", r.violations},
                               {"first_violation", r.first_violation}});
      out.emit("check", "json", io::dump(j));
      break;
    }
    case OutputFormat::text: out.emit("check", "txt", os.str()); break;
  }
  return all ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum of periodic Schroedinger operators on armchair nanotube graphs"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, format;
  unsigned threads = 1;
  app.add_option("--config", config_path, "Run configuration (INI)");
  app.add_option("--out", out_dir, "Write one file per table into this directory");
  app.add_option("--format", format, "Output format, overrides the config")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--threads", threads, "Worker threads for per-k fibers (0: hardware)");
  // Global flags are accepted before or after the subcommand.
  const std::pair<const char*, const char*> subcommands[] = {
      {"hill", "Hill discriminant data: F, F_-, Dirichlet values, Lyapunov zeros, band edges"},
      {"bands", "Per-fiber eigenvalues, bands, multiplicity map and gaps"},
      {"spectrum", "Full spectrum report with gaps G_n, flat bands and asymptotics"},
      {"scan", "Plot-ready scan of F, F_- and the fiber branch data"},
      {"check", "Run the invariant suite; exit 1 if any invariant fails"}};
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw invalid_config("--config", "cannot open '" + config_path + "'");
      cfg = parse_config(f);
    }
    if (!format.empty()) cfg.format = *output_format_from_string(format);
    cfg.options.threads = threads;
    Sink sink(out_dir);
    if (sub == "hill") return run_hill(cfg, sink);
    if (sub == "bands") return run_bands(cfg, sink);
    if (sub == "spectrum") return run_spectrum(cfg, sink);
    if (sub == "scan") return run_scan(cfg, sink);
    return run_check(cfg, sink);
  } catch (const invalid_config& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const numeric_failure& e) {
    std::cerr << "numeric failure (k=" << e.k() << ", n=" << e.n() << "): " << e.what() << "\n";
    return numeric_error;
  } catch (const invalid_input& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_error;
  }
}
