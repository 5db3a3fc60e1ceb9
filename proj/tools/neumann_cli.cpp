#include "neumann/field_io.hpp"
#include "neumann/pipeline.hpp"
#include "neumann/report.hpp"
#include "neumann/spectral.hpp"
#include "neumann/svg.hpp"
#include "neumann/theorems.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

using namespace neumann;

namespace {

struct RunConfig {
  std::string field;
  int resolution = 256;
  std::string out;
  double tol_newton = 1e-9;
  double tol_ode = 1e-9;
  double capture = 1e-3;
  std::uint64_t seed = 1;
  int jobs = 0;
  // spectrum
  std::string domain = "all";
  std::string oracle;
  double a = 1.0, b = 1.0;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::MalformedInput, "cannot write " + cfg.out);
  f << text;
}

void check_config(const RunConfig& cfg, bool need_field) {
  const int r = cfg.resolution;
  if (r < 64 || r > 2048 || (r & (r - 1)) != 0)
    throw Error(ErrorCode::MalformedInput, "--resolution must be a power of two in [64, 2048]");
  if (cfg.tol_newton <= 0 || cfg.tol_ode <= 0 || cfg.capture <= 0)
    throw Error(ErrorCode::MalformedInput, "tolerances must be positive");
  if (need_field && cfg.field.empty()) throw Error(ErrorCode::MalformedInput, "--field is required");
}

AnalysisOptions options_from(const RunConfig& cfg) {
  AnalysisOptions o;
  o.resolution = cfg.resolution;
  o.morse.newton_tol = cfg.tol_newton;
  o.flow.ode_tol = cfg.tol_ode;
  o.flow.capture_radius = cfg.capture;
  return o;
}

int cmd_analyze(const RunConfig& cfg) {
  check_config(cfg, true);
  const Analysis a = analyze(load_field(cfg.field), options_from(cfg));
  emit(cfg, partition_report(a).dump(2) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  check_config(cfg, true);
  const Analysis a = analyze(load_field(cfg.field), options_from(cfg));
  const auto checks = verify_all(a.partition);
  std::cout << ledger_table(checks);
  const StructureSummary s = structure_summary(a);
  std::cout << "mu = " << a.partition.mu << ", nu = " << a.partition.nu()
            << ", morse-smale = " << (a.nls->morse_smale ? "yes" : "no") << '\n';
  nlohmann::json j = ledger_json(checks);
  j["structure"] = to_json(s);
  j["mu"] = a.partition.mu;
  j["nu"] = a.partition.nu();
  if (!cfg.out.empty()) emit(cfg, j.dump(2) + "\n");
  return all_applicable_passed(checks) ? 0 : 1;
}

int oracle_rectangle(const RunConfig& cfg) {
  // Neumann rectangle spectrum at h = 1/resolution and h/2 against the closed form.
  const int k = 6;
  const auto exact = rectangle_neumann_spectrum(cfg.a, cfg.b, k);
  nlohmann::json levels = nlohmann::json::array();
  std::vector<std::vector<double>> computed;
  for (int level = 0; level < 2; ++level) {
    const int per_unit = cfg.resolution << level;
    const CellGrid g(DomainSpec::rectangle(cfg.a, cfg.b), static_cast<int>(std::lround(cfg.a * per_unit)),
                     static_cast<int>(std::lround(cfg.b * per_unit)));
    std::vector<int> cells(static_cast<std::size_t>(g.size()));
    std::iota(cells.begin(), cells.end(), 0);
    EigenOptions eo;
    eo.seed = cfg.seed;
    const Spectrum s = lowest_eigenvalues(build_operator(g, cells), k, eo);
    computed.push_back(s.eigenvalues);
    levels.push_back({{"h", 1.0 / per_unit}, {"eigs", s.eigenvalues}, {"max_residual", s.max_residual}});
  }
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (int i = 0; i < k; ++i) {
    const double e0 = std::abs(computed[0][i] - exact[i]), e1 = std::abs(computed[1][i] - exact[i]);
    nlohmann::json r = {{"index", i}, {"exact", exact[i]}, {"error_h", e0}, {"error_h2", e1}};
    if (exact[i] > 0) {
      r["relative_error_h"] = e0 / exact[i];
      r["ratio"] = e0 / e1;
      ok = ok && e0 / exact[i] < 0.01;
    }
    rows.push_back(r);
  }
  nlohmann::json j = {{"oracle", "rectangle"}, {"a", cfg.a}, {"b", cfg.b}, {"levels", levels}, {"comparison", rows},
                      {"within_one_percent", ok}};
  emit(cfg, j.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_spectrum(const RunConfig& cfg) {
  check_config(cfg, cfg.oracle.empty());
  if (!cfg.oracle.empty()) {
    if (cfg.oracle != "rectangle") throw Error(ErrorCode::MalformedInput, "unknown oracle '" + cfg.oracle + "'");
    if (cfg.a <= 0 || cfg.b <= 0) throw Error(ErrorCode::MalformedInput, "--a and --b must be positive");
    return oracle_rectangle(cfg);
  }
  if (cfg.resolution > 1024) throw Error(ErrorCode::MalformedInput, "spectrum needs --resolution <= 1024 (h/2 pass)");
  const Analysis a = analyze(load_field(cfg.field), options_from(cfg));
  std::optional<Analysis> fine;
  const FineLevel fine_level = [&] {
    if (!fine) fine = relabel(a, 2 * cfg.resolution);
    return LabeledLevel{&fine->partition, &fine->geometry};
  };
  std::vector<int> selected;
  if (cfg.domain == "all") {
    for (const auto& d : a.partition.domains) selected.push_back(d.id);
  } else if (cfg.domain == "lens") {
    selected = lens_domains(a.partition, a.geometry);
    if (selected.empty()) throw Error(ErrorCode::MalformedInput, "field has no lens-like domain");
  } else {
    int id = -1;
    try {
      std::size_t used = 0;
      id = std::stoi(cfg.domain, &used);
      if (used != cfg.domain.size()) id = -1;
    } catch (const std::exception&) {
      id = -1;
    }
    if (id < 0 || id >= static_cast<int>(a.partition.domains.size()))
      throw Error(ErrorCode::MalformedInput, "--domain must be a domain id, 'lens' or 'all'");
    selected.push_back(id);
  }
  EigenOptions eo;
  eo.seed = cfg.seed;
  std::vector<DomainSpectrum> spectra(selected.size());
  for (std::size_t k = 0; k < selected.size(); ++k)
    spectra[k] = domain_spectrum(a.partition, a.geometry, selected[k], fine_level, eo);
  emit(cfg, spectrum_report(a, spectra).dump(2) + "\n");
  for (const auto& s : spectra)
    if (!s.failure.empty() && s.kind == NeumannDomainKind::Inner)
      throw Error(ErrorCode::NoMatchingEigenvalue, "domain " + std::to_string(s.domain) + ": " + s.failure);
  return 0;
}

int cmd_render(const RunConfig& cfg) {
  check_config(cfg, true);
  const Analysis a = analyze(load_field(cfg.field), options_from(cfg));
  emit(cfg, render_svg(a));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann domains of Laplacian eigenfunctions on the flat torus and Dirichlet rectangles"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--field", cfg.field, "field JSON file");
    sub->add_option("--resolution", cfg.resolution, "raster cells along the longer side (power of two)");
    sub->add_option("--out", cfg.out, "output file (default: stdout)");
    sub->add_option("--tol-newton", cfg.tol_newton, "gradient norm accepted as a critical point");
    sub->add_option("--tol-ode", cfg.tol_ode, "flow integration tolerance, relative to the domain size");
    sub->add_option("--capture", cfg.capture, "capture radius, relative to the domain size");
    sub->add_option("--seed", cfg.seed, "seed for randomised steps");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0: all cores)");
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "critical points, Neumann domains and geometry as JSON");
  auto* verify_cmd = app.add_subcommand("verify", "check the structural theorems on the computed partition");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Neumann spectra of domains and the position of lambda");
  auto* render_cmd = app.add_subcommand("render", "SVG figure of nodal and Neumann partitions");
  for (auto* s : {analyze_cmd, verify_cmd, spectrum_cmd, render_cmd}) common(s);
  spectrum_cmd->add_option("--domain", cfg.domain, "domain id, 'lens' or 'all'");
  spectrum_cmd->add_option("--oracle", cfg.oracle, "self-test against a closed form ('rectangle')");
  spectrum_cmd->add_option("--a", cfg.a, "oracle rectangle width");
  spectrum_cmd->add_option("--b", cfg.b, "oracle rectangle height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  set_jobs(cfg.jobs);
  try {
    if (*analyze_cmd) return cmd_analyze(cfg);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*spectrum_cmd) return cmd_spectrum(cfg);
    if (*render_cmd) return cmd_render(cfg);
  } catch (const Error& e) {
    std::cerr << "neumann: " << e.what() << '\n';
    return e.category() == ErrorCategory::Input ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "neumann: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
