#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "zeitlin/algebra.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/errors.hpp"
#include "zeitlin/io.hpp"
#include "zeitlin/render.hpp"
#include "zeitlin/rng.hpp"
#include "zeitlin/stability.hpp"
#include "zeitlin/steady.hpp"

namespace {

using namespace zeitlin;

struct GlobalOptions {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::optional<double> tol;
};

std::string out_path(const GlobalOptions& g, const std::string& name) {
  if (g.out.empty() || g.out == ".") return name;
  return g.out + "/" + name;
}

json load_config(const GlobalOptions& g) {
  if (g.config.empty()) {
    throw InputError("this subcommand needs --config <file>");
  }
  return read_json_file(g.config);
}

double get_number(const json& j, const std::string& key,
                  const std::string& context) {
  if (!j.contains(key)) {
    throw InputError(context + ": missing key '" + key + "'");
  }
  return number_from_json(j.at(key), context + "." + key);
}

int get_int(const json& j, const std::string& key,
            const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw InputError(context + ": missing integer key '" + key + "'");
  }
  return j.at(key).get<int>();
}

rvec get_vector(const json& j, const std::string& key,
                const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw InputError(context + ": missing array key '" + key + "'");
  }
  const json& a = j.at(key);
  rvec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    v[i] = number_from_json(a[i], context + "." + key);
  }
  return v;
}

std::uint64_t effective_seed(const GlobalOptions& g, const json& cfg) {
  if (g.seed_given) return g.seed;
  if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
  return 0;
}

// Accepts either a bare matrix file or a steady-state file, returning W0.
cmat load_state_matrix(const std::string& path, int* n_out) {
  const json j = read_json_file(path);
  const json& m = j.contains("w0") ? j.at("w0") : j;
  const cmat w = matrix_from_json(m, path);
  if (n_out != nullptr) *n_out = int(w.rows());
  return w;
}

int cmd_steady(const GlobalOptions& g) {
  const json cfg = load_config(g);
  require_keys(cfg,
               {"n", "mode", "d", "l", "c", "f", "d_init", "max_iter", "tol",
                "seed"},
               "steady config");
  const int n = get_int(cfg, "n", "steady config");
  SpinBasis basis(n);
  const std::string mode = cfg.contains("mode")
                               ? cfg.at("mode").get<std::string>()
                               : throw InputError("steady config: missing key 'mode'");

  SteadyState state;
  if (mode == "zonal") {
    require_keys(cfg, {"n", "mode", "d"}, "zonal config");
    state = zonal_state(basis, get_vector(cfg, "d", "zonal config"));
  } else if (mode == "eigenstate") {
    require_keys(cfg, {"n", "mode", "l", "c"}, "eigenstate config");
    const int l = get_int(cfg, "l", "eigenstate config");
    rvec c;
    if (cfg.contains("c")) {
      c = get_vector(cfg, "c", "eigenstate config");
    } else {
      if (l < 1 || l > n - 1) {
        throw InputError("eigenstate config: l must lie in 1..n-1");
      }
      c = rvec::Zero(2 * l + 1);
      c[l] = 1.0;  // zonal direction by default
    }
    state = eigen_state(basis, l, c);
  } else if (mode == "newton") {
    require_keys(cfg, {"n", "mode", "f", "d_init", "max_iter", "tol", "seed"},
                 "newton config");
    const rvec f = get_vector(cfg, "f", "newton config");
    rvec d_init;
    if (cfg.contains("d_init")) {
      d_init = get_vector(cfg, "d_init", "newton config");
    } else {
      Rng rng(effective_seed(g, cfg));
      d_init.resize(n);
      for (int j = 0; j < n; ++j) d_init[j] = 0.5 * (rng.uniform() - 0.5);
      d_init.array() -= d_init.mean();
    }
    const int max_iter =
        cfg.contains("max_iter") ? get_int(cfg, "max_iter", "newton config") : 100;
    double tol = default_tolerances().newton;
    if (cfg.contains("tol")) tol = get_number(cfg, "tol", "newton config");
    if (g.tol) tol = *g.tol;
    state = newton_functional_state(basis, f, d_init, max_iter, tol);
  } else {
    throw InputError("steady config: mode must be zonal, eigenstate, or newton");
  }

  const std::string path = out_path(g, "steady_state.json");
  write_json_file(path, steady_to_json(state));
  std::printf("provenance=%s n=%d |W0|=%s\n", to_string(state.provenance), n,
              format_g17(su_norm(state.W0)).c_str());
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_certify(const GlobalOptions& g, const std::string& state_file) {
  const json j = read_json_file(state_file);
  const int n = get_int(j, "n", "steady state file");
  SpinBasis basis(n);
  const SteadyState state = steady_from_json(basis, j);
  const auto cert = certify(basis, state.W0, state.P0);
  const std::string path = out_path(g, "certificate.json");
  write_json_file(path, certificate_to_json(cert));
  const double hess_max = cert.hessian_constrained.size() > 0
                              ? cert.hessian_constrained.maxCoeff()
                              : std::nan("");
  std::printf("L=%g verdict=%s hess_max=%g\n", cert.ratios.L,
              to_string(cert.verdict), hess_max);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_rigidity(const GlobalOptions& g, const std::string& state_file) {
  const json j = read_json_file(state_file);
  const int n = get_int(j, "n", "steady state file");
  SpinBasis basis(n);
  const SteadyState state = steady_from_json(basis, j);
  const double residual_tol = g.tol ? *g.tol : 1e-8;
  const auto report = rigidity_report(basis, state, residual_tol);
  const std::string path = out_path(g, "rigidity.json");
  write_json_file(path, rigidity_to_json(report));
  std::printf("L=%g conclusion=%s offdiag=%g\n", report.L,
              to_string(report.conclusion), report.offdiag_residual);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

void stream_snapshots(const GlobalOptions& g, const TrajectoryRecord& rec) {
  for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%06d.json",
                  rec.snapshot_steps[i]);
    write_json_file(out_path(g, name), matrix_to_json(rec.snapshots[i]));
  }
}

int run_plain_evolve(const GlobalOptions& g, const json& cfg) {
  require_keys(cfg,
               {"experiment", "n", "h", "T", "casimir_max", "snapshot_stride",
                "init", "ref", "inner_tol", "max_inner", "seed"},
               "evolve config");
  const int n = get_int(cfg, "n", "evolve config");
  SpinBasis basis(n);
  const double h = get_number(cfg, "h", "evolve config");
  const double T = get_number(cfg, "T", "evolve config");

  if (!cfg.contains("init") || !cfg.at("init").is_object()) {
    throw InputError("evolve config: missing object key 'init'");
  }
  const json& init = cfg.at("init");
  require_keys(init, {"file", "random_seed", "norm"}, "evolve config.init");
  cmat w0;
  if (init.contains("file")) {
    w0 = load_state_matrix(init.at("file").get<std::string>(), nullptr);
    if (w0.rows() != n) {
      throw InputError("evolve config: init file dimension mismatch");
    }
  } else if (init.contains("random_seed")) {
    w0 = random_su(n, init.at("random_seed").get<std::uint64_t>());
    if (init.contains("norm")) {
      const double target = number_from_json(init.at("norm"), "init.norm");
      w0 *= target / su_norm(w0);
    }
  } else {
    throw InputError("evolve config: init needs 'file' or 'random_seed'");
  }

  MonitorConfig mon;
  if (cfg.contains("casimir_max")) {
    mon.casimir_max = get_int(cfg, "casimir_max", "evolve config");
  }
  if (cfg.contains("snapshot_stride")) {
    mon.snapshot_stride = get_int(cfg, "snapshot_stride", "evolve config");
  }
  std::optional<cmat> ref;
  if (cfg.contains("ref")) {
    ref = load_state_matrix(cfg.at("ref").get<std::string>(), nullptr);
  }
  const double inner_tol = cfg.contains("inner_tol")
                               ? get_number(cfg, "inner_tol", "evolve config")
                               : default_tolerances().integrator_inner;
  const int max_inner =
      cfg.contains("max_inner") ? get_int(cfg, "max_inner", "evolve config") : 200;

  const std::string csv_path = out_path(g, "monitors.csv");
  std::ofstream os(csv_path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + csv_path + "' for writing");
  write_monitor_header(os, mon.casimir_max);
  const auto observer = [&](const TrajectoryRecord& rec, int i) {
    write_monitor_row(os, rec, i);
    os.flush();
  };
  try {
    const auto rec = evolve(basis, w0, h, T, mon, ref ? &*ref : nullptr,
                            observer, inner_tol, max_inner);
    stream_snapshots(g, rec);
  } catch (const IntegratorError& e) {
    os << "# aborted at step " << e.step << '\n';
    os.flush();
    throw;
  }
  std::printf("wrote %s\n", csv_path.c_str());
  return 0;
}

int run_lyapunov(const GlobalOptions& g, const json& cfg) {
  require_keys(cfg,
               {"experiment", "n", "state", "epsilons", "perturbation", "seed",
                "h", "T", "casimir_max", "inner_tol", "max_inner"},
               "lyapunov config");
  const int n = get_int(cfg, "n", "lyapunov config");
  SpinBasis basis(n);
  if (!cfg.contains("state")) {
    throw InputError("lyapunov config: missing key 'state'");
  }
  const SteadyState state = steady_from_json(
      basis, read_json_file(cfg.at("state").get<std::string>()));
  const rvec epsilons = get_vector(cfg, "epsilons", "lyapunov config");
  if (epsilons.size() == 0) {
    throw InputError("lyapunov config: epsilons must be nonempty");
  }
  const std::string pert = cfg.contains("perturbation")
                               ? cfg.at("perturbation").get<std::string>()
                               : "ORBIT";
  PerturbationMode mode;
  if (pert == "ORBIT") {
    mode = PerturbationMode::kOrbit;
  } else if (pert == "GENERIC") {
    mode = PerturbationMode::kGeneric;
  } else {
    throw InputError("lyapunov config: perturbation must be ORBIT or GENERIC");
  }
  const double h = get_number(cfg, "h", "lyapunov config");
  const double T = get_number(cfg, "T", "lyapunov config");
  const std::uint64_t seed = effective_seed(g, cfg);
  MonitorConfig mon;
  if (cfg.contains("casimir_max")) {
    mon.casimir_max = get_int(cfg, "casimir_max", "lyapunov config");
  }
  const double inner_tol =
      cfg.contains("inner_tol")
          ? get_number(cfg, "inner_tol", "lyapunov config")
          : default_tolerances().integrator_inner;
  const int max_inner =
      cfg.contains("max_inner") ? get_int(cfg, "max_inner", "lyapunov config") : 200;

  json report;
  report["mode"] = pert;
  report["seed"] = seed;
  json eps_list = json::array(), dev_list = json::array();
  for (int i = 0; i < epsilons.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "lyapunov_%02d.csv", i);
    const std::string csv_path = out_path(g, name);
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + csv_path + "' for writing");
    write_monitor_header(os, mon.casimir_max);
    const auto observer = [&](const TrajectoryRecord& rec, int ri) {
      write_monitor_row(os, rec, ri);
      os.flush();
    };
    LyapunovReport rep;
    try {
      rep = lyapunov_experiment(basis, state, epsilons[i], mode, seed, h, T,
                                mon, observer, inner_tol, max_inner);
    } catch (const IntegratorError& e) {
      os << "# aborted at step " << e.step << '\n';
      os.flush();
      throw;
    }
    eps_list.push_back(epsilons[i]);
    dev_list.push_back(rep.max_deviation);
    if (i == 0) report["certificate"] = certificate_to_json(rep.certificate);
    std::printf("epsilon=%s max_deviation=%s -> %s\n",
                format_g17(epsilons[i]).c_str(),
                format_g17(rep.max_deviation).c_str(), csv_path.c_str());
  }
  report["epsilons"] = eps_list;
  report["max_deviations"] = dev_list;
  const std::string rep_path = out_path(g, "lyapunov_report.json");
  write_json_file(rep_path, report);
  std::printf("wrote %s\n", rep_path.c_str());
  return 0;
}

int cmd_evolve(const GlobalOptions& g) {
  const json cfg = load_config(g);
  const std::string experiment = cfg.contains("experiment")
                                     ? cfg.at("experiment").get<std::string>()
                                     : "evolve";
  if (experiment == "evolve") return run_plain_evolve(g, cfg);
  if (experiment == "lyapunov") return run_lyapunov(g, cfg);
  throw InputError("evolve config: experiment must be evolve or lyapunov");
}

int cmd_render(const GlobalOptions& g, const std::string& input_file,
               int n_theta, int n_phi) {
  int n = 0;
  const cmat w = load_state_matrix(input_file, &n);
  SpinBasis basis(n);
  const auto grid = render_field(basis, w, n_theta, n_phi);
  const std::string path = out_path(g, "render.csv");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  os << "theta,phi,w\n";
  for (int i = 0; i < grid.thetas.size(); ++i) {
    for (int j = 0; j < grid.phis.size(); ++j) {
      os << format_g17(grid.thetas[i]) << ',' << format_g17(grid.phis[j])
         << ',' << format_g17(grid.values(i, j)) << '\n';
    }
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_basis(const GlobalOptions& g, int n) {
  SpinBasis basis(n);
  for (int alpha = 0; alpha < 3; ++alpha) {
    char name[16];
    std::snprintf(name, sizeof(name), "x%d.json", alpha + 1);
    write_json_file(out_path(g, name), matrix_to_json(basis.X(alpha)));
  }
  json levels = json::array();
  for (int l = 1; l <= n - 1; ++l) {
    levels.push_back(json{{"l", l},
                          {"eigenvalue", -double(l) * (l + 1)},
                          {"multiplicity", 2 * l + 1}});
  }
  write_json_file(out_path(g, "laplacian_spectrum.json"),
                  json{{"n", n}, {"levels", levels}});
  std::printf("wrote x1.json x2.json x3.json laplacian_spectrum.json\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quantized spherical hydrodynamics: steady states, stability "
      "certificates, isospectral time integration, and sphere rendering"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "output directory (default: .)");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "64-bit seed overriding the config");
  double tol_val = 0.0;
  auto* tol_opt = app.add_option(
      "--tol", tol_val,
      "tolerance override (newton: steady, residual: rigidity)");

  auto* steady = app.add_subcommand("steady", "construct a steady state");
  auto* certifyc = app.add_subcommand("certify", "stability certificate");
  std::string certify_file;
  certifyc->add_option("state", certify_file, "steady state JSON file")
      ->required();
  auto* rigidity = app.add_subcommand("rigidity", "alignment and rigidity");
  std::string rigidity_file;
  rigidity->add_option("state", rigidity_file, "steady state JSON file")
      ->required();
  auto* evolvec = app.add_subcommand("evolve", "time integration experiments");
  auto* render = app.add_subcommand("render", "sample the field on a grid");
  std::string render_file;
  int n_theta = 64, n_phi = 128;
  render->add_option("input", render_file, "matrix or steady state JSON file")
      ->required();
  render->add_option("--ntheta", n_theta, "colatitude samples (default 64)");
  render->add_option("--nphi", n_phi, "azimuth samples (default 128)");
  auto* basisc = app.add_subcommand("basis", "dump generators and spectrum");
  int basis_n = 0;
  basisc->add_option("--n", basis_n, "matrix dimension")->required();

  for (CLI::App* s : {steady, certifyc, rigidity, evolvec, render, basisc}) {
    s->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  g.seed_given = seed_opt->count() > 0;
  if (tol_opt->count() > 0) g.tol = tol_val;

  try {
    if (steady->parsed()) return cmd_steady(g);
    if (certifyc->parsed()) return cmd_certify(g, certify_file);
    if (rigidity->parsed()) return cmd_rigidity(g, rigidity_file);
    if (evolvec->parsed()) return cmd_evolve(g);
    if (render->parsed()) return cmd_render(g, render_file, n_theta, n_phi);
    if (basisc->parsed()) return cmd_basis(g, basis_n);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const IntegratorError& e) {
    std::fprintf(stderr, "integrator error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  }
  return 0;
}
