#include "zeitlin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "zeitlin/errors.hpp"
#include "zeitlin/hash.hpp"

namespace zeitlin {

namespace {

Provenance provenance_from_string(const std::string& s) {
  if (s == "ZONAL") return Provenance::kZonal;
  if (s == "EIGENSTATE") return Provenance::kEigenstate;
  if (s == "NEWTON") return Provenance::kNewton;
  if (s == "LOADED") return Provenance::kLoaded;
  throw InputError("unknown provenance '" + s + "'");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "STABLE_BY_RATIO") return Verdict::kStableByRatio;
  if (s == "INDETERMINATE") return Verdict::kIndeterminate;
  if (s == "TRIVIAL") return Verdict::kTrivial;
  throw InputError("unknown verdict '" + s + "'");
}

json vector_to_json(const rvec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

rvec vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array");
  rvec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[i] = number_from_json(j[i], what);
  }
  return v;
}

}  // namespace

json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) throw InputError("refusing to serialize NaN");
  return v;
}

double number_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw InputError(what + ": expected a number or 'inf'/'-inf'");
}

json matrix_to_json(const cmat& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (int c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

cmat matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re") ||
      !j.contains("im")) {
    throw InputError(what + ": matrix object needs keys n, re, im");
  }
  require_keys(j, {"n", "re", "im"}, what);
  const int n = j.at("n").get<int>();
  if (n < 1) throw InputError(what + ": matrix dimension must be positive");
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (int(re.size()) != n || int(im.size()) != n) {
    throw InputError(what + ": row count does not match n");
  }
  cmat m(n, n);
  for (int r = 0; r < n; ++r) {
    if (int(re[r].size()) != n || int(im[r].size()) != n) {
      throw InputError(what + ": column count does not match n");
    }
    for (int c = 0; c < n; ++c) {
      m(r, c) = std::complex<double>(re[r][c].get<double>(),
                                     im[r][c].get<double>());
    }
  }
  return m;
}

json steady_to_json(const SteadyState& state) {
  return json{{"n", state.W0.rows()},
              {"provenance", to_string(state.provenance)},
              {"eigen_l", state.eigen_l},
              {"detail", state.detail},
              {"w0", matrix_to_json(state.W0)},
              {"p0", matrix_to_json(state.P0)},
              {"commutator_residual", state.commutator_residual},
              {"laplacian_residual", state.laplacian_residual},
              {"spectrum",
               json{{"p", vector_to_json(state.spectrum.p)},
                    {"w", vector_to_json(state.spectrum.w)}}}};
}

SteadyState steady_from_json(const SpinBasis& basis, const json& j) {
  require_keys(j,
               {"n", "provenance", "eigen_l", "detail", "w0", "p0",
                "commutator_residual", "laplacian_residual", "spectrum"},
               "steady state file");
  if (!j.contains("n") || !j.contains("w0") || !j.contains("p0")) {
    throw InputError("steady state file: keys n, w0, p0 are required");
  }
  if (j.at("n").get<int>() != basis.n()) {
    throw InputError("steady state file: dimension " +
                     std::to_string(j.at("n").get<int>()) +
                     " does not match the requested basis n = " +
                     std::to_string(basis.n()));
  }
  const cmat w0 = matrix_from_json(j.at("w0"), "steady state w0");
  const cmat p0 = matrix_from_json(j.at("p0"), "steady state p0");
  Provenance prov = Provenance::kLoaded;
  if (j.contains("provenance")) {
    prov = provenance_from_string(j.at("provenance").get<std::string>());
  }
  const int eigen_l = j.contains("eigen_l") ? j.at("eigen_l").get<int>() : 0;
  const std::string detail =
      j.contains("detail") ? j.at("detail").get<std::string>() : "";
  return make_steady_state(basis, w0, p0, prov, eigen_l, detail);
}

json certificate_to_json(const StabilityCertificate& cert) {
  return json{
      {"n", cert.n},
      {"verdict", to_string(cert.verdict)},
      {"ratios",
       json{{"L", number_to_json(cert.ratios.L)},
            {"c", number_to_json(cert.ratios.c)},
            {"C", number_to_json(cert.ratios.C)},
            {"degenerate_p", cert.ratios.degenerate_p},
            {"degenerate_w", cert.ratios.degenerate_w}}},
      {"hessian_full", vector_to_json(cert.hessian_full)},
      {"hessian_constrained", vector_to_json(cert.hessian_constrained)},
      {"p1_leakage", cert.p1_leakage},
      {"crosscheck",
       json{{"applicable", cert.crosscheck_applicable},
            {"passed", cert.crosscheck_passed},
            {"note", cert.crosscheck_note}}},
      {"tolerances", tolerances_to_json(cert.tolerances)},
      {"w0_hash", hash_hex(cert.w0_hash)},
      {"p0_hash", hash_hex(cert.p0_hash)}};
}

StabilityCertificate certificate_from_json(const json& j) {
  require_keys(j,
               {"n", "verdict", "ratios", "hessian_full",
                "hessian_constrained", "p1_leakage", "crosscheck",
                "tolerances", "w0_hash", "p0_hash"},
               "certificate file");
  StabilityCertificate cert;
  cert.n = j.at("n").get<int>();
  cert.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  const json& r = j.at("ratios");
  cert.ratios.L = number_from_json(r.at("L"), "certificate L");
  cert.ratios.c = number_from_json(r.at("c"), "certificate c");
  cert.ratios.C = number_from_json(r.at("C"), "certificate C");
  cert.ratios.degenerate_p = r.at("degenerate_p").get<bool>();
  cert.ratios.degenerate_w = r.at("degenerate_w").get<bool>();
  cert.hessian_full = vector_from_json(j.at("hessian_full"), "hessian_full");
  cert.hessian_constrained =
      vector_from_json(j.at("hessian_constrained"), "hessian_constrained");
  cert.p1_leakage = j.at("p1_leakage").get<double>();
  const json& x = j.at("crosscheck");
  cert.crosscheck_applicable = x.at("applicable").get<bool>();
  cert.crosscheck_passed = x.at("passed").get<bool>();
  cert.crosscheck_note = x.at("note").get<std::string>();
  const json& t = j.at("tolerances");
  Tolerances tol;
  tol.matrix_invariant = t.at("matrix_invariant").get<double>();
  tol.commuting_pair = t.at("commuting_pair").get<double>();
  tol.joint_offdiag = t.at("joint_offdiag").get<double>();
  tol.cluster_gap = t.at("cluster_gap").get<double>();
  tol.spectrum_degeneracy = t.at("spectrum_degeneracy").get<double>();
  tol.steady_pair = t.at("steady_pair").get<double>();
  tol.ratio_margin = t.at("ratio_margin").get<double>();
  tol.tangent_truncation = t.at("tangent_truncation").get<double>();
  tol.newton = t.at("newton").get<double>();
  tol.trivial_state = t.at("trivial_state").get<double>();
  tol.definiteness = t.at("definiteness").get<double>();
  tol.integrator_inner = t.at("integrator_inner").get<double>();
  cert.tolerances = tol;
  cert.w0_hash = std::stoull(j.at("w0_hash").get<std::string>(), nullptr, 16);
  cert.p0_hash = std::stoull(j.at("p0_hash").get<std::string>(), nullptr, 16);
  return cert;
}

json rigidity_to_json(const RigidityReport& report) {
  return json{{"L", number_to_json(report.L)},
              {"conclusion", to_string(report.conclusion)},
              {"alignment_rotation",
               json::array({report.alignment_rotation[0],
                            report.alignment_rotation[1],
                            report.alignment_rotation[2]})},
              {"offdiag_residual", report.offdiag_residual},
              {"x3_commutator_residual", report.x3_commutator_residual},
              {"norm_w0", report.norm_W0}};
}

json tolerances_to_json(const Tolerances& tol) {
  return json{{"matrix_invariant", tol.matrix_invariant},
              {"commuting_pair", tol.commuting_pair},
              {"joint_offdiag", tol.joint_offdiag},
              {"cluster_gap", tol.cluster_gap},
              {"spectrum_degeneracy", tol.spectrum_degeneracy},
              {"steady_pair", tol.steady_pair},
              {"ratio_margin", tol.ratio_margin},
              {"tangent_truncation", tol.tangent_truncation},
              {"newton", tol.newton},
              {"trivial_state", tol.trivial_state},
              {"definiteness", tol.definiteness},
              {"integrator_inner", tol.integrator_inner}};
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_monitor_header(std::ostream& os, int casimir_max) {
  os << "t,H";
  for (int k = 2; k <= casimir_max; ++k) os << ",C" << k;
  os << ",L1,L2,L3,spec_drift,dist\n";
}

void write_monitor_row(std::ostream& os, const TrajectoryRecord& rec, int i) {
  os << format_g17(rec.times[i]) << ',' << format_g17(rec.energy[i]);
  for (int c = 0; c < rec.casimirs.cols(); ++c) {
    os << ',' << format_g17(rec.casimirs(i, c));
  }
  for (int c = 0; c < 3; ++c) os << ',' << format_g17(rec.momentum(i, c));
  os << ',' << format_g17(rec.spec_drift[i]) << ','
     << format_g17(rec.dist[i]) << '\n';
}

void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& rec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  write_monitor_header(os, int(rec.casimirs.cols()) + 1);
  for (int i = 0; i < rec.times.size(); ++i) write_monitor_row(os, rec, i);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& context) {
  if (!j.is_object()) throw InputError(context + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw InputError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

}  // namespace zeitlin
