// Batch verification CLI for free-space computations: space validation,
// norms with certificates, decompositions, Lipschitz constants, zigzag and
// ladder experiments, and the SSD2P refuter. JSON in, JSON/CSV out; exit codes
// 0 ok, 1 usage/parse, 2 verification failure.

#include <cstdlib>
#include <ctime>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lipfree/json_io.hpp"
#include "lipfree/ladder.hpp"
#include "lipfree/lp_oracle.hpp"
#include "lipfree/suites.hpp"

namespace {

using lipfree::json;

int log_level() {
  const char* v = std::getenv("LIPFREE_LOG");
  if (!v) return 0;
  std::string s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[lipfree] " << msg << "\n";
}

std::string timestamp() {
  char buf[32];
  std::time_t t = std::time(nullptr);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit(const json& j, const std::string& out_path) {
  json stamped = j;
  stamped["timestamp"] = timestamp();
  std::string text = stamped.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    lipfree::write_text(out_path, text);
}

void emit_raw(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    lipfree::write_text(out_path, text);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    int k = std::stoi(s);
    return {k, k};
  }
  return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipfree: free-space norms, squareness experiments, SSD2P refutation"};
  app.require_subcommand(1);

  std::string space_path, element_path, function_path, out_path, y_path;
  std::string anchors_arg, k_arg = "1..8";
  std::uint64_t seed = 12345;
  double tol = lipfree::kDualityTol;
  double eps = 0.25, d_param = 1.0;
  int count = 500, levels = 5, zig_k = 4;

  app.add_option("--seed", seed, "seed for randomized suites");
  app.add_option("--tol", tol, "tolerance override for report annotations");

  std::string emit_path;
  auto* c_validate = app.add_subcommand("validate", "check metric invariants of a space file");
  c_validate->add_option("--space", space_path)->required();
  c_validate->add_option("--out", out_path);
  c_validate->add_option("--emit", emit_path, "write the space in matrix form (ids, labels, dist)");

  auto* c_norm = app.add_subcommand("norm", "free-space norm with flow and dual certificates");
  c_norm->add_option("--space", space_path)->required();
  c_norm->add_option("--element", element_path)->required();
  c_norm->add_option("--out", out_path);

  auto* c_dec = app.add_subcommand("decompose", "optimal molecular decomposition");
  c_dec->add_option("--space", space_path)->required();
  c_dec->add_option("--element", element_path)->required();
  c_dec->add_option("--out", out_path);

  auto* c_lip = app.add_subcommand("lip", "Lipschitz constant and attaining pair");
  c_lip->add_option("--space", space_path)->required();
  c_lip->add_option("--function", function_path)->required();
  c_lip->add_option("--out", out_path);

  auto* c_zig = app.add_subcommand("zigzag", "zigzag suite CSV over a metric graph");
  c_zig->add_option("--graph", space_path)->required();
  c_zig->add_option("--k", k_arg, "level range, e.g. 1..10");
  c_zig->add_option("--out", out_path);

  auto* c_nw = app.add_subcommand("ladder-nonwasq", "glued certificate on the ladder");
  c_nw->add_option("--levels", levels);
  c_nw->add_option("--zig-k", zig_k);
  c_nw->add_option("--out", out_path);

  auto* c_mf = app.add_subcommand("molecule-filter", "low-height filtering of a near-square element");
  c_mf->add_option("--space", space_path)->required();
  c_mf->add_option("--element", element_path)->required();
  c_mf->add_option("--eps", eps)->required();
  c_mf->add_option("--out", out_path);

  auto* c_ssd = app.add_subcommand("ssd2p-refute", "refute the symmetric strong diameter 2d property");
  c_ssd->add_option("--space", space_path)->required();
  c_ssd->add_option("--anchors", anchors_arg)->required();
  c_ssd->add_option("--d", d_param);
  c_ssd->add_option("--eps", eps)->required();
  c_ssd->add_option("--y", y_path)->required();
  c_ssd->add_option("--out", out_path);

  auto* c_oracle = app.add_subcommand("oracle-suite", "randomized flow-vs-LP duality suite");
  c_oracle->add_option("--count", count);
  c_oracle->add_option("--out", out_path);

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_validate) {
      lipfree::json j = lipfree::load_json(space_path);
      lipfree::ValidationReport rep;
      if (j.contains("dist")) {
        // Validate the raw matrix before any construction, so violations are
        // reported instead of thrown.
        rep = lipfree::validate_metric(j.at("dist").get<std::vector<std::vector<double>>>());
      } else {
        lipfree::SpaceFile sf = lipfree::parse_space(j);
        std::vector<std::vector<double>> rows(sf.space.size(),
                                              std::vector<double>(sf.space.size()));
        for (int i = 0; i < sf.space.size(); ++i)
          for (int k = 0; k < sf.space.size(); ++k) rows[i][k] = sf.space.dist(i, k);
        rep = lipfree::validate_metric(rows);
      }
      json out{{"ok", rep.ok()}, {"summary", rep.summary()}};
      json tri = json::array();
      for (const auto& t : rep.triangle)
        tri.push_back({{"i", t.i}, {"j", t.j}, {"k", t.k}, {"excess", t.excess}});
      json asym = json::array();
      for (const auto& [a, b] : rep.asymmetric) asym.push_back({a, b});
      out["triangle_violations"] = tri;
      out["asymmetric_pairs"] = asym;
      emit(out, out_path);
      if (rep.ok() && !emit_path.empty())
        lipfree::write_text(emit_path,
                            lipfree::space_to_json(lipfree::parse_space(j).space).dump(2) + "\n");
      return rep.ok() ? 0 : 2;
    }

    if (*c_norm) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      lipfree::FreeElement elem = lipfree::load_element(element_path, sf.space);
      lipfree::NormCertificate cert = lipfree::norm(sf.space, elem);
      json flow = json::array();
      for (const auto& a : cert.flow) flow.push_back({a.from, a.to, a.amount});
      json out{{"value", cert.value},
               {"flow", std::move(flow)},
               {"potentials", lipfree::function_to_json(cert.potentials)},
               {"potentials_lip", cert.potentials.lip()}};
      emit(out, out_path);
      return 0;
    }

    if (*c_dec) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      lipfree::FreeElement elem = lipfree::load_element(element_path, sf.space);
      lipfree::MolecularDecomposition dec = lipfree::decompose(sf.space, elem);
      lipfree::FreeElement recon = lipfree::as_element(sf.space, dec);
      recon.axpy(-1.0, elem, sf.space.base());
      json terms = json::array();
      for (const auto& [lambda, m] : dec.terms) terms.push_back({lambda, m.u, m.v});
      json out{{"terms", std::move(terms)},
               {"sum_lambda", dec.sum_lambda()},
               {"reconstruction_error", lipfree::norm_value(sf.space, recon)}};
      emit(out, out_path);
      return 0;
    }

    if (*c_lip) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      lipfree::LipFunction f = lipfree::load_function(function_path, sf.space);
      json out{{"lip", f.lip()}, {"pair", {f.attaining().p, f.attaining().q}}};
      emit(out, out_path);
      return 0;
    }

    if (*c_zig) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      if (!sf.graph)
        throw lipfree::Error(lipfree::ErrorKind::Structural,
                             "zigzag: the --graph file must contain a graph");
      if (sf.pairs.empty())
        throw lipfree::Error(lipfree::ErrorKind::Structural,
                             "zigzag: the --graph file must list \"pairs\"");
      auto [klo, khi] = parse_range(k_arg);
      log_info("zigzag levels " + std::to_string(klo) + ".." + std::to_string(khi));
      emit_raw(lipfree::zigzag_csv(*sf.graph, sf.pairs, klo, khi), out_path);
      return 0;
    }

    if (*c_nw) {
      lipfree::NonWasqResult res = lipfree::run_nonwasq_certificate(levels, zig_k);
      emit(lipfree::nonwasq_to_json(res), out_path);
      return 0;
    }

    if (*c_mf) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      lipfree::FreeElement mu = lipfree::load_element(element_path, sf.space);
      lipfree::MoleculeFilterResult res = lipfree::molecule_filter(sf.space, mu, eps);
      json terms = json::array();
      for (const auto& [lambda, m] : res.nu.terms) terms.push_back({lambda, m.u, m.v});
      json out{{"delta", res.delta},
               {"eps", res.eps},
               {"nu_terms", std::move(terms)},
               {"distance", res.distance},
               {"j_mass", res.j_mass},
               {"split_mismatch", res.split_mismatch}};
      emit(out, out_path);
      return 0;
    }

    if (*c_ssd) {
      lipfree::SpaceFile sf = lipfree::load_space(space_path);
      lipfree::FreeElement y = lipfree::load_element(y_path, sf.space);
      std::vector<lipfree::PointId> anchors;
      for (int a : parse_int_list(anchors_arg)) anchors.push_back(a);
      lipfree::Ssd2pInstance inst =
          lipfree::build_instance(sf.space, anchors, d_param, eps);
      lipfree::RefutationReport rep = lipfree::refute(sf.space, inst, y, {});
      emit(lipfree::refutation_to_json(rep, inst), out_path);
      return 0;
    }

    if (*c_oracle) {
      log_info("oracle suite: " + std::to_string(count) + " instances, seed " +
               std::to_string(seed));
      lipfree::OracleSuiteReport rep = lipfree::run_oracle_suite(seed, count);
      emit(rep.to_json(), out_path);
      bool ok = rep.max_gap <= tol && rep.max_lip_slack <= tol && rep.max_dual_pairing_gap <= tol;
      return ok ? 0 : 2;
    }
  } catch (const lipfree::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == lipfree::ErrorKind::Structural ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
