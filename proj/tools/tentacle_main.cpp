#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tentacle/dynamics.hpp"
#include "tentacle/floer.hpp"
#include "tentacle/hormander.hpp"
#include "tentacle/json_io.hpp"
#include "tentacle/log.hpp"
#include "tentacle/tentacular.hpp"

namespace {

using tentacle::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUncertified = 3;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw tentacle::ValidationError("cannot open input file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw tentacle::ValidationError(std::string("input is not valid JSON: ") +
                                    e.what());
  }
}

void emit(const std::string& payload, const std::string& output) {
  if (output.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    throw tentacle::ValidationError("cannot open output file: " + output);
  }
  out << payload;
}

std::string render_block(const tentacle::HormanderBlock& b) {
  std::ostringstream os;
  switch (b.kind) {
    case tentacle::HormanderBlock::Kind::a:
      os << "kind a  m=" << b.m << "  lambda=" << b.lambda1;
      break;
    case tentacle::HormanderBlock::Kind::b:
      os << "kind b  m=" << b.m << "  lambda1=" << b.lambda1
         << "  lambda2=" << b.lambda2;
      break;
    case tentacle::HormanderBlock::Kind::c:
      os << "kind c  m=" << b.m << "  mu=" << b.lambda1 << "  gamma=";
      if (b.gamma == 0) {
        os << "unresolved";
      } else {
        os << b.gamma;
      }
      break;
  }
  return os.str();
}

std::string render_decomposition(const tentacle::Decomposition& dec) {
  std::ostringstream os;
  os << "blocks (" << dec.blocks.size() << "):\n";
  for (const auto& b : dec.blocks) os << "  " << render_block(b) << "\n";
  os << "semisimple: " << (dec.semisimple ? "yes" : "no") << "\n";
  os << "signature: (" << dec.signature.first << ", " << dec.signature.second
     << ")\n";
  if (dec.residual) os << "transform residual: " << *dec.residual << "\n";
  return os.str();
}

const char* status_text(tentacle::AxiomStatus s) {
  switch (s) {
    case tentacle::AxiomStatus::verified:
      return "verified";
    case tentacle::AxiomStatus::criteria_not_met:
      return "criteria not met";
    case tentacle::AxiomStatus::unresolved:
      return "unresolved";
  }
  return "?";
}

std::string render_report(const tentacle::TentacularReport& rep) {
  std::ostringstream os;
  os << render_decomposition(rep.decomposition);
  for (const auto& v : rep.verdicts) {
    os << v.axiom << ": " << status_text(v.status);
    if (v.witness) os << "  (c_lower = " << v.witness->c_lower << ")";
    if (v.h4) os << "  (eps = " << v.h4->eps << ")";
    os << "\n    " << v.note << "\n";
  }
  os << "overall: ";
  switch (rep.overall) {
    case tentacle::Overall::strongly_tentacular:
      os << "strongly tentacular\n";
      break;
    case tentacle::Overall::criteria_not_met:
      os << "criteria not met (no disproof implied)\n";
      break;
    case tentacle::Overall::unresolved:
      os << "unresolved\n";
      break;
  }
  return os.str();
}

struct OrbitRow {
  tentacle::ClosedCharacteristic orbit;
  double length = 0.0;
};

std::vector<OrbitRow> orbit_table(const tentacle::QuadraticHamiltonian& H,
                                  int k_max, int n_quad) {
  std::vector<OrbitRow> rows;
  for (auto& orb : tentacle::enumerate_closed_characteristics(H, k_max)) {
    OrbitRow row;
    row.length = tentacle::length_action_check(orb, H, n_quad).length;
    row.orbit = std::move(orb);
    rows.push_back(std::move(row));
  }
  return rows;
}

json orbits_to_json(const std::vector<OrbitRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json o = tentacle::to_json(row.orbit);
    o["length"] = row.length;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::string render_orbits(const std::vector<OrbitRow>& rows) {
  std::ostringstream os;
  os << rows.size() << " closed characteristic(s)\n";
  for (const auto& row : rows) {
    const auto& o = row.orbit;
    os << "  mu=" << o.mu << "  k=" << o.k << "  eta=" << o.eta
       << "  action=" << o.action << "  length=" << row.length
       << "  cz_transverse=";
    if (o.cz_transverse) {
      os << o.cz_transverse->value();
    } else {
      os << "unresolved";
    }
    os << "\n";
  }
  return os.str();
}

// A constant loop on the level set, drawn from a seeded direction. Used when
// a flow input file supplies no loops of its own.
tentacle::LoopState synth_loop(const tentacle::QuadraticHamiltonian& H, int N,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 256; ++attempt) {
    tentacle::Vec d(H.dim());
    for (int i = 0; i < H.dim(); ++i) d(i) = gauss(rng);
    const double q = d.dot(H.A * d);
    if (q <= 1e-12 * d.squaredNorm()) continue;
    if (H.c > 0.0) {
      d *= std::sqrt(2.0 * H.c / q);
    }
    tentacle::Mat v(N, H.dim());
    for (int j = 0; j < N; ++j) v.row(j) = d.transpose();
    return tentacle::LoopState(N, 0.0, v);
  }
  throw tentacle::UnresolvedError(
      "could not synthesize a start loop: the form has no positive direction");
}

struct CommonOpts {
  std::string input;
  std::string output;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--input", opts.input, "Hamiltonian JSON file")->required();
  cmd->add_option("--output", opts.output, "output path (default: stdout)");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));
}

int run_classify(const CommonOpts& opts) {
  const auto H = tentacle::hamiltonian_from_json(load_json(opts.input));
  const auto dec = tentacle::classify(H);
  emit(opts.format == "json" ? tentacle::canonical_dump(tentacle::to_json(dec))
                             : render_decomposition(dec),
       opts.output);
  return kExitOk;
}

int run_check(const CommonOpts& opts) {
  const auto H = tentacle::hamiltonian_from_json(load_json(opts.input));
  const auto rep = tentacle::full_report(H);
  emit(opts.format == "json" ? tentacle::canonical_dump(tentacle::to_json(rep))
                             : render_report(rep),
       opts.output);
  return rep.overall == tentacle::Overall::strongly_tentacular
             ? kExitOk
             : kExitUncertified;
}

int run_orbits(const CommonOpts& opts, int k_max, int n_quad) {
  const auto H = tentacle::hamiltonian_from_json(load_json(opts.input));
  const auto rows = orbit_table(H, k_max, n_quad);
  emit(opts.format == "json" ? tentacle::canonical_dump(orbits_to_json(rows))
                             : render_orbits(rows),
       opts.output);
  return kExitOk;
}

int run_flow(const CommonOpts& opts, double s_max, double ds, int jobs, int N,
             std::uint64_t seed, const std::string& snapshots) {
  const json doc = load_json(opts.input);
  if (!doc.is_object()) {
    throw tentacle::ValidationError(
        "flow input must be a Hamiltonian document or {\"hamiltonian\": "
        "{...}, \"loops\": [...]}");
  }
  // A bare Hamiltonian file is accepted; start loops are then synthesized.
  const auto H = tentacle::hamiltonian_from_json(
      doc.contains("hamiltonian") ? doc["hamiltonian"] : doc);
  std::vector<tentacle::LoopState> loops;
  if (doc.contains("loops") && !doc["loops"].is_null()) {
    if (!doc["loops"].is_array() || doc["loops"].empty()) {
      throw tentacle::ValidationError("\"loops\" must be a non-empty array");
    }
    for (const auto& lj : doc["loops"]) {
      loops.push_back(tentacle::loopstate_from_json(lj));
    }
  } else {
    loops.push_back(synth_loop(H, N, seed));
  }

  if (ds <= 0.0) {
    int n_max = 0;
    for (const auto& u : loops) n_max = std::max(n_max, u.N);
    ds = 0.5 / ((1.0 + tentacle::opnorm_sym(H.A)) * n_max);
  }

  const auto runs =
      tentacle::integrate_flow_batch(loops, H, s_max, ds, 10, jobs);

  if (!snapshots.empty()) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].limit) continue;
      const std::string path = snapshots + std::to_string(i) + ".rflo";
      std::ofstream snap(path, std::ios::binary);
      if (!snap) {
        throw tentacle::ValidationError("cannot open snapshot file: " + path);
      }
      tentacle::write_snapshot(snap, *runs[i].limit);
    }
  }

  if (opts.format == "json") {
    json arr = json::array();
    for (const auto& r : runs) arr.push_back(tentacle::to_json(r));
    emit(tentacle::canonical_dump(arr), opts.output);
  } else {
    std::ostringstream os;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      os << "run " << i << ": "
         << (r.converged ? "converged"
                         : (r.escaped ? "escaped" : "reached s_max"))
         << "  steps=" << r.s_grid.size()
         << "  action " << r.action_series.front() << " -> "
         << r.action_series.back() << "  energy=" << r.energy << "\n";
    }
    emit(os.str(), opts.output);
  }
  return kExitOk;
}

int run_report(const CommonOpts& opts, int k_max, int n_quad) {
  const auto H = tentacle::hamiltonian_from_json(load_json(opts.input));
  bool uncertified = false;

  const auto rep = tentacle::full_report(H);
  uncertified |= rep.overall != tentacle::Overall::strongly_tentacular;

  json doc{{"hamiltonian", tentacle::to_json(H)},
           {"classification", tentacle::to_json(rep.decomposition)},
           {"tentacular", tentacle::to_json(rep)}};
  std::string orbit_text;
  try {
    const auto rows = orbit_table(H, k_max, n_quad);
    doc["orbits"] = orbits_to_json(rows);
    orbit_text = render_orbits(rows);
  } catch (const tentacle::UnresolvedError& e) {
    doc["orbits"] = json{{"error", e.what()}};
    orbit_text = std::string("orbits unresolved: ") + e.what() + "\n";
    uncertified = true;
  } catch (const tentacle::ValidationError& e) {
    // c <= 0 has no closed characteristics to enumerate; the rest of the
    // report is still meaningful.
    doc["orbits"] = json{{"error", e.what()}};
    orbit_text = std::string("orbits skipped: ") + e.what() + "\n";
  }

  if (opts.format == "json") {
    emit(tentacle::canonical_dump(doc), opts.output);
  } else {
    emit(render_report(rep) + "\n" + orbit_text, opts.output);
  }
  return uncertified ? kExitUncertified : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tentacle: normal forms, tentacularity certificates, closed "
      "characteristics, and loop-space gradient flows for quadratic "
      "Hamiltonians"};
  app.require_subcommand(1);

  CommonOpts classify_opts, check_opts, orbits_opts, flow_opts, report_opts;
  int k_max = 3, n_quad = 512, jobs = 1, N = 64;
  double s_max = 1.0, ds = 0.0;
  std::uint64_t seed = 0;
  std::string snapshots;

  auto* cmd_classify =
      app.add_subcommand("classify", "normal-form classification");
  add_common(cmd_classify, classify_opts);

  auto* cmd_check =
      app.add_subcommand("check", "verify the tentacularity axioms");
  add_common(cmd_check, check_opts);

  auto* cmd_orbits =
      app.add_subcommand("orbits", "closed characteristics with actions");
  add_common(cmd_orbits, orbits_opts);
  cmd_orbits->add_option("--k-max", k_max, "largest cover (1..64)")
      ->check(CLI::Range(1, 64));
  cmd_orbits->add_option("--n-quad", n_quad, "quadrature nodes")
      ->check(CLI::Range(2, 1 << 20));

  auto* cmd_flow =
      app.add_subcommand("flow", "integrate the positive gradient flow");
  add_common(cmd_flow, flow_opts);
  cmd_flow->add_option("--s-max", s_max, "flow time")->check(CLI::PositiveNumber);
  cmd_flow->add_option("--ds", ds, "step size (0 = stability bound)");
  cmd_flow->add_option("--jobs", jobs, "parallel workers")
      ->check(CLI::Range(1, 256));
  cmd_flow->add_option("--N", N, "nodes for a synthesized start loop")
      ->check(CLI::IsMember({16, 32, 64, 128, 256, 512, 1024}));
  cmd_flow->add_option("--seed", seed, "seed for a synthesized start loop");
  cmd_flow->add_option("--snapshots", snapshots,
                       "prefix for binary limit-state snapshots");

  auto* cmd_report = app.add_subcommand("report", "full document");
  add_common(cmd_report, report_opts);
  cmd_report->add_option("--k-max", k_max, "largest cover (1..64)")
      ->check(CLI::Range(1, 64));
  cmd_report->add_option("--n-quad", n_quad, "quadrature nodes")
      ->check(CLI::Range(2, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (cmd_classify->parsed()) return run_classify(classify_opts);
    if (cmd_check->parsed()) return run_check(check_opts);
    if (cmd_orbits->parsed()) return run_orbits(orbits_opts, k_max, n_quad);
    if (cmd_flow->parsed()) {
      return run_flow(flow_opts, s_max, ds, jobs, N, seed, snapshots);
    }
    if (cmd_report->parsed()) return run_report(report_opts, k_max, n_quad);
    std::cerr << "no subcommand\n";
    return kExitValidation;
  } catch (const tentacle::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tentacle::UnresolvedError& e) {
    std::cerr << "cannot certify: " << e.what() << "\n";
    return kExitUncertified;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
