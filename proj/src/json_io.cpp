#include "tentacle/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace tentacle {

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(context + ": expected a non-empty array of rows");
  }
  const std::size_t nrows = j.size();
  std::size_t ncols = 0;
  Mat M;
  for (std::size_t i = 0; i < nrows; ++i) {
    const json& row = j[i];
    if (!row.is_array()) {
      throw ValidationError(context + ": row " + std::to_string(i) +
                            " is not an array");
    }
    if (i == 0) {
      ncols = row.size();
      if (ncols == 0) throw ValidationError(context + ": empty row");
      M.resize(nrows, ncols);
    } else if (row.size() != ncols) {
      throw ValidationError(context + ": ragged rows");
    }
    for (std::size_t k = 0; k < ncols; ++k) {
      if (!row[k].is_number()) {
        throw ValidationError(context + ": entry (" + std::to_string(i) +
                              "," + std::to_string(k) + ") is not a number");
      }
      M(i, k) = row[k].get<double>();
    }
  }
  return M;
}

json vector_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vec vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(context + ": expected a non-empty array");
  }
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ValidationError(context + ": entry " + std::to_string(i) +
                            " is not a number");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

json to_json(const QuadraticHamiltonian& H) {
  return json{{"dim", H.dim()}, {"A", matrix_to_json(H.A)}, {"c", H.c}};
}

QuadraticHamiltonian hamiltonian_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("Hamiltonian: expected an object");
  if (!j.contains("A")) throw ValidationError("Hamiltonian: missing \"A\"");
  if (!j.contains("c") || !j["c"].is_number()) {
    throw ValidationError("Hamiltonian: missing numeric \"c\"");
  }
  const Mat A = matrix_from_json(j["A"], "Hamiltonian A");
  if (A.rows() != A.cols()) {
    throw ValidationError("Hamiltonian: A must be square");
  }
  if (A.rows() % 2 != 0 || A.rows() < 2) {
    throw ValidationError("Hamiltonian: dimension must be even and >= 2");
  }
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() ||
        j["dim"].get<int>() != static_cast<int>(A.rows())) {
      throw ValidationError("Hamiltonian: \"dim\" disagrees with A");
    }
  }
  return QuadraticHamiltonian(A, j["c"].get<double>());
}

namespace {

const char* kind_tag(HormanderBlock::Kind k) {
  switch (k) {
    case HormanderBlock::Kind::a:
      return "a";
    case HormanderBlock::Kind::b:
      return "b";
    case HormanderBlock::Kind::c:
      return "c";
  }
  return "?";
}

const char* status_tag(AxiomStatus s) {
  switch (s) {
    case AxiomStatus::verified:
      return "verified";
    case AxiomStatus::criteria_not_met:
      return "criteria_not_met";
    case AxiomStatus::unresolved:
      return "unresolved";
  }
  return "?";
}

const char* overall_tag(Overall o) {
  switch (o) {
    case Overall::strongly_tentacular:
      return "strongly_tentacular";
    case Overall::criteria_not_met:
      return "criteria_not_met";
    case Overall::unresolved:
      return "unresolved";
  }
  return "?";
}

}  // namespace

json to_json(const HormanderBlock& b) {
  json params;
  switch (b.kind) {
    case HormanderBlock::Kind::a:
      params = json{{"lambda", b.lambda1}};
      break;
    case HormanderBlock::Kind::b:
      params = json{{"lambda1", b.lambda1}, {"lambda2", b.lambda2}};
      break;
    case HormanderBlock::Kind::c:
      params = json{{"mu", b.lambda1}};
      if (b.gamma == 0) {
        params["gamma"] = nullptr;
      } else {
        params["gamma"] = b.gamma;
      }
      break;
  }
  return json{{"kind", kind_tag(b.kind)}, {"m", b.m}, {"params", params}};
}

HormanderBlock block_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("m") ||
      !j.contains("params")) {
    throw ValidationError("block: expected {kind, m, params}");
  }
  HormanderBlock b;
  const std::string kind = j["kind"].get<std::string>();
  const json& p = j["params"];
  if (kind == "a") {
    b.kind = HormanderBlock::Kind::a;
    b.lambda1 = p.at("lambda").get<double>();
  } else if (kind == "b") {
    b.kind = HormanderBlock::Kind::b;
    b.lambda1 = p.at("lambda1").get<double>();
    b.lambda2 = p.at("lambda2").get<double>();
  } else if (kind == "c") {
    b.kind = HormanderBlock::Kind::c;
    b.lambda1 = p.at("mu").get<double>();
    b.gamma = p.contains("gamma") && !p["gamma"].is_null()
                  ? p["gamma"].get<int>()
                  : 0;
  } else {
    throw ValidationError("block: kind must be one of a, b, c");
  }
  if (!j["m"].is_number_integer() || j["m"].get<int>() < 1) {
    throw ValidationError("block: m must be a positive integer");
  }
  b.m = j["m"].get<int>();
  return b;
}

json to_json(const Decomposition& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks) blocks.push_back(to_json(b));
  json out{{"blocks", std::move(blocks)},
           {"semisimple", d.semisimple},
           {"signature", json::array({d.signature.first, d.signature.second})}};
  out["residual"] = d.residual ? json(*d.residual) : json(nullptr);
  out["transform"] = d.transform ? matrix_to_json(*d.transform) : json(nullptr);
  return out;
}

Decomposition decomposition_from_json(const json& j) {
  if (!j.is_object() || !j.contains("blocks")) {
    throw ValidationError("decomposition: expected {blocks, ...}");
  }
  Decomposition d;
  for (const auto& bj : j["blocks"]) d.blocks.push_back(block_from_json(bj));
  d.semisimple = j.value("semisimple", false);
  if (j.contains("signature")) {
    d.signature = {j["signature"][0].get<int>(), j["signature"][1].get<int>()};
  }
  if (j.contains("residual") && !j["residual"].is_null()) {
    d.residual = j["residual"].get<double>();
  }
  if (j.contains("transform") && !j["transform"].is_null()) {
    d.transform = matrix_from_json(j["transform"], "decomposition transform");
  }
  return d;
}

json to_json(const AxiomVerdict& v) {
  json out{{"axiom", v.axiom},
           {"status", status_tag(v.status)},
           {"note", v.note}};
  if (v.witness) {
    json per_block = json::array();
    for (const auto& wb : v.witness->per_block) {
      per_block.push_back(json{{"block", to_json(wb.block)},
                               {"alpha", wb.alpha},
                               {"c_formula", wb.c_formula}});
    }
    out["witness"] = json{{"field", matrix_to_json(v.witness->X.L)},
                          {"c_lower", v.witness->c_lower},
                          {"per_block", std::move(per_block)}};
  } else {
    out["witness"] = nullptr;
  }
  if (v.h4) {
    out["h4"] = json{{"eps", v.h4->eps},
                     {"min_eig", v.h4->min_eig},
                     {"bbar", matrix_to_json(v.h4->bbar)}};
  } else {
    out["h4"] = nullptr;
  }
  return out;
}

json to_json(const TentacularReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  return json{{"decomposition", to_json(r.decomposition)},
              {"verdicts", std::move(verdicts)},
              {"overall", overall_tag(r.overall)}};
}

json to_json(const ClosedCharacteristic& orbit) {
  json out{{"plane", matrix_to_json(orbit.plane)},
           {"mu", orbit.mu},
           {"k", orbit.k},
           {"eta", orbit.eta},
           {"x0", vector_to_json(orbit.x0)},
           {"action", orbit.action}};
  out["cz_transverse"] =
      orbit.cz_transverse ? json(orbit.cz_transverse->value()) : json(nullptr);
  return out;
}

json to_json(const LoopState& u) {
  return json{{"N", u.N}, {"eta", u.eta}, {"v", matrix_to_json(u.v)}};
}

LoopState loopstate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("N") || !j.contains("eta") ||
      !j.contains("v")) {
    throw ValidationError("loop: expected {N, eta, v}");
  }
  if (!j["N"].is_number_integer()) {
    throw ValidationError("loop: N must be an integer");
  }
  if (!j["eta"].is_number()) {
    throw ValidationError("loop: eta must be a number");
  }
  const Mat v = matrix_from_json(j["v"], "loop v");
  return LoopState(j["N"].get<int>(), j["eta"].get<double>(), v);
}

json to_json(const FlowDiagnostics& d) {
  json out{{"s_grid", d.s_grid},
           {"action_series", d.action_series},
           {"grad_norm_series", d.grad_norm_series},
           {"energy", d.energy},
           {"converged", d.converged},
           {"escaped", d.escaped}};
  out["limit"] = d.limit ? to_json(*d.limit) : json(nullptr);
  return out;
}

namespace {

void dump_value(const json& j, int indent, std::string& out) {
  const std::string pad(2 * indent, ' ');
  const std::string pad_in(2 * (indent + 1), ' ');
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      return;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      out += j.dump();
      return;
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out += buf;
      return;
    }
    case json::value_t::string:
      out += j.dump();  // library handles escaping
      return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_value(j[i], indent + 1, out);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in + json(it.key()).dump() + ": ";
        dump_value(it.value(), indent + 1, out);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::string out;
  dump_value(j, 0, out);
  out += "\n";
  return out;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ValidationError("snapshot: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw ValidationError("snapshot: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

void write_snapshot(std::ostream& os, const LoopState& u) {
  os.write("RFLO", 4);
  write_u32(os, 1);
  write_u32(os, static_cast<std::uint32_t>(u.N));
  write_u32(os, static_cast<std::uint32_t>(u.dim()));
  write_f64(os, u.eta);
  for (int i = 0; i < u.N; ++i) {
    for (int j = 0; j < u.dim(); ++j) write_f64(os, u.v(i, j));
  }
}

LoopState read_snapshot(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "RFLO", 4) != 0) {
    throw ValidationError("snapshot: bad magic");
  }
  const std::uint32_t version = read_u32(is);
  if (version != 1) {
    throw ValidationError("snapshot: unsupported version " +
                          std::to_string(version));
  }
  const std::uint32_t N = read_u32(is);
  const std::uint32_t dim = read_u32(is);
  if (N > (1u << 20) || dim > 4096u) {
    throw ValidationError("snapshot: implausible size header");
  }
  const double eta = read_f64(is);
  Mat v(N, dim);
  for (std::uint32_t i = 0; i < N; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) v(i, j) = read_f64(is);
  }
  return LoopState(static_cast<int>(N), eta, v);
}

}  // namespace tentacle
