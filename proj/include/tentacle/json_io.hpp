#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tentacle/core.hpp"
#include "tentacle/dynamics.hpp"
#include "tentacle/floer.hpp"
#include "tentacle/hormander.hpp"
#include "tentacle/tentacular.hpp"

namespace tentacle {

using nlohmann::json;

// Matrices serialize as row-major nested arrays, vectors as flat arrays.
json matrix_to_json(const Mat& M);
Mat matrix_from_json(const json& j, const std::string& context);
json vector_to_json(const Vec& v);
Vec vector_from_json(const json& j, const std::string& context);

// Hamiltonian file schema: {"dim": 2n, "A": [[...]], "c": real}.
json to_json(const QuadraticHamiltonian& H);
QuadraticHamiltonian hamiltonian_from_json(const json& j);

json to_json(const HormanderBlock& b);
HormanderBlock block_from_json(const json& j);

// {"blocks": [...], "semisimple": bool, "signature": [k,l], "residual": x|null}
// (transform included when present).
json to_json(const Decomposition& d);
Decomposition decomposition_from_json(const json& j);

json to_json(const TentacularReport& r);
json to_json(const AxiomVerdict& v);

json to_json(const ClosedCharacteristic& orbit);

// {"N": int, "eta": real, "v": [[...]]}
json to_json(const LoopState& u);
LoopState loopstate_from_json(const json& j);

json to_json(const FlowDiagnostics& d);

/// Canonical serialization: keys in sorted order (nlohmann default), doubles
/// printed with 17 significant digits, two-space indentation, trailing
/// newline. Deterministic byte-for-byte for identical data.
std::string canonical_dump(const json& j);

/// Snapshot container: "RFLO", u32 version 1, u32 N, u32 dim, then
/// little-endian f64 payload, eta first, loop nodes row-major.
void write_snapshot(std::ostream& os, const LoopState& u);
LoopState read_snapshot(std::istream& is);

}  // namespace tentacle
