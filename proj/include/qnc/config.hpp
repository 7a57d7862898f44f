#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "qnc/network.hpp"

namespace qnc {

inline constexpr const char* kToolVersion = "0.1.0";

// Reports keep key order as written, so reruns are byte-identical.
using Json = nlohmann::ordered_json;

// FNV-1a over the raw config bytes; reports embed the hex form.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// `j.at(key)` with a ConfigError instead of a json exception.
const Json& config_field(const Json& j, const char* key);

// {"p": int, "degree": int (optional, default 1)}
Json field_to_json(const FieldRef& spec);
FieldRef field_from_json(const Json& j);

// Row-major integer matrices; entries are the little-endian base-p packing
// of field elements.
Json matrix_to_json(const FqMatrix& m);
FqMatrix matrix_from_json(const Json& j, const FieldRef& spec);

// {"re": [[..]], "im": [[..]]}
Json dense_to_json(const DenseOperator& u);
DenseOperator dense_from_json(const Json& j);

// {"kind": "layered", "m0": int, "layers": [{"basis_linear"|"symplectic"|"dense": ...}]}
Json network_to_json(const LayeredNetwork& net);

struct NetworkConfig {
  FieldRef spec;
  LayeredNetwork net;
  bool was_dag = false;
  std::vector<int> schedule;  // corrupted edge per interval when was_dag
};

// Accepts a layered description or a DAG ({"kind": "dag", "sender",
// "receiver", "nodes", "edges", "corrupted"}), reorganizing the latter.
NetworkConfig network_from_json(const Json& j);

}  // namespace qnc
