#include "qnc/config.hpp"

#include <utility>

#include "qnc/errors.hpp"

namespace qnc {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

const Json& config_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing config field '") + key + "'");
  }
  return j.at(key);
}

Json field_to_json(const FieldRef& spec) {
  Json j;
  j["p"] = spec->p;
  if (spec->degree != 1) j["degree"] = spec->degree;
  return j;
}

FieldRef field_from_json(const Json& j) {
  const int p = config_field(j, "p").get<int>();
  const int degree = j.contains("degree") ? j.at("degree").get<int>() : 1;
  return make_field(p, degree);
}

Json matrix_to_json(const FqMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c).to_int());
    rows.push_back(std::move(row));
  }
  return rows;
}

FqMatrix matrix_from_json(const Json& j, const FieldRef& spec) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  FqMatrix m(spec, rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ConfigError("matrix rows have inconsistent lengths");
    }
    for (int c = 0; c < cols; ++c) {
      m.at(r, c) = FieldElement::from_int(spec, row.at(c).get<long long>());
    }
  }
  return m;
}

Json dense_to_json(const DenseOperator& u) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    Json rre = Json::array(), rim = Json::array();
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      rre.push_back(u(r, c).real());
      rim.push_back(u(r, c).imag());
    }
    re.push_back(std::move(rre));
    im.push_back(std::move(rim));
  }
  Json j;
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

DenseOperator dense_from_json(const Json& j) {
  const Json& re = config_field(j, "re");
  const Json& im = config_field(j, "im");
  if (!re.is_array() || re.empty() || im.size() != re.size()) {
    throw ConfigError("dense operator needs matching re and im parts");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(re.at(0).size());
  DenseOperator u(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(re.at(r).size()) != cols ||
        static_cast<Eigen::Index>(im.at(r).size()) != cols) {
      throw ConfigError("dense operator rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      u(r, c) = std::complex<double>(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
    }
  }
  return u;
}

Json network_to_json(const LayeredNetwork& net) {
  Json j;
  j["kind"] = "layered";
  j["m0"] = net.m0;
  Json layers = Json::array();
  for (const Layer& layer : net.layers) {
    Json l;
    const auto gbar = basis_linear_part(layer, net.m0);
    if (gbar) {
      l["basis_linear"] = matrix_to_json(*gbar);
    } else if (layer.symplectic) {
      l["symplectic"] = matrix_to_json(*layer.symplectic);
    } else {
      l["dense"] = dense_to_json(*layer.dense);
    }
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j;
}

namespace {

LayeredNetwork layered_from_json(const Json& j, const FieldRef& spec) {
  const int m0 = config_field(j, "m0").get<int>();
  std::vector<Layer> layers;
  for (const Json& l : config_field(j, "layers")) {
    if (l.contains("basis_linear")) {
      layers.push_back(basis_linear_layer(matrix_from_json(l.at("basis_linear"), spec)));
    } else if (l.contains("symplectic")) {
      layers.push_back(symplectic_layer(matrix_from_json(l.at("symplectic"), spec)));
    } else if (l.contains("dense")) {
      layers.push_back(dense_layer(dense_from_json(l.at("dense"))));
    } else {
      throw ConfigError("layer needs one of basis_linear, symplectic, dense");
    }
  }
  return make_layered(spec, m0, std::move(layers));
}

DagNetwork dag_from_json(const Json& j, const FieldRef& spec) {
  DagNetwork dag;
  dag.spec = spec;
  dag.sender = config_field(j, "sender").get<int>();
  dag.receiver = config_field(j, "receiver").get<int>();
  for (const Json& n : config_field(j, "nodes")) {
    DagNode node;
    if (n.contains("basis_linear")) node.basis_linear = matrix_from_json(n.at("basis_linear"), spec);
    if (n.contains("dense")) node.dense = dense_from_json(n.at("dense"));
    dag.nodes.push_back(std::move(node));
  }
  for (const Json& e : config_field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("edge must be a [from, to] pair");
    dag.edges.push_back(DagEdge{e.at(0).get<int>(), e.at(1).get<int>()});
  }
  for (const Json& c : config_field(j, "corrupted")) dag.corrupted.push_back(c.get<int>());
  return dag;
}

}  // namespace

NetworkConfig network_from_json(const Json& j) {
  FieldRef spec = field_from_json(config_field(j, "field"));
  const Json& net = config_field(j, "network");
  const std::string kind = config_field(net, "kind").get<std::string>();
  if (kind == "layered") {
    return NetworkConfig{spec, layered_from_json(net, spec), false, {}};
  }
  if (kind == "dag") {
    const DagNetwork dag = dag_from_json(net, spec);
    return NetworkConfig{spec, reorganize(dag), true, corruption_schedule(dag)};
  }
  throw ConfigError("network kind must be 'layered' or 'dag'");
}

}  // namespace qnc
