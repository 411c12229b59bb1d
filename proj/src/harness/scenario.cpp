#include "qflow/harness/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qflow/serialize.hpp"

namespace qflow::harness {

namespace {

Vector vector_from_json(const nlohmann::json& j, Eigen::Index size, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    std::ostringstream os;
    os << "scenario: " << what << " must be an array of " << size << " numbers";
    throw InputError(os.str());
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  if (!v.allFinite()) throw InputError("scenario: " + what + " has non-finite entries");
  return v;
}

Bound bound_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) {
    throw InputError("scenario: threshold '" + name + "' must be [lower, upper] (null = open)");
  }
  Bound b;
  if (!j[0].is_null()) b.lower = j[0].get<double>();
  if (!j[1].is_null()) b.upper = j[1].get<double>();
  if (b.lower > b.upper) throw InputError("scenario: threshold '" + name + "' is empty");
  return b;
}

Offset offset_from_json(const nlohmann::json& j, const SymplecticMatrix<double>& a) {
  const Eigen::Index n = a.matrix().rows();
  Offset o;
  o.tag = j.at("tag").get<std::string>();
  const bool has_u = j.contains("u"), has_w = j.contains("w");
  if (o.tag == "origin") {
    o.u = Vector::Zero(n);
    o.w = Vector::Zero(n);
  } else if (o.tag == "normal" && has_w && !has_u) {
    // (-A^t x, x) spans the normal space of graph(A).
    o.w = vector_from_json(j.at("w"), n, "offset.w");
    o.u = -a.matrix().transpose() * o.w;
  } else if (o.tag == "graph" && has_u && !has_w) {
    o.u = vector_from_json(j.at("u"), n, "offset.u");
    o.w = a.matrix() * o.u;
  } else {
    if (!has_u || !has_w) throw InputError("scenario: offset '" + o.tag + "' needs u and w");
    o.u = vector_from_json(j.at("u"), n, "offset.u");
    o.w = vector_from_json(j.at("w"), n, "offset.w");
  }
  if (j.contains("norm")) {
    const double target = j.at("norm").get<double>();
    const double current = std::sqrt(o.u.squaredNorm() + o.w.squaredNorm());
    if (!(current > 0)) throw InputError("scenario: cannot rescale a zero offset");
    o.u *= target / current;
    o.w *= target / current;
  }
  const GraphSplitting<double> g = graph_splitting(a);
  const Vector z = stack_pair(o.u, o.w);
  const double scale = std::max(1.0, z.norm());
  if (o.tag == "normal" && (g.tangent_part(z)).norm() > 1e-9 * scale) {
    throw InputError("scenario: offset tagged 'normal' is not orthogonal to graph(A)");
  }
  if (o.tag == "graph" && (g.normal_part(z)).norm() > 1e-9 * scale) {
    throw InputError("scenario: offset tagged 'graph' does not lie on graph(A)");
  }
  if (o.tag != "origin" && o.tag != "normal" && o.tag != "graph" && o.tag != "generic") {
    throw InputError("scenario: unknown offset tag '" + o.tag + "'");
  }
  return o;
}

}  // namespace

std::string to_string(RhoMode mode) {
  switch (mode) {
    case RhoMode::One: return "one";
    case RhoMode::Unitarized: return "unitarized";
    case RhoMode::Corrected: return "corrected";
  }
  return "one";
}

RhoMode rho_mode_from_string(const std::string& s) {
  if (s == "one") return RhoMode::One;
  if (s == "unitarized") return RhoMode::Unitarized;
  if (s == "corrected") return RhoMode::Corrected;
  throw InputError("scenario: rho_mode must be one of one, unitarized, corrected (got '" + s + "')");
}

QuadraticFlow Scenario::flow() const {
  return flow_from_hamiltonian(hamiltonian, tau, energy_offset);
}

SymbolProfile Scenario::symbol(std::complex<double> rho0) const {
  SymbolProfile s;
  s.rho0 = rho0;
  s.phase_gradient = phase_gradient;
  s.direction = direction;
  return s;
}

std::map<std::string, Bound> Scenario::thresholds_for(const std::string& suite) const {
  const auto it = thresholds.find(suite);
  return it == thresholds.end() ? std::map<std::string, Bound>{} : it->second;
}

Scenario parse_scenario(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kScenarioSchema) {
    throw InputError(std::string("scenario: expected schema ") + kScenarioSchema);
  }
  Scenario sc;
  sc.id = j.at("id").get<std::string>();
  sc.d = j.value("d", 1);
  if (sc.d < 1) throw InputError("scenario: d must be >= 1");
  sc.hamiltonian = matrix_from_json(j.at("hamiltonian"));
  if (sc.hamiltonian.rows() != 2 * sc.d || sc.hamiltonian.cols() != 2 * sc.d) {
    throw DimensionMismatch("scenario: hamiltonian must be 2d x 2d");
  }
  sc.tau = j.value("tau", 0.0);
  sc.energy_offset = j.value("energy_offset", 0.0);
  sc.rho_mode = rho_mode_from_string(j.value("rho_mode", std::string("one")));
  sc.direction = Vector::Zero(2 * sc.d);
  sc.direction(0) = 1.0;
  if (j.contains("symbol")) {
    const auto& s = j.at("symbol");
    sc.phase_gradient = s.value("phase_gradient", 0.0);
    if (s.contains("direction")) {
      sc.direction = vector_from_json(s.at("direction"), 2 * sc.d, "symbol.direction");
      const double n = sc.direction.norm();
      if (!(n > 0)) throw InputError("scenario: symbol.direction must be non-zero");
      sc.direction /= n;
    }
  }
  sc.k_list = j.at("k_list").get<std::vector<int>>();
  if (sc.k_list.empty()) throw InputError("scenario: k_list is empty");
  for (std::size_t i = 0; i < sc.k_list.size(); ++i) {
    if (sc.k_list[i] < 1) throw InputError("scenario: k_list entries must be positive");
    if (i > 0 && sc.k_list[i] <= sc.k_list[i - 1]) {
      throw InputError("scenario: k_list must be strictly ascending");
    }
  }
  const QuadraticFlow flow = sc.flow();
  std::set<std::string> tags;
  const nlohmann::json offsets = j.value("offsets", nlohmann::json::array());
  for (const auto& o : offsets) {
    sc.offsets.push_back(offset_from_json(o, flow.differential));
    if (!tags.insert(sc.offsets.back().tag).second) {
      throw InputError("scenario: duplicate offset tag '" + sc.offsets.back().tag + "'");
    }
  }
  if (j.contains("truncation")) {
    sc.truncation.multiplier = j.at("truncation").value("multiplier", sc.truncation.multiplier);
    sc.truncation.minimum = j.at("truncation").value("minimum", sc.truncation.minimum);
  }
  sc.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("trace")) sc.trace_radius = j.at("trace").value("radius", sc.trace_radius);
  if (j.contains("decay")) {
    sc.decay_offset = vector_from_json(j.at("decay").at("offset"), 2 * sc.d, "decay.offset");
  }
  const nlohmann::json thresholds = j.value("thresholds", nlohmann::json::object());
  for (const auto& [suite, bounds] : thresholds.items()) {
    if (!bounds.is_object()) throw InputError("scenario: thresholds." + suite + " must be an object");
    auto& slot = sc.thresholds[suite];
    for (const auto& [name, value] : bounds.items()) slot[name] = bound_from_json(value, name);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("scenario: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario: " + path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario: " + path.string() + ": " + e.what());
  }
}

}  // namespace qflow::harness
