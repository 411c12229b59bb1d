#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflow/fock.hpp"

namespace qflow::harness {

inline constexpr const char* kScenarioSchema = "qflow.scenario/1";

/// A pair of rescaled offsets. Tags: "origin", "normal" (validated to lie in
/// the normal space of graph(A)), "graph" (w = A u), "generic".
struct Offset {
  std::string tag;
  Vector u, w;
};

enum class RhoMode { One, Unitarized, Corrected };

std::string to_string(RhoMode mode);
RhoMode rho_mode_from_string(const std::string& s);

/// [lower, upper] bounds on a named quantity produced by a suite.
struct Bound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct Scenario {
  std::string id;
  int d = 1;
  Matrix hamiltonian;
  double tau = 0;
  double energy_offset = 0;
  RhoMode rho_mode = RhoMode::One;
  double phase_gradient = 0;
  Vector direction;  // unit, R^{2d}
  std::vector<int> k_list;
  std::vector<Offset> offsets;
  TruncationRule truncation;
  std::uint64_t seed = 0;
  double trace_radius = 0.35;
  Vector decay_offset;  // unscaled offset of y from the flow image of the base point
  // suite name -> quantity name -> bound
  std::map<std::string, std::map<std::string, Bound>> thresholds;

  QuadraticFlow flow() const;
  SymbolProfile symbol(std::complex<double> rho0 = 1.0) const;
  /// Bounds declared for `suite`; empty when the scenario declares none.
  std::map<std::string, Bound> thresholds_for(const std::string& suite) const;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace qflow::harness
