#pragma once

// Graph (cluster) states, the Z-removal and XX-contraction rewrite rules, and
// adaptive one-way measurement patterns on the five-photon state.

#include "losskit/codes.hpp"
#include "losskit/noise.hpp"
#include "losskit/random.hpp"
#include "losskit/state.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace losskit {

// Undirected simple graph on integer labels.
class Graph {
 public:
  Graph() = default;
  Graph(std::set<int> vertices, const std::vector<std::pair<int, int>>& edges);

  // Path through `labels` in the given order.
  static Graph line(const std::vector<int>& labels);
  // Path 1-2-...-k.
  static Graph line(int k);
  static Graph star(int center, const std::vector<int>& leaves);

  const std::set<int>& vertices() const { return vertices_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t size() const { return vertices_.size(); }
  bool has_vertex(int v) const { return vertices_.count(v) > 0; }
  bool has_edge(int a, int b) const;
  std::vector<int> neighbors(int v) const;
  std::size_t degree(int v) const { return neighbors(v).size(); }
  // Position of `v` in ascending label order, which is its qubit index.
  std::size_t position(int v) const;

  void add_vertex(int v);
  void add_edge(int a, int b);
  void toggle_edge(int a, int b);
  void remove_vertex(int v);

  bool operator==(const Graph& other) const = default;

 private:
  void require(int v) const;

  std::set<int> vertices_;
  std::set<std::pair<int, int>> edges_;  // stored as (min, max)
};

// |+>^n followed by CZ on every edge; qubits in ascending label order.
StateVector graph_cluster_state(const Graph& g);
// X_v prod_{w~v} Z_w on the qubits of `g`.
PauliString vertex_stabilizer(const Graph& g, int v);

// Five-photon state, photons 1..5 on qubits 0..4:
// amplitude 1/2 on 00000, 01111, 10011, 11100.
StateVector phi5();
// phi5 = (H on photons 1, 3, 5) applied to the cluster of this graph: the
// path 3-2-1-4-5.
Graph phi5_graph();

// Z measurement: the vertex and its bonds disappear.
Graph graph_z_remove(const Graph& g, int v);
// Outcome s leaves Z^s on every neighbour of v.
std::vector<int> z_removal_byproduct(const Graph& g, int v, int s);

// Two adjacent X measurements on a linear segment u-v: both vertices go and
// their outer neighbours a (of u) and b (of v) get the bond a-b toggled.
// Requires u~v, deg(u), deg(v) <= 2 and a != b.
Graph graph_xx_contract(const Graph& g, int u, int v);
// Outcomes s_u, s_v leave Z_a^{s_v} Z_b^{s_u}. Labels of the Z byproducts.
std::vector<int> xx_contraction_byproduct(const Graph& g, int u, int v, int s_u, int s_v);

struct IndirectResult {
  int inferred;  // Z outcome attributed to the lost qubit
  int helper_outcome;
  DensityMatrix collapsed;  // lost and helper removed, others keep order
  double probability;
};

// Infers the Z value of a lost qubit from a helper whose local operator
// `helper_basis` is perfectly correlated with Z on the lost qubit:
// <sigma_helper Z_lost> = 1. The lost qubit is traced out, the helper is
// measured, and the inferred value equals the helper outcome. With strict
// set, throws std::invalid_argument when the correlation is below 1 - 1e-9.
IndirectResult indirect_z(const DensityMatrix& rho, std::size_t lost, std::size_t helper, OutcomeSource& source,
                          const MeasurementBasis& helper_basis = MeasurementBasis::x(), bool strict = true);

// Pauli `letter` raised to the XOR of the outcomes of `steps`.
struct PauliFeedforward {
  int qubit;
  char letter;  // 'X' or 'Z'
  std::vector<std::size_t> steps;
};

struct PatternStep {
  int qubit;
  MeasurementBasis basis;
  // For an equatorial basis the angle becomes -alpha when the XOR of these outcomes is 1.
  std::vector<std::size_t> flip_angle_on;
  // Corrections applied before this measurement, in order.
  std::vector<PauliFeedforward> before;
};

struct MeasurementPattern {
  std::vector<PatternStep> steps;
  int output = 0;
  // Applied to the output qubit after all steps, in order.
  std::vector<PauliFeedforward> output_frame;

  // Throws std::invalid_argument describing the first violation.
  void validate(const std::vector<int>& labels) const;
};

struct OneWayResult {
  std::vector<int> outcomes;  // one per step
  DensityMatrix output;       // single qubit
  std::optional<StateVector> target;
  std::optional<double> fidelity;
  double probability = 1.0;

  std::string branch_label() const;
};

// `labels[i]` names qubit i of `rho`. Qubits that are neither measured nor the
// output are traced out at the end.
OneWayResult run_pattern(const DensityMatrix& rho, const std::vector<int>& labels, const MeasurementPattern& pattern,
                         OutcomeSource& source, const std::optional<StateVector>& target = std::nullopt);

// (|0> + e^{-i alpha}|1>)/sqrt2 = Rz(-alpha)|+> up to phase; alpha = 0, -pi/2,
// -pi/3 give |+>, |R>, |S>.
StateVector rotation_target(double alpha);

// Completing pattern on phi5 after losing photon 2 or photon 4. For photon 2:
// photon 3 in Z (removes the damaged site), photon 5 in X, X^{s0} Z^{s1} then
// B(alpha) on photon 4, output photon 1 with frame Z^{s2}. Photon 4 mirrors
// this with 5, 3 and 2.
MeasurementPattern loss_tolerant_pattern(int lost_photon, double alpha);

// phi5 under `noise`, erase `lost_photon`, run its completing pattern.
OneWayResult loss_tolerant_rotation(int lost_photon, double alpha, const NoiseSpec& noise, OutcomeSource& source,
                                    const ChannelPlacement& placement = {});

// Every nonzero-probability branch of loss_tolerant_rotation, lexicographic.
std::vector<OneWayResult> loss_tolerant_branches(int lost_photon, double alpha, const NoiseSpec& noise,
                                                 const ChannelPlacement& placement = {});

}  // namespace losskit
