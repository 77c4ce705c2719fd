#include "losskit/error.hpp"
#include "losskit/noise.hpp"
#include "losskit/pauli.hpp"
#include "losskit/random.hpp"
#include "losskit/state.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace losskit;
using testutil::embed;
using testutil::kron;
using testutil::max_abs_diff;

namespace {

const double kS = 1.0 / std::numbers::sqrt2;

Eigen::MatrixXcd mat2(cplx a, cplx b, cplx c, cplx d) {
  Eigen::MatrixXcd m(2, 2);
  m << a, b, c, d;
  return m;
}

const Eigen::MatrixXcd P0 = mat2(1, 0, 0, 0);
const Eigen::MatrixXcd P1 = mat2(0, 0, 0, 1);
const Eigen::MatrixXcd Xm = mat2(0, 1, 1, 0);
const Eigen::MatrixXcd Zm = mat2(1, 0, 0, -1);

// Reference full-register unitary assembled from Kronecker products.
Eigen::MatrixXcd reference_unitary(const Gate& g, std::size_t n, const std::vector<std::size_t>& t) {
  switch (g.kind) {
    case GateKind::CNOT:
      return embed(P0, n, t[0]) + embed(P1, n, t[0]) * embed(Xm, n, t[1]);
    case GateKind::CZ:
      return embed(P0, n, t[0]) + embed(P1, n, t[0]) * embed(Zm, n, t[1]);
    case GateKind::Rz:
      return embed(mat2(std::exp(cplx(0, -g.angle / 2)), 0, 0, std::exp(cplx(0, g.angle / 2))), n, t[0]);
    case GateKind::H:
      return embed(mat2(kS, kS, kS, -kS), n, t[0]);
    case GateKind::X:
      return embed(Xm, n, t[0]);
    case GateKind::Y:
      return embed(mat2(0, cplx(0, -1), cplx(0, 1), 0), n, t[0]);
    case GateKind::Z:
      return embed(Zm, n, t[0]);
  }
  return {};
}

std::vector<Gate> all_gates() {
  return {Gate::h(), Gate::x(), Gate::y(), Gate::z(), Gate::rz(0.37), Gate::rz(-2.1), Gate::cnot(), Gate::cz()};
}

}  // namespace

TEST_CASE("state vector construction validates norm and length") {
  CHECK_THROWS_AS(StateVector(Eigen::VectorXcd::Ones(3).normalized()), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(Eigen::VectorXcd::Ones(4)), std::invalid_argument);
  CHECK(StateVector::from_bits("0110")[6] == cplx(1.0));
  CHECK(StateVector::plus(2)[3].real() == doctest::Approx(0.5));
}

TEST_CASE("gate examples") {
  const StateVector h0 = apply_gate(StateVector::basis(1, 0), Gate::h(), {0});
  CHECK(std::abs(h0[0] - kS) < 1e-12);
  CHECK(std::abs(h0[1] - kS) < 1e-12);

  const StateVector bell = apply_gate(apply_gate(StateVector::basis(2, 0), Gate::h(), {0}), Gate::cnot(), {0, 1});
  CHECK(std::abs(bell[0] - kS) < 1e-12);
  CHECK(std::abs(bell[3] - kS) < 1e-12);
  CHECK(std::abs(bell[1]) < 1e-12);

  // Rz(-pi/2)|+> is proportional to |0> - i|1>.
  const StateVector r = apply_gate(StateVector::plus(1), Gate::rz(-std::numbers::pi / 2), {0});
  Eigen::VectorXcd expected(2);
  expected << 1.0, cplx(0, -1);
  CHECK(testutil::overlap(r.amplitudes(), expected) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gates agree with Kronecker-product reference on random states") {
  Stream s(Seed{11}, 0);
  for (const Gate& g : all_gates()) {
    for (std::size_t trial = 0; trial < 6; ++trial) {
      const std::size_t n = 3;
      std::vector<std::size_t> t{trial % n};
      if (g.arity() == 2) t.push_back((trial + 1 + trial / 3) % n);
      const StateVector psi = testutil::random_state(n, s);
      const Eigen::VectorXcd expected = reference_unitary(g, n, t) * psi.amplitudes();
      CHECK(max_abs_diff(apply_gate(psi, g, t).amplitudes(), expected) < 1e-10);
    }
  }
}

TEST_CASE("gate preconditions") {
  const StateVector psi = StateVector::basis(2, 0);
  CHECK_THROWS_AS(apply_gate(psi, Gate::h(), {2}), std::out_of_range);
  CHECK_THROWS_AS(apply_gate(psi, Gate::cnot(), {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(apply_gate(psi, Gate::cnot(), {0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_gate(psi, Gate::x(), {0, 1}), std::invalid_argument);
}

TEST_CASE("unitarity: G then G-dagger is the identity") {
  Stream s(Seed{12}, 0);
  for (const Gate& g : all_gates()) {
    const std::vector<std::size_t> t = g.arity() == 2 ? std::vector<std::size_t>{2, 0} : std::vector<std::size_t>{1};
    const StateVector psi = testutil::random_state(3, s);
    const StateVector back = apply_gate(apply_gate(psi, g, t), g.adjoint(), t);
    CHECK(max_abs_diff(back.amplitudes(), psi.amplitudes()) < 1e-10);
  }
}

TEST_CASE("purity consistency between vector and density evolution") {
  Stream s(Seed{13}, 0);
  const StateVector psi = testutil::random_state(4, s);
  StateVector v = psi;
  DensityMatrix rho(psi);
  const std::vector<std::pair<Gate, std::vector<std::size_t>>> circuit{
      {Gate::h(), {0}}, {Gate::cnot(), {0, 3}}, {Gate::rz(0.9), {2}}, {Gate::cz(), {1, 2}}, {Gate::y(), {3}}};
  for (const auto& [g, t] : circuit) {
    v = apply_gate(v, g, t);
    rho = apply_gate(rho, g, t);
  }
  CHECK(max_abs_diff(DensityMatrix(v).matrix(), rho.matrix()) < 1e-10);
}

TEST_CASE("HZH = X as matrices") {
  const Eigen::Matrix2cd h = Gate::h().matrix();
  CHECK(max_abs_diff(h * Gate::z().matrix() * h, Gate::x().matrix()) < 1e-12);
}

TEST_CASE("partial trace examples") {
  const DensityMatrix bell(StateVector::normalized((Eigen::VectorXcd(4) << 1, 0, 0, 1).finished()));
  CHECK(max_abs_diff(partial_trace(bell, {0}).matrix(), Eigen::MatrixXcd::Identity(2, 2) / 2.0) < 1e-12);

  const DensityMatrix prod(StateVector::from_bits("01"));
  CHECK(max_abs_diff(partial_trace(prod, {1}).matrix(), P0) < 1e-12);

  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(16);
  ghz(0) = ghz(15) = kS;
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  CHECK(max_abs_diff(partial_trace(DensityMatrix(StateVector(ghz)), {0, 1}).matrix(), expected) < 1e-12);

  CHECK_THROWS_AS(partial_trace(bell, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(bell, {2}), std::out_of_range);
}

TEST_CASE("partial trace of a product state returns the kept factor") {
  Stream s(Seed{14}, 0);
  const DensityMatrix a = testutil::random_density(1, 2, s);
  const DensityMatrix b = testutil::random_density(2, 3, s);
  const DensityMatrix c = testutil::random_density(1, 1, s);
  const DensityMatrix abc(kron(kron(a.matrix(), b.matrix()), c.matrix()));
  CHECK(max_abs_diff(partial_trace(abc, {0, 3}).matrix(), b.matrix()) < 1e-10);
  CHECK(max_abs_diff(partial_trace(abc, {1, 2}).matrix(), kron(a.matrix(), c.matrix())) < 1e-10);
}

TEST_CASE("measurement examples") {
  const DensityMatrix bell(StateVector::normalized((Eigen::VectorXcd(4) << 1, 0, 0, 1).finished()));
  const MeasureResult z0 = measure(bell, 0, MeasurementBasis::z(), 0);
  CHECK(z0.probability == doctest::Approx(0.5));
  CHECK(max_abs_diff(z0.collapsed.matrix(), P0) < 1e-12);

  Stream s(Seed{15}, 0);
  const StateVector psi = testutil::random_state(1, s);
  const MeasureResult x0 = measure(DensityMatrix(StateVector::plus(1).tensor(psi)), 0, MeasurementBasis::x(), 0);
  CHECK(x0.probability == doctest::Approx(1.0));
  CHECK(fidelity_pure(psi, x0.collapsed) == doctest::Approx(1.0));

  // |<-a|R>|^2 at a = -pi/2 with |-a> = (|0> - e^{ia}|1>)/sqrt2.
  const double a = -std::numbers::pi / 2;
  const cplx direct = (1.0 * kS * kS) + std::conj(-std::exp(cplx(0, a)) * kS) * (cplx(0, 1) * kS);
  CHECK(std::norm(direct) == doctest::Approx(1.0));
  const DensityMatrix r(StateVector::normalized((Eigen::VectorXcd(2) << 1, cplx(0, 1)).finished()));
  CHECK(measure(r, 0, MeasurementBasis::b(a), 1).probability == doctest::Approx(std::norm(direct)));
  CHECK_THROWS_AS(measure(r, 0, MeasurementBasis::b(a), 0), ZeroProbabilityOutcome);
}

TEST_CASE("measurement completeness reproduces the partial trace") {
  Stream s(Seed{16}, 0);
  const std::vector<MeasurementBasis> bases{MeasurementBasis::z(), MeasurementBasis::x(), MeasurementBasis::b(0.73),
                                            MeasurementBasis::b(-2.4)};
  for (const auto& basis : bases) {
    for (std::size_t q = 0; q < 3; ++q) {
      const DensityMatrix rho = testutil::random_density(3, 3, s);
      const MeasureResult m0 = measure(rho, q, basis, 0);
      const MeasureResult m1 = measure(rho, q, basis, 1);
      CHECK(m0.probability + m1.probability == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(outcome_zero_probability(rho, q, basis) == doctest::Approx(m0.probability).epsilon(1e-12));
      const Eigen::MatrixXcd mix = m0.probability * m0.collapsed.matrix() + m1.probability * m1.collapsed.matrix();
      CHECK(max_abs_diff(mix, partial_trace(rho, {q}).matrix()) < 1e-10);
      CHECK(m0.collapsed.is_valid());
    }
  }
}

TEST_CASE("expectation examples and matrix oracle") {
  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(16);
  ghz(0) = ghz(15) = kS;
  const DensityMatrix g(StateVector{ghz});
  CHECK(expectation(g, PauliString::parse("ZZZZ")) == doctest::Approx(1.0));
  CHECK(expectation(g, PauliString::parse("XXXX")) == doctest::Approx(1.0));
  const DensityMatrix bell(StateVector::normalized((Eigen::VectorXcd(4) << 1, 0, 0, 1).finished()));
  CHECK(std::abs(expectation(bell, PauliString::parse("ZI"))) < 1e-12);
  CHECK_THROWS_AS(expectation(bell, PauliString::parse("Z")), std::invalid_argument);

  Stream s(Seed{17}, 0);
  const DensityMatrix rho = testutil::random_density(3, 2, s);
  for (const char* p : {"XYZ", "-YYI", "IZX", "iXZY"}) {
    const PauliString ps = PauliString::parse(p);
    const cplx ref = (rho.matrix() * ps.matrix()).trace();
    CHECK(std::abs(trace_with(rho, ps) - ref) < 1e-12);
  }
  const StateVector psi = testutil::random_state(3, s);
  const PauliString xyz = PauliString::parse("XYZ");
  CHECK(expectation(psi, xyz) == doctest::Approx(expectation(DensityMatrix(psi), xyz)).epsilon(1e-12));
}

TEST_CASE("fidelity examples") {
  CHECK(fidelity_pure(StateVector::basis(1, 0), DensityMatrix(StateVector::basis(1, 0))) == doctest::Approx(1.0));
  Stream s(Seed{18}, 0);
  const StateVector psi = testutil::random_state(4, s);
  CHECK(fidelity_pure(psi, DensityMatrix::maximally_mixed(4)) == doctest::Approx(1.0 / 16));
  const Eigen::MatrixXcd mix = 0.5 * DensityMatrix(psi).matrix() + 0.5 * Eigen::MatrixXcd::Identity(16, 16) / 16.0;
  CHECK(fidelity_pure(psi, DensityMatrix(mix)) == doctest::Approx(0.53125).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity_pure(psi, DensityMatrix::maximally_mixed(3)), std::invalid_argument);
}

TEST_CASE("noise channel examples") {
  Stream s(Seed{19}, 0);
  const DensityMatrix rho = testutil::random_density(4, 3, s);
  CHECK(max_abs_diff(apply_channel(rho, NoiseSpec{}, {{{0, 1}}, {2}}).matrix(), rho.matrix()) < 1e-14);
  CHECK(max_abs_diff(apply_channel(rho, NoiseSpec{0.0, 0.0, 1.0}).matrix(),
                     DensityMatrix::maximally_mixed(4).matrix()) < 1e-14);

  // V|Phi+><Phi+| + (1-V)(|00><00| + |11><11|)/2 has <XX> = V.
  const DensityMatrix bell(StateVector::normalized((Eigen::VectorXcd(4) << 1, 0, 0, 1).finished()));
  const DensityMatrix vis = apply_channel(bell, NoiseSpec{1.0, 0.0, 0.92}, {{}, {0}});
  CHECK(expectation(vis, PauliString::parse("XX")) == doctest::Approx(0.92).epsilon(1e-12));
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(4, 4);
  diag(0, 0) = diag(3, 3) = 0.5;
  CHECK(max_abs_diff(vis.matrix(), 0.92 * bell.matrix() + 0.08 * diag) < 1e-12);

  CHECK_THROWS_AS(apply_channel(rho, NoiseSpec{1.2, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_channel(rho, NoiseSpec{1.0, -0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_channel(rho, NoiseSpec{1.0, 0.1, 1.0}, {{{0, 4}}, {}}), std::out_of_range);
}

TEST_CASE("pair dephasing matches the ZZ mixture oracle") {
  Stream s(Seed{20}, 0);
  const DensityMatrix rho = testutil::random_density(3, 2, s);
  const double d = 0.3;
  const Eigen::MatrixXcd zz = embed(Zm, 3, 0) * embed(Zm, 3, 2);
  const Eigen::MatrixXcd expected = (1 - d) * rho.matrix() + d * zz * rho.matrix() * zz;
  CHECK(max_abs_diff(apply_channel(rho, NoiseSpec{1.0, d, 1.0}, {{{0, 2}}, {}}).matrix(), expected) < 1e-12);
}

TEST_CASE("channel outputs are valid states") {
  Stream s(Seed{21}, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const NoiseSpec spec{s.uniform(), s.uniform(), s.uniform()};
    const DensityMatrix out = apply_channel(testutil::random_density(3, 2, s), spec, {{{0, 1}, {1, 2}}, {0, 2}});
    CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(out.min_eigenvalue() >= kEigenFloor);
  }
}

TEST_CASE("Pauli algebra") {
  Stream s(Seed{22}, 0);
  auto random_pauli = [&](std::size_t n) {
    std::vector<Pauli> letters(n);
    for (auto& l : letters) l = static_cast<Pauli>(static_cast<int>(s.uniform() * 4) % 4);
    return PauliString(letters, static_cast<int>(s.uniform() * 4) % 4);
  };
  for (int trial = 0; trial < 50; ++trial) {
    const PauliString a = random_pauli(3), b = random_pauli(3), c = random_pauli(3);
    CHECK((a * b) * c == a * (b * c));
    CHECK(max_abs_diff((a * b).matrix(), a.matrix() * b.matrix()) < 1e-12);
    const PauliString sq = a * a;
    CHECK(sq.weight() == 0);
    CHECK(std::abs(sq.phase() - a.phase() * a.phase()) < 1e-12);
    const bool commute = max_abs_diff(a.matrix() * b.matrix(), b.matrix() * a.matrix()) < 1e-12;
    CHECK(a.commutes_with(b) == commute);
  }
  CHECK(PauliString::parse("-iXZ").str() == "-iXZ");
  CHECK(PauliString::parse("XYZI").str() == "+XYZI");
  CHECK_THROWS_AS(PauliString::parse("XQ"), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::parse("X") * PauliString::parse("XX"), std::invalid_argument);
}

TEST_CASE("random streams are reproducible and index-separated") {
  Stream a(Seed{5}, 3), b(Seed{5}, 3), c(Seed{5}, 4);
  const double xa = a.uniform();
  CHECK(xa == b.uniform());
  CHECK(xa != c.uniform());
  CHECK(Stream(Seed{5}, 0).binomial(1000, 0.0) == 0);
  CHECK(Stream(Seed{5}, 0).binomial(1000, 1.0) == 1000);

  OutcomeSource forced = OutcomeSource::forced({1, 0});
  CHECK(forced.draw(0.9) == 1);
  CHECK(forced.draw(0.1) == 0);
  CHECK_THROWS_AS(forced.draw(0.5), std::invalid_argument);
  CHECK_THROWS_AS(OutcomeSource::forced({2}), std::invalid_argument);
}
