#include "qdv/quantum_core.hpp"

#include <cmath>
#include <string>

#include "qdv/errors.hpp"

namespace qdv {
namespace {

void check_qubit_count(std::size_t n) {
  if (n == 0 || n > kMaxQubits) {
    throw InputError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                     std::to_string(n));
  }
}

void check_index(const JointState& s, std::size_t qubit) {
  if (qubit >= s.num_qubits()) {
    throw InputError("qubit index " + std::to_string(qubit) + " out of range for " +
                     std::to_string(s.num_qubits()) + "-qubit state");
  }
}

}  // namespace

JointState JointState::from_amplitudes(std::size_t num_qubits, std::vector<Amplitude> amplitudes) {
  check_qubit_count(num_qubits);
  if (amplitudes.size() != (std::size_t{1} << num_qubits)) {
    throw InputError("expected " + std::to_string(std::size_t{1} << num_qubits) +
                     " amplitudes, got " + std::to_string(amplitudes.size()));
  }
  double norm = 0.0;
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InputError("non-finite amplitude");
    }
    norm += std::norm(a);
  }
  if (std::abs(norm - 1.0) > kAmplitudeTolerance) {
    throw InputError("state is not normalized (squared norm " + std::to_string(norm) + ")");
  }
  return JointState(num_qubits, std::move(amplitudes));
}

double JointState::squared_norm() const noexcept {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total;
}

JointState basis_state(std::size_t num_qubits, std::string_view bits) {
  check_qubit_count(num_qubits);
  if (bits.size() != num_qubits) {
    throw InputError("bit string '" + std::string(bits) + "' does not have " +
                     std::to_string(num_qubits) + " characters");
  }
  std::size_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("bit string may only contain '0' and '1'");
    index = (index << 1) | static_cast<std::size_t>(c - '0');
  }
  std::vector<Amplitude> amplitudes(std::size_t{1} << num_qubits);
  amplitudes[index] = 1.0;
  return JointState::from_amplitudes(num_qubits, std::move(amplitudes));
}

JointState tensor(const JointState& a, const JointState& b) {
  const std::size_t n = a.num_qubits() + b.num_qubits();
  check_qubit_count(n);
  std::vector<Amplitude> out;
  out.reserve(a.dimension() * b.dimension());
  for (const auto& x : a.amplitudes()) {
    for (const auto& y : b.amplitudes()) out.push_back(x * y);
  }
  return JointState(n, std::move(out));
}

JointState bell_pair() {
  const double h = 1.0 / std::sqrt(2.0);
  return JointState::from_amplitudes(2, {h, 0.0, 0.0, h});
}

JointState apply_projector(const JointState& s, const Projector& p) {
  check_index(s, p.qubit);
  const int keep = static_cast<int>(p.which);
  std::vector<Amplitude> out(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (s.bit_of(i, p.qubit) != keep) out[i] = 0.0;
  }
  return JointState(s.num_qubits(), std::move(out));
}

double expectation(const JointState& s, const Projector& p) {
  check_index(s, p.qubit);
  // P is diagonal, so <s|P|s> is the weight on the kept half of the basis.
  const int keep = static_cast<int>(p.which);
  double total = 0.0;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if (s.bit_of(i, p.qubit) == keep) total += std::norm(s.amplitudes()[i]);
  }
  return total;
}

SampleResult measure_sample(const JointState& s, std::size_t qubit, RandomStream& stream) {
  check_index(s, qubit);
  const double norm = s.squared_norm();
  if (!(norm > 0.0)) throw InvalidStateError("cannot measure a zero-norm state");
  const double p0 = expectation(s, Projector::p0(qubit)) / norm;
  const int bit = stream.next_unit() < p0 ? 0 : 1;
  JointState projected = apply_projector(s, {static_cast<Outcome>(bit), qubit});
  const double scale = 1.0 / std::sqrt(projected.squared_norm());
  for (auto& a : projected.amplitudes_) a *= scale;
  return {bit, std::move(projected)};
}

}  // namespace qdv
