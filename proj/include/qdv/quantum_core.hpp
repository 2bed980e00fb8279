#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qdv/random_stream.hpp"

namespace qdv {

using Amplitude = std::complex<double>;

inline constexpr double kAmplitudeTolerance = 1e-12;
inline constexpr std::size_t kMaxQubits = 20;

enum class Outcome { Zero = 0, One = 1 };

/// |0><0| or |1><1| acting on one qubit of a joint state.
struct Projector {
  Outcome which;
  std::size_t qubit;

  static Projector p0(std::size_t qubit) { return {Outcome::Zero, qubit}; }
  static Projector p1(std::size_t qubit) { return {Outcome::One, qubit}; }
};

struct SampleResult;

/// State vector over the computational basis of n qubits.
///
/// Index i holds the amplitude of the basis string formed by the binary digits
/// of i, with qubit 0 as the most significant bit, so for two qubits the order
/// is |00>, |01>, |10>, |11>. Values are immutable; every operation returns a
/// new state. States produced by a projection keep their reduced norm.
class JointState {
 public:
  /// Validates length, finiteness and unit norm.
  static JointState from_amplitudes(std::size_t num_qubits, std::vector<Amplitude> amplitudes);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
  const Amplitude& operator[](std::size_t i) const { return amplitudes_.at(i); }

  double squared_norm() const noexcept;

  /// Bit held by `qubit` in basis index `index`.
  int bit_of(std::size_t index, std::size_t qubit) const noexcept {
    return static_cast<int>((index >> (num_qubits_ - 1 - qubit)) & 1U);
  }

 private:
  JointState(std::size_t num_qubits, std::vector<Amplitude> amplitudes)
      : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

  friend JointState tensor(const JointState&, const JointState&);
  friend JointState apply_projector(const JointState&, const Projector&);
  friend SampleResult measure_sample(const JointState&, std::size_t, RandomStream&);

  std::size_t num_qubits_;
  std::vector<Amplitude> amplitudes_;
};

/// Basis state from a string of '0'/'1' characters, qubit 0 first.
JointState basis_state(std::size_t num_qubits, std::string_view bits);

/// Kronecker product; a's qubits come first.
JointState tensor(const JointState& a, const JointState& b);

/// (|00> + |11>) / sqrt(2).
JointState bell_pair();

/// Zeroes every amplitude whose bit at p.qubit disagrees with p.which.
/// The result is not renormalized.
JointState apply_projector(const JointState& s, const Projector& p);

/// <s|P|s> on s as given, without renormalizing.
double expectation(const JointState& s, const Projector& p);

struct SampleResult {
  int bit;
  JointState collapsed;
};

/// Single-shot Born-rule measurement of one qubit. Consumes one value of
/// `stream`; the collapsed state is renormalized.
SampleResult measure_sample(const JointState& s, std::size_t qubit, RandomStream& stream);

}  // namespace qdv
