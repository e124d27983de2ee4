#pragma once

#include <string>
#include <vector>

namespace cvd {

enum class GateKind { Fourier, X1, X2, X3, CZ };

std::string to_string(GateKind k);
GateKind gate_kind_from_string(const std::string& s);

/// Elementary gate e^{i s X^j} (X1..X3), e^{2 i s X_a X_b} (CZ) or the fixed
/// quarter-turn rotation F = e^{i pi/2 (n + 1/2)} (no strength).
struct Gate {
  GateKind kind = GateKind::Fourier;
  int mode = 0;
  int mode2 = -1;  // CZ only
  double strength = 0.0;

  bool touches(int m) const { return mode == m || mode2 == m; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Gates in application (time) order; the unitary is
/// e^{i global_phase} * G_n * ... * G_2 * G_1.
struct GateSequence {
  std::vector<Gate> gates;
  double global_phase = 0.0;
  int n_modes = 1;

  std::size_t size() const { return gates.size(); }
  int fourier_count() const;
  int elementary_count() const;  // everything except Fourier

  void fourier(int mode, int times = 1);
  void x_gate(int power, int mode, double s);
  /// e^{i s P^j} as F X^j F^{-1}: time order F^3, X^j, F.
  void p_gate(int power, int mode, double s);
  void cz(int a, int b, double s);
  void append(const GateSequence& o);

  std::string to_json() const;
  std::string to_csv() const;
};

GateSequence gate_sequence_from_json(const std::string& text);

/// Inverse sequence: reversed order, negated strengths, F -> F^3, negated phase.
GateSequence inverse(const GateSequence& s);

/// Pushes every F^2 (= i * parity) to the end of the sequence, flipping the
/// signs of odd-power gates it passes, removes F^4 and merges neighbouring
/// gates of the same kind. The unitary is unchanged.
GateSequence cancel_fourier(const GateSequence& s);

}  // namespace cvd
