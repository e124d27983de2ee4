#include "cvd/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cvd {

std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::Fourier: return "F";
    case GateKind::X1: return "X1";
    case GateKind::X2: return "X2";
    case GateKind::X3: return "X3";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& s) {
  if (s == "F" || s == "FOURIER") return GateKind::Fourier;
  if (s == "X1") return GateKind::X1;
  if (s == "X2") return GateKind::X2;
  if (s == "X3") return GateKind::X3;
  if (s == "CZ") return GateKind::CZ;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

int GateSequence::fourier_count() const {
  return static_cast<int>(std::count_if(gates.begin(), gates.end(),
                                        [](const Gate& g) { return g.kind == GateKind::Fourier; }));
}

int GateSequence::elementary_count() const { return static_cast<int>(gates.size()) - fourier_count(); }

void GateSequence::fourier(int mode, int times) {
  times = ((times % 4) + 4) % 4;
  for (int i = 0; i < times; ++i) gates.push_back({GateKind::Fourier, mode, -1, 0.0});
}

void GateSequence::x_gate(int power, int mode, double s) {
  if (power < 1 || power > 3) throw std::invalid_argument("x_gate: power must be 1, 2 or 3");
  if (s == 0.0) return;
  gates.push_back({static_cast<GateKind>(power), mode, -1, s});
}

void GateSequence::p_gate(int power, int mode, double s) {
  if (s == 0.0) return;
  fourier(mode, 3);
  x_gate(power, mode, s);
  fourier(mode, 1);
}

void GateSequence::cz(int a, int b, double s) {
  if (a == b) throw std::invalid_argument("cz: modes must differ");
  if (s == 0.0) return;
  gates.push_back({GateKind::CZ, std::min(a, b), std::max(a, b), s});
}

void GateSequence::append(const GateSequence& o) {
  gates.insert(gates.end(), o.gates.begin(), o.gates.end());
  global_phase += o.global_phase;
  n_modes = std::max(n_modes, o.n_modes);
}

std::string GateSequence::to_json() const {
  nlohmann::json j;
  j["n_modes"] = n_modes;
  j["global_phase"] = global_phase;
  nlohmann::json g = nlohmann::json::array();
  for (const auto& x : gates) {
    nlohmann::json row;
    row["kind"] = to_string(x.kind);
    row["modes"] = x.mode2 >= 0 ? nlohmann::json{x.mode, x.mode2} : nlohmann::json{x.mode};
    if (x.kind != GateKind::Fourier) row["strength"] = x.strength;
    g.push_back(row);
  }
  j["gates"] = g;
  return j.dump(2);
}

std::string GateSequence::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind,mode,mode2,strength\n";
  for (const auto& x : gates) os << to_string(x.kind) << ',' << x.mode << ',' << x.mode2 << ',' << x.strength << '\n';
  os << "PHASE,,," << global_phase << '\n';
  return os.str();
}

GateSequence gate_sequence_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    GateSequence s;
    s.n_modes = j.value("n_modes", 1);
    s.global_phase = j.value("global_phase", 0.0);
    for (const auto& row : j.at("gates")) {
      Gate g;
      g.kind = gate_kind_from_string(row.at("kind").get<std::string>());
      const auto& modes = row.at("modes");
      g.mode = modes.at(0).get<int>();
      if (g.kind == GateKind::CZ) g.mode2 = modes.at(1).get<int>();
      g.strength = row.value("strength", 0.0);
      if (std::max(g.mode, g.mode2) >= s.n_modes) s.n_modes = std::max(g.mode, g.mode2) + 1;
      s.gates.push_back(g);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("gate sequence json: ") + e.what());
  }
}

GateSequence inverse(const GateSequence& s) {
  GateSequence out;
  out.n_modes = s.n_modes;
  out.global_phase = -s.global_phase;
  for (auto it = s.gates.rbegin(); it != s.gates.rend(); ++it) {
    if (it->kind == GateKind::Fourier) {
      out.fourier(it->mode, 3);
    } else {
      Gate g = *it;
      g.strength = -g.strength;
      out.gates.push_back(g);
    }
  }
  return out;
}

namespace {

bool odd(GateKind k) { return k == GateKind::X1 || k == GateKind::X3; }

// One normalization pass; returns true if anything changed.
bool normalize_pass(GateSequence& s) {
  const int n = s.n_modes;
  std::vector<int> parity(n, 0);
  std::vector<int> run(n, 0);  // pending consecutive F count per mode
  GateSequence out;
  out.n_modes = n;
  out.global_phase = s.global_phase;
  const double quarter = std::numbers::pi / 2;
  auto flush = [&](int m) {
    int q = run[m];
    run[m] = 0;
    if (q == 0) return;
    if (q % 2) out.fourier(m, 1);
    int pairs = q / 2;
    out.global_phase += quarter * pairs;
    parity[m] = (parity[m] + pairs) % 2;
  };
  for (const auto& g : s.gates) {
    if (g.kind == GateKind::Fourier) {
      ++run[g.mode];
      continue;
    }
    for (int m = 0; m < n; ++m)
      if (g.touches(m)) flush(m);
    Gate h = g;
    if (g.kind == GateKind::CZ) {
      if (parity[g.mode] != parity[g.mode2]) h.strength = -h.strength;
    } else if (odd(g.kind) && parity[g.mode]) {
      h.strength = -h.strength;
    }
    out.gates.push_back(h);
  }
  for (int m = 0; m < n; ++m) {
    flush(m);
    if (parity[m]) {
      out.fourier(m, 2);
      out.global_phase -= quarter;
    }
  }
  // merge neighbours acting on the same mode(s) with the same kind
  GateSequence merged;
  merged.n_modes = n;
  merged.global_phase = out.global_phase;
  for (const auto& g : out.gates) {
    if (g.kind != GateKind::Fourier && !merged.gates.empty()) {
      Gate& b = merged.gates.back();
      if (b.kind == g.kind && b.mode == g.mode && b.mode2 == g.mode2) {
        b.strength += g.strength;
        if (std::abs(b.strength) < 1e-15) merged.gates.pop_back();
        continue;
      }
    }
    merged.gates.push_back(g);
  }
  merged.global_phase = std::remainder(merged.global_phase, 2 * std::numbers::pi);
  bool changed = !(merged.gates == s.gates);
  s = std::move(merged);
  return changed;
}

}  // namespace

GateSequence cancel_fourier(const GateSequence& s) {
  GateSequence out = s;
  for (const auto& g : s.gates)
    if (std::max(g.mode, g.mode2) >= out.n_modes) out.n_modes = std::max(g.mode, g.mode2) + 1;
  while (normalize_pass(out)) {
  }
  return out;
}

}  // namespace cvd
