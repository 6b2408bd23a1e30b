#pragma once

#include <fstream>
#include <map>
#include <string>

#include "heatlab/bounds/chains.hpp"

namespace heatlab {

/// Calibrated generic-constant dials per estimate family (same C across all
/// experiments of a family).
struct DialSet {
  double C = 1.0;
  double Cp = 1.0;
};

class CalibrationFailure : public std::runtime_error {
 public:
  explicit CalibrationFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A measured norm that must stay below evaluate_chain(chain, inputs) once
/// the dial C is substituted. The scale hook exists for negative controls
/// (deliberately shrinking the bound must make calibration fail).
struct ComplianceCase {
  std::string chain;
  BoundInputs inputs;
  double measured = 0.0;
  const Envelopes* envelopes = nullptr;
  double bound_scale = 1.0;
};

inline bool compliant_at(const std::vector<ComplianceCase>& cases, double C, double Cp) {
  for (const auto& cs : cases) {
    BoundInputs in = cs.inputs;
    in.C = C;
    in.Cp = Cp;
    const double bound = cs.bound_scale * evaluate_chain(cs.chain, in, cs.envelopes);
    if (!(cs.measured <= bound)) return false;
  }
  return true;
}

/// Smallest dial C in [1, ceiling] (2% resolution, bisection in log C) that
/// makes every case compliant. Throws CalibrationFailure when even the
/// ceiling does not: a red flag for the estimate family, not a tunable.
inline double calibrate_dial(const std::vector<ComplianceCase>& cases, double Cp = 1.0,
                             double ceiling = 1e6, double resolution = 0.02) {
  if (cases.empty()) throw std::invalid_argument("calibrate_dial: no cases");
  if (compliant_at(cases, 1.0, Cp)) return 1.0;
  if (!compliant_at(cases, ceiling, Cp))
    throw CalibrationFailure("calibrate_dial: no compliant C below ceiling " +
                             std::to_string(ceiling));
  double lo = std::log(1.0), hi = std::log(ceiling);
  while (hi - lo > std::log1p(resolution)) {
    const double mid = 0.5 * (lo + hi);
    if (compliant_at(cases, std::exp(mid), Cp))
      hi = mid;
    else
      lo = mid;
  }
  return std::exp(hi);
}

/// Family -> dials store with plain-text persistence.
class CalibrationStore {
 public:
  void set(const std::string& family, DialSet dials) { dials_[family] = dials; }

  DialSet get(const std::string& family) const {
    auto it = dials_.find(family);
    return it == dials_.end() ? DialSet{} : it->second;
  }

  bool has(const std::string& family) const { return dials_.count(family) > 0; }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("CalibrationStore: cannot write " + path);
    os.precision(17);
    for (const auto& [family, dials] : dials_)
      os << family << " " << dials.C << " " << dials.Cp << "\n";
  }

  void load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("CalibrationStore: cannot read " + path);
    std::string family;
    DialSet dials;
    while (is >> family >> dials.C >> dials.Cp) dials_[family] = dials;
  }

  const std::map<std::string, DialSet>& all() const { return dials_; }

 private:
  std::map<std::string, DialSet> dials_;
};

}  // namespace heatlab
