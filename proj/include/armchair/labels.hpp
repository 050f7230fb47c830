#ifndef ARMCHAIR_LABELS_HPP
#define ARMCHAIR_LABELS_HPP

#include <string_view>

#include "armchair/error.hpp"

namespace armchair {

enum class EigenKind { periodic, antiperiodic, resonance, dirichlet, lyapunov_zero };

constexpr std::string_view to_string(EigenKind k) {
  switch (k) {
    case EigenKind::periodic: return "periodic";
    case EigenKind::antiperiodic: return "antiperiodic";
    case EigenKind::resonance: return "resonance";
    case EigenKind::dirichlet: return "dirichlet";
    case EigenKind::lyapunov_zero: return "lyapunov-zero";
  }
  return "?";
}

inline EigenKind eigen_kind_from_string(std::string_view s) {
  for (auto k : {EigenKind::periodic, EigenKind::antiperiodic, EigenKind::resonance, EigenKind::dirichlet,
                 EigenKind::lyapunov_zero})
    if (to_string(k) == s) return k;
  throw invalid_input("unknown eigenvalue kind '" + std::string(s) + "'");
}

/// A real spectral point with its role: lambda_{nu,n}^{k,sign} for periodic and
/// antiperiodic eigenvalues, r_{k,n}^{sign} for resonances, mu_n and eta_n for
/// the Dirichlet and Lyapunov-zero sequences. Unused labels are 0 (k: -1).
struct LabeledEigenvalue {
  double value = 0.0;
  EigenKind kind = EigenKind::periodic;
  int nu = 0;
  int n = 0;
  int sign = 0;
  int k = -1;
  bool operator==(const LabeledEigenvalue&) const = default;
};

}  // namespace armchair

#endif  // ARMCHAIR_LABELS_HPP
