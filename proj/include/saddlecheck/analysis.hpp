#pragma once

// Numerical evaluation of every constant in the fitted-norm stability theorem
// and of the explicit test-pair construction used in its proof.

#include <string>

#include "saddlecheck/saddle.hpp"

namespace saddlecheck {

using System = BlockSystem<double>;
using Norms = FittedNorms<double>;
using Combined = CombinedVector<double>;

/// Constants below this are treated as a failed hypothesis.
inline constexpr double kHypothesisFloor = 1e-8;
/// Slack allowed in the chain α̲ ≥ theoretical bound.
inline constexpr double kChainTol = 1e-8;

/// C̲ₐ: largest constant with a(v,v) ≥ C̲ₐ |v|²_V.
double coercivity_constant(const System& sys, const Norms& norms);

/// C̄ₐ: continuity constant of a(·,·) in ‖·‖_V.
double continuity_constant_a(const System& sys, const Norms& norms);

/// β̲: inf over q with |q|_Q ≠ 0 of sup_v b(v,q) / (‖v‖_V |q|_Q). Returns 0
/// (not an error) when B annihilates some such q.
double small_inf_sup(const System& sys, const Norms& norms);

/// B Vbar⁻¹ Bᵀ, the Q-side Schur operator whose pencil with S_Q gives β̲².
Matrix coupling_schur(const System& sys, const Norms& norms);

struct BabuskaConstants {
  double alpha_under = 0;  // min |θ| of the pencil (𝒜, 𝒩)
  double C_bar = 0;        // max |θ|
};
BabuskaConstants babuska_constants(const System& sys, const Norms& norms);

struct ProofConstants {
  double epsilon = 0;
  double delta = 0;
  double bound = 0;  // provable lower bound for α̲
  /// √(2·max{δ²+1, β̲⁻²+δ²}): growth of the test pair relative to x.
  double test_pair_growth = 0;
};

/// ε = ½C̄ₐ⁻¹β̲², δ = max{¼C̲ₐ⁻¹ + C̄ₐβ̲⁻², ¾},
/// bound = ¼ / √(2·max{δ²+1, β̲⁻²+δ²}).
/// Throws HypothesisFailed unless C̲ₐ > 0 and β̲ > 0.
ProofConstants theoretical_bound(double C_a_bar, double C_a_under, double beta_under);

struct StabilityReport {
  double C_a_bar = 0;
  double C_a_under = 0;
  double beta_under = 0;
  double alpha_under = 0;
  double C_bar = 0;
  double epsilon = 0;
  double delta = 0;
  double theoretical_alpha_bound = 0;
  bool coercivity_applicable = true;  // false when S_V ≈ 0
  bool beta_applicable = true;        // false when S_Q ≈ 0 (trivial Q splitting)
  bool hypotheses_ok = false;         // C̲ₐ > 0 and β̲ > 0
  bool chain_ok = true;               // α̲ ≥ bound − kChainTol, vacuous without hypotheses
  std::string note;
};

ProofConstants theoretical_bound(const StabilityReport& report);

/// Computes every constant; hypothesis failures are flagged, not thrown.
StabilityReport verify_stability(const System& sys, const Norms& norms);

struct WitnessResult {
  Combined input;
  Combined constructed;
  double coercivity_ratio = 0;  // 𝒜(x, y) / ‖x‖²_Y
  double boundedness_ratio = 0; // ‖y‖_Y / ‖x‖_Y
  double u0_ratio = 0;          // ‖u₀‖_V / (β̲⁻¹|p|_Q), 0 when |p|_Q = 0
  bool coercivity_ok = false;
  bool boundedness_ok = false;
};

/// Builds y = (δu + u₀; −δp + Qbar⁻¹Bu) for x = (u;p), where u₀ is the
/// Vbar-minimal element with b(u₀,p) = |p|²_Q, and checks 𝒜(x,y) ≥ ¼‖x‖²
/// and ‖y‖ ≤ √(2·max{δ²+1, β̲⁻²+δ²})‖x‖.
WitnessResult witness_check(const System& sys, const Norms& norms, const StabilityReport& report,
                            const Combined& x);

}  // namespace saddlecheck
