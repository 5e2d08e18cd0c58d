#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcse/lag_window.hpp"

namespace mcse {

// Which moment condition the exponent alpha comes from:
// E|g|^{4+delta+eps} < inf gives alpha = 1/(4+delta) (spectral and
// mean-square results), E|g|^{2+delta+eps} < inf gives alpha = 1/(2+delta)
// (overlapping batch means).
enum class MomentRegime { FourPlusDelta, TwoPlusDelta };

class AuditConfig {
 public:
  AuditConfig(double nu, double delta, MomentRegime regime);

  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] MomentRegime regime() const noexcept { return regime_; }
  [[nodiscard]] double alpha() const noexcept;

 private:
  double nu_;
  double delta_;
  MomentRegime regime_;
};

enum class AuditTarget { Thm1, Thm2, Cor1, Rmk7 };
enum class Verdict { Pass, Fail, NotApplicable };

[[nodiscard]] AuditTarget parse_audit_target(std::string_view name);
[[nodiscard]] std::string to_string(AuditTarget t);
[[nodiscard]] std::string to_string(Verdict v);
/// Regime whose alpha the target's conditions are stated in.
[[nodiscard]] MomentRegime required_regime(AuditTarget t);

struct ConditionVerdict {
  std::string condition;  // "Thm1:a", ..., "Thm2:e", "Cor1", "Rmk7-BM"
  Verdict verdict = Verdict::NotApplicable;
  std::string reason;
};

struct AuditReport {
  AuditTarget target = AuditTarget::Thm1;
  std::vector<ConditionVerdict> verdicts;

  [[nodiscard]] const ConditionVerdict& at(std::string_view condition) const;
  [[nodiscard]] bool all_pass() const;
};

/// Symbolic check of the strong-consistency conditions for truncation points
/// b_n = floor(n^nu). Every condition reduces to a comparison of power-law
/// exponents; log factors only matter at exponent ties, which fail.
///
/// Throws ConfigError when cfg's moment regime does not match the target.
[[nodiscard]] AuditReport consistency_audit(const LagWindow& w, const AuditConfig& cfg, AuditTarget target);

}  // namespace mcse
