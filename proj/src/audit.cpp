#include "mcse/audit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mcse/errors.hpp"

namespace mcse {

namespace {

// Exponents closer than this are treated as equal.
constexpr double kExponentTie = 1e-12;

bool strictly_greater(double x, double y) { return x - y > kExponentTie; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

ConditionVerdict pass_if(std::string name, bool ok, const std::string& rule) {
  return {std::move(name), ok ? Verdict::Pass : Verdict::Fail, rule};
}

void audit_theorem1(const LagWindow& w, const AuditConfig& cfg, std::vector<ConditionVerdict>& out) {
  const double nu = cfg.nu();
  const double two_alpha = 2.0 * cfg.alpha();

  // sum_k k |D1 w(k)| is of order b for every catalog window (a linear taper
  // gives b/2, a jump at b contributes b), so (a) reads b^2/n -> 0.
  out.push_back(pass_if("Thm1:a", strictly_greater(0.5, nu),
                        "b_n^2/n -> 0 requires nu < 1/2; nu = " + fmt(nu)));
  out.push_back({"Thm1:b", Verdict::Pass, "sum (b_n/n)^c converges for c > 1/(1-nu)"});
  out.push_back({"Thm1:c", Verdict::Pass, "b_n log(n)/n -> 0 for every nu < 1"});

  const double edge = w.edge_value();
  if (edge != 0.0) {
    out.push_back({"Thm1:d", Verdict::Fail,
                   "window jumps by " + fmt(std::fabs(edge)) +
                       " at b_n, so sum |D2 w(k)| stays bounded away from 0 and b_n n^{2 alpha} (log n)^3 "
                       "(sum |D2 w|)^2 diverges for every nu"});
  } else {
    // sum |D2 w(k)| = O(1/b_n): both clauses reduce to n^{2 alpha} / b_n -> 0.
    out.push_back(pass_if("Thm1:d", strictly_greater(nu, two_alpha),
                          "sum |D2 w| = O(1/b_n); both clauses need nu > 2 alpha = " + fmt(two_alpha) +
                              "; nu = " + fmt(nu)));
  }
  out.push_back(pass_if("Thm1:e", strictly_greater(nu, two_alpha),
                        "n^{2 alpha} log(n)/b_n -> 0 requires nu > 2 alpha = " + fmt(two_alpha)));
}

void audit_theorem2(const AuditConfig& cfg, std::vector<ConditionVerdict>& out) {
  const double nu = cfg.nu();
  const double two_alpha = 2.0 * cfg.alpha();
  out.push_back({"Thm2:a", Verdict::Pass, "sum (b_n/n)^c converges for c > 1/(1-nu)"});
  out.push_back({"Thm2:b", Verdict::Pass, "b_n log(n)/n -> 0 for every nu < 1"});
  out.push_back(pass_if("Thm2:c", strictly_greater(nu, two_alpha),
                        "n^{2 alpha} (log n)^3 / b_n -> 0 requires nu > 2 alpha = " + fmt(two_alpha)));
  out.push_back({"Thm2:d", Verdict::Pass, "log(n)/b_n is bounded for every nu > 0"});
  out.push_back(pass_if("Thm2:e", strictly_greater(0.75, nu),
                        "b_n^4 n^{-3} log log n -> 0 requires nu < 3/4 (b_n^2 n^{-2} part holds for nu < 1)"));
}

}  // namespace

AuditConfig::AuditConfig(double nu, double delta, MomentRegime regime) : nu_(nu), delta_(delta), regime_(regime) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("audit: nu must lie in (0, 1)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("audit: delta must be > 0");
}

double AuditConfig::alpha() const noexcept {
  return regime_ == MomentRegime::FourPlusDelta ? 1.0 / (4.0 + delta_) : 1.0 / (2.0 + delta_);
}

AuditTarget parse_audit_target(std::string_view name) {
  if (name == "thm1") return AuditTarget::Thm1;
  if (name == "thm2") return AuditTarget::Thm2;
  if (name == "cor1") return AuditTarget::Cor1;
  if (name == "rmk7") return AuditTarget::Rmk7;
  throw std::invalid_argument("unknown audit target '" + std::string(name) + "' (thm1|thm2|cor1|rmk7)");
}

std::string to_string(AuditTarget t) {
  switch (t) {
    case AuditTarget::Thm1: return "thm1";
    case AuditTarget::Thm2: return "thm2";
    case AuditTarget::Cor1: return "cor1";
    case AuditTarget::Rmk7: return "rmk7";
  }
  return {};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "n/a";
  }
  return {};
}

MomentRegime required_regime(AuditTarget t) {
  return t == AuditTarget::Thm1 ? MomentRegime::FourPlusDelta : MomentRegime::TwoPlusDelta;
}

const ConditionVerdict& AuditReport::at(std::string_view condition) const {
  for (const auto& v : verdicts) {
    if (v.condition == condition) return v;
  }
  throw std::out_of_range("audit report has no condition '" + std::string(condition) + "'");
}

bool AuditReport::all_pass() const {
  for (const auto& v : verdicts) {
    if (v.verdict == Verdict::Fail) return false;
  }
  return true;
}

AuditReport consistency_audit(const LagWindow& w, const AuditConfig& cfg, AuditTarget target) {
  if (cfg.regime() != required_regime(target)) {
    throw ConfigError("audit " + to_string(target) + " is stated for alpha = 1/(" +
                      (required_regime(target) == MomentRegime::FourPlusDelta ? "4" : "2") +
                      " + delta); the configuration uses the other moment regime");
  }
  AuditReport report;
  report.target = target;
  const double nu = cfg.nu();
  const double lower = 1.0 / (1.0 + cfg.delta() / 2.0);
  switch (target) {
    case AuditTarget::Thm1:
      audit_theorem1(w, cfg, report.verdicts);
      break;
    case AuditTarget::Thm2:
      audit_theorem2(cfg, report.verdicts);
      break;
    case AuditTarget::Cor1:
      report.verdicts.push_back(pass_if("Cor1", strictly_greater(0.75, nu) && strictly_greater(nu, lower),
                                        "OBM with b_n = floor(n^nu) needs 3/4 > nu > (1 + delta/2)^{-1} = " +
                                            fmt(lower)));
      break;
    case AuditTarget::Rmk7:
      report.verdicts.push_back(pass_if("Rmk7-BM", strictly_greater(1.0, nu) && strictly_greater(nu, lower),
                                        "BM with b_n = floor(n^nu) needs 1 > nu > (1 + delta/2)^{-1} = " +
                                            fmt(lower)));
      break;
  }
  return report;
}

}  // namespace mcse
