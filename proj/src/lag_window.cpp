#include "mcse/lag_window.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mcse {

namespace {

constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53

// b^q as a double when every intermediate power is an exactly representable
// integer; negative otherwise.
double exact_power(std::int64_t base, int q) {
  double p = 1.0;
  for (int i = 0; i < q; ++i) {
    p *= static_cast<double>(base);
    if (p > kExactIntegerLimit) return -1.0;
  }
  return p;
}

// Shape numerator for Parzen-type windows, scaled by b^q: b^q - |k|^q.
// Returns false when the integers are not exactly representable.
bool parzen_numerator(std::int64_t k, std::int64_t b, int q, double& num, double& den) {
  const double bq = exact_power(b, q);
  const double kq = exact_power(std::llabs(k), q);
  if (bq < 0.0 || kq < 0.0) return false;
  num = (std::llabs(k) < b) ? bq - kq : 0.0;
  den = bq;
  return true;
}

double parse_param(std::string_view spec, std::string_view key) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("window '" + std::string(spec) + "' needs parameter " + std::string(key));
  }
  const std::string_view rest = spec.substr(colon + 1);
  const std::string prefix = std::string(key) + "=";
  if (rest.substr(0, prefix.size()) != prefix) {
    throw std::invalid_argument("window '" + std::string(spec) + "': expected '" + prefix + "<value>'");
  }
  const std::string text(rest.substr(prefix.size()));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("window '" + std::string(spec) + "': bad number '" + text + "'");
  }
  return v;
}

}  // namespace

LagWindow LagWindow::simple_truncation() { return {WindowKind::SimpleTruncation, 0.0, 0, 0.0}; }

LagWindow LagWindow::blackman_tukey(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("Blackman-Tukey window requires a > 0");
  return {WindowKind::BlackmanTukey, a, 0, 0.0};
}

LagWindow LagWindow::tukey_hanning() { return {WindowKind::TukeyHanning, 0.25, 0, 0.0}; }

LagWindow LagWindow::parzen(int q) {
  if (q < 1) throw std::invalid_argument("Parzen window requires q >= 1");
  return {WindowKind::Parzen, 0.0, q, 0.0};
}

LagWindow LagWindow::modified_bartlett() { return {WindowKind::ModifiedBartlett, 0.0, 1, 0.0}; }

LagWindow LagWindow::scaled_bartlett(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || lambda == 1.0) {
    throw std::invalid_argument("scaled Bartlett window requires lambda > 0 and lambda != 1");
  }
  return {WindowKind::ScaledBartlett, 0.0, 0, lambda};
}

LagWindow LagWindow::parse(std::string_view spec) {
  const std::string_view name = spec.substr(0, spec.find(':'));
  const bool has_param = spec.find(':') != std::string_view::npos;
  auto no_param = [&](LagWindow w) {
    if (has_param) throw std::invalid_argument("window '" + std::string(name) + "' takes no parameters");
    return w;
  };
  if (name == "bartlett" || name == "modified-bartlett") return no_param(modified_bartlett());
  if (name == "tukey-hanning") return no_param(tukey_hanning());
  if (name == "truncation") return no_param(simple_truncation());
  if (name == "blackman-tukey") return blackman_tukey(parse_param(spec, "a"));
  if (name == "scaled-bartlett") return scaled_bartlett(parse_param(spec, "lambda"));
  if (name == "parzen") {
    const double q = parse_param(spec, "q");
    if (q != std::floor(q) || q < 1.0 || q > 64.0) throw std::invalid_argument("parzen: q must be an integer in [1, 64]");
    return parzen(static_cast<int>(q));
  }
  throw std::invalid_argument("unknown window '" + std::string(spec) + "'");
}

std::string LagWindow::spec() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case WindowKind::SimpleTruncation: return "truncation";
    case WindowKind::TukeyHanning: return "tukey-hanning";
    case WindowKind::ModifiedBartlett: return "bartlett";
    case WindowKind::BlackmanTukey: os << "blackman-tukey:a=" << a_; return os.str();
    case WindowKind::Parzen: os << "parzen:q=" << q_; return os.str();
    case WindowKind::ScaledBartlett: os << "scaled-bartlett:lambda=" << lambda_; return os.str();
  }
  return {};
}

std::string LagWindow::label() const {
  switch (kind_) {
    case WindowKind::ModifiedBartlett: return "Brt";
    case WindowKind::TukeyHanning: return "TH";
    default: return spec();
  }
}

double LagWindow::value(std::int64_t k, std::int64_t b) const {
  if (b < 1) throw std::domain_error("lag window: truncation point must be >= 1");
  const std::int64_t ak = std::llabs(k);
  if (ak >= b) return 0.0;
  if (ak == 0) return 1.0;
  const double x = static_cast<double>(ak) / static_cast<double>(b);
  switch (kind_) {
    case WindowKind::SimpleTruncation:
      return 1.0;
    case WindowKind::BlackmanTukey:
    case WindowKind::TukeyHanning:
      return 1.0 - 2.0 * a_ + 2.0 * a_ * std::cos(std::numbers::pi * x);
    case WindowKind::Parzen:
    case WindowKind::ModifiedBartlett: {
      double num = 0.0, den = 1.0;
      if (parzen_numerator(k, b, q_, num, den)) return num / den;
      return 1.0 - std::pow(x, q_);
    }
    case WindowKind::ScaledBartlett:
      return 1.0 - lambda_ * static_cast<double>(ak) / static_cast<double>(b);
  }
  return 0.0;
}

double LagWindow::edge_value() const {
  switch (kind_) {
    case WindowKind::SimpleTruncation: return 1.0;
    case WindowKind::BlackmanTukey:
    case WindowKind::TukeyHanning: return 1.0 - 4.0 * a_;
    case WindowKind::Parzen:
    case WindowKind::ModifiedBartlett: return 0.0;
    case WindowKind::ScaledBartlett: return 1.0 - lambda_;
  }
  return 0.0;
}

double window_value(const LagWindow& w, std::int64_t k, std::int64_t b) { return w.value(k, b); }

namespace {

void check_difference_range(std::int64_t k, std::int64_t b, const char* name) {
  if (b < 1 || k < 1 || k > b) {
    throw std::domain_error(std::string(name) + ": need 1 <= k <= b, got k = " + std::to_string(k) +
                            ", b = " + std::to_string(b));
  }
}

}  // namespace

double delta1(const LagWindow& w, std::int64_t k, std::int64_t b) {
  check_difference_range(k, b, "delta1");
  if (w.kind() == WindowKind::Parzen || w.kind() == WindowKind::ModifiedBartlett) {
    // Differences of integer numerators over a common b^q are exact.
    double n0 = 0.0, n1 = 0.0, den = 1.0;
    if (parzen_numerator(k - 1, b, w.q(), n0, den) && parzen_numerator(k, b, w.q(), n1, den)) {
      return (n0 - n1) / den;
    }
  }
  return w.value(k - 1, b) - w.value(k, b);
}

double delta2(const LagWindow& w, std::int64_t k, std::int64_t b) {
  check_difference_range(k, b, "delta2");
  if (w.kind() == WindowKind::Parzen || w.kind() == WindowKind::ModifiedBartlett) {
    double n0 = 0.0, n1 = 0.0, n2 = 0.0, den = 1.0;
    if (parzen_numerator(k - 1, b, w.q(), n0, den) && parzen_numerator(k, b, w.q(), n1, den) &&
        parzen_numerator(k + 1, b, w.q(), n2, den)) {
      return (n0 - 2.0 * n1 + n2) / den;
    }
  }
  return w.value(k - 1, b) - 2.0 * w.value(k, b) + w.value(k + 1, b);
}

WindowCheck assumption1_check(const LagWindow& w, std::int64_t b) {
  if (b < 1) throw std::domain_error("assumption1_check: b must be >= 1");
  WindowCheck out;
  auto fail = [&](std::string msg) {
    out.passed = false;
    out.violations.push_back(std::move(msg));
  };
  if (w.value(0, b) != 1.0) fail("w(0) != 1");
  for (std::int64_t s = -b; s <= b; ++s) {
    const double v = w.value(s, b);
    if (v != w.value(-s, b)) fail("not even at s = " + std::to_string(s));
    if (std::llabs(s) >= b && v != 0.0) fail("nonzero at |s| >= b, s = " + std::to_string(s));
    if (std::fabs(v) > 1.0) {
      std::ostringstream os;
      os.precision(17);
      os << "|w(" << s << ")| = " << std::fabs(v) << " exceeds 1";
      fail(os.str());
    }
  }
  return out;
}

}  // namespace mcse
