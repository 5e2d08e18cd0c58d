#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcse {

enum class WindowKind {
  SimpleTruncation,
  BlackmanTukey,
  TukeyHanning,     // BlackmanTukey with a = 1/4
  Parzen,
  ModifiedBartlett,  // Parzen with q = 1
  ScaledBartlett,
};

/// A lag window w_n(k) with truncation point b: even in k, 1 at k = 0 and
/// zero for |k| >= b.
class LagWindow {
 public:
  static LagWindow simple_truncation();
  static LagWindow blackman_tukey(double a);
  static LagWindow tukey_hanning();
  static LagWindow parzen(int q);
  static LagWindow modified_bartlett();
  static LagWindow scaled_bartlett(double lambda);

  /// Parses the command-line syntax: bartlett | tukey-hanning |
  /// blackman-tukey:a=<x> | parzen:q=<k> | truncation | scaled-bartlett:lambda=<x>.
  static LagWindow parse(std::string_view spec);

  [[nodiscard]] WindowKind kind() const noexcept { return kind_; }
  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] int q() const noexcept { return q_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }

  /// Round-trips through parse().
  [[nodiscard]] std::string spec() const;
  /// Short label used in reports ("Brt", "TH", ...).
  [[nodiscard]] std::string label() const;

  [[nodiscard]] double value(std::int64_t k, std::int64_t b) const;

  /// lim_{x -> 1^-} of the window's shape function, i.e. the size of the jump
  /// the window takes at |k| = b. Zero for windows that taper to 0.
  [[nodiscard]] double edge_value() const;

  friend bool operator==(const LagWindow&, const LagWindow&) = default;

 private:
  LagWindow(WindowKind kind, double a, int q, double lambda) : kind_(kind), a_(a), q_(q), lambda_(lambda) {}

  WindowKind kind_;
  double a_ = 0.0;
  int q_ = 0;
  double lambda_ = 0.0;
};

[[nodiscard]] double window_value(const LagWindow& w, std::int64_t k, std::int64_t b);

/// w(k-1) - w(k) for 1 <= k <= b; std::domain_error otherwise.
[[nodiscard]] double delta1(const LagWindow& w, std::int64_t k, std::int64_t b);

/// w(k-1) - 2 w(k) + w(k+1) for 1 <= k <= b; std::domain_error otherwise.
[[nodiscard]] double delta2(const LagWindow& w, std::int64_t k, std::int64_t b);

struct WindowCheck {
  bool passed = true;
  std::vector<std::string> violations;
};

/// Exhaustive check over s in [-b, b]: evenness, w(0) = 1, zero at |s| >= b
/// and |w(s)| <= 1.
[[nodiscard]] WindowCheck assumption1_check(const LagWindow& w, std::int64_t b);

}  // namespace mcse
