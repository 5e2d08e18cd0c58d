#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcse/lag_window.hpp"
#include "mcse/series.hpp"

namespace mcse {

enum class MethodKind { SV, BM, OBM, PartialOBM };

/// An estimator of the asymptotic variance: spectral variance with a lag
/// window, batch means, overlapping batch means, or overlapping batch means
/// restricted to batch starts on a stride.
class Method {
 public:
  static Method bm() { return Method(MethodKind::BM, std::nullopt, 0); }
  static Method obm() { return Method(MethodKind::OBM, std::nullopt, 1); }
  static Method partial_obm(std::size_t stride);
  static Method sv(const LagWindow& w) { return Method(MethodKind::SV, w, 0); }

  /// "bm" | "obm" | "pobm:stride=<k>" | "sv"; `window` is required for "sv".
  static Method parse(std::string_view spec, const std::optional<LagWindow>& window = std::nullopt);

  [[nodiscard]] MethodKind kind() const noexcept { return kind_; }
  [[nodiscard]] const LagWindow& window() const;
  [[nodiscard]] std::size_t stride() const noexcept { return stride_; }

  /// Report label: BM, OBM, pOBM/16, Brt, TH, SV[parzen:q=2], ...
  [[nodiscard]] std::string label() const;

  friend bool operator==(const Method&, const Method&) = default;

 private:
  Method(MethodKind kind, std::optional<LagWindow> window, std::size_t stride)
      : kind_(kind), window_(std::move(window)), stride_(stride) {}

  MethodKind kind_;
  std::optional<LagWindow> window_;
  std::size_t stride_;
};

struct VarianceEstimate {
  double value = 0.0;  // estimate of sigma_g^2
  Method method = Method::bm();
  std::size_t b = 0;    // batch size or truncation point
  std::size_t n = 0;    // series length
  std::size_t dof = 0;  // degrees of freedom for the t interval

  /// Spectral estimates with some windows can go negative.
  [[nodiscard]] bool indefinite() const noexcept { return !(value >= 0.0); }
};

/// Either a fixed batch size or b_n = floor(n^nu).
class BatchPolicy {
 public:
  static BatchPolicy fixed(std::size_t b);
  static BatchPolicy power_law(double nu);

  [[nodiscard]] bool is_power_law() const noexcept { return power_law_; }
  [[nodiscard]] std::size_t fixed_b() const noexcept { return b_; }
  [[nodiscard]] double nu() const noexcept { return nu_; }

 private:
  BatchPolicy(bool power_law, std::size_t b, double nu) : power_law_(power_law), b_(b), nu_(nu) {}

  bool power_law_;
  std::size_t b_;
  double nu_;
};

/// floor(n^nu) exactly: when nu is within 1e-12 of a fraction p/q (q <= 64),
/// the floor is settled by comparing b^q with n^p in integer arithmetic.
[[nodiscard]] std::size_t floor_power(std::size_t n, double nu);

/// Batch size for a series of length n. Throws std::domain_error when the
/// result is not in [1, n).
[[nodiscard]] std::size_t batch_size(const BatchPolicy& p, std::size_t n);

/// gamma_n(0) + 2 sum_{s=1}^{b-1} w(s) gamma_n(s). Requires 1 <= b <= n.
[[nodiscard]] VarianceEstimate sv_estimate(const SampleSeries& s, const LagWindow& w, std::size_t b);

/// Same as sv_estimate, from precomputed autocovariances gamma_n(0..L) with
/// L >= b - 1. Lets several windows share one autocovariance pass.
[[nodiscard]] VarianceEstimate sv_estimate_from_autocov(std::span<const double> autocovs, std::size_t n,
                                                        const LagWindow& w, std::size_t b);

/// Nonoverlapping batch means over a = floor(n/b) complete batches; trailing
/// observations that do not fill a batch are dropped. Requires a >= 2.
[[nodiscard]] VarianceEstimate bm_estimate(const SampleSeries& s, std::size_t b);

/// Overlapping batch means over all n - b + 1 batches. Requires 1 <= b < n.
[[nodiscard]] VarianceEstimate obm_estimate(const SampleSeries& s, std::size_t b);

/// Overlapping batch means using only batches that start at multiples of
/// `stride`. The m included batches are normalized by n b / (m (n - b)),
/// which is the OBM constant at stride 1 and the BM constant at stride b
/// (b | n); strides in between interpolate.
[[nodiscard]] VarianceEstimate partial_obm_estimate(const SampleSeries& s, std::size_t b, std::size_t stride);

/// Dispatch on the method.
[[nodiscard]] VarianceEstimate estimate(const SampleSeries& s, const Method& m, std::size_t b);

/// Gamma = -2 sum_{s>=1} s gamma(s); autocovs[i] holds gamma(i + 1).
[[nodiscard]] double gamma_constant(std::span<const double> autocovs);

/// MSE-optimal batch size, (Gamma^2 n / sigma^4)^{1/3} for BM and
/// (8 Gamma^2 n / (3 sigma^4))^{1/3} for OBM, rounded to nearest and clamped
/// to [1, n - 1].
[[nodiscard]] std::size_t optimal_batch(MethodKind method, double gamma, double sigma2, std::size_t n);

}  // namespace mcse
