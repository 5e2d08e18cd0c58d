#include "mcse/ar1.hpp"

#include <cmath>
#include <stdexcept>

namespace mcse {

namespace {

void check_rho(double rho) {
  if (!(std::fabs(rho) < 1.0)) throw std::domain_error("AR(1): need |rho| < 1");
}

}  // namespace

double Ar1Truth::autocov(std::size_t lag) const {
  return std::pow(rho, static_cast<double>(lag)) * stationary_var;
}

Ar1Truth ar1_truth(double rho) {
  check_rho(rho);
  Ar1Truth t;
  t.rho = rho;
  t.stationary_var = 1.0 / (1.0 - rho * rho);
  t.sigma2 = 1.0 / ((1.0 - rho) * (1.0 - rho));
  t.gamma_const = -2.0 * rho / ((1.0 - rho * rho) * (1.0 - rho) * (1.0 - rho));
  return t;
}

Ar1Sampler::Ar1Sampler(double rho, std::optional<double> x0, RngStream rng) : rho_(rho), state_(0.0), rng_(rng) {
  check_rho(rho);
  // The stationary start is the first draw of the stream.
  state_ = x0 ? *x0 : rng_.normal() * std::sqrt(1.0 / (1.0 - rho * rho));
}

double Ar1Sampler::next() {
  state_ = rho_ * state_ + rng_.normal();
  return state_;
}

void Ar1Sampler::extend(std::size_t steps, std::vector<std::vector<double>>& history) {
  if (history.size() != 1) throw std::invalid_argument("Ar1Sampler: history must have one coordinate");
  auto& out = history[0];
  out.reserve(out.size() + steps);
  for (std::size_t i = 0; i < steps; ++i) out.push_back(next());
}

SampleSeries ar1_chain(const Ar1Config& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("ar1_chain: n must be >= 1");
  Ar1Sampler sampler(cfg.rho, cfg.x0, RngStream(cfg.seed, cfg.stream));
  std::vector<std::vector<double>> history(1);
  sampler.extend(cfg.n, history);
  return SampleSeries(std::move(history[0]));
}

}  // namespace mcse
