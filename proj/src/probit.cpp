#include "mcse/probit.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mcse/distributions.hpp"

namespace mcse {

namespace {

// Stream id reserved for drawing synthetic data sets.
constexpr std::uint64_t kSynthStream = 0xFFFF'FFFF'0000'0001ULL;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  return out;
}

}  // namespace

ProbitModel::ProbitModel(const Eigen::Matrix<double, Eigen::Dynamic, 2>& covariates, std::vector<int> responses)
    : responses_(std::move(responses)) {
  const auto rows = static_cast<std::size_t>(covariates.rows());
  if (rows != responses_.size()) throw std::invalid_argument("probit model: covariate and response counts differ");
  if (rows < 3) throw std::invalid_argument("probit model: need at least 3 observations");
  for (const int y : responses_) {
    if (y != 0 && y != 1) throw std::invalid_argument("probit model: responses must be 0 or 1");
  }
  if (!covariates.allFinite()) throw std::invalid_argument("probit model: non-finite covariate");

  design_.resize(covariates.rows(), 3);
  design_.col(0).setOnes();
  design_.rightCols<2>() = covariates;

  const Eigen::Matrix3d xtx = design_.transpose() * design_;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
  if (lu.rank() < 3) throw std::invalid_argument("probit model: design matrix is rank deficient");
  xtx_inv_ = lu.inverse();
  xtx_inv_ = 0.5 * (xtx_inv_ + xtx_inv_.transpose()).eval();

  const double residual = (xtx * xtx_inv_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) throw std::invalid_argument("probit model: X'X is too ill-conditioned to invert");

  const Eigen::LLT<Eigen::Matrix3d> llt(xtx_inv_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("probit model: (X'X)^{-1} is not positive definite");
  inv_factor_ = llt.matrixL();
  projector_ = xtx_inv_ * design_.transpose();
}

ProbitModel load_probit_csv(const std::string& path, std::optional<std::size_t> expected_rows) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open probit data file: " + path);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::array<double, 2>> xs;
  std::vector<int> ys;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"y", "x1", "x2"}) {
        throw std::invalid_argument(path + ": expected header 'y,x1,x2'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 3 fields");
    double v[3];
    for (int i = 0; i < 3; ++i) {
      std::size_t used = 0;
      try {
        v[i] = std::stod(fields[static_cast<std::size_t>(i)], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != fields[static_cast<std::size_t>(i)].size()) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad number '" +
                                    fields[static_cast<std::size_t>(i)] + "'");
      }
    }
    if (v[0] != 0.0 && v[0] != 1.0) throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": y must be 0 or 1");
    ys.push_back(static_cast<int>(v[0]));
    xs.push_back({v[1], v[2]});
  }
  if (!header_seen) throw std::invalid_argument(path + ": empty file");
  if (expected_rows && ys.size() != *expected_rows) {
    throw std::invalid_argument(path + ": expected " + std::to_string(*expected_rows) + " data rows, found " +
                                std::to_string(ys.size()));
  }
  Eigen::Matrix<double, Eigen::Dynamic, 2> cov(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cov(static_cast<Eigen::Index>(i), 0) = xs[i][0];
    cov(static_cast<Eigen::Index>(i), 1) = xs[i][1];
  }
  return ProbitModel(cov, std::move(ys));
}

double residual_sum_squares(const ProbitModel& model, const Eigen::VectorXd& z) {
  return (z - model.design() * (model.projector() * z)).squaredNorm();
}

double pxda_scale_draw(const ProbitModel& model, const Eigen::VectorXd& z, RngStream& rng, GammaReading reading) {
  const double shape = 0.5 * static_cast<double>(model.observations());
  const double half_rss = 0.5 * residual_sum_squares(model, z);
  return reading == GammaReading::ShapeRate ? rng.gamma(shape, half_rss) : rng.gamma(shape, 1.0 / half_rss);
}

Beta pxda_regression_draw(const ProbitModel& model, const Eigen::VectorXd& z_prime, RngStream& rng) {
  Eigen::Vector3d xi;
  for (int k = 0; k < 3; ++k) xi[k] = rng.normal();
  return model.projector() * z_prime + model.inverse_factor() * xi;
}

Beta pxda_step(const Beta& beta, const ProbitModel& model, RngStream& rng, GammaReading reading) {
  if (!beta.allFinite()) throw std::domain_error("PX-DA: state is not finite (the chain diverged)");
  const auto& y = model.responses();
  const Eigen::VectorXd mean = model.design() * beta;
  const Eigen::Index n = mean.size();

  Eigen::VectorXd z(n);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = truncated_normal(mean[i], y[static_cast<std::size_t>(i)] == 1, rng);
    const double rss = residual_sum_squares(model, z);
    if (!std::isfinite(rss)) throw std::domain_error("PX-DA: residual sum of squares overflowed (the chain diverged)");
    if (rss > 0.0) break;
  }
  const double g = std::sqrt(pxda_scale_draw(model, z, rng, reading));
  return pxda_regression_draw(model, g * z, rng);
}

PxdaSampler::PxdaSampler(const ProbitModel& model, const Beta& start, RngStream rng, GammaReading reading)
    : model_(&model), state_(start), rng_(rng), reading_(reading) {
  if (!start.allFinite()) throw std::invalid_argument("PX-DA: non-finite starting value");
}

const Beta& PxdaSampler::next() {
  state_ = pxda_step(state_, *model_, rng_, reading_);
  return state_;
}

void PxdaSampler::extend(std::size_t steps, std::vector<std::vector<double>>& history) {
  if (history.size() != 3) throw std::invalid_argument("PxdaSampler: history must have three coordinates");
  for (auto& h : history) h.reserve(h.size() + steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const Beta& b = next();
    for (int k = 0; k < 3; ++k) history[static_cast<std::size_t>(k)].push_back(b[k]);
  }
}

std::array<SampleSeries, 3> pxda_chain(const ProbitModel& model, const Beta& beta0, std::size_t n, std::uint64_t seed,
                                       std::uint64_t stream, GammaReading reading) {
  if (n < 1) throw std::invalid_argument("pxda_chain: n must be >= 1");
  PxdaSampler sampler(model, beta0, RngStream(seed, stream), reading);
  std::vector<std::vector<double>> history(3);
  sampler.extend(n, history);
  return {SampleSeries(std::move(history[0])), SampleSeries(std::move(history[1])), SampleSeries(std::move(history[2]))};
}

ProbitModel synth_probit(std::size_t n_obs, const Beta& beta_true, std::uint64_t seed) {
  if (n_obs < 4) throw std::invalid_argument("synth_probit: need at least 4 observations");
  RngStream rng(seed, kSynthStream);
  const auto rows = static_cast<Eigen::Index>(n_obs);
  while (true) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> cov(rows, 2);
    std::vector<int> y(n_obs);
    std::size_t ones = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      cov(i, 0) = rng.normal();
      cov(i, 1) = rng.normal();
      const double eta = beta_true[0] + beta_true[1] * cov(i, 0) + beta_true[2] * cov(i, 1);
      y[static_cast<std::size_t>(i)] = rng.uniform() < normal_cdf(eta) ? 1 : 0;
      ones += static_cast<std::size_t>(y[static_cast<std::size_t>(i)]);
    }
    if (ones == 0 || ones == n_obs) continue;
    try {
      return ProbitModel(cov, std::move(y));
    } catch (const std::invalid_argument&) {
      // rank deficient draw; try again
    }
  }
}

}  // namespace mcse
