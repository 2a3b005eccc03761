#include "roughpde/rough_path.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace rpde {

FiniteRoughPath::FiniteRoughPath(TimePartition part, std::vector<std::vector<double>> values,
                                 double alpha)
    : part_(std::move(part)), values_(std::move(values)), alpha_(alpha) {
  if (values_.size() != part_.size())
    throw ConfigError("rough path: one value row per partition point expected");
  if (values_.size() < 2) throw ConfigError("rough path: need at least 2 points");
  dim_ = values_.front().size();
  if (dim_ == 0) throw ConfigError("rough path: dimension must be positive");
  for (const auto& row : values_)
    if (row.size() != dim_) throw ConfigError("rough path: ragged value rows");
}

std::vector<double> FiniteRoughPath::second_level(std::size_t i, std::size_t j) const {
  // Piecewise-linear segments carry no area, so per segment the iterated
  // integral is Z^mu(midpoint average) times the segment increment.
  std::vector<double> out(dim_ * dim_, 0.0);
  for (std::size_t k = i; k < j; ++k) {
    for (std::size_t mu = 0; mu < dim_; ++mu) {
      double zbar = 0.5 * (values_[k][mu] + values_[k + 1][mu]) - values_[i][mu];
      for (std::size_t nu = 0; nu < dim_; ++nu)
        out[mu * dim_ + nu] += zbar * (values_[k + 1][nu] - values_[k][nu]);
    }
  }
  for (const auto& p : perturbations_) {
    if (p.i == i && p.j == j) {
      out[p.mu * dim_ + p.nu] += p.eps;
      out[p.nu * dim_ + p.mu] -= p.eps;
    }
  }
  return out;
}

std::vector<double> FiniteRoughPath::levy_area(std::size_t i, std::size_t j) const {
  std::vector<double> lvl = second_level(i, j);
  std::vector<double> out(dim_ * dim_, 0.0);
  for (std::size_t mu = 0; mu < dim_; ++mu)
    for (std::size_t nu = 0; nu < dim_; ++nu)
      out[mu * dim_ + nu] = 0.5 * (lvl[mu * dim_ + nu] - lvl[nu * dim_ + mu]);
  return out;
}

void FiniteRoughPath::perturb_levy(std::size_t i, std::size_t j, std::size_t mu, std::size_t nu,
                                   double eps) {
  if (mu == nu) throw ConfigError("levy perturbation must be off-diagonal");
  perturbations_.push_back({i, j, mu, nu, eps});
}

double FiniteRoughPath::chen_residual() const {
  double worst = 0.0;
  std::size_t n = part_.size();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t th = s; th < n; ++th)
      for (std::size_t t = th; t < n; ++t) {
        auto a = second_level(s, t);
        auto b = second_level(s, th);
        auto c = second_level(th, t);
        for (std::size_t mu = 0; mu < dim_; ++mu)
          for (std::size_t nu = 0; nu < dim_; ++nu) {
            double lhs = a[mu * dim_ + nu] - b[mu * dim_ + nu] - c[mu * dim_ + nu];
            double rhs = increment(s, th, mu) * increment(th, t, nu);
            worst = std::max(worst, std::abs(lhs - rhs));
          }
      }
  return worst;
}

FiniteRoughPath pl_lift(const TimePartition& part, std::vector<std::vector<double>> values,
                        double alpha) {
  return FiniteRoughPath(part, std::move(values), alpha);
}

std::vector<double> fbm_covariance(double hurst, const std::vector<double>& times) {
  std::size_t n = times.size();
  std::vector<double> cov(n * n);
  double two_h = 2.0 * hurst;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      cov[a * n + b] = 0.5 * (std::pow(times[a], two_h) + std::pow(times[b], two_h) -
                              std::pow(std::abs(times[a] - times[b]), two_h));
  return cov;
}

namespace {

// Box-Muller over mt19937_64 keeps the stream independent of the standard
// library's normal_distribution algorithm.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() {
    // in (0,1]: avoids log(0)
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

std::vector<double> fbm_sample(double hurst, std::size_t n, double horizon, std::uint64_t seed) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("fbm_sample: Hurst index outside (0,1)");
  if (n == 0 || n > 4096) throw ConfigError("fbm_sample: steps must be in [1, 4096]");
  std::vector<double> times(n);
  for (std::size_t k = 0; k < n; ++k)
    times[k] = horizon * static_cast<double>(k + 1) / static_cast<double>(n);
  auto cov = fbm_covariance(hurst, times);

  Eigen::MatrixXd c(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) c(a, b) = cov[a * n + b];

  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    // One jitter retry on the diagonal, then give up.
    for (std::size_t a = 0; a < n; ++a) c(a, a) += 1e-12;
    llt.compute(c);
    if (llt.info() != Eigen::Success)
      throw NumericError("fbm_sample: covariance factorization failed even with 1e-12 jitter");
  }

  GaussianStream gauss(seed);
  Eigen::VectorXd xi(n);
  for (std::size_t k = 0; k < n; ++k) xi(k) = gauss.next();
  Eigen::VectorXd path = llt.matrixL() * xi;

  std::vector<double> out(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) out[k + 1] = path(k);
  return out;
}

}  // namespace rpde
