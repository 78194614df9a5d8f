#include "cmjp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cmjp/errors.hpp"
#include "cmjp/likelihood.hpp"

namespace cmjp {
namespace {

using Kind = ParamLayout::Kind;

double param_value(const ModelParams& theta, const ParamLayout::Entry& e) {
  return e.kind == Kind::kPhi ? theta.phi(e.x, e.m) : theta.rates[static_cast<std::size_t>(e.m)](e.x, e.y);
}

}  // namespace

std::vector<int> retained_parameters(const ModelParams& theta, double threshold) {
  const ParamLayout layout(theta.num_states, theta.num_regimes);
  std::vector<int> out;
  for (int i = 0; i < layout.size(); ++i) {
    if (std::abs(param_value(theta, layout[i])) >= threshold) out.push_back(i);
  }
  return out;
}

FisherMatrix observed_fisher(std::span<const SufficientStats> stats, const ModelParams& theta_hat,
                             PhiParametrization phi) {
  return observed_fisher(stats, theta_hat, retained_parameters(theta_hat), phi);
}

FisherMatrix observed_fisher(std::span<const SufficientStats> stats, const ModelParams& theta_hat,
                             const std::vector<int>& retained, PhiParametrization phi) {
  validate_model(theta_hat);
  const int p = theta_hat.num_states;
  const int m_count = theta_hat.num_regimes;
  const int last = m_count - 1;
  FisherMatrix out;
  out.layout = ParamLayout(p, m_count);
  out.retained = retained;
  out.values = to_vector(theta_hat);
  const int r = static_cast<int>(retained.size());
  for (int i = 0; i < r; ++i) {
    const int idx = retained[static_cast<std::size_t>(i)];
    if (idx < 0 || idx >= out.layout.size()) throw InvalidArgument("observed_fisher: retained index out of range");
    if (i > 0 && idx <= retained[static_cast<std::size_t>(i - 1)]) {
      throw InvalidArgument("observed_fisher: retained indices must be increasing");
    }
    if (out.values[idx] == 0.0) {
      throw InvalidArgument("observed_fisher: parameter " + out.layout.name(idx) +
                            " is zero; exclude it before computing the information");
    }
  }
  const bool constrained = phi == PhiParametrization::kConstrained;
  Matrix j = Matrix::Zero(r, r);

  // Per-path scores of the complete log-likelihood pieces.
  Vector u(r);     // phi: c_j (constrained) or post_j / phi_j; rate: A / q
  Vector post;
  for (const auto& s : stats) {
    post = posterior_weights(s, theta_hat);
    const int x0 = s.initial_state;
    const double phi_last = theta_hat.phi(x0, last);
    const double inv_last = phi_last > 0.0 ? 1.0 / phi_last : 0.0;
    for (int i = 0; i < r; ++i) {
      const auto& e = out.layout[retained[static_cast<std::size_t>(i)]];
      if (e.kind == Kind::kPhi) {
        if (e.x != x0) {
          u[i] = 0.0;
        } else {
          u[i] = post[e.m] / theta_hat.phi(x0, e.m);
          if (constrained) u[i] -= post[last] * inv_last;
        }
      } else {
        const double q = theta_hat.rates[static_cast<std::size_t>(e.m)](e.x, e.y);
        u[i] = (s.counts(e.x, e.y) - q * s.occupation[e.x]) / q;
      }
    }
    for (int a = 0; a < r; ++a) {
      const auto& ea = out.layout[retained[static_cast<std::size_t>(a)]];
      for (int b = a; b < r; ++b) {
        const auto& eb = out.layout[retained[static_cast<std::size_t>(b)]];
        double v = 0.0;
        if (ea.kind == Kind::kPhi && eb.kind == Kind::kPhi) {
          if (ea.x == x0 && eb.x == x0) v = u[a] * u[b];
        } else if (ea.kind == Kind::kPhi) {
          // eb is a rate of regime n = eb.m
          if (ea.x == x0) {
            const int n = eb.m;
            const double dj = ((n == ea.m ? 1.0 : 0.0) - post[ea.m]) / theta_hat.phi(x0, ea.m);
            const double dl = constrained ? ((n == last ? 1.0 : 0.0) - post[last]) * inv_last : 0.0;
            v = -post[n] * u[b] * (dj - dl);
          }
        } else {
          const int m = ea.m;
          const int n = eb.m;
          v = -post[m] * ((m == n ? 1.0 : 0.0) - post[n]) * u[a] * u[b];
          if (a == b) {
            const double q = theta_hat.rates[static_cast<std::size_t>(m)](ea.x, ea.y);
            v += post[m] * s.counts(ea.x, ea.y) / (q * q);
          }
        }
        j(a, b) += v;
      }
    }
  }
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < a; ++b) j(a, b) = j(b, a);
  }
  out.matrix = std::move(j);
  return out;
}

Vector standard_errors(const Matrix& j) {
  if (j.rows() != j.cols()) throw InvalidArgument("standard_errors: information matrix must be square");
  if (j.size() == 0) return Vector();
  Matrix inv;
  try {
    inv = invert(j);
  } catch (const SingularMatrixError&) {
    Eigen::JacobiSVD<Matrix> svd(j);
    const auto& sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "observed information is singular (condition number " << cond << ")";
    throw SingularMatrixError(msg.str());
  }
  Vector se(j.rows());
  for (Eigen::Index i = 0; i < j.rows(); ++i) {
    if (!(inv(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "observed information is not positive definite (inverse diagonal " << i + 1 << " is " << inv(i, i)
          << ")";
      throw SingularMatrixError(msg.str());
    }
    se[i] = std::sqrt(inv(i, i));
  }
  return se;
}

std::vector<ParameterSE> standard_errors(const FisherMatrix& j) {
  const Vector se = standard_errors(j.matrix);
  std::vector<ParameterSE> out(static_cast<std::size_t>(j.layout.size()));
  for (int i = 0; i < j.layout.size(); ++i) {
    auto& rec = out[static_cast<std::size_t>(i)];
    rec.name = j.layout.name(i);
    rec.value = j.values.size() > i ? j.values[i] : 0.0;
    rec.fixed_at_zero = true;
    rec.se = std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t k = 0; k < j.retained.size(); ++k) {
    auto& rec = out[static_cast<std::size_t>(j.retained[k])];
    rec.fixed_at_zero = false;
    rec.se = se[static_cast<Eigen::Index>(k)];
  }
  return out;
}

namespace {

void check_asymptotic_domain(const ModelParams& model, double horizon) {
  validate_model(model);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be a positive finite number");
  std::vector<std::string> zeros;
  for (int x = 0; x < model.num_states; ++x) {
    if (model.alpha[x] == 0.0) zeros.push_back("alpha[" + std::to_string(x + 1) + "]");
  }
  if (model.num_regimes > 1) {
    for (int x = 0; x < model.num_states; ++x) {
      for (int m = 0; m < model.num_regimes; ++m) {
        if (model.phi(x, m) == 0.0) {
          zeros.push_back("phi[" + std::to_string(x + 1) + "," + std::to_string(m + 1) + "]");
        }
      }
    }
  }
  for (int m = 0; m < model.num_regimes; ++m) {
    for (int x = 0; x < model.num_states; ++x) {
      for (int y = 0; y < model.num_states; ++y) {
        if (y != x && model.rates[static_cast<std::size_t>(m)](x, y) == 0.0) {
          zeros.push_back("q[" + std::to_string(x + 1) + "," + std::to_string(y + 1) + "," + std::to_string(m + 1) +
                          "]");
        }
      }
    }
  }
  if (!zeros.empty()) {
    std::string msg = "asymptotic formulas need nonzero parameters; zero:";
    for (const auto& z : zeros) msg += " " + z;
    throw DomainError(msg);
  }
}

// alpha' S_m (int_0^T e^{Q_m u} du) e_x for every (x, m): p x M.
Matrix expected_occupation(const ModelParams& model, double horizon) {
  Matrix out(model.num_states, model.num_regimes);
  for (int m = 0; m < model.num_regimes; ++m) {
    const Matrix integral = van_loan_integral(model.rates[static_cast<std::size_t>(m)], horizon);
    const Vector weight = model.alpha.cwiseProduct(model.phi.col(m));
    out.col(m) = integral.transpose() * weight;
  }
  return out;
}

ParamMatrix asymptotic_matrix(const ModelParams& model, double horizon, bool covariance) {
  check_asymptotic_domain(model, horizon);
  ParamMatrix out;
  out.layout = ParamLayout(model.num_states, model.num_regimes);
  out.values = to_vector(model);
  out.retained.resize(static_cast<std::size_t>(out.layout.size()));
  for (int i = 0; i < out.layout.size(); ++i) out.retained[static_cast<std::size_t>(i)] = i;
  const int n = out.layout.size();
  out.matrix = Matrix::Zero(n, n);
  const Matrix occ = expected_occupation(model, horizon);
  for (int a = 0; a < n; ++a) {
    const auto& ea = out.layout[a];
    if (ea.kind == Kind::kPhi) {
      for (int b = 0; b < n; ++b) {
        const auto& eb = out.layout[b];
        if (eb.kind != Kind::kPhi || eb.x != ea.x) continue;
        const double delta = ea.m == eb.m ? 1.0 : 0.0;
        const double alpha = model.alpha[ea.x];
        out.matrix(a, b) = covariance ? model.phi(ea.x, eb.m) / alpha * (delta - model.phi(ea.x, ea.m))
                                      : alpha / model.phi(ea.x, ea.m) * (delta - model.phi(ea.x, ea.m));
      }
    } else {
      const double q = model.rates[static_cast<std::size_t>(ea.m)](ea.x, ea.y);
      const double info = occ(ea.x, ea.m) / q;
      out.matrix(a, a) = covariance ? 1.0 / info : info;
    }
  }
  return out;
}

}  // namespace

ParamMatrix expected_fisher_complete(const ModelParams& model, double horizon) {
  return asymptotic_matrix(model, horizon, false);
}

ParamMatrix asymptotic_covariance(const ModelParams& model, double horizon) {
  return asymptotic_matrix(model, horizon, true);
}

CramerRaoReport cramer_rao(const ModelParams& model, double horizon) {
  const ParamMatrix ic = expected_fisher_complete(model, horizon);
  const ParamMatrix sigma = asymptotic_covariance(model, horizon);
  CramerRaoReport rep;
  rep.layout = ic.layout;
  rep.ic = ic.matrix;
  rep.sigma = sigma.matrix;
  const int n = rep.layout.size();
  rep.ic_inverse = Matrix::Zero(n, n);
  rep.ip_inverse = Matrix::Zero(n, n);

  const int block = model.num_regimes - 1;
  rep.phi_min_eigenvalue = std::numeric_limits<double>::infinity();
  if (block > 0) {
    for (int x = 0; x < model.num_states; ++x) {
      const int at = rep.layout.phi_index(x, 0);
      const Matrix icx = rep.ic.block(at, at, block, block);
      const Matrix sx = rep.sigma.block(at, at, block, block);
      const Matrix icx_inv = invert(icx);
      const Matrix ipx = principal_sqrt(sx * icx) * icx_inv;
      rep.ic_inverse.block(at, at, block, block) = icx_inv;
      rep.ip_inverse.block(at, at, block, block) = ipx;
      const Matrix diff = ipx - sx;
      const Matrix sym = 0.5 * (diff + diff.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
      rep.phi_min_eigenvalue = std::min(rep.phi_min_eigenvalue, es.eigenvalues().minCoeff());
    }
  }
  const int nphi = rep.layout.num_phi();
  const int nq = n - nphi;
  rep.q_max_abs_diff = 0.0;
  if (nq > 0) {
    const Matrix icq = rep.ic.block(nphi, nphi, nq, nq);
    const Matrix sq = rep.sigma.block(nphi, nphi, nq, nq);
    const Matrix icq_inv = invert(icq);
    const Matrix ipq = principal_sqrt(sq * icq) * icq_inv;
    rep.ic_inverse.block(nphi, nphi, nq, nq) = icq_inv;
    rep.ip_inverse.block(nphi, nphi, nq, nq) = ipq;
    rep.q_max_abs_diff = (ipq - sq).cwiseAbs().maxCoeff();
  }
  rep.phi_dominates = rep.phi_min_eigenvalue >= -1e-9;
  rep.q_equal = rep.q_max_abs_diff <= 1e-10;
  return rep;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_survival(double z) {
  if (!(z > 0.0)) return 1.0;
  if (z < 1.18) {
    // Theta-function form of the same distribution; the alternating series
    // converges too slowly near zero.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double k = 2.0 * j - 1.0;
      const double term = std::exp(-k * k * pi2 / (8.0 * z * z));
      cdf += term;
      if (term < 1e-16) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / z;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100000; ++j) {
    const double term = 2.0 * std::exp(-2.0 * j * j * z * z);
    sum += (j % 2 == 1) ? term : -term;
    if (j >= 100 && term < 1e-12) break;
    if (term < 1e-300) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_normal_test(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("ks_normal_test: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s) {
    if (!std::isfinite(v)) throw InvalidArgument("ks_normal_test: non-finite sample");
  }
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace cmjp
