#include "cmjp/model.hpp"

#include <cmath>
#include <sstream>

#include "cmjp/errors.hpp"

namespace cmjp {
namespace {

constexpr double kSumTol = 1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double ModelParams::exit_rate(int x, int m) const {
  const Matrix& q = rates[static_cast<std::size_t>(m)];
  double total = 0.0;
  for (int y = 0; y < num_states; ++y) {
    if (y != x) total += q(x, y);
  }
  return total;
}

std::vector<std::string> model_violations(const ModelParams& params) {
  std::vector<std::string> errs;
  const int p = params.num_states;
  const int m_count = params.num_regimes;
  if (p < 1) errs.push_back("p must be >= 1");
  if (m_count < 1) errs.push_back("M must be >= 1");
  if (!errs.empty()) return errs;

  if (params.alpha.size() != p) {
    errs.push_back("alpha has length " + std::to_string(params.alpha.size()) + ", expected " +
                   std::to_string(p));
  } else {
    double sum = 0.0;
    for (int x = 0; x < p; ++x) {
      const double a = params.alpha[x];
      if (!std::isfinite(a) || a < 0.0) {
        errs.push_back("alpha[" + std::to_string(x + 1) + "] = " + fmt(a) + " is negative or non-finite");
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > kSumTol) errs.push_back("alpha sums to " + fmt(sum));
  }

  if (params.phi.rows() != p || params.phi.cols() != m_count) {
    errs.push_back("phi has shape " + std::to_string(params.phi.rows()) + "x" +
                   std::to_string(params.phi.cols()) + ", expected " + std::to_string(p) + "x" +
                   std::to_string(m_count));
  } else {
    for (int x = 0; x < p; ++x) {
      double sum = 0.0;
      for (int m = 0; m < m_count; ++m) {
        const double v = params.phi(x, m);
        if (!std::isfinite(v) || v < 0.0) {
          errs.push_back("phi[" + std::to_string(x + 1) + "," + std::to_string(m + 1) + "] = " + fmt(v) +
                         " is negative or non-finite");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kSumTol) {
        errs.push_back("phi row " + std::to_string(x + 1) + " sums to " + fmt(sum) + " (must be 1)");
      }
    }
  }

  if (static_cast<int>(params.rates.size()) != m_count) {
    errs.push_back("Q has " + std::to_string(params.rates.size()) + " matrices, expected " +
                   std::to_string(m_count));
    return errs;
  }
  for (int m = 0; m < m_count; ++m) {
    const Matrix& q = params.rates[static_cast<std::size_t>(m)];
    const std::string tag = "Q[" + std::to_string(m + 1) + "]";
    if (q.rows() != p || q.cols() != p) {
      errs.push_back(tag + " is not " + std::to_string(p) + "x" + std::to_string(p));
      continue;
    }
    for (int x = 0; x < p; ++x) {
      double sum = 0.0;
      for (int y = 0; y < p; ++y) {
        const double v = q(x, y);
        if (!std::isfinite(v)) {
          errs.push_back(tag + "(" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ") is non-finite");
        } else if (y != x && v < 0.0) {
          errs.push_back(tag + "(" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ") = " + fmt(v) +
                         " is a negative rate");
        }
        sum += v;
      }
      if (q(x, x) > 0.0) {
        errs.push_back(tag + " row " + std::to_string(x + 1) + " has positive diagonal " + fmt(q(x, x)));
      }
      if (std::abs(sum) > kSumTol * std::max(1.0, std::abs(q(x, x)))) {
        errs.push_back(tag + " row " + std::to_string(x + 1) + " sums to " + fmt(sum));
      }
    }
  }
  return errs;
}

const ModelParams& validate_model(const ModelParams& params) {
  const auto errs = model_violations(params);
  if (!errs.empty()) {
    std::string msg = "invalid model:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw InvalidArgument(msg);
  }
  return params;
}

void validate_path(const Path& path, int num_states) {
  const std::string tag = "path " + std::to_string(path.id) + ": ";
  if (path.times.empty() || path.times.size() != path.states.size()) {
    throw InvalidArgument(tag + "times and states must be non-empty and of equal length");
  }
  if (path.times[0] != 0.0) throw InvalidArgument(tag + "times[0] must be 0");
  if (!std::isfinite(path.horizon)) throw InvalidArgument(tag + "horizon must be finite");
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    if (path.states[i] < 0 || path.states[i] >= num_states) {
      throw InvalidArgument(tag + "state " + std::to_string(path.states[i] + 1) + " out of range 1.." +
                            std::to_string(num_states));
    }
    if (!std::isfinite(path.times[i])) throw InvalidArgument(tag + "non-finite epoch time");
    if (i > 0) {
      if (!(path.times[i] > path.times[i - 1])) {
        throw InvalidArgument(tag + "times must be strictly increasing");
      }
      if (path.states[i] == path.states[i - 1]) {
        throw InvalidArgument(tag + "consecutive states must differ");
      }
    }
  }
  if (path.times.back() > path.horizon) {
    throw InvalidArgument(tag + "last epoch exceeds horizon");
  }
}

Matrix embedded_chain(const Matrix& generator) {
  const Eigen::Index p = generator.rows();
  Matrix pi = Matrix::Zero(p, p);
  for (Eigen::Index x = 0; x < p; ++x) {
    double exit = 0.0;
    for (Eigen::Index y = 0; y < p; ++y) {
      if (y != x) exit += generator(x, y);
    }
    if (exit <= 0.0) continue;
    for (Eigen::Index y = 0; y < p; ++y) {
      if (y != x) pi(x, y) = generator(x, y) / exit;
    }
  }
  return pi;
}

SufficientStats path_stats(const Path& path, int num_states) {
  validate_path(path, num_states);
  SufficientStats s;
  s.id = path.id;
  s.initial_state = path.states[0];
  s.initial = Vector::Zero(num_states);
  s.initial[s.initial_state] = 1.0;
  s.counts = Matrix::Zero(num_states, num_states);
  s.occupation = Vector::Zero(num_states);
  s.horizon = path.horizon;
  const std::size_t n = path.states.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    s.counts(path.states[k], path.states[k + 1]) += 1.0;
    s.occupation[path.states[k]] += path.times[k + 1] - path.times[k];
  }
  s.occupation[path.states[n - 1]] += path.horizon - path.times[n - 1];
  return s;
}

ParamLayout::ParamLayout(int num_states, int num_regimes)
    : num_states_(num_states), num_regimes_(num_regimes) {
  if (num_states < 1 || num_regimes < 1) {
    throw InvalidArgument("ParamLayout: p and M must be >= 1");
  }
  for (int x = 0; x < num_states; ++x) {
    for (int m = 0; m + 1 < num_regimes; ++m) entries_.push_back({Kind::kPhi, x, -1, m});
  }
  for (int m = 0; m < num_regimes; ++m) {
    for (int x = 0; x < num_states; ++x) {
      for (int y = 0; y < num_states; ++y) {
        if (y != x) entries_.push_back({Kind::kRate, x, y, m});
      }
    }
  }
}

int ParamLayout::phi_index(int x, int m) const { return x * (num_regimes_ - 1) + m; }

int ParamLayout::rate_index(int x, int y, int m) const {
  const int p = num_states_;
  return num_phi() + m * p * (p - 1) + x * (p - 1) + (y < x ? y : y - 1);
}

std::string ParamLayout::name(int i) const {
  const Entry& e = (*this)[i];
  if (e.kind == Kind::kPhi) {
    return "phi[" + std::to_string(e.x + 1) + "," + std::to_string(e.m + 1) + "]";
  }
  return "q[" + std::to_string(e.x + 1) + "," + std::to_string(e.y + 1) + "," + std::to_string(e.m + 1) + "]";
}

int free_parameter_count(int num_states, int num_regimes) {
  return num_states * (num_regimes - 1) + num_regimes * num_states * (num_states - 1);
}

Vector to_vector(const ModelParams& params) {
  const ParamLayout layout(params.num_states, params.num_regimes);
  Vector v(layout.size());
  for (int i = 0; i < layout.size(); ++i) {
    const auto& e = layout[i];
    v[i] = e.kind == ParamLayout::Kind::kPhi ? params.phi(e.x, e.m)
                                             : params.rates[static_cast<std::size_t>(e.m)](e.x, e.y);
  }
  return v;
}

ModelParams from_vector(const Vector& values, int num_states, int num_regimes, const Vector& alpha) {
  const ParamLayout layout(num_states, num_regimes);
  if (values.size() != layout.size()) {
    throw InvalidArgument("from_vector: expected " + std::to_string(layout.size()) + " values, got " +
                          std::to_string(values.size()));
  }
  ModelParams out;
  out.num_states = num_states;
  out.num_regimes = num_regimes;
  out.alpha = alpha;
  out.phi = Matrix::Zero(num_states, num_regimes);
  out.rates.assign(static_cast<std::size_t>(num_regimes), Matrix::Zero(num_states, num_states));
  for (int i = 0; i < layout.size(); ++i) {
    const auto& e = layout[i];
    if (e.kind == ParamLayout::Kind::kPhi) {
      out.phi(e.x, e.m) = values[i];
    } else {
      out.rates[static_cast<std::size_t>(e.m)](e.x, e.y) = values[i];
    }
  }
  for (int x = 0; x < num_states; ++x) {
    double rest = 1.0;
    for (int m = 0; m + 1 < num_regimes; ++m) rest -= out.phi(x, m);
    out.phi(x, num_regimes - 1) = rest;
  }
  for (auto& q : out.rates) {
    for (int x = 0; x < num_states; ++x) {
      double exit = 0.0;
      for (int y = 0; y < num_states; ++y) {
        if (y != x) exit += q(x, y);
      }
      q(x, x) = -exit;
    }
  }
  return out;
}

ModelParams permute_regimes(const ModelParams& params, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != params.num_regimes) {
    throw InvalidArgument("permute_regimes: order has wrong length");
  }
  ModelParams out = params;
  for (int j = 0; j < params.num_regimes; ++j) {
    out.phi.col(j) = params.phi.col(order[static_cast<std::size_t>(j)]);
    out.rates[static_cast<std::size_t>(j)] = params.rates[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  }
  return out;
}

}  // namespace cmjp
