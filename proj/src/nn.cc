// Copyright 2026 The Windguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "windguard/nn.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "windguard/errors.h"

namespace windguard {
namespace {

template <typename A, typename B>
bool SameExact(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

void AppendAll(std::vector<double>& out, const Eigen::MatrixXd& m) {
  out.insert(out.end(), m.data(), m.data() + m.size());
}
void AppendAll(std::vector<double>& out, const Eigen::VectorXd& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

double Dot(const NetworkGradient& a, const NetworkGradient& b) {
  return a.w1.cwiseProduct(b.w1).sum() + a.b1.dot(b.b1) +
         a.w2.cwiseProduct(b.w2).sum() + a.b2.dot(b.b2);
}

void Step(ShallowNetwork& net, const NetworkGradient& dir, double alpha) {
  net.w1 += alpha * dir.w1;
  net.b1 += alpha * dir.b1;
  net.w2 += alpha * dir.w2;
  net.b2 += alpha * dir.b2;
}

NetworkGradient Scaled(const NetworkGradient& g, double s) {
  return {s * g.w1, s * g.b1, s * g.w2, s * g.b2};
}

// Training objective with the hidden pre-activations cached. Along a search
// direction the pre-activations move linearly,
//   Z(alpha) = Z + alpha (X D1^T + 1 e1^T),
// so line-search trials need no pass over the wide input matrix.
class CachedObjective {
 public:
  CachedObjective(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets)
      : x_(inputs),
        y_(targets),
        scale_(1.0 / static_cast<double>(targets.rows() * targets.cols())) {}

  void Reset(const ShallowNetwork& net) {
    z_.noalias() = x_ * net.w1.transpose();
    z_.rowwise() += net.b1.transpose();
  }

  double LossAndGradient(const ShallowNetwork& net, NetworkGradient* g) const {
    const Eigen::MatrixXd a = z_.array().tanh().matrix();
    Eigen::MatrixXd err = a * net.w2.transpose();
    err.rowwise() += net.b2.transpose();
    err -= y_;
    const double loss = scale_ * err.squaredNorm();
    if (g != nullptr) {
      const Eigen::MatrixXd delta2 = (2.0 * scale_) * err;
      g->w2.noalias() = delta2.transpose() * a;
      g->b2 = delta2.colwise().sum().transpose();
      const Eigen::MatrixXd delta1 =
          ((delta2 * net.w2).array() * (1.0 - a.array().square())).matrix();
      g->w1.noalias() = delta1.transpose() * x_;
      g->b1 = delta1.colwise().sum().transpose();
    }
    return loss;
  }

  void SetDirection(const NetworkGradient& d) {
    zd_.noalias() = x_ * d.w1.transpose();
    zd_.rowwise() += d.b1.transpose();
  }

  // Loss and its derivative at net + alpha * d.
  void Line(const ShallowNetwork& net, const NetworkGradient& d, double alpha,
            double* value, double* slope) const {
    const Eigen::MatrixXd a = (z_ + alpha * zd_).array().tanh().matrix();
    const Eigen::MatrixXd w2 = net.w2 + alpha * d.w2;
    Eigen::MatrixXd err = a * w2.transpose();
    err.rowwise() += (net.b2 + alpha * d.b2).transpose();
    err -= y_;
    *value = scale_ * err.squaredNorm();
    const Eigen::MatrixXd da = (1.0 - a.array().square()) * zd_.array();
    Eigen::MatrixXd dp = da * w2.transpose() + a * d.w2.transpose();
    dp.rowwise() += d.b2.transpose();
    *slope = 2.0 * scale_ * err.cwiseProduct(dp).sum();
  }

  void Advance(double alpha) { z_ += alpha * zd_; }

 private:
  const Eigen::MatrixXd& x_;
  const Eigen::MatrixXd& y_;
  double scale_;
  Eigen::MatrixXd z_;
  Eigen::MatrixXd zd_;
};

struct LineResult {
  double alpha = 0.0;
  double value = 0.0;
};

// Bracketing search for an approximate minimiser along `d`, stopping at the
// strong Wolfe curvature condition. Returns the best point evaluated.
LineResult SearchLine(const CachedObjective& f, const ShallowNetwork& net,
                      const NetworkGradient& d, double value0, double slope0,
                      double alpha0) {
  constexpr double kArmijo = 1e-4;
  constexpr double kCurvature = 0.1;
  LineResult best{0.0, value0};
  double lo = 0.0;
  double slope_lo = slope0;
  double hi = -1.0;
  double slope_hi = 0.0;
  double alpha = alpha0;
  for (int k = 0; k < 40; ++k) {
    double value = 0.0;
    double slope = 0.0;
    f.Line(net, d, alpha, &value, &slope);
    if (!std::isfinite(value)) {
      hi = alpha;
      slope_hi = 1.0;
    } else {
      if (value < best.value) best = {alpha, value};
      const bool armijo = value <= value0 + kArmijo * alpha * slope0;
      if (armijo && std::abs(slope) <= kCurvature * std::abs(slope0)) break;
      if (!armijo || slope >= 0.0) {
        hi = alpha;
        slope_hi = slope;
      } else {
        lo = alpha;
        slope_lo = slope;
      }
    }
    if (hi < 0.0) {
      alpha *= 2.0;
      continue;
    }
    // Secant on the derivative when it brackets a sign change, else bisect.
    double next = 0.5 * (lo + hi);
    if (slope_lo < 0.0 && slope_hi > 0.0) {
      next = lo + (hi - lo) * slope_lo / (slope_lo - slope_hi);
    }
    const double width = hi - lo;
    alpha = std::clamp(next, lo + 0.1 * width, hi - 0.1 * width);
    if (width < 1e-14 * std::max(1.0, hi)) break;
  }
  return best;
}

void InitializeParameters(ShallowNetwork& net, const Eigen::MatrixXd& targets,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double in = static_cast<double>(net.input_dim());
  const double hid = static_cast<double>(net.hidden_dim());
  const double out = static_cast<double>(net.output_dim());
  std::uniform_real_distribution<double> first(-std::sqrt(6.0 / (in + hid)),
                                               std::sqrt(6.0 / (in + hid)));
  std::uniform_real_distribution<double> second(-std::sqrt(6.0 / (hid + out)),
                                                std::sqrt(6.0 / (hid + out)));
  for (Eigen::Index j = 0; j < net.w1.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w1.rows(); ++i) net.w1(i, j) = first(rng);
  }
  net.b1.setZero();
  for (Eigen::Index j = 0; j < net.w2.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w2.rows(); ++i) net.w2(i, j) = second(rng);
  }
  net.b2 = targets.colwise().mean().transpose();
}

void FitNormalization(ShallowNetwork& net, const Eigen::MatrixXd& inputs,
                      double min_scale) {
  const double n = static_cast<double>(inputs.rows());
  net.input_mean = inputs.colwise().mean().transpose();
  net.input_scale.resize(inputs.cols());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    const double var =
        (inputs.col(j).array() - net.input_mean(j)).square().sum() / n;
    net.input_scale(j) = std::max(std::sqrt(var), min_scale);
  }
}

void CheckFinite(double loss, int iteration) {
  if (!std::isfinite(loss)) {
    throw DataError("training diverged: non-finite loss at iteration " +
                    std::to_string(iteration));
  }
}

}  // namespace

ShallowNetwork::ShallowNetwork(std::size_t input_dim, std::size_t hidden_dim,
                               std::size_t output_dim)
    : w1(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden_dim),
                               static_cast<Eigen::Index>(input_dim))),
      b1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden_dim))),
      w2(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(output_dim),
                               static_cast<Eigen::Index>(hidden_dim))),
      b2(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_dim))),
      input_mean(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(input_dim))),
      input_scale(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(input_dim))) {}

std::size_t ShallowNetwork::num_parameters() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

void ShallowNetwork::Validate() const {
  if (b1.size() != w1.rows() || w2.cols() != w1.rows() || b2.size() != w2.rows() ||
      input_mean.size() != w1.cols() || input_scale.size() != w1.cols()) {
    throw DataError("network parameter shapes are inconsistent");
  }
  if (w1.size() == 0 || w2.size() == 0) throw DataError("network has no weights");
  if (!(input_scale.array() > 0.0).all()) {
    throw DataError("network input scale must be positive on every dimension");
  }
}

void ShallowNetwork::Normalize(Eigen::MatrixXd& inputs) const {
  inputs.rowwise() -= input_mean.transpose();
  inputs.array().rowwise() /= input_scale.transpose().array();
}

Eigen::MatrixXd ShallowNetwork::ForwardNormalized(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd z = inputs * w1.transpose();
  z.rowwise() += b1.transpose();
  Eigen::MatrixXd out = z.array().tanh().matrix() * w2.transpose();
  out.rowwise() += b2.transpose();
  return out;
}

Eigen::MatrixXd ShallowNetwork::ForwardBatch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_dim()) {
    throw DataError("network expects " + std::to_string(input_dim()) +
                    " inputs, got " + std::to_string(inputs.cols()));
  }
  Eigen::MatrixXd normalized = inputs;
  Normalize(normalized);
  return ForwardNormalized(normalized);
}

Eigen::VectorXd ShallowNetwork::Forward(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw DataError("network expects " + std::to_string(input_dim()) +
                    " inputs, got " + std::to_string(input.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> x(input.data(),
                                            static_cast<Eigen::Index>(input.size()));
  const Eigen::VectorXd normalized =
      ((x - input_mean).array() / input_scale.array()).matrix();
  const Eigen::VectorXd hidden = (w1 * normalized + b1).array().tanh().matrix();
  return w2 * hidden + b2;
}

std::vector<double> ShallowNetwork::Flatten() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  AppendAll(out, w1);
  AppendAll(out, b1);
  AppendAll(out, w2);
  AppendAll(out, b2);
  return out;
}

void ShallowNetwork::Unflatten(std::span<const double> params) {
  if (params.size() != num_parameters()) {
    throw DataError("parameter vector has the wrong length");
  }
  const double* p = params.data();
  std::copy_n(p, w1.size(), w1.data());
  p += w1.size();
  std::copy_n(p, b1.size(), b1.data());
  p += b1.size();
  std::copy_n(p, w2.size(), w2.data());
  p += w2.size();
  std::copy_n(p, b2.size(), b2.data());
}

bool ShallowNetwork::operator==(const ShallowNetwork& other) const {
  return SameExact(w1, other.w1) && SameExact(b1, other.b1) &&
         SameExact(w2, other.w2) && SameExact(b2, other.b2) &&
         SameExact(input_mean, other.input_mean) &&
         SameExact(input_scale, other.input_scale);
}

std::vector<double> NetworkGradient::Flatten() const {
  std::vector<double> out;
  AppendAll(out, w1);
  AppendAll(out, b1);
  AppendAll(out, w2);
  AppendAll(out, b2);
  return out;
}

double MseLoss(const ShallowNetwork& net, const Eigen::MatrixXd& inputs,
               const Eigen::MatrixXd& targets, NetworkGradient* gradient) {
  if (inputs.rows() != targets.rows() ||
      static_cast<std::size_t>(inputs.cols()) != net.input_dim() ||
      static_cast<std::size_t>(targets.cols()) != net.output_dim()) {
    throw DataError("loss inputs do not match the network shape");
  }
  const double scale = 1.0 / static_cast<double>(targets.rows() * targets.cols());
  Eigen::MatrixXd z = inputs * net.w1.transpose();
  z.rowwise() += net.b1.transpose();
  const Eigen::MatrixXd a = z.array().tanh().matrix();
  Eigen::MatrixXd err = a * net.w2.transpose();
  err.rowwise() += net.b2.transpose();
  err -= targets;
  if (gradient != nullptr) {
    const Eigen::MatrixXd delta2 = (2.0 * scale) * err;
    gradient->w2 = delta2.transpose() * a;
    gradient->b2 = delta2.colwise().sum().transpose();
    const Eigen::MatrixXd delta1 =
        ((delta2 * net.w2).array() * (1.0 - a.array().square())).matrix();
    gradient->w1 = delta1.transpose() * inputs;
    gradient->b1 = delta1.colwise().sum().transpose();
  }
  return scale * err.squaredNorm();
}

TrainingResult TrainNetwork(Eigen::MatrixXd inputs, const Eigen::MatrixXd& targets,
                            const TrainingSettings& settings) {
  if (inputs.rows() == 0 || targets.rows() == 0) {
    throw DataError("training set is empty");
  }
  if (inputs.rows() != targets.rows()) {
    throw DataError("training inputs and targets differ in sample count");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw DataError("training data contains non-finite values");
  }
  if (settings.hidden == 0) throw ConfigError("hidden layer size must be positive");

  TrainingResult result;
  ShallowNetwork& net = result.network;
  net = ShallowNetwork(static_cast<std::size_t>(inputs.cols()), settings.hidden,
                       static_cast<std::size_t>(targets.cols()));
  FitNormalization(net, inputs, settings.min_scale);
  net.Normalize(inputs);
  InitializeParameters(net, targets, settings.seed);

  CachedObjective objective(inputs, targets);
  objective.Reset(net);
  NetworkGradient grad;
  double loss = objective.LossAndGradient(net, &grad);
  CheckFinite(loss, 0);
  result.initial_loss = loss;
  result.loss_history.push_back(loss);

  NetworkGradient dir = Scaled(grad, -1.0);
  bool steepest = true;
  double prev_alpha = 1.0 / std::max(1.0, std::sqrt(Dot(dir, dir)));
  double prev_slope = 0.0;
  int stalled = 0;
  if (settings.optimizer == Optimizer::kConjugateGradient) objective.SetDirection(dir);

  for (int it = 1; it <= settings.max_iterations; ++it) {
    double next_loss = loss;
    if (settings.optimizer == Optimizer::kGradientDescent) {
      Step(net, grad, -settings.learning_rate);
      objective.Reset(net);
      next_loss = objective.LossAndGradient(net, &grad);
    } else {
      double slope = Dot(grad, dir);
      if (!(slope < 0.0)) {
        dir = Scaled(grad, -1.0);
        steepest = true;
        objective.SetDirection(dir);
        slope = -Dot(grad, grad);
      }
      const double alpha0 =
          prev_slope < 0.0 ? std::min(prev_alpha * prev_slope / slope * 2.0, 1e6)
                           : prev_alpha;
      const LineResult line = SearchLine(objective, net, dir, loss, slope, alpha0);
      if (line.alpha <= 0.0) {
        if (steepest) break;  // no descent along the gradient: converged
        dir = Scaled(grad, -1.0);
        steepest = true;
        objective.SetDirection(dir);
        continue;
      }
      Step(net, dir, line.alpha);
      objective.Advance(line.alpha);
      if (it % 25 == 0) objective.Reset(net);
      prev_alpha = line.alpha;
      prev_slope = slope;

      NetworkGradient next_grad;
      next_loss = objective.LossAndGradient(net, &next_grad);
      CheckFinite(next_loss, it);
      // Polak-Ribiere with non-negativity reset and periodic restarts.
      const double denom = Dot(grad, grad);
      double beta = 0.0;
      if (denom > 0.0 && it % std::max(settings.restart_interval, 1) != 0) {
        beta = std::max(0.0, (Dot(next_grad, next_grad) - Dot(next_grad, grad)) / denom);
      }
      NetworkGradient next_dir = Scaled(next_grad, -1.0);
      if (beta > 0.0) {
        next_dir.w1 += beta * dir.w1;
        next_dir.b1 += beta * dir.b1;
        next_dir.w2 += beta * dir.w2;
        next_dir.b2 += beta * dir.b2;
      }
      steepest = beta == 0.0;
      dir = std::move(next_dir);
      grad = std::move(next_grad);
      objective.SetDirection(dir);
    }
    CheckFinite(next_loss, it);
    const double improvement = (loss - next_loss) / std::max(loss, 1e-300);
    loss = next_loss;
    result.loss_history.push_back(loss);
    result.iterations = it;
    stalled = improvement < settings.tolerance ? stalled + 1 : 0;
    if (stalled >= 3) break;
  }
  // Report the loss of the returned parameters without cached drift.
  result.final_loss = MseLoss(net, inputs, targets, nullptr);
  CheckFinite(result.final_loss, result.iterations);
  return result;
}

}  // namespace windguard
