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

#ifndef WINDGUARD_NN_H_
#define WINDGUARD_NN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace windguard {

// One tanh hidden layer and a linear output layer, preceded by per-dimension
// z-scoring of the input:
//   y = W2 tanh(W1 ((x - mean) / scale) + b1) + b2
class ShallowNetwork {
 public:
  ShallowNetwork() = default;
  ShallowNetwork(std::size_t input_dim, std::size_t hidden_dim,
                 std::size_t output_dim);

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(w2.rows()); }
  std::size_t num_parameters() const;

  // Throws DataError if the input length differs from input_dim().
  Eigen::VectorXd Forward(std::span<const double> input) const;
  // Rows of `inputs` are samples; returns one output row per sample.
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& inputs) const;

  // Applies the stored normalisation to every row, in place.
  void Normalize(Eigen::MatrixXd& inputs) const;
  // Rows of `inputs` must already be normalised.
  Eigen::MatrixXd ForwardNormalized(const Eigen::MatrixXd& inputs) const;

  // Throws DataError when shapes disagree or the scale has non-positive
  // entries.
  void Validate() const;

  // Parameters in a fixed order: w1 (column-major), b1, w2, b2.
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> params);

  bool operator==(const ShallowNetwork& other) const;

  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // output x hidden
  Eigen::VectorXd b2;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
};

struct NetworkGradient {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  std::vector<double> Flatten() const;
};

// Mean over samples and outputs of the squared error, on normalised inputs.
// Fills `gradient` (w.r.t. w1, b1, w2, b2) when non-null.
double MseLoss(const ShallowNetwork& net, const Eigen::MatrixXd& inputs,
               const Eigen::MatrixXd& targets, NetworkGradient* gradient);

enum class Optimizer { kConjugateGradient, kGradientDescent };

struct TrainingSettings {
  std::size_t hidden = 150;
  int max_iterations = 80;
  // Stop once the relative loss decrease stays below this for a few steps.
  double tolerance = 1e-7;
  // Conjugate directions restart as steepest descent this often.
  int restart_interval = 50;
  Optimizer optimizer = Optimizer::kConjugateGradient;
  // Gradient-descent step size.
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  // Floor on per-dimension input standard deviations.
  double min_scale = 1e-3;

  bool operator==(const TrainingSettings&) const = default;
};

struct TrainingResult {
  ShallowNetwork network;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  std::vector<double> loss_history;
};

// Fits the network to (inputs, targets), rows being samples. Normalisation
// statistics come from `inputs`. Throws DataError on empty or mismatched data
// and on a non-finite loss.
TrainingResult TrainNetwork(Eigen::MatrixXd inputs, const Eigen::MatrixXd& targets,
                            const TrainingSettings& settings);

}  // namespace windguard

#endif  // WINDGUARD_NN_H_
