/*
 * Copyright 2026 The viewbpr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <viewbpr/core.hpp>
#include <viewbpr/eval.hpp>
#include <viewbpr/samplers.hpp>

#include <functional>

namespace viewbpr {

/// 1 / (1 + exp(-x)) without overflow for any finite x.
double sigmoid(double x);

/// -ln sigmoid(x), computed as a softplus so it stays finite for large |x|.
double neg_log_sigmoid(double x);

// ---------------------------------------------------------------------------
// Step sizes
// ---------------------------------------------------------------------------

inline constexpr double kAdagradEpsilon = 1e-8;

/// accumulator += g^2; returns base_rate / sqrt(accumulator + eps).
double adagrad_rate(double& accumulator, double base_rate, double gradient);

/**
 * Applies theta += rate * g to model rows. Fixed mode uses the base rate;
 * Adagrad mode keeps one squared-gradient accumulator per parameter.
 */
class StepRule {
 public:
  explicit StepRule(double rate) : mode_(LearningRateMode::Fixed), rate_(rate) {}
  StepRule(LearningRateMode mode, double rate, std::size_t num_users,
           std::size_t num_items, std::size_t factors);

  void apply_user(FactorModel& model, UserIndex u, std::span<const double> grad);
  void apply_item(FactorModel& model, ItemIndex i, std::span<const double> grad);

  LearningRateMode mode() const { return mode_; }
  double base_rate() const { return rate_; }

 private:
  void apply(std::span<double> row, std::span<double> acc,
             std::span<const double> grad);

  LearningRateMode mode_;
  double rate_;
  Matrix user_acc_;
  Matrix item_acc_;
};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// Ascent directions (negative loss gradients, L2 term included) for the
/// factors touched by one pairwise example.
struct PairGradient {
  std::vector<double> user;
  std::vector<double> pos;
  std::vector<double> neg;
};

struct QuadGradient {
  std::vector<double> user;
  std::vector<double> purchased;
  std::vector<double> viewed;
  std::vector<double> unobserved;
};

/// -ln sigmoid(r_ui - r_uj).
double bpr_loss(const FactorModel& model, const Triple& t);

/// -ln s(r_ui - r_uj) - a ln s(r_ui - r_uv) - (1 - a) ln s(r_uv - r_uj).
double view_loss(const FactorModel& model, const QuadExample& q, double alpha);

PairGradient bpr_gradient(const FactorModel& model, const Triple& t,
                          double regularization);
QuadGradient view_loss_gradient(const FactorModel& model, const QuadExample& q,
                                double alpha, double regularization);

/// One SGD update from the pre-update factors; returns the pre-update loss.
double bpr_step(FactorModel& model, const Triple& t, StepRule& rule,
                double regularization);
double bpr_step(FactorModel& model, const Triple& t, double rate,
                double regularization);

double view_loss_step(FactorModel& model, const QuadExample& q, double alpha,
                      StepRule& rule, double regularization);
double view_loss_step(FactorModel& model, const QuadExample& q, double alpha,
                      double rate, double regularization);

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double hr = 0.0;
  double ndcg = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> rows;
  std::size_t best_epoch = 0;
  std::size_t k = 100;
  bool stopped_early = false;

  const EpochRecord& best() const { return rows.at(best_epoch - 1); }
};

/**
 * Validation-loss early stopping: halts once the loss has risen for
 * patience + 1 consecutive epochs; the best epoch is the lowest loss seen.
 */
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records the next epoch's loss; returns true if it is the new best.
  bool record(double validation_loss);
  bool should_stop() const { return rises_ > patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t rises_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = 0.0;
  double last_loss_ = 0.0;
};

struct TrainHooks {
  // Replaces the computed validation loss (used to script early stopping).
  std::function<double(const FactorModel&, std::size_t epoch)> validation_loss;
  // Called after every completed epoch with the current model.
  std::function<void(const FactorModel&, const EpochRecord&)> on_epoch;
};

struct TrainResult {
  FactorModel model;  // best-validation epoch
  TrainReport report;
};

/**
 * SGD over examples from the configured sampler. Each epoch runs
 * steps_per_epoch updates, then records the mean training loss, the
 * validation loss (validation purchases against negatives drawn by the
 * active sampler from a fixed seed) and test HR/NDCG at train.eval_k.
 * Throws DivergenceError naming the step when a loss turns non-finite.
 */
TrainResult run_training(const Splits& splits, const SamplerConfig& sampler,
                         const WeightingConfig& weighting, const TrainConfig& train,
                         const TrainHooks& hooks = {});

}  // namespace viewbpr
