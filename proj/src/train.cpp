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

#include <viewbpr/train.hpp>

#include <viewbpr/ingest.hpp>
#include <viewbpr/model.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

namespace viewbpr {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double neg_log_sigmoid(double x) {
  if (x >= 0.0) {
    return std::log1p(std::exp(-x));
  }
  return -x + std::log1p(std::exp(x));
}

double adagrad_rate(double& accumulator, double base_rate, double gradient) {
  accumulator += gradient * gradient;
  return base_rate / std::sqrt(accumulator + kAdagradEpsilon);
}

StepRule::StepRule(LearningRateMode mode, double rate, std::size_t num_users,
                   std::size_t num_items, std::size_t factors)
    : mode_(mode), rate_(rate) {
  if (mode_ == LearningRateMode::Adagrad) {
    user_acc_ = Matrix(num_users, factors);
    item_acc_ = Matrix(num_items, factors);
  }
}

void StepRule::apply(std::span<double> row, std::span<double> acc,
                     std::span<const double> grad) {
  if (mode_ == LearningRateMode::Fixed) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      row[f] += rate_ * grad[f];
    }
    return;
  }
  for (std::size_t f = 0; f < row.size(); ++f) {
    row[f] += adagrad_rate(acc[f], rate_, grad[f]) * grad[f];
  }
}

void StepRule::apply_user(FactorModel& model, UserIndex u,
                          std::span<const double> grad) {
  apply(model.users.row(u),
        mode_ == LearningRateMode::Adagrad ? user_acc_.row(u) : std::span<double>{},
        grad);
}

void StepRule::apply_item(FactorModel& model, ItemIndex i,
                          std::span<const double> grad) {
  apply(model.items.row(i),
        mode_ == LearningRateMode::Adagrad ? item_acc_.row(i) : std::span<double>{},
        grad);
}

double bpr_loss(const FactorModel& model, const Triple& t) {
  return neg_log_sigmoid(predict(model, t.user, t.pos) - predict(model, t.user, t.neg));
}

double view_loss(const FactorModel& model, const QuadExample& q, double alpha) {
  const double r_i = predict(model, q.user, q.purchased);
  const double r_v = predict(model, q.user, q.viewed);
  const double r_j = predict(model, q.user, q.unobserved);
  return neg_log_sigmoid(r_i - r_j) + alpha * neg_log_sigmoid(r_i - r_v) +
         (1.0 - alpha) * neg_log_sigmoid(r_v - r_j);
}

PairGradient bpr_gradient(const FactorModel& model, const Triple& t,
                          double regularization) {
  const auto p = model.users.row(t.user);
  const auto qi = model.items.row(t.pos);
  const auto qj = model.items.row(t.neg);
  const double delta = sigmoid(-(dot(p, qi) - dot(p, qj)));
  const auto k = model.factors();
  PairGradient g{std::vector<double>(k), std::vector<double>(k),
                 std::vector<double>(k)};
  for (std::size_t f = 0; f < k; ++f) {
    g.user[f] = delta * (qi[f] - qj[f]) - regularization * p[f];
    g.pos[f] = delta * p[f] - regularization * qi[f];
    g.neg[f] = -delta * p[f] - regularization * qj[f];
  }
  return g;
}

QuadGradient view_loss_gradient(const FactorModel& model, const QuadExample& q,
                                double alpha, double regularization) {
  const auto p = model.users.row(q.user);
  const auto qi = model.items.row(q.purchased);
  const auto qv = model.items.row(q.viewed);
  const auto qj = model.items.row(q.unobserved);
  const double r_i = dot(p, qi);
  const double r_v = dot(p, qv);
  const double r_j = dot(p, qj);
  const double d_ij = sigmoid(-(r_i - r_j));
  const double d_iv = alpha * sigmoid(-(r_i - r_v));
  const double d_vj = (1.0 - alpha) * sigmoid(-(r_v - r_j));
  const auto k = model.factors();
  QuadGradient g{std::vector<double>(k), std::vector<double>(k),
                 std::vector<double>(k), std::vector<double>(k)};
  for (std::size_t f = 0; f < k; ++f) {
    g.user[f] = d_ij * (qi[f] - qj[f]) + d_iv * (qi[f] - qv[f]) +
                d_vj * (qv[f] - qj[f]) - regularization * p[f];
    g.purchased[f] = (d_ij + d_iv) * p[f] - regularization * qi[f];
    g.viewed[f] = (-d_iv + d_vj) * p[f] - regularization * qv[f];
    g.unobserved[f] = (-d_ij - d_vj) * p[f] - regularization * qj[f];
  }
  return g;
}

double bpr_step(FactorModel& model, const Triple& t, StepRule& rule,
                double regularization) {
  const double loss = bpr_loss(model, t);
  const auto g = bpr_gradient(model, t, regularization);
  rule.apply_user(model, t.user, g.user);
  rule.apply_item(model, t.pos, g.pos);
  rule.apply_item(model, t.neg, g.neg);
  return loss;
}

double bpr_step(FactorModel& model, const Triple& t, double rate,
                double regularization) {
  StepRule rule(rate);
  return bpr_step(model, t, rule, regularization);
}

double view_loss_step(FactorModel& model, const QuadExample& q, double alpha,
                      StepRule& rule, double regularization) {
  const double loss = view_loss(model, q, alpha);
  const auto g = view_loss_gradient(model, q, alpha, regularization);
  rule.apply_user(model, q.user, g.user);
  rule.apply_item(model, q.purchased, g.purchased);
  rule.apply_item(model, q.viewed, g.viewed);
  rule.apply_item(model, q.unobserved, g.unobserved);
  return loss;
}

double view_loss_step(FactorModel& model, const QuadExample& q, double alpha,
                      double rate, double regularization) {
  StepRule rule(rate);
  return view_loss_step(model, q, alpha, rule, regularization);
}

bool EarlyStopping::record(double validation_loss) {
  ++epoch_;
  if (epoch_ > 1 && validation_loss > last_loss_) {
    ++rises_;
  } else {
    rises_ = 0;
  }
  last_loss_ = validation_loss;
  if (epoch_ == 1 || validation_loss < best_loss_) {
    best_loss_ = validation_loss;
    best_epoch_ = epoch_;
    return true;
  }
  return false;
}

namespace {

// Seed streams of one run.
enum Stream : std::uint64_t {
  kSamplingStream = 0,
  kInitStream = 1,
  kSpaceStream = 2,
  kValidationStream = 3,
};

std::size_t uniform_below(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Uniform negative from the pool that also differs from `pos`. Falls back to
// an arbitrary pool item when the pool holds nothing else.
ItemIndex draw_negative_except(const FeedbackDataset& data, UserIndex u,
                               NegativePool pool, ItemIndex pos, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto j = draw_negative(data, u, pool, rng);
    if (j != pos) {
      return j;
    }
  }
  for (ItemIndex j = 0; j < data.num_items(); ++j) {
    if (j != pos && in_negative_pool(data, u, j, pool)) {
      return j;
    }
  }
  throw std::logic_error("user " + std::to_string(u) +
                         " has no negative besides the held-out item");
}

class ExampleSource {
 public:
  ExampleSource(const Splits& splits, const SamplerConfig& config,
                std::vector<double> alphas, std::uint64_t seed)
      : splits_(splits),
        data_(splits.train),
        config_(config),
        pool_(config.negative_pool()),
        alphas_(std::move(alphas)) {
    if (config_.kind == SamplerKind::ReducedSpace) {
      Rng space_rng(derive_seed(seed, kSpaceStream));
      spaces_ = build_reduced_spaces(data_, config_.gamma, space_rng, pool_);
    }
    if (config_.kind == SamplerKind::TripleView &&
        data_.users_with_views().empty() && !config_.quad_pair_fallback) {
      throw ConfigError("the triple sampler needs at least one user with views");
    }
  }

  // One sampled update; returns the pre-update loss.
  double step(FactorModel& model, StepRule& rule, double reg, Rng& rng) const {
    switch (config_.kind) {
      case SamplerKind::Uniform:
        return bpr_step(model, sample_uniform_triple(data_, rng, pool_), rule, reg);
      case SamplerKind::ReducedSpace:
        return bpr_step(model, sample_reduced_triple(data_, spaces_, rng), rule, reg);
      case SamplerKind::DNS:
        return bpr_step(
            model, sample_dns_triple(data_, model, config_.dns_candidates, rng, pool_),
            rule, reg);
      case SamplerKind::BiasedView:
        return bpr_step(model, sample_biased_pair(data_, config_.omega, rng).triple(),
                        rule, reg);
      case SamplerKind::TripleView:
        break;
    }
    if (config_.quad_pair_fallback) {
      const auto u = static_cast<UserIndex>(uniform_below(data_.num_users(), rng));
      const auto bought = data_.purchased(u);
      const auto i = bought[uniform_below(bought.size(), rng)];
      if (data_.viewed(u).empty()) {
        const auto j = draw_negative(data_, u, NegativePool::Unobserved, rng);
        return bpr_step(model, {u, i, j}, rule, reg);
      }
      const auto seen = data_.viewed(u);
      const auto v = seen[uniform_below(seen.size(), rng)];
      const auto j = draw_negative(data_, u, NegativePool::Unobserved, rng);
      return view_loss_step(model, {u, i, v, j}, alphas_[u], rule, reg);
    }
    const auto q = sample_quad(data_, rng);
    return view_loss_step(model, q, alphas_[q.user], rule, reg);
  }

  // Mean loss of the validation purchases, negatives drawn from `seed`.
  double validation_loss(const FactorModel& model, std::uint64_t seed) const {
    Rng rng(seed);
    double sum = 0.0;
    const auto m = data_.num_users();
    for (UserIndex u = 0; u < m; ++u) {
      sum += validation_example_loss(model, u, rng);
    }
    return m == 0 ? 0.0 : sum / static_cast<double>(m);
  }

 private:
  double validation_example_loss(const FactorModel& model, UserIndex u,
                                 Rng& rng) const {
    const auto pos = splits_.validation[u];
    switch (config_.kind) {
      case SamplerKind::Uniform:
      case SamplerKind::BiasedView:
        return bpr_loss(model, {u, pos, draw_negative_except(data_, u, pool_, pos, rng)});
      case SamplerKind::ReducedSpace: {
        const auto space = spaces_.of(u);
        if (space.size() > 1 || space.front() != pos) {
          for (;;) {
            const auto j = space[uniform_below(space.size(), rng)];
            if (j != pos) {
              return bpr_loss(model, {u, pos, j});
            }
          }
        }
        return bpr_loss(model, {u, pos, draw_negative_except(data_, u, pool_, pos, rng)});
      }
      case SamplerKind::DNS: {
        ScoredItem best{0, 0.0};
        for (std::size_t c = 0; c < config_.dns_candidates; ++c) {
          const auto j = draw_negative_except(data_, u, pool_, pos, rng);
          const ScoredItem cand{j, predict(model, u, j)};
          if (c == 0 || ranks_before(cand, best)) {
            best = cand;
          }
        }
        return bpr_loss(model, {u, pos, best.item});
      }
      case SamplerKind::TripleView:
        break;
    }
    const auto seen = data_.viewed(u);
    if (seen.empty()) {
      return bpr_loss(model, {u, pos, draw_negative_except(data_, u, pool_, pos, rng)});
    }
    const auto v = seen[uniform_below(seen.size(), rng)];
    const auto j = draw_negative_except(data_, u, pool_, pos, rng);
    return view_loss(model, {u, pos, v, j}, alphas_[u]);
  }

  const Splits& splits_;
  const FeedbackDataset& data_;
  SamplerConfig config_;
  NegativePool pool_;
  std::vector<double> alphas_;
  ReducedSpaces spaces_;
};

std::vector<double> user_alphas(const FeedbackDataset& data,
                                const WeightingConfig& weighting) {
  if (weighting.mode == WeightingMode::Global) {
    return std::vector<double>(data.num_users(), weighting.alpha);
  }
  return compute_user_weights(data, weighting.beta, weighting.session_gap).weight;
}

}  // namespace

TrainResult run_training(const Splits& splits, const SamplerConfig& sampler,
                         const WeightingConfig& weighting, const TrainConfig& train,
                         const TrainHooks& hooks) {
  sampler.validate();
  weighting.validate();
  train.validate();
  const auto& data = splits.train;
  if (data.num_users() == 0 || data.num_items() == 0) {
    throw EmptyDatasetError("training split is empty");
  }

  std::vector<double> alphas;
  if (sampler.kind == SamplerKind::TripleView) {
    alphas = user_alphas(data, weighting);
  }
  const ExampleSource source(splits, sampler, std::move(alphas), train.seed);

  Rng rng(derive_seed(train.seed, kSamplingStream));
  FactorModel model = init_model(data.num_users(), data.num_items(), train.factors,
                                 derive_seed(train.seed, kInitStream),
                                 train.init_scale);
  model.seed = train.seed;
  StepRule rule(train.lr_mode, train.learning_rate, data.num_users(),
                data.num_items(), train.factors);
  const auto steps =
      train.steps_per_epoch > 0 ? train.steps_per_epoch : data.total_purchases();
  const auto validation_seed = derive_seed(train.seed, kValidationStream);

  TrainResult result{model, {}};
  result.report.k = train.eval_k;
  EarlyStopping stopper(train.patience);
  for (std::size_t epoch = 1; epoch <= train.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    for (std::size_t s = 1; s <= steps; ++s) {
      const double loss = source.step(model, rule, train.regularization, rng);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged: non-finite loss at epoch " << epoch << ", step "
            << s << "; try a smaller learning rate";
        throw DivergenceError(msg.str());
      }
      loss_sum += loss;
    }
    if (!model.all_finite()) {
      throw DivergenceError("training diverged: non-finite factors after epoch " +
                            std::to_string(epoch));
    }

    EpochRecord row;
    row.epoch = epoch;
    row.steps = steps;
    row.train_loss = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    row.validation_loss = hooks.validation_loss
                              ? hooks.validation_loss(model, epoch)
                              : source.validation_loss(model, validation_seed);
    if (!std::isfinite(row.validation_loss)) {
      throw DivergenceError("training diverged: non-finite validation loss at epoch " +
                            std::to_string(epoch));
    }
    const auto metrics = evaluate(model, splits, train.eval_k);
    row.hr = metrics.hr;
    row.ndcg = metrics.ndcg;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                started)
                      .count();
    result.report.rows.push_back(row);

    if (stopper.record(row.validation_loss)) {
      result.model = model;
    }
    if (hooks.on_epoch) {
      hooks.on_epoch(model, row);
    }
    if (stopper.should_stop()) {
      result.report.stopped_early = true;
      break;
    }
  }
  result.report.best_epoch = stopper.best_epoch();
  return result;
}

}  // namespace viewbpr
