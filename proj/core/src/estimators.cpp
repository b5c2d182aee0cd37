#include "mta/estimators.hpp"

#include <cmath>

#include "mta/error.hpp"

namespace mta {

namespace {

void normalize_rows(DenseMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double total = 0.0;
    for (double v : row) total += v;
    for (double& v : row) v /= total;
  }
}

void require_finite_loss(double loss, std::size_t iteration) {
  if (!std::isfinite(loss) || loss > kDivergenceLoss) {
    throw DivergenceError(static_cast<long>(iteration), "loss " + std::to_string(loss));
  }
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kForwardAnchor:
      return "forward-anchor";
    case Provenance::kGlc:
      return "glc";
    case Provenance::kSmodel:
      return "smodel";
    case Provenance::kOracle:
      return "oracle";
  }
  return "oracle";
}

std::size_t SgdConfig::iterations_for(std::size_t n) const {
  if (batch_size == 0) throw InvalidConfig("batch size must be positive");
  return epochs * ((n + batch_size - 1) / batch_size);
}

MlpParams continue_ce(MlpParams params, const Batch& data, double lr, std::size_t batch_size,
                      std::size_t iterations, std::uint64_t seed) {
  if (data.size() == 0) throw InvalidConfig("cross-entropy training: empty data");
  if (!(lr >= 0.0)) throw InvalidConfig("cross-entropy training: lr must be >= 0");
  if (iterations == 0) return params;
  BatchSampler sampler(data.size(), batch_size, train_stream_seed(seed));
  for (std::size_t t = 1; t <= iterations; ++t) {
    const Batch batch = gather(data, sampler.next());
    const CleanLossGrads g = clean_loss_and_grads(params, batch);
    require_finite_loss(g.loss, t);
    params = sgd_step(params, g.d_weights, lr);
  }
  return params;
}

MlpParams train_ce(const Batch& train, std::size_t classes, const MlpConfig& mlp,
                   const SgdConfig& sgd, std::uint64_t seed) {
  if (train.size() == 0) throw InvalidConfig("train_ce: empty training split");
  MlpParams params =
      initial_classifier(mlp.dims(train.features.cols(), classes), mlp.init_scale, seed);
  return continue_ce(std::move(params), train, sgd.lr, sgd.batch_size,
                     sgd.iterations_for(train.size()), seed);
}

MlpParams finetune(const MlpParams& params, const Batch& meta, const SgdConfig& sgd,
                   std::uint64_t seed) {
  if (meta.size() == 0) throw InvalidConfig("finetune: empty meta split");
  return continue_ce(params, meta, sgd.lr, sgd.batch_size, sgd.iterations_for(meta.size()),
                     SeededRng::derive(seed, 7));
}

EstimatorOutput estimate_forward_from_posteriors(const DenseMatrix& noisy_posteriors) {
  const std::size_t n = noisy_posteriors.rows();
  const std::size_t c = noisy_posteriors.cols();
  if (n == 0) throw InvalidConfig("estimate_forward: empty training set");
  EstimatorOutput out;
  out.provenance = Provenance::kForwardAnchor;
  out.matrix = DenseMatrix(c, c);
  for (std::size_t i = 0; i < c; ++i) {
    std::size_t anchor = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (noisy_posteriors(r, i) > noisy_posteriors(anchor, i)) anchor = r;
    }
    out.diagnostics.push_back(anchor);
    const auto src = noisy_posteriors.row(anchor);
    std::copy(src.begin(), src.end(), out.matrix.row(i).begin());
  }
  normalize_rows(out.matrix);
  return out;
}

EstimatorOutput estimate_forward(const MlpParams& noisy_model, const DenseMatrix& train_features) {
  if (train_features.rows() == 0) throw InvalidConfig("estimate_forward: empty training set");
  return estimate_forward_from_posteriors(forward(noisy_model, train_features).probs);
}

EstimatorOutput estimate_glc_from_posteriors(const DenseMatrix& noisy_posteriors,
                                             const std::vector<int>& clean_labels,
                                             std::size_t classes) {
  if (noisy_posteriors.rows() != clean_labels.size() || noisy_posteriors.cols() != classes) {
    throw ShapeError("estimate_glc: posteriors do not match labels/classes");
  }
  EstimatorOutput out;
  out.provenance = Provenance::kGlc;
  out.matrix = DenseMatrix(classes, classes);
  out.diagnostics.assign(classes, 0);
  for (std::size_t r = 0; r < clean_labels.size(); ++r) {
    const int y = clean_labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InvalidInput("estimate_glc: label out of range");
    }
    const auto src = noisy_posteriors.row(r);
    auto dst = out.matrix.row(static_cast<std::size_t>(y));
    for (std::size_t k = 0; k < classes; ++k) dst[k] += src[k];
    ++out.diagnostics[static_cast<std::size_t>(y)];
  }
  for (std::size_t i = 0; i < classes; ++i) {
    if (out.diagnostics[i] == 0) {
      throw CoverageError(static_cast<int>(i), "estimate_glc: no meta samples");
    }
    for (double& v : out.matrix.row(i)) v /= static_cast<double>(out.diagnostics[i]);
  }
  normalize_rows(out.matrix);
  return out;
}

EstimatorOutput estimate_glc(const MlpParams& noisy_model, const Batch& meta) {
  return estimate_glc_from_posteriors(forward(noisy_model, meta.features).probs, meta.labels,
                                      noisy_model.num_classes());
}

SmodelResult train_smodel_from(const Batch& train, MlpParams params, const TransitionState& init,
                               const SmodelConfig& config, const Monitor& monitor) {
  if (train.size() == 0) throw InvalidConfig("train_smodel: empty training split");
  if (config.log_every == 0) throw InvalidConfig("train_smodel: log_every must be >= 1");
  const double lr_transition = config.transition_step_size();
  if (!(config.lr >= 0.0) || !(lr_transition >= 0.0)) {
    throw InvalidConfig("train_smodel: learning rates must be >= 0");
  }
  if (params.num_classes() != init.classes()) {
    throw ShapeError("train_smodel: classifier outputs do not match transition size");
  }
  SmodelResult result{std::move(params), init, {}};
  BatchSampler sampler(train.size(), config.batch_size, train_stream_seed(config.seed));
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const Batch batch = gather(train, sampler.next());
    const NoisyLossGrads step = noisy_loss_and_grads(result.params, result.state, batch);
    require_finite_loss(step.loss, t);
    result.params = sgd_step(result.params, step.d_weights, config.lr);
    DenseMatrix logits = result.state.logits();
    axpy(-lr_transition, grad_wrt_logits(result.state, step.d_matrix), logits);
    result.state = TransitionState::from_logits(std::move(logits));
    if (t % config.log_every == 0 || t == config.iterations) {
      result.trace.rows.push_back(monitor.observe(t, step.loss, result.params, result.state));
    }
  }
  return result;
}

SmodelResult train_smodel(const Batch& train, const MlpConfig& mlp, const TransitionState& init,
                          const SmodelConfig& config, const Monitor& monitor) {
  if (train.size() == 0) throw InvalidConfig("train_smodel: empty training split");
  MlpParams params = initial_classifier(mlp.dims(train.features.cols(), init.classes()),
                                        mlp.init_scale, config.seed);
  return train_smodel_from(train, std::move(params), init, config, monitor);
}

SmodelResult train_with_fixed_transition(const Batch& train, const MlpConfig& mlp,
                                         const DenseMatrix& estimate, const SmodelConfig& config,
                                         const Monitor& monitor) {
  SmodelConfig frozen = config;
  frozen.lr_transition = 0.0;
  return train_smodel(train, mlp, TransitionState::from_logits(logits_from_estimate(estimate)),
                      frozen, monitor);
}

}  // namespace mta
