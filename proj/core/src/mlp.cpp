#include "mta/mlp.hpp"

#include <cmath>
#include <string>

#include "mta/error.hpp"
#include "mta/numeric.hpp"

namespace mta {

namespace {

// out(b, :) = probs(b, :) ⊙ (v(b, :) − ⟨probs(b, :), v(b, :)⟩); the softmax
// Jacobian is symmetric so this serves both directions.
DenseMatrix softmax_jacobian_product(const DenseMatrix& probs, const DenseMatrix& v) {
  DenseMatrix out(probs.rows(), probs.cols());
  for (std::size_t b = 0; b < probs.rows(); ++b) {
    const auto p = probs.row(b);
    const auto vr = v.row(b);
    double inner = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) inner += p[k] * vr[k];
    auto o = out.row(b);
    for (std::size_t k = 0; k < p.size(); ++k) o[k] = p[k] * (vr[k] - inner);
  }
  return out;
}

void apply_relu_mask(const DenseMatrix& pre, DenseMatrix& values) {
  auto v = values.data();
  const auto a = pre.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(a[i] > 0.0)) v[i] = 0.0;
  }
}

void require_same_structure(const MlpParams& params, const WeightList& list, const char* op) {
  if (list.size() != params.weights.size()) {
    throw ShapeError(std::string(op) + ": expected " + std::to_string(params.weights.size()) +
                     " weight matrices, got " + std::to_string(list.size()));
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!list[i].same_shape(params.weights[i])) {
      throw ShapeError(std::string(op) + ": layer " + std::to_string(i) + " shape mismatch");
    }
  }
}

}  // namespace

void MlpParams::validate() const {
  if (layer_dims.size() < 2) throw ShapeError("MlpParams: need at least one layer");
  if (weights.size() + 1 != layer_dims.size()) {
    throw ShapeError("MlpParams: weight count does not match layer_dims");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != layer_dims[i + 1] || weights[i].cols() != layer_dims[i]) {
      throw ShapeError("MlpParams: layer " + std::to_string(i) + " has shape " +
                       std::to_string(weights[i].rows()) + "x" +
                       std::to_string(weights[i].cols()));
    }
  }
}

std::vector<std::size_t> MlpConfig::dims(std::size_t input_dim, std::size_t classes) const {
  std::vector<std::size_t> d{input_dim};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(classes);
  return d;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_dims, double scale, SeededRng& rng) {
  if (layer_dims.size() < 2) throw InvalidConfig("init_mlp: need at least input and output dims");
  for (std::size_t d : layer_dims) {
    if (d == 0) throw InvalidConfig("init_mlp: layer dims must be positive");
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidConfig("init_mlp: scale must be finite and non-negative");
  }
  MlpParams params;
  params.layer_dims = layer_dims;
  for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
    DenseMatrix w(layer_dims[i + 1], layer_dims[i]);
    for (double& v : w.data()) v = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
    params.weights.push_back(std::move(w));
  }
  return params;
}

ForwardCache forward(const MlpParams& params, const DenseMatrix& batch) {
  params.validate();
  if (batch.cols() != params.input_dim()) {
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " features, network expects " + std::to_string(params.input_dim()));
  }
  ForwardCache cache;
  cache.layer_inputs.push_back(batch);
  for (std::size_t i = 0; i < params.depth(); ++i) {
    DenseMatrix pre = matmul_transposed(cache.layer_inputs.back(), params.weights[i]);
    if (i + 1 < params.depth()) {
      DenseMatrix act = pre;
      for (double& v : act.data()) v = v > 0.0 ? v : 0.0;
      cache.layer_inputs.push_back(std::move(act));
    } else {
      cache.probs = softmax_rows(pre);
    }
    cache.pre_activations.push_back(std::move(pre));
  }
  return cache;
}

WeightList backward(const MlpParams& params, const ForwardCache& cache,
                    const DenseMatrix& upstream) {
  params.validate();
  if (cache.pre_activations.size() != params.depth() ||
      cache.layer_inputs.size() != params.depth()) {
    throw ShapeError("backward: cache depth does not match params");
  }
  for (std::size_t i = 0; i < params.depth(); ++i) {
    if (cache.layer_inputs[i].cols() != params.weights[i].cols() ||
        cache.pre_activations[i].cols() != params.weights[i].rows()) {
      throw ShapeError("backward: stale cache at layer " + std::to_string(i));
    }
  }
  if (!upstream.same_shape(cache.probs)) throw ShapeError("backward: upstream shape mismatch");

  const double inv_batch = 1.0 / static_cast<double>(upstream.rows());
  WeightList grads(params.depth());
  DenseMatrix delta = softmax_jacobian_product(cache.probs, upstream);
  for (std::size_t i = params.depth(); i-- > 0;) {
    grads[i] = transposed_matmul(delta, cache.layer_inputs[i]);
    for (double& v : grads[i].data()) v *= inv_batch;
    if (i > 0) {
      DenseMatrix next = matmul(delta, params.weights[i]);
      apply_relu_mask(cache.pre_activations[i - 1], next);
      delta = std::move(next);
    }
  }
  return grads;
}

TangentResult forward_tangent(const MlpParams& params, const WeightList& direction,
                              const DenseMatrix& batch) {
  require_same_structure(params, direction, "forward_tangent");
  TangentResult out;
  out.cache = forward(params, batch);
  DenseMatrix tangent(batch.rows(), batch.cols());
  for (std::size_t i = 0; i < params.depth(); ++i) {
    DenseMatrix pre_tangent = matmul_transposed(out.cache.layer_inputs[i], direction[i]);
    if (i > 0) {
      const DenseMatrix carried = matmul_transposed(tangent, params.weights[i]);
      axpy(1.0, carried, pre_tangent);
    }
    if (i + 1 < params.depth()) {
      apply_relu_mask(out.cache.pre_activations[i], pre_tangent);
      tangent = std::move(pre_tangent);
    } else {
      out.probs_tangent = softmax_jacobian_product(out.cache.probs, pre_tangent);
    }
  }
  return out;
}

MlpParams sgd_step(const MlpParams& params, const WeightList& grads, double lr) {
  require_same_structure(params, grads, "sgd_step");
  if (!(lr >= 0.0)) throw InvalidConfig("sgd_step: learning rate must be non-negative");
  MlpParams out = params;
  for (std::size_t i = 0; i < out.weights.size(); ++i) mta::axpy(-lr, grads[i], out.weights[i]);
  return out;
}

std::vector<int> argmax_rows(const DenseMatrix& probs) {
  std::vector<int> labels(probs.rows());
  for (std::size_t b = 0; b < probs.rows(); ++b) {
    const auto p = probs.row(b);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[best]) best = k;
    }
    labels[b] = static_cast<int>(best);
  }
  return labels;
}

std::vector<int> predict(const MlpParams& params, const DenseMatrix& batch) {
  // Softmax is monotone, so the argmax of the logits is the argmax of f.
  const ForwardCache cache = forward(params, batch);
  return argmax_rows(cache.pre_activations.back());
}

WeightList zeros_like(const MlpParams& params) {
  WeightList out;
  out.reserve(params.weights.size());
  for (const auto& w : params.weights) out.emplace_back(w.rows(), w.cols());
  return out;
}

void axpy(double alpha, const WeightList& x, WeightList& y) {
  if (x.size() != y.size()) throw ShapeError("axpy: weight list length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) mta::axpy(alpha, x[i], y[i]);
}

double dot(const WeightList& a, const WeightList& b) {
  if (a.size() != b.size()) throw ShapeError("dot: weight list length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += mta::dot(a[i], b[i]);
  return s;
}

double norm(const WeightList& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const WeightList& a) {
  for (const auto& m : a) {
    if (!m.all_finite()) return false;
  }
  return true;
}

}  // namespace mta
