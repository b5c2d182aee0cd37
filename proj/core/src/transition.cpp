#include "mta/transition.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mta/error.hpp"
#include "mta/numeric.hpp"

namespace mta {

namespace {

void require_rate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw InvalidConfig(std::string(what) + ": rate must lie in [0, 1]");
  }
}

}  // namespace

TransitionState TransitionState::from_logits(DenseMatrix logits) {
  if (logits.rows() != logits.cols() || logits.rows() == 0) {
    throw ShapeError("from_logits: logits must be square and non-empty");
  }
  if (!logits.all_finite()) throw InvalidInput("from_logits: non-finite logits");
  DenseMatrix matrix = softmax_rows(logits);
  return TransitionState(std::move(logits), std::move(matrix));
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::kSymmetric ? "symmetric" : "pairs";
}

NoiseKind parse_noise_kind(const std::string& text) {
  if (text == "symmetric" || text == "sym") return NoiseKind::kSymmetric;
  if (text == "pairs" || text == "pairflip" || text == "asymmetric") return NoiseKind::kPairs;
  throw InvalidConfig("unknown noise kind '" + text + "' (expected symmetric or pairs)");
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidConfig("pair '" + item + "' is not src:dst");
    try {
      pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw InvalidConfig("pair '" + item + "' is not src:dst");
    }
  }
  return pairs;
}

std::string format_pairs(const std::vector<std::pair<int, int>>& pairs) {
  std::string out;
  for (const auto& [src, dst] : pairs) {
    if (!out.empty()) out += ',';
    out += std::to_string(src) + ':' + std::to_string(dst);
  }
  return out;
}

DenseMatrix symmetric_matrix(std::size_t classes, double eta) {
  if (classes < 2) throw InvalidConfig("symmetric_matrix: need at least 2 classes");
  require_rate(eta, "symmetric_matrix");
  const double off = eta / static_cast<double>(classes - 1);
  DenseMatrix t(classes, classes, off);
  for (std::size_t i = 0; i < classes; ++i) t(i, i) = 1.0 - eta;
  return t;
}

DenseMatrix pairflip_matrix(std::size_t classes, double rate,
                            const std::vector<std::pair<int, int>>& pairs) {
  require_rate(rate, "pairflip_matrix");
  DenseMatrix t = DenseMatrix::identity(classes);
  std::set<int> sources;
  const int c = static_cast<int>(classes);
  for (const auto& [src, dst] : pairs) {
    if (src < 0 || src >= c || dst < 0 || dst >= c) {
      throw InvalidConfig("pairflip_matrix: pair " + std::to_string(src) + ":" +
                          std::to_string(dst) + " out of range");
    }
    if (src == dst) throw InvalidConfig("pairflip_matrix: pair target equals source");
    if (!sources.insert(src).second) {
      throw InvalidConfig("pairflip_matrix: duplicate source class " + std::to_string(src));
    }
    t(src, src) = 1.0 - rate;
    t(src, dst) = rate;
  }
  return t;
}

DenseMatrix noise_matrix(std::size_t classes, const NoiseSpec& spec) {
  return spec.kind == NoiseKind::kSymmetric ? symmetric_matrix(classes, spec.rate)
                                            : pairflip_matrix(classes, spec.rate, spec.pairs);
}

std::vector<std::pair<int, int>> cyclic_pairs(std::size_t classes) {
  std::vector<std::pair<int, int>> pairs;
  const int c = static_cast<int>(classes);
  for (int i = 0; i < c; ++i) pairs.emplace_back(i, (i + 1) % c);
  return pairs;
}

std::vector<std::pair<int, int>> cifar10_pairs() {
  // airplane=0 automobile=1 bird=2 cat=3 deer=4 dog=5 frog=6 horse=7 ship=8 truck=9
  return {{9, 1}, {2, 0}, {4, 7}, {3, 5}};
}

DenseMatrix logits_from_estimate(const DenseMatrix& estimate, double eps) {
  if (estimate.rows() != estimate.cols()) throw ShapeError("logits_from_estimate: not square");
  if (!(eps > 0.0)) throw InvalidInput("logits_from_estimate: eps must be positive");
  for (double v : estimate.data()) {
    if (v < 0.0) throw InvalidInput("logits_from_estimate: negative entry");
  }
  require_row_stochastic(estimate, 1e-6, "logits_from_estimate");
  DenseMatrix logits(estimate.rows(), estimate.cols());
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    logits.data()[i] = std::log(estimate.data()[i] + eps);
  }
  return logits;
}

DenseMatrix apply(const DenseMatrix& transition, const DenseMatrix& posteriors) {
  if (transition.rows() != transition.cols() || posteriors.cols() != transition.rows()) {
    throw ShapeError("apply: transition and posterior dimensions disagree");
  }
  // (Tᵀ f)ᵀ = fᵀ T, so a plain row-major product.
  return matmul(posteriors, transition);
}

DenseMatrix grad_wrt_logits(const TransitionState& state, const DenseMatrix& d_loss_d_matrix) {
  const DenseMatrix& t = state.matrix();
  if (!d_loss_d_matrix.same_shape(t)) throw ShapeError("grad_wrt_logits: shape mismatch");
  DenseMatrix grad(t.rows(), t.cols());
  for (std::size_t k = 0; k < t.rows(); ++k) {
    const auto tk = t.row(k);
    const auto gk = d_loss_d_matrix.row(k);
    double inner = 0.0;
    for (std::size_t j = 0; j < tk.size(); ++j) inner += gk[j] * tk[j];
    auto out = grad.row(k);
    for (std::size_t l = 0; l < tk.size(); ++l) out[l] = tk[l] * (gk[l] - inner);
  }
  return grad;
}

}  // namespace mta
