#include "fincat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fincat/error.hpp"
#include "fincat/numfmt.hpp"

namespace fincat {
namespace {

// Unclamped logistic; the clamp in sigmoid() would bias gradients.
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// ln(1 + e^t)
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

void check_training_shapes(std::span<const EmbeddingVector> features,
                           std::span<const ClaimLabel> labels, std::size_t dim) {
  if (features.size() != labels.size()) {
    throw InvalidArgument("got " + std::to_string(features.size()) + " feature vectors but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].dim() != dim) {
      throw InvalidArgument("feature " + std::to_string(i) + " has dim " +
                            std::to_string(features[i].dim()) + ", expected " +
                            std::to_string(dim));
    }
    for (double v : features[i].values()) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("feature " + std::to_string(i) + " has a non-finite entry");
      }
    }
  }
}

double class_weight(const ClassWeights& cw, ClaimLabel y) {
  return y == ClaimLabel::kInClaim ? cw.in_claim : cw.out_of_claim;
}

}  // namespace

ClaimLabel decode_label(long value) {
  if (value == 0) return ClaimLabel::kOutOfClaim;
  if (value == 1) return ClaimLabel::kInClaim;
  throw InvalidArgument("claim label must be 0 or 1, got " + std::to_string(value));
}

std::string_view to_string(ClaimLabel label) {
  return label == ClaimLabel::kInClaim ? "in_claim" : "out_of_claim";
}

void LogisticModel::validate() const {
  if (weights.empty()) throw InvalidArgument("model has no weights");
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidArgument("model has a non-finite weight");
  }
  if (!std::isfinite(bias)) throw InvalidArgument("model bias is non-finite");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("model threshold must lie in (0, 1)");
  }
  if (embedder.dim != static_cast<int>(weights.size())) {
    throw InvalidArgument("model embedder dim " + std::to_string(embedder.dim) +
                          " does not match " + std::to_string(weights.size()) + " weights");
  }
}

LossAndGradient loss_and_gradient(std::span<const double> weights, double bias,
                                  std::span<const EmbeddingVector> features,
                                  std::span<const ClaimLabel> labels, double l2_lambda,
                                  const ClassWeights& class_weights) {
  if (features.empty()) throw InvalidArgument("loss over an empty batch");
  check_training_shapes(features, labels, weights.size());

  const std::size_t dim = weights.size();
  const double n = static_cast<double>(features.size());
  LossAndGradient out;
  out.grad_w.assign(dim, 0.0);

  double data_loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto x = features[i].values();
    const double y = encode(labels[i]);
    const double c = class_weight(class_weights, labels[i]);
    const double z = dot(weights, x) + bias;
    // -[y ln p + (1-y) ln(1-p)] == softplus(z) - y z
    data_loss += c * (softplus(z) - y * z);
    const double residual = c * (logistic(z) - y);
    for (std::size_t j = 0; j < dim; ++j) out.grad_w[j] += residual * x[j];
    out.grad_b += residual;
  }

  double w_sq = 0.0;
  for (double w : weights) w_sq += w * w;
  out.loss = data_loss / n + 0.5 * l2_lambda * w_sq;
  for (std::size_t j = 0; j < dim; ++j) {
    out.grad_w[j] = out.grad_w[j] / n + l2_lambda * weights[j];
  }
  out.grad_b /= n;
  return out;
}

TrainResult train(std::span<const EmbeddingVector> features,
                  std::span<const ClaimLabel> labels, const TrainingConfig& config,
                  const EmbedderId& embedder) {
  if (features.empty()) throw InvalidArgument("cannot train on zero examples");
  const std::size_t dim = features.front().dim();
  check_training_shapes(features, labels, dim);
  if (embedder.dim != static_cast<int>(dim)) {
    throw InvalidArgument("features have dim " + std::to_string(dim) + " but embedder " +
                          describe(embedder) + " was given");
  }
  if (!(config.learning_rate > 0.0) || !(config.l2_lambda >= 0.0) ||
      config.max_epochs < 0 || !(config.tolerance >= 0.0) ||
      !(config.class_weights.in_claim > 0.0) || !(config.class_weights.out_of_claim > 0.0)) {
    throw InvalidArgument("invalid training hyperparameters");
  }

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  auto current = loss_and_gradient(w, b, features, labels, config.l2_lambda,
                                   config.class_weights);

  TrainResult result;
  result.loss_history.push_back(current.loss);
  int epochs = 0;
  std::vector<double> next_w(dim);
  while (epochs < config.max_epochs) {
    for (std::size_t j = 0; j < dim; ++j) {
      next_w[j] = w[j] - config.learning_rate * current.grad_w[j];
    }
    const double next_b = b - config.learning_rate * current.grad_b;
    auto next = loss_and_gradient(next_w, next_b, features, labels, config.l2_lambda,
                                  config.class_weights);
    if (!std::isfinite(next.loss) || next.loss > current.loss) break;

    const double decrease = current.loss - next.loss;
    w.swap(next_w);
    b = next_b;
    current = std::move(next);
    ++epochs;
    result.loss_history.push_back(current.loss);
    if (decrease < config.tolerance) break;
  }

  LogisticModel& m = result.model;
  m.weights = std::move(w);
  m.bias = b;
  m.threshold = kDefaultThreshold;
  m.embedder = embedder;
  m.train_meta = {config.l2_lambda, config.learning_rate, config.max_epochs,
                  config.tolerance, epochs,           current.loss,
                  config.seed,      config.class_weights};
  return result;
}

double sigmoid(double t) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(logistic(t), kLow, kHigh);
}

double score(const LogisticModel& model, const EmbeddingVector& x) {
  if (x.dim() != model.dim()) {
    throw InvalidArgument("vector dim " + std::to_string(x.dim()) +
                          " does not match model dim " + std::to_string(model.dim()));
  }
  return sigmoid(dot(model.weights, x.values()) + model.bias);
}

double score(const LogisticModel& model, const EmbeddingVector& x,
             const EmbedderId& source) {
  if (!compatible(model.embedder, source)) {
    throw InvalidArgument("model was trained on " + describe(model.embedder) +
                          " but vector comes from " + describe(source));
  }
  return score(model, x);
}

Prediction to_prediction(const LogisticModel& model, double probability) {
  return {probability > model.threshold ? ClaimLabel::kInClaim : ClaimLabel::kOutOfClaim,
          probability};
}

Prediction classify(const LogisticModel& model, const EmbeddingVector& x) {
  return to_prediction(model, score(model, x));
}

Prediction classify(const LogisticModel& model, const EmbeddingVector& x,
                    const EmbedderId& source) {
  return to_prediction(model, score(model, x, source));
}

// ---------------------------------------------------------------------------
// Model file

namespace {

std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace

std::string serialize_model(const LogisticModel& model) {
  model.validate();
  const auto& e = model.embedder;
  const auto& t = model.train_meta;
  std::ostringstream out;
  // Keys in lexicographic order at every level.
  out << "{\"bias\":" << format_double(model.bias) << ",\n";
  out << "\"dim\":" << model.dim() << ",\n";
  out << "\"embedder\":{\"dim\":" << e.dim << ",\"endpoint\":" << quote(e.endpoint)
      << ",\"kind\":" << quote(to_string(e.kind)) << ",\"seed\":" << e.seed << "},\n";
  out << "\"format_version\":" << kModelFormatVersion << ",\n";
  out << "\"threshold\":" << format_double(model.threshold) << ",\n";
  out << "\"train_meta\":{\"class_weights\":{\"in_claim\":"
      << format_double(t.class_weights.in_claim)
      << ",\"out_of_claim\":" << format_double(t.class_weights.out_of_claim) << "}"
      << ",\"epochs_run\":" << t.epochs_run << ",\"final_loss\":" << format_double(t.final_loss)
      << ",\"l2_lambda\":" << format_double(t.l2_lambda)
      << ",\"learning_rate\":" << format_double(t.learning_rate)
      << ",\"max_epochs\":" << t.max_epochs << ",\"seed\":" << t.seed
      << ",\"tolerance\":" << format_double(t.tolerance) << "},\n";
  out << "\"weights\":[";
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (i) out << ',';
    out << format_double(model.weights[i]);
  }
  out << "]}\n";
  return out.str();
}

LogisticModel parse_model(std::string_view text, const std::string& origin) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw LoadError(origin, 0, std::string("model is not valid JSON: ") + ex.what());
  }
  auto fail = [&](const std::string& what) -> LoadError { return LoadError(origin, 0, what); };
  if (!doc.is_object()) throw fail("model must be a JSON object");

  auto require = [&](const json& obj, const char* key) -> const json& {
    if (!obj.contains(key)) throw fail(std::string("missing key \"") + key + "\"");
    return obj.at(key);
  };
  auto number = [&](const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number()) throw fail(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
  };
  auto integer = [&](const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer()) throw fail(std::string("\"") + key + "\" must be an integer");
    return v.get<std::int64_t>();
  };
  auto unsigned_integer = [&](const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_unsigned()) {
      throw fail(std::string("\"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };

  const auto version = integer(doc, "format_version");
  if (version != kModelFormatVersion) {
    throw fail("unsupported model format_version " + std::to_string(version) +
               "; this build reads version " + std::to_string(kModelFormatVersion) +
               ", upgrade fincat to load it");
  }

  LogisticModel m;
  const auto dim = integer(doc, "dim");
  if (dim <= 0) throw fail("\"dim\" must be positive");
  const json& weights = require(doc, "weights");
  if (!weights.is_array()) throw fail("\"weights\" must be an array");
  if (weights.size() != static_cast<std::size_t>(dim)) {
    throw fail("\"dim\" is " + std::to_string(dim) + " but " +
               std::to_string(weights.size()) + " weights are present");
  }
  m.weights.reserve(weights.size());
  for (const auto& w : weights) {
    if (!w.is_number()) throw fail("\"weights\" must hold numbers only");
    m.weights.push_back(w.get<double>());
  }
  m.bias = number(doc, "bias");
  m.threshold = number(doc, "threshold");

  const json& emb = require(doc, "embedder");
  if (!emb.is_object()) throw fail("\"embedder\" must be an object");
  const json& kind = require(emb, "kind");
  if (!kind.is_string()) throw fail("\"embedder.kind\" must be a string");
  try {
    m.embedder.kind = parse_embedder_kind(kind.get<std::string>());
  } catch (const InvalidArgument& ex) {
    throw fail(ex.what());
  }
  m.embedder.dim = static_cast<int>(integer(emb, "dim"));
  m.embedder.seed = emb.contains("seed") ? unsigned_integer(emb, "seed") : 0;
  if (emb.contains("endpoint")) {
    if (!emb["endpoint"].is_string()) throw fail("\"embedder.endpoint\" must be a string");
    m.embedder.endpoint = emb["endpoint"].get<std::string>();
  }

  if (doc.contains("train_meta")) {
    const json& t = doc["train_meta"];
    if (!t.is_object()) throw fail("\"train_meta\" must be an object");
    auto& meta = m.train_meta;
    meta.l2_lambda = number(t, "l2_lambda");
    meta.learning_rate = number(t, "learning_rate");
    meta.epochs_run = static_cast<int>(integer(t, "epochs_run"));
    meta.final_loss = number(t, "final_loss");
    meta.seed = unsigned_integer(t, "seed");
    if (t.contains("max_epochs")) meta.max_epochs = static_cast<int>(integer(t, "max_epochs"));
    if (t.contains("tolerance")) meta.tolerance = number(t, "tolerance");
    if (t.contains("class_weights")) {
      const json& cw = t["class_weights"];
      if (!cw.is_object()) throw fail("\"train_meta.class_weights\" must be an object");
      meta.class_weights.in_claim = number(cw, "in_claim");
      meta.class_weights.out_of_claim = number(cw, "out_of_claim");
    }
  }

  try {
    m.validate();
  } catch (const InvalidArgument& ex) {
    throw fail(ex.what());
  }
  return m;
}

void save_model(const LogisticModel& model, const std::string& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("failed writing model to " + path);
}

LogisticModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, 0, "cannot open model file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

std::string fingerprint(const LogisticModel& model) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(seeded_fnv1a64(0, serialize_model(model))));
  return std::string("fnv1a64:") + hex;
}

}  // namespace fincat
