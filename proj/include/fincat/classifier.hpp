// Logistic regression over context embeddings: training, scoring and the
// on-disk model format.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fincat/embedding.hpp"

namespace fincat {

enum class ClaimLabel : int { kOutOfClaim = 0, kInClaim = 1 };

inline int encode(ClaimLabel label) { return static_cast<int>(label); }
/// Throws InvalidArgument for anything but 0 or 1.
ClaimLabel decode_label(long value);
/// "in_claim" / "out_of_claim".
std::string_view to_string(ClaimLabel label);

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr int kModelFormatVersion = 1;

/// Optional per-class loss weights. {1, 1} reproduces the plain objective.
struct ClassWeights {
  double out_of_claim = 1.0;
  double in_claim = 1.0;

  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

struct TrainingConfig {
  double l2_lambda = 1e-4;
  double learning_rate = 0.1;
  int max_epochs = 500;
  double tolerance = 1e-7;
  std::uint64_t seed = 0;
  ClassWeights class_weights;
};

struct TrainMeta {
  double l2_lambda = 0.0;
  double learning_rate = 0.0;
  int max_epochs = 0;
  double tolerance = 0.0;
  int epochs_run = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
  ClassWeights class_weights;

  friend bool operator==(const TrainMeta&, const TrainMeta&) = default;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double threshold = kDefaultThreshold;
  EmbedderId embedder;
  TrainMeta train_meta;

  std::size_t dim() const noexcept { return weights.size(); }

  /// Throws InvalidArgument if weights are empty or non-finite, the
  /// threshold is outside (0, 1) or the embedder dim disagrees.
  void validate() const;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct Prediction {
  ClaimLabel label = ClaimLabel::kOutOfClaim;
  double probability = 0.5;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

/// Mean (optionally class-weighted) binary cross-entropy plus
/// (l2_lambda / 2) * ||w||^2, with exact gradients. The bias is not
/// regularized.
LossAndGradient loss_and_gradient(std::span<const double> weights, double bias,
                                  std::span<const EmbeddingVector> features,
                                  std::span<const ClaimLabel> labels, double l2_lambda,
                                  const ClassWeights& class_weights = {});

struct TrainResult {
  LogisticModel model;
  /// Loss before the first step, then after every accepted epoch.
  std::vector<double> loss_history;
};

/// Full-batch gradient descent from w = 0, b = 0. Stops after max_epochs or
/// once an epoch lowers the loss by less than `tolerance`; a step that would
/// raise the loss is discarded.
TrainResult train(std::span<const EmbeddingVector> features,
                  std::span<const ClaimLabel> labels, const TrainingConfig& config,
                  const EmbedderId& embedder);

/// Logistic function, evaluated without overflow and kept strictly inside
/// (0, 1).
double sigmoid(double t);

/// Throws InvalidArgument when x's dim differs from the model's.
double score(const LogisticModel& model, const EmbeddingVector& x);
/// Also checks that the vector came from a compatible embedder.
double score(const LogisticModel& model, const EmbeddingVector& x,
             const EmbedderId& source);

/// InClaim iff probability > threshold.
Prediction classify(const LogisticModel& model, const EmbeddingVector& x);
Prediction classify(const LogisticModel& model, const EmbeddingVector& x,
                    const EmbedderId& source);
Prediction to_prediction(const LogisticModel& model, double probability);

/// Canonical JSON text of the model: sorted keys, shortest round-trip floats.
std::string serialize_model(const LogisticModel& model);
/// Throws LoadError (with `origin` as the location) on malformed input.
LogisticModel parse_model(std::string_view text, const std::string& origin = "<model>");

void save_model(const LogisticModel& model, const std::string& path);
LogisticModel load_model(const std::string& path);

/// "fnv1a64:<16 hex digits>" over the canonical serialization.
std::string fingerprint(const LogisticModel& model);

}  // namespace fincat
