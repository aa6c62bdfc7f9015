// Labeled dataset ingestion and micro/macro F1 evaluation.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "fincat/classifier.hpp"
#include "fincat/embedding.hpp"
#include "fincat/text.hpp"

namespace fincat {

/// One labeled target numeral. Offsets are code points into `paragraph`,
/// end-exclusive.
struct DatasetRecord {
  std::string record_id;
  std::string paragraph;
  std::size_t target_offset_start = 0;
  std::size_t target_offset_end = 0;
  ClaimLabel label = ClaimLabel::kOutOfClaim;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

/// JSON-Lines, one object per line with keys record_id, paragraph,
/// target_offset_start, target_offset_end and claim (0/1). Blank lines are
/// skipped. Throws LoadError naming the line on any malformed or invalid
/// record.
std::vector<DatasetRecord> load_dataset(const std::string& path);

/// Throws InvalidArgument when the record violates its invariants.
void validate_record(const DatasetRecord& record);

/// A record resolved to the window the classifier sees.
struct PreparedRecord {
  ContextWindow window;
  CacheKey key;  // (record_id, index of the target among the record's numerals)
};

/// Finds the whitespace token whose range contains the target span.
/// Throws InvalidArgument when the span straddles a token boundary.
PreparedRecord prepare_record(const DatasetRecord& record, int k = kDefaultWindow);

struct Confusion {
  std::size_t tp = 0;  // InClaim is the positive class
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct RecordError {
  std::size_t index = 0;  // position in the input list
  std::string record_id;
  std::string message;

  friend bool operator==(const RecordError&, const RecordError&) = default;
};

struct EvalReport {
  std::size_t n = 0;
  Confusion confusion;
  double f1_micro = 0.0;
  double f1_macro = 0.0;
  /// Indexed by encode(label): [out_of_claim, in_claim].
  std::array<double, 2> per_class_f1{0.0, 0.0};
  /// Records skipped during evaluate(); never populated by f1_scores().
  std::vector<RecordError> errors;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// F1 per class (0 when undefined), their unweighted mean, and F1 over the
/// pooled per-class counts. Throws InvalidArgument on empty or mismatched
/// inputs.
EvalReport f1_scores(const std::vector<ClaimLabel>& predictions,
                     const std::vector<ClaimLabel>& gold);

struct EmbeddedDataset {
  std::vector<EmbeddingVector> features;
  std::vector<ClaimLabel> labels;
  std::vector<std::size_t> record_index;  // source position of each row
  std::vector<RecordError> errors;        // misaligned records, skipped
};

/// Windows and embeds every record. Alignment failures are collected;
/// embedding failures throw with the record id attached.
EmbeddedDataset embed_dataset(const EmbeddingProvider& provider,
                              const std::vector<DatasetRecord>& records,
                              int k = kDefaultWindow);

/// End-to-end: window, embed, classify, score against gold labels.
/// Throws InvalidArgument on an empty record list, an incompatible
/// provider, or when no record could be aligned.
EvalReport evaluate(const LogisticModel& model, const EmbeddingProvider& provider,
                    const std::vector<DatasetRecord>& records, int k = kDefaultWindow);

/// Aligned human-readable rendering.
std::string render_report(const EvalReport& report);
/// JSON rendering with full-precision floats.
std::string report_to_json(const EvalReport& report);

}  // namespace fincat
