#include "fincat/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fincat/error.hpp"
#include "fincat/unicode.hpp"

namespace fincat {

void validate_record(const DatasetRecord& r) {
  if (r.record_id.empty()) throw InvalidArgument("record_id is empty");
  if (r.target_offset_start >= r.target_offset_end) {
    throw InvalidArgument("target_offset_start must be < target_offset_end");
  }
  const auto cps = unicode::decode(r.paragraph);
  if (r.target_offset_end > cps.size()) {
    throw InvalidArgument("target span [" + std::to_string(r.target_offset_start) + ", " +
                          std::to_string(r.target_offset_end) + ") exceeds paragraph length " +
                          std::to_string(cps.size()));
  }
  bool has_digit = false;
  for (std::size_t i = r.target_offset_start; i < r.target_offset_end; ++i) {
    has_digit = has_digit || unicode::is_decimal_digit(cps[i].value);
  }
  if (!has_digit) throw InvalidArgument("target span contains no digit");
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, 0, "cannot open dataset");

  std::vector<DatasetRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LoadError(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw LoadError(path, lineno, "expected a JSON object");

    auto offset = [&](const char* key) -> std::size_t {
      if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
        throw LoadError(path, lineno,
                        std::string("\"") + key + "\" must be a non-negative integer");
      }
      return obj[key].get<std::size_t>();
    };

    DatasetRecord r;
    if (!obj.contains("record_id")) throw LoadError(path, lineno, "missing \"record_id\"");
    const auto& id = obj["record_id"];
    if (id.is_string()) {
      r.record_id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      r.record_id = id.dump();
    } else {
      throw LoadError(path, lineno, "\"record_id\" must be a string or integer");
    }
    if (!obj.contains("paragraph") || !obj["paragraph"].is_string()) {
      throw LoadError(path, lineno, "\"paragraph\" must be a string");
    }
    r.paragraph = obj["paragraph"].get<std::string>();
    r.target_offset_start = offset("target_offset_start");
    r.target_offset_end = offset("target_offset_end");
    if (!obj.contains("claim") || !obj["claim"].is_number_integer()) {
      throw LoadError(path, lineno, "\"claim\" must be 0 or 1");
    }
    try {
      r.label = decode_label(obj["claim"].get<long>());
      validate_record(r);
    } catch (const InvalidArgument& e) {
      throw LoadError(path, lineno, e.what());
    }
    records.push_back(std::move(r));
  }
  if (in.bad()) throw LoadError(path, lineno, "read failure");
  return records;
}

PreparedRecord prepare_record(const DatasetRecord& record, int k) {
  validate_record(record);
  const auto tokens = tokenize(record.paragraph);
  const auto mentions = find_numerals(tokens);
  for (const auto& m : mentions) {
    if (m.token.char_start <= record.target_offset_start &&
        record.target_offset_end <= m.token.char_end) {
      return {context_window(tokens, m, k), {record.record_id, m.mention_id}};
    }
  }
  throw InvalidArgument("target span [" + std::to_string(record.target_offset_start) + ", " +
                        std::to_string(record.target_offset_end) +
                        ") does not lie inside a single whitespace token");
}

EvalReport f1_scores(const std::vector<ClaimLabel>& predictions,
                     const std::vector<ClaimLabel>& gold) {
  if (predictions.size() != gold.size()) {
    throw InvalidArgument("got " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw InvalidArgument("cannot score an empty label list");

  EvalReport report;
  report.n = gold.size();
  auto& c = report.confusion;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool pred_pos = predictions[i] == ClaimLabel::kInClaim;
    const bool gold_pos = gold[i] == ClaimLabel::kInClaim;
    if (pred_pos && gold_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (gold_pos) ++c.fn;
    else ++c.tn;
  }

  auto f1 = [](std::size_t tp, std::size_t fp, std::size_t fn) {
    const double precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    const double recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    return precision + recall == 0.0 ? 0.0
                                     : 2.0 * precision * recall / (precision + recall);
  };
  // Each class takes its turn as the positive one.
  report.per_class_f1[encode(ClaimLabel::kInClaim)] = f1(c.tp, c.fp, c.fn);
  report.per_class_f1[encode(ClaimLabel::kOutOfClaim)] = f1(c.tn, c.fn, c.fp);
  report.f1_macro = (report.per_class_f1[0] + report.per_class_f1[1]) / 2.0;
  report.f1_micro = f1(c.tp + c.tn, c.fp + c.fn, c.fn + c.fp);
  return report;
}

EmbeddedDataset embed_dataset(const EmbeddingProvider& provider,
                              const std::vector<DatasetRecord>& records, int k) {
  EmbeddedDataset out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    PreparedRecord prepared;
    try {
      prepared = prepare_record(record, k);
    } catch (const InvalidArgument& e) {
      out.errors.push_back({i, record.record_id, e.what()});
      continue;
    }
    try {
      out.features.push_back(provider.embed(prepared.window, prepared.key));
    } catch (const EmbeddingError& e) {
      throw EmbeddingError("record " + record.record_id + " (mention " +
                           std::to_string(prepared.key.mention_id) + " '" +
                           prepared.window.numeral().surface + "'): " + e.what());
    }
    out.labels.push_back(record.label);
    out.record_index.push_back(i);
  }
  return out;
}

EvalReport evaluate(const LogisticModel& model, const EmbeddingProvider& provider,
                    const std::vector<DatasetRecord>& records, int k) {
  if (records.empty()) throw InvalidArgument("cannot evaluate an empty record list");
  const EmbedderId source = provider.id();
  if (!compatible(model.embedder, source)) {
    throw InvalidArgument("model was trained on " + describe(model.embedder) +
                          " but the provider is " + describe(source));
  }
  auto data = embed_dataset(provider, records, k);
  if (data.features.empty()) {
    throw InvalidArgument("none of the " + std::to_string(records.size()) +
                          " records could be aligned to a token");
  }
  std::vector<ClaimLabel> predictions;
  predictions.reserve(data.features.size());
  for (const auto& x : data.features) predictions.push_back(classify(model, x).label);

  EvalReport report = f1_scores(predictions, data.labels);
  report.errors = std::move(data.errors);
  return report;
}

std::string render_report(const EvalReport& r) {
  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "records evaluated   " << r.n << '\n';
  out << "records skipped     " << r.errors.size() << '\n';
  out << "F1-micro            " << fixed(r.f1_micro) << '\n';
  out << "F1-macro            " << fixed(r.f1_macro) << '\n';
  out << "F1 in_claim         " << fixed(r.per_class_f1[1]) << '\n';
  out << "F1 out_of_claim     " << fixed(r.per_class_f1[0]) << '\n';
  out << "confusion (positive = in_claim)\n";
  out << "  tp " << r.confusion.tp << "  fp " << r.confusion.fp << "  tn " << r.confusion.tn
      << "  fn " << r.confusion.fn << '\n';
  for (const auto& e : r.errors) {
    out << "  skipped #" << e.index << " (" << e.record_id << "): " << e.message << '\n';
  }
  return out.str();
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  j["f1_micro"] = r.f1_micro;
  j["f1_macro"] = r.f1_macro;
  j["per_class_f1"] = {{"out_of_claim", r.per_class_f1[0]},
                       {"in_claim", r.per_class_f1[1]}};
  j["errors"] = nlohmann::json::array();
  for (const auto& e : r.errors) {
    j["errors"].push_back({{"index", e.index}, {"record_id", e.record_id}, {"message", e.message}});
  }
  return j.dump(2) + "\n";
}

}  // namespace fincat
