#include "fincat/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "fincat/classifier.hpp"
#include "fincat/embedding.hpp"
#include "fincat/error.hpp"
#include "fincat/evaluation.hpp"
#include "fincat/pipeline.hpp"
#include "fincat/service.hpp"

namespace fincat {
namespace {

constexpr const char* kEndpointEnv = "FINCAT_EMBED_ENDPOINT";

struct EmbedderOptions {
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<int> dim;
  std::string endpoint;
  std::string cache_path;
  int timeout_ms = 10000;
  int window = kDefaultWindow;
};

void add_embedder_options(CLI::App* cmd, EmbedderOptions& o) {
  cmd->add_option("--embedder", o.kind, "Embedding backend")
      ->required()
      ->check(CLI::IsMember({"hashed", "remote", "cached"}));
  cmd->add_option("--seed", o.seed, "Hashed embedder seed (default: model's, else 0)");
  cmd->add_option("--dim", o.dim, "Embedding dimension (default: model's, else 768)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--endpoint", o.endpoint,
                  std::string("Remote provider base URL (") + kEndpointEnv + " overrides)");
  cmd->add_option("--cache", o.cache_path, "Precomputed embedding cache (cached backend)");
  cmd->add_option("--timeout-ms", o.timeout_ms, "Remote request timeout")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-k,--window", o.window, "Context words on each side of the numeral")
      ->check(CLI::NonNegativeNumber);
}

/// `model` supplies defaults for dim, seed and endpoint when given.
std::shared_ptr<const EmbeddingProvider> make_provider(const EmbedderOptions& o,
                                                       const LogisticModel* model) {
  const EmbedderKind kind = parse_embedder_kind(o.kind);
  const int dim = o.dim ? *o.dim : model ? static_cast<int>(model->dim()) : kDefaultDim;
  switch (kind) {
    case EmbedderKind::kHashed: {
      const std::uint64_t seed = o.seed ? *o.seed : model ? model->embedder.seed : 0;
      return std::make_shared<HashedEmbedder>(dim, seed);
    }
    case EmbedderKind::kRemote: {
      std::string endpoint = o.endpoint;
      if (const char* env = std::getenv(kEndpointEnv); env && *env) endpoint = env;
      if (endpoint.empty() && model) endpoint = model->embedder.endpoint;
      if (endpoint.empty()) {
        throw InvalidArgument(std::string("remote embedder needs --endpoint or ") +
                              kEndpointEnv);
      }
      return std::make_shared<RemoteEmbedder>(endpoint, dim,
                                              std::chrono::milliseconds(o.timeout_ms));
    }
    case EmbedderKind::kCached: {
      if (o.cache_path.empty()) throw InvalidArgument("cached embedder needs --cache");
      auto cache = load_cached_embeddings(o.cache_path);
      if (!o.dim && !model) return std::make_shared<CachedEmbedder>(std::move(cache));
      return std::make_shared<CachedEmbedder>(std::move(cache), dim);
    }
  }
  throw InvalidArgument("unknown embedder");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path);
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  EmbedderOptions emb;
  std::string data;
  std::string out = "model.json";
  TrainingConfig config;
};

int do_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto records = load_dataset(a.data);
  if (records.empty()) throw InvalidArgument(a.data + " holds no records");
  const auto provider = make_provider(a.emb, nullptr);
  TrainingConfig config = a.config;
  if (a.emb.seed) config.seed = *a.emb.seed;

  auto data = embed_dataset(*provider, records, a.emb.window);
  for (const auto& e : data.errors) {
    err << "warning: skipping record " << e.record_id << ": " << e.message << '\n';
  }
  if (data.features.empty()) throw InvalidArgument("no trainable records in " + a.data);

  const auto result = train(data.features, data.labels, config, provider->id());
  save_model(result.model, a.out);

  std::vector<ClaimLabel> predicted;
  for (const auto& x : data.features) predicted.push_back(classify(result.model, x).label);
  const auto fit = f1_scores(predicted, data.labels);

  out << "trained on " << data.features.size() << " records (" << data.errors.size()
      << " skipped) with " << describe(result.model.embedder) << '\n';
  out << "epochs " << result.model.train_meta.epochs_run << ", final loss "
      << result.model.train_meta.final_loss << '\n';
  out << "training F1-micro " << fit.f1_micro << ", F1-macro " << fit.f1_macro << '\n';
  out << "model written to " << a.out << " (" << fingerprint(result.model) << ")\n";
  return kExitOk;
}

struct PredictArgs {
  EmbedderOptions emb;
  std::string model;
  std::optional<std::string> text;
  std::string input;
  std::string record_id = "0";
  bool json = false;
};

int do_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  const Analyzer analyzer(model, make_provider(a.emb, &model), a.emb.window);

  auto emit = [&](const std::string& text, const std::string& record_id) {
    const auto result = analyzer.analyze(text, record_id);
    if (a.json) {
      out << result_to_json(result) << '\n';
    } else {
      out << render_table(result);
    }
  };

  if (a.text) {
    emit(*a.text, a.record_id);
    return kExitOk;
  }
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw LoadError(a.input, 0, "cannot open input");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Cached lookups key input lines by their 1-based line number.
    emit(line, std::to_string(lineno));
  }
  return kExitOk;
}

struct EvaluateArgs {
  EmbedderOptions emb;
  std::string model;
  std::string data;
  std::string report;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  const auto records = load_dataset(a.data);
  const auto provider = make_provider(a.emb, &model);
  const auto report = evaluate(model, *provider, records, a.emb.window);
  out << render_report(report);
  if (!a.report.empty()) write_file(a.report, report_to_json(report));
  return kExitOk;
}

struct ServeArgs {
  EmbedderOptions emb;
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int do_serve(const ServeArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  auto analyzer = std::make_shared<const Analyzer>(model, make_provider(a.emb, &model),
                                                   a.emb.window);
  Service service(analyzer);
  const int port = service.bind(a.host, a.port);

  // Route SIGINT/SIGTERM to a watcher thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });

  out << "serving model " << analyzer->fingerprint() << " on http://" << a.host << ":" << port
      << std::endl;
  service.run();

  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify numerals in financial text as in-claim or out-of-claim", "fincat"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a labeled JSONL dataset");
  add_embedder_options(train_cmd, train_args.emb);
  train_cmd->add_option("--data", train_args.data, "Training JSONL")->required();
  train_cmd->add_option("--out", train_args.out, "Where to write the model");
  train_cmd->add_option("--l2", train_args.config.l2_lambda, "L2 penalty on the weights");
  train_cmd->add_option("--lr", train_args.config.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", train_args.config.max_epochs, "Maximum epochs");
  train_cmd->add_option("--tolerance", train_args.config.tolerance,
                        "Stop once an epoch improves the loss by less than this");
  train_cmd->add_option("--in-claim-weight", train_args.config.class_weights.in_claim,
                        "Loss weight of in-claim examples");
  train_cmd->add_option("--out-of-claim-weight", train_args.config.class_weights.out_of_claim,
                        "Loss weight of out-of-claim examples");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Classify every numeral in a text");
  add_embedder_options(predict_cmd, predict_args.emb);
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  auto* text_opt = predict_cmd->add_option("--text", predict_args.text, "Text to analyze");
  auto* input_opt =
      predict_cmd->add_option("--input", predict_args.input, "File with one text per line");
  text_opt->excludes(input_opt);
  predict_cmd->add_option("--record-id", predict_args.record_id,
                          "Cache key for --text with the cached backend");
  predict_cmd->add_flag("--json", predict_args.json, "Emit JSON instead of a table");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on a labeled JSONL dataset");
  add_embedder_options(eval_cmd, eval_args.emb);
  eval_cmd->add_option("--model", eval_args.model, "Model file")->required();
  eval_cmd->add_option("--data", eval_args.data, "Evaluation JSONL")->required();
  eval_cmd->add_option("--report", eval_args.report, "Also write the report as JSON");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  add_embedder_options(serve_cmd, serve_args.emb);
  serve_cmd->add_option("--model", serve_args.model, "Model file")->required();
  serve_cmd->add_option("--host", serve_args.host, "Address to bind");
  serve_cmd->add_option("--port", serve_args.port, "Port to bind (0 picks one)")
      ->check(CLI::Range(0, 65535));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (predict_cmd->parsed() && !predict_args.text && predict_args.input.empty()) {
      throw CLI::RequiredError("predict needs --text or --input");
    }
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);  // prints the help of the subcommand asked about
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return do_train(train_args, out, err);
    if (predict_cmd->parsed()) return do_predict(predict_args, out);
    if (eval_cmd->parsed()) return do_evaluate(eval_args, out);
    if (serve_cmd->parsed()) return do_serve(serve_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace fincat
