// SPDX-License-Identifier: Apache-2.0
// wdvdb: corpus generation, stream replay, detection and evaluation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdvdb.hpp"

namespace {

using namespace wdvdb;
namespace fs = std::filesystem;

int verbosity = 0;

void info(const std::string& msg) {
  if (verbosity >= 1) std::cerr << "wdvdb: " << msg << '\n';
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Protocol: return 3;
  }
  return 2;
}

// ---------------------------------------------------------------------------
// Options shared across subcommands. Each subcommand binds the subset it uses.
// ---------------------------------------------------------------------------

struct Options {
  std::string corpus, truth, manifest, split, preset = "wdvd", addr = "127.0.0.1:7070", out, format = "tsv";
  std::string model, trace, trace_out, port_file, reply = "immediate", features_out;
  std::vector<std::string> scores;
  std::uint64_t seed = 42;
  std::int64_t k = 16;
  unsigned threads = 1;
  double timeout = 60.0;
  bool self_play = false, pipelined = false;

  // gen
  std::int64_t n = 100000, users = 3000, items = 6000, burst = 0;
  double vandalism_rate = 0.01, badword_prob = 0.6, tag_prob = 0.4;

  // eval
  std::string exclude_user, exclude_from, exclude_to;
  double threshold = 0.5;
};

DatasetManifest manifest_or_standard(const Options& o) {
  return o.manifest.empty() ? DatasetManifest::standard() : load_manifest(o.manifest);
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path);
}

ReplyPolicy parse_reply(const std::string& s) {
  if (s == "immediate") return ReplyPolicy::Immediate;
  if (s == "lazy") return ReplyPolicy::Lazy;
  if (s == "random") return ReplyPolicy::RandomHold;
  fail(ErrorCode::Usage, "unknown reply policy '" + s + "' (immediate, lazy or random)");
}

void require_k(std::int64_t k) {
  if (k < 1) fail(ErrorCode::InvalidConfig, "--k must be at least 1, got " + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_gen(const Options& o) {
  SynthConfig cfg;
  cfg.seed = o.seed;
  cfg.n_revisions = o.n;
  cfg.n_users = o.users;
  cfg.n_items = o.items;
  cfg.vandalism_rate = o.vandalism_rate;
  cfg.badword_inject_prob = o.badword_prob;
  cfg.tag_inject_prob = o.tag_prob;
  cfg.burst_size = o.burst;
  const GeneratedCorpus g = generate_corpus(cfg);
  save_corpus(o.out, g.revisions);
  if (!o.truth.empty()) save_truth(o.truth, g.truth);
  if (!o.manifest.empty()) write_text(o.manifest, manifest_to_json(DatasetManifest::standard()).dump(2) + "\n");
  info("wrote " + std::to_string(g.revisions.size()) + " revisions to " + o.out);
  return 0;
}

int cmd_stats(const Options& o) {
  const auto revisions = load_corpus(o.corpus);
  const auto truth = load_truth(o.truth);
  auto j = stats_to_json(compute_stats(revisions, truth));
  const auto split = split_corpus(revisions, manifest_or_standard(o));
  nlohmann::ordered_json parts = nlohmann::ordered_json::object();
  for (const auto& p : split.parts) parts[p.name] = p.rows.size();
  j["splits"] = parts;
  j["outside_splits"] = split.dropped;
  write_text(o.out, j.dump(2) + "\n");
  return 0;
}

int cmd_split(const Options& o) {
  const auto revisions = load_corpus(o.corpus);
  const auto truth = o.truth.empty() ? GroundTruth{} : load_truth(o.truth);
  const auto split = split_corpus(revisions, manifest_or_standard(o));
  fs::create_directories(o.out);
  std::unordered_map<RevisionId, const GroundTruthEntry*> label;
  for (const auto& e : truth) label.emplace(e.revision_id, &e);
  for (const auto& p : split.parts) {
    if (!o.split.empty() && p.name != o.split) continue;
    const auto rows = take_rows<RevisionRecord>(revisions, p.rows);
    save_corpus(fs::path(o.out) / (p.name + ".tsv"), rows);
    if (!truth.empty()) {
      GroundTruth part;
      for (const auto& r : rows) {
        const auto it = label.find(r.revision_id);
        if (it == label.end()) fail(ErrorCode::MissingLabel, "no label for revision " + std::to_string(r.revision_id));
        part.push_back(*it->second);
      }
      save_truth(fs::path(o.out) / (p.name + ".truth.tsv"), part);
    }
    std::cout << p.name << '\t' << p.rows.size() << '\n';
  }
  return 0;
}

ForestModel obtain_model(const Options& o, const std::vector<RevisionRecord>& revisions,
                         const DatasetManifest& manifest) {
  if (!o.model.empty()) return load_model(o.model);
  const auto truth = load_truth(o.truth);
  const auto preset = preset_from_name(o.preset, o.seed);
  info("training " + preset.name + " on TRAINING");
  return train_detector(revisions, truth, manifest, preset, o.threads);
}

int cmd_train(const Options& o) {
  const auto revisions = load_corpus(o.corpus);
  const auto truth = load_truth(o.truth);
  const auto preset = preset_from_name(o.preset, o.seed);
  const auto model =
      train_detector(revisions, truth, manifest_or_standard(o), preset, o.threads, o.split.empty() ? "TRAINING" : o.split);
  save_model(model, o.out);
  info("wrote model with " + std::to_string(model.trees.size()) + " trees to " + o.out);
  return 0;
}

int cmd_serve(const Options& o) {
  require_k(o.k);
  const auto revisions = load_corpus(o.corpus);
  const auto manifest = manifest_or_standard(o);
  const auto stream = revisions_in(revisions, manifest.get(o.split.empty() ? "TEST" : o.split).interval);
  ServerConfig cfg{o.k, std::chrono::milliseconds(static_cast<std::int64_t>(o.timeout * 1000))};
  net::Listener listener(net::parse_address(o.addr));
  info("listening on " + listener.address().str() + ", " + std::to_string(stream.size()) + " revisions, k=" +
       std::to_string(o.k));
  if (!o.port_file.empty()) write_text(o.port_file, std::to_string(listener.address().port) + "\n");
  ReplayServer server(stream, cfg);
  try {
    net::Connection conn = listener.accept(cfg.timeout);
    server.run(conn);
  } catch (...) {
    if (!o.out.empty()) save_trace(o.out, server.trace());
    throw;
  }
  if (!o.out.empty()) save_trace(o.out, server.trace());
  info("stream complete, client " + server.client_name());
  return 0;
}

int cmd_detect(const Options& o) {
  require_k(o.k);
  const ReplyPolicy policy = parse_reply(o.reply);
  const auto revisions = load_corpus(o.corpus);
  const auto manifest = manifest_or_standard(o);
  const ForestModel model = obtain_model(o, revisions, manifest);
  const auto interval = manifest.get(o.split.empty() ? "TEST" : o.split).interval;

  OnlineDetector detector(model);
  detector.warm(revisions_before(revisions, interval.from));
  ClientOptions copt;
  copt.name = "wdvdb-" + model.preset;
  copt.policy = policy;
  copt.seed = o.seed;
  copt.pipelined = o.pipelined;
  copt.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.timeout * 1000));

  ScoreTable scores;
  if (o.self_play) {
    const auto stream = revisions_in(revisions, interval);
    copt.expected_total = stream.size();
    const auto result = self_play(stream, detector, ServerConfig{o.k, copt.timeout}, copt);
    scores = result.client.scores;
    if (!o.trace_out.empty()) save_trace(o.trace_out, result.trace);
  } else {
    scores = run_client(detector, net::parse_address(o.addr), copt).scores;
  }
  save_scores(o.out, scores);
  info("wrote " + std::to_string(scores.size()) + " scores to " + o.out);
  return 0;
}

int cmd_meta(const Options& o) {
  std::vector<ScoreTable> tables;
  for (const auto& p : o.scores) tables.push_back(load_scores(p));
  save_scores(o.out, meta_mean(tables));
  return 0;
}

std::optional<LeakReport> leak_from(const Options& o, const std::vector<RevisionRecord>& revisions,
                                    const GroundTruth& truth) {
  if (o.trace.empty()) return std::nullopt;
  const auto events = rollback_events(truth);
  return audit_leak(load_trace(o.trace), revisions, events, truth.size());
}

int cmd_eval(const Options& o) {
  const ReportFormat format = parse_report_format(o.format);
  const auto scores = load_scores(o.scores.at(0));
  const auto truth = load_truth(o.truth);
  const auto revisions = load_corpus(o.corpus);
  const auto dataset = build_dataset(scores, revisions, truth);

  std::vector<ExclusionFilter> exclusions;
  if (!o.exclude_user.empty() || !o.exclude_from.empty() || !o.exclude_to.empty()) {
    std::optional<std::string> user;
    if (!o.exclude_user.empty()) user = o.exclude_user;
    std::optional<TimeInterval> interval;
    if (!o.exclude_from.empty() || !o.exclude_to.empty()) {
      const auto from = time::parse_iso8601(o.exclude_from.empty() ? "1970-01-01T00:00:00Z" : o.exclude_from);
      const auto to = time::parse_iso8601(o.exclude_to.empty() ? "9999-12-31T00:00:00Z" : o.exclude_to);
      if (!from || !to) fail(ErrorCode::Usage, "--exclude-from/--exclude-to must be ISO-8601 UTC");
      interval = TimeInterval{*from, *to};
    }
    exclusions.emplace_back(user, interval, std::nullopt);
  }
  const auto report = make_report(dataset, exclusions, leak_from(o, revisions, truth), o.threshold);
  write_text(o.out, format_report(report, format));
  return 0;
}

int cmd_leak_audit(const Options& o) {
  const auto revisions = load_corpus(o.corpus);
  const auto truth = load_truth(o.truth);
  const auto leak = *leak_from(o, revisions, truth);
  write_text(o.out, "leaked_regular\t" + std::to_string(leak.leaked_regular) + "\nleaked_vandalism\t" +
                        std::to_string(leak.leaked_vandalism) + "\nleaked_fraction\t" +
                        text::format_double(leak.leaked_fraction) + "\n");
  return 0;
}

int cmd_features(const Options& o) {
  const auto revisions = load_corpus(o.corpus);
  auto vectors = extract_all(revisions);
  if (!o.split.empty()) {
    const auto interval = manifest_or_standard(o).get(o.split).interval;
    std::vector<FeatureVector> kept;
    for (std::size_t i = 0; i < revisions.size(); ++i)
      if (interval.contains(revisions[i].timestamp)) kept.push_back(std::move(vectors[i]));
    vectors = std::move(kept);
  }
  if (o.out.empty() || o.out == "-") write_feature_matrix(std::cout, vectors);
  else save_feature_matrix(o.out, vectors);
  return 0;
}

// ---------------------------------------------------------------------------
// Configuration file: a JSON object of flag values (without the leading
// dashes), either top level or under the subcommand's name. Command-line
// flags and WDVDB_* environment variables take precedence.
// ---------------------------------------------------------------------------

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
  const auto apply = [&](const std::string& key, const nlohmann::json& v) {
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (!opt) fail(ErrorCode::InvalidConfig, "config key '" + key + "' is not a flag of " + sub.get_name());
    if (v.is_array()) {
      std::vector<std::string> items;
      for (const auto& x : v) items.push_back(json_scalar(x));
      opt->default_val(items);
    } else {
      opt->default_val(json_scalar(v));
    }
  };
  for (const auto& [key, v] : j.items()) {
    if (v.is_object()) continue;
    apply(key, v);
  }
  if (j.contains(sub.get_name()) && j[sub.get_name()].is_object())
    for (const auto& [key, v] : j[sub.get_name()].items()) apply(key, v);
}

int run(int argc, char** argv) {
  CLI::App app{"Wikidata vandalism detection benchmark: corpus, stream replay, detectors, evaluation"};
  // Top-level --help is the full flag reference of every subcommand.
  app.set_help_flag();
  app.set_help_all_flag("-h,--help", "Print the full flag reference");
  app.require_subcommand(1);
  Options o;
  std::string config_path;

  struct Sub {
    CLI::App* app;
    std::function<int(const Options&)> fn;
  };
  std::vector<Sub> subs;
  const auto add_sub = [&](const std::string& name, const std::string& desc, std::function<int(const Options&)> fn) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config_path, "JSON file with flag values");
    s->add_flag("-v,--verbose", verbosity, "Progress messages on stderr");
    subs.push_back({s, std::move(fn)});
    return s;
  };
  const auto env = [](CLI::Option* opt, const std::string& name) { return opt->envname("WDVDB_" + name); };

  {
    auto* s = add_sub("gen", "Generate a synthetic corpus", cmd_gen);
    env(s->add_option("--seed", o.seed, "Random seed")->capture_default_str(), "SEED");
    s->add_option("--n", o.n, "Number of revisions")->capture_default_str();
    s->add_option("--users", o.users, "Number of registered editors")->capture_default_str();
    s->add_option("--items", o.items, "Number of items")->capture_default_str();
    s->add_option("--vandalism-rate", o.vandalism_rate, "Share of rolled-back revisions")->capture_default_str();
    s->add_option("--badword-prob", o.badword_prob, "Bad-word injection probability")->capture_default_str();
    s->add_option("--tag-prob", o.tag_prob, "Abuse-tag probability on vandalism")->capture_default_str();
    s->add_option("--burst", o.burst, "Rolled-back edits by one reputable user")->capture_default_str();
    s->add_option("--out", o.out, "Corpus TSV to write")->required();
    s->add_option("--truth", o.truth, "Ground-truth TSV to write");
    s->add_option("--manifest", o.manifest, "Write the standard split manifest here");
  }
  {
    auto* s = add_sub("stats", "Corpus statistics as JSON", cmd_stats);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--truth", o.truth, "Ground-truth TSV")->required(), "TRUTH");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--out", o.out, "Output file (default: stdout)");
  }
  {
    auto* s = add_sub("split", "Write one corpus file per split", cmd_split);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--truth", o.truth, "Ground-truth TSV"), "TRUTH");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--split", o.split, "Only this split");
    s->add_option("--out", o.out, "Output directory")->required();
  }
  {
    auto* s = add_sub("train", "Train a detector and save the model", cmd_train);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--truth", o.truth, "Ground-truth TSV")->required(), "TRUTH");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--split", o.split, "Training split (default TRAINING)");
    env(s->add_option("--preset", o.preset, "wdvd, filter, ores or custom:<file>")->capture_default_str(), "PRESET");
    env(s->add_option("--seed", o.seed, "Random seed")->capture_default_str(), "SEED");
    env(s->add_option("--threads", o.threads, "Training threads")->capture_default_str(), "THREADS");
    s->add_option("--out", o.out, "Model file to write")->required();
  }
  {
    auto* s = add_sub("serve", "Replay a split to one detector client", cmd_serve);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--split", o.split, "Split to replay (default TEST)");
    env(s->add_option("--k", o.k, "Backpressure window")->capture_default_str(), "K");
    env(s->add_option("--addr", o.addr, "Listen address host:port (port 0 picks one)")->capture_default_str(), "ADDR");
    s->add_option("--timeout", o.timeout, "Seconds to wait for a score")->capture_default_str();
    s->add_option("--port-file", o.port_file, "Write the bound port here");
    s->add_option("--out", o.out, "Trace file to write");
  }
  {
    auto* s = add_sub("detect", "Train or load a detector and score a replayed split", cmd_detect);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV (training data and history)")->required(), "CORPUS");
    env(s->add_option("--truth", o.truth, "Ground-truth TSV (needed unless --model)"), "TRUTH");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--split", o.split, "Split being replayed (default TEST)");
    env(s->add_option("--preset", o.preset, "wdvd, filter, ores or custom:<file>")->capture_default_str(), "PRESET");
    s->add_option("--model", o.model, "Pretrained model instead of training");
    env(s->add_option("--seed", o.seed, "Random seed")->capture_default_str(), "SEED");
    env(s->add_option("--threads", o.threads, "Training threads")->capture_default_str(), "THREADS");
    env(s->add_option("--k", o.k, "Backpressure window (self-play)")->capture_default_str(), "K");
    env(s->add_option("--addr", o.addr, "Server address host:port")->capture_default_str(), "ADDR");
    s->add_flag("--self-play", o.self_play, "Run the server in this process");
    s->add_flag("--pipelined", o.pipelined, "Receive frames while scoring");
    s->add_option("--reply", o.reply, "immediate, lazy or random")->capture_default_str();
    s->add_option("--timeout", o.timeout, "Seconds to wait for a frame")->capture_default_str();
    s->add_option("--trace-out", o.trace_out, "Trace file (self-play)");
    s->add_option("--out", o.out, "Score table to write")->required();
  }
  {
    auto* s = add_sub("meta", "Mean of several score tables", cmd_meta);
    s->add_option("--scores", o.scores, "Score tables")->required();
    s->add_option("--out", o.out, "Score table to write")->required();
  }
  {
    auto* s = add_sub("eval", "Evaluate a score table", cmd_eval);
    s->add_option("--scores", o.scores, "Score table")->required()->expected(1);
    env(s->add_option("--truth", o.truth, "Ground-truth TSV")->required(), "TRUTH");
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--format", o.format, "tsv or json")->capture_default_str(), "FORMAT");
    s->add_option("--trace", o.trace, "Stream trace for the leak audit");
    s->add_option("--threshold", o.threshold, "Decision threshold")->capture_default_str();
    s->add_option("--exclude-user", o.exclude_user, "Exclude this user's revisions");
    s->add_option("--exclude-from", o.exclude_from, "Exclusion window start (ISO-8601)");
    s->add_option("--exclude-to", o.exclude_to, "Exclusion window end (ISO-8601)");
    s->add_option("--out", o.out, "Report file (default: stdout)");
  }
  {
    auto* s = add_sub("leak-audit", "Ground-truth leakage of a stream trace", cmd_leak_audit);
    s->add_option("--trace", o.trace, "Stream trace")->required();
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--truth", o.truth, "Ground-truth TSV")->required(), "TRUTH");
    s->add_option("--out", o.out, "Output file (default: stdout)");
  }
  {
    auto* s = add_sub("features", "Export the raw feature matrix", cmd_features);
    env(s->add_option("--corpus", o.corpus, "Corpus TSV")->required(), "CORPUS");
    env(s->add_option("--manifest", o.manifest, "Split manifest JSON (default: standard splits)"), "MANIFEST");
    s->add_option("--split", o.split, "Only rows of this split");
    s->add_option("--out", o.out, "Feature TSV (default: stdout)");
  }

  // The config file must be known before parsing so its values can act as
  // defaults underneath flags and environment variables.
  if (argc > 1) {
    for (const auto& sub : subs) {
      if (sub.app->get_name() != argv[1]) continue;
      for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) apply_config(*sub.app, argv[i + 1]);
        else if (a.rfind("--config=", 0) == 0) apply_config(*sub.app, a.substr(9));
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (const auto& sub : subs)
    if (sub.app->parsed()) return sub.fn(o);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wdvdb::Error& e) {
    std::cerr << "wdvdb: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "wdvdb: " << e.what() << '\n';
    return 2;
  }
}
