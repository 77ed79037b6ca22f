// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wdvdb/corpus/split.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/features/encoder.hpp"
#include "wdvdb/features/extractor.hpp"
#include "wdvdb/learning/forest.hpp"
#include "wdvdb/learning/mil.hpp"
#include "wdvdb/learning/presets.hpp"
#include "wdvdb/protocol/client.hpp"

namespace wdvdb {

/// Feature vectors and labels of one split, extracted over the stream from
/// the first revision so cumulative features see the full history.
struct LabeledFeatures {
  std::vector<FeatureVector> vectors;
  std::vector<std::uint8_t> labels;
};

inline LabeledFeatures split_features(std::span<const RevisionRecord> revisions, const GroundTruth& truth,
                                      const TimeInterval& interval, const Lexicons& lex = Lexicons::defaults()) {
  std::unordered_map<RevisionId, bool> label;
  label.reserve(truth.size());
  for (const auto& e : truth) label.emplace(e.revision_id, e.is_vandalism);
  FeatureExtractor fx(lex);
  LabeledFeatures out;
  for (const auto& r : revisions) {
    if (r.timestamp >= interval.to) continue;
    if (!interval.contains(r.timestamp)) {
      fx.observe(r);
      continue;
    }
    const auto l = label.find(r.revision_id);
    if (l == label.end()) fail(ErrorCode::MissingLabel, "no label for revision " + std::to_string(r.revision_id), r.revision_id);
    out.vectors.push_back(fx.extract_and_update(r));
    out.labels.push_back(l->second ? 1 : 0);
  }
  return out;
}

/// Fits the encoder on the training vectors, then the preset's forest on the
/// columns it selects.
inline ForestModel train_on_features(const LabeledFeatures& data, const DetectorPreset& preset, unsigned threads = 1) {
  if (data.vectors.empty()) fail(ErrorCode::EmptyData, "training split is empty");
  Encoder enc;
  for (const auto& v : data.vectors) enc.observe(v);
  enc.freeze();
  const auto& columns = enc.column_names();
  const auto selected = preset.select(columns);
  if (selected.empty()) fail(ErrorCode::InvalidConfig, "preset " + preset.name + " selects no columns");

  FeatureMatrix x(data.vectors.size(), selected.size());
  std::vector<double> row(columns.size());
  for (std::size_t i = 0; i < data.vectors.size(); ++i) {
    enc.encode_into(data.vectors[i], row);
    for (std::size_t c = 0; c < selected.size(); ++c) x.at(i, c) = row[selected[c]];
  }
  std::vector<std::string> names;
  for (std::size_t c : selected) names.push_back(columns[c]);

  ForestModel model = train_forest(x, data.labels, preset.forest, std::move(names), threads);
  model.encoder = std::move(enc);
  model.preset = preset.name;
  model.mil_enabled = preset.mil_enabled;
  return model;
}

inline ForestModel train_detector(std::span<const RevisionRecord> revisions, const GroundTruth& truth,
                                  const DatasetManifest& manifest, const DetectorPreset& preset, unsigned threads = 1,
                                  std::string_view split = "TRAINING") {
  return train_on_features(split_features(revisions, truth, manifest.get(split).interval), preset, threads);
}

/// Scores a stream with a trained model, one revision at a time. Cumulative
/// state comes only from revisions already seen, through warm() or score().
class OnlineDetector final : public Detector {
 public:
  explicit OnlineDetector(const ForestModel& model, const Lexicons& lex = Lexicons::defaults())
      : model_(&model), fx_(lex) {
    if (!model.encoder) fail(ErrorCode::NotFrozenInTest, "model carries no frozen encoder");
    const auto& columns = model.encoder->column_names();
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < columns.size(); ++i) index.emplace(columns[i], i);
    for (const auto& name : model.feature_names) {
      const auto it = index.find(name);
      if (it == index.end()) fail(ErrorCode::ArityMismatch, "model column " + name + " not produced by its encoder");
      selected_.push_back(it->second);
    }
    const auto& numeric = numeric_feature_names();
    for (std::size_t i = 0; i < numeric.size(); ++i)
      if (numeric[i] == "positionWithinSession") position_index_ = i;
    encoded_.resize(columns.size());
    input_.resize(selected_.size());
  }

  /// Folds revisions preceding the scored stream into the state.
  void warm(std::span<const RevisionRecord> revisions) {
    for (const auto& r : revisions) fx_.observe(r);
  }

  double score(const RevisionRecord& r) override {
    const FeatureVector v = fx_.extract_and_update(r);
    model_->encoder->encode_into(v, encoded_);
    for (std::size_t c = 0; c < selected_.size(); ++c) input_[c] = encoded_[selected_[c]];
    const double raw = model_->predict(input_);
    if (!model_->mil_enabled) return raw;
    return mil_.add(r.item_id, static_cast<std::int64_t>(v.numeric[position_index_]), raw);
  }

 private:
  const ForestModel* model_;
  FeatureExtractor fx_;
  std::vector<std::size_t> selected_;
  std::size_t position_index_ = 0;
  std::vector<double> encoded_;
  std::vector<double> input_;
  MilAccumulator mil_;
};

/// Revisions of the corpus strictly before `t`, in corpus order.
inline std::vector<RevisionRecord> revisions_before(std::span<const RevisionRecord> revisions, Timestamp t) {
  std::vector<RevisionRecord> out;
  for (const auto& r : revisions)
    if (r.timestamp < t) out.push_back(r);
  return out;
}

inline std::vector<RevisionRecord> revisions_in(std::span<const RevisionRecord> revisions, const TimeInterval& interval) {
  std::vector<RevisionRecord> out;
  for (const auto& r : revisions)
    if (interval.contains(r.timestamp)) out.push_back(r);
  return out;
}

}  // namespace wdvdb
