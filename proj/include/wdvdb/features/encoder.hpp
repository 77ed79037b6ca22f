// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wdvdb/error.hpp"
#include "wdvdb/features/extractor.hpp"
#include "wdvdb/util/binary.hpp"

namespace wdvdb {

enum class CategoricalMode : std::uint8_t { OneHot = 0, Frequency = 1 };

/// Value dictionary of one categorical field: ids are dense, in first-seen order.
class FieldDictionary {
 public:
  static constexpr std::int32_t kUnseen = -1;

  FieldDictionary() = default;
  FieldDictionary(std::string name, bool one_hot_eligible)
      : name_(std::move(name)), one_hot_eligible_(one_hot_eligible) {}

  const std::string& name() const noexcept { return name_; }
  bool one_hot_eligible() const noexcept { return one_hot_eligible_; }
  CategoricalMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::int64_t observations() const noexcept { return observations_; }

  std::int32_t observe(const std::string& value) {
    ++observations_;
    return count_value(value);
  }

  /// Counts `value` without counting a row; for multi-valued fields.
  std::int32_t count_value(const std::string& value) {
    const auto [it, inserted] = ids_.try_emplace(value, static_cast<std::int32_t>(values_.size()));
    if (inserted) {
      values_.push_back(value);
      counts_.push_back(0);
    }
    ++counts_[static_cast<std::size_t>(it->second)];
    return it->second;
  }

  /// Counts a row that has no value, for the frequency denominator.
  void observe_absent() { ++observations_; }

  std::int32_t id_of(const std::string& value) const {
    const auto it = ids_.find(value);
    return it == ids_.end() ? kUnseen : it->second;
  }
  const std::string& value_of(std::int32_t id) const { return values_.at(static_cast<std::size_t>(id)); }
  std::int64_t count_of(std::int32_t id) const { return counts_.at(static_cast<std::size_t>(id)); }

  /// Share of training rows carrying `value`; 0 for unseen values.
  double frequency(const std::string& value) const {
    const std::int32_t id = id_of(value);
    if (id == kUnseen || observations_ == 0) return 0.0;
    return static_cast<double>(count_of(id)) / static_cast<double>(observations_);
  }

  void freeze(std::size_t one_hot_limit) {
    mode_ = one_hot_eligible_ && values_.size() <= one_hot_limit ? CategoricalMode::OneHot
                                                                 : CategoricalMode::Frequency;
  }

  void write(ByteWriter& w) const {
    w.str(name_);
    w.u8(one_hot_eligible_ ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(mode_));
    w.i64(observations_);
    w.u64(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      w.str(values_[i]);
      w.i64(counts_[i]);
    }
  }

  static FieldDictionary read(ByteReader& r) {
    FieldDictionary d;
    d.name_ = r.str();
    d.one_hot_eligible_ = r.u8() != 0;
    const std::uint8_t mode = r.u8();
    if (mode > 1) ByteReader::corrupt("bad categorical mode");
    d.mode_ = static_cast<CategoricalMode>(mode);
    d.observations_ = r.i64();
    const std::size_t n = r.count(12);
    for (std::size_t i = 0; i < n; ++i) {
      std::string v = r.str();
      const std::int64_t c = r.i64();
      d.ids_.emplace(v, static_cast<std::int32_t>(i));
      d.values_.push_back(std::move(v));
      d.counts_.push_back(c);
    }
    return d;
  }

  bool operator==(const FieldDictionary& o) const {
    return name_ == o.name_ && one_hot_eligible_ == o.one_hot_eligible_ && mode_ == o.mode_ &&
           observations_ == o.observations_ && values_ == o.values_ && counts_ == o.counts_;
  }

 private:
  std::string name_;
  bool one_hot_eligible_ = true;
  CategoricalMode mode_ = CategoricalMode::OneHot;
  std::int64_t observations_ = 0;
  std::vector<std::string> values_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Turns FeatureVectors into numeric rows. Dictionaries are learned from the
/// training rows, then frozen; encoding is only defined once frozen.
///
/// Column layout: the numeric features in order, then per categorical field
/// either one "field=value" indicator per training value or a single
/// "field.freq" column, then the tags the same way ("revisionTags=tag" or
/// "revisionTags.freq" holding the highest frequency among the row's tags).
class Encoder {
 public:
  static constexpr std::size_t kOneHotLimit = 64;

  Encoder() {
    for (std::size_t i = 0; i < kCategoricalFeatureCount; ++i) {
      const std::string_view n = kCategoricalFeatureNames[i];
      const bool eligible = n == "userContinent" || n == "revisionLanguage" || n == "revisionAction" ||
                            n == "revisionSubaction" || n == "revisionPrevAction";
      fields_.emplace_back(std::string(n), eligible);
    }
    tags_ = FieldDictionary(std::string(kTagFeatureName), true);
  }

  bool frozen() const noexcept { return frozen_; }
  std::span<const FieldDictionary> fields() const noexcept { return fields_; }
  const FieldDictionary& tags() const noexcept { return tags_; }

  void observe(const FeatureVector& v) {
    if (frozen_) fail(ErrorCode::Usage, "encoder is frozen");
    for (std::size_t i = 0; i < kCategoricalFeatureCount; ++i) {
      if (v.categorical[i]) fields_[i].observe(*v.categorical[i]);
      else fields_[i].observe_absent();
    }
    // Tag frequencies are per row: the denominator is the number of rows.
    tags_.observe_absent();
    for (const auto& t : v.tags) tags_.count_value(t);
  }

  void freeze() {
    if (frozen_) return;
    for (auto& f : fields_) f.freeze(kOneHotLimit);
    tags_.freeze(kOneHotLimit);
    frozen_ = true;
    build_columns();
  }

  const std::vector<std::string>& column_names() const {
    require_frozen();
    return columns_;
  }
  std::size_t width() const { return column_names().size(); }

  std::vector<double> encode(const FeatureVector& v) const {
    std::vector<double> row(width());
    encode_into(v, row);
    return row;
  }

  void encode_into(const FeatureVector& v, std::span<double> out) const {
    require_frozen();
    if (out.size() != columns_.size()) fail(ErrorCode::ArityMismatch, "encoder output width mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    std::copy(v.numeric.begin(), v.numeric.end(), out.begin());
    std::size_t k = kNumericFeatureCount;
    for (std::size_t i = 0; i < kCategoricalFeatureCount; ++i) {
      const FieldDictionary& f = fields_[i];
      const auto& value = v.categorical[i];
      if (f.mode() == CategoricalMode::OneHot) {
        if (value) {
          const std::int32_t id = f.id_of(*value);
          if (id != FieldDictionary::kUnseen) out[k + static_cast<std::size_t>(id)] = 1.0;
        }
        k += f.size();
      } else {
        out[k++] = value ? f.frequency(*value) : kMissing;
      }
    }
    if (tags_.mode() == CategoricalMode::OneHot) {
      for (const auto& t : v.tags) {
        const std::int32_t id = tags_.id_of(t);
        if (id != FieldDictionary::kUnseen) out[k + static_cast<std::size_t>(id)] = 1.0;
      }
      k += tags_.size();
    } else {
      double best = 0.0;
      for (const auto& t : v.tags) best = std::max(best, tags_.frequency(t));
      out[k++] = best;
    }
  }

  void write(ByteWriter& w) const {
    require_frozen();
    w.u64(fields_.size());
    for (const auto& f : fields_) f.write(w);
    tags_.write(w);
  }

  static Encoder read(ByteReader& r) {
    Encoder e;
    const std::size_t n = r.count();
    if (n != kCategoricalFeatureCount) ByteReader::corrupt("categorical field count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      e.fields_[i] = FieldDictionary::read(r);
      if (e.fields_[i].name() != kCategoricalFeatureNames[i]) ByteReader::corrupt("categorical field mismatch");
    }
    e.tags_ = FieldDictionary::read(r);
    e.frozen_ = true;
    e.build_columns();
    return e;
  }

  bool operator==(const Encoder& o) const {
    return frozen_ == o.frozen_ && fields_ == o.fields_ && tags_ == o.tags_;
  }

 private:
  void require_frozen() const {
    if (!frozen_) fail(ErrorCode::NotFrozenInTest, "encoder must be frozen on training data before encoding");
  }

  void build_columns() {
    columns_ = numeric_feature_names();
    for (const auto& f : fields_) {
      if (f.mode() == CategoricalMode::OneHot) {
        for (std::size_t id = 0; id < f.size(); ++id)
          columns_.push_back(f.name() + "=" + f.value_of(static_cast<std::int32_t>(id)));
      } else {
        columns_.push_back(f.name() + ".freq");
      }
    }
    if (tags_.mode() == CategoricalMode::OneHot) {
      for (std::size_t id = 0; id < tags_.size(); ++id)
        columns_.push_back(tags_.name() + "=" + tags_.value_of(static_cast<std::int32_t>(id)));
    } else {
      columns_.push_back(tags_.name() + ".freq");
    }
  }

  std::vector<FieldDictionary> fields_;
  FieldDictionary tags_;
  bool frozen_ = false;
  std::vector<std::string> columns_;
};

/// Base feature of an encoded column: "revisionAction=wbsetlabel" -> "revisionAction".
inline std::string_view column_base(std::string_view column) {
  if (const auto eq = column.find('='); eq != std::string_view::npos) return column.substr(0, eq);
  if (column.ends_with(".freq")) return column.substr(0, column.size() - 5);
  return column;
}

}  // namespace wdvdb
