// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

#include "wdvdb/error.hpp"
#include "wdvdb/features/extractor.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// Raw feature table: revision_id, the numeric features, the categorical
/// fields, then the tags joined by ','. Missing values are empty fields.
inline void write_feature_matrix(std::ostream& out, std::span<const FeatureVector> rows) {
  out << "revision_id";
  for (const auto& n : numeric_feature_names()) out << '\t' << n;
  for (auto n : kCategoricalFeatureNames) out << '\t' << n;
  out << '\t' << kTagFeatureName << '\n';
  for (const auto& v : rows) {
    out << v.revision_id;
    for (double x : v.numeric) {
      out << '\t';
      if (!is_missing(x)) out << text::format_double(x);
    }
    for (const auto& c : v.categorical) {
      out << '\t';
      if (c) out << text::escape_field(*c);
    }
    out << '\t' << text::escape_field(text::join(v.tags, ",")) << '\n';
  }
}

inline void save_feature_matrix(const std::filesystem::path& path, std::span<const FeatureVector> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  write_feature_matrix(out, rows);
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace wdvdb
