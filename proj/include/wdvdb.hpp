// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wdvdb/corpus/generator.hpp"
#include "wdvdb/corpus/io.hpp"
#include "wdvdb/corpus/labels.hpp"
#include "wdvdb/corpus/sessions.hpp"
#include "wdvdb/corpus/split.hpp"
#include "wdvdb/corpus/stats.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/evaluation/dataset.hpp"
#include "wdvdb/evaluation/metrics.hpp"
#include "wdvdb/evaluation/report.hpp"
#include "wdvdb/evaluation/scores.hpp"
#include "wdvdb/features/comment.hpp"
#include "wdvdb/features/encoder.hpp"
#include "wdvdb/features/export.hpp"
#include "wdvdb/features/extractor.hpp"
#include "wdvdb/features/lexicons.hpp"
#include "wdvdb/features/state.hpp"
#include "wdvdb/features/text_features.hpp"
#include "wdvdb/learning/forest.hpp"
#include "wdvdb/learning/impurity.hpp"
#include "wdvdb/learning/meta.hpp"
#include "wdvdb/learning/mil.hpp"
#include "wdvdb/learning/model_io.hpp"
#include "wdvdb/learning/presets.hpp"
#include "wdvdb/learning/tree.hpp"
#include "wdvdb/pipeline.hpp"
#include "wdvdb/protocol/client.hpp"
#include "wdvdb/protocol/leak.hpp"
#include "wdvdb/protocol/self_play.hpp"
#include "wdvdb/protocol/server.hpp"
#include "wdvdb/protocol/socket.hpp"
#include "wdvdb/protocol/trace.hpp"
#include "wdvdb/protocol/window.hpp"
#include "wdvdb/protocol/wire.hpp"
#include "wdvdb/util/binary.hpp"
#include "wdvdb/util/random.hpp"
#include "wdvdb/util/text.hpp"
#include "wdvdb/util/time.hpp"
