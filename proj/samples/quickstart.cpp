// SPDX-License-Identifier: Apache-2.0
// Generate a small corpus, train the tag-only detector, replay the test
// split over loopback and print the report.
#include <iostream>

#include "wdvdb.hpp"

int main() {
  using namespace wdvdb;
  SynthConfig cfg;
  cfg.n_revisions = 20000;
  cfg.n_users = 800;
  cfg.n_items = 1500;
  cfg.vandalism_rate = 0.03;
  const GeneratedCorpus corpus = generate_corpus(cfg);

  const auto manifest = DatasetManifest::standard();
  const ForestModel model = train_detector(corpus.revisions, corpus.truth, manifest, presets::filter(7));

  const auto test = manifest.get("TEST").interval;
  OnlineDetector detector(model);
  detector.warm(revisions_before(corpus.revisions, test.from));
  const auto stream = revisions_in(corpus.revisions, test);
  const SelfPlayResult run = self_play(stream, detector);

  const auto dataset = build_dataset(run.client.scores, corpus.revisions, corpus.truth);
  const auto leak = audit_leak(run.trace, corpus.revisions, corpus.rollbacks, corpus.truth.size());
  std::cout << format_report_tsv(make_report(dataset, {}, leak));
}
