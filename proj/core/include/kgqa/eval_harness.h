#pragma once

// Evaluation protocols: span P/R/F1 for detection, R@N for linking and
// relation prediction, end-to-end accuracy, and mean/min/max aggregation
// over repeated runs.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgqa/crf_tagger.h"

namespace kgqa {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

// Micro-averaged exact-boundary match; one span list per question. Both
// corpora empty gives P = R = F1 = 1. Throws on overlapping spans.
PrfScore span_prf(const std::vector<std::vector<Span>>& predicted,
                  const std::vector<std::vector<Span>>& gold);

// Fraction of questions whose gold item is within the first n entries.
double recall_at_n(const std::vector<std::vector<std::string>>& ranked,
                   const std::vector<std::string>& gold, std::size_t n);

using MidRelation = std::pair<std::string, std::string>;

// nullopt answers are abstentions and count as wrong.
double end_to_end_accuracy(const std::vector<std::optional<MidRelation>>& answers,
                           const std::vector<MidRelation>& gold);

struct MetricSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> runs;
};

MetricSummary summarize(const std::vector<double>& values);

struct RunReport {
  std::vector<std::uint64_t> seeds;
  std::map<std::string, MetricSummary> metrics;

  // "metric<TAB>mean<TAB>min<TAB>max<TAB>runs" lines after a versioned
  // header.
  std::string to_tsv() const;
  // One "metric: mean [min max]" line per metric.
  std::string to_text() const;
};

// Throws when there are no runs or runs disagree on the metric names.
RunReport aggregate_runs(const std::vector<std::map<std::string, double>>& runs,
                         std::vector<std::uint64_t> seeds = {});

// Two decimals with trailing zeros removed: 74.8667 -> "74.87", 74.6 -> "74.6".
std::string format_score(double v);
// "mean [min max]".
std::string format_summary(const MetricSummary& s);

}  // namespace kgqa
