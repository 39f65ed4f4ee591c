#include "kgqa/eval_harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {
namespace {

void check_non_overlapping(const std::vector<Span>& spans, const char* which) {
  std::vector<Span> sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].end <= sorted[i].begin) throw Error(std::string(which) + " span is empty");
    if (i > 0 && sorted[i].begin < sorted[i - 1].end) {
      throw Error(std::string(which) + " spans overlap");
    }
  }
}

}  // namespace

PrfScore span_prf(const std::vector<std::vector<Span>>& predicted,
                  const std::vector<std::vector<Span>>& gold) {
  if (predicted.size() != gold.size()) throw Error("span_prf: question counts differ");
  PrfScore s;
  for (std::size_t q = 0; q < gold.size(); ++q) {
    check_non_overlapping(predicted[q], "predicted");
    check_non_overlapping(gold[q], "gold");
    std::set<Span> g(gold[q].begin(), gold[q].end());
    for (const Span& p : predicted[q]) s.true_positives += g.count(p);
    s.predicted += predicted[q].size();
    s.gold += gold[q].size();
  }
  if (s.predicted == 0 && s.gold == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  const auto tp = static_cast<double>(s.true_positives);
  s.precision = s.predicted ? tp / static_cast<double>(s.predicted) : 0.0;
  s.recall = s.gold ? tp / static_cast<double>(s.gold) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

double recall_at_n(const std::vector<std::vector<std::string>>& ranked,
                   const std::vector<std::string>& gold, std::size_t n) {
  if (n == 0) throw Error("recall_at_n: n must be at least 1");
  if (ranked.size() != gold.size()) throw Error("recall_at_n: question counts differ");
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t q = 0; q < gold.size(); ++q) {
    const auto& list = ranked[q];
    const std::size_t limit = std::min(n, list.size());
    if (std::find(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(limit), gold[q]) !=
        list.begin() + static_cast<std::ptrdiff_t>(limit)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double end_to_end_accuracy(const std::vector<std::optional<MidRelation>>& answers,
                           const std::vector<MidRelation>& gold) {
  if (answers.size() != gold.size()) throw Error("end_to_end_accuracy: question counts differ");
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t q = 0; q < gold.size(); ++q) {
    if (answers[q] && *answers[q] == gold[q]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

MetricSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw Error("aggregate: no runs");
  MetricSummary s;
  s.runs = values;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  // Rounding in the mean can land a hair outside [min, max] for equal runs.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

RunReport aggregate_runs(const std::vector<std::map<std::string, double>>& runs,
                         std::vector<std::uint64_t> seeds) {
  if (runs.empty()) throw Error("aggregate_runs: no runs");
  RunReport report;
  report.seeds = std::move(seeds);
  for (const auto& [name, v] : runs.front()) {
    std::vector<double> values;
    for (const auto& run : runs) {
      auto it = run.find(name);
      if (it == run.end()) throw Error("aggregate_runs: metric '" + name + "' missing from a run");
      values.push_back(it->second);
    }
    report.metrics.emplace(name, summarize(values));
  }
  for (const auto& run : runs) {
    if (run.size() != runs.front().size()) throw Error("aggregate_runs: runs report different metrics");
  }
  return report;
}

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string format_summary(const MetricSummary& s) {
  return format_score(s.mean) + " [" + format_score(s.min) + " " + format_score(s.max) + "]";
}

std::string RunReport::to_tsv() const {
  std::ostringstream out;
  out << "kgqa-report v1\n";
  out << "runs\t" << (metrics.empty() ? 0 : metrics.begin()->second.runs.size()) << '\n';
  out << "seeds\t";
  for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? "," : "") << seeds[i];
  out << '\n';
  out << "metric\tmean\tmin\tmax\tper_run\n";
  for (const auto& [name, s] : metrics) {
    out << name << '\t' << io::format_double(s.mean) << '\t' << io::format_double(s.min) << '\t'
        << io::format_double(s.max) << '\t';
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
      out << (i ? "," : "") << io::format_double(s.runs[i]);
    }
    out << '\n';
  }
  return out.str();
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  for (const auto& [name, s] : metrics) out << name << ": " << format_summary(s) << '\n';
  return out.str();
}

}  // namespace kgqa
