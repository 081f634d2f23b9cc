#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace otl {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const Prf&, const Prf&) = default;
};

// Per-class one-vs-rest scores plus an average: the positive class for
// binary reports, unweighted class means for macro reports. Every 0/0 ratio
// is taken as 0.
struct MetricsReport {
  std::vector<std::string> classes;
  std::vector<Prf> per_class;
  Prf averaged;
  double accuracy = 0.0;
  std::size_t n = 0;
  bool binary = false;
  int positive = 0;  // meaningful for binary reports

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Label ids index into `classes`; when `classes` is empty, names are "0".."k-1"
// with k inferred from the data (at least 2).
MetricsReport binary_metrics(std::span<const int> preds, std::span<const int> golds, int positive,
                             std::vector<std::string> classes = {});
MetricsReport macro_metrics(std::span<const int> preds, std::span<const int> golds,
                            std::vector<std::string> classes);

// Field-wise arithmetic mean over runs of identical shape.
MetricsReport aggregate_runs(std::span<const MetricsReport> reports);

struct ErrorItem {
  std::size_t index = 0;
  std::string text;
  int gold = 0;
  int pred = 0;
};

struct ErrorReport {
  std::vector<ErrorItem> false_positives;
  std::vector<ErrorItem> false_negatives;
  double fp_percent = 0.0;  // share of errors, 0 when there are none
  double fn_percent = 0.0;
};

ErrorReport error_report(std::span<const int> preds, std::span<const int> golds, std::span<const std::string> texts,
                         int positive);

// Plain-text table: one row per class (P/R/F1) plus the average and accuracy.
void print_report(std::ostream& out, const MetricsReport& report);
// TSV rows `text<TAB>gold<TAB>pred<TAB>FP|FN`.
void write_errors(std::ostream& out, const ErrorReport& errors, std::span<const std::string> classes);

}  // namespace otl
