#include "otl/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "otl/error.hpp"

namespace otl {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf r;
  r.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  r.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

void check_inputs(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size())
    throw DataError("predictions (" + std::to_string(preds.size()) + ") and gold labels (" +
                    std::to_string(golds.size()) + ") differ in length");
  if (preds.empty()) throw DataError("cannot score an empty prediction set");
}

MetricsReport one_vs_rest(std::span<const int> preds, std::span<const int> golds, std::vector<std::string> classes) {
  check_inputs(preds, golds);
  if (classes.empty()) {
    int k = 2;
    for (std::size_t i = 0; i < preds.size(); ++i) k = std::max({k, preds[i] + 1, golds[i] + 1});
    for (int c = 0; c < k; ++c) classes.push_back(std::to_string(c));
  }
  const auto k = static_cast<int>(classes.size());
  std::vector<std::size_t> tp(classes.size(), 0), fp(classes.size(), 0), fn(classes.size(), 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i], g = golds[i];
    if (p < 0 || p >= k || g < 0 || g >= k) throw DataError("label id out of range at index " + std::to_string(i));
    if (p == g) {
      ++correct;
      ++tp[static_cast<std::size_t>(p)];
    } else {
      ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(g)];
    }
  }
  MetricsReport r;
  r.classes = std::move(classes);
  r.n = preds.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  for (std::size_t c = 0; c < r.classes.size(); ++c) r.per_class.push_back(prf_from_counts(tp[c], fp[c], fn[c]));
  return r;
}

}  // namespace

MetricsReport binary_metrics(std::span<const int> preds, std::span<const int> golds, int positive,
                             std::vector<std::string> classes) {
  auto r = one_vs_rest(preds, golds, std::move(classes));
  if (positive < 0 || positive >= static_cast<int>(r.classes.size())) throw DataError("positive class out of range");
  r.binary = true;
  r.positive = positive;
  r.averaged = r.per_class[static_cast<std::size_t>(positive)];
  return r;
}

MetricsReport macro_metrics(std::span<const int> preds, std::span<const int> golds, std::vector<std::string> classes) {
  auto r = one_vs_rest(preds, golds, std::move(classes));
  const double k = static_cast<double>(r.per_class.size());
  for (const auto& c : r.per_class) {
    r.averaged.precision += c.precision;
    r.averaged.recall += c.recall;
    r.averaged.f1 += c.f1;
  }
  r.averaged.precision /= k;
  r.averaged.recall /= k;
  r.averaged.f1 /= k;
  return r;
}

MetricsReport aggregate_runs(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw DataError("no reports to aggregate");
  const auto& first = reports.front();
  MetricsReport out = first;
  out.per_class.assign(first.per_class.size(), Prf{});
  out.averaged = {};
  out.accuracy = 0.0;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    if (r.classes != first.classes || r.n != first.n || r.binary != first.binary || r.positive != first.positive)
      throw DataError("cannot aggregate reports of different shape");
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
      out.per_class[c].precision += r.per_class[c].precision;
      out.per_class[c].recall += r.per_class[c].recall;
      out.per_class[c].f1 += r.per_class[c].f1;
    }
    out.averaged.precision += r.averaged.precision;
    out.averaged.recall += r.averaged.recall;
    out.averaged.f1 += r.averaged.f1;
    out.accuracy += r.accuracy;
  }
  if (reports.size() == 1) return first;
  auto mean = [n](Prf& p) {
    p.precision /= n;
    p.recall /= n;
    p.f1 /= n;
  };
  for (auto& p : out.per_class) mean(p);
  mean(out.averaged);
  out.accuracy /= n;
  return out;
}

ErrorReport error_report(std::span<const int> preds, std::span<const int> golds, std::span<const std::string> texts,
                         int positive) {
  check_inputs(preds, golds);
  if (texts.size() != preds.size()) throw DataError("texts and predictions differ in length");
  ErrorReport r;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool pred_pos = preds[i] == positive;
    const bool gold_pos = golds[i] == positive;
    if (pred_pos && !gold_pos) r.false_positives.push_back({i, texts[i], golds[i], preds[i]});
    if (!pred_pos && gold_pos) r.false_negatives.push_back({i, texts[i], golds[i], preds[i]});
  }
  const double total = static_cast<double>(r.false_positives.size() + r.false_negatives.size());
  r.fp_percent = ratio(100.0 * static_cast<double>(r.false_positives.size()), total);
  r.fn_percent = ratio(100.0 * static_cast<double>(r.false_negatives.size()), total);
  return r;
}

void print_report(std::ostream& out, const MetricsReport& r) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %9s %9s %9s\n", "class", "P", "R", "F1");
  out << line;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    std::snprintf(line, sizeof(line), "%-12s %9.4f %9.4f %9.4f\n", r.classes[c].c_str(), r.per_class[c].precision,
                  r.per_class[c].recall, r.per_class[c].f1);
    out << line;
  }
  const std::string avg_name = r.binary ? "positive:" + r.classes[static_cast<std::size_t>(r.positive)] : "macro";
  std::snprintf(line, sizeof(line), "%-12s %9.4f %9.4f %9.4f\n", avg_name.c_str(), r.averaged.precision,
                r.averaged.recall, r.averaged.f1);
  out << line;
  std::snprintf(line, sizeof(line), "%-12s %9.4f\n", "accuracy", r.accuracy);
  out << line;
  out << "n " << r.n << '\n';
}

void write_errors(std::ostream& out, const ErrorReport& errors, std::span<const std::string> classes) {
  auto name = [&](int id) {
    return id >= 0 && static_cast<std::size_t>(id) < classes.size() ? classes[static_cast<std::size_t>(id)]
                                                                     : std::to_string(id);
  };
  for (const auto& e : errors.false_positives) out << e.text << '\t' << name(e.gold) << '\t' << name(e.pred) << "\tFP\n";
  for (const auto& e : errors.false_negatives) out << e.text << '\t' << name(e.gold) << '\t' << name(e.pred) << "\tFN\n";
}

}  // namespace otl
