#include "gazeload/metrics.hpp"

#include <algorithm>
#include <map>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (int t = 0; t < 3; ++t) n += row_total(t);
  return n;
}

std::int64_t ConfusionMatrix::row_total(int t) const {
  return counts[t][0] + counts[t][1] + counts[t][2] + parse_failures[t];
}

std::int64_t ConfusionMatrix::col_total(int p) const {
  return counts[0][p] + counts[1][p] + counts[2][p];
}

ConfusionMatrix confusion(const std::vector<EvalPair>& pairs) {
  ConfusionMatrix cm;
  for (const EvalPair& p : pairs) {
    const int t = static_cast<int>(p.truth);
    if (p.parse_failed) {
      ++cm.parse_failures[t];
    } else {
      ++cm.counts[t][static_cast<int>(p.pred)];
    }
  }
  return cm;
}

ConfusionMatrix confusion(const std::vector<Level>& truth, const std::vector<Level>& pred) {
  if (truth.size() != pred.size()) {
    throw InputError("confusion: " + std::to_string(truth.size()) + " labels vs " +
                     std::to_string(pred.size()) + " predictions");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.counts[static_cast<int>(truth[i])][static_cast<int>(pred[i])];
  }
  return cm;
}

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InputError("cannot compute metrics for an empty evaluation");
  MetricReport report;
  report.cm = cm;
  std::int64_t trace = 0;
  for (int c = 0; c < 3; ++c) {
    trace += cm.counts[c][c];
    ClassMetrics& m = report.per_class[c];
    m.precision = ratio(cm.counts[c][c], cm.col_total(c));
    m.recall = ratio(cm.counts[c][c], cm.row_total(c));
    const double pr = m.precision + m.recall;
    m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    report.macro_precision += m.precision / 3.0;
    report.macro_recall += m.recall / 3.0;
    report.macro_f1 += m.f1 / 3.0;
  }
  report.accuracy = ratio(trace, cm.total());
  return report;
}

std::vector<UserAccuracy> per_user_accuracy(const std::vector<EvalPair>& pairs) {
  std::map<std::string, UserAccuracy> by_user;
  for (const EvalPair& p : pairs) {
    UserAccuracy& u = by_user[p.user];
    u.user = p.user;
    ++u.n;
    if (!p.parse_failed && p.pred == p.truth) ++u.correct;
  }
  std::vector<UserAccuracy> out;
  for (auto& [_, u] : by_user) {
    u.accuracy = u.n == 0 ? 0.0 : static_cast<double>(u.correct) / static_cast<double>(u.n);
    out.push_back(u);
  }
  return out;
}

std::string metric_report_to_csv(const MetricReport& report) {
  const char* names[3] = {"Low", "Moderate", "High"};
  std::string out = "metric,class,value\n";
  auto add = [&](const std::string& metric, const std::string& cls, double value) {
    out += metric + "," + cls + "," + format_fixed(value, 6) + "\n";
  };
  add("accuracy", "all", report.accuracy);
  add("macro_precision", "all", report.macro_precision);
  add("macro_recall", "all", report.macro_recall);
  add("macro_f1", "all", report.macro_f1);
  for (int c = 0; c < 3; ++c) {
    add("precision", names[c], report.per_class[c].precision);
    add("recall", names[c], report.per_class[c].recall);
    add("f1", names[c], report.per_class[c].f1);
  }
  for (int t = 0; t < 3; ++t) {
    for (int p = 0; p < 3; ++p) {
      out += std::string("confusion_") + names[t] + "_" + names[p] + ",count," +
             std::to_string(report.cm.counts[t][p]) + "\n";
    }
  }
  for (int t = 0; t < 3; ++t) {
    out += std::string("parse_failed_") + names[t] + ",count," +
           std::to_string(report.cm.parse_failures[t]) + "\n";
  }
  return out;
}

std::string per_user_to_csv(const std::vector<UserAccuracy>& rows) {
  std::string out = "user,accuracy\n";
  for (const UserAccuracy& u : rows) {
    out += u.user + "," + format_fixed(u.accuracy, 6) + "\n";
  }
  return out;
}

std::string accuracy_cdf_csv(const std::vector<UserAccuracy>& rows) {
  std::vector<double> acc;
  for (const UserAccuracy& u : rows) acc.push_back(u.accuracy);
  std::sort(acc.begin(), acc.end());
  std::string out = "accuracy,cum_fraction\n";
  const double n = static_cast<double>(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out += format_fixed(acc[i], 6) + "," +
           format_fixed(static_cast<double>(i + 1) / n, 6) + "\n";
  }
  return out;
}

std::string metric_report_summary(const MetricReport& report) {
  const char* names[3] = {"Low", "Moderate", "High"};
  std::string out;
  out += "accuracy: " + format_fixed(report.accuracy, 4) + " (" +
         std::to_string(report.cm.total()) + " pairs)\n";
  out += "macro F1: " + format_fixed(report.macro_f1, 4) + "\n";
  for (int c = 0; c < 3; ++c) {
    out += std::string(names[c]) + ": precision " +
           format_fixed(report.per_class[c].precision, 4) + ", recall " +
           format_fixed(report.per_class[c].recall, 4) + ", f1 " +
           format_fixed(report.per_class[c].f1, 4) + "\n";
  }
  std::int64_t failures = 0;
  for (int t = 0; t < 3; ++t) failures += report.cm.parse_failures[t];
  out += "parse failures: " + std::to_string(failures) + "\n";
  return out;
}

}  // namespace gazeload
