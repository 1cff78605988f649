#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cooc/classify.hpp"
#include "cooc/error.hpp"

namespace cooc {

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truths, std::string split) {
  if (predictions.empty()) throw DataError("evaluate: no predictions");
  if (predictions.size() != truths.size())
    throw DataError("evaluate: " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(truths.size()) +
                    " truths");
  EvalReport report;
  report.split = std::move(split);
  std::set<std::string> truth_set(truths.begin(), truths.end());
  std::set<std::string> all = truth_set;
  all.insert(predictions.begin(), predictions.end());
  report.columns.assign(all.begin(), all.end());

  std::map<std::string, std::size_t> row_of, col_of;
  for (const auto& t : truth_set) {
    row_of[t] = report.per_class.size();
    report.per_class.push_back({t, 0, 0, 0.0});
  }
  for (std::size_t c = 0; c < report.columns.size(); ++c)
    col_of[report.columns[c]] = c;
  report.confusion.assign(report.per_class.size(),
                          std::vector<std::size_t>(report.columns.size(), 0));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    auto& cls = report.per_class[row_of[truths[i]]];
    ++cls.support;
    ++report.confusion[row_of[truths[i]]][col_of[predictions[i]]];
    if (predictions[i] == truths[i]) {
      ++cls.correct;
      ++correct;
    }
  }
  for (auto& cls : report.per_class)
    cls.accuracy_percent = 100.0 * double(cls.correct) / double(cls.support);
  report.overall_percent = 100.0 * double(correct) / double(truths.size());
  return report;
}

std::string accuracy_table(const EvalReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "class,accuracy_percent\n";
  for (const auto& cls : report.per_class) {
    std::snprintf(buf, sizeof buf, "%.2f", cls.accuracy_percent);
    out << cls.name << "," << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.2f", report.overall_percent);
  out << "overall," << buf << "\n";
  return out.str();
}

std::string confusion_table(const EvalReport& report) {
  std::ostringstream out;
  out << "truth";
  for (const auto& c : report.columns) out << "," << c;
  out << "\n";
  for (std::size_t t = 0; t < report.per_class.size(); ++t) {
    out << report.per_class[t].name;
    for (auto n : report.confusion[t]) out << "," << n;
    out << "\n";
  }
  return out.str();
}

std::vector<std::size_t> stratified_folds(const std::vector<std::string>& classes,
                                          std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < classes.size(); ++i) by_class[classes[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold(classes.size(), 0);
  std::size_t dealt = 0;
  for (auto& [name, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) fold[i] = dealt++ % folds;
  }
  return fold;
}

std::vector<std::size_t> grouped_folds(const std::vector<std::string>& groups,
                                       std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::set<std::string> distinct(groups.begin(), groups.end());
  if (distinct.count(std::string{}))
    throw ConfigError("grouped split requires a group on every video");
  if (distinct.size() < folds)
    throw ConfigError("grouped split: " + std::to_string(distinct.size()) +
                      " groups cannot fill " + std::to_string(folds) + " folds");
  std::vector<std::string> order(distinct.begin(), distinct.end());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t g = 0; g < order.size(); ++g) fold_of[order[g]] = g % folds;
  std::vector<std::size_t> fold(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) fold[i] = fold_of[groups[i]];
  return fold;
}

}  // namespace cooc
