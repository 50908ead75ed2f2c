#include "convominer/irr.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace convominer {

double cohen_kappa(const std::vector<std::vector<double>>& confusion) {
  const std::size_t k = confusion.size();
  double total = 0.0, agree = 0.0;
  std::vector<double> rows(k, 0.0), cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (confusion[i].size() != k) throw IrrInputError("cohen_kappa: confusion matrix must be square");
    for (std::size_t j = 0; j < k; ++j) {
      const double v = confusion[i][j];
      total += v;
      rows[i] += v;
      cols[j] += v;
      if (i == j) agree += v;
    }
  }
  if (total <= 0.0) throw IrrInputError("cohen_kappa: empty confusion matrix");
  const double p_o = agree / total;
  double p_e = 0.0;
  for (std::size_t i = 0; i < k; ++i) p_e += (rows[i] / total) * (cols[i] / total);
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

double compute_irr(const Labeling& labels_a, const Labeling& labels_b) {
  if (labels_a.size() != labels_b.size() ||
      !std::equal(labels_a.begin(), labels_a.end(), labels_b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw IrrInputError("compute_irr: the two labelings cover different item sets");
  }
  if (labels_a.size() < 2) throw IrrInputError("compute_irr: need at least 2 items");

  std::set<std::string> categories;
  for (const auto& [item, code] : labels_a) categories.insert(code);
  for (const auto& [item, code] : labels_b) categories.insert(code);
  const std::vector<std::string> cats(categories.begin(), categories.end());
  auto slot = [&](const std::string& c) {
    return static_cast<std::size_t>(std::lower_bound(cats.begin(), cats.end(), c) - cats.begin());
  };
  std::vector<std::vector<double>> confusion(cats.size(), std::vector<double>(cats.size(), 0.0));
  for (auto a = labels_a.begin(), b = labels_b.begin(); a != labels_a.end(); ++a, ++b) {
    confusion[slot(a->second)][slot(b->second)] += 1.0;
  }
  return cohen_kappa(confusion);
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(std::move(field)));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(std::move(field)));
  return fields;
}

}  // namespace

IrrInput read_irr_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IrrInputError("irr csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"item_id", "coder", "code_id"}) {
    throw IrrInputError("irr csv: header must be item_id,coder,code_id");
  }
  std::vector<std::string> coders;
  std::map<std::string, Labeling> by_coder;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw IrrInputError("irr csv line " + std::to_string(lineno) + ": expected 3 non-empty fields");
    }
    if (std::find(coders.begin(), coders.end(), f[1]) == coders.end()) coders.push_back(f[1]);
    by_coder[f[1]].emplace(f[0], f[2]);  // keeps the first (primary) code
  }
  if (coders.size() != 2) {
    throw IrrInputError("irr csv: expected exactly 2 distinct coders, found " + std::to_string(coders.size()));
  }
  return {coders[0], coders[1], by_coder[coders[0]], by_coder[coders[1]]};
}

}  // namespace convominer
