#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace convominer {

/// item id -> primary code id
using Labeling = std::map<std::string, std::string>;

class IrrInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cohen's kappa over the primary codes two coders assigned to the same items.
/// Both labelings must cover the same item ids and hold at least two items.
/// Returns 1 when chance agreement is 1 (both coders used one identical label).
double compute_irr(const Labeling& labels_a, const Labeling& labels_b);

/// Cohen's kappa from a square confusion matrix (rows: coder A, cols: coder B).
double cohen_kappa(const std::vector<std::vector<double>>& confusion);

struct IrrInput {
  std::string coder_a;
  std::string coder_b;
  Labeling labels_a;
  Labeling labels_b;
};

/// Reads `item_id,coder,code_id` rows (header required). Exactly two distinct
/// coders; the first row of an (item, coder) pair is its primary code.
IrrInput read_irr_csv(std::istream& in);

}  // namespace convominer
