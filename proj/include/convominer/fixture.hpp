#pragma once

#include <cstdint>

#include "convominer/corpus.hpp"

namespace convominer {

/// The 27-code reference vocabulary: 15 learning codes spread over the six
/// Bloom levels and 12 ChatGPT codes, including the reserved EMPTY code.
CodeSchema reference_schema();

struct FixtureShape {
  std::size_t students = 48;
  std::size_t tasks = 27;
  std::size_t conversations = 744;
  std::size_t turns = 2507;
};

inline constexpr std::uint64_t kDefaultFixtureSeed = 7;

/// Deterministic synthetic corpus with exactly the requested shape. Throws
/// std::invalid_argument when the shape is infeasible (more conversations than
/// student-task pairs, or fewer turns than conversations).
Corpus generate_fixture(std::uint64_t seed = kDefaultFixtureSeed, FixtureShape shape = {},
                        LoadOptions options = {});

}  // namespace convominer
