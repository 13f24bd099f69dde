#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "raqa/types.hpp"

namespace raqa {

/// Load a line-delimited dataset file (one JSON object per line with fields
/// id, question, gold_answers, optional intermediate_answers, optional
/// measure_unit). Throws InputError naming the line number on malformed
/// lines and the field name on missing/invalid fields.
std::vector<QaExample> load_dataset(const std::filesystem::path& path, Dataset dataset);

/// Deterministic n-out-of-N sample without replacement (mt19937_64 seeded
/// Fisher-Yates). n is clamped to the population size.
std::vector<QaExample> sample_eval_subset(const std::vector<QaExample>& examples,
                                          std::size_t n, std::uint64_t seed);

}  // namespace raqa
