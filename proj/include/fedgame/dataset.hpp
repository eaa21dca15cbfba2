#pragma once

#include <cstdint>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/matrix.hpp"

namespace fedgame {

// Vertically partitioned dataset: all blocks share sample count and order
// (sample IDs pre-aligned); platform i's task labels live only next to its
// own block.
struct VerticalDataset {
  std::size_t n_samples = 0;
  std::vector<Matrix> blocks;            // per platform, n_samples x d_p
  std::vector<std::vector<int>> labels;  // labels[p][sample]
  std::vector<int> n_classes;            // per platform
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

VerticalDataset generate_synthetic_dataset(const GeneratedDatasetSpec& spec,
                                           std::size_t n_platforms, double test_split);

// Loads and preprocesses CSV data: one-hot encoding for categorical columns,
// z-score normalization for numeric ones (training-split statistics), missing
// values ("?" or empty) imputed with the training mean / majority class.
// Throws ParseError (with file and line) or SchemaMismatch.
VerticalDataset load_csv_dataset(const CsvDatasetSpec& spec, double test_split,
                                 std::uint64_t seed);

// Returns a copy in which only a random ceil(fraction * n_split) subset of
// each split keeps `partner`'s feature block; the rest of that block is
// zeroed. The kept set is the prefix of a seed-determined permutation, so a
// larger fraction keeps a superset of the rows (monotone masking).
VerticalDataset mask_partner_block(const VerticalDataset& dataset, PlatformId target,
                                   PlatformId partner, double fraction, std::uint64_t seed,
                                   bool mask_test = true);

}  // namespace fedgame
