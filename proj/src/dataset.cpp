#include "fedgame/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fedgame/rng.hpp"

namespace fedgame {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) cells.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

struct RawTable {
  std::vector<std::vector<std::string>> rows;
};

RawTable read_csv_file(const std::string& path, const std::vector<CsvColumn>& columns,
                       bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file: " + path);
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (header_pending) {
      header_pending = false;
      if (cells.size() != columns.size()) {
        throw SchemaMismatch(path + ": header has " + std::to_string(cells.size()) +
                             " columns, schema expects " + std::to_string(columns.size()));
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] != columns[c].name) {
          throw SchemaMismatch(path + ": header column '" + cells[c] + "' does not match schema '" +
                               columns[c].name + "'");
        }
      }
      continue;
    }
    if (cells.size() != columns.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(columns.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

double parse_numeric(const std::string& cell, const std::string& path, std::size_t row_index) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError(path + ": row " + std::to_string(row_index + 1) + ": not a number: '" +
                     cell + "'");
  }
  if (used != cell.size()) {
    throw ParseError(path + ": row " + std::to_string(row_index + 1) + ": not a number: '" +
                     cell + "'");
  }
  return v;
}

void make_split(std::size_t n, double test_split, std::uint64_t seed,
                std::vector<std::size_t>& train, std::vector<std::size_t>& test) {
  Rng rng(derive_seed(seed, "train-test-split"));
  auto perm = rng.permutation(n);
  auto n_test = static_cast<std::size_t>(std::ceil(test_split * static_cast<double>(n)));
  n_test = std::min(n_test, n == 0 ? 0 : n - 1);
  test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
}

}  // namespace

VerticalDataset generate_synthetic_dataset(const GeneratedDatasetSpec& spec,
                                           std::size_t n_platforms, double test_split) {
  const std::size_t n = spec.n_samples;
  const std::size_t d = spec.features_per_block;
  VerticalDataset out;
  out.n_samples = n;
  out.blocks.reserve(n_platforms);
  for (std::size_t b = 0; b < n_platforms; ++b) {
    Matrix block(n, d);
    Rng rng(derive_seed(spec.data_seed, "features", {b}));
    for (double& v : block.data) v = rng.next_normal();
    out.blocks.push_back(std::move(block));
  }

  out.labels.assign(n_platforms, std::vector<int>(n, 0));
  out.n_classes.assign(n_platforms, 2);
  for (std::size_t p = 0; p < n_platforms; ++p) {
    // Per-block direction vectors; signal[p][b] scales block b's contribution
    // to platform p's logits.
    std::vector<std::vector<double>> dirs(n_platforms, std::vector<double>(d, 0.0));
    for (std::size_t b = 0; b < n_platforms; ++b) {
      Rng rng(derive_seed(spec.data_seed, "task-direction", {p, b}));
      for (double& v : dirs[b]) v = rng.next_normal();
    }
    Rng label_rng(derive_seed(spec.data_seed, "labels", {p}));
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      double logit = 0.0;
      for (std::size_t b = 0; b < n_platforms; ++b) {
        double s = spec.signal[p][b];
        if (s == 0.0) continue;
        double dot = 0.0;
        auto row = out.blocks[b].row(i);
        for (std::size_t f = 0; f < d; ++f) dot += row[f] * dirs[b][f];
        logit += s * dot * inv_sqrt_d;
      }
      double prob = 1.0 / (1.0 + std::exp(-logit));
      out.labels[p][i] = label_rng.next_unit() < prob ? 1 : 0;
    }
  }

  make_split(n, test_split, spec.data_seed, out.train_index, out.test_index);
  return out;
}

VerticalDataset load_csv_dataset(const CsvDatasetSpec& spec, double test_split,
                                 std::uint64_t seed) {
  if (spec.paths.empty() || spec.paths.size() > 2) {
    throw InvalidConfig("csv dataset needs one or two paths");
  }
  RawTable train_raw = read_csv_file(spec.paths[0], spec.columns, spec.has_header);
  RawTable test_raw;
  const bool two_files = spec.paths.size() == 2;
  if (two_files) test_raw = read_csv_file(spec.paths[1], spec.columns, spec.has_header);

  std::vector<std::vector<std::string>> rows = std::move(train_raw.rows);
  const std::size_t n_first = rows.size();
  for (auto& r : test_raw.rows) rows.push_back(std::move(r));
  const std::size_t n = rows.size();
  if (n == 0) throw ParseError(spec.paths[0] + ": no data rows");

  std::size_t n_platforms = 0;
  for (const auto& col : spec.columns) n_platforms = std::max(n_platforms, col.platform + 1);

  VerticalDataset out;
  out.n_samples = n;
  if (two_files) {
    for (std::size_t i = 0; i < n_first; ++i) out.train_index.push_back(i);
    for (std::size_t i = n_first; i < n; ++i) out.test_index.push_back(i);
  } else {
    make_split(n, test_split, seed, out.train_index, out.test_index);
  }

  // Encode column by column; all statistics come from the training split.
  std::vector<std::size_t> platform_width(n_platforms, 0);
  std::vector<std::vector<std::vector<double>>> staged(n_platforms);
  out.labels.assign(n_platforms, {});
  out.n_classes.assign(n_platforms, 0);

  for (std::size_t c = 0; c < spec.columns.size(); ++c) {
    const CsvColumn& col = spec.columns[c];
    if (col.drop) continue;

    if (col.is_label) {
      std::map<std::string, int> classes;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = rows[i][c];
        if (is_missing(cell)) {
          throw ParseError(spec.paths[0] + ": row " + std::to_string(i + 1) +
                           ": missing label in column '" + col.name + "'");
        }
        classes.emplace(cell, 0);
      }
      int next = 0;
      for (auto& [name, id] : classes) id = next++;  // sorted order
      auto& lab = out.labels[col.platform];
      lab.resize(n);
      for (std::size_t i = 0; i < n; ++i) lab[i] = classes.at(rows[i][c]);
      out.n_classes[col.platform] = next;
      continue;
    }

    if (col.type == ColumnType::numeric) {
      std::vector<double> values(n, 0.0);
      std::vector<bool> missing(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = rows[i][c];
        if (is_missing(cell)) {
          missing[i] = true;
        } else {
          values[i] = parse_numeric(cell, spec.paths[0], i);
        }
      }
      double mean = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i : out.train_index) {
        if (!missing[i]) {
          mean += values[i];
          ++cnt;
        }
      }
      mean = cnt ? mean / static_cast<double>(cnt) : 0.0;
      double var = 0.0;
      for (std::size_t i : out.train_index) {
        if (!missing[i]) var += (values[i] - mean) * (values[i] - mean);
      }
      double stddev = cnt ? std::sqrt(var / static_cast<double>(cnt)) : 0.0;
      if (stddev == 0.0) stddev = 1.0;
      std::vector<double> encoded(n);
      for (std::size_t i = 0; i < n; ++i) {
        double v = missing[i] ? mean : values[i];
        encoded[i] = (v - mean) / stddev;
      }
      staged[col.platform].push_back(std::move(encoded));
      ++platform_width[col.platform];
      continue;
    }

    // Categorical: categories observed in the training split, sorted.
    std::map<std::string, std::size_t> categories;
    std::map<std::string, std::size_t> train_counts;
    for (std::size_t i : out.train_index) {
      const std::string& cell = rows[i][c];
      if (!is_missing(cell)) ++train_counts[cell];
    }
    std::size_t next_id = 0;
    for (auto& [name, count] : train_counts) categories[name] = next_id++;
    std::string majority;
    std::size_t best = 0;
    for (auto& [name, count] : train_counts) {
      if (count > best) {
        best = count;
        majority = name;
      }
    }
    const std::size_t width = categories.size();
    std::vector<std::vector<double>> indicator(width, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::string cell = rows[i][c];
      if (is_missing(cell)) cell = majority;
      auto it = categories.find(cell);
      if (it != categories.end()) indicator[it->second][i] = 1.0;
      // Unseen test-split category: all-zero encoding.
    }
    for (auto& ind : indicator) staged[col.platform].push_back(std::move(ind));
    platform_width[col.platform] += width;
  }

  for (std::size_t p = 0; p < n_platforms; ++p) {
    if (out.labels[p].empty()) {
      throw SchemaMismatch("no label column assigned to platform " + std::to_string(p));
    }
    Matrix block(n, platform_width[p]);
    for (std::size_t f = 0; f < staged[p].size(); ++f) {
      for (std::size_t i = 0; i < n; ++i) block(i, f) = staged[p][f][i];
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

VerticalDataset mask_partner_block(const VerticalDataset& dataset, PlatformId target,
                                   PlatformId partner, double fraction, std::uint64_t seed,
                                   bool mask_test) {
  if (partner == target) throw RuntimeFailure("cannot mask the target's own block");
  if (fraction < 0.0 || fraction > 1.0) {
    throw RuntimeFailure("mask fraction must lie in [0, 1]");
  }
  VerticalDataset out = dataset;
  auto apply = [&](const std::vector<std::size_t>& split, std::uint64_t split_seed) {
    const std::size_t m = split.size();
    auto keep =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
    if (keep >= m) return;  // full subset, nothing to zero
    Rng rng(split_seed);
    auto perm = rng.permutation(m);
    Matrix& block = out.blocks[partner];
    for (std::size_t k = keep; k < m; ++k) {
      auto row = block.row(split[perm[k]]);
      std::fill(row.begin(), row.end(), 0.0);
    }
  };
  apply(dataset.train_index, derive_seed(seed, "mask-train", {partner}));
  if (mask_test) apply(dataset.test_index, derive_seed(seed, "mask-test", {partner}));
  return out;
}

}  // namespace fedgame
