#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fedgame/pipeline.hpp"

namespace fedgame {

// Shortest round-trip decimal representation; used for every CSV number so
// artifacts are byte-stable.
std::string format_double(double v);

void write_quota_matrix_csv(const QuotaMatrix& matrix, std::ostream& out);
QuotaMatrix read_quota_matrix_csv(std::istream& in);  // throws ParseError

void write_observations_csv(const ExperimentReport& report, std::ostream& out);
void write_coefficients_csv(const ExperimentReport& report, std::ostream& out);

// Single-estimation variants (rep column fixed to 0), for the `estimate`
// subcommand.
void write_estimation_observations_csv(const EstimationResult& estimation,
                                       std::size_t n_platforms, std::size_t k,
                                       std::ostream& out);
void write_estimation_coefficients_csv(const EstimationResult& estimation,
                                       std::size_t n_platforms, std::ostream& out);

// One evaluated policy: policy name, average and per-platform metrics.
void write_single_evaluation_csv(const PolicyEvaluation& eval, std::ostream& out);
void write_evaluation_csv(const ExperimentReport& report, std::ostream& out);
void write_sweep_csv(const std::vector<SweepPoint>& points, SweepParameter parameter,
                     std::ostream& out);

std::string report_to_json_string(const ExperimentReport& report, bool include_detail = true);
std::string sweep_to_json_string(const std::vector<SweepPoint>& points, SweepParameter parameter);

// Writes report.json, evaluation.csv, coefficients.csv, observations.csv,
// policies_<name>.csv (mean matrix over repetitions) and transcript.txt
// (repetition 0) under `dir`.
void write_report_files(const ExperimentReport& report, const std::filesystem::path& dir);
void write_sweep_files(const std::vector<SweepPoint>& points, SweepParameter parameter,
                       const std::filesystem::path& dir);

}  // namespace fedgame
