#include "fedgame/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fedgame/config.hpp"

namespace fedgame {
namespace {

using Json = nlohmann::ordered_json;

QuotaMatrix mean_policy_matrix(const ExperimentReport& report, std::size_t policy_index) {
  const std::size_t n = report.scenario.n_platforms;
  QuotaMatrix mean(n);
  for (const auto& rep : report.reps) {
    const QuotaMatrix& m = rep.policies[policy_index].second;
    for (std::size_t e = 0; e < mean.entries.size(); ++e) mean.entries[e] += m.entries[e];
  }
  for (double& e : mean.entries) e /= static_cast<double>(report.reps.size());
  return mean;
}

Json matrix_to_json(const QuotaMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json stats_to_json(const PolicyStats& stats) {
  return Json{{"average_metric_mean", stats.mean_average_metric},
              {"average_metric_stddev", stats.stddev_average_metric},
              {"per_platform_mean", stats.mean_per_platform},
              {"per_platform_stddev", stats.stddev_per_platform},
              {"per_platform_reward_mean", stats.mean_per_platform_reward}};
}

Json report_to_json(const ExperimentReport& report, bool include_detail) {
  Json root;
  root["digest"] = report.scenario_digest;
  root["scenario"] = Json::parse(scenario_to_json(report.scenario));
  root["repetitions"] = report.repetitions;
  root["repetition_seeds"] = report.repetition_seeds;

  Json policies;
  for (const auto& stats : report.stats) policies[stats.name] = stats_to_json(stats);
  root["policies"] = policies;

  root["negotiation"] = Json{{"mean_rounds_used", report.mean_rounds_used},
                             {"all_converged", report.all_converged},
                             {"visibility_violations", report.total_visibility_violations}};
  root["prediction_error_uniform"] = Json{{"mean", report.mean_prediction_error_uniform},
                                          {"stddev", report.stddev_prediction_error_uniform}};

  if (include_detail) {
    Json detail = Json::array();
    for (const auto& rep : report.reps) {
      Json entry;
      entry["seed"] = rep.seed;
      Json coefficients = Json::array();
      for (const auto& model : rep.estimation.models) {
        coefficients.push_back(Json{{"platform", model.target},
                                    {"intercept", model.intercept},
                                    {"weights", model.weights},
                                    {"residual_norm", model.residual_norm},
                                    {"rank_deficient", model.rank_deficient}});
      }
      entry["regression"] = coefficients;
      Json matrices;
      for (const auto& [name, matrix] : rep.policies) matrices[name] = matrix_to_json(matrix);
      entry["policies"] = matrices;
      Json evals;
      for (const auto& eval : rep.evaluations) {
        evals[eval.policy_name] = Json{{"average_metric", eval.average_metric},
                                       {"per_platform_metric", eval.per_platform_metric},
                                       {"per_platform_reward", eval.per_platform_reward}};
      }
      entry["evaluations"] = evals;
      entry["negotiation"] = Json{{"rounds_used", rep.negotiation.rounds_used},
                                  {"converged", rep.negotiation.converged},
                                  {"reads_checked", rep.negotiation.reads_checked},
                                  {"visibility_violations", rep.negotiation.visibility_violations}};
      entry["prediction_error_uniform"] = rep.prediction_error_uniform;
      detail.push_back(entry);
    }
    root["repetition_detail"] = detail;
  }
  return root;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_quota_matrix_csv(const QuotaMatrix& matrix, std::ostream& out) {
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (std::size_t j = 0; j < matrix.n; ++j) {
      if (j) out << ',';
      out << format_double(matrix.at(i, j));
    }
    out << '\n';
  }
}

QuotaMatrix read_quota_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream is(line);
    std::string cell;
    while (std::getline(is, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("matrix line " + std::to_string(line_no) + ": not a number: '" + cell +
                         "'");
      }
    }
    rows.push_back(std::move(row));
  }
  QuotaMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw ParseError("matrix is not square at line " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

namespace {

void observation_rows(const EstimationResult& estimation, std::size_t rep, std::size_t n,
                      std::size_t k, std::ostream& out) {
  const auto& obs = estimation.observations;
  for (std::size_t idx = 0; idx < obs.size(); ++idx) {
    out << rep << ',' << obs[idx].target << ',' << idx % k;
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(obs[idx].amounts.amounts[j]);
    out << ',' << format_double(obs[idx].metric) << '\n';
  }
}

void coefficient_rows(const EstimationResult& estimation, std::size_t rep, std::size_t n,
                      std::ostream& out) {
  for (const auto& model : estimation.models) {
    out << rep << ',' << model.target << ',' << format_double(model.intercept);
    for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(model.weights[j]);
    out << ',' << format_double(model.residual_norm) << ',' << (model.rank_deficient ? 1 : 0)
        << '\n';
  }
}

void observations_header(std::size_t n, std::ostream& out) {
  out << "rep,platform,experiment";
  for (std::size_t j = 0; j < n; ++j) out << ",amount_" << j;
  out << ",metric\n";
}

void coefficients_header(std::size_t n, std::ostream& out) {
  out << "rep,platform,intercept";
  for (std::size_t j = 0; j < n; ++j) out << ",w_" << j;
  out << ",residual_norm,rank_deficient\n";
}

}  // namespace

void write_observations_csv(const ExperimentReport& report, std::ostream& out) {
  const std::size_t n = report.scenario.n_platforms;
  observations_header(n, out);
  const std::size_t k = report.scenario.estimation.k;
  for (std::size_t r = 0; r < report.reps.size(); ++r) {
    observation_rows(report.reps[r].estimation, r, n, k, out);
  }
}

void write_coefficients_csv(const ExperimentReport& report, std::ostream& out) {
  const std::size_t n = report.scenario.n_platforms;
  coefficients_header(n, out);
  for (std::size_t r = 0; r < report.reps.size(); ++r) {
    coefficient_rows(report.reps[r].estimation, r, n, out);
  }
}

void write_estimation_observations_csv(const EstimationResult& estimation,
                                       std::size_t n_platforms, std::size_t k,
                                       std::ostream& out) {
  observations_header(n_platforms, out);
  observation_rows(estimation, 0, n_platforms, k, out);
}

void write_estimation_coefficients_csv(const EstimationResult& estimation,
                                       std::size_t n_platforms, std::ostream& out) {
  coefficients_header(n_platforms, out);
  coefficient_rows(estimation, 0, n_platforms, out);
}

void write_single_evaluation_csv(const PolicyEvaluation& eval, std::ostream& out) {
  const std::size_t n = eval.per_platform_metric.size();
  out << "policy,average";
  for (std::size_t i = 0; i < n; ++i) out << ",metric_p" << i;
  out << '\n' << eval.policy_name << ',' << format_double(eval.average_metric);
  for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(eval.per_platform_metric[i]);
  out << '\n';
}

void write_evaluation_csv(const ExperimentReport& report, std::ostream& out) {
  const std::size_t n = report.scenario.n_platforms;
  out << "policy,average_mean,average_stddev";
  for (std::size_t i = 0; i < n; ++i) out << ",metric_p" << i << "_mean";
  for (std::size_t i = 0; i < n; ++i) out << ",metric_p" << i << "_stddev";
  for (std::size_t i = 0; i < n; ++i) out << ",reward_p" << i << "_mean";
  out << '\n';
  for (const auto& stats : report.stats) {
    out << stats.name << ',' << format_double(stats.mean_average_metric) << ','
        << format_double(stats.stddev_average_metric);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(stats.mean_per_platform[i]);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(stats.stddev_per_platform[i]);
    for (std::size_t i = 0; i < n; ++i) {
      out << ',' << format_double(stats.mean_per_platform_reward[i]);
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepPoint>& points, SweepParameter parameter,
                     std::ostream& out) {
  if (points.empty()) return;
  const std::size_t n = points.front().report.scenario.n_platforms;
  out << (parameter == SweepParameter::gamma ? "gamma" : "deposit_fraction");
  out << ",fedgame_average_mean,fedgame_average_stddev";
  for (std::size_t i = 0; i < n; ++i) out << ",metric_p" << i << "_mean";
  for (std::size_t i = 0; i < n; ++i) out << ",outgoing_p" << i << "_mean";
  out << ",prediction_error_mean\n";
  for (const auto& point : points) {
    const ExperimentReport& rep = point.report;
    const PolicyStats* fedgame = nullptr;
    for (const auto& stats : rep.stats) {
      if (stats.name == "fedgame") fedgame = &stats;
    }
    out << format_double(point.value) << ',' << format_double(fedgame->mean_average_metric) << ','
        << format_double(fedgame->stddev_average_metric);
    for (std::size_t i = 0; i < n; ++i) {
      out << ',' << format_double(fedgame->mean_per_platform[i]);
    }
    // Mean outgoing totals (row sums of the negotiated matrix).
    std::vector<double> outgoing(n, 0.0);
    for (const auto& r : rep.reps) {
      const QuotaMatrix& m = r.policies.back().second;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) outgoing[i] += m.at(i, j);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out << ',' << format_double(outgoing[i] / static_cast<double>(rep.reps.size()));
    }
    out << ',' << format_double(rep.mean_prediction_error_uniform) << '\n';
  }
}

std::string report_to_json_string(const ExperimentReport& report, bool include_detail) {
  return report_to_json(report, include_detail).dump(2);
}

std::string sweep_to_json_string(const std::vector<SweepPoint>& points,
                                 SweepParameter parameter) {
  Json root;
  root["parameter"] = parameter == SweepParameter::gamma ? "gamma" : "deposit_fraction";
  Json entries = Json::array();
  for (const auto& point : points) {
    Json entry;
    entry["value"] = point.value;
    entry["report"] = report_to_json(point.report, false);
    entries.push_back(entry);
  }
  root["points"] = entries;
  return root.dump(2);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write output file: " + path.string());
  out << contents;
}

template <typename Fn>
void write_stream_file(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream buffer;
  fn(buffer);
  write_file(path, buffer.str());
}

}  // namespace

void write_report_files(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report_to_json_string(report));
  write_stream_file(dir / "evaluation.csv", [&](std::ostream& o) { write_evaluation_csv(report, o); });
  write_stream_file(dir / "coefficients.csv",
                    [&](std::ostream& o) { write_coefficients_csv(report, o); });
  write_stream_file(dir / "observations.csv",
                    [&](std::ostream& o) { write_observations_csv(report, o); });
  for (std::size_t p = 0; p < policy_names().size(); ++p) {
    QuotaMatrix mean = mean_policy_matrix(report, p);
    write_stream_file(dir / ("policies_" + policy_names()[p] + ".csv"),
                      [&](std::ostream& o) { write_quota_matrix_csv(mean, o); });
  }
  write_stream_file(dir / "transcript.txt",
                    [&](std::ostream& o) { write_transcript(report.first_transcript, o); });
}

void write_sweep_files(const std::vector<SweepPoint>& points, SweepParameter parameter,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string name = parameter == SweepParameter::gamma ? "gamma" : "deposit_fraction";
  write_stream_file(dir / ("sweep_" + name + ".csv"),
                    [&](std::ostream& o) { write_sweep_csv(points, parameter, o); });
  write_file(dir / "report.json", sweep_to_json_string(points, parameter));
}

}  // namespace fedgame
