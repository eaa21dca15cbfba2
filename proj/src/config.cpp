#include "fedgame/config.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace fedgame {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& context, const std::string& key,
                          const std::string& what) {
  throw InvalidConfig("config key '" + (context.empty() ? key : context + "." + key) + "': " +
                      what);
}

void expect_keys(const Json& obj, const std::string& context,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) bad_key(context, key, "unknown key");
  }
}

template <typename T>
T get_or(const Json& obj, const std::string& context, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& value = obj.at(key);
  // nlohmann casts negative or fractional numbers into unsigned targets
  // silently; reject them here.
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!value.is_number_unsigned()) bad_key(context, key, "must be a nonnegative integer");
  }
  try {
    return value.get<T>();
  } catch (const Json::exception&) {
    bad_key(context, key, "wrong type");
  }
}

ConvergenceNorm parse_norm(const std::string& s) {
  if (s == "l2") return ConvergenceNorm::l2;
  if (s == "linf") return ConvergenceNorm::linf;
  throw InvalidConfig("config key 'game.norm': expected \"l2\" or \"linf\", got \"" + s + "\"");
}

SamplingRule parse_sampling(const std::string& s) {
  if (s == "uniform_with_anchor") return SamplingRule::uniform_with_anchor;
  if (s == "uniform") return SamplingRule::uniform;
  throw InvalidConfig("config key 'estimation.sampling': unknown rule \"" + s + "\"");
}

MetricKind parse_metric(const std::string& s) {
  if (s == "accuracy") return MetricKind::accuracy;
  if (s == "auc") return MetricKind::auc;
  throw InvalidConfig("config key 'oracle.vfl_tabular.metric': unknown metric \"" + s + "\"");
}

ResponseShape parse_shape(const std::string& s) {
  if (s == "linear") return ResponseShape::linear;
  if (s == "concave") return ResponseShape::concave;
  throw InvalidConfig("config key 'oracle.synthetic.shape': unknown shape \"" + s + "\"");
}

SyntheticOracleSpec parse_synthetic(const Json& obj) {
  const std::string ctx = "oracle.synthetic";
  expect_keys(obj, ctx, {"intercepts", "weights", "shape", "concave_alpha", "noise_sigma"});
  SyntheticOracleSpec spec;
  spec.intercepts = get_or(obj, ctx, "intercepts", std::vector<double>{});
  spec.weights = get_or(obj, ctx, "weights", std::vector<std::vector<double>>{});
  spec.shape = parse_shape(get_or<std::string>(obj, ctx, "shape", "linear"));
  spec.concave_alpha = get_or(obj, ctx, "concave_alpha", 1.0);
  spec.noise_sigma = get_or(obj, ctx, "noise_sigma", 0.0);
  return spec;
}

VflTabularSpec parse_vfl(const Json& obj) {
  const std::string ctx = "oracle.vfl_tabular";
  expect_keys(obj, ctx,
              {"source", "generated", "csv", "train_epochs", "learning_rate", "test_split",
               "metric", "mask_test_features"});
  VflTabularSpec spec;
  auto source = get_or<std::string>(obj, ctx, "source", "generated");
  if (source == "generated") {
    GeneratedDatasetSpec gen;
    if (obj.contains("generated")) {
      const Json& g = obj.at("generated");
      expect_keys(g, ctx + ".generated", {"n_samples", "features_per_block", "signal", "data_seed"});
      gen.n_samples = get_or<std::size_t>(g, ctx + ".generated", "n_samples", gen.n_samples);
      gen.features_per_block =
          get_or<std::size_t>(g, ctx + ".generated", "features_per_block", gen.features_per_block);
      gen.signal = get_or(g, ctx + ".generated", "signal", std::vector<std::vector<double>>{});
      gen.data_seed = get_or<std::uint64_t>(g, ctx + ".generated", "data_seed", gen.data_seed);
    }
    spec.source = gen;
  } else if (source == "csv") {
    CsvDatasetSpec csv;
    if (!obj.contains("csv")) bad_key(ctx, "csv", "required when source is \"csv\"");
    const Json& c = obj.at("csv");
    expect_keys(c, ctx + ".csv", {"paths", "has_header", "columns"});
    csv.paths = get_or(c, ctx + ".csv", "paths", std::vector<std::string>{});
    csv.has_header = get_or(c, ctx + ".csv", "has_header", true);
    if (!c.contains("columns") || !c.at("columns").is_array()) {
      bad_key(ctx + ".csv", "columns", "must be an array");
    }
    for (const Json& col : c.at("columns")) {
      const std::string cctx = ctx + ".csv.columns";
      expect_keys(col, cctx, {"name", "type", "platform", "label", "drop"});
      CsvColumn parsed;
      parsed.name = get_or<std::string>(col, cctx, "name", "");
      auto type = get_or<std::string>(col, cctx, "type", "numeric");
      if (type == "numeric") {
        parsed.type = ColumnType::numeric;
      } else if (type == "categorical") {
        parsed.type = ColumnType::categorical;
      } else {
        bad_key(cctx, "type", "expected \"numeric\" or \"categorical\"");
      }
      parsed.platform = get_or<std::size_t>(col, cctx, "platform", 0);
      parsed.is_label = get_or(col, cctx, "label", false);
      parsed.drop = get_or(col, cctx, "drop", false);
      csv.columns.push_back(std::move(parsed));
    }
    spec.source = csv;
  } else {
    bad_key(ctx, "source", "expected \"generated\" or \"csv\"");
  }
  spec.train_epochs = get_or<std::size_t>(obj, ctx, "train_epochs", spec.train_epochs);
  spec.learning_rate = get_or(obj, ctx, "learning_rate", spec.learning_rate);
  spec.test_split = get_or(obj, ctx, "test_split", spec.test_split);
  spec.metric = parse_metric(get_or<std::string>(obj, ctx, "metric", "accuracy"));
  spec.mask_test_features = get_or(obj, ctx, "mask_test_features", true);
  return spec;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& err) {
    throw ParseError(std::string("scenario config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) throw ParseError("scenario config must be a JSON object");
  expect_keys(root, "",
              {"n_platforms", "budgets", "count_deposit", "game", "estimation", "oracle", "seed"});

  ScenarioConfig config;
  config.n_platforms = get_or<std::size_t>(root, "", "n_platforms", 0);
  if (config.n_platforms > 1024) bad_key("", "n_platforms", "implausibly large");
  config.master_seed = get_or<std::uint64_t>(root, "", "seed", 0);
  bool count_deposit = get_or(root, "", "count_deposit", true);

  if (root.contains("game")) {
    const Json& g = root.at("game");
    expect_keys(g, "game", {"gamma", "eta", "epsilon", "mu", "max_rounds", "norm"});
    config.game.gamma = get_or(g, "game", "gamma", config.game.gamma);
    config.game.eta = get_or(g, "game", "eta", config.game.eta);
    config.game.epsilon = get_or(g, "game", "epsilon", config.game.epsilon);
    config.game.mu = get_or(g, "game", "mu", config.game.mu);
    config.game.max_rounds = get_or<std::size_t>(g, "game", "max_rounds", config.game.max_rounds);
    config.game.norm = parse_norm(get_or<std::string>(g, "game", "norm", "l2"));
  }

  if (root.contains("estimation")) {
    const Json& e = root.at("estimation");
    expect_keys(e, "estimation", {"k", "deposit_fraction", "sampling", "seed_stride"});
    config.estimation.k = get_or<std::size_t>(e, "estimation", "k", config.estimation.k);
    config.estimation.deposit_fraction =
        get_or(e, "estimation", "deposit_fraction", config.estimation.deposit_fraction);
    config.estimation.sampling =
        parse_sampling(get_or<std::string>(e, "estimation", "sampling", "uniform_with_anchor"));
    config.estimation.seed_stride =
        get_or<std::uint64_t>(e, "estimation", "seed_stride", config.estimation.seed_stride);
  }

  if (root.contains("budgets")) {
    const Json& b = root.at("budgets");
    if (!b.is_array()) bad_key("", "budgets", "must be an array");
    for (const Json& item : b) {
      Budget budget;
      budget.deposit_fraction = config.estimation.deposit_fraction;
      budget.count_deposit = count_deposit;
      if (item.is_number()) {
        budget.total = item.get<double>();
      } else if (item.is_object()) {
        expect_keys(item, "budgets[]", {"total", "deposit_fraction", "count_deposit"});
        budget.total = get_or(item, "budgets[]", "total", 1.0);
        budget.deposit_fraction =
            get_or(item, "budgets[]", "deposit_fraction", budget.deposit_fraction);
        budget.count_deposit = get_or(item, "budgets[]", "count_deposit", budget.count_deposit);
      } else {
        bad_key("", "budgets", "entries must be numbers or objects");
      }
      config.budgets.push_back(budget);
    }
  } else {
    Budget budget;
    budget.deposit_fraction = config.estimation.deposit_fraction;
    budget.count_deposit = count_deposit;
    config.budgets.assign(config.n_platforms, budget);
  }

  if (root.contains("oracle")) {
    const Json& o = root.at("oracle");
    expect_keys(o, "oracle", {"kind", "synthetic", "vfl_tabular"});
    auto kind = get_or<std::string>(o, "oracle", "kind", "synthetic");
    if (kind == "synthetic") {
      config.oracle.kind = OracleKind::synthetic;
      if (o.contains("synthetic")) config.oracle.synthetic = parse_synthetic(o.at("synthetic"));
    } else if (kind == "vfl_tabular") {
      config.oracle.kind = OracleKind::vfl_tabular;
      if (o.contains("vfl_tabular")) config.oracle.vfl_tabular = parse_vfl(o.at("vfl_tabular"));
    } else {
      bad_key("oracle", "kind", "expected \"synthetic\" or \"vfl_tabular\"");
    }
  }
  return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& config) {
  Json root;
  root["n_platforms"] = config.n_platforms;

  bool simple_budgets = true;
  for (const Budget& b : config.budgets) {
    if (b.deposit_fraction != config.estimation.deposit_fraction ||
        b.count_deposit != (config.budgets.empty() ? true : config.budgets[0].count_deposit)) {
      simple_budgets = false;
    }
  }
  if (simple_budgets) {
    Json budgets = Json::array();
    for (const Budget& b : config.budgets) budgets.push_back(b.total);
    root["budgets"] = budgets;
    root["count_deposit"] = config.budgets.empty() ? true : config.budgets[0].count_deposit;
  } else {
    Json budgets = Json::array();
    for (const Budget& b : config.budgets) {
      budgets.push_back(Json{{"total", b.total},
                             {"deposit_fraction", b.deposit_fraction},
                             {"count_deposit", b.count_deposit}});
    }
    root["budgets"] = budgets;
  }

  root["game"] = Json{{"gamma", config.game.gamma},
                      {"eta", config.game.eta},
                      {"epsilon", config.game.epsilon},
                      {"mu", config.game.mu},
                      {"max_rounds", config.game.max_rounds},
                      {"norm", config.game.norm == ConvergenceNorm::l2 ? "l2" : "linf"}};
  root["estimation"] =
      Json{{"k", config.estimation.k},
           {"deposit_fraction", config.estimation.deposit_fraction},
           {"sampling", config.estimation.sampling == SamplingRule::uniform_with_anchor
                            ? "uniform_with_anchor"
                            : "uniform"},
           {"seed_stride", config.estimation.seed_stride}};

  Json oracle;
  if (config.oracle.kind == OracleKind::synthetic) {
    const auto& s = config.oracle.synthetic;
    oracle["kind"] = "synthetic";
    oracle["synthetic"] = Json{{"intercepts", s.intercepts},
                               {"weights", s.weights},
                               {"shape", s.shape == ResponseShape::linear ? "linear" : "concave"},
                               {"concave_alpha", s.concave_alpha},
                               {"noise_sigma", s.noise_sigma}};
  } else {
    const auto& v = config.oracle.vfl_tabular;
    oracle["kind"] = "vfl_tabular";
    Json vfl;
    if (const auto* gen = std::get_if<GeneratedDatasetSpec>(&v.source)) {
      vfl["source"] = "generated";
      vfl["generated"] = Json{{"n_samples", gen->n_samples},
                              {"features_per_block", gen->features_per_block},
                              {"signal", gen->signal},
                              {"data_seed", gen->data_seed}};
    } else {
      const auto& csv = std::get<CsvDatasetSpec>(v.source);
      vfl["source"] = "csv";
      Json columns = Json::array();
      for (const CsvColumn& col : csv.columns) {
        columns.push_back(
            Json{{"name", col.name},
                 {"type", col.type == ColumnType::numeric ? "numeric" : "categorical"},
                 {"platform", col.platform},
                 {"label", col.is_label},
                 {"drop", col.drop}});
      }
      vfl["csv"] = Json{{"paths", csv.paths}, {"has_header", csv.has_header}, {"columns", columns}};
    }
    vfl["train_epochs"] = v.train_epochs;
    vfl["learning_rate"] = v.learning_rate;
    vfl["test_split"] = v.test_split;
    vfl["metric"] = v.metric == MetricKind::accuracy ? "accuracy" : "auc";
    vfl["mask_test_features"] = v.mask_test_features;
    oracle["vfl_tabular"] = vfl;
  }
  root["oracle"] = oracle;
  root["seed"] = config.master_seed;
  return root.dump(2);
}

std::string scenario_digest(const ScenarioConfig& config) {
  std::string canonical = scenario_to_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[15 - i] = hex[(h >> (4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace fedgame
