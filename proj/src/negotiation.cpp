#include "fedgame/negotiation.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "fedgame/rng.hpp"

namespace fedgame {

OfferBoard::OfferBoard(std::size_t n_platforms)
    : n_(n_platforms), current_(n_platforms * n_platforms, 0.0) {}

void OfferBoard::begin_round(std::size_t round) {
  round_ = round;
  std::fill(current_.begin(), current_.end(), 0.0);
}

void OfferBoard::post(PlatformId from, PlatformId to, double amount) {
  if (from == to) throw RuntimeFailure("offers must name two distinct platforms");
  if (!(amount >= 0.0)) throw RuntimeFailure("offer amounts must be nonnegative");
  current_[from * n_ + to] = amount;
  offers_.push_back(PolicyOffer{round_, from, to, amount});
}

double OfferBoard::read(PlatformId reader, PlatformId from, PlatformId to) {
  reads_.push_back(ReadEvent{round_, reader, from, to});
  return current_[from * n_ + to];
}

NegotiationAgent::NegotiationAgent(RegressionModel model, Policy initial, GameHyperparams hp,
                                   double effective_budget)
    : model_(std::move(model)),
      policy_(std::move(initial)),
      hp_(hp),
      budget_(effective_budget) {}

void NegotiationAgent::post_offers(OfferBoard& board) const {
  for (std::size_t j = 0; j < policy_.quotas.size(); ++j) {
    if (j == policy_.owner) continue;
    board.post(policy_.owner, j, policy_.quotas[j]);
  }
}

PolicyDelta NegotiationAgent::step(OfferBoard& board) {
  AmountsVector incoming;
  incoming.target = policy_.owner;
  incoming.amounts.assign(policy_.quotas.size(), 0.0);
  for (std::size_t j = 0; j < policy_.quotas.size(); ++j) {
    if (j == policy_.owner) continue;
    incoming.amounts[j] = board.read(policy_.owner, j, policy_.owner);
  }

  RewardParams params = reward_params(hp_);
  last_reward_ = reward(model_, incoming, policy_, params);
  auto gradient = reward_gradient(model_, incoming, policy_, params);
  Policy updated = update_policy(policy_, gradient, hp_.eta);
  Policy projected = project_policy(updated, budget_);
  PolicyDelta delta = policy_delta(policy_, projected, hp_.mu, hp_.norm);
  policy_ = std::move(projected);
  return delta;
}

QuotaMatrix init_policies(const ValidatedScenario& scenario, InitMode mode, std::uint64_t seed) {
  const std::size_t n = scenario.n();
  QuotaMatrix m(n);
  switch (mode) {
    case InitMode::zero:
      break;
    case InitMode::uniform:
      for (std::size_t i = 0; i < n; ++i) {
        double share = scenario.effective_budgets[i] / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) m.at(i, j) = share;
        }
      }
      break;
    case InitMode::seeded_random:
      for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, "init-row", {i}));
        Policy row;
        row.owner = i;
        row.quotas.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) row.quotas[j] = rng.next_unit();
        }
        m.set_row(project_policy(row, scenario.effective_budgets[i]));
      }
      break;
  }
  return m;
}

NegotiationOutcome run_negotiation(const ValidatedScenario& scenario,
                                   const std::vector<RegressionModel>& models,
                                   const QuotaMatrix& init) {
  const std::size_t n = scenario.n();
  if (models.size() != n) throw RuntimeFailure("need one regression model per platform");
  if (init.n != n) throw RuntimeFailure("initial quota matrix has the wrong size");
  const GameHyperparams& hp = scenario.config.game;

  // Project the starting point so every agent begins inside its budget.
  QuotaMatrix start(n);
  std::vector<NegotiationAgent> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Policy row = project_policy(init.row_policy(i), scenario.effective_budgets[i]);
    start.set_row(row);
    agents.emplace_back(models[i], row, hp, scenario.effective_budgets[i]);
  }

  NegotiationOutcome outcome;
  outcome.transcript.init = start;
  outcome.final_policies = start;

  OfferBoard board(n);
  for (std::size_t round = 1; round <= hp.max_rounds; ++round) {
    board.begin_round(round);
    // Exchange first: every agent posts before anyone updates, so all
    // updates in this round see the same offer set.
    for (const auto& agent : agents) agent.post_offers(board);

    RoundRecord record;
    record.round = round;
    record.deltas.reserve(n);
    record.rewards.reserve(n);
    bool all_converged = true;
    for (auto& agent : agents) {
      PolicyDelta delta = agent.step(board);
      all_converged = all_converged && delta.converged;
      record.votes.push_back(ConvergenceVote{round, agent.id(), delta.converged});
      record.deltas.push_back(delta);
      record.rewards.push_back(agent.last_reward());
    }

    record.snapshot = QuotaMatrix(n);
    for (const auto& agent : agents) record.snapshot.set_row(agent.policy());
    outcome.final_policies = record.snapshot;
    outcome.transcript.rounds.push_back(std::move(record));
    outcome.rounds_used = round;

    if (all_converged) {
      outcome.converged = true;
      break;
    }
  }

  outcome.transcript.offers = board.offers();
  outcome.transcript.reads = board.reads();
  return outcome;
}

namespace {

VisibilityAuditReport audit_reads(const std::vector<ReadEvent>& reads) {
  VisibilityAuditReport report;
  report.reads_checked = reads.size();
  for (const auto& r : reads) {
    if (r.reader != r.to && r.reader != r.from) {
      report.violations.push_back(VisibilityViolation{r.round, r.reader, r.from, r.to});
    }
  }
  return report;
}

}  // namespace

VisibilityAuditReport visibility_audit(const NegotiationTranscript& transcript) {
  return audit_reads(transcript.reads);
}

VisibilityAuditReport visibility_audit(const TranscriptFile& transcript) {
  return audit_reads(transcript.reads);
}

namespace {

void append_double(std::string& line, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

}  // namespace

void write_transcript(const NegotiationTranscript& transcript, std::ostream& out) {
  std::string line;
  for (const auto& o : transcript.offers) {
    line.clear();
    line += "offer,";
    line += std::to_string(o.round);
    line += ',';
    line += std::to_string(o.from);
    line += ',';
    line += std::to_string(o.to);
    line += ',';
    append_double(line, o.amount);
    line += '\n';
    out << line;
  }
  for (const auto& r : transcript.reads) {
    out << "read," << r.round << ',' << r.reader << ',' << r.from << ',' << r.to << '\n';
  }
  for (const auto& round : transcript.rounds) {
    for (std::size_t i = 0; i < round.votes.size(); ++i) {
      line.clear();
      line += "vote,";
      line += std::to_string(round.round);
      line += ',';
      line += std::to_string(round.votes[i].from);
      line += ',';
      append_double(line, round.deltas[i].norm_value);
      line += ',';
      line += round.votes[i].converged ? '1' : '0';
      line += '\n';
      out << line;
    }
  }
}

TranscriptFile read_transcript(std::istream& in) {
  TranscriptFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string kind;
    std::getline(is, kind, ',');
    auto fail = [&]() -> ParseError {
      return ParseError("transcript line " + std::to_string(line_no) + ": malformed record");
    };
    auto next_field = [&]() -> std::string {
      std::string f;
      if (!std::getline(is, f, ',')) throw fail();
      return f;
    };
    auto to_size = [&](const std::string& s) -> std::size_t {
      std::size_t v = 0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw fail();
      return v;
    };
    auto to_double = [&](const std::string& s) -> double {
      try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw fail();
        return v;
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw fail();
      }
    };
    if (kind == "offer") {
      std::size_t round = to_size(next_field());
      std::size_t from = to_size(next_field());
      std::size_t to = to_size(next_field());
      double amount = to_double(next_field());
      file.offers.push_back(PolicyOffer{round, from, to, amount});
    } else if (kind == "read") {
      std::size_t round = to_size(next_field());
      std::size_t reader = to_size(next_field());
      std::size_t from = to_size(next_field());
      std::size_t to = to_size(next_field());
      file.reads.push_back(ReadEvent{round, reader, from, to});
    } else if (kind == "vote") {
      std::size_t round = to_size(next_field());
      std::size_t platform = to_size(next_field());
      double delta = to_double(next_field());
      std::string flag = next_field();
      if (flag != "0" && flag != "1") throw fail();
      file.votes.emplace_back(round, platform, delta, flag == "1");
    } else {
      throw ParseError("transcript line " + std::to_string(line_no) + ": unknown record '" +
                       kind + "'");
    }
  }
  return file;
}

}  // namespace fedgame
