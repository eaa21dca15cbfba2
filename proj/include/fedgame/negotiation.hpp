#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fedgame/core.hpp"
#include "fedgame/game.hpp"

namespace fedgame {

struct PolicyOffer {
  std::size_t round = 0;
  PlatformId from = 0;
  PlatformId to = 0;
  double amount = 0.0;
};

struct ConvergenceVote {
  std::size_t round = 0;
  PlatformId from = 0;
  bool converged = false;
};

// Every value fetched from the board during a run; the visibility audit is
// computed from these.
struct ReadEvent {
  std::size_t round = 0;
  PlatformId reader = 0;
  PlatformId from = 0;
  PlatformId to = 0;
};

// Simulated in-process exchange. Offers are posted per round; any read goes
// through read() and is recorded, whether or not the reader was entitled to
// the value.
class OfferBoard {
 public:
  explicit OfferBoard(std::size_t n_platforms);

  void begin_round(std::size_t round);
  void post(PlatformId from, PlatformId to, double amount);
  // Fetches the current-round offer from -> to on behalf of `reader`.
  double read(PlatformId reader, PlatformId from, PlatformId to);

  std::size_t round() const { return round_; }
  const std::vector<PolicyOffer>& offers() const { return offers_; }
  const std::vector<ReadEvent>& reads() const { return reads_; }

 private:
  std::size_t n_;
  std::size_t round_ = 0;
  std::vector<double> current_;  // n x n offers of the running round
  std::vector<PolicyOffer> offers_;
  std::vector<ReadEvent> reads_;
};

// A platform's private negotiation state: its regression model, its own
// policy, the game hyperparameters and its budget. Nothing else is
// reachable; in particular the full quota matrix is not.
class NegotiationAgent {
 public:
  NegotiationAgent(RegressionModel model, Policy initial, GameHyperparams hp,
                   double effective_budget);

  PlatformId id() const { return policy_.owner; }
  const Policy& policy() const { return policy_; }
  double last_reward() const { return last_reward_; }

  void post_offers(OfferBoard& board) const;
  // Reads the offers addressed to this platform, evaluates the reward, takes
  // one projected gradient step and returns the round delta.
  PolicyDelta step(OfferBoard& board);

 private:
  RegressionModel model_;
  Policy policy_;
  GameHyperparams hp_;
  double budget_;
  double last_reward_ = 0.0;
};

struct RoundRecord {
  std::size_t round = 0;
  QuotaMatrix snapshot;  // policies after this round's update
  std::vector<PolicyDelta> deltas;
  std::vector<double> rewards;  // evaluated on this round's exchanged offers
  std::vector<ConvergenceVote> votes;
};

struct NegotiationTranscript {
  QuotaMatrix init;  // projected initial policies
  std::vector<RoundRecord> rounds;
  std::vector<PolicyOffer> offers;
  std::vector<ReadEvent> reads;
};

struct NegotiationOutcome {
  QuotaMatrix final_policies;
  std::size_t rounds_used = 0;
  bool converged = false;
  NegotiationTranscript transcript;
};

enum class InitMode { uniform, zero, seeded_random };

// Starting quota matrix. Uniform spreads each effective budget evenly over
// the partners; zero exists for testing only (an all-zero matrix is a fixed
// point of the update); seeded_random draws i.i.d. uniform rows and projects
// them.
QuotaMatrix init_policies(const ValidatedScenario& scenario, InitMode mode,
                          std::uint64_t seed = 0);

// Runs the synchronous negotiation loop: all platforms exchange offers, then
// all update from the same round's offers, then all vote. Stops when every
// vote converges or max_rounds is hit; hitting the cap is not an error.
NegotiationOutcome run_negotiation(const ValidatedScenario& scenario,
                                   const std::vector<RegressionModel>& models,
                                   const QuotaMatrix& init);

struct VisibilityViolation {
  std::size_t round = 0;
  PlatformId reader = 0;
  PlatformId from = 0;
  PlatformId to = 0;
};

struct VisibilityAuditReport {
  std::size_t reads_checked = 0;
  std::vector<VisibilityViolation> violations;
  bool passed() const { return violations.empty(); }
};

// A read is compliant iff the reader is the offer's sender (own row) or its
// addressee.
VisibilityAuditReport visibility_audit(const NegotiationTranscript& transcript);

// Line-delimited transcript format:
//   offer,<round>,<from>,<to>,<amount>
//   read,<round>,<reader>,<from>,<to>
//   vote,<round>,<platform>,<delta>,<0|1>
void write_transcript(const NegotiationTranscript& transcript, std::ostream& out);

struct TranscriptFile {
  std::vector<PolicyOffer> offers;
  std::vector<ReadEvent> reads;
  std::vector<std::tuple<std::size_t, PlatformId, double, bool>> votes;
};

// Throws ParseError with the offending line number.
TranscriptFile read_transcript(std::istream& in);

VisibilityAuditReport visibility_audit(const TranscriptFile& transcript);

}  // namespace fedgame
