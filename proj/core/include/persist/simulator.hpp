#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "persist/environment.hpp"
#include "persist/model.hpp"
#include "persist/rng.hpp"

namespace persist {

enum class EventTag {
  Start,                // initial state of a recorded trajectory
  Birth,                // (n, r) -> (n+1, r)
  ToPersistent,         // (n, r) -> (n-1, r+1)
  ToSusceptible,        // (n, r) -> (n+1, r-1)
  SusceptibleDeath,     // (n, r) -> (n-1, r)
  PersistentDeath,      // (n, r) -> (n, r-1)
  Kill,                 // mass killing, n -> Binomial(n, 1-p)
  Frozen,               // total rate is zero; nothing ever happens
};

std::string_view to_string(EventTag tag) noexcept;

struct StepResult {
  PopulationState state;
  EventTag event = EventTag::Frozen;
};

// One Gillespie step: exponential holding time with total rate
// (lambda + a + d_n) n + (b + d_r) r, event chosen proportionally to its rate.
// Throws AbsorbedState from (0,0). Returns t = +inf and EventTag::Frozen if
// every rate is zero.
StepResult step(const ModelParams& params, const PopulationState& state, Engine& engine);

// Binomial thinning of the susceptible count; r and t are untouched.
PopulationState apply_kill(const PopulationState& state, double p, Engine& engine);

// ---------------------------------------------------------------------------
// Kill schedules

struct Periodic {
  double period = 1.0;
};

// Inter-killing times drawn iid from `family` with their own stream `seed`.
// The stream does not depend on the trial, so all trials of a Monte Carlo run
// share one environment realisation (the quenched setting).
struct RandomEnv {
  EnvFamily family;
  std::uint64_t seed = kDefaultSeed;
};

// Finite list of kill times, strictly increasing and positive.
struct Explicit {
  std::vector<double> times;
};

using KillSchedule = std::variant<Periodic, RandomEnv, Explicit>;

// Throws InvalidParameter if the schedule breaks its invariants.
void validate_schedule(const KillSchedule& schedule);

// Smallest gap between consecutive kills (and before the first one);
// 0 when the schedule has none.
double min_schedule_gap(const KillSchedule& schedule);

// Iterates kill times S_1 < S_2 < ... of a schedule.
class KillClock {
 public:
  explicit KillClock(KillSchedule schedule);
  // Next kill time, +inf when the schedule is exhausted.
  double peek() const noexcept { return next_; }
  void advance();

 private:
  KillSchedule schedule_;
  std::optional<Engine> engine_;
  std::size_t index_ = 0;
  double next_ = 0.0;
};

// ---------------------------------------------------------------------------
// Trajectories

inline constexpr std::uint64_t kDefaultEscapePopulation = 10000;
inline constexpr std::uint64_t kDefaultMaxKillEpochs = 200;

// Bounds for one trajectory; at least one must be set. Reaching the escape
// population or surviving max_kill_epochs kills both count as survival.
struct StopRule {
  std::optional<std::uint64_t> max_kill_epochs = kDefaultMaxKillEpochs;
  std::optional<std::uint64_t> escape_population = kDefaultEscapePopulation;
  std::optional<double> time_horizon;
};

enum class Outcome { Extinct, Escaped, HorizonReached };
enum class EscapeReason { None, Population, KillEpochs };

std::string_view to_string(Outcome o) noexcept;
std::string_view to_string(EscapeReason r) noexcept;

struct TrajectoryRow {
  double t = 0.0;
  std::uint64_t n = 0;
  std::uint64_t r = 0;
  EventTag event = EventTag::Birth;
};

struct TrajectoryOutcome {
  Outcome outcome = Outcome::Extinct;
  EscapeReason reason = EscapeReason::None;
  PopulationState final_state;
  std::uint64_t kills = 0;
  std::uint64_t events = 0;
  std::vector<TrajectoryRow> trajectory;  // filled when recording is requested
};

// Simulates the CTMC between kills and applies each kill exactly at its
// scheduled time, after every CTMC event at an earlier or equal time.
TrajectoryOutcome run(const ModelParams& params, const KillSchedule& schedule, const PopulationState& init,
                      const StopRule& stop, Engine& engine, bool record = false);

// ---------------------------------------------------------------------------
// Monte Carlo estimators

struct SurvivalEstimate {
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sqrt(p_hat (1 - p_hat) / trials)
  std::uint64_t trials = 0;
  std::uint64_t survived = 0;
  std::uint64_t extinct = 0;
  std::uint64_t censored = 0;  // horizon reached; counted as extinction
  std::uint64_t escaped_population = 0;
  std::uint64_t escaped_epochs = 0;
  StopRule judged_by;
};

// Independent trials, trial i drawing from stream derive_seed(master_seed, i).
// The estimate does not depend on `workers`.
SurvivalEstimate mc_survival(const ModelParams& params, const KillSchedule& schedule, const PopulationState& init,
                             std::uint64_t trials, const StopRule& stop, std::uint64_t master_seed,
                             std::size_t workers = 0);

struct MeanEstimate {
  double mean_n = 0.0;
  double mean_r = 0.0;
  double se_n = 0.0;
  double se_r = 0.0;
  std::uint64_t trials = 0;
};

// Empirical E[(N_t, R_t)] without kills, with per-component standard errors.
MeanEstimate mc_mean(const ModelParams& params, double t, const PopulationState& init, std::uint64_t trials,
                     std::uint64_t master_seed, std::size_t workers = 0);

}  // namespace persist
