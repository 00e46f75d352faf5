#include "persist/simulator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "persist/error.hpp"
#include "persist/parallel.hpp"

namespace persist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::InvalidParameter, "kill probability must lie in [0,1]", "p");
  }
}

bool schedule_is_infinite(const KillSchedule& schedule) {
  return !std::holds_alternative<Explicit>(schedule);
}

void validate_stop(const StopRule& stop, const KillSchedule& schedule) {
  if (stop.time_horizon && (std::isnan(*stop.time_horizon) || *stop.time_horizon < 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "time horizon must be nonnegative", "horizon");
  }
  if (stop.escape_population && *stop.escape_population == 0) {
    throw Error(ErrorCode::InvalidParameter, "escape population must be positive", "escape");
  }
  if (stop.escape_population || stop.time_horizon) return;
  if (stop.max_kill_epochs && schedule_is_infinite(schedule)) return;
  throw Error(ErrorCode::InvalidParameter,
              "stop rule needs an escape population or time horizon (or a kill-epoch cap with an "
              "unbounded schedule)",
              "stop");
}

}  // namespace

std::string_view to_string(EventTag tag) noexcept {
  switch (tag) {
    case EventTag::Start: return "start";
    case EventTag::Birth: return "birth";
    case EventTag::ToPersistent: return "to_persistent";
    case EventTag::ToSusceptible: return "to_susceptible";
    case EventTag::SusceptibleDeath: return "death_susceptible";
    case EventTag::PersistentDeath: return "death_persistent";
    case EventTag::Kill: return "kill";
    case EventTag::Frozen: return "frozen";
  }
  return "?";
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Extinct: return "Extinct";
    case Outcome::Escaped: return "Escaped";
    case Outcome::HorizonReached: return "HorizonReached";
  }
  return "?";
}

std::string_view to_string(EscapeReason r) noexcept {
  switch (r) {
    case EscapeReason::None: return "none";
    case EscapeReason::Population: return "population";
    case EscapeReason::KillEpochs: return "kill_epochs";
  }
  return "?";
}

StepResult step(const ModelParams& params, const PopulationState& state, Engine& engine) {
  if (state.extinct()) throw Error(ErrorCode::AbsorbedState, "no transition leaves (0,0)");
  const double n = static_cast<double>(state.n);
  const double r = static_cast<double>(state.r);
  const double rates[5] = {params.lambda() * n, params.a() * n, params.b() * r, params.d_n() * n,
                           params.d_r() * r};
  const double total = rates[0] + rates[1] + rates[2] + rates[3] + rates[4];
  StepResult out{state, EventTag::Frozen};
  if (!(total > 0.0)) {
    out.state.t = kInf;
    return out;
  }
  out.state.t += std::exponential_distribution<double>(total)(engine);

  double target = open_uniform(engine) * total;
  int chosen = 4;
  for (int k = 0; k < 5; ++k) {
    if (rates[k] > 0.0 && target < rates[k]) {
      chosen = k;
      break;
    }
    target -= rates[k];
  }
  // Round-off can leave target just above the last positive rate.
  while (rates[chosen] <= 0.0) --chosen;

  PopulationState& s = out.state;
  switch (chosen) {
    case 0: ++s.n; out.event = EventTag::Birth; break;
    case 1: --s.n; ++s.r; out.event = EventTag::ToPersistent; break;
    case 2: ++s.n; --s.r; out.event = EventTag::ToSusceptible; break;
    case 3: --s.n; out.event = EventTag::SusceptibleDeath; break;
    default: --s.r; out.event = EventTag::PersistentDeath; break;
  }
  return out;
}

PopulationState apply_kill(const PopulationState& state, double p, Engine& engine) {
  require_probability(p);
  PopulationState out = state;
  if (p == 1.0) {
    out.n = 0;
  } else if (p > 0.0 && state.n > 0) {
    out.n = std::binomial_distribution<std::uint64_t>(state.n, 1.0 - p)(engine);
  }
  return out;
}

void validate_schedule(const KillSchedule& schedule) {
  if (const auto* periodic = std::get_if<Periodic>(&schedule)) {
    if (!std::isfinite(periodic->period) || periodic->period <= 0.0) {
      throw Error(ErrorCode::InvalidParameter, "period must be finite and positive", "period");
    }
  } else if (const auto* list = std::get_if<Explicit>(&schedule)) {
    double previous = 0.0;
    for (double t : list->times) {
      if (!std::isfinite(t) || t <= previous) {
        throw Error(ErrorCode::InvalidParameter, "kill times must be positive and strictly increasing", "times");
      }
      previous = t;
    }
  }
}

double min_schedule_gap(const KillSchedule& schedule) {
  if (const auto* periodic = std::get_if<Periodic>(&schedule)) return periodic->period;
  if (const auto* env = std::get_if<RandomEnv>(&schedule)) return env->family.min_support();
  const auto& times = std::get<Explicit>(schedule).times;
  if (times.empty()) return 0.0;
  double gap = times.front();
  for (std::size_t i = 1; i < times.size(); ++i) gap = std::min(gap, times[i] - times[i - 1]);
  return gap;
}

KillClock::KillClock(KillSchedule schedule) : schedule_(std::move(schedule)) {
  validate_schedule(schedule_);
  if (const auto* env = std::get_if<RandomEnv>(&schedule_)) engine_.emplace(make_engine(env->seed, 0));
  index_ = 0;
  next_ = 0.0;
  advance();
}

void KillClock::advance() {
  ++index_;
  if (const auto* periodic = std::get_if<Periodic>(&schedule_)) {
    next_ = periodic->period * static_cast<double>(index_);
  } else if (const auto* env = std::get_if<RandomEnv>(&schedule_)) {
    next_ += env->family.sample(*engine_);
  } else {
    const auto& times = std::get<Explicit>(schedule_).times;
    next_ = index_ <= times.size() ? times[index_ - 1] : kInf;
  }
}

TrajectoryOutcome run(const ModelParams& params, const KillSchedule& schedule, const PopulationState& init,
                      const StopRule& stop, Engine& engine, bool record) {
  validate_stop(stop, schedule);
  KillClock clock(schedule);
  TrajectoryOutcome out;
  PopulationState state = init;
  auto log_row = [&](EventTag tag) {
    if (record) out.trajectory.push_back({state.t, state.n, state.r, tag});
  };
  auto finish = [&](Outcome outcome, EscapeReason reason = EscapeReason::None) {
    out.outcome = outcome;
    out.reason = reason;
    out.final_state = state;
    return out;
  };
  log_row(EventTag::Start);

  for (;;) {
    if (state.extinct()) return finish(Outcome::Extinct);
    if (stop.escape_population && state.total() >= *stop.escape_population) {
      return finish(Outcome::Escaped, EscapeReason::Population);
    }
    const double next_kill = clock.peek();
    const StepResult next = step(params, state, engine);

    if (next.state.t <= next_kill) {
      if ((stop.time_horizon && next.state.t > *stop.time_horizon) || next.event == EventTag::Frozen) {
        state.t = stop.time_horizon ? *stop.time_horizon : kInf;
        return finish(Outcome::HorizonReached);
      }
      state = next.state;
      ++out.events;
      log_row(next.event);
      continue;
    }

    // The pending CTMC event is discarded; holding times are memoryless.
    if (stop.time_horizon && next_kill > *stop.time_horizon) {
      state.t = *stop.time_horizon;
      return finish(Outcome::HorizonReached);
    }
    state.t = next_kill;
    state = apply_kill(state, params.p(), engine);
    ++out.kills;
    clock.advance();
    log_row(EventTag::Kill);
    if (state.extinct()) return finish(Outcome::Extinct);
    if (stop.max_kill_epochs && out.kills >= *stop.max_kill_epochs) {
      return finish(Outcome::Escaped, EscapeReason::KillEpochs);
    }
  }
}

SurvivalEstimate mc_survival(const ModelParams& params, const KillSchedule& schedule, const PopulationState& init,
                             std::uint64_t trials, const StopRule& stop, std::uint64_t master_seed,
                             std::size_t workers) {
  if (trials == 0) throw Error(ErrorCode::InvalidParameter, "need at least one trial", "trials");
  validate_schedule(schedule);
  validate_stop(stop, schedule);
  std::vector<TrajectoryOutcome> outcomes(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    Engine engine = make_engine(master_seed, i);
    outcomes[i] = run(params, schedule, init, stop, engine);
  });

  SurvivalEstimate est;
  est.trials = trials;
  est.judged_by = stop;
  for (const TrajectoryOutcome& o : outcomes) {
    switch (o.outcome) {
      case Outcome::Escaped:
        ++est.survived;
        if (o.reason == EscapeReason::Population) ++est.escaped_population;
        else ++est.escaped_epochs;
        break;
      case Outcome::Extinct: ++est.extinct; break;
      case Outcome::HorizonReached: ++est.censored; break;
    }
  }
  est.p_hat = static_cast<double>(est.survived) / static_cast<double>(trials);
  est.ci_halfwidth = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
  return est;
}

MeanEstimate mc_mean(const ModelParams& params, double t, const PopulationState& init, std::uint64_t trials,
                     std::uint64_t master_seed, std::size_t workers) {
  if (trials == 0) throw Error(ErrorCode::InvalidParameter, "need at least one trial", "trials");
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::InvalidParameter, "time must be nonnegative", "t");
  const KillSchedule no_kills = Explicit{};
  StopRule stop;
  stop.max_kill_epochs.reset();
  stop.escape_population.reset();
  stop.time_horizon = init.t + t;

  std::vector<PopulationState> finals(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    Engine engine = make_engine(master_seed, i);
    finals[i] = run(params, no_kills, init, stop, engine).final_state;
  });

  double sum_n = 0.0, sum_r = 0.0;
  for (const auto& s : finals) {
    sum_n += static_cast<double>(s.n);
    sum_r += static_cast<double>(s.r);
  }
  const double count = static_cast<double>(trials);
  MeanEstimate est;
  est.trials = trials;
  est.mean_n = sum_n / count;
  est.mean_r = sum_r / count;
  if (trials > 1) {
    double ss_n = 0.0, ss_r = 0.0;
    for (const auto& s : finals) {
      const double dn = static_cast<double>(s.n) - est.mean_n;
      const double dr = static_cast<double>(s.r) - est.mean_r;
      ss_n += dn * dn;
      ss_r += dr * dr;
    }
    est.se_n = std::sqrt(ss_n / (count - 1.0) / count);
    est.se_r = std::sqrt(ss_r / (count - 1.0) / count);
  }
  return est;
}

}  // namespace persist
