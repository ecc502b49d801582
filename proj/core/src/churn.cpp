#include "cccnet/churn.hpp"

#include <algorithm>
#include <cmath>

namespace cccnet {

double sample_session(SessionDist dist, double param, double mean, Rng& rng) {
  if (mean <= 0) throw ConfigError("sample_session: mean must be > 0");
  switch (dist) {
    case SessionDist::Weibull:
      return rng.weibull(param, mean);
    case SessionDist::Lognormal:
      return rng.lognormal(param, mean);
    case SessionDist::Exponential:
      return rng.exponential(mean);
  }
  throw ConfigError("sample_session: unknown distribution");
}

void ChurnConfig::resolve() {
  if (n == 0) throw ConfigError("churn config: n is required");
  if (lambda <= 0) throw ConfigError("churn config: lambda must be > 0");
  if (horizon < 0) throw ConfigError("churn config: negative horizon");
  if (shape <= 0 || sigma <= 0)
    throw ConfigError("churn config: distribution parameters must be > 0");
  if (mean_session <= 0) mean_session = double(n) / lambda;
  if (dim == 0) dim = dimension_for(n);
  if (sample_interval <= 0)
    sample_interval = std::max(1.0, double(n) / (50.0 * lambda));
  if (rate_change_time >= 0 && n_prime == 0)
    throw ConfigError("churn config: rate change requires n_prime");
}

Engine::Engine(ChurnConfig config)
    : config_(std::move(config)),
      rng_(0),
      overlay_(TemplateParams::for_dim((config_.resolve(), config_.dim))),
      resize_(config_.policy) {
  rng_ = Rng(config_.seed);
  lambda_now_ = config_.lambda;
  if (config_.horizon <= 0) {
    finished_ = true;
    return;
  }
  if (config_.per_cycle) {
    schedule({1.0, 0, EventKind::Cycle});
  } else {
    schedule({rng_.exponential(1.0 / lambda_now_), 0, EventKind::Arrival});
  }
  schedule({config_.sample_interval, 0, EventKind::Sample});
  if (config_.resize_interval > 0)
    schedule({rng_.exponential(config_.resize_interval), 0,
              EventKind::ResizeTick});
  if (config_.rate_change_time >= 0)
    schedule({config_.rate_change_time, 0, EventKind::RateChange});
}

void Engine::schedule(Event e) {
  e.seq = next_seq_++;
  queue_.push(e);
}

void Engine::run_until(double t) {
  const double limit = std::min(t, config_.horizon);
  while (!queue_.empty() && queue_.top().time <= limit) {
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    dispatch(e);
  }
}

void Engine::run() {
  if (config_.horizon <= 0) return;
  run_until(config_.horizon);
  now_ = config_.horizon;
  samples_.push_back(snapshot(config_.horizon));
  finished_ = true;
}

void Engine::dispatch(const Event& e) {
  switch (e.kind) {
    case EventKind::Arrival:
      handle_arrival(e.time);
      schedule({e.time + rng_.exponential(1.0 / lambda_now_), 0,
                EventKind::Arrival});
      break;
    case EventKind::Cycle: {
      // Per-cycle batch mode: a Poisson count of arrivals added serially.
      const uint64_t k = rng_.poisson(lambda_now_);
      for (uint64_t i = 0; i < k; ++i) handle_arrival(e.time);
      if (e.time + 1.0 <= config_.horizon)
        schedule({e.time + 1.0, 0, EventKind::Cycle});
      break;
    }
    case EventKind::JoinRetry:
      attempt_join(e);
      break;
    case EventKind::Departure:
      handle_departure(e);
      break;
    case EventKind::Sample:
      handle_sample(e.time);
      schedule({e.time + config_.sample_interval, 0, EventKind::Sample});
      break;
    case EventKind::ResizeTick: {
      handle_resize_tick(e.time);
      const double rate =
          double(std::max<uint64_t>(overlay_.size(), 1)) /
          config_.resize_interval;
      schedule({e.time + rng_.exponential(1.0 / rate), 0,
                EventKind::ResizeTick});
      break;
    }
    case EventKind::RateChange:
      lambda_now_ = double(config_.n_prime) / config_.mean_session;
      break;
  }
}

int Engine::pick_arrival_dim() {
  if (overlay_.empty()) return config_.dim;
  if (auto u = overlay_.uniform_dim()) return *u;
  // Transition period: round the average dimension of an entry vertex.
  return resize_.join_dimension(overlay_, overlay_.random_live(rng_),
                                config_.dim);
}

void Engine::handle_arrival(double t) {
  ++stats_.arrivals;
  Event e;
  e.kind = EventKind::JoinRetry;
  e.time = t;
  e.peer = next_peer_++;
  e.label = random_label(pick_arrival_dim(), rng_);
  e.arrival = t;
  const double param =
      config_.dist == SessionDist::Lognormal ? config_.sigma : config_.shape;
  e.departure =
      t + sample_session(config_.dist, param, config_.mean_session, rng_);
  e.retries = 0;
  attempt_join(e);
}

void Engine::attempt_join(const Event& e) {
  if (e.departure <= now_) return;  // session ran out while retrying
  PeerNode cand;
  cand.id = e.peer;
  cand.node_id = e.label;
  cand.arrival_time = e.arrival;
  cand.scheduled_departure = e.departure;
  if (overlay_.empty()) {
    overlay_.register_peer(cand);
    admit(cand, 0);
    return;
  }
  const PeerId entry = overlay_.random_live(rng_);
  const JoinReport rep = overlay_.try_join(cand, entry);
  if (rep.ok) {
    admit(cand, rep.messages);
    return;
  }
  if (e.retries < config_.join_retry_limit) {
    Event retry = e;
    retry.time = now_ + 1.0;
    ++retry.retries;
    schedule(retry);
    return;
  }
  // Retries exhausted (holes persist, e.g. during warm-up): the peer joins
  // anyway so the arrival process stays M/G/infinity.
  ++stats_.forced_joins;
  const int degree = overlay_.register_peer(cand);
  admit(cand, degree);
}

void Engine::admit(const PeerNode& node, int messages) {
  ++window_joins_;
  window_join_messages_ += static_cast<uint64_t>(messages);
  const TreeRepair rep = tree_.on_insert(overlay_, node.id);
  if (rep.applied && record_delete_msgs_) insert_msgs_.push_back(rep.messages);
  if (rep.rebuild_needed) ++tree_rebuild_requests_;
  Event dep;
  dep.kind = EventKind::Departure;
  dep.time = node.scheduled_departure;
  dep.peer = node.id;
  schedule(dep);
  maybe_rebuild_tree();
}

void Engine::handle_departure(const Event& e) {
  if (!overlay_.contains(e.peer)) {
    ++stats_.stale_events;
    return;
  }
  const PeerNode departed = overlay_.peer(e.peer);
  overlay_.leave(e.peer, rng_);
  const TreeRepair rep = tree_.on_delete(overlay_, departed);
  if (rep.applied) {
    ++tree_deletions_;
    if (record_delete_msgs_) delete_msgs_.push_back(rep.messages);
  }
  if (rep.rebuild_needed) ++tree_rebuild_requests_;
  ++stats_.departures;
  maybe_rebuild_tree();
}

void Engine::maybe_rebuild_tree() {
  if (!tree_.built() && tree_.can_build(overlay_)) tree_.try_build(overlay_);
}

InsertReport Engine::insert_random_key(double t) {
  (void)t;
  InsertReport rep;
  if (overlay_.empty()) return rep;
  const uint64_t key = next_key_++;
  rep = overlay_.insert_data(key, overlay_.random_live(rng_), rng_);
  ++stats_.data_inserts;
  if (rep.ok) keys_.push_back(key);
  return rep;
}

std::optional<SearchResult> Engine::search_random_key() {
  if (keys_.empty() || overlay_.empty()) return std::nullopt;
  const uint64_t key = keys_[rng_.below(keys_.size())];
  const SearchResult res = overlay_.search(overlay_.random_live(rng_), key);
  ++stats_.data_searches;
  ++window_searches_;
  if (res.found()) {
    ++stats_.data_search_successes;
    ++window_search_hits_;
  } else if (res.cross_dim) {
    ++stats_.cross_dim_search_failures;
  }
  return res;
}

void Engine::handle_sample(double t) {
  for (int i = 0; i < config_.data_inserts_per_sample; ++i)
    insert_random_key(t);
  for (int i = 0; i < config_.data_searches_per_sample; ++i)
    search_random_key();
  samples_.push_back(snapshot(t));
  window_joins_ = window_join_messages_ = 0;
  window_searches_ = window_search_hits_ = 0;
  if (config_.validate) self_check();
}

void Engine::handle_resize_tick(double t) {
  // Inspections during warm-up would see the transiently small degrees of a
  // still-filling network and trigger spurious dimension drops.
  if (overlay_.empty() || pre_stable(t)) return;
  ++stats_.inspections;
  resize_.inspect(overlay_, overlay_.random_live(rng_), rng_, t, &tree_);
  maybe_rebuild_tree();
}

MetricsSnapshot Engine::snapshot(double t) {
  MetricsSnapshot s;
  s.time = t;
  s.live_peers = overlay_.size();
  s.coverage = coverage(overlay_);
  s.avg_coverage = avg_coverage(overlay_);
  auto [mean_deg, max_deg] = degree_stats(overlay_);
  s.avg_degree = mean_deg;
  s.max_degree = max_deg;
  if (!overlay_.empty()) {
    s.bfs_diameter_est = bfs_diameter_estimate(overlay_, rng_, &s.disconnected);
    s.random_path_len = random_path_length(overlay_, rng_, &path_failures_);
  }
  s.path_failures = path_failures_;
  s.search_success_rate =
      window_searches_ ? double(window_search_hits_) / double(window_searches_)
                       : 1.0;
  s.join_messages_mean =
      window_joins_ ? double(window_join_messages_) / double(window_joins_) : 0;
  s.tree_repair_messages = tree_.repair_messages();
  s.rebuilds = tree_.rebuilds();
  s.holes = overlay_.counters().hole_events;
  s.orphaned_keys = overlay_.counters().orphaned_keys;
  s.avg_dimension = overlay_.avg_dimension();
  s.fraction_at_majority_dim =
      overlay_.empty() ? 1.0
                       : double(overlay_.peers_at_dim(overlay_.majority_dim())) /
                             double(overlay_.size());
  s.suggestion_messages = resize_.suggestion_messages;
  s.cross_dim_search_failures = stats_.cross_dim_search_failures;
  s.pre_stable = pre_stable(t);
  return s;
}

std::string Engine::metrics_csv() const {
  std::string out = csv_header();
  for (const auto& s : samples_) append_csv_row(out, s);
  return out;
}

void Engine::self_check() {
  if (auto bad = overlay_.occupancy_mismatch())
    throw std::runtime_error("occupancy index mismatch at label word=" +
                             std::to_string(bad->word) + " pos=" +
                             std::to_string(bad->cycle_pos) + " dim=" +
                             std::to_string(bad->dim));
  if (tree_.built()) {
    const TreeCheck check = tree_.validate(overlay_);
    if (!check.ok()) throw std::runtime_error("spanning tree invariant failed");
  }
}

}  // namespace cccnet
