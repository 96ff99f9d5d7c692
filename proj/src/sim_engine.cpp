#include "hwsn/sim_engine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hwsn {

namespace {

const NodeRecord& at(std::span<const NodeRecord> nodes, NodeId id) { return nodes[static_cast<std::size_t>(id)]; }

double hop_distance(std::span<const NodeRecord> nodes, NodeId from, NodeId to) {
  if (to == kBaseStation) return distance_to_bs(at(nodes, from).position);
  return distance(at(nodes, from).position, at(nodes, to).position);
}

Bits report_payload(Bits reports, const NetworkConfig& cfg, const ProtocolFlags& flags) {
  return flags.fusion ? cfg.report_bits : reports * cfg.report_bits;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Chain1: return "chain1";
    case Scheme::Chain2: return "chain2";
    case Scheme::Pegasis: return "pegasis";
    case Scheme::Epegasis: return "epegasis";
    case Scheme::Chiron: return "chiron";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2, Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Approach> parse_approach(std::string_view name) {
  if (name == "one-hop") return Approach::OneHop;
  if (name == "multi-hop") return Approach::MultiHop;
  return std::nullopt;
}

bool is_baseline(Scheme scheme) { return scheme != Scheme::Chain1 && scheme != Scheme::Chain2; }

ChainVariant variant_of(Scheme scheme) {
  if (scheme == Scheme::Chain1) return ChainVariant::Chain1;
  if (scheme == Scheme::Chain2) return ChainVariant::Chain2;
  throw std::invalid_argument("baseline schemes have no chain variant");
}

BaselineModel model_of(Scheme scheme) {
  switch (scheme) {
    case Scheme::Pegasis: return BaselineModel::Pegasis;
    case Scheme::Epegasis: return BaselineModel::Epegasis;
    case Scheme::Chiron: return BaselineModel::Chiron;
    default: break;
  }
  throw std::invalid_argument("sector/track schemes are not baselines");
}

std::string_view to_string(StopAt stop) {
  switch (stop) {
    case StopAt::Fnd: return "fnd";
    case StopAt::Hnd: return "hnd";
    case StopAt::Lnd: return "lnd";
  }
  return "?";
}

std::optional<StopAt> parse_stop_at(std::string_view name) {
  if (name == "fnd") return StopAt::Fnd;
  if (name == "hnd") return StopAt::Hnd;
  if (name == "lnd") return StopAt::Lnd;
  return std::nullopt;
}

World run_setup(const NetworkConfig& cfg, const SimOptions& options) {
  cfg.validate();
  World world;
  world.config = cfg;
  world.options = options;
  const bool charge = options.flags.setup_energy;

  if (is_baseline(options.scheme)) {
    world.options.baseline.model = model_of(options.scheme);
    world.nodes = deploy_baseline(world.options.baseline, cfg);
    if (options.scheme != Scheme::Pegasis) {
      // BS assigns levels (EPEGASIS) or beam-star cells (CHIRON).
      EnergyLedger ledger(world.nodes.size());
      for (const auto& node : world.nodes) {
        Message msg{MessageKind::PositionCtl, kBaseStation, node.id, cfg.ctl_bits, node.position.rho, {}};
        if (charge) ledger.charge(msg, cfg.radio);
        world.setup_messages.push_back(std::move(msg));
      }
      world.setup_energy_j += ledger.apply(world.nodes);
    }
    return world;
  }

  world.nodes = deploy_rfds(cfg);
  {
    const double before = [&] {
      double s = 0.0;
      for (const auto& n : world.nodes) s += n.battery.residual;
      return s;
    }();
    auto scan = run_bs_scan(world.nodes, cfg, charge);
    double after = 0.0;
    for (const auto& n : world.nodes) after += n.battery.residual;
    world.setup_energy_j += before - after;
    world.setup_messages = std::move(scan.messages);
  }
  auto ffds = place_ffds(cfg, static_cast<NodeId>(world.nodes.size()));
  for (auto& ffd : ffds) {
    world.ffds.push_back(ffd.id);
    world.nodes.push_back(ffd);
  }

  EnergyLedger ledger(world.nodes.size());
  for (NodeId ffd : world.ffds) {
    const NodeRecord& head = at(world.nodes, ffd);
    Message msg{MessageKind::HRegion, ffd, kRegionBroadcast, cfg.ctl_bits, 0.0, {}};
    for (const auto& node : world.nodes) {
      if (node.kind == NodeKind::Rfd && node.region == head.region) {
        msg.receivers.push_back(node.id);
        msg.distance_m = std::max(msg.distance_m, distance(head.position, node.position));
      }
    }
    if (charge) ledger.charge(msg, cfg.radio);
    world.setup_messages.push_back(std::move(msg));
  }
  world.setup_energy_j += ledger.apply(world.nodes);
  return world;
}

void run_self_organization(World& world) {
  const auto& cfg = world.config;
  const auto& options = world.options;
  switch (options.scheme) {
    case Scheme::Chain1:
    case Scheme::Chain2: {
      auto built =
          build_topology(world.nodes, world.ffds, variant_of(options.scheme), options.approach, cfg, options.flags);
      world.plan = std::move(built.plan);
      if (options.flags.setup_energy) {
        EnergyLedger ledger(world.nodes.size());
        for (const auto& msg : built.messages) ledger.charge(msg, cfg.radio);
        world.setup_energy_j += ledger.apply(world.nodes);
      }
      world.setup_messages.insert(world.setup_messages.end(), built.messages.begin(), built.messages.end());
      break;
    }
    case Scheme::Pegasis:
      world.groups = {{{1, 1}, pegasis_build(world.nodes, options.baseline.pegasis_start)}};
      break;
    case Scheme::Epegasis:
      world.groups = epegasis_build(world.nodes, options.baseline);
      break;
    case Scheme::Chiron:
      world.groups = chiron_build(world.nodes, options.baseline);
      break;
  }
}

CollectionTrace run_collection(std::span<const NodeRecord> nodes, const RegionChains& region,
                               const NetworkConfig& cfg, const ProtocolFlags& flags) {
  CollectionTrace out;
  if (!at(nodes, region.ffd).alive()) {
    out.silent = true;
    return out;
  }
  std::vector<std::vector<NodeId>> live;
  for (const auto& chain : region.chains) {
    auto& members = live.emplace_back();
    for (NodeId id : chain) {
      if (at(nodes, id).alive()) members.push_back(id);
    }
  }
  for (const auto& members : live) {
    NodeId from = region.ffd;
    for (NodeId to : members) {
      out.messages.push_back({MessageKind::Req, from, to, cfg.token_bits, hop_distance(nodes, from, to), {}});
      from = to;
    }
  }
  for (const auto& members : live) {
    const auto length = members.size();
    for (std::size_t k = length; k-- > 0;) {
      const NodeId from = members[k];
      const NodeId to = k > 0 ? members[k - 1] : region.ffd;
      const Bits carried = length - k;
      out.messages.push_back({MessageKind::Report, from, to, report_payload(carried, cfg, flags),
                              hop_distance(nodes, from, to), {}});
    }
    out.reports_at_ffd += length;
  }
  return out;
}

std::vector<Message> run_transmission(std::span<const NodeRecord> nodes, const TopologyPlan& plan,
                                      std::span<const Bits> region_reports, const NetworkConfig& cfg,
                                      const ProtocolFlags& flags, std::int64_t* dropped) {
  if (region_reports.size() != plan.regions.size()) {
    throw std::invalid_argument("one report count per region expected");
  }
  std::vector<Bits> held(nodes.size(), 0);
  for (std::size_t k = 0; k < plan.regions.size(); ++k) {
    held[static_cast<std::size_t>(plan.regions[k].ffd)] += region_reports[k];
  }
  std::vector<Message> out;
  auto drop = [&](Bits n) {
    if (dropped) *dropped += static_cast<std::int64_t>(n);
  };

  if (plan.approach == Approach::OneHop) {
    for (const auto& region : plan.regions) {
      const Bits reports = held[static_cast<std::size_t>(region.ffd)];
      if (reports == 0) continue;
      if (!at(nodes, region.ffd).alive()) {
        drop(reports);
        continue;
      }
      out.push_back({MessageKind::Report, region.ffd, kBaseStation, report_payload(reports, cfg, flags),
                     hop_distance(nodes, region.ffd, kBaseStation), {}});
    }
    return out;
  }

  for (const auto& sector : plan.sector_relays) {
    Bits carry = 0;
    for (std::size_t k = sector.size(); k-- > 0;) {
      const NodeId ffd = sector[k];
      const Bits total = carry + held[static_cast<std::size_t>(ffd)];
      carry = 0;
      if (total == 0) continue;
      const NodeId next = at(nodes, ffd).suc;
      if (!at(nodes, ffd).alive() || (next != kBaseStation && !at(nodes, next).alive())) {
        drop(total);
        continue;
      }
      out.push_back({MessageKind::Report, ffd, next, report_payload(total, cfg, flags),
                     hop_distance(nodes, ffd, next), {}});
      carry = total;
    }
  }
  return out;
}

RoundRouting chain_routing(std::span<const NodeRecord> nodes, const TopologyPlan& plan) {
  RoundRouting routing(nodes.size());
  for (const auto& region : plan.regions) {
    const NodeRecord& ffd = at(nodes, region.ffd);
    if (!ffd.alive()) continue;
    routing.next_hop[static_cast<std::size_t>(ffd.id)] = ffd.suc;
    for (const auto& chain : region.chains) {
      for (NodeId id : chain) {
        const NodeRecord& rfd = at(nodes, id);
        if (!rfd.alive()) continue;
        routing.next_hop[static_cast<std::size_t>(id)] = rfd.pre;
        routing.originates[static_cast<std::size_t>(id)] = true;
      }
    }
  }
  prune_disconnected(routing, nodes);
  return routing;
}

Simulation::Simulation(const NetworkConfig& cfg, const SimOptions& options)
    : world_(run_setup(cfg, options)), election_rng_(cfg.seed, RngStream::Election) {
  run_self_organization(world_);
  result_.config = world_.config;
  result_.options = world_.options;
  result_.setup_energy_j = world_.setup_energy_j;
  for (const auto& node : world_.nodes) {
    if (node.kind == NodeKind::Ffd) {
      ++result_.n_ffds;
    } else {
      ++result_.n_originators;
    }
  }
  if (is_baseline(options.scheme)) {
    if (options.scheme == Scheme::Epegasis) {
      result_.notes.push_back(std::string("epegasis head election: ") +
                              std::string(to_string(world_.options.baseline.epegasis_election)));
    }
    if (options.scheme == Scheme::Chiron) {
      result_.notes.push_back("chiron arena is a 90-degree fan of radius 100 m, unlike the 50 m disc arenas");
    }
    if (options.scheme == Scheme::Pegasis) {
      result_.notes.push_back("pegasis head election: uniform random per round");
    }
  } else {
    for (auto& note : cfg.warnings()) result_.notes.push_back(std::move(note));
  }
  drained_.assign(world_.nodes.size(), 0.0);
  finished_ = result_.n_originators == 0 || options.max_rounds <= 0;
}

void Simulation::prepare_round() {
  if (prepared_) return;
  const std::int64_t round = round_ + 1;
  const auto& cfg = world_.config;
  const auto& flags = world_.options.flags;
  messages_.clear();

  if (!is_baseline(world_.options.scheme)) {
    routing_ = chain_routing(world_.nodes, world_.plan);
    std::vector<Bits> reports(world_.plan.regions.size(), 0);
    for (std::size_t k = 0; k < world_.plan.regions.size(); ++k) {
      const auto& region = world_.plan.regions[k];
      if (routing_.next_hop[static_cast<std::size_t>(region.ffd)] == kNoNode) {
        // Dead FFD or broken relay: the region stays silent this round.
        for (const auto& chain : region.chains) {
          for (NodeId id : chain) {
            if (at(world_.nodes, id).alive()) ++result_.dropped_reports;
          }
        }
        continue;
      }
      auto trace = run_collection(world_.nodes, region, cfg, flags);
      reports[k] = trace.reports_at_ffd;
      messages_.insert(messages_.end(), trace.messages.begin(), trace.messages.end());
    }
    auto tx = run_transmission(world_.nodes, world_.plan, reports, cfg, flags, &result_.dropped_reports);
    messages_.insert(messages_.end(), tx.begin(), tx.end());
  } else {
    std::vector<NodeId> heads;
    for (const auto& group : world_.groups) {
      if (group.chain.empty()) {
        heads.push_back(kNoNode);
        continue;
      }
      switch (world_.options.scheme) {
        case Scheme::Pegasis:
          heads.push_back(pegasis_elect_head(static_cast<int>(round), group.chain, election_rng_));
          break;
        case Scheme::Epegasis:
          heads.push_back(epegasis_elect_head(world_.nodes, group.chain, static_cast<int>(round),
                                              world_.options.baseline.epegasis_election));
          break;
        default:
          heads.push_back(chiron_elect_leader(world_.nodes, group.chain, static_cast<int>(round)));
          break;
      }
    }
    routing_ = relay_routing(world_.nodes, world_.groups, heads);
    messages_ = gather_reports(world_.nodes, routing_, cfg.report_bits, flags.fusion);
  }
  prepared_ = true;
}

const RoundRouting& Simulation::peek_routing() {
  prepare_round();
  return routing_;
}

const RoundStats& Simulation::step(const RoundObserver& observer) {
  if (finished_) throw std::logic_error("simulation already finished");
  prepare_round();
  ++round_;
  prepared_ = false;

  const auto& cfg = world_.config;
  const bool chain_scheme = !is_baseline(world_.options.scheme);
  const bool sleep = world_.options.flags.rfd_sleep;
  auto& nodes = world_.nodes;

  std::vector<bool> alive_before(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) alive_before[i] = nodes[i].alive();

  auto transition = [&](NodeRecord& node, ModeEvent event) {
    if (const auto next = advance_mode(node, event, sleep)) {
      node.mode = *next;
    } else {
      ++result_.mode_violations;
    }
  };

  if (chain_scheme) {
    for (auto& node : nodes) {
      if (node.alive()) transition(node, ModeEvent::RoundStart);
    }
    for (const auto& msg : messages_) {
      if (msg.dst >= 0) transition(nodes[static_cast<std::size_t>(msg.dst)], ModeEvent::PacketArrival);
      if (msg.kind == MessageKind::Report && msg.src >= 0 &&
          nodes[static_cast<std::size_t>(msg.src)].kind == NodeKind::Ffd) {
        transition(nodes[static_cast<std::size_t>(msg.src)], ModeEvent::ReportSentToBs);
      }
    }
    for (auto& node : nodes) {
      if (node.alive() && node.kind == NodeKind::Rfd && node.mode == DutyMode::TrOnDuty) {
        transition(node, ModeEvent::ActionDone);
      }
    }
  }

  EnergyLedger ledger(nodes.size());
  for (const auto& msg : messages_) ledger.charge(msg, cfg.radio);
  if (cfg.idle_j_per_round > 0.0) {
    for (const auto& node : nodes) {
      if (node.alive()) ledger.add(node.id, cfg.idle_j_per_round);
    }
  }
  RoundStats stats;
  stats.round = round_;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double owed = ledger.owed(static_cast<NodeId>(i));
    if (owed == 0.0) {
      drained_[i] = 0.0;
      continue;
    }
    const auto res = drain(nodes[i].battery, owed);
    nodes[i].battery = res.battery;
    drained_[i] = res.drained;
  }
  for (double d : drained_) stats.energy_spent_j += d;

  int max_hops = 0;
  for (std::size_t i = 0; i < routing_.size(); ++i) {
    if (!routing_.originates[i]) continue;
    if (const auto hops = hops_to_bs(routing_, static_cast<NodeId>(i))) max_hops = std::max(max_hops, *hops);
  }
  stats.max_path_hops = max_hops;

  double min_rfd = std::numeric_limits<double>::infinity();
  double min_ffd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (alive_before[i] && !node.alive()) stats.deaths.push_back(node.id);
    if (node.kind == NodeKind::Ffd) {
      min_ffd = std::min(min_ffd, node.battery.residual);
      if (node.alive()) ++stats.alive_ffds;
    } else {
      min_rfd = std::min(min_rfd, node.battery.residual);
      if (node.alive()) ++stats.alive_rfds;
    }
  }
  stats.min_rfd_residual_j = min_rfd;
  if (result_.n_ffds > 0) stats.min_ffd_residual_j = min_ffd;

  if (observer) {
    observer(RoundTrace{round_, messages_, drained_, nodes, &routing_});
  }

  record_deaths(stats);
  for (NodeId dead : stats.deaths) repair(dead);

  const auto& opts = world_.options;
  const bool reached = (opts.stop_at == StopAt::Fnd && result_.fnd_round) ||
                       (opts.stop_at == StopAt::Hnd && result_.hnd_round) ||
                       (opts.stop_at == StopAt::Lnd && result_.lnd_round);
  const bool idle = messages_.empty() && cfg.idle_j_per_round == 0.0;
  if (reached || stats.alive_rfds == 0 || idle || round_ >= opts.max_rounds) {
    finished_ = true;
    if (!result_.fnd_round && round_ >= opts.max_rounds) result_.fnd_censored = true;
  }
  result_.rounds.push_back(std::move(stats));
  return result_.rounds.back();
}

void Simulation::record_deaths(RoundStats& stats) {
  if (stats.deaths.empty()) return;
  const std::int64_t completed = round_ - 1;
  if (!result_.fnd_round) {
    result_.fnd_round = completed;
    NodeId first = stats.deaths.front();
    for (NodeId id : stats.deaths) {
      const double r = at(world_.nodes, id).battery.residual;
      const double best = at(world_.nodes, first).battery.residual;
      if (r < best) first = id;
    }
    const NodeRecord& node = at(world_.nodes, first);
    result_.first_dead_node = DeadNodeInfo{node.id, node.kind, node.region, node.chain, round_};
  }
  const int dead_originators = result_.n_originators - stats.alive_rfds;
  if (!result_.hnd_round && 2 * dead_originators >= result_.n_originators) result_.hnd_round = completed;
  if (!result_.lnd_round && stats.alive_rfds == 0) result_.lnd_round = completed;
}

void Simulation::repair(NodeId dead) {
  auto& nodes = world_.nodes;
  const NodeRecord& node = at(nodes, dead);
  const auto& cfg = world_.config;
  if (!is_baseline(world_.options.scheme)) {
    if (node.kind == NodeKind::Ffd) {
      result_.dnode_messages.push_back(
          {MessageKind::DNode, dead, kBaseStation, cfg.ctl_bits, distance_to_bs(node.position), {}});
      return;
    }
    for (auto& region : world_.plan.regions) {
      for (auto& chain : region.chains) {
        if (std::find(chain.begin(), chain.end(), dead) == chain.end()) continue;
        result_.dnode_messages.push_back({MessageKind::DNode, dead, region.ffd, cfg.ctl_bits,
                                          distance(node.position, at(nodes, region.ffd).position), {}});
        splice_out(nodes, chain, dead, region.ffd);
        return;
      }
    }
    return;
  }
  for (auto& group : world_.groups) {
    if (std::find(group.chain.begin(), group.chain.end(), dead) == group.chain.end()) continue;
    result_.dnode_messages.push_back(
        {MessageKind::DNode, dead, kBaseStation, cfg.ctl_bits, distance_to_bs(node.position), {}});
    splice_out(nodes, group.chain, dead, kNoNode);
    return;
  }
}

SimResult Simulation::take_result() { return std::move(result_); }

SimResult simulate(const NetworkConfig& cfg, const SimOptions& options, const RoundObserver& observer) {
  Simulation sim(cfg, options);
  while (!sim.finished()) sim.step(observer);
  return sim.take_result();
}

}  // namespace hwsn
