#include "hwsn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "hwsn/delay_metrics.hpp"
#include "hwsn/random.hpp"

namespace hwsn {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json* section(const json& parent, const std::string& path, const char* key) {
  if (!parent.contains(key)) return nullptr;
  const json& v = parent.at(key);
  if (!v.is_object()) fail(join(path, key), "expected an object");
  return &v;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(join(path, key), "unknown key");
  }
}

struct Range {
  double lo;
  double hi;
  bool lo_open = false;
};

std::string describe(const Range& r) {
  std::ostringstream os;
  os << (r.lo_open ? "(" : "[") << r.lo << ", ";
  if (std::isinf(r.hi)) os << "inf)";
  else os << r.hi << "]";
  return os.str();
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback, Range range) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string p = join(path, key);
  if (!v.is_number()) fail(p, "expected a number in " + describe(range));
  const double x = v.get<double>();
  const bool below = range.lo_open ? x <= range.lo : x < range.lo;
  if (!std::isfinite(x) || below || x > range.hi) {
    std::ostringstream os;
    os << x << " outside expected range " << describe(range);
    fail(p, os.str());
  }
  return x;
}

std::int64_t get_integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback,
                         std::int64_t lo, std::int64_t hi) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string p = join(path, key);
  if (!v.is_number_integer()) fail(p, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi)
    fail(p, std::to_string(x) + " outside expected range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
  return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(join(path, key), "expected a string");
  return obj.at(key).get<std::string>();
}

const json* get_array(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) return nullptr;
  if (!obj.at(key).is_array()) fail(join(path, key), "expected an array");
  if (obj.at(key).empty()) fail(join(path, key), "must not be empty");
  return &obj.at(key);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// unit conversions leave 1-ulp noise; 15 digits round it off
double tidy(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}


std::string_view start_name(ChainStart s) { return s == ChainStart::FarthestFromBs ? "farthest" : "closest"; }

std::string_view election_name(HeadElection e) {
  switch (e) {
    case HeadElection::Random: return "random";
    case HeadElection::MaxResidual: return "max-residual";
    case HeadElection::RoundRobin: return "round-robin";
    case HeadElection::FarthestFirst: return "farthest-first";
  }
  return "?";
}

void parse_network(const json& doc, NetworkConfig& net) {
  const std::string path = "network";
  check_keys(doc, path,
             {"N", "R", "r", "theta_deg", "rfd_battery_j", "ffd_battery_j", "rfd_threshold_j", "ffd_threshold_j",
              "report_bits", "token_bits", "ctl_bits", "idle_j_per_round", "sensing_radius_m", "tx_range_m",
              "rfd_positions", "n_s", "n_t"});
  net.n_rfds = static_cast<int>(get_integer(doc, path, "N", net.n_rfds, 0, 10'000'000));
  const double R = get_number(doc, path, "R", net.partition.radius(), {0.0, kInf, true});
  const double r = get_number(doc, path, "r", net.partition.track_width(), {0.0, R});
  const double theta_deg = get_number(doc, path, "theta_deg", rad_to_deg(net.partition.theta()), {0.0, 360.0, true});
  if (theta_deg > 180.0 && std::abs(theta_deg - 360.0) > 1e-9)
    fail(join(path, "theta_deg"), "expected (0, 180] or exactly 360 (single sector)");
  const double tracks = R / r;
  if (std::abs(tracks - std::round(tracks)) > 1e-9 * std::max(1.0, tracks)) {
    std::ostringstream os;
    os << "R/r = " << tracks << " must be an integer";
    fail(join(path, "r"), os.str());
  }
  const double sectors = 360.0 / theta_deg;
  if (std::abs(sectors - std::round(sectors)) > 1e-9 * std::max(1.0, sectors)) {
    std::ostringstream os;
    os << "360/theta = " << sectors << " must be an integer";
    fail(join(path, "theta_deg"), os.str());
  }
  net.partition = PartitionSpec::make(R, r, deg_to_rad(theta_deg));
  // derived counts, echoed in resolved configs; accepted when consistent
  if (get_integer(doc, path, "n_s", net.partition.sectors(), 1, 100'000) != net.partition.sectors())
    fail(join(path, "n_s"), "disagrees with theta_deg (" + std::to_string(net.partition.sectors()) + " sectors)");
  if (get_integer(doc, path, "n_t", net.partition.tracks(), 1, 100'000) != net.partition.tracks())
    fail(join(path, "n_t"), "disagrees with R/r (" + std::to_string(net.partition.tracks()) + " tracks)");

  net.rfd_battery_j = get_number(doc, path, "rfd_battery_j", net.rfd_battery_j, {0.0, kInf, true});
  net.ffd_battery_j = get_number(doc, path, "ffd_battery_j", net.ffd_battery_j, {0.0, kInf, true});
  net.rfd_threshold_j = get_number(doc, path, "rfd_threshold_j", net.rfd_threshold_j, {0.0, net.rfd_battery_j});
  net.ffd_threshold_j = get_number(doc, path, "ffd_threshold_j", net.ffd_threshold_j, {0.0, net.ffd_battery_j});
  const auto kMaxBits = std::int64_t{1} << 40;
  net.report_bits = static_cast<Bits>(get_integer(doc, path, "report_bits", static_cast<std::int64_t>(net.report_bits), 1, kMaxBits));
  net.token_bits = static_cast<Bits>(get_integer(doc, path, "token_bits", static_cast<std::int64_t>(net.token_bits), 1, kMaxBits));
  net.ctl_bits = static_cast<Bits>(get_integer(doc, path, "ctl_bits", static_cast<std::int64_t>(net.ctl_bits), 1, kMaxBits));
  net.idle_j_per_round = get_number(doc, path, "idle_j_per_round", net.idle_j_per_round, {0.0, kInf});
  net.sensing_radius_m = get_number(doc, path, "sensing_radius_m", net.sensing_radius_m, {0.0, kInf, true});
  net.tx_range_m = get_number(doc, path, "tx_range_m", net.tx_range_m, {0.0, kInf, true});

  if (const json* pos = get_array(doc, path, "rfd_positions")) {
    net.fixed_rfd_positions.clear();
    for (std::size_t i = 0; i < pos->size(); ++i) {
      const std::string p = join(path, "rfd_positions") + "[" + std::to_string(i) + "]";
      const json& e = (*pos)[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(p, "expected [rho_m, phi_deg]");
      const double rho = e[0].get<double>();
      if (!(rho >= 0.0 && rho <= R)) fail(p, "rho outside [0, R]");
      net.fixed_rfd_positions.push_back({rho, wrap_angle(deg_to_rad(e[1].get<double>()))});
    }
    if (!doc.contains("N")) net.n_rfds = static_cast<int>(net.fixed_rfd_positions.size());
    if (static_cast<std::size_t>(net.n_rfds) != net.fixed_rfd_positions.size())
      fail(join(path, "rfd_positions"), "length must equal N");
  }
}

void parse_radio(const json& doc, RadioParams& radio) {
  const std::string path = "radio";
  check_keys(doc, path, {"e_elec_nj", "eps_fs_pj", "eps_mp_pj"});
  radio.e_elec = get_number(doc, path, "e_elec_nj", radio.e_elec * 1e9, {0.0, kInf}) * 1e-9;
  radio.eps_fs = get_number(doc, path, "eps_fs_pj", radio.eps_fs * 1e12, {0.0, kInf, true}) * 1e-12;
  radio.eps_mp = get_number(doc, path, "eps_mp_pj", radio.eps_mp * 1e12, {0.0, kInf, true}) * 1e-12;
}

void parse_baselines(const json& doc, BaselineConfig& b) {
  const std::string path = "baselines";
  check_keys(doc, path, {"pegasis", "epegasis", "chiron"});
  if (const json* p = section(doc, path, "pegasis")) {
    const std::string pp = join(path, "pegasis");
    check_keys(*p, pp, {"side_m", "chain_start"});
    b.square_side_m = get_number(*p, pp, "side_m", b.square_side_m, {0.0, kInf, true});
    const std::string s = get_string(*p, pp, "chain_start", std::string(start_name(b.pegasis_start)));
    if (s == "farthest") b.pegasis_start = ChainStart::FarthestFromBs;
    else if (s == "closest") b.pegasis_start = ChainStart::ClosestToBs;
    else fail(join(pp, "chain_start"), "expected \"farthest\" or \"closest\"");
  }
  if (const json* p = section(doc, path, "epegasis")) {
    const std::string pp = join(path, "epegasis");
    check_keys(*p, pp, {"R", "levels", "r", "election"});
    b.disc_radius_m = get_number(*p, pp, "R", b.disc_radius_m, {0.0, kInf, true});
    b.epegasis_levels = static_cast<int>(get_integer(*p, pp, "levels", b.epegasis_levels, 1, 10'000));
    b.epegasis_level_width_m =
        get_number(*p, pp, "r", p->contains("levels") && !p->contains("r") ? b.disc_radius_m / b.epegasis_levels
                                                                           : b.epegasis_level_width_m,
                   {0.0, b.disc_radius_m, true});
    const std::string e = get_string(*p, pp, "election", std::string(election_name(b.epegasis_election)));
    if (e == "random") b.epegasis_election = HeadElection::Random;
    else if (e == "max-residual") b.epegasis_election = HeadElection::MaxResidual;
    else if (e == "round-robin") b.epegasis_election = HeadElection::RoundRobin;
    else if (e == "farthest-first") b.epegasis_election = HeadElection::FarthestFirst;
    else fail(join(pp, "election"), "expected random, max-residual, round-robin or farthest-first");
  }
  if (const json* p = section(doc, path, "chiron")) {
    const std::string pp = join(path, "chiron");
    check_keys(*p, pp, {"R", "theta_area_deg", "levels", "sectors", "r", "theta_sector_deg"});
    b.fan_radius_m = get_number(*p, pp, "R", b.fan_radius_m, {0.0, kInf, true});
    b.fan_angle = deg_to_rad(get_number(*p, pp, "theta_area_deg", rad_to_deg(b.fan_angle), {0.0, 360.0, true}));
    b.chiron_levels = static_cast<int>(get_integer(*p, pp, "levels", b.chiron_levels, 1, 10'000));
    b.chiron_sectors = static_cast<int>(get_integer(*p, pp, "sectors", b.chiron_sectors, 1, 10'000));
    b.chiron_level_width_m = get_number(*p, pp, "r", b.fan_radius_m / b.chiron_levels, {0.0, b.fan_radius_m, true});
    b.chiron_sector_angle = deg_to_rad(get_number(*p, pp, "theta_sector_deg",
                                                  rad_to_deg(b.fan_angle) / b.chiron_sectors, {0.0, 360.0, true}));
  }
  try {
    b.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

template <class T, class Parse>
std::vector<T> parse_names(const json& arr, const std::string& path, Parse parse) {
  std::vector<T> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!arr[i].is_string()) fail(p, "expected a string");
    const auto v = parse(arr[i].get<std::string>());
    if (!v) fail(p, "unknown value \"" + arr[i].get<std::string>() + "\"");
    if (std::find(out.begin(), out.end(), *v) != out.end()) fail(p, "duplicate value");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::int64_t> parse_ints(const json& arr, const std::string& path, std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!arr[i].is_number_integer()) fail(p, "expected an integer");
    const auto x = arr[i].get<std::int64_t>();
    if (x < lo || x > hi) fail(p, std::to_string(x) + " outside expected range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(x);
  }
  return out;
}

void parse_experiment(const json& doc, ExperimentSpec& x, const NetworkConfig& net) {
  const std::string path = "experiment";
  check_keys(doc, path, {"schemes", "approaches", "sweep", "output_dir", "max_rounds", "stop_at", "jobs", "flags"});
  if (const json* a = get_array(doc, path, "schemes"))
    x.schemes = parse_names<Scheme>(*a, join(path, "schemes"), [](const std::string& s) { return parse_scheme(s); });
  if (const json* a = get_array(doc, path, "approaches")) {
    x.approaches =
        parse_names<Approach>(*a, join(path, "approaches"), [](const std::string& s) { return parse_approach(s); });
    x.approaches_explicit = true;
  }
  if (x.approaches_explicit && std::all_of(x.schemes.begin(), x.schemes.end(), is_baseline))
    fail(join(path, "approaches"), "baseline schemes take no approach");

  if (const json* s = section(doc, path, "sweep")) {
    const std::string sp = join(path, "sweep");
    check_keys(*s, sp, {"n_s", "n_t", "seeds"});
    if (const json* a = get_array(*s, sp, "n_s"))
      for (auto v : parse_ints(*a, join(sp, "n_s"), 1, 100'000)) x.sectors.push_back(static_cast<int>(v));
    if (const json* a = get_array(*s, sp, "n_t"))
      for (auto v : parse_ints(*a, join(sp, "n_t"), 1, 100'000)) x.tracks.push_back(static_cast<int>(v));
    if (const json* a = get_array(*s, sp, "seeds")) {
      x.seeds.clear();
      for (std::size_t i = 0; i < a->size(); ++i) {
        const json& v = (*a)[i];
        const std::string p = join(sp, "seeds") + "[" + std::to_string(i) + "]";
        if (!v.is_number_unsigned()) fail(p, "expected a non-negative integer");
        x.seeds.push_back(v.get<std::uint64_t>());
      }
    }
  }
  if (x.sectors.empty()) x.sectors.push_back(net.partition.sectors());
  if (x.tracks.empty()) x.tracks.push_back(net.partition.tracks());

  x.output_dir = get_string(doc, path, "output_dir", x.output_dir);
  if (x.output_dir.empty()) fail(join(path, "output_dir"), "must not be empty");
  x.max_rounds = get_integer(doc, path, "max_rounds", x.max_rounds, 1, std::int64_t{1} << 40);
  const std::string stop = get_string(doc, path, "stop_at", std::string(to_string(x.stop_at)));
  if (const auto s = parse_stop_at(stop)) x.stop_at = *s;
  else fail(join(path, "stop_at"), "expected fnd, hnd or lnd");
  x.jobs = static_cast<int>(get_integer(doc, path, "jobs", x.jobs, 1, 1024));

  if (const json* f = section(doc, path, "flags")) {
    const std::string fp = join(path, "flags");
    check_keys(*f, fp, {"fusion", "setup_energy", "literal_fig4", "strict_range", "rfd_sleep"});
    x.flags.fusion = get_bool(*f, fp, "fusion", x.flags.fusion);
    x.flags.setup_energy = get_bool(*f, fp, "setup_energy", x.flags.setup_energy);
    x.flags.literal_fig4 = get_bool(*f, fp, "literal_fig4", x.flags.literal_fig4);
    x.flags.strict_range = get_bool(*f, fp, "strict_range", x.flags.strict_range);
    x.flags.rfd_sleep = get_bool(*f, fp, "rfd_sleep", x.flags.rfd_sleep);
  }
}

ordered_json flags_json(const ProtocolFlags& f) {
  ordered_json j;
  j["fusion"] = f.fusion;
  j["setup_energy"] = f.setup_energy;
  j["literal_fig4"] = f.literal_fig4;
  j["strict_range"] = f.strict_range;
  j["rfd_sleep"] = f.rfd_sleep;
  return j;
}

ordered_json network_json(const NetworkConfig& n) {
  ordered_json j;
  j["N"] = n.n_rfds;
  j["R"] = n.partition.radius();
  j["r"] = n.partition.track_width();
  j["theta_deg"] = tidy(rad_to_deg(n.partition.theta()));
  j["n_s"] = n.partition.sectors();
  j["n_t"] = n.partition.tracks();
  j["rfd_battery_j"] = n.rfd_battery_j;
  j["ffd_battery_j"] = n.ffd_battery_j;
  j["rfd_threshold_j"] = n.rfd_threshold_j;
  j["ffd_threshold_j"] = n.ffd_threshold_j;
  j["report_bits"] = n.report_bits;
  j["token_bits"] = n.token_bits;
  j["ctl_bits"] = n.ctl_bits;
  j["idle_j_per_round"] = n.idle_j_per_round;
  j["sensing_radius_m"] = n.sensing_radius_m;
  j["tx_range_m"] = n.tx_range_m;
  if (!n.fixed_rfd_positions.empty()) {
    ordered_json pos = ordered_json::array();
    for (const auto& p : n.fixed_rfd_positions) pos.push_back(ordered_json::array({p.rho, tidy(rad_to_deg(p.phi))}));
    j["rfd_positions"] = std::move(pos);
  }
  return j;
}

ordered_json radio_json(const RadioParams& r) {
  ordered_json j;
  j["e_elec_nj"] = tidy(r.e_elec * 1e9);
  j["eps_fs_pj"] = tidy(r.eps_fs * 1e12);
  j["eps_mp_pj"] = tidy(r.eps_mp * 1e12);
  return j;
}

ordered_json baselines_json(const BaselineConfig& b) {
  ordered_json j;
  j["pegasis"] = {{"side_m", b.square_side_m}, {"chain_start", start_name(b.pegasis_start)}};
  ordered_json e;
  e["R"] = b.disc_radius_m;
  e["levels"] = b.epegasis_levels;
  e["r"] = b.epegasis_level_width_m;
  e["election"] = election_name(b.epegasis_election);
  j["epegasis"] = std::move(e);
  ordered_json c;
  c["R"] = b.fan_radius_m;
  c["theta_area_deg"] = tidy(rad_to_deg(b.fan_angle));
  c["levels"] = b.chiron_levels;
  c["sectors"] = b.chiron_sectors;
  c["r"] = b.chiron_level_width_m;
  c["theta_sector_deg"] = tidy(rad_to_deg(b.chiron_sector_angle));
  j["chiron"] = std::move(c);
  return j;
}

ordered_json cell_json(const Cell& c) {
  ordered_json j;
  j["id"] = c.id();
  j["scheme"] = to_string(c.scheme);
  j["approach"] = c.approach ? ordered_json(to_string(*c.approach)) : ordered_json(nullptr);
  j["n_s"] = c.n_s;
  j["n_t"] = c.n_t;
  j["seed"] = c.seed;
  return j;
}

// config as echoed into output files: independent of where and how wide the run was
ordered_json output_echo(const LoadedConfig& config, const NetworkConfig& net) {
  ordered_json echo = config.resolved;
  echo["network"] = network_json(net);
  echo["experiment"].erase("output_dir");
  echo["experiment"].erase("jobs");
  return echo;
}

template <class T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

ordered_json resolve_config(const NetworkConfig& network, const BaselineConfig& baseline,
                            const ExperimentSpec& experiment) {
  ordered_json j;
  j["rng"] = Rng::kAlgorithm;
  j["network"] = network_json(network);
  j["radio"] = radio_json(network.radio);
  j["baselines"] = baselines_json(baseline);
  ordered_json x;
  ordered_json schemes = ordered_json::array();
  for (Scheme s : experiment.schemes) schemes.push_back(to_string(s));
  x["schemes"] = std::move(schemes);
  ordered_json approaches = ordered_json::array();
  for (Approach a : experiment.approaches) approaches.push_back(to_string(a));
  x["approaches"] = std::move(approaches);
  ordered_json sweep;
  sweep["n_s"] = experiment.sectors;
  sweep["n_t"] = experiment.tracks;
  sweep["seeds"] = experiment.seeds;
  x["sweep"] = std::move(sweep);
  x["output_dir"] = experiment.output_dir;
  x["max_rounds"] = experiment.max_rounds;
  x["stop_at"] = to_string(experiment.stop_at);
  x["jobs"] = experiment.jobs;
  x["flags"] = flags_json(experiment.flags);
  j["experiment"] = std::move(x);
  return j;
}

LoadedConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(doc, "", {"rng", "network", "radio", "baselines", "experiment"});
  LoadedConfig out;
  const std::string rng = get_string(doc, "", "rng", std::string(Rng::kAlgorithm));
  if (rng != Rng::kAlgorithm) fail("rng", "only \"" + std::string(Rng::kAlgorithm) + "\" is supported");
  if (const json* s = section(doc, "", "network")) parse_network(*s, out.network);
  if (const json* s = section(doc, "", "radio")) parse_radio(*s, out.network.radio);
  if (const json* s = section(doc, "", "baselines")) parse_baselines(*s, out.baseline);
  if (const json* s = section(doc, "", "experiment")) parse_experiment(*s, out.experiment, out.network);
  else parse_experiment(json::object(), out.experiment, out.network);
  try {
    out.network.validate();
  } catch (const ConfigError& e) {
    fail("network", e.what());
  }
  // every sweep point must give a legal partition
  for (int n_t : out.experiment.tracks)
    for (int n_s : out.experiment.sectors) {
      try {
        (void)PartitionSpec::from_counts(out.network.partition.radius(), n_t, n_s);
      } catch (const ConfigError& e) {
        fail("experiment.sweep", "n_s=" + std::to_string(n_s) + " n_t=" + std::to_string(n_t) + ": " + e.what());
      }
    }
  out.resolved = resolve_config(out.network, out.baseline, out.experiment);
  return out;
}

LoadedConfig parse_config_text(const std::string& text) {
  // whitespace-only counts as an empty config
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
    return parse_config(json::object());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

LoadedConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string Cell::id() const {
  std::string s(to_string(scheme));
  if (approach) {
    s += "_";
    s += to_string(*approach);
    s += "_ns" + std::to_string(n_s) + "_nt" + std::to_string(n_t);
  }
  s += "_seed" + std::to_string(seed);
  return s;
}

std::vector<Cell> enumerate_cells(const LoadedConfig& config) {
  const ExperimentSpec& x = config.experiment;
  std::vector<Cell> cells;
  for (Scheme scheme : x.schemes) {
    if (is_baseline(scheme)) {
      for (auto seed : x.seeds) cells.push_back({scheme, std::nullopt, 0, 0, seed});
      continue;
    }
    for (Approach a : x.approaches)
      for (int n_t : x.tracks)
        for (int n_s : x.sectors)
          for (auto seed : x.seeds) cells.push_back({scheme, a, n_s, n_t, seed});
  }
  return cells;
}

NetworkConfig cell_network(const LoadedConfig& config, const Cell& cell) {
  NetworkConfig net = config.network;
  net.seed = cell.seed;
  if (!is_baseline(cell.scheme) &&
      (cell.n_s != net.partition.sectors() || cell.n_t != net.partition.tracks()))
    net.partition = PartitionSpec::from_counts(net.partition.radius(), cell.n_t, cell.n_s);
  return net;
}

SimOptions cell_options(const LoadedConfig& config, const Cell& cell) {
  SimOptions o;
  o.scheme = cell.scheme;
  if (cell.approach) o.approach = *cell.approach;
  o.flags = config.experiment.flags;
  o.baseline = config.baseline;
  o.max_rounds = config.experiment.max_rounds;
  o.stop_at = config.experiment.stop_at;
  return o;
}

CellOutcome run_cell(const LoadedConfig& config, const Cell& cell) {
  const NetworkConfig net = cell_network(config, cell);
  const SimOptions opts = cell_options(config, cell);
  CellOutcome out;
  out.cell = cell;
  if (is_baseline(cell.scheme))
    out.analytic_max_path = analytic_baseline_max_path(model_of(cell.scheme), config.baseline, net.n_rfds);
  else
    out.analytic_max_path = analytic_max_path(variant_of(cell.scheme), *cell.approach, net.partition, net.n_rfds);

  Simulation sim(net, opts);
  if (!sim.finished()) out.measured_max_path = measured_max_path(sim.peek_routing()).hops;
  while (!sim.finished()) sim.step();
  out.result = sim.take_result();
  return out;
}

std::string format_round_csv(const LoadedConfig& config, const CellOutcome& outcome) {
  const Cell& c = outcome.cell;
  ordered_json echo = output_echo(config, outcome.result.config);
  echo["network"].erase("rfd_positions");
  std::string s;
  s += "# cell=" + c.id() + "\n";
  s += "# scheme=" + std::string(to_string(c.scheme)) +
       " approach=" + (c.approach ? std::string(to_string(*c.approach)) : std::string("-")) +
       " n_s=" + std::to_string(c.n_s) + " n_t=" + std::to_string(c.n_t) + " seed=" + std::to_string(c.seed) + "\n";
  s += "# config=" + echo.dump() + "\n";
  s += "round,alive_rfds,alive_ffds,energy_spent_j,min_rfd_residual_j,min_ffd_residual_j,max_path_hops,deaths\n";
  for (const RoundStats& r : outcome.result.rounds) {
    s += std::to_string(r.round) + "," + std::to_string(r.alive_rfds) + "," + std::to_string(r.alive_ffds) + "," +
         format_double(r.energy_spent_j) + "," + format_double(r.min_rfd_residual_j) + "," +
         (r.min_ffd_residual_j ? format_double(*r.min_ffd_residual_j) : std::string()) + "," +
         std::to_string(r.max_path_hops) + ",";
    for (std::size_t i = 0; i < r.deaths.size(); ++i) {
      if (i) s += ";";
      s += std::to_string(r.deaths[i]);
    }
    s += "\n";
  }
  return s;
}

ordered_json summary_json(const LoadedConfig& config, const CellOutcome& outcome) {
  const SimResult& r = outcome.result;
  ordered_json j;
  j["cell"] = cell_json(outcome.cell);
  j["config"] = output_echo(config, r.config);
  ordered_json res;
  res["fnd_round"] = opt_json(r.fnd_round);
  res["hnd_round"] = opt_json(r.hnd_round);
  res["lnd_round"] = opt_json(r.lnd_round);
  res["fnd_censored"] = r.fnd_censored;
  res["rounds_run"] = r.rounds.size();
  if (r.first_dead_node) {
    const DeadNodeInfo& d = *r.first_dead_node;
    ordered_json dj;
    dj["id"] = d.id;
    dj["kind"] = to_string(d.kind);
    dj["region"] = d.kind == NodeKind::Rfd || d.region.sector > 0 ? ordered_json(to_string(d.region)) : ordered_json(nullptr);
    dj["chain"] = d.chain ? ordered_json(d.chain->chain) : ordered_json(nullptr);
    dj["chain_position"] = d.chain ? ordered_json(d.chain->position) : ordered_json(nullptr);
    dj["died_in_round"] = d.died_in_round;
    res["first_dead_node"] = std::move(dj);
  } else {
    res["first_dead_node"] = nullptr;
  }
  res["analytic_max_path"] = outcome.analytic_max_path;
  res["measured_max_path"] = outcome.measured_max_path;
  res["n_originators"] = r.n_originators;
  res["n_ffds"] = r.n_ffds;
  const CostReport cost = cost_summary(r.n_ffds, is_baseline(outcome.cell.scheme) ? 0 : r.n_originators);
  res["cost"] = {{"ffds", cost.ffds}, {"rfds", cost.rfds}, {"weighted", cost.weighted}};
  res["setup_energy_j"] = r.setup_energy_j;
  res["dropped_reports"] = r.dropped_reports;
  res["mode_violations"] = r.mode_violations;
  res["notes"] = r.notes;
  j["result"] = std::move(res);
  return j;
}

ExperimentRun run_experiment(const LoadedConfig& config, const fs::path& output_dir, int jobs) {
  const std::vector<Cell> cells = enumerate_cells(config);
  const fs::path cell_dir = output_dir / "cells";
  const bool dir_existed = fs::exists(output_dir);
  fs::create_directories(cell_dir);

  std::vector<fs::path> written;
  std::mutex written_mu;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : written) {
      fs::remove(p, ec);
      fs::path tmp = p;
      tmp += ".tmp";
      fs::remove(tmp, ec);
    }
    if (fs::is_empty(cell_dir, ec)) fs::remove(cell_dir, ec);
    if (!dir_existed && fs::is_empty(output_dir, ec)) fs::remove(output_dir, ec);
  };

  ExperimentRun run;
  run.outcomes.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      {
        std::lock_guard lock(error_mu);
        if (error) return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        CellOutcome outcome = run_cell(config, cells[i]);
        const fs::path csv = cell_dir / (cells[i].id() + ".csv");
        const fs::path summary = cell_dir / (cells[i].id() + ".json");
        {
          std::lock_guard lock(written_mu);
          written.push_back(csv);
          written.push_back(summary);
        }
        write_atomic(csv, format_round_csv(config, outcome));
        write_atomic(summary, summary_json(config, outcome).dump(2) + "\n");
        run.outcomes[i] = std::move(outcome);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) {
    cleanup();
    std::rethrow_exception(error);
  }

  ordered_json manifest;
  manifest["rng"] = Rng::kAlgorithm;
  manifest["config"] = output_echo(config, config.network);
  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ordered_json e = cell_json(cells[i]);
    e["csv"] = "cells/" + cells[i].id() + ".csv";
    e["summary"] = "cells/" + cells[i].id() + ".json";
    e["network"] = network_json(run.outcomes[i].result.config);
    e["network"].erase("rfd_positions");
    e["fnd_round"] = opt_json(run.outcomes[i].result.fnd_round);
    list.push_back(std::move(e));
  }
  manifest["cells"] = std::move(list);
  run.manifest = output_dir / "manifest.json";
  try {
    written.push_back(run.manifest);
    write_atomic(run.manifest, manifest.dump(2) + "\n");
  } catch (...) {
    cleanup();
    throw;
  }
  return run;
}

ComparisonTable summarize(const std::vector<json>& cell_summaries) {
  struct Acc {
    ComparisonRow row;
    std::vector<double> fnd;
    std::vector<double> measured;
    bool censored = false;
  };
  using Key = std::tuple<int, std::string, int, int>;
  std::map<Key, Acc> groups;
  ComparisonTable table;
  for (const json& s : cell_summaries) {
    const json& cell = s.at("cell");
    const json& res = s.at("result");
    const std::string scheme = cell.at("scheme").get<std::string>();
    const auto parsed = parse_scheme(scheme);
    if (!parsed) throw ConfigError("summary: unknown scheme " + scheme);
    const std::string approach = cell.at("approach").is_null() ? "-" : cell.at("approach").get<std::string>();
    const Key key{static_cast<int>(*parsed), approach, cell.at("n_s").get<int>(), cell.at("n_t").get<int>()};
    Acc& acc = groups[key];
    acc.row.scheme = scheme;
    acc.row.approach = approach;
    acc.row.n_s = std::get<2>(key);
    acc.row.n_t = std::get<3>(key);
    acc.row.cells += 1;
    acc.row.analytic_max_path = res.at("analytic_max_path").get<double>();
    acc.measured.push_back(res.at("measured_max_path").get<double>());
    if (res.at("fnd_round").is_null()) acc.censored = true;
    else acc.fnd.push_back(res.at("fnd_round").get<double>());
  }
  for (auto& [key, acc] : groups) {
    if (!acc.fnd.empty() && !acc.censored) acc.row.median_fnd = median(acc.fnd);
    acc.row.median_measured_max_path = median(acc.measured);
    table.rows.push_back(acc.row);
  }

  // one representative row per scheme: the first (lowest approach, partition) group
  std::map<std::string, std::vector<const ComparisonRow*>> by_scheme;
  for (const auto& r : table.rows) by_scheme[r.scheme].push_back(&r);
  const std::vector<std::string> all = {"chain1", "chain2", "pegasis", "epegasis", "chiron"};
  for (const auto& s : all)
    if (!by_scheme.count(s)) table.missing.push_back(s);
  if (!table.missing.empty()) return table;

  auto fnd_of = [&](const std::string& s) -> std::optional<double> {
    std::vector<double> v;
    for (const auto* r : by_scheme[s]) {
      if (!r->median_fnd) return std::nullopt;
      v.push_back(*r->median_fnd);
    }
    return median(v);
  };
  {
    Verdict v;
    v.claim = "lifetime: chain2 > chiron > chain1 > max(pegasis, epegasis)";
    const auto c2 = fnd_of("chain2"), ch = fnd_of("chiron"), c1 = fnd_of("chain1"), p = fnd_of("pegasis"),
               e = fnd_of("epegasis");
    if (c2 && ch && c1 && p && e) {
      v.pass = *c2 > *ch && *ch > *c1 && *c1 > std::max(*p, *e);
      std::ostringstream os;
      os << "median FND chain2=" << *c2 << " chiron=" << *ch << " chain1=" << *c1 << " pegasis=" << *p
         << " epegasis=" << *e;
      v.detail = os.str();
    } else {
      v.detail = "censored or missing FND";
    }
    table.verdicts.push_back(v);
  }
  auto analytic_of = [&](const std::string& s, const std::string& approach) -> std::optional<double> {
    for (const auto* r : by_scheme[s])
      if (r->approach == approach || r->approach == "-") return r->analytic_max_path;
    return std::nullopt;
  };
  for (const std::string approach : {"one-hop", "multi-hop"}) {
    const auto c2 = analytic_of("chain2", approach), c1 = analytic_of("chain1", approach);
    if (!c2 || !c1) continue;
    const double ch = *analytic_of("chiron", approach), e = *analytic_of("epegasis", approach),
                 p = *analytic_of("pegasis", approach);
    Verdict v;
    v.claim = "delay (" + approach + "): chain2 < chain1 < chiron < epegasis < pegasis";
    v.pass = *c2 < *c1 && *c1 < ch && ch < e && e < p;
    std::ostringstream os;
    os << "analytic max path chain2=" << *c2 << " chain1=" << *c1 << " chiron=" << ch << " epegasis=" << e
       << " pegasis=" << p;
    v.detail = os.str();
    table.verdicts.push_back(v);
  }
  return table;
}

ComparisonTable summarize_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("summarize: cannot open " + manifest.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("summarize: invalid manifest: ") + e.what());
  }
  std::vector<json> summaries;
  std::vector<std::string> unreadable;
  for (const json& c : m.at("cells")) {
    const fs::path p = manifest.parent_path() / c.at("summary").get<std::string>();
    std::ifstream s(p);
    if (!s) {
      unreadable.push_back(c.at("id").get<std::string>());
      continue;
    }
    summaries.push_back(json::parse(s));
  }
  ComparisonTable t = summarize(summaries);
  for (auto& u : unreadable) t.missing.push_back("cell " + u);
  return t;
}

std::string format_table(const ComparisonTable& table) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-9s %-9s %4s %4s %5s %12s %9s %9s\n", "scheme", "approach", "n_s", "n_t",
                "cells", "median_FND", "analytic", "measured");
  s += buf;
  for (const auto& r : table.rows) {
    const std::string fnd = r.median_fnd ? format_double(*r.median_fnd) : std::string("censored");
    std::snprintf(buf, sizeof buf, "%-9s %-9s %4d %4d %5d %12s %9s %9s\n", r.scheme.c_str(), r.approach.c_str(),
                  r.n_s, r.n_t, r.cells, fnd.c_str(), format_double(r.analytic_max_path).c_str(),
                  format_double(r.median_measured_max_path).c_str());
    s += buf;
  }
  for (const auto& m : table.missing) s += "missing: " + m + "\n";
  for (const auto& v : table.verdicts)
    s += std::string(v.pass ? "PASS " : "FAIL ") + v.claim + " (" + v.detail + ")\n";
  return s;
}

ordered_json table_json(const ComparisonTable& table) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json o;
    o["scheme"] = r.scheme;
    o["approach"] = r.approach;
    o["n_s"] = r.n_s;
    o["n_t"] = r.n_t;
    o["cells"] = r.cells;
    o["median_fnd"] = opt_json(r.median_fnd);
    o["analytic_max_path"] = r.analytic_max_path;
    o["median_measured_max_path"] = r.median_measured_max_path;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["missing"] = table.missing;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : table.verdicts) verdicts.push_back({{"claim", v.claim}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = std::move(verdicts);
  return j;
}

}  // namespace hwsn
