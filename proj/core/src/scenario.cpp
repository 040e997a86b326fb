#include "trsp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trsp/errors.hpp"

namespace trsp {

using nlohmann::json;

namespace {

constexpr std::uint64_t kServiceStream = 0x5e51;
constexpr std::uint64_t kWorkloadStream = 0x301d;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("scenario: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing key '") + key + "'");
  if (!obj[key].is_number()) fail(where, std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj[key].get<double>() : fallback;
}

ValueSpec parse_value(const json& v, const std::string& where) {
  ValueSpec spec;
  if (v.is_number()) {
    spec.kind = ValueSpec::Kind::Fixed;
    spec.lo = v.get<double>();
    return spec;
  }
  if (v.is_string()) {
    if (v.get<std::string>() != "image") fail(where, "string value must be \"image\"");
    spec.kind = ValueSpec::Kind::Image;
    return spec;
  }
  if (!v.is_object()) fail(where, "expected number, \"image\", or {low, high}");
  check_keys(v, where, {"low", "high", "scale"});
  spec.lo = get_number(v, where, "low");
  spec.hi = get_number(v, where, "high");
  if (spec.lo > spec.hi) fail(where, "low must not exceed high");
  if (v.contains("scale")) {
    if (v["scale"] != "image") fail(where, "scale must be \"image\"");
    spec.kind = ValueSpec::Kind::ImageScaledRange;
  } else {
    spec.kind = ValueSpec::Kind::Range;
  }
  return spec;
}

ServiceList parse_explicit_services(const json& arr, const std::string& where) {
  ServiceList services;
  for (std::size_t idx = 0; idx < arr.size(); ++idx) {
    const json& item = arr[idx];
    const std::string here = where + "[" + std::to_string(idx) + "]";
    check_keys(item, here,
               {"image_size_gb", "place_volume_gb", "refresh_volume_gb",
                "offload_volume_gb", "refresh_interval_slots"});
    ServiceSpec svc;
    svc.id = static_cast<int>(idx);
    svc.image_size = volume_from_gb(get_number(item, here, "image_size_gb"));
    svc.place_volume = volume_from_gb(get_number(item, here, "place_volume_gb"));
    svc.refresh_volume = volume_from_gb(get_number(item, here, "refresh_volume_gb"));
    svc.offload_volume = volume_from_gb(get_number(item, here, "offload_volume_gb"));
    svc.refresh_interval =
        static_cast<int>(get_number(item, here, "refresh_interval_slots"));
    services.push_back(svc);
  }
  return services;
}

ServiceGenSpec parse_service_gen(const json& obj, const std::string& where) {
  check_keys(obj, where,
             {"count", "image_size_gb", "place_volume_gb", "refresh_volume_gb",
              "offload_volume_gb", "refresh_interval_slots"});
  ServiceGenSpec gen;
  gen.count = static_cast<int>(get_number(obj, where, "count"));
  if (gen.count < 1) fail(where, "count must be positive");
  gen.image = parse_value(obj.at("image_size_gb"), where + ".image_size_gb");
  gen.place = parse_value(obj.at("place_volume_gb"), where + ".place_volume_gb");
  gen.refresh = parse_value(obj.at("refresh_volume_gb"), where + ".refresh_volume_gb");
  gen.offload = parse_value(obj.at("offload_volume_gb"), where + ".offload_volume_gb");
  const json& lf = obj.at("refresh_interval_slots");
  if (lf.is_number()) {
    gen.lifetime_fixed = lf.get<int>();
    if (gen.lifetime_fixed < 1) fail(where, "refresh_interval_slots must be >= 1");
  } else if (lf.is_object()) {
    check_keys(lf, where + ".refresh_interval_slots", {"exp_mean"});
    gen.lifetime_exponential = true;
    gen.lifetime_mean = get_number(lf, where, "exp_mean");
    if (gen.lifetime_mean <= 0) fail(where, "exp_mean must be positive");
  } else {
    fail(where, "refresh_interval_slots must be a number or {exp_mean}");
  }
  return gen;
}

TopologySpec parse_topology(const json& obj, const std::string& where) {
  check_keys(obj, where, {"grid", "gamma", "n_servers", "storage_gb"});
  TopologySpec topo;
  if (obj.contains("grid")) {
    const json& grid = obj["grid"];
    check_keys(grid, where + ".grid", {"rows", "cols", "hop_coefficient"});
    topo.is_grid = true;
    topo.rows = static_cast<int>(get_number(grid, where, "rows"));
    topo.cols = static_cast<int>(get_number(grid, where, "cols"));
    topo.hop_coefficient = get_number(grid, where, "hop_coefficient");
    topo.n_servers = topo.rows * topo.cols;
  } else if (obj.contains("gamma")) {
    const json& g = obj["gamma"];
    if (!g.is_array() || g.empty()) fail(where, "gamma must be a non-empty matrix");
    topo.n_servers = static_cast<int>(g.size()) - 1;
    if (topo.n_servers < 1) fail(where, "gamma must be (n+1) x (n+1) with n >= 1");
    for (const auto& row : g) {
      if (!row.is_array() || row.size() != g.size()) {
        fail(where, "gamma must be square, including the cloud row/column 0");
      }
      topo.gamma.emplace_back();
      for (const auto& cell : row) topo.gamma.back().push_back(cell.get<double>());
    }
  } else {
    fail(where, "need either 'grid' or an explicit 'gamma' matrix");
  }
  if (!obj.contains("storage_gb")) fail(where, "missing key 'storage_gb'");
  const json& storage = obj["storage_gb"];
  if (storage.is_number()) {
    topo.storage_kind = TopologySpec::Storage::Uniform;
    topo.storage_gb = storage.get<double>();
  } else if (storage.is_array()) {
    topo.storage_kind = TopologySpec::Storage::PerServer;
    for (const auto& v : storage) topo.storage_list.push_back(v.get<double>());
    if (static_cast<int>(topo.storage_list.size()) != topo.n_servers) {
      fail(where, "storage_gb list length must equal the server count");
    }
  } else if (storage.is_object()) {
    check_keys(storage, where + ".storage_gb", {"ratio"});
    topo.storage_kind = TopologySpec::Storage::Ratio;
    topo.storage_ratio = get_number(storage, where, "ratio");
    if (topo.storage_ratio <= 0) fail(where, "storage ratio must be positive");
  } else {
    fail(where, "storage_gb must be a number, a list, or {ratio}");
  }
  return topo;
}

WorkloadSpec parse_workload(const json& obj, const std::string& where) {
  WorkloadSpec w;
  if (!obj.contains("type")) fail(where, "missing key 'type'");
  const std::string type = obj["type"].get<std::string>();
  if (type == "synthetic") {
    w.type = WorkloadSpec::Type::Synthetic;
    check_keys(obj, where,
               {"type", "zipf_shape", "rerank_prob", "users_per_server",
                "requests_per_user_per_slot", "noise_low", "noise_high"});
    w.zipf_shape = get_number_or(obj, "zipf_shape", w.zipf_shape);
    w.rerank_prob = get_number_or(obj, "rerank_prob", w.rerank_prob);
    w.users_per_server = static_cast<std::int64_t>(
        get_number_or(obj, "users_per_server", double(w.users_per_server)));
    w.requests_per_user_per_slot = static_cast<std::int64_t>(get_number_or(
        obj, "requests_per_user_per_slot", double(w.requests_per_user_per_slot)));
    w.noise_low = get_number_or(obj, "noise_low", w.noise_low);
    w.noise_high = get_number_or(obj, "noise_high", w.noise_high);
  } else if (type == "trace") {
    w.type = WorkloadSpec::Type::Trace;
    check_keys(obj, where,
               {"type", "path", "server_positions", "coverage_radius_m",
                "requests_per_taxi_per_slot", "zipf_shape", "rerank_prob",
                "noise_low", "noise_high", "bounding_box"});
    if (!obj.contains("path")) fail(where, "trace workload needs 'path'");
    w.path = obj["path"].get<std::string>();
    if (!obj.contains("server_positions")) fail(where, "need 'server_positions'");
    for (const auto& pos : obj["server_positions"]) {
      if (!pos.is_array() || pos.size() != 2) fail(where, "positions are [lat, lon]");
      w.server_positions.emplace_back(pos[0].get<double>(), pos[1].get<double>());
    }
    w.coverage_radius_m = get_number_or(obj, "coverage_radius_m", w.coverage_radius_m);
    w.requests_per_taxi_per_slot = static_cast<std::int64_t>(get_number_or(
        obj, "requests_per_taxi_per_slot", double(w.requests_per_taxi_per_slot)));
    w.zipf_shape = get_number_or(obj, "zipf_shape", w.zipf_shape);
    w.rerank_prob = get_number_or(obj, "rerank_prob", w.rerank_prob);
    w.noise_low = get_number_or(obj, "noise_low", w.noise_low);
    w.noise_high = get_number_or(obj, "noise_high", w.noise_high);
    if (obj.contains("bounding_box")) {
      const json& bb = obj["bounding_box"];
      if (!bb.is_array() || bb.size() != 4) {
        fail(where, "bounding_box is [lat_lo, lon_lo, lat_hi, lon_hi]");
      }
      w.bbox = {{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                 bb[3].get<double>()}};
    }
  } else if (type == "file") {
    w.type = WorkloadSpec::Type::File;
    check_keys(obj, where, {"type", "path"});
    if (!obj.contains("path")) fail(where, "file workload needs 'path'");
    w.path = obj["path"].get<std::string>();
  } else {
    fail(where, "type must be synthetic, trace, or file");
  }
  return w;
}

}  // namespace

double ValueSpec::sample(Rng& rng, double image_gb) const {
  switch (kind) {
    case Kind::Fixed:
      return lo;
    case Kind::Range:
      return rng.uniform(lo, hi);
    case Kind::Image:
      return image_gb;
    case Kind::ImageScaledRange:
      return rng.uniform(lo, hi) * image_gb;
  }
  return lo;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  check_keys(root, "top level",
             {"name", "horizon", "seed", "services", "topology", "workload", "dva",
              "solver"});
  Scenario sc;
  sc.dir = dir;
  if (root.contains("name")) sc.name = root["name"].get<std::string>();
  sc.horizon = static_cast<int>(get_number(root, "top level", "horizon"));
  if (sc.horizon < 1) fail("top level", "horizon must be >= 1");
  if (root.contains("seed")) {
    sc.default_seed = root["seed"].get<std::uint64_t>();
  }

  if (!root.contains("services")) fail("top level", "missing key 'services'");
  if (root["services"].is_array()) {
    sc.explicit_services = true;
    sc.services = parse_explicit_services(root["services"], "services");
    validate_services(sc.services);
  } else if (root["services"].is_object()) {
    sc.service_gen = parse_service_gen(root["services"], "services");
  } else {
    fail("services", "must be a list of services or a generator object");
  }

  if (!root.contains("topology")) fail("top level", "missing key 'topology'");
  sc.topology = parse_topology(root["topology"], "topology");

  if (!root.contains("workload")) fail("top level", "missing key 'workload'");
  sc.workload = parse_workload(root["workload"], "workload");

  if (root.contains("dva")) {
    const json& dva = root["dva"];
    check_keys(dva, "dva", {"theta", "delta", "horizon_epsilon", "capacity_quantum_gb"});
    sc.theta = get_number_or(dva, "theta", sc.theta);
    if (dva.contains("delta")) {
      if (dva["delta"].is_number()) {
        sc.delta_scalar = dva["delta"].get<double>();
      } else if (dva["delta"].is_object()) {
        check_keys(dva["delta"], "dva.delta", {"matrix_file"});
        sc.delta_matrix_file = dva["delta"].at("matrix_file").get<std::string>();
      } else {
        fail("dva.delta", "must be a number or {matrix_file}");
      }
    }
    sc.horizon_epsilon = get_number_or(dva, "horizon_epsilon", sc.horizon_epsilon);
    sc.capacity_quantum_gb =
        get_number_or(dva, "capacity_quantum_gb", sc.capacity_quantum_gb);
  }

  if (root.contains("solver")) {
    const json& solver = root["solver"];
    check_keys(solver, "solver",
               {"node_budget", "oracle_guard_sequences", "lp_variable_guard",
                "lp_tableau_cell_guard"});
    sc.guards.node_budget = static_cast<std::int64_t>(
        get_number_or(solver, "node_budget", double(sc.guards.node_budget)));
    sc.guards.oracle_guard_sequences = static_cast<std::int64_t>(get_number_or(
        solver, "oracle_guard_sequences", double(sc.guards.oracle_guard_sequences)));
    sc.guards.rr.variable_guard = static_cast<std::int64_t>(get_number_or(
        solver, "lp_variable_guard", double(sc.guards.rr.variable_guard)));
    sc.guards.rr.tableau_cell_guard = static_cast<std::int64_t>(get_number_or(
        solver, "lp_tableau_cell_guard", double(sc.guards.rr.tableau_cell_guard)));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario sc = parse_scenario(buffer.str(), path.parent_path());
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

namespace {

ServiceList generate_services(const ServiceGenSpec& gen, Rng& rng) {
  ServiceList services;
  services.reserve(gen.count);
  for (int i = 0; i < gen.count; ++i) {
    ServiceSpec svc;
    svc.id = i;
    const double image_gb = gen.image.sample(rng, 0.0);
    svc.image_size = volume_from_gb(image_gb);
    svc.place_volume = volume_from_gb(gen.place.sample(rng, image_gb));
    svc.refresh_volume = volume_from_gb(gen.refresh.sample(rng, image_gb));
    svc.offload_volume = volume_from_gb(gen.offload.sample(rng, image_gb));
    svc.refresh_interval =
        gen.lifetime_exponential
            ? std::max(1, static_cast<int>(std::llround(
                              rng.exponential(gen.lifetime_mean))))
            : gen.lifetime_fixed;
    services.push_back(svc);
  }
  validate_services(services);
  return services;
}

Topology build_topology(const TopologySpec& spec, const ServiceList& services,
                        const SweepOverride* sweep) {
  double ratio = spec.storage_ratio;
  bool use_ratio = spec.storage_kind == TopologySpec::Storage::Ratio;
  if (sweep && sweep->param == "storage_ratio") {
    use_ratio = true;
    ratio = sweep->value;
  }
  Volume uniform_storage = 0;
  if (use_ratio) {
    Volume total = 0;
    for (const auto& svc : services) total += svc.image_size;
    uniform_storage = std::max<Volume>(1, std::llround(ratio * double(total)));
  } else if (spec.storage_kind == TopologySpec::Storage::Uniform) {
    uniform_storage = volume_from_gb(spec.storage_gb);
  }

  if (spec.is_grid) {
    const int n = spec.rows * spec.cols;
    std::vector<Volume> storage(n, uniform_storage);
    if (!use_ratio && spec.storage_kind == TopologySpec::Storage::PerServer) {
      for (int j = 0; j < n; ++j) storage[j] = volume_from_gb(spec.storage_list[j]);
    }
    // grid_topology fixes uniform storage; rebuild with the requested one.
    Topology grid = grid_topology(spec.rows, spec.cols, spec.hop_coefficient, 1.0);
    std::vector<Gamma> gamma;
    gamma.reserve(std::size_t(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) gamma.push_back(grid.gamma(j, k));
    }
    return Topology(std::move(storage), std::move(gamma));
  }

  const int n = spec.n_servers;
  std::vector<Volume> storage(n, uniform_storage);
  if (!use_ratio && spec.storage_kind == TopologySpec::Storage::PerServer) {
    for (int j = 0; j < n; ++j) storage[j] = volume_from_gb(spec.storage_list[j]);
  }
  std::vector<Gamma> gamma;
  gamma.reserve(std::size_t(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k <= n; ++k) gamma.push_back(gamma_from_double(spec.gamma[j][k]));
  }
  return Topology(std::move(storage), std::move(gamma));
}

DeltaFactors load_delta_matrix(const std::filesystem::path& path, int s, int n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("delta matrix: cannot open " + path.string());
  std::vector<double> values(std::size_t(s) * n, 1.0);
  std::string line;
  int row = 0;
  while (std::getline(in, line) && row < s) {
    std::istringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',') && col < n) {
      values[std::size_t(col) * s + row] = std::stod(cell);
      ++col;
    }
    if (col != n) {
      throw ConfigError("delta matrix: row " + std::to_string(row + 1) + " has " +
                        std::to_string(col) + " columns, expected " + std::to_string(n));
    }
    ++row;
  }
  if (row != s) {
    throw ConfigError("delta matrix: expected " + std::to_string(s) + " rows");
  }
  return DeltaFactors::table(s, n, std::move(values));
}

}  // namespace

MaterializedRun materialize(const Scenario& scenario, std::uint64_t seed,
                            const SweepOverride* sweep) {
  // Services first (the storage ratio needs their total size).
  ServiceList services;
  if (scenario.explicit_services) {
    services = scenario.services;
  } else {
    Rng rng(derive_seed(seed, kServiceStream));
    services = generate_services(scenario.service_gen, rng);
  }

  Topology topo = build_topology(scenario.topology, services, sweep);

  const WorkloadSpec& w = scenario.workload;
  double zipf = w.zipf_shape;
  if (sweep && sweep->param == "zipf_shape") zipf = sweep->value;

  const std::uint64_t workload_seed = derive_seed(seed, kWorkloadStream);
  std::optional<RequestMatrix> requests;
  if (w.type == WorkloadSpec::Type::Synthetic) {
    SyntheticConfig cfg;
    cfg.n_services = static_cast<int>(services.size());
    cfg.n_servers = topo.n_servers();
    cfg.horizon = scenario.horizon;
    cfg.zipf_shape = zipf;
    cfg.rerank_prob = w.rerank_prob;
    cfg.users_per_server = w.users_per_server;
    cfg.requests_per_user_per_slot = w.requests_per_user_per_slot;
    cfg.noise_low = w.noise_low;
    cfg.noise_high = w.noise_high;
    cfg.seed = workload_seed;
    requests = generate_synthetic(cfg, services);
  } else if (w.type == WorkloadSpec::Type::Trace) {
    TraceConfig cfg;
    cfg.server_positions = w.server_positions;
    cfg.coverage_radius_m = w.coverage_radius_m;
    cfg.requests_per_taxi_per_slot = w.requests_per_taxi_per_slot;
    cfg.zipf_shape = zipf;
    cfg.rerank_prob = w.rerank_prob;
    cfg.noise_low = w.noise_low;
    cfg.noise_high = w.noise_high;
    cfg.max_slots = scenario.horizon;
    cfg.seed = workload_seed;
    if (w.bbox) {
      cfg.bbox_lat_lo = (*w.bbox)[0];
      cfg.bbox_lon_lo = (*w.bbox)[1];
      cfg.bbox_lat_hi = (*w.bbox)[2];
      cfg.bbox_lon_hi = (*w.bbox)[3];
    }
    if (static_cast<int>(w.server_positions.size()) != topo.n_servers()) {
      throw ConfigError("scenario: trace server_positions count must match topology");
    }
    std::ifstream in(scenario.dir / w.path);
    if (!in) {
      throw ConfigError("scenario: cannot open trace " +
                        (scenario.dir / w.path).string());
    }
    requests = ingest_trace(in, cfg, services);
  } else {
    const std::filesystem::path file = scenario.dir / w.path;
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      throw ConfigError("scenario: cannot open request matrix " + file.string());
    }
    requests = file.extension() == ".csv" ? RequestMatrix::read_csv(in)
                                          : RequestMatrix::read_binary(in);
    if (requests->n_services() != static_cast<int>(services.size()) ||
        requests->n_servers() != topo.n_servers()) {
      throw ConfigError("scenario: request matrix dimensions do not match");
    }
  }

  DvaConfig dva;
  dva.theta = scenario.theta;
  dva.horizon_epsilon = scenario.horizon_epsilon;
  dva.capacity_quantum_gb = scenario.capacity_quantum_gb;
  if (!scenario.delta_matrix_file.empty()) {
    dva.delta = load_delta_matrix(scenario.dir / scenario.delta_matrix_file,
                                  static_cast<int>(services.size()), topo.n_servers());
  } else {
    dva.delta = DeltaFactors::uniform(scenario.delta_scalar);
  }
  if (sweep) {
    if (sweep->param == "theta") dva.theta = sweep->value;
    if (sweep->param == "delta") dva.delta = DeltaFactors::uniform(sweep->value);
  }
  dva.validate();

  const int horizon = std::min(scenario.horizon, requests->horizon());
  return MaterializedRun{std::move(services), std::move(topo), std::move(*requests),
                         horizon, std::move(dva), scenario.guards};
}

}  // namespace trsp
