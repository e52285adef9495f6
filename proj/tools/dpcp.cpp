// Command line front end: instance generation, training, solving, and
// benchmarking over the same files the library reads and writes. All file
// output is deterministic for a fixed command line; only the wall_time_s
// and load_time_s fields of result records vary between runs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "dpcp/cp/cache.hpp"
#include "dpcp/cp/heuristics.hpp"
#include "dpcp/cp/model.hpp"
#include "dpcp/cp/search.hpp"
#include "dpcp/nn/checkpoint.hpp"
#include "dpcp/train/decode.hpp"
#include "dpcp/train/dqn.hpp"
#include "dpcp/train/ppo.hpp"
#include "dpcp/train/tasks.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace dpcp;

namespace {

double now_seconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ordered_json::parse(ss.str());
}

// ---------------------------------------------------------------------------
// Methods

enum class Method {
  bab_dqn,
  ilds_dqn,
  rbs_ppo,
  cp_nearest,
  cp_lex,
  dqn_greedy,
  ppo_beam,
  oracle,
};

const std::vector<std::pair<std::string, Method>>& method_names() {
  static const std::vector<std::pair<std::string, Method>> names = {
      {"bab-dqn", Method::bab_dqn},     {"ilds-dqn", Method::ilds_dqn},
      {"rbs-ppo", Method::rbs_ppo},     {"cp-nearest", Method::cp_nearest},
      {"cp-lex", Method::cp_lex},       {"dqn-greedy", Method::dqn_greedy},
      {"ppo-beam", Method::ppo_beam},   {"oracle", Method::oracle},
  };
  return names;
}

Method parse_method(const std::string& name) {
  for (const auto& [n, m] : method_names())
    if (n == name) return m;
  throw std::runtime_error("unknown method: " + name);
}

std::string method_name(Method m) {
  for (const auto& [n, mm] : method_names())
    if (mm == m) return n;
  return "?";
}

bool needs_dqn_model(Method m) {
  return m == Method::bab_dqn || m == Method::ilds_dqn ||
         m == Method::dqn_greedy;
}

bool needs_ppo_model(Method m) {
  return m == Method::rbs_ppo || m == Method::ppo_beam;
}

struct MethodOptions {
  double deadline_s = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = -1;
  bool use_cache = true;
  double tau = -1.0;           // <0: problem default
  std::int64_t luby_scale = -1;  // <0: problem default
  std::uint64_t rbs_seed = 1;
  int beam_width = 64;
};

struct Outcome {
  bool feasible = false;
  double objective = 0.0;
  std::vector<int> assignment;
  bool proven = false;
  bool timed_out = false;  // stopped at a limit before exhausting the tree
  std::int64_t nodes = 0;
  std::int64_t failures = 0;
  std::int64_t cache_hits = 0;
  std::int64_t cache_misses = 0;
  double wall_s = 0.0;
  std::string error;  // nonempty: the job failed outright
};

// RBS defaults differ per problem: a hot, long-leash schedule for tour
// building and a near-greedy one for the selection problem.
template <typename Task>
void fill_rbs_defaults(MethodOptions& opt) {
  constexpr bool tour = std::is_same_v<Task, train::TsptwTask>;
  if (opt.tau < 0.0) opt.tau = tour ? 20.0 : 1.0;
  if (opt.luby_scale < 0) opt.luby_scale = tour ? 128 : 1;
}

Outcome from_search(const cp::SearchResult& res) {
  Outcome out;
  out.feasible = res.feasible;
  out.objective = res.objective;
  out.assignment = res.assignment;
  out.proven = res.proven_optimal;
  out.timed_out = !res.stats.completed;
  out.nodes = res.stats.nodes;
  out.failures = res.stats.failures;
  out.wall_s = res.stats.wall_s;
  return out;
}

template <typename Task>
Outcome run_method(const typename Task::Instance& inst, Method m,
                   MethodOptions opt, const nn::Network* dqn_net,
                   const nn::Network* ppo_net) {
  typename Task::Problem p = Task::problem(inst);
  cp::CpModel<typename Task::Problem> model(p);
  cp::SearchLimits limits{opt.deadline_s, opt.node_limit};
  fill_rbs_defaults<Task>(opt);
  auto start = std::chrono::steady_clock::now();

  switch (m) {
    case Method::cp_lex:
      return from_search(cp::search_bab(p, model, cp::LexScorer{}, limits));
    case Method::cp_nearest:
      if constexpr (std::is_same_v<Task, train::TsptwTask>) {
        return from_search(
            cp::search_ilds(p, model, cp::NearestScorer{&inst}, limits));
      } else {
        throw std::runtime_error("cp-nearest only applies to tsptw");
      }
    case Method::bab_dqn:
    case Method::ilds_dqn: {
      cp::PredictionCache cache;
      cp::NetScorer<Task> scorer{&p, &inst, dqn_net,
                                 opt.use_cache ? &cache : nullptr, nullptr};
      cp::SearchResult res =
          m == Method::bab_dqn
              ? cp::search_bab(p, model, scorer, limits)
              : cp::search_ilds(p, model, scorer, limits);
      Outcome out = from_search(res);
      out.cache_hits = cache.hits();
      out.cache_misses = cache.misses();
      return out;
    }
    case Method::rbs_ppo: {
      cp::PredictionCache cache;
      cp::NetScorer<Task> scorer{&p, &inst, ppo_net,
                                 opt.use_cache ? &cache : nullptr, nullptr};
      cp::RestartOptions ropt;
      ropt.scale = opt.luby_scale;
      ropt.temperature = opt.tau;
      ropt.seed = opt.rbs_seed;
      Outcome out =
          from_search(cp::search_rbs(p, model, scorer, ropt, limits));
      out.cache_hits = cache.hits();
      out.cache_misses = cache.misses();
      return out;
    }
    case Method::dqn_greedy: {
      rl::Rollout r = train::greedy_decode(
          p,
          [&](const typename Task::Problem::State& s, int stage,
              std::span<const int> feas) {
            std::vector<double> q =
                dqn_net->q_values(Task::net_input(inst, s, stage));
            std::vector<double> sc(feas.size());
            for (int i = 0; i < static_cast<int>(feas.size()); ++i)
              sc[i] = q[feas[i]];
            return sc;
          },
          {1.0, false});
      Outcome out;
      out.feasible = r.complete;
      out.objective = r.raw_return;
      for (const auto& s : r.steps) out.assignment.push_back(s.value);
      if (!r.complete) out.assignment.clear();
      out.wall_s = now_seconds(start);
      return out;
    }
    case Method::ppo_beam: {
      train::BeamResult res = train::beam_decode(
          p,
          [&](const typename Task::Problem::State& s, int stage,
              std::span<const int> feas) {
            std::vector<bool> mask = rl::action_mask(p, s, stage);
            std::vector<double> probs =
                ppo_net->policy(Task::net_input(inst, s, stage), mask, 1.0);
            std::vector<double> lp(feas.size());
            for (int i = 0; i < static_cast<int>(feas.size()); ++i)
              lp[i] = std::log(probs[feas[i]]);
            return lp;
          },
          opt.beam_width);
      Outcome out;
      out.feasible = res.feasible;
      out.objective = res.objective;
      out.assignment = res.assignment;
      out.wall_s = now_seconds(start);
      return out;
    }
    case Method::oracle: {
      BellmanResult res = bellman_solve(p);
      Outcome out;
      out.feasible = res.feasible;
      out.objective = res.value;
      out.assignment = res.assignment;
      out.proven = true;
      out.nodes = res.expanded;
      out.wall_s = now_seconds(start);
      return out;
    }
  }
  throw std::runtime_error("unhandled method");
}

// ---------------------------------------------------------------------------
// Instances and models

struct LoadedInstance {
  std::string path;
  std::string problem;
  int n = 0;
  std::variant<tsptw::Instance, port::Instance> inst;
};

LoadedInstance load_instance(const std::string& path) {
  ordered_json j = read_json_file(path);
  LoadedInstance li;
  li.path = path;
  li.problem = j.at("problem").get<std::string>();
  if (li.problem == "tsptw") {
    tsptw::Instance inst = tsptw::Instance::from_json(j);
    li.n = inst.n;
    li.inst = std::move(inst);
  } else if (li.problem == "port") {
    port::Instance inst = port::Instance::from_json(j);
    li.n = inst.n;
    li.inst = std::move(inst);
  } else {
    throw std::runtime_error(path + ": unknown problem tag " + li.problem);
  }
  return li;
}

struct LoadedModel {
  nn::Checkpoint ckpt;
  nn::Network net;
};

LoadedModel load_model(const std::string& path, const std::string& kind,
                       const std::string& problem) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  if (ckpt.kind != kind)
    throw std::runtime_error(path + ": expected a " + kind +
                             " checkpoint, found " + ckpt.kind);
  if (ckpt.problem != problem)
    throw std::runtime_error(path + ": model trained for " + ckpt.problem +
                             ", instance is " + problem);
  nn::Network net(ckpt.config, ckpt.seed);
  nn::weights_from_json(net.weights(), ckpt.weights);
  return {std::move(ckpt), std::move(net)};
}

ordered_json make_record(const LoadedInstance& li, Method m,
                         const MethodOptions& opt, const Outcome& out,
                         double load_s) {
  ordered_json rec;
  rec["instance"] = li.path;
  rec["problem"] = li.problem;
  rec["n"] = li.n;
  rec["method"] = method_name(m);
  if (out.feasible)
    rec["objective"] = out.objective;
  else
    rec["objective"] = nullptr;
  rec["feasible"] = out.feasible;
  rec["proven_optimal"] = out.proven;
  rec["nodes"] = out.nodes;
  rec["failures"] = out.failures;
  rec["cache_hits"] = out.cache_hits;
  rec["cache_misses"] = out.cache_misses;
  rec["wall_time_s"] = out.wall_s;
  rec["load_time_s"] = load_s;
  rec["assignment"] = out.assignment;
  rec["seed"] = opt.rbs_seed;
  if (!out.error.empty()) rec["error"] = out.error;
  ordered_json params;
  if (std::isfinite(opt.deadline_s))
    params["deadline_s"] = opt.deadline_s;
  else
    params["deadline_s"] = nullptr;
  params["node_limit"] = opt.node_limit;
  if (m == Method::bab_dqn || m == Method::ilds_dqn || m == Method::rbs_ppo)
    params["cache"] = opt.use_cache;
  if (m == Method::rbs_ppo) {
    params["luby_scale"] = opt.luby_scale;
    params["temperature"] = opt.tau;
  }
  if (m == Method::ppo_beam) params["beam_width"] = opt.beam_width;
  rec["params"] = params;
  return rec;
}

Outcome run_on(const LoadedInstance& li, Method m, MethodOptions opt,
               const nn::Network* dqn_net, const nn::Network* ppo_net) {
  if (std::holds_alternative<tsptw::Instance>(li.inst))
    return run_method<train::TsptwTask>(std::get<tsptw::Instance>(li.inst), m,
                                        opt, dqn_net, ppo_net);
  return run_method<train::PortTask>(std::get<port::Instance>(li.inst), m,
                                     opt, dqn_net, ppo_net);
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string problem;
  int n = 20;
  std::uint64_t seed = 1;
  int count = 1;
  std::string out_dir = ".";
  int window_width = 100;
  int gap = 10;
  std::string mode = "continuous";
};

int run_generate(const GenerateArgs& a) {
  fs::create_directories(a.out_dir);
  for (int i = 0; i < a.count; ++i) {
    std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    ordered_json j;
    if (a.problem == "tsptw") {
      j = tsptw::generate(a.n, seed, a.window_width, a.gap).to_json();
    } else if (a.problem == "port") {
      j = port::generate(a.n, seed, port::mode_from_name(a.mode)).to_json();
    } else {
      throw std::runtime_error("unknown problem: " + a.problem);
    }
    std::string path = a.out_dir + "/" + a.problem + "_n" +
                       std::to_string(a.n) + "_s" + std::to_string(seed) +
                       ".json";
    write_json_file(path, j);
    std::cout << path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string problem;
  std::string method = "dqn";
  int n = 20;
  std::uint64_t seed = 1;
  std::int64_t episodes = 1000;
  std::string out;
  std::string state;
  std::string resume;
  std::int64_t checkpoint_every = 0;  // state snapshots, in episodes
  std::string mode = "continuous";
  int window_width = 100;
  int gap = 10;
  // shared hyperparameters; negative means "keep the default"
  double lr = -1.0;
  int batch = -1;
  double rho = -1.0;
  int validation_every = 100;
  int validation_instances = 100;
  // dqn
  double temperature = -1.0;
  int replay = -1;
  int updates_per_episode = -1;
  // ppo
  int horizon = -1;
  int epochs = -1;
  double clip = -1.0;
  double entropy = -1.0;
  double value_coef = -1.0;
  bool no_advantage_norm = false;
};

void print_validation(const std::vector<train::ValidationPoint>& points,
                      std::int64_t best) {
  for (const auto& v : points)
    std::cout << "episode " << v.episode << "  avg_return "
              << v.average_return << "  complete " << v.complete << "\n";
  if (best >= 0) std::cout << "best validation at episode " << best << "\n";
}

template <typename Trainer>
int drive_training(Trainer& trainer, const TrainArgs& a,
                   const std::function<void()>& step) {
  std::int64_t last_saved = trainer.episodes_done();
  while (trainer.episodes_done() < a.episodes) {
    step();
    if (!a.state.empty() && a.checkpoint_every > 0 &&
        trainer.episodes_done() - last_saved >= a.checkpoint_every) {
      nn::save_checkpoint(a.state, trainer.checkpoint());
      last_saved = trainer.episodes_done();
    }
  }
  if (!a.state.empty()) nn::save_checkpoint(a.state, trainer.checkpoint());
  if (!a.out.empty()) nn::save_checkpoint(a.out, trainer.best_checkpoint());
  print_validation(trainer.validation(), trainer.best_episode());
  std::cout << "episodes " << trainer.episodes_done() << "\n";
  return 0;
}

template <typename Task>
int train_dqn(Task task, const TrainArgs& a) {
  train::DqnConfig cfg;
  cfg.episodes = a.episodes;
  cfg.seed = a.seed;
  cfg.shaping = Task::default_shaping();
  cfg.validation_every = a.validation_every;
  cfg.validation_instances = a.validation_instances;
  if (a.lr > 0) cfg.lr = a.lr;
  if (a.batch > 0) cfg.batch_size = a.batch;
  if (a.rho > 0) cfg.shaping.rho = a.rho;
  if (a.temperature > 0) cfg.temperature = a.temperature;
  if (a.replay > 0) cfg.replay_capacity = a.replay;
  if (a.updates_per_episode > 0)
    cfg.updates_per_episode = a.updates_per_episode;
  std::optional<train::DqnTrainer<Task>> trainer;
  if (a.resume.empty())
    trainer.emplace(task, cfg);
  else
    trainer.emplace(task, cfg, nn::load_checkpoint(a.resume));
  return drive_training(*trainer, a, [&] { trainer->train_episode(); });
}

template <typename Task>
int train_ppo(Task task, const TrainArgs& a) {
  constexpr bool tour = std::is_same_v<Task, train::TsptwTask>;
  train::PpoConfig cfg;
  cfg.episodes = a.episodes;
  cfg.seed = a.seed;
  cfg.shaping = Task::default_shaping();
  cfg.epochs = tour ? 3 : 4;
  cfg.validation_every = a.validation_every;
  cfg.validation_instances = a.validation_instances;
  if (a.lr > 0) cfg.lr = a.lr;
  if (a.batch > 0) cfg.batch_size = a.batch;
  if (a.rho > 0) cfg.shaping.rho = a.rho;
  if (a.horizon > 0) cfg.horizon = a.horizon;
  if (a.epochs > 0) cfg.epochs = a.epochs;
  if (a.clip > 0) cfg.clip = a.clip;
  if (a.entropy >= 0) cfg.entropy_coef = a.entropy;
  if (a.value_coef >= 0) cfg.value_coef = a.value_coef;
  cfg.normalize_advantage = !a.no_advantage_norm;
  std::optional<train::PpoTrainer<Task>> trainer;
  if (a.resume.empty())
    trainer.emplace(task, cfg);
  else
    trainer.emplace(task, cfg, nn::load_checkpoint(a.resume));
  return drive_training(*trainer, a, [&] { trainer->iterate(); });
}

int run_train(const TrainArgs& a) {
  if (a.out.empty() && a.state.empty())
    throw std::runtime_error("train: neither --out nor --state given");
  if (a.problem == "tsptw") {
    train::TsptwTask task{a.n, a.window_width, a.gap};
    return a.method == "dqn" ? train_dqn(task, a) : train_ppo(task, a);
  }
  if (a.problem == "port") {
    train::PortTask task{a.n, port::mode_from_name(a.mode)};
    return a.method == "dqn" ? train_dqn(task, a) : train_ppo(task, a);
  }
  throw std::runtime_error("unknown problem: " + a.problem);
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string instance;
  std::string method;
  std::string dqn_model;
  std::string ppo_model;
  std::string out;
  MethodOptions opt;
  bool no_cache = false;
};

int run_solve(const SolveArgs& a) {
  Method m = parse_method(a.method);
  MethodOptions opt = a.opt;
  opt.use_cache = !a.no_cache;
  auto t0 = std::chrono::steady_clock::now();
  LoadedInstance li = load_instance(a.instance);
  std::optional<LoadedModel> dqn, ppo;
  if (needs_dqn_model(m)) {
    if (a.dqn_model.empty())
      throw std::runtime_error(a.method + " requires --dqn-model");
    dqn = load_model(a.dqn_model, "dqn", li.problem);
  }
  if (needs_ppo_model(m)) {
    if (a.ppo_model.empty())
      throw std::runtime_error(a.method + " requires --ppo-model");
    ppo = load_model(a.ppo_model, "ppo", li.problem);
  }
  double load_s = now_seconds(t0);
  Outcome out = run_on(li, m, opt, dqn ? &dqn->net : nullptr,
                       ppo ? &ppo->net : nullptr);
  ordered_json rec = make_record(li, m, opt, out, load_s);
  if (!a.out.empty())
    write_json_file(a.out, rec);
  else
    std::cout << rec.dump(2) << "\n";
  if (!a.out.empty()) {
    std::cout << method_name(m) << " " << (out.feasible ? "feasible" : "no solution")
              << (out.proven ? " (proven)" : "") << " nodes " << out.nodes
              << " wall " << out.wall_s << "s\n";
  }
  return out.feasible ? 0 : 2;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::vector<std::string> instances;
  std::string dir;
  std::vector<std::string> methods;
  std::string dqn_model;
  std::string ppo_model;
  std::string out;
  int jobs = 0;
  MethodOptions opt;
  bool no_cache = false;
};

std::string cell_text(const Outcome& out) {
  if (!out.error.empty()) return "err";
  if (!out.feasible) return out.timed_out ? "t.o." : "infeas";
  std::ostringstream ss;
  ss << out.objective;
  if (out.proven) ss << "*";
  return ss.str();
}

int run_bench(const BenchArgs& a) {
  std::vector<std::string> paths = a.instances;
  if (!a.dir.empty()) {
    for (const auto& e : fs::directory_iterator(a.dir))
      if (e.path().extension() == ".json") paths.push_back(e.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("bench: no instances");
  if (a.methods.empty()) throw std::runtime_error("bench: no methods");
  std::vector<Method> methods;
  for (const auto& name : a.methods) methods.push_back(parse_method(name));

  MethodOptions opt = a.opt;
  opt.use_cache = !a.no_cache;

  // Models load once; forward passes are read-only so workers share them.
  bool want_dqn = false, want_ppo = false;
  for (Method m : methods) {
    want_dqn |= needs_dqn_model(m);
    want_ppo |= needs_ppo_model(m);
  }
  std::vector<LoadedInstance> instances;
  for (const auto& p : paths) instances.push_back(load_instance(p));
  std::optional<LoadedModel> dqn, ppo;
  if (want_dqn) {
    if (a.dqn_model.empty()) throw std::runtime_error("need --dqn-model");
    dqn = load_model(a.dqn_model, "dqn", instances.front().problem);
  }
  if (want_ppo) {
    if (a.ppo_model.empty()) throw std::runtime_error("need --ppo-model");
    ppo = load_model(a.ppo_model, "ppo", instances.front().problem);
  }

  // Jobs fan out to workers; results fold back in job order so the report
  // never depends on scheduling.
  struct Job {
    int instance = 0;
    Method method{};
  };
  std::vector<Job> grid;
  for (int i = 0; i < static_cast<int>(instances.size()); ++i)
    for (Method m : methods) grid.push_back({i, m});
  std::vector<Outcome> results(grid.size());
  std::atomic<std::size_t> next{0};
  int workers = a.jobs > 0
                    ? a.jobs
                    : static_cast<int>(std::min<std::size_t>(
                          grid.size(),
                          std::max(1u, std::thread::hardware_concurrency())));
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= grid.size()) return;
      const Job& job = grid[k];
      try {
        results[k] =
            run_on(instances[job.instance], job.method, opt,
                   dqn ? &dqn->net : nullptr, ppo ? &ppo->net : nullptr);
      } catch (const std::exception& e) {
        results[k].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Text table: one row per instance, one column per method.
  std::size_t name_w = 8;
  for (const auto& li : instances)
    name_w = std::max(name_w, fs::path(li.path).filename().string().size());
  std::cout << std::string(name_w, ' ');
  for (Method m : methods) std::cout << "  " << method_name(m);
  std::cout << "\n";
  for (int i = 0; i < static_cast<int>(instances.size()); ++i) {
    std::string name = fs::path(instances[i].path).filename().string();
    std::cout << name << std::string(name_w - name.size(), ' ');
    for (std::size_t j = 0; j < methods.size(); ++j) {
      std::string cell = cell_text(results[i * methods.size() + j]);
      std::size_t w = std::max(method_name(methods[j]).size(), cell.size());
      std::cout << "  " << std::string(w - cell.size(), ' ') << cell;
    }
    std::cout << "\n";
  }
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!results[k].error.empty())
      std::cerr << instances[grid[k].instance].path << " "
                << method_name(grid[k].method) << ": " << results[k].error
                << "\n";

  ordered_json report;
  report["jobs"] = ordered_json::array();
  for (std::size_t k = 0; k < grid.size(); ++k)
    report["jobs"].push_back(make_record(instances[grid[k].instance],
                                         grid[k].method, opt, results[k],
                                         0.0));
  report["summary"] = ordered_json::array();
  for (std::size_t j = 0; j < methods.size(); ++j) {
    int feasible = 0, proven = 0, timeouts = 0, errors = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const Outcome& out = results[i * methods.size() + j];
      feasible += out.feasible;
      proven += out.proven;
      timeouts += !out.feasible && out.timed_out;
      errors += !out.error.empty();
    }
    ordered_json s;
    s["method"] = method_name(methods[j]);
    s["runs"] = instances.size();
    s["feasible"] = feasible;
    s["proven"] = proven;
    s["timeouts"] = timeouts;
    s["errors"] = errors;
    report["summary"].push_back(s);
  }
  if (!a.out.empty()) write_json_file(a.out, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic-programming solver with learned branching"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "write instance files");
  g->add_option("--problem", gen.problem, "tsptw | port")->required();
  g->add_option("--n", gen.n, "instance size");
  g->add_option("--seed", gen.seed, "first seed");
  g->add_option("--count", gen.count, "number of instances");
  g->add_option("--out-dir", gen.out_dir, "output directory");
  g->add_option("--window-width", gen.window_width, "tsptw: max window width");
  g->add_option("--gap", gen.gap, "tsptw: max slack before window opens");
  g->add_option("--mode", gen.mode, "port: continuous | discrete");

  TrainArgs tr;
  CLI::App* t = app.add_subcommand("train", "train a model");
  t->add_option("--problem", tr.problem, "tsptw | port")->required();
  t->add_option("--method", tr.method, "dqn | ppo")->required();
  t->add_option("--n", tr.n, "training instance size");
  t->add_option("--seed", tr.seed, "run seed");
  t->add_option("--episodes", tr.episodes, "total training episodes");
  t->add_option("--out", tr.out, "best-validation model checkpoint");
  t->add_option("--state", tr.state, "full run state checkpoint");
  t->add_option("--resume", tr.resume, "run state to continue from");
  t->add_option("--checkpoint-every", tr.checkpoint_every,
                "episodes between state snapshots");
  t->add_option("--mode", tr.mode, "port: continuous | discrete");
  t->add_option("--window-width", tr.window_width, "tsptw generator");
  t->add_option("--gap", tr.gap, "tsptw generator");
  t->add_option("--lr", tr.lr, "learning rate");
  t->add_option("--batch", tr.batch, "minibatch size");
  t->add_option("--rho", tr.rho, "reward scale");
  t->add_option("--validation-every", tr.validation_every,
                "episodes between validations (0 = off)");
  t->add_option("--validation-instances", tr.validation_instances,
                "held-out instance count");
  t->add_option("--temperature", tr.temperature, "dqn exploration softmax");
  t->add_option("--replay", tr.replay, "dqn replay capacity");
  t->add_option("--updates-per-episode", tr.updates_per_episode,
                "dqn gradient steps per episode");
  t->add_option("--horizon", tr.horizon, "ppo timesteps per update");
  t->add_option("--epochs", tr.epochs, "ppo epochs per update");
  t->add_option("--clip", tr.clip, "ppo surrogate clip");
  t->add_option("--entropy", tr.entropy, "ppo entropy bonus");
  t->add_option("--value-coef", tr.value_coef, "ppo value loss weight");
  t->add_flag("--no-advantage-norm", tr.no_advantage_norm,
              "skip advantage normalization");

  SolveArgs so;
  CLI::App* s = app.add_subcommand("solve", "solve one instance");
  s->add_option("--instance", so.instance, "instance file")->required();
  s->add_option("--method", so.method, "solution method")->required();
  s->add_option("--dqn-model", so.dqn_model, "dqn checkpoint");
  s->add_option("--ppo-model", so.ppo_model, "ppo checkpoint");
  s->add_option("--out", so.out, "result record file");
  s->add_option("--deadline", so.opt.deadline_s, "search budget, seconds");
  s->add_option("--node-limit", so.opt.node_limit, "search node cap");
  s->add_flag("--no-cache", so.no_cache, "disable the prediction cache");
  s->add_option("--tau", so.opt.tau, "rbs sampling temperature");
  s->add_option("--luby-scale", so.opt.luby_scale, "rbs restart scale");
  s->add_option("--rbs-seed", so.opt.rbs_seed, "rbs restart seed");
  s->add_option("--beam-width", so.opt.beam_width, "ppo-beam width");

  BenchArgs be;
  CLI::App* b = app.add_subcommand("bench", "run a method grid");
  b->add_option("--instance", be.instances, "instance file (repeatable)");
  b->add_option("--dir", be.dir, "directory of instance files");
  b->add_option("--method", be.methods, "method (repeatable)")->required();
  b->add_option("--dqn-model", be.dqn_model, "dqn checkpoint");
  b->add_option("--ppo-model", be.ppo_model, "ppo checkpoint");
  b->add_option("--out", be.out, "json report file");
  b->add_option("--jobs", be.jobs, "worker threads (default: cores)");
  b->add_option("--deadline", be.opt.deadline_s, "per-run budget, seconds");
  b->add_option("--node-limit", be.opt.node_limit, "per-run node cap");
  b->add_flag("--no-cache", be.no_cache, "disable the prediction cache");
  b->add_option("--tau", be.opt.tau, "rbs sampling temperature");
  b->add_option("--luby-scale", be.opt.luby_scale, "rbs restart scale");
  b->add_option("--rbs-seed", be.opt.rbs_seed, "rbs restart seed");
  b->add_option("--beam-width", be.opt.beam_width, "ppo-beam width");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen);
    if (*t) return run_train(tr);
    if (*s) return run_solve(so);
    if (*b) return run_bench(be);
  } catch (const ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const InvalidTransition& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
