#include "l2sc/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "l2sc/baselines.hpp"
#include "l2sc/datagen.hpp"
#include "l2sc/graph.hpp"
#include "l2sc/model.hpp"

namespace l2sc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Discretization seed for one task. Depends only on the run seed and the
// task id, never on the stream position, so re-measuring an old task under a
// newer library reuses the same k-means randomness.
std::int64_t kmeans_seed(std::int64_t base, const std::string& task_id) {
  return static_cast<std::int64_t>(
      splitmix64(static_cast<std::uint64_t>(base) ^ fnv1a(task_id)));
}

struct LoadedTask {
  TaskData data;
  bool has_labels = false;
};

Labels maybe_labels(const ManifestTask& mt) {
  if (mt.labels_path.empty()) return {};
  return load_labels(mt.labels_path);
}

void fill_metrics(ResultRow& row, const Labels& pred, const Labels& truth) {
  if (truth.empty()) return;
  row.purity = purity(pred, truth);
  row.nmi = nmi(pred, truth);
  row.rand_index = rand_index(pred, truth);
}

// final_phase < 0 averages every labeled row; baselines emit exactly one row
// per task, so that is the per-task average. The lifelong run passes its last
// phase to average only the final re-measurement of each task.
void print_summary(const std::vector<ResultRow>& rows, int final_phase,
                   std::ostream& log) {
  double p = 0, n = 0, r = 0;
  int cnt = 0;
  for (const auto& row : rows) {
    if ((final_phase >= 0 && row.phase != final_phase) || !row.purity)
      continue;
    p += *row.purity;
    n += *row.nmi;
    r += *row.rand_index;
    ++cnt;
  }
  if (cnt == 0) {
    log << "summary: no labeled tasks to average\n";
    return;
  }
  char buf[160];
  if (final_phase >= 0) {
    std::snprintf(buf, sizeof(buf),
                  "summary (phase %d, %d tasks): purity %.4f  nmi %.4f  "
                  "rand_index %.4f\n",
                  final_phase, cnt, p / cnt, n / cnt, r / cnt);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "summary (%d tasks): purity %.4f  nmi %.4f  "
                  "rand_index %.4f\n",
                  cnt, p / cnt, n / cnt, r / cnt);
  }
  log << buf;
}

}  // namespace

std::vector<ResultRow> cmd_run(const RunOptions& opt, std::ostream& log) {
  Manifest man = load_manifest(opt.manifest_path);
  man.hp.validate();

  KnowledgeLibrary lib;
  bool have_lib = false;
  if (!opt.resume_path.empty()) {
    lib = load_library(opt.resume_path);
    have_lib = true;
    if (lib.k != man.k)
      throw InvalidInput("resume: snapshot k=" + std::to_string(lib.k) +
                         " but manifest k=" + std::to_string(man.k));
  }

  // Ground truth for every task we may report on, including resumed ones.
  std::unordered_map<std::string, Labels> truth;
  for (const auto& mt : man.tasks) {
    Labels lbl = maybe_labels(mt);
    if (!lbl.empty()) truth[mt.task_id] = std::move(lbl);
  }

  KMeansConfig kc;
  kc.k = man.k;

  std::vector<ResultRow> rows;
  for (const auto& mt : man.tasks) {
    if (have_lib && lib.find_task(mt.task_id)) continue;  // already learned

    TaskData data;
    data.task_id = mt.task_id;
    data.x = load_matrix(mt.matrix_path);
    if (!have_lib) {
      lib = init_library(static_cast<int>(data.x.rows()), man.k);
      have_lib = true;
    }
    if (data.x.rows() != lib.d)
      throw InvalidInput(mt.matrix_path + ": task has " +
                         std::to_string(data.x.rows()) +
                         " features, stream dimensionality is " +
                         std::to_string(lib.d));
    auto it = truth.find(mt.task_id);
    if (it != truth.end() &&
        static_cast<Eigen::Index>(it->second.size()) != data.x.cols())
      throw InvalidInput(mt.labels_path + ": label count != sample count");

    Clock::time_point t0 = Clock::now();
    TaskGraph g = build_task_graph(data, man.knn, man.sigma);
    int isolated = count_isolated(g.w);
    if (isolated > 0)
      log << "warning: task " << mt.task_id << ": " << isolated
          << " isolated sample(s); their kernel rows are zero\n";

    FitTrace trace = fit_next_task(lib, mt.task_id, g, man.hp);
    double fit_ms = ms_since(t0);

    // One row per task seen so far, re-discretized under the fresh library.
    const int phase = lib.tasks_seen;
    for (const auto& rec : lib.tasks) {
      Clock::time_point m0 = Clock::now();
      ResultRow row;
      row.task_id = rec.task_id;
      row.phase = phase;
      row.objective = task_objective(lib, rec);
      row.iters = trace.iters;

      auto tit = truth.find(rec.task_id);
      if (tit != truth.end()) {
        kc.seed = kmeans_seed(man.hp.seed, rec.task_id);
        Labels pred = kmeans(soft_assignments(lib, rec.e), kc);
        fill_metrics(row, pred, tit->second);
      }

      row.wall_ms = opt.no_timing
                        ? 0.0
                        : (rec.task_id == mt.task_id ? fit_ms : ms_since(m0));
      rows.push_back(std::move(row));
    }
  }

  if (!have_lib)
    throw InvalidInput(opt.manifest_path + ": nothing to run");
  if (!opt.save_library_path.empty()) save_library(lib, opt.save_library_path);
  write_results_csv(rows, opt.out_path);
  if (opt.summary) print_summary(rows, lib.tasks_seen, log);
  return rows;
}

std::vector<ResultRow> cmd_baseline(const BaselineOptions& opt,
                                    std::ostream& log) {
  if (opt.which != "stsc" && opt.which != "usc")
    throw InvalidInput("baseline: --which must be stsc or usc");
  Manifest man = load_manifest(opt.manifest_path);
  man.hp.validate();

  KMeansConfig kc;
  kc.k = man.k;

  std::vector<ResultRow> rows;
  if (opt.which == "stsc") {
    int phase = 0;
    for (const auto& mt : man.tasks) {
      TaskData data;
      data.task_id = mt.task_id;
      data.x = load_matrix(mt.matrix_path);
      Labels lbl = maybe_labels(mt);

      Clock::time_point t0 = Clock::now();
      TaskGraph g = build_task_graph(data, man.knn, man.sigma);
      int isolated = count_isolated(g.w);
      if (isolated > 0)
        log << "warning: task " << mt.task_id << ": " << isolated
            << " isolated sample(s); their kernel rows are zero\n";
      kc.seed = kmeans_seed(man.hp.seed, mt.task_id);
      SpectralResult res = single_task_sc(g, man.k, kc);

      ResultRow row;
      row.task_id = mt.task_id;
      row.phase = ++phase;
      row.objective = res.objective;
      row.iters = 0;
      row.wall_ms = opt.no_timing ? 0.0 : ms_since(t0);
      fill_metrics(row, res.labels, lbl);
      rows.push_back(std::move(row));
    }
  } else {
    std::vector<TaskData> tasks;
    std::vector<Labels> lbls;
    for (const auto& mt : man.tasks) {
      TaskData data;
      data.task_id = mt.task_id;
      data.x = load_matrix(mt.matrix_path);
      tasks.push_back(std::move(data));
      lbls.push_back(maybe_labels(mt));
    }
    Clock::time_point t0 = Clock::now();
    kc.seed = kmeans_seed(man.hp.seed, "__pooled__");
    std::vector<SpectralResult> res =
        pooled_sc(tasks, man.k, man.knn, kc, man.sigma);
    double total_ms = ms_since(t0);

    const int phase = static_cast<int>(tasks.size());
    for (size_t t = 0; t < tasks.size(); ++t) {
      ResultRow row;
      row.task_id = tasks[t].task_id;
      row.phase = phase;
      row.objective = res[t].objective;
      row.iters = 0;
      row.wall_ms = opt.no_timing ? 0.0 : total_ms;
      fill_metrics(row, res[t].labels, lbls[t]);
      rows.push_back(std::move(row));
    }
  }

  write_results_csv(rows, opt.out_path);
  if (opt.summary) print_summary(rows, -1, log);
  return rows;
}

void cmd_synth(const SynthOptions& opt, std::ostream& log) {
  if (opt.tasks < 1) throw InvalidInput("synth: --tasks must be >= 1");
  if (opt.out_dir.empty()) throw InvalidInput("synth: --out-dir is required");

  StreamSpec spec;
  spec.num_tasks = opt.tasks;
  spec.d = opt.d;
  spec.k_true.assign(opt.tasks, opt.k);
  spec.samples_per_cluster = opt.spc;
  spec.center_drift = opt.drift;
  spec.noise_sigma = opt.noise;
  spec.seed = opt.seed;
  std::vector<TaskData> stream = generate_stream(spec);

  std::filesystem::path dir(opt.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + opt.out_dir);

  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : stream) {
    std::string mfile = t.task_id + ".csv";
    std::string lfile = t.task_id + ".labels";
    save_matrix_csv(t.x, (dir / mfile).string());
    save_labels(t.labels, (dir / lfile).string());
    tasks.push_back({{"task_id", t.task_id},
                     {"matrix_path", mfile},
                     {"labels_path", lfile}});
  }

  nlohmann::json man;
  man["k"] = opt.k;
  man["knn"] = opt.knn;
  man["sigma"] = nullptr;
  man["lambda"] = opt.lambda;
  man["mu"] = opt.mu;
  man["eta0"] = 0.1;
  man["tol"] = 1e-5;
  man["max_outer"] = 100;
  man["max_inner"] = 50;
  man["seed"] = opt.seed;
  man["tasks"] = std::move(tasks);

  std::string mpath = (dir / "manifest.json").string();
  std::ofstream out(mpath, std::ios::binary);
  if (!out) throw IoError("cannot write " + mpath);
  out << man.dump(1) << "\n";
  if (!out) throw IoError("write failed on " + mpath);

  log << "wrote " << stream.size() << " task(s) and manifest to "
      << opt.out_dir << "\n";
}

}  // namespace l2sc
