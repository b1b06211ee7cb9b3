// wavefoa command line: simulate scanpaths, evaluate against human
// fixations, verify the solvers against their oracles, benchmark the
// steppers. Exit codes: 0 ok, 1 input/pipeline error, 2 verification
// failure.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavefoa/dataset_io.hpp"
#include "wavefoa/metrics.hpp"
#include "wavefoa/oracles.hpp"
#include "wavefoa/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavefoa;

namespace {

struct CommonFlags {
    std::string model;
    std::string config_file;
    bool seed_set = false;
    std::uint64_t seed = 0;
    bool duration_set = false;
    double duration = 0.0;
    bool n_set = false;
    int n = 0;
    std::string scheme;
    std::string out_dir;
    bool snapshots_set = false;
    int snapshots = 0;
    bool threads_set = false;
    int threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--model", f.model, "Model preset: H, DW or custom");
    cmd->add_option("--config", f.config_file, "JSON config file (flat keys)");
    cmd->add_option("--seed", f.seed, "Base random seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--duration", f.duration, "Simulated exposure, seconds")
        ->each([&](const std::string&) { f.duration_set = true; });
    cmd->add_option("--n", f.n, "Number of scanpaths per stimulus")
        ->each([&](const std::string&) { f.n_set = true; });
    cmd->add_option("--scheme", f.scheme, "Time stepping: explicit or implicit");
    cmd->add_option("--out", f.out_dir, "Output directory");
    cmd->add_option("--snapshots", f.snapshots, "Dump potential PGMs every N steps")
        ->each([&](const std::string&) { f.snapshots_set = true; });
    cmd->add_option("--threads", f.threads, "Worker threads")
        ->each([&](const std::string&) { f.threads_set = true; });
}

RunConfig resolve_config(const CommonFlags& f) {
    RunConfig cfg; // defaults carry the damped-wave preset
    if (!f.config_file.empty()) cfg.load_file(f.config_file);
    if (!f.model.empty()) cfg.apply_model_preset(f.model);
    if (f.seed_set) cfg.seed = f.seed;
    if (f.duration_set) cfg.duration = f.duration;
    if (f.n_set) cfg.n_scanpaths = f.n;
    if (!f.scheme.empty()) cfg.scheme = f.scheme;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.snapshots_set) cfg.snapshot_stride = f.snapshots;
    if (f.threads_set) cfg.threads = f.threads;
    cfg.validate();
    return cfg;
}

// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to caller-owned disjoint slots.
void parallel_for_index(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string zero_pad(long v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// ----------------------------------------------------------------- simulate

int cmd_simulate(const CommonFlags& flags, const std::string& stimulus) {
    const RunConfig cfg = resolve_config(flags);
    const std::vector<Frame> frames = load_stimulus_frames(stimulus, cfg.fps);
    const Grid grid = frames[0].brightness.grid();
    const std::string stem = fs::path(stimulus).stem().string();

    fs::create_directories(cfg.out_dir);
    cfg.echo_resolved(cfg.out_dir);

    std::vector<SimulationResult> results(static_cast<size_t>(cfg.n_scanpaths));
    const int outer = std::min(cfg.threads, cfg.n_scanpaths);
    const int inner = cfg.n_scanpaths == 1 ? cfg.threads : 1;

    parallel_for_index(cfg.n_scanpaths, outer, [&](int i) {
        SimulationParams params = cfg.simulation_params(grid);
        params.threads = inner;
        params.dyn.seed = cfg.seed + static_cast<std::uint64_t>(i);

        StepObserver observer;
        if (i == 0 && cfg.snapshot_stride > 0) {
            const fs::path snap_dir = fs::path(cfg.out_dir) / "snapshots";
            fs::create_directories(snap_dir);
            const int stride = cfg.snapshot_stride;
            observer = [snap_dir, stride](long n, const ScalarField& phi,
                                          const InhibitionField&, const FoaState&) {
                if ((n + 1) % stride == 0)
                    write_saliency_pgm(snap_dir / ("phi_" + zero_pad(n + 1, 6) + ".pgm"),
                                       phi);
            };
        }
        results[static_cast<size_t>(i)] = simulate(frames, params, stem, observer);
    });

    for (int i = 0; i < cfg.n_scanpaths; ++i) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        const fs::path out =
            fs::path(cfg.out_dir) / (stem + "_seed" + std::to_string(seed) + ".json");
        const SimulationResult& r = results[static_cast<size_t>(i)];
        write_scanpath_json(out, r.scanpath, seed, cfg.model);
        std::cout << "scanpath " << out.string() << " seed=" << seed
                  << " steps=" << r.steps << " fixations=" << r.scanpath.fixations.size()
                  << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- evaluate

struct StimulusScores {
    std::string id;
    MetricReport report;
    bool ok = false;
};

int cmd_evaluate(const CommonFlags& flags, const std::string& stimulus_dir,
                 const std::string& fixation_dir, const std::string& paths_dir) {
    const RunConfig cfg = resolve_config(flags);
    const std::vector<StimulusRecord> records = scan_dataset(stimulus_dir, fixation_dir);
    if (records.empty()) throw EmptyInputError("no stimuli in " + stimulus_dir);

    int skipped = 0;
    std::vector<const StimulusRecord*> todo;
    for (const StimulusRecord& rec : records) {
        if (rec.fixation_files.empty()) {
            ++skipped;
            std::cerr << "skip " << rec.id << ": no ground truth\n";
        } else {
            todo.push_back(&rec);
        }
    }
    if (todo.empty()) throw EmptyInputError("no stimulus has ground-truth fixations");

    fs::create_directories(cfg.out_dir);
    cfg.echo_resolved(cfg.out_dir);

    std::vector<StimulusScores> scores(todo.size());
    parallel_for_index(static_cast<int>(todo.size()), cfg.threads, [&](int idx) {
        const StimulusRecord& rec = *todo[static_cast<size_t>(idx)];
        std::vector<Frame> frames;
        frames.reserve(rec.frame_paths.size());
        for (size_t i = 0; i < rec.frame_paths.size(); ++i) {
            Frame f = load_pgm(rec.frame_paths[i]);
            f.timestamp = static_cast<double>(i) / cfg.fps;
            frames.push_back(std::move(f));
        }
        const Grid grid = frames[0].brightness.grid();

        const FixationsCsv human = load_fixations_csv(rec.fixation_files[0], grid);
        if (human.by_subject.empty())
            throw EmptyInputError("no fixation rows for " + rec.id);
        std::vector<Scanpath> human_paths;
        FixationSet pooled;
        for (const auto& [subject, sp] : human.by_subject) {
            (void)subject;
            human_paths.push_back(sp);
            for (const Fixation& f : sp.fixations) pooled.points.push_back({f.x, f.y});
        }

        std::vector<Scanpath> model_paths;
        if (!paths_dir.empty()) {
            for (const auto& e : fs::directory_iterator(paths_dir)) {
                const std::string name = e.path().filename().string();
                if (e.path().extension() == ".json" && name.rfind(rec.id, 0) == 0)
                    model_paths.push_back(read_scanpath_json(e.path()));
            }
            std::sort(model_paths.begin(), model_paths.end(),
                      [](const Scanpath& a, const Scanpath& b) {
                          return a.stimulus_id < b.stimulus_id;
                      });
            if (model_paths.empty())
                throw EmptyInputError("no model scanpaths for " + rec.id + " in " +
                                      paths_dir);
        } else {
            for (int i = 0; i < cfg.n_scanpaths; ++i) {
                SimulationParams params = cfg.simulation_params(grid);
                params.dyn.seed = cfg.seed + static_cast<std::uint64_t>(i);
                model_paths.push_back(simulate(frames, params, rec.id).scanpath);
            }
        }

        const ScalarField sal =
            accumulate_saliency(model_paths, grid, cfg.saliency_sigma(grid));
        MetricReport rep = aggregate(model_paths, human_paths, grid, cfg.metrics_config());
        rep.auc = auc_judd(sal, pooled);
        rep.nss = nss(sal, pooled);

        scores[static_cast<size_t>(idx)] = {rec.id, rep, true};
    });

    // CSV report plus an aggregate row of column means.
    std::ostringstream csv;
    csv << "stimulus,auc,nss,sed_mean,sed_best,stde_mean,stde_best\n";
    MetricReport agg;
    for (const StimulusScores& s : scores) {
        const MetricReport& r = s.report;
        csv << s.id << "," << r.auc << "," << r.nss << "," << r.sed_mean << ","
            << r.sed_best << "," << r.stde_mean << "," << r.stde_best << "\n";
        agg.auc += r.auc;
        agg.nss += r.nss;
        agg.sed_mean += r.sed_mean;
        agg.sed_best += r.sed_best;
        agg.stde_mean += r.stde_mean;
        agg.stde_best += r.stde_best;
    }
    const double n = static_cast<double>(scores.size());
    agg.auc /= n;
    agg.nss /= n;
    agg.sed_mean /= n;
    agg.sed_best /= n;
    agg.stde_mean /= n;
    agg.stde_best /= n;
    csv << "AGGREGATE," << agg.auc << "," << agg.nss << "," << agg.sed_mean << ","
        << agg.sed_best << "," << agg.stde_mean << "," << agg.stde_best << "\n";

    std::ofstream csv_out(fs::path(cfg.out_dir) / "metrics.csv", std::ios::trunc);
    csv_out << csv.str();

    json j;
    j["skipped"] = skipped;
    j["stimuli"] = json::array();
    for (const StimulusScores& s : scores) {
        j["stimuli"].push_back({{"stimulus", s.id},
                                {"auc", s.report.auc},
                                {"nss", s.report.nss},
                                {"sed_mean", s.report.sed_mean},
                                {"sed_best", s.report.sed_best},
                                {"stde_mean", s.report.stde_mean},
                                {"stde_best", s.report.stde_best}});
    }
    j["aggregate"] = {{"auc", agg.auc},           {"nss", agg.nss},
                      {"sed_mean", agg.sed_mean}, {"sed_best", agg.sed_best},
                      {"stde_mean", agg.stde_mean}, {"stde_best", agg.stde_best}};
    std::ofstream json_out(fs::path(cfg.out_dir) / "metrics.json", std::ios::trunc);
    json_out << j.dump(2) << "\n";

    std::cout << csv.str();
    std::cout << "evaluated " << scores.size() << " stimuli, skipped " << skipped << "\n";
    return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

int cmd_verify(const CommonFlags& flags, int quick_grid) {
    const RunConfig cfg = resolve_config(flags);
    if (!flags.out_dir.empty()) cfg.echo_resolved(cfg.out_dir);
    const bool quick = quick_grid > 0 && quick_grid < 65;
    std::vector<VerifyCheck> checks;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok, detail});
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        std::cout.flush();
    };
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        return std::string(buf);
    };

    // Configured explicit schemes must respect the stability bound; this
    // surfaces as a failed check rather than an aborted run.
    if (cfg.scheme == "explicit") {
        const PdeParams p{cfg.m, cfg.d, cfg.c, cfg.tau};
        const double bound = stability_bound(p);
        record("configured scheme stability", cfg.tau <= bound,
               "Unstable: tau " + fmt(cfg.tau) + " vs bound " + fmt(bound));
    }

    try {
        const auto r = quick
                           ? point_mass_wave_experiment(129, 1e-3, 0.04, 32.0, {4, 8, 16},
                                                        cfg.threads)
                           : point_mass_wave_experiment(257, 1e-3, 0.04, 64.0, {8, 16, 32},
                                                        cfg.threads);
        record("point-mass wave potential", r.max_pair_rel_error <= 0.05,
               "max probe-pair error " + fmt(100.0 * r.max_pair_rel_error) + "% (tol 5%, " +
                   fmt(r.elapsed_s) + " s)");
    } catch (const Error& e) {
        record("point-mass wave potential", false, e.what());
    }

    try {
        const auto r = heat_kernel_experiment(129, 2e-5, {25.0, 50.0}, cfg.threads);
        record("heat kernel", r.worst <= 0.02,
               "max probe error " + fmt(100.0 * r.worst) + "% (tol 2%, " + fmt(r.elapsed_s) +
                   " s)");
    } catch (const Error& e) {
        record("heat kernel", false, e.what());
    }

    try {
        const auto r = poisson_equivalence_experiment(16, 10, cfg.seed + 1);
        record("poisson dense equivalence", r.worst <= 1e-7,
               "max |cg - dense| " + fmt(r.worst) + " (tol 1e-7)");
    } catch (const Error& e) {
        record("poisson dense equivalence", false, e.what());
    }

    try {
        // Smaller grids put the wave snapshots on unfavourable phases;
        // 65x65 costs about a second, so the quick mode keeps it.
        const ScalarField mass = three_blob_mass(Grid(65, 65), 1.0);
        VerifyLimitOptions opt;
        opt.threads = cfg.threads;
        const ConvergenceReport rep = verify_limit(mass, {1.0, 2.0, 4.0, 8.0}, 130.0, opt);
        const bool ratio_ok = rep.wave_error.back() < 0.25 * rep.wave_error.front() &&
                              rep.heat_error.back() < 0.25 * rep.heat_error.front();
        std::ostringstream detail;
        detail << "wave e(c)=";
        for (double e : rep.wave_error) detail << " " << fmt(e);
        detail << "; heat e(c)=";
        for (double e : rep.heat_error) detail << " " << fmt(e);
        record("c->inf convergence to poisson",
               rep.wave_strictly_decreasing && rep.heat_strictly_decreasing && ratio_ok,
               detail.str());
    } catch (const Error& e) {
        record("c->inf convergence to poisson", false, e.what());
    }

    try {
        const auto r = energy_dissipation_experiment(100, 30, 12, cfg.seed + 2);
        record("energy dissipation", r.violations == 0,
               std::to_string(r.violations) + " violations in " + std::to_string(r.runs) +
                   " runs");
    } catch (const Error& e) {
        record("energy dissipation", false, e.what());
    }

    {
        // The explicit-scheme guard must fire above the bound.
        bool fired = false;
        try {
            const Grid g(9, 9);
            PotentialState s(g, PdeParams::heat_preset(1.0)); // far above 1e-4
            StepOptions opt;
            opt.scheme = Scheme::Explicit;
            step(s, ScalarField(g, 0.0), opt);
        } catch (const UnstableSchemeError&) {
            fired = true;
        }
        record("explicit stability guard", fired,
               fired ? "UnstableSchemeError raised as required" : "guard did not fire");
    }

    bool all_ok = true;
    for (const VerifyCheck& c : checks) all_ok = all_ok && c.passed;
    std::cout << (all_ok ? "verification OK" : "verification FAILED") << "\n";
    return all_ok ? 0 : 2;
}

// -------------------------------------------------------------------- bench

int cmd_bench(const CommonFlags& flags, std::vector<int> grids, std::vector<int> threads_list,
              int steps) {
    const RunConfig cfg = resolve_config(flags);
    if (grids.empty()) grids = {64, 128, 256};
    if (threads_list.empty()) threads_list = {1, 2, 4};
    if (steps <= 0) steps = 50;

    std::ostringstream csv;
    csv << "scheme,grid,threads,steps_per_s,checksum\n";
    bool checksums_match = true;

    for (Scheme scheme : {Scheme::Explicit, Scheme::Implicit}) {
        const char* scheme_name = scheme == Scheme::Explicit ? "explicit" : "implicit";
        for (int gsize : grids) {
            std::uint64_t reference = 0;
            bool have_reference = false;
            for (int threads : threads_list) {
                const BenchResult r = bench_steps(gsize, scheme, steps, threads);
                char sum[32];
                std::snprintf(sum, sizeof(sum), "%016llx",
                              static_cast<unsigned long long>(r.checksum));
                csv << scheme_name << "," << gsize << "," << threads << ","
                    << static_cast<long>(r.steps_per_second) << "," << sum << "\n";
                if (!have_reference) {
                    reference = r.checksum;
                    have_reference = true;
                } else if (r.checksum != reference) {
                    checksums_match = false;
                    std::cerr << "checksum mismatch: " << scheme_name << " grid " << gsize
                              << " threads " << threads << "\n";
                }
            }
        }
    }

    std::cout << csv.str();
    if (!flags.out_dir.empty()) {
        cfg.echo_resolved(cfg.out_dir);
        std::ofstream out(fs::path(cfg.out_dir) / "bench.csv", std::ios::trunc);
        out << csv.str();
    }
    std::cout << (checksums_match ? "thread-count determinism OK"
                                  : "thread-count determinism FAILED")
              << "\n";
    return checksums_match ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave-propagation focus-of-attention simulator"};
    app.require_subcommand(1);

    CommonFlags sim_flags, eval_flags, verify_flags, bench_flags;
    std::string stimulus, stimulus_dir, fixation_dir, paths_dir;
    int quick_grid = 0;
    std::vector<int> bench_grids, bench_threads;
    int bench_steps_n = 0;

    CLI::App* sim = app.add_subcommand("simulate", "Simulate scanpaths on one stimulus");
    add_common_flags(sim, sim_flags);
    sim->add_option("stimulus", stimulus, "PGM file or directory of PGM frames")
        ->required();

    CLI::App* eval = app.add_subcommand("evaluate", "Score scanpaths against ground truth");
    add_common_flags(eval, eval_flags);
    eval->add_option("stimulus_dir", stimulus_dir, "Directory of stimuli")->required();
    eval->add_option("fixation_dir", fixation_dir, "Directory of <id>.csv fixations")
        ->required();
    eval->add_option("--paths", paths_dir,
                     "Use pre-computed scanpath JSONs instead of simulating");

    CLI::App* verify = app.add_subcommand("verify", "Run the solver oracle suite");
    add_common_flags(verify, verify_flags);
    verify->add_option("--grid", quick_grid, "Reduced base grid for a quick run");

    CLI::App* bench = app.add_subcommand("bench", "Benchmark stepper throughput");
    add_common_flags(bench, bench_flags);
    bench->add_option("--grids", bench_grids, "Grid sizes to time");
    bench->add_option("--bench-threads", bench_threads, "Thread counts to compare");
    bench->add_option("--steps", bench_steps_n, "Steps per timing run");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_flags, stimulus);
        if (eval->parsed())
            return cmd_evaluate(eval_flags, stimulus_dir, fixation_dir, paths_dir);
        if (verify->parsed()) return cmd_verify(verify_flags, quick_grid);
        if (bench->parsed())
            return cmd_bench(bench_flags, bench_grids, bench_threads, bench_steps_n);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
