#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracsep/config.hpp"
#include "fracsep/pde.hpp"
#include "fracsep/process.hpp"
#include "fracsep/verify.hpp"

namespace fs = std::filesystem;
using namespace fracsep;

namespace {

struct Invocation {
    std::string config_path;
    std::string out_override;
    uint64_t seed_override = 0;
    bool seed_set = false;
    int threads_override = 0;

    ExperimentConfig cfg;
    fs::path out_dir;
    std::string stored;  // canonical config copy as written to disk
    std::string hash;
};

void add_common(CLI::App* cmd, Invocation& inv, bool needs_out) {
    cmd->add_option("--config", inv.config_path, "experiment config file")->required();
    cmd->add_option("--seed", inv.seed_override, "override run.seed")->each([&inv](const std::string&) {
        inv.seed_set = true;
    });
    cmd->add_option("--threads", inv.threads_override, "override run.threads");
    if (needs_out) cmd->add_option("--out", inv.out_override, "output directory");
}

// the stored copy pins the experiment, not its location: output_dir is blanked
// so the hash is invariant under --out
void load(Invocation& inv, bool needs_out) {
    std::ifstream in(inv.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + inv.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    inv.cfg = parse_config(buf.str());
    if (inv.seed_set) inv.cfg.seed = inv.seed_override;
    if (inv.threads_override > 0) inv.cfg.threads = inv.threads_override;

    std::string dir = inv.out_override;
    if (dir.empty()) dir = inv.cfg.output_dir;
    if (dir.empty()) {
        const char* env = std::getenv("FRACSEP_OUT");
        dir = env ? env : ".";
    }
    inv.out_dir = dir;

    ExperimentConfig pinned = inv.cfg;
    pinned.output_dir.clear();
    inv.stored = pinned.canonical();
    inv.hash = config_hash_hex(inv.stored);

    if (needs_out) {
        fs::create_directories(inv.out_dir);
        std::ofstream copy(inv.out_dir / "config.txt", std::ios::binary);
        copy << inv.stored;
    }
}

CsvMeta meta_for(const Invocation& inv, const std::string& schema) {
    return CsvMeta{schema, inv.hash, inv.cfg.seed};
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
}

int cmd_classify(Invocation& inv) {
    RegimeSpec r = classify_regime(inv.cfg.gamma, inv.cfg.barrier());
    std::printf("%s\n", regime_json(r).c_str());
    return 0;
}

int cmd_simulate(Invocation& inv) {
    JumpKernel kernel(inv.cfg.gamma, int64_t{1} << 20);
    BarrierSpec barrier = inv.cfg.barrier();
    auto g = inv.cfg.profile_fn();
    std::vector<double> schedule = inv.cfg.snapshot_times();
    for (int64_t n : inv.cfg.n_list) {
        int64_t W = static_cast<int64_t>(std::llround(inv.cfg.box_radius * static_cast<double>(n)));
        char tag[64];
        std::snprintf(tag, sizeof(tag), "cli/sim/n=%" PRId64, n);
        for (int64_t r = 0; r < inv.cfg.replicas; ++r) {
            Rng rng = Rng::stream(inv.cfg.seed, tag, static_cast<uint64_t>(r));
            Configuration init = sample_initial(g, static_cast<double>(n), W, rng);
            TrajectoryObservation obs =
                simulate(init, kernel, barrier, static_cast<double>(n), schedule, rng);
            std::ostringstream os;
            write_trajectory_csv(os, obs, meta_for(inv, "traj_v1"));
            char name[64];
            std::snprintf(name, sizeof(name), "sim_n%" PRId64 "_r%" PRId64 ".csv", n, r);
            write_file(inv.out_dir / name, os.str());
        }
    }
    std::printf("simulate: wrote %zu trajectories to %s\n",
                inv.cfg.n_list.size() * static_cast<size_t>(inv.cfg.replicas),
                inv.out_dir.string().c_str());
    return 0;
}

int cmd_solve(Invocation& inv) {
    BarrierSpec barrier = inv.cfg.barrier();
    RegimeSpec regime = classify_regime(inv.cfg.gamma, barrier);
    auto g = inv.cfg.profile_fn();
    std::vector<double> times = inv.cfg.snapshot_times();
    for (int64_t n : inv.cfg.n_list) {
        SolveOptions so;
        so.window = static_cast<int64_t>(std::llround(inv.cfg.box_radius * static_cast<double>(n)));
        HydroSolution sol =
            solve_hydro(regime, g, inv.cfg.horizon, static_cast<int>(n), barrier, times, so);
        std::ostringstream os;
        write_hydro_csv(os, sol, meta_for(inv, "hydro_v1"));
        char name[64];
        std::snprintf(name, sizeof(name), "solve_n%" PRId64 ".csv", n);
        write_file(inv.out_dir / name, os.str());
    }
    std::printf("solve: wrote %zu solutions to %s\n", inv.cfg.n_list.size(),
                inv.out_dir.string().c_str());
    return 0;
}

int cmd_compare(Invocation& inv) {
    CompareOptions copts;
    copts.box_radius = inv.cfg.box_radius;
    copts.n_pde = inv.cfg.n_pde;
    copts.times = inv.cfg.times;
    copts.threads = inv.cfg.threads;
    copts.seed = inv.cfg.seed;
    copts.g_names = inv.cfg.test_functions;
    ComparisonReport rep =
        hydro_compare(inv.cfg.gamma, inv.cfg.barrier(), inv.cfg.profile_fn(),
                      inv.cfg.test_function_specs(), inv.cfg.n_list,uint64_t(inv.cfg.replicas),
                      inv.cfg.horizon, copts);
    std::ostringstream csv, json;
    write_comparison_csv(csv, rep, meta_for(inv, "compare_v1"));
    write_comparison_json(json, rep);
    write_file(inv.out_dir / "compare.csv", csv.str());
    write_file(inv.out_dir / "compare.json", json.str());
    std::printf("compare: final sup discrepancy %.6f (ci %.6f), decreasing=%s%s\n", rep.final_sup(),
                rep.sup_ci.back(), rep.decreasing ? "yes" : "no",
                rep.partial ? ", PARTIAL (event budget hit)" : "");
    return 0;
}

int cmd_verify(Invocation& inv) {
    double gamma = inv.cfg.gamma;
    BarrierSpec barrier = inv.cfg.barrier();
    double n0 = static_cast<double>(inv.cfg.n_list.front());
    bool ok = true;

    auto sys6 = SmallSystem::contiguous(-3, 2, gamma, barrier, n0);
    double balance = 0.0;
    for (double a : {0.3, 0.5, 0.7}) balance = std::max(balance, detailed_balance_check(sys6, a));
    bool bal_ok = balance < 1e-13;
    ok = ok && bal_ok;
    std::printf("balance:   %s (max violation %.3e)\n", bal_ok ? "PASS" : "FAIL", balance);

    auto sysd = SmallSystem::contiguous(-2, 3, gamma, barrier, n0);
    double ident = 0.0;
    for (uint64_t k = 0; k < 100; ++k) {
        Rng rng = Rng::stream(inv.cfg.seed, "cli/verify/density", k);
        std::vector<double> f = random_density(sysd, 0.4, rng);
        double d = dirichlet_form(f, 0.4, sysd).total();
        double q = generator_quadratic_form(f, 0.4, sysd);
        ident = std::max(ident, std::abs(d - q));
    }
    bool ident_ok = ident < 1e-12;
    ok = ok && ident_ok;
    std::printf("dirichlet: %s (max identity gap %.3e)\n", ident_ok ? "PASS" : "FAIL", ident);

    auto sysm = SmallSystem::contiguous(-3, 4, gamma, barrier, n0);
    MovingParticleResult mpl = moving_particle_check(1, 2, 500, sysm, 0.5, inv.cfg.seed);
    bool mpl_ok = !mpl.contradiction && std::isfinite(mpl.max_ratio) && mpl.max_ratio > 0.0;
    ok = ok && mpl_ok;
    std::printf("mpl:       %s (max ratio %.4f over %" PRIu64 " densities)\n", mpl_ok ? "PASS" : "FAIL",
                mpl.max_ratio, mpl.used);

    std::ostringstream js;
    js << "{\"schema\":\"verify_v1\",\"config\":\"" << inv.hash << "\",\"seed\":" << inv.cfg.seed
       << ",\"balance\":" << fmt_double(balance) << ",\"dirichlet_identity\":" << fmt_double(ident)
       << ",\"mpl_max_ratio\":" << fmt_double(mpl.max_ratio) << ",\"pass\":" << (ok ? "true" : "false")
       << "}\n";
    write_file(inv.out_dir / "verify.json", js.str());
    return ok ? 0 : 1;
}

int cmd_opcheck(Invocation& inv) {
    std::vector<int> ns;
    for (int64_t n : inv.cfg.n_list) ns.push_back(static_cast<int>(n));
    size_t wrote = 0;
    for (const std::string& name : inv.cfg.test_functions) {
        TestFunctionSpec G = test_function_preset(name);
        std::vector<std::pair<ConvergenceVariant, const char*>> variants;
        switch (G.cls()) {
            case TestClass::Smooth:
                variants = {{ConvergenceVariant::Full, "full"}};
                break;
            case TestClass::VanishNearZero:
                variants = {{ConvergenceVariant::Regional, "regional"}, {ConvergenceVariant::Slow, "slow"}};
                break;
            case TestClass::TwoSided:
                variants = {{ConvergenceVariant::RobinConstant, "robin"}};
                break;
            case TestClass::TwoSidedMatched:
                std::printf("opcheck: %s skipped (matched class has no lattice surrogate)\n", name.c_str());
                continue;
        }
        for (auto& [variant, vname] : variants) {
            ConvergenceReport rep =
                operator_convergence_report(variant, G, inv.cfg.gamma, inv.cfg.beta, ns, 1.0);
            std::ostringstream os;
            write_convergence_csv(os, rep, meta_for(inv, "convergence_v1"));
            std::string fname = std::string("opcheck_") + vname + "_" + name + ".csv";
            write_file(inv.out_dir / fname, os.str());
            ++wrote;
            std::printf("opcheck: %s %s first=%.4e final=%.4e decreasing=%s final/first=%.3f\n", vname,
                        name.c_str(), rep.error.front(), rep.error.back(),
                        rep.strictly_decreasing() ? "yes" : "no", rep.final_over_first());
        }
    }
    if (wrote == 0) throw std::runtime_error("opcheck: no admissible test functions in config");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-jump exclusion process workbench"};
    app.require_subcommand(1);
    Invocation inv;

    CLI::App* classify = app.add_subcommand("classify", "print the limit equation for the config");
    add_common(classify, inv, false);
    CLI::App* simulate = app.add_subcommand("simulate", "write particle trajectories");
    add_common(simulate, inv, true);
    CLI::App* solve = app.add_subcommand("solve", "write deterministic density solutions");
    add_common(solve, inv, true);
    CLI::App* compare = app.add_subcommand("compare", "ensemble versus solver report");
    add_common(compare, inv, true);
    CLI::App* verify = app.add_subcommand("verify", "small-system property suite");
    add_common(verify, inv, true);
    CLI::App* opcheck = app.add_subcommand("opcheck", "lattice-to-continuum operator sums");
    add_common(opcheck, inv, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) {
            load(inv, false);
            return cmd_classify(inv);
        }
        load(inv, true);
        if (simulate->parsed()) return cmd_simulate(inv);
        if (solve->parsed()) return cmd_solve(inv);
        if (compare->parsed()) return cmd_compare(inv);
        if (verify->parsed()) return cmd_verify(inv);
        if (opcheck->parsed()) return cmd_opcheck(inv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
