// End-to-end acceptance gate: one pass/fail line per criterion, tolerances
// pinned here. Run all, or pass criterion numbers; criterion 11 needs
// --cli PATH to the batch tool.
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracsep/pde.hpp"
#include "fracsep/process.hpp"
#include "fracsep/verify.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fracsep;

namespace {

std::string g_cli_path;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

std::vector<double> ladder(double T, int k) {
    std::vector<double> t(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) t[static_cast<size_t>(i)] = T * (i + 1) / k;
    return t;
}

// criterion 1: kernel mass and closed-form constants
Outcome c01_kernel() {
    JumpKernel k(1.5, 1'000'000);
    KahanSum body;
    for (int64_t z = 1; z <= 1'000'000; ++z) body.add(k.pmf(z));
    double mass = 2.0 * body.value() + 2.0 * k.one_sided_tail(1'000'000);
    double mass_err = std::abs(mass - 1.0);

    // external zeta route for the same normalization
    double c_ext = 1.0 / (2.0 * gsl_sf_zeta(2.5));
    double c_err = std::abs(k.normalization() - c_ext) / c_ext;

    double c1 = normalization_constant(1.0, 1'000'000);
    double c1_err = std::abs(c1 - 3.0 / (M_PI * M_PI));

    double m_ext = gsl_sf_zeta(1.5) / (2.0 * gsl_sf_zeta(2.5));
    double m_err = std::abs(mean_jump(1.5) - m_ext);

    bool pass = mass_err < 1e-12 && c_err < 1e-12 && c1_err < 1e-10 && m_err < 1e-10;
    return {pass, fmt("mass-1=%.2e, c(1)-3/pi^2=%.2e, m(1.5)-zeta=%.2e", mass_err, c1_err, m_err)};
}

// criterion 2: reversibility of the product measure on full 6-site systems
Outcome c02_balance() {
    double worst = 0.0;
    for (uint64_t k = 0; k < 10; ++k) {
        Rng rng = Rng::stream(2024, "acceptance/balance", k);
        double alpha = 0.5 + 3.5 * rng.uniform01();
        double beta = 1.5 * rng.uniform01();
        double a = 0.1 + 0.8 * rng.uniform01();
        auto sys = SmallSystem::contiguous(-3, 2, 1.5, BarrierSpec::thick(alpha, beta), 10.0);
        worst = std::max(worst, detailed_balance_check(sys, a));
    }
    return {worst < 1e-14, fmt("max violation %.3e over 10 (alpha,beta,a) triples", worst)};
}

// criterion 3: Dirichlet form equals the generator quadratic form
Outcome c03_dirichlet() {
    auto sys = SmallSystem::contiguous(-2, 3, 1.5, BarrierSpec::thick(2.0, 0.5), 4.0);
    size_t S = sys.state_count();
    std::vector<double> Q = sys.generator_matrix();
    double worst = 0.0;
    for (uint64_t k = 0; k < 100; ++k) {
        Rng rng = Rng::stream(2024, "acceptance/dirichlet", k);
        std::vector<double> f = random_density(sys, 0.4, rng);
        std::vector<double> sf(S);
        for (size_t s = 0; s < S; ++s) sf[s] = std::sqrt(f[s]);
        KahanSum quad;  // <L sqrt f, sqrt f> via the dense matrix
        for (size_t s = 0; s < S; ++s) {
            double row = 0.0;
            for (size_t t = 0; t < S; ++t) row += Q[s * S + t] * sf[t];
            quad.add(sys.measure(static_cast<uint32_t>(s), 0.4) * sf[s] * row);
        }
        double gap = std::abs(dirichlet_form(f, 0.4, sys).total() + 2.0 * quad.value());
        worst = std::max(worst, gap);
    }
    return {worst < 1e-12, fmt("max |D + 2<Lsf,sf>| = %.3e over 100 densities", worst)};
}

// criterion 4: bounded relay ratio, stable maximum under sample doubling
Outcome c04_moving_particle() {
    auto sys = SmallSystem::contiguous(-3, 4, 1.5, BarrierSpec::thick(2.0, 0.5), 8.0);
    MovingParticleResult r1 = moving_particle_check(1, 1, 1000, sys, 0.5, 2024);
    MovingParticleResult r2 = moving_particle_check(1, 1, 2000, sys, 0.5, 2024);
    double change = (r2.max_ratio - r1.max_ratio) / r1.max_ratio;
    bool pass = !r1.contradiction && !r2.contradiction && std::isfinite(r2.max_ratio) &&
                r1.max_ratio > 0.0 && change <= 0.05;
    return {pass, fmt("max ratio %.4f -> %.4f (change %.2f%%)", r1.max_ratio, r2.max_ratio, 100 * change)};
}

// criterion 5: lattice operator sums approach their continuum targets
Outcome c05_operator_convergence() {
    struct Case {
        ConvergenceVariant variant;
        double gamma;
        const char* fns[3];
    };
    const Case cases[] = {
        {ConvergenceVariant::Full, 1.2, {"dif_center", "dif_offset", "dif_plateau"}},
        {ConvergenceVariant::Regional, 0.8, {"neu_pair", "neu_tight", "neu_left"}},
        {ConvergenceVariant::Slow, 0.8, {"neu_pair", "neu_tight", "neu_left"}},
        {ConvergenceVariant::RobinConstant, 1.7, {"rob_gap", "rob_slope", "rob_tight"}},
    };
    std::vector<int> ns{32, 64, 128, 256};
    double worst_ratio = 0.0;
    int bad = 0;
    for (const Case& c : cases) {
        for (const char* fn : c.fns) {
            auto rep = operator_convergence_report(c.variant, test_function_preset(fn), c.gamma, 0.0, ns, 1.0);
            worst_ratio = std::max(worst_ratio, rep.final_over_first());
            if (!rep.strictly_decreasing() || rep.final_over_first() >= 0.25) ++bad;
        }
    }
    return {bad == 0, fmt("12 reports, worst final/first %.3f, %d violations", worst_ratio, bad)};
}

// criterion 6: integration-by-parts residuals on matching pairs
Outcome c06_ibp() {
    double worst = 0.0;
    {
        GridFunction rho = GridFunction::sample(plateau(0.0, 0.8, 1.8, 0.6).f, -3.0, 3.0, 512);
        worst = std::max(worst, ibp_residual(rho, test_function_preset("dif_center"), Interval::FullLine, 1.5));
    }
    {
        GridFunction rho = GridFunction::sample(plateau(0.9, 0.4, 1.1, 0.5).f, -3.0, 3.0, 512);
        worst = std::max(worst, ibp_residual(rho, test_function_preset("neu_tight"), Interval::RightHalf, 1.4));
    }
    {
        GridFunction rho = GridFunction::sample(plateau(-0.9, 0.4, 1.1, 0.5).f, -3.0, 3.0, 512);
        worst = std::max(worst, ibp_residual(rho, test_function_preset("neu_left"), Interval::LeftHalf, 1.4));
    }
    return {worst < 1e-5, fmt("max residual %.3e at grid 512", worst)};
}

// criterion 7: free solver versus the exact Fourier-symbol evolution
Outcome c07_spectral() {
    auto wave = bump(0.0, 2.0, 0.4);
    auto g = [&wave](double u) { return 0.3 + wave.f(u); };
    double worst = 0.0;
    {
        SolveOptions opts;
        opts.periodic = true;
        opts.window = 256;
        opts.dt = 0.04 / std::pow(64.0, 1.5);
        HydroSolution sol = solve_hydro(classify_regime(1.5, BarrierSpec::none()), g, 0.01, 64,
                                        BarrierSpec::none(), {0.0, 0.005, 0.01}, opts);
        double c = normalization_constant(1.5, 1u << 16);
        for (size_t j = 1; j < sol.times.size(); ++j) {
            auto ref = oracles::periodic_heat_reference(sol.density[0].v, 1.5, c, 64.0, sol.times[j]);
            for (size_t i = 0; i < ref.size(); ++i)
                worst = std::max(worst, std::abs(sol.density[j].v[i] - ref[i]));
        }
    }
    {
        SolveOptions opts;
        opts.periodic = true;
        opts.window = 128;
        opts.dt = 0.04 / std::pow(32.0, 0.8);
        HydroSolution sol = solve_hydro(classify_regime(0.8, BarrierSpec::none()), g, 0.02, 32,
                                        BarrierSpec::none(), {0.0, 0.01, 0.02}, opts);
        double c = normalization_constant(0.8, 1u << 16);
        for (size_t j = 1; j < sol.times.size(); ++j) {
            auto ref = oracles::periodic_heat_reference(sol.density[0].v, 0.8, c, 32.0, sol.times[j]);
            for (size_t i = 0; i < ref.size(); ++i)
                worst = std::max(worst, std::abs(sol.density[j].v[i] - ref[i]));
        }
    }
    return {worst < 1e-6, fmt("sup error %.3e, gamma in {0.8, 1.5}", worst)};
}

// criterion 8: ensemble means approach the matching equation; the wrong
// equation is detected
Outcome c08_hydro() {
    struct Case {
        const char* name;
        BarrierSpec barrier;
        const char* fns[3];
    };
    const Case cases[] = {
        {"thin", BarrierSpec::thin_origin_column(1.0, 0.5, 1.0), {"dif_center", "dif_offset", "dif_plateau"}},
        {"robin", BarrierSpec::thick(2.0, 0.5), {"rob_gap", "rob_slope", "rob_tight"}},
        {"neumann", BarrierSpec::thick(1.0, 1.0), {"neu_pair", "neu_tight", "neu_left"}},
        {"mixed", BarrierSpec::thick(2.0, 0.0), {"dif_center", "dif_offset", "dif_plateau"}},
    };
    auto g = [](double u) { return u < 0.0 ? 0.2 : 0.9; };
    std::string detail;
    bool pass = true;
    for (const Case& c : cases) {
        CompareOptions opts;
        opts.box_radius = 4.0;
        opts.n_pde = 512;
        opts.times = {0.08, 0.16, 0.24, 0.32, 0.4};
        opts.threads = 8;
        opts.seed = 1;
        opts.g_names = {c.fns[0], c.fns[1], c.fns[2]};
        std::vector<TestFunctionSpec> G;
        for (const char* f : c.fns) G.push_back(test_function_preset(f));
        ComparisonReport rep = hydro_compare(1.5, c.barrier, g, G, {64, 128, 256}, 200, 0.4, opts);
        bool ok = rep.decreasing && !rep.partial &&
                  rep.final_sup() < 0.05 + 3.0 * rep.sup_ci.back();
        pass = pass && ok;
        detail += fmt("%s[%s %.4f/%.4f/%.4f]", detail.empty() ? "" : " ", c.name, rep.sup_discrepancy[0],
                      rep.sup_discrepancy[1], rep.sup_discrepancy[2]);
    }
    {
        CompareOptions opts;
        opts.box_radius = 4.0;
        opts.n_pde = 512;
        opts.times = {0.08, 0.16, 0.24, 0.32, 0.4};
        opts.threads = 8;
        opts.seed = 1;
        opts.pde_barrier = BarrierSpec::thick(1.0, 1.0);
        std::vector<TestFunctionSpec> G = {test_function_preset("rob_gap"),
                                           test_function_preset("rob_slope"),
                                           test_function_preset("rob_tight")};
        ComparisonReport neg =
            hydro_compare(1.5, BarrierSpec::thick(2.0, 0.5), g, G, {256}, 200, 0.4, opts);
        bool flagged = neg.final_sup() > 3.0 * neg.sup_ci.back() + 0.05;
        pass = pass && flagged;
        detail += fmt(" neg[%.4f>%.4f:%s]", neg.final_sup(), 3.0 * neg.sup_ci.back() + 0.05,
                      flagged ? "yes" : "NO");
    }
    return {pass, detail};
}

// criterion 9: origin crossing rate scales like n^(gamma-1-beta)
Outcome c09_crossing() {
    CrossingOptions opts;
    opts.a = 0.5;
    opts.box_radius = 4.0;
    opts.threads = 8;
    opts.seed = 5;
    std::vector<CrossingFit> fits =
        crossing_scaling_check(1.5, 1.5, {0.0, 0.5, 1.0}, {64, 128, 256, 512}, 0.25, 48, opts);
    double expect[] = {0.5, 0.0, -0.5};
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < fits.size(); ++i) {
        double err = std::abs(fits[i].slope - expect[i]);
        pass = pass && !fits[i].degenerate && err <= 0.15;
        detail += fmt("%sbeta=%.1f slope %+.3f", i ? ", " : "", fits[i].beta, fits[i].slope);
    }
    return {pass, detail};
}

// criterion 10: lattice energy never increases; seminorm finiteness pattern
Outcome c10_energy_seminorm() {
    struct Case {
        const char* name;
        BarrierSpec barrier;
        int expect_full_divergent;  // 1 yes, 0 no, -1 unasserted
    };
    // thin keeps a jump-like column defect of height ~n^(-beta) at any fixed
    // resolution, so its line flag is reported but not asserted
    const Case cases[] = {
        {"free", BarrierSpec::none(), 0},
        {"thin", BarrierSpec::thin_origin_column(1.0, 0.5, 1.0), -1},
        {"robin", BarrierSpec::thick(2.0, 0.5), -1},
        {"neumann", BarrierSpec::thick(1.0, 1.0), 1},
        {"mixed", BarrierSpec::thick(2.0, 0.0), 0},
    };
    auto g = [](double u) { return u < 0.0 ? 0.2 : 0.8; };
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        RegimeSpec regime = classify_regime(1.5, c.barrier);
        HydroSolution sol = solve_hydro(regime, g, 0.2, 64, c.barrier, ladder(0.2, 8));
        bool mono = true;
        double prev = 0.0;
        for (size_t j = 0; j < sol.times.size(); ++j) {
            KahanSum e;
            for (double v : sol.density[j].v) e.add((v - 0.5) * (v - 0.5));
            if (j > 0 && e.value() > prev + 1e-12) mono = false;
            prev = e.value();
        }
        SeminormFiniteness sem = seminorm_finiteness_check(sol, 0.5);
        bool halves_ok = !sem.left_divergent && !sem.right_divergent &&
                         std::isfinite(sem.left_half) && std::isfinite(sem.right_half);
        bool full_ok = c.expect_full_divergent < 0 ||
                       sem.full_divergent == (c.expect_full_divergent == 1);
        pass = pass && mono && halves_ok && full_ok;
        detail += fmt("%s%s[%s%s%s]", detail.empty() ? "" : " ", c.name, mono ? "e" : "E!",
                      halves_ok ? "h" : "H!", full_ok ? "f" : "F!");
    }
    return {pass, detail + " (e energy monotone, h halves finite, f line flag as expected)"};
}

// criterion 11: identical config + seed reproduce byte-identical artifacts
Outcome c11_determinism() {
    if (g_cli_path.empty()) return {false, "needs --cli PATH to the batch tool"};
    fs::path base = fs::temp_directory_path() / "fracsep_acceptance_11";
    fs::remove_all(base);
    fs::create_directories(base);
    fs::path cfgp = base / "exp.conf";
    {
        std::ofstream cfg(cfgp);
        cfg << "model.gamma = 1.5\nbarrier.kind = thick\nbarrier.alpha = 2\nbarrier.beta = 0.5\n"
               "profile.kind = step\nprofile.left = 0.2\nprofile.right = 0.9\n"
               "run.n_list = 16,32\nrun.replicas = 30\nrun.horizon = 0.1\nrun.seed = 42\n"
               "run.threads = 4\ncompare.box_radius = 4\ncompare.n_pde = 64\n"
               "compare.times = 0.05,0.1\ntest_functions = rob_gap\n";
    }
    auto run = [&](const char* sub, const char* dir) {
        std::string cmd = "\"" + g_cli_path + "\" " + sub + " --config \"" + cfgp.string() +
                          "\" --out \"" + (base / dir).string() + "\" > /dev/null";
        return std::system(cmd.c_str()) == 0;
    };
    if (!run("compare", "a") || !run("compare", "b") || !run("solve", "c") || !run("solve", "d") ||
        !run("simulate", "e") || !run("simulate", "f"))
        return {false, "cli invocation failed"};
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    size_t checked = 0;
    for (auto [l, r] : {std::pair{"a", "b"}, std::pair{"c", "d"}, std::pair{"e", "f"}}) {
        for (const auto& entry : fs::directory_iterator(base / l)) {
            std::string name = entry.path().filename().string();
            std::string lhs = slurp(entry.path());
            std::string rhs = slurp(base / r / name);
            if (lhs.empty() || lhs != rhs)
                return {false, fmt("mismatch or empty: %s vs %s/%s", entry.path().c_str(), r, name.c_str())};
            ++checked;
        }
    }
    return {checked > 0, fmt("%zu artifact pairs byte-identical across reruns", checked)};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "kernel exactness", c01_kernel},
    {2, "reversibility", c02_balance},
    {3, "dirichlet identity", c03_dirichlet},
    {4, "moving-particle ratio", c04_moving_particle},
    {5, "operator convergence", c05_operator_convergence},
    {6, "integration by parts", c06_ibp},
    {7, "spectral oracle", c07_spectral},
    {8, "hydrodynamic comparison", c08_hydro},
    {9, "crossing-current scaling", c09_crossing},
    {10, "energy and seminorm structure", c10_energy_seminorm},
    {11, "determinism", c11_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            g_cli_path = argv[++i];
        } else {
            wanted.push_back(std::atoi(arg.c_str()));
        }
    }
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d %-32s %s  (%6.1fs)  %s\n", c.id, c.name, out.pass ? "PASS" : "FAIL",
                    secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
