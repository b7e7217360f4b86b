#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "fracsep/fracops.hpp"
#include "oracles.hpp"

using namespace fracsep;

namespace {

double simpson_panel(const std::function<double(double)>& f, double a, double b, int n = 64) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

// fixed-grid integration over [a, b], a > 0: geometric panels refined toward a,
// panel edges pinned to the supplied knots
double graded_integral(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> knots) {
    for (double g = a; g < b; g *= 1.06) knots.push_back(g);
    knots.push_back(b);
    knots.erase(std::remove_if(knots.begin(), knots.end(),
                               [&](double x) { return !(x > a) || !(x > 0) || x > b; }),
                knots.end());
    knots.push_back(a);
    std::sort(knots.begin(), knots.end());
    double s = 0.0;
    for (size_t i = 0; i + 1 < knots.size(); ++i)
        if (knots[i + 1] - knots[i] > 1e-15) s += simpson_panel(f, knots[i], knots[i + 1]);
    return s;
}

std::vector<double> feature_knots(const TestFunctionSpec& G, double u) {
    double b = G.support_radius();
    std::vector<double> cs{-b, G.left().lo, G.left().hi, 0.0, G.right().lo, G.right().hi, b};
    cs.insert(cs.end(), G.left().knots.begin(), G.left().knots.end());
    cs.insert(cs.end(), G.right().knots.begin(), G.right().knots.end());
    std::vector<double> ks;
    for (double c : cs) {
        ks.push_back(u - c);
        ks.push_back(c - u);
    }
    return ks;
}

// truncate the singular end at eps and Richardson-extrapolate in eps
double full_op_oracle(const TestFunctionSpec& G, double u, double gamma) {
    double R = G.support_radius() + std::abs(u) + 1.0;
    double gu = G.shape(u);
    auto integrand = [&](double w) {
        return (G.shape(u - w) + G.shape(u + w) - 2.0 * gu) * std::pow(w, -1.0 - gamma);
    };
    auto ks = feature_knots(G, u);
    auto trunc = [&](double eps) { return graded_integral(integrand, eps, R, ks); };
    double e0 = 5e-4;
    double l1 = trunc(2.0 * e0), l0 = trunc(e0);
    double q = std::pow(2.0, 2.0 - gamma);
    double body = l0 + (l0 - l1) / (q - 1.0);
    double tail = -2.0 * gu * std::pow(R, -gamma) / gamma;
    return normalization_constant(gamma, 1 << 16) * (body + tail);
}

double regional_op_oracle(const TestFunctionSpec& G, double u, double gamma) {
    double au = std::abs(u), sgn = u > 0 ? 1.0 : -1.0;
    double R = G.support_radius() + au + 1.0;
    double gu = G.shape(u);
    auto paired = [&](double w) {
        return (G.shape(u - w) + G.shape(u + w) - 2.0 * gu) * std::pow(w, -1.0 - gamma);
    };
    auto outward = [&](double w) { return (G.shape(u + sgn * w) - gu) * std::pow(w, -1.0 - gamma); };
    auto ks = feature_knots(G, u);
    auto trunc = [&](double eps) { return graded_integral(paired, eps, au, ks); };
    double e0 = 2.5e-4;
    double l1 = trunc(2.0 * e0), l0 = trunc(e0);
    double q = std::pow(2.0, 2.0 - gamma);
    double body = l0 + (l0 - l1) / (q - 1.0) + graded_integral(outward, au, R, ks);
    double tail = -gu * std::pow(R, -gamma) / gamma;
    return normalization_constant(gamma, 1 << 16) * (body + tail);
}

// direct lattice sum with the raw power-law weights, no tail folding
double brute_generator(const TestFunctionSpec& G, int64_t x, double n, double gamma) {
    double c = normalization_constant(gamma, 1 << 16);
    double gx = G.shape(static_cast<double>(x) / n);
    long double s = 0.0L;
    for (int64_t z = 2'000'000; z >= 1; --z) {
        double w = c * std::pow(static_cast<double>(z), -gamma - 1.0);
        s += static_cast<long double>((G.shape((x + z) / n) - gx) * w);
        s += static_cast<long double>((G.shape((x - z) / n) - gx) * w);
    }
    return std::pow(n, gamma) * static_cast<double>(s);
}

// cross-origin pair sum grouped by the jump gap instead of per site
double robin_oracle(const TestFunctionSpec& G, double n, const JumpKernel& k) {
    int64_t Z = static_cast<int64_t>(std::ceil(G.support_radius() * n));
    long double D = 0.0L;
    for (int64_t d = 1; d <= 2 * Z; ++d) {
        long double inner = 0.0L;
        for (int64_t z = 0; z <= std::min(d - 1, Z); ++z) inner += G.shape(static_cast<double>(z) / n);
        for (int64_t z = std::max<int64_t>(0, d - Z); z <= d - 1; ++z)
            inner -= G.shape(static_cast<double>(z - d) / n);
        D += static_cast<long double>(k.pmf(d)) * inner;
    }
    long double A = 0.0L;
    for (int64_t z = 0; z <= Z; ++z) A += G.shape(static_cast<double>(z) / n);
    for (int64_t x = -Z; x <= -1; ++x) A -= G.shape(static_cast<double>(x) / n);
    D += static_cast<long double>(k.one_sided_tail(2 * Z)) * A;
    double gap = G.right().f(0.0) - G.left().f(0.0);
    return std::abs(static_cast<double>(D) - mean_jump(k.gamma()) * gap);
}

double hat(double u) { return std::max(0.0, 1.0 - std::abs(u)); }

// window-restricted double integral of (f(x)-f(y))^2 |x-y|^{-1-gamma}
double seminorm_2d_oracle(const std::function<double(double)>& f, std::vector<double> kinks,
                          double gamma) {
    auto outer = [&](double x) {
        auto g = [&](double y) {
            double v = f(x) - f(y);
            return v * v * std::pow(std::abs(x - y), -1.0 - gamma);
        };
        std::vector<double> ks = kinks;
        ks.push_back(x);
        ks.erase(std::remove_if(ks.begin(), ks.end(), [](double t) { return t <= -2.0 || t >= 2.0; }),
                 ks.end());
        ks.push_back(-2.0);
        ks.push_back(2.0);
        std::sort(ks.begin(), ks.end());
        double s = 0.0;
        for (size_t i = 0; i + 1 < ks.size(); ++i)
            if (ks[i + 1] - ks[i] > 1e-13) s += integrate(g, ks[i], ks[i + 1]);
        return s;
    };
    return simpson_panel(outer, -2.0, 2.0, 512);
}

}  // namespace

TEST_SUITE_BEGIN("fracops");

TEST_CASE("adaptive integration handles endpoint singularities") {
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("full-line operator matches the truncation-extrapolation oracle") {
    for (double gamma : {0.6, 1.5}) {
        CAPTURE(gamma);
        TestFunctionSpec G = test_function_preset("dif_center");
        for (double u : {0.0, 0.3, 0.95, 1.4}) {
            CAPTURE(u);
            double got = frac_laplacian(G, u, gamma);
            double want = full_op_oracle(G, u, gamma);
            CHECK(std::abs(got - want) <= 5e-6 * std::max(1.0, std::abs(want)));
        }
        TestFunctionSpec P = test_function_preset("dif_plateau");
        for (double u : {0.1, 0.7}) {
            CAPTURE(u);
            double got = frac_laplacian(P, u, gamma);
            double want = full_op_oracle(P, u, gamma);
            CHECK(std::abs(got - want) <= 5e-6 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("full-line operator structure") {
    TestFunctionSpec G = test_function_preset("dif_center");
    // even test function: even operator
    CHECK(frac_laplacian(G, 0.4, 1.2) == doctest::Approx(frac_laplacian(G, -0.4, 1.2)).epsilon(1e-9));
    // negative at the peak, positive outside the support
    CHECK(frac_laplacian(G, 0.0, 1.2) < 0.0);
    CHECK(frac_laplacian(G, 1.4, 1.2) > 0.0);
    // homogeneous in the amplitude
    TestFunctionSpec G2 = TestFunctionSpec::smooth(bump(0.0, 1.0, 2.0));
    CHECK(frac_laplacian(G2, 0.3, 0.9) == doctest::Approx(2.0 * frac_laplacian(G, 0.3, 0.9)).epsilon(1e-10));
    // undefined across a jump
    CHECK_THROWS_AS(frac_laplacian(test_function_preset("rob_gap"), 0.0, 1.2), std::domain_error);
    CHECK_THROWS_AS(frac_laplacian(G, 0.5, 2.0), std::domain_error);
}

TEST_CASE("regional operator matches the oracle") {
    TestFunctionSpec N = test_function_preset("neu_tight");
    for (double u : {0.15, 0.6, -0.45}) {
        CAPTURE(u);
        double got = regional_frac_laplacian(N, u, 0.8);
        double want = regional_op_oracle(N, u, 0.8);
        CHECK(std::abs(got - want) <= 5e-6 * std::max(1.0, std::abs(want)));
    }
    TestFunctionSpec R = test_function_preset("rob_gap");
    for (double u : {0.2, -0.35, 0.6}) {
        CAPTURE(u);
        double got = regional_frac_laplacian(R, u, 1.6);
        double want = regional_op_oracle(R, u, 1.6);
        CHECK(std::abs(got - want) <= 5e-6 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("regional operator domain rules") {
    CHECK(regional_frac_laplacian(test_function_preset("rob_gap"), 0.0, 1.5) == 0.0);
    // low gamma demands a vanishing neighborhood of the origin
    CHECK_THROWS_AS(regional_frac_laplacian(test_function_preset("rob_gap"), 0.5, 0.9),
                    std::domain_error);
    CHECK_NOTHROW(regional_frac_laplacian(test_function_preset("neu_pair"), 0.5, 0.9));
    // the regional operator never sees the other half-line: a one-sided
    // function gives zero on the empty side
    TestFunctionSpec L = test_function_preset("neu_left");
    CHECK(regional_frac_laplacian(L, 0.7, 1.5) == doctest::Approx(0.0));
    CHECK(regional_frac_laplacian(L, -0.9, 1.5) < 0.0);
}

TEST_CASE("origin fractional derivative by dyadic extrapolation") {
    {
        double gamma = 1.5;
        auto fp = [&](double u) { return (gamma - 1.0) * std::pow(u, gamma - 2.0); };
        auto r = frac_derivative_at_origin(fp, Side::Right, gamma);
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(-(gamma - 1.0)).epsilon(1e-6));
    }
    {
        // mirrored layer profile on the negative side
        double gamma = 1.5;
        auto fp = [&](double v) { return -(gamma - 1.0) * std::pow(-v, gamma - 2.0); };
        auto r = frac_derivative_at_origin(fp, Side::Left, gamma);
        CHECK(r.value == doctest::Approx(gamma - 1.0).epsilon(1e-6));
    }
    {
        // bounded slope washes out
        auto r = frac_derivative_at_origin([](double u) { return std::cos(u); }, Side::Right, 1.3);
        CHECK(r.converged);
        CHECK(std::abs(r.value) < 1e-6);
    }
    {
        // singular layer plus a regular part keeps the layer coefficient
        double gamma = 1.8, a = 0.7;
        auto fp = [&](double u) { return a * (gamma - 1.0) * std::pow(u, gamma - 2.0) + 2.0; };
        auto r = frac_derivative_at_origin(fp, Side::Right, gamma);
        CHECK(r.value == doctest::Approx(-a * (gamma - 1.0)).epsilon(1e-5));
    }
}

TEST_CASE("discrete generator matches a raw two-million-term sum") {
    double gamma = 1.5, n = 8.0;
    JumpKernel k(gamma);
    TestFunctionSpec G = test_function_preset("dif_center");
    for (int64_t x : {int64_t{0}, int64_t{3}, int64_t{12}}) {
        CAPTURE(x);
        double got = discrete_generator_apply(G, x, n, k);
        double want = brute_generator(G, x, n, gamma);
        CHECK(std::abs(got - want) <= 1e-7 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("same-side plus cross-side sums reassemble the generator") {
    TestFunctionSpec G = test_function_preset("dif_offset");
    for (double gamma : {0.8, 1.5}) {
        CAPTURE(gamma);
        JumpKernel k(gamma);
        for (int64_t x : {int64_t{-40}, int64_t{-17}, int64_t{-1}, int64_t{0}, int64_t{5}, int64_t{40}}) {
            CAPTURE(x);
            double full = discrete_generator_apply(G, x, 16.0, k);
            double split = fast_bond_sum(G, x, 16.0, k) + slow_bond_sum(G, x, 16.0, 0.0, k);
            CHECK(std::abs(full - split) <= 1e-9 * std::max(1.0, std::abs(full)));
        }
    }
}

TEST_CASE("slow sum scales by n^{-beta} exactly") {
    TestFunctionSpec G = test_function_preset("dif_offset");
    JumpKernel k(1.4);
    double s0 = slow_bond_sum(G, 3, 32.0, 0.0, k);
    double s1 = slow_bond_sum(G, 3, 32.0, 0.75, k);
    CHECK(s1 == doctest::Approx(s0 * std::pow(32.0, -0.75)).epsilon(1e-12));
    CHECK_THROWS_AS(slow_bond_sum(G, 3, 32.0, -0.1, k), std::domain_error);
}

TEST_CASE("boundary pair sum agrees with gap-grouped evaluation") {
    TestFunctionSpec G = test_function_preset("rob_gap");
    JumpKernel k(1.7);
    for (double n : {4.0, 16.0}) {
        CAPTURE(n);
        CHECK(robin_boundary_sum(G, n, k) == doctest::Approx(robin_oracle(G, n, k)).epsilon(1e-10));
    }
    JumpKernel low(0.9);
    CHECK_THROWS_AS(robin_boundary_sum(G, 8.0, low), std::domain_error);
}

TEST_CASE("boundary pair sum residual vanishes with n") {
    TestFunctionSpec G = test_function_preset("rob_gap");
    JumpKernel k(1.8);
    double r16 = robin_boundary_sum(G, 16.0, k);
    double r64 = robin_boundary_sum(G, 64.0, k);
    double r256 = robin_boundary_sum(G, 256.0, k);
    CAPTURE(r16);
    CAPTURE(r64);
    CAPTURE(r256);
    CHECK(r64 < r16);
    CHECK(r256 < r64);
    CHECK(r256 < 0.02);
}

TEST_CASE("grid sampling, coarsening, csv round trip") {
    GridFunction f = GridFunction::sample([](double u) { return std::sin(u); }, -2.0, 2.0, 64);
    CHECK(f.h == doctest::Approx(0.0625));
    CHECK(f.center(0) == doctest::Approx(-2.0 + 0.03125));
    GridFunction c = f.coarsen();
    CHECK(c.cells() == 32);
    CHECK(c.h == doctest::Approx(0.125));
    CHECK(c.v[0] == doctest::Approx(0.5 * (f.v[0] + f.v[1])));

    std::stringstream ss;
    write_grid_csv(ss, f, {"grid-v1", "cafe", 7});
    std::string out = ss.str();
    CHECK(out.rfind("# schema=grid-v1 config=cafe seed=7\nu,value\n", 0) == 0);
    GridFunction back = read_grid_csv(ss);
    REQUIRE(back.cells() == f.cells());
    CHECK(back.a == doctest::Approx(f.a).epsilon(1e-12));
    CHECK(back.h == doctest::Approx(f.h).epsilon(1e-12));
    for (size_t i = 0; i < f.cells(); ++i) CHECK(back.v[i] == doctest::Approx(f.v[i]).epsilon(1e-15));

    GridFunction odd;
    odd.a = 0.0;
    odd.h = 1.0;
    odd.v = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(odd.coarsen(), std::invalid_argument);
    std::stringstream bad("# schema=x\nu,value\n0.5,1\n1.5,2\n3.5,3\n");
    CHECK_THROWS_AS(read_grid_csv(bad), std::invalid_argument);
}

TEST_CASE("pair sum reproduces the double-integral oracle") {
    // smooth profile: the near-diagonal slope model is second order
    auto gauss = [](double u) { return std::exp(-u * u); };
    for (double gamma : {0.7, 1.5}) {
        CAPTURE(gamma);
        GridFunction f = GridFunction::sample(gauss, -2.0, 2.0, 512);
        double got = gagliardo_pair_sum(f, f, Interval::FullLine, gamma);
        double want = seminorm_2d_oracle(gauss, {}, gamma);
        CHECK(std::abs(got - want) <= 0.005 * want);
    }
    // tent profile: kinks cost accuracy but stay within a few percent
    for (double gamma : {0.7, 1.5}) {
        CAPTURE(gamma);
        GridFunction f = GridFunction::sample(hat, -2.0, 2.0, 512);
        double got = gagliardo_pair_sum(f, f, Interval::FullLine, gamma);
        double want = seminorm_2d_oracle(hat, {-1.0, 0.0, 1.0}, gamma);
        CHECK(std::abs(got - want) <= 0.025 * want);
    }
}

TEST_CASE("pair sum input validation") {
    GridFunction f = GridFunction::sample(hat, -2.0, 2.0, 64);
    GridFunction g = GridFunction::sample(hat, -2.0, 2.0, 32);
    CHECK_THROWS_AS(gagliardo_pair_sum(f, g, Interval::FullLine, 1.2), std::invalid_argument);
    GridFunction s = GridFunction::sample(hat, -0.1, 0.1, 6);
    CHECK_THROWS_AS(gagliardo_pair_sum(s, s, Interval::RightHalf, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(gagliardo_pair_sum(f, f, Interval::FullLine, 2.0), std::domain_error);
}

TEST_CASE("seminorm divergence diagnostic") {
    auto step = [](double u) { return u < 0 ? 0.3 : 0.7; };
    GridFunction f = GridFunction::sample(step, -2.0, 2.0, 512);

    SeminormResult hi = sobolev_seminorm(f, Interval::FullLine, 1.5);
    CHECK(hi.divergent);
    CHECK(hi.levels[0] > hi.levels[1]);

    SeminormResult log_case = sobolev_seminorm(f, Interval::FullLine, 1.0);
    CHECK(log_case.divergent);

    SeminormResult lo = sobolev_seminorm(f, Interval::FullLine, 0.7);
    CHECK_FALSE(lo.divergent);
    CHECK(std::isfinite(lo.value));

    // restricted to either open half-line the step is constant
    SeminormResult right = sobolev_seminorm(f, Interval::RightHalf, 1.9);
    CHECK_FALSE(right.divergent);
    CHECK(right.value == doctest::Approx(0.0));
    SeminormResult left = sobolev_seminorm(f, Interval::LeftHalf, 1.9);
    CHECK_FALSE(left.divergent);

    // an interior jump still diverges on the half-line
    auto inner_step = [](double u) { return u < 0.5 ? 0.2 : 0.8; };
    GridFunction f2 = GridFunction::sample(inner_step, -2.0, 2.0, 512);
    CHECK(sobolev_seminorm(f2, Interval::RightHalf, 1.5).divergent);

    GridFunction smooth = GridFunction::sample([](double u) { return std::exp(-u * u); }, -2.0, 2.0, 512);
    CHECK_FALSE(sobolev_seminorm(smooth, Interval::FullLine, 1.5).divergent);
}

TEST_CASE("integration by parts residual is small on matching pairs") {
    GridFunction rho = GridFunction::sample(plateau(0.0, 0.8, 1.8, 0.6).f, -3.0, 3.0, 512);
    TestFunctionSpec G = test_function_preset("dif_center");
    for (double gamma : {0.7, 1.5}) {
        CAPTURE(gamma);
        double r = ibp_residual(rho, G, Interval::FullLine, gamma);
        CAPTURE(r);
        CHECK(r < 1e-5);
    }
    GridFunction rhoR = GridFunction::sample(plateau(0.9, 0.4, 1.1, 0.5).f, -3.0, 3.0, 512);
    TestFunctionSpec N = test_function_preset("neu_tight");
    for (double gamma : {0.8, 1.4}) {
        CAPTURE(gamma);
        double r = ibp_residual(rhoR, N, Interval::RightHalf, gamma);
        CAPTURE(r);
        CHECK(r < 1e-5);
    }
    GridFunction rhoL = GridFunction::sample(plateau(-0.9, 0.4, 1.1, 0.5).f, -3.0, 3.0, 512);
    TestFunctionSpec L = test_function_preset("neu_left");
    for (double gamma : {0.8, 1.4}) {
        CAPTURE(gamma);
        double r = ibp_residual(rhoL, L, Interval::LeftHalf, gamma);
        CAPTURE(r);
        CHECK(r < 1e-5);
    }
}

TEST_CASE("integration by parts contract checks") {
    GridFunction rho = GridFunction::sample(plateau(0.0, 0.8, 1.8, 0.6).f, -3.0, 3.0, 512);
    CHECK_THROWS_AS(ibp_residual(rho, test_function_preset("rob_gap"), Interval::FullLine, 1.5),
                    std::domain_error);
    GridFunction flat = GridFunction::sample([](double) { return 0.3; }, -3.0, 3.0, 512);
    CHECK_THROWS_AS(ibp_residual(flat, test_function_preset("dif_center"), Interval::FullLine, 1.5),
                    std::invalid_argument);
    GridFunction offside = GridFunction::sample(hat, 1.0, 3.0, 128);
    CHECK_THROWS_AS(ibp_residual(offside, test_function_preset("neu_tight"), Interval::RightHalf, 1.4),
                    std::invalid_argument);
    GridFunction narrow = GridFunction::sample(hat, -1.0, 1.0, 128);
    CHECK_THROWS_AS(ibp_residual(narrow, test_function_preset("dif_wide"), Interval::FullLine, 1.5),
                    std::invalid_argument);
}

TEST_CASE("lattice-to-continuum deviation decreases under refinement") {
    std::vector<int> ns{16, 32, 64};
    {
        auto r = operator_convergence_report(ConvergenceVariant::Full, test_function_preset("dif_center"),
                                             1.2, 0.0, ns, 1.0);
        CAPTURE(r.error[0]);
        CAPTURE(r.error[2]);
        CHECK(r.strictly_decreasing());
    }
    {
        auto r = operator_convergence_report(ConvergenceVariant::Regional,
                                             test_function_preset("neu_tight"), 0.8, 0.0, ns, 1.0);
        CHECK(r.strictly_decreasing());
    }
    {
        auto r = operator_convergence_report(ConvergenceVariant::Slow, test_function_preset("neu_tight"),
                                             0.8, 0.0, ns, 1.0);
        CHECK(r.strictly_decreasing());
    }
    {
        auto r = operator_convergence_report(ConvergenceVariant::RobinConstant,
                                             test_function_preset("rob_gap"), 1.7, 0.0, {8, 16, 32}, 1.0);
        CHECK(r.strictly_decreasing());
    }
}

TEST_CASE("convergence report validation and serialization") {
    auto G = test_function_preset("rob_gap");
    CHECK_THROWS_AS(operator_convergence_report(ConvergenceVariant::Full, G, 1.2, 0.0, {8, 16}, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(operator_convergence_report(ConvergenceVariant::Regional, G, 0.8, 0.0, {8, 16}, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(operator_convergence_report(ConvergenceVariant::Slow, G, 1.5, 0.5, {8, 16}, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(
        operator_convergence_report(ConvergenceVariant::RobinConstant, G, 0.9, 0.0, {8, 16}, 1.0),
        std::domain_error);
    CHECK_THROWS_AS(
        operator_convergence_report(ConvergenceVariant::Full, test_function_preset("dif_center"), 1.2,
                                    0.0, {16, 8}, 1.0),
        std::invalid_argument);

    auto r = operator_convergence_report(ConvergenceVariant::RobinConstant, G, 1.7, 0.0, {8, 16}, 1.0);
    std::stringstream s1, s2;
    write_convergence_csv(s1, r, {"opconv-v1", "00", 1});
    write_convergence_csv(s2, r, {"opconv-v1", "00", 1});
    std::string out = s1.str();
    CHECK(out == s2.str());
    CHECK(out.rfind("# schema=opconv-v1", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 4);
}

TEST_SUITE_END();
