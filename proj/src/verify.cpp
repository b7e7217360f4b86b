#include "fracsep/verify.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace fracsep {

namespace {

constexpr size_t kMaxSites = 12;
constexpr size_t kMaxDenseSites = 10;

void run_parallel(uint64_t jobs, int threads, const std::function<void(uint64_t)>& fn) {
    if (threads <= 1 || jobs <= 1) {
        for (uint64_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::mutex err_mtx;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            uint64_t j = next.fetch_add(1);
            if (j >= jobs) return;
            {
                std::lock_guard<std::mutex> lk(err_mtx);
                if (err) return;
            }
            try {
                fn(j);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mtx);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int count = std::min<int>(threads, static_cast<int>(std::min<uint64_t>(jobs, 64)));
    pool.reserve(static_cast<size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

double pair_energy(const std::vector<double>& sf, const std::vector<double>& mu, size_t bi, size_t bj) {
    uint32_t mask = (uint32_t{1} << bi) | (uint32_t{1} << bj);
    KahanSum acc;
    for (uint32_t s = 0; s < sf.size(); ++s) {
        uint32_t bits = (s >> bi & 1u) + (s >> bj & 1u);
        if (bits != 1) continue;
        double d = sf[s ^ mask] - sf[s];
        acc.add(mu[s] * d * d);
    }
    return acc.value();
}

std::vector<double> state_measures(const SmallSystem& sys, double a) {
    std::vector<double> mu(sys.state_count());
    for (uint32_t s = 0; s < mu.size(); ++s) mu[s] = sys.measure(s, a);
    return mu;
}

std::vector<double> sqrt_density(const std::vector<double>& f, const SmallSystem& sys,
                                 const std::vector<double>& mu, const char* who) {
    if (f.size() != sys.state_count()) throw std::domain_error(std::string(who) + ": f has the wrong length");
    KahanSum norm;
    for (uint32_t s = 0; s < f.size(); ++s) {
        if (!(f[s] >= 0.0)) throw std::domain_error(std::string(who) + ": f is not a density");
        norm.add(f[s] * mu[s]);
    }
    if (std::abs(norm.value() - 1.0) > 1e-9)
        throw std::domain_error(std::string(who) + ": f is not a density");
    std::vector<double> sf(f.size());
    for (size_t s = 0; s < f.size(); ++s) sf[s] = std::sqrt(f[s]);
    return sf;
}

bool admissible_for_regime(TestClass regime_cls, TestClass g_cls) {
    switch (regime_cls) {
        case TestClass::Smooth:
            return g_cls == TestClass::Smooth;
        case TestClass::TwoSided:
            return true;
        case TestClass::TwoSidedMatched:
            return g_cls == TestClass::TwoSidedMatched || g_cls == TestClass::VanishNearZero;
        case TestClass::VanishNearZero:
            return g_cls == TestClass::VanishNearZero;
    }
    return false;
}

struct SlopeFit {
    double slope = 0.0, intercept = 0.0;
};

SlopeFit log2_fit(const std::vector<int64_t>& n_list, const std::vector<double>& vals) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t k = n_list.size();
    for (size_t i = 0; i < k; ++i) {
        double x = std::log2(static_cast<double>(n_list[i]));
        double y = std::log2(vals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double det = static_cast<double>(k) * sxx - sx * sx;
    SlopeFit fit;
    fit.slope = (static_cast<double>(k) * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / static_cast<double>(k);
    return fit;
}

std::string json_escape_plain(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c == '"' || c == '\\')
            out += '\\', out += c;
        else
            out += c;
    return out;
}

}  // namespace

SmallSystem SmallSystem::contiguous(int64_t lo, int64_t hi, double gamma, const BarrierSpec& barrier,
                                    double n) {
    if (hi <= lo) throw std::domain_error("small_system: need at least two sites");
    size_t count = static_cast<size_t>(hi - lo + 1);
    if (count > kMaxSites) throw std::domain_error("small_system: at most 12 sites");
    if (!(n > 0.0)) throw std::domain_error("small_system: n must be positive");
    JumpKernel kernel(gamma, 64);
    barrier.validate(kernel);

    SmallSystem sys;
    sys.gamma = gamma;
    sys.n = n;
    sys.barrier = barrier;
    sys.sites.resize(count);
    for (size_t i = 0; i < count; ++i) sys.sites[i] = lo + static_cast<int64_t>(i);
    double slow_w = barrier.slow_weight(n);
    for (size_t i = 0; i < count; ++i)
        for (size_t j = i + 1; j < count; ++j) {
            Bond b;
            b.i = i;
            b.j = j;
            b.slow = barrier.is_slow(sys.sites[i], sys.sites[j]);
            b.weight = kernel.pmf(sys.sites[j] - sys.sites[i]) * (b.slow ? slow_w : 1.0);
            sys.bonds.push_back(b);
        }
    return sys;
}

bool SmallSystem::contains_site(int64_t x) const {
    return !sites.empty() && x >= sites.front() && x <= sites.back();
}

double SmallSystem::measure(uint32_t state, double a) const {
    int k = std::popcount(state);
    int z = static_cast<int>(sites.size()) - k;
    return std::pow(a, k) * std::pow(1.0 - a, z);
}

std::vector<double> SmallSystem::generator_matrix(double right_bias) const {
    if (sites.size() > kMaxDenseSites)
        throw std::domain_error("small_system: dense generator limited to 10 sites");
    size_t S = state_count();
    std::vector<double> Q(S * S, 0.0);
    for (uint32_t s = 0; s < S; ++s) {
        for (const Bond& b : bonds) {
            uint32_t oi = s >> b.i & 1u, oj = s >> b.j & 1u;
            if (oi == oj) continue;
            uint32_t t = s ^ ((uint32_t{1} << b.i) | (uint32_t{1} << b.j));
            double rate = b.weight * (oi == 1 ? 1.0 + right_bias : 1.0);
            Q[s * S + t] += rate;
            Q[s * S + s] -= rate;
        }
    }
    return Q;
}

double detailed_balance_check(const SmallSystem& sys, double a, double right_bias) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("detailed_balance: a must lie in (0,1)");
    std::vector<double> mu = state_measures(sys, a);
    double worst = 0.0;
    for (uint32_t s = 0; s < mu.size(); ++s)
        for (const SmallSystem::Bond& b : sys.bonds) {
            uint32_t oi = s >> b.i & 1u, oj = s >> b.j & 1u;
            if (oi == oj) continue;
            uint32_t t = s ^ ((uint32_t{1} << b.i) | (uint32_t{1} << b.j));
            double fwd = b.weight * (oi == 1 ? 1.0 + right_bias : 1.0);
            double bwd = b.weight * (oi == 1 ? 1.0 : 1.0 + right_bias);
            worst = std::max(worst, std::abs(mu[s] * fwd - mu[t] * bwd));
        }
    return worst;
}

DirichletParts dirichlet_form(const std::vector<double>& f, double a, const SmallSystem& sys) {
    std::vector<double> mu = state_measures(sys, a);
    std::vector<double> sf = sqrt_density(f, sys, mu, "dirichlet_form");
    DirichletParts parts;
    for (const SmallSystem::Bond& b : sys.bonds) {
        double e = b.weight * pair_energy(sf, mu, b.i, b.j);
        if (b.slow)
            parts.slow += e;
        else
            parts.fast += e;
    }
    return parts;
}

double generator_quadratic_form(const std::vector<double>& f, double a, const SmallSystem& sys) {
    std::vector<double> mu = state_measures(sys, a);
    std::vector<double> sf = sqrt_density(f, sys, mu, "generator_quadratic_form");
    KahanSum acc;
    for (uint32_t s = 0; s < sf.size(); ++s) {
        double app = 0.0;
        for (const SmallSystem::Bond& b : sys.bonds) {
            uint32_t oi = s >> b.i & 1u, oj = s >> b.j & 1u;
            if (oi == oj) continue;
            uint32_t t = s ^ ((uint32_t{1} << b.i) | (uint32_t{1} << b.j));
            app += b.weight * (sf[t] - sf[s]);
        }
        acc.add(mu[s] * sf[s] * app);
    }
    return -2.0 * acc.value();
}

std::vector<double> random_density(const SmallSystem& sys, double a, Rng& rng) {
    std::vector<double> f(sys.state_count());
    for (double& v : f) v = 0.05 + rng.uniform01();
    std::vector<double> mu = state_measures(sys, a);
    KahanSum norm;
    for (size_t s = 0; s < f.size(); ++s) norm.add(f[s] * mu[s]);
    for (double& v : f) v /= norm.value();
    return f;
}

MovingParticleResult moving_particle_check(int64_t ell0, int M, uint64_t samples, const SmallSystem& sys,
                                           double a, uint64_t seed) {
    if (ell0 < 1 || M < 1) throw std::domain_error("moving_particle: need ell0 >= 1 and M >= 1");
    int64_t reach = (int64_t{1} << M) * ell0;
    if (!sys.contains_site(1) || !sys.contains_site(reach))
        throw std::domain_error("moving_particle: system must contain sites 1..2^M ell0");
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("moving_particle: a must lie in (0,1)");

    std::vector<double> mu = state_measures(sys, a);
    int64_t base = sys.sites.front();
    MovingParticleResult out;
    for (uint64_t k = 0; k < samples; ++k) {
        Rng rng = Rng::stream(seed, "mpl", k);
        std::vector<double> f = random_density(sys, a, rng);
        std::vector<double> sf(f.size());
        for (size_t s = 0; s < f.size(); ++s) sf[s] = std::sqrt(f[s]);

        KahanSum num;
        for (int i = 1; i <= M; ++i) {
            int64_t ell = (int64_t{1} << (i - 1)) * ell0;
            for (int64_t y = 1; y <= ell; ++y) {
                size_t bi = static_cast<size_t>(y - base);
                size_t bj = static_cast<size_t>(y + ell - base);
                num.add(pair_energy(sf, mu, bi, bj) / std::pow(static_cast<double>(ell), sys.gamma));
            }
        }
        DirichletParts d = dirichlet_form(f, a, sys);
        double total = d.total();
        if (total < 1e-15) {
            if (num.value() > 1e-12) out.contradiction = true;
            ++out.skipped;
            continue;
        }
        ++out.used;
        out.max_ratio = std::max(out.max_ratio, num.value() / total);
        out.max_ratio_fast = std::max(out.max_ratio_fast, num.value() / d.fast);
    }
    return out;
}

ComparisonReport hydro_compare(double gamma, const BarrierSpec& barrier,
                               const std::function<double(double)>& g,
                               const std::vector<TestFunctionSpec>& G_set,
                               const std::vector<int64_t>& n_list, uint64_t replicas, double T,
                               const CompareOptions& opts) {
    if (G_set.empty()) throw std::domain_error("hydro_compare: empty test set");
    if (n_list.empty()) throw std::domain_error("hydro_compare: empty n list");
    if (replicas < 30) throw std::domain_error("hydro_compare: need at least 30 replicas");
    if (!(T > 0.0)) throw std::domain_error("hydro_compare: T must be positive");
    if (!opts.g_names.empty() && opts.g_names.size() != G_set.size())
        throw std::domain_error("hydro_compare: g_names must match G_set");

    const BarrierSpec& pde_barrier = opts.pde_barrier ? *opts.pde_barrier : barrier;
    RegimeSpec sim_regime = classify_regime(gamma, barrier);
    RegimeSpec pde_regime = classify_regime(gamma, pde_barrier);
    double b_max = 0.0;
    for (const TestFunctionSpec& G : G_set) {
        if (!admissible_for_regime(sim_regime.test_class, G.cls()))
            throw std::domain_error("hydro_compare: test function outside the regime class");
        b_max = std::max(b_max, G.support_radius());
    }
    if (b_max + 1.0 > opts.box_radius)
        throw std::domain_error("hydro_compare: box radius too small for the test support");

    std::vector<double> times = opts.times;
    if (times.empty()) times = {T / 4, T / 2, 3 * T / 4, T};
    for (size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0 && times[i] <= T)) throw std::domain_error("hydro_compare: bad time point");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::domain_error("hydro_compare: times must increase");
    }

    SolveOptions sopt;
    sopt.window = static_cast<int64_t>(std::llround(opts.box_radius * static_cast<double>(opts.n_pde)));
    HydroSolution ref = solve_hydro(pde_regime, g, T, static_cast<double>(opts.n_pde), pde_barrier, times,
                                    sopt);

    ComparisonReport rep;
    rep.gamma = gamma;
    rep.replicas = replicas;
    rep.n_list = n_list;

    size_t nt = times.size(), ng = G_set.size();
    std::atomic<bool> partial{false};

    for (int64_t n : n_list) {
        if (n < 2) throw std::domain_error("hydro_compare: n too small");
        int64_t W = static_cast<int64_t>(std::llround(opts.box_radius * static_cast<double>(n)));
        JumpKernel kernel(gamma, 1u << 20);
        SimulateOptions simopt;
        simopt.max_events = opts.max_events;

        std::vector<double> vals(replicas * nt * ng, 0.0);
        std::vector<uint8_t> done(replicas, 0);
        char tag[64];
        std::snprintf(tag, sizeof tag, "hydro/n=%lld", static_cast<long long>(n));
        run_parallel(replicas, opts.threads, [&](uint64_t r) {
            Rng rng = Rng::stream(opts.seed, tag, r);
            Configuration init = sample_initial(g, static_cast<double>(n), W, rng);
            TrajectoryObservation obs;
            try {
                obs = simulate(init, kernel, barrier, static_cast<double>(n), times, rng, simopt);
            } catch (const std::runtime_error&) {
                partial.store(true);
                return;
            }
            for (size_t k = 0; k < nt; ++k) {
                Configuration cfg = obs.configuration_at(k);
                for (size_t gi = 0; gi < ng; ++gi) {
                    const TestFunctionSpec& G = G_set[gi];
                    double tp = G.tp(times[k]);
                    double v = empirical_pairing(
                        cfg, static_cast<double>(n),
                        [&](double u) { return tp * G.shape(u); }, G.support_radius());
                    vals[(r * nt + k) * ng + gi] = v;
                }
            }
            done[r] = 1;
        });

        double sup_d = 0.0, sup_ci = 0.0;
        for (size_t gi = 0; gi < ng; ++gi) {
            for (size_t k = 0; k < nt; ++k) {
                KahanSum sum;
                uint64_t cnt = 0;
                for (uint64_t r = 0; r < replicas; ++r)
                    if (done[r]) {
                        sum.add(vals[(r * nt + k) * ng + gi]);
                        ++cnt;
                    }
                if (cnt < 2) throw std::runtime_error("hydro_compare: too few completed replicas");
                double mean = sum.value() / static_cast<double>(cnt);
                KahanSum sq;
                for (uint64_t r = 0; r < replicas; ++r)
                    if (done[r]) {
                        double d = vals[(r * nt + k) * ng + gi] - mean;
                        sq.add(d * d);
                    }
                double sd = std::sqrt(sq.value() / static_cast<double>(cnt - 1));
                double ci = 1.96 * sd / std::sqrt(static_cast<double>(cnt));

                const TestFunctionSpec& G = G_set[gi];
                const GridFunction& rho = ref.at_time(times[k]);
                double tp = G.tp(times[k]);
                KahanSum pv;
                for (size_t i = 0; i < rho.cells(); ++i) pv.add(rho.v[i] * G.shape(rho.center(i)));
                double pde_value = tp * rho.h * pv.value();

                ComparisonEntry e;
                e.n = n;
                e.test_fn = opts.g_names.empty() ? "G" + std::to_string(gi) : opts.g_names[gi];
                e.time = times[k];
                e.sim_mean = mean;
                e.ci_half = ci;
                e.pde_value = pde_value;
                e.discrepancy = std::abs(mean - pde_value);
                if (e.discrepancy > sup_d) {
                    sup_d = e.discrepancy;
                    sup_ci = ci;
                }
                rep.entries.push_back(std::move(e));
            }
        }
        rep.sup_discrepancy.push_back(sup_d);
        rep.sup_ci.push_back(sup_ci);
    }

    rep.partial = partial.load();
    rep.decreasing = true;
    for (size_t i = 1; i < rep.sup_discrepancy.size(); ++i)
        if (!(rep.sup_discrepancy[i] < rep.sup_discrepancy[i - 1])) rep.decreasing = false;
    return rep;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& r, const CsvMeta& meta) {
    write_meta_line(os, meta);
    os << "n,test_fn,time,sim_mean,ci_half,pde_value,discrepancy\n";
    for (const ComparisonEntry& e : r.entries)
        os << e.n << ',' << e.test_fn << ',' << fmt_double(e.time) << ',' << fmt_double(e.sim_mean) << ','
           << fmt_double(e.ci_half) << ',' << fmt_double(e.pde_value) << ',' << fmt_double(e.discrepancy)
           << '\n';
}

void write_comparison_json(std::ostream& os, const ComparisonReport& r) {
    os << "{\"gamma\":" << fmt_double(r.gamma) << ",\"replicas\":" << r.replicas << ",\"partial\":"
       << (r.partial ? "true" : "false") << ",\"decreasing\":" << (r.decreasing ? "true" : "false")
       << ",\"n\":[";
    for (size_t i = 0; i < r.n_list.size(); ++i) os << (i ? "," : "") << r.n_list[i];
    os << "],\"sup_discrepancy\":[";
    for (size_t i = 0; i < r.sup_discrepancy.size(); ++i)
        os << (i ? "," : "") << fmt_double(r.sup_discrepancy[i]);
    os << "],\"sup_ci\":[";
    for (size_t i = 0; i < r.sup_ci.size(); ++i) os << (i ? "," : "") << fmt_double(r.sup_ci[i]);
    os << "],\"entries\":[";
    for (size_t i = 0; i < r.entries.size(); ++i) {
        const ComparisonEntry& e = r.entries[i];
        os << (i ? "," : "") << "{\"n\":" << e.n << ",\"test_fn\":\"" << json_escape_plain(e.test_fn)
           << "\",\"time\":" << fmt_double(e.time) << ",\"sim_mean\":" << fmt_double(e.sim_mean)
           << ",\"ci_half\":" << fmt_double(e.ci_half) << ",\"pde_value\":" << fmt_double(e.pde_value)
           << ",\"discrepancy\":" << fmt_double(e.discrepancy) << "}";
    }
    os << "]}\n";
}

std::vector<CrossingFit> crossing_scaling_check(double gamma, double alpha,
                                                const std::vector<double>& beta_list,
                                                const std::vector<int64_t>& n_list, double T,
                                                uint64_t replicas, const CrossingOptions& opts) {
    if (!(gamma > 1.0 && gamma < 2.0))
        throw std::domain_error("crossing_scaling: gamma must lie in (1,2) for a finite crossing scale");
    if (beta_list.empty() || n_list.empty()) throw std::domain_error("crossing_scaling: empty sweep");
    if (replicas < 2) throw std::domain_error("crossing_scaling: need at least 2 replicas");
    if (!(opts.a > 0.0 && opts.a < 1.0)) throw std::domain_error("crossing_scaling: a must lie in (0,1)");

    double m = mean_jump(gamma);
    std::vector<CrossingFit> fits;
    for (double beta : beta_list) {
        BarrierSpec barrier = BarrierSpec::thick(alpha, beta);
        CrossingFit fit;
        fit.beta = beta;
        for (int64_t n : n_list) {
            int64_t W = static_cast<int64_t>(std::llround(opts.box_radius * static_cast<double>(n)));
            JumpKernel kernel(gamma, 1u << 20);
            SimulateOptions simopt;
            simopt.max_events = opts.max_events;
            std::vector<double> counts(replicas, 0.0);
            char tag[80];
            std::snprintf(tag, sizeof tag, "crossing/b=%.6f/n=%lld", beta, static_cast<long long>(n));
            auto flat = [&](double) { return opts.a; };
            run_parallel(replicas, opts.threads, [&](uint64_t r) {
                Rng rng = Rng::stream(opts.seed, tag, r);
                Configuration init = sample_initial(flat, static_cast<double>(n), W, rng);
                TrajectoryObservation obs =
                    simulate(init, kernel, barrier, static_cast<double>(n), {T}, rng, simopt);
                counts[r] = static_cast<double>(obs.snapshots.back().total_crossings);
            });
            KahanSum sum;
            for (double c : counts) sum.add(c);
            fit.mean_per_n.push_back(sum.value() / static_cast<double>(replicas) /
                                     static_cast<double>(n));
            fit.predicted_per_n.push_back(2.0 * alpha * m * opts.a * (1.0 - opts.a) * T *
                                          std::pow(static_cast<double>(n), gamma - 1.0 - beta));
            if (sum.value() == 0.0) fit.degenerate = true;
        }
        if (!fit.degenerate) {
            SlopeFit s = log2_fit(n_list, fit.mean_per_n);
            fit.slope = s.slope;
            fit.intercept = s.intercept;
        }
        fits.push_back(std::move(fit));
    }
    return fits;
}

void write_crossing_csv(std::ostream& os, const std::vector<CrossingFit>& fits, const CsvMeta& meta) {
    write_meta_line(os, meta);
    os << "beta,slope,intercept,degenerate,index,mean_over_n,predicted\n";
    for (const CrossingFit& f : fits)
        for (size_t i = 0; i < f.mean_per_n.size(); ++i)
            os << fmt_double(f.beta) << ',' << fmt_double(f.slope) << ',' << fmt_double(f.intercept) << ','
               << (f.degenerate ? 1 : 0) << ',' << i << ',' << fmt_double(f.mean_per_n[i]) << ','
               << fmt_double(f.predicted_per_n[i]) << '\n';
}

SeminormFiniteness seminorm_finiteness_check(const HydroSolution& sol, double a) {
    if (sol.times.size() < 2) throw std::domain_error("seminorm_check: need at least two snapshots");
    double gamma = sol.regime.gamma;
    SeminormFiniteness out;

    std::vector<double> ts;
    std::vector<std::array<double, 3>> vals;  // full, left, right per positive time
    for (size_t j = 0; j < sol.times.size(); ++j) {
        if (!(sol.times[j] > 0.0)) continue;
        GridFunction d = sol.density[j];
        for (double& v : d.v) v -= a;
        SeminormResult full = sobolev_seminorm(d, Interval::FullLine, gamma);
        SeminormResult left = sobolev_seminorm(d, Interval::LeftHalf, gamma);
        SeminormResult right = sobolev_seminorm(d, Interval::RightHalf, gamma);
        ts.push_back(sol.times[j]);
        vals.push_back({full.value, left.value, right.value});
        if (j + 1 == sol.times.size()) {
            // refinement trends on sums below the floor are rounding noise
            const double floor = 1e-14;
            out.full_divergent = full.divergent && full.value > floor;
            out.left_divergent = left.divergent && left.value > floor;
            out.right_divergent = right.divergent && right.value > floor;
        }
    }
    if (ts.size() < 2) throw std::domain_error("seminorm_check: need at least two positive times");
    for (size_t j = 1; j < ts.size(); ++j) {
        double w = 0.5 * (ts[j] - ts[j - 1]);
        out.full_line += w * (vals[j][0] + vals[j - 1][0]);
        out.left_half += w * (vals[j][1] + vals[j - 1][1]);
        out.right_half += w * (vals[j][2] + vals[j - 1][2]);
    }
    return out;
}

}  // namespace fracsep
