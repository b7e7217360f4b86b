#include "fracsep/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace fracsep {

namespace {

constexpr int kTraceCells = 8;

// fftw planner calls are not thread-safe
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int64_t next_pow2(int64_t m) {
    int64_t p = 1;
    while (p < m) p <<= 1;
    return p;
}

struct ConvPlan {
    int64_t M;
    double* re;
    fftw_complex* cx;
    fftw_plan fwd, bwd;

    explicit ConvPlan(int64_t m) : M(m) {
        re = fftw_alloc_real(static_cast<size_t>(M));
        cx = fftw_alloc_complex(static_cast<size_t>(M / 2 + 1));
        if (!re || !cx) throw std::bad_alloc();
        std::lock_guard<std::mutex> lk(planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(M), re, cx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(M), cx, re, FFTW_ESTIMATE);
    }
    ~ConvPlan() {
        std::lock_guard<std::mutex> lk(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(re);
        fftw_free(cx);
    }
    ConvPlan(const ConvPlan&) = delete;
    ConvPlan& operator=(const ConvPlan&) = delete;

    // spectrum of the first len entries of src (zero padded)
    std::vector<double> spectrum_re, spectrum_im;
    void load_spectrum(const std::vector<double>& src) {
        std::fill(re, re + M, 0.0);
        std::copy(src.begin(), src.end(), re);
        fftw_execute(fwd);
        size_t bins = static_cast<size_t>(M / 2 + 1);
        spectrum_re.resize(bins);
        spectrum_im.resize(bins);
        for (size_t k = 0; k < bins; ++k) {
            spectrum_re[k] = cx[k][0];
            spectrum_im[k] = cx[k][1];
        }
    }

    // out[i] = sum_j kernel[(i-j) mod M] in[j], i < out.size(); in is zero padded
    void convolve(const std::vector<double>& in, std::vector<double>& out) {
        std::fill(re, re + M, 0.0);
        std::copy(in.begin(), in.end(), re);
        fftw_execute(fwd);
        double inv = 1.0 / static_cast<double>(M);
        for (int64_t k = 0; k <= M / 2; ++k) {
            double a = cx[k][0], b = cx[k][1];
            size_t ks = static_cast<size_t>(k);
            cx[k][0] = (a * spectrum_re[ks] - b * spectrum_im[ks]) * inv;
            cx[k][1] = (a * spectrum_im[ks] + b * spectrum_re[ks]) * inv;
        }
        fftw_execute(bwd);
        std::copy(re, re + static_cast<int64_t>(out.size()), out.begin());
    }
};

// lattice generator restricted to the site window [-W, W)
struct WindowOp {
    double rate;  // n^gamma
    int64_t W;
    BarrierKind kind;
    double s;  // slow weight
    ConvPlan plan;
    std::vector<double> diag_same, diag_opp, diag_in;
    struct ThinBond {
        int64_t ix, iy;  // window indices
        double p;
    };
    std::vector<ThinBond> bonds;
    std::vector<double> half, conv_a, conv_b;

    WindowOp(const JumpKernel& kernel, const BarrierSpec& barrier, double n, int64_t W_)
        : rate(std::pow(n, kernel.gamma())),
          W(W_),
          kind(barrier.kind),
          s(barrier.slow_weight(n)),
          plan(next_pow2(4 * W_ + 1)) {
        size_t len = static_cast<size_t>(2 * W);
        std::vector<double> ker(static_cast<size_t>(plan.M), 0.0);
        for (int64_t z = 1; z <= 2 * W - 1; ++z) {
            double p = kernel.pmf(z);
            ker[static_cast<size_t>(z)] = p;
            ker[static_cast<size_t>(plan.M - z)] = p;
        }
        plan.load_spectrum(ker);

        diag_same.resize(len);
        diag_opp.resize(len);
        diag_in.resize(len);
        for (int64_t i = 0; i < 2 * W; ++i) {
            int64_t x = i - W;
            int64_t d = (x >= 0) ? x : -x - 1;  // distance to the facing side
            double cross = kernel.one_sided_tail(d);
            double ds = 1.0 - cross - kernel.one_sided_tail(W - 1 - d);
            double dopp = cross - kernel.one_sided_tail(W + d);
            diag_same[static_cast<size_t>(i)] = ds;
            diag_opp[static_cast<size_t>(i)] = dopp;
            diag_in[static_cast<size_t>(i)] = ds + dopp;
        }

        if (kind == BarrierKind::Thin) {
            for (int64_t x = -W; x < 0; ++x)
                for (int64_t y = 0; y < W; ++y)
                    if (barrier.is_slow(x, y)) bonds.push_back({x + W, y + W, kernel.pmf(y - x)});
            if (bonds.size() > static_cast<size_t>(64 * W))
                throw std::domain_error("solve_hydro: thin set too dense for the window solver");
        }

        half.resize(len);
        conv_a.resize(len);
        conv_b.resize(len);
    }

    void apply(const std::vector<double>& rho, std::vector<double>& out) {
        size_t len = rho.size();
        size_t w = static_cast<size_t>(W);
        if (kind == BarrierKind::Thick) {
            std::fill(half.begin(), half.end(), 0.0);
            std::copy(rho.begin(), rho.begin() + static_cast<int64_t>(w), half.begin());
            plan.convolve(half, conv_a);  // neighbors on the negative side
            std::fill(half.begin(), half.begin() + static_cast<int64_t>(w), 0.0);
            std::copy(rho.begin() + static_cast<int64_t>(w), rho.end(), half.begin() + static_cast<int64_t>(w));
            plan.convolve(half, conv_b);  // neighbors on the nonnegative side
            for (size_t i = 0; i < len; ++i) {
                double same = (i < w) ? conv_a[i] : conv_b[i];
                double opp = (i < w) ? conv_b[i] : conv_a[i];
                out[i] = rate * (same + s * opp - (diag_same[i] + s * diag_opp[i]) * rho[i]);
            }
            return;
        }
        plan.convolve(rho, conv_a);
        for (size_t i = 0; i < len; ++i) out[i] = rate * (conv_a[i] - diag_in[i] * rho[i]);
        double amp = rate * (s - 1.0);
        for (const ThinBond& b : bonds) {
            double flow = b.p * (rho[static_cast<size_t>(b.iy)] - rho[static_cast<size_t>(b.ix)]);
            out[static_cast<size_t>(b.ix)] += amp * flow;
            out[static_cast<size_t>(b.iy)] -= amp * flow;
        }
    }
};

// ring of M sites with the kernel wrapped around the period
struct RingOp {
    double rate;
    int64_t M;
    ConvPlan plan;
    double total;
    std::vector<double> conv;

    RingOp(const JumpKernel& kernel, double n, int64_t M_)
        : rate(std::pow(n, kernel.gamma())), M(M_), plan(M_) {
        std::vector<double> q(static_cast<size_t>(M), 0.0);
        double gamma = kernel.gamma();
        double c = kernel.normalization();
        const int J = 256;
        double dm = static_cast<double>(M);
        for (int64_t d = 1; d < M; ++d) {
            KahanSum acc;
            for (int j = 0; j <= J; ++j) acc.add(kernel.pmf(d + j * M));
            for (int j = 1; j <= J; ++j) acc.add(kernel.pmf(j * M - d));
            // midpoint-rule continuation of both arms past J
            double dd = static_cast<double>(d);
            double edge = (static_cast<double>(J) + 0.5) * dm;
            acc.add(c / (gamma * dm) * std::pow(edge + dd, -gamma));
            acc.add(c / (gamma * dm) * std::pow(edge - dd, -gamma));
            q[static_cast<size_t>(d)] = acc.value();
        }
        KahanSum tot;
        for (int64_t d = 1; d < M; ++d) tot.add(q[static_cast<size_t>(d)]);
        total = tot.value();
        plan.load_spectrum(q);
        conv.resize(static_cast<size_t>(M));
    }

    void apply(const std::vector<double>& rho, std::vector<double>& out) {
        plan.convolve(rho, conv);
        for (size_t i = 0; i < rho.size(); ++i) out[i] = rate * (conv[i] - total * rho[i]);
    }
};

template <typename Op>
void rk4_advance(Op& op, std::vector<double>& rho, double span, double dt_cap,
                 std::vector<std::vector<double>>& scratch) {
    if (!(span > 0.0)) return;
    int64_t steps = static_cast<int64_t>(std::ceil(span / dt_cap - 1e-12));
    if (steps < 1) steps = 1;
    double dt = span / static_cast<double>(steps);
    size_t len = rho.size();
    auto& k1 = scratch[0];
    auto& k2 = scratch[1];
    auto& k3 = scratch[2];
    auto& k4 = scratch[3];
    auto& tmp = scratch[4];
    for (int64_t st = 0; st < steps; ++st) {
        op.apply(rho, k1);
        for (size_t i = 0; i < len; ++i) tmp[i] = rho[i] + 0.5 * dt * k1[i];
        op.apply(tmp, k2);
        for (size_t i = 0; i < len; ++i) tmp[i] = rho[i] + 0.5 * dt * k2[i];
        op.apply(tmp, k3);
        for (size_t i = 0; i < len; ++i) tmp[i] = rho[i] + dt * k3[i];
        op.apply(tmp, k4);
        for (size_t i = 0; i < len; ++i)
            rho[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::string equation_name(Equation e) {
    switch (e) {
        case Equation::FullLineFractional: return "full_line_fractional";
        case Equation::MixedKappa: return "mixed_kappa";
        case Equation::FractionalNeumann: return "fractional_neumann";
        case Equation::FractionalRobin: return "fractional_robin";
        case Equation::RegionalNoUniq: return "regional_no_uniqueness";
    }
    return "?";
}

RegimeSpec classify_regime(double gamma, const BarrierSpec& barrier) {
    if (gamma == 2.0) throw std::domain_error("classify_regime: gamma = 2 scaling unsupported");
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("classify_regime: gamma outside (0,2)");
    RegimeSpec r;
    r.gamma = gamma;
    if (barrier.kind != BarrierKind::None) {
        if (!(barrier.alpha > 0.0)) throw std::domain_error("classify_regime: alpha must be positive");
        if (!(barrier.beta >= 0.0)) throw std::domain_error("classify_regime: beta must be nonnegative");
    }
    if (barrier.kind == BarrierKind::Thin) {
        if (!barrier.thin_pred) throw std::domain_error("classify_regime: thin set needs a predicate");
        if (!(barrier.delta >= 0.0 && barrier.delta <= 1.0) || !(barrier.delta > gamma - 1.0))
            throw std::domain_error("classify_regime: thin exponent must lie in [0,1] and exceed gamma-1");
    }
    bool halfline_class = gamma > 1.0;  // independent halves when gamma in (1,2), vanishing near 0 otherwise
    if (barrier.kind != BarrierKind::Thick) {
        r.equation = Equation::FullLineFractional;
        r.test_class = TestClass::Smooth;
        return r;
    }
    if (barrier.beta == 0.0) {
        if (barrier.alpha == 1.0) {
            r.equation = Equation::FullLineFractional;
            r.test_class = TestClass::Smooth;
        } else {
            r.equation = Equation::MixedKappa;
            r.kappa = barrier.alpha;
            r.test_class = halfline_class ? TestClass::Smooth : TestClass::VanishNearZero;
        }
        return r;
    }
    if (gamma <= 1.0) {
        r.equation = Equation::FractionalNeumann;
        r.test_class = TestClass::VanishNearZero;
        return r;
    }
    if (near(barrier.beta, gamma - 1.0)) {
        r.equation = Equation::FractionalRobin;
        r.kappa = barrier.alpha * mean_jump(gamma);
        r.test_class = TestClass::TwoSided;
    } else if (barrier.beta > gamma - 1.0) {
        r.equation = Equation::FractionalNeumann;
        r.test_class = TestClass::TwoSided;
    } else {
        r.equation = Equation::RegionalNoUniq;
        r.test_class = TestClass::TwoSidedMatched;
    }
    return r;
}

std::string regime_json(const RegimeSpec& r) {
    std::string out = "{\"equation\":\"" + equation_name(r.equation) + "\"";
    out += ",\"gamma\":" + fmt_double(r.gamma);
    out += ",\"kappa\":" + fmt_double(r.kappa);
    out += ",\"test_class\":\"" + test_class_name(r.test_class) + "\"}";
    return out;
}

const GridFunction& HydroSolution::at_time(double t) const {
    for (size_t i = 0; i < times.size(); ++i)
        if (near(times[i], t)) return density[i];
    throw std::out_of_range("at_time: not a snapshot time");
}

HydroSolution solve_hydro(const RegimeSpec& regime, const std::function<double(double)>& g, double T,
                          int n_grid, const BarrierSpec& barrier, std::vector<double> times,
                          const SolveOptions& opts) {
    double gamma = regime.gamma;
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("solve_hydro: gamma outside (0,2)");
    if (!(T >= 0.0)) throw std::domain_error("solve_hydro: negative horizon");
    if (n_grid < 1) throw std::domain_error("solve_hydro: n_grid must be positive");

    JumpKernel kernel(gamma, 4096);
    barrier.validate(kernel);
    if (classify_regime(gamma, barrier).equation != regime.equation)
        throw std::domain_error("solve_hydro: regime does not match the barrier");
    if (opts.periodic && barrier.kind != BarrierKind::None)
        throw std::domain_error("solve_hydro: periodic mode has no barrier");

    double n = static_cast<double>(n_grid);
    int64_t W = opts.window > 0 ? opts.window : 8 * static_cast<int64_t>(n_grid);
    if (2 * W > (int64_t{1} << 22)) throw std::domain_error("solve_hydro: window above memory budget");

    double rate_cap = std::pow(n, gamma) * barrier.max_weight(n);
    double dt = opts.dt;
    if (dt == 0.0) {
        dt = 0.2 / rate_cap;
    } else if (dt > 1.25 / rate_cap) {
        char msg[128];
        std::snprintf(msg, sizeof(msg), "solve_hydro: step %g unstable at this rate; use dt <= %.9g", dt,
                      1.25 / rate_cap);
        throw std::runtime_error(msg);
    }
    if (!(dt > 0.0)) throw std::domain_error("solve_hydro: step must be positive");
    if (T / dt > 5e7) throw std::domain_error("solve_hydro: step count above budget");

    if (times.empty()) times = (T > 0.0) ? std::vector<double>{0.0, 0.25 * T, 0.5 * T, 0.75 * T, T}
                                         : std::vector<double>{0.0};
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > T + 1e-12) throw std::domain_error("solve_hydro: snapshot outside [0,T]");
        if (i > 0 && !(times[i] > times[i - 1])) throw std::domain_error("solve_hydro: snapshot times must increase");
    }

    GridFunction rho0 = GridFunction::sample(g, -static_cast<double>(W) / n, static_cast<double>(W) / n,
                                             static_cast<size_t>(2 * W));
    for (double v : rho0.v)
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("solve_hydro: profile must map into [0,1]");

    HydroSolution sol;
    sol.regime = regime;
    sol.n = n;
    sol.W = W;
    sol.periodic = opts.periodic;
    sol.times = times;

    std::vector<double> rho = rho0.v;
    std::vector<std::vector<double>> scratch(5, std::vector<double>(rho.size()));
    auto record = [&]() {
        GridFunction snap = rho0;
        snap.v = rho;
        sol.density.push_back(std::move(snap));
    };

    double now = 0.0;
    if (opts.periodic) {
        RingOp op(kernel, n, 2 * W);
        for (double target : times) {
            rk4_advance(op, rho, target - now, dt, scratch);
            now = target;
            record();
        }
    } else {
        WindowOp op(kernel, barrier, n, W);
        for (double target : times) {
            rk4_advance(op, rho, target - now, dt, scratch);
            now = target;
            record();
        }
    }
    return sol;
}

OriginTraces origin_traces(const GridFunction& rho, int cells_per_side) {
    if (cells_per_side < 1) throw std::domain_error("origin_traces: need at least one cell");
    double split_f = -rho.a / rho.h;
    int64_t split = std::llround(split_f);
    if (std::abs(split_f - static_cast<double>(split)) > 1e-9)
        throw std::domain_error("origin_traces: grid has no cell edge at the origin");
    int64_t k = cells_per_side;
    if (split - k < 0 || split + k > static_cast<int64_t>(rho.cells()))
        throw std::domain_error("origin_traces: trace block leaves the grid");
    OriginTraces t;
    for (int64_t i = split - k; i < split; ++i) t.left += rho.v[static_cast<size_t>(i)];
    for (int64_t i = split; i < split + k; ++i) t.right += rho.v[static_cast<size_t>(i)];
    t.left /= static_cast<double>(k);
    t.right /= static_cast<double>(k);
    return t;
}

namespace {

bool class_admissible(WeakForm form, double gamma, TestClass cls) {
    switch (form) {
        case WeakForm::FrDif: return cls == TestClass::Smooth;
        case WeakForm::FrRob:
            if (gamma > 1.0) return true;  // any two-sided split, globally smooth included
            return cls == TestClass::VanishNearZero;
        case WeakForm::FrDif2:
            if (gamma > 1.0) return cls == TestClass::Smooth;
            return cls == TestClass::VanishNearZero;
    }
    return false;
}

// far-field contribution of the operator pairing with the density frozen at g
double exterior_operator_pairing(const TestFunctionSpec& G, const std::function<double(double)>& g,
                                 double edge, double gamma, WeakForm form, double kappa) {
    const double step = 0.25, horizon = 64.0;
    KahanSum acc;
    for (double lo = edge; lo < horizon; lo += step) {
        double u = lo + 0.5 * step;
        for (double sgn : {1.0, -1.0}) {
            double opv;
            switch (form) {
                case WeakForm::FrDif: opv = frac_laplacian(G, sgn * u, gamma); break;
                case WeakForm::FrRob: opv = regional_frac_laplacian(G, sgn * u, gamma); break;
                default:
                    opv = kappa * frac_laplacian(G, sgn * u, gamma) +
                          (1.0 - kappa) * regional_frac_laplacian(G, sgn * u, gamma);
            }
            acc.add(step * g(sgn * u) * opv);
        }
    }
    return acc.value();
}

}  // namespace

double weak_residual(const HydroSolution& sol, const TestFunctionSpec& G,
                     const std::function<double(double)>& g, double kappa, double t, WeakForm form) {
    if (sol.periodic) throw std::domain_error("weak_residual: needs a line solution");
    double gamma = sol.regime.gamma;
    if (!class_admissible(form, gamma, G.cls())) throw std::domain_error("weak_residual: test class mismatch");
    if (sol.times.empty() || !near(sol.times[0], 0.0))
        throw std::domain_error("weak_residual: snapshot ladder must start at 0");
    size_t last = sol.times.size();
    for (size_t i = 0; i < sol.times.size(); ++i)
        if (near(sol.times[i], t)) last = i;
    if (last == sol.times.size()) throw std::domain_error("weak_residual: t is not a snapshot time");

    const GridFunction& grid = sol.density[0];
    double h = grid.h;
    double edge = -grid.a;
    if (G.support_radius() > edge - 2.0 * h)
        throw std::domain_error("weak_residual: window too small for the test function support");

    size_t cells = grid.cells();
    std::vector<double> shape(cells), opfield(cells);
    for (size_t i = 0; i < cells; ++i) {
        double u = grid.center(i);
        shape[i] = G.shape(u);
        switch (form) {
            case WeakForm::FrDif: opfield[i] = frac_laplacian(G, u, gamma); break;
            case WeakForm::FrRob: opfield[i] = regional_frac_laplacian(G, u, gamma); break;
            default:
                opfield[i] = kappa * frac_laplacian(G, u, gamma) +
                             (1.0 - kappa) * regional_frac_laplacian(G, u, gamma);
        }
    }
    double ext = exterior_operator_pairing(G, g, edge, gamma, form, kappa);

    KahanSum final_pair;
    const GridFunction& rho_t = sol.density[last];
    for (size_t i = 0; i < cells; ++i) final_pair.add(rho_t.v[i] * shape[i]);
    KahanSum init_pair;
    for (size_t i = 0; i < cells; ++i) init_pair.add(g(grid.center(i)) * shape[i]);
    double result = G.tp(t) * h * final_pair.value() - G.tp(0.0) * h * init_pair.value();

    // trapezoid in s over the snapshot ladder up to t
    std::vector<double> inner(last + 1), jumps(last + 1);
    for (size_t j = 0; j <= last; ++j) {
        double sj = sol.times[j];
        KahanSum space;
        const GridFunction& rho = sol.density[j];
        double tp = G.tp(sj), dtp = G.dtp(sj);
        for (size_t i = 0; i < cells; ++i) space.add(rho.v[i] * (tp * opfield[i] + dtp * shape[i]));
        inner[j] = h * space.value() + tp * ext;
        if (form == WeakForm::FrRob) {
            OriginTraces tr = origin_traces(rho, kTraceCells);
            jumps[j] = (tr.right - tr.left) * tp * (G.right().f(0.0) - G.left().f(0.0));
        }
    }
    KahanSum timeterm;
    for (size_t j = 0; j + 1 <= last; ++j)
        timeterm.add(0.5 * (sol.times[j + 1] - sol.times[j]) * (inner[j] + inner[j + 1]));
    result -= timeterm.value();

    if (form == WeakForm::FrRob && gamma > 1.0 && gamma < 2.0) {
        KahanSum bterm;
        for (size_t j = 0; j + 1 <= last; ++j)
            bterm.add(0.5 * (sol.times[j + 1] - sol.times[j]) * (jumps[j] + jumps[j + 1]));
        result += kappa * bterm.value();
    }
    return result;
}

namespace {

// least-squares fit v ~ b0 + b1 |u|^{gamma-1} over the given cells
void layer_fit(const GridFunction& rho, int64_t lo, int64_t hi, double gamma, double& b0, double& b1) {
    double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
    for (int64_t i = lo; i < hi; ++i) {
        double phi = std::pow(std::abs(rho.center(static_cast<size_t>(i))), gamma - 1.0);
        double y = rho.v[static_cast<size_t>(i)];
        s00 += 1.0;
        s01 += phi;
        s11 += phi * phi;
        r0 += y;
        r1 += phi * y;
    }
    double det = s00 * s11 - s01 * s01;
    b1 = (s00 * r1 - s01 * r0) / det;
    b0 = (r0 - b1 * s01) / s00;
}

}  // namespace

BoundaryDiagnostics boundary_condition_check(const HydroSolution& sol, double t) {
    Equation eq = sol.regime.equation;
    if (eq != Equation::FractionalRobin && eq != Equation::FractionalNeumann && eq != Equation::RegionalNoUniq)
        throw std::domain_error("boundary_condition_check: regime has no layer condition");
    double gamma = sol.regime.gamma;
    if (!(gamma > 1.0 && gamma < 2.0))
        throw std::domain_error("boundary_condition_check: layer exponent needs gamma in (1,2)");
    const GridFunction& rho = sol.at_time(t);
    double split_f = -rho.a / rho.h;
    int64_t split = std::llround(split_f);
    int64_t layer = std::llround(0.25 / rho.h);
    if (layer < 8 || split - layer < 0 || split + layer > static_cast<int64_t>(rho.cells()))
        throw std::domain_error("boundary_condition_check: layer needs at least 8 cells per side");

    auto side_derivative = [&](bool right, int64_t cells_used, double& b0_out) {
        double b0, b1;
        if (right)
            layer_fit(rho, split, split + cells_used, gamma, b0, b1);
        else
            layer_fit(rho, split - cells_used, split, gamma, b0, b1);
        b0_out = b0;
        double d = b1 * (gamma - 1.0);
        return right ? -d : d;
    };

    BoundaryDiagnostics out;
    double b0r = 0, b0l = 0, b0h = 0;
    out.d_plus = side_derivative(true, layer, b0r);
    out.d_minus = side_derivative(false, layer, b0l);
    out.jump = b0r - b0l;
    double scale_floor = 1e-6;
    double dp_half = side_derivative(true, layer / 2, b0h);
    double dm_half = side_derivative(false, layer / 2, b0h);
    out.converged = std::abs(dp_half - out.d_plus) <= 0.2 * std::max(std::abs(out.d_plus), std::abs(dp_half)) + scale_floor &&
                    std::abs(dm_half - out.d_minus) <= 0.2 * std::max(std::abs(out.d_minus), std::abs(dm_half)) + scale_floor;
    out.ratio = std::abs(out.jump) > 1e-10 ? out.d_plus / out.jump : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double continuity_at_origin_check(const HydroSolution& sol) {
    if (sol.regime.equation != Equation::RegionalNoUniq)
        throw std::domain_error("continuity_at_origin_check: side condition applies to the regional regime");
    double sup = 0.0, cum = 0.0;
    double prev_t = sol.times.empty() ? 0.0 : sol.times[0];
    double prev_j = 0.0;
    for (size_t i = 0; i < sol.times.size(); ++i) {
        OriginTraces tr = origin_traces(sol.density[i], kTraceCells);
        double j = tr.right - tr.left;
        if (i > 0) cum += 0.5 * (sol.times[i] - prev_t) * (prev_j + j);
        sup = std::max(sup, std::abs(cum));
        prev_t = sol.times[i];
        prev_j = j;
    }
    return sup;
}

void write_hydro_csv(std::ostream& os, const HydroSolution& sol, const CsvMeta& meta) {
    write_meta_line(os, meta);
    os << "time,site,u,rho\n";
    for (size_t j = 0; j < sol.times.size(); ++j) {
        const GridFunction& rho = sol.density[j];
        for (size_t i = 0; i < rho.cells(); ++i) {
            int64_t site = static_cast<int64_t>(i) - sol.W;
            os << fmt_double(sol.times[j]) << "," << site << ","
               << fmt_double(static_cast<double>(site) / sol.n) << "," << fmt_double(rho.v[i]) << "\n";
        }
    }
}

}  // namespace fracsep
