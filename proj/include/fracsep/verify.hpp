#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracsep/barrier.hpp"
#include "fracsep/csvio.hpp"
#include "fracsep/fracops.hpp"
#include "fracsep/kernel.hpp"
#include "fracsep/pde.hpp"
#include "fracsep/process.hpp"
#include "fracsep/testfn.hpp"

namespace fracsep {

// Exact finite-state model of the swap dynamics on a contiguous site block.
// State bit i holds the occupancy of sites[i]; the generator is the unspeeded
// one (no n^gamma factor), n enters only through the slow-bond weight.
struct SmallSystem {
    std::vector<int64_t> sites;  // ascending, at most 12
    double gamma = 0.0;
    double n = 1.0;
    BarrierSpec barrier;

    struct Bond {
        size_t i = 0, j = 0;  // indices into sites, i < j
        double weight = 0.0;  // p(y-x) times the slow factor; unordered swap rate
        bool slow = false;
    };
    std::vector<Bond> bonds;

    static SmallSystem contiguous(int64_t lo, int64_t hi, double gamma, const BarrierSpec& barrier,
                                  double n);

    size_t site_count() const { return sites.size(); }
    size_t state_count() const { return size_t{1} << sites.size(); }
    bool contains_site(int64_t x) const;

    // product Bernoulli(a) weight of a state
    double measure(uint32_t state, double a) const;

    // dense row-major rate matrix; rows sum to 0, off-diagonals >= 0.
    // right_bias > 0 multiplies every rightward particle move by (1 + right_bias),
    // a deliberately irreversible fixture for negative controls.
    std::vector<double> generator_matrix(double right_bias = 0.0) const;
};

// max over state pairs of |nu_a(s) Q(s,s') - nu_a(s') Q(s',s)|
double detailed_balance_check(const SmallSystem& sys, double a, double right_bias = 0.0);

struct DirichletParts {
    double fast = 0.0;
    double slow = 0.0;
    double total() const { return fast + slow; }
};

// sum over bonds of weight * I_bond(sqrt f) where
// I_bond = sum_s nu_a(s) [sqrt f(s^bond) - sqrt f(s)]^2; f must be a
// probability density with respect to nu_a (f >= 0, sum f nu_a = 1)
DirichletParts dirichlet_form(const std::vector<double>& f, double a, const SmallSystem& sys);

// -2 <L sqrt f, sqrt f>_{nu_a} via per-bond generator application; agrees with
// dirichlet_form(...).total() to rounding by reversibility
double generator_quadratic_form(const std::vector<double>& f, double a, const SmallSystem& sys);

// random density with respect to nu_a (positive, normalized)
std::vector<double> random_density(const SmallSystem& sys, double a, Rng& rng);

struct MovingParticleResult {
    double max_ratio = 0.0;       // worst sampled (dyadic pair sum) / D_n
    double max_ratio_fast = 0.0;  // same numerator over the fast part alone
    uint64_t used = 0;
    uint64_t skipped = 0;         // densities with both sides zero
    bool contradiction = false;   // zero D_n against nonzero numerator
};

// samples random densities and maximizes
//   sum_{i=1..M} sum_{y=1..l_{i-1}} I_{y, y+l_{i-1}} / l_{i-1}^gamma
// over D_n, with l_i = 2^i ell0; requires sites {1, ..., 2^M ell0}
MovingParticleResult moving_particle_check(int64_t ell0, int M, uint64_t samples, const SmallSystem& sys,
                                           double a, uint64_t seed);

struct ComparisonEntry {
    int64_t n = 0;
    std::string test_fn;
    double time = 0.0;
    double sim_mean = 0.0;
    double ci_half = 0.0;  // 1.96 * stderr over replicas
    double pde_value = 0.0;
    double discrepancy = 0.0;  // |sim_mean - pde_value|
};

struct ComparisonReport {
    double gamma = 0.0;
    uint64_t replicas = 0;
    std::vector<int64_t> n_list;
    std::vector<ComparisonEntry> entries;       // ordered by (n, test_fn, time)
    std::vector<double> sup_discrepancy;        // per n, sup over (test_fn, time)
    std::vector<double> sup_ci;                 // per n, CI at the sup entry
    bool partial = false;                       // an event budget was exhausted
    bool decreasing = false;                    // sup_discrepancy strictly decreases
    double final_sup() const { return sup_discrepancy.empty() ? 0.0 : sup_discrepancy.back(); }
};

struct CompareOptions {
    double box_radius = 8.0;       // simulation window [-box*n, box*n)
    int64_t n_pde = 512;           // grid for the reference solve
    std::vector<double> times;     // default {T/4, T/2, 3T/4, T}
    int threads = 1;
    uint64_t seed = 1;
    uint64_t max_events = uint64_t{1} << 33;
    // solve against a different barrier (mismatched-equation negative control)
    std::optional<BarrierSpec> pde_barrier;
    // labels for the report, parallel to G_set; default G0, G1, ...
    std::vector<std::string> g_names;
};

// replica ensemble of the particle system against the deterministic solve;
// results are bit-identical for a fixed seed regardless of thread count
ComparisonReport hydro_compare(double gamma, const BarrierSpec& barrier,
                               const std::function<double(double)>& g,
                               const std::vector<TestFunctionSpec>& G_set,
                               const std::vector<int64_t>& n_list, uint64_t replicas, double T,
                               const CompareOptions& opts = {});

void write_comparison_csv(std::ostream& os, const ComparisonReport& r, const CsvMeta& meta);
void write_comparison_json(std::ostream& os, const ComparisonReport& r);

struct CrossingFit {
    double beta = 0.0;
    double slope = 0.0;      // log2-log2 fit of mean(crossings/n) against n
    double intercept = 0.0;
    std::vector<double> mean_per_n;       // unsigned crossings / n, replica mean
    std::vector<double> predicted_per_n;  // 2 alpha m a(1-a) T n^{gamma-1-beta}
    bool degenerate = false;              // no crossings at some n
};

struct CrossingOptions {
    double a = 0.5;
    double box_radius = 4.0;
    int threads = 1;
    uint64_t seed = 1;
    uint64_t max_events = uint64_t{1} << 33;
};

// equilibrium start, thick barrier; counts unsigned origin crossings over the
// macro horizon T and fits the scaling exponent per beta (expected gamma-1-beta)
std::vector<CrossingFit> crossing_scaling_check(double gamma, double alpha,
                                                const std::vector<double>& beta_list,
                                                const std::vector<int64_t>& n_list, double T,
                                                uint64_t replicas, const CrossingOptions& opts = {});

void write_crossing_csv(std::ostream& os, const std::vector<CrossingFit>& fits, const CsvMeta& meta);

struct SeminormFiniteness {
    double full_line = 0.0;  // time integrals of the squared seminorm, t > 0
    double left_half = 0.0;
    double right_half = 0.0;
    bool full_divergent = false;  // refinement diagnostic at the final time
    bool left_divergent = false;
    bool right_divergent = false;
};

// integrates sobolev_seminorm of rho(t) - a over the positive snapshot times
SeminormFiniteness seminorm_finiteness_check(const HydroSolution& sol, double a);

}  // namespace fracsep
