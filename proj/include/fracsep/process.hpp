#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fracsep/barrier.hpp"
#include "fracsep/csvio.hpp"
#include "fracsep/kernel.hpp"
#include "fracsep/rng.hpp"

namespace fracsep {

enum class Side { Left, Right };

// occupancy on the site window [-W, W)
struct Configuration {
    int64_t W = 0;
    std::vector<uint8_t> occ;        // 2W flags
    std::vector<int64_t> particles;  // occupied sites, move-order
    std::vector<int32_t> slot;       // site index -> position in particles, or -1

    static Configuration empty(int64_t W);

    size_t index(int64_t x) const { return static_cast<size_t>(x + W); }
    bool in_window(int64_t x) const { return x >= -W && x < W; }
    bool occupied(int64_t x) const { return occ[index(x)] != 0; }
    size_t particle_count() const { return particles.size(); }

    void add_particle(int64_t x);
    void move_particle(int64_t from, int64_t to);

    // mean occupancy of the ell sites strictly right (base+1..base+ell) or
    // strictly left (base-ell..base-1) of base
    double block_average(int64_t base, int64_t ell, Side side) const;
};

// independent Bernoulli(profile(x/n)) occupancies, ascending site order
Configuration sample_initial(const std::function<double(double)>& profile, double n, int64_t W, Rng& rng);

// rate attributed to the ordered pair (x,y): (1/2) p(x-y) xi. The unordered
// bond {x,y} fires at twice this value.
double transition_rate(const Configuration& cfg, int64_t x, int64_t y, const JumpKernel& kernel,
                       const BarrierSpec& barrier, double n);

struct Snapshot {
    double time = 0.0;
    int64_t signed_crossings = 0;   // left-to-right minus right-to-left
    uint64_t total_crossings = 0;   // both directions
    std::vector<uint64_t> bits;     // packed occupancy, 2W bits
};

struct TrajectoryObservation {
    double gamma = 0.0;
    double n = 0.0;
    int64_t W = 0;
    uint64_t proposals = 0;
    uint64_t accepted = 0;
    std::vector<Snapshot> snapshots;

    Configuration configuration_at(size_t i) const;
};

struct SimulateOptions {
    uint64_t max_events = uint64_t{1} << 33;
};

// Thinned kinetic Monte Carlo at time scale n^gamma. Every particle proposes
// at rate n^gamma * max(1, alpha n^-beta); a proposal draws a jump from the
// kernel and is accepted with probability weight/envelope. Rejections (target
// outside the window, target occupied, thinning) advance time. Snapshots are
// taken at the exact schedule times.
TrajectoryObservation simulate(const Configuration& init, const JumpKernel& kernel, const BarrierSpec& barrier,
                               double n, const std::vector<double>& schedule, Rng& rng,
                               const SimulateOptions& opts = {});

// (1/n) sum_x eta(x) f(x/n) for f supported in [-support_b, support_b];
// throws if the window clips the support
double empirical_pairing(const Configuration& cfg, double n, const std::function<double(double)>& f,
                         double support_b);

void write_trajectory_bin(std::ostream& os, const TrajectoryObservation& obs);
TrajectoryObservation read_trajectory_bin(std::istream& is);

// rows: time,site for every occupied site
void write_trajectory_csv(std::ostream& os, const TrajectoryObservation& obs, const CsvMeta& meta);

}  // namespace fracsep
